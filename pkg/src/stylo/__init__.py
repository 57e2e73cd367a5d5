"""stylo: stylometric text classification toolkit.

Feature families (word/char/POS bag-of-words, TF-IDF, morphological
features, external embeddings), eight classifiers trained from scratch,
and an evaluation harness with deterministic, file-based interchange
formats throughout.
"""

from .annotate import (
    AnnotatedSentence,
    NgramMultiset,
    Token,
    builtin_pos_tag,
    char_ngrams,
    group_by_instance,
    load_conllu,
    morph_feature_counts,
    pos_ngrams,
    tokenize,
    word_counts,
    write_conllu,
)
from .corpus import (
    Dataset,
    Instance,
    LabelSpace,
    RecordSchema,
    SplitSpec,
    class_distribution,
    load_dataset,
    save_dataset_tsv,
    train_test_split,
)
from .errors import ConfigError, DataError, StyloError
from .features import (
    BlockConfig,
    EmbeddingBlockConfig,
    FeaturePipeline,
    IdfWeights,
    PipelineConfig,
    Vocabulary,
    fit_idf,
    fit_vocabulary,
    load_embeddings,
    save_embeddings,
    transform_tfidf,
    vectorize_counts,
)
from .eval import (
    ConfusionMatrix,
    EvaluationReport,
    TimingRecord,
    accuracy,
    confusion,
    evaluate,
    macro_f1,
    mae_ordinal,
    prf_per_class,
    time_phase,
    weighted_f1,
)
from .vectors import SparseVector

__version__ = "0.1.0"
