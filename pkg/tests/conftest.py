import pytest

from stylo.annotate import annotate_with_builtin_tagger
from stylo.corpus import SplitSpec, train_test_split
from stylo.features import (
    BlockConfig,
    EmbeddingBlockConfig,
    FeaturePipeline,
    PipelineConfig,
)
from stylo.rng import SplitMix64, derive_seed
from stylo.synth import generate_corpus
from stylo.vectors import SparseVector

SYNTH_SEED = 42


def synth_pipeline_config():
    """The feature setup the bundled synthetic experiments use."""
    return PipelineConfig(
        word_bow=BlockConfig(min_df=2, n_min=1, n_max=1),
        word_tfidf=BlockConfig(min_df=2, n_min=1, n_max=1),
        char_bow=BlockConfig(min_df=2, max_features=3000, n_min=1, n_max=4),
        pos_bow=BlockConfig(min_df=2, n_min=1, n_max=4),
        embedding=EmbeddingBlockConfig(dim=16),
    )


@pytest.fixture(scope="session")
def synth_featurized():
    """Synthetic 2-class corpus (n=600, 60/40) featurized once per session.

    Returns (train Dataset, test Dataset, x_train, x_test, label_space).
    """
    dataset, embeddings = generate_corpus("2class", seed=SYNTH_SEED, n=600)
    train, test = train_test_split(dataset, SplitSpec(0.66, derive_seed(SYNTH_SEED, 4)))
    annotations = {
        inst.id: annotate_with_builtin_tagger(inst.id, inst.text)
        for inst in dataset.instances
    }
    pipeline = FeaturePipeline(synth_pipeline_config()).fit(train, annotations, embeddings)
    x_train = pipeline.transform(train, annotations, embeddings)
    x_test = pipeline.transform(test, annotations, embeddings)
    return train, test, x_train, x_test, dataset.label_space


def random_sparse_rows(seed, n, dim, density=0.5, scale=2.0, integer=False):
    """Deterministic random SparseVectors for classifier tests."""
    rng = SplitMix64(seed)
    rows = []
    for _ in range(n):
        vals = {}
        for j in range(dim):
            if rng.next_unit() < density:
                if integer:
                    v = float(rng.next_below(5))
                else:
                    v = round(rng.next_uniform(-scale, scale), 3)
                if v != 0.0:
                    vals[j] = v
        rows.append(SparseVector.from_dict(dim, vals))
    return rows
