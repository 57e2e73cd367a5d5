"""Bundled synthetic corpora: a desk-scale stand-in for shared-task data
that is not redistributable.

Each class writes with a different "style": its own mixture of function
words, topical markers, punctuation habits, digit usage and sentence
lengths, so bag-of-words, character n-gram and POS features all carry
class signal. Everything is driven by the toolkit PRNG; a fixed seed
reproduces the corpus byte for byte.

Two variants: a 2-class subjective/objective corpus with a 60/40 class
balance, and a 3-class ordinal left/center/right corpus (30/40/30).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Dataset, Instance, LabelSpace, SplitSpec, save_dataset_tsv, train_test_split
from .errors import DataError
from .features import save_embeddings
from .rng import SplitMix64, derive_seed

_SHARED_FUNCTION = (
    "the a an of in on at by for with from and or but is are was were has "
    "have had will would as to that this it not"
).split()

_SHARED_CONTENT = (
    "government report city country market school police minister election "
    "budget team water road hospital plan decision project law court leader "
    "people workers families economy policy health energy week month year "
    "company president parliament party vote deal talks growth rate prices "
    "jobs news article statement"
).split()


@dataclass(frozen=True)
class StyleProfile:
    label: str
    function_tilt: list[str]
    markers: list[str]
    mix: tuple[float, float, float, float]  # shared-function, tilt, content, marker
    sentence_words: tuple[int, int]
    sentences: tuple[int, int]
    comma_rate: float
    exclaim_rate: float
    question_rate: float
    number_rate: float


PROFILE_OBJ = StyleProfile(
    label="OBJ",
    function_tilt="according said reported stated announced percent officials data figures committee".split(),
    markers=(
        "confirmed published approved signed met increased declined review "
        "analysis process spokesman agency council ministry quarter survey "
        "results national federal regional annual"
    ).split(),
    mix=(0.38, 0.14, 0.30, 0.18),
    sentence_words=(12, 22),
    sentences=(1, 2),
    comma_rate=0.10,
    exclaim_rate=0.0,
    question_rate=0.01,
    number_rate=0.12,
)

PROFILE_SUBJ = StyleProfile(
    label="SUBJ",
    function_tilt="i you my your really very just so honestly frankly truly totally".split(),
    markers=(
        "terrible wonderful awful amazing brilliant outrageous disgraceful "
        "shameful love hate believe feel think mess disgrace scandal triumph "
        "absurd ridiculous fantastic horrible pathetic glorious unbelievable"
    ).split(),
    mix=(0.32, 0.20, 0.18, 0.30),
    sentence_words=(6, 16),
    sentences=(1, 3),
    comma_rate=0.16,
    exclaim_rate=0.30,
    question_rate=0.12,
    number_rate=0.01,
)

PROFILE_LEFT = StyleProfile(
    label="left",
    function_tilt="we our must should everyone together public".split(),
    markers=(
        "workers unions equality welfare community solidarity climate justice "
        "rights inequality austerity exploitation housing healthcare wages "
        "collective dignity grassroots"
    ).split(),
    mix=(0.36, 0.12, 0.26, 0.26),
    sentence_words=(10, 19),
    sentences=(1, 2),
    comma_rate=0.14,
    exclaim_rate=0.08,
    question_rate=0.04,
    number_rate=0.04,
)

PROFILE_CENTER = StyleProfile(
    label="center",
    function_tilt="according both however while whether meanwhile".split(),
    markers=(
        "committee compromise review analysis process balanced assessment "
        "negotiation framework consultation stakeholders procedure moderate "
        "bipartisan technical findings"
    ).split(),
    mix=(0.40, 0.12, 0.30, 0.18),
    sentence_words=(14, 24),
    sentences=(1, 2),
    comma_rate=0.18,
    exclaim_rate=0.0,
    question_rate=0.01,
    number_rate=0.10,
)

PROFILE_RIGHT = StyleProfile(
    label="right",
    function_tilt="they them their every real true".split(),
    markers=(
        "business taxes borders security tradition freedom enterprise defense "
        "markets regulation bureaucracy sovereignty patriots heritage order "
        "deficit spending criminals"
    ).split(),
    mix=(0.36, 0.12, 0.26, 0.26),
    sentence_words=(9, 18),
    sentences=(1, 2),
    comma_rate=0.10,
    exclaim_rate=0.10,
    question_rate=0.05,
    number_rate=0.05,
)

TASK2_PROFILES = (PROFILE_OBJ, PROFILE_SUBJ)
TASK2_PREVALENCES = (0.60, 0.40)
TASK3_PROFILES = (PROFILE_LEFT, PROFILE_CENTER, PROFILE_RIGHT)
TASK3_PREVALENCES = (0.30, 0.40, 0.30)

EMBEDDING_DIM = 16


def _cumulative(weights: list[float]) -> list[float]:
    out, acc = [], 0.0
    for w in weights:
        acc += w
        out.append(acc)
    return out


class _StyleSampler:
    def __init__(self, profile: StyleProfile):
        self.profile = profile
        self.pools = [
            _SHARED_FUNCTION,
            profile.function_tilt,
            _SHARED_CONTENT,
            profile.markers,
        ]
        self.mix_cum = _cumulative(list(profile.mix))

    def _word(self, rng: SplitMix64) -> str:
        pool = self.pools[rng.choice_weighted(self.mix_cum)]
        return pool[rng.next_below(len(pool))]

    def sentence(self, rng: SplitMix64) -> str:
        p = self.profile
        lo, hi = p.sentence_words
        n_words = lo + rng.next_below(hi - lo + 1)
        words = []
        for i in range(n_words):
            if rng.next_unit() < p.number_rate:
                words.append(str(rng.next_below(2000) + 1))
            else:
                words.append(self._word(rng))
            if 0 < i < n_words - 1 and rng.next_unit() < p.comma_rate:
                words[-1] += ","
        words[0] = words[0][:1].upper() + words[0][1:]
        u = rng.next_unit()
        if u < p.exclaim_rate:
            closer = "!"
        elif u < p.exclaim_rate + p.question_rate:
            closer = "?"
        else:
            closer = "."
        return " ".join(words) + closer

    def text(self, rng: SplitMix64) -> str:
        lo, hi = self.profile.sentences
        n = lo + rng.next_below(hi - lo + 1)
        return " ".join(self.sentence(rng) for _ in range(n))


def _label_sequence(profiles, prevalences, n: int, rng: SplitMix64) -> list[str]:
    """Exact class counts by largest remainder, then a seeded shuffle."""
    raw = [p * n for p in prevalences]
    counts = [int(x) for x in raw]
    remainders = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in range(n - sum(counts)):
        counts[remainders[i % len(raw)]] += 1
    labels = []
    for profile, count in zip(profiles, counts):
        labels.extend([profile.label] * count)
    rng.shuffle(labels)
    return labels


def generate_corpus(task: str, seed: int, n: int = 600, id_prefix: str = "s",
                    noise_rate: float = 0.08) -> tuple[Dataset, dict[str, np.ndarray]]:
    """Build the labeled Dataset plus a synthetic embedding per instance.

    Embeddings are drawn around per-class centers so the dense block
    carries class signal too (a stand-in for sidecar encoder output).
    ``noise_rate`` controls label noise applied as pairwise swaps between
    classes, which keeps the class prevalences exact while leaving the task
    non-trivial.
    """
    if n < 50:
        raise DataError("synthetic corpus needs n >= 50")
    if not 0.0 <= noise_rate < 0.5:
        raise DataError("noise_rate must be in [0, 0.5)")
    if task == "2class":
        profiles, prevalences = TASK2_PROFILES, TASK2_PREVALENCES
        label_space = LabelSpace(labels=tuple(p.label for p in profiles))
    elif task == "3class":
        profiles, prevalences = TASK3_PROFILES, TASK3_PREVALENCES
        label_space = LabelSpace(
            labels=tuple(p.label for p in profiles),
            ordinal=True,
            ordinal_values={"left": 0, "center": 1, "right": 2},
        )
    else:
        raise DataError(f"unknown synthetic task {task!r} (use 2class or 3class)")

    labels = _label_sequence(profiles, prevalences, n, SplitMix64(derive_seed(seed, 1)))
    samplers = {p.label: _StyleSampler(p) for p in profiles}
    text_rng = SplitMix64(derive_seed(seed, 2))
    emb_rng = SplitMix64(derive_seed(seed, 3))
    centers = {
        p.label: np.array([emb_rng.next_uniform(-1.0, 1.0) for _ in range(EMBEDDING_DIM)])
        for p in profiles
    }
    instances, embeddings = [], {}
    width = len(str(n))
    for i, label in enumerate(labels):
        inst_id = f"{id_prefix}{i:0{width}d}"
        instances.append(Instance(id=inst_id, text=samplers[label].text(text_rng), label=label))
        noise = np.array([emb_rng.next_uniform(-0.9, 0.9) for _ in range(EMBEDDING_DIM)])
        embeddings[inst_id] = centers[label] + noise
    instances = _swap_label_noise(instances, labels, label_space, noise_rate,
                                  SplitMix64(derive_seed(seed, 5)))
    return Dataset(instances, label_space, name=f"synth-{task}"), embeddings


def _swap_label_noise(instances: list[Instance], labels: list[str],
                      label_space: LabelSpace, noise_rate: float,
                      rng: SplitMix64) -> list[Instance]:
    """Swap labels between pairs of differently-labeled instances.

    Swapping keeps every class count exact; the swapped instances keep the
    writing style (and embedding) of their original class.
    """
    n_swaps = round(noise_rate * len(instances) / 2.0)
    if n_swaps == 0:
        return instances
    by_label = {lbl: [i for i, l in enumerate(labels) if l == lbl]
                for lbl in label_space.labels}
    new_labels = list(labels)
    for _ in range(n_swaps):
        pair = rng.sample_indices(len(label_space.labels), 2)
        a_pool = by_label[label_space.labels[pair[0]]]
        b_pool = by_label[label_space.labels[pair[1]]]
        if not a_pool or not b_pool:
            continue
        a = a_pool.pop(rng.next_below(len(a_pool)))
        b = b_pool.pop(rng.next_below(len(b_pool)))
        new_labels[a], new_labels[b] = new_labels[b], new_labels[a]
    return [
        Instance(id=inst.id, text=inst.text, label=lbl)
        for inst, lbl in zip(instances, new_labels)
    ]


@dataclass
class SynthCorpusFiles:
    train_path: Path
    test_path: Path
    embeddings_path: Path
    label_space: LabelSpace


def generate_synthetic_corpus(out_dir: str | Path, seed: int, n: int = 600,
                              task: str = "2class",
                              train_fraction: float = 0.66) -> SynthCorpusFiles:
    """Write train.tsv, test.tsv and embeddings.tsv under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset, embeddings = generate_corpus(task, seed, n)
    train, test = train_test_split(dataset, SplitSpec(train_fraction, derive_seed(seed, 4)))
    train_path = out_dir / "train.tsv"
    test_path = out_dir / "test.tsv"
    emb_path = out_dir / "embeddings.tsv"
    save_dataset_tsv(train, train_path)
    save_dataset_tsv(test, test_path)
    save_embeddings(emb_path, embeddings, EMBEDDING_DIM)
    return SynthCorpusFiles(train_path, test_path, emb_path, dataset.label_space)
