"""Symbol streams for feature extraction: tokens, character/POS n-grams,
morphological feature counts, CoNLL-U ingestion, and a small rule tagger.

Symbol namespaces are pinned so vocabularies built from mixed sources can
never collide:

* ``w:<form>``        word unigrams
* ``c<n>:<gram>``     character n-grams (raw text, spaces included)
* ``p<n>:<t1>_<t2>``  POS n-grams
* ``m:<Feature=Value>`` morphological features
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError

UPOS_TAGS = (
    "ADJ ADP ADV AUX CCONJ DET INTJ NOUN NUM PART "
    "PRON PROPN PUNCT SCONJ SYM VERB X"
).split()


@dataclass(frozen=True)
class Token:
    form: str
    pos: str | None = None
    morph: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.form:
            raise DataError("token form must be nonempty")
        for feat in self.morph:
            if feat.count("=") != 1:
                raise DataError(f"morph entry {feat!r} must contain exactly one '='")


@dataclass
class AnnotatedSentence:
    instance_id: str
    tokens: list[Token]


@dataclass
class NgramMultiset:
    """Counted bag of symbol strings; ``total`` is the sum of all counts."""

    entries: dict[str, int] = field(default_factory=dict)
    total: int = 0

    def add(self, symbol: str, count: int = 1) -> None:
        self.entries[symbol] = self.entries.get(symbol, 0) + count
        self.total += count

    def merge(self, other: "NgramMultiset") -> "NgramMultiset":
        for sym, cnt in other.entries.items():
            self.add(sym, cnt)
        return self


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[Token]:
    """Whitespace tokenization with leading/trailing punctuation split off.

    Internal punctuation (hyphens, apostrophes) stays attached, so
    "left-wing," becomes ["left-wing", ","]. Case is preserved.
    """
    tokens: list[Token] = []
    for chunk in text.split():
        lead: list[str] = []
        trail: list[str] = []
        start, end = 0, len(chunk)
        while start < end and _is_punct(chunk[start]):
            lead.append(chunk[start])
            start += 1
        while end > start and _is_punct(chunk[end - 1]):
            trail.append(chunk[end - 1])
            end -= 1
        tokens.extend(Token(ch) for ch in lead)
        if end > start:
            tokens.append(Token(chunk[start:end]))
        tokens.extend(Token(ch) for ch in reversed(trail))
    return tokens


def word_counts(tokens: list[Token]) -> NgramMultiset:
    """Word unigram multiset over token forms, ``w:`` namespace."""
    out = NgramMultiset()
    for tok in tokens:
        out.add(f"w:{tok.form}")
    return out


def char_ngrams(text: str, n_min: int = 1, n_max: int = 4) -> NgramMultiset:
    """All contiguous substrings of length n_min..n_max over the raw text."""
    if not 1 <= n_min <= n_max:
        raise DataError(f"invalid n-gram range {n_min}..{n_max}")
    out = NgramMultiset()
    length = len(text)
    for n in range(n_min, n_max + 1):
        prefix = f"c{n}:"
        for i in range(length - n + 1):
            out.add(prefix + text[i : i + n])
    return out


def pos_ngrams(sentence: AnnotatedSentence, n_min: int = 1, n_max: int = 4) -> NgramMultiset:
    """N-grams over the sentence's POS tag sequence, joined with '_'."""
    if not 1 <= n_min <= n_max:
        raise DataError(f"invalid n-gram range {n_min}..{n_max}")
    tags = []
    for i, tok in enumerate(sentence.tokens):
        if tok.pos is None:
            raise DataError(
                f"sentence {sentence.instance_id!r}: token {i} ({tok.form!r}) has no POS tag"
            )
        tags.append(tok.pos)
    out = NgramMultiset()
    for n in range(n_min, n_max + 1):
        prefix = f"p{n}:"
        for i in range(len(tags) - n + 1):
            out.add(prefix + "_".join(tags[i : i + n]))
    return out


def morph_feature_counts(sentence: AnnotatedSentence) -> NgramMultiset:
    """Each Feature=Value pair counted once per token occurrence."""
    out = NgramMultiset()
    for tok in sentence.tokens:
        for feat in sorted(tok.morph):
            out.add(f"m:{feat}")
    return out


# --------------------------------------------------------------------------
# CoNLL-U interchange (the sidecar's output format)
# --------------------------------------------------------------------------

_CONLLU_COLUMNS = 10


def load_conllu(path: str | Path) -> list[AnnotatedSentence]:
    """Parse a CoNLL-U file into AnnotatedSentences.

    Every sentence block must carry a ``# instance_id = <id>`` comment;
    several blocks may share one instance id (multi-sentence articles).
    Multiword-token ranges (id "3-4") and empty nodes (id "8.1") are skipped.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"CoNLL-U file not found: {path}")
    sentences: list[AnnotatedSentence] = []
    meta: dict[str, str] = {}
    tokens: list[Token] = []
    saw_token_line = False

    def flush(line_no: int):
        nonlocal meta, tokens, saw_token_line
        if not saw_token_line and not meta:
            return
        if "instance_id" not in meta:
            raise DataError(f"{path}: sentence ending at line {line_no} has no instance_id comment")
        if not tokens:
            raise DataError(f"{path}: sentence ending at line {line_no} has no tokens")
        sentences.append(AnnotatedSentence(instance_id=meta["instance_id"], tokens=tokens))
        meta, tokens, saw_token_line = {}, [], False

    with path.open(encoding="utf-8") as fh:
        line_no = 0
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                flush(line_no)
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    meta[key.strip()] = value.strip()
                continue
            cols = line.split("\t")
            if len(cols) != _CONLLU_COLUMNS:
                raise DataError(
                    f"{path}:{line_no}: expected {_CONLLU_COLUMNS} tab-separated columns, got {len(cols)}"
                )
            saw_token_line = True
            tok_id = cols[0]
            if "-" in tok_id or "." in tok_id:
                continue  # multiword range / empty node
            form = cols[1]
            upos = cols[3] if cols[3] != "_" else None
            feats: frozenset[str] = frozenset()
            if cols[5] != "_":
                parts = cols[5].split("|")
                for feat in parts:
                    if feat.count("=") != 1:
                        raise DataError(
                            f"{path}:{line_no}: malformed FEATS entry {feat!r}"
                        )
                feats = frozenset(parts)
            try:
                tokens.append(Token(form=form, pos=upos, morph=feats))
            except DataError as e:
                raise DataError(f"{path}:{line_no}: {e}") from None
        flush(line_no + 1)
    return sentences


def write_conllu(sentences: list[AnnotatedSentence], path: str | Path) -> None:
    """Serialize sentences back to CoNLL-U, restricted to the consumed columns.

    FEATS are written sorted case-insensitively, so load -> write -> load is
    stable.
    """
    lines: list[str] = []
    for sent in sentences:
        lines.append(f"# instance_id = {sent.instance_id}")
        for i, tok in enumerate(sent.tokens, start=1):
            feats = "|".join(sorted(tok.morph, key=str.lower)) or "_"
            lines.append(
                "\t".join(
                    [str(i), tok.form, "_", tok.pos or "_", "_", feats, "_", "_", "_", "_"]
                )
            )
        lines.append("")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def group_by_instance(sentences: list[AnnotatedSentence]) -> dict[str, list[AnnotatedSentence]]:
    """Group parsed sentences by instance id, preserving file order."""
    grouped: dict[str, list[AnnotatedSentence]] = {}
    for sent in sentences:
        grouped.setdefault(sent.instance_id, []).append(sent)
    return grouped


# --------------------------------------------------------------------------
# Built-in rule tagger (fallback so the toolkit runs without annotations)
# --------------------------------------------------------------------------

_LEXICON_PATH = Path(__file__).parent / "data" / "tagger_lexicon.tsv"
_lexicon_cache: dict[str, str] | None = None

# Suffix rules, applied in order after the lexicon misses. Exactly these ten:
#  1. -ly -> ADV               6. -ize/-ise/-ify -> VERB
#  2. -ing -> VERB             7. -al/-ic/-ical -> ADJ
#  3. -ed -> VERB              8. -est -> ADJ
#  4. noun-forming suffixes    9. capitalized form -> PROPN
#     (-tion/-sion/-ness/-ment/-ity/-ism/-ance/-ence/-ship) -> NOUN
#  5. adjective-forming suffixes (-ous/-ful/-ive/-able/-ible/-ish) -> ADJ
# 10. -s (len>3, not -ss) -> NOUN
_SUFFIX_RULES: list[tuple[tuple[str, ...], str]] = [
    (("ly",), "ADV"),
    (("ing",), "VERB"),
    (("ed",), "VERB"),
    (("tion", "sion", "ness", "ment", "ity", "ism", "ance", "ence", "ship"), "NOUN"),
    (("ous", "ful", "ive", "able", "ible", "ish"), "ADJ"),
    (("ize", "ise", "ify"), "VERB"),
    (("al", "ic", "ical"), "ADJ"),
    (("est",), "ADJ"),
]


def load_tagger_lexicon(path: str | Path | None = None) -> dict[str, str]:
    """Bundled form -> UPOS lexicon (TSV: form<TAB>UPOS)."""
    global _lexicon_cache
    if path is None:
        if _lexicon_cache is not None:
            return _lexicon_cache
        path = _LEXICON_PATH
    lex: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"{path}:{line_no}: lexicon rows are form<TAB>UPOS")
        form, upos = parts
        if upos not in UPOS_TAGS:
            raise DataError(f"{path}:{line_no}: unknown UPOS tag {upos!r}")
        lex[form] = upos
    if path == _LEXICON_PATH:
        _lexicon_cache = lex
    return lex


def _rule_tag(form: str, lexicon: dict[str, str]) -> str:
    if form in lexicon:
        return lexicon[form]
    lower = form.lower()
    if lower in lexicon:
        return lexicon[lower]
    if all(_is_punct(ch) for ch in form):
        return "PUNCT"
    if all(unicodedata.category(ch).startswith("S") for ch in form):
        return "SYM"
    return _suffix_tag(form, lower)


def _suffix_tag(form: str, lower: str) -> str:
    digits = lower.replace(",", "").replace(".", "").replace("-", "").replace("/", "").replace(":", "")
    if digits and all(ch.isdigit() for ch in digits):
        return "NUM"
    for suffixes, tag in _SUFFIX_RULES:
        for suf in suffixes:
            if len(lower) > len(suf) + 1 and lower.endswith(suf):
                return tag
    if form[:1].isupper():
        return "PROPN"
    if len(lower) > 3 and lower.endswith("s") and not lower.endswith("ss"):
        return "NOUN"
    return "NOUN"


def builtin_pos_tag(tokens: list[Token], lexicon: dict[str, str] | None = None) -> list[Token]:
    """Deterministic lexicon+suffix tagger over the universal POS tagset.

    Every token gets a tag; unknown shapes fall back to NOUN. Meant as a
    stand-in when no CoNLL-U annotations are supplied; it fills POS only,
    morph sets stay empty.
    """
    lex = lexicon if lexicon is not None else load_tagger_lexicon()
    out = []
    for tok in tokens:
        tag = _rule_tag(tok.form, lex)
        out.append(Token(form=tok.form, pos=tag, morph=tok.morph))
    return out


def annotate_with_builtin_tagger(instance_id: str, text: str) -> list[AnnotatedSentence]:
    """Tokenize + rule-tag a raw text as a single annotated sentence."""
    return [AnnotatedSentence(instance_id=instance_id, tokens=builtin_pos_tag(tokenize(text)))]
