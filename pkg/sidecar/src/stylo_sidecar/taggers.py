"""Annotation engines producing tokenized sentences with UPOS + FEATS.

Two engines share one output shape (a list of sentences, each a list of
(form, upos, feats-dict) triples per instance):

* ``stanza`` (default): the neural pipeline, when the package and its
  pretrained models are available.
* ``rules``: a bundled deterministic tokenizer + suffix tagger with
  UD-flavored morphological features, so annotation works offline.
"""

from __future__ import annotations

import unicodedata

from .dataset import SidecarError

Sentence = list[tuple[str, str, dict[str, str]]]

_SENTENCE_FINAL = {".", "!", "?"}

_LEXICON = {
    "the": "DET", "a": "DET", "an": "DET", "this": "DET", "these": "DET",
    "those": "DET", "every": "DET", "some": "DET", "any": "DET", "no": "DET",
    "of": "ADP", "in": "ADP", "on": "ADP", "at": "ADP", "by": "ADP",
    "for": "ADP", "with": "ADP", "from": "ADP", "to": "ADP", "into": "ADP",
    "about": "ADP", "after": "ADP", "before": "ADP", "over": "ADP",
    "i": "PRON", "you": "PRON", "he": "PRON", "she": "PRON", "it": "PRON",
    "we": "PRON", "they": "PRON", "them": "PRON", "my": "PRON", "your": "PRON",
    "his": "PRON", "her": "PRON", "our": "PRON", "their": "PRON", "who": "PRON",
    "is": "AUX", "are": "AUX", "was": "AUX", "were": "AUX", "be": "AUX",
    "been": "AUX", "has": "AUX", "have": "AUX", "had": "AUX", "will": "AUX",
    "would": "AUX", "can": "AUX", "could": "AUX", "must": "AUX", "should": "AUX",
    "do": "AUX", "does": "AUX", "did": "AUX",
    "and": "CCONJ", "or": "CCONJ", "but": "CCONJ", "nor": "CCONJ",
    "that": "SCONJ", "because": "SCONJ", "if": "SCONJ", "while": "SCONJ",
    "when": "SCONJ", "since": "SCONJ", "as": "SCONJ", "whether": "SCONJ",
    "not": "PART",
    "very": "ADV", "really": "ADV", "just": "ADV", "so": "ADV", "now": "ADV",
    "then": "ADV", "here": "ADV", "there": "ADV", "also": "ADV", "too": "ADV",
    "never": "ADV", "always": "ADV", "often": "ADV", "still": "ADV",
    "said": "VERB", "says": "VERB", "made": "VERB", "went": "VERB",
    "one": "NUM", "two": "NUM", "three": "NUM", "four": "NUM", "five": "NUM",
    "ten": "NUM", "hundred": "NUM", "thousand": "NUM", "million": "NUM",
}


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _tokenize(text: str) -> list[str]:
    tokens = []
    for chunk in text.split():
        lead, trail = [], []
        start, end = 0, len(chunk)
        while start < end and _is_punct(chunk[start]):
            lead.append(chunk[start])
            start += 1
        while end > start and _is_punct(chunk[end - 1]):
            trail.append(chunk[end - 1])
            end -= 1
        tokens.extend(lead)
        if end > start:
            tokens.append(chunk[start:end])
        tokens.extend(reversed(trail))
    return tokens


def _rules_tag(form: str) -> tuple[str, dict[str, str]]:
    lower = form.lower()
    if all(_is_punct(ch) for ch in form):
        return "PUNCT", {}
    digits = lower.replace(",", "").replace(".", "").replace("-", "")
    if digits and all(ch.isdigit() for ch in digits):
        return "NUM", {"NumType": "Card"}
    if lower in _LEXICON:
        upos = _LEXICON[lower]
        feats: dict[str, str] = {}
        if upos == "PRON":
            feats["PronType"] = "Prs"
        elif upos == "DET":
            feats["PronType"] = "Art" if lower in ("a", "an", "the") else "Dem"
        elif upos == "NUM":
            feats["NumType"] = "Card"
        elif upos == "VERB":
            feats["VerbForm"] = "Fin"
        return upos, feats
    if lower.endswith("ly") and len(lower) > 3:
        return "ADV", {}
    if lower.endswith("ing") and len(lower) > 4:
        return "VERB", {"Tense": "Pres", "VerbForm": "Ger"}
    if lower.endswith("ed") and len(lower) > 3:
        return "VERB", {"Tense": "Past", "VerbForm": "Fin"}
    if lower.endswith("est") and len(lower) > 4:
        return "ADJ", {"Degree": "Sup"}
    for suffix in ("ous", "ful", "ive", "able", "ible", "ish", "al", "ic"):
        if lower.endswith(suffix) and len(lower) > len(suffix) + 1:
            return "ADJ", {"Degree": "Pos"}
    if form[:1].isupper():
        return "PROPN", {"Number": "Sing"}
    if lower.endswith("s") and len(lower) > 3 and not lower.endswith("ss"):
        return "NOUN", {"Number": "Plur"}
    return "NOUN", {"Number": "Sing"}


def rules_annotate(text: str) -> list[Sentence]:
    """Deterministic annotation: tokenize, tag, segment at final punctuation."""
    tokens = _tokenize(text)
    sentences: list[Sentence] = []
    current: Sentence = []
    for form in tokens:
        upos, feats = _rules_tag(form)
        current.append((form, upos, feats))
        if form in _SENTENCE_FINAL:
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


class RulesTagger:
    name = "rules"

    def annotate(self, text: str) -> list[Sentence]:
        return rules_annotate(text)


class StanzaTagger:
    """Wraps a stanza pipeline; construction fails cleanly when the package
    or its pretrained models are unavailable."""

    name = "stanza"

    def __init__(self, lang: str):
        try:
            import stanza
        except ImportError as e:
            raise SidecarError(
                f"stanza is not installed ({e}); install the 'stanza' extra or use --tagger rules"
            ) from None
        try:
            self._pipeline = stanza.Pipeline(
                lang=lang, processors="tokenize,pos", download_method=None,
                verbose=False,
            )
        except Exception as e:
            raise SidecarError(f"could not load stanza pipeline for {lang!r}: {e}") from None

    def annotate(self, text: str) -> list[Sentence]:
        doc = self._pipeline(text)
        sentences: list[Sentence] = []
        for sent in doc.sentences:
            current: Sentence = []
            for word in sent.words:
                feats: dict[str, str] = {}
                if word.feats:
                    for pair in word.feats.split("|"):
                        key, _, value = pair.partition("=")
                        feats[key] = value
                current.append((word.text, word.upos or "X", feats))
            if current:
                sentences.append(current)
        return sentences


def make_tagger(engine: str, lang: str):
    if engine == "rules":
        return RulesTagger()
    if engine == "stanza":
        return StanzaTagger(lang)
    raise SidecarError(f"unknown tagger engine {engine!r} (use stanza or rules)")
