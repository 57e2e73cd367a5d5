"""Acceptance criterion 9: sidecar round-trip through the consumer toolkit.

On a 20-instance fixture the CoNLL-U output must parse with zero errors
and cover every instance, and the embedding file must carry dim=768 with
100% id coverage.
"""

from pathlib import Path

from stylo_sidecar.cli import main

from stylo.annotate import group_by_instance, load_conllu
from stylo.features import load_embeddings

TEXTS = [
    "The government announced a new budget today.",
    "Honestly, this plan is a terrible mess!",
    "Officials said the report was published on Monday.",
    "I really hate these endless debates.",
    "The committee approved the proposal by a wide margin.",
    "Researchers found that prices increased by three percent.",
    "What a wonderful, absolutely brilliant idea!",
    "The ministry confirmed the figures on Friday. A review follows.",
    "Nobody believes these ridiculous claims anymore.",
    "Police reported two incidents near the hospital.",
    "This is simply the best outcome we could hope for!",
    "The council signed the agreement after long talks.",
    "Frankly, the whole process was a disgrace.",
    "Data showed steady growth across the region.",
    "You must see how unfair this decision is!",
    "The parliament debated the law for ten hours.",
    "Their so-called reform is an insult to workers.",
    "The agency published its annual analysis yesterday.",
    "Everyone knows this policy will fail badly!",
    "The court reviewed the case and met the parties.",
]


def test_criterion_9_sidecar_round_trip(tmp_path):
    data = tmp_path / "fixture.tsv"
    lines = ["id\ttext\tlabel"]
    for i, text in enumerate(TEXTS):
        lines.append(f"inst{i:02d}\t{text}\t{'OBJ' if i % 2 == 0 else 'SUBJ'}")
    data.write_text("\n".join(lines) + "\n", encoding="utf-8")

    conllu_out = tmp_path / "fixture.conllu"
    embed_out = tmp_path / "fixture.emb"
    code = main([
        "annotate", "--in", str(data), "--format", "tsv", "--lang", "en",
        "--conllu-out", str(conllu_out), "--embed-out", str(embed_out),
        "--model", "random:768@42", "--pooling", "mean", "--tagger", "rules",
    ])
    assert code == 0

    all_ids = {f"inst{i:02d}" for i in range(20)}

    # CoNLL-U parses with zero errors and covers every instance
    sentences = load_conllu(conllu_out)
    grouped = group_by_instance(sentences)
    assert set(grouped) == all_ids

    # embedding file: dim=768 header, loads cleanly, full id coverage
    header = embed_out.read_text(encoding="utf-8").splitlines()[0]
    assert header == "dim=768"
    embeddings = load_embeddings(embed_out, 768)
    assert set(embeddings) == all_ids

    # nothing was skipped
    skipped = Path(str(conllu_out) + ".skipped").read_text(encoding="utf-8").split()
    assert skipped == []
    print("\nACCEPTANCE 9 PASS: 20-instance sidecar round-trip, dim=768, full coverage")
