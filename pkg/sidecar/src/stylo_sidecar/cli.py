"""Batch annotation CLI.

    stylo-sidecar annotate --in data.tsv --format tsv --lang en \\
        --conllu-out data.conllu \\
        [--embed-out data.emb --model bert-base-cased --pooling mean]

Writes one or more CoNLL-U sentence blocks per instance (each carrying
`# instance_id = <id>`) and, when requested, one embedding row per
instance in the `dim=<D>` interchange format. Instances that cannot be
annotated (empty text) are skipped and listed in `<conllu-out>.skipped`;
every input id ends up either in the outputs or in the skip list. Output
order follows input order.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset import Record, SidecarError, read_records
from .taggers import Sentence, make_tagger


def write_conllu_blocks(fh, instance_id: str, sentences: list[Sentence]) -> None:
    for sentence in sentences:
        fh.write(f"# instance_id = {instance_id}\n")
        for i, (form, upos, feats) in enumerate(sentence, start=1):
            feats_str = "|".join(
                f"{k}={v}" for k, v in sorted(feats.items(), key=lambda kv: kv[0].lower())
            ) or "_"
            fh.write("\t".join([str(i), form, "_", upos, "_", feats_str,
                                "_", "_", "_", "_"]) + "\n")
        fh.write("\n")


def run_annotate(args) -> int:
    records = read_records(args.in_path, args.format, args.id_field, args.text_field)
    tagger = make_tagger(args.tagger, args.lang)
    embedder = None
    if args.embed_out:
        from .embedder import Embedder

        embedder = Embedder(model_id=args.model, pooling=args.pooling,
                            max_length=args.max_length)

    skipped: list[str] = []
    annotated: list[tuple[Record, list[Sentence]]] = []
    for record in records:
        if not record.text.strip():
            skipped.append(record.id)
            continue
        sentences = tagger.annotate(record.text)
        if not sentences:
            skipped.append(record.id)
            continue
        annotated.append((record, sentences))

    conllu_path = Path(args.conllu_out)
    with conllu_path.open("w", encoding="utf-8") as fh:
        for record, sentences in annotated:
            write_conllu_blocks(fh, record.id, sentences)

    if embedder is not None:
        with Path(args.embed_out).open("w", encoding="utf-8") as fh:
            fh.write(f"dim={embedder.dim}\n")
            for record, _ in annotated:
                vector = embedder.embed(record.text)
                fh.write(record.id + "\t" + " ".join(repr(v) for v in vector) + "\n")

    skip_path = Path(str(conllu_path) + ".skipped")
    skip_path.write_text("".join(f"{i}\n" for i in skipped), encoding="utf-8")

    print(f"annotated {len(annotated)} instance(s), skipped {len(skipped)} "
          f"-> {conllu_path}" + (f", {args.embed_out}" if args.embed_out else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stylo-sidecar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("annotate", help="produce CoNLL-U and embedding files")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--lang", default="en")
    p.add_argument("--conllu-out", required=True)
    p.add_argument("--embed-out")
    p.add_argument("--model", default="bert-base-cased",
                   help="encoder id, or random:<dim>[@seed] for a local random encoder")
    p.add_argument("--pooling", choices=("mean", "first"), default="mean")
    p.add_argument("--tagger", choices=("stanza", "rules"), default="stanza",
                   help="annotation engine (rules = bundled offline tagger)")
    p.add_argument("--max-length", type=int, default=512)
    p.add_argument("--id-field", default="id")
    p.add_argument("--text-field", default="text")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run_annotate(args)
    except SidecarError as e:
        print(f"stylo-sidecar: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
