"""Command-line entry point: qscore score ..."""

from __future__ import annotations

import argparse
import sys

from .batch import batch_score
from .config import ScorerConfig
from .scoring import ScoringError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qscore",
        description="Produce per-sample quality scores for a dataset file.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a dataset file")
    p.add_argument("--dataset", required=True, help="input dataset jsonl")
    p.add_argument("--out", required=True, help="output score jsonl")
    p.add_argument("--mode", choices=("mock", "real"), default="mock")
    p.add_argument("--seed", type=int, default=0,
                   help="mock-mode determinism seed")
    p.add_argument("--resume", action="store_true",
                   help="skip ids already present in --out")
    p.add_argument("--image-encoder", help="real mode: CLIP checkpoint id")
    p.add_argument("--text-encoder", help="real mode: text encoder id")
    p.add_argument("--language-model", help="real mode: loss model id")
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--device", default="cpu")
    p.add_argument("--text-assembly", choices=("all_turns", "assistant_turns"),
                   default="all_turns")
    p.add_argument("--truncation-length", type=int, default=77)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ScorerConfig(
            mode=args.mode,
            image_encoder=args.image_encoder,
            text_encoder=args.text_encoder,
            language_model=args.language_model,
            batch_size=args.batch_size,
            device=args.device,
            text_assembly=args.text_assembly,
            truncation_length=args.truncation_length,
            seed=args.seed,
        )
        summary = batch_score(args.dataset, args.out, config,
                              resume=args.resume)
    except (ScoringError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        f"scored {summary.scored}, skipped {summary.skipped}, "
        f"already present {summary.resumed} -> {args.out}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
