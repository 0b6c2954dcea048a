"""Script to write generated FJ&λ programs to disk."""

import argparse
from pathlib import Path

from fjlambda.errors import GenerationBudgetError
from fjlambda.harness.config import GenConfig
from fjlambda.harness.generate import gen_table, gen_typed_term
from fjlambda.parser import SourceProgram
from fjlambda.printer import pretty


def generate_corpus(
    output_dir: Path,
    count: int = 20,
    seed: int = 0,
    features: str = "",
    max_classes: int = 4,
    max_term_depth: int = 4,
) -> list[Path]:
    """Generate well-typed programs, one ``.fjl`` file per seed.

    Args:
        output_dir: Directory for the generated files.
        count: Number of seeds to try.
        seed: First seed.
        features: Feature toggles, e.g. ``"+udcast,-lambdas"``.
        max_classes: Upper bound on classes per table.
        max_term_depth: Upper bound on the depth of the main term.

    Returns:
        Paths of the files written. Seeds the generator gives up on are skipped.
    """
    base = GenConfig(max_classes=max_classes, max_term_depth=max_term_depth)
    base = base.with_features(features)
    output_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for current in range(seed, seed + count):
        cfg = base.with_seed(current)
        try:
            ct = gen_table(cfg)
            term, tau = gen_typed_term(cfg, ct)
        except GenerationBudgetError as exc:
            print(f"seed {current}: skipped ({exc.message})")
            continue
        path = output_dir / f"gen-{current}.fjl"
        source = pretty(SourceProgram(tuple(ct), term))
        path.write_text(f"// seed {current}, type {tau}\n\n{source}", encoding="utf-8")
        written.append(path)
    print(f"Generated {len(written)} programs in {output_dir}")
    return written


def main():
    """CLI entry point."""
    parser = argparse.ArgumentParser(description="Generate well-typed FJ&λ programs")
    parser.add_argument("output", type=Path, help="Output directory")
    parser.add_argument("--count", type=int, default=20, help="Number of seeds to try")
    parser.add_argument("--seed", type=int, default=0, help="First seed")
    parser.add_argument("--features", default="", help='Feature toggles, e.g. "+udcast"')
    parser.add_argument("--max-classes", type=int, default=4, help="Classes per table")
    parser.add_argument("--max-term-depth", type=int, default=4, help="Depth of the main term")

    args = parser.parse_args()
    generate_corpus(
        args.output,
        count=args.count,
        seed=args.seed,
        features=args.features,
        max_classes=args.max_classes,
        max_term_depth=args.max_term_depth,
    )


if __name__ == "__main__":
    main()
