"""Command-line interface for egnas."""

import argparse
import logging
import sys
from pathlib import Path

from .exceptions import ConfigError, EgnasError
from .harness.ablation import AblationKind, ablate
from .harness.dot import export_dot
from .harness.stats import cell_stats, stats_csv
from .runner import ExperimentRunner
from .searchspace.genotype import Genotype
from .utils.config import check_paths, load_config, validate_config
from .utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

COMMANDS = ["gen-data", "search", "train", "eval", "ablate", "export-dot", "stats"]

# Commands that read the dataset split files.
DATA_COMMANDS = {"search", "train", "eval"}
GENOTYPE_COMMANDS = {"train", "ablate", "export-dot", "stats"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egnas",
        description="Edge-featured graph architecture search on synthetic graph tasks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate the SBM node-classification dataset
  egnas gen-data --config configs/sbm.yaml

  # Search an architecture, then retrain it from scratch
  egnas search --config configs/sbm.yaml --out runs/sbm
  egnas train --config configs/sbm.yaml --genotype runs/sbm/genotype.json --out runs/sbm/train

  # Evaluate a checkpoint on the test split
  egnas eval --config configs/sbm.yaml --checkpoint runs/sbm/train/checkpoint

  # Ablations and reports
  egnas ablate --genotype runs/sbm/genotype.json --ablation sequential --out runs/sbm/ablate
  egnas ablate --genotype runs/sbm/genotype.json --ablation replace-entity --op Mean
  egnas export-dot --genotype runs/sbm/genotype.json --out runs/sbm
  egnas stats --genotype runs/sbm/genotype.json
        """,
    )

    parser.add_argument("command", choices=COMMANDS, help="Pipeline step to run")

    parser.add_argument(
        "--config",
        help="Path to a YAML or JSON configuration file (default: built-in defaults)",
    )

    parser.add_argument("--seed", type=int, help="Random seed (overrides config)")

    parser.add_argument(
        "--out",
        help="Output directory (overrides config; for gen-data, the dataset directory)",
    )

    parser.add_argument(
        "--genotype",
        help="Genotype JSON (train, ablate, export-dot, stats)",
    )

    parser.add_argument(
        "--checkpoint",
        help="Checkpoint directory (eval; default: <out>/checkpoint)",
    )

    parser.add_argument(
        "--ablation",
        choices=[kind.value for kind in AblationKind],
        help="Ablation to apply (ablate)",
    )

    parser.add_argument("--op", help="Replacement op name for replace-entity / replace-edge")

    parser.add_argument(
        "--sample-seed",
        type=int,
        help="Sampling seed of the random ablation (default: the run seed)",
    )

    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Log level (overrides config)",
    )

    return parser


def prepare_config(args: argparse.Namespace) -> dict:
    """Load, override and validate the run configuration; check paths before any compute."""
    config = load_config(args.config) if args.config else {}

    if args.seed is not None:
        config["seed"] = args.seed

    if args.out:
        if args.command == "gen-data":
            config.setdefault("dataset", {})["dir"] = args.out
        else:
            config["output_dir"] = args.out

    if args.log_level:
        config.setdefault("logging", {})["level"] = args.log_level

    config = validate_config(config)

    if args.command in GENOTYPE_COMMANDS:
        if not args.genotype:
            raise ConfigError(f"'{args.command}' needs --genotype")
        if not Path(args.genotype).is_file():
            raise ConfigError(f"Genotype file not found: {args.genotype}")
    if args.command == "ablate" and not args.ablation:
        raise ConfigError("'ablate' needs --ablation")
    if args.command == "eval":
        checkpoint = Path(args.checkpoint or Path(config["output_dir"]) / "checkpoint")
        if not (checkpoint / "checkpoint.json").is_file():
            raise ConfigError(f"No checkpoint found in {checkpoint}")
        args.checkpoint = str(checkpoint)

    if args.command == "gen-data":
        Path(config["dataset"]["dir"]).mkdir(parents=True, exist_ok=True)
    else:
        check_paths(config, needs_data=args.command in DATA_COMMANDS)
    return config


def run_command(args: argparse.Namespace, config: dict) -> None:
    runner = ExperimentRunner(config)
    out = runner.output_dir

    if args.command == "gen-data":
        paths = runner.gen_data()
        print("\n✓ Dataset generated")
        for name, path in paths.items():
            print(f"  {name}: {path}")

    elif args.command == "search":
        result = runner.search()
        print("\n✓ Search completed")
        print(f"  Genotype: {out / 'genotype.json'}")
        print(f"  Log: {out / 'search_log.csv'}")
        if result.history:
            print(f"  Final validation metric: {result.history[-1]['metric']:.4f}")

    elif args.command == "train":
        result = runner.train(Genotype.load(args.genotype))
        print("\n✓ Training completed")
        print(f"  Best validation epoch: {result.best_epoch}")
        print(f"  Test metric at best validation: {result.test_metric:.4f}")
        print(f"  Checkpoint: {out / 'checkpoint'}")

    elif args.command == "eval":
        report = runner.evaluate(args.checkpoint)
        print("\n✓ Evaluation completed")
        print(f"  Test {report['metric_name']}: {report['metric']:.4f}")
        if "heuristic_metric" in report:
            print(f"  Heuristic baseline: {report['heuristic_metric']:.4f}")

    elif args.command == "ablate":
        kind = AblationKind(args.ablation)
        seed = args.sample_seed if args.sample_seed is not None else config["seed"]
        result = ablate(Genotype.load(args.genotype), kind, op=args.op, seed=seed)
        path = out / f"genotype_{kind.value}.json"
        result.save(path)
        print(f"\n✓ Ablated genotype written to {path}")

    elif args.command == "export-dot":
        path = export_dot(Genotype.load(args.genotype), out / "genotype.dot")
        print(f"\n✓ DOT file written to {path}")

    elif args.command == "stats":
        text = stats_csv(cell_stats(Genotype.load(args.genotype)))
        (out / "stats.csv").write_text(text)
        print(text, end="")


def main(argv: list[str] | None = None) -> int:
    """Main entry point for CLI."""
    args = build_parser().parse_args(argv)

    try:
        config = prepare_config(args)

        # Setup logging
        setup_logging(config, args.command)

        logger.info("=" * 80)
        logger.info(f"egnas {args.command} started")
        logger.info(f"Config: {args.config or 'defaults'}")
        logger.info(f"Seed: {config['seed']}")
        logger.info(f"Output: {config['output_dir']}")
        logger.info("=" * 80)

        run_command(args, config)

        logger.info(f"egnas {args.command} completed successfully")
        return 0

    except ConfigError as e:
        print(f"\n✗ Configuration error: {e}", file=sys.stderr)
        return e.exit_code

    except EgnasError as e:
        print(f"\n✗ {type(e).__name__}: {e}", file=sys.stderr)
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code

    except KeyboardInterrupt:
        print("\n\n✗ Interrupted by user", file=sys.stderr)
        logger.warning("Interrupted by user")
        return 130

    except Exception as e:
        print(f"\n✗ Error during {args.command}: {e}", file=sys.stderr)
        logger.exception(f"Error during {args.command}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
