# Command line entry point. To call, use:
#
#     python3 -m reidtrack <generate|track|eval|sweep|render> [--config config.ini] [--set section.param=value ...]

import argparse
import sys
from typing import Optional, Sequence

from . import log
from .pipeline import evaluate as pipeline_evaluate
from .pipeline import generate as pipeline_generate
from .pipeline import render as pipeline_render
from .pipeline import run as pipeline_run
from .pipeline import sweep as pipeline_sweep
from .plot import sweep as plot_sweep
from .setup.config import TRACKER_NAMES, Config

EXIT_CONFIG_ERROR = 2
EXIT_FAILURE = 1


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="Config file path, on top of the defaults")
    common.add_argument("--seed", type=int, default=None, help="Scenario seed, sets scenario.seed")
    common.add_argument("--out", type=str, default=None, help="Output directory, sets file_names.output_dir")
    common.add_argument(
        "--set",
        type=str,
        action="append",
        default=[],
        metavar="SECTION.PARAM=VALUE",
        help="Config override, can be given many times",
    )

    parser = argparse.ArgumentParser(prog="reidtrack", description="Tracking by re-identification on grid beliefs")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("generate", parents=[common], help="Generate and save a synthetic scenario")

    track = subparsers.add_parser("track", parents=[common], help="Run a tracker on a scenario and score it")
    track.add_argument("--tracker", type=str, choices=TRACKER_NAMES, default=None, help="Sets run.tracker")
    track.add_argument("--dump-frames", action="store_true", help="Dump the summed track posteriors as PGM frames")

    evaluate = subparsers.add_parser("eval", parents=[common], help="Score a hypothesis CSV against a ground truth CSV")
    evaluate.add_argument("gt", type=str, help="Ground truth box table CSV")
    evaluate.add_argument("hyp", type=str, help="Hypothesis box table CSV")
    evaluate.add_argument("--metrics-out", type=str, default=None, help="Metrics JSON path")

    sweep = subparsers.add_parser("sweep", parents=[common], help="Score a tracker over values of one parameter")
    sweep.add_argument("--sweep", type=str, required=True, metavar="SECTION.PARAM=V1,V2,...", help="Swept values")
    sweep.add_argument("--tracker", type=str, choices=TRACKER_NAMES, default=None, help="Sets run.tracker")
    sweep.add_argument("--plot", action="store_true", help="Also save a MOTA and MOTP curve of the sweep")

    subparsers.add_parser("render", parents=[common], help="Dump the per frame measurement overlay as PGM frames")
    return parser


def _overrides(args: argparse.Namespace) -> list[str]:
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"scenario.seed={args.seed}")
    if args.out is not None:
        overrides.append(f"file_names.output_dir={args.out}")
    if getattr(args, "tracker", None) is not None:
        overrides.append(f"run.tracker={args.tracker}")
    if getattr(args, "dump_frames", False):
        overrides.append("run.dump_frames=true")
    return overrides


def _dispatch(args: argparse.Namespace) -> None:
    overrides = _overrides(args)
    config = pipeline_run.load_config(args.config, overrides)
    pipeline_run.initialise_output(config)

    if args.command == "generate":
        log.error_catch(pipeline_generate.generate, config)
    elif args.command == "track":
        log.error_catch(pipeline_run.run, config)
    elif args.command == "eval":
        log.error_catch(pipeline_evaluate.evaluate_files, args.gt, args.hyp, config, args.metrics_out)
    elif args.command == "sweep":
        table_path = pipeline_sweep.sweep_path(config, args.sweep)
        log.error_catch(pipeline_sweep.sweep, args.config, overrides, args.sweep)
        if args.plot:
            log.error_catch(plot_sweep.plot_sweep, table_path)
    elif args.command == "render":
        log.error_catch(pipeline_render.render, config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        int: exit code. 0 on success, 2 on a config error, 1 on a file or value error.
    """
    args = _parser().parse_args(argv)
    try:
        _dispatch(args)
    except (Config.ParamError, Config.MissingParamError, Config.SectionError) as e:
        print(f"reidtrack: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (OSError, ValueError) as e:
        print(f"reidtrack: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE
    return 0


if __name__ == "__main__":
    sys.exit(main())
