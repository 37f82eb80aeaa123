# src/cli.py - command-line front end
import argparse
import logging
import re
import sys
from typing import List, Optional, Tuple

from pydantic import ValidationError

from src.core.config import Settings
from src.core.exceptions import KoszulScopeError
from src.schemas.reports import RunConfig
from src.services.report_builder import ReportBuilder, render

logger = logging.getLogger(__name__)

DEFAULT_RANGES = {
    "dims": "0..12",
    "uniqueness": "3..12",
    "singdeg": "0..12",
    "verify": "3..5",
}

_RANGE = re.compile(r"^(\d+)(?:\.\.(\d+))?$")


def parse_d_range(text: str) -> Tuple[int, int]:
    """'a..b' or a single 'a'"""
    match = _RANGE.match(text.strip())
    if not match:
        raise argparse.ArgumentTypeError(f"expected a..b or a single integer, got {text!r}")
    low = int(match.group(1))
    high = int(match.group(2)) if match.group(2) is not None else low
    return low, high


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--surface", choices=["quartic", "2-3", "2-2-2", "all"], default="all")
    common.add_argument("--d", dest="d_range", type=parse_d_range, default=None,
                        help="degree range a..b (default depends on the command)")
    common.add_argument("--format", dest="output_format", choices=["json", "csv", "md"], default="json")
    common.add_argument("--with-oracle", action="store_true", help="compare against the explicit models")
    common.add_argument("--with-trace", action="store_true", help="stream chase traces to stderr")
    common.add_argument("--fit", action="store_true", help="append fitted piecewise polynomials")

    parser = argparse.ArgumentParser(
        prog="koszulscope",
        description="Foliation-space dimensions and uniqueness thresholds on complete-intersection K3 surfaces",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("dims", parents=[common], help="h0 of twisted cotangent sheaves")
    commands.add_parser("uniqueness", parents=[common], help="H1-vanishing certificates and thresholds")
    commands.add_parser("singdeg", parents=[common], help="degree of the singular scheme")
    commands.add_parser("verify", parents=[common], help="oracle against engine")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    d_min, d_max = args.d_range or parse_d_range(DEFAULT_RANGES[args.command])

    runtime_settings = Settings()
    logging.basicConfig(level=runtime_settings.log_level, stream=sys.stderr)

    try:
        config = RunConfig.model_validate(
            {
                "command": args.command,
                "surface": args.surface,
                "d_min": d_min,
                "d_max": d_max,
                "output_format": args.output_format,
                "with_oracle": args.with_oracle,
                "with_trace": args.with_trace,
                "fit": args.fit,
            },
            context={"d_cap": runtime_settings.d_cap},
        )
    except ValidationError as e:
        parser.error(f"invalid run configuration: {e.errors()[0]['msg']}")

    try:
        report = ReportBuilder(runtime_settings).build(config)
    except KoszulScopeError as e:
        print(f"❌ {config.command} failed: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.error(f"❌ Unexpected error in {config.command}: {str(e)}")
        print(f"❌ {config.command} failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1

    if report.trace:
        sys.stderr.write("\n".join(report.trace) + "\n")
    sys.stdout.write(render(report.records, config.output_format) + "\n")
    if report.summary:
        print(report.summary, file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
