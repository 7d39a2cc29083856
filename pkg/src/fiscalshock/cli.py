"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .exceptions import ConfigError, DataError, FiscalShockError, NumericalError, PipelineError
from .pipeline import PipelineConfig, run_pipeline
from .report import TABLE_KINDS, emit_table
from .synth import FILES, SyntheticDgp, generate_synthetic

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3

# subcommand -> last stage it runs
STAGE_COMMANDS = {
    "ingest": "ingest",
    "unit-root": "unit-root",
    "cointegrate": "cointegration",
    "extract-shocks": "split",
    "asymmetry": "asymmetry",
    "run": "asymmetry",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, PipelineError):
        return exit_code(exc.cause)
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, DataError):
        return EXIT_DATA
    if isinstance(exc, (NumericalError, ArithmeticError)):
        return EXIT_NUMERICAL
    if isinstance(exc, (ValueError, OSError)):
        return EXIT_DATA
    return EXIT_NUMERICAL


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--out", required=True, help="run directory")
    g = p.add_argument_group("configuration overrides")
    for name in PipelineConfig.field_names():
        g.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None, metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fiscalshock", description="Fiscal shock extraction and asymmetry tests")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "ingest": "load, deflate and log the input series",
        "unit-root": "ADF / KPSS / ERS battery",
        "cointegrate": "Johansen tests on output, revenue and spending",
        "extract-shocks": "estimate fiscal shocks and their signed parts",
        "asymmetry": "asymmetry regression and F-test battery",
        "run": "all stages",
    }
    for cmd, text in helps.items():
        _add_config_flags(sub.add_parser(cmd, help=text))
    rp = sub.add_parser("report", help="print a rendered table from a run directory")
    rp.add_argument("--run-dir", required=True)
    rp.add_argument("--kind", required=True, choices=TABLE_KINDS)
    rp.add_argument("--format", choices=("text", "csv"), default="text")
    sp = sub.add_parser("synth", help="write a synthetic data set with known shocks")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--T", type=int, default=SyntheticDgp.T)
    sp.add_argument("--sd-y", type=float, default=SyntheticDgp.sd_y, help="output noise scale")
    sp.add_argument("--beta", default=None, help="four comma-separated multipliers")
    return parser


def _config(args) -> PipelineConfig:
    overrides = {k: getattr(args, k) for k in PipelineConfig.field_names() if getattr(args, k) is not None}
    if args.config:
        return PipelineConfig.from_file(args.config, overrides)
    return PipelineConfig(**PipelineConfig.coerce(overrides))


def _cmd_stage(args) -> int:
    cfg = _config(args)
    res = run_pipeline(cfg, args.out, STAGE_COMMANDS[args.command])
    print(f"{args.command}: ok ({res.sample.get('first')} - {res.sample.get('last')}, "
          f"N = {res.sample.get('nobs')}); outputs in {args.out}")
    if args.command in ("asymmetry", "run"):
        kind = "contemporaneous" if cfg.spec == "contemporaneous" else "lagged"
        print(emit_table(res, kind).to_text(), end="")
    return EXIT_OK


def _cmd_report(args) -> int:
    ext = "txt" if args.format == "text" else "csv"
    path = os.path.join(args.run_dir, "tables", f"{args.kind}.{ext}")
    if not os.path.isfile(path):
        raise DataError(f"no {args.kind} table in {args.run_dir}")
    with open(path, encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK


def _cmd_synth(args) -> int:
    kw = {"T": args.T, "sd_y": args.sd_y}
    if args.beta:
        try:
            kw["beta"] = tuple(float(x) for x in args.beta.split(","))
        except ValueError:
            raise ConfigError(f"--beta must be four numbers, got {args.beta!r}") from None
    paths = generate_synthetic(args.out, SyntheticDgp(**kw), args.seed)
    cfg_path = os.path.join(args.out, "pipeline.cfg")
    with open(cfg_path, "w", encoding="utf-8") as fh:
        for key in FILES:
            fh.write(f"{key} = {os.path.basename(paths[key])}\n")
        fh.write(f"seed = {args.seed}\n")
    print(f"synthetic data written to {args.out} (config: {cfg_path})")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "synth":
            return _cmd_synth(args)
        return _cmd_stage(args)
    except (FiscalShockError, ValueError, ArithmeticError, OSError) as exc:
        print(f"fiscalshock: error: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
