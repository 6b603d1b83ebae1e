"""
命令列介面

    python -m app.cli ingest  --input daily_area.txt --output daily.csv
    python -m app.cli analyze --fixture --output-dir ./output
    python -m app.cli synth   --spec spec.json --output series.csv
    python -m app.cli report  --output-dir ./output

Settings (environment, ``.env``) give the defaults, a ``--config`` JSON file
overrides them, explicit flags override both. Exit codes: 0 success,
2 configuration error, 3 data error, 4 analysis degeneracy.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import orjson

from app.core.config import RunConfig, load_config_file, settings
from app.core.periodicity.errors import InputNotFound, InvalidConfig, PeriodicityError
from app.core.periodicity.fluct import running_mean, split_signed
from app.core.periodicity.ingest import fill_gaps, read_daily_file, write_canonical_csv
from app.core.periodicity.output import csv_bytes
from app.core.periodicity.pipeline import run_pipeline
from app.core.periodicity.synth import generate, load_synth_spec, parse_synth_spec
from app.models.periodicity import (
    Background,
    CoiPolicy,
    ColumnMap,
    EdgePolicy,
    GapPolicy,
    HemisphereSelection,
    ParseStats,
    SeriesKind,
)

logger = logging.getLogger("app.cli")


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _column_map(path: Optional[Path]) -> Optional[ColumnMap]:
    if path is None:
        return None
    try:
        return ColumnMap.model_validate(load_config_file(path))
    except ValueError as e:
        raise InvalidConfig(f"invalid column map: {e}", path=str(path)) from e


def _flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Only the flags given on the command line"""
    overrides: Dict[str, Any] = {}
    simple = {
        "input": "input_path",
        "hemisphere": "hemispheres",
        "cycle_table": "cycle_table_path",
        "edge_policy": "edge_policy",
        "gap_policy": "gap_policy",
        "max_lag": "max_lag",
        "omega0": "omega0",
        "s0": "s0",
        "dj": "dj",
        "background": "background",
        "coi_policy": "coi_policy",
        "level": "significance_level",
        "alpha": "alpha",
        "bins": "bin_count",
        "dominant_kind": "dominant_period_kind",
        "lilliefors_replicates": "lilliefors_replicates",
        "output_dir": "output_dir",
        "seed": "seed",
    }
    for flag, field in simple.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value

    ephemeris = {}
    if args.epoch_jd is not None:
        ephemeris["epoch_julian_date"] = args.epoch_jd
    if args.period_days is not None:
        ephemeris["synodic_period_days"] = args.period_days
    if ephemeris:
        overrides["ephemeris"] = ephemeris

    pairing = {}
    if args.pairing_floor is not None:
        pairing["floor"] = args.pairing_floor
    if args.argmax_only:
        pairing["argmax_only"] = True
    if pairing:
        overrides["pairing"] = pairing

    column_map = _column_map(args.column_map)
    if column_map is not None:
        overrides["column_map"] = column_map
    if args.fixture:
        overrides["fixture"] = True
    return overrides


def build_run_config(args: argparse.Namespace) -> RunConfig:
    values: Dict[str, Any] = {}
    if args.config is not None:
        values.update(load_config_file(args.config))
    flags = _flag_overrides(args)
    for key in ("ephemeris", "pairing"):
        if isinstance(values.get(key), dict) and key in flags:
            flags[key] = {**values[key], **flags[key]}
    values.update(flags)
    return RunConfig.from_settings(**values)


def cmd_ingest(args: argparse.Namespace) -> int:
    path = args.input or settings.daily_area_path
    stats = ParseStats()
    records = read_daily_file(path, _column_map(args.column_map) or ColumnMap(), stats)
    records = fill_gaps(records, args.gap_policy or settings.GAP_POLICY)
    if args.output is None:
        write_canonical_csv(records, sys.stdout)
    else:
        with open(args.output, "w", newline="", encoding="utf-8") as handle:
            write_canonical_csv(records, handle)
    span = f"{records[0].date} .. {records[-1].date}" if records else "empty"
    print(
        f"{len(records)} records ({span}); {stats.skipped_header} header lines, "
        f"{stats.skipped_missing} missing days",
        file=sys.stderr,
    )
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    report = run_pipeline(config)
    print(f"✅ analysis written to {config.output_dir}")
    for hemisphere, n in report.n_per_hemisphere.items():
        print(f"   - {hemisphere}: N={n}, cycles={report.cycles_per_hemisphere[hemisphere]}")
    for summary in report.survey:
        print(
            f"   - {summary.kind.value}: above 2se {summary.above_2se_share}, "
            f"between {summary.between_share}, mean tau {summary.mean_significant_tau}"
        )
    return 0


def _synth_spec(args: argparse.Namespace):
    if args.spec is not None:
        return load_synth_spec(args.spec)
    components: List[Dict[str, Any]] = []
    if args.period is not None:
        components.append({"type": "sinusoid", "period": args.period, "amplitude": args.amplitude})
    if args.noise:
        components.append({"type": "white_noise", "sigma": args.noise})
    if args.ar1 is not None:
        components.append({"type": "ar1", "phi": args.ar1, "sigma": args.ar1_sigma})
    return parse_synth_spec({
        "n": args.n,
        "components": components,
        "seed": args.seed if args.seed is not None else settings.DEFAULT_SEED,
        "offset": args.offset,
    })


def cmd_synth(args: argparse.Namespace) -> int:
    values = generate(_synth_spec(args))
    smoothed = running_mean(values, args.edge_policy or EdgePolicy.SHRINK)
    fluctuation = values - smoothed
    positive, negative = split_signed(fluctuation)
    content = csv_bytes(
        ["rotation_index", "date_mid", "S", "S_bar", "F", "F_plus", "F_minus"],
        ((i, None, s, sb, f, fp, fm) for i, (s, sb, f, fp, fm)
         in enumerate(zip(values, smoothed, fluctuation, positive, negative))),
    )
    if args.output is None:
        sys.stdout.write(content.decode("utf-8"))
    else:
        Path(args.output).write_bytes(content)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    output_dir = args.output_dir or settings.OUTPUT_DIR
    path = Path(output_dir) / "report.json"
    if not path.is_file():
        raise InputNotFound("no report.json in the output directory", path=str(path))
    report = orjson.loads(path.read_bytes())
    print(f"input: {report['input']}")
    print(f"N per hemisphere: {report['n_per_hemisphere']}")
    print(f"mean significant tau: {report['mean_significant_tau_all']}")
    for regression in report["regressions"]:
        fit = regression["fit"]
        detail = f"r={fit['r']:.3f} slope={fit['slope']:.3f}" if fit else "no fit"
        print(f"{regression['kind']} k={regression['k']}: {regression['n_pairs']} pairs, {detail}")
    for agreement in report["agreement"]:
        print(
            f"agreement {agreement['kind']}: r={agreement['pearson_r']} "
            f"fraction={agreement['agreement_fraction']}"
        )
    return 0


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--input", type=Path, help="daily hemispheric area file")
    parser.add_argument("--fixture", action="store_true", help="run on the bundled synthetic data")
    parser.add_argument("--column-map", type=Path, help="JSON column map of the input file")
    parser.add_argument("--hemisphere", type=HemisphereSelection, choices=list(HemisphereSelection))
    parser.add_argument("--cycle-table", type=Path)
    parser.add_argument("--epoch-jd", type=float, help="Julian date of the start of rotation 1")
    parser.add_argument("--period-days", type=float, help="mean synodic rotation period")
    parser.add_argument("--edge-policy", type=EdgePolicy, choices=list(EdgePolicy))
    parser.add_argument("--gap-policy", type=GapPolicy, choices=list(GapPolicy))
    parser.add_argument("--max-lag", type=int)
    parser.add_argument("--omega0", type=float)
    parser.add_argument("--s0", type=float)
    parser.add_argument("--dj", type=float)
    parser.add_argument("--background", type=Background, choices=list(Background))
    parser.add_argument("--coi-policy", type=CoiPolicy, choices=list(CoiPolicy))
    parser.add_argument("--level", type=float, help="wavelet significance level")
    parser.add_argument("--alpha", type=float, help="hypothesis test size")
    parser.add_argument("--bins", type=int, help="histogram bin count")
    parser.add_argument("--pairing-floor", type=float, help="minimum c/se of paired peaks")
    parser.add_argument("--argmax-only", action="store_true", help="pair window argmaxes without a floor")
    parser.add_argument("--dominant-kind", type=SeriesKind, choices=list(SeriesKind))
    parser.add_argument("--lilliefors-replicates", type=int)
    parser.add_argument("--output-dir", type=Path)
    parser.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m app.cli", description=settings.PROJECT_NAME)
    parser.add_argument("-v", "--verbose", action="store_true")
    verbs = parser.add_subparsers(dest="verb", required=True)

    ingest = verbs.add_parser("ingest", help="parse a daily file into the canonical CSV")
    ingest.add_argument("--input", type=Path)
    ingest.add_argument("--column-map", type=Path)
    ingest.add_argument("--gap-policy", type=GapPolicy, choices=list(GapPolicy))
    ingest.add_argument("--output", type=Path)
    ingest.set_defaults(handler=cmd_ingest)

    analyze = verbs.add_parser("analyze", help="run the full analysis chain")
    _add_run_flags(analyze)
    analyze.set_defaults(handler=cmd_analyze)

    synth = verbs.add_parser("synth", help="generate a synthetic rotation series")
    synth.add_argument("--spec", type=Path, help="JSON synth spec")
    synth.add_argument("--n", type=int, default=140)
    synth.add_argument("--period", type=float)
    synth.add_argument("--amplitude", type=float, default=1.0)
    synth.add_argument("--noise", type=float, default=0.0)
    synth.add_argument("--ar1", type=float)
    synth.add_argument("--ar1-sigma", type=float, default=1.0)
    synth.add_argument("--offset", type=float, default=0.0)
    synth.add_argument("--edge-policy", type=EdgePolicy, choices=list(EdgePolicy))
    synth.add_argument("--seed", type=int)
    synth.add_argument("--output", type=Path)
    synth.set_defaults(handler=cmd_synth)

    report = verbs.add_parser("report", help="summarize the report of a finished run")
    report.add_argument("--output-dir", type=Path)
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except PeriodicityError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
