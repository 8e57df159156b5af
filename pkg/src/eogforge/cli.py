"""``eogforge`` command line: simulate | process | bode | metrics.

Exit codes: 0 success, 1 usage/config error, 2 data/parse error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .afe import magnitude_response
from .config import PRESETS, ChainConfig, load_config, preset
from .detect import DetectionEvent
from .errors import ConfigConflictError, DataError, EogError, InvalidConfigError, InvalidScenarioError
from .pipeline import analyse, resolve_scenario, simulate
from .serial_io import SerialLog, parse_serial_csv, write_serial_csv

ENV_CONFIG = "EOGFORGE_CONFIG"

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def resolve_config(args) -> ChainConfig:
    path = args.config or os.environ.get(ENV_CONFIG)
    if path:
        if not Path(path).is_file():
            raise InvalidConfigError(f"config file not found: {path}")
        cfg = load_config(path, preset_name=args.preset)
    else:
        cfg = preset(args.preset or "default")
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    if getattr(args, "scenario", None):
        cfg = dataclasses.replace(cfg, scenario=args.scenario)
    return cfg


def _read_text(path, what) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {what} {path}: {exc}") from exc


def _read_log(path) -> SerialLog:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return parse_serial_csv(fh)
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read log {path}: {exc}") from exc


def _read_truth(path) -> list[tuple[float, str]]:
    try:
        data = json.loads(_read_text(path, "truth file"))
        return [(float(e["onset_s"]), str(e["polarity"])) for e in data["events"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"malformed truth file {path}: {exc!r}") from exc


def _check_header(log: SerialLog, cfg: ChainConfig) -> None:
    adc = cfg.adc
    for key, logged, configured in (
        ("bits", log.bits, adc.bits),
        ("v_ref", log.v_ref, adc.v_ref),
        ("sample_rate_hz", log.sample_rate, adc.sample_rate),
    ):
        if key in log.explicit_keys and float(logged) != float(configured):
            raise ConfigConflictError(
                f"log header says {key}={logged:g} but config has {configured:g}", f"adc.{key}"
            )


def events_csv(events: list[DetectionEvent], config_hash: str) -> str:
    lines = [f"# config_hash={config_hash}\n", "onset_s,polarity,peak_v,peak_time_s\n"]
    lines += [f"{e.onset!r},{e.polarity},{e.peak_value!r},{e.peak_time!r}\n" for e in events]
    return "".join(lines)


def events_json(events: list[DetectionEvent]) -> str:
    return json.dumps([e.to_dict() for e in events], indent=2) + "\n"


def cmd_simulate(args) -> int:
    cfg = resolve_config(args)
    if cfg.scenario is not None and not Path(cfg.scenario).is_file():
        raise InvalidScenarioError(f"scenario file not found: {cfg.scenario}")
    scenario = resolve_scenario(cfg)
    result = simulate(cfg, scenario)
    truth = {
        "config_hash": result.config_hash,
        "seed": cfg.seed,
        "scenario": scenario.to_dict(),
        "events": [{"onset_s": t, "polarity": p} for t, p in result.truth()],
    }
    csv_text = write_serial_csv(result.serial_log())
    truth_text = json.dumps(truth, indent=2, sort_keys=True) + "\n"
    out = Path(args.output)
    write_atomic(out / "serial.csv", csv_text)
    write_atomic(out / "truth.json", truth_text)
    print(
        f"wrote {out / 'serial.csv'} ({len(result.stream)} samples, "
        f"{result.analog.clip_count} rail clips, {result.adc_clamp_count} ADC clamps) "
        f"and {out / 'truth.json'}; config_hash={result.config_hash}"
    )
    return EXIT_OK


def _run_analysis(args, cfg):
    log = _read_log(args.log)
    _check_header(log, cfg)
    truth = _read_truth(args.truth) if args.truth else None
    if log.empty_warning:
        print(f"warning: {args.log} has no data rows", file=sys.stderr)
    if len(log.records) < 2:
        raise DataError(f"{args.log}: need at least 2 samples for metrics")
    events, report = analyse(log.records, cfg, truth)
    if "config_hash" in log.extra:
        report.provenance["log_config_hash"] = log.extra["config_hash"]
    return events, report


def cmd_process(args) -> int:
    cfg = resolve_config(args)
    events, report = _run_analysis(args, cfg)
    chash = report.provenance["config_hash"]
    out = Path(args.output)
    texts = {
        "events.csv": events_csv(events, chash),
        "events.json": events_json(events),
        "metrics.json": report.to_json(),
    }
    for name, text in texts.items():
        write_atomic(out / name, text)
    sys.stdout.write(report.to_table())
    return EXIT_OK


def cmd_metrics(args) -> int:
    cfg = resolve_config(args)
    _, report = _run_analysis(args, cfg)
    if args.output:
        write_atomic(Path(args.output), report.to_json())
    sys.stdout.write(report.to_table())
    return EXIT_OK


def bode_table(cfg: ChainConfig, f_min: float, f_max: float, points: int) -> list[tuple[float, float]]:
    if not (f_min > 0 and f_min < f_max):
        raise InvalidConfigError(f"need 0 < f_min < f_max, got {f_min!r}, {f_max!r}", "f_min")
    if points < 1:
        raise InvalidConfigError("must be >= 1", "points")
    f = np.geomspace(f_min, f_max, points)
    mag = np.atleast_1d(magnitude_response(cfg.afe, f))
    return list(zip(f.tolist(), (20 * np.log10(mag)).tolist()))


def cmd_bode(args) -> int:
    cfg = resolve_config(args)
    rows = bode_table(cfg, args.f_min, args.f_max, args.points)
    lines = [f"# config_hash={cfg.hash()}\n", "f_hz,magnitude_db\n"]
    lines += [f"{f:.6g},{db:.6f}\n" for f, db in rows]
    sys.stdout.write("".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eogforge", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON chain config (fallback: ${ENV_CONFIG})")
    common.add_argument("--preset", choices=PRESETS, help="base preset the config overlays")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="scenario -> serial CSV + ground truth")
    p.add_argument("--scenario", help="scenario JSON (default: built-in 10-saccade alternation)")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="overrides the noise seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("process", parents=[common], help="detect events and score a log")
    p.add_argument("log", help="serial CSV log")
    p.add_argument("--truth", help="ground-truth JSON from `simulate`")
    p.add_argument("--output", required=True, help="output directory")
    p.set_defaults(func=cmd_process)

    p = sub.add_parser("bode", parents=[common], help="analytic band-pass magnitude table")
    p.add_argument("--f-min", type=float, default=0.01)
    p.add_argument("--f-max", type=float, default=100.0)
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_bode)

    p = sub.add_parser("metrics", parents=[common], help="SNR / latency report for a log")
    p.add_argument("log", help="serial CSV log")
    p.add_argument("--truth", help="ground-truth JSON from `simulate`")
    p.add_argument("--output", help="write the JSON report here")
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidConfigError, InvalidScenarioError) as exc:
        print(f"eogforge: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"eogforge: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except EogError as exc:
        print(f"eogforge: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (AssertionError, ArithmeticError) as exc:
        print(f"eogforge: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
