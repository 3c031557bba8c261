"""Config-driven command line: simulate, consistency, verify, rate.

Exit codes: 0 success (or consistency not rejected / identities pass),
1 configuration or runtime error, 2 inconsistency detected or an identity
check failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import config as cfgmod
from .analysis import (
    CONSISTENT,
    consistency_test,
    identity_suite,
    rate_estimate,
)
from .engine import new_process
from .errors import ConfigError, StitsimError
from .measures import hitting_mass
from .output import dump_geometry, render_svg


def _out_path(out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def cmd_simulate(cfg: dict, out_dir: str, n_jobs: int) -> int:
    state = new_process(cfg["window"], cfg["rules"], cfg["seed"])
    state.advance(cfg["time"])
    prefix = cfg["out_prefix"]
    dump = _out_path(out_dir, f"{prefix}.txt")
    svg = _out_path(out_dir, f"{prefix}.svg")
    dump_geometry(state, dump)
    render_svg(state, svg)
    print(f"wrote {dump} ({len(state.segments)} segments) and {svg}")
    return 0


def cmd_consistency(cfg: dict, out_dir: str, n_jobs: int) -> int:
    report = consistency_test(
        cfg["rules"],
        cfg["V"],
        cfg["W"],
        cfg["times"],
        cfg["n_reps"],
        probes=cfg["probes"],
        seed=cfg["seed"],
        alpha=cfg["alpha"],
        n_jobs=n_jobs,
    )
    with open(_out_path(out_dir, "consistency_report.json"), "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    text = report.to_text()
    with open(_out_path(out_dir, "consistency_report.txt"), "w") as fh:
        fh.write(text + "\n")
    print(text)
    return 0 if report.verdict == CONSISTENT else 2


def cmd_verify(cfg: dict, out_dir: str, n_jobs: int) -> int:
    if not cfg["identities"]:
        print("error: nothing to verify (empty identity list)", file=sys.stderr)
        return 1
    results = identity_suite(cfg["rules"], cfg["identities"], cfg["n_cases"], cfg["seed"])
    payload = []
    all_pass = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        all_pass = all_pass and r.passed
        extra = f"  ({r.detail})" if r.detail else ""
        print(f"{status}  {r.name:<16} residual {r.max_residual:.3e} (threshold {r.threshold:g}){extra}")
        payload.append(
            {
                "name": r.name,
                "passed": r.passed,
                "max_residual": r.max_residual,
                "threshold": r.threshold,
                "detail": r.detail,
            }
        )
    with open(_out_path(out_dir, "verify_report.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0 if all_pass else 2


def cmd_rate(cfg: dict, out_dir: str, n_jobs: int) -> int:
    rules = cfg["rules"]
    target = None
    if rules.stit_flag:
        target = hitting_mass(rules.division.measure, cfg["probe"])
        print(f"analytic hitting mass of probe: {target:.12g}")
    rows = []
    for dt in cfg["dts"]:
        est = rate_estimate(rules, cfg["window"], cfg["probe"], dt, cfg["n_reps"], seed=cfg["seed"])
        rows.append({"dt": dt, "estimate": est, "n_reps": cfg["n_reps"]})
        print(f"dt={dt:<10g} rate estimate {est:.6g}")
    with open(_out_path(out_dir, "rate_report.json"), "w") as fh:
        json.dump({"target": target, "rows": rows}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


_COMMANDS = {
    "simulate": (cfgmod.parse_simulate, cmd_simulate),
    "consistency": (cfgmod.parse_consistency, cmd_consistency),
    "verify": (cfgmod.parse_verify, cmd_verify),
    "rate": (cfgmod.parse_rate, cmd_rate),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stitsim",
        description="Cell-division tessellation simulator and consistency test harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON experiment config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=None, help="replicate parallelism cap (default: cores)")
        p.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    parse, run = _COMMANDS[args.command]
    n_jobs = args.threads if args.threads is not None else (os.cpu_count() or 1)
    if n_jobs < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 1
    try:
        raw = cfgmod.load_config(args.config)
        if args.seed is not None:
            raw["seed"] = args.seed
        cfg = parse(raw)
        return run(cfg, args.out, n_jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except StitsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
