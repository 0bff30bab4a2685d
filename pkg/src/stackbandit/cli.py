"""Command-line entry point: ``stackbandit list`` and ``stackbandit run``.

Settings are layered: preset defaults, then a JSON config file, then flags.
A config file holds the fields of ``RunConfig.to_dict()`` (any subset) and
may name a base preset under ``"experiment"``; a ``summary.json`` written by
``run`` is also accepted and reproduces its run exactly.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .envs import hbar_many, random_theta
from .harness import RunConfig, coverage_rate, run_batch, stream
from .presets import PRESETS

OUT_ENV = "STACKBANDIT_OUT"


class ConfigError(Exception):
    pass


def list_experiments(file=None) -> None:
    """Print presets in registry order: name, claim, defaults."""
    file = file or sys.stdout
    for p in PRESETS.values():
        c = p.config
        s = c.spec
        print(f"{p.name:22s} {p.claim}", file=file)
        print(f"{'':22s}   agent={c.agent} variant={s.variant.value} d={s.d} T={c.horizon} "
              f"seeds={len(c.seeds)} sigma_r={c.noise.sigma_r} sigma_b={c.noise.sigma_b} "
              f"expect: {p.expected}", file=file)


def _parse_seeds(text: str) -> tuple:
    try:
        if "," in text:
            return tuple(int(s) for s in text.split(",") if s.strip())
        return tuple(range(int(text)))
    except ValueError as exc:
        raise ConfigError(f"invalid --seeds {text!r}") from exc


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def resolve(args) -> tuple[str, RunConfig, tuple]:
    """Build ``(experiment name, RunConfig, checks)`` from parsed arguments."""
    data: dict = {}
    name = args.experiment
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if "config" in loaded and isinstance(loaded["config"], dict):
            loaded = loaded["config"]
        name = name or loaded.pop("experiment", None)
        data = loaded
    if name is None:
        raise ConfigError("give --experiment NAME or --config PATH")
    checks: tuple = ()
    if name in PRESETS:
        preset = PRESETS[name]
        base = preset.config.to_dict()
        # checkpoints and window follow the horizon unless set explicitly
        base.pop("checkpoints")
        base.pop("window")
        if args.T is not None and preset.config.window is not None:
            base["window"] = None
        elif preset.config.window is not None:
            base["window"] = list(preset.config.window)
        data = _merge(base, data)
        checks = preset.checks
    elif not args.config:
        raise ConfigError(f"unknown experiment {name!r}; see 'stackbandit list'")
    data = _merge(data, _flag_overrides(args))
    data.pop("experiment", None)
    try:
        config = RunConfig.from_dict(data)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    return name, config, checks


def _flag_overrides(args) -> dict:
    over: dict = {}
    spec = {k: v for k, v in (("d", args.d), ("delta", args.delta), ("zeta", args.zeta),
                              ("k", args.k)) if v is not None}
    if spec:
        over["spec"] = spec
    noise = {k: v for k, v in (("sigma_r", args.sigma_r), ("sigma_b", args.sigma_b)) if v is not None}
    if noise:
        over["noise"] = noise
    if args.T is not None:
        over["horizon"] = args.T
        over["checkpoints"] = None
    if args.seeds is not None:
        over["seeds"] = list(_parse_seeds(args.seeds))
    if args.agent is not None:
        over["agent"] = args.agent
    if args.eps is not None:
        over["agent_params"] = {"eps": args.eps}
    if args.d is not None:
        over["theta"] = None
        over["theta_aux"] = None
    return over


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _run_checks(checks, config, traces) -> dict:
    spec = config.spec
    out: dict = {}
    if "curse" in checks:
        delta = spec.delta
        frac_reg = [float(np.mean(np.abs(tr.per_round - delta) <= 0.01)) for tr in traces]
        frac_b = [float(np.mean(tr.responses[:, 0] == 1.0)) for tr in traces]
        out["curse"] = {"fraction_regret_near_delta": frac_reg, "fraction_response_one": frac_b}
    if "cap" in checks:
        worst = []
        for tr in traces:
            b1 = tr.responses[0]
            worst.append(float(np.min(tr.actions[1:] @ b1) - spec.zeta))
        out["cap"] = {"min_margin": worst}
    if "proxy" in checks:
        ratio = 2 * spec.k / (2 * spec.k - 1)
        out["proxy"] = {
            "true_minus_bound": [float(np.max(tr.cum_regret - ratio * tr.proxy_regret))
                                 for tr in traces]}
    if "lipschitz" in checks:
        rng = stream(0, "lipschitz-check")
        theta = random_theta(spec, rng)
        A = rng.uniform(-1, 1, (20_000, spec.leader_dim))
        A /= np.maximum(1.0, np.linalg.norm(A, axis=1))[:, None]
        h = hbar_many(spec, theta, A)
        b = (A @ theta.main) ** (2 * spec.k - 1)
        lhs = np.abs(h[::2] - h[1::2])
        rhs = 2 * spec.k / (2 * spec.k - 1) * np.abs(b[::2] - b[1::2])
        out["lipschitz"] = {"pairs": len(lhs), "violations": int(np.sum(lhs > rhs + 1e-9))}
    if "coverage" in checks:
        out["coverage"] = coverage_rate(config)
    return out


def run_experiment(args) -> int:
    try:
        name, config, checks = resolve(args)
        fmt = args.format
        if fmt not in ("csv", "json", "both"):
            raise ConfigError(f"unknown --format {fmt!r}")
        out_dir = Path(args.out or os.environ.get(OUT_ENV) or "out")
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            probe = out_dir / ".write-test"
            probe.write_text("")
            probe.unlink()
        except OSError as exc:
            raise ConfigError(f"output directory {out_dir} is not writable: {exc}") from exc
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        start = time.perf_counter()
        run_config = dataclasses.replace(config, record=config.record or bool(checks))
        summary, traces = run_batch(run_config, threads=args.threads)
        extras = _run_checks(checks, run_config, traces)
        runtime = time.perf_counter() - start
        if fmt in ("csv", "both"):
            with open(out_dir / "traces.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["experiment", "seed", "checkpoint", "cum_regret",
                            "empty_intersection_count"])
                for tr in traces:
                    for c, r, e in zip(tr.checkpoints, tr.cum_regret, tr.empty_intersections):
                        w.writerow([name, tr.seed, int(c), _fmt(r), int(e)])
        if fmt in ("json", "both"):
            echo = config.to_dict()
            echo["experiment"] = name
            doc = {
                "config": echo,
                "checkpoints": [int(c) for c in summary.checkpoints],
                "mean": [float(x) for x in summary.mean],
                "se": [float(x) for x in summary.se],
                "exponent": summary.exponent,
                "exponent_se": summary.exponent_se,
                "window": list(summary.window),
                "runtime_seconds": runtime,
                "checks": extras,
            }
            (out_dir / "summary.json").write_text(json.dumps(doc, indent=2) + "\n")
    except Exception as exc:  # noqa: BLE001 - any failure during the run maps to exit 3
        print(f"error: run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    exp = "n/a" if summary.exponent is None else f"{summary.exponent:.3f}"
    print(f"{name}: T={config.horizon} seeds={len(config.seeds)} "
          f"mean R(T)={summary.mean[-1]:.4g} exponent={exp} -> {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stackbandit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list experiment presets")
    run = sub.add_parser("run", help="run a preset or a config file")
    src = run.add_mutually_exclusive_group()
    src.add_argument("--experiment", help="preset name")
    src.add_argument("--config", help="JSON config file (or a summary.json)")
    run.add_argument("--T", type=int)
    run.add_argument("--d", type=int)
    run.add_argument("--seeds", help="count N (seeds 0..N-1) or comma-separated list")
    run.add_argument("--sigma-r", type=float, dest="sigma_r")
    run.add_argument("--sigma-b", type=float, dest="sigma_b")
    run.add_argument("--delta", type=float)
    run.add_argument("--zeta", type=float)
    run.add_argument("--k", type=int)
    run.add_argument("--eps", type=float)
    run.add_argument("--agent", help="override the preset's agent")
    run.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")
    run.add_argument("--format", default="both", help="csv, json or both")
    run.add_argument("--threads", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.command == "list":
        list_experiments()
        return 0
    return run_experiment(args)


if __name__ == "__main__":
    sys.exit(main())
