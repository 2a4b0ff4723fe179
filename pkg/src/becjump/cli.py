"""Command-line front end.

    becjump trajectory --n1 100 --n2 100 --record-k 1 --obs beta
    becjump ensemble --n1 100 --n2 100 --traj 2000 --record-k 1..20 --out-dir out/
    becjump theory beta1 --n1 100 --n2 100
    becjump figure fig2 --traj 500 --out-dir out/

Rates are in units of gamma (``--gamma`` defaults to 1); a rate may also be
written with a ``g`` suffix, e.g. ``--kappa 5g``.  Exit status is 2 for
invalid input and 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__, figures, theory
from .fock import FockStateError
from .trajectory import OBSERVABLES, ConfigError, SimConfig, default_workers, run_ensemble, run_trajectory

log = logging.getLogger("becjump")

OBS_ALIASES = {"beta": "beta_c", "overlap": "max_overlap", "state": "state_snapshot"}


class UsageError(Exception):
    """Bad command-line input; reported with exit status 2."""


# -- value parsing -------------------------------------------------------------------


def parse_int_range(text: str) -> list[int]:
    """``"5"``, ``"1,2,5"``, ``"1..20"`` or ``"0..200..10"`` (inclusive ends)."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            bits = part.split("..")
            if len(bits) not in (2, 3):
                raise UsageError(f"bad range {part!r}")
            lo, hi = int(bits[0]), int(bits[1])
            step = int(bits[2]) if len(bits) == 3 else 1
            if step <= 0:
                raise UsageError(f"range step must be positive in {part!r}")
            out.extend(range(lo, hi + 1, step))
        else:
            out.append(int(part))
    return out


def parse_float_range(text: str) -> list[float]:
    """``"0.5"``, ``"0.1,0.5,1"`` or ``"start:stop:count"`` (inclusive linspace)."""
    if ":" in text:
        bits = text.split(":")
        if len(bits) != 3:
            raise UsageError(f"bad linspace {text!r}; use start:stop:count")
        return [float(x) for x in np.linspace(float(bits[0]), float(bits[1]), int(bits[2]))]
    return [float(x) for x in text.split(",")]


def parse_rate(text: str, gamma: float) -> float:
    text = text.strip()
    if text.endswith("g"):
        return float(text[:-1]) * gamma
    return float(text)


def _parse_obs(text: str) -> tuple[str, ...]:
    names = tuple(OBS_ALIASES.get(o.strip(), o.strip()) for o in text.split(","))
    bad = [o for o in names if o not in OBSERVABLES]
    if bad:
        raise ConfigError("observables", f"unknown {bad}; choose from {sorted(OBS_ALIASES) + list(OBSERVABLES)}")
    return names


# -- configuration --------------------------------------------------------------------


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with SimConfig fields; flags override it")
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--kappa", help="collision rate (number, or multiple of gamma like 5g)")
    p.add_argument("--eta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-k", type=int, dest="max_detections")
    p.add_argument("--max-t", type=float, dest="max_time")
    p.add_argument("--record-k", help="detection counts to record at, e.g. 1..20")
    p.add_argument("--record-t", help="times to record at, e.g. 0:1:11 or 0.1,0.5")
    p.add_argument("--obs", help=f"observables, comma separated: {','.join(list(OBS_ALIASES) + list(OBSERVABLES))}")


def build_config(args: argparse.Namespace) -> SimConfig:
    data: dict[str, Any] = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(str(args.config), f"line {exc.lineno}: {exc.msg}") from None
        except OSError as exc:
            raise ConfigError(str(args.config), str(exc)) from None
        if not isinstance(data, dict):
            raise ConfigError(str(args.config), "top level must be an object")
    for name in ("n1", "n2", "gamma", "eta", "seed", "max_detections", "max_time"):
        v = getattr(args, name)
        if v is not None:
            data[name] = v
    gamma = float(data.get("gamma", 1.0))
    if args.kappa is not None:
        data["kappa"] = parse_rate(args.kappa, gamma)
    if args.record_k is not None and args.record_t is not None:
        raise ConfigError("record_at", "use --record-k or --record-t, not both")
    if args.record_k is not None:
        data["record_at"] = parse_int_range(args.record_k)
    elif args.record_t is not None:
        data["record_at"] = parse_float_range(args.record_t)
        if data.get("max_time") is None:
            data["max_time"] = max(data["record_at"])
    if args.obs is not None:
        data["observables"] = _parse_obs(args.obs)
    for name in ("n1", "n2"):
        if name not in data:
            raise ConfigError(name, "required (flag or config file)")
    rec = data.get("record_at") or []
    if data.get("max_time") is None and data.get("max_detections") is None and rec:
        data["max_detections"] = int(max(rec))
    return SimConfig.from_dict(data)


# -- output helpers -----------------------------------------------------------------


def _write(path: Path, text: str) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def _manifest(path: Path, config: dict[str, Any], seed: int, started: float, outputs: dict[str, str]) -> None:
    doc = {
        "config": config,
        "version": __version__,
        "seed": seed,
        "duration_s": time.perf_counter() - started,
        "outputs": outputs,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _json_value(v: Any) -> Any:
    if isinstance(v, np.ndarray):
        return {"re": v.real.tolist(), "im": v.imag.tolist()}
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


# -- subcommands -----------------------------------------------------------------------


def cmd_trajectory(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    config = build_config(args)
    result = run_trajectory(config)
    doc = {
        "events": [e.to_dict() for e in result.events],
        "records": [{"x": r.x, **{k: _json_value(v) for k, v in r.values.items()}} for r in result.records],
        "final_atoms": result.final_state.total_atoms,
        "final_state": _json_value(result.final_state.amplitudes),
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
        return 0
    digest = _write(args.out, text)
    manifest = args.out.with_name(args.out.stem + ".manifest.json")
    _manifest(manifest, config.to_dict(), config.seed, started, {args.out.name: digest})
    return 0


def cmd_ensemble(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    config = build_config(args)
    if not config.record_at:
        raise ConfigError("record_at", "an ensemble needs --record-k or --record-t")
    curves = run_ensemble(config, args.traj, args.workers)
    outputs = {}
    for name, curve in curves.items():
        text = _csv_text(["x", "mean", "stderr", "n"], ((p.x, p.mean, p.stderr, p.n) for p in curve.points))
        outputs[f"{name}.csv"] = _write(args.out_dir / f"{name}.csv", text)
    echo = {**config.to_dict(), "n_traj": args.traj}
    _manifest(args.out_dir / "manifest.json", echo, config.seed, started, outputs)
    print(f"wrote {', '.join(sorted(outputs))} to {args.out_dir}")
    return 0


def _theory_registry() -> dict[str, tuple[Callable[..., Any], tuple[str, ...]]]:
    return {
        "beta1": (theory.mean_beta_after_1, ("n1", "n2")),
        "beta2": (theory.mean_beta_after_2, ("n1", "n2")),
        "beta-equalpos": (theory.beta_equalpos_approx, ("k",)),
        "beta-unequal": (theory.beta_unequal_approx, ("n1", "n2", "k")),
        "pphi": (theory.pphi_approx, ("n", "k", "phi")),
        "beta-imperfect": (theory.beta_imperfect, ("k", "eta")),
        "pphi-imperfect": (theory.pphi_imperfect, ("n", "k", "eta", "phi")),
        "remaining": (theory.mean_remaining, ("N", "gamma", "t")),
        "detected": (theory.mean_detected, ("N", "gamma", "t")),
        "collision-acs": (theory.beta_collision_acs, ("N", "kappa", "t")),
        "collision-psik": (theory.beta_collision_psik, ("n", "k", "kappa", "t")),
        "steady": (theory.beta_steady, ("n", "k", "gamma", "kappa")),
        "overlap-decay": (theory.max_overlap_decay, ("n", "k", "kappa", "t")),
        "oracle-equalpos": (theory.oracle_beta_equalpos, ("n", "k")),
        "oracle-quadrature": (theory.oracle_mean_beta_quadrature, ("n1", "n2", "k")),
    }


_INT_PARAMS = {"n", "n1", "n2", "N"}
_THEORY_DEFAULTS = {"gamma": "1", "eta": "1", "phi": "0", "t": "0"}


def cmd_theory(args: argparse.Namespace) -> int:
    registry = _theory_registry()
    if args.formula not in registry:
        raise UsageError(f"unknown formula {args.formula!r}; available: {', '.join(registry)}")
    fn, params = registry[args.formula]
    if args.formula.startswith("oracle"):
        int_params = set(params)
    else:
        int_params = _INT_PARAMS
    values: dict[str, list[float]] = {}
    for name in params:
        raw = getattr(args, name)
        if raw is None:
            raw = _THEORY_DEFAULTS.get(name)
        if raw is None:
            raise UsageError(f"{args.formula} needs --{name}")
        if name in ("kappa",):
            gamma = float((getattr(args, "gamma") or "1").split(",")[0])
            raw = ",".join(str(parse_rate(x, gamma)) for x in raw.split(","))
        vals = parse_int_range(raw) if name in int_params or ".." in raw else parse_float_range(raw)
        values[name] = vals
    swept = [n for n, v in values.items() if len(v) > 1]
    if len(swept) > 1:
        raise UsageError(f"sweep at most one parameter, got {swept}")
    if not swept:
        print(repr(float(fn(*(values[n][0] for n in params)))))
        return 0
    name = swept[0]
    rows = []
    for x in values[name]:
        call = [x if n == name else values[n][0] for n in params]
        rows.append((x, float(fn(*call))))
    text = _csv_text(["x", "value"], rows)
    if args.out is None:
        sys.stdout.write(text)
    else:
        _write(args.out, text)
    return 0


def cmd_figure(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    fn = figures.FIGURES.get(args.id)
    if fn is None:
        raise UsageError(f"unknown figure {args.id!r}; available: {', '.join(figures.FIGURES)}")
    kwargs: dict[str, Any] = {"seed": args.seed, "workers": args.workers}
    if args.traj is not None:
        kwargs["traj"] = args.traj
    rows = fn(**kwargs)
    text = _csv_text(["series", "x", "mean", "stderr", "n"], ((r.series, r.x, r.mean, r.stderr, r.n) for r in rows))
    name = f"{args.id}.csv"
    digest = _write(args.out_dir / name, text)
    echo = {"figure": args.id, **{k: v for k, v in kwargs.items() if k != "workers"}}
    _manifest(args.out_dir / f"{args.id}.manifest.json", echo, args.seed, started, {name: digest})
    print(f"wrote {args.out_dir / name} ({len(rows)} rows)")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="becjump", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trajectory", help="run one trajectory and print its events as JSON")
    _add_config_flags(p)
    p.add_argument("--out", type=Path, help="write JSON here (and a .manifest.json next to it)")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("ensemble", help="average observables over many trajectories (CSV)")
    _add_config_flags(p)
    p.add_argument("--traj", type=int, default=1000)
    p.add_argument("--workers", type=int, default=None, help="process count (default $BECJUMP_WORKERS or 1)")
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("theory", help="evaluate an analytic formula or sweep one parameter")
    p.add_argument("formula")
    for name in ("n", "n1", "n2", "N", "k", "eta", "gamma", "kappa", "t", "phi"):
        p.add_argument(f"--{name}")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("figure", help="write the data series of a figure (CSV)")
    p.add_argument("id", help=", ".join(figures.FIGURES))
    p.add_argument("--traj", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "workers", None) is None and hasattr(args, "workers"):
        args.workers = default_workers()
    try:
        return args.func(args)
    except FockStateError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, UsageError, theory.DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError) as exc:
        # malformed numbers inside range specs and the like
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
