"""Quantum-jump trajectories of two leaking condensates and ensemble averages.

Each remaining atom leaves at rate ``2 gamma``, so the total jump rate with
``M`` atoms is ``2 gamma M``.  A departing atom reaches the interfering
detector with probability ``eta``; otherwise it is lost from condensate
``a`` or ``b`` with probability proportional to that mode's occupation.
Between jumps the state picks up the collisional phases.

Two stopping/recording axes are supported: the number of jumps ``k``
(count mode) and physical time (time mode).  Waiting times are drawn in
time mode and in count mode whenever ``kappa > 0``.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .coherent import max_overlap
from .fock import (
    TwoModeFockState,
    apply_collision_phase,
    apply_interference_jump,
    apply_loss_jump,
    mode_occupations,
    normalize,
    number_state,
)
from .jump import fringe_stats, sample_position

log = logging.getLogger(__name__)

INTERFERING = "interfering"
LOSS_A = "loss_a"
LOSS_B = "loss_b"

OBSERVABLES = ("beta_c", "max_overlap", "state_snapshot", "atoms", "detections")
SCALAR_OBSERVABLES = ("beta_c", "max_overlap", "atoms", "detections")


class ConfigError(ValueError):
    """Invalid simulation configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a trajectory ensemble.

    Exactly one of ``max_detections`` / ``max_time`` selects the axis; with
    neither set the run continues until the condensates are empty, counting
    detections.  ``record_at`` holds detection counts (count mode) or times
    (time mode) at which ``observables`` are captured.
    """

    n1: int
    n2: int
    gamma: float = 1.0
    kappa: float = 0.0
    eta: float = 1.0
    seed: int = 0
    max_detections: int | None = None
    max_time: float | None = None
    record_at: tuple[float, ...] = ()
    observables: tuple[str, ...] = ("beta_c",)

    def __post_init__(self) -> None:
        object.__setattr__(self, "record_at", tuple(self.record_at))
        object.__setattr__(self, "observables", tuple(self.observables))
        self.validate()

    @property
    def time_mode(self) -> bool:
        return self.max_time is not None

    @property
    def total_atoms(self) -> int:
        return self.n1 + self.n2

    def validate(self) -> None:
        for name in ("n1", "n2"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                raise ConfigError(name, f"must be a non-negative integer, got {v!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigError("eta", f"must lie in [0, 1], got {self.eta}")
        if self.kappa < 0:
            raise ConfigError("kappa", f"must be >= 0, got {self.kappa}")
        if not self.gamma > 0:
            raise ConfigError("gamma", f"must be > 0, got {self.gamma}")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.max_detections is not None and self.max_time is not None:
            raise ConfigError("max_time", "give max_detections or max_time, not both")
        if self.max_detections is not None and self.max_detections < 0:
            raise ConfigError("max_detections", f"must be >= 0, got {self.max_detections}")
        if self.max_time is not None and not self.max_time >= 0:
            raise ConfigError("max_time", f"must be >= 0, got {self.max_time}")
        unknown = [o for o in self.observables if o not in OBSERVABLES]
        if unknown:
            raise ConfigError("observables", f"unknown {unknown}; choose from {list(OBSERVABLES)}")
        rec = self.record_at
        if any(b <= a for a, b in zip(rec, rec[1:])):
            raise ConfigError("record_at", "record points must be strictly ascending")
        if rec and rec[0] < 0:
            raise ConfigError("record_at", "record points must be >= 0")
        if not self.time_mode and any(float(x) != int(x) for x in rec):
            raise ConfigError("record_at", "detection-count record points must be integers")
        limit = self.max_time if self.time_mode else self.max_detections
        if limit is not None and rec and rec[-1] > limit:
            raise ConfigError("record_at", f"record point {rec[-1]} lies beyond the stop at {limit}")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["record_at"] = list(self.record_at)
        d["observables"] = list(self.observables)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> SimConfig:
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(sorted(extra)[0], "unknown configuration key")
        return cls(**d)


@dataclass(frozen=True)
class DetectionEvent:
    kind: str
    phi: float | None = None
    time: float | None = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {}
        if self.time is not None:
            d["time"] = self.time
        d["kind"] = self.kind
        if self.phi is not None:
            d["phi"] = self.phi
        return d


@dataclass
class Record:
    """Observables captured at one record point ``x`` (a count or a time)."""

    x: float
    values: dict[str, Any] = field(default_factory=dict)


@dataclass
class TrajectoryResult:
    events: list[DetectionEvent]
    records: list[Record]
    final_state: TwoModeFockState

    def __iter__(self):
        return iter((self.events, self.records))


@dataclass(frozen=True)
class CurvePoint:
    x: float
    mean: float
    stderr: float
    n: int


@dataclass(frozen=True)
class EnsembleCurve:
    axis: str
    points: tuple[CurvePoint, ...]

    @property
    def x(self) -> np.ndarray:
        return np.array([p.x for p in self.points])

    @property
    def mean(self) -> np.ndarray:
        return np.array([p.mean for p in self.points])

    @property
    def stderr(self) -> np.ndarray:
        return np.array([p.stderr for p in self.points])


def trajectory_seed(master: int, index: int) -> np.random.SeedSequence:
    """Independent, schedule-free random stream for trajectory ``index``."""
    return np.random.SeedSequence(entropy=int(master), spawn_key=(int(index),))


def _observe(state: TwoModeFockState, k: int, names: tuple[str, ...]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    M = state.total_atoms
    for name in names:
        if name == "beta_c":
            out[name] = fringe_stats(state).beta_c if M > 0 else math.nan
        elif name == "max_overlap":
            out[name] = max_overlap(state).p_max
        elif name == "state_snapshot":
            out[name] = state.amplitudes.copy()
        elif name == "atoms":
            out[name] = float(M)
        elif name == "detections":
            out[name] = float(k)
    return out


def _jump(state: TwoModeFockState, eta: float, rng: np.random.Generator, t: float | None):
    M = state.total_atoms
    if rng.random() < eta:
        phi = sample_position(state, rng)
        return apply_interference_jump(state, phi), DetectionEvent(INTERFERING, phi, t)
    na, _ = mode_occupations(state)
    if rng.random() * M < na:
        return apply_loss_jump(state, "a"), DetectionEvent(LOSS_A, None, t)
    return apply_loss_jump(state, "b"), DetectionEvent(LOSS_B, None, t)


def run_trajectory(config: SimConfig, index: int = 0) -> TrajectoryResult:
    """Simulate one trajectory, drawing randomness from stream ``index`` of ``config.seed``."""
    rng = np.random.default_rng(trajectory_seed(config.seed, index))
    if config.time_mode:
        return _run_time_mode(config, rng)
    return _run_count_mode(config, rng)


def _run_count_mode(config: SimConfig, rng: np.random.Generator) -> TrajectoryResult:
    state = number_state(config.n1, config.n2)
    kmax = config.total_atoms if config.max_detections is None else config.max_detections
    timed = config.kappa > 0
    pending = [int(x) for x in config.record_at]
    events: list[DetectionEvent] = []
    records: list[Record] = []
    t = 0.0
    k = 0
    while True:
        while pending and pending[0] == k:
            records.append(Record(pending.pop(0), _observe(state, k, config.observables)))
        if k >= kmax or state.total_atoms == 0:
            break
        if timed:
            dt = rng.exponential(1.0 / (2.0 * config.gamma * state.total_atoms))
            t += dt
            state = apply_collision_phase(state, config.kappa, dt)
        state, event = _jump(state, config.eta, rng, t if timed else None)
        state = normalize(state)
        events.append(event)
        k += 1
    # unreachable counts: the condensates emptied first
    for x in pending:
        records.append(Record(x, {name: math.nan for name in config.observables if name != "state_snapshot"}))
    return TrajectoryResult(events, records, state)


def _run_time_mode(config: SimConfig, rng: np.random.Generator) -> TrajectoryResult:
    state = number_state(config.n1, config.n2)
    tmax = float(config.max_time)
    kappa = config.kappa
    pending = [float(x) for x in config.record_at]
    events: list[DetectionEvent] = []
    records: list[Record] = []
    t = 0.0
    k = 0

    def advance(to: float) -> None:
        nonlocal state, t
        state = apply_collision_phase(state, kappa, to - t)
        t = to

    while state.total_atoms > 0:
        t_next = t + rng.exponential(1.0 / (2.0 * config.gamma * state.total_atoms))
        if t_next > tmax:
            break
        while pending and pending[0] < t_next:
            advance(pending.pop(0))
            records.append(Record(t, _observe(state, k, config.observables)))
        advance(t_next)
        state, event = _jump(state, config.eta, rng, t)
        state = normalize(state)
        events.append(event)
        k += 1
    for x in pending:
        advance(x)
        records.append(Record(x, _observe(state, k, config.observables)))
    return TrajectoryResult(events, records, state)


def equal_position_state(n: int, k: int, phi: float = 0.0) -> TwoModeFockState:
    """``(a + exp(i phi) b)^k |n, n>``, normalized."""
    if not 0 <= k <= 2 * n:
        raise ValueError(f"need 0 <= k <= 2n, got n={n}, k={k}")
    state = number_state(n, n)
    for _ in range(k):
        state = normalize(apply_interference_jump(state, phi))
    return state


def _scalar_block(config: SimConfig, start: int, stop: int, names: tuple[str, ...]) -> np.ndarray:
    out = np.empty((stop - start, len(config.record_at), len(names)))
    for row, index in enumerate(range(start, stop)):
        result = run_trajectory(config, index)
        for j, rec in enumerate(result.records):
            out[row, j] = [rec.values[name] for name in names]
    return out


def _map_block(config: SimConfig, start: int, stop: int, fn) -> list:
    return [fn(run_trajectory(config, index)) for index in range(start, stop)]


def map_trajectories(config: SimConfig, n_traj: int, fn, workers: int | None = None) -> list:
    """Apply ``fn`` to every trajectory result, in index order.

    ``fn`` must be picklable (a module-level function) when ``workers > 1``.
    """
    workers = default_workers() if workers is None else workers
    if workers <= 1:
        return _map_block(config, 0, n_traj, fn)
    bounds = np.linspace(0, n_traj, min(workers * 4, n_traj) + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_map_block, config, int(a), int(b), fn) for a, b in zip(bounds, bounds[1:]) if b > a]
        return [item for f in futures for item in f.result()]


def default_workers() -> int:
    return int(os.environ.get("BECJUMP_WORKERS", "1"))


def run_ensemble(config: SimConfig, n_traj: int, workers: int | None = None) -> dict[str, EnsembleCurve]:
    """Average the scalar observables of ``n_traj`` trajectories at every record point.

    Trajectory ``i`` always uses random stream ``i``, and the reduction runs
    over the full, index-ordered sample array, so results are bitwise
    independent of ``workers``.  Points where some trajectories had no atoms
    left (``nan`` values) are averaged over the remaining ones.
    """
    if n_traj < 1:
        raise ValueError(f"n_traj must be >= 1, got {n_traj}")
    workers = default_workers() if workers is None else workers
    names = tuple(o for o in config.observables if o in SCALAR_OBSERVABLES)
    if not names or not config.record_at:
        return {}

    if workers <= 1:
        samples = _scalar_block(config, 0, n_traj, names)
    else:
        bounds = np.linspace(0, n_traj, min(workers * 4, n_traj) + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_scalar_block, config, int(a), int(b), names) for a, b in zip(bounds, bounds[1:]) if b > a
            ]
            samples = np.concatenate([f.result() for f in futures], axis=0)
    log.debug("ensemble of %d trajectories done", n_traj)

    axis = "time" if config.time_mode else "detection_count"
    curves: dict[str, EnsembleCurve] = {}
    for j, name in enumerate(names):
        points = []
        for i, x in enumerate(config.record_at):
            col = samples[:, i, j]
            col = col[~np.isnan(col)]
            n = col.size
            if n == 0:
                points.append(CurvePoint(float(x), math.nan, math.nan, 0))
                continue
            mean = float(np.mean(col))
            stderr = float(np.std(col, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
            points.append(CurvePoint(float(x), mean, stderr, n))
        curves[name] = EnsembleCurve(axis, tuple(points))
    return curves
