"""Data series behind the published figures, one bundle per figure.

Every bundle is a list of :class:`Row` (series, x, mean, stderr, n); the
analytic comparison curves are included next to the Monte Carlo ones with
``stderr = 0`` and ``n = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import theory
from .coherent import _ChartOverlap, phase_state
from .fock import TwoModeFockState, apply_collision_phase
from .jump import fringe_stats
from .trajectory import SimConfig, equal_position_state, map_trajectories, run_ensemble


@dataclass(frozen=True)
class Row:
    series: str
    x: float
    mean: float
    stderr: float = 0.0
    n: int = 0


def _curve_rows(series: str, curve) -> list[Row]:
    return [Row(series, p.x, p.mean, p.stderr, p.n) for p in curve.points]


def _exact_rows(series: str, xs, values) -> list[Row]:
    return [Row(series, float(x), float(v)) for x, v in zip(xs, values)]


def fig2(traj: int = 1000, seed: int = 0, workers: int | None = None, kmax: int = 20) -> list[Row]:
    """Mean visibility vs detections from |100,100>."""
    n = 100
    ks = range(1, kmax + 1)
    cfg = SimConfig(n, n, seed=seed, max_detections=kmax, record_at=tuple(ks))
    rows = _curve_rows("mc_average", run_ensemble(cfg, traj, workers)["beta_c"])
    rows += _exact_rows("equal_position", ks, [theory.oracle_beta_equalpos(n, k) for k in ks])
    rows += _exact_rows("approx_exp", ks, [theory.beta_equalpos_approx(k) for k in ks])
    return rows


def fig3(traj: int = 200, seed: int = 0, workers: int | None = None, step: int = 5) -> list[Row]:
    """Mean visibility after 5 and 99 detections vs n2, with n1 + n2 = 100."""
    total = 100
    rows: list[Row] = []
    for n2 in range(0, total + 1, step):
        n1 = total - n2
        cfg = SimConfig(n1, n2, seed=seed, max_detections=99, record_at=(5, 99))
        curve = run_ensemble(cfg, traj, workers)["beta_c"]
        p5, p99 = curve.points
        rows.append(Row("exact_k99", n2, p99.mean, p99.stderr, p99.n))
        rows.append(Row("exact_k5", n2, p5.mean, p5.stderr, p5.n))
        rows.append(Row("approx_k99", n2, theory.beta_unequal_approx(n1, n2, 99)))
        rows.append(Row("approx_k5", n2, theory.beta_unequal_approx(n1, n2, 5)))
    return rows


def fig4(traj: int = 2000, seed: int = 0, workers: int | None = None, points: int = 20) -> list[Row]:
    """Maximum coherent-state overlap vs detected fraction k/N."""
    rows: list[Row] = []
    fractions = np.linspace(0.0, 1.0, points + 1)
    for label, (n1, n2) in (("n100_100", (100, 100)), ("n200_50", (200, 50))):
        N = n1 + n2
        ks = sorted({int(round(f * N)) for f in fractions})
        cfg = SimConfig(n1, n2, seed=seed, max_detections=N, record_at=tuple(ks), observables=("max_overlap",))
        curve = run_ensemble(cfg, traj, workers)["max_overlap"]
        rows += [Row(label, p.x / N, p.mean, p.stderr, p.n) for p in curve.points]
    x = fractions[1:]
    rows += _exact_rows("approx", x, np.sqrt(x * (2.0 - x)))
    return rows


def _visibility_under_collisions(state: TwoModeFockState, kappa_ts) -> np.ndarray:
    return np.array([fringe_stats(apply_collision_phase(state, 1.0, kt)).beta_c for kt in kappa_ts])


def _snapshot_decay(result, kappa_ts) -> np.ndarray:
    return _visibility_under_collisions(result.final_state, kappa_ts)


def fig5(traj: int = 200, seed: int = 0, workers: int | None = None, kt_max: float = 0.2, points: int = 41) -> list[Row]:
    """Collisional decay of the visibility for three 150-atom states; x is kappa t."""
    n, k = 100, 50
    kts = np.linspace(0.0, kt_max, points)
    cfg = SimConfig(n, n, seed=seed, max_detections=k)
    samples = np.array(map_trajectories(cfg, traj, partial(_snapshot_decay, kappa_ts=kts), workers))
    se = samples.std(axis=0, ddof=1) / math.sqrt(traj) if traj > 1 else np.zeros(points)
    rows = [Row("mc_after_50", float(x), float(m), float(s), traj) for x, m, s in zip(kts, samples.mean(axis=0), se)]
    rows += _exact_rows("equal_50", kts, _visibility_under_collisions(equal_position_state(n, k), kts))
    rows += _exact_rows("phase_150", kts, _visibility_under_collisions(phase_state(0.0, 2 * n - k), kts))
    rows += _exact_rows("approx_psik", kts, [theory.beta_collision_psik(n, k, 1.0, x) for x in kts])
    rows += _exact_rows("approx_acs", kts, [theory.beta_collision_acs(2 * n - k, 1.0, x) for x in kts])
    return rows


def fig6(traj: int = 1000, seed: int = 0, workers: int | None = None) -> list[Row]:
    """Visibility vs detections with collisions, kappa/gamma in {0.5, 2, 5}."""
    n = 100
    ks = tuple(range(1, 2 * n))
    rows: list[Row] = []
    for ratio in (0.5, 2.0, 5.0):
        cfg = SimConfig(n, n, gamma=1.0, kappa=ratio, seed=seed, max_detections=ks[-1], record_at=ks)
        rows += _curve_rows(f"mc_kappa_{ratio:g}", run_ensemble(cfg, traj, workers)["beta_c"])
        rows += _exact_rows(f"steady_kappa_{ratio:g}", ks, [theory.beta_steady(n, k, 1.0, ratio) for k in ks])
    return rows


def fig7(traj: int = 1000, seed: int = 0, workers: int | None = None, stride: int = 10) -> list[Row]:
    """Maximum coherent-state overlap vs detections, kappa/gamma in {0.1, 0.5, 5}."""
    n = 100
    ks = tuple(range(0, 2 * n + 1, stride))
    rows: list[Row] = []
    for ratio in (0.1, 0.5, 5.0):
        cfg = SimConfig(
            n, n, gamma=1.0, kappa=ratio, seed=seed, max_detections=2 * n, record_at=ks, observables=("max_overlap",)
        )
        rows += _curve_rows(f"mc_kappa_{ratio:g}", run_ensemble(cfg, traj, workers)["max_overlap"])
    cfg = SimConfig(n, n, seed=seed, max_detections=2 * n, record_at=ks, observables=("max_overlap",))
    rows += _curve_rows("mc_kappa_0", run_ensemble(cfg, traj, workers)["max_overlap"])
    return rows


_PPHI_BINS = 720


def _aligned_phase_profile(result) -> np.ndarray:
    """Phase-state probability on a 0.25 degree grid, rolled so the peak sits at index 0."""
    f = _ChartOverlap(result.final_state)
    # phase-state angle phi maps to relative phase -2 phi at polar pi/2
    row = f.grid([np.pi / 2], _PPHI_BINS)[0]
    return np.roll(row, -int(np.argmax(row)))


def pphi(traj: int = 1000, seed: int = 0, workers: int | None = None) -> list[Row]:
    """Phase-state probability vs offset from its peak after k in {10, 100, 190} detections."""
    n = 100
    # a step of 2 pi / bins in relative phase is a step of pi / bins in phi
    offsets = -np.pi / _PPHI_BINS * np.arange(_PPHI_BINS)
    offsets = np.where(offsets < -np.pi / 2, offsets + np.pi, offsets)
    order = np.argsort(offsets)
    rows: list[Row] = []
    for k in (10, 100, 190):
        cfg = SimConfig(n, n, seed=seed, max_detections=k)
        samples = np.array(map_trajectories(cfg, traj, _aligned_phase_profile, workers))
        mean = samples.mean(axis=0)
        se = samples.std(axis=0, ddof=1) / math.sqrt(traj) if traj > 1 else np.zeros_like(mean)
        rows += [Row(f"mc_k{k}", float(offsets[i]), float(mean[i]), float(se[i]), traj) for i in order]
        rows += _exact_rows(f"approx_k{k}", offsets[order], theory.pphi_approx(n, k, offsets[order]))
    return rows


FIGURES = {
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "pphi": pphi,
}
