"""Statistics of the next detection position.

For a state of ``M`` atoms the density of the next detection is

    P(phi) = [1 + beta_c cos(phi - theta)] / (2 pi)

with ``beta_c = 2 |<a^dag b>| / <a^dag a + b^dag b>``.  With the jump
operator ``a + exp(i phi) b`` the norm of the post-jump state peaks at
``phi = -arg <a^dag b>``, which is what ``theta`` reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import TwoModeFockState, VacuumError, expect_adag_b, norm_sq

_CLAMP_TOL = 1e-12
_FLAT_TOL = 1e-14


@dataclass(frozen=True)
class FringeStats:
    beta_c: float
    theta: float


def fringe_stats(state: TwoModeFockState) -> FringeStats:
    """Conditional visibility and fringe offset of ``state``.

    Raises:
        VacuumError: for ``M = 0``; there is no next detection.
    """
    M = state.total_atoms
    if M == 0:
        raise VacuumError("the vacuum has no next detection")
    z = expect_adag_b(state)
    beta = 2.0 * abs(z) / (M * norm_sq(state))
    if beta > 1.0:
        if beta > 1.0 + _CLAMP_TOL:
            raise RuntimeError(f"conditional visibility {beta!r} exceeds 1")
        beta = 1.0
    theta = 0.0 if beta < _FLAT_TOL else -math.atan2(z.imag, z.real)
    if theta <= -math.pi:
        theta += 2 * math.pi
    return FringeStats(beta, theta)


def fringe_density(phi, beta_c: float, theta: float):
    return (1.0 + beta_c * np.cos(np.asarray(phi) - theta)) / (2 * np.pi)


def detection_density(state: TwoModeFockState, phi):
    """Probability density of detecting the next atom at ``phi`` (vectorized)."""
    fs = fringe_stats(state)
    return fringe_density(phi, fs.beta_c, fs.theta)


def sample_fringe(beta_c: float, theta: float, rng: np.random.Generator) -> float:
    """Rejection sample from the fringe density with a flat envelope."""
    bound = 1.0 + beta_c
    while True:
        phi = rng.uniform(-np.pi, np.pi)
        if rng.random() * bound < 1.0 + beta_c * math.cos(phi - theta):
            return phi


def sample_position(state: TwoModeFockState, rng: np.random.Generator) -> float:
    fs = fringe_stats(state)
    return sample_fringe(fs.beta_c, fs.theta, rng)
