"""Atomic coherent states and overlaps against that family.

An atomic coherent state of ``N`` atoms is ``(mu a^dag + nu b^dag)^N |0,0> / sqrt(N!)``
with ``|mu|^2 + |nu|^2 = 1``.  Pairs are kept in a canonical gauge with ``mu``
real and non-negative, so the family is charted by a polar angle
``polar in [0, pi]`` and relative phase ``phase in [-pi, pi)``:

    mu = cos(polar / 2),   nu = sin(polar / 2) exp(i phase)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import xlogy

from ._special import log_binom
from .fock import TwoModeFockState, norm_sq

GRID_POLAR = 181
GRID_PHASE = 361
REFINE_TOL = 1e-6

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2 * math.pi) - math.pi


@dataclass(frozen=True)
class ModePair:
    """A normalized, gauge-fixed point ``(mu, nu)`` on the two-mode sphere."""

    mu: complex
    nu: complex

    def __post_init__(self) -> None:
        mu, nu = complex(self.mu), complex(self.nu)
        r = math.hypot(abs(mu), abs(nu))
        if r == 0.0 or not math.isfinite(r):
            raise ValueError("mode pair must be finite and not both zero")
        mu, nu = mu / r, nu / r
        if abs(mu) > 0.0:
            gauge = abs(mu) / mu
        else:
            gauge = abs(nu) / nu
        object.__setattr__(self, "mu", complex(abs(mu), 0.0))
        object.__setattr__(self, "nu", nu * gauge if abs(mu) > 0.0 else complex(abs(nu), 0.0))

    @classmethod
    def from_angles(cls, polar: float, phase: float) -> ModePair:
        return cls(math.cos(polar / 2), math.sin(polar / 2) * complex(math.cos(phase), math.sin(phase)))

    @property
    def polar(self) -> float:
        return 2.0 * math.atan2(abs(self.nu), self.mu.real)

    @property
    def phase(self) -> float:
        if self.nu == 0:
            return 0.0
        return _wrap(math.atan2(self.nu.imag, self.nu.real))


@dataclass(frozen=True)
class OverlapResult:
    p_max: float
    argmax: ModePair
    grid_resolution_used: int


def _acs_amplitudes(mu: complex, nu: complex, N: int) -> NDArray[np.complex128]:
    n = np.arange(N + 1)
    log_mag = 0.5 * log_binom(N, n) + xlogy(n, abs(mu)) + xlogy(N - n, abs(nu))
    arg = n * np.angle(mu) + (N - n) * np.angle(nu)
    return np.exp(log_mag + 1j * arg)


def atomic_coherent_state(pair: ModePair, N: int) -> TwoModeFockState:
    """``|mu, nu>_N`` with amplitudes ``sqrt(C(N, n)) mu^n nu^(N-n)``."""
    if N < 0:
        raise ValueError(f"atom number must be non-negative, got {N}")
    return TwoModeFockState(_acs_amplitudes(pair.mu, pair.nu, N))


def phase_state(phi: float, N: int) -> TwoModeFockState:
    """Phase state ``|phi>_N``: ``mu = exp(i phi)/sqrt(2)``, ``nu = exp(-i phi)/sqrt(2)``.

    The amplitudes keep the symmetric phase convention rather than the
    canonical gauge of :class:`ModePair`.
    """
    if N < 0:
        raise ValueError(f"atom number must be non-negative, got {N}")
    s = math.sqrt(0.5)
    return TwoModeFockState(_acs_amplitudes(s * np.exp(1j * phi), s * np.exp(-1j * phi), N))


def phase_state_pair(phi: float) -> ModePair:
    s = math.sqrt(0.5)
    return ModePair(s * complex(math.cos(phi), math.sin(phi)), s * complex(math.cos(phi), -math.sin(phi)))


def overlap_kernel(pair1: ModePair, pair2: ModePair, N: int) -> complex:
    """``<pair2|pair1>_N = (mu1 mu2^* + nu1 nu2^*)^N``, via modulus and argument."""
    z = pair1.mu * pair2.mu.conjugate() + pair1.nu * pair2.nu.conjugate()
    if N == 0:
        return 1 + 0j
    if z == 0:
        return 0j
    mag = math.exp(N * math.log(abs(z)))
    arg = N * math.atan2(z.imag, z.real)
    return complex(mag * math.cos(arg), mag * math.sin(arg))


def overlap_with(state: TwoModeFockState, pair: ModePair) -> float:
    """``|<psi|mu, nu>_M|^2 / <psi|psi>`` with ``M`` the atoms in ``state``."""
    acs = _acs_amplitudes(pair.mu, pair.nu, state.total_atoms)
    amp = np.vdot(state.amplitudes, acs)
    return float(min(abs(amp) ** 2 / norm_sq(state), 1.0))


class _ChartOverlap:
    """Overlap of one fixed normalized state, evaluated on the (polar, phase) chart."""

    def __init__(self, state: TwoModeFockState) -> None:
        c = state.amplitudes / math.sqrt(norm_sq(state))
        self.M = M = state.total_atoms
        self.n = np.arange(M + 1)
        self.q = M - self.n
        self.cbar = np.conj(c)
        self.half_log_binom = 0.5 * log_binom(M, self.n)

    def _weights(self, polar):
        polar = np.atleast_1d(np.asarray(polar, dtype=float))[:, None]
        log_w = (
            self.half_log_binom[None, :]
            + xlogy(self.n[None, :], np.abs(np.cos(polar / 2)))
            + xlogy(self.q[None, :], np.abs(np.sin(polar / 2)))
        )
        return self.cbar[None, :] * np.exp(log_w)

    def __call__(self, polar: float, phase: float) -> float:
        w = self._weights(polar)[0]
        amp = np.dot(w, np.exp(1j * phase * self.q))
        return float(abs(amp) ** 2)

    def grid(self, polars, n_phase: int) -> NDArray[np.float64]:
        """Overlap on ``polars`` x ``n_phase`` equispaced phases starting at -pi.

        The sum over ``n`` is a Fourier series in the phase, so each row is
        one FFT when the series fits in ``n_phase`` bins.
        """
        w = self._weights(polars)
        if self.M + 1 <= n_phase:
            a = np.zeros((w.shape[0], n_phase), dtype=np.complex128)
            a[:, self.q] = w * np.where(self.q % 2 == 0, 1.0, -1.0)[None, :]
            amp = np.fft.ifft(a, axis=1) * n_phase
        else:
            phases = -np.pi + 2 * np.pi * np.arange(n_phase) / n_phase
            amp = w @ np.exp(1j * np.outer(self.q, phases))
        return np.abs(amp) ** 2


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on ``[lo, hi]``."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def max_overlap(state: TwoModeFockState) -> OverlapResult:
    """Maximize :func:`overlap_with` over the atomic-coherent family.

    A 181 x 361 grid (1 degree in each chart angle, the phase seam at
    +-pi counted once) locates the best lobe; ties go to the lowest polar
    angle, then the lowest phase.  Alternating golden-section line searches
    then refine the point until a full sweep moves it by less than 1e-6 rad.
    """
    f = _ChartOverlap(state)
    polars = np.linspace(0.0, np.pi, GRID_POLAR)
    n_phase = GRID_PHASE - 1
    values = f.grid(polars, n_phase)
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    polar = float(polars[i])
    phase = -np.pi + 2 * np.pi * j / n_phase
    best = float(values[i, j])

    half_width = np.pi / 180.0
    for _ in range(200):
        lo, hi = max(0.0, polar - half_width), min(np.pi, polar + half_width)
        x, v = _golden_max(lambda t: f(t, phase), lo, hi, 0.01 * REFINE_TOL)
        step = 0.0
        if v > best:
            step, polar, best = abs(x - polar), x, v
        x, v = _golden_max(lambda p: f(polar, p), phase - half_width, phase + half_width, 0.01 * REFINE_TOL)
        if v > best:
            step, phase, best = max(step, abs(x - phase)), _wrap(x), v
        if step < REFINE_TOL:
            break
        half_width = min(half_width, max(4.0 * step, 10 * REFINE_TOL))

    return OverlapResult(min(best, 1.0), ModePair.from_angles(polar, phase), GRID_POLAR * GRID_PHASE)
