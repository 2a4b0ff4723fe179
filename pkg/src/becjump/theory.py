"""Closed-form approximations and exact reference values.

Notation: ``n`` atoms in each condensate initially (or ``n1``, ``n2``),
``k`` atoms detected so far, ``eta`` the detector efficiency, ``gamma`` the
per-atom decay rate (the total jump rate is ``2 gamma M``), ``kappa`` the
collision rate and ``t`` the elapsed time.  Non-integer ``k`` is accepted
wherever a formula is used with the effective-detection substitution
``k -> eta k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._special import erfcx, log_binom
from .fock import apply_interference_jump, expect_adag_b, number_state


class DomainError(ValueError):
    """Arguments outside the range where a formula is defined."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


@dataclass(frozen=True)
class ApproxParams:
    """Parameter bundle for the approximate formulas.

    ``xi = (1 - eta) / 2`` is the fraction of lost atoms attributed to each
    condensate when detection is imperfect.
    """

    n: float = 100
    k: float = 1
    eta: float = 1.0
    gamma: float = 1.0
    kappa: float = 0.0
    t: float = 0.0

    @property
    def xi(self) -> float:
        return (1.0 - self.eta) / 2.0


# -- visibility after the first detections -----------------------------------


def mean_beta_after_1(n1: int, n2: int) -> float:
    """Ensemble-mean visibility after one detection from ``|n1, n2>``."""
    N = n1 + n2
    _require(n1 >= 0 and n2 >= 0 and N >= 2, "need n1, n2 >= 0 and n1 + n2 >= 2")
    return 2.0 * n1 * n2 / (N * N - N)


def mean_beta_after_2(n1: int, n2: int) -> float:
    return 4.0 / math.pi * mean_beta_after_1(n1, n2)


def beta_equalpos_approx(k: float) -> float:
    """Visibility after ``k`` detections at one position: ``exp(-1/k)``."""
    _require(k >= 1, f"k must be >= 1, got {k}")
    return math.exp(-1.0 / k)


def beta_unequal_approx(n1: float, n2: float, k: float) -> float:
    _require(n1 >= 0 and n2 >= 0 and n1 + n2 > 0, "occupations must be non-negative, not both zero")
    return 2.0 * math.sqrt(n1 * n2) / (n1 + n2) * beta_equalpos_approx(k)


# -- overlap with phase states -------------------------------------------------


def pphi_approx(n: float, k: float, phi):
    """Gaussian approximation of the phase-state probability after ``k`` detections."""
    _require(1 <= k <= 2 * n, f"need 1 <= k <= 2n, got n={n}, k={k}")
    phi = np.asarray(phi, dtype=float)
    out = 0.5 * math.sqrt(k * (4 * n - k)) / n * np.exp(-0.5 * phi**2 * k * (2 * n - k) / n)
    return out[()] if out.ndim == 0 else out


def beta_imperfect(k: float, eta: float) -> float:
    _require(0 < eta <= 1, f"eta must lie in (0, 1], got {eta}")
    _require(k >= 1, f"k must be >= 1, got {k}")
    return math.exp(-1.0 / (eta * k))


def pphi_imperfect(n: float, k: float, eta: float, phi):
    _require(0 < eta <= 1, f"eta must lie in (0, 1], got {eta}")
    _require(1 <= k <= 2 * n, f"need 1 <= k <= 2n, got n={n}, k={k}")
    phi = np.asarray(phi, dtype=float)
    left = 2 * n - k + eta * k
    pref = math.sqrt(1.0 - (1.0 - eta * k / left) ** 2)
    out = pref * np.exp(-(phi**2) * eta * k * (2 * n - k) / left)
    return out[()] if out.ndim == 0 else out


# -- evolution in time -----------------------------------------------------------


def mean_remaining(N: float, gamma: float, t: float) -> float:
    _require(t >= 0, f"t must be >= 0, got {t}")
    return N * math.exp(-2.0 * gamma * t)


def mean_detected(N: float, gamma: float, t: float) -> float:
    _require(t >= 0, f"t must be >= 0, got {t}")
    return -N * math.expm1(-2.0 * gamma * t)


def time_for_mean_detected(N: float, gamma: float, k: float) -> float:
    """Inverse of :func:`mean_detected`."""
    _require(0 <= k < N, f"need 0 <= k < N, got N={N}, k={k}")
    return -math.log1p(-k / N) / (2.0 * gamma)


# -- collisions --------------------------------------------------------------------


def beta_collision_acs(N: int, kappa: float, t: float) -> float:
    """``|cos(2 kappa t)|^(N-1)`` for an equal-weight coherent state of ``N`` atoms."""
    _require(N >= 1, f"N must be >= 1, got {N}")
    return abs(math.cos(2.0 * kappa * t)) ** (N - 1)


def collision_decay_exponent(n: float, k: float) -> float:
    """Coefficient ``c`` in ``beta(t) ~ exp(-1/k) exp(-2 c kappa^2 t^2)`` for ``(a+b)^k |n,n>``."""
    _require(1 <= k <= 2 * n - 1, f"need 1 <= k <= 2n - 1, got n={n}, k={k}")
    return k * (2 * n - k - 1) / (4 * n - k - 2)


def beta_collision_psik(n: float, k: float, kappa: float, t: float) -> float:
    c = collision_decay_exponent(n, k)
    return math.exp(-1.0 / k) * math.exp(-2.0 * kappa**2 * t**2 * c)


def mean_decay_before_next_detection(n: float, k: float, gamma: float, kappa: float) -> float:
    """Visibility factor ``<exp(-t^2/tau^2)>`` averaged over the waiting time.

    The waiting time is exponential with rate ``2 n0 gamma``, ``n0 = 2n - k``;
    the average is ``sqrt(pi) s erfcx(s)`` with ``s = n0 gamma tau``.
    """
    _require(gamma > 0 and kappa >= 0, "need gamma > 0 and kappa >= 0")
    c = collision_decay_exponent(n, k)
    if kappa == 0 or c == 0:
        return 1.0
    tau = 1.0 / (kappa * math.sqrt(2.0 * c))
    s = (2 * n - k) * gamma * tau
    return float(math.sqrt(math.pi) * s * erfcx(s))


def beta_steady(n: float, k: float, gamma: float, kappa: float) -> float:
    """Steady-state visibility balancing detection gain against collisional decay."""
    _require(kappa > 0, f"kappa must be > 0, got {kappa}")
    avg = mean_decay_before_next_detection(n, k, gamma, kappa)
    return 1.0 / (1.0 + math.sqrt(max(0.0, 1.0 - avg)))


def max_overlap_decay(n: float, k: float, kappa: float, t: float):
    """Maximum phase-state overlap of ``(a+b)^k |n,n>`` after collisional evolution."""
    _require(1 <= k <= 2 * n, f"need 1 <= k <= 2n, got n={n}, k={k}")
    x = np.asarray(t, dtype=float) * kappa * k * (2 * n - k) / (2 * n)
    out = pphi_approx(n, k, 0.0) / np.sqrt(1.0 + x * x)
    return out[()] if np.ndim(out) == 0 else out


# -- exact references ------------------------------------------------------------


def oracle_beta_equalpos(n: int, k: int) -> float:
    """Exact visibility of ``(a+b)^k |n,n>`` from its closed binomial sums.

    With ``S0 = sum_m C(k,m)^2 C(2n-k, n-m)`` and
    ``S1 = sum_m C(k,m-1) C(k,m) C(2n-k-1, n-m)`` the visibility is
    ``2 S1 / S0``; both sums are taken in log space.
    """
    _require(0 <= k <= 2 * n, f"need 0 <= k <= 2n, got n={n}, k={k}")
    _require(n <= 500, f"n must be <= 500 for the log-gamma sums, got {n}")
    _require(k < 2 * n, "k = 2n leaves the vacuum, whose visibility is undefined")
    m = np.arange(k + 1)
    log_s0 = logsumexp(2 * log_binom(k, m) + log_binom(2 * n - k, n - m))
    log_s1 = logsumexp(log_binom(k, m - 1) + log_binom(k, m) + log_binom(2 * n - k - 1, n - m))
    return 2.0 * math.exp(log_s1 - log_s0)


def oracle_mean_beta_quadrature(n1: int, n2: int, k: int, points: int = 512) -> float:
    """Ensemble-mean visibility after ``k`` in {1, 2} detections, by quadrature.

    Integrates ``2/(2 pi)^k (N-k-1)!/N! |<psi_k|a^dag b|psi_k>|`` over all
    detection positions, with ``psi_k`` the unnormalized post-detection
    state.  The integrand is periodic, so the composite trapezoid rule on
    ``points`` nodes per axis reduces to an equal-weight sum.
    """
    N = n1 + n2
    _require(k in (1, 2), f"k must be 1 or 2, got {k}")
    _require(n1 >= 0 and n2 >= 0 and k < N <= 400, f"need k < n1 + n2 <= 400, got ({n1}, {n2})")
    _require(points >= 512, f"need at least 512 nodes per axis, got {points}")
    phis = -np.pi + 2 * np.pi * np.arange(points) / points
    scale = 2.0 * math.exp(math.lgamma(N - k) - math.lgamma(N + 1))
    psi0 = number_state(n1, n2)
    total = 0.0
    for p1 in phis:
        psi1 = apply_interference_jump(psi0, p1)
        if k == 1:
            total += abs(expect_adag_b(psi1))
            continue
        c = psi1.amplitudes
        M = N - 1
        m = np.arange(M)
        # all second positions at once: rows are phi2
        d = np.sqrt(m + 1.0)[None, :] * c[None, 1:] + np.exp(1j * phis)[:, None] * (np.sqrt(M - m) * c[:-1])[None, :]
        j = np.arange(M - 1)
        adb = np.sum(np.conj(d[:, 1:]) * d[:, :-1] * np.sqrt((j + 1.0) * (M - 1 - j))[None, :], axis=1)
        total += float(np.sum(np.abs(adb))) / points
    return scale * total / points

