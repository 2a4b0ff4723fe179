"""Two-mode Fock states at fixed total atom number.

A state of ``M`` atoms shared by condensates ``a`` and ``b`` is stored as the
``M + 1`` complex amplitudes ``c[m]`` of the basis kets ``|m, M - m>``, i.e.
indexed by the occupation of mode ``a``.

Jump operators here drop the ``1/sqrt(2)`` of the beam-splitter detection
operator; every observable is a ratio so the factor cancels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray


class FockStateError(ValueError):
    """Raised when an operation would produce an invalid two-mode state."""


class VacuumError(FockStateError):
    """No atoms are left to detect."""


class ZeroNormError(FockStateError):
    """An operation annihilated the state."""


@dataclass(frozen=True, eq=False)
class TwoModeFockState:
    """Unnormalized amplitudes over ``|m, M - m>``, ``m = 0..M``.

    The amplitude array is copied on construction and made read-only, so
    instances can be shared freely between threads.
    """

    amplitudes: NDArray[np.complex128]

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if amps.ndim != 1 or amps.size == 0:
            raise FockStateError("amplitudes must be a non-empty 1-D sequence")
        nsq = float(np.vdot(amps, amps).real)
        if not np.isfinite(nsq):
            raise FockStateError("amplitudes must be finite")
        if nsq == 0.0:
            raise ZeroNormError("the all-zero vector is not a state")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def total_atoms(self) -> int:
        return self.amplitudes.size - 1

    def __len__(self) -> int:
        return self.amplitudes.size

    def __repr__(self) -> str:
        return f"TwoModeFockState(total_atoms={self.total_atoms})"


def from_amplitudes(amplitudes: ArrayLike) -> TwoModeFockState:
    return TwoModeFockState(np.asarray(amplitudes, dtype=np.complex128))


def number_state(n1: int, n2: int) -> TwoModeFockState:
    """The product number state ``|n1, n2>``."""
    if n1 < 0 or n2 < 0:
        raise FockStateError(f"occupations must be non-negative, got ({n1}, {n2})")
    amps = np.zeros(n1 + n2 + 1, dtype=np.complex128)
    amps[n1] = 1.0
    return TwoModeFockState(amps)


def norm_sq(state: TwoModeFockState) -> float:
    c = state.amplitudes
    return float(np.vdot(c, c).real)


def normalize(state: TwoModeFockState) -> TwoModeFockState:
    nsq = norm_sq(state)
    if nsq == 0.0:
        raise ZeroNormError("cannot normalize a zero state")
    return TwoModeFockState(state.amplitudes / np.sqrt(nsq))


def _lower(state: TwoModeFockState, what: str) -> tuple[NDArray, NDArray, int]:
    M = state.total_atoms
    if M == 0:
        raise VacuumError(f"cannot apply {what} to the vacuum: no atoms left")
    m = np.arange(M)
    return m, state.amplitudes, M


def apply_interference_jump(state: TwoModeFockState, phi: float) -> TwoModeFockState:
    """Detection at position ``phi``: applies ``a + exp(i phi) b``.

    Raises:
        VacuumError: if ``state`` holds no atoms.
    """
    m, c, M = _lower(state, "a detection")
    d = np.sqrt(m + 1.0) * c[1:] + np.exp(1j * phi) * np.sqrt(M - m) * c[:-1]
    return TwoModeFockState(d)


def apply_loss_jump(state: TwoModeFockState, mode: str) -> TwoModeFockState:
    """Undetected loss of one atom from condensate ``mode`` ('a' or 'b').

    Raises:
        VacuumError: if ``state`` holds no atoms.
        ZeroNormError: if the chosen mode is empty.
    """
    m, c, M = _lower(state, f"a loss from mode {mode!r}")
    if mode == "a":
        d = np.sqrt(m + 1.0) * c[1:]
    elif mode == "b":
        d = np.sqrt(M - m) * c[:-1]
    else:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    if not np.any(d):
        raise ZeroNormError(f"mode {mode!r} is empty; loss annihilates the state")
    return TwoModeFockState(d)


def expect_adag_b(state: TwoModeFockState) -> complex:
    """``<psi|a^dag b|psi>`` without dividing by the norm."""
    M = state.total_atoms
    if M == 0:
        return 0j
    c = state.amplitudes
    m = np.arange(M)
    return complex(np.sum(np.conj(c[1:]) * c[:-1] * np.sqrt((m + 1.0) * (M - m))))


def mode_occupations(state: TwoModeFockState) -> tuple[float, float]:
    """Normalized mean occupations ``(<a^dag a>, <b^dag b>)``."""
    c = state.amplitudes
    M = state.total_atoms
    p = np.abs(c) ** 2
    total = p.sum()
    na = float(np.dot(np.arange(M + 1), p) / total)
    return na, M - na


def apply_collision_phase(state: TwoModeFockState, kappa: float, dt: float) -> TwoModeFockState:
    """Evolve for ``dt`` under ``kappa * [(a^dag a)^2 + (b^dag b)^2]``."""
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    if kappa == 0 or dt == 0:
        return state
    M = state.total_atoms
    m = np.arange(M + 1, dtype=float)
    energy = m * m + (M - m) ** 2
    return TwoModeFockState(state.amplitudes * np.exp(-1j * (kappa * dt) * energy))
