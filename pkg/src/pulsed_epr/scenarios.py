"""Gaussian states produced by the pulsed optomechanical interactions.

Pulse-oscillator states have modes ``(pulse, oscillator)``; two-oscillator
states have modes ``(m1, m2)``. The mode indices are exported as constants so
that criteria can be addressed by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gaussian import (
    GaussianState,
    LinearModeMap,
    apply_map,
    linear_image,
    tensor,
    thermal_state,
    vacuum_state,
)

PULSE, OSC = 0, 1
M1, M2 = 0, 1


def _nonneg(name: str, value: float) -> float:
    value = float(value)
    if not value >= 0:
        raise DomainError(f"{name} must be nonnegative, got {value}")
    return value


@dataclass(frozen=True)
class PulseOscillatorParams:
    r: float
    n0: float

    def __post_init__(self):
        object.__setattr__(self, "r", _nonneg("r", self.r))
        object.__setattr__(self, "n0", _nonneg("n0", self.n0))


@dataclass(frozen=True)
class TwoOscillatorParams:
    """Squeeze parameters of both cavities and occupations of both oscillators."""

    r: float
    r_prime: float
    n_m1: float
    n_m2: float

    def __post_init__(self):
        for name in ("r", "r_prime", "n_m1", "n_m2"):
            object.__setattr__(self, name, _nonneg(name, getattr(self, name)))

    @classmethod
    def symmetric(cls, r: float, n_m1: float, n_m2: float) -> "TwoOscillatorParams":
        return cls(r=r, r_prime=r, n_m1=n_m1, n_m2=n_m2)


def _blue_detuned_matrix(r: float) -> np.ndarray:
    a = math.exp(r)
    # sqrt(e^{2r} - 1) without cancellation at small r
    b = math.sqrt(math.expm1(2.0 * r))
    # rows: Xc, Pc, Xm, Pm as functions of (Xc, Pc, Xm, Pm)
    return np.array(
        [
            [-a, 0.0, 0.0, -b],
            [0.0, -a, -b, 0.0],
            [0.0, b, a, 0.0],
            [b, 0.0, 0.0, a],
        ]
    )


def blue_detuned_map(r: float) -> LinearModeMap:
    """Input-output map of a blue-detuned pulse on (pulse, oscillator)."""
    r = _nonneg("r", r)
    return LinearModeMap(_blue_detuned_matrix(r))


def pulse_oscillator_state(params: PulseOscillatorParams) -> GaussianState:
    """Vacuum pulse and thermal oscillator after the blue-detuned interaction."""
    initial = tensor([vacuum_state(), thermal_state(params.n0)])
    return apply_map(initial, blue_detuned_map(params.r))


def _red_detuned_rows(r_prime: float) -> np.ndarray:
    """Rows giving (X_m2^out, P_m2^out) from (X_c, P_c, X_m2, P_m2) at the second cavity."""
    a = math.exp(-r_prime)
    b = math.sqrt(-math.expm1(-2.0 * r_prime))
    return np.array(
        [
            [0.0, b, a, 0.0],
            [-b, 0.0, 0.0, a],
        ]
    )


def swap_rows(params: TwoOscillatorParams) -> np.ndarray:
    """Output oscillator quadratures as linear combinations of the six inputs.

    Rows are ``(X_m1, P_m1, X_m2, P_m2)`` at the output; columns are the inputs
    ``(X_c, P_c, X_m1, P_m1, X_m2, P_m2)``. The pulse leaving the second cavity
    is not tracked.
    """
    first = np.zeros((6, 6))
    first[:4, :4] = _blue_detuned_matrix(params.r)
    first[4:, 4:] = np.eye(2)
    # after the first cavity: (Xc, Pc, Xm1, Pm1, Xm2, Pm2) in terms of inputs
    second = _red_detuned_rows(params.r_prime)
    pick = np.zeros((4, 6))
    pick[0, 0] = pick[1, 1] = 1.0  # pulse out of cavity 1
    pick[2, 4] = pick[3, 5] = 1.0  # oscillator m2, untouched so far
    m2_out = second @ pick @ first
    m1_out = first[2:4]
    return np.vstack([m1_out, m2_out])


def two_oscillator_state(params: TwoOscillatorParams) -> GaussianState:
    """Joint state of the two oscillators after the entanglement swap."""
    initial = tensor([vacuum_state(), thermal_state(params.n_m1), thermal_state(params.n_m2)])
    return linear_image(initial, swap_rows(params))


def squeeze_param_from_physical(g_R: float, tau: float, kappa: float) -> float:
    """Squeeze parameter ``g_R**2 * tau / kappa``."""
    for name, v in (("g_R", g_R), ("tau", tau), ("kappa", kappa)):
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")
    return g_R**2 * tau / kappa
