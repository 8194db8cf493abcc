"""Threshold squeeze parameters at which criteria cross their bounds.

Closed forms are provided for every threshold together with a bisection
solver that works on any criterion curve ``r -> value``. The ``*_curve``
helpers build such curves from the scenario states, so the closed forms can be
checked against the general covariance-propagation path.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable

from .criteria import (
    PULSE_OSC_C_GIVEN_M,
    PULSE_OSC_M_GIVEN_C,
    TWO_OSC_M1_GIVEN_M2,
    TWO_OSC_M2_GIVEN_M1,
    dgcz,
    epr_reid,
    product_entanglement,
)
from .errors import BracketError, DomainError
from .scenarios import (
    PulseOscillatorParams,
    TwoOscillatorParams,
    pulse_oscillator_state,
    two_oscillator_state,
)

R_BRACKET = (0.0, 20.0)
BISECTION_XTOL = 1e-12
CLOSED_FORM_AGREEMENT = 1e-6


class ThresholdMethod(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    BISECTION = "Bisection"


@dataclass(frozen=True)
class ThresholdResult:
    r_star: float
    method: ThresholdMethod
    residual: float


def _check_occupations(**occupations: float) -> None:
    for name, n in occupations.items():
        if not n >= 0:
            raise DomainError(f"{name} must be nonnegative, got {n}")


def _half_log_root(a: float, radicand: float) -> float:
    if radicand < 0:
        warnings.warn("negative radicand: no thermal barrier, steering for every r > 0")
        return 0.0
    return 0.5 * math.log(a + math.sqrt(radicand))


def r_dgcz(n0: float) -> float:
    """Unit-gain (DGCZ) entanglement threshold for the pulse-oscillator state."""
    _check_occupations(n0=n0)
    return math.log((n0 + 2.0) / (2.0 * math.sqrt(n0 + 1.0)))


def r_epr_m_given_c(n0: float) -> float:
    """Threshold for the pulse to steer the oscillator."""
    _check_occupations(n0=n0)
    return 0.5 * math.log((2.0 * n0 + 1.0) / (n0 + 1.0))


def r_epr_m2_given_m1(n_m1: float, n_m2: float) -> float:
    """Threshold for m1 to steer m2 after the swap with equal squeeze parameters."""
    _check_occupations(n_m1=n_m1, n_m2=n_m2)
    a = n_m2 + 1.0
    return _half_log_root(a, a * a - (n_m1 + n_m2 + 1.0) / (n_m1 + 1.0))


def r_epr_m1_given_m2(n_m1: float, n_m2: float) -> float:
    """Threshold for m2 to steer m1 after the swap with equal squeeze parameters."""
    _check_occupations(n_m1=n_m1, n_m2=n_m2)
    a = n_m2 + 2.0 - 1.0 / (2.0 * (1.0 + n_m1))
    return _half_log_root(a, a * a - 2.0 * n_m2 / (1.0 + n_m1) - 2.0)


# Limiting values.

R_EPR_M_GIVEN_C_LIMIT = 0.5 * math.log(2.0)
R_EPR_M1_GIVEN_M2_PLATEAU = 0.5 * math.log(2.0 + math.sqrt(2.0))


def r_dgcz_asymptote(n0: float) -> float:
    return 0.5 * math.log(n0)


def r_epr_m1_given_m2_asymptote(n_m2: float) -> float:
    return 0.5 * math.log(2.0 * n_m2)


def r_equal_noise_asymptote(n0: float) -> float:
    return 0.5 * math.log(4.0 * n0)


def numeric_threshold(
    criterion: Callable[[float], float],
    bound: float = 1.0,
    r_lo: float = R_BRACKET[0],
    r_hi: float = R_BRACKET[1],
    xtol: float = BISECTION_XTOL,
) -> ThresholdResult:
    """Bisect for the squeeze parameter where ``criterion`` drops below ``bound``.

    Requires ``criterion(r_lo) >= bound > criterion(r_hi)``.
    """
    f_lo, f_hi = criterion(r_lo), criterion(r_hi)
    if not (f_lo >= bound and f_hi < bound):
        raise BracketError(
            f"criterion does not cross {bound} on [{r_lo}, {r_hi}]: values {f_lo}, {f_hi}"
        )
    # a curve that leaves the bound immediately has its threshold at r_lo;
    # bisecting there would only resolve a square-root onset to about sqrt(xtol)
    if f_lo == bound and criterion(r_lo + xtol) < bound:
        return ThresholdResult(r_lo, ThresholdMethod.BISECTION, 0.0)
    lo, hi = r_lo, r_hi
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if criterion(mid) >= bound:
            lo = mid
        else:
            hi = mid
    r_star = 0.5 * (lo + hi)
    return ThresholdResult(r_star, ThresholdMethod.BISECTION, criterion(r_star) - bound)


def closed_form_threshold(value: float, criterion: Callable[[float], float], bound: float = 1.0) -> ThresholdResult:
    return ThresholdResult(value, ThresholdMethod.CLOSED_FORM, criterion(value) - bound)


# Criterion curves on the scenario states.


def e_m_given_c_curve(n0: float) -> Callable[[float], float]:
    return lambda r: epr_reid(pulse_oscillator_state(PulseOscillatorParams(r, n0)), PULSE_OSC_M_GIVEN_C).value


def e_c_given_m_curve(n0: float) -> Callable[[float], float]:
    return lambda r: epr_reid(pulse_oscillator_state(PulseOscillatorParams(r, n0)), PULSE_OSC_C_GIVEN_M).value


def dgcz_curve(n0: float) -> Callable[[float], float]:
    return lambda r: dgcz(pulse_oscillator_state(PulseOscillatorParams(r, n0)), PULSE_OSC_M_GIVEN_C).value


def delta_ent_curve(n0: float) -> Callable[[float], float]:
    return lambda r: product_entanglement(
        pulse_oscillator_state(PulseOscillatorParams(r, n0)), PULSE_OSC_M_GIVEN_C
    ).value


def e_m2_given_m1_curve(n_m1: float, n_m2: float) -> Callable[[float], float]:
    return lambda r: epr_reid(
        two_oscillator_state(TwoOscillatorParams.symmetric(r, n_m1, n_m2)), TWO_OSC_M2_GIVEN_M1
    ).value


def e_m1_given_m2_curve(n_m1: float, n_m2: float) -> Callable[[float], float]:
    return lambda r: epr_reid(
        two_oscillator_state(TwoOscillatorParams.symmetric(r, n_m1, n_m2)), TWO_OSC_M1_GIVEN_M2
    ).value


def validated_m1_given_m2(n_m1: float, n_m2: float) -> tuple[float, ThresholdResult]:
    """Closed-form ``E_{m1|m2}`` threshold checked against bisection.

    A disagreement beyond ``CLOSED_FORM_AGREEMENT`` is reported as a warning.
    """
    closed = r_epr_m1_given_m2(n_m1, n_m2)
    numeric = numeric_threshold(e_m1_given_m2_curve(n_m1, n_m2))
    if abs(closed - numeric.r_star) > CLOSED_FORM_AGREEMENT:
        warnings.warn(
            f"E_m1|m2 closed-form threshold {closed} differs from bisection {numeric.r_star}"
            f" at n_m1={n_m1}, n_m2={n_m2}"
        )
    return closed, numeric
