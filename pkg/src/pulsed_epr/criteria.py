r"""EPR-steering and entanglement criteria for two-mode Gaussian states.

A criterion is evaluated on quadrature combinations ``target + sign * g * partner``
described by an :class:`EPRPairing`. Gains reported in a :class:`CriterionResult`
are the ``g`` of that form, so the usual published gains come out positive for
the stock pairings below.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateMeasurementError, DomainError, SingularityError
from .gaussian import GaussianState, P, Quadrature, X, covariance_of, variance_of
from .scenarios import M1, M2, OSC, PULSE

GAIN_MAX = 10.0
GAIN_CEILING = 1e8
GAIN_TOL = 1e-9


class CriterionKind(enum.Enum):
    REID_EPR = "ReidEPR"
    DGCZ = "DGCZ"
    PRODUCT_ENTANGLEMENT = "ProductEntanglement"


class Verdict(enum.Enum):
    NO_STEERING = "no-steering"
    ONE_WAY_A_TO_B = "one-way A->B"
    ONE_WAY_B_TO_A = "one-way B->A"
    TWO_WAY = "two-way"


@dataclass(frozen=True)
class PairTerm:
    target: Quadrature
    partner: Quadrature
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {self.sign}")
        if self.target.mode == self.partner.mode:
            raise DomainError("target and partner must belong to different modes")


@dataclass(frozen=True)
class EPRPairing:
    """The X-like and P-like combinations used to infer the steered mode."""

    x_term: PairTerm
    p_term: PairTerm

    def __post_init__(self):
        tx, tp = self.x_term, self.p_term
        if tx.target.mode != tp.target.mode or tx.partner.mode != tp.partner.mode:
            raise DomainError("both terms must share the steered and the steering mode")
        if tx.target.axis == tp.target.axis:
            raise DomainError("the two terms must cover both axes of the steered mode")

    @property
    def steered_mode(self) -> int:
        return self.x_term.target.mode

    @property
    def steering_mode(self) -> int:
        return self.x_term.partner.mode

    @property
    def terms(self) -> tuple[PairTerm, PairTerm]:
        return self.x_term, self.p_term


# Pulse-oscillator: cross-axis pairings, X_m + g P_c and P_m + g X_c.
PULSE_OSC_M_GIVEN_C = EPRPairing(PairTerm(X(OSC), P(PULSE)), PairTerm(P(OSC), X(PULSE)))
PULSE_OSC_C_GIVEN_M = EPRPairing(PairTerm(X(PULSE), P(OSC)), PairTerm(P(PULSE), X(OSC)))
# Two oscillators: same-axis pairings, X_m2 + g X_m1 and P_m2 - g P_m1.
TWO_OSC_M2_GIVEN_M1 = EPRPairing(PairTerm(X(M2), X(M1)), PairTerm(P(M2), P(M1), -1))
TWO_OSC_M1_GIVEN_M2 = EPRPairing(PairTerm(X(M1), X(M2)), PairTerm(P(M1), P(M2), -1))


@dataclass(frozen=True)
class CriterionResult:
    value: float
    bound: float
    gains: tuple[float, float]
    kind: CriterionKind

    @property
    def violated(self) -> bool:
        return self.value < self.bound


@dataclass(frozen=True)
class SteeringClassification:
    e_b_given_a: float
    e_a_given_b: float
    delta_ent: float
    verdict: Verdict

    @property
    def a_steers_b(self) -> bool:
        return self.e_b_given_a < 1.0

    @property
    def b_steers_a(self) -> bool:
        return self.e_a_given_b < 1.0


def _check_two_mode(state: GaussianState) -> None:
    if state.n_modes != 2:
        raise DomainError(f"criteria act on two-mode states, got {state.n_modes} modes")


def _moments(state: GaussianState, term: PairTerm) -> tuple[float, float, float]:
    """(Var target, sign * Cov(target, partner), Var partner)."""
    t, p = _units(state, term)
    return variance_of(state, t), term.sign * covariance_of(state, t, p), variance_of(state, p)


def _units(state: GaussianState, term: PairTerm) -> tuple[np.ndarray, np.ndarray]:
    n = state.n_modes
    return term.target.unit(n), term.partner.unit(n)


def combination_variance(state: GaussianState, term: PairTerm, gain: float) -> float:
    """``Var(target + sign * gain * partner)``."""
    t, p = _units(state, term)
    return variance_of(state, t + term.sign * gain * p)


def _combination_variance(moments: tuple[float, float, float], g: float) -> float:
    vt, cov, vp = moments
    return vt + 2.0 * g * cov + g * g * vp


def optimal_term_gain(state: GaussianState, term: PairTerm) -> float:
    """Gain minimizing ``Var(target + sign * g * partner)``."""
    _, cov, vp = _moments(state, term)
    if vp <= 0:
        raise DegenerateMeasurementError(f"{term.partner} has zero variance")
    return -cov / vp


def inferred_variance(state: GaussianState, term: PairTerm, gain: Optional[float] = None) -> float:
    """Variance of the inference error for one pairing term.

    With ``gain=None`` the regression-optimal gain is used and the result is
    the conditional variance of the target given the partner.
    """
    if gain is None:
        gain = optimal_term_gain(state, term)
    return max(combination_variance(state, term, gain), 0.0)


def epr_reid(
    state: GaussianState,
    pairing: EPRPairing,
    gains: Optional[tuple[float, float]] = None,
) -> CriterionResult:
    """EPR product of inference errors, ``Delta_inf X * Delta_inf P``.

    For Gaussian states and quadrature measurements, ``value < 1`` is
    necessary and sufficient for steering of the pairing's target mode.
    """
    _check_two_mode(state)
    if gains is None:
        gains = tuple(optimal_term_gain(state, t) for t in pairing.terms)
    vx = inferred_variance(state, pairing.x_term, gains[0])
    vp = inferred_variance(state, pairing.p_term, gains[1])
    return CriterionResult(math.sqrt(vx * vp), 1.0, (float(gains[0]), float(gains[1])), CriterionKind.REID_EPR)


def dgcz(state: GaussianState, pairing: EPRPairing) -> CriterionResult:
    """Unit-gain sum of variances; entanglement when below 4."""
    _check_two_mode(state)
    value = sum(combination_variance(state, t, 1.0) for t in pairing.terms)
    return CriterionResult(float(value), 4.0, (1.0, 1.0), CriterionKind.DGCZ)


def _product_value(mx, mp, gx, gp):
    return _combination_variance(mx, gx) * _combination_variance(mp, gp) / (np.abs(gx * gp) + 1.0) ** 2


def _combination_curve(state: GaussianState, term: PairTerm) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ``g -> Var(target + sign * g * partner)``."""
    t, p = _units(state, term)
    if state.factor is not None:
        wt, wp = t @ state.factor, term.sign * (p @ state.factor)
        return lambda g: np.sum((wt + np.multiply.outer(g, wp)) ** 2, axis=-1)
    m = _moments(state, term)
    return lambda g: _combination_variance(m, g)


def _golden_min(f: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _newton_polish(mx, mp, g: float) -> float:
    """One Newton step on d/dg log(product) for the equal-gain product form."""

    def parts(m):
        vt, cov, vp = m
        u = vt + 2.0 * g * cov + g * g * vp
        return u, 2.0 * cov + 2.0 * g * vp, 2.0 * vp

    u, du, ddu = parts(mx)
    v, dv, ddv = parts(mp)
    w = 1.0 + g * g
    grad = du / u + dv / v - 4.0 * g / w
    hess = ddu / u - (du / u) ** 2 + ddv / v - (dv / v) ** 2 - 4.0 * (1.0 - g * g) / w**2
    if hess <= 0:
        return g
    return g - grad / hess


def _optimize_equal_gain(state: GaussianState, pairing: EPRPairing, g_max: float) -> float:
    vx = _combination_curve(state, pairing.x_term)
    vp = _combination_curve(state, pairing.p_term)
    f_vec = lambda g: vx(g) * vp(g) / (g * g + 1.0) ** 2
    f = lambda g: float(f_vec(g))
    g, fg = _golden_min(f, 0.0, g_max, GAIN_TOL)
    # unimodality check against a dense grid; restart golden near the grid minimum if it loses
    grid = np.linspace(g_max / 400.0, g_max, 400)
    values = f_vec(grid)
    k = int(np.argmin(values))
    if values[k] < fg * (1.0 - 1e-12):
        lo = grid[k - 1] if k > 0 else 0.0
        hi = grid[k + 1] if k + 1 < len(grid) else g_max
        g, fg = _golden_min(f, lo, hi, GAIN_TOL)
    if g > g_max * (1.0 - 1e-6) and g_max < GAIN_CEILING:
        return _optimize_equal_gain(state, pairing, 10.0 * g_max)
    polished = _newton_polish(_moments(state, pairing.x_term), _moments(state, pairing.p_term), g)
    if 0.0 < polished <= g_max and f(polished) <= fg:
        g = polished
    return g


def product_entanglement(
    state: GaussianState,
    pairing: EPRPairing,
    gains: Optional[tuple[float, float]] = None,
    g_max: float = GAIN_MAX,
) -> CriterionResult:
    """Gain-weighted product entanglement criterion, bound 1.

    Without explicit gains the equal gain ``g_x = g_p = g`` is minimized on
    ``(0, g_max]``. If the minimum sits on the upper edge the interval is
    widened tenfold, up to ``GAIN_CEILING``; this only happens for very weak
    interactions with a hot oscillator.
    """
    _check_two_mode(state)
    if gains is None:
        g = _optimize_equal_gain(state, pairing, g_max)
        gains = (g, g)
    gx, gp = gains
    value = (
        combination_variance(state, pairing.x_term, gx)
        * combination_variance(state, pairing.p_term, gp)
        / (abs(gx * gp) + 1.0) ** 2
    )
    return CriterionResult(value, 1.0, (float(gains[0]), float(gains[1])), CriterionKind.PRODUCT_ENTANGLEMENT)


def classify_steering(
    state: GaussianState,
    pairing_ab: EPRPairing,
    pairing_ba: EPRPairing,
) -> SteeringClassification:
    """Steering direction(s) between modes A and B.

    ``pairing_ab`` infers B from measurements on A (so it yields ``E_{B|A}``),
    ``pairing_ba`` the reverse. Entanglement is evaluated on ``pairing_ab``.
    """
    if (pairing_ab.steered_mode, pairing_ab.steering_mode) != (
        pairing_ba.steering_mode,
        pairing_ba.steered_mode,
    ):
        raise DomainError("pairings must address opposite directions between the same modes")
    e_ba = epr_reid(state, pairing_ab).value
    e_ab = epr_reid(state, pairing_ba).value
    delta = product_entanglement(state, pairing_ab).value
    a_to_b, b_to_a = e_ba < 1.0, e_ab < 1.0
    if a_to_b and b_to_a:
        verdict = Verdict.TWO_WAY
    elif a_to_b:
        verdict = Verdict.ONE_WAY_A_TO_B
    elif b_to_a:
        verdict = Verdict.ONE_WAY_B_TO_A
    else:
        verdict = Verdict.NO_STEERING
    return SteeringClassification(e_ba, e_ab, delta, verdict)


# Closed-form optimal gains.


def epr_gain_pulse_osc(r: float, n0: float) -> float:
    """Optimal inference gain for steering the oscillator from the pulse."""
    num = 2.0 * math.exp(r) * math.sqrt(math.expm1(2.0 * r)) * (n0 + 1.0)
    den = 2.0 * math.exp(2.0 * r) * (n0 + 1.0) - (2.0 * n0 + 1.0)
    if den == 0:
        raise SingularityError(f"gain denominator vanishes at r={r}, n0={n0}")
    return num / den


def ent_gain_pulse_osc(r: float, n0: float) -> float:
    """Equal gain minimizing the pulse-oscillator product entanglement criterion."""
    if not r > 0:
        raise SingularityError("optimal entanglement gain is singular at r=0")
    delta = n0 / (n0 + 1.0)
    e2 = math.exp(2.0 * r)
    s = math.sqrt(math.expm1(2.0 * r))
    return (delta + math.sqrt(delta**2 + 4.0 * e2 * (e2 - 1.0))) / (2.0 * math.exp(r) * s)


def ent_gain_two_osc(r: float, n0: float) -> float:
    """Equal gain minimizing the two-oscillator product criterion for equal noise ``n0``."""
    if not r > 0:
        raise DomainError("r must be positive")
    q = (2.0 * n0 + 1.0) / (2.0 * math.exp(2.0 * r) * (n0 + 1.0))
    return math.sqrt(1.0 + q * q) - q


def epr_gain_m2_given_m1(r: float, n_m1: float) -> float:
    e2 = math.exp(2.0 * r)
    return math.expm1(2.0 * r) * (n_m1 + 1.0) / (e2 * (n_m1 + 1.0) - 0.5)


def epr_gain_m1_given_m2(r: float, n_m1: float, n_m2: float) -> float:
    v1, vc, v2 = 2.0 * n_m1 + 1.0, 1.0, 2.0 * n_m2 + 1.0
    e2, em2 = math.exp(2.0 * r), math.exp(-2.0 * r)
    num = (e2 - 1.0) * (v1 + vc)
    den = (e2 + em2 - 2.0) * v1 + (e2 - 1.0) * vc + em2 * v2
    return num / den


# Closed-form criterion values, used for cross-checks and fast sweeps.


def e_m_given_c(r: float, n0: float) -> float:
    v0 = 2.0 * n0 + 1.0
    return v0 / (2.0 * math.exp(2.0 * r) * (n0 + 1.0) - v0)


def e_c_given_m(r: float, n0: float) -> float:
    v0 = 2.0 * n0 + 1.0
    return v0 / (math.exp(2.0 * r) * v0 + math.expm1(2.0 * r))


def swap_variance_m2(g: float, r: float, n_m1: float, n_m2: float) -> float:
    """``Var(X_m2 + g X_m1)`` for equal squeeze parameters in both cavities."""
    e = math.exp(r)
    return (
        (2.0 * n_m2 + 1.0) / e**2
        + (g - 1.0) ** 2 * math.expm1(2.0 * r)
        + ((g - 1.0) * e + 1.0 / e) ** 2 * (2.0 * n_m1 + 1.0)
    )


def swap_variance_m1(g: float, r: float, n_m1: float, n_m2: float) -> float:
    """``Var(X_m1 + g X_m2)`` for equal squeeze parameters in both cavities."""
    e = math.exp(r)
    return (
        (e - g * (e - 1.0 / e)) ** 2 * (2.0 * n_m1 + 1.0)
        + (1.0 - g) ** 2 * math.expm1(2.0 * r)
        + g * g * (2.0 * n_m2 + 1.0) / e**2
    )
