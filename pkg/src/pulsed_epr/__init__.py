"""EPR steering and entanglement of pulsed optomechanical Gaussian states."""

from .criteria import (
    CriterionKind,
    CriterionResult,
    EPRPairing,
    PairTerm,
    PULSE_OSC_C_GIVEN_M,
    PULSE_OSC_M_GIVEN_C,
    SteeringClassification,
    TWO_OSC_M1_GIVEN_M2,
    TWO_OSC_M2_GIVEN_M1,
    Verdict,
    classify_steering,
    dgcz,
    epr_reid,
    product_entanglement,
)
from .gaussian import (
    Axis,
    GaussianState,
    LinearModeMap,
    P,
    Quadrature,
    X,
    apply_map,
    check_physical,
    conditional_variance,
    covariance_of,
    tensor,
    thermal_state,
    vacuum_state,
    variance_of,
)
from .scenarios import (
    M1,
    M2,
    OSC,
    PULSE,
    PulseOscillatorParams,
    TwoOscillatorParams,
    blue_detuned_map,
    pulse_oscillator_state,
    squeeze_param_from_physical,
    two_oscillator_state,
)

__version__ = "0.1.0"
