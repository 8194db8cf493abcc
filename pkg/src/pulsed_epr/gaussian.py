r"""Covariance-matrix algebra for zero-mean Gaussian states.

Conventions
-----------
* Quadratures are ordered ``(X_1, P_1, X_2, P_2, ...)``.
* The commutator is :math:`[X, P] = 2i`, so the vacuum has unit variance in
  every quadrature and a physical state satisfies :math:`\Delta X \Delta P \ge 1`.
  The symplectic form :math:`\Omega` is block diagonal with blocks
  ``[[0, 1], [-1, 0]]``.
* States carry no mean vector. Every criterion in this package depends only on
  second moments, and none of the modelled interactions displaces the state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import DegenerateMeasurementError, DomainError

SYMMETRY_TOL = 1e-12
SYMPLECTIC_TOL = 1e-12
PSD_TOL = 1e-9


class Axis(enum.Enum):
    X = 0
    P = 1


@dataclass(frozen=True)
class Quadrature:
    """One quadrature of one mode."""

    mode: int
    axis: Axis

    @property
    def index(self) -> int:
        return 2 * self.mode + self.axis.value

    def unit(self, n_modes: int) -> np.ndarray:
        """Coefficient vector selecting this quadrature."""
        if not 0 <= self.mode < n_modes:
            raise DomainError(f"mode {self.mode} out of range for {n_modes} modes")
        c = np.zeros(2 * n_modes)
        c[self.index] = 1.0
        return c

    def __str__(self) -> str:
        return f"{self.axis.name}{self.mode}"


def X(mode: int) -> Quadrature:
    return Quadrature(mode, Axis.X)


def P(mode: int) -> Quadrature:
    return Quadrature(mode, Axis.P)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _scale(a: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Zero-mean Gaussian state described by its covariance matrix.

    States built from thermal inputs by linear maps also keep a factor ``L``
    with ``cov = L @ L.T``. Variances are then evaluated as squared norms of
    ``L.T @ c``, which avoids the cancellation of ``c @ cov @ c`` when large
    thermal contributions nearly cancel.

    The symmetry check is relative to ``max(1, max|cov|)`` so that strongly
    amplified thermal states are not rejected over rounding noise.
    """

    cov: np.ndarray
    factor: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2 or cov.size == 0:
            raise DomainError(f"covariance must be a non-empty 2n x 2n matrix, got shape {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * _scale(cov):
            raise DomainError("covariance matrix is not symmetric")
        if np.any(np.diag(cov) <= 0):
            raise DomainError("covariance diagonal must be positive")
        cov.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        if self.factor is not None:
            factor = np.array(self.factor, dtype=float)
            if factor.ndim != 2 or factor.shape[0] != cov.shape[0]:
                raise DomainError(f"factor of shape {factor.shape} does not match covariance")
            factor.setflags(write=False)
            object.__setattr__(self, "factor", factor)

    @classmethod
    def from_factor(cls, factor: np.ndarray) -> "GaussianState":
        factor = np.asarray(factor, dtype=float)
        return cls(_symmetrized(factor @ factor.T), factor)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def __repr__(self) -> str:
        return f"GaussianState(n_modes={self.n_modes})"


@dataclass(frozen=True, eq=False)
class LinearModeMap:
    """Real linear map acting on the quadrature vector."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise DomainError(f"map must be a 2n x 2n matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def symplectic_residual(self) -> float:
        """Largest entry of ``S Omega S^T - Omega``."""
        omega = symplectic_form(self.n_modes)
        return float(np.max(np.abs(self.matrix @ omega @ self.matrix.T - omega)))

    def is_symplectic(self, tol: float = SYMPLECTIC_TOL) -> bool:
        return self.symplectic_residual() < tol


def vacuum_state(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.eye(2 * n_modes), np.eye(2 * n_modes))


def thermal_state(n_bar: float) -> GaussianState:
    """Single-mode thermal state with mean occupation ``n_bar``."""
    if not n_bar >= 0:
        raise DomainError(f"thermal occupation must be nonnegative, got {n_bar}")
    v = 2.0 * n_bar + 1.0
    return GaussianState(v * np.eye(2), math.sqrt(v) * np.eye(2))


def tensor(states: Sequence[GaussianState]) -> GaussianState:
    """Product state; modes keep the order of ``states``."""
    if len(states) == 0:
        raise DomainError("tensor product of an empty list")
    if all(s.factor is not None for s in states):
        return GaussianState(block_diag(*[s.cov for s in states]), block_diag(*[s.factor for s in states]))
    return GaussianState(block_diag(*[s.cov for s in states]))


def _symmetrized(cov: np.ndarray) -> np.ndarray:
    return 0.5 * (cov + cov.T)


def apply_map(state: GaussianState, mode_map: LinearModeMap) -> GaussianState:
    """Propagate the covariance through ``mode_map``: ``S cov S^T``."""
    if mode_map.matrix.shape != state.cov.shape:
        raise DomainError(
            f"map of size {mode_map.matrix.shape} does not act on a {state.n_modes}-mode state"
        )
    return _image(state, mode_map.matrix)


def _image(state: GaussianState, m: np.ndarray) -> GaussianState:
    factor = None if state.factor is None else m @ state.factor
    return GaussianState(_symmetrized(m @ state.cov @ m.T), factor)


def linear_image(state: GaussianState, rows: np.ndarray) -> GaussianState:
    """State of the quadratures ``rows @ q`` for a (2k x 2n) coefficient matrix.

    Used when only part of the output of an interaction is tracked; the caller
    is responsible for the rows describing genuine canonical quadratures.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != state.cov.shape[0] or rows.shape[0] % 2:
        raise DomainError(f"rows of shape {rows.shape} incompatible with {state.n_modes}-mode state")
    return _image(state, rows)


def _coeffs(state: GaussianState, c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape != (state.cov.shape[0],):
        raise DomainError(f"coefficient vector of length {c.shape} for a {state.n_modes}-mode state")
    return c


def variance_of(state: GaussianState, coeffs) -> float:
    """Variance of the linear combination ``coeffs . q``."""
    c = _coeffs(state, coeffs)
    if state.factor is not None:
        w = c @ state.factor
        return float(w @ w)
    return float(c @ state.cov @ c)


def covariance_of(state: GaussianState, coeffs_a, coeffs_b) -> float:
    """Symmetrized covariance ``<a.q, b.q>``."""
    a = _coeffs(state, coeffs_a)
    b = _coeffs(state, coeffs_b)
    if state.factor is not None:
        return float((a @ state.factor) @ (b @ state.factor))
    return float(a @ state.cov @ b)


def _check_addresses(state: GaussianState, *quads: Quadrature) -> None:
    for q in quads:
        if not 0 <= q.mode < state.n_modes:
            raise DomainError(f"{q} does not address a {state.n_modes}-mode state")


def regression_gain(state: GaussianState, target: Quadrature, measured: Quadrature) -> float:
    """Least-squares slope of ``target`` on ``measured``: Cov/Var."""
    _check_addresses(state, target, measured)
    n = state.n_modes
    t, m = target.unit(n), measured.unit(n)
    var_m = variance_of(state, m)
    if var_m <= 0:
        raise DegenerateMeasurementError(f"{measured} has zero variance")
    return covariance_of(state, t, m) / var_m


def conditional_variance(state: GaussianState, target: Quadrature, measured: Quadrature) -> float:
    """Residual variance of ``target`` after the best linear estimate from ``measured``.

    Equal to ``min_g Var(target - g * measured)``.
    """
    if target == measured:
        raise DomainError("target and measured quadratures coincide")
    g = regression_gain(state, target, measured)
    c = target.unit(state.n_modes) - g * measured.unit(state.n_modes)
    return max(variance_of(state, c), 0.0)


def min_uncertainty_eigenvalue(state: GaussianState) -> float:
    """Smallest eigenvalue of ``cov + i Omega``."""
    herm = state.cov + 1j * symplectic_form(state.n_modes)
    return float(np.linalg.eigvalsh(herm)[0])


def check_physical(state: GaussianState) -> tuple[bool, float]:
    """Return ``(ok, min_eig)`` for the uncertainty principle ``cov + i Omega >= 0``.

    The slack is ``PSD_TOL`` scaled by ``max(1, max|cov|)``.
    """
    min_eig = min_uncertainty_eigenvalue(state)
    return min_eig >= -PSD_TOL * _scale(state.cov), min_eig
