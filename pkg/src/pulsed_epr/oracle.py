"""Independent verification paths: Monte-Carlo sampling and brute-force gain search.

Sampling
--------
Draws are generated in fixed blocks of ``BLOCK_SIZE`` rows. Block ``k`` uses a
PCG64 generator seeded with ``SeedSequence(seed, spawn_key=(k,))``, so the
draws depend only on ``(seed, n_samples)`` and not on how blocks are spread
over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import DegenerateMeasurementError, DomainError, FactorizationError
from .gaussian import GaussianState, Quadrature, check_physical

BLOCK_SIZE = 1 << 16
FACTOR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SampleBatch:
    n_samples: int
    seed: int
    draws: np.ndarray

    def column(self, q: Quadrature) -> np.ndarray:
        return self.draws[:, q.index]


def symmetric_factor(cov: np.ndarray) -> np.ndarray:
    """Symmetric square root ``V sqrt(L) V^T`` of a positive semidefinite matrix."""
    w, v = np.linalg.eigh(cov)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -FACTOR_TOL * scale:
        raise FactorizationError(f"covariance has negative eigenvalue {w[0]}")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def _block(seed: int, k: int, rows: int, dim: int, factor: np.ndarray) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))
    return rng.standard_normal((rows, dim)) @ factor


def sample_gaussian(state: GaussianState, n_samples: int, seed: int, workers: int = 1) -> SampleBatch:
    """Draw ``n_samples`` zero-mean quadrature vectors with the state's covariance."""
    if n_samples < 2:
        raise DomainError("need at least two samples")
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")
    ok, min_eig = check_physical(state)
    if not ok:
        raise DomainError(f"state is unphysical (min eigenvalue {min_eig})")
    factor = symmetric_factor(state.cov)
    dim = state.cov.shape[0]
    n_blocks = -(-n_samples // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, n_samples - k * BLOCK_SIZE) for k in range(n_blocks)]
    job = lambda k: _block(seed, k, sizes[k], dim, factor)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            blocks = list(pool.map(job, range(n_blocks)))
    else:
        blocks = [job(k) for k in range(n_blocks)]
    return SampleBatch(n_samples, seed, np.vstack(blocks))


def empirical_covariance(batch: SampleBatch) -> np.ndarray:
    return np.cov(batch.draws, rowvar=False)


def empirical_conditional_variance(batch: SampleBatch, target: Quadrature, measured: Quadrature) -> float:
    """Residual variance of the least-squares fit of ``target`` on ``measured``."""
    y = batch.column(target)
    x = batch.column(measured)
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    if not np.var(x) > 0:
        raise DegenerateMeasurementError(f"{measured} has zero sample variance")
    resid = y - design @ coef
    return float(resid @ resid / (len(y) - 2))


# Standard errors of Gaussian sample moments.


def se_variance(var: float, n: int) -> float:
    return var * math.sqrt(2.0 / (n - 1))


def se_covariance(var_a: float, var_b: float, cov_ab: float, n: int) -> float:
    return math.sqrt((var_a * var_b + cov_ab**2) / (n - 1))


def se_conditional_variance(cond_var: float, n: int) -> float:
    return cond_var * math.sqrt(2.0 / (n - 2))


# Brute-force gain search.

Template = Callable[[GaussianState, np.ndarray], np.ndarray]


def _unit(state: GaussianState, q: Quadrature) -> np.ndarray:
    return q.unit(state.n_modes)


def combination_template(target: Quadrature, partner: Quadrature, sign: int = 1) -> Template:
    """``g -> Var(target + sign * g * partner)``, vectorized over ``g``."""

    def evaluate(state: GaussianState, g: np.ndarray) -> np.ndarray:
        t, p = _unit(state, target), _unit(state, partner)
        c = t[None, :] + sign * np.asarray(g, dtype=float)[:, None] * p[None, :]
        return np.einsum("ij,jk,ik->i", c, state.cov, c)

    return evaluate


def product_template(x_combo: Template, p_combo: Template) -> Template:
    """``g -> Var_x(g) Var_p(g) / (g^2 + 1)^2`` from two combination templates."""

    def evaluate(state: GaussianState, g: np.ndarray) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        return x_combo(state, g) * p_combo(state, g) / (g * g + 1.0) ** 2

    return evaluate


def grid_optimize_gain(
    state: GaussianState,
    template: Template,
    g_range: tuple[float, float] = (-10.0, 10.0),
    steps: int = 2001,
    xtol: float = 1e-10,
) -> tuple[float, float]:
    """Dense scan of ``template`` over ``g_range`` then golden-section refinement.

    Returns ``(g_star, value)``.
    """
    if steps < 3:
        raise DomainError("need at least three grid points")
    grid = np.linspace(g_range[0], g_range[1], steps)
    values = template(state, grid)
    k = int(np.argmin(values))
    if k == 0 or k == steps - 1:
        return float(grid[k]), float(values[k])
    f = lambda g: float(template(state, np.array([g]))[0])
    res = optimize.minimize_scalar(f, bracket=(grid[k - 1], grid[k], grid[k + 1]), method="golden", tol=xtol)
    return float(res.x), float(res.fun)
