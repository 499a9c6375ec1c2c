r"""Weighted-LASSO baseline decoder.

Solves the unconstrained weighted l1 program

    min_z  F(z) = ||A z - y||_2^2 + alpha * sum_j w_j |z_j|

by accelerated proximal gradient descent.  The proximal map of the penalty
is coordinate-wise soft thresholding with threshold step * alpha * w_j, the
step size comes from a power-method estimate of the largest squared singular
value of A (with backtracking as a safety net), and momentum is restarted
whenever the objective would increase, so recorded objective values are
non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import LinearSystem


@dataclass
class LassoConfig:
    alpha: float
    max_iterations: int = 2000
    rel_tolerance: float = 1e-8
    step_size: float | None = None

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.rel_tolerance <= 0:
            raise ValueError("rel_tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class LassoResult:
    coefficients: np.ndarray = field(repr=False)
    converged: bool
    n_iterations: int
    objective: float
    # accepted objective value after each iteration (index 0 = start)
    objective_history: np.ndarray = field(repr=False, default=None)


def weighted_l1_norm(z: np.ndarray, w: np.ndarray) -> float:
    """sum_j |z_j| w_j."""
    return float(np.sum(np.abs(np.asarray(z)) * np.asarray(w)))


def soft_threshold(v: np.ndarray, threshold) -> np.ndarray:
    """Coordinate-wise shrinkage toward zero by `threshold` (scalar or vector)."""
    v = np.asarray(v)
    return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)


def lasso_objective(z: np.ndarray, system: LinearSystem, w: np.ndarray, alpha: float) -> float:
    residual = system.rhs - system.matrix @ np.asarray(z, dtype=np.float64)
    return float(residual @ residual) + alpha * weighted_l1_norm(z, w)


def estimate_squared_spectral_norm(matrix: np.ndarray, n_iterations: int = 20) -> float:
    """Power-method estimate of ||A||_2^2 from a deterministic start vector."""
    n = matrix.shape[1]
    v = np.ones(n) / np.sqrt(n)
    sigma_sq = 1.0
    for _ in range(n_iterations):
        u = matrix.T @ (matrix @ v)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        sigma_sq = norm
        v = u / norm
    return float(sigma_sq)


def default_alpha_grid(system: LinearSystem, w: np.ndarray, num: int = 10) -> np.ndarray:
    """Log-spaced alpha grid bracketing the zero-solution threshold.

    The zero vector is optimal once alpha >= 2 max_j |(A^T y)_j| / w_j; the
    grid spans [1e-8, 1e-1] times that maximum correlation-to-weight ratio.
    """
    ratio = float(np.max(np.abs(system.matrix.T @ system.rhs) / np.asarray(w)))
    return np.geomspace(1e-8 * ratio, 1e-1 * ratio, num)


def lasso_solve(system: LinearSystem, w: np.ndarray, config: LassoConfig) -> LassoResult:
    """Accelerated proximal gradient for the weighted LASSO.

    Requires a column-normalized system (matching the greedy pipeline the
    baseline is compared against).  Returns the last iterate together with a
    convergence flag; the flag is False when the iteration budget ran out
    before the relative iterate change dropped below rel_tolerance.
    """
    if not system.normalized:
        raise ValueError(
            "lasso_solve requires unit-norm columns; apply normalize_columns first"
        )
    matrix, y = system.matrix, system.rhs
    w = np.asarray(w, dtype=np.float64)
    alpha = config.alpha

    if config.step_size is not None:
        step = config.step_size
    else:
        sigma_sq = estimate_squared_spectral_norm(matrix)
        # Lipschitz constant of the gradient is 2 sigma^2; pad the estimate
        # since the power method approaches it from below.
        step = 1.0 / (2.0 * sigma_sq * 1.05) if sigma_sq > 0 else 1.0

    z = np.zeros(matrix.shape[1])
    momentum_point = z
    t_momentum = 1.0
    objective = lasso_objective(z, system, w, alpha)
    history = [objective]
    converged = False
    iterations_run = 0

    for iteration in range(1, config.max_iterations + 1):
        iterations_run = iteration
        gradient = 2.0 * (matrix.T @ (matrix @ momentum_point - y))
        z_new = soft_threshold(momentum_point - step * gradient, step * alpha * w)
        objective_new = lasso_objective(z_new, system, w, alpha)

        if objective_new > objective:
            # Momentum overshot: restart from the last accepted iterate with
            # a plain proximal step, halving the step until it descends.
            t_momentum = 1.0
            while True:
                gradient = 2.0 * (matrix.T @ (matrix @ z - y))
                z_new = soft_threshold(z - step * gradient, step * alpha * w)
                objective_new = lasso_objective(z_new, system, w, alpha)
                if objective_new <= objective or step < 1e-18:
                    break
                step *= 0.5

        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_momentum**2))
        momentum_point = z_new + ((t_momentum - 1.0) / t_next) * (z_new - z)
        t_momentum = t_next

        change = float(np.linalg.norm(z_new - z))
        z, objective = z_new, objective_new
        history.append(objective)
        if change <= config.rel_tolerance * max(float(np.linalg.norm(z)), 1.0):
            converged = True
            break

    return LassoResult(
        coefficients=z,
        converged=converged,
        n_iterations=iterations_run,
        objective=objective,
        objective_history=np.array(history),
    )
