"""Multi-trial experiment harness: error curves, support sizes, runtimes.

The protocol, per sample count m and per trial: draw m fresh points from the
orthogonality measure, assemble and column-normalize the sensing system, run
one greedy solve per regularization value (keeping the full iteration trace)
and one weighted-LASSO sweep over a log-spaced alpha grid.  Relative errors
are measured coefficient-wise against a single shared reference fit obtained
by least squares on an oversampled draw; since the basis is orthonormal for
the sampling measure, the coefficient-space l2 distance equals the function-
space L2 error of the truncated expansions.

Everything is a pure function of the config (base seed included): the
reference uses the stream SeedSequence([base_seed, 0]) and trial t at sample
count m uses SeedSequence([base_seed, 1, m, t]), so earlier trials are stable
when the trial count grows.  Wall-clock timings cover the decoder calls only
(assembly excluded; normalization timed separately).
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import basis
from .assembly import (
    TargetFunction,
    build_system,
    denormalize_solution,
    normalize_columns,
)
from .index_sets import MultiIndexSet, hyperbolic_cross
from .lasso import LassoConfig, default_alpha_grid, lasso_solve
from .womp import WompConfig, womp_solve

DEFAULT_SEED = 1729

DEFAULT_LAMBDAS = (0.0, 1e-5, 10.0**-4.5, 1e-4, 10.0**-3.5, 1e-3)


@dataclass(frozen=True)
class ExperimentConfig:
    basis_kind: str = "legendre"
    dimension: int = 10
    cross_order: int = 10
    sample_counts: tuple[int, ...] = (80,)
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    iterations: int = 25
    trials: int = 25
    reference_oversampling: int = 20
    base_seed: int = DEFAULT_SEED
    include_lasso: bool = True
    lasso_grid_size: int = 10
    lasso_max_iterations: int = 1500
    lasso_rel_tolerance: float = 1e-7

    def __post_init__(self):
        object.__setattr__(self, "sample_counts", tuple(int(m) for m in self.sample_counts))
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if self.basis_kind not in basis.BASIS_KINDS:
            raise ValueError(f"basis_kind must be one of {basis.BASIS_KINDS}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.cross_order < 1:
            raise ValueError("cross_order must be >= 1")
        if not self.sample_counts or any(m < 1 for m in self.sample_counts):
            raise ValueError("sample_counts must be a non-empty list of integers >= 1")
        if not self.lambdas:
            raise ValueError("lambdas must be a non-empty list")
        if any(v < 0 for v in self.lambdas):
            raise ValueError("lambdas must be >= 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.reference_oversampling < 1:
            raise ValueError("reference_oversampling must be >= 1")
        if self.lasso_grid_size < 1:
            raise ValueError("lasso_grid_size must be >= 1")


def target_log_sum(d: int) -> TargetFunction:
    """The log-of-shifted-sum target ln(d + 1 + sum_k t_k) on (-1, 1)^d.

    The argument stays above 1 on the open cube, so the function is finite
    and analytic there.
    """
    if d < 1:
        raise ValueError("d must be >= 1")

    def evaluator(points: np.ndarray) -> np.ndarray:
        return np.log(d + 1.0 + points.sum(axis=-1))

    return TargetFunction(evaluator, description=f"ln({d + 1} + sum of {d} coordinates)")


def expansion_target(
    kind: str,
    index_set: MultiIndexSet,
    coefficients: np.ndarray,
    description: str = "",
) -> TargetFunction:
    """A target that is exactly a finite combination of basis polynomials."""
    coefficients = np.asarray(coefficients, dtype=np.float64).copy()

    def evaluator(points: np.ndarray) -> np.ndarray:
        return basis.evaluate_expansion(kind, index_set, coefficients, points)

    label = description or f"{kind} expansion, {np.count_nonzero(coefficients)} active terms"
    return TargetFunction(evaluator, description=label)


def reference_coefficients(
    target: TargetFunction,
    kind: str,
    index_set: MultiIndexSet,
    oversampling: int,
    seed,
) -> np.ndarray:
    """Oversampled least-squares fit standing in for the true coefficients."""
    if oversampling < 1:
        raise ValueError("oversampling must be >= 1")
    n_samples = oversampling * len(index_set)
    points = basis.sample_measure(kind, index_set.dimension, n_samples, seed)
    system = build_system(points, target, kind, index_set)
    solution, _, rank, _ = np.linalg.lstsq(system.matrix, system.rhs, rcond=None)
    if rank < len(index_set):
        raise ValueError(
            f"oversampled reference system is rank-deficient: rank {rank} < {len(index_set)}"
        )
    return solution


def relative_error(x_hat: np.ndarray, x_ref: np.ndarray) -> float:
    """l2 distance to the reference, relative to the reference norm."""
    x_ref = np.asarray(x_ref, dtype=np.float64)
    ref_norm = float(np.linalg.norm(x_ref))
    if ref_norm == 0.0:
        raise ValueError("reference coefficients have zero norm")
    return float(np.linalg.norm(np.asarray(x_hat) - x_ref) / ref_norm)


@dataclass
class WompCurve:
    """Aggregated K-point curve for one (m, lambda) greedy configuration."""

    m: int
    lam: float
    mean_errors: np.ndarray = field(repr=False)
    std_errors: np.ndarray = field(repr=False)
    mean_supports: np.ndarray = field(repr=False)
    mean_seconds: float = 0.0


@dataclass
class LassoSweep:
    """Aggregated alpha-grid results for one sample count."""

    m: int
    mean_alphas: np.ndarray = field(repr=False)
    mean_errors: np.ndarray = field(repr=False)
    std_errors: np.ndarray = field(repr=False)
    mean_supports: np.ndarray = field(repr=False)
    best_position: int = 0
    best_mean_error: float = float("nan")
    mean_sweep_seconds: float = 0.0


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    n_basis_functions: int
    reference_norm: float
    womp_curves: list[WompCurve]
    lasso_sweeps: list[LassoSweep]
    mean_normalize_seconds: dict[int, float]

    def womp_curve(self, m: int, lam: float) -> WompCurve:
        for curve in self.womp_curves:
            if curve.m == m and curve.lam == lam:
                return curve
        raise KeyError(f"no curve for m={m}, lambda={lam}")

    def lasso_sweep(self, m: int) -> LassoSweep:
        for sweep in self.lasso_sweeps:
            if sweep.m == m:
                return sweep
        raise KeyError(f"no lasso sweep for m={m}")

    def to_json_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "seed_scheme": (
                "reference: SeedSequence([base_seed, 0]); "
                "trial t at sample count m: SeedSequence([base_seed, 1, m, t])"
            ),
            "n_basis_functions": self.n_basis_functions,
            "reference_norm": self.reference_norm,
            "womp": [
                {
                    "m": c.m,
                    "lambda": c.lam,
                    "mean_errors": c.mean_errors.tolist(),
                    "std_errors": c.std_errors.tolist(),
                    "mean_supports": c.mean_supports.tolist(),
                    "mean_seconds": c.mean_seconds,
                }
                for c in self.womp_curves
            ],
            "lasso": [
                {
                    "m": s.m,
                    "mean_alphas": s.mean_alphas.tolist(),
                    "mean_errors": s.mean_errors.tolist(),
                    "std_errors": s.std_errors.tolist(),
                    "mean_supports": s.mean_supports.tolist(),
                    "best_position": s.best_position,
                    "best_mean_error": s.best_mean_error,
                    "mean_sweep_seconds": s.mean_sweep_seconds,
                }
                for s in self.lasso_sweeps
            ],
            "normalize_seconds": {str(m): t for m, t in self.mean_normalize_seconds.items()},
        }


def _run_trial(
    config: ExperimentConfig,
    target: TargetFunction,
    index_set: MultiIndexSet,
    w: np.ndarray,
    x_ref: np.ndarray,
    m: int,
    trial: int,
) -> dict:
    seed = np.random.SeedSequence([config.base_seed, 1, m, trial])
    points = basis.sample_measure(config.basis_kind, config.dimension, m, seed)
    raw = build_system(points, target, config.basis_kind, index_set)
    t0 = time.perf_counter()
    system = normalize_columns(raw)
    normalize_seconds = time.perf_counter() - t0

    K = config.iterations
    womp_results = {}
    for lam in config.lambdas:
        solver_config = WompConfig(lam=lam, max_iterations=K)
        t0 = time.perf_counter()
        trace = womp_solve(system, w, solver_config)
        seconds = time.perf_counter() - t0
        errors = np.empty(K)
        supports = np.empty(K)
        for k in range(1, K + 1):
            coefficients = denormalize_solution(system, trace.coefficients_at(k))
            errors[k - 1] = relative_error(coefficients, x_ref)
            supports[k - 1] = trace.support_size_at(k)
        womp_results[lam] = (errors, supports, seconds)

    lasso_results = None
    if config.include_lasso:
        t0 = time.perf_counter()
        alphas = default_alpha_grid(system, w, config.lasso_grid_size)
        errors = np.empty(len(alphas))
        supports = np.empty(len(alphas))
        for i, alpha in enumerate(alphas):
            result = lasso_solve(
                system,
                w,
                LassoConfig(
                    alpha=float(alpha),
                    max_iterations=config.lasso_max_iterations,
                    rel_tolerance=config.lasso_rel_tolerance,
                ),
            )
            coefficients = denormalize_solution(system, result.coefficients)
            errors[i] = relative_error(coefficients, x_ref)
            supports[i] = int(np.count_nonzero(np.abs(coefficients) > 1e-12))
        sweep_seconds = time.perf_counter() - t0
        lasso_results = (alphas, errors, supports, sweep_seconds)

    return {
        "normalize_seconds": normalize_seconds,
        "womp": womp_results,
        "lasso": lasso_results,
    }


def run_sweep(
    config: ExperimentConfig,
    target: TargetFunction | None = None,
    threads: int = 1,
) -> ExperimentReport:
    """Execute the full multi-trial study described by the config.

    The default target is the log-of-shifted-sum function; trials are
    independent given their derived seeds and may run on a thread pool,
    with aggregation always ordered by trial index.
    """
    if target is None:
        target = target_log_sum(config.dimension)
    index_set = hyperbolic_cross(config.dimension, config.cross_order)
    w = basis.weights(config.basis_kind, index_set)
    x_ref = reference_coefficients(
        target,
        config.basis_kind,
        index_set,
        config.reference_oversampling,
        np.random.SeedSequence([config.base_seed, 0]),
    )

    womp_curves: list[WompCurve] = []
    lasso_sweeps: list[LassoSweep] = []
    normalize_seconds: dict[int, float] = {}

    for m in config.sample_counts:
        def trial_task(trial: int) -> dict:
            return _run_trial(config, target, index_set, w, x_ref, m, trial)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                trial_results = list(pool.map(trial_task, range(config.trials)))
        else:
            trial_results = [trial_task(t) for t in range(config.trials)]

        normalize_seconds[m] = float(
            np.mean([r["normalize_seconds"] for r in trial_results])
        )
        for lam in config.lambdas:
            errors = np.stack([r["womp"][lam][0] for r in trial_results])
            supports = np.stack([r["womp"][lam][1] for r in trial_results])
            seconds = np.array([r["womp"][lam][2] for r in trial_results])
            womp_curves.append(
                WompCurve(
                    m=m,
                    lam=lam,
                    mean_errors=errors.mean(axis=0),
                    std_errors=errors.std(axis=0),
                    mean_supports=supports.mean(axis=0),
                    mean_seconds=float(seconds.mean()),
                )
            )
        if config.include_lasso:
            alphas = np.stack([r["lasso"][0] for r in trial_results])
            errors = np.stack([r["lasso"][1] for r in trial_results])
            supports = np.stack([r["lasso"][2] for r in trial_results])
            seconds = np.array([r["lasso"][3] for r in trial_results])
            mean_errors = errors.mean(axis=0)
            best = int(np.argmin(mean_errors))
            lasso_sweeps.append(
                LassoSweep(
                    m=m,
                    mean_alphas=alphas.mean(axis=0),
                    mean_errors=mean_errors,
                    std_errors=errors.std(axis=0),
                    mean_supports=supports.mean(axis=0),
                    best_position=best,
                    best_mean_error=float(mean_errors[best]),
                    mean_sweep_seconds=float(seconds.mean()),
                )
            )

    return ExperimentReport(
        config=config,
        n_basis_functions=len(index_set),
        reference_norm=float(np.linalg.norm(x_ref)),
        womp_curves=womp_curves,
        lasso_sweeps=lasso_sweeps,
        mean_normalize_seconds=normalize_seconds,
    )


def _fmt(value) -> str:
    return repr(float(value))


def write_errors_csv(report: ExperimentReport, path) -> None:
    """Per-iteration mean/std error rows; one best-alpha row per LASSO sweep."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["decoder", "lambda", "m", "k", "mean_error", "std_error"])
        for curve in report.womp_curves:
            for i in range(curve.mean_errors.shape[0]):
                writer.writerow(
                    [
                        "womp",
                        _fmt(curve.lam),
                        curve.m,
                        i + 1,
                        _fmt(curve.mean_errors[i]),
                        _fmt(curve.std_errors[i]),
                    ]
                )
        for sweep in report.lasso_sweeps:
            writer.writerow(
                [
                    "wlasso",
                    _fmt(sweep.mean_alphas[sweep.best_position]),
                    sweep.m,
                    0,
                    _fmt(sweep.best_mean_error),
                    _fmt(sweep.std_errors[sweep.best_position]),
                ]
            )


def write_support_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["decoder", "lambda", "m", "k", "mean_support"])
        for curve in report.womp_curves:
            for i in range(curve.mean_supports.shape[0]):
                writer.writerow(
                    ["womp", _fmt(curve.lam), curve.m, i + 1, _fmt(curve.mean_supports[i])]
                )
        for sweep in report.lasso_sweeps:
            writer.writerow(
                [
                    "wlasso",
                    _fmt(sweep.mean_alphas[sweep.best_position]),
                    sweep.m,
                    0,
                    _fmt(sweep.mean_supports[sweep.best_position]),
                ]
            )


def write_runtimes_csv(report: ExperimentReport, path) -> None:
    """Mean decoder wall-clock per configuration (normalization listed too)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["decoder", "lambda", "m", "mean_seconds"])
        for curve in report.womp_curves:
            writer.writerow(["womp", _fmt(curve.lam), curve.m, _fmt(curve.mean_seconds)])
        for sweep in report.lasso_sweeps:
            writer.writerow(["wlasso_sweep", "", sweep.m, _fmt(sweep.mean_sweep_seconds)])
        for m, seconds in report.mean_normalize_seconds.items():
            writer.writerow(["normalize", "", m, _fmt(seconds)])


def write_report_json(report: ExperimentReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
        fh.write("\n")


def write_outputs(report: ExperimentReport, out_dir) -> list[Path]:
    """Write errors.csv, support.csv, runtimes.csv, and report.json."""
    out_dir = Path(out_dir)
    written = []
    for name, writer in [
        ("errors.csv", write_errors_csv),
        ("support.csv", write_support_csv),
        ("runtimes.csv", write_runtimes_csv),
        ("report.json", write_report_json),
    ]:
        path = out_dir / name
        writer(report, path)
        written.append(path)
    return written
