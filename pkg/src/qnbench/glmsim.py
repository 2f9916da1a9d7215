"""Seeded synthetic GLM data and statistical-radius sweeps.

Data follow ``y_i = (x_i' theta_star)**p + noise``, with Gaussian features
and Gaussian noise drawn from the package's own deterministic streams, so
identical (config, n, seed) triples reproduce datasets bit-for-bit.  Two
regimes matter: high signal-to-noise (theta_star on the unit sphere), where
the loss is locally strongly convex, and low signal-to-noise
(theta_star = 0), where it is flat at the optimum and first-order methods
slow to a crawl.

The sweep machinery reruns a solver across sample sizes and trials,
records the best error along each trace against theta_star, and fits the
log-log slope of the per-size medians — the empirical statistical radius.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import rng
from .objectives import EmpiricalGlmLoss
from .solvers import (
    SolverConfig,
    initial_inverse_hessian,
    run_bfgs,
    run_gd_constant,
    run_gd_polyak,
    run_newton,
    run_scalar_bfgs,
)

REGIME_LOW_SNR = "low-snr"
REGIME_HIGH_SNR = "high-snr"

_STREAM_FEATURES = 0
_STREAM_NOISE = 1
_STREAM_INIT = 2

# Fixed starting pair for one-dimensional secant runs: ordered, positive,
# and well above any desk-scale statistical radius.
SCALAR_START = (1.0, 0.999)


def default_covariance_diagonal(d: int) -> np.ndarray:
    """Variances (0.25)**k for k = 1..d (feature std devs halve per axis)."""
    return 0.25 ** np.arange(1, d + 1)


@dataclass
class GlmModelConfig:
    """Generative model: dimensions, link power, truth, covariance, noise.

    ``cov`` may be a length-d vector of positive variances (diagonal
    covariance) or a full SPD matrix; ``None`` selects the default
    diagonal.  The low-SNR regime requires theta_star = 0 exactly, the
    high-SNR regime a unit-norm theta_star.
    """

    d: int
    p: int
    theta_star: np.ndarray
    cov: np.ndarray | None = None
    noise_std: float = 1.0
    regime: str = REGIME_LOW_SNR

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be positive")
        if not (isinstance(self.p, (int, np.integer)) and self.p >= 2):
            raise ValueError(f"link power p must be an integer >= 2, got {self.p!r}")
        self.p = int(self.p)
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        self.theta_star = np.asarray(self.theta_star, dtype=float)
        if self.theta_star.shape != (self.d,):
            raise ValueError("theta_star must have length d")
        if self.regime == REGIME_LOW_SNR:
            if np.any(self.theta_star != 0.0):
                raise ValueError("low-snr regime requires theta_star = 0")
        elif self.regime == REGIME_HIGH_SNR:
            if abs(np.linalg.norm(self.theta_star) - 1.0) > 1e-9:
                raise ValueError("high-snr regime requires unit-norm theta_star")
        else:
            raise ValueError(f"unknown regime {self.regime!r}")
        cov = default_covariance_diagonal(self.d) if self.cov is None else np.asarray(
            self.cov, dtype=float
        )
        if cov.ndim == 1:
            if cov.shape != (self.d,) or np.any(cov <= 0):
                raise ValueError("diagonal covariance needs d positive variances")
            self.cov_sqrt = np.diag(np.sqrt(cov))
        elif cov.ndim == 2 and cov.shape == (self.d, self.d):
            if np.max(np.abs(cov - cov.T)) > 1e-12 * max(1.0, np.max(np.abs(cov))):
                raise ValueError("covariance matrix must be symmetric")
            eigvals, eigvecs = np.linalg.eigh(cov)
            if np.min(eigvals) <= 0:
                raise ValueError("covariance matrix must be positive definite")
            self.cov_sqrt = (eigvecs * np.sqrt(eigvals)) @ eigvecs.T
        else:
            raise ValueError("cov must be a length-d vector or a d x d matrix")
        self.cov = cov

    @property
    def noise_var(self) -> float:
        return self.noise_std ** 2


def low_snr_config(d: int, p: int, cov=None, noise_std: float = 1.0) -> GlmModelConfig:
    return GlmModelConfig(
        d=d, p=p, theta_star=np.zeros(d), cov=cov, noise_std=noise_std,
        regime=REGIME_LOW_SNR,
    )


def high_snr_config(
    d: int, p: int, seed: int, cov=None, noise_std: float = 1.0
) -> GlmModelConfig:
    """High-SNR model with theta_star drawn uniformly from the unit sphere."""
    return GlmModelConfig(
        d=d, p=p, theta_star=rng.unit_vector(d, rng.derive_seed(seed, 17)),
        cov=cov, noise_std=noise_std, regime=REGIME_HIGH_SNR,
    )


def generate_dataset(config: GlmModelConfig, n: int, seed: int) -> EmpiricalGlmLoss:
    """Draw n samples from the model; bit-identical for identical inputs."""
    if n < 1:
        raise ValueError("need at least one sample")
    z = rng.normals(rng.derive_seed(seed, _STREAM_FEATURES), n * config.d)
    x = z.reshape(n, config.d) @ config.cov_sqrt.T
    noise = rng.normals(rng.derive_seed(seed, _STREAM_NOISE), n)
    y = (x @ config.theta_star) ** config.p + config.noise_std * noise
    return EmpiricalGlmLoss(x, y, config.p)


def split_train_validation(loss: EmpiricalGlmLoss, train_fraction: float = 0.9):
    """Contiguous train/validation split (data are i.i.d., no shuffle needed)."""
    if loss.n < 2:
        raise ValueError("need at least two samples to split")
    n_train = int(round(train_fraction * loss.n))
    n_train = min(max(n_train, 1), loss.n - 1)
    train = EmpiricalGlmLoss(loss.x[:n_train], loss.y[:n_train], loss.p)
    val = EmpiricalGlmLoss(loss.x[n_train:], loss.y[n_train:], loss.p)
    return train, val


def scalar_moment_ratio(loss: EmpiricalGlmLoss) -> float:
    """sum(y x**p) / sum(x**2p) for d = 1: the p-th power of the nonzero
    stationary point of the scalar loss (may be negative under noise)."""
    if loss.d != 1:
        raise ValueError("scalar_moment_ratio needs a one-dimensional loss")
    x = loss.x[:, 0]
    denom = float(np.sum(x ** (2 * loss.p)))
    if denom <= 0.0:
        raise ValueError("all features are zero; the loss is constant")
    return float(np.sum(loss.y * x ** loss.p)) / denom


def empirical_optimum_scalar(loss: EmpiricalGlmLoss, sign_hint: float = 1.0) -> float:
    """Real p-th root of the moment ratio: the nonzero minimizer when it exists.

    For even p a positive ratio has two real roots; the one matching
    ``sign_hint`` is returned.  A negative ratio with even p has no nonzero
    stationary point, so the origin (0.0) is returned.
    """
    ratio = scalar_moment_ratio(loss)
    p = loss.p
    if p % 2 == 1:
        return float(np.copysign(abs(ratio) ** (1.0 / p), ratio))
    if ratio < 0.0:
        return 0.0
    root = ratio ** (1.0 / p)
    return float(root if sign_hint >= 0 else -root)


@dataclass(frozen=True)
class EarlyStopChoice:
    index: int
    val_loss: float


def early_stop_by_validation(trace, validation_loss) -> EarlyStopChoice:
    """Trace index minimizing validation loss over every recorded iterate.

    Ties break toward the smallest index; non-finite evaluations are
    skipped.
    """
    if len(trace) == 0:
        raise ValueError("trace is empty")
    vals = np.full(len(trace), np.inf)
    with np.errstate(all="ignore"):
        for i, theta in enumerate(trace.iterates):
            point = np.atleast_1d(theta)
            if not np.all(np.isfinite(point)):
                continue  # diverged tail entries never win
            value = validation_loss.value(point)
            if np.isfinite(value):
                vals[i] = value
    idx = int(np.argmin(vals))
    return EarlyStopChoice(index=idx, val_loss=float(vals[idx]))


def fit_loglog_slope(xs, ys):
    """Least-squares slope of log(y) against log(x), with its standard error."""
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.asarray(ys, dtype=float))
    if x.size != y.size or x.size < 2:
        raise ValueError("need at least two points to fit a slope")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ y) / sxx
    resid = y - (y.mean() + slope * xc)
    dof = x.size - 2
    stderr = float(np.sqrt((resid @ resid) / dof / sxx)) if dof > 0 else float("nan")
    return slope, stderr


@dataclass(frozen=True)
class RadiusTrialRow:
    n: int
    seed: int
    min_error: float
    iters_to_min: int
    early_stop_error: float
    flagged: bool


@dataclass
class RadiusSweepResult:
    """Per-trial rows (sorted by n) plus the fitted log-log slope of the
    per-size median minimum errors."""

    rows: list
    fitted_slope: float
    slope_stderr: float

    def summaries(self):
        """Rows (n, median_min_error, q25, q75, median_iters_to_min)."""
        out = []
        for n in sorted({row.n for row in self.rows}):
            errs = [row.min_error for row in self.rows if row.n == n]
            iters = [row.iters_to_min for row in self.rows if row.n == n]
            q25, q50, q75 = np.percentile(errs, [25, 50, 75])
            out.append((n, float(q50), float(q25), float(q75), float(np.median(iters))))
        return out


def _without_method(config: SolverConfig) -> SolverConfig:
    return dataclasses.replace(config, method=None)


def run_glm_method(
    method: str,
    loss: EmpiricalGlmLoss,
    theta0,
    config: SolverConfig,
    theta_ref,
    noise_var: float = 1.0,
):
    """Dispatch one named method on an empirical loss.

    ``bfgs`` on a one-dimensional loss runs the secant form from the fixed
    ordered pair; the Polyak step uses the model noise variance as the
    known optimal value (the population loss at the truth).
    """
    cfg = _without_method(config)
    theta_ref = np.atleast_1d(np.asarray(theta_ref, dtype=float))
    if method == "scalar-bfgs" and loss.d != 1:
        raise ValueError("scalar-bfgs needs a one-dimensional loss")
    if method in ("bfgs", "scalar-bfgs") and loss.d == 1:
        theta0_s, prev_s = (
            (float(np.atleast_1d(theta0)[0]), None)
            if method == "scalar-bfgs"
            else (SCALAR_START[1], SCALAR_START[0])
        )
        return run_scalar_bfgs(
            loss, theta0_s, prev_s, cfg, theta_ref=float(theta_ref[0])
        )
    if method == "bfgs":
        h0 = initial_inverse_hessian(loss, theta0)
        return run_bfgs(loss, theta0, h0, cfg, theta_ref)
    if method == "gd-constant":
        return run_gd_constant(loss, theta0, cfg, theta_ref)
    if method == "gd-polyak":
        # the population loss at the truth equals the noise variance, the
        # best available stand-in for the unknown empirical optimum; small
        # samples can start below it, so clamp to keep steps non-negative
        f_star = min(noise_var, loss.value(np.atleast_1d(theta0)))
        return run_gd_polyak(loss, theta0, f_star, cfg, theta_ref)
    if method == "newton":
        return run_newton(loss, theta0, cfg, theta_ref)
    raise ValueError(f"unknown method {method!r}")


def run_radius_sweep(
    config: GlmModelConfig,
    solver: SolverConfig,
    n_grid,
    trials: int,
    seed0: int,
    init_radius: float = 1.0,
    train_fraction: float = 0.9,
) -> RadiusSweepResult:
    """Sweep sample sizes: per (n, trial), generate data, run the solver,
    record the minimum error to theta_star, and fit the log-log slope of
    the per-size medians.

    Vector runs start at theta_star + init_radius * (uniform unit vector);
    when theta_star is nonzero the direction is drawn from the hemisphere
    facing theta_star, since an even link power cannot tell +-theta_star
    apart and starts in the mirror basin converge to the sign the error
    metric scores as failure.  One-dimensional runs start at the fixed
    ordered pair.  Trials are independent given their derived seeds; rows
    come out sorted by n, then trial, regardless of evaluation order.
    """
    n_grid = [int(n) for n in n_grid]
    if sorted(n_grid) != n_grid:
        raise ValueError("n_grid must be sorted ascending")
    if trials < 1:
        raise ValueError("need at least one trial")
    method = solver.method or "bfgs"
    rows = []
    for i_n, n in enumerate(n_grid):
        for trial in range(trials):
            data_seed = rng.derive_seed(seed0, i_n, trial)
            full = generate_dataset(config, n, data_seed)
            train, val = split_train_validation(full, train_fraction)
            direction = rng.unit_vector(
                config.d, rng.derive_seed(data_seed, _STREAM_INIT)
            )
            if float(direction @ config.theta_star) < 0:
                direction = -direction
            theta0 = config.theta_star + init_radius * direction
            trace = run_glm_method(
                method, train, theta0, solver, config.theta_star, config.noise_var
            )
            choice = early_stop_by_validation(trace, val)
            rows.append(
                RadiusTrialRow(
                    n=n,
                    seed=data_seed,
                    min_error=trace.min_error,
                    iters_to_min=trace.iters_to_min,
                    early_stop_error=float(trace.errors[choice.index]),
                    flagged=trace.stop_reason in ("diverged", "secant-breakdown"),
                )
            )
    medians = [
        float(np.median([row.min_error for row in rows if row.n == n])) for n in n_grid
    ]
    slope, stderr = fit_loglog_slope(n_grid, medians)
    return RadiusSweepResult(rows=rows, fitted_slope=slope, slope_stderr=stderr)
