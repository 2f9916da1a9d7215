"""Iterative solvers with full per-iteration traces.

Five methods at desk scale: gradient descent with a constant step, gradient
descent with the Polyak step (f(theta) - f_star) / ||grad||**2, Newton with
unit step, matrix BFGS with unit step, and the one-dimensional secant form
of BFGS for scalar empirical losses.  Newton and BFGS deliberately take no
line search: the point of the rate theory they are checked against is unit
steps throughout.

Each run owns its mutable state; traces are built once and treated as
immutable afterwards.  Runs on a shared objective may proceed concurrently.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.linalg import cho_factor, cho_solve

STOP_GRAD_TOL = "grad-tol"
STOP_MAX_ITERS = "max-iters"
STOP_DIVERGED = "diverged"
STOP_SECANT_BREAKDOWN = "secant-breakdown"

# Relative floor on the BFGS curvature s'u; the rate theory guarantees
# positive curvature on its trajectory but finite precision near the
# optimum does not, so breakdown is a recorded stop, never a crash.
CURVATURE_FLOOR = 1e-14

# Absolute floor on the scalar secant denominator (gradient difference).
SCALAR_SECANT_FLOOR = 1e-14

# Step used to synthesize the second starting point of the scalar method
# when only one is supplied.
SCALAR_BOOTSTRAP_STEP = 1e-3

NEWTON_RIDGE = 1e-12


METHODS = ("gd-constant", "gd-polyak", "newton", "bfgs", "scalar-bfgs")


@dataclass(frozen=True)
class SolverConfig:
    """Run limits shared by all methods.

    ``step_size`` is read by gd-constant only; Newton and both BFGS forms
    always take unit steps.  ``method``, when set, must match the runner it
    is passed to.
    """

    method: str | None = None
    step_size: float = 0.1
    max_iters: int = 10_000
    grad_tol: float = 0.0
    divergence_cap: float = 1e8

    def __post_init__(self):
        if self.method is not None and self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.grad_tol < 0:
            raise ValueError("grad_tol must be non-negative")
        if self.divergence_cap <= 0:
            raise ValueError("divergence_cap must be positive")


@dataclass
class SolverTrace:
    """Per-iteration record of a run.

    ``iterates`` has shape (K+1, d) for vector runs and (K+1,) for scalar
    runs; ``errors``, ``grad_norms`` and ``losses`` all have length K+1.
    ``step_info`` carries method-specific per-step metadata (Polyak step
    sizes, BFGS secant residuals and symmetry defects).
    """

    iterates: np.ndarray
    errors: np.ndarray
    grad_norms: np.ndarray
    losses: np.ndarray
    stop_reason: str
    step_info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.errors)

    def error_ratios(self) -> np.ndarray:
        """errors[k+1] / errors[k]; nan where the denominator is zero."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(
                self.errors[:-1] > 0, self.errors[1:] / self.errors[:-1], np.nan
            )

    @property
    def min_error(self) -> float:
        """Smallest finite error along the trace (diverged tails excluded)."""
        masked = np.where(np.isfinite(self.errors), self.errors, np.inf)
        return float(np.min(masked))

    @property
    def iters_to_min(self) -> int:
        masked = np.where(np.isfinite(self.errors), self.errors, np.inf)
        return int(np.argmin(masked))


class _TraceBuilder:
    def __init__(self, theta_ref, config):
        self.theta_ref = np.asarray(theta_ref, dtype=float)
        self.config = config
        self.iterates = []
        self.errors = []
        self.grad_norms = []
        self.losses = []
        self.step_info = {}

    def record(self, theta, loss, grad):
        self.iterates.append(np.array(theta, dtype=float, copy=True))
        self.errors.append(float(np.linalg.norm(theta - self.theta_ref)))
        self.grad_norms.append(float(np.linalg.norm(grad)))
        self.losses.append(float(loss))

    def note(self, key, value):
        self.step_info.setdefault(key, []).append(value)

    def stop_reason_at_last(self):
        """Termination reason implied by the most recent record, or None."""
        if not (
            np.isfinite(self.losses[-1])
            and np.isfinite(self.grad_norms[-1])
            and np.isfinite(self.errors[-1])
        ):
            return STOP_DIVERGED
        if self.grad_norms[-1] <= self.config.grad_tol:
            return STOP_GRAD_TOL
        if self.errors[-1] > self.config.divergence_cap:
            return STOP_DIVERGED
        return None

    def build(self, stop_reason):
        if stop_reason == STOP_MAX_ITERS and self.stop_reason_at_last() == STOP_DIVERGED:
            stop_reason = STOP_DIVERGED
        return SolverTrace(
            iterates=np.asarray(self.iterates),
            errors=np.asarray(self.errors),
            grad_norms=np.asarray(self.grad_norms),
            losses=np.asarray(self.losses),
            stop_reason=stop_reason,
            step_info={k: np.asarray(v) for k, v in self.step_info.items()},
        )


def _check_method(config, expected):
    if config.method is not None and config.method != expected:
        raise ValueError(f"config.method is {config.method!r}, expected {expected!r}")


def run_gd_constant(objective, theta0, config=None, theta_ref=None) -> SolverTrace:
    """Gradient descent theta <- theta - step_size * grad(theta)."""
    config = config or SolverConfig()
    _check_method(config, "gd-constant")
    if config.step_size <= 0:
        raise ValueError("gd-constant needs a positive step_size")
    if theta_ref is None:
        theta_ref = getattr(objective, "theta_opt")
    theta = np.asarray(theta0, dtype=float).copy()
    trace = _TraceBuilder(theta_ref, config)
    loss, grad = objective.value_and_gradient(theta)
    trace.record(theta, loss, grad)
    stop = None
    with np.errstate(all="ignore"):
        for _ in range(config.max_iters):
            stop = trace.stop_reason_at_last()
            if stop is not None:
                break
            theta = theta - config.step_size * grad
            loss, grad = objective.value_and_gradient(theta)
            trace.record(theta, loss, grad)
    return trace.build(stop or STOP_MAX_ITERS)


def run_gd_polyak(objective, theta0, f_star, config=None, theta_ref=None) -> SolverTrace:
    """Gradient descent with the Polyak step (f - f_star) / ||grad||**2.

    ``f_star`` must be the known optimal value (zero for the realizable
    pow-norm objective).  Reaching f <= f_star stops the run as converged;
    a zero gradient above f_star is recorded as a secant breakdown (it
    cannot occur on the convex pow-norm family, but is guarded anyway).
    """
    config = config or SolverConfig()
    _check_method(config, "gd-polyak")
    if theta_ref is None:
        theta_ref = getattr(objective, "theta_opt")
    theta = np.asarray(theta0, dtype=float).copy()
    trace = _TraceBuilder(theta_ref, config)
    loss, grad = objective.value_and_gradient(theta)
    if f_star > loss:
        raise ValueError("f_star must not exceed the starting value")
    trace.record(theta, loss, grad)
    stop = None
    with np.errstate(all="ignore"):
        for _ in range(config.max_iters):
            grad_norm = trace.grad_norms[-1]
            if not (np.isfinite(loss) and np.isfinite(grad_norm)):
                stop = STOP_DIVERGED
            elif loss - f_star <= 0.0:
                stop = STOP_GRAD_TOL
            elif grad_norm == 0.0:
                # stationary but above the target value: cannot step
                stop = STOP_SECANT_BREAKDOWN
            elif grad_norm <= config.grad_tol:
                stop = STOP_GRAD_TOL
            elif trace.errors[-1] > config.divergence_cap:
                stop = STOP_DIVERGED
            if stop is not None:
                break
            step = (loss - f_star) / float(grad @ grad)
            trace.note("step_size", step)
            theta = theta - step * grad
            loss, grad = objective.value_and_gradient(theta)
            trace.record(theta, loss, grad)
    return trace.build(stop or STOP_MAX_ITERS)


def _solve_symmetric(matrix, rhs, ridge):
    """Solve with an exact symmetric factorization; Cholesky when positive
    definite, LDL otherwise, a ridge retry and least squares as last resorts."""
    try:
        return cho_solve(cho_factor(matrix), rhs)
    except (np.linalg.LinAlgError, ValueError):
        pass
    try:
        return scipy.linalg.solve(matrix, rhs, assume_a="sym")
    except (np.linalg.LinAlgError, ValueError):
        pass
    try:
        return scipy.linalg.solve(
            matrix + ridge * np.eye(matrix.shape[0]), rhs, assume_a="sym"
        )
    except (np.linalg.LinAlgError, ValueError):
        return np.linalg.lstsq(matrix, rhs, rcond=None)[0]


def _newton_direction(objective, theta, grad):
    if hasattr(objective, "hessian_inverse"):
        return objective.hessian_inverse(theta) @ grad
    return _solve_symmetric(objective.hessian(theta), grad, NEWTON_RIDGE)


def run_newton(objective, theta0, config=None, theta_ref=None) -> SolverTrace:
    """Newton's method with unit step.

    Uses the closed-form Hessian inverse when the objective provides one
    (the pow-norm family), otherwise a dense symmetric factorization of the
    exact Hessian with a small ridge retry on failure.
    """
    config = config or SolverConfig()
    _check_method(config, "newton")
    if theta_ref is None:
        theta_ref = getattr(objective, "theta_opt")
    theta = np.asarray(theta0, dtype=float).copy()
    trace = _TraceBuilder(theta_ref, config)
    loss, grad = objective.value_and_gradient(theta)
    trace.record(theta, loss, grad)
    stop = None
    with np.errstate(all="ignore"):
        for _ in range(config.max_iters):
            stop = trace.stop_reason_at_last()
            if stop is not None:
                break
            theta = theta - _newton_direction(objective, theta, grad)
            loss, grad = objective.value_and_gradient(theta)
            trace.record(theta, loss, grad)
    return trace.build(stop or STOP_MAX_ITERS)


@dataclass
class BfgsState:
    """Mutable state of a matrix-BFGS run: inverse-Hessian approximation,
    current iterate, and current gradient."""

    h_matrix: np.ndarray
    theta: np.ndarray
    grad: np.ndarray


def bfgs_update(h, s, u) -> np.ndarray:
    """Double-projection rank-two update of the inverse-Hessian approximation.

    Returns ``(I - s u'/(s'u)) H (I - u s'/(s'u)) + s s'/(s'u)``, expanded
    so the result is symmetric to the last bit and satisfies the secant
    condition ``H_new u = s`` exactly in real arithmetic.
    """
    curvature = float(s @ u)
    if curvature == 0.0:
        raise ZeroDivisionError("curvature s'u is zero")
    rho = 1.0 / curvature
    w = h @ u
    coeff = rho + rho * rho * float(u @ w)
    return h - rho * (np.outer(s, w) + np.outer(w, s)) + coeff * np.outer(s, s)


def initial_inverse_hessian(objective, theta, ridge: float = NEWTON_RIDGE) -> np.ndarray:
    """Exact inverse Hessian at ``theta`` (closed form when available).

    Empirical Hessians can be indefinite under noise; the symmetric solve
    handles that, and the result is symmetrized so it is a valid BFGS seed.
    """
    if hasattr(objective, "hessian_inverse"):
        return objective.hessian_inverse(theta)
    hess = objective.hessian(theta)
    inv = _solve_symmetric(hess, np.eye(hess.shape[0]), ridge)
    return 0.5 * (inv + inv.T)


def run_bfgs(objective, theta0, h0=None, config=None, theta_ref=None) -> SolverTrace:
    """Matrix BFGS with unit step.

    ``h0`` defaults to the exact inverse Hessian at ``theta0``, the choice
    under which the contraction-factor theory is exact.  Curvature at or
    below ``CURVATURE_FLOOR * ||s|| ||u||`` stops the run with a recorded
    secant breakdown.
    """
    config = config or SolverConfig()
    _check_method(config, "bfgs")
    if theta_ref is None:
        theta_ref = getattr(objective, "theta_opt")
    theta = np.asarray(theta0, dtype=float).copy()
    if h0 is None:
        h0 = initial_inverse_hessian(objective, theta)
    else:
        h0 = np.asarray(h0, dtype=float)
        scale = max(1.0, float(np.max(np.abs(h0))))
        if float(np.max(np.abs(h0 - h0.T))) > 1e-10 * scale:
            raise ValueError("h0 must be symmetric")
    state = BfgsState(h_matrix=h0.copy(), theta=theta, grad=None)
    trace = _TraceBuilder(theta_ref, config)
    loss, state.grad = objective.value_and_gradient(state.theta)
    trace.record(state.theta, loss, state.grad)
    stop = None
    with np.errstate(all="ignore"):
        for _ in range(config.max_iters):
            stop = trace.stop_reason_at_last()
            if stop is not None:
                break
            theta_next = state.theta - state.h_matrix @ state.grad
            loss, grad_next = objective.value_and_gradient(theta_next)
            trace.record(theta_next, loss, grad_next)
            s = theta_next - state.theta
            u = grad_next - state.grad
            curvature = float(s @ u)
            if not np.isfinite(curvature) or curvature <= CURVATURE_FLOOR * float(
                np.linalg.norm(s) * np.linalg.norm(u)
            ):
                stop = STOP_SECANT_BREAKDOWN
                break
            state.h_matrix = bfgs_update(state.h_matrix, s, u)
            trace.note(
                "secant_residual",
                float(np.linalg.norm(state.h_matrix @ u - s) / np.linalg.norm(s)),
            )
            trace.note(
                "h_asymmetry", float(np.max(np.abs(state.h_matrix - state.h_matrix.T)))
            )
            state.theta, state.grad = theta_next, grad_next
    return trace.build(stop or STOP_MAX_ITERS)


def run_scalar_bfgs(
    loss, theta0: float, theta_prev: float | None = None, config=None, theta_ref: float = 0.0
) -> SolverTrace:
    """Secant form of BFGS for one-dimensional empirical losses.

    theta <- theta - (theta - prev) / (grad(theta) - grad(prev)) * grad(theta)

    with unit step.  The update needs two points: when ``theta_prev`` is
    omitted, the run starts from the pair (theta0, theta0 - 1e-3 * grad),
    a tiny gradient step that produces a valid ordered secant pair.  Both
    starting points are recorded at the head of the trace.
    """
    config = config or SolverConfig()
    _check_method(config, "scalar-bfgs")
    if getattr(loss, "d", 1) != 1:
        raise ValueError("run_scalar_bfgs needs a one-dimensional loss")

    def eval_at(t):
        value, grad = loss.value_and_gradient(np.array([t]))
        return value, float(grad[0])

    trace = _TraceBuilder(np.asarray(float(theta_ref)), config)
    if theta_prev is None:
        prev = float(theta0)
        f_prev, g_prev = eval_at(prev)
        trace.record(prev, f_prev, g_prev)
        if abs(g_prev) <= config.grad_tol:
            return trace.build(STOP_GRAD_TOL)
        cur = prev - SCALAR_BOOTSTRAP_STEP * g_prev
    else:
        prev, cur = float(theta_prev), float(theta0)
        if cur == prev:
            raise ValueError("the two starting points must differ")
        f_prev, g_prev = eval_at(prev)
        trace.record(prev, f_prev, g_prev)
    f_cur, g_cur = eval_at(cur)
    trace.record(cur, f_cur, g_cur)
    if theta_prev is not None and g_cur == g_prev:
        raise ValueError("gradients at the two starting points must differ")
    stop = None
    with np.errstate(all="ignore"):
        for _ in range(config.max_iters):
            stop = trace.stop_reason_at_last()
            if stop is not None:
                break
            denom = g_cur - g_prev
            if abs(denom) < SCALAR_SECANT_FLOOR:
                stop = STOP_SECANT_BREAKDOWN
                break
            nxt = cur - (cur - prev) / denom * g_cur
            f_nxt, g_nxt = eval_at(nxt)
            trace.record(nxt, f_nxt, g_nxt)
            prev, g_prev, cur, g_cur = cur, g_cur, nxt, g_nxt
    return trace.build(stop or STOP_MAX_ITERS)


def gd_step_grid_search(objective, theta0, steps, config=None, theta_ref=None):
    """Run gd-constant once per candidate step and pick the best.

    "Best" is the smallest final error, ties broken by the smaller minimum
    error along the trace.  Returns (best_step, {step: trace}) so callers
    can apply their own criterion to the full traces.
    """
    steps = list(steps)
    if not steps:
        raise ValueError("need at least one candidate step")
    config = config or SolverConfig()
    traces = {}
    for step in steps:
        run_config = SolverConfig(
            method=None,
            step_size=step,
            max_iters=config.max_iters,
            grad_tol=config.grad_tol,
            divergence_cap=config.divergence_cap,
        )
        traces[step] = run_gd_constant(objective, theta0, run_config, theta_ref)

    def quality(step):
        final = traces[step].errors[-1]
        return (final if np.isfinite(final) else np.inf, traces[step].min_error)

    best = min(traces, key=quality)
    return best, traces
