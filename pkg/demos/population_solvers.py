"""Four solvers on one flat objective ||A theta - b||^q, side by side.

Constant-step gradient Descent crawls sublinearly on this family (the
Hessian is singular at the optimum), the Polyak step restores a linear
rate, and Newton and BFGS contract at exactly (q-2)/(q-1) and the factor
recursion r_k, independent of dimension and conditioning.  The printed
BFGS ratios can be compared directly against the predicted factors.
"""

import numpy as np

from qnbench import rng
from qnbench.objectives import random_pow_norm_objective
from qnbench.rates import contraction_sequence, newton_factor
from qnbench.solvers import (
    SolverConfig,
    run_bfgs,
    run_gd_constant,
    run_gd_polyak,
    run_newton,
)


def main():
    q, d, m, seed = 4, 10, 100, 1
    objective = random_pow_norm_objective(d, m, q, seed, entry_std=1.0 / np.sqrt(m))
    theta0 = rng.normals(rng.derive_seed(seed, 2), d)
    print(f"instance: q={q}, d={d}, m={m}, condition number "
          f"{objective.condition_number:.2f}")
    print(f"starting error: {np.linalg.norm(theta0 - objective.theta_opt):.4f}\n")

    runs = {
        "gd-constant (step 1e-4)": run_gd_constant(
            objective, theta0, SolverConfig(step_size=1e-4, max_iters=1000)
        ),
        "gd-polyak": run_gd_polyak(objective, theta0, 0.0, SolverConfig(max_iters=1000)),
        "newton": run_newton(objective, theta0, SolverConfig(max_iters=1000)),
        "bfgs": run_bfgs(objective, theta0, None, SolverConfig(max_iters=1000)),
    }
    print(f"{'method':>24} {'error@10':>12} {'error@40':>12} {'error@1000':>12} {'stop':>18}")
    for name, trace in runs.items():
        def err(k):
            return f"{trace.errors[k]:.3e}" if k < len(trace) else "-"
        print(f"{name:>24} {err(10):>12} {err(40):>12} {err(1000):>12} "
              f"{trace.stop_reason:>18}")

    print(f"\nmeasured BFGS ratios against the factor recursion (q={q}):")
    factors = contraction_sequence(q, 10).factors
    ratios = runs["bfgs"].error_ratios()
    for k in range(8):
        print(f"  step {k}: measured {ratios[k]:.9f}  predicted {factors[k]:.9f}")
    print(f"\nNewton ratio, every step: measured "
          f"{runs['newton'].error_ratios()[0]:.9f}  predicted {newton_factor(q):.9f}")


if __name__ == "__main__":
    main()
