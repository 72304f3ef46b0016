"""Grid and Monte-Carlo checks of every scalar inequality the library relies on.

Each check returns a flat dict with at least ``name``, ``min_slack``,
``threshold`` and ``passed``; ``run_all`` collects them in a fixed order.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .bounds import upper_inequality_gap, verify_gap_grid
from .linalg import make_rng, standard_normal
from .means import two_concavity_gaps
from .special import (EULER_GAMMA, ei_upper_bound, exp_int_neg, expected_log_noncentral,
                      noncentral_lower_bound)

SLACK = -1e-12
CLAIM_P = (-0.5, 0.0, 0.5, 1.0, 1.5)
EI_POINTS = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)


def _result(name, min_slack, threshold=SLACK, **extra) -> dict:
    return {"name": name, "min_slack": float(min_slack), "threshold": threshold,
            "passed": bool(min_slack >= threshold), **extra}


def check_gap_grid(step: float = 1e-4, fine_step: float = 1e-5) -> dict:
    a = verify_gap_grid(step)
    b = verify_gap_grid(fine_step)
    drift = abs(a - b)
    res = _result("gap_grid", a - 1e-4, 0.0, alpha_min=a, alpha_min_fine=b, drift=drift)
    res["passed"] = bool(a >= 1e-4 and drift < 1e-6)
    return res


def check_ei_quadrature(points=EI_POINTS) -> dict:
    """``Ei(-x) = -int_x^inf e^{-t}/t dt`` against adaptive quadrature."""
    errs = []
    for x in points:
        ref, _ = quad(lambda t: math.exp(-t) / t, x, math.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
        errs.append(abs(exp_int_neg(x) + ref))
    worst = max(errs)
    return _result("ei_quadrature", 1e-10 - worst, 0.0, max_abs_error=worst)


def check_ei_bound(points: int = 100_000, upper: float = 10.0) -> dict:
    x = np.linspace(upper / points, upper, points)
    slack = ei_upper_bound(x) - exp_int_neg(x)
    return _result("ei_bound", np.min(slack), points=points)


def check_noncentral_bound(points: int = 20_001, upper: float = 2.0) -> dict:
    c = np.linspace(0.0, upper, points)
    slack = expected_log_noncentral(c) - noncentral_lower_bound(c)
    return _result("noncentral_bound", np.min(slack), points=points)


def check_noncentral_mc(seed: int, samples: int = 1_000_000, cs=(0.0, 0.5, 1.0)) -> dict:
    rng = make_rng(seed)
    worst = 0.0
    rows = []
    for c in cs:
        g = standard_normal(rng, samples, "C")
        v = np.log(np.abs(g + c) ** 2)
        mean, se = float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples))
        exact = float(expected_log_noncentral(c))
        z = abs(mean - exact) / se
        worst = max(worst, z)
        rows.append({"c": c, "exact": exact, "mc_mean": mean, "std_error": se})
    res = _result("noncentral_mc", 5.0 - worst, 0.0, max_z=worst, samples=samples)
    res["detail"] = rows
    return res


def check_eps_inequality(step: float = 1e-5) -> dict:
    eps = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    return _result("eps_sq_over_20", np.min(upper_inequality_gap(eps)), step=step)


def check_moment_inequality(step: float = 1e-4, upper: float = 10.0) -> dict:
    """``x^2 - x^4 <= 1.09 x`` on ``[0, upper]``, plus ``2x^2 - x^4 <= 1.09x``.

    The second form is the one the fourth-moment bound uses with ``x = ||v_i||^2``;
    its maximum of ``2x - x^3`` is ``1.0887`` at ``x = sqrt(2/3)``.
    """
    x = np.linspace(0.0, upper, int(round(upper / step)) + 1)
    s1 = 1.09 * x - (x * x - x ** 4)
    s2 = 1.09 * x - (2 * x * x - x ** 4)
    m1, m2 = float(np.min(s1)), float(np.min(s2))
    return _result("moment_1_09", min(m1, m2), min_slack_stated=m1, min_slack_used=m2, step=step)


def check_two_concavity(ps=CLAIM_P, points: int = 1000, upper: float = 10.0) -> dict:
    grid = np.linspace(upper / points, upper, points)
    worst, rows = math.inf, []
    for p in ps:
        g1, g2 = two_concavity_gaps(p, grid)
        rows.append({"p": p, "derivative_slack": g1, "difference_slack": g2})
        worst = min(worst, g1, g2)
    res = _result("two_concavity", worst, points=points)
    res["detail"] = rows
    return res


def check_euler_gamma(seed: int, samples: int = 1_000_000) -> dict:
    """``E ln|g|^2 = -gamma`` for a standard complex Gaussian."""
    g = standard_normal(make_rng(seed), samples, "C")
    v = np.log(np.abs(g) ** 2)
    z = abs(float(v.mean()) + EULER_GAMMA) / float(v.std(ddof=1) / math.sqrt(samples))
    return _result("euler_gamma_mc", 5.0 - z, 0.0, z=z)


def run_gap() -> list:
    return [check_gap_grid()]


def run_all(seed: int) -> list:
    return [
        check_gap_grid(),
        check_ei_quadrature(),
        check_ei_bound(),
        check_noncentral_bound(),
        check_noncentral_mc(seed),
        check_euler_gamma(seed + 1),
        check_eps_inequality(),
        check_moment_inequality(),
        check_two_concavity(),
    ]
