"""Walk a random PSD instance through relaxation, rescaling and the certified bounds.

Usage: python demos/bounds_pipeline.py [n] [d] [seed]
"""

import sys

import numpy as np

from psdperm import approximate_permanent, make_rng, permanent_ryser, random_vectors, rescale, solve_sdp, verify_optimality
from psdperm.special import EULER_GAMMA


def main(n=8, d=5, seed=0):
    V = random_vectors(n, d, make_rng(seed))
    print(f"A = V V^dagger with n={n} rows in dimension d={d}")

    sol = solve_sdp(V)
    print(f"relaxation: log objective {sol.log_objective.log_magnitude:.6f} "
          f"after {sol.iterations} iterations, gap {sol.fw_gap:.1e}")

    resc = rescale(V, sol)
    opt = verify_optimality(resc.V_tilde, sol)
    print(f"rescaled A~: max eigenvalue {opt.max_eig_A:.6f}, trace/n {opt.trace_ratio:.4f}")

    rep = approximate_permanent(V)
    exact = permanent_ryser(V.gram).log_magnitude
    print(f"ln per(A)   lower {rep.log_lower:10.4f}")
    print(f"            exact {exact:10.4f}")
    print(f"            upper {rep.log_upper:10.4f}")
    worst = -(EULER_GAMMA + 1) * n
    print(f"estimate/per = exp({exact - rep.log_estimate:.4f}); "
          f"guaranteed at least exp({worst:.4f})")


if __name__ == "__main__":
    main(*map(int, sys.argv[1:]))
