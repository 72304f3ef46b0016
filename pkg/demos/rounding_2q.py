"""2->q relaxation and Gaussian rounding: the rounded value sits near gamma_q times the SDP value."""

import numpy as np

from psdperm import gamma_const, make_rng, round_2q, solve_sdp_2q
from psdperm.linalg import standard_normal

rng = make_rng(2)
A = standard_normal(rng, (12, 4), "C")
print(" q     sdp    witness  mean ratio  f-ratio  gamma")
for q in (-0.5, 0.0, 0.5, 1.0, 1.5, 2.0):
    sol = solve_sdp_2q(A, q)
    rep = round_2q(A, sol, 50_000, seed=3)
    print(f"{q:4.1f}  {sol.value:.4f}  {rep.best_ratio:.4f}   "
          f"{rep.mean_ratio:.4f}     {rep.f_ratio:.4f}   {gamma_const('C', q):.4f}")
