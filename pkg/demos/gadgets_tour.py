"""Gadget matrices: isotropy, smooth vectors and the reduction instance."""

import math

import numpy as np

from psdperm import build_gadget, gamma_const, make_rng, smooth_vector_bound_check
from psdperm.errors import InfeasibleSmoothnessError
from psdperm.gadgets import random_projection, reduction_chain_check

E = build_gadget(3, "C")
print(f"E_3 over C has {E.d_k} rows, ||E||_2->2 = {E.norm_22():.6f}")
print("E^dagger E / rows = I/k:", np.allclose(E.rows.conj().T @ E.rows / E.d_k, np.eye(3) / 3))

k = 8
print(f"\nsmallest possible ||x||_inf/||x||_l2 at k={k}: {1 / math.sqrt(k):.4f}")
for delta in (0.2, 0.45, 0.6, 0.8):
    try:
        rep = smooth_vector_bound_check(k, "C", 0.0, delta, 200, seed=4)
        print(f"delta={delta}: max ratio {rep.max_ratio:.4f} (gamma {rep.gamma_p:.4f}, "
              f"{rep.attempts} draws)")
    except InfeasibleSmoothnessError as exc:
        print(f"delta={delta}: {exc}")

P = random_projection(4, 2, make_rng(5), "R")
chain = reduction_chain_check(P, 2, "R", restarts=30)
print(f"\nreduction instance {chain.rows}x{chain.dim}, ln r(A) ~ {chain.log_r_A:.4f}, "
      f"replication needed {chain.k_rep}")
for level in chain.levels:
    print(f"  copies {level['replication']}: {level['log_lower']:.3f} <= {level['log_per']:.3f} "
          f"<= {level['log_upper']:.3f}")
