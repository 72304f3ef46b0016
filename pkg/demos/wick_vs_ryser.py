"""Monte-Carlo Wick estimates converge to the Ryser permanent at the 1/sqrt(N) rate."""

import numpy as np

from psdperm import make_rng, permanent_ryser, random_vectors, wick_estimate

V = random_vectors(5, 3, make_rng(1))
exact = permanent_ryser(V.gram).value.real
print(f"Ryser: {exact:.6f}")
for samples in (10**3, 10**4, 10**5, 10**6):
    est = wick_estimate(V, samples, seed=samples)
    z = (est.estimate.value - exact) / est.std_error
    print(f"N={samples:>8}  estimate {est.estimate.value:12.6f}  se {est.std_error:10.6f}  z {z:+.2f}")
