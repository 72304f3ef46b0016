"""Certified bounds and estimates for permanents of Hermitian PSD matrices."""

from .bounds import BoundsReport, approximate_permanent, lower_bound, optimize_beta, upper_bound_trace
from .errors import (CertificateError, DegenerateInstanceError, InfeasibleSmoothnessError,
                     NotHermitianError, NotPSDError, PermError, SizeLimitError)
from .gadgets import (build_gadget, permanent_equivalence_check, reduction_instance, replicate,
                      smooth_vector_bound_check)
from .linalg import VectorSystem, cholesky_psd, hermitian_eigs, make_rng, random_vectors
from .logvalue import LogValue
from .means import PowerMean, f_mean, gamma_const
from .norm2q import round_2q, solve_sdp_2q
from .permanent import permanent, permanent_naive, permanent_ryser, wick_estimate
from .rounding import maximize_r, moment_check, sample_interpolated
from .sdp import SdpConfig, SdpSolution, rescale, solve_sdp, verify_optimality
from .special import exp_int_neg, expected_log_noncentral

__version__ = "0.1.0"
