"""Exception hierarchy shared by every module."""


class PermError(Exception):
    """Base class for all library errors."""


class NotHermitianError(PermError, ValueError):
    def __init__(self, defect):
        self.defect = float(defect)
        super().__init__(f"matrix is not Hermitian (symmetry defect {self.defect:.3e})")


class NotPSDError(PermError, ValueError):
    def __init__(self, min_eigenvalue):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(f"matrix is not PSD (min eigenvalue {self.min_eigenvalue:.3e})")


class SizeLimitError(PermError, ValueError):
    pass


class DegenerateInstanceError(PermError, ValueError):
    """The instance has permanent zero, or numerically indistinguishable from it."""


class CertificateError(PermError):
    """An optimality certificate failed; the solver did not converge far enough."""


class InfeasibleSmoothnessError(PermError, ValueError):
    pass
