"""Tolerances and exception types shared by every module."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds threaded through the library.

    Parameters
    ----------
    symmetric : float
        Maximum entrywise asymmetry accepted by the symmetric eigensolver.
    eig_cluster : float
        Relative gap below which eigenvalues are merged into one eigenspace
        (scaled by ``max(1, ||M||)``).
    projection : float
        Distance of a spectral value from 0 or 1 still accepted for a projection.
    meet_two : float
        Distance from 2 for an eigenvalue of ``p + q`` to count towards the meet.
    cone : float
        Relative slack for cone membership (scaled by ``max(1, ||a||)``).
    compare : float
        Relative slack for element equality (scaled by ``max(1, ||a||)``).
    drop : float
        Residual norm below which Gram-Schmidt discards a vector.
    jacobi_offdiag : float
        Relative off-diagonal Frobenius norm at which Jacobi sweeps stop.
    """

    symmetric: float = 1e-10
    eig_cluster: float = 1e-8
    projection: float = 1e-8
    meet_two: float = 1e-7
    cone: float = 1e-9
    compare: float = 1e-9
    drop: float = 1e-9
    jacobi_offdiag: float = 1e-12

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def updated(self, **overrides: float) -> "Tolerances":
        unknown = set(overrides) - set(asdict(self))
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT_TOL = Tolerances()


def resolve(tol: Tolerances | None) -> Tolerances:
    return DEFAULT_TOL if tol is None else tol


class JordanLogicError(Exception):
    """Base class for library errors."""


class AsymmetricMatrixError(JordanLogicError, ValueError):
    def __init__(self, asymmetry: float):
        super().__init__(f"matrix is not symmetric: max |M - M^T| = {asymmetry:.3e}")
        self.asymmetry = asymmetry


class AlgebraMismatchError(JordanLogicError, ValueError):
    pass


class NotAProjectionError(JordanLogicError, ValueError):
    def __init__(self, eigenvalue: float):
        super().__init__(f"spectral value {eigenvalue!r} is neither 0 nor 1")
        self.eigenvalue = eigenvalue


class LatticeError(JordanLogicError):
    pass


class TransportError(JordanLogicError):
    """No automorphism in the sampled group maps one atom onto the other."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class PreconditionError(JordanLogicError, ValueError):
    pass


class InconclusiveError(JordanLogicError):
    pass


class CenterVerificationError(JordanLogicError):
    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness
