"""Dense real linear algebra used by the algebra layer.

Quaternion arithmetic, left-multiplication embeddings of the division rings
R, C and H into real matrices, symmetric eigensolvers, Gram-Schmidt with
rank detection and Haar sampling of orthogonal/unitary/symplectic groups.
Nothing here knows about Jordan algebras.

Ring elements are stored as real vectors of length ``k`` (1, 2 or 4). A ring
column vector of length ``m`` is stored as the real vector of length ``k*m``
obtained by concatenating its entries. Under the embedding ``q -> L(q)``
(left multiplication), a ring matrix ``H`` becomes the real matrix with
``k x k`` blocks ``L(H_ij)``; Hermitian matrices become symmetric ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._config import AsymmetricMatrixError, Tolerances, resolve

RING_DEGREE = {"R": 1, "C": 2, "H": 4}


@dataclass(frozen=True)
class Quaternion:
    """Quaternion ``w + x i + y j + z k``."""

    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        w, x, y, z = (float(c) for c in arr)
        return cls(w, x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a1, b1, c1, d1 = self.w, self.x, self.y, self.z
            a2, b2, c2, d2 = other.w, other.x, other.y, other.z
            return Quaternion(
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            )
        s = float(other)
        return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    def left_matrix(self) -> np.ndarray:
        """Real 4x4 matrix of ``h -> self * h``."""
        return np.tensordot(self.to_array(), left_mult_basis(4), axes=1)


@lru_cache(maxsize=None)
def left_mult_basis(k: int) -> np.ndarray:
    """Left-multiplication matrices of the ring units, shape ``(k, k, k)``.

    ``left_mult_basis(k)[u]`` is the real matrix of ``h -> unit_u * h``.
    """
    if k == 1:
        out = np.ones((1, 1, 1))
    elif k == 2:
        out = np.array([[[1.0, 0.0], [0.0, 1.0]], [[0.0, -1.0], [1.0, 0.0]]])
    elif k == 4:
        units = [Quaternion(1), Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1)]
        out = np.zeros((4, 4, 4))
        for u, q in enumerate(units):
            for col, h in enumerate(units):
                out[u, :, col] = (q * h).to_array()
    else:
        raise ValueError(f"ring degree must be 1, 2 or 4, got {k}")
    out.setflags(write=False)
    return out


def ring_conj(c: np.ndarray) -> np.ndarray:
    out = -np.asarray(c, dtype=float)
    out[0] = -out[0]
    return out


def ring_frame(x: np.ndarray, k: int) -> np.ndarray:
    """Real embedding of a ring column vector, shape ``(k*m, k)``.

    Column ``u`` holds the coordinates of ``xi * unit_u``; the columns span the
    ring line through ``xi`` and are orthonormal when ``|xi| = 1``.
    """
    q = np.asarray(x, dtype=float).reshape(-1, k)
    return np.einsum("iu,uab->iab", q, left_mult_basis(k)).reshape(-1, k)


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def residual(self, M: np.ndarray) -> float:
        V, lam = self.eigenvectors, self.eigenvalues
        return float(np.max(np.abs(M @ V - V * lam), initial=0.0))


def _validated_symmetric(M, tol: Tolerances) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    asym = float(np.max(np.abs(M - M.T), initial=0.0))
    if asym > tol.symmetric * max(1.0, float(np.max(np.abs(M), initial=0.0))):
        raise AsymmetricMatrixError(asym)
    return 0.5 * (M + M.T)


def jacobi_eigh(M, tol: Tolerances | None = None, max_sweeps: int = 100) -> EigenSystem:
    """Cyclic Jacobi eigensolver for a real symmetric matrix."""
    tol = resolve(tol)
    A = _validated_symmetric(M, tol).copy()
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0))
        if off <= tol.jacobi_offdiag * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(apq) < 1e-300 * max(abs(diff), 1.0):
                    continue
                theta = diff / (2.0 * apq)
                # for huge theta, t ~ 1/(2 theta) avoids overflowing theta^2
                t = 1.0 / (2.0 * theta) if abs(theta) > 1e150 else (
                    math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    lam = np.diag(A).copy()
    order = np.argsort(lam, kind="stable")
    return EigenSystem(lam[order], V[:, order])


def sym_eigen(M, tol: Tolerances | None = None, method: str = "lapack") -> EigenSystem:
    """Full eigensystem of a real symmetric matrix, eigenvalues ascending.

    ``method="lapack"`` calls ``numpy.linalg.eigh``; ``method="jacobi"`` runs
    :func:`jacobi_eigh`. Both validate symmetry the same way.
    """
    tol = resolve(tol)
    if method == "jacobi":
        return jacobi_eigh(M, tol)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    A = _validated_symmetric(M, tol)
    lam, V = np.linalg.eigh(A)
    return EigenSystem(lam, V)


def cluster_eigenvalues(lam: np.ndarray, width: float) -> list[np.ndarray]:
    """Group sorted eigenvalues whose consecutive gaps are at most ``width``."""
    if len(lam) == 0:
        return []
    groups, start = [], 0
    for i in range(1, len(lam)):
        if lam[i] - lam[i - 1] > width:
            groups.append(np.arange(start, i))
            start = i
    groups.append(np.arange(start, len(lam)))
    return groups


def gram_schmidt(vectors, drop: float | None = None) -> np.ndarray:
    """Orthonormalize the columns of ``vectors``, discarding dependent ones.

    Two passes of modified Gram-Schmidt per vector. A column whose residual
    norm falls below ``drop`` (relative to its original norm, default 1e-9) is
    treated as linearly dependent and skipped.
    """
    drop = resolve(None).drop if drop is None else drop
    X = np.atleast_2d(np.asarray(vectors, dtype=float))
    basis: list[np.ndarray] = []
    for j in range(X.shape[1]):
        v = X[:, j].copy()
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            continue
        for _ in range(2):
            for b in basis:
                v -= (b @ v) * b
        nv = np.linalg.norm(v)
        if nv < drop * max(norm0, 1.0):
            continue
        basis.append(v / nv)
    if not basis:
        return np.zeros((X.shape[0], 0))
    return np.column_stack(basis)


def ring_gram_schmidt(vectors, k: int, drop: float | None = None) -> list[np.ndarray]:
    """Gram-Schmidt over R, C or H.

    Each column of ``vectors`` is a ring vector in real coordinates. Returns the
    ring frames (see :func:`ring_frame`) of an orthonormal ring basis of the
    ring span, so the concatenated frames form a real orthonormal set.
    """
    drop = resolve(None).drop if drop is None else drop
    X = np.atleast_2d(np.asarray(vectors, dtype=float))
    frames: list[np.ndarray] = []
    F = np.zeros((X.shape[0], 0))
    for j in range(X.shape[1]):
        v = X[:, j].copy()
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            continue
        for _ in range(2):
            v -= F @ (F.T @ v)
        nv = np.linalg.norm(v)
        if nv < drop * max(norm0, 1.0):
            continue
        frame = ring_frame(v / nv, k)
        frames.append(frame)
        F = np.hstack([F, frame])
    return frames


def haar_structured(n: int, ring: str, seed) -> np.ndarray:
    """Real embedding of a Haar-random orthogonal, unitary or symplectic matrix.

    Gaussian columns over the ring are orthonormalized in order; Gram-Schmidt
    yields a triangular factor with positive real diagonal, which is the phase
    convention that makes the result Haar distributed.

    Returns an orthogonal real matrix of size ``k*n`` (``k`` = 1, 2, 4).
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    k = RING_DEGREE[ring]
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((k * n, n))
    frames = ring_gram_schmidt(G, k, drop=0.0)
    return np.hstack(frames)


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar orthogonal matrix using the caller's generator."""
    G = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    return Q * np.sign(np.diag(R))
