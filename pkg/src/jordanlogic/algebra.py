"""Concrete order unit spaces: Jordan matrix algebras, spin factors, direct sums.

Every algebra has a fixed real basis and elements are coordinate vectors in
it. Coordinates of ``H_m(K)`` for ``K`` in {R, C, H}: the ``m`` diagonal
entries first, then ``sqrt(2)`` times the ``k`` real components of each upper
off-diagonal entry ``(i, j)``, ``i < j``, in row-major order. The basis is
orthonormal for the trace form ``tr(ab)``. A spin factor ``spin(n)``
uses ``(s, v_1, ..., v_n)`` for ``s*I + v``. Direct sums concatenate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import numeric
from ._config import (
    AlgebraMismatchError,
    PreconditionError,
    Tolerances,
    TransportError,
    resolve,
)
from .numeric import RING_DEGREE, ring_frame, ring_gram_schmidt, sym_eigen

_TINY = 1e-12
BLOCK_EXCHANGE = "discrete block exchange"
_SQRT_HALF = np.sqrt(0.5)


# ---------------------------------------------------------------------------
# algebra descriptors


class Algebra:
    """Interface shared by the concrete descriptors.

    Subclasses work on raw coordinate arrays; the module-level functions wrap
    them into :class:`Element` values.
    """

    dim: int
    capacity: int

    def spec(self) -> dict:
        raise NotImplementedError

    @property
    def label(self) -> str:
        raise NotImplementedError

    def blocks(self) -> list[tuple["Algebra", int]]:
        return [(self, 0)]

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class _Group:
    """One eigenvalue with its atoms (coords) and, for matrix algebras, ring frames."""

    value: float
    atoms: list
    projection: np.ndarray
    frames: list = field(default_factory=list)


class _ConjugationPath:
    """``t -> (a -> U_t a U_t*)`` for a rotation in a plane spanned by two ring frames."""

    def __init__(self, algebra: "MatrixAlgebra", f1: np.ndarray, f2: np.ndarray | None, theta: float):
        self.algebra = algebra
        self.theta = theta
        n = algebra.n
        if f2 is None or theta == 0.0:
            self._A = np.zeros((n, n))
            self._B = np.zeros((n, n))
        else:
            self._A = f2 @ f1.T - f1 @ f2.T
            self._B = f1 @ f1.T + f2 @ f2.T

    def conjugator(self, t: float) -> np.ndarray:
        a = t * self.theta
        return np.eye(self.algebra.n) + np.sin(a) * self._A + (np.cos(a) - 1.0) * self._B

    def matrix(self, t: float) -> np.ndarray:
        return self.algebra.conjugation_matrix(self.conjugator(t))


class _RotationPath:
    """``t -> 1 (+) R_t`` on a spin factor, ``R_t`` rotating in the plane (u1, u2)."""

    def __init__(self, algebra: "SpinFactor", u1: np.ndarray, u2: np.ndarray | None, theta: float):
        self.algebra = algebra
        self.theta = theta
        n = algebra.n
        if u2 is None or theta == 0.0:
            self._A = np.zeros((n, n))
            self._B = np.zeros((n, n))
        else:
            self._A = np.outer(u2, u1) - np.outer(u1, u2)
            self._B = np.outer(u1, u1) + np.outer(u2, u2)

    def matrix(self, t: float) -> np.ndarray:
        a = t * self.theta
        R = np.eye(self.algebra.n) + np.sin(a) * self._A + (np.cos(a) - 1.0) * self._B
        T = np.eye(self.algebra.dim)
        T[1:, 1:] = R
        return T


class _BlockPath:
    def __init__(self, algebra: "DirectSum", index: int, inner):
        self.algebra = algebra
        self.index = index
        self.inner = inner
        self.theta = inner.theta

    def matrix(self, t: float) -> np.ndarray:
        T = np.eye(self.algebra.dim)
        sl = self.algebra.block_slice(self.index)
        T[sl, sl] = self.inner.matrix(t)
        return T


@dataclass(frozen=True)
class MatrixAlgebra(Algebra):
    """Hermitian ``m x m`` matrices over R, C or H with the Jordan product."""

    ring: str
    m: int

    def __post_init__(self):
        if self.ring not in RING_DEGREE:
            raise ValueError(f"ring must be one of R, C, H, got {self.ring!r}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")

    @property
    def k(self) -> int:
        return RING_DEGREE[self.ring]

    @property
    def n(self) -> int:
        """Size of the real embedding."""
        return self.k * self.m

    @property
    def dim(self) -> int:
        return self.m + self.k * self.m * (self.m - 1) // 2

    @property
    def capacity(self) -> int:
        return self.m

    @property
    def label(self) -> str:
        return f"H_{self.m}({self.ring})"

    def spec(self) -> dict:
        return {"kind": "matrix", "ring": self.ring, "m": self.m}

    @cached_property
    def basis_tensor(self) -> np.ndarray:
        k, m, n = self.k, self.m, self.n
        L = numeric.left_mult_basis(k)
        B = np.zeros((self.dim, n, n))
        for i in range(m):
            B[i, k * i : k * i + k, k * i : k * i + k] = L[0]
        idx = m
        for i in range(m):
            for j in range(i + 1, m):
                for u in range(k):
                    B[idx, k * i : k * i + k, k * j : k * j + k] = L[u] * _SQRT_HALF
                    B[idx, k * j : k * j + k, k * i : k * i + k] = L[u].T * _SQRT_HALF
                    idx += 1
        B.setflags(write=False)
        return B

    @cached_property
    def _flat(self) -> tuple[np.ndarray, np.ndarray]:
        Bf = self.basis_tensor.reshape(self.dim, -1)
        return Bf, np.einsum("ij,ij->i", Bf, Bf)

    def embed(self, x: np.ndarray) -> np.ndarray:
        """Real symmetric ``n x n`` matrix of an element."""
        return np.tensordot(x, self.basis_tensor, axes=1)

    def unembed(self, M: np.ndarray) -> np.ndarray:
        Bf, norms = self._flat
        return (Bf @ np.asarray(M).ravel()) / norms

    def unit_coords(self) -> np.ndarray:
        x = np.zeros(self.dim)
        x[: self.m] = 1.0
        return x

    def product(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        X, Y = self.embed(x), self.embed(y)
        XY = X @ Y
        return self.unembed(0.5 * (XY + XY.T))

    def _split_frames(self, V: np.ndarray, tol: Tolerances) -> list[np.ndarray]:
        k = self.k
        r = V.shape[1] // k
        frames = []
        for i in range(r):
            frame = ring_frame(V[:, 0], k)
            frames.append(frame)
            if i == r - 1:
                break
            R = V - frame @ (frame.T @ V)
            U, _, _ = np.linalg.svd(R, full_matrices=False)
            V = U[:, : k * (r - i - 1)]
        return frames

    def _groups(self, x: np.ndarray, tol: Tolerances) -> list[_Group]:
        es = sym_eigen(self.embed(x), tol)
        lam, V = es.eigenvalues, es.eigenvectors
        width = tol.eig_cluster * max(1.0, float(np.max(np.abs(lam))))
        out = []
        for g in numeric.cluster_eigenvalues(lam, width):
            if len(g) % self.k:
                raise ArithmeticError(
                    f"eigenvalue cluster of size {len(g)} in {self.label} is not a multiple of {self.k}"
                )
            Vc = V[:, g]
            frames = self._split_frames(Vc, tol)
            atoms = [self.unembed(f @ f.T) for f in frames]
            out.append(_Group(float(np.mean(lam[g])), atoms, self.unembed(Vc @ Vc.T), frames))
        return out

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.dim)

    def random_projection(self, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
        if rank is None:
            rank = int(rng.integers(0, self.m + 1))
        if rank == 0:
            return np.zeros(self.dim)
        frames = ring_gram_schmidt(rng.standard_normal((self.n, rank)), self.k)
        F = np.hstack(frames)
        return self.unembed(F @ F.T)

    def atom_vector(self, e: np.ndarray) -> np.ndarray:
        """Unit real vector in the range of a rank-one projection."""
        P = self.embed(e)
        j = int(np.argmax(np.einsum("ij,ij->j", P, P)))
        x = P[:, j]
        return x / np.linalg.norm(x)

    def atom_state(self, e: np.ndarray) -> np.ndarray:
        x = self.atom_vector(e)
        return np.einsum("ijk,j,k->i", self.basis_tensor, x, x)

    def face(self, p: np.ndarray, tol: Tolerances):
        groups = self._groups(p, tol)
        frames = [f for g in groups if abs(g.value - 1.0) <= tol.projection for f in g.frames]
        r = len(frames)
        if r == 0:
            raise PreconditionError("cannot restrict to the zero projection")
        face = MatrixAlgebra(self.ring, r)
        W = np.hstack(frames)
        images = np.einsum("ab,jbc,dc->jad", W, face.basis_tensor, W)
        Bf, norms = self._flat
        J = (Bf @ images.reshape(face.dim, -1).T) / norms[:, None]
        return face, J

    def conjugation_matrix(self, U: np.ndarray) -> np.ndarray:
        """Coordinate matrix of ``a -> U a U^T`` for an orthogonal real embedding ``U``."""
        images = np.einsum("ab,jbc,dc->jad", U, self.basis_tensor, U)
        Bf, norms = self._flat
        return (Bf @ images.reshape(self.dim, -1).T) / norms[:, None]

    def haar_conjugator(self, rng: np.random.Generator) -> np.ndarray:
        frames = ring_gram_schmidt(rng.standard_normal((self.n, self.m)), self.k, drop=0.0)
        return np.hstack(frames)

    def haar_automorphism(self, rng: np.random.Generator) -> np.ndarray:
        return self.conjugation_matrix(self.haar_conjugator(rng))

    def subgroup_average(self, M: np.ndarray) -> np.ndarray:
        """Exact average of ``T^T M T`` over monomial conjugations.

        The subgroup is generated by diagonal unitaries with entries in the
        unit sphere of the ring and by permutation matrices.
        """
        m, k = self.m, self.k
        out = np.zeros_like(M)
        D = M[:m, :m]
        on = np.trace(D) / m
        off = (D.sum() - np.trace(D)) / (m * (m - 1)) if m > 1 else 0.0
        out[:m, :m] = on * np.eye(m) + off * (np.ones((m, m)) - np.eye(m))
        if self.dim > m:
            pair_traces = np.diagonal(M)[m:].reshape(-1, k).sum(axis=1) / k
            out[m:, m:] = np.mean(pair_traces) * np.eye(self.dim - m)
        return out

    def subgroup_fixed_projector(self) -> np.ndarray:
        """Mean of ``T`` over the averaging subgroup."""
        u = self.unit_coords()
        return np.outer(u, u) / self.m

    def natural_gram(self) -> np.ndarray:
        """Gram matrix of the trace form ``tr(ab)``."""
        Bf, _ = self._flat
        return (Bf @ Bf.T) / self.k

    def reference_atom(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[0] = 1.0
        return e

    def transport_path(self, e1: np.ndarray, e2: np.ndarray, tol: Tolerances) -> _ConjugationPath:
        k = self.k
        x1, x2 = self.atom_vector(e1), self.atom_vector(e2)
        f1 = ring_frame(x1, k)
        c = f1.T @ x2  # coordinates of <xi1, xi2> in the ring
        cn = float(np.linalg.norm(c))
        if cn > _TINY:
            x2 = ring_frame(x2, k) @ (numeric.ring_conj(c) / cn)
        eta = x2 - min(cn, 1.0) * x1
        en = float(np.linalg.norm(eta))
        theta = float(np.arccos(np.clip(cn, -1.0, 1.0)))
        if en <= _TINY or theta == 0.0:
            return _ConjugationPath(self, f1, None, 0.0)
        return _ConjugationPath(self, f1, ring_frame(eta / en, k), theta)


@dataclass(frozen=True)
class SpinFactor(Algebra):
    """``R*I (+) R^n`` with ``(s + v)(t + w) = (st + v.w) + (s w + t v)``."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"spin factor needs n >= 2, got {self.n!r}")

    @property
    def dim(self) -> int:
        return self.n + 1

    @property
    def capacity(self) -> int:
        return 2

    @property
    def label(self) -> str:
        return f"spin({self.n})"

    def spec(self) -> dict:
        return {"kind": "spin", "n": self.n}

    def unit_coords(self) -> np.ndarray:
        x = np.zeros(self.dim)
        x[0] = 1.0
        return x

    def product(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        s, v = x[0], x[1:]
        t, w = y[0], y[1:]
        out = np.empty(self.dim)
        out[0] = s * t + v @ w
        out[1:] = s * w + t * v
        return out

    def _atom(self, u: np.ndarray) -> np.ndarray:
        e = np.empty(self.dim)
        e[0] = 0.5
        e[1:] = 0.5 * u
        return e

    def _groups(self, x: np.ndarray, tol: Tolerances) -> list[_Group]:
        s, v = float(x[0]), x[1:]
        r = float(np.linalg.norm(v))
        width = tol.eig_cluster * max(1.0, abs(s) + r)
        if 2.0 * r <= width:
            u = np.zeros(self.n)
            u[0] = 1.0
            return [_Group(s, [self._atom(u), self._atom(-u)], self.unit_coords())]
        u = v / r
        lo, hi = self._atom(-u), self._atom(u)
        return [_Group(s - r, [lo], lo), _Group(s + r, [hi], hi)]

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.dim)

    def random_direction(self, rng: np.random.Generator) -> np.ndarray:
        u = rng.standard_normal(self.n)
        return u / np.linalg.norm(u)

    def random_projection(self, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
        if rank is None:
            rank = int(rng.integers(0, 3))
        if rank == 0:
            return np.zeros(self.dim)
        if rank == 2:
            return self.unit_coords()
        return self._atom(self.random_direction(rng))

    def atom_state(self, e: np.ndarray) -> np.ndarray:
        u = e[1:] / np.linalg.norm(e[1:])
        return np.concatenate([[1.0], u])

    def face(self, p: np.ndarray, tol: Tolerances):
        rank = sum(len(g.atoms) for g in self._groups(p, tol) if abs(g.value - 1.0) <= tol.projection)
        if rank == 0:
            raise PreconditionError("cannot restrict to the zero projection")
        if rank == 2:
            return self, np.eye(self.dim)
        return MatrixAlgebra("R", 1), np.asarray(p, dtype=float).reshape(-1, 1).copy()

    def haar_automorphism(self, rng: np.random.Generator) -> np.ndarray:
        T = np.eye(self.dim)
        T[1:, 1:] = numeric.random_orthogonal(self.n, rng)
        return T

    def subgroup_average(self, M: np.ndarray) -> np.ndarray:
        """Exact average of ``T^T M T`` over sign flips of the axes of V."""
        out = np.diag(np.diagonal(M)).astype(float)
        out[0, 0] = M[0, 0]
        return out

    def subgroup_fixed_projector(self) -> np.ndarray:
        P = np.zeros((self.dim, self.dim))
        P[0, 0] = 1.0
        return P

    def natural_gram(self) -> np.ndarray:
        """The form with ``<e|e> = 1`` and ``<e|e'> = 0`` on atoms."""
        return 2.0 * np.eye(self.dim)

    def reference_atom(self) -> np.ndarray:
        u = np.zeros(self.n)
        u[0] = 1.0
        return self._atom(u)

    def transport_path(self, e1: np.ndarray, e2: np.ndarray, tol: Tolerances) -> _RotationPath:
        u1 = e1[1:] / np.linalg.norm(e1[1:])
        u2 = e2[1:] / np.linalg.norm(e2[1:])
        c = float(np.clip(u1 @ u2, -1.0, 1.0))
        theta = float(np.arccos(c))
        w = u2 - c * u1
        wn = float(np.linalg.norm(w))
        if theta == 0.0 or (wn <= _TINY and c > 0):
            return _RotationPath(self, u1, None, 0.0)
        if wn <= 1e-8:
            # antipodal: first coordinate axis not parallel to u1 fixes the plane
            for i in range(self.n):
                w = -u1[i] * u1
                w[i] += 1.0
                wn = float(np.linalg.norm(w))
                if wn > 1e-6:
                    break
            theta = np.pi
        return _RotationPath(self, u1, w / wn, theta)


@dataclass(frozen=True)
class DirectSum(Algebra):
    """Finite direct sum; coordinates, products, cones and spectra act blockwise."""

    parts: tuple

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("a direct sum needs at least two parts")
        if any(isinstance(p, DirectSum) for p in self.parts):
            raise ValueError("nested direct sums must be flattened; use direct_sum()")

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)

    @property
    def capacity(self) -> int:
        return sum(p.capacity for p in self.parts)

    @property
    def label(self) -> str:
        return " (+) ".join(p.label for p in self.parts)

    def spec(self) -> dict:
        return {"kind": "sum", "parts": [p.spec() for p in self.parts]}

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(np.cumsum([0] + [p.dim for p in self.parts])[:-1].tolist())

    def block_slice(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i] + self.parts[i].dim)

    def blocks(self) -> list[tuple[Algebra, int]]:
        return list(zip(self.parts, self.offsets))

    def split(self, x: np.ndarray) -> list[np.ndarray]:
        return [x[self.block_slice(i)] for i in range(len(self.parts))]

    def lift(self, i: int, xb: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.block_slice(i)] = xb
        return out

    def support(self, x: np.ndarray) -> list[int]:
        scale = max(1.0, float(np.max(np.abs(x), initial=0.0)))
        return [i for i, xb in enumerate(self.split(x)) if np.max(np.abs(xb), initial=0.0) > _TINY * 1e3 * scale]

    def unit_coords(self) -> np.ndarray:
        return np.concatenate([p.unit_coords() for p in self.parts])

    def product(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.concatenate([p.product(a, b) for p, a, b in zip(self.parts, self.split(x), self.split(y))])

    def _groups(self, x: np.ndarray, tol: Tolerances) -> list[_Group]:
        raw = []
        for i, (p, xb) in enumerate(zip(self.parts, self.split(x))):
            for g in p._groups(xb, tol):
                raw.append(_Group(g.value, [self.lift(i, a) for a in g.atoms], self.lift(i, g.projection)))
        raw.sort(key=lambda g: g.value)
        vals = np.array([g.value for g in raw])
        width = tol.eig_cluster * max(1.0, float(np.max(np.abs(vals))))
        out = []
        for idx in numeric.cluster_eigenvalues(vals, width):
            members = [raw[j] for j in idx]
            weights = np.array([len(g.atoms) for g in members], dtype=float)
            value = float(np.average([g.value for g in members], weights=weights))
            atoms = [a for g in members for a in g.atoms]
            out.append(_Group(value, atoms, sum(g.projection for g in members)))
        return out

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return np.concatenate([p.random_element(rng) for p in self.parts])

    def random_projection(self, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
        if rank is None:
            return np.concatenate([p.random_projection(rng) for p in self.parts])
        if not 0 <= rank <= self.capacity:
            raise ValueError(f"rank {rank} outside 0..{self.capacity}")
        slots = np.repeat(np.arange(len(self.parts)), [p.capacity for p in self.parts])
        chosen = rng.choice(slots, size=rank, replace=False)
        counts = np.bincount(chosen, minlength=len(self.parts))
        return np.concatenate([p.random_projection(rng, int(c)) for p, c in zip(self.parts, counts)])

    def _single_block(self, e: np.ndarray) -> int:
        sup = self.support(e)
        if len(sup) != 1:
            raise ValueError(f"element is not supported on a single block (blocks {sup})")
        return sup[0]

    def atom_state(self, e: np.ndarray) -> np.ndarray:
        i = self._single_block(e)
        return self.lift(i, self.parts[i].atom_state(self.split(e)[i]))

    def face(self, p: np.ndarray, tol: Tolerances):
        faces, cols = [], []
        for i in self.support(p):
            fa, J = self.parts[i].face(self.split(p)[i], tol)
            full = np.zeros((self.dim, fa.dim))
            full[self.block_slice(i)] = J
            faces.append(fa)
            cols.append(full)
        if not faces:
            raise PreconditionError("cannot restrict to the zero projection")
        if len(faces) == 1:
            return faces[0], cols[0]
        return DirectSum(tuple(faces)), np.hstack(cols)

    def haar_automorphism(self, rng: np.random.Generator) -> np.ndarray:
        T = np.zeros((self.dim, self.dim))
        for i, p in enumerate(self.parts):
            sl = self.block_slice(i)
            T[sl, sl] = p.haar_automorphism(rng)
        return T

    def subgroup_average(self, M: np.ndarray) -> np.ndarray:
        """Blockwise subgroup average; cross blocks see the mean of each factor."""
        out = np.zeros_like(M)
        fixed = [p.subgroup_fixed_projector() for p in self.parts]
        for i, p in enumerate(self.parts):
            si = self.block_slice(i)
            for j in range(len(self.parts)):
                sj = self.block_slice(j)
                if i == j:
                    out[si, si] = p.subgroup_average(M[si, si])
                else:
                    out[si, sj] = fixed[i].T @ M[si, sj] @ fixed[j]
        return out

    def subgroup_fixed_projector(self) -> np.ndarray:
        P = np.zeros((self.dim, self.dim))
        for i, p in enumerate(self.parts):
            sl = self.block_slice(i)
            P[sl, sl] = p.subgroup_fixed_projector()
        return P

    def natural_gram(self) -> np.ndarray:
        G = np.zeros((self.dim, self.dim))
        for i, p in enumerate(self.parts):
            sl = self.block_slice(i)
            G[sl, sl] = p.natural_gram()
        return G

    def reference_atom(self) -> np.ndarray:
        return self.lift(0, self.parts[0].reference_atom())

    def block_swap(self, i: int, j: int) -> np.ndarray:
        """Automorphism exchanging two isomorphic blocks."""
        if self.parts[i].spec() != self.parts[j].spec():
            raise PreconditionError(f"blocks {i} and {j} are not isomorphic")
        idx = np.arange(self.dim)
        si, sj = self.block_slice(i), self.block_slice(j)
        idx[si], idx[sj] = idx[sj].copy(), idx[si].copy()
        return np.eye(self.dim)[idx]

    def transport_path(self, e1: np.ndarray, e2: np.ndarray, tol: Tolerances) -> _BlockPath:
        """Continuous transport inside one block; raises across blocks."""
        i, j = self._single_block(e1), self._single_block(e2)
        if i != j:
            a, b = self.parts[i], self.parts[j]
            if a.spec() != b.spec():
                reason = "dimension obstruction"
                detail = (
                    f"atoms lie in non-isomorphic blocks {a.label} (dim {a.dim}, capacity {a.capacity}) "
                    f"and {b.label} (dim {b.dim}, capacity {b.capacity})"
                )
            else:
                reason = BLOCK_EXCHANGE
                detail = f"atoms lie in isomorphic blocks {i} and {j}, which only a discrete block swap exchanges"
            raise TransportError(
                f"{reason}: {detail}",
                witness={
                    "reason": reason,
                    "block_1": {"index": i, "algebra": a.spec(), "dim": a.dim, "capacity": a.capacity},
                    "block_2": {"index": j, "algebra": b.spec(), "dim": b.dim, "capacity": b.capacity},
                },
            )
        inner = self.parts[i].transport_path(self.split(e1)[i], self.split(e2)[i], tol)
        return _BlockPath(self, i, inner)


def direct_sum(algebras: Sequence[Algebra]) -> Algebra:
    """Direct sum of algebras; nested sums are flattened, a single part is returned as is."""
    parts: list[Algebra] = []
    for a in algebras:
        parts.extend(a.parts if isinstance(a, DirectSum) else [a])
    if not parts:
        raise ValueError("direct_sum needs at least one algebra")
    if len(parts) == 1:
        return parts[0]
    return DirectSum(tuple(parts))


def parse_algebra(spec) -> Algebra:
    """Build an algebra from its JSON-shaped spec (dict or JSON text)."""
    if isinstance(spec, Algebra):
        return spec
    if isinstance(spec, str):
        spec = json.loads(spec)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError(f"malformed algebra spec: {spec!r}")
    kind = spec["kind"]
    if kind == "matrix":
        return MatrixAlgebra(str(spec["ring"]), int(spec["m"]))
    if kind == "spin":
        return SpinFactor(int(spec["n"]))
    if kind == "sum":
        return direct_sum([parse_algebra(p) for p in spec["parts"]])
    raise ValueError(f"unknown algebra kind {kind!r}")


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True, eq=False)
class Element:
    algebra: Algebra
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.shape != (self.algebra.dim,):
            raise ValueError(f"{self.algebra.label} needs {self.algebra.dim} coordinates, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def _check(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise AlgebraMismatchError(f"{self.algebra.label} vs {other.algebra.label}")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.algebra, self.coords - other.coords)

    def __neg__(self) -> "Element":
        return Element(self.algebra, -self.coords)

    def __mul__(self, s: float) -> "Element":
        return Element(self.algebra, float(s) * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Element":
        return Element(self.algebra, self.coords / float(s))

    def __repr__(self) -> str:
        return f"Element({self.algebra.label}, {np.array2string(self.coords, precision=6)})"

    def close_to(self, other: "Element", tol: float | None = None) -> bool:
        self._check(other)
        scale = max(1.0, float(np.max(np.abs(self.coords), initial=0.0)))
        t = resolve(None).compare if tol is None else tol
        return bool(np.max(np.abs(self.coords - other.coords), initial=0.0) <= t * scale)

    def to_json(self) -> dict:
        return {"algebra": self.algebra.spec(), "coords": [float(c) for c in self.coords]}

    @classmethod
    def from_json(cls, data) -> "Element":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, dict) or "algebra" not in data or "coords" not in data:
            raise ValueError("element JSON needs 'algebra' and 'coords'")
        coords = data["coords"]
        if not isinstance(coords, list) or not all(isinstance(c, (int, float)) for c in coords):
            raise ValueError("element coords must be a list of numbers")
        return cls(parse_algebra(data["algebra"]), np.array(coords, dtype=float))


def element(algebra: Algebra, coords) -> Element:
    return Element(algebra, np.asarray(coords, dtype=float))


def zero(algebra: Algebra) -> Element:
    return Element(algebra, np.zeros(algebra.dim))


def unit(algebra: Algebra) -> Element:
    """The order unit."""
    return Element(algebra, algebra.unit_coords())


def from_matrix(algebra: MatrixAlgebra, H) -> Element:
    """Element of ``H_m(R)`` or ``H_m(C)`` from a Hermitian numpy matrix."""
    H = np.asarray(H)
    m, k = algebra.m, algebra.k
    if H.shape != (m, m):
        raise ValueError(f"expected shape {(m, m)}, got {H.shape}")
    if k == 4:
        raise ValueError("use from_quaternion_matrix for H_m(H)")
    coords = [float(np.real(H[i, i])) for i in range(m)]
    r2 = np.sqrt(2.0)
    for i in range(m):
        for j in range(i + 1, m):
            coords.append(r2 * float(np.real(H[i, j])))
            if k == 2:
                coords.append(r2 * float(np.imag(H[i, j])))
    return Element(algebra, np.array(coords))


def to_matrix(a: Element) -> np.ndarray:
    """Hermitian numpy matrix of an element of ``H_m(R)`` or ``H_m(C)``."""
    alg = a.algebra
    if not isinstance(alg, MatrixAlgebra) or alg.k == 4:
        raise ValueError("to_matrix supports H_m(R) and H_m(C) only")
    m = alg.m
    H = np.zeros((m, m), dtype=complex if alg.k == 2 else float)
    c = a.coords
    H[np.arange(m), np.arange(m)] = c[:m]
    idx = m
    for i in range(m):
        for j in range(i + 1, m):
            z = (c[idx] + (1j * c[idx + 1] if alg.k == 2 else 0.0)) * _SQRT_HALF
            H[i, j], H[j, i] = z, np.conj(z)
            idx += alg.k
    return H


def jordan_product(a: Element, b: Element) -> Element:
    """Commutative Jordan product ``a o b``."""
    a._check(b)
    return Element(a.algebra, a.algebra.product(a.coords, b.coords))


# ---------------------------------------------------------------------------
# spectral data


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (ascending) with their atoms and spectral projections.

    Inside a degenerate eigenspace the atoms are one orthogonal choice among
    many; the spectral projections are unique.
    """

    algebra: Algebra
    eigenvalues: tuple[float, ...]
    atoms: tuple[tuple[Element, ...], ...]
    projections: tuple[Element, ...]

    def expanded(self) -> list[tuple[float, Element]]:
        return [(s, e) for s, group in zip(self.eigenvalues, self.atoms) for e in group]

    @property
    def n_atoms(self) -> int:
        return sum(len(g) for g in self.atoms)

    def reconstruct(self) -> Element:
        out = np.zeros(self.algebra.dim)
        for s, p in zip(self.eigenvalues, self.projections):
            out += s * p.coords
        return Element(self.algebra, out)

    def atom_sum(self) -> Element:
        out = np.zeros(self.algebra.dim)
        for _, e in self.expanded():
            out += e.coords
        return Element(self.algebra, out)

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra.spec(),
            "eigenvalues": [float(s) for s in self.eigenvalues],
            "atoms": [[[float(c) for c in e.coords] for e in g] for g in self.atoms],
        }


def spectral_decompose(a: Element, tol: Tolerances | None = None) -> SpectralDecomposition:
    """Write ``a = sum_k s_k e_k`` with orthogonal atoms summing to the unit."""
    tol = resolve(tol)
    alg = a.algebra
    groups = alg._groups(a.coords, tol)
    return SpectralDecomposition(
        alg,
        tuple(g.value for g in groups),
        tuple(tuple(Element(alg, e) for e in g.atoms) for g in groups),
        tuple(Element(alg, g.projection) for g in groups),
    )


def eigenvalues(a: Element, tol: Tolerances | None = None) -> np.ndarray:
    """Spectral values with multiplicity (ascending)."""
    sd = spectral_decompose(a, tol)
    return np.array([s for s, _ in sd.expanded()])


def order_norm(a: Element, tol: Tolerances | None = None) -> float:
    """``inf{s : -s I <= a <= s I}``, the largest absolute spectral value."""
    vals = spectral_decompose(a, tol).eigenvalues
    return float(max(abs(v) for v in vals)) if vals else 0.0


def in_cone(a: Element, tol: float | None = None, tolerances: Tolerances | None = None) -> bool:
    """Whether ``a >= 0``, i.e. every spectral value is at least ``-tol``.

    The default slack is ``cone * max(1, ||a||)``.
    """
    tolerances = resolve(tolerances)
    vals = spectral_decompose(a, tolerances).eigenvalues
    if tol is None:
        tol = tolerances.cone * max(1.0, max(abs(v) for v in vals))
    return bool(vals[0] >= -tol)


def leq_elements(a: Element, b: Element, tolerances: Tolerances | None = None) -> bool:
    """Order relation ``a <= b``."""
    return in_cone(b - a, tolerances=tolerances)


# ---------------------------------------------------------------------------
# faces and states


@dataclass(frozen=True, eq=False)
class Face:
    """The order unit space ``A_p`` with its embedding into ``A``.

    ``embedding`` is a ``(A.dim, face.dim)`` matrix mapping face coordinates to
    coordinates of ``A``; the face unit maps to ``p``.
    """

    parent: Algebra
    algebra: Algebra
    embedding: np.ndarray

    def __iter__(self):
        yield self.algebra
        yield self.embedding

    def push(self, b: Element) -> Element:
        if b.algebra != self.algebra:
            raise AlgebraMismatchError(f"{b.algebra.label} is not the face algebra {self.algebra.label}")
        return Element(self.parent, self.embedding @ b.coords)

    def pull(self, a: Element) -> Element:
        """Face coordinates of an element of ``A_p`` (least squares)."""
        if a.algebra != self.parent:
            raise AlgebraMismatchError(f"{a.algebra.label} is not {self.parent.label}")
        coef, *_ = np.linalg.lstsq(self.embedding, a.coords, rcond=None)
        return Element(self.algebra, coef)


def restrict(algebra: Algebra, p, tol: Tolerances | None = None) -> Face:
    """Face algebra ``A_p`` of a non-zero projection ``p``."""
    tol = resolve(tol)
    p_el = getattr(p, "element", p)
    if p_el.algebra != algebra:
        raise AlgebraMismatchError(f"{p_el.algebra.label} vs {algebra.label}")
    fa, J = algebra.face(p_el.coords, tol)
    return Face(algebra, fa, J)


@dataclass(frozen=True, eq=False)
class State:
    """Positive normalized linear functional; acts on coordinates by dot product."""

    algebra: Algebra
    functional: np.ndarray

    def __call__(self, a: Element) -> float:
        if a.algebra != self.algebra:
            raise AlgebraMismatchError(f"{a.algebra.label} vs {self.algebra.label}")
        return float(self.functional @ a.coords)


def atom_state(e) -> State:
    """A state taking the value 1 on the atom ``e`` (vector state of its range)."""
    e_el = getattr(e, "element", e)
    return State(e_el.algebra, e_el.algebra.atom_state(e_el.coords))


# ---------------------------------------------------------------------------
# sampling


def random_element(algebra: Algebra, rng: np.random.Generator) -> Element:
    return Element(algebra, algebra.random_element(rng))


def random_square(algebra: Algebra, rng: np.random.Generator) -> Element:
    """A random cone element ``b o b``."""
    b = random_element(algebra, rng)
    return jordan_product(b, b)


def random_projection_element(algebra: Algebra, rng: np.random.Generator, rank: int | None = None) -> Element:
    return Element(algebra, algebra.random_projection(rng, rank))


def random_atom_element(algebra: Algebra, rng: np.random.Generator) -> Element:
    return Element(algebra, algebra.random_projection(rng, 1))


def quadratic_map(p: Element, a: Element) -> Element:
    """``U_p(a) = 2 p o (p o a) - (p o p) o a``; for projections this is ``p a p``."""
    pa = jordan_product(p, a)
    return 2.0 * jordan_product(p, pa) - jordan_product(jordan_product(p, p), a)
