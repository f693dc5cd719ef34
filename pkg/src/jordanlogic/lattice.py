"""The projection lattice ``ext[0, I]`` of a spectral algebra.

Meets are computed from the spectral decomposition of ``p + q``: the meet is
the sum of the atoms belonging to the eigenvalue 2. Joins come from the meet
by orthocomplementation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._config import CenterVerificationError, LatticeError, NotAProjectionError, Tolerances, resolve
from .algebra import (
    Algebra,
    DirectSum,
    Element,
    Face,
    in_cone,
    quadratic_map,
    random_projection_element,
    restrict,
    spectral_decompose,
    unit,
    zero,
)


@dataclass(frozen=True, eq=False)
class Projection:
    """An element of ``ext[0, I]`` together with its rank."""

    element: Element
    rank: int

    @property
    def algebra(self) -> Algebra:
        return self.element.algebra

    @property
    def coords(self) -> np.ndarray:
        return self.element.coords

    def close_to(self, other: "Projection", tol: float = 1e-8) -> bool:
        return self.rank == other.rank and self.element.close_to(other.element, tol)

    def __repr__(self) -> str:
        return f"Projection(rank={self.rank}, {self.element!r})"

    def to_json(self) -> dict:
        return {**self.element.to_json(), "rank": self.rank}


def certify_projection(a, tol: Tolerances | None = None) -> Projection:
    """Accept ``a`` iff each spectral value is within ``tol.projection`` of 0 or 1.

    Raises
    ------
    NotAProjectionError
        Carrying the first offending spectral value.
    """
    tol = resolve(tol)
    a = getattr(a, "element", a)
    sd = spectral_decompose(a, tol)
    rank = 0
    for s, group in zip(sd.eigenvalues, sd.atoms):
        if abs(s - 1.0) <= tol.projection:
            rank += len(group)
        elif abs(s) > tol.projection:
            raise NotAProjectionError(s)
    return Projection(a, rank)


def projection_from_atoms(algebra: Algebra, atoms) -> Projection:
    coords = np.zeros(algebra.dim)
    for e in atoms:
        coords += getattr(e, "element", e).coords
    return Projection(Element(algebra, coords), len(atoms))


def zero_projection(algebra: Algebra) -> Projection:
    return Projection(zero(algebra), 0)


def unit_projection(algebra: Algebra) -> Projection:
    return Projection(unit(algebra), algebra.capacity)


def leq(p: Projection, q: Projection, tol: Tolerances | None = None) -> bool:
    """``p <= q`` in the order of the algebra."""
    return in_cone(q.element - p.element, tolerances=tol)


def complement(p: Projection) -> Projection:
    """Orthocomplement ``I - p``."""
    return Projection(unit(p.algebra) - p.element, p.algebra.capacity - p.rank)


def orthogonal(p: Projection, q: Projection, tol: Tolerances | None = None) -> bool:
    """``p + q <= I``."""
    return in_cone(unit(p.algebra) - p.element - q.element, tolerances=tol)


def meet(p: Projection, q: Projection, tol: Tolerances | None = None, check: bool = True) -> Projection:
    """Greatest lower bound: the eigenvalue-2 part of ``p + q``.

    With ``check`` the result must lie below both arguments. Spectral values
    within ``meet_two`` of 2 that come from nearly coincident (not shared)
    directions fail that test; they are dropped, farthest from 2 first.
    """
    tol = resolve(tol)
    p.element._check(q.element)
    alg = p.algebra
    sd = spectral_decompose(p.element + q.element, tol)
    near = [
        (abs(s - 2.0), P, len(group))
        for s, P, group in zip(sd.eigenvalues, sd.projections, sd.atoms)
        if abs(s - 2.0) <= tol.meet_two
    ]
    near.sort(key=lambda t: t[0])
    for keep in range(len(near), -1, -1):
        coords = np.zeros(alg.dim)
        for _, P, _ in near[:keep]:
            coords += P.coords
        x = Projection(Element(alg, coords), sum(r for _, _, r in near[:keep]))
        if not check or x.rank == 0 or (leq(x, p, tol) and leq(x, q, tol)):
            return x
    raise LatticeError("no meet candidate lies below both arguments")


def join(p: Projection, q: Projection, tol: Tolerances | None = None) -> Projection:
    """Least upper bound ``(p' ^ q')'``."""
    return complement(meet(complement(p), complement(q), tol))


def peel_atoms(q: Projection, tol: Tolerances | None = None) -> list[Element]:
    """Orthogonal atoms summing to ``q`` (the eigenvalue-1 atoms of ``q``)."""
    tol = resolve(tol)
    sd = spectral_decompose(q.element, tol)
    return [e for s, e in sd.expanded() if abs(s - 1.0) <= tol.projection]


def dim(p: Projection, tol: Tolerances | None = None) -> int:
    """Number of orthogonal atoms whose supremum is ``p``."""
    return len(peel_atoms(p, tol))


def compatible(p: Projection, q: Projection, tol: Tolerances | None = None) -> bool:
    """Whether ``p = q1 + q2`` and ``q = q2 + q3`` with ``q1, q2, q3`` orthogonal projections."""
    tol = resolve(tol)
    q2 = meet(p, q, tol)
    try:
        q1 = certify_projection(p.element - q2.element, tol)
        q3 = certify_projection(q.element - q2.element, tol)
    except NotAProjectionError:
        return False
    return orthogonal(q1, q2, tol) and orthogonal(q2, q3, tol) and orthogonal(q1, q3, tol)


def info_capacity(algebra: Algebra, tol: Tolerances | None = None) -> int:
    """Maximum number of pairwise orthogonal non-zero projections, by peeling the unit."""
    n = len(peel_atoms(unit_projection(algebra), tol))
    if n != algebra.capacity:
        raise LatticeError(f"peeling found {n} atoms but {algebra.label} declares capacity {algebra.capacity}")
    return n


def sample_projection(algebra: Algebra, rng: np.random.Generator, rank: int | None = None) -> Projection:
    e = random_projection_element(algebra, rng, rank)
    return certify_projection(e)


def sample_atom(algebra: Algebra, rng: np.random.Generator) -> Projection:
    return sample_projection(algebra, rng, 1)


def sample_below(p: Projection, rng: np.random.Generator, rank: int | None = None) -> Projection:
    """Random projection ``q <= p``, drawn in the face algebra of ``p``."""
    if p.rank == 0:
        return zero_projection(p.algebra)
    face = restrict(p.algebra, p)
    q = random_projection_element(face.algebra, rng, rank)
    return certify_projection(face.push(q))


def sample_pair(algebra: Algebra, rng: np.random.Generator) -> tuple[Projection, Projection]:
    """Random projection pair; half the time the two share a random common part."""
    if rng.random() < 0.5:
        return sample_projection(algebra, rng), sample_projection(algebra, rng)
    s = sample_projection(algebra, rng)
    rest = complement(s)
    if rest.rank == 0:
        return s, s
    a = sample_below(rest, rng)
    b = sample_below(rest, rng)
    return (
        Projection(s.element + a.element, s.rank + a.rank),
        Projection(s.element + b.element, s.rank + b.rank),
    )


@dataclass(frozen=True, eq=False)
class CenterDecomposition:
    """Minimal central projections with the block algebras they cut out."""

    algebra: Algebra
    projections: tuple[Projection, ...]
    blocks: tuple[Face, ...]
    samples_checked: int

    @property
    def irreducible(self) -> bool:
        return len(self.projections) == 1

    def split(self, a: Element) -> list[Element]:
        """Components of ``a`` in the blocks ``A_{c_i}`` (block coordinates)."""
        return [f.pull(quadratic_map(c.element, a)) for c, f in zip(self.projections, self.blocks)]

    def join_blocks(self, parts: list[Element]) -> Element:
        out = np.zeros(self.algebra.dim)
        for f, b in zip(self.blocks, parts):
            out += f.push(b).coords
        return Element(self.algebra, out)


def center(
    algebra: Algebra,
    sample_budget: int = 64,
    seed: int = 0,
    tol: Tolerances | None = None,
) -> CenterDecomposition:
    """Minimal central projections, taken from the block structure and checked by sampling.

    Each candidate must be compatible with ``sample_budget`` random projections.

    Raises
    ------
    CenterVerificationError
        When a candidate fails; the witness projection is attached.
    """
    tol = resolve(tol)
    if isinstance(algebra, DirectSum):
        candidates = [
            Projection(Element(algebra, algebra.lift(i, part.unit_coords())), part.capacity)
            for i, part in enumerate(algebra.parts)
        ]
    else:
        candidates = [unit_projection(algebra)]
    for i in range(sample_budget):
        rng = np.random.default_rng([seed, i])
        q = sample_projection(algebra, rng)
        for c in candidates:
            if not compatible(c, q, tol):
                raise CenterVerificationError(
                    f"candidate central projection is not compatible with a sampled projection (trial {i})",
                    witness={"candidate": c.to_json(), "projection": q.to_json(), "seed": seed, "trial": i},
                )
    blocks = tuple(restrict(algebra, c, tol) for c in candidates)
    return CenterDecomposition(algebra, tuple(candidates), blocks, sample_budget)
