"""Automorphisms: Haar sampling, atom transport, one-parameter paths and invariant inner products."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._config import InconclusiveError, PreconditionError, Tolerances, TransportError, resolve
from .algebra import (
    BLOCK_EXCHANGE,
    Algebra,
    DirectSum,
    Element,
    MatrixAlgebra,
    SpinFactor,
    eigenvalues,
    in_cone,
    random_square,
    unit,
)
from .report import FAIL, INCONCLUSIVE, PASS, CheckReport


@dataclass(frozen=True, eq=False)
class Automorphism:
    """Linear map on coordinates fixing the unit and preserving the cone both ways."""

    algebra: Algebra
    matrix: np.ndarray
    generator: object | None = None

    @cached_property
    def inverse_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    def __call__(self, a) -> Element:
        a = getattr(a, "element", a)
        return Element(self.algebra, self.matrix @ a.coords)

    def inverse(self) -> "Automorphism":
        return Automorphism(self.algebra, self.inverse_matrix)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self o other``."""
        return Automorphism(self.algebra, self.matrix @ other.matrix)

    def to_json(self) -> dict:
        return {"algebra": self.algebra.spec(), "matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class InnerProductForm:
    """Inner product given by a symmetric positive definite Gram matrix on coordinates."""

    algebra: Algebra
    gram: np.ndarray
    residual: float | None = None
    n_samples: int = 0

    def __post_init__(self):
        G = np.asarray(self.gram, dtype=float)
        if G.shape != (self.algebra.dim, self.algebra.dim):
            raise ValueError(f"Gram matrix must be {self.algebra.dim}x{self.algebra.dim}, got {G.shape}")
        if np.max(np.abs(G - G.T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(G))):
            raise ValueError("Gram matrix is not symmetric")
        G = 0.5 * (G + G.T)
        if np.linalg.eigvalsh(G)[0] <= 0.0:
            raise ValueError("Gram matrix is not positive definite")
        G.setflags(write=False)
        object.__setattr__(self, "gram", G)

    def __call__(self, a, b) -> float:
        a = getattr(a, "element", a)
        b = getattr(b, "element", b)
        return float(a.coords @ self.gram @ b.coords)

    def pullback(self, T: Automorphism) -> "InnerProductForm":
        """``(a, b) -> <T a | T b>``."""
        return InnerProductForm(self.algebra, T.matrix.T @ self.gram @ T.matrix)

    def invariance_residual(self, automorphisms) -> float:
        return max(
            (float(np.max(np.abs(self.gram - T.matrix.T @ self.gram @ T.matrix))) for T in automorphisms),
            default=0.0,
        )

    def to_json(self) -> dict:
        return {"algebra": self.algebra.spec(), "gram": self.gram.tolist(), "residual": self.residual}


def natural_form(algebra: Algebra) -> InnerProductForm:
    """The trace form (matrix algebras) or the atom-normalized form (spin factors), blockwise on sums."""
    return InnerProductForm(algebra, algebra.natural_gram())


def random_base_form(algebra: Algebra, rng: np.random.Generator, spread: float = 0.5) -> InnerProductForm:
    """Random positive definite form ``I + spread * W W^T / dim``."""
    W = rng.standard_normal((algebra.dim, algebra.dim))
    return InnerProductForm(algebra, np.eye(algebra.dim) + spread * (W @ W.T) / algebra.dim)


def sample_automorphism(algebra: Algebra, seed) -> Automorphism:
    """Haar-random conjugation (matrix algebras), rotation of V (spin factors), blockwise on sums."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return Automorphism(algebra, algebra.haar_automorphism(rng))


class AutomorphismPath:
    """``t -> T_t`` with ``T_0 = id`` and ``T_1(e1) = e2``, a one-parameter group."""

    def __init__(self, algebra: Algebra, e1: Element, e2: Element, tol: Tolerances | None = None):
        self.algebra = algebra
        self.e1, self.e2 = e1, e2
        self._path = algebra.transport_path(e1.coords, e2.coords, resolve(tol))

    @property
    def angle(self) -> float:
        return float(self._path.theta)

    def at(self, t: float) -> Automorphism:
        return Automorphism(self.algebra, self._path.matrix(float(t)), generator=self._path)

    @cached_property
    def lipschitz(self) -> float:
        """Estimate of ``sup_t ||dT_t/dt||_2`` from central differences on a grid."""
        h = 1e-6
        best = 0.0
        for t in np.linspace(0.0, 1.0, 33):
            d = (self._path.matrix(t + h) - self._path.matrix(t - h)) / (2 * h)
            best = max(best, float(np.linalg.norm(d, 2)))
        return best * 1.01


def _as_element(e) -> Element:
    return getattr(e, "element", e)


def automorphism_path(algebra: Algebra, e1, e2, tol: Tolerances | None = None) -> AutomorphismPath:
    return AutomorphismPath(algebra, _as_element(e1), _as_element(e2), tol)


def transport_automorphism(algebra: Algebra, e1, e2, tol: Tolerances | None = None) -> Automorphism:
    """Automorphism mapping atom ``e1`` onto atom ``e2``.

    Atoms in isomorphic direct-sum blocks are related through a block swap,
    which is not connected to the identity.

    Raises
    ------
    TransportError
        When the atoms sit in non-isomorphic blocks, or the constructed map misses.
    """
    e1, e2 = _as_element(e1), _as_element(e2)
    try:
        T = automorphism_path(algebra, e1, e2, tol).at(1.0)
    except TransportError as exc:
        if exc.witness.get("reason") != BLOCK_EXCHANGE:
            raise
        S = Automorphism(algebra, algebra.block_swap(exc.witness["block_1"]["index"], exc.witness["block_2"]["index"]))
        T = automorphism_path(algebra, S(e1), e2, tol).at(1.0).compose(S)
    miss = float(np.max(np.abs(T(e1).coords - e2.coords)))
    if miss > 1e-8:
        raise TransportError(f"transport missed the target atom by {miss:.3e}", witness={"miss": miss})
    return T


def continuous_path(algebra: Algebra, e1, e2, t: float, tol: Tolerances | None = None) -> Automorphism:
    """``T_t`` on the minimal-angle path from the identity to a transport of ``e1`` onto ``e2``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return automorphism_path(algebra, e1, e2, tol).at(t)


def ring_involution(algebra: Algebra) -> Automorphism:
    """Transpose on ``H_m(R)``/``H_m(C)``, reflection of the first axis of V on spin factors.

    These are automorphisms outside the conjugation subgroup used for sampling.
    """
    if isinstance(algebra, MatrixAlgebra):
        if algebra.ring == "H":
            raise PreconditionError("transpose is not a Jordan automorphism of H_m(H)")
        d = np.ones(algebra.dim)
        if algebra.ring == "C":
            d[algebra.m + 1 :: 2] = -1.0
        return Automorphism(algebra, np.diag(d))
    if isinstance(algebra, SpinFactor):
        d = np.ones(algebra.dim)
        d[1] = -1.0
        return Automorphism(algebra, np.diag(d))
    if isinstance(algebra, DirectSum):
        M = np.zeros((algebra.dim, algebra.dim))
        for i, part in enumerate(algebra.parts):
            sl = algebra.block_slice(i)
            M[sl, sl] = ring_involution(part).matrix
        return Automorphism(algebra, M)
    raise TypeError(f"unsupported algebra {algebra!r}")


def verify_automorphism(algebra: Algebra, T: Automorphism, trials: int = 100, seed: int = 0) -> CheckReport:
    """Unit fixing, invertibility and cone preservation of ``T`` and ``T^-1`` on random squares."""
    name = "automorphism"
    I = unit(algebra)
    unit_err = float(np.max(np.abs(T(I).coords - I.coords)))
    witness_base = {"matrix": T.matrix.tolist(), "seed": seed}
    if unit_err > 1e-10:
        return CheckReport(name, FAIL, 0, unit_err, {**witness_base, "reason": "unit not fixed", "unit_error": unit_err})
    cond = np.linalg.cond(T.matrix)
    if not np.isfinite(cond) or cond > 1e12:
        return CheckReport(name, FAIL, 0, float(cond), {**witness_base, "reason": "not invertible"})
    inv_res = float(np.max(np.abs(T.matrix @ T.inverse_matrix - np.eye(algebra.dim))))
    if trials <= 0:
        return CheckReport(name, INCONCLUSIVE, 0, inv_res, details={"reason": "no trials"})
    worst = inv_res
    Tinv = T.inverse()
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        a = random_square(algebra, rng)
        for label, S in (("forward", T), ("inverse", Tinv)):
            b = S(a)
            if not in_cone(b):
                return CheckReport(
                    name,
                    FAIL,
                    i + 1,
                    float(-eigenvalues(b)[0]),
                    {**witness_base, "trial": i, "direction": label, "input": a.to_json(), "reason": "cone not preserved"},
                )
    return CheckReport(name, PASS, trials, worst, details={"inverse_residual": inv_res})


ESTIMATORS = ("rao-blackwell", "plain")


def invariant_inner_product(
    algebra: Algebra,
    base: InnerProductForm,
    n_samples: int = 10_000,
    seed: int = 0,
    n_test: int = 16,
    max_residual: float | None = 5e-2,
    estimator: str = "rao-blackwell",
) -> InnerProductForm:
    """Monte-Carlo Haar average of ``<T a | T b>`` over sampled automorphisms.

    Parameters
    ----------
    algebra : Algebra
    base : InnerProductForm
        Positive definite starting form.
    n_samples : int
        Number of Haar automorphisms drawn.
    seed : int
        Sample ``i`` uses ``default_rng([seed, 0, i])``, test map ``j`` uses
        ``default_rng([seed, 1, j])``.
    n_test : int
        Fresh automorphisms used to measure the invariance residual
        ``max_T max|G - T^T G T|``.
    max_residual : float or None
        Threshold above which the result is rejected.
    estimator : {"rao-blackwell", "plain"}
        ``"plain"`` averages ``T^T G T``. ``"rao-blackwell"`` replaces each
        term by its exact average over a closed subgroup ``K`` (monomial
        conjugations, or sign flips on spin factors). The Haar measure is
        invariant under ``K``, so the estimator stays unbiased with lower
        variance.

    Returns
    -------
    InnerProductForm
        Scaled so that the reference atom has norm 1, with the residual attached.

    Raises
    ------
    InconclusiveError
        If the residual exceeds ``max_residual``.
    """
    if base.algebra != algebra:
        raise ValueError("base form belongs to another algebra")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
    G = base.gram
    total = np.zeros_like(G)
    for i in range(n_samples):
        T = algebra.haar_automorphism(np.random.default_rng([seed, 0, i]))
        total += T.T @ G @ T
    avg = total / n_samples
    if estimator == "rao-blackwell":
        # the subgroup average is linear, so applying it once to the sum is exact
        avg = algebra.subgroup_average(avg)
    avg = 0.5 * (avg + avg.T)
    e = algebra.reference_atom()
    avg = avg / float(e @ avg @ e)
    tests = [Automorphism(algebra, algebra.haar_automorphism(np.random.default_rng([seed, 1, j]))) for j in range(n_test)]
    form = InnerProductForm(algebra, avg, n_samples=n_samples)
    residual = form.invariance_residual(tests)
    form = InnerProductForm(algebra, form.gram, residual=residual, n_samples=n_samples)
    if max_residual is not None and residual > max_residual:
        raise InconclusiveError(
            f"invariance residual {residual:.3e} exceeds {max_residual:.1e}; raise n_samples (now {n_samples})"
        )
    return form
