"""Spin-factor product on a capacity-2 order unit space from an invariant inner product.

Starting from an automorphism-invariant form ``<.|.>_o`` normalized on atoms,
the value ``s_o = <e|e'>_o`` on orthogonal atom pairs is constant. The form

    <a|b>_1 = (<a|b>_o - s_o/(1+s_o)^2 <I|a>_o <I|b>_o) / (1 - s_o)

makes atoms unit vectors with ``<e|e'>_1 = 0``. Writing ``A = R I + V`` with
``V`` the ``<.|.>_1``-orthocomplement of the unit, the product

    (v + s I) o (w + t I) = t v + s w + (w_V <v|w>_1 + s t) I

with ``w_V = 1/2`` turns every atom ``e = (I + (e - e'))/2`` into an idempotent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import orthogonal_procrustes

from ._config import InconclusiveError, PreconditionError, Tolerances, resolve
from .algebra import Algebra, Element, parse_algebra, random_element, spectral_decompose
from .numeric import gram_schmidt
from .report import FAIL, INCONCLUSIVE, PASS, CheckReport
from .symmetry import (
    InnerProductForm,
    invariant_inner_product,
    natural_form,
    random_base_form,
)

V_PRODUCT_WEIGHT = 0.5
"""Coefficient of ``<v|w>_1`` in the unit component of ``v o w``."""

S_O_MARGIN = 1e-6


# ---------------------------------------------------------------------------
# product tables


@dataclass(frozen=True, eq=False)
class ProductTable:
    """Bilinear product ``(x o y)_k = sum_ij x_i y_j C[i, j, k]`` with a designated unit."""

    constants: np.ndarray
    unit: np.ndarray

    def __post_init__(self):
        C = np.array(self.constants, dtype=float)
        u = np.array(self.unit, dtype=float)
        d = u.shape[0]
        if C.shape != (d, d, d):
            raise ValueError(f"structure constants must have shape {(d, d, d)}, got {C.shape}")
        C.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "constants", C)
        object.__setattr__(self, "unit", u)

    @property
    def dim(self) -> int:
        return self.unit.shape[0]

    def product(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.constants)

    def left(self, x) -> np.ndarray:
        """Matrix of ``y -> x o y``."""
        return np.einsum("i,ijk->kj", x, self.constants)

    @classmethod
    def from_algebra(cls, algebra: Algebra) -> "ProductTable":
        """Structure constants of the native Jordan product in the algebra's coordinates."""
        d = algebra.dim
        E = np.eye(d)
        C = np.array([[algebra.product(E[i], E[j]) for j in range(d)] for i in range(d)])
        return cls(C, algebra.unit_coords())

    def perturbed(self, index: tuple[int, int, int], delta: float) -> "ProductTable":
        C = np.array(self.constants)
        C[index] += delta
        return ProductTable(C, self.unit)

    def to_json(self) -> dict:
        return {"constants": self.constants.tolist(), "unit": self.unit.tolist()}

    @classmethod
    def from_json(cls, data) -> "ProductTable":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(np.asarray(data["constants"], dtype=float), np.asarray(data["unit"], dtype=float))


def spin_table(n: int, weight: float = V_PRODUCT_WEIGHT) -> ProductTable:
    """Table of ``R I + V`` in the basis ``(I, v_1, ..., v_n)`` with orthonormal ``v_i``."""
    d = n + 1
    C = np.zeros((d, d, d))
    C[0, 0, 0] = 1.0
    for i in range(1, d):
        C[0, i, i] = C[i, 0, i] = 1.0
        C[i, i, 0] = weight
    u = np.zeros(d)
    u[0] = 1.0
    return ProductTable(C, u)


def verify_jordan(table: ProductTable, trials: int = 200, seed: int = 0, tol: float = 1e-7) -> CheckReport:
    """Commutativity, unit law, the Jordan identity and positivity of squares on random elements.

    Positivity means ``x^2 != 0`` and ``y -> x^2 o y`` has no eigenvalue with
    real part below ``-tol``.
    """
    name = "jordan"
    if trials <= 0:
        return CheckReport(name, INCONCLUSIVE, 0, details={"reason": "trial budget is zero"})
    worst = 0.0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        x = rng.standard_normal(table.dim)
        y = rng.standard_normal(table.dim)
        x /= np.linalg.norm(x)
        y /= np.linalg.norm(y)
        xx = table.product(x, x)
        errs = {
            "commutativity": float(np.max(np.abs(table.product(x, y) - table.product(y, x)))),
            "unit": float(np.max(np.abs(table.product(table.unit, x) - x))),
            "jordan identity": float(
                np.max(np.abs(table.product(table.product(xx, y), x) - table.product(xx, table.product(y, x))))
            ),
            "square positivity": max(0.0, -float(np.min(np.linalg.eigvals(table.left(xx)).real))),
        }
        if np.linalg.norm(xx) <= tol:
            errs["square positivity"] = max(errs["square positivity"], 1.0)
        worst = max(worst, *errs.values())
        for axiom, err in errs.items():
            if err > tol:
                witness = {"seed": seed, "trial": i, "axiom": axiom, "error": err, "x": x.tolist(), "y": y.tolist()}
                return CheckReport(name, FAIL, i + 1, worst, witness)
    return CheckReport(name, PASS, trials, worst)


# ---------------------------------------------------------------------------
# construction steps


def _require_capacity_two(algebra: Algebra) -> None:
    if algebra.capacity != 2:
        raise PreconditionError(f"the spin construction needs capacity 2, {algebra.label} has {algebra.capacity}")


def normalize_form(form: InnerProductForm) -> InnerProductForm:
    """Rescale so that the reference atom has norm 1."""
    e = form.algebra.reference_atom()
    c = float(e @ form.gram @ e)
    return InnerProductForm(form.algebra, form.gram / c, residual=form.residual, n_samples=form.n_samples)


def sample_atom_pairs(algebra: Algebra, n_pairs: int, seed: int = 0, tol: Tolerances | None = None):
    """Orthogonal atom pairs ``(e, e')`` from spectral decompositions of random elements."""
    _require_capacity_two(algebra)
    tol = resolve(tol)
    rng = np.random.default_rng([seed, 2])
    pairs = []
    while len(pairs) < n_pairs:
        sd = spectral_decompose(random_element(algebra, rng), tol)
        atoms = [e for _, e in sd.expanded()]
        if len(sd.eigenvalues) == 2:
            pairs.append((atoms[0], atoms[1]))
    return pairs


@dataclass(frozen=True)
class SoEstimate:
    value: float
    spread: float
    n_pairs: int


def estimate_s_o(algebra: Algebra, product_o: InnerProductForm, n_pairs: int = 64, seed: int = 0) -> SoEstimate:
    """Mean and spread of ``<e|e'>_o`` over sampled orthogonal atom pairs."""
    form = normalize_form(product_o)
    vals = np.array([form(e, f) for e, f in sample_atom_pairs(algebra, n_pairs, seed)])
    return SoEstimate(float(vals.mean()), float(vals.max() - vals.min()), n_pairs)


def compute_s_o(algebra: Algebra, product_o: InnerProductForm, n_pairs: int = 64, seed: int = 0) -> float:
    """The constant ``s_o = <e|e'>_o`` for orthogonal atoms, after atom normalization.

    Raises
    ------
    PreconditionError
        If the capacity is not 2.
    InconclusiveError
        If the spread across pairs exceeds 10 times the invariance residual of
        ``product_o``, or ``|s_o| >= 1 - 1e-6``.
    """
    est = estimate_s_o(algebra, product_o, n_pairs, seed)
    allowed = max(10.0 * (product_o.residual or 0.0), 1e-9)
    if est.spread > allowed:
        raise InconclusiveError(
            f"<e|e'>_o varies by {est.spread:.3e} across atom pairs (allowed {allowed:.3e}); "
            "the form is not invariant enough"
        )
    if abs(est.value) >= 1.0 - S_O_MARGIN:
        raise InconclusiveError(f"|s_o| = {abs(est.value):.9f} violates |s_o| < 1")
    return est.value


def build_product_1(algebra: Algebra, product_o: InnerProductForm, s_o: float) -> InnerProductForm:
    """The form ``<.|.>_1`` in which atoms are unit vectors and orthogonal atoms are orthogonal."""
    if abs(s_o) >= 1.0:
        raise PreconditionError(f"|s_o| must be below 1, got {s_o}")
    form = normalize_form(product_o)
    gu = form.gram @ algebra.unit_coords()
    G1 = (form.gram - s_o / (1.0 + s_o) ** 2 * np.outer(gu, gu)) / (1.0 - s_o)
    return InnerProductForm(algebra, G1, residual=product_o.residual, n_samples=product_o.n_samples)


def split_unit_complement(algebra: Algebra, product_1: InnerProductForm) -> np.ndarray:
    """Columns forming a ``<.|.>_1``-orthonormal basis of the orthocomplement of the unit."""
    L = np.linalg.cholesky(product_1.gram)
    yu = L.T @ algebra.unit_coords()
    Q = gram_schmidt(np.column_stack([yu, np.eye(algebra.dim)]))
    return np.linalg.solve(L.T, Q[:, 1:])


@dataclass(frozen=True, eq=False)
class SpinConstruction:
    """The constructed spin factor ``R I + V`` on the coordinates of a capacity-2 algebra."""

    algebra: Algebra
    product_o: InnerProductForm
    product_1: InnerProductForm
    s_o: float
    V: np.ndarray
    table: ProductTable = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "table", spin_table(self.V.shape[1]))

    @property
    def basis(self) -> np.ndarray:
        """Columns ``I, v_1, ..., v_n`` in algebra coordinates."""
        return np.column_stack([self.algebra.unit_coords(), self.V])

    def to_spin(self, x) -> np.ndarray:
        x = getattr(x, "coords", x)
        return np.linalg.solve(self.basis, x)

    def from_spin(self, c) -> np.ndarray:
        return self.basis @ c

    def product(self, a, b) -> Element:
        """Constructed product of two algebra elements."""
        c = self.table.product(self.to_spin(a), self.to_spin(b))
        return Element(self.algebra, self.from_spin(c))

    def atom_from(self, e) -> Element:
        """The constructed atom ``I/2 + v`` whose V part points along that of ``e``."""
        c = self.to_spin(e)
        v = c[1:]
        # (I/2 + v)^2 = I/2 + v needs w_V |v|^2 = 1/4
        v = v / (2.0 * np.linalg.norm(v) * np.sqrt(V_PRODUCT_WEIGHT))
        return Element(self.algebra, self.from_spin(np.concatenate([[0.5], v])))

    def table_in_algebra_coordinates(self) -> ProductTable:
        B = self.basis
        Binv = np.linalg.inv(B)
        C = np.einsum("ai,bj,abc,kc->ijk", Binv, Binv, self.table.constants, B)
        return ProductTable(C, self.algebra.unit_coords())

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra.spec(),
            "s_o": self.s_o,
            "product_o": self.product_o.to_json(),
            "product_1": self.product_1.to_json(),
            "V": self.V.tolist(),
            "table": self.table.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "SpinConstruction":
        if isinstance(data, str):
            data = json.loads(data)
        alg = parse_algebra(data["algebra"])

        def form(d):
            return InnerProductForm(alg, np.asarray(d["gram"], dtype=float), residual=d.get("residual"))

        return cls(alg, form(data["product_o"]), form(data["product_1"]), float(data["s_o"]), np.asarray(data["V"], dtype=float))


def build_spin_product(algebra: Algebra, product_o: InnerProductForm, s_o: float, product_1: InnerProductForm | None = None) -> SpinConstruction:
    """Assemble the spin-factor product from ``s_o`` and ``<.|.>_1``."""
    _require_capacity_two(algebra)
    if product_1 is None:
        product_1 = build_product_1(algebra, product_o, s_o)
    V = split_unit_complement(algebra, product_1)
    return SpinConstruction(algebra, product_o, product_1, s_o, V)


# ---------------------------------------------------------------------------
# comparison with the native product


@dataclass(frozen=True)
class Alignment:
    """Orthogonal Procrustes fit of the constructed V basis to the native one."""

    rotation: np.ndarray
    basis_error: float
    product_deviation: float

    def to_json(self) -> dict:
        return {"rotation": self.rotation.tolist(), "basis_error": self.basis_error, "product_deviation": self.product_deviation}


def align_to_native(construction: SpinConstruction) -> Alignment:
    """Compare the constructed product with the algebra's own Jordan product.

    The constructed V basis is rotated onto the native one (orthonormal for the
    atom-normalized natural form) by orthogonal Procrustes, which removes the
    rotational freedom in the choice of V. ``basis_error`` is the remaining
    mismatch, and ``product_deviation`` is the largest difference of structure
    constants in the algebra's own coordinates.
    """
    alg = construction.algebra
    native_V = split_unit_complement(alg, normalize_form(natural_form(alg)))
    R, _ = orthogonal_procrustes(construction.V, native_V)
    basis_error = float(np.max(np.abs(construction.V @ R - native_V)))
    built = construction.table_in_algebra_coordinates().constants
    native = ProductTable.from_algebra(alg).constants
    return Alignment(R, basis_error, float(np.max(np.abs(built - native))))


@dataclass
class Reconstruction:
    construction: SpinConstruction
    jordan: CheckReport
    alignment: Alignment
    atom_idempotency: float
    source_atom_idempotency: float

    @property
    def residual(self) -> float:
        return float(self.construction.product_o.residual or 0.0)

    @property
    def verdict(self) -> str:
        if self.jordan.verdict != PASS:
            return self.jordan.verdict
        ok_align = self.alignment.product_deviation <= max(10.0 * self.residual, 1e-9)
        return PASS if ok_align and self.atom_idempotency <= 1e-7 else FAIL

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "s_o": self.construction.s_o,
            "invariance_residual": self.residual,
            "jordan": self.jordan.to_json(),
            "alignment": {k: v for k, v in self.alignment.to_json().items() if k != "rotation"},
            "atom_idempotency": self.atom_idempotency,
            "source_atom_idempotency": self.source_atom_idempotency,
            "table": self.construction.table.to_json(),
        }


def reconstruct(
    algebra: Algebra,
    base: InnerProductForm | str = "random",
    n_samples: int = 10_000,
    seed: int = 0,
    n_pairs: int = 64,
    trials: int = 200,
) -> Reconstruction:
    """Full pipeline: invariant form, ``s_o``, ``<.|.>_1``, spin product and its checks.

    ``base`` may be a form, ``"random"`` (drawn from ``default_rng([seed, 7])``)
    or ``"natural"``.
    """
    _require_capacity_two(algebra)
    if isinstance(base, str):
        if base == "random":
            base = random_base_form(algebra, np.random.default_rng([seed, 7]))
        elif base == "natural":
            base = natural_form(algebra)
        else:
            raise ValueError(f"base must be 'random', 'natural' or a form, got {base!r}")
    product_o = invariant_inner_product(algebra, base, n_samples, seed)
    s_o = compute_s_o(algebra, product_o, n_pairs, seed)
    cons = build_spin_product(algebra, product_o, s_o)
    jordan = verify_jordan(cons.table, trials, seed)
    pairs = sample_atom_pairs(algebra, 16, seed + 1)
    built = [cons.atom_from(e) for e, _ in pairs]
    idem = max(float(np.max(np.abs(cons.product(a, a).coords - a.coords))) for a in built)
    src = max(float(np.max(np.abs(cons.product(e, e).coords - e.coords))) for e, _ in pairs)
    return Reconstruction(cons, jordan, align_to_native(cons), idem, src)
