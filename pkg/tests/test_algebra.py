import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jordanlogic._config import AlgebraMismatchError, PreconditionError
from jordanlogic.algebra import (
    DirectSum,
    Element,
    MatrixAlgebra,
    SpinFactor,
    atom_state,
    direct_sum,
    element,
    from_matrix,
    in_cone,
    jordan_product,
    order_norm,
    parse_algebra,
    quadratic_map,
    random_element,
    random_square,
    restrict,
    spectral_decompose,
    to_matrix,
    unit,
    zero,
)
from jordanlogic.lattice import certify_projection, leq

from conftest import ALL, SIMPLE, ids


@pytest.mark.parametrize(
    "algebra,dim,cap",
    [
        (MatrixAlgebra("R", 3), 6, 3),
        (MatrixAlgebra("C", 3), 9, 3),
        (MatrixAlgebra("H", 3), 15, 3),
        (MatrixAlgebra("H", 5), 45, 5),
        (SpinFactor(7), 8, 2),
        (direct_sum([MatrixAlgebra("C", 2), MatrixAlgebra("R", 3)]), 10, 5),
    ],
)
def test_dimensions_and_capacity(algebra, dim, cap):
    assert algebra.dim == dim
    assert algebra.capacity == cap


def test_spin_factor_requires_two_directions():
    with pytest.raises(ValueError):
        SpinFactor(1)


def test_parse_round_trip():
    for a in ALL:
        assert parse_algebra(json.dumps(a.spec())) == a
    with pytest.raises(ValueError):
        parse_algebra('{"kind": "octonion"}')


def test_nested_sums_flatten():
    inner = direct_sum([MatrixAlgebra("R", 2), SpinFactor(3)])
    outer = direct_sum([inner, MatrixAlgebra("C", 2)])
    assert isinstance(outer, DirectSum) and len(outer.parts) == 3


def test_units():
    assert np.array_equal(to_matrix(unit(MatrixAlgebra("R", 2))), np.eye(2))
    assert unit(SpinFactor(3)).coords.tolist() == [1, 0, 0, 0]
    s = direct_sum([MatrixAlgebra("R", 2), SpinFactor(2)])
    assert unit(s).coords.tolist() == [1, 1, 0, 1, 0, 0]


@pytest.mark.parametrize("algebra", ALL, ids=ids(ALL))
def test_unit_has_single_eigenvalue_one(algebra):
    sd = spectral_decompose(unit(algebra))
    assert np.allclose(sd.eigenvalues, [1.0])
    assert sd.n_atoms == algebra.capacity


@pytest.mark.parametrize("algebra", ALL, ids=ids(ALL))
def test_unit_law_and_commutativity(algebra, rng):
    a, b = random_element(algebra, rng), random_element(algebra, rng)
    assert jordan_product(a, unit(algebra)).close_to(a, 1e-12)
    assert jordan_product(a, b).close_to(jordan_product(b, a), 1e-12)


@pytest.mark.parametrize("algebra", ALL, ids=ids(ALL))
def test_jordan_identity(algebra, rng):
    for _ in range(20):
        a, b = random_element(algebra, rng), random_element(algebra, rng)
        aa = jordan_product(a, a)
        lhs = jordan_product(aa, jordan_product(b, a))
        rhs = jordan_product(jordan_product(aa, b), a)
        scale = np.linalg.norm(a.coords) ** 3 * np.linalg.norm(b.coords)
        assert np.max(np.abs(lhs.coords - rhs.coords)) <= 1e-8 * max(scale, 1.0)


def test_spin2_atom_idempotent():
    S = SpinFactor(2)
    v = np.array([0.6, 0.8])
    e = element(S, np.concatenate([[0.5], 0.5 * v]))
    assert jordan_product(e, e).close_to(e, 1e-15)


def test_h2r_orthogonal_product():
    A = MatrixAlgebra("R", 2)
    a = from_matrix(A, [[0, 1], [1, 0]])
    b = from_matrix(A, [[1, 0], [0, -1]])
    assert np.allclose(jordan_product(a, b).coords, 0, atol=1e-15)


def test_complex_matrix_round_trip(rng):
    A = MatrixAlgebra("C", 3)
    X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    H = X + X.conj().T
    assert np.allclose(to_matrix(from_matrix(A, H)), H, atol=1e-14)
    a, b = from_matrix(A, H), from_matrix(A, np.diag([1.0, 2.0, 3.0]))
    ab = to_matrix(jordan_product(a, b))
    assert np.allclose(ab, (H @ np.diag([1, 2, 3]) + np.diag([1, 2, 3]) @ H) / 2, atol=1e-13)


def test_coordinates_are_trace_orthonormal(rng):
    A = MatrixAlgebra("C", 3)
    x, y = rng.standard_normal(A.dim), rng.standard_normal(A.dim)
    tr = np.trace(to_matrix(element(A, x)) @ to_matrix(element(A, y))).real
    assert tr == pytest.approx(x @ y, abs=1e-12)


def test_mismatched_algebras():
    with pytest.raises(AlgebraMismatchError):
        jordan_product(unit(MatrixAlgebra("R", 2)), unit(MatrixAlgebra("C", 2)))


def test_element_length_checked():
    with pytest.raises(ValueError):
        Element(MatrixAlgebra("R", 2), np.zeros(4))


def test_element_json_round_trip(rng):
    for a in ALL:
        x = random_element(a, rng)
        y = Element.from_json(json.dumps(x.to_json()))
        assert y.algebra == a and np.array_equal(y.coords, x.coords)
    with pytest.raises(ValueError):
        Element.from_json('{"coords": [1, 2]}')
    with pytest.raises(ValueError):
        Element.from_json('{"algebra": {"kind": "spin", "n": 2}, "coords": ["a", 1, 2]}')


# spectral decomposition


@pytest.mark.parametrize("algebra", ALL, ids=ids(ALL))
def test_spectral_invariants(algebra, rng):
    for _ in range(10):
        a = random_element(algebra, rng)
        sd = spectral_decompose(a)
        atoms = [e for _, e in sd.expanded()]
        assert len(atoms) == algebra.capacity
        assert np.max(np.abs(sd.reconstruct().coords - a.coords)) <= 1e-9 * max(1, order_norm(a))
        assert np.max(np.abs(sd.atom_sum().coords - unit(algebra).coords)) <= 1e-9
        for i, e in enumerate(atoms):
            assert certify_projection(e).rank == 1
            for f in atoms[i + 1 :]:
                assert in_cone(unit(algebra) - e - f)
                if not isinstance(algebra, SpinFactor):
                    assert np.max(np.abs(jordan_product(e, f).coords)) <= 1e-9


def test_spectral_identity_h3c():
    A = MatrixAlgebra("C", 3)
    sd = spectral_decompose(unit(A))
    assert len(sd.eigenvalues) == 1 and sd.eigenvalues[0] == pytest.approx(1.0)
    assert len(sd.atoms[0]) == 3


def test_spectral_spin3_closed_form():
    S = SpinFactor(3)
    v = np.array([0.0, 0.6, 0.8])
    a = element(S, np.concatenate([[2.0], v]))
    sd = spectral_decompose(a)
    assert np.allclose(sorted(sd.eigenvalues), [1.0, 3.0])
    by_value = {round(s): g[0] for s, g in zip(sd.eigenvalues, sd.atoms)}
    ep, em = by_value[3], by_value[1]
    assert ep.close_to(element(S, np.concatenate([[0.5], 0.5 * v])), 1e-12)
    assert em.close_to(element(S, np.concatenate([[0.5], -0.5 * v])), 1e-12)
    assert jordan_product(ep, ep).close_to(ep, 1e-12)
    assert np.allclose(jordan_product(ep, em).coords, 0, atol=1e-12)
    assert (3 * ep + 1 * em).close_to(a, 1e-12)


def test_spectral_h2r_hand_oracle():
    A = MatrixAlgebra("R", 2)
    sd = spectral_decompose(from_matrix(A, [[0, 1], [1, 0]]))
    assert np.allclose(sd.eigenvalues, [-1.0, 1.0])
    lo, hi = to_matrix(sd.atoms[0][0]), to_matrix(sd.atoms[1][0])
    assert np.allclose(hi, 0.5 * np.array([[1, 1], [1, 1]]), atol=1e-12)
    assert np.allclose(lo, 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-12)


def test_degenerate_spin_uses_first_axis():
    S = SpinFactor(3)
    sd = spectral_decompose(element(S, [2.5, 0, 0, 0]))
    assert list(sd.eigenvalues) == [2.5]
    e, f = sd.atoms[0]
    assert e.coords.tolist() == [0.5, 0.5, 0, 0] and f.coords.tolist() == [0.5, -0.5, 0, 0]


@pytest.mark.parametrize("ring", ["R", "C", "H"])
def test_degenerate_matrix_eigenspaces(ring, rng):
    A = MatrixAlgebra(ring, 4)
    U = A.haar_conjugator(rng)
    D = np.kron(np.diag([1.0, 1.0, 1.0, -2.0]), np.eye(A.k))
    a = element(A, A.unembed(U @ D @ U.T))
    sd = spectral_decompose(a)
    assert np.allclose(sd.eigenvalues, [-2.0, 1.0])
    assert [len(g) for g in sd.atoms] == [1, 3]
    assert sd.reconstruct().close_to(a, 1e-10)


def test_blockwise_spectral():
    s = direct_sum([MatrixAlgebra("R", 2), SpinFactor(2)])
    a = element(s, [3.0, -1.0, 0.0, 0.0, 1.0, 0.0])
    sd = spectral_decompose(a)
    # H_2(R) part diag(3, -1), spin part 0*I + e_1 with values -1, 1
    assert np.allclose(sd.eigenvalues, [-1.0, 1.0, 3.0])
    assert [len(g) for g in sd.atoms] == [2, 1, 1]


@pytest.mark.parametrize("s,t", [(2.0, -0.5), (0.3, 1.7)])
def test_spin_power_associativity(s, t):
    S = SpinFactor(4)
    sd = spectral_decompose(element(S, [0.1, 0.2, -0.4, 0.3, 0.5]))
    e, f = sd.atoms[0][0], sd.atoms[1][0]
    x = s * e + t * f
    p = x
    for n in range(2, 5):
        p = jordan_product(p, x)
        assert p.close_to(s**n * e + t**n * f, 1e-10)


# order


def test_order_norm_examples():
    A = MatrixAlgebra("R", 2)
    assert order_norm(unit(A)) == pytest.approx(1.0)
    assert order_norm(zero(A)) == 0.0
    assert order_norm(from_matrix(A, np.diag([2.0, -3.0]))) == pytest.approx(3.0)


@pytest.mark.parametrize("algebra", ALL, ids=ids(ALL))
def test_norm_positivity(algebra, rng):
    assert order_norm(zero(algebra)) == 0.0
    assert order_norm(random_element(algebra, rng)) > 0


@pytest.mark.parametrize("algebra", ALL, ids=ids(ALL))
def test_cone_membership(algebra, rng):
    assert in_cone(unit(algebra))
    assert not in_cone(-unit(algebra))
    for _ in range(10):
        sq = random_square(algebra, rng)
        assert in_cone(sq)
        assert min(spectral_decompose(sq).eigenvalues) >= -1e-9


# faces and states


def test_restrict_unit_gives_same_algebra():
    for a in SIMPLE:
        assert restrict(a, unit(a)).algebra == a


def test_restrict_h3r_corner():
    A = MatrixAlgebra("R", 3)
    face = restrict(A, from_matrix(A, np.diag([1.0, 1.0, 0.0])))
    assert face.algebra == MatrixAlgebra("R", 2) and face.algebra.dim == 3


@pytest.mark.parametrize("algebra", ALL, ids=ids(ALL))
def test_restrict_face_properties(algebra, rng):
    from jordanlogic.lattice import sample_projection

    p = sample_projection(algebra, rng)
    while p.rank == 0:
        p = sample_projection(algebra, rng)
    face = restrict(algebra, p)
    assert face.algebra.capacity == p.rank
    assert face.push(unit(face.algebra)).close_to(p.element, 1e-10)
    for _, e in spectral_decompose(unit(face.algebra)).expanded():
        assert leq(certify_projection(face.push(e)), p)
    b = random_element(face.algebra, rng)
    pb = face.push(b)
    nb = order_norm(b)
    assert in_cone(nb * p.element - pb) and in_cone(pb + nb * p.element)
    assert face.pull(pb).close_to(b, 1e-10)


def test_restrict_zero_rejected():
    A = MatrixAlgebra("R", 2)
    with pytest.raises(PreconditionError):
        restrict(A, zero(A))


@pytest.mark.parametrize("algebra", ALL, ids=ids(ALL))
def test_atom_state(algebra, rng):
    for _ in range(5):
        a = random_element(algebra, rng)
        sd = spectral_decompose(a)
        atoms = [e for _, e in sd.expanded()]
        mu = atom_state(atoms[0])
        assert mu(unit(algebra)) == pytest.approx(1.0, abs=1e-10)
        assert mu(atoms[0]) == pytest.approx(1.0, abs=1e-10)
        for f in atoms[1:]:
            assert abs(mu(f)) <= 1e-10
        lo, hi = min(sd.eigenvalues), max(sd.eigenvalues)
        assert lo - 1e-10 <= mu(a) <= hi + 1e-10
        assert mu(random_square(algebra, rng)) >= -1e-10


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ALL), st.integers(0, 2**31))
def test_quadratic_map_of_projection_compresses(algebra, seed):
    from jordanlogic.lattice import sample_projection

    rng = np.random.default_rng(seed)
    p = sample_projection(algebra, rng)
    sq = random_square(algebra, rng)
    c = quadratic_map(p.element, sq)
    assert in_cone(c, tol=1e-8 * max(1.0, order_norm(sq)))
    assert quadratic_map(p.element, c).close_to(c, 1e-8 * max(1.0, order_norm(sq)))
