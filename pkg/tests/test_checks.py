import json

import numpy as np
import pytest

from jordanlogic.algebra import MatrixAlgebra, SpinFactor, direct_sum, from_matrix
from jordanlogic.checks import (
    CHECKS,
    check_covering,
    check_gbit,
    check_gbit_covering_equivalence,
    check_irreducible,
    check_spectrality,
    check_strong_state_space,
    check_weak_symmetry,
    replay,
    run_check,
    run_suite,
    state_witness,
)
from jordanlogic.lattice import certify_projection
from jordanlogic.report import CheckReport

from conftest import SUMS, ids

H2H2 = direct_sum([MatrixAlgebra("C", 2), MatrixAlgebra("C", 2)])
MIXED = direct_sum([MatrixAlgebra("C", 2), MatrixAlgebra("R", 3)])


@pytest.mark.parametrize("algebra", [MatrixAlgebra("R", 3), SpinFactor(5)], ids=str)
def test_spectrality_passes(algebra):
    rep = check_spectrality(algebra, trials=500, seed=1)
    assert rep.verdict == "pass" and rep.trials == 500


def test_strong_state_qubit_witness():
    A = MatrixAlgebra("C", 2)
    p = certify_projection(from_matrix(A, [[1, 0], [0, 0]]))
    q = certify_projection(from_matrix(A, [[0.5, 0.5], [0.5, 0.5]]))
    e, val = state_witness(p, q)
    assert e.close_to(p.element, 1e-12)
    assert val == pytest.approx(0.5)


@pytest.mark.parametrize("algebra", [SpinFactor(3), MatrixAlgebra("H", 3)], ids=str)
def test_strong_state_passes(algebra):
    rep = check_strong_state_space(algebra, trials=300, seed=2)
    assert rep.verdict == "pass"
    assert rep.details["skipped"] > 0  # comparable pairs are skipped


@pytest.mark.parametrize("algebra", [MatrixAlgebra("R", 4), SpinFactor(4), *SUMS], ids=str)
def test_gbit_and_covering_pass(algebra):
    assert check_gbit(algebra, 200, seed=3).passed
    assert check_covering(algebra, 200, seed=3).passed


def test_equivalence_agrees_on_sums():
    rep = check_gbit_covering_equivalence(MIXED, 200, seed=0)
    assert rep.passed and rep.details == {"gbit": "pass", "covering": "pass"}


def test_equivalence_fails_on_disagreement():
    g = CheckReport("gbit", "pass", 10)
    c = CheckReport("covering", "fail", 3, 1.0, {"check": "covering"})
    rep = check_gbit_covering_equivalence(MIXED, reports=(g, c))
    assert rep.verdict == "fail" and rep.witness["covering"]["verdict"] == "fail"


def test_irreducible():
    assert check_irreducible(MatrixAlgebra("C", 3), 100).passed
    assert check_irreducible(SpinFactor(3), 100).passed
    rep = check_irreducible(H2H2, 100)
    assert rep.verdict == "fail"
    assert rep.witness["c1"]["rank"] == 2
    assert len(rep.witness["central_projections"]) == 2
    json.dumps(rep.to_json())


def test_weak_symmetry():
    assert check_weak_symmetry(MatrixAlgebra("R", 3), 200, seed=0).passed
    # isomorphic blocks are exchanged by a block swap
    assert check_weak_symmetry(H2H2, 200, seed=0).passed
    rep = check_weak_symmetry(MIXED, 200, seed=0)
    assert rep.verdict == "fail"
    assert rep.witness["reason"] == "dimension obstruction"


def test_fail_witness_replays_bit_exactly():
    rep = check_weak_symmetry(MIXED, 200, seed=5)
    res = replay(json.loads(json.dumps(rep.witness)))
    assert res.status == "fail"
    assert res.witness == rep.witness


@pytest.mark.parametrize("name", CHECKS)
def test_zero_budget_is_inconclusive(name):
    assert run_check(name, MatrixAlgebra("R", 2), trials=0).verdict == "inconclusive"


def test_suite_deterministic():
    a = [r.to_json() for r in run_suite(MatrixAlgebra("C", 2), "all", 50, seed=4)]
    b = [r.to_json() for r in run_suite(MatrixAlgebra("C", 2), "all", 50, seed=4)]
    assert a == b
    assert [r["property"] for r in a] == list(CHECKS)


def test_unknown_check():
    with pytest.raises(KeyError):
        run_check("modularity", MatrixAlgebra("R", 2))


def test_fail_report_requires_witness():
    with pytest.raises(ValueError):
        CheckReport("x", "fail", 1)
