"""Acceptance criteria 1-9. Each test records its outcome; the summary prints one line per criterion."""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from jordanlogic.algebra import MatrixAlgebra, SpinFactor, direct_sum, random_element
from jordanlogic.checks import (
    check_covering,
    check_gbit,
    check_gbit_covering_equivalence,
    check_irreducible,
    check_weak_symmetry,
    run_suite,
)
from jordanlogic.lattice import (
    center,
    complement,
    info_capacity,
    join,
    leq,
    meet,
    sample_below,
    sample_pair,
    sample_projection,
    sample_atom,
)
from jordanlogic.reconstruct import reconstruct, spin_table, verify_jordan
from jordanlogic.symmetry import invariant_inner_product, random_base_form

pytestmark = pytest.mark.acceptance

ORACLES = [MatrixAlgebra(r, m) for r in "RCH" for m in (2, 3, 4, 5)] + [SpinFactor(n) for n in (2, 3, 7)]
SUMS = [
    direct_sum([MatrixAlgebra("C", 2), MatrixAlgebra("R", 3)]),
    direct_sum([MatrixAlgebra("C", 2), MatrixAlgebra("C", 2)]),
    direct_sum([SpinFactor(3), MatrixAlgebra("H", 2)]),
]
TRIALS = 500
TIME_LIMIT = 60.0


@pytest.mark.parametrize("algebra", ORACLES, ids=str)
def test_criterion_1_oracle_instances(algebra, record):
    start = time.perf_counter()
    reports = run_suite(algebra, "all", TRIALS, seed=0)
    elapsed = time.perf_counter() - start
    bad = [r.property for r in reports if r.verdict != "pass"]
    short = [r.property for r in reports if r.property != "equivalence" and r.trials < TRIALS]
    ok = not bad and not short and elapsed <= TIME_LIMIT
    record(1, ok, f"{algebra.label}: failing={bad} short={short} {elapsed:.1f}s")
    assert not bad, [r.to_json() for r in reports if r.verdict != "pass"]
    assert not short
    assert elapsed <= TIME_LIMIT


def _dist(p, q) -> float:
    return float(np.max(np.abs(p.coords - q.coords)))


@pytest.mark.parametrize("algebra", ORACLES, ids=str)
def test_criterion_2_lattice_laws(algebra, record):
    from jordanlogic.algebra import jordan_product

    worst = 0.0
    for i in range(1000):
        rng = np.random.default_rng([2, i])
        p, q = sample_pair(algebra, rng)
        worst = max(worst, _dist(complement(meet(p, q)), join(complement(p), complement(q))))
        worst = max(worst, _dist(complement(join(p, q)), meet(complement(p), complement(q))))
        r = sample_below(p, rng)
        assert leq(r, p)
        worst = max(worst, _dist(p, join(r, meet(p, complement(r)))))
        d = p.element - r.element
        worst = max(worst, float(np.max(np.abs(jordan_product(d, d).coords - d.coords))))
    record(2, worst <= 1e-8, f"{algebra.label}: worst={worst:.2e}")
    assert worst <= 1e-8


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_criterion_3_meet_oracle(m, record):
    A = MatrixAlgebra("C", m)
    k = A.n // m

    def col(M):
        U, sv, _ = np.linalg.svd(M)
        return U[:, : int(np.sum(sv > 1e-8))]

    def null(M):
        _, sv, Vt = np.linalg.svd(M)
        return Vt[int(np.sum(sv > 1e-8)) :].T

    agree = 0
    for i in range(500):
        p, q = sample_pair(A, np.random.default_rng([3, m, i]))
        Vp, Vq = col(A.embed(p.coords)), col(A.embed(q.coords))
        inter = null(np.vstack([np.eye(A.n) - Vp @ Vp.T, np.eye(A.n) - Vq @ Vq.T]))
        r = meet(p, q)
        same_rank = r.rank * k == inter.shape[1]
        same_elem = np.max(np.abs(A.embed(r.coords) - inter @ inter.T)) <= 1e-8
        agree += bool(same_rank and same_elem)
    record(3, agree == 500, f"H{m}(C): {agree}/500")
    assert agree == 500


@pytest.mark.parametrize("algebra", [MatrixAlgebra("R", 3), MatrixAlgebra("H", 4), SpinFactor(7), *SUMS], ids=str)
def test_criterion_4_equivalence(algebra, record):
    g = check_gbit(algebra, TRIALS, seed=4)
    c = check_covering(algebra, TRIALS, seed=4)
    eq = check_gbit_covering_equivalence(algebra, reports=(g, c))
    ok = eq.verdict == "pass" and g.verdict == c.verdict == "pass"
    record(4, ok, f"{algebra.label}: gbit={g.verdict} covering={c.verdict}")
    assert ok


def test_criterion_5_center(record):
    A = direct_sum([MatrixAlgebra("C", 2), MatrixAlgebra("R", 3)])
    dec = center(A, sample_budget=200, seed=5)
    worst = 0.0
    for i in range(200):
        a = random_element(A, np.random.default_rng([5, i]))
        worst = max(worst, float(np.max(np.abs(dec.join_blocks(dec.split(a)).coords - a.coords))))
    ok = len(dec.projections) == 2 and info_capacity(A) == 5 and worst <= 1e-10
    record(5, ok, f"central={len(dec.projections)} capacity={info_capacity(A)} round-trip={worst:.1e}")
    assert len(dec.projections) == 2
    assert info_capacity(A) == 5
    assert worst <= 1e-10


def test_criterion_6_invariant_product(record):
    A = MatrixAlgebra("C", 2)
    base = random_base_form(A, np.random.default_rng([0, 7]))
    f = invariant_inner_product(A, base, n_samples=10_000, seed=0)
    again = invariant_inner_product(A, base, n_samples=10_000, seed=0)
    atoms = [sample_atom(A, np.random.default_rng([6, i])).element for i in range(200)]
    norms = [np.sqrt(f(e, e)) for e in atoms]
    dev = float(np.max(np.abs(np.array(norms) - 1.0)))
    exact = np.array_equal(f.gram, again.gram) and f.residual == again.residual
    ok = f.residual <= 5e-3 and dev <= 5e-3 and exact
    record(6, ok, f"residual={f.residual:.2e} atom-norm deviation={dev:.2e} repeatable={exact}")
    assert f.residual <= 5e-3
    assert dev <= 5e-3
    assert exact


def test_criterion_7_reconstruction(record):
    rec = reconstruct(MatrixAlgebra("C", 2), n_samples=10_000, seed=0, trials=TRIALS)
    ok = (
        rec.jordan.verdict == "pass"
        and rec.alignment.product_deviation <= 10 * rec.residual
        and rec.atom_idempotency <= 1e-7
    )
    record(
        7,
        ok,
        f"jordan={rec.jordan.verdict} deviation={rec.alignment.product_deviation:.2e} "
        f"residual={rec.residual:.2e} idempotency={rec.atom_idempotency:.1e}",
    )
    assert ok, rec.to_json()


def test_criterion_8_negative_controls(record):
    H2H2 = direct_sum([MatrixAlgebra("C", 2), MatrixAlgebra("C", 2)])
    irr = check_irreducible(H2H2, TRIALS)
    irr_ok = irr.verdict == "fail" and json.loads(json.dumps(irr.witness))["c1"]["rank"] == 2
    jor = verify_jordan(spin_table(3).perturbed((1, 2, 0), 0.1))
    jor_ok = jor.verdict == "fail" and jor.witness is not None
    mixed = direct_sum([MatrixAlgebra("C", 2), MatrixAlgebra("R", 3)])
    ws = check_weak_symmetry(mixed, TRIALS, seed=8)
    ws_ok = ws.verdict == "fail" and ws.witness["reason"] == "dimension obstruction"
    record(8, irr_ok and jor_ok and ws_ok, f"irreducible={irr_ok} jordan={jor_ok} weak-symmetry={ws_ok}")
    assert irr_ok and jor_ok and ws_ok


CLI_RUNS = [
    ["check", "--algebra", '{"kind": "matrix", "ring": "C", "m": 3}', "--trials", "50", "--seed", "9"],
    ["check", "--algebra", '{"kind": "sum", "parts": [{"kind": "matrix", "ring": "C", "m": 2}, '
     '{"kind": "matrix", "ring": "R", "m": 3}]}', "--trials", "50", "--seed", "9"],
    ["reconstruct", "--algebra", '{"kind": "matrix", "ring": "C", "m": 2}', "--samples", "2000", "--seed", "9"],
    ["lattice", "meet", '{"coords": [1, 1, 0, 0, 0, 0]}', '{"coords": [0, 1, 1, 0, 0, 0]}',
     "--algebra", '{"kind": "matrix", "ring": "R", "m": 3}'],
]


@pytest.mark.parametrize("argv", CLI_RUNS, ids=["check", "check-sum", "reconstruct", "lattice"])
def test_criterion_9_cli_determinism(argv, record):
    cmd = [sys.executable, "-m", "jordanlogic.cli", *argv, "--no-timestamp"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    ok = a.stdout == b.stdout and a.returncode == b.returncode and len(a.stdout) > 0
    record(9, ok, f"{argv[0]}: exit={a.returncode}")
    assert ok
