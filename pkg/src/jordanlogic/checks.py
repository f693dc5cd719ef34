"""Sampling checks for spectrality, strong state space, gbit, covering, irreducibility and weak symmetry.

Every check draws trial ``i`` from ``numpy.random.default_rng([seed, i])``, so
any trial can be replayed on its own (see :func:`replay`). A ``pass`` verdict
means no counterexample in the stated number of trials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._config import (
    CenterVerificationError,
    JordanLogicError,
    NotAProjectionError,
    Tolerances,
    TransportError,
    resolve,
)
from .algebra import (
    Algebra,
    Element,
    atom_state,
    parse_algebra,
    quadratic_map,
    random_element,
    restrict,
    spectral_decompose,
    unit,
)
from .lattice import (
    Projection,
    center,
    certify_projection,
    dim,
    info_capacity,
    join,
    leq,
    peel_atoms,
    sample_atom,
    sample_pair,
    sample_projection,
)
from .report import FAIL, INCONCLUSIVE, PASS, CheckReport
from .symmetry import transport_automorphism, verify_automorphism

OK, BAD, SKIP, UNDECIDED = "ok", "fail", "skip", "inconclusive"


@dataclass
class Trial:
    status: str
    residual: float = 0.0
    witness: dict = field(default_factory=dict)


def _run(name: str, algebra: Algebra, trials: int, seed: int, fn: Callable, tol: Tolerances) -> CheckReport:
    if trials <= 0:
        return CheckReport(name, INCONCLUSIVE, 0, details={"reason": "trial budget is zero"})
    worst, skipped, undecided = 0.0, 0, []
    for i in range(trials):
        res = fn(algebra, np.random.default_rng([seed, i]), tol)
        worst = max(worst, res.residual)
        if res.status == BAD:
            witness = {"check": name, "algebra": algebra.spec(), "seed": seed, "trial": i, **res.witness}
            return CheckReport(name, FAIL, i + 1, worst, witness, {"skipped": skipped})
        if res.status == SKIP:
            skipped += 1
        elif res.status == UNDECIDED:
            undecided.append(i)
    details = {"skipped": skipped}
    if undecided:
        details["undecided_trials"] = undecided
        return CheckReport(name, INCONCLUSIVE, trials, worst, details=details)
    return CheckReport(name, PASS, trials, worst, details=details)


def _close(a: Element, b: Element, tol: float = 1e-8) -> bool:
    return a.close_to(b, tol)


# ---------------------------------------------------------------------------
# spectrality


def _sample_spectral_input(algebra: Algebra, rng: np.random.Generator) -> Element:
    kind = rng.integers(0, 4)
    if kind == 0:
        # repeated spectral values
        p = sample_projection(algebra, rng).element
        s, t = rng.standard_normal(2)
        return s * p + t * (unit(algebra) - p)
    if kind == 1:
        return float(rng.standard_normal()) * unit(algebra)
    return random_element(algebra, rng)


def _spectrality_trial(algebra: Algebra, rng: np.random.Generator, tol: Tolerances) -> Trial:
    a = _sample_spectral_input(algebra, rng)
    sd = spectral_decompose(a, tol)
    scale = max(1.0, max(abs(s) for s in sd.eigenvalues))
    recon = float(np.max(np.abs(sd.reconstruct().coords - a.coords))) / scale
    sum_err = float(np.max(np.abs(sd.atom_sum().coords - unit(algebra).coords)))
    residual = max(recon, sum_err)
    witness = {"element": a.to_json()}
    if recon > 1e-8:
        return Trial(BAD, residual, {**witness, "reason": "reconstruction", "error": recon})
    if sum_err > 1e-9:
        return Trial(BAD, residual, {**witness, "reason": "atoms do not sum to the unit", "error": sum_err})
    if sd.n_atoms > algebra.capacity:
        return Trial(BAD, residual, {**witness, "reason": "too many atoms", "atoms": sd.n_atoms})
    for _, e in sd.expanded():
        try:
            p = certify_projection(e, tol)
        except NotAProjectionError as exc:
            return Trial(BAD, residual, {**witness, "reason": "atom is not a projection", "eigenvalue": exc.eigenvalue})
        if p.rank != 1:
            return Trial(BAD, residual, {**witness, "reason": "atom has rank != 1", "rank": p.rank})
    return Trial(OK, residual)


def check_spectrality(algebra: Algebra, trials: int = 500, seed: int = 0, tol: Tolerances | None = None) -> CheckReport:
    """Random elements decompose into at most ``m`` orthogonal atoms summing to the unit."""
    return _run("spectrality", algebra, trials, seed, _spectrality_trial, resolve(tol))


# ---------------------------------------------------------------------------
# strongly order determining state space


def _find_state_witness(p: Projection, q: Projection, tol: Tolerances):
    """Atom ``e <= p`` whose vector state has ``mu(p) = 1`` and ``mu(q) < 1``."""
    best = None
    for e in peel_atoms(p, tol):
        mu = atom_state(e)
        val = mu(q.element)
        if best is None or val < best[1]:
            best = (e, val, mu(p.element))
    if best is not None and best[1] < 1.0 - 1e-8:
        return best
    # lowest spectral atom of the compression of q to the face of p
    face = restrict(p.algebra, p, tol)
    compressed = face.pull(quadratic_map(p.element, q.element))
    sd = spectral_decompose(compressed, tol)
    e = face.push(sd.atoms[0][0])
    mu = atom_state(e)
    cand = (e, mu(q.element), mu(p.element))
    return cand if best is None or cand[1] < best[1] else best


def _strong_state_trial(algebra: Algebra, rng: np.random.Generator, tol: Tolerances) -> Trial:
    p, q = sample_pair(algebra, rng)
    if leq(p, q, tol):
        return Trial(SKIP)
    e, mu_q, mu_p = _find_state_witness(p, q, tol)
    residual = abs(mu_p - 1.0)
    if residual > 1e-8:
        return Trial(BAD, residual, {"reason": "atom state does not attain 1 on p", "p": p.to_json(), "q": q.to_json()})
    if mu_q < 1.0 - 1e-8:
        return Trial(OK, residual)
    return Trial(UNDECIDED, residual, {"p": p.to_json(), "q": q.to_json(), "best_mu_q": mu_q})


def check_strong_state_space(algebra: Algebra, trials: int = 500, seed: int = 0, tol: Tolerances | None = None) -> CheckReport:
    """For sampled ``p`` not below ``q``, exhibit a state with ``mu(p) = 1 > mu(q)``."""
    return _run("strong-states", algebra, trials, seed, _strong_state_trial, resolve(tol))


def state_witness(p: Projection, q: Projection, tol: Tolerances | None = None) -> tuple[Element, float]:
    """Atom ``e <= p`` and the value ``mu_e(q)`` of its state; ``mu_e(p) = 1``."""
    e, mu_q, _ = _find_state_witness(p, q, resolve(tol))
    return e, mu_q


# ---------------------------------------------------------------------------
# gbit and covering


def _distinct_atoms(algebra: Algebra, rng: np.random.Generator):
    e1 = sample_atom(algebra, rng)
    e2 = sample_atom(algebra, rng)
    return e1, e2


def _gbit_trial(algebra: Algebra, rng: np.random.Generator, tol: Tolerances) -> Trial:
    e1, e2 = _distinct_atoms(algebra, rng)
    if _close(e1.element, e2.element):
        return Trial(SKIP)
    f = join(e1, e2, tol)
    witness = {"e1": e1.to_json(), "e2": e2.to_json()}
    face = restrict(algebra, f, tol)
    try:
        cap = info_capacity(face.algebra, tol)
    except JordanLogicError as exc:
        return Trial(BAD, 1.0, {**witness, "reason": str(exc)})
    d = dim(f, tol)
    if cap != 2 or d != 2:
        return Trial(BAD, float(abs(cap - 2)), {**witness, "reason": "face of e1 v e2 does not have capacity 2", "capacity": cap, "dim": d})
    sub = sample_projection(face.algebra, rng)
    if sub.rank == 0:
        return Trial(OK)
    q = certify_projection(face.push(sub.element), tol)
    if not (dim(q, tol) == 1 or (_close(q.element, f.element) and q.rank == 2)):
        return Trial(BAD, 1.0, {**witness, "reason": "projection below e1 v e2 is neither an atom nor e1 v e2", "q": q.to_json()})
    return Trial(OK)


def check_gbit(algebra: Algebra, trials: int = 500, seed: int = 0, tol: Tolerances | None = None) -> CheckReport:
    """The face generated by two distinct atoms has capacity 2."""
    return _run("gbit", algebra, trials, seed, _gbit_trial, resolve(tol))


def _covering_trial(algebra: Algebra, rng: np.random.Generator, tol: Tolerances) -> Trial:
    p = sample_projection(algebra, rng)
    e = sample_atom(algebra, rng)
    f = join(p, e, tol)
    witness = {"p": p.to_json(), "e": e.to_json()}
    dp, df = dim(p, tol), dim(f, tol)
    if df - dp not in (0, 1):
        return Trial(BAD, float(df - dp), {**witness, "reason": "rank jump of p v e is not 0 or 1", "dim_p": dp, "dim_join": df})
    face = restrict(algebra, f, tol)
    e_face = sample_atom(face.algebra, rng)
    e2 = certify_projection(face.push(e_face.element), tol)
    q = join(p, e2, tol)
    if not (leq(p, q, tol) and leq(q, f, tol)):
        return Trial(BAD, 1.0, {**witness, "reason": "sandwich construction left [p, p v e]", "e_between": e2.to_json()})
    if not (_close(q.element, p.element) or _close(q.element, f.element)):
        return Trial(BAD, 1.0, {**witness, "reason": "q strictly between p and p v e", "q": q.to_json()})
    return Trial(OK)


def check_covering(algebra: Algebra, trials: int = 500, seed: int = 0, tol: Tolerances | None = None) -> CheckReport:
    """``p <= q <= p v e`` with ``e`` an atom forces ``q`` to be ``p`` or ``p v e``."""
    return _run("covering", algebra, trials, seed, _covering_trial, resolve(tol))


def check_gbit_covering_equivalence(
    algebra: Algebra,
    trials: int = 500,
    seed: int = 0,
    tol: Tolerances | None = None,
    reports: tuple[CheckReport, CheckReport] | None = None,
) -> CheckReport:
    """The gbit and covering verdicts agree (pass) or differ (fail)."""
    if reports is None:
        reports = (check_gbit(algebra, trials, seed, tol), check_covering(algebra, trials, seed, tol))
    g, c = reports
    details = {"gbit": g.verdict, "covering": c.verdict}
    n = min(g.trials, c.trials)
    if INCONCLUSIVE in (g.verdict, c.verdict):
        return CheckReport("equivalence", INCONCLUSIVE, n, details=details)
    if g.verdict == c.verdict:
        return CheckReport("equivalence", PASS, n, details=details)
    witness = {"check": "equivalence", "algebra": algebra.spec(), "seed": seed, "gbit": g.to_json(), "covering": c.to_json()}
    return CheckReport("equivalence", FAIL, n, 1.0, witness, details)


# ---------------------------------------------------------------------------
# irreducibility and weak symmetry


def check_irreducible(algebra: Algebra, sample_budget: int = 500, seed: int = 0, tol: Tolerances | None = None) -> CheckReport:
    """The center of the projection lattice is ``{0, I}``."""
    if sample_budget <= 0:
        return CheckReport("irreducible", INCONCLUSIVE, 0, details={"reason": "sample budget is zero"})
    try:
        cd = center(algebra, sample_budget, seed, tol)
    except CenterVerificationError as exc:
        return CheckReport("irreducible", FAIL, sample_budget, 1.0, {"check": "irreducible", **exc.witness})
    details = {"central_projections": len(cd.projections)}
    if cd.irreducible:
        return CheckReport("irreducible", PASS, sample_budget, details=details)
    witness = {
        "check": "irreducible",
        "algebra": algebra.spec(),
        "seed": seed,
        "c1": cd.projections[0].to_json(),
        "central_projections": [c.to_json() for c in cd.projections],
    }
    return CheckReport("irreducible", FAIL, sample_budget, 1.0, witness, details)


def _weak_symmetry_trial(algebra: Algebra, rng: np.random.Generator, tol: Tolerances) -> Trial:
    e1, e2 = _distinct_atoms(algebra, rng)
    witness = {"e1": e1.to_json(), "e2": e2.to_json()}
    try:
        T = transport_automorphism(algebra, e1, e2, tol)
    except TransportError as exc:
        return Trial(BAD, 1.0, {**witness, "reason": str(exc), **exc.witness})
    miss = float(np.max(np.abs(T(e1).coords - e2.coords)))
    sub_seed = int(rng.integers(0, 2**31))
    rep = verify_automorphism(algebra, T, trials=4, seed=sub_seed)
    if rep.verdict != PASS:
        return Trial(BAD, miss, {**witness, "reason": "transport map is not an automorphism", "report": rep.to_json()})
    return Trial(OK, miss)


def check_weak_symmetry(algebra: Algebra, trials: int = 500, seed: int = 0, tol: Tolerances | None = None) -> CheckReport:
    """Every sampled atom pair is related by an automorphism."""
    return _run("weak-symmetry", algebra, trials, seed, _weak_symmetry_trial, resolve(tol))


# ---------------------------------------------------------------------------
# suites and replay

_TRIALS = {
    "spectrality": _spectrality_trial,
    "strong-states": _strong_state_trial,
    "gbit": _gbit_trial,
    "covering": _covering_trial,
    "weak-symmetry": _weak_symmetry_trial,
}

CHECKS = ("spectrality", "strong-states", "gbit", "covering", "equivalence", "irreducible", "weak-symmetry")


def run_check(name: str, algebra: Algebra, trials: int = 500, seed: int = 0, tol: Tolerances | None = None) -> CheckReport:
    if name in _TRIALS:
        return _run(name, algebra, trials, seed, _TRIALS[name], resolve(tol))
    if name == "equivalence":
        return check_gbit_covering_equivalence(algebra, trials, seed, tol)
    if name == "irreducible":
        return check_irreducible(algebra, trials, seed, tol)
    raise KeyError(f"unknown check {name!r}; choose from {CHECKS} or 'all'")


def run_suite(algebra: Algebra, suite: str = "all", trials: int = 500, seed: int = 0, tol: Tolerances | None = None) -> list[CheckReport]:
    """Run one named check, or every check for ``suite="all"``."""
    if suite != "all":
        return [run_check(suite, algebra, trials, seed, tol)]
    out = {}
    for name in ("spectrality", "strong-states", "gbit", "covering"):
        out[name] = run_check(name, algebra, trials, seed, tol)
    out["equivalence"] = check_gbit_covering_equivalence(algebra, trials, seed, tol, (out["gbit"], out["covering"]))
    out["irreducible"] = check_irreducible(algebra, trials, seed, tol)
    out["weak-symmetry"] = run_check("weak-symmetry", algebra, trials, seed, tol)
    return [out[n] for n in CHECKS]


def replay(witness: dict, tol: Tolerances | None = None) -> Trial:
    """Re-run the single trial recorded in a failure witness."""
    name = witness["check"]
    if name not in _TRIALS:
        raise KeyError(f"check {name!r} has no per-trial replay")
    algebra = parse_algebra(witness["algebra"])
    rng = np.random.default_rng([witness["seed"], witness["trial"]])
    res = _TRIALS[name](algebra, rng, resolve(tol))
    if res.status == BAD:
        res.witness = {"check": name, "algebra": algebra.spec(), "seed": witness["seed"], "trial": witness["trial"], **res.witness}
    return res
