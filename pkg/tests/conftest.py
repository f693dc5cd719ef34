import numpy as np
import pytest

from jordanlogic.algebra import MatrixAlgebra, SpinFactor, direct_sum

SIMPLE = [
    MatrixAlgebra("R", 2),
    MatrixAlgebra("R", 3),
    MatrixAlgebra("C", 2),
    MatrixAlgebra("C", 3),
    MatrixAlgebra("H", 2),
    MatrixAlgebra("H", 3),
    SpinFactor(2),
    SpinFactor(3),
    SpinFactor(5),
]
SUMS = [
    direct_sum([MatrixAlgebra("C", 2), MatrixAlgebra("R", 3)]),
    direct_sum([SpinFactor(3), MatrixAlgebra("H", 2)]),
]
ALL = SIMPLE + SUMS


def ids(algebras):
    return [a.label for a in algebras]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_DESCRIPTIONS = {
    1: "oracle instances pass the full suite",
    2: "lattice laws within 1e-8",
    3: "meet agrees with the subspace oracle",
    4: "gbit and covering verdicts agree",
    5: "center decomposition of H2(C)+H3(R)",
    6: "Monte-Carlo invariant product on H2(C)",
    7: "end-to-end spin reconstruction of H2(C)",
    8: "negative controls fail with witnesses",
    9: "CLI output is byte-identical per seed",
}
_ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE.setdefault(criterion, []).append((bool(passed), detail))

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_DESCRIPTIONS):
        rows = _ACCEPTANCE.get(n)
        if rows is None:
            status, note = "NOT RUN", ""
        else:
            failed = [d for ok, d in rows if not ok]
            status = "PASS" if not failed else "FAIL"
            note = f"({len(rows)} cases)" if not failed else f"failed: {'; '.join(failed)}"
        terminalreporter.write_line(f"criterion {n}: {status}  {ACCEPTANCE_DESCRIPTIONS[n]} {note}".rstrip())
