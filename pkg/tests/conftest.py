import pytest
from hypothesis import strategies as st

from trianglefa.freegroup import Alpha, Eps, Eta, Perm, Rho, RhoInv, Tau, Theta

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_criterion():
    def record(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@st.composite
def named_generators(draw, n: int):
    kind = draw(st.sampled_from(["rho", "rhoinv", "eps", "perm", "theta", "tau", "eta", "alpha"]))
    if kind in ("rho", "rhoinv"):
        i = draw(st.integers(1, n))
        j = draw(st.integers(1, n).filter(lambda j: j != i))
        return Rho(i, j) if kind == "rho" else RhoInv(i, j)
    if kind == "eps":
        return Eps(draw(st.integers(1, n)))
    if kind == "perm":
        return Perm(tuple(draw(st.permutations(range(1, n + 1)))))
    return {"theta": Theta, "tau": Tau, "eta": Eta, "alpha": Alpha}[kind]()
