import pytest

from tlrecon.graph import Graph


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


@pytest.fixture
def path5() -> Graph:
    return path_graph(5)


@pytest.fixture
def cycle6() -> Graph:
    return cycle_graph(6)


# -- acceptance summary ----------------------------------------------------------

ACCEPTANCE_TITLES = {
    1: "exact reconstruction on generated families",
    2: "query scaling on random trees",
    3: "max betweenness lower bound sweep",
    4: "shortest paths stay near A sweep",
    5: "ball separator balance sweep",
    6: "oracle partition equals true components",
    7: "separator retries and fallbacks",
    8: "determinism and query accounting",
    9: "generator witness integrity",
}
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS[number] = (bool(ok), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_TITLES):
        if number not in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"criterion {number} ({ACCEPTANCE_TITLES[number]}): NOT RUN")
            continue
        ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(
            f"criterion {number} ({ACCEPTANCE_TITLES[number]}): {'PASS' if ok else 'FAIL'}; {detail}"
        )
