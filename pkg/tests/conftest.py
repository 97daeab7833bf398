import pytest

from tempo import _pykernels, kernels
from tempo.parser import parse_dataset, parse_program, parse_query

# the two propagation rules of the running example
EXAMPLE_RULES = """\
boxplus[0,2] P(X) :- I(X,Y), P(Y).
boxplus[0,1] P(X) :- I(X,Y), diamondminus[0,1] P(Y).
"""

BACKENDS = [pytest.param(_pykernels, id="python")]
if kernels.compiled_backend is not None:
    BACKENDS.append(pytest.param(kernels.compiled_backend, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


KERNEL_NAMES = ("iv_intersect", "iv_add", "iv_sub", "coalesce", "union", "intersect", "covers", "contains_point",
                "subset", "dilate_add", "dilate_sub", "erode_future", "erode_past", "until", "since")


@pytest.fixture(params=BACKENDS)
def engine_backend(request, monkeypatch):
    """Runs the whole engine on one kernel backend."""
    for name in KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(request.param, name))
    return request.param


# acceptance lines, printed after the run
ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """``acceptance(criterion, ok, detail)`` records one pass/fail line."""
    lines = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(criterion: str, ok: bool, detail: str) -> bool:
        lines[criterion] = f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}"
        print(lines[criterion])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    lines = terminalreporter.config.stash.get(ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])


@pytest.fixture
def example_program():
    return parse_program(EXAMPLE_RULES)


@pytest.fixture
def example_dataset():
    return parse_dataset("I(arthur,beatrice)@8\nP(beatrice)@8\n")


@pytest.fixture
def example_query():
    return parse_query("P(arthur)@10")
