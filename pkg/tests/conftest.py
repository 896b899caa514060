import importlib

import numpy as np
import pytest

from hyperbit import _fallback
from hyperbit.harness import partially_entangled_instance, random_instance
from hyperbit.quantum_core import bell_chsh_instance


def _compiled():
    try:
        return importlib.import_module("hyperbit._kernels")
    except ImportError:
        return None


COMPILED = _compiled()
BACKENDS = [pytest.param(_fallback, id="python")]
if COMPILED is not None:
    BACKENDS.append(pytest.param(COMPILED, id="compiled"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture(scope="session")
def bell():
    return bell_chsh_instance()


@pytest.fixture(scope="session")
def partial():
    return partially_entangled_instance()


@pytest.fixture(scope="session")
def random_instances():
    dims = [(2, 2), (2, 3), (2, 4), (4, 2), (4, 4)]
    return [
        random_instance(*dims[s % len(dims)], 2, 2, seed=s,
                        bob_projective=bool(s % 2))
        for s in range(20)
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
