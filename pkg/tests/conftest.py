import numpy as np
import pytest

from scmaidd.codebook import default_codebook, derive_factor_graph
from scmaidd.ldpc import load_bundled, load_encoder
from scmaidd.ldpc.matrix import bundled_code_path
from scmaidd.sim.frames import make_components

# C for J=6, K=4, N_j=2 as printed with the system model
REFERENCE_C = np.array([[1, 1, 1, 0, 0, 0],
                    [1, 0, 0, 1, 1, 0],
                    [0, 1, 0, 1, 0, 1],
                    [0, 0, 1, 0, 1, 1]])


@pytest.fixture(scope="session")
def cb():
    return default_codebook()


@pytest.fixture(scope="session")
def fg(cb):
    return derive_factor_graph(cb)


@pytest.fixture(scope="session")
def pcm1024():
    return load_bundled(1024)


@pytest.fixture(scope="session")
def comp(cb, pcm1024):
    enc = load_encoder(pcm1024, bundled_code_path(1024).with_suffix(".npz"))
    return make_components(cb, enc)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
