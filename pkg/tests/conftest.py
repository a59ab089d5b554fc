import numpy as np
import pytest
from hypothesis import settings

from chaincut import SpinChainSpec

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def chain():
    """N=5, B=0.5: the configuration all published numbers refer to."""
    return SpinChainSpec(5, 0.5)


def kron_all(ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def reference_hamiltonian(n, field, g):
    """Independent construction used as an oracle: explicit Kronecker products."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2)

    def at(op, site):
        return kron_all([op if k == site else eye for k in range(n)])

    h = sum(at(x, i) @ at(x, i + 1) for i in range(n - 1))
    h = h + g * at(x, 0) @ at(x, n - 1)
    return h + field * sum(at(z, i) for i in range(n))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
