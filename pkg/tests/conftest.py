import numpy as np
import pytest

from impulse_mud import (
    SystemParams,
    add_awgn,
    build_slot_matrix,
    generate_hopping,
    transmit,
)
from impulse_mud.codes import encode, encoder_for
from impulse_mud.detectors import _backend

BACKENDS = ["python"] + (["cython"] if _backend.compiled is not None else [])


class Instance:
    """One random channel use: pattern, bits, samples."""

    def __init__(self, rng, users, nc, frames, sigma, amps=None, code=None):
        self.params = SystemParams(users, nc, frames, amps)
        self.pattern = generate_hopping(self.params, rng)
        self.slot = build_slot_matrix(self.pattern, self.params)
        k = 1 if code is None else code.k
        self.info = rng.integers(0, 2, size=(users, k), dtype=np.uint8)
        if code is None:
            self.words = np.repeat(self.info, frames, axis=1)
        else:
            self.words = encode(encoder_for(code), self.info)
        self.clean = transmit(self.slot, self.params, 1.0 - 2.0 * self.words)
        self.samples = add_awgn(self.clean, sigma, rng)
        self.code = code


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def make_instance():
    return Instance


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    """Record one result line per acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def report(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines.append((number, line))
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
