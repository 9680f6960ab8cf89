import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from skcollapse.models import bundled, load_model
from skcollapse.polynomial import Polynomial
from skcollapse.semiflat import FibrationModel
from skcollapse.special_kahler import Prepotential

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


def constant_model(z, d=None):
    """Fibration with a constant period matrix."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    n = z.shape[0]
    return FibrationModel(Polynomial.constant(n, z), d or (1,) * n)


def quadratic(n=1, tau=1j):
    return Prepotential.from_terms(n, {tuple(2 if i == j else 0 for i in range(n)): tau / 2
                                       for j in range(n)})


@pytest.fixture(scope="session")
def models():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_model(bundled(name))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def cubic(models):
    return models("cubic").value.prepotential


@pytest.fixture(scope="session")
def calibration():
    return json.loads((FIXTURES / "volume_calibration.json").read_text())


_PREPOTENTIALS = {}


def bundled_prepotential(name):
    if name not in _PREPOTENTIALS:
        _PREPOTENTIALS[name] = load_model(bundled(name)).value.prepotential
    return _PREPOTENTIALS[name]


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
