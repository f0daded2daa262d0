"""Shared fixtures and helpers for the paramres test suite."""

import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from paramres import ModePair

# the oracles module lives next to the tests, not inside the package
sys.path.insert(0, os.path.dirname(__file__))

# numerical tests legitimately take a while on a loaded CI box; wall-clock
# deadlines only produce flakes there
settings.register_profile(
    "numeric",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


def mk_pair(G1=1.0, G2=1.0, G10=None, G20=None, a1=0.0, a2=0.0, **kw):
    """ModePair with sane defaults: lossless, linear, well-separated modes."""
    return ModePair(
        Gamma1=G1,
        Gamma2=G2,
        Gamma10=G1 if G10 is None else G10,
        Gamma20=G2 if G20 is None else G20,
        alpha1=a1,
        alpha2=a2,
        omega1=kw.pop("omega1", 5000.0),
        omega2=kw.pop("omega2", 7000.0),
        **kw,
    )


@pytest.fixture
def balanced_pair():
    """Lossless balanced pair with unit linewidth and weak Kerr."""
    return mk_pair(a1=0.01, a2=0.01)


@pytest.fixture
def unbalanced_pair():
    """Lossless pair with a 1:3 linewidth split and matching Kerr scaling."""
    return mk_pair(G2=3.0, a1=0.01, a2=0.03)
