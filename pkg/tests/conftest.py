import numpy as np
import pytest

from fiberweave.lattice import BUILTIN_STYLES, Laminate, TraceLayout, make_lattice
from fiberweave.sweep import DelayProfile, SweepConfig, run_diff_sweep, run_single_sweep

STYLE_NAMES = [s.name for s in BUILTIN_STYLES]


@pytest.fixture(scope="session")
def models():
    return {s.name: make_lattice(s, Laminate()) for s in BUILTIN_STYLES}


@pytest.fixture(scope="session")
def single_profiles(models):
    """Default single-ended sweeps (w = 4 mil, -12..12 step 1) for all four styles."""
    layout = TraceLayout("single", 4.0)
    return {name: run_single_sweep(m, layout, SweepConfig()) for name, m in models.items()}


@pytest.fixture(scope="session")
def diff_profiles(models):
    layout = TraceLayout("differential", 4.0, 4.0)
    return {name: run_diff_sweep(m, layout, SweepConfig()) for name, m in models.items()}


def sinusoid_profile(amplitude=5.0, period=24.0, mean=100.0, offsets=None, name="sine"):
    o = np.arange(-12.0, 13.0) if offsets is None else np.asarray(offsets, float)
    v = mean + amplitude * np.sin(2 * np.pi * o / period)
    return DelayProfile(name, o, v, np.full_like(o, 50.0), period)


@pytest.fixture
def sine():
    return sinusoid_profile()
