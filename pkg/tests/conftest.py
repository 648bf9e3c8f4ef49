"""Shared fixtures: the three benchmark backgrounds, the sampled time chain,
and session-cached Bogoliubov tables so the heavy sweeps run once."""

import time

import numpy as np
import pytest

import frwdirac as fd

TOLERANCE = 1e-11

# chain eta0 < eta1 < eta2 gives three pairs with three distinct spans,
# including the composite (eta0, eta2) used for composition-law checks
TIME_CHAIN = (0.15, 0.6, 1.35)
TIME_PAIRS = ((0.15, 0.6), (0.6, 1.35), (0.15, 1.35))


@pytest.fixture(scope="session")
def massless_bg():
    return fd.constant_background(alpha=0.0, mass=0.0, domain=(0.0, 2.0))


@pytest.fixture(scope="session")
def constant_bg():
    # mu = 1 throughout
    return fd.constant_background(alpha=0.0, mass=1.0, domain=(0.0, 2.0))


@pytest.fixture(scope="session")
def tabulated_bg():
    etas = np.linspace(0.0, 2.0, 201)
    return fd.tabulated_background(etas, 0.1 * etas**2, mass=1.0)


@pytest.fixture(scope="session")
def backgrounds(massless_bg, constant_bg, tabulated_bg):
    return {"massless": massless_bg, "constant": constant_bg, "tabulated": tabulated_bg}


@pytest.fixture(scope="session")
def sweep_ns():
    return np.arange(0, 501)


@pytest.fixture(scope="session")
def table_build_seconds():
    """Wall-clock cost of the full-sweep tables, keyed by table kind."""
    return {}


@pytest.fixture(scope="session")
def bogoliubov_tables(backgrounds, sweep_ns, table_build_seconds):
    """{(background_name, (eta0, eta)): stacked B_n for n = 0..500}."""
    start = time.perf_counter()
    tables = {}
    for name, bg in backgrounds.items():
        for pair in TIME_PAIRS:
            tables[(name, pair)] = fd.bogoliubov_table(
                bg, sweep_ns, pair[0], pair[1], TOLERANCE)
    table_build_seconds["bogoliubov"] = time.perf_counter() - start
    return tables


@pytest.fixture(scope="session")
def propagator_tables(backgrounds, sweep_ns, table_build_seconds):
    """{(background_name, (eta0, eta)): stacked Phi_n for n = 0..500}."""
    start = time.perf_counter()
    tables = {}
    for name, bg in backgrounds.items():
        for pair in TIME_PAIRS:
            tables[(name, pair)] = fd.propagate_batch(
                bg, sweep_ns, pair[0], pair[1], TOLERANCE)
    table_build_seconds["propagator"] = time.perf_counter() - start
    return tables


@pytest.fixture(scope="session")
def family_library():
    return (
        fd.StructureFamily(kind="identity", convention_floor=0.99),
        fd.StructureFamily(kind="diagonal_phase", phase1=0.3, phase2=-0.7,
                           convention_floor=0.99),
        fd.StructureFamily(kind="constant_angle", angle=0.3, convention_floor=0.9),
        fd.StructureFamily(kind="power_decay", name="power_decay_p2",
                           amplitude=0.5, exponent=2.0, convention_floor=0.8),
        fd.StructureFamily(kind="power_decay", name="power_decay_p1",
                           amplitude=0.5, exponent=1.0, convention_floor=0.8),
        fd.StructureFamily(kind="random_phase", amplitude=0.3, seed=7,
                           convention_floor=0.9),
        fd.StructureFamily(kind="swap"),
    )
