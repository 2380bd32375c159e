"""Shared fixtures: the reference drive, the reference bath, one wide kernel."""

import pytest

from quapidyn.bath import BathSpec, influence_coefficients
from quapidyn.driven_system import BareParameters, SystemHamiltonian

REFERENCE_BARE = BareParameters(
    eps0=10570.0, epsH=12108.0, epsB=12000.0, J0=20.0,
    kappa0=210.0, Gamma1=3e-6, Gamma2=3e-6, t1=30.0,
)
OHMIC_77 = BathSpec(s=1.0, xi=0.75, omega_c=2000.0, T=77.0)


@pytest.fixture(scope="session")
def ref_bare() -> BareParameters:
    return REFERENCE_BARE


@pytest.fixture(scope="session")
def ref_bath() -> BathSpec:
    return OHMIC_77


@pytest.fixture(scope="session")
def ref_sys() -> SystemHamiltonian:
    return SystemHamiltonian.from_bare(REFERENCE_BARE)


@pytest.fixture(scope="session")
def ref_kernel6():
    # wide enough for every dk_max <= 6 run on the 5 fs grid
    return influence_coefficients(OHMIC_77, 5.0, 6, 1)
