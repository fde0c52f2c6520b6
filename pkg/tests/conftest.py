import pytest

import expwalk as ew


@pytest.fixture(scope="session")
def k4():
    return ew.build_complete(4)


@pytest.fixture(scope="session")
def k4_lab():
    return ew.Labelling.from_bits([1, 1, 0, 0])


@pytest.fixture(scope="session")
def k4_spectrum(k4):
    return ew.spectrum(k4)


@pytest.fixture(scope="session")
def g16():
    return ew.build_random_regular(16, 3, seed=1)


@pytest.fixture(scope="session")
def lab16(g16):
    return ew.random_balanced_labelling(g16, seed=3)


@pytest.fixture(scope="session")
def s16(g16):
    return ew.spectrum(g16)


@pytest.fixture(scope="session")
def random6():
    return ew.build_random_regular(6, 3, seed=11)
