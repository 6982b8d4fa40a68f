import numpy as np
import pytest

from lplab.grid import GridSpec, SampledField


@pytest.fixture(scope="session")
def line512():
    return GridSpec(1, 512, 16.0)


@pytest.fixture(scope="session")
def line1024():
    return GridSpec(1, 1024, 16.0)


@pytest.fixture(scope="session")
def plane64():
    return GridSpec(2, 64, 8.0)


@pytest.fixture(scope="session")
def plane128():
    return GridSpec(2, 128, 12.0)


def random_field(spec, seed=0, complex_valued=True):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(spec.shape)
    if complex_valued:
        vals = vals + 1j * rng.standard_normal(spec.shape)
    return SampledField(spec, vals)
