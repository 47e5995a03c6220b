import numpy as np
import pytest

from borelcalc import zerofinder


@pytest.fixture(scope="session")
def catalog(tmp_path_factory):
    path = tmp_path_factory.mktemp("catalog") / "zeta_zeros.json"
    return zerofinder.build_zeta_catalog(30, persist=str(path))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
