import numpy as np
import pytest

from rydswm.config import bundled_config_path, load_config
from rydswm.units import TWO_PI


@pytest.fixture(scope="session")
def paper_cfg():
    return load_config(bundled_config_path())


@pytest.fixture(scope="session")
def swm(paper_cfg):
    return paper_cfg.system("swm6")


@pytest.fixture(scope="session")
def eit(paper_cfg):
    return paper_cfg.system("eit4")


def mhz(x):
    return TWO_PI * 1e6 * np.asarray(x)
