import pytest

from vla_roofline.configio import load_presets


@pytest.fixture(scope="session")
def lib():
    return load_presets()


@pytest.fixture(scope="session")
def pi0(lib):
    return lib.model("pi0")


@pytest.fixture(scope="session")
def b100(lib):
    return lib.accelerator("b100")


@pytest.fixture(scope="session")
def thor(lib):
    return lib.accelerator("thor")
