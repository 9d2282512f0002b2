import pytest
from hypothesis import HealthCheck, settings

from ckl.catalog import EXAMPLE_NAMES, load_example, load_tait

settings.register_profile("ckl", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ckl")

CATALOG_TAIT = ("square", "triangular", "kagome", "three-twelve-twelve", "nine", "four-eight-eight", "kite")


@pytest.fixture(params=CATALOG_TAIT)
def tait(request):
    return load_tait(request.param)


@pytest.fixture(params=EXAMPLE_NAMES)
def example(request):
    return load_example(request.param)
