import pytest
from hypothesis import settings

from modcurve import _kernels

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request):
    return request.param
