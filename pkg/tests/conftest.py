import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from prolate import SlepianParams, build_basis


@pytest.fixture(scope="session")
def basis_cache():
    """Memoized basis construction shared across the whole run."""
    cache = {}

    def get(c, n_max=None, T=1.0, quad_order=None):
        key = (c, n_max, T, quad_order)
        if key not in cache:
            cache[key] = build_basis(SlepianParams(c=c, T=T), n_max=n_max,
                                     quad_order=quad_order)
        return cache[key]

    return get
