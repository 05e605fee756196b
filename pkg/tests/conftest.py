import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dampcert import ProhibitedDomain, discretize_boundary


@pytest.fixture(scope="session")
def std_domain():
    """The reference prohibited domain used throughout the case studies."""
    return ProhibitedDomain(sigma=0.35, xi=0.37, eps1=1e-3, eps2=0.1, eta1=10.0, eta2=10.0)


@pytest.fixture(scope="session")
def std_samples(std_domain):
    return discretize_boundary(std_domain, 0.01)
