import numpy as np
import pytest

from jpac.model import LinkNetwork, NormalizedChannel, build_normalized
from jpac.verify import two_link


@pytest.fixture
def sym():
    """Symmetric 2-link network factory: unit direct gains, cross gain g."""
    return two_link


def channel(A, c, pbar=None):
    A = np.asarray(A, dtype=float)
    pbar = np.full(A.shape[0], 0.2) if pbar is None else pbar
    return NormalizedChannel(A, np.asarray(c, dtype=float), np.asarray(pbar, dtype=float))


def random_network(rng, K, spread=1.0):
    """Random gains with a dominant diagonal; used by the property tests."""
    G = rng.uniform(0.0, spread, (K, K)) / K
    np.fill_diagonal(G, 1.0)
    return LinkNetwork(G, np.full(K, 0.05), np.ones(K), np.full(K, 1.0))
