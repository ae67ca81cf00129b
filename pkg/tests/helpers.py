"""Seeded random instances shared by the transfer and acceptance tests."""

import numpy as np
from scipy.stats import ortho_group


def orthogonal(n, rng):
    return np.eye(1) if n == 1 else ortho_group.rvs(n, random_state=rng)


def gapped(n, rng, gap=0.1, low=-3.0):
    """n sorted values with consecutive gaps of at least ``gap``."""
    steps = gap + rng.uniform(0, 1.5, size=n)
    return low + np.cumsum(steps)


def symmetric_with_gaps(n, rng):
    Q = orthogonal(n, rng)
    return Q @ np.diag(rng.permutation(gapped(n, rng))) @ Q.T


def rect_with_gaps(n, m, rng):
    s = np.sort(gapped(n, rng, low=0.0))[::-1]
    D = np.zeros((n, m))
    D[range(n), range(n)] = s
    return orthogonal(n, rng) @ D @ orthogonal(m, rng).T


def spectrum_with_pattern(mults, rng):
    vals = gapped(len(mults), rng)
    return np.repeat(vals, mults)
