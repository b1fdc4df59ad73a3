"""Small named graphs and matrix helpers shared across the test modules."""

import numpy as np

from spectral_aug import make_graph


def cycle(n):
    assert n >= 3
    return make_graph(n, [[i, (i + 1) % n] for i in range(n)])


def path(n):
    return make_graph(n, [[i, i + 1] for i in range(n - 1)])


def complete(n):
    return make_graph(n, [[i, j] for i in range(n) for j in range(i + 1, n)])


def star(n):
    # hub 0 plus n - 1 leaves
    return make_graph(n, [[0, i] for i in range(1, n)])


def two_triangles():
    return make_graph(6, [[0, 1], [1, 2], [0, 2], [3, 4], [4, 5], [3, 5]])


def random_orthogonal(p, rng):
    q, r = np.linalg.qr(rng.normal(size=(p, p)))
    return q * np.sign(np.diag(r))


def random_symmetric(n, rng, scale=1.0):
    m = rng.normal(0.0, scale, (n, n))
    return (m + m.T) / 2.0
