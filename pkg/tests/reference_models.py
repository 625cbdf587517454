"""Model definitions shared by the test modules."""

import numpy as np

from matchq import QueueModel, erlang, poisson, validate

C1_2 = [[-10, 0], [1, -1]]
D1_2 = [[9, 1], [0, 0]]
C2_2 = [[-5, 1], [2, -7]]
D2_2 = [[0, 4], [2, 3]]

C1_4 = [[-7, 0, 2, 0], [2, -7, 3, 0], [0, 0, -10, 0], [2, 1, 2, -8]]
D1_4 = [[0, 5, 0, 0], [0, 1, 1, 0], [0, 0, 2, 8], [3, 0, 0, 0]]
C2_4 = [[-2, 0, 0, 0], [0, -7, 0, 0], [0, 0, -15, 0], [0.5, 0, 2.5, -5]]
D2_4 = [[0, 2, 0, 0], [0, 3, 4, 0], [3, 0, 2, 10], [2, 0, 0, 0]]

TABLE1_THETAS = ((0.25, 1.0), (0.75, 1.0))
TABLE2_THETAS = ((1.0, 2.0), (0.1, 0.2), (0.01, 0.02))


def table1_maps(kind: str):
    if kind == "poisson":
        return poisson(5.0), poisson(41 / 9)
    if kind == "map2":
        return validate(C1_2, D1_2), validate(C2_2, D2_2)
    if kind == "map4":
        return validate(C1_4, D1_4), validate(C2_4, D2_4)
    raise KeyError(kind)


def table2_maps(kind: str):
    if kind == "erlang":
        return erlang(2, 2.0), erlang(2, 4.0)
    if kind == "exponential":
        return poisson(1.0), poisson(2.0)
    raise KeyError(kind)


def table1_model(kind: str, thetas) -> QueueModel:
    return QueueModel(*table1_maps(kind), *thetas)


def table2_model(kind: str, thetas) -> QueueModel:
    return QueueModel(*table2_maps(kind), *thetas)


def random_map(rng: np.random.Generator, order: int, density: float = 0.6):
    """Random valid MAP: a positive cycle in D guarantees irreducibility."""
    c = rng.uniform(0.1, 3.0, (order, order)) * (rng.random((order, order)) < density)
    d = rng.uniform(0.1, 3.0, (order, order)) * (rng.random((order, order)) < density)
    for j in range(order):
        d[j, (j + 1) % order] += rng.uniform(0.2, 2.0)
    np.fill_diagonal(c, 0.0)
    np.fill_diagonal(c, -(c.sum(axis=1) + d.sum(axis=1)))
    return validate(c, d)
