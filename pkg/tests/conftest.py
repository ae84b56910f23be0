"""Shared builders for the test suite."""

import numpy as np
import pytest

from forestsdp import model


def rand_sym(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.uniform(-scale, scale, size=(n, n))
    return (a + a.T) / 2.0


def random_tree_edges(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """A uniform-ish random labelled tree: attach each vertex to an earlier one."""
    order = rng.permutation(n)
    edges = []
    for idx in range(1, n):
        j = order[idx]
        i = order[rng.integers(0, idx)]
        edges.append((min(i, j), max(i, j)))
    return sorted(edges)


def trs_instance(q0: np.ndarray, lin: np.ndarray, radius_sq: float = 1.0) -> model.QcqpInstance:
    n = q0.shape[0]
    return model.QcqpInstance(
        Q=[q0, np.eye(n)],
        q=[np.asarray(lin, dtype=float), np.zeros(n)],
        b=[radius_sq],
        sense=[model.SENSE_LE],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(0)
