"""Shared fixtures: the triangle and nested-squares datasets and their networks."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "scripts" / "python"))

from hullchain.geometry import ClassLabel, hull_polytope
from hullchain.network import compile_network, default_bound
from hullchain.peeling import Dataset, peel

FIXTURES_DIR = Path(__file__).parent.parent / "data" / "fixtures"

NESTED_SQUARES = [
    ((0, 0), "pos"), ((4, 0), "pos"), ((4, 4), "pos"), ((0, 4), "pos"), ((2, 2), "pos"),
    ((1, 1), "neg"), ((3, 1), "neg"), ((3, 3), "neg"), ((1, 3), "neg"),
]


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


@pytest.fixture
def triangle_hull():
    return hull_polytope([(0, 0), (1, 0), (0, 1)], ClassLabel.POS, 1)


@pytest.fixture
def triangle_net(triangle_hull):
    """Single-triangle network with B = 2."""
    return compile_network([triangle_hull], 2.0)


@pytest.fixture
def nested_squares():
    return Dataset.from_pairs(NESTED_SQUARES)


@pytest.fixture
def nested_hulls(nested_squares):
    return peel(nested_squares)


@pytest.fixture
def nested_net(nested_squares, nested_hulls):
    bound = default_bound(p.coords for p in nested_squares.points)
    return compile_network(nested_hulls, bound)
