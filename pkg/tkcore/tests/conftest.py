import os.path

import pytest

from tkcore.bench import random_graph
from tkcore.graph import load_edge_list
from tkcore.tests import test_data_dir

EXAMPLE_GRAPH = os.path.join(test_data_dir, "example_graph.txt")


@pytest.fixture(scope="session")
def example_graph():
    return load_edge_list(EXAMPLE_GRAPH)


@pytest.fixture
def example_path():
    return EXAMPLE_GRAPH


@pytest.fixture
def make_random_graph():
    def factory(n_vertices, n_edges, t_max, seed):
        return random_graph(n_vertices, n_edges, t_max, seed)
    return factory
