import numpy as np
import pytest

from semloc import LabelSet, SemanticNode, build_graph


@pytest.fixture
def path_graph():
    """1(label 0) - 2(label 1) - 3(label 2) chain plus an isolated label-0 node."""
    nodes = [
        SemanticNode(0, 0, [0.0, 0.0, 0.0], 1),
        SemanticNode(1, 1, [5.0, 0.0, 0.0], 1),
        SemanticNode(2, 2, [10.0, 0.0, 0.0], 1),
        SemanticNode(3, 0, [100.0, 0.0, 0.0], 1),
    ]
    return build_graph(nodes, connectivity_threshold=6.0,
                       label_set=LabelSet.generic(3))


def random_graph(rng, n_nodes, n_labels, threshold=10.0, extent=30.0):
    nodes = [SemanticNode(i, int(rng.integers(n_labels)),
                          rng.uniform(0, extent, size=3),
                          int(rng.integers(1, 50)))
             for i in range(n_nodes)]
    return build_graph(nodes, threshold, label_set=LabelSet.generic(n_labels))


def random_rotation(rng):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])
