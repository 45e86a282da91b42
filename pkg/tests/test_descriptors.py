import csv

import numpy as np
import pytest

from semloc import (LabelSet, SemanticNode, build_graph, extract_histograms,
                    extract_neighbor_vectors, extract_random_walks)
from semloc.descriptors import dump_descriptors_csv, walk_similarity

from conftest import random_graph


def brute_force_histogram(graph, i):
    """Enumerate every (i, m, n) 2-hop path directly."""
    n_l = graph.label_set.n_l
    v = np.zeros(n_l ** 3, dtype=np.int64)
    for m in graph.neighbors[i]:
        for n in graph.neighbors[m]:
            cell = (graph.labels[i] * n_l + graph.labels[m]) * n_l + graph.labels[n]
            v[cell] += 1
    return v


class TestHistogram:
    def test_chain_endpoint(self, path_graph):
        descs = extract_histograms(path_graph)
        n_l = 3
        v = descs[0].counts
        # start label 0, neighbor label 1, second hops back to 0 and on to 2
        assert v[(0 * n_l + 1) * n_l + 0] == 1
        assert v[(0 * n_l + 1) * n_l + 2] == 1
        assert v.sum() == 2

    def test_chain_middle(self, path_graph):
        v = extract_histograms(path_graph)[1].counts
        n_l = 3
        assert v[(1 * n_l + 0) * n_l + 1] == 1
        assert v[(1 * n_l + 2) * n_l + 1] == 1
        assert v.sum() == 2

    def test_isolated_node_zero(self, path_graph):
        v = extract_histograms(path_graph)[3].counts
        assert v.shape == (27,)
        assert not v.any()

    def test_random_oracle(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            g = random_graph(rng, int(rng.integers(2, 50)), int(rng.integers(1, 8)))
            descs = extract_histograms(g)
            for i in range(len(g)):
                assert np.array_equal(descs[i].counts, brute_force_histogram(g, i))

    def test_sum_rule(self):
        rng = np.random.default_rng(42)
        g = random_graph(rng, 40, 4)
        for d in extract_histograms(g):
            expected = sum(g.degree(m) for m in g.neighbors[d.node_id])
            assert d.counts.sum() == expected

    def test_position_independence(self):
        rng = np.random.default_rng(43)
        g = random_graph(rng, 30, 4)
        moved = build_graph(
            [SemanticNode(n.id, n.label, n.position + [100, -50, 3], n.size)
             for n in g.nodes],
            g.connectivity_threshold, label_set=g.label_set)
        for a, b in zip(extract_histograms(g), extract_histograms(moved)):
            assert np.array_equal(a.counts, b.counts)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(44)
        g = random_graph(rng, 25, 3)
        perm = rng.permutation(len(g))
        inv = np.argsort(perm)
        relabeled = build_graph(
            [SemanticNode(int(inv[n.id]), n.label, n.position, n.size)
             for n in sorted(g.nodes, key=lambda nd: inv[nd.id])],
            g.connectivity_threshold, label_set=g.label_set)
        da = extract_histograms(g)
        db = extract_histograms(relabeled)
        for i in range(len(g)):
            assert np.array_equal(da[i].counts, db[inv[i]].counts)

    def test_path_length_two(self, path_graph):
        v = extract_histograms(path_graph, path_length=2)[1].counts
        assert v.shape == (9,)
        assert v[1 * 3 + 0] == 1 and v[1 * 3 + 2] == 1 and v.sum() == 2

    def test_path_length_four_oracle(self):
        rng = np.random.default_rng(45)
        g = random_graph(rng, 15, 2)
        n_l = 2
        descs = extract_histograms(g, path_length=4)
        for i in range(len(g)):
            v = np.zeros(n_l ** 4, dtype=np.int64)
            for m in g.neighbors[i]:
                for n in g.neighbors[m]:
                    for o in g.neighbors[n]:
                        cell = ((g.labels[i] * n_l + g.labels[m]) * n_l
                                + g.labels[n]) * n_l + g.labels[o]
                        v[cell] += 1
            assert np.array_equal(descs[i].counts, v)


class TestNeighborVector:
    def test_chain_middle(self, path_graph):
        assert extract_neighbor_vectors(path_graph)[1].counts.tolist() == [1, 0, 1]

    def test_isolated(self, path_graph):
        assert not extract_neighbor_vectors(path_graph)[3].counts.any()

    def test_complete_graph(self):
        nodes = [SemanticNode(i, 0, [float(i), 0, 0], 1) for i in range(4)]
        g = build_graph(nodes, 100.0, label_set=LabelSet.generic(2))
        for d in extract_neighbor_vectors(g):
            assert d.counts.tolist() == [3, 0]

    def test_sums_to_degree(self):
        rng = np.random.default_rng(51)
        g = random_graph(rng, 30, 4)
        for d in extract_neighbor_vectors(g):
            assert d.counts.sum() == g.degree(d.node_id)


class TestRandomWalks:
    def test_chain_walks_enumerated(self, path_graph):
        descs = extract_random_walks(path_graph, walk_count=50, walk_depth=3, seed=9)
        allowed = {(0, 1, 0), (0, 1, 2)}
        assert len(descs[0].walks) == 50
        assert set(descs[0].walks) <= allowed

    def test_walks_start_with_owner_label(self, path_graph):
        for d in extract_random_walks(path_graph, 10, 4, seed=1):
            for walk in d.walks:
                assert walk[0] == path_graph.labels[d.node_id]
                assert len(walk) == 4

    def test_isolated_empty(self, path_graph):
        descs = extract_random_walks(path_graph, 10, 3, seed=2)
        assert descs[3].walks == ()

    def test_deterministic(self, path_graph):
        a = extract_random_walks(path_graph, 20, 4, seed=7)
        b = extract_random_walks(path_graph, 20, 4, seed=7)
        assert [d.walks for d in a] == [d.walks for d in b]

    def test_seed_changes_walks(self):
        rng = np.random.default_rng(52)
        g = random_graph(rng, 20, 3, threshold=20.0)
        a = extract_random_walks(g, 30, 4, seed=1)
        b = extract_random_walks(g, 30, 4, seed=2)
        assert any(x.walks != y.walks for x, y in zip(a, b))

    def test_similarity_identical_and_disjoint(self, path_graph):
        descs = extract_random_walks(path_graph, 40, 3, seed=3)
        assert walk_similarity(descs[0], descs[0], 40) == 1.0
        assert walk_similarity(descs[0], descs[3], 40) == 0.0

    def test_invalid_args(self, path_graph):
        with pytest.raises(ValueError):
            extract_random_walks(path_graph, 0, 3)
        with pytest.raises(ValueError):
            extract_random_walks(path_graph, 10, 1)


class TestDump:
    def test_csv_omits_zero_cells(self, tmp_path, path_graph):
        descs = extract_histograms(path_graph)
        path = tmp_path / "d.csv"
        dump_descriptors_csv(descs, path)
        rows = list(csv.DictReader(open(path)))
        assert all(int(r["count"]) > 0 for r in rows)
        total = sum(int(r["count"]) for r in rows)
        assert total == sum(d.counts.sum() for d in descs)
