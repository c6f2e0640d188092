from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from app.exceptions import LabelsRequired
from graphs.exceptions import NotEnoughCrossClassPairs
from graphs.noise import cross_class_non_edges, inject_noise, noise_edge_count
from graphs.structures import NoiseLevel, NoiseSpec
from graphs.tests.factories import make_graph, random_graph, sized_graph, two_triangles


def added_edges(original, noisy):
    before = set(map(tuple, original.edges.tolist()))
    return [edge for edge in map(tuple, noisy.edges.tolist()) if edge not in before]


class NoiseCountTests(SimpleTestCase):
    def test_ten_edges_level_one_adds_three(self):
        graph = sized_graph(20, 10, num_clusters=2)
        self.assertEqual(noise_edge_count(graph, NoiseSpec(NoiseLevel.I)), 3)

    def test_counts_round_up_exactly(self):
        graph = sized_graph(20, 10, num_clusters=2)
        self.assertEqual(noise_edge_count(graph, NoiseSpec(NoiseLevel.II)), 6)
        self.assertEqual(noise_edge_count(graph, NoiseSpec(NoiseLevel.III)), 9)

    def test_cora_sized_graph_level_one(self):
        graph = sized_graph(2708, 5429)
        noisy = inject_noise(graph, NoiseSpec(NoiseLevel.I, seed=3))
        new_edges = added_edges(graph, noisy)
        self.assertEqual(len(new_edges), 1629)
        self.assertEqual(noisy.num_edges, 5429 + 1629)
        self.assertEqual(len(set(new_edges)), 1629)
        labels = graph.labels
        self.assertTrue(all(labels[i] != labels[j] for i, j in new_edges))


class InjectNoiseTests(SimpleTestCase):
    def test_clean_level_returns_graph_unchanged(self):
        graph = two_triangles()
        self.assertIs(inject_noise(graph, NoiseSpec(NoiseLevel.CLEAN)), graph)

    def test_added_edges_cross_classes_only(self):
        graph = random_graph(30, edge_prob=0.1, seed=4)
        noisy = inject_noise(graph, NoiseSpec(NoiseLevel.III, seed=1))
        new_edges = added_edges(graph, noisy)
        self.assertEqual(len(new_edges), noise_edge_count(graph, NoiseSpec(NoiseLevel.III)))
        self.assertTrue(all(graph.labels[i] != graph.labels[j] for i, j in new_edges))

    def test_deterministic_per_seed(self):
        graph = random_graph(40, edge_prob=0.1, seed=2)
        first = inject_noise(graph, NoiseSpec(NoiseLevel.II, seed=7))
        second = inject_noise(graph, NoiseSpec(NoiseLevel.II, seed=7))
        other = inject_noise(graph, NoiseSpec(NoiseLevel.II, seed=8))
        np.testing.assert_array_equal(first.edges, second.edges)
        self.assertFalse(np.array_equal(first.edges, other.edges))

    def test_original_graph_is_not_mutated(self):
        graph = two_triangles()
        before = graph.edges.copy()
        inject_noise(graph, NoiseSpec(NoiseLevel.III))
        np.testing.assert_array_equal(graph.edges, before)

    def test_requires_labels(self):
        graph = make_graph(3, [(0, 1)], labels=None)
        with self.assertRaises(LabelsRequired):
            inject_noise(graph, NoiseSpec(NoiseLevel.I))

    def test_not_enough_cross_class_pairs(self):
        # K2 plus an isolated node of the other class: only two cross-class pairs exist
        graph = make_graph(3, [(0, 1)], labels=[0, 0, 1]).with_added_edges([(0, 2), (1, 2)])
        self.assertEqual(cross_class_non_edges(graph), 0)
        with self.assertRaises(NotEnoughCrossClassPairs):
            inject_noise(graph, NoiseSpec(NoiseLevel.I))

    def test_enumeration_fallback_fills_dense_request(self):
        # two triangles have 9 cross pairs; level III asks for ceil(0.9 * 6) = 6 of them
        graph = two_triangles()
        with mock.patch('graphs.noise.MAX_REJECTION_FACTOR', 0):
            noisy = inject_noise(graph, NoiseSpec(NoiseLevel.III, seed=5))
        new_edges = added_edges(graph, noisy)
        self.assertEqual(len(new_edges), 6)
        self.assertTrue(all(graph.labels[i] != graph.labels[j] for i, j in new_edges))
