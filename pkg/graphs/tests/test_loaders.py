import json
import os
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from graphs.converters import read_linqs
from graphs.exceptions import (
    AsymmetryDetected,
    DuplicateEdge,
    LabelOutOfRange,
    MalformedLine,
    MetadataMismatch,
    MissingFile,
    SelfLoop,
)
from graphs.loaders import graph_from_adjacency, load_graph, save_graph, statistics_table
from graphs.structures import NoiseLevel
from graphs.tensors import GraphTensors
from graphs.tests.factories import make_graph, path_graph, two_triangles


class DatasetDirMixin:
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write_dataset(self, edges='0\t1\n1\t2\n', features='1,0\n0,1\n1,1\n', labels='0\n1\n1\n',
                      meta=None):
        meta = meta or {'num_nodes': 3, 'num_clusters': 2, 'name': 'tiny'}
        (self.dir / 'edges.tsv').write_text(edges)
        (self.dir / 'features.csv').write_text(features)
        if labels is not None:
            (self.dir / 'labels.txt').write_text(labels)
        (self.dir / 'meta.json').write_text(json.dumps(meta))
        return self.dir


class LoadGraphTests(DatasetDirMixin, SimpleTestCase):
    def test_loads_valid_directory(self):
        graph = load_graph(self.write_dataset())
        self.assertEqual(graph.num_nodes, 3)
        self.assertEqual(graph.num_edges, 2)
        self.assertEqual(graph.num_features, 2)
        self.assertEqual(graph.name, 'tiny')
        np.testing.assert_array_equal(graph.degrees, [1, 2, 1])
        np.testing.assert_array_equal(graph.labels, [0, 1, 1])

    def test_adjacency_is_symmetric_without_diagonal(self):
        adjacency = load_graph(self.write_dataset()).adjacency
        self.assertEqual((adjacency != adjacency.T).nnz, 0)
        self.assertFalse(adjacency.diagonal().any())

    def test_labels_are_optional(self):
        graph = load_graph(self.write_dataset(labels=None))
        self.assertIsNone(graph.labels)

    def test_missing_file(self):
        self.write_dataset()
        os.remove(self.dir / 'features.csv')
        with self.assertRaises(MissingFile):
            load_graph(self.dir)

    def test_duplicate_reversed_edge_reports_line(self):
        with self.assertRaises(DuplicateEdge) as ctx:
            load_graph(self.write_dataset(edges='0\t1\n1\t0\n'))
        self.assertEqual(ctx.exception.line_no, 2)

    def test_self_loop(self):
        with self.assertRaises(SelfLoop):
            load_graph(self.write_dataset(edges='1\t1\n'))

    def test_malformed_edge_line(self):
        with self.assertRaises(MalformedLine) as ctx:
            load_graph(self.write_dataset(edges='0\t1\n0 x\n'))
        self.assertEqual(ctx.exception.line_no, 2)

    def test_endpoint_out_of_range(self):
        with self.assertRaises(MalformedLine):
            load_graph(self.write_dataset(edges='0\t3\n'))

    def test_ragged_features(self):
        with self.assertRaises(MalformedLine) as ctx:
            load_graph(self.write_dataset(features='1,0\n0\n1,1\n'))
        self.assertEqual(ctx.exception.line_no, 2)

    def test_label_out_of_range(self):
        with self.assertRaises(LabelOutOfRange):
            load_graph(self.write_dataset(labels='0\n2\n1\n'))

    def test_row_count_disagrees_with_meta(self):
        with self.assertRaises(MetadataMismatch):
            load_graph(self.write_dataset(meta={'num_nodes': 4, 'num_clusters': 2, 'name': 'tiny'}))

    def test_save_then_load_reproduces_graph(self):
        original = two_triangles()
        loaded = load_graph(save_graph(original, self.dir / 'copy'))
        np.testing.assert_array_equal(loaded.edges, original.edges)
        np.testing.assert_array_equal(loaded.features, original.features)
        np.testing.assert_array_equal(loaded.labels, original.labels)
        self.assertEqual(loaded.num_clusters, original.num_clusters)


class GraphStructureTests(SimpleTestCase):
    def test_edges_are_canonical(self):
        graph = path_graph(4)
        self.assertTrue((graph.edges[:, 0] < graph.edges[:, 1]).all())

    def test_arrays_are_read_only(self):
        graph = two_triangles()
        with self.assertRaises(ValueError):
            graph.edges[0, 0] = 5

    def test_subgraph_reindexes_nodes(self):
        sub = two_triangles().subgraph([5, 3, 4, 0])
        self.assertEqual(sub.num_nodes, 4)
        np.testing.assert_array_equal(sub.edges, [[1, 2], [1, 3], [2, 3]])
        np.testing.assert_array_equal(sub.labels, [0, 1, 1, 1])

    def test_noise_level_parsing(self):
        self.assertIs(NoiseLevel.parse('3'), NoiseLevel.III)
        self.assertIs(NoiseLevel.parse('clean'), NoiseLevel.CLEAN)
        with self.assertRaises(ValueError):
            NoiseLevel.parse('4')

    def test_statistics_table(self):
        table = statistics_table([two_triangles(), path_graph(3)])
        self.assertEqual(table.headers, ['name', 'nodes', 'edges', 'features', 'clusters'])
        self.assertEqual(table[0], ('test', 6, 6, 2, 2))


class GraphFromAdjacencyTests(SimpleTestCase):
    def test_rejects_directed_matrix(self):
        with self.assertRaises(AsymmetryDetected):
            graph_from_adjacency(sp.csr_matrix(np.array([[0, 1], [0, 0]])), np.eye(2), num_clusters=1)

    def test_rejects_diagonal(self):
        with self.assertRaises(SelfLoop):
            graph_from_adjacency(sp.csr_matrix(np.eye(2)), np.eye(2), num_clusters=1)

    def test_symmetrize_folds_directions_and_drops_loops(self):
        matrix = sp.csr_matrix(np.array([[1, 1, 0], [0, 0, 1], [0, 1, 0]]))
        graph = graph_from_adjacency(matrix, np.eye(3), labels=[0, 1, 1], symmetrize=True)
        np.testing.assert_array_equal(graph.edges, [[0, 1], [1, 2]])
        self.assertEqual(graph.num_clusters, 2)


class GraphTensorsTests(SimpleTestCase):
    def test_isolated_node_has_zero_mean_row(self):
        graph = make_graph(4, [(0, 1), (1, 2)], num_clusters=1)
        tensors = GraphTensors.from_graph(graph)
        dense = tensors.mean_operator.to_dense().numpy()
        np.testing.assert_allclose(dense[3], 0.0)
        np.testing.assert_allclose(dense[:3].sum(axis=1), 1.0, atol=1e-6)

    def test_gcn_operator_is_symmetric(self):
        dense = GraphTensors.from_graph(two_triangles()).gcn_operator.to_dense().numpy()
        np.testing.assert_allclose(dense, dense.T, atol=1e-7)


class DatasetCommandTests(DatasetDirMixin, SimpleTestCase):
    def test_convert_linqs_dump(self):
        content = self.dir / 'tiny.content'
        cites = self.dir / 'tiny.cites'
        content.write_text('p1 1 0 AI\np2 0 1 DB\np3 1 1 DB\n')
        cites.write_text('p1 p2\np2 p1\np3 p3\np2 p3\nunknown p1\n')
        call_command('convert_dataset', str(content), str(cites), str(self.dir / 'out'),
                     format='linqs', stdout=StringIO())
        graph = load_graph(self.dir / 'out')
        np.testing.assert_array_equal(graph.edges, [[0, 1], [1, 2]])
        np.testing.assert_array_equal(graph.labels, [0, 1, 1])
        self.assertEqual(graph.name, 'out')

    def test_read_linqs_strict_rejects_directed_citations(self):
        content = self.dir / 'tiny.content'
        cites = self.dir / 'tiny.cites'
        content.write_text('a 1 X\nb 0 Y\n')
        cites.write_text('a b\n')
        with self.assertRaises(AsymmetryDetected):
            read_linqs(content, cites, symmetrize=False)

    def test_convert_wrong_source_count_exits_with_input_code(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('convert_dataset', 'only-one', str(self.dir / 'out'), format='linqs', stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_dataset_stats_prints_and_exports(self):
        save_graph(two_triangles(), self.dir / 'triangles')
        out = StringIO()
        csv_path = self.dir / 'stats.csv'
        call_command('dataset_stats', str(self.dir / 'triangles'), csv=str(csv_path), stdout=out)
        self.assertIn('clusters', out.getvalue())
        self.assertIn('test,6,6,2,2', csv_path.read_text().replace('\r', ''))

    def test_dataset_stats_missing_directory(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('dataset_stats', str(self.dir / 'absent'), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
