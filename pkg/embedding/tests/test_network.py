import tempfile
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from django.test import SimpleTestCase

from app.exceptions import InputError, ShapeMismatch
from embedding.checkpoints import CheckpointError, load_checkpoint, read_checkpoint, save_checkpoint
from embedding.config import EncoderConfig
from embedding.network import FusionEncoder, reconstruction_loss
from graphs.tensors import GraphTensors
from graphs.tests.factories import make_graph, random_graph


def build(graph, hidden_dims=(4, 3), sigma=0.5, graph_layer='sage', seed=0):
    torch.manual_seed(seed)
    config = EncoderConfig(hidden_dims=hidden_dims, sigma=sigma, graph_layer=graph_layer)
    model = FusionEncoder(graph.num_features, config).double()
    return model, GraphTensors.from_graph(graph, dtype=torch.float64)


class EncoderConfigTests(SimpleTestCase):
    def test_defaults(self):
        config = EncoderConfig()
        self.assertEqual(config.hidden_dims, (256, 128, 64))
        self.assertEqual(config.sigma, 0.5)
        self.assertEqual(config.embedding_dim, 64)

    def test_rejects_sigma_outside_unit_interval(self):
        with self.assertRaises(InputError):
            EncoderConfig(sigma=1.5)

    def test_rejects_empty_or_non_positive_dims(self):
        with self.assertRaises(InputError):
            EncoderConfig(hidden_dims=())
        with self.assertRaises(InputError):
            EncoderConfig(hidden_dims=(8, 0))

    def test_rejects_unknown_graph_layer(self):
        with self.assertRaises(InputError):
            EncoderConfig(graph_layer='gat')


class FusionEncoderTests(SimpleTestCase):
    def setUp(self):
        self.graph = random_graph(12, edge_prob=0.3, num_features=5, seed=1)

    def manual_paths(self, model, tensors):
        x = h = g = tensors.features
        for ae_layer, graph_layer in zip(model.ae_layers, model.graph_layers):
            x = F.relu(ae_layer(x))
            g = F.selu(graph_layer(torch.sparse.mm(tensors.mean_operator, h)))
            h = model.sigma * x + (1 - model.sigma) * g
        return x, g

    def test_output_shapes(self):
        model, tensors = build(self.graph)
        state = model(tensors)
        self.assertEqual(tuple(state.H.shape), (12, 3))
        self.assertEqual(tuple(state.X_hat.shape), (12, 5))
        self.assertTrue(state.is_finite)
        self.assertEqual(len(state.params), len(list(model.parameters())))

    def test_sigma_one_is_pure_autoencoder_path(self):
        model, tensors = build(self.graph, sigma=1.0)
        ae_path, _ = self.manual_paths(model, tensors)
        torch.testing.assert_close(model(tensors).H, ae_path)

    def test_sigma_zero_is_pure_graph_path(self):
        model, tensors = build(self.graph, sigma=0.0)
        _, graph_path = self.manual_paths(model, tensors)
        torch.testing.assert_close(model(tensors).H, graph_path)

    def test_isolated_node_graph_path_is_bias_only(self):
        graph = make_graph(1, [], num_clusters=1, features=np.array([[2.0, -1.0]]))
        model, tensors = build(graph, hidden_dims=(3,), sigma=0.0)
        expected = F.selu(model.graph_layers[0].bias).reshape(1, -1)
        torch.testing.assert_close(model(tensors).H, expected)

    def test_layer_output_is_affine_in_sigma(self):
        outputs = []
        for sigma in (0.0, 0.5, 1.0):
            model, tensors = build(self.graph, hidden_dims=(4,), sigma=sigma)
            outputs.append(model(tensors).H.detach())
        torch.testing.assert_close(outputs[1], (outputs[0] + outputs[2]) / 2, atol=1e-9, rtol=0)

    def test_deterministic_for_fixed_seed(self):
        first, tensors = build(self.graph, seed=11)
        second, _ = build(self.graph, seed=11)
        self.assertTrue(torch.equal(first(tensors).H, second(tensors).H))

    def test_gcn_layer_runs(self):
        model, tensors = build(self.graph, graph_layer='gcn')
        self.assertTrue(model(tensors).is_finite)

    def test_feature_width_mismatch(self):
        model, tensors = build(self.graph)
        with self.assertRaises(ShapeMismatch):
            model(tensors, torch.zeros(12, 4, dtype=torch.float64))

    def test_reconstruction_gradients_match_finite_differences(self):
        graph = random_graph(8, edge_prob=0.4, num_features=3, seed=2)
        model, tensors = build(graph, hidden_dims=(4, 2))
        names = [name for name, _ in model.named_parameters()]
        params = tuple(p.detach().clone().requires_grad_(True) for p in model.parameters())

        def loss(*flat):
            state = torch.func.functional_call(model, dict(zip(names, flat)), (tensors,))
            return reconstruction_loss(tensors.features, state.X_hat)

        self.assertTrue(torch.autograd.gradcheck(loss, params, eps=1e-5, atol=1e-8, rtol=1e-4))


class ReconstructionLossTests(SimpleTestCase):
    def test_identical_inputs(self):
        x = torch.rand(3, 2)
        self.assertEqual(reconstruction_loss(x, x.clone()).item(), 0.0)

    def test_single_row(self):
        loss = reconstruction_loss(torch.tensor([[1.0, 0.0]]), torch.zeros(1, 2))
        self.assertAlmostEqual(loss.item(), 0.5)

    def test_two_rows(self):
        loss = reconstruction_loss(torch.ones(2, 2), torch.zeros(2, 2))
        self.assertAlmostEqual(loss.item(), 1.0)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeMismatch):
            reconstruction_loss(torch.ones(2, 2), torch.ones(2, 3))


class CheckpointTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / 'checkpoint.bin'
        self.graph = random_graph(6, num_features=4, seed=3)

    def tearDown(self):
        self.tmp.cleanup()

    def test_restores_parameters_and_extra(self):
        model, tensors = build(self.graph, seed=1)
        save_checkpoint(self.path, model, extra={'epoch': 7})
        other, _ = build(self.graph, seed=2)
        extra = load_checkpoint(self.path, other)
        self.assertEqual(extra, {'epoch': 7})
        self.assertTrue(torch.equal(model(tensors).H, other(tensors).H))

    def test_header_describes_every_tensor(self):
        model, _ = build(self.graph)
        save_checkpoint(self.path, model)
        header, arrays = read_checkpoint(self.path)
        self.assertEqual(header['dtype'], 'float64')
        self.assertEqual([entry['name'] for entry in header['tensors']], list(model.state_dict()))
        self.assertEqual(arrays['ae_layers.0.weight'].shape, (4, 4))

    def test_truncated_file(self):
        model, _ = build(self.graph)
        save_checkpoint(self.path, model)
        self.path.write_bytes(self.path.read_bytes()[:-16])
        with self.assertRaises(CheckpointError):
            read_checkpoint(self.path)

    def test_architecture_mismatch(self):
        model, _ = build(self.graph, hidden_dims=(4, 3))
        save_checkpoint(self.path, model)
        other, _ = build(self.graph, hidden_dims=(5, 3))
        with self.assertRaises(ShapeMismatch):
            load_checkpoint(self.path, other)
