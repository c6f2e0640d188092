"""Fused autoencoder / graph network encoder.

Every layer runs an attribute path ``x_l = act_ae(W_l x_{l-1})`` and a graph
path ``g_l = act_gnn(V_l P h_{l-1})`` where ``P`` is the neighbour-mean
operator (``sage``) or the symmetric GCN propagation (``gcn``). The fused
representation ``h_l = sigma * x_l + (1 - sigma) * g_l`` feeds the next graph
layer; ``h_0 = x_0 = X``. The decoder mirrors the attribute path from its
bottleneck back to the input width.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import torch
import torch.nn.functional as F
from torch import nn

from app.exceptions import ShapeMismatch
from embedding.config import EncoderConfig
from graphs.tensors import GraphTensors

logger = logging.getLogger(__name__)


def activation(name: str):
    return getattr(F, name)


@dataclass
class EmbeddingState:
    H: torch.Tensor
    X_hat: torch.Tensor
    params: Tuple[nn.Parameter, ...]

    @property
    def is_finite(self) -> bool:
        return bool(torch.isfinite(self.H).all() and torch.isfinite(self.X_hat).all())


class FusionEncoder(nn.Module):
    def __init__(self, in_features: int, config: Optional[EncoderConfig] = None):
        super().__init__()
        self.config = config or EncoderConfig()
        self.in_features = in_features
        self.sigma = self.config.sigma
        dims = (in_features,) + self.config.hidden_dims

        self.ae_layers = nn.ModuleList(nn.Linear(a, b) for a, b in zip(dims[:-1], dims[1:]))
        self.graph_layers = nn.ModuleList(nn.Linear(a, b) for a, b in zip(dims[:-1], dims[1:]))
        reversed_dims = dims[::-1]
        self.decoder_layers = nn.ModuleList(
            nn.Linear(a, b) for a, b in zip(reversed_dims[:-1], reversed_dims[1:]))

        self._ae_act = activation(self.config.ae_activation)
        self._gnn_act = activation(self.config.gnn_activation)

    def propagation(self, graph: GraphTensors) -> torch.Tensor:
        return graph.gcn_operator if self.config.graph_layer == 'gcn' else graph.mean_operator

    def encode(self, graph: GraphTensors, features: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        operator = self.propagation(graph)
        x = h = features
        for ae_layer, graph_layer in zip(self.ae_layers, self.graph_layers):
            x = self._ae_act(ae_layer(x))
            g = self._gnn_act(graph_layer(torch.sparse.mm(operator, h)))
            h = self.sigma * x + (1.0 - self.sigma) * g
        return h, x

    def decode(self, code: torch.Tensor) -> torch.Tensor:
        out = code
        last = len(self.decoder_layers) - 1
        for index, layer in enumerate(self.decoder_layers):
            out = layer(out)
            if index < last:
                out = self._ae_act(out)
        return out

    def forward(self, graph: GraphTensors, features: Optional[torch.Tensor] = None) -> EmbeddingState:
        features = graph.features if features is None else features
        if features.dim() != 2 or features.shape[1] != self.in_features:
            raise ShapeMismatch('Encoder expects %d features per node, got shape %s' % (
                self.in_features, tuple(features.shape)))
        if features.shape[0] != graph.num_nodes:
            raise ShapeMismatch('%d feature rows for %d nodes' % (features.shape[0], graph.num_nodes))
        H, code = self.encode(graph, features)
        return EmbeddingState(H=H, X_hat=self.decode(code), params=tuple(self.parameters()))


def reconstruction_loss(X: torch.Tensor, X_hat: torch.Tensor) -> torch.Tensor:
    """(1 / 2N) * squared Frobenius distance between the attributes and their reconstruction."""
    if X.shape != X_hat.shape:
        raise ShapeMismatch('Cannot compare attributes of shape %s with reconstruction %s' % (
            tuple(X.shape), tuple(X_hat.shape)))
    return (X - X_hat).pow(2).sum() / (2 * X.shape[0])
