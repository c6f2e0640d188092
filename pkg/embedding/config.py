from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Tuple

from django.conf import settings

from app.exceptions import InputError

ACTIVATIONS = ('relu', 'selu', 'elu', 'leaky_relu', 'tanh')
GRAPH_LAYERS = ('sage', 'gcn')


@dataclass(frozen=True)
class EncoderConfig:
    hidden_dims: Tuple[int, ...] = tuple(getattr(settings, 'RDSA_HIDDEN_DIMS', (256, 128, 64)))
    sigma: float = getattr(settings, 'RDSA_SIGMA', 0.5)
    ae_activation: str = 'relu'
    gnn_activation: str = 'selu'
    graph_layer: str = getattr(settings, 'RDSA_GRAPH_LAYER', 'sage')

    def __post_init__(self):
        object.__setattr__(self, 'hidden_dims', tuple(int(d) for d in self.hidden_dims))
        if not self.hidden_dims or any(d <= 0 for d in self.hidden_dims):
            raise InputError('hidden_dims must be a non-empty list of positive sizes, got %r' % (self.hidden_dims,))
        if not 0.0 <= self.sigma <= 1.0:
            raise InputError('sigma must lie in [0, 1], got %r' % self.sigma)
        for activation in (self.ae_activation, self.gnn_activation):
            if activation not in ACTIVATIONS:
                raise InputError('Unknown activation %r, expected one of %s' % (activation, ', '.join(ACTIVATIONS)))
        if self.graph_layer not in GRAPH_LAYERS:
            raise InputError('Unknown graph layer %r, expected sage or gcn' % self.graph_layer)

    @property
    def embedding_dim(self) -> int:
        return self.hidden_dims[-1]

    def as_dict(self) -> dict:
        data = asdict(self)
        data['hidden_dims'] = list(self.hidden_dims)
        return data
