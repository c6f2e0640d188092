from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Optional, Tuple

from django.conf import settings

from app.exceptions import InputError
from embedding.config import EncoderConfig

VARIANTS = ('full', 'no_landmark', 'no_ae', 'no_soft_assignment')
FEATURE_NORMS = ('none', 'l1', 'l2')
AUX_KINDS = ('labels', 'central', 'none')


@dataclass(frozen=True)
class AuxMode:
    kind: str = 'labels'
    fraction: float = 0.1

    @classmethod
    def parse(cls, value) -> 'AuxMode':
        """``labels:F``, ``central[:F]`` or ``none``; the fraction defaults to 0.1."""
        if isinstance(value, cls):
            return value
        kind, _, fraction = str(value).strip().lower().partition(':')
        if kind not in AUX_KINDS:
            raise ValueError('Unknown aux mode %r, expected labels:F, central or none' % value)
        if kind == 'none':
            return cls(kind='none', fraction=0.0)
        try:
            fraction = float(fraction) if fraction else 0.1
        except ValueError:
            raise ValueError('Aux fraction must be a number, got %r' % fraction) from None
        if not 0 < fraction <= 1:
            raise ValueError('Aux fraction must lie in (0, 1], got %r' % fraction)
        return cls(kind=kind, fraction=fraction)

    def __str__(self):
        return 'none' if self.kind == 'none' else '%s:%g' % (self.kind, self.fraction)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = getattr(settings, 'RDSA_EPOCHS', 300)
    learning_rate: float = getattr(settings, 'RDSA_LEARNING_RATE', 0.001)
    # None picks the dataset override from RDSA_DATASET_SIGMA, else RDSA_SIGMA
    sigma: Optional[float] = None
    alpha: float = getattr(settings, 'RDSA_ALPHA', 0.2)
    nu: float = getattr(settings, 'RDSA_NU', 1.0)
    seed: int = 0
    batch_size: Optional[int] = None
    aux_mode: AuxMode = AuxMode.parse(getattr(settings, 'RDSA_AUX_MODE', 'labels:0.1'))
    hidden_dims: Tuple[int, ...] = tuple(getattr(settings, 'RDSA_HIDDEN_DIMS', (256, 128, 64)))
    graph_layer: str = getattr(settings, 'RDSA_GRAPH_LAYER', 'sage')
    variant: str = 'full'
    feature_norm: str = getattr(settings, 'RDSA_FEATURE_NORM', 'l2')
    log_metrics: bool = False
    dtype: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'aux_mode', AuxMode.parse(self.aux_mode))
        object.__setattr__(self, 'hidden_dims', tuple(int(d) for d in self.hidden_dims))
        if self.epochs < 1:
            raise InputError('epochs must be at least 1, got %d' % self.epochs)
        if self.learning_rate <= 0:
            raise InputError('learning rate must be positive, got %r' % self.learning_rate)
        if self.sigma is not None and not 0.0 <= self.sigma <= 1.0:
            raise InputError('sigma must lie in [0, 1], got %r' % self.sigma)
        if self.alpha < 0:
            raise InputError('alpha must be non-negative, got %r' % self.alpha)
        if self.nu <= 0:
            raise InputError('nu must be positive, got %r' % self.nu)
        if self.batch_size is not None and self.batch_size < 1:
            raise InputError('batch size must be positive, got %d' % self.batch_size)
        if self.variant not in VARIANTS:
            raise InputError('Unknown variant %r, expected one of %s' % (self.variant, ', '.join(VARIANTS)))
        if self.feature_norm not in FEATURE_NORMS:
            raise InputError('Unknown feature normalisation %r' % self.feature_norm)
        if self.dtype not in (None, 'float32', 'float64'):
            raise InputError('dtype must be float32 or float64, got %r' % self.dtype)

    def for_dataset(self, name: str) -> 'TrainConfig':
        """Fill in the fusion weight for ``name`` when none was given explicitly."""
        if self.sigma is not None:
            return self
        overrides = getattr(settings, 'RDSA_DATASET_SIGMA', {})
        sigma = overrides.get((name or '').lower(), getattr(settings, 'RDSA_SIGMA', 0.5))
        return replace(self, sigma=sigma)

    @property
    def uses_reconstruction(self) -> bool:
        return self.variant not in ('no_ae',)

    @property
    def uses_structure(self) -> bool:
        return self.variant != 'no_soft_assignment'

    @property
    def uses_landmarks(self) -> bool:
        return self.variant not in ('no_landmark', 'no_soft_assignment')

    def encoder_config(self) -> EncoderConfig:
        sigma = self.sigma if self.sigma is not None else getattr(settings, 'RDSA_SIGMA', 0.5)
        if self.variant == 'no_ae':
            sigma = 0.0
        return EncoderConfig(hidden_dims=self.hidden_dims, sigma=sigma, graph_layer=self.graph_layer)

    def as_dict(self) -> dict:
        data = asdict(self)
        data['aux_mode'] = str(self.aux_mode)
        data['hidden_dims'] = list(self.hidden_dims)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'TrainConfig':
        known = {key: value for key, value in data.items() if key in cls.__dataclass_fields__}
        return cls(**known)
