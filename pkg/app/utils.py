import random

import numpy as np
import torch
from django.conf import settings


def seed_everything(seed: int) -> np.random.Generator:
    """Seed every RNG the pipeline touches and return a numpy generator for it."""
    random.seed(seed)
    np.random.seed(seed % (2 ** 32))
    torch.manual_seed(seed)
    return np.random.default_rng(seed)


def get_device() -> torch.device:
    device = getattr(settings, 'RDSA_DEVICE', 'cpu')
    if device.startswith('cuda') and not torch.cuda.is_available():
        device = 'cpu'
    return torch.device(device)


def get_dtype(name=None) -> torch.dtype:
    name = name or getattr(settings, 'RDSA_DTYPE', 'float32')
    return {'float32': torch.float32, 'float64': torch.float64}.get(name, torch.float32)
