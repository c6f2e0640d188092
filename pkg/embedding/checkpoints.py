"""Parameter checkpoints.

A checkpoint is one line of UTF-8 JSON followed by the raw parameter bytes::

    {"format": "rdsa-checkpoint", "version": 1, "dtype": "float32",
     "tensors": [{"name": "ae_layers.0.weight", "shape": [256, 1433], "offset": 0, "count": 366848}, ...],
     "extra": {...}}\\n
    <little-endian values of every tensor, concatenated in header order>

``offset`` and ``count`` are measured in elements, not bytes.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np
import torch

from app.exceptions import InputError, ShapeMismatch

logger = logging.getLogger(__name__)

FORMAT = 'rdsa-checkpoint'
VERSION = 1
_NUMPY_DTYPES = {'float32': '<f4', 'float64': '<f8'}


class CheckpointError(InputError):
    pass


def save_checkpoint(path, model: torch.nn.Module, extra: Optional[dict] = None) -> Path:
    path = Path(path)
    state = model.state_dict()
    dtype = 'float64' if any(t.dtype == torch.float64 for t in state.values()) else 'float32'
    tensors, blobs, offset = [], [], 0
    for name, tensor in state.items():
        values = tensor.detach().cpu().numpy().astype(_NUMPY_DTYPES[dtype]).ravel()
        tensors.append({'name': name, 'shape': list(tensor.shape), 'offset': offset, 'count': int(values.size)})
        blobs.append(values.tobytes())
        offset += int(values.size)
    header = {'format': FORMAT, 'version': VERSION, 'dtype': dtype, 'tensors': tensors, 'extra': extra or {}}
    with path.open('wb') as fh:
        fh.write(json.dumps(header).encode('utf-8') + b'\n')
        for blob in blobs:
            fh.write(blob)
    logger.debug('Saved %d tensors (%d values) to %s', len(tensors), offset, path)
    return path


def read_checkpoint(path):
    """Return ``(header, {name: numpy array})`` without touching any model."""
    path = Path(path)
    if not path.is_file():
        raise CheckpointError('Checkpoint not found: %s' % path)
    with path.open('rb') as fh:
        try:
            header = json.loads(fh.readline().decode('utf-8'))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CheckpointError('%s: unreadable checkpoint header (%s)' % (path, exc)) from exc
        payload = fh.read()
    if header.get('format') != FORMAT or header.get('version') != VERSION:
        raise CheckpointError('%s is not a version %d checkpoint' % (path, VERSION))

    values = np.frombuffer(payload, dtype=_NUMPY_DTYPES[header['dtype']])
    arrays = {}
    for entry in header['tensors']:
        chunk = values[entry['offset']:entry['offset'] + entry['count']]
        if chunk.size != entry['count']:
            raise CheckpointError('%s is truncated at tensor %s' % (path, entry['name']))
        arrays[entry['name']] = chunk.reshape(entry['shape'])
    return header, arrays


def load_checkpoint(path, model: torch.nn.Module) -> dict:
    """Copy the stored parameters into ``model`` and return the header's ``extra`` block."""
    header, arrays = read_checkpoint(path)
    state = model.state_dict()
    if set(arrays) != set(state):
        raise ShapeMismatch('Checkpoint tensors %s do not match the model (%s)' % (
            sorted(set(arrays) ^ set(state)), path))
    restored = {}
    for name, target in state.items():
        if tuple(arrays[name].shape) != tuple(target.shape):
            raise ShapeMismatch('%s: expected shape %s, checkpoint has %s' % (
                name, tuple(target.shape), arrays[name].shape))
        restored[name] = torch.from_numpy(arrays[name].copy()).to(dtype=target.dtype, device=target.device)
    model.load_state_dict(restored)
    return header.get('extra', {})
