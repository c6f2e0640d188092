from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import torch
from django.conf import settings
from sklearn.preprocessing import normalize

from app.exceptions import TrainingDivergence
from app.utils import get_device, get_dtype, seed_everything
from clustering.landmarks import AssignmentPair, LandmarkSet, extract_modules, select_landmarks
from clustering.structure import AuxSubset, affinity, central_aux_subset, labels_aux_subset, struct_loss
from embedding.checkpoints import save_checkpoint
from embedding.network import EmbeddingState, FusionEncoder, reconstruction_loss
from evaluation.metrics import score_clustering
from graphs.structures import Graph
from graphs.tensors import GraphTensors
from training.config import TrainConfig

logger = logging.getLogger(__name__)

LOG_EVERY = getattr(settings, 'RDSA_LOG_EVERY', 10)
MINI_BATCH_THRESHOLD = getattr(settings, 'RDSA_MINI_BATCH_THRESHOLD', 20_000)
DEFAULT_BATCH_SIZE = getattr(settings, 'RDSA_DEFAULT_BATCH_SIZE', 4096)

HISTORY_FILE = 'history.jsonl'
CHECKPOINT_FILE = 'checkpoint.bin'
PREDICTIONS_FILE = 'predictions.txt'
EMBEDDINGS_FILE = 'embeddings.npy'
CONFIG_FILE = 'config.json'
DIVERGENCE_FILE = 'divergence.json'


class NonFiniteLoss(TrainingDivergence):
    def __init__(self, epoch: int, diagnostics: Optional[dict] = None):
        self.epoch = epoch
        self.diagnostics = diagnostics or {}
        # args must rebuild the instance when a worker process sends it back
        super().__init__(epoch, self.diagnostics)

    def __str__(self):
        return 'Non-finite loss at epoch %d' % self.epoch


@dataclass
class EpochLog:
    epoch: int
    res: float
    struct: float
    attr: float
    total: float
    metrics: Optional[Dict[str, float]] = None

    @property
    def losses(self):
        return self.res, self.struct, self.attr, self.total

    def as_dict(self) -> dict:
        data = asdict(self)
        if data['metrics'] is None:
            del data['metrics']
        return data


@dataclass
class TrainResult:
    model: FusionEncoder
    state: EmbeddingState
    landmarks: LandmarkSet
    pair: AssignmentPair
    labels: np.ndarray
    history: List[EpochLog] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    runtime: float = 0.0


def extract_clusters(pair: AssignmentPair) -> np.ndarray:
    """Cluster of every node: the landmark with the largest membership, lowest index on ties."""
    W = pair.W.detach().cpu().numpy()
    return np.asarray(pair.columns, dtype=np.int64)[np.argmax(W, axis=1)]


def _finite(value) -> object:
    value = float(value)
    return value if math.isfinite(value) else str(value)


class Trainer:
    """Joint optimisation of reconstruction, structure and node assignment losses on one graph."""

    def __init__(self, graph: Graph, config: TrainConfig, *, out_dir=None):
        self.graph = graph
        self.config = config.for_dataset(graph.name)
        self.out_dir = Path(out_dir) if out_dir else None
        self.device = get_device()
        self.dtype = get_dtype(self.config.dtype)

        batch_size = self.config.batch_size
        if batch_size is None and graph.num_nodes > MINI_BATCH_THRESHOLD:
            batch_size = DEFAULT_BATCH_SIZE
            logger.info('%s has %d nodes, training with mini-batches of %d', graph.name or 'graph',
                        graph.num_nodes, batch_size)
        self.batch_size = batch_size if batch_size and batch_size < graph.num_nodes else None

    def resolved_config(self) -> dict:
        data = self.config.as_dict()
        data['effective_batch_size'] = self.batch_size or self.graph.num_nodes
        data['device'] = str(self.device)
        data['dtype'] = str(self.dtype).replace('torch.', '')
        data['dataset'] = self.graph.name
        return data

    def _features(self) -> np.ndarray:
        if self.config.feature_norm == 'none':
            return self.graph.features
        return normalize(self.graph.features, norm=self.config.feature_norm)

    def _aux_subset(self, model, tensors, rng) -> Optional[AuxSubset]:
        mode = self.config.aux_mode
        if mode.kind == 'none' or not self.config.uses_structure:
            return None
        if mode.kind == 'labels':
            return labels_aux_subset(self.graph, mode.fraction, rng)
        with torch.no_grad():
            C = affinity(model(tensors).H)
        return central_aux_subset(self.graph, C, mode.fraction)

    def _batches(self, rng) -> List[Optional[np.ndarray]]:
        if self.batch_size is None:
            return [None]
        order = rng.permutation(self.graph.num_nodes)
        return [np.sort(order[start:start + self.batch_size])
                for start in range(0, self.graph.num_nodes, self.batch_size)]

    def _landmarks(self, H, C) -> LandmarkSet:
        return select_landmarks(self.graph, H, extract_modules(C), self.graph.num_clusters)

    def step_losses(self, model, tensors, aux, batch=None) -> Dict[str, torch.Tensor]:
        """Forward pass on the whole graph; losses on ``batch`` rows (all rows when None)."""
        cfg = self.config
        state = model(tensors)
        zero = state.H.new_zeros(())
        H, X, X_hat = state.H, tensors.features, state.X_hat
        graph, batch_aux = tensors, aux
        if batch is not None:
            index = torch.as_tensor(batch, device=H.device)
            H_batch, X, X_hat = H.index_select(0, index), X.index_select(0, index), X_hat.index_select(0, index)
            graph = self.graph.subgraph(batch)
            batch_aux = aux.restricted(batch) if aux is not None else None
            if batch_aux is not None and not len(batch_aux):
                batch_aux = None
        else:
            H_batch = H

        losses = {'res': zero, 'struct': zero, 'attr': zero}
        if cfg.uses_reconstruction:
            losses['res'] = reconstruction_loss(X, X_hat)

        C = affinity(H)
        C_batch = C if batch is None else C.index_select(0, index)
        if cfg.uses_structure:
            if graph.num_edges:
                losses['struct'] = struct_loss(graph, C_batch, batch_aux, cfg.alpha)
            else:
                logger.debug('Batch without edges, structure loss skipped')
        if cfg.uses_landmarks:
            landmarks = self._landmarks(H, C.detach())
            losses['attr'] = AssignmentPair.build(H_batch, landmarks, cfg.nu).loss()
        losses['total'] = losses['res'] + losses['struct'] + losses['attr']
        return losses

    def _diagnostics(self, model, epoch, losses) -> dict:
        return {
            'epoch': epoch,
            'losses': {name: _finite(value.detach()) for name, value in losses.items()},
            'parameter_norms': {name: _finite(p.detach().norm()) for name, p in model.named_parameters()},
            'non_finite_parameters': [name for name, p in model.named_parameters()
                                      if not torch.isfinite(p.detach()).all()],
            'config': self.resolved_config(),
        }

    def _write(self, name: str, text: str):
        if self.out_dir is not None:
            (self.out_dir / name).write_text(text)

    def _finish(self, model, tensors):
        model.eval()
        with torch.no_grad():
            state = model(tensors)
            landmarks = self._landmarks(state.H, affinity(state.H))
            pair = AssignmentPair.build(state.H, landmarks, self.config.nu)
        return state, landmarks, pair

    def _epoch_metrics(self, model, tensors) -> Optional[Dict[str, float]]:
        if not self.config.log_metrics or self.graph.labels is None:
            return None
        _, _, pair = self._finish(model, tensors)
        model.train()
        return score_clustering(self.graph.labels, extract_clusters(pair))

    def run(self) -> TrainResult:
        cfg = self.config
        started = time.monotonic()
        rng = seed_everything(cfg.seed)
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        self._write(CONFIG_FILE, json.dumps(self.resolved_config(), indent=2) + '\n')

        tensors = GraphTensors.from_graph(self.graph, dtype=self.dtype, device=self.device,
                                          features=self._features())
        model = FusionEncoder(self.graph.num_features, cfg.encoder_config()).to(device=self.device, dtype=self.dtype)
        optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
        aux = self._aux_subset(model, tensors, rng)
        logger.info('Training %s (%d nodes, %d clusters): variant %s, sigma %.2f, aux %s, %d epochs',
                    self.graph.name or 'graph', self.graph.num_nodes, self.graph.num_clusters, cfg.variant,
                    model.sigma, cfg.aux_mode, cfg.epochs)

        history: List[EpochLog] = []
        model.train()
        for epoch in range(1, cfg.epochs + 1):
            sums = {'res': 0.0, 'struct': 0.0, 'attr': 0.0, 'total': 0.0}
            batches = self._batches(rng)
            for batch in batches:
                optimizer.zero_grad()
                losses = self.step_losses(model, tensors, aux, batch)
                if not torch.isfinite(losses['total']):
                    self._diverged(model, epoch, losses, history)
                losses['total'].backward()
                optimizer.step()
                for name in sums:
                    sums[name] += float(losses[name].detach()) / len(batches)

            log = EpochLog(epoch=epoch, metrics=self._epoch_metrics(model, tensors), **sums)
            history.append(log)
            if epoch == 1 or epoch == cfg.epochs or epoch % LOG_EVERY == 0:
                logger.info('epoch %d/%d  res %.4f  struct %.4f  attr %.4f  total %.4f%s', epoch, cfg.epochs,
                            log.res, log.struct, log.attr, log.total,
                            ''.join('  %s %.4f' % item for item in (log.metrics or {}).items()))

        state, landmarks, pair = self._finish(model, tensors)
        labels = extract_clusters(pair)
        result = TrainResult(model=model, state=state, landmarks=landmarks, pair=pair, labels=labels,
                             history=history, config=self.resolved_config(),
                             runtime=time.monotonic() - started)
        self._save(result)
        return result

    def _diverged(self, model, epoch, losses, history):
        diagnostics = self._diagnostics(model, epoch, losses)
        self._write(DIVERGENCE_FILE, json.dumps(diagnostics, indent=2) + '\n')
        self._write(HISTORY_FILE, ''.join(json.dumps(log.as_dict()) + '\n' for log in history))
        logger.error('Training of %s diverged at epoch %d', self.graph.name or 'graph', epoch,
                     extra={'diagnostics': json.dumps(diagnostics, indent=2)})
        raise NonFiniteLoss(epoch, diagnostics)

    def _save(self, result: TrainResult):
        if self.out_dir is None:
            return
        self._write(HISTORY_FILE, ''.join(json.dumps(log.as_dict()) + '\n' for log in result.history))
        self._write(PREDICTIONS_FILE, ''.join('%d\n' % label for label in result.labels))
        np.save(self.out_dir / EMBEDDINGS_FILE, result.state.H.detach().cpu().numpy())
        save_checkpoint(self.out_dir / CHECKPOINT_FILE, result.model,
                        extra={'epochs': len(result.history), 'config': result.config})
        logger.info('Wrote training outputs to %s', self.out_dir)


def train(graph: Graph, config: Optional[TrainConfig] = None, out_dir=None) -> TrainResult:
    return Trainer(graph, config or TrainConfig(), out_dir=out_dir).run()
