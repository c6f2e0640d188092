"""Community landmarks and the node-based soft assignment.

Modules come from the argmax of the affinity matrix. Each of the ``k`` most
populous modules contributes the node with the largest intra-module
modularity score as its landmark; nodes are then softly assigned to the
landmarks with a Student t kernel, and that assignment is sharpened into a
self-training target.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import torch
from django.conf import settings

from app.exceptions import InputError, ShapeMismatch
from clustering.exceptions import DegenerateColumn, EmptyLandmarks, NoModules
from graphs.structures import Graph

logger = logging.getLogger(__name__)

PROB_CLAMP = getattr(settings, 'RDSA_PROB_CLAMP', 1e-12)


def _numpy(matrix) -> np.ndarray:
    if isinstance(matrix, torch.Tensor):
        return matrix.detach().cpu().numpy()
    return np.asarray(matrix)


@dataclass(frozen=True)
class ModuleAssignment:
    module_of_node: np.ndarray
    # non-empty module ids, most populous first, ties to the lower id
    modules: Tuple[int, ...]
    sizes: Tuple[int, ...]

    def members(self, module: int) -> np.ndarray:
        return np.flatnonzero(self.module_of_node == module)

    def __len__(self):
        return len(self.modules)


def extract_modules(C) -> ModuleAssignment:
    C = _numpy(C)
    # np.argmax returns the first maximum, i.e. the lowest column on ties
    module_of_node = np.argmax(C, axis=1).astype(np.int64)
    counts = np.bincount(module_of_node, minlength=C.shape[1])
    modules = sorted(np.flatnonzero(counts).tolist(), key=lambda module: (-counts[module], module))
    return ModuleAssignment(
        module_of_node=module_of_node,
        modules=tuple(modules),
        sizes=tuple(int(counts[module]) for module in modules),
    )


def intra_module_scores(graph: Graph, module_of_node) -> np.ndarray:
    """Sum of B(i, j) over the other members j of node i's module.

    Computed from the edge list: (A 1_S)_i - d_i (D_S - d_i) / 2m where D_S is
    the total degree of the module.
    """
    module_of_node = np.asarray(module_of_node, dtype=np.int64)
    if graph.num_edges == 0:
        return np.zeros(graph.num_nodes)
    degrees = graph.degrees.astype(np.float64)
    two_m = 2.0 * graph.num_edges
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    same = module_of_node[i] == module_of_node[j]
    inside = np.bincount(np.concatenate([i[same], j[same]]), minlength=graph.num_nodes).astype(np.float64)
    module_degree = np.bincount(module_of_node, weights=degrees)[module_of_node]
    return inside - degrees * (module_degree - degrees) / two_m


@dataclass
class LandmarkSet:
    node_ids: np.ndarray
    U: torch.Tensor
    module_of_node: np.ndarray
    modules: Tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return int(self.node_ids.shape[0])


def _ranked(members: np.ndarray, scores: np.ndarray) -> list:
    # best score first, lowest node index among equals
    return sorted(members.tolist(), key=lambda node: (-scores[node], node))


def select_landmarks(graph: Graph, H: torch.Tensor, modules: ModuleAssignment, k: int) -> LandmarkSet:
    if k < 1:
        raise InputError('k must be at least 1, got %d' % k)
    if not len(modules):
        raise NoModules('No non-empty module to draw landmarks from')
    if k > graph.num_nodes:
        raise InputError('Cannot pick %d landmarks among %d nodes' % (k, graph.num_nodes))

    scores = intra_module_scores(graph, modules.module_of_node)
    ranked = [_ranked(modules.members(module), scores) for module in modules.modules]

    chosen = [candidates[0] for candidates in ranked[:k]]
    chosen_modules = list(modules.modules[:k])
    if len(chosen) < k:
        logger.debug('Only %d modules for %d landmarks, filling round-robin', len(chosen), k)
        depth = 1
        while len(chosen) < k:
            for module, candidates in zip(modules.modules, ranked):
                if depth < len(candidates) and len(chosen) < k:
                    chosen.append(candidates[depth])
                    chosen_modules.append(module)
            depth += 1

    node_ids = np.asarray(chosen, dtype=np.int64)
    index = torch.as_tensor(node_ids, device=H.device)
    return LandmarkSet(
        node_ids=node_ids,
        U=H.index_select(0, index),
        module_of_node=modules.module_of_node,
        modules=tuple(chosen_modules),
    )


def soft_assign(H: torch.Tensor, U: torch.Tensor, nu: float = 1.0) -> torch.Tensor:
    """Student t kernel between nodes and landmarks, normalised per row."""
    if U.dim() != 2 or U.shape[0] == 0:
        raise EmptyLandmarks('soft assignment needs at least one landmark')
    if nu <= 0:
        raise InputError('nu must be positive, got %r' % nu)
    if H.shape[1] != U.shape[1]:
        raise ShapeMismatch('Embeddings have width %d but landmarks %d' % (H.shape[1], U.shape[1]))
    squared = (H.pow(2).sum(1, keepdim=True) + U.pow(2).sum(1) - 2.0 * H @ U.T).clamp_min(0.0)
    # (1 + d^2 / nu) ** -((nu + 1) / 2), normalised in log space
    logits = -(nu + 1.0) / 2.0 * torch.log1p(squared / nu)
    return torch.softmax(logits, dim=1)


def sharpen(W: torch.Tensor) -> torch.Tensor:
    column_mass = W.sum(0)
    empty = torch.nonzero(column_mass <= 0).flatten()
    if empty.numel():
        raise DegenerateColumn(empty.tolist())
    weighted = W.pow(2) / column_mass
    return weighted / weighted.sum(1, keepdim=True)


def drop_columns(W: torch.Tensor, columns) -> Tuple[torch.Tensor, np.ndarray]:
    keep = np.setdiff1d(np.arange(W.shape[1]), np.asarray(columns, dtype=np.int64))
    kept = W[:, torch.as_tensor(keep, device=W.device)]
    return kept / kept.sum(1, keepdim=True), keep


def attr_loss(W: torch.Tensor, W_sharp: torch.Tensor) -> torch.Tensor:
    """KL(W || W_sharp) summed over all nodes."""
    if W.shape != W_sharp.shape:
        raise ShapeMismatch('Assignment %s and target %s differ in shape' % (tuple(W.shape), tuple(W_sharp.shape)))
    tiny = torch.finfo(W.dtype).tiny
    return (W * (torch.log(W.clamp_min(tiny)) - torch.log(W_sharp.clamp_min(PROB_CLAMP)))).sum()


@dataclass
class AssignmentPair:
    W: torch.Tensor
    W_sharp: torch.Tensor
    nu: float = 1.0
    # landmark index of every column of W (differs from arange when columns were dropped)
    columns: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.columns is None:
            self.columns = np.arange(self.W.shape[1])

    @classmethod
    def build(cls, H: torch.Tensor, landmarks: LandmarkSet, nu: float = 1.0) -> 'AssignmentPair':
        """Soft assignment plus its sharpened target, the latter held constant for the gradient step."""
        W = soft_assign(H, landmarks.U, nu)
        columns = np.arange(W.shape[1])
        try:
            W_sharp = sharpen(W.detach())
        except DegenerateColumn as exc:
            logger.warning('%s; dropping them for this step', exc)
            W, columns = drop_columns(W, exc.columns)
            W_sharp = sharpen(W.detach())
        return cls(W=W, W_sharp=W_sharp.detach(), nu=nu, columns=columns)

    def loss(self) -> torch.Tensor:
        return attr_loss(self.W, self.W_sharp)
