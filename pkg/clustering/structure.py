from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
from django.conf import settings

from app.exceptions import InputError, LabelsRequired
from clustering.exceptions import EmptySubset, ModularityMatrixTooLarge
from clustering.landmarks import extract_modules, intra_module_scores
from graphs.exceptions import EmptyGraph
from graphs.structures import Graph
from graphs.tensors import as_tensors

logger = logging.getLogger(__name__)

DENSE_MODULARITY_CAP = getattr(settings, 'RDSA_DENSE_MODULARITY_CAP', 20_000)


def modularity_matrix_entries(graph: Graph, rows=None, force: bool = False) -> np.ndarray:
    """Rows of B = A - d d^T / 2m as a dense array (all rows when ``rows`` is None)."""
    if graph.num_edges == 0:
        raise EmptyGraph('Modularity is undefined on a graph without edges')
    rows = np.arange(graph.num_nodes) if rows is None else np.asarray(rows, dtype=np.int64).reshape(-1)
    if not force and rows.shape[0] * graph.num_nodes > DENSE_MODULARITY_CAP ** 2:
        raise ModularityMatrixTooLarge(
            'Refusing to materialise %d x %d modularity entries (cap %d); pass force=True' % (
                rows.shape[0], graph.num_nodes, DENSE_MODULARITY_CAP))
    degrees = graph.degrees.astype(np.float64)
    block = graph.adjacency[rows].toarray()
    return block - np.outer(degrees[rows], degrees) / (2.0 * graph.num_edges)


def affinity(H: torch.Tensor) -> torch.Tensor:
    """Row-stochastic tanh^2 affinity; all-zero rows become uniform."""
    squashed = torch.tanh(H).pow(2)
    totals = squashed.sum(1, keepdim=True)
    empty = totals == 0
    # where() on a safe denominator keeps the gradient of the other branch finite
    normalised = squashed / torch.where(empty, torch.ones_like(totals), totals)
    return torch.where(empty, torch.full_like(squashed, 1.0 / H.shape[1]), normalised)


def modularity(graph, C: torch.Tensor) -> torch.Tensor:
    """(1/2m) [Tr(C^T A C) - |C^T d|^2 / 2m], never forming the dense modularity matrix."""
    tensors = as_tensors(graph, C)
    if tensors.num_edges == 0:
        raise EmptyGraph('Modularity is undefined on a graph without edges')
    if C.shape[0] != tensors.num_nodes:
        raise InputError('Affinity has %d rows for %d nodes' % (C.shape[0], tensors.num_nodes))
    two_m = 2.0 * tensors.num_edges
    within = (C * torch.sparse.mm(tensors.adjacency, C)).sum()
    expected = (C.T @ tensors.degrees).pow(2).sum() / two_m
    return (within - expected) / two_m


@dataclass(frozen=True)
class AuxSubset:
    node_ids: np.ndarray
    membership: np.ndarray

    def __post_init__(self):
        node_ids = np.asarray(self.node_ids, dtype=np.int64).reshape(-1)
        membership = np.asarray(self.membership, dtype=np.float64)
        if membership.shape != (node_ids.shape[0], node_ids.shape[0]):
            raise InputError('Membership matrix %s does not match %d nodes' % (membership.shape, node_ids.shape[0]))
        if not np.array_equal(membership, membership.T) or not np.all(np.diag(membership) == 1):
            raise InputError('Membership matrix must be symmetric with a unit diagonal')
        if not np.isin(membership, (0.0, 1.0)).all():
            raise InputError('Membership matrix must be binary')
        object.__setattr__(self, 'node_ids', node_ids)
        object.__setattr__(self, 'membership', membership)

    @classmethod
    def from_labels(cls, node_ids, labels) -> 'AuxSubset':
        labels = np.asarray(labels).reshape(-1)
        return cls(node_ids=node_ids, membership=(labels[:, None] == labels[None, :]).astype(np.float64))

    def __len__(self):
        return int(self.node_ids.shape[0])

    def restricted(self, batch) -> 'AuxSubset':
        """The part of the subset inside the sorted node batch, re-indexed to batch positions."""
        batch = np.asarray(batch, dtype=np.int64)
        inside = np.isin(self.node_ids, batch)
        positions = np.searchsorted(batch, self.node_ids[inside])
        return AuxSubset(node_ids=positions, membership=self.membership[np.ix_(inside, inside)])


def _subset_size(fraction: float, population: int) -> int:
    if not 0 < fraction <= 1:
        raise InputError('Aux fraction must lie in (0, 1], got %r' % fraction)
    return max(1, min(population, int(round(fraction * population))))


def labels_aux_subset(graph: Graph, fraction: float, rng: np.random.Generator) -> AuxSubset:
    """Uniform sample of ``fraction`` of the nodes with their ground-truth labels."""
    if graph.labels is None:
        raise LabelsRequired('The labels aux mode needs ground-truth labels (%s)' % (graph.name or 'graph'))
    size = _subset_size(fraction, graph.num_nodes)
    node_ids = np.sort(rng.choice(graph.num_nodes, size=size, replace=False))
    return AuxSubset.from_labels(node_ids, graph.labels[node_ids])


def central_aux_subset(graph: Graph, C, fraction: float = 0.1) -> AuxSubset:
    """Pseudo-labelled subset made of the most central nodes of every module of ``C``."""
    modules = extract_modules(C)
    scores = intra_module_scores(graph, modules.module_of_node)
    picked = []
    for module, size in zip(modules.modules, modules.sizes):
        members = modules.members(module)
        order = sorted(members.tolist(), key=lambda node: (-scores[node], node))
        picked.extend(order[:max(1, math.ceil(fraction * size))])
    node_ids = np.sort(np.asarray(picked, dtype=np.int64))
    return AuxSubset.from_labels(node_ids, modules.module_of_node[node_ids])


def aux_loss(C: torch.Tensor, aux: AuxSubset) -> torch.Tensor:
    if not len(aux):
        raise EmptySubset('The auxiliary subset is empty')
    index = torch.as_tensor(aux.node_ids, device=C.device)
    C_sub = C.index_select(0, index)
    target = torch.as_tensor(aux.membership, dtype=C.dtype, device=C.device)
    return (target - C_sub @ C_sub.T).pow(2).sum() / target.pow(2).sum()


def struct_loss(graph, C: torch.Tensor, aux: Optional[AuxSubset] = None, alpha: float = 0.2) -> torch.Tensor:
    if alpha < 0:
        raise InputError('alpha must be non-negative, got %r' % alpha)
    loss = -modularity(graph, C)
    if aux is not None:
        loss = loss + alpha * aux_loss(C, aux)
    return loss
