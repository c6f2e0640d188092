from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Optional

import numpy as np
import scipy.sparse as sp

from graphs.exceptions import (
    DuplicateEdge,
    LabelOutOfRange,
    MalformedLine,
    MetadataMismatch,
    SelfLoop,
)


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def canonical_edges(edges, num_nodes: int) -> np.ndarray:
    """Return edges as a sorted (m, 2) int64 array with i < j on every row."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if edges.min() < 0 or edges.max() >= num_nodes:
        raise MalformedLine('edge endpoint outside [0, %d)' % num_nodes)
    loops = np.flatnonzero(edges[:, 0] == edges[:, 1])
    if loops.size:
        raise SelfLoop('self-loop on node %d' % edges[loops[0], 0])
    edges = np.sort(edges, axis=1)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    repeated = np.flatnonzero(np.all(edges[1:] == edges[:-1], axis=1))
    if repeated.size:
        i, j = edges[repeated[0]]
        raise DuplicateEdge('duplicate edge (%d, %d)' % (i, j))
    return edges


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph with node attributes and optional labels.

    Edges are stored once per pair in canonical ``i < j`` order and sorted;
    the symmetric adjacency and the degree vector are derived on first use.
    """

    num_nodes: int
    edges: np.ndarray
    features: np.ndarray
    num_clusters: int
    labels: Optional[np.ndarray] = None
    name: str = ''

    def __post_init__(self):
        if self.num_nodes < 1:
            raise MetadataMismatch('a graph needs at least one node')
        if self.num_clusters < 1:
            raise MetadataMismatch('num_clusters must be positive, got %d' % self.num_clusters)
        object.__setattr__(self, 'edges', _readonly(canonical_edges(self.edges, self.num_nodes)))

        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        if features.ndim != 2 or features.shape[0] != self.num_nodes:
            raise MetadataMismatch('features have %d rows for %d nodes' % (features.shape[0], self.num_nodes))
        object.__setattr__(self, 'features', _readonly(features))

        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
            if labels.shape[0] != self.num_nodes:
                raise MetadataMismatch('labels have %d entries for %d nodes' % (labels.shape[0], self.num_nodes))
            outside = np.flatnonzero((labels < 0) | (labels >= self.num_clusters))
            if outside.size:
                raise LabelOutOfRange('label %d of node %d is outside [0, %d)' % (
                    labels[outside[0]], outside[0], self.num_clusters))
            object.__setattr__(self, 'labels', _readonly(labels))

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def num_features(self) -> int:
        return int(self.features.shape[1])

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        values = np.ones(rows.shape[0], dtype=np.float64)
        return sp.csr_matrix((values, (rows, cols)), shape=(self.num_nodes, self.num_nodes))

    @cached_property
    def degrees(self) -> np.ndarray:
        degrees = np.bincount(self.edges.reshape(-1), minlength=self.num_nodes).astype(np.int64)
        return _readonly(degrees)

    def with_added_edges(self, new_edges) -> 'Graph':
        new_edges = np.asarray(new_edges, dtype=np.int64).reshape(-1, 2)
        return Graph(
            num_nodes=self.num_nodes,
            edges=np.concatenate([self.edges, new_edges]),
            features=self.features,
            num_clusters=self.num_clusters,
            labels=self.labels,
            name=self.name,
        )

    def subgraph(self, node_ids) -> 'Graph':
        """Induced subgraph on ``node_ids``, re-indexed in ascending node order."""
        node_ids = np.unique(np.asarray(node_ids, dtype=np.int64))
        position = np.full(self.num_nodes, -1, dtype=np.int64)
        position[node_ids] = np.arange(node_ids.shape[0])
        kept = (position[self.edges[:, 0]] >= 0) & (position[self.edges[:, 1]] >= 0)
        return Graph(
            num_nodes=int(node_ids.shape[0]),
            edges=position[self.edges[kept]],
            features=self.features[node_ids],
            num_clusters=self.num_clusters,
            labels=None if self.labels is None else self.labels[node_ids],
            name=self.name,
        )

    def statistics(self) -> Dict[str, object]:
        return {
            'name': self.name,
            'nodes': self.num_nodes,
            'edges': self.num_edges,
            'features': self.num_features,
            'clusters': self.num_clusters,
        }


class NoiseLevel(enum.Enum):
    CLEAN = 'clean'
    I = 'I'  # noqa: E741
    II = 'II'
    III = 'III'

    @property
    def ratio(self) -> Fraction:
        return {
            NoiseLevel.CLEAN: Fraction(0),
            NoiseLevel.I: Fraction(3, 10),
            NoiseLevel.II: Fraction(6, 10),
            NoiseLevel.III: Fraction(9, 10),
        }[self]

    @classmethod
    def parse(cls, value) -> 'NoiseLevel':
        if isinstance(value, cls):
            return value
        normalized = str(value).strip()
        aliases = {
            'clean': cls.CLEAN, '0': cls.CLEAN, 'none': cls.CLEAN,
            '1': cls.I, 'i': cls.I,
            '2': cls.II, 'ii': cls.II,
            '3': cls.III, 'iii': cls.III,
        }
        try:
            return aliases[normalized.lower()]
        except KeyError:
            raise ValueError('Unknown noise level %r, expected clean, 1, 2 or 3' % value) from None


@dataclass(frozen=True)
class NoiseSpec:
    level: NoiseLevel = NoiseLevel.CLEAN
    seed: int = 0

    @property
    def ratio(self) -> Fraction:
        return self.level.ratio

    def as_dict(self) -> dict:
        return {'level': self.level.value, 'ratio': float(self.ratio), 'seed': self.seed}
