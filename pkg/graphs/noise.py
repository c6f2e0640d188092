from __future__ import annotations

import logging
import math

import numpy as np
from django.conf import settings

from app.exceptions import LabelsRequired
from graphs.exceptions import NotEnoughCrossClassPairs
from graphs.structures import Graph, NoiseSpec

logger = logging.getLogger(__name__)

MAX_REJECTION_FACTOR = getattr(settings, 'RDSA_MAX_REJECTION_FACTOR', 100)


def noise_edge_count(graph: Graph, spec: NoiseSpec) -> int:
    # Exact rational arithmetic: 0.6 * 10 must give 6, not 7.
    return math.ceil(spec.ratio * graph.num_edges)


def cross_class_non_edges(graph: Graph) -> int:
    counts = np.bincount(graph.labels, minlength=graph.num_clusters).astype(np.int64)
    cross_pairs = (graph.num_nodes ** 2 - int((counts ** 2).sum())) // 2
    existing = int(np.count_nonzero(graph.labels[graph.edges[:, 0]] != graph.labels[graph.edges[:, 1]]))
    return cross_pairs - existing


def _enumerate_candidates(graph: Graph, taken: set) -> np.ndarray:
    """All cross-class node pairs (i < j) that are neither edges nor already added."""
    labels = graph.labels
    n = graph.num_nodes
    taken_keys = np.fromiter(taken, dtype=np.int64, count=len(taken))
    chunks = []
    for i in range(n - 1):
        js = np.arange(i + 1, n, dtype=np.int64)
        js = js[labels[i + 1:] != labels[i]]
        if js.size == 0:
            continue
        keys = i * n + js
        keys = keys[~np.isin(keys, taken_keys)]
        if keys.size:
            chunks.append(keys)
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(chunks)


def inject_noise(graph: Graph, spec: NoiseSpec) -> Graph:
    """Return a copy of ``graph`` with ceil(ratio * m) random cross-class edges added.

    Pairs are rejection-sampled uniformly; once the number of draws exceeds
    MAX_REJECTION_FACTOR times the target, the remaining edges are drawn from
    an explicit enumeration of the eligible pairs.
    """
    if spec.ratio == 0:
        return graph
    if graph.labels is None:
        raise LabelsRequired('Noise injection needs ground-truth labels (%s)' % (graph.name or 'graph'))

    target = noise_edge_count(graph, spec)
    available = cross_class_non_edges(graph)
    if target > available:
        raise NotEnoughCrossClassPairs(
            'Noise level %s needs %d cross-class edges but only %d non-edges exist' % (
                spec.level.value, target, available))

    n = graph.num_nodes
    labels = graph.labels
    rng = np.random.default_rng(spec.seed)
    taken = set((graph.edges[:, 0] * n + graph.edges[:, 1]).tolist())
    added = []
    attempts = 0
    max_attempts = MAX_REJECTION_FACTOR * target

    while len(added) < target and attempts < max_attempts:
        batch = min(max(2 * (target - len(added)), 64), max_attempts - attempts)
        pairs = rng.integers(0, n, size=(batch, 2))
        for i, j in pairs.tolist():
            attempts += 1
            if i == j or labels[i] == labels[j]:
                continue
            key = i * n + j if i < j else j * n + i
            if key in taken:
                continue
            taken.add(key)
            added.append(key)
            if len(added) == target:
                break

    if len(added) < target:
        logger.info('Rejection sampling stopped after %d draws with %d/%d edges, enumerating eligible pairs',
                    attempts, len(added), target)
        candidates = _enumerate_candidates(graph, taken)
        picked = rng.choice(candidates, size=target - len(added), replace=False)
        added.extend(np.sort(picked).tolist())

    keys = np.asarray(added, dtype=np.int64)
    new_edges = np.stack([keys // n, keys % n], axis=1)
    logger.info('Injected %d noise edges (level %s, seed %d) into %s', target, spec.level.value, spec.seed,
                graph.name or 'graph')
    return graph.with_added_edges(new_edges)
