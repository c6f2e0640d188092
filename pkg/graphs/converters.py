"""Readers for locally downloaded raw dataset dumps.

Nothing here downloads data: point the readers at files fetched beforehand
and write the result with ``save_graph`` (see the ``convert_dataset``
management command).
"""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from graphs.exceptions import MalformedLine, MissingFile
from graphs.loaders import graph_from_adjacency
from graphs.structures import Graph

logger = logging.getLogger(__name__)


def _existing(path) -> Path:
    path = Path(path)
    if not path.exists():
        raise MissingFile('File not found: %s' % path)
    return path


def read_linqs(content_path, cites_path, name: str = '', *, symmetrize: bool = True) -> Graph:
    """LINQS dumps (Cora, Citeseer): ``<id> <attr>... <class>`` and ``<cited> <citing>`` lines."""
    content_path, cites_path = _existing(content_path), _existing(cites_path)
    ids, rows, classes = [], [], []
    with content_path.open() as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) < 3:
                raise MalformedLine('expected id, attributes and class', line_no=line_no, path=content_path)
            try:
                rows.append(np.array(parts[1:-1], dtype=np.float64))
            except ValueError:
                raise MalformedLine('attributes must be numeric', line_no=line_no, path=content_path) from None
            ids.append(parts[0])
            classes.append(parts[-1])

    index = {node_id: position for position, node_id in enumerate(ids)}
    class_names = sorted(set(classes))
    labels = np.array([class_names.index(c) for c in classes], dtype=np.int64)

    sources, targets = [], []
    skipped = 0
    with cites_path.open() as fh:
        for line in fh:
            parts = line.split()
            if len(parts) != 2:
                continue
            cited, citing = index.get(parts[0]), index.get(parts[1])
            if cited is None or citing is None:
                # Citeseer cites papers that are missing from its content file
                skipped += 1
                continue
            sources.append(citing)
            targets.append(cited)
    if skipped:
        logger.warning('Skipped %d citations to unknown papers in %s', skipped, cites_path)

    n = len(ids)
    adjacency = sp.csr_matrix((np.ones(len(sources)), (sources, targets)), shape=(n, n))
    return graph_from_adjacency(adjacency, np.vstack(rows), labels, len(class_names), name,
                                symmetrize=symmetrize)


def _csr_from_npz(bundle, prefix: str):
    if '%s_data' % prefix in bundle:
        return sp.csr_matrix(
            (bundle['%s_data' % prefix], bundle['%s_indices' % prefix], bundle['%s_indptr' % prefix]),
            shape=tuple(bundle['%s_shape' % prefix]),
        )
    if '%s_matrix' % prefix in bundle:
        return sp.csr_matrix(bundle['%s_matrix' % prefix])
    return None


def read_npz(path, name: str = '', *, symmetrize: bool = True) -> Graph:
    """Sparse ``.npz`` bundles (Amazon Photo / Computers) with adj_*, attr_* and labels arrays."""
    path = _existing(path)
    with np.load(path, allow_pickle=True) as bundle:
        adjacency = _csr_from_npz(bundle, 'adj')
        attributes = _csr_from_npz(bundle, 'attr')
        if adjacency is None or attributes is None or 'labels' not in bundle:
            raise MalformedLine('npz bundle needs adjacency, attributes and labels', path=path)
        labels = np.asarray(bundle['labels'], dtype=np.int64)
    return graph_from_adjacency(adjacency, attributes.toarray(), labels, int(labels.max()) + 1, name,
                                symmetrize=symmetrize)


def read_ogb(root, name: str = '', *, symmetrize: bool = True) -> Graph:
    """OGB node-property raw files: raw/edge.csv.gz, raw/node-feat.csv.gz, raw/node-label.csv.gz."""
    raw = _existing(Path(root) / 'raw')
    edges = np.loadtxt(_existing(raw / 'edge.csv.gz'), delimiter=',', dtype=np.int64).reshape(-1, 2)
    features = np.loadtxt(_existing(raw / 'node-feat.csv.gz'), delimiter=',', dtype=np.float64)
    labels = np.loadtxt(_existing(raw / 'node-label.csv.gz'), delimiter=',', dtype=np.int64).reshape(-1)
    n = features.shape[0]
    adjacency = sp.csr_matrix((np.ones(edges.shape[0]), (edges[:, 0], edges[:, 1])), shape=(n, n))
    return graph_from_adjacency(adjacency, features, labels, int(labels.max()) + 1, name,
                                symmetrize=symmetrize)


READERS = {
    'linqs': read_linqs,
    'npz': read_npz,
    'ogb': read_ogb,
}
