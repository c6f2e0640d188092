from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.sparse as sp
import tablib

from graphs.exceptions import (
    AsymmetryDetected,
    DuplicateEdge,
    LabelOutOfRange,
    MalformedLine,
    MetadataMismatch,
    MissingFile,
    SelfLoop,
)
from graphs.structures import Graph

logger = logging.getLogger(__name__)

EDGES_FILE = 'edges.tsv'
FEATURES_FILE = 'features.csv'
LABELS_FILE = 'labels.txt'
META_FILE = 'meta.json'


def _require(path: Path) -> Path:
    if not path.is_file():
        raise MissingFile('File not found: %s' % path)
    return path


def _read_meta(path: Path) -> dict:
    try:
        meta = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise MalformedLine('invalid JSON: %s' % exc, line_no=exc.lineno, path=path) from exc
    if not isinstance(meta, dict):
        raise MetadataMismatch('%s must contain an object at the top level' % path)
    for key, kind in (('num_nodes', int), ('num_clusters', int), ('name', str)):
        if not isinstance(meta.get(key), kind) or isinstance(meta.get(key), bool):
            raise MetadataMismatch('%s: key %r missing or not %s' % (path, key, kind.__name__))
    return meta


def _read_edges(path: Path, num_nodes: int) -> np.ndarray:
    seen = set()
    edges = []
    with path.open() as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split('\t')
            if len(parts) != 2:
                raise MalformedLine('expected "src<TAB>dst"', line_no=line_no, path=path)
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise MalformedLine('endpoints must be integers', line_no=line_no, path=path) from None
            if not (0 <= i < num_nodes and 0 <= j < num_nodes):
                raise MalformedLine('endpoint outside [0, %d)' % num_nodes, line_no=line_no, path=path)
            if i == j:
                raise SelfLoop('self-loop on node %d' % i, line_no=line_no, path=path)
            key = (i, j) if i < j else (j, i)
            if key in seen:
                raise DuplicateEdge('duplicate edge (%d, %d)' % key, line_no=line_no, path=path)
            seen.add(key)
            edges.append(key)
    return np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def _read_features(path: Path) -> np.ndarray:
    rows = []
    width = None
    with path.open() as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = np.array(line.split(','), dtype=np.float64)
            except ValueError:
                raise MalformedLine('features must be decimal reals', line_no=line_no, path=path) from None
            if width is None:
                width = row.shape[0]
            elif row.shape[0] != width:
                raise MalformedLine('expected %d features, found %d' % (width, row.shape[0]),
                                    line_no=line_no, path=path)
            rows.append(row)
    if not rows:
        raise MalformedLine('no feature rows', path=path)
    return np.vstack(rows)


def _read_labels(path: Path, num_clusters: int) -> np.ndarray:
    labels = []
    with path.open() as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                label = int(line)
            except ValueError:
                raise MalformedLine('labels must be integers', line_no=line_no, path=path) from None
            if not 0 <= label < num_clusters:
                raise LabelOutOfRange('%s:%d: label %d outside [0, %d)' % (path, line_no, label, num_clusters))
            labels.append(label)
    return np.asarray(labels, dtype=np.int64)


def load_graph(dataset_dir) -> Graph:
    """Load and validate a dataset directory (edges.tsv, features.csv, meta.json, optional labels.txt)."""
    dataset_dir = Path(dataset_dir)
    if not dataset_dir.is_dir():
        raise MissingFile('Dataset directory not found: %s' % dataset_dir)
    meta = _read_meta(_require(dataset_dir / META_FILE))
    num_nodes = meta['num_nodes']
    edges = _read_edges(_require(dataset_dir / EDGES_FILE), num_nodes)
    features = _read_features(_require(dataset_dir / FEATURES_FILE))
    if features.shape[0] != num_nodes:
        raise MetadataMismatch('%s has %d rows but meta.json declares %d nodes' % (
            FEATURES_FILE, features.shape[0], num_nodes))

    labels = None
    labels_path = dataset_dir / LABELS_FILE
    if labels_path.is_file():
        labels = _read_labels(labels_path, meta['num_clusters'])
        if labels.shape[0] != num_nodes:
            raise MetadataMismatch('%s has %d entries but meta.json declares %d nodes' % (
                LABELS_FILE, labels.shape[0], num_nodes))

    graph = Graph(
        num_nodes=num_nodes,
        edges=edges,
        features=features,
        num_clusters=meta['num_clusters'],
        labels=labels,
        name=meta['name'],
    )
    logger.info('Loaded %s: %d nodes, %d edges, %d features, %d clusters', graph.name or dataset_dir,
                graph.num_nodes, graph.num_edges, graph.num_features, graph.num_clusters)
    return graph


def save_graph(graph: Graph, dataset_dir) -> Path:
    dataset_dir = Path(dataset_dir)
    dataset_dir.mkdir(parents=True, exist_ok=True)
    np.savetxt(dataset_dir / EDGES_FILE, graph.edges, fmt='%d', delimiter='\t')
    np.savetxt(dataset_dir / FEATURES_FILE, graph.features, fmt='%.17g', delimiter=',')
    if graph.labels is not None:
        np.savetxt(dataset_dir / LABELS_FILE, graph.labels, fmt='%d')
    meta = {'num_nodes': graph.num_nodes, 'num_clusters': graph.num_clusters, 'name': graph.name}
    (dataset_dir / META_FILE).write_text(json.dumps(meta, indent=2) + '\n')
    return dataset_dir


def graph_from_adjacency(
    adjacency,
    features,
    labels=None,
    num_clusters: Optional[int] = None,
    name: str = '',
    *,
    symmetrize: bool = False,
) -> Graph:
    """Build a Graph from a (sparse) adjacency matrix.

    Raw dumps are often directed or carry self-citations; ``symmetrize``
    folds both directions together and drops the diagonal. Without it such
    input is rejected.
    """
    adjacency = sp.csr_matrix(adjacency)
    if adjacency.shape[0] != adjacency.shape[1]:
        raise MetadataMismatch('adjacency must be square, got %s' % (adjacency.shape,))
    adjacency = (adjacency != 0).astype(np.int8)
    if symmetrize:
        adjacency = adjacency.maximum(adjacency.T).tolil()
        adjacency.setdiag(0)
        adjacency = adjacency.tocsr()
        adjacency.eliminate_zeros()
    else:
        if (adjacency != adjacency.T).nnz:
            raise AsymmetryDetected('adjacency matrix is not symmetric')
        loops = np.flatnonzero(adjacency.diagonal())
        if loops.size:
            raise SelfLoop('self-loop on node %d' % loops[0])

    upper = sp.triu(adjacency, k=1).tocoo()
    edges = np.stack([upper.row, upper.col], axis=1)
    if labels is not None:
        labels = np.asarray(labels, dtype=np.int64)
        if num_clusters is None:
            num_clusters = int(labels.max()) + 1
    if num_clusters is None:
        raise MetadataMismatch('num_clusters is required when labels are absent')
    return Graph(
        num_nodes=adjacency.shape[0],
        edges=edges,
        features=features,
        num_clusters=num_clusters,
        labels=labels,
        name=name,
    )


STATISTICS_HEADERS = ('name', 'nodes', 'edges', 'features', 'clusters')


def dataset_statistics(graph: Graph) -> dict:
    return graph.statistics()


def statistics_table(graphs) -> tablib.Dataset:
    table = tablib.Dataset(headers=list(STATISTICS_HEADERS), title='datasets')
    for graph in graphs:
        row = dataset_statistics(graph)
        table.append([row[key] for key in STATISTICS_HEADERS])
    return table


def load_labels(path) -> np.ndarray:
    """One integer label per line, as written to predictions.txt and labels.txt."""
    path = _require(Path(path))
    labels = []
    with path.open() as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise MalformedLine('labels must be integers', line_no=line_no, path=path) from None
    return np.asarray(labels, dtype=np.int64)
