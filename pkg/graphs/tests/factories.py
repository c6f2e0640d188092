import numpy as np

from graphs.structures import Graph


def make_graph(num_nodes, edges, num_clusters=2, labels=None, features=None, name='test'):
    if features is None:
        features = np.eye(num_nodes)
    return Graph(num_nodes=num_nodes, edges=edges, features=features, num_clusters=num_clusters,
                 labels=labels, name=name)


def single_edge():
    return make_graph(2, [(0, 1)], num_clusters=1, labels=[0, 0])


def two_disjoint_edges():
    return make_graph(4, [(0, 1), (2, 3)], labels=[0, 0, 1, 1])


def two_triangles(features=None):
    edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
    if features is None:
        features = np.repeat(np.eye(2), 3, axis=0)
    return make_graph(6, edges, labels=[0, 0, 0, 1, 1, 1], features=features)


def path_graph(num_nodes=3):
    return make_graph(num_nodes, [(i, i + 1) for i in range(num_nodes - 1)], num_clusters=1,
                      labels=[0] * num_nodes)


def random_graph(num_nodes, edge_prob=0.3, num_clusters=3, num_features=5, seed=0):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((num_nodes, num_nodes)) < edge_prob, k=1)
    edges = np.argwhere(upper)
    labels = rng.integers(0, num_clusters, size=num_nodes)
    labels[:num_clusters] = np.arange(num_clusters)
    features = rng.normal(size=(num_nodes, num_features))
    return make_graph(num_nodes, edges, num_clusters=num_clusters, labels=labels, features=features,
                      name='random-%d' % seed)


def sized_graph(num_nodes, num_edges, num_clusters=7, seed=0):
    """Sparse labelled graph with exactly ``num_edges`` distinct edges."""
    rng = np.random.default_rng(seed)
    keys = set()
    while len(keys) < num_edges:
        i, j = rng.integers(0, num_nodes, size=2)
        if i != j:
            keys.add((min(i, j), max(i, j)))
    labels = np.arange(num_nodes) % num_clusters
    return make_graph(num_nodes, sorted(keys), num_clusters=num_clusters, labels=labels,
                      features=np.ones((num_nodes, 1)), name='sized')


def planted_blocks(block_size=8, num_blocks=3, p_in=0.7, p_out=0.05, num_features=6, seed=0):
    """Dense communities with sparse links between them; features carry a noisy block indicator."""
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(num_blocks), block_size)
    num_nodes = labels.shape[0]
    same = labels[:, None] == labels[None, :]
    upper = np.triu(rng.random((num_nodes, num_nodes)) < np.where(same, p_in, p_out), k=1)
    features = 0.3 * rng.normal(size=(num_nodes, num_features))
    features[np.arange(num_nodes), labels % num_features] += 1.0
    return make_graph(num_nodes, np.argwhere(upper), num_clusters=num_blocks, labels=labels, features=features,
                      name='blocks-%d' % seed)
