from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
import torch

from graphs.structures import Graph


def sparse_tensor(matrix: sp.spmatrix, dtype: torch.dtype, device=None) -> torch.Tensor:
    coo = sp.coo_matrix(matrix)
    indices = torch.from_numpy(np.vstack([coo.row, coo.col]).astype(np.int64))
    values = torch.from_numpy(coo.data.astype(np.float64)).to(dtype)
    return torch.sparse_coo_tensor(indices, values, coo.shape, device=device).coalesce()


@dataclass(frozen=True)
class GraphTensors:
    """Torch view of a Graph: adjacency, degrees and the propagation operators."""

    num_nodes: int
    num_edges: int
    adjacency: torch.Tensor
    degrees: torch.Tensor
    mean_operator: torch.Tensor
    gcn_operator: torch.Tensor
    features: torch.Tensor

    @classmethod
    def from_graph(cls, graph: Graph, dtype: torch.dtype = torch.float32, device=None,
                   features: Optional[np.ndarray] = None) -> 'GraphTensors':
        adjacency = graph.adjacency
        degrees = np.asarray(graph.degrees, dtype=np.float64)

        # Row-normalised adjacency; isolated nodes keep an all-zero row so
        # their neighbour mean is the zero vector.
        inverse = np.divide(1.0, degrees, out=np.zeros_like(degrees), where=degrees > 0)
        mean_operator = sp.diags(inverse) @ adjacency

        looped = adjacency + sp.identity(graph.num_nodes, format='csr')
        inverse_sqrt = 1.0 / np.sqrt(degrees + 1.0)
        gcn_operator = sp.diags(inverse_sqrt) @ looped @ sp.diags(inverse_sqrt)

        features = graph.features if features is None else features
        return cls(
            num_nodes=graph.num_nodes,
            num_edges=graph.num_edges,
            adjacency=sparse_tensor(adjacency, dtype, device),
            degrees=torch.as_tensor(degrees, dtype=dtype, device=device).reshape(-1, 1),
            mean_operator=sparse_tensor(mean_operator, dtype, device),
            gcn_operator=sparse_tensor(gcn_operator, dtype, device),
            features=torch.as_tensor(np.asarray(features), dtype=dtype, device=device),
        )


def as_tensors(graph, like: torch.Tensor) -> GraphTensors:
    if isinstance(graph, GraphTensors):
        return graph
    return GraphTensors.from_graph(graph, dtype=like.dtype, device=like.device)
