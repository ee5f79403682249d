"""Binary undirected network data model and descriptive statistics.

A network is represented as a plain numpy adjacency matrix: square,
symmetric, entries in {0, 1}, zero diagonal. ``validate_adjacency`` is the
single gatekeeper for that contract; every statistic in this module calls
it first.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

__all__ = [
    "DiameterResult",
    "adjacency_spectrum",
    "density",
    "diameter",
    "from_edge_list",
    "transitivity",
    "uniform_homophily",
    "validate_adjacency",
    "validate_dyadic_covariate",
]


def validate_adjacency(a) -> np.ndarray:
    """Coerce ``a`` to a float adjacency matrix, checking all invariants.

    Raises ValueError unless ``a`` is square with n >= 2, symmetric,
    binary, and has a zero diagonal.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    if n < 2:
        raise ValueError("adjacency matrix needs at least 2 nodes")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency matrix must be symmetric (undirected network)")
    if np.any(np.diag(a) != 0):
        raise ValueError("adjacency matrix must have a zero diagonal (no self-loops)")
    if not np.isin(a, (0.0, 1.0)).all():
        raise ValueError("adjacency entries must be 0 or 1 (binary network)")
    return a


def validate_dyadic_covariate(h, n: int | None = None) -> np.ndarray:
    """Check a dyadic covariate matrix: square, symmetric, zero diagonal."""
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"dyadic covariate matrix must be square, got shape {h.shape}")
    if n is not None and h.shape[0] != n:
        raise ValueError(
            f"dyadic covariate has {h.shape[0]} nodes, expected {n}"
        )
    if not np.allclose(h, h.T):
        raise ValueError("dyadic covariate matrix must be symmetric")
    if np.any(np.diag(h) != 0):
        raise ValueError("dyadic covariate matrix must have a zero diagonal")
    return h


def from_edge_list(edges: Iterable[tuple], node_ids: Sequence) -> np.ndarray:
    """Build an adjacency matrix from undirected edge pairs.

    ``node_ids`` fixes the node universe and its index order. Unknown ids
    and self-loops are input errors; duplicate edges are harmless.
    """
    ids = list(node_ids)
    if len(set(ids)) != len(ids):
        raise ValueError("node_ids contains duplicates")
    if len(ids) < 2:
        raise ValueError("need at least 2 nodes")
    index = {v: i for i, v in enumerate(ids)}
    a = np.zeros((len(ids), len(ids)))
    for u, v in edges:
        if u not in index:
            raise ValueError(f"unknown node id in edge list: {u!r}")
        if v not in index:
            raise ValueError(f"unknown node id in edge list: {v!r}")
        if u == v:
            raise ValueError(f"self-loop not allowed: ({u!r}, {v!r})")
        a[index[u], index[v]] = 1.0
        a[index[v], index[u]] = 1.0
    return a


def density(a) -> float:
    """Observed edges over possible edges, n(n-1)/2."""
    a = validate_adjacency(a)
    n = a.shape[0]
    edges = a.sum() / 2.0
    return float(edges / (n * (n - 1) / 2.0))


class DiameterResult(NamedTuple):
    value: int
    disconnected: bool


def diameter(a) -> DiameterResult:
    """Longest shortest-path length between any two reachable nodes.

    A connected graph yields (diameter, False). For a disconnected graph
    the result is the diameter of the largest connected component together
    with ``disconnected=True``; an edgeless graph yields (0, True).
    """
    a = validate_adjacency(a)
    n = a.shape[0]
    sparse = csr_matrix(a)
    n_comp, labels = connected_components(sparse, directed=False)
    if n_comp == 1:
        dist = shortest_path(sparse, method="D", directed=False, unweighted=True)
        return DiameterResult(int(dist.max()), False)
    sizes = np.bincount(labels, minlength=n_comp)
    best = 0
    for comp in np.flatnonzero(sizes == sizes.max()):
        nodes = np.flatnonzero(labels == comp)
        if len(nodes) == 1:
            continue
        sub = csr_matrix(a[np.ix_(nodes, nodes)])
        dist = shortest_path(sub, method="D", directed=False, unweighted=True)
        best = max(best, int(dist.max()))
    return DiameterResult(best, True)


def transitivity(a) -> float:
    """Global clustering coefficient: 3 * triangles / connected triples.

    Connected triples are paths of length two (ordered center, unordered
    leaves). Returns 0.0 when the graph has no such paths.
    """
    a = validate_adjacency(a)
    deg = a.sum(axis=0)
    triples = float((deg * (deg - 1)).sum() / 2.0)
    if triples == 0:
        return 0.0
    triangles = float(np.trace(a @ a @ a) / 6.0)
    return 3.0 * triangles / triples


def _is_missing(value) -> bool:
    if value is None:
        return True
    if isinstance(value, float) and math.isnan(value):
        return True
    return False


def uniform_homophily(labels: Sequence) -> np.ndarray:
    """Dyadic same-category indicator matrix for a categorical attribute.

    Entry (i, j) is 1 when nodes i != j carry the same label, 0 otherwise;
    the diagonal is 0. Missing labels (None/NaN) are input errors.
    """
    labels = list(labels)
    if len(labels) == 0:
        raise ValueError("empty category column")
    for i, value in enumerate(labels):
        if _is_missing(value):
            raise ValueError(f"missing category value at position {i}")
    arr = np.asarray(labels, dtype=object)
    h = (arr[:, None] == arr[None, :]).astype(float)
    np.fill_diagonal(h, 0.0)
    return h


def adjacency_spectrum(a) -> np.ndarray:
    """All eigenvalues of the adjacency matrix, sorted descending."""
    a = validate_adjacency(a)
    vals = np.linalg.eigvalsh(a)
    return vals[::-1]
