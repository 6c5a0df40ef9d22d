"""
Weighted undirected networks and their network characteristics (NCs)
"""

import dataclasses
import typing

import networkx as nx
import numpy as np
import pandas as pd
from scipy.sparse import csgraph

from . import _errors, _utils

import logging  # isort:skip
_log = logging.getLogger(__name__)


NC_NAMES = ('cpl', 'ge', 'cc', 'le', 'm', 'bc', 'pc')
"""Names of the seven network characteristics in canonical order"""

NC_TABLE_COLUMNS = ('subject_id', 'band', 'age') + NC_NAMES

_TOLERANCE = 1e-12


class WeightedNetwork:
    """
    Symmetric adjacency matrix with weights in ``[0, 1]`` and zero diagonal

    :param weights: Square array-like
    :param labels: Node labels; defaults to ``"n0"``, ``"n1"``, ...

    Values that exceed the bounds by floating point noise are clipped.

    :raise ValueError: if `weights` is not a valid adjacency matrix
    """

    def __init__(self, weights, labels=None):
        w = np.array(weights, dtype=float, order='C')
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise _errors.ValueError(f'Adjacency matrix must be square, not {w.shape}')
        if not np.all(np.isfinite(w)):
            raise _errors.ValueError('Adjacency matrix contains non-finite values')
        if np.any(np.abs(w - w.T) > _TOLERANCE):
            raise _errors.ValueError('Adjacency matrix is not symmetric')
        if np.any(np.abs(np.diagonal(w)) > _TOLERANCE):
            raise _errors.ValueError('Adjacency matrix has non-zero diagonal')
        if np.any(w < -_TOLERANCE) or np.any(w > 1 + _TOLERANCE):
            raise _errors.ValueError('Adjacency matrix has weights outside [0, 1]')
        w = np.clip(w, 0.0, 1.0)
        np.fill_diagonal(w, 0.0)
        w.setflags(write=False)
        self._weights = w

        if labels is None:
            labels = [f'n{i}' for i in range(w.shape[0])]
        labels = tuple(str(label) for label in labels)
        if len(labels) != w.shape[0]:
            raise _errors.ValueError(f'Expected {w.shape[0]} labels, got {len(labels)}')
        self._labels = labels

    @property
    def weights(self):
        """Read-only :class:`numpy.ndarray`"""
        return self._weights

    @property
    def labels(self):
        return self._labels

    @property
    def n(self):
        """Number of nodes"""
        return self._weights.shape[0]

    @property
    def edge_count(self):
        return int(np.count_nonzero(np.triu(self._weights, 1)))

    def replace(self, weights):
        return type(self)(weights, labels=self._labels)

    def __eq__(self, other):
        return (
            isinstance(other, WeightedNetwork)
            and self.labels == other.labels
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self):
        return f'<{type(self).__name__} n={self.n} edges={self.edge_count}>'


class Partition(typing.NamedTuple):
    """Community assignment with contiguous ids from 0 and its modularity `q`"""

    assignment: tuple
    q: float

    @property
    def count(self):
        """Number of communities"""
        return len(set(self.assignment))


@dataclasses.dataclass(frozen=True)
class NCVector:
    """
    The seven network characteristics of one network

    `disconnected` is `True` if some node pairs had no path and :attr:`cpl`
    is the mean over reachable pairs only.
    """

    cpl: float
    ge: float
    cc: float
    le: float
    m: float
    bc: float
    pc: float
    disconnected: bool = False

    def as_array(self):
        return np.array([getattr(self, name) for name in NC_NAMES], dtype=float)

    def as_dict(self):
        return {name: float(getattr(self, name)) for name in NC_NAMES}

    @classmethod
    def from_array(cls, values, disconnected=False):
        values = [float(v) for v in values]
        if len(values) != len(NC_NAMES):
            raise _errors.ValueError(f'Expected {len(NC_NAMES)} values, got {len(values)}')
        return cls(*values, disconnected=disconnected)


class PathLength(typing.NamedTuple):
    value: float
    disconnected: bool


def threshold(net, tau):
    """
    Zero all weights below `tau`

    :raise ValueError: if `tau` is not in ``[0, 1]``
    """
    tau = float(tau)
    if not 0 <= tau <= 1:
        raise _errors.ValueError(f'Threshold must be in [0, 1]: {tau!r}')
    w = net.weights
    return net.replace(np.where(w >= tau, w, 0.0))


def _lengths(w):
    # Edge length is 1/w; zero means no edge for csgraph, which also needs C order
    with np.errstate(divide='ignore'):
        return np.ascontiguousarray(np.where(w > 0, 1 / w, 0.0))


def shortest_path_lengths(net):
    """
    Weighted distances between all node pairs

    Edge length is ``1 / weight``. Unreachable pairs are ``inf``.

    :return: Symmetric :class:`numpy.ndarray` with zero diagonal
    """
    return csgraph.shortest_path(_lengths(net.weights), method='FW', directed=False)


def char_path_length(net):
    """
    Mean shortest path length over ordered node pairs with a finite path

    :raise DisconnectedError: if no pair of nodes is connected

    :return: :class:`PathLength` with the mean and a flag that is `True` if
        any pair is unreachable
    """
    d = shortest_path_lengths(net)
    offdiag = ~np.eye(net.n, dtype=bool)
    finite = np.isfinite(d) & offdiag
    if not np.any(finite):
        raise _errors.DisconnectedError('No pair of nodes is connected')
    return PathLength(
        value=float(np.mean(d[finite])),
        disconnected=bool(np.any(offdiag & ~finite)),
    )


def _efficiency(w):
    n = w.shape[0]
    if n < 2:
        return 0.0
    d = csgraph.shortest_path(_lengths(w), method='FW', directed=False)
    with np.errstate(divide='ignore'):
        inv = 1 / d
    np.fill_diagonal(inv, 0.0)
    return float(np.sum(inv) / (n * (n - 1)))


def global_efficiency(net):
    """Mean inverse shortest path length over ordered pairs (``1/inf = 0``)"""
    return _efficiency(net.weights)


def clustering_coefficients(net):
    """Weighted clustering coefficient of each node (geometric mean of triangles)"""
    w = net.weights
    wmax = np.max(w) if w.size else 0.0
    if wmax <= 0:
        return np.zeros(net.n)
    k = np.count_nonzero(w, axis=1).astype(float)
    ws = np.cbrt(w / wmax)
    cyc3 = np.diagonal(ws @ ws @ ws)
    denom = k * (k - 1)
    out = np.zeros(net.n)
    mask = (k >= 2) & (cyc3 > 0)
    out[mask] = cyc3[mask] / denom[mask]
    return out


def clustering_coefficient(net):
    """Mean of :func:`clustering_coefficients`"""
    return float(np.mean(clustering_coefficients(net))) if net.n else 0.0


def local_efficiencies(net):
    """Global efficiency of each node's neighbour-induced subgraph"""
    w = net.weights
    out = np.zeros(net.n)
    for i in range(net.n):
        neighbours = np.flatnonzero(w[i])
        if len(neighbours) >= 2:
            out[i] = _efficiency(w[np.ix_(neighbours, neighbours)])
    return out


def local_efficiency(net):
    """Mean of :func:`local_efficiencies`"""
    return float(np.mean(local_efficiencies(net))) if net.n else 0.0


def modularity(net, assignment, gamma=1.0):
    """
    Modularity of community `assignment`

    ``Q = sum_ij (w_ij - gamma * s_i * s_j / 2t) * delta(c_i, c_j) / 2t``
    where ``s`` is node strength and ``t`` total edge weight.

    :raise DisconnectedError: if `net` has no edges
    """
    w = net.weights
    two_t = float(np.sum(w))
    if two_t <= 0:
        raise _errors.DisconnectedError('Modularity is undefined for a network without edges')
    assignment = np.asarray(assignment)
    if assignment.shape != (net.n,):
        raise _errors.ValueError(f'Expected {net.n} community ids, got {assignment.shape[0]}')
    s = np.sum(w, axis=1)
    same = assignment[:, None] == assignment[None, :]
    b = w - float(gamma) * np.outer(s, s) / two_t
    return float(np.sum(b[same]) / two_t)


def _contiguous(assignment):
    # Community ids in order of their lowest node
    mapping = {}
    return tuple(mapping.setdefault(c, len(mapping)) for c in assignment)


def _to_graph(net, length=False):
    w = net.weights
    graph = nx.Graph()
    graph.add_nodes_from(range(net.n))
    rows, cols = np.nonzero(np.triu(w, 1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        if length:
            graph.add_edge(i, j, weight=w[i, j], length=1 / w[i, j])
        else:
            graph.add_edge(i, j, weight=w[i, j])
    return graph


def louvain_modularity(net, gamma=1.0, seed=42, restarts=10):
    """
    Community partition by Louvain modularity optimization

    Each restart shuffles the node sweep order with its own stream derived
    from `seed`; the partition with the highest modularity wins. The result
    is never worse than putting all nodes into one community.

    :param float gamma: Resolution parameter
    :param int seed: Root seed
    :param int restarts: Number of Louvain runs

    :raise DisconnectedError: if `net` has no edges

    :return: :class:`Partition`
    """
    if net.edge_count < 1:
        raise _errors.DisconnectedError('Modularity is undefined for a network without edges')

    graph = _to_graph(net)
    best = Partition(assignment=(0,) * net.n, q=modularity(net, [0] * net.n, gamma))
    for restart in range(max(1, int(restarts))):
        communities = nx.community.louvain_communities(
            graph,
            weight='weight',
            resolution=gamma,
            seed=_utils.derive_seed(seed, restart),
        )
        assignment = [0] * net.n
        for c, nodes in enumerate(sorted(communities, key=min)):
            for node in nodes:
                assignment[node] = c
        q = modularity(net, assignment, gamma)
        _log.debug('Louvain restart %d: %d communities, Q=%r', restart, len(communities), q)
        if q > best.q:
            best = Partition(assignment=_contiguous(assignment), q=q)
    return best


def betweenness_centralities(net):
    """
    Betweenness of each node over unordered source/target pairs

    Shortest paths use edge length ``1 / weight``.
    """
    graph = _to_graph(net, length=True)
    bc = nx.betweenness_centrality(graph, weight='length', normalized=False)
    return np.array([bc[i] for i in range(net.n)], dtype=float)


def betweenness_centrality(net):
    """Mean of :func:`betweenness_centralities`"""
    return float(np.mean(betweenness_centralities(net))) if net.n else 0.0


def participation_coefficients(net, partition):
    """
    ``1 - sum_c (s_i(c) / s_i)^2`` for each node, 0 for isolated nodes

    :param partition: :class:`Partition` or sequence of community ids
    """
    assignment = np.asarray(getattr(partition, 'assignment', partition))
    w = net.weights
    strength = np.sum(w, axis=1)
    communities = np.unique(assignment)
    into = np.stack([np.sum(w[:, assignment == c], axis=1) for c in communities], axis=1)
    out = np.zeros(net.n)
    mask = strength > 0
    out[mask] = 1 - np.sum((into[mask] / strength[mask, None]) ** 2, axis=1)
    return out


def participation_coefficient(net, partition):
    """Mean of :func:`participation_coefficients`"""
    return float(np.mean(participation_coefficients(net, partition))) if net.n else 0.0


def compute_ncs(net, tau=0.0, gamma=1.0, seed=42, restarts=10):
    """
    Threshold `net` and compute all seven NCs on the result

    Modularity and participation coefficient share one Louvain partition.

    :param float tau: Weight threshold (see :func:`threshold`)
    :param float gamma: Louvain resolution
    :param int seed: Louvain seed
    :param int restarts: Louvain restarts

    :raise DisconnectedError: if no edge survives thresholding

    :return: :class:`NCVector`
    """
    thresholded = threshold(net, tau)
    if thresholded.edge_count < 1:
        raise _errors.DisconnectedError(f'Network has no edges after thresholding at {tau:g}')

    cpl = char_path_length(thresholded)
    partition = louvain_modularity(thresholded, gamma=gamma, seed=seed, restarts=restarts)
    return NCVector(
        cpl=cpl.value,
        ge=global_efficiency(thresholded),
        cc=clustering_coefficient(thresholded),
        le=local_efficiency(thresholded),
        m=partition.q,
        bc=betweenness_centrality(thresholded),
        pc=participation_coefficient(thresholded, partition),
        disconnected=cpl.disconnected,
    )


# Persistence

def network_filename(subject_id, band_name):
    return f'{subject_id}.{band_name}.fc'


def write_network(path, net):
    """Write adjacency matrix as headerless CSV with full precision"""
    pd.DataFrame(net.weights).to_csv(path, header=False, index=False, float_format='%.17g')


def read_network(path, labels=None):
    """
    Read adjacency matrix written by :func:`write_network`

    :raise FormatError: if `path` can't be read or is not a valid network
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=float)
    except FileNotFoundError:
        raise _errors.FormatError(f'No such file: {path}', path=path)
    except (OSError, ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise _errors.FormatError(f'{path}: {e}', path=path)
    try:
        return WeightedNetwork(frame.to_numpy(dtype=float), labels=labels)
    except _errors.ValueError as e:
        raise _errors.FormatError(f'{path}: {e}', path=path)


def nc_table(rows):
    """
    Tidy NC table

    :param rows: Iterable of ``(subject_id, band, age, NCVector)``

    :return: :class:`pandas.DataFrame` with :data:`NC_TABLE_COLUMNS`
    """
    records = [
        {'subject_id': subject_id, 'band': band, 'age': float(age), **ncs.as_dict()}
        for subject_id, band, age, ncs in rows
    ]
    return pd.DataFrame.from_records(records, columns=list(NC_TABLE_COLUMNS))


def write_nc_table(path, rows):
    nc_table(rows).to_csv(path, index=False, float_format='%.17g')


def read_nc_table(path):
    """
    Read table written by :func:`write_nc_table`

    :raise FormatError: if columns are missing
    """
    try:
        frame = pd.read_csv(path, dtype={'subject_id': str, 'band': str})
    except FileNotFoundError:
        raise _errors.FormatError(f'No such file: {path}', path=path)
    except (OSError, ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise _errors.FormatError(f'{path}: {e}', path=path)
    missing = [c for c in NC_TABLE_COLUMNS if c not in frame.columns]
    if missing:
        raise _errors.FormatError(f'{path}: Missing columns: {", ".join(missing)}', path=path)
    return frame
