"""Graph data model: parsing, Laplacians, relabelings, seeded perturbations.

Graphs are undirected, simple, and labeled 0..n-1.  The JSON schema is

    {"num_nodes": 4, "edges": [[0, 1], [1, 2]], "node_features": [[...], ...]}

with ``node_features`` optional (one row per node).  Edges are stored
canonically as (u, v) with u < v, sorted lexicographically, so two graphs
compare equal iff they are the same labeled graph with the same features.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_GRAPH_KEYS = {"num_nodes", "edges", "node_features"}


@dataclass(frozen=True, eq=False)
class Graph:
    """Labeled undirected simple graph.

    Construct through :func:`make_graph` or :func:`parse_graph`; fields are
    assumed canonical (validated on init, not re-canonicalized).
    """

    num_nodes: int
    edges: tuple[tuple[int, int], ...]
    node_features: np.ndarray | None = None

    def __post_init__(self):
        if not isinstance(self.num_nodes, int) or self.num_nodes < 1:
            raise ValidationError(f"num_nodes must be a positive int, got {self.num_nodes!r}")
        prev = None
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < self.num_nodes):
                raise ValidationError(f"edge [{u}, {v}]: not canonical for num_nodes {self.num_nodes}")
            if prev is not None and e <= prev:
                raise ValidationError(f"edge [{u}, {v}]: out of order or duplicate")
            prev = e
        if self.node_features is not None:
            x = self.node_features
            if x.ndim != 2 or x.shape[0] != self.num_nodes:
                raise ValidationError(
                    f"node_features shape {x.shape} incompatible with num_nodes {self.num_nodes}"
                )

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        if self.num_nodes != other.num_nodes or self.edges != other.edges:
            return False
        a, b = self.node_features, other.node_features
        if a is None or b is None:
            return a is None and b is None
        return a.shape == b.shape and bool(np.array_equal(a, b))


def make_graph(num_nodes, edges, node_features=None):
    """Validate and canonicalize raw edge data into a :class:`Graph`.

    Raises :class:`ValidationError` naming the offending edge on bad labels,
    self-loops, or duplicates.
    """
    if not isinstance(num_nodes, int) or isinstance(num_nodes, bool) or num_nodes < 1:
        raise ValidationError(f"num_nodes must be a positive int, got {num_nodes!r}")
    canon = []
    seen = set()
    for e in edges:
        e = list(e)
        if len(e) != 2:
            raise ValidationError(f"edge {e}: expected [u, v]")
        u, v = e
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (u, v)):
            raise ValidationError(f"edge [{u}, {v}]: labels must be integers")
        if u == v:
            raise ValidationError(f"edge [{u}, {v}]: self-loop")
        for x in (u, v):
            if x < 0:
                raise ValidationError(f"edge [{u}, {v}]: index {x} < 0")
            if x >= num_nodes:
                raise ValidationError(f"edge [{u}, {v}]: index {x} >= num_nodes {num_nodes}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValidationError(f"edge [{u}, {v}]: duplicate of [{key[0]}, {key[1]}]")
        seen.add(key)
        canon.append(key)
    feats = None
    if node_features is not None:
        feats = np.asarray(node_features, dtype=np.float64)
        if feats.ndim != 2 or feats.shape[0] != num_nodes:
            raise ValidationError(
                f"node_features shape {feats.shape} incompatible with num_nodes {num_nodes}"
            )
    return Graph(num_nodes, tuple(sorted(canon)), feats)


def parse_graph(source):
    """Parse a graph from a JSON string or an already-decoded dict."""
    if isinstance(source, (str, bytes)):
        try:
            obj = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"graph JSON is not valid JSON: {exc}") from None
    else:
        obj = source
    if not isinstance(obj, dict):
        raise ValidationError(f"graph JSON must be an object, got {type(obj).__name__}")
    unknown = set(obj) - _GRAPH_KEYS
    if unknown:
        raise ValidationError(f"graph JSON has unknown key {sorted(unknown)[0]!r}")
    if "num_nodes" not in obj:
        raise ValidationError("graph JSON missing key 'num_nodes'")
    return make_graph(obj["num_nodes"], obj.get("edges", []), obj.get("node_features"))


def graph_to_json(g):
    """Serialize canonically; ``parse_graph(graph_to_json(g)) == g``."""
    obj = {"num_nodes": g.num_nodes, "edges": [list(e) for e in g.edges]}
    if g.node_features is not None:
        obj["node_features"] = g.node_features.tolist()
    return json.dumps(obj, sort_keys=True, separators=(", ", ": "))


def adjacency(g):
    a = np.zeros((g.num_nodes, g.num_nodes), dtype=np.float64)
    for u, v in g.edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    return a


def build_laplacian(g):
    """Unnormalized Laplacian L = D - A (symmetric PSD, zero row sums)."""
    a = adjacency(g)
    return np.diag(a.sum(axis=1)) - a


@dataclass(frozen=True)
class Permutation:
    """Bijection of node labels, stored as ``mapping[old] = new``."""

    mapping: tuple

    def __post_init__(self):
        m = self.mapping
        n = len(m)
        if sorted(m) != list(range(n)):
            raise ValidationError(f"mapping {m} is not a bijection of 0..{n - 1}")

    @property
    def n(self):
        return len(self.mapping)

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))

    def inverse(self):
        m = self.mapping
        inv = [0] * len(m)
        for old, new in enumerate(m):
            inv[new] = old
        return Permutation(tuple(inv))

    def matrix(self):
        """Permutation matrix P with (P x)[mapping[i]] = x[i]."""
        n = len(self.mapping)
        p = np.zeros((n, n), dtype=np.float64)
        for old, new in enumerate(self.mapping):
            p[new, old] = 1.0
        return p


def apply_permutation(g, perm):
    """Relabel nodes: returned adjacency equals P A P^T for P = perm.matrix().

    Feature rows move with their nodes.
    """
    if perm.n != g.num_nodes:
        raise ValidationError(f"permutation on {perm.n} labels, graph has {g.num_nodes} nodes")
    m = perm.mapping
    edges = [(m[u], m[v]) for u, v in g.edges]
    feats = None
    if g.node_features is not None:
        feats = np.empty_like(g.node_features)
        feats[list(m)] = g.node_features
    return make_graph(g.num_nodes, edges, feats)


@dataclass(frozen=True)
class PerturbSpec:
    """Seeded perturbation: 'edge-flip' toggles `count` node pairs, 'noise'
    adds a symmetrized Gaussian to the Laplacian (entry scale `sigma`)."""

    mode: str
    count: int = 1
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("edge-flip", "noise"):
            raise ValidationError(f"perturbation mode {self.mode!r} not one of 'edge-flip', 'noise'")
        if self.mode == "edge-flip" and (not isinstance(self.count, int) or self.count < 0):
            raise ValidationError(f"edge-flip count must be a non-negative int, got {self.count!r}")
        if self.mode == "noise" and not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValidationError(f"noise sigma must be finite and >= 0, got {self.sigma!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValidationError(f"seed must be a non-negative int, got {self.seed!r}")


def perturb(g, spec):
    """Apply a :class:`PerturbSpec`.

    edge-flip returns a new :class:`Graph` differing from ``g`` in exactly
    ``spec.count`` node pairs (chosen uniformly without replacement from the
    lexicographic pair list).  noise returns the matrix
    ``L(g) + (E + E^T) / 2`` with E i.i.d. normal(0, sigma); sigma = 0 hands
    back L(g) exactly.
    """
    n = g.num_nodes
    rng = np.random.default_rng(spec.seed)
    if spec.mode == "edge-flip":
        pairs = list(itertools.combinations(range(n), 2))
        if spec.count > len(pairs):
            raise ValidationError(
                f"edge-flip count {spec.count} exceeds {len(pairs)} available node pairs"
            )
        chosen = rng.choice(len(pairs), size=spec.count, replace=False)
        edgeset = set(g.edges)
        for i in sorted(int(k) for k in chosen):
            edgeset ^= {pairs[i]}
        return make_graph(n, sorted(edgeset), g.node_features)
    e = rng.normal(0.0, spec.sigma, size=(n, n))
    return build_laplacian(g) + (e + e.T) / 2.0


def component_count(g):
    """Number of connected components (union-find)."""
    parent = list(range(g.num_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return sum(1 for i, p in enumerate(parent) if find(i) == i)
