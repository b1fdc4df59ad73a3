"""Iterative color refinement with stable, order-independent hashing.

Colors are 16-byte blake2b digests of their own refinement history, so they
compare equal across graphs and across processes without a shared lookup
table.  Length-prefixing makes the hash of a part list injective on the
parts (no concatenation ambiguity).
"""

from __future__ import annotations

import hashlib


def hash_parts(*parts):
    h = hashlib.blake2b(digest_size=16)
    for p in parts:
        h.update(len(p).to_bytes(4, "big"))
        h.update(p)
    return h.digest()


def neighbor_lists(g):
    nbrs = [[] for _ in range(g.num_nodes)]
    for u, v in g.edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    return nbrs


def refine(neighbors, colors, rounds):
    """``rounds`` rounds of c'(v) = H(c(v), sorted neighbor colors)."""
    for _ in range(rounds):
        colors = [
            hash_parts(colors[v], *sorted(colors[u] for u in neighbors[v]))
            for v in range(len(neighbors))
        ]
    return colors


def plain_fingerprint(g, rounds=3):
    """Hash of plain color refinement from a constant initial coloring."""
    colors = refine(neighbor_lists(g), [b"."] * g.num_nodes, rounds)
    return hash_parts(str(g.num_nodes).encode(), *sorted(colors)).hex()
