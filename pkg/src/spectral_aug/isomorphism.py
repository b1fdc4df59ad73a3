"""Small-graph enumeration, isomorphism testing, and the distinguishing study.

Enumeration walks every edge mask of the labeled complete graph, so it is
exact but exponential: capped at n = 7 (2^21 masks).  Isomorphism classes
are collected on the fly by bucketing each labeled graph under cheap
invariants (degree sequence plus refined color histogram) and confirming
against bucket representatives with an exhaustive degree-pruned assignment
search.  The distinguishing study then asks, per isomorphism class of
connected graphs: which pipelines' fingerprints separate which classes,
and do they ever separate two relabelings of the same graph (they must not).
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import CapabilityError, ValidationError
from .graphs import Graph, Permutation, apply_permutation, make_graph
from .mlp import derive_seed
from .smooth import smooth_aug
from .vanilla import universal_readout, vanilla_aug
from .wl import plain_fingerprint

_ENUM_CAP = 7
_ISO_CAP = 8
PIPELINES = ("vanilla", "oge", "baseline-wl")


def _pair_list(n):
    return list(itertools.combinations(range(n), 2))


def _mask_neighbors(mask, n, pairs):
    nbr = [0] * n
    for k, (u, v) in enumerate(pairs):
        if mask >> k & 1:
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
    return nbr


def _mask_connected(nbr, n):
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        m = frontier
        while m:
            i = (m & -m).bit_length() - 1
            nxt |= nbr[i]
            m &= m - 1
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << n) - 1


def _mask_to_graph(mask, n, pairs):
    return make_graph(n, [pairs[k] for k in range(len(pairs)) if mask >> k & 1])


def enumerate_graphs(n, connected_only=True):
    """Yield labeled graphs on n nodes in ascending edge-mask order."""
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive int, got {n!r}")
    if n > _ENUM_CAP:
        raise CapabilityError(f"enumeration capped at n = {_ENUM_CAP}, got n = {n}")
    pairs = _pair_list(n)
    for mask in range(1 << len(pairs)):
        nbr = _mask_neighbors(mask, n, pairs)
        if connected_only and not _mask_connected(nbr, n):
            continue
        yield _mask_to_graph(mask, n, pairs)


def _popcount_degrees(nbr):
    return [bin(m).count("1") for m in nbr]


def _refined_colors(nbr, n, rounds=3):
    # ids ranked by sorted signature, so colors are labeling-canonical
    # (first-encounter interning would leak the node order into the ids)
    colors = [0] * n
    for _ in range(rounds):
        sigs = []
        for i in range(n):
            neigh = []
            m = nbr[i]
            while m:
                j = (m & -m).bit_length() - 1
                neigh.append(colors[j])
                m &= m - 1
            neigh.sort()
            sigs.append((colors[i], tuple(neigh)))
        rank = {sig: k for k, sig in enumerate(sorted(set(sigs)))}
        colors = [rank[sig] for sig in sigs]
    return colors


def _mask_isomorphic(nbr_a, nbr_b, n):
    """Exhaustive assignment search with degree and color pruning."""
    deg_a = _popcount_degrees(nbr_a)
    deg_b = _popcount_degrees(nbr_b)
    if sorted(deg_a) != sorted(deg_b):
        return False
    col_a = _refined_colors(nbr_a, n)
    col_b = _refined_colors(nbr_b, n)
    if sorted(col_a) != sorted(col_b):
        return False
    order = sorted(range(n), key=lambda i: (-deg_a[i], col_a[i], i))
    image = [-1] * n

    def assign(idx, used):
        if idx == n:
            return True
        u = order[idx]
        for w in range(n):
            bit = 1 << w
            if used & bit or deg_b[w] != deg_a[u] or col_b[w] != col_a[u]:
                continue
            ok = True
            for prev in order[:idx]:
                if (nbr_a[u] >> prev & 1) != (nbr_b[w] >> image[prev] & 1):
                    ok = False
                    break
            if not ok:
                continue
            image[u] = w
            if assign(idx + 1, used | bit):
                return True
            image[u] = -1
        return False

    return assign(0, 0)


def _graph_neighbors(g):
    nbr = [0] * g.num_nodes
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    return nbr


def is_isomorphic(g, h):
    """Exact isomorphism test by exhaustive degree-pruned search (n <= 8)."""
    if not isinstance(g, Graph) or not isinstance(h, Graph):
        raise ValidationError("is_isomorphic expects two Graphs")
    if max(g.num_nodes, h.num_nodes) > _ISO_CAP:
        raise CapabilityError(f"isomorphism testing capped at n = {_ISO_CAP}")
    if g.num_nodes != h.num_nodes or len(g.edges) != len(h.edges):
        return False
    return _mask_isomorphic(_graph_neighbors(g), _graph_neighbors(h), g.num_nodes)


@lru_cache(maxsize=16)
def iso_classes(n, connected_only=True):
    """Representatives of isomorphism classes, in first-seen (mask) order."""
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive int, got {n!r}")
    if n > _ENUM_CAP:
        raise CapabilityError(f"enumeration capped at n = {_ENUM_CAP}, got n = {n}")
    pairs = _pair_list(n)
    buckets = {}
    reps = []
    for mask in range(1 << len(pairs)):
        nbr = _mask_neighbors(mask, n, pairs)
        if connected_only and not _mask_connected(nbr, n):
            continue
        key = (tuple(sorted(_popcount_degrees(nbr))), tuple(sorted(_refined_colors(nbr, n))))
        bucket = buckets.setdefault(key, [])
        if not any(_mask_isomorphic(nbr, rep_nbr, n) for rep_nbr in bucket):
            bucket.append(nbr)
            reps.append(_mask_to_graph(mask, n, pairs))
    return tuple(reps)


def _fingerprint(g, pipeline, rounds, decimals, vanilla_cfg, oge_cfg):
    if pipeline == "vanilla":
        return universal_readout(g, vanilla_aug(g, vanilla_cfg), rounds, decimals).digest
    if pipeline == "oge":
        return universal_readout(g, smooth_aug(g, oge_cfg), rounds, decimals).digest
    return plain_fingerprint(g, rounds)


def distinguishing_study(n_max, pipeline, vanilla_cfg=None, oge_cfg=None,
                         seed=0, rounds=3, decimals=6, exemplar_cap=20):
    """Fingerprint collisions and false separations over all classes up to n_max.

    For each n, fingerprints every connected isomorphism class under the
    chosen pipeline; counts colliding non-isomorphic pairs (with exemplar
    ids, capped), and checks that a seeded relabeling of each class
    representative keeps its fingerprint (false separations must be zero;
    any occurrence is a bug in the pipeline's invariance).
    """
    if pipeline not in PIPELINES:
        raise ValidationError(f"pipeline {pipeline!r} not one of {PIPELINES}")
    if not isinstance(n_max, int) or not 1 <= n_max <= _ENUM_CAP:
        raise ValidationError(f"n_max must be 1..{_ENUM_CAP}, got {n_max!r}")
    if pipeline == "vanilla" and vanilla_cfg is None:
        raise ValidationError("vanilla pipeline needs vanilla_cfg")
    if pipeline == "oge" and oge_cfg is None:
        raise ValidationError("oge pipeline needs oge_cfg")
    per_n = []
    for n in range(1, n_max + 1):
        reps = iso_classes(n)
        digests = []
        false_separations = []
        for idx, g in enumerate(reps):
            d = _fingerprint(g, pipeline, rounds, decimals, vanilla_cfg, oge_cfg)
            digests.append(d)
            rng_seed = derive_seed(seed, n, idx)
            perm = _seeded_permutation(n, rng_seed)
            d2 = _fingerprint(apply_permutation(g, perm), pipeline, rounds, decimals,
                              vanilla_cfg, oge_cfg)
            if d2 != d:
                false_separations.append(f"n{n}-c{idx}")
        collisions = 0
        exemplars = []
        by_digest = {}
        for idx, d in enumerate(digests):
            by_digest.setdefault(d, []).append(idx)
        for members in by_digest.values():
            if len(members) > 1:
                collisions += len(members) * (len(members) - 1) // 2
                for a, b in itertools.combinations(members, 2):
                    if len(exemplars) < exemplar_cap:
                        exemplars.append([f"n{n}-c{a}", f"n{n}-c{b}"])
        per_n.append({
            "n": n,
            "classes": len(reps),
            "pairs": len(reps) * (len(reps) - 1) // 2,
            "collisions": collisions,
            "collision_exemplars": exemplars,
            "false_separations": len(false_separations),
            "false_separation_ids": false_separations,
        })
    return {
        "pipeline": pipeline,
        "n_max": n_max,
        "rounds": rounds,
        "decimals": decimals,
        "seed": seed,
        "per_n": per_n,
        "total_collisions": sum(p["collisions"] for p in per_n),
        "total_false_separations": sum(p["false_separations"] for p in per_n),
    }


def _seeded_permutation(n, seed):
    import numpy as np

    rng = np.random.default_rng(seed)
    return Permutation(tuple(int(x) for x in rng.permutation(n)))


def class_graph(n, idx):
    """Representative graph for study id ``n{n}-c{idx}``."""
    reps = iso_classes(n)
    if not 0 <= idx < len(reps):
        raise ValidationError(f"class index {idx} out of range for n = {n}")
    return reps[idx]
