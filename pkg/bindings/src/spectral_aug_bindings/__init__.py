"""JSON-string boundary around :mod:`spectral_aug` for ML pipeline embedding.

Everything crosses the boundary as text or builtins: graphs and configs go
in as JSON strings, augmentations come back as plain dicts of ints, floats,
lists, and strings.  Callers therefore share no in-memory layout with the
library, and the results serialize back to exactly the bytes the library's
own CLI writes.  Every failure, whatever its origin, surfaces as
:class:`BindingError` tagged with the library's error category.

Calls are pure and hold no shared state, so concurrent use is fine.
"""

import json
from dataclasses import dataclass

import spectral_aug as _lib

__version__ = _lib.__version__

__all__ = [
    "BindingError",
    "BoundGraph",
    "augment",
    "stability_bound",
    "__version__",
]


class BindingError(Exception):
    """Any failure inside the boundary.

    ``category`` mirrors the library's taxonomy: ``"validation"`` for bad
    inputs, ``"capability"`` for requests past a hard size cap, and
    ``"internal"`` for everything else.
    """

    def __init__(self, message, category):
        super().__init__(message)
        self.category = category


def _translate(exc):
    if isinstance(exc, _lib.SpectralAugError):
        return BindingError(str(exc), exc.category)
    return BindingError(f"{type(exc).__name__}: {exc}", "internal")


def _require_str(name, value):
    if not isinstance(value, str):
        raise BindingError(
            f"{name} must be a JSON string, got {type(value).__name__}",
            "validation")


@dataclass(frozen=True)
class BoundGraph:
    """Graph as it crosses the boundary; one field per JSON key.

    ``from_json`` -> ``to_json`` -> ``from_json`` is a fixpoint: the second
    parse yields an equal value and the second serialization equal text.
    """

    num_nodes: int
    edges: tuple
    node_features: tuple | None = None

    @classmethod
    def from_json(cls, text):
        _require_str("graph JSON", text)
        try:
            g = _lib.parse_graph(text)
        except Exception as exc:
            raise _translate(exc) from exc
        feats = None
        if g.node_features is not None:
            feats = tuple(tuple(float(x) for x in row) for row in g.node_features)
        return cls(g.num_nodes, g.edges, feats)

    def to_json(self):
        try:
            g = _lib.make_graph(self.num_nodes, [list(e) for e in self.edges],
                                None if self.node_features is None
                                else [list(row) for row in self.node_features])
        except Exception as exc:
            raise _translate(exc) from exc
        return _lib.graph_to_json(g)


def augment(graph_json, config_json):
    """Compute the configured node augmentation for one graph.

    ``graph_json`` is a graph per the library's JSON schema; ``config_json``
    is a JSON document with the same shape as the CLI's config file (same
    tables, same keys, same defaults), so ``augment.method`` selects the
    pipeline.  Returns ``{"n", "d", "z", "meta"}`` with ``z`` a row-major
    nested list, numerically identical to the library's in-process result:
    dumping the dict with sorted keys and compact separators reproduces the
    CLI's ``<stem>.aug.json`` byte for byte.
    """
    _require_str("graph_json", graph_json)
    _require_str("config_json", config_json)
    try:
        cfg_obj = json.loads(config_json)
    except json.JSONDecodeError as exc:
        raise BindingError(f"config JSON is not valid JSON: {exc}", "validation") from None
    try:
        cfg = _lib.config_from_dict(cfg_obj)
        g = _lib.parse_graph(graph_json)
        if cfg.augment.method == "vanilla":
            aug = _lib.vanilla_aug(g, _lib.vanilla_config(cfg))
        else:
            aug = _lib.smooth_aug(g, _lib.oge_config(cfg))
    except Exception as exc:
        raise _translate(exc) from exc
    return aug.to_json_obj()


def stability_bound(n, j_psi, j_phi, j_rho, j_f, dl_spec, dl_fro):
    """Output-distance bound passthrough; see :func:`spectral_aug.stability_bound`."""
    try:
        return float(_lib.stability_bound(n, j_psi, j_phi, j_rho, j_f, dl_spec, dl_fro))
    except Exception as exc:
        raise _translate(exc) from exc
