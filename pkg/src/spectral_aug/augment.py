"""Node augmentation container and its JSON artifact form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .serialize import canonical_json


@dataclass(frozen=True, eq=False)
class Augmentation:
    """Per-node feature matrix ``z`` of shape (n, d) plus provenance meta."""

    z: np.ndarray
    meta: dict

    def __post_init__(self):
        if self.z.ndim != 2:
            raise ValidationError(f"augmentation z must be 2-D, got shape {self.z.shape}")

    @property
    def n(self):
        return self.z.shape[0]

    @property
    def d(self):
        return self.z.shape[1]

    def to_json_obj(self):
        return {
            "n": int(self.n),
            "d": int(self.d),
            "z": [[float(x) for x in row] for row in self.z],
            "meta": self.meta,
        }

    def to_json(self):
        return canonical_json(self.to_json_obj())


def augmentation_from_json_obj(obj):
    z = np.asarray(obj["z"], dtype=np.float64)
    if z.shape != (obj["n"], obj["d"]):
        raise ValidationError(f"z shape {z.shape} disagrees with n={obj['n']}, d={obj['d']}")
    return Augmentation(z, dict(obj.get("meta", {})))
