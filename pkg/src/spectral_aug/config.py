"""Run configuration: one TOML document, one table per command.

Top-level keys ``seed``, ``out``, ``jobs``, ``format`` apply everywhere; tables
``[augment]``, ``[stability]``, ``[iso]``, ``[lemmas]`` hold per-command
knobs.  Validation is strict: an unknown key anywhere is a validation
error naming the key, so typos cannot silently fall back to defaults.
TOML has no null, so ``tau_group = 0.0`` means "derive the grouping
threshold from the spectrum" and ``encoder_out = 0`` means "the method's
default width" (1 for vanilla, 8 for oge).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .errors import ValidationError
from .serialize import canonical_json
from .smooth import OgeConfig, SmoothingFn
from .vanilla import VanillaConfig


@dataclass(frozen=True)
class AugmentSettings:
    method: str = "oge"
    path: str = "repeated"
    smoothing_family: str = "hat"
    smoothing_delta: float = 0.1
    tau_group: float = 0.0
    encoder_kind: str = "gram-deepset"
    encoder_width: int = 64
    encoder_depth: int = 3
    encoder_out: int = 0
    set_m: int = 16
    set_d_out: int = 4
    set_hidden: int = 64
    g_latent: int = 16


@dataclass(frozen=True)
class StabilitySettings:
    experiments: int = 200
    n_values: tuple = (4, 5, 6, 7, 8)
    flip_count: int = 1
    p_mode: str = "bruteforce"
    probes: int = 256
    safety: float = 2.0


@dataclass(frozen=True)
class IsoSettings:
    n_max: int = 6
    pipeline: str = "vanilla"
    rounds: int = 3
    decimals: int = 6


@dataclass(frozen=True)
class LemmaSettings:
    weyl_pairs: int = 500
    dk_pairs: int = 200
    product_chains: int = 200
    n: int = 8


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    out: str = "out"
    jobs: int = 1
    format: str = "json"
    augment: AugmentSettings = field(default_factory=AugmentSettings)
    stability: StabilitySettings = field(default_factory=StabilitySettings)
    iso: IsoSettings = field(default_factory=IsoSettings)
    lemmas: LemmaSettings = field(default_factory=LemmaSettings)


_TABLES = {"augment": AugmentSettings, "stability": StabilitySettings,
           "iso": IsoSettings, "lemmas": LemmaSettings}


def _coerce(table, name, value, default):
    label = f"{table}.{name}" if table else name
    if isinstance(default, bool):
        raise ValidationError(f"config key {label!r} unsupported type")
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"config key {label!r} must be an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"config key {label!r} must be a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ValidationError(f"config key {label!r} must be a string, got {value!r}")
        return value
    if isinstance(default, tuple):
        if not isinstance(value, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in value
        ):
            raise ValidationError(f"config key {label!r} must be a list of integers, got {value!r}")
        return tuple(value)
    raise ValidationError(f"config key {label!r} unsupported type")


def _settings_from_dict(cls, table, d):
    known = {f.name: f.default for f in fields(cls)}
    out = {}
    for key, value in d.items():
        if key not in known:
            raise ValidationError(f"unknown config key {table + '.' + key!r}")
        out[key] = _coerce(table, key, value, known[key])
    return cls(**out)


def config_from_dict(d):
    if not isinstance(d, dict):
        raise ValidationError("config root must be a table")
    top_defaults = {"seed": 0, "out": "out", "jobs": 1, "format": "json"}
    top = {}
    tables = {}
    for key, value in d.items():
        if key in _TABLES:
            if not isinstance(value, dict):
                raise ValidationError(f"config table {key!r} must be a table")
            tables[key] = _settings_from_dict(_TABLES[key], key, value)
        elif key in top_defaults:
            top[key] = _coerce("", key, value, top_defaults[key])
        else:
            raise ValidationError(f"unknown config key {key!r}")
    cfg = RunConfig(
        seed=top.get("seed", 0), out=top.get("out", "out"),
        jobs=top.get("jobs", 1), format=top.get("format", "json"),
        **{name: tables.get(name, _TABLES[name]()) for name in _TABLES},
    )
    _validate(cfg)
    return cfg


def _validate(cfg):
    if cfg.seed < 0:
        raise ValidationError(f"config key 'seed' must be >= 0, got {cfg.seed}")
    if cfg.jobs < 1:
        raise ValidationError(f"config key 'jobs' must be >= 1, got {cfg.jobs}")
    if cfg.format not in ("json", "csv"):
        raise ValidationError(f"config key 'format' must be 'json' or 'csv', got {cfg.format!r}")
    a = cfg.augment
    if a.method not in ("vanilla", "oge"):
        raise ValidationError(f"config key 'augment.method' must be 'vanilla' or 'oge', got {a.method!r}")
    if a.path not in ("repeated", "grouped"):
        raise ValidationError(f"config key 'augment.path' must be 'repeated' or 'grouped', got {a.path!r}")
    if a.tau_group < 0:
        raise ValidationError(f"config key 'augment.tau_group' must be >= 0, got {a.tau_group}")
    if a.encoder_out < 0:
        raise ValidationError(f"config key 'augment.encoder_out' must be >= 0, got {a.encoder_out}")
    s = cfg.stability
    if s.p_mode not in ("bruteforce", "identity"):
        raise ValidationError(f"config key 'stability.p_mode' must be 'bruteforce' or 'identity', got {s.p_mode!r}")
    # experiments == 0 / empty n_values pass here; cmd_stability reports the empty grid
    if s.experiments < 0:
        raise ValidationError(f"config key 'stability.experiments' must be >= 0, got {s.experiments}")
    if any(n < 1 for n in s.n_values):
        raise ValidationError("config key 'stability.n_values' entries must be >= 1")
    if s.safety < 1.0:
        raise ValidationError(f"config key 'stability.safety' must be >= 1, got {s.safety}")
    i = cfg.iso
    if i.pipeline not in ("vanilla", "oge", "baseline-wl"):
        raise ValidationError(f"config key 'iso.pipeline' invalid: {i.pipeline!r}")
    if not 1 <= i.n_max <= 7:
        raise ValidationError(f"config key 'iso.n_max' must be 1..7, got {i.n_max}")
    for name, val in (("iso.rounds", i.rounds), ("iso.decimals", i.decimals)):
        if val < 0:
            raise ValidationError(f"config key {name!r} must be >= 0, got {val}")
    le = cfg.lemmas
    for name, val in (("lemmas.weyl_pairs", le.weyl_pairs), ("lemmas.dk_pairs", le.dk_pairs),
                      ("lemmas.product_chains", le.product_chains), ("lemmas.n", le.n)):
        if val < 1:
            raise ValidationError(f"config key {name!r} must be >= 1, got {val}")


def load_config(path=None):
    """Parse a TOML config file; ``None`` yields all defaults."""
    if path is None:
        return config_from_dict({})
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"config file is not valid TOML: {exc}") from None
    return config_from_dict(data)


def config_digest(cfg):
    """Stable short digest of a full or partial config, for artifact meta."""
    obj = _as_plain(cfg)
    return hashlib.blake2b(canonical_json(obj).encode(), digest_size=8).hexdigest()


def _as_plain(value):
    if hasattr(value, "__dataclass_fields__"):
        return {f.name: _as_plain(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, tuple):
        return list(value)
    return value


def vanilla_config(cfg):
    """The per-eigenspace augmentation config a RunConfig induces."""
    a = cfg.augment
    return VanillaConfig(
        tau_group=a.tau_group if a.tau_group > 0 else None,
        encoder_kind=a.encoder_kind, encoder_width=a.encoder_width,
        encoder_depth=a.encoder_depth,
        encoder_out=a.encoder_out if a.encoder_out > 0 else 1,
        g_latent=a.g_latent, set_hidden=a.set_hidden, seed=cfg.seed,
    )


def oge_config(cfg):
    """The smooth augmentation config a RunConfig induces."""
    a = cfg.augment
    return OgeConfig(
        path=a.path,
        smoothing=SmoothingFn(a.smoothing_family, a.smoothing_delta),
        tau_group=a.tau_group if a.tau_group > 0 else None,
        encoder_kind=a.encoder_kind, encoder_width=a.encoder_width,
        encoder_depth=a.encoder_depth,
        encoder_out=a.encoder_out if a.encoder_out > 0 else 8,
        set_m=a.set_m, set_d_out=a.set_d_out, set_hidden=a.set_hidden,
        seed=cfg.seed,
    )
