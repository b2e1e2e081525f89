"""JSON run configuration: defaults, validation and ``--set`` overrides."""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable

from .analytic import DropletParams, DropletState, KineticConvention
from .core import SpatialGrid
from .exceptions import ConfigError
from .potentials import PotentialSpec, Variant
from .propagator import EvolutionConfig
from .stability import NoiseDistribution, NoiseMode, NoiseSpec

# every accepted key with its default; None marks "unset"
DEFAULTS: dict[str, Any] = {
    "grid": {"n_points": 4096, "x_min": -80.0, "dx": 0.0488},
    "droplet": {"N": 1.0, "mu_ratio": None, "G1": 1.0, "G2": 1.0, "convention": "half"},
    "potential": {"variant": "free", "a": 0.0, "alpha": 0.0, "omega": 1.0,
                  "zero_initial_offset": None},
    "evolution": {"dt": 1e-4, "n_steps": 10000, "record_every": 100, "snapshot_every": 0},
    "diagnostics": {
        "times": [0.0, 1.0],
        "probes": [],
        "wigner": {"t": 1.0, "source": "analytic", "p_min": None, "p_max": None,
                   "n_p": 256, "x_min": None, "x_max": None},
        "entropy": {"normalize": True, "window_min": None, "window_max": None,
                    "base": "e", "source": "analytic"},
    },
    "noise": {"fraction": 0.01, "n_realizations": 8, "mode": "amplitude",
              "distribution": "uniform", "enforce": False},
    "output_dir": "out",
    "seed": 0,
}

_INT_KEYS = {"grid.n_points", "evolution.n_steps", "evolution.record_every",
             "evolution.snapshot_every", "diagnostics.wigner.n_p",
             "noise.n_realizations", "seed"}
_STR_KEYS = {"droplet.convention", "potential.variant", "diagnostics.wigner.source",
             "diagnostics.entropy.source", "noise.mode", "noise.distribution",
             "output_dir", "diagnostics.entropy.base"}
_BOOL_KEYS = {"diagnostics.entropy.normalize", "potential.zero_initial_offset",
              "noise.enforce"}
_LIST_KEYS = {"diagnostics.times", "diagnostics.probes"}


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _merge(base: dict, doc: dict, path: str, given: set) -> None:
    if not isinstance(doc, dict):
        raise ConfigError("expected an object", key=path or "<root>")
    for key, value in doc.items():
        kp = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError("unknown key", key=kp)
        if isinstance(base[key], dict):
            if value is None:
                continue
            _merge(base[key], value, kp, given)
        else:
            base[key] = value
            given.add(kp)


def _check_types(node: dict, path: str = "") -> None:
    for key, value in node.items():
        kp = f"{path}.{key}" if path else key
        if isinstance(value, dict):
            _check_types(value, kp)
            continue
        if value is None:
            continue
        if kp in _INT_KEYS:
            if isinstance(value, bool) or not isinstance(value, int):
                if not (isinstance(value, float) and value.is_integer()):
                    raise ConfigError(f"expected an integer, got {value!r}", key=kp)
                node[key] = int(value)
        elif kp in _STR_KEYS:
            if not isinstance(value, str):
                raise ConfigError(f"expected a string, got {value!r}", key=kp)
        elif kp in _BOOL_KEYS:
            if not isinstance(value, bool):
                raise ConfigError(f"expected true/false, got {value!r}", key=kp)
        elif kp in _LIST_KEYS:
            if not isinstance(value, list) or not all(_is_number(v) for v in value):
                raise ConfigError("expected a list of numbers", key=kp)
        elif not _is_number(value):
            raise ConfigError(f"expected a finite number, got {value!r}", key=kp)


def parse_value(text: str):
    """Interpret an override value as JSON, falling back to a bare string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(doc: dict, assignment: str) -> None:
    """Apply ``dotted.key=value`` to a nested document in place."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    key, raw = assignment.split("=", 1)
    parts = key.strip().split(".")
    node = doc
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError("cannot descend into a scalar", key=key)
    node[parts[-1]] = parse_value(raw.strip())
    # N and mu_ratio are alternatives: setting one replaces the other
    twin = {"N": "mu_ratio", "mu_ratio": "N"}
    if parts[:-1] == ["droplet"] and parts[-1] in twin and node[parts[-1]] is not None:
        node[twin[parts[-1]]] = None


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; ``values`` holds every key with defaults applied."""

    values: dict

    def section(self, name: str) -> dict:
        return self.values[name]

    @property
    def grid(self) -> SpatialGrid:
        g = self.values["grid"]
        return SpatialGrid(g["n_points"], g["x_min"], g["dx"])

    @property
    def params(self) -> DropletParams:
        d = self.values["droplet"]
        if d["mu_ratio"] is not None:
            return DropletParams.from_ratio(d["mu_ratio"], d["G1"], d["G2"], d["convention"])
        return DropletParams.from_norm(d["N"], d["G1"], d["G2"], d["convention"])

    @property
    def potential(self) -> PotentialSpec:
        p = self.values["potential"]
        return PotentialSpec(p["variant"], p["a"], p["alpha"], p["omega"],
                             p["zero_initial_offset"])

    @property
    def state(self) -> DropletState:
        return DropletState(self.params, self.potential)

    def evolution_config(self, keep_snapshots: bool = False) -> EvolutionConfig:
        e = self.values["evolution"]
        g1, g2 = self.params.couplings
        return EvolutionConfig(e["dt"], e["n_steps"], e["record_every"], g1, g2,
                               keep_snapshots=keep_snapshots)

    @property
    def noise(self) -> NoiseSpec:
        n = self.values["noise"]
        return NoiseSpec(n["fraction"], self.values["seed"], n["n_realizations"],
                         n["mode"], n["distribution"])

    def entropy_kwargs(self) -> dict:
        e = self.values["diagnostics"]["entropy"]
        window = None
        if e["window_min"] is not None or e["window_max"] is not None:
            window = (e["window_min"], e["window_max"])
        base = math.e if e["base"] == "e" else float(e["base"])
        return {"normalize": e["normalize"], "window": window, "base": base}

    def to_dict(self) -> dict:
        return copy.deepcopy(self.values)


def _validate(values: dict, given: set) -> None:
    d = values["droplet"]
    if "droplet.N" in given and "droplet.mu_ratio" in given and d["mu_ratio"] is not None \
            and d["N"] is not None:
        raise ConfigError("give exactly one of droplet.N and droplet.mu_ratio",
                          key="droplet.N, droplet.mu_ratio")
    if d["mu_ratio"] is not None:
        d["N"] = None
    elif d["N"] is None:
        raise ConfigError("one of droplet.N or droplet.mu_ratio is required", key="droplet.N")

    p = values["potential"]
    try:
        variant = Variant(p["variant"])
    except ValueError:
        raise ConfigError(f"unknown variant {p['variant']!r}; use free, constant or modulated",
                          key="potential.variant") from None
    if variant is not Variant.MODULATED:
        for k in ("alpha", "omega", "zero_initial_offset"):
            if f"potential.{k}" in given and p[k] != DEFAULTS["potential"][k]:
                raise ConfigError(f"only meaningful for variant 'modulated' "
                                  f"(variant is {variant.value!r})",
                                  key=f"potential.{k}, potential.variant")
    if variant is Variant.FREE_SPACE and "potential.a" in given and p["a"] != 0:
        raise ConfigError("free space takes no acceleration",
                          key="potential.a, potential.variant")

    try:
        KineticConvention(d["convention"])
    except ValueError:
        raise ConfigError("convention must be 'half' or 'full'", key="droplet.convention") from None
    for key in ("wigner", "entropy"):
        src = values["diagnostics"][key]["source"]
        if src not in ("analytic", "numeric"):
            raise ConfigError("source must be 'analytic' or 'numeric'",
                              key=f"diagnostics.{key}.source")
    base = values["diagnostics"]["entropy"]["base"]
    if base != "e":
        try:
            if not float(base) > 1:
                raise ValueError
        except ValueError:
            raise ConfigError("base must be 'e' or a number > 1",
                              key="diagnostics.entropy.base") from None
    if values["seed"] < 0 or values["seed"] >= 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer", key="seed")
    for enum_cls, key in ((NoiseMode, "mode"), (NoiseDistribution, "distribution")):
        try:
            enum_cls(values["noise"][key])
        except ValueError:
            raise ConfigError(f"unknown value {values['noise'][key]!r}", key=f"noise.{key}") from None

    cfg = RunConfig(values)
    # build every object once so module invariants surface with a key path
    for key, build in (("grid", lambda: cfg.grid), ("droplet", lambda: cfg.params),
                       ("potential", lambda: cfg.potential),
                       ("evolution", lambda: cfg.evolution_config()),
                       ("noise", lambda: cfg.noise)):
        try:
            build()
        except ValueError as exc:
            raise ConfigError(str(exc), key=key) from None


def parse_config(text: str | dict | None = "", overrides: Iterable[str] = ()) -> RunConfig:
    """Parse a JSON document (or a run manifest) into a validated :class:`RunConfig`.

    An empty document gives the full default configuration: a free-space
    droplet with ``N = 1``.  Unknown keys are rejected with their dotted path.
    """
    if isinstance(text, dict):
        doc = copy.deepcopy(text)
    elif text is None or not str(text).strip():
        doc = {}
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object")
    if "resolved_config" in doc and "manifest_version" in doc:
        doc = copy.deepcopy(doc["resolved_config"])
    for assignment in overrides:
        apply_override(doc, assignment)

    values = copy.deepcopy(DEFAULTS)
    given: set = set()
    _merge(values, doc, "", given)
    _check_types(values)
    _validate(values, given)
    return RunConfig(values)
