"""Run configuration: INI-style files with sections [system], [schedule],
[analysis], [output].

All numeric values accept exact rational syntax "p/q"; thetas parsed as
rationals stay exact through the whole analysis.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import ConfigError
from .feasibility import MAX_DIM
from .generators import (
    BlockSubstitution,
    ExplicitSystem,
    LatticeSystem,
    ProductSystem,
    SubstitutionSystem,
    System,
)
from .torus import Scalar, parse_scalar

KINDS = ("lattice_model", "block_substitution", "product_1d", "explicit_points")


@dataclass
class RunConfig:
    kind: str
    dimension: int
    levels: int
    thetas: List[Tuple[Scalar, ...]]
    k_mode: str = "1"  # "1" | "d" | "both"
    # generator parameters (kind-dependent)
    qs: Tuple[int, ...] = ()
    size_factor: int = 4
    alphabet: Tuple[str, ...] = ()
    rule: dict = field(default_factory=dict)
    seed: Optional[str] = None
    pad: Optional[int] = None
    factors: List[dict] = field(default_factory=list)
    points_file: Optional[str] = None
    # analysis switches
    scan: bool = False
    scan_qmax: int = 8
    scan_max_power: int = 6
    scan_real_targets: Tuple[float, ...] = ()
    strict_well_distributed: bool = False
    thin: bool = False
    window_margin: float = 0.0
    # output
    output_format: str = "json"
    output_path: Optional[str] = None
    timestamp: bool = True

    def k_list(self) -> List[int]:
        if self.k_mode == "1":
            return [1]
        if self.k_mode == "d":
            return [self.dimension]
        return sorted({1, self.dimension})

    def echo(self) -> dict:
        """Config echo for the report: every materialized value."""
        out = {
            "kind": self.kind,
            "dimension": self.dimension,
            "levels": self.levels,
            "thetas": [[str(t) for t in th] for th in self.thetas],
            "k": self.k_mode,
            "scan": self.scan,
            "strict_well_distributed": self.strict_well_distributed,
            "thin": self.thin,
            "window_margin": self.window_margin,
            "output_format": self.output_format,
        }
        if self.kind == "lattice_model":
            out["q"] = list(self.qs)
            out["size_factor"] = self.size_factor
        elif self.kind == "block_substitution":
            out["alphabet"] = list(self.alphabet)
            out["rule"] = {s: self.rule[s] for s in sorted(self.rule)}
            out["seed"] = self.seed
            out["pad"] = self.pad
        elif self.kind == "product_1d":
            out["factors"] = self.factors
        elif self.kind == "explicit_points":
            out["points_file"] = self.points_file
        if self.scan:
            out["scan_qmax"] = self.scan_qmax
        return out


def _parse_theta(text: str, dimension: int) -> Tuple[Scalar, ...]:
    parts = text.replace(",", " ").split()
    theta = tuple(parse_scalar(p) for p in parts)
    if len(theta) != dimension:
        raise ConfigError(
            f"[analysis] theta '{text}' has {len(theta)} components, "
            f"the system is {dimension}-dimensional"
        )
    return theta


def _parse_rule(section, alphabet: Sequence[str]) -> dict:
    """rule.a = ab        (d = 1, word image)
    rule.a = ab/ba        (d = 2, rows separated by '/')"""
    rule = {}
    for key, value in section.items():
        if not key.startswith("rule."):
            continue
        sym = key[len("rule."):]
        rows = [list(r) for r in value.strip().split("/")]
        rule[sym] = rows[0] if len(rows) == 1 else rows
    missing = set(alphabet) - set(rule)
    if missing:
        raise ConfigError(
            f"[system] missing rule for symbols {sorted(missing)}"
        )
    return rule


def _rule_dim(rule: dict) -> int:
    any_img = next(iter(rule.values()))
    return 2 if any_img and isinstance(any_img[0], list) else 1


def load_config(path: str) -> RunConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    if "system" not in parser:
        raise ConfigError("missing [system] section")
    system = parser["system"]
    kind = system.get("kind", "").strip()
    if kind not in KINDS:
        raise ConfigError(
            f"[system] kind must be one of {KINDS}, got {kind!r}"
        )

    schedule = parser["schedule"] if "schedule" in parser else {}
    analysis = parser["analysis"] if "analysis" in parser else {}
    output = parser["output"] if "output" in parser else {}

    cfg = RunConfig(kind=kind, dimension=0, levels=0, thetas=[])
    try:
        cfg.levels = int(schedule.get("levels", 6))
    except ValueError as exc:
        raise ConfigError(f"[schedule] levels: {exc}") from exc
    if cfg.levels < 1:
        raise ConfigError("[schedule] levels must be >= 1")
    if "pad" in schedule:
        cfg.pad = int(schedule["pad"])
    if "size_factor" in schedule:
        cfg.size_factor = int(schedule["size_factor"])
    if "window_margin" in schedule:
        cfg.window_margin = float(Fraction(parse_scalar(schedule["window_margin"])))

    if kind == "lattice_model":
        if "q" not in system:
            raise ConfigError("[system] q required for lattice_model")
        cfg.qs = tuple(int(v) for v in system["q"].split())
        cfg.dimension = len(cfg.qs)
    elif kind == "block_substitution":
        if "alphabet" not in system:
            raise ConfigError("[system] alphabet required")
        cfg.alphabet = tuple(system["alphabet"].split())
        cfg.rule = _parse_rule(system, cfg.alphabet)
        cfg.dimension = _rule_dim(cfg.rule)
        cfg.seed = system.get("seed", None)
    elif kind == "product_1d":
        names = system.get("factors", "").split()
        if len(names) < 2:
            raise ConfigError("[system] factors must list >= 2 sections")
        for name in names:
            if name not in parser:
                raise ConfigError(f"missing factor section [{name}]")
            sect = parser[name]
            alphabet = tuple(sect.get("alphabet", "").split())
            if not alphabet:
                raise ConfigError(f"[{name}] alphabet required")
            rule = _parse_rule(sect, alphabet)
            if _rule_dim(rule) != 1:
                raise ConfigError(f"[{name}] product factors must be 1-d")
            cfg.factors.append({"alphabet": list(alphabet), "rule": rule})
        cfg.dimension = len(cfg.factors)
    elif kind == "explicit_points":
        if "points_file" not in system:
            raise ConfigError("[system] points_file required")
        cfg.points_file = system["points_file"]
        cfg.dimension = int(system.get("dimension", 1))

    declared = system.get("dimension")
    if declared is not None and int(declared) != cfg.dimension:
        raise ConfigError(
            f"[system] dimension {declared} contradicts the generator "
            f"(inferred {cfg.dimension})"
        )
    if cfg.dimension > MAX_DIM:
        raise ConfigError(
            f"dimension {cfg.dimension} exceeds the exact-geometry cap "
            f"d <= {MAX_DIM}"
        )

    theta_text = analysis.get("theta", "") if analysis else ""
    for chunk in theta_text.split(";"):
        chunk = chunk.strip()
        if chunk:
            cfg.thetas.append(_parse_theta(chunk, cfg.dimension))
    k_mode = (analysis.get("k", "1") if analysis else "1").strip()
    if k_mode not in ("1", "d", "both"):
        raise ConfigError("[analysis] k must be 1, d or both")
    cfg.k_mode = k_mode
    if analysis:
        cfg.scan = analysis.get("scan", "false").strip().lower() == "true"
        cfg.scan_qmax = int(analysis.get("qmax", 8))
        cfg.scan_max_power = int(analysis.get("expansion_max_power", 6))
        targets = analysis.get("real_targets", "").split()
        cfg.scan_real_targets = tuple(float(t) for t in targets)
        cfg.strict_well_distributed = (
            analysis.get("strict_well_distributed", "false").strip().lower()
            == "true"
        )
        cfg.thin = analysis.get("thin", "false").strip().lower() == "true"

    if output:
        fmt = output.get("format", "json").strip()
        if fmt not in ("json", "csv"):
            raise ConfigError("[output] format must be json or csv")
        cfg.output_format = fmt
        cfg.output_path = output.get("path", None)
        cfg.timestamp = (
            output.get("timestamp", "true").strip().lower() == "true"
        )
    return cfg


def build_system(cfg: RunConfig) -> System:
    """Instantiate the generator a config describes."""
    if cfg.kind == "lattice_model":
        return LatticeSystem(cfg.qs, size_factor=cfg.size_factor)
    if cfg.kind == "block_substitution":
        sub = BlockSubstitution(cfg.alphabet, cfg.rule, cfg.dimension)
        return SubstitutionSystem(sub, seed=cfg.seed, pad=cfg.pad)
    if cfg.kind == "product_1d":
        subs = [
            BlockSubstitution(tuple(f["alphabet"]), f["rule"], 1)
            for f in cfg.factors
        ]
        kwargs = {} if cfg.pad is None else {"pad": cfg.pad}
        return ProductSystem(subs, **kwargs)
    if cfg.kind == "explicit_points":
        from .io_formats import read_pointset

        with open(cfg.points_file) as fh:
            ps = read_pointset(fh)
        return ExplicitSystem(sorted(ps.points), ps.window)
    raise ConfigError(f"unknown kind {cfg.kind!r}")
