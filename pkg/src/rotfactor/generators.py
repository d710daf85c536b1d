"""Concrete minimal Z^d-actions at finite scale.

Substitution subshifts (variable-length words for d = 1, constant-shape
block rules for d >= 2), products of 1-d substitutions, explicit lattice
models with closed-form return sets, and explicit point lists.  Return
sets of cylinder patterns are computed by exhaustive occurrence scanning
on integer-coded numpy arrays.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigError, InvariantViolation, WindowTooSmallError
from .geometry import PointSet, Window, add, sub

Symbol = Hashable
Point = Tuple[int, ...]

DEFAULT_PAD = 3  # extra expansion iterations beyond the deepest level
DEFAULT_PAD_1D = 4  # words are cheap; more margin keeps deep levels complete


def _as_array(image, dim: int) -> np.ndarray:
    arr = np.array(image, dtype=object)
    if arr.ndim != dim:
        raise ConfigError(
            f"rule image has {arr.ndim} axes, expected {dim}"
        )
    return arr


@dataclass
class BlockSubstitution:
    """Symbol -> d-dimensional symbol array, iterated to generate a subshift.

    For d = 1 the images may have different lengths (word substitutions
    such as Fibonacci a->ab, b->a).  For d >= 2 all images must share one
    rectangular shape with every side >= 2.
    """

    alphabet: Tuple[Symbol, ...]
    rule: Dict[Symbol, np.ndarray]
    dim: int = 1

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)
        if not self.alphabet:
            raise ConfigError("empty alphabet")
        self.rule = {
            s: _as_array(img, self.dim) for s, img in self.rule.items()
        }
        if set(self.rule) != set(self.alphabet):
            raise ConfigError("rule must define exactly the alphabet symbols")
        shapes = {self.rule[s].shape for s in self.alphabet}
        if self.dim >= 2:
            if len(shapes) != 1:
                ref = self.alphabet[0]
                bad = next(
                    s for s in self.alphabet
                    if self.rule[s].shape != self.rule[ref].shape
                )
                raise ConfigError(
                    f"rule image of {bad!r} has shape "
                    f"{self.rule[bad].shape}, expected {self.rule[ref].shape}"
                    f" (block substitutions with d >= 2 are constant shape)"
                )
            if any(q < 2 for q in next(iter(shapes))):
                raise ConfigError("block shape sides must be >= 2")
        for s in self.alphabet:
            bad = set(self.rule[s].ravel()) - set(self.alphabet)
            if bad:
                raise ConfigError(
                    f"rule image of {s!r} uses unknown symbols {sorted(map(str, bad))}"
                )
        if not self.is_primitive():
            raise ConfigError("substitution is not primitive")

    @property
    def shape(self) -> Optional[Tuple[int, ...]]:
        shapes = {self.rule[s].shape for s in self.alphabet}
        return next(iter(shapes)) if len(shapes) == 1 else None

    def is_primitive(self) -> bool:
        """Some power's images contain every symbol (boolean matrix powers
        up to |alphabet|^2, a standard sufficient bound)."""
        n = len(self.alphabet)
        index = {s: i for i, s in enumerate(self.alphabet)}
        m = np.zeros((n, n), dtype=bool)
        for s in self.alphabet:
            for t in self.rule[s].ravel():
                m[index[s], index[t]] = True
        power = m.copy()
        for _ in range(n * n):
            if power.all():
                return True
            power = power @ m
        return power.all()

    def apply_once(self, arr: np.ndarray) -> np.ndarray:
        if self.dim == 1:
            return np.concatenate([self.rule[s] for s in arr])
        q = self.shape
        out_shape = tuple(n * qi for n, qi in zip(arr.shape, q))
        out = np.empty(out_shape, dtype=object)
        for idx in np.ndindex(arr.shape):
            dest = tuple(
                slice(i * qi, (i + 1) * qi) for i, qi in zip(idx, q)
            )
            out[dest] = self.rule[arr[idx]]
        return out

    def power(self, e: int) -> "BlockSubstitution":
        """The substitution iterated e times, as a new rule."""
        if e < 1:
            raise ValueError("power must be >= 1")
        rule = {
            s: self.rule[s] for s in self.alphabet
        }
        for _ in range(e - 1):
            rule = {s: self.apply_once_rule(rule, s) for s in self.alphabet}
        return BlockSubstitution(self.alphabet, rule, self.dim)

    def apply_once_rule(self, rule, s):
        arr = rule[s]
        if self.dim == 1:
            return np.concatenate([self.rule[t] for t in arr])
        q = self.shape
        out = np.empty(
            tuple(n * qi for n, qi in zip(arr.shape, q)), dtype=object
        )
        for idx in np.ndindex(arr.shape):
            dest = tuple(
                slice(i * qi, (i + 1) * qi) for i, qi in zip(idx, q)
            )
            out[dest] = self.rule[arr[idx]]
        return out

    def supertile_shape(self, seed: Symbol, level: int) -> Tuple[int, ...]:
        """Shape of the level-fold image of seed (exact, by iteration of
        the length vector; no array is materialized)."""
        if self.dim == 1:
            counts = {s: 0 for s in self.alphabet}
            counts[seed] = 1
            for _ in range(level):
                nxt = {s: 0 for s in self.alphabet}
                for s, c in counts.items():
                    if c == 0:
                        continue
                    for t in self.rule[s]:
                        nxt[t] += c
                counts = nxt
            return (sum(counts.values()),)
        q = self.shape
        return tuple(qi ** level for qi in q)


@dataclass
class Configuration:
    """Finite d-dimensional symbol array with an origin in Z^d.

    The block is stored as integer codes for fast scanning; `symbols`
    maps codes back to symbols.
    """

    block: np.ndarray  # integer codes
    origin: Point
    symbols: Tuple[Symbol, ...]

    def __post_init__(self):
        if self.block.size == 0:
            raise ValueError("empty configuration")
        if not all(
            0 <= o < n for o, n in zip(self.origin, self.block.shape)
        ):
            raise ValueError("origin outside block support")

    @property
    def dim(self) -> int:
        return self.block.ndim

    def support(self) -> Window:
        return Window(
            tuple(-o for o in self.origin),
            tuple(n - o - 1 for o, n in zip(self.origin, self.block.shape)),
        )

    def symbol_at(self, p: Point) -> Symbol:
        idx = add(p, self.origin)
        return self.symbols[self.block[idx]]

    def to_text(self) -> str:
        """Plain-text grid: one row per line, layers separated by blank
        lines for d = 3."""
        names = [str(s) for s in self.symbols]
        sep = "" if max(map(len, names)) == 1 else " "

        def fmt_row(row) -> str:
            return sep.join(names[c] for c in row)

        b = self.block
        if b.ndim == 1:
            return fmt_row(b)
        if b.ndim == 2:
            return "\n".join(fmt_row(r) for r in b)
        layers = []
        for layer in b:
            layers.append("\n".join(fmt_row(r) for r in layer))
        return "\n\n".join(layers)


def encode(arr: np.ndarray, symbols: Sequence[Symbol]) -> np.ndarray:
    index = {s: i for i, s in enumerate(symbols)}
    out = np.empty(arr.shape, dtype=np.int16)
    flat_in, flat_out = arr.ravel(), out.ravel()
    for i, s in enumerate(flat_in):
        flat_out[i] = index[s]
    return out


def expand(
    sub_rule: BlockSubstitution, seed: Symbol, iterations: int
) -> Configuration:
    """The iterations-fold substitution image of seed, origin at the
    seed's corner cell."""
    if seed not in sub_rule.alphabet:
        raise ConfigError(f"seed {seed!r} not in alphabet")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    arr = np.array(seed, dtype=object).reshape((1,) * sub_rule.dim)
    for _ in range(iterations):
        arr = sub_rule.apply_once(arr)
    return Configuration(
        block=encode(arr, sub_rule.alphabet),
        origin=(0,) * sub_rule.dim,
        symbols=sub_rule.alphabet,
    )


def fixed_point_seed(sub_rule: BlockSubstitution) -> Tuple[Symbol, int]:
    """A symbol fixed at the origin corner by some power <= |alphabet| of
    the rule; returns (symbol, power used)."""
    corner = (0,) * sub_rule.dim
    rule = {s: sub_rule.rule[s] for s in sub_rule.alphabet}
    for e in range(1, len(sub_rule.alphabet) + 1):
        for s in sub_rule.alphabet:
            if rule[s][corner] == s:
                return s, e
        rule = {s: sub_rule.apply_once_rule(rule, s) for s in sub_rule.alphabet}
    raise ConfigError(
        "no fixed-point seed up to power |alphabet|; supply an explicit "
        "seed configuration"
    )


@dataclass
class ReturnSet:
    """Occurrence positions of the origin pattern on a cylinder window."""

    base: PointSet
    cylinder_window: Window
    level: int
    reliable: bool = True

    def __post_init__(self):
        if (0,) * self.base.dim not in self.base.points:
            raise InvariantViolation(
                "return set must contain 0 (the point returns at time 0)"
            )

    @property
    def points(self):
        return self.base.points


def return_set(
    config: Configuration, cylinder_window: Window, level: int = 0
) -> ReturnSet:
    """All positions p where config matches its own origin pattern on
    cylinder_window (the pattern support must fit with p inside config)."""
    bwin = cylinder_window
    if bwin.dim != config.dim:
        raise ConfigError("cylinder window dimension mismatch")
    support = config.support()
    if not (support.contains(bwin.lo) and support.contains(bwin.hi)):
        raise WindowTooSmallError(
            f"cylinder window {bwin} exceeds configuration support {support}"
        )
    sides = bwin.side_lengths()
    windows = sliding_window_view(config.block, sides)
    pat_idx = tuple(add(bwin.lo, config.origin))
    pattern = windows[pat_idx]
    eq = windows == pattern
    matches = eq.all(axis=tuple(range(config.dim, eq.ndim)))
    # window index i corresponds to lattice position p = i - origin - bwin.lo
    offset = add(config.origin, bwin.lo)
    pos = np.argwhere(matches)
    pts = frozenset(tuple(int(v) for v in sub(tuple(row), offset)) for row in pos)
    limit = tuple(n - s for n, s in zip(config.block.shape, sides))
    pwin = Window(
        tuple(-o for o in offset),
        tuple(l - o for l, o in zip(limit, offset)),
    )
    return ReturnSet(
        base=PointSet(pts, pwin), cylinder_window=bwin, level=level
    )


def nested_return_sets(sets: List[ReturnSet]) -> List[ReturnSet]:
    """Assert R_{n+1} ⊆ R_n on each consecutive pair (hard error: a
    violation means an implementation fault) and return the list."""
    for a, b in zip(sets, sets[1:]):
        if not set(b.points) <= set(a.points):
            raise InvariantViolation(
                f"nestedness violated between levels {a.level} and {b.level}"
            )
    return sets


class System:
    """A generator realized at finite scale: produces nested return sets."""

    dimension: int

    def return_sets(self, max_level: int) -> List[ReturnSet]:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class SubstitutionSystem(System):
    """One-sided fixed point of a primitive substitution with supertile
    cylinder windows B_n = support of the level-n image of the seed."""

    def __init__(
        self,
        sub_rule: BlockSubstitution,
        seed: Optional[Symbol] = None,
        pad: Optional[int] = None,
    ):
        if pad is None:
            pad = DEFAULT_PAD_1D if sub_rule.dim == 1 else DEFAULT_PAD
        if seed is None:
            seed, power = fixed_point_seed(sub_rule)
            if power > 1:
                sub_rule = sub_rule.power(power)
        else:
            corner = (0,) * sub_rule.dim
            if sub_rule.rule[seed][corner] != seed:
                raise ConfigError(
                    f"seed {seed!r} is not fixed-point compatible "
                    "(rule image must start with the seed at its corner)"
                )
        self.sub_rule = sub_rule
        self.seed = seed
        self.pad = pad
        self.dimension = sub_rule.dim
        self._config: Optional[Configuration] = None
        self._config_level = -1

    def configuration(self, max_level: int) -> Configuration:
        depth = max_level + self.pad
        if self._config is None or self._config_level < depth:
            self._config = expand(self.sub_rule, self.seed, depth)
            self._config_level = depth
        return self._config

    def cylinder_window(self, level: int) -> Window:
        shape = self.sub_rule.supertile_shape(self.seed, level)
        return Window((0,) * self.dimension, tuple(n - 1 for n in shape))

    def return_sets(self, max_level: int) -> List[ReturnSet]:
        config = self.configuration(max_level)
        sets = [
            return_set(config, self.cylinder_window(n), level=n)
            for n in range(max_level + 1)
        ]
        return nested_return_sets(sets)

    def describe(self) -> dict:
        return {
            "kind": "block_substitution",
            "alphabet": [str(s) for s in self.sub_rule.alphabet],
            "dimension": self.dimension,
            "seed": str(self.seed),
            "pad": self.pad,
        }


class LatticeSystem(System):
    """Explicit model with R_n = Π (q_i^n)Z, bypassing pattern scanning.

    Serves as the brute-force oracle substrate: every downstream
    operation has closed-form expected output here.
    """

    def __init__(self, qs: Sequence[int], size_factor: int = 4):
        qs = tuple(int(q) for q in qs)
        if any(q < 2 for q in qs):
            raise ConfigError("lattice model expansions must be >= 2")
        self.qs = qs
        self.size_factor = size_factor
        self.dimension = len(qs)

    def window(self, max_level: int) -> Window:
        half = self.size_factor * max(self.qs) ** max_level
        return Window(
            (-half,) * self.dimension, (half,) * self.dimension
        )

    def return_sets(self, max_level: int) -> List[ReturnSet]:
        win = self.window(max_level)
        sets = []
        for n in range(max_level + 1):
            steps = tuple(q ** n for q in self.qs)
            axes = [
                range(
                    -(-lo // s) * s, hi + 1, s
                )  # smallest multiple of s >= lo
                for lo, hi, s in zip(win.lo, win.hi, steps)
            ]
            pts = frozenset(itertools.product(*axes))
            bwin = Window(
                (0,) * self.dimension, tuple(s - 1 for s in steps)
            )
            sets.append(
                ReturnSet(
                    base=PointSet(pts, win),
                    cylinder_window=bwin,
                    level=n,
                )
            )
        return nested_return_sets(sets)

    def describe(self) -> dict:
        return {
            "kind": "lattice_model",
            "q": list(self.qs),
            "size_factor": self.size_factor,
            "dimension": self.dimension,
        }


class ExplicitSystem(System):
    """Raw point list; cylinder windows are the cubes [-2^n, 2^n]^d and a
    position p matches when its local patch equals the patch at 0."""

    def __init__(self, points: Sequence[Point], window: Window):
        self.point_set = PointSet(frozenset(map(tuple, points)), window)
        self.dimension = window.dim
        if (0,) * self.dimension not in self.point_set.points:
            raise ConfigError("explicit point set must contain the origin")

    def return_sets(self, max_level: int) -> List[ReturnSet]:
        win = self.point_set.window
        pts = self.point_set.points
        sets = []
        for n in range(max_level + 1):
            a = 2 ** n
            bwin = Window((-a,) * self.dimension, (a,) * self.dimension)
            base_patch = frozenset(
                p for p in pts if bwin.contains(p)
            )
            occs = set()
            plo = tuple(l - bl for l, bl in zip(win.lo, bwin.lo))
            phi = tuple(h - bh for h, bh in zip(win.hi, bwin.hi))
            if any(a > b for a, b in zip(plo, phi)):
                raise WindowTooSmallError(
                    f"cylinder cube of level {n} exceeds the window"
                )
            pwin = Window(plo, phi)
            for p in pts:
                if not pwin.contains(p):
                    continue
                patch = frozenset(
                    sub(q, p)
                    for q in pts
                    if bwin.contains(sub(q, p))
                )
                if patch == base_patch:
                    occs.add(p)
            sets.append(
                ReturnSet(
                    base=PointSet(frozenset(occs), pwin),
                    cylinder_window=bwin,
                    level=n,
                )
            )
        return nested_return_sets(sets)

    def describe(self) -> dict:
        return {
            "kind": "explicit_points",
            "count": len(self.point_set.points),
            "dimension": self.dimension,
        }


def product_configuration(configs: Sequence[Configuration]) -> Configuration:
    """Tensor product of 1-d configurations: the cell at (i_1, ..., i_d)
    carries the tuple of factor symbols."""
    if any(c.dim != 1 for c in configs):
        raise ConfigError("product factors must be 1-dimensional")
    combined = configs[0].block
    for c in configs[1:]:
        combined = combined[..., None] * len(c.symbols) + c.block
    symbols = tuple(
        itertools.product(*(c.symbols for c in configs))
    )
    # mixed-radix code of the tuple equals the combined code above when
    # each factor's symbol table is indexed in order
    origin = tuple(c.origin[0] for c in configs)
    return Configuration(
        block=combined.astype(np.int32), origin=origin, symbols=symbols
    )


class ProductSystem(System):
    """Product of 1-d substitution systems, scanned as a genuine
    d-dimensional configuration (tuple symbols, product cylinder windows).

    Variable-length factors (e.g. Fibonacci) are allowed: the product is
    taken on the fixed-point configurations, not on the rules.
    """

    def __init__(
        self,
        factors: Sequence[BlockSubstitution],
        pad: int = DEFAULT_PAD,
    ):
        if len(factors) < 2:
            raise ConfigError("product needs at least 2 factors")
        self.factors = [SubstitutionSystem(f, pad=pad) for f in factors]
        self.pad = pad
        self.dimension = len(factors)

    def configuration(self, max_level: int) -> Configuration:
        return product_configuration(
            [f.configuration(max_level) for f in self.factors]
        )

    def cylinder_window(self, level: int) -> Window:
        parts = [f.cylinder_window(level) for f in self.factors]
        return Window(
            tuple(w.lo[0] for w in parts), tuple(w.hi[0] for w in parts)
        )

    def return_sets(self, max_level: int) -> List[ReturnSet]:
        config = self.configuration(max_level)
        sets = [
            return_set(config, self.cylinder_window(n), level=n)
            for n in range(max_level + 1)
        ]
        return nested_return_sets(sets)

    def factor_systems(self) -> List[SubstitutionSystem]:
        return list(self.factors)

    def describe(self) -> dict:
        return {
            "kind": "product_1d",
            "dimension": self.dimension,
            "pad": self.pad,
            "factors": [f.describe() for f in self.factors],
        }
