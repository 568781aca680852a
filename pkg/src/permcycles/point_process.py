"""Scaled cycle point measures, box geometry, and the limiting point process.

Each cycle of a permutation of [n], written smallest element first, becomes
one point of a multi-level point measure: the k-cycle (i_1, ..., i_k) turns
into (i_1/n, ..., i_k/n), a point of the level-k wedge

    W_k = { x in [0,1]^k : x_1 = min(x_1, ..., x_k) }.

As n grows these measures converge to a Poisson point process whose level-k
intensity is theta_k times Lebesgue measure restricted to W_k.  The module
provides the box algebra needed to evaluate that intensity exactly on finite
unions of axis-aligned boxes, counting of measure points in such unions, and
simulation of the limiting process itself.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .rng import RngStream
from .weights import WeightSequence

__all__ = [
    "Interval",
    "BoxSpec",
    "BoxUnion",
    "PointMeasure",
    "BoxSpecError",
    "parse_boxes",
    "box_volume",
    "intersect_boxes",
    "intensity",
    "avoidance_limit",
    "point_measure",
    "count_in",
    "simulate_limit_process",
    "tail_intensity_mass",
    "min_first",
]

_MAX_BOXES_PER_LEVEL = 16


class BoxSpecError(ValueError):
    """A box specification is malformed or out of range."""


@dataclass(frozen=True)
class Interval:
    """A subinterval of [0,1] with configurable endpoint closure."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise BoxSpecError(
                f"interval [{self.lo!r}, {self.hi!r}] is not inside [0, 1]"
            )

    def contains(self, x: float) -> bool:
        left = x >= self.lo if self.lo_closed else x > self.lo
        right = x <= self.hi if self.hi_closed else x < self.hi
        return left and right

    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class BoxSpec:
    """An axis-aligned box at one level: a product of per-coordinate intervals."""

    level: int
    intervals: tuple[Interval, ...]

    def __post_init__(self) -> None:
        if self.level < 1:
            raise BoxSpecError(f"box level must be >= 1, got {self.level}")
        if len(self.intervals) != self.level:
            raise BoxSpecError(
                f"box at level {self.level} needs {self.level} intervals, "
                f"got {len(self.intervals)}"
            )

    def contains(self, point: tuple[float, ...]) -> bool:
        """Membership in the box intersected with the wedge W_k."""
        if len(point) != self.level:
            return False
        if point[0] != min(point):
            return False
        return all(iv.contains(x) for iv, x in zip(self.intervals, point))


@dataclass(frozen=True)
class BoxUnion:
    """A finite union of boxes, possibly spanning several levels."""

    boxes: tuple[BoxSpec, ...]

    def levels(self) -> tuple[int, ...]:
        return tuple(sorted({b.level for b in self.boxes}))

    def boxes_at(self, level: int) -> tuple[BoxSpec, ...]:
        return tuple(b for b in self.boxes if b.level == level)

    def contains(self, level: int, point: tuple[float, ...]) -> bool:
        return any(b.contains(point) for b in self.boxes_at(level))


def min_first(point: tuple[float, ...]) -> tuple[float, ...]:
    """Rotate a tuple so its smallest entry comes first (cyclic order kept)."""
    if not point:
        raise ValueError("cannot rotate an empty point")
    i = point.index(min(point))
    return point[i:] + point[:i]


def box_volume(box: BoxSpec) -> float:
    """Lebesgue volume of the box intersected with the wedge W_k.

    With the box written prod_i [a_i, b_i], the wedge constraint pins the
    first coordinate as the minimum, so the volume is

        integral_{a_1}^{b_1} prod_{i>=2} max(0, b_i - max(a_i, x)) dx.

    The integrand is piecewise polynomial in x with breakpoints at the a_i
    and b_i, so the integral is evaluated exactly piece by piece.  Endpoint
    closure flags do not affect volume.
    """
    iv = box.intervals
    a1, b1 = iv[0].lo, iv[0].hi
    if box.level == 1:
        return b1 - a1
    cuts = {a1, b1}
    for itv in iv[1:]:
        for p in (itv.lo, itv.hi):
            if a1 < p < b1:
                cuts.add(p)
    pts = sorted(cuts)
    total = 0.0
    for lo, hi in zip(pts, pts[1:]):
        if hi <= lo:
            continue
        poly = np.polynomial.Polynomial([1.0])
        dead = False
        for itv in iv[1:]:
            if lo >= itv.hi:
                dead = True
                break
            if hi <= itv.lo:
                poly = poly * (itv.hi - itv.lo)
            else:
                # whole piece sits inside [a_i, b_i]: factor is b_i - x
                poly = poly * np.polynomial.Polynomial([itv.hi, -1.0])
        if dead:
            continue
        anti = poly.integ()
        total += anti(hi) - anti(lo)
    return float(total)


def intersect_boxes(a: BoxSpec, b: BoxSpec) -> BoxSpec | None:
    """Intersection of two same-level boxes, or None when empty."""
    if a.level != b.level:
        raise ValueError("cannot intersect boxes at different levels")
    out = []
    for ia, ib in zip(a.intervals, b.intervals):
        # the binding constraint on each side carries its closure flag along
        if ia.lo > ib.lo:
            lo, lo_closed = ia.lo, ia.lo_closed
        elif ib.lo > ia.lo:
            lo, lo_closed = ib.lo, ib.lo_closed
        else:
            lo, lo_closed = ia.lo, ia.lo_closed and ib.lo_closed
        if ia.hi < ib.hi:
            hi, hi_closed = ia.hi, ia.hi_closed
        elif ib.hi < ia.hi:
            hi, hi_closed = ib.hi, ib.hi_closed
        else:
            hi, hi_closed = ia.hi, ia.hi_closed and ib.hi_closed
        if lo > hi:
            return None
        out.append(Interval(lo, hi, lo_closed, hi_closed))
    return BoxSpec(a.level, tuple(out))


def intensity(ws: WeightSequence, union: BoxUnion) -> float:
    """Limiting expected point count in the union: sum_k theta_k * vol_k.

    vol_k is the wedge volume of the level-k part of the union, computed by
    inclusion-exclusion over the boxes at that level.
    """
    total = 0.0
    for k in union.levels():
        boxes = union.boxes_at(k)
        if len(boxes) > _MAX_BOXES_PER_LEVEL:
            raise ValueError(
                f"{len(boxes)} boxes at level {k}: inclusion-exclusion over more "
                f"than {_MAX_BOXES_PER_LEVEL} is not supported"
            )
        vol = 0.0
        for r in range(1, len(boxes) + 1):
            sign = 1.0 if r % 2 else -1.0
            for combo in itertools.combinations(boxes, r):
                inter = reduce(
                    lambda x, y: None if x is None else intersect_boxes(x, y),
                    combo[1:],
                    combo[0],
                )
                if inter is not None:
                    vol += sign * box_volume(inter)
        total += ws.theta(k) * vol
    return total


def avoidance_limit(ws: WeightSequence, union: BoxUnion) -> float:
    """Limiting probability that the union contains no point: exp(-intensity)."""
    return math.exp(-intensity(ws, union))


@dataclass(frozen=True, eq=False)
class PointMeasure:
    """A multi-level collection of wedge points.

    ``n`` is the size of the permutation the measure came from, or 0 for a
    draw of the limiting process.  ``levels`` maps each occupied level k to
    the tuple of its points.
    """

    n: int
    levels: dict[int, tuple[tuple[float, ...], ...]] = field(default_factory=dict)

    def restrict(self, level: int) -> tuple[tuple[float, ...], ...]:
        return self.levels.get(level, ())

    def total_points(self) -> int:
        return sum(len(pts) for pts in self.levels.values())

    def count_in(self, union: BoxUnion) -> int:
        return count_in(self, union)

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "levels": {
                str(k): [list(p) for p in pts]
                for k, pts in sorted(self.levels.items())
            },
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PointMeasure":
        payload = json.loads(text)
        levels = {
            int(k): tuple(tuple(float(x) for x in p) for p in pts)
            for k, pts in payload["levels"].items()
        }
        return cls(int(payload["n"]), levels)


def point_measure(perm) -> PointMeasure:
    """The scaled cycle point measure of a permutation."""
    n = perm.n
    levels: dict[int, list] = {}
    for c in perm.cycles:
        levels.setdefault(len(c), []).append(tuple(i / n for i in c))
    return PointMeasure(n, {k: tuple(v) for k, v in levels.items()})


def count_in(pm: PointMeasure, union: BoxUnion) -> int:
    """Number of points of the measure inside the union (level-aware)."""
    total = 0
    for k in union.levels():
        boxes = union.boxes_at(k)
        for p in pm.restrict(k):
            if any(b.contains(p) for b in boxes):
                total += 1
    return total


def simulate_limit_process(
    ws: WeightSequence, k_max: int, rng: RngStream
) -> PointMeasure:
    """One draw of the limiting Poisson process, truncated to levels <= k_max.

    Level k receives Poisson(theta_k / k) points; each point is uniform on
    the cube and rotated smallest-entry-first, which is exactly uniform on
    the wedge W_k.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    gen = rng.gen
    levels: dict[int, tuple] = {}
    for k in range(1, k_max + 1):
        mean = ws.theta(k) / k
        cnt = int(gen.poisson(mean))
        if cnt:
            pts = tuple(min_first(tuple(gen.random(k))) for _ in range(cnt))
            levels[k] = pts
    return PointMeasure(0, levels)


def tail_intensity_mass(ws: WeightSequence, k_max: int) -> float:
    """Total limiting intensity past level k_max: sum_{k > k_max} theta_k / k.

    Infinite for weight sequences that do not decay (uniform, ewens,
    polynomial with power >= 0); finite closed forms otherwise.  Quantifies
    what a level-truncated simulation of the limit process ignores.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    if ws.kind in ("uniform", "ewens"):
        return math.inf
    if ws.kind == "polynomial":
        if ws.power >= 0:
            return math.inf
        from scipy.special import zeta

        # sum_{k>k_max} c * k^(power-1) = c * zeta(1-power, k_max+1)
        return float(ws.coeff * zeta(1.0 - ws.power, k_max + 1))
    # explicit list
    fill = ws.values[-1] if ws.tail == "const" else 0.0
    if fill > 0:
        return math.inf
    listed = sum(
        v / k for k, v in enumerate(ws.values, start=1) if k > k_max
    )
    return float(listed)


_BOX_HEADER = re.compile(r"box\s*:\s*k\s*=\s*(\d+)$", re.IGNORECASE)
_OPEN_DIRECTIVE = re.compile(r"open\s*=\s*(.*)$", re.IGNORECASE)


def parse_boxes(text: str) -> BoxUnion:
    """Parse a box-union specification string.

    Grammar: semicolon-separated segments.  ``box:k=<level>`` opens a box,
    followed by ``<lo>,<hi>`` interval segments (one per coordinate) and an
    optional ``open=<i,j,...>`` segment marking which intervals (1-based)
    are open at their upper endpoint.  An empty string denotes the empty
    union.
    """
    segments = [s.strip() for s in text.split(";") if s.strip()]
    boxes: list[BoxSpec] = []
    level: int | None = None
    intervals: list[tuple[float, float]] = []
    open_upper: set[int] = set()

    def flush() -> None:
        nonlocal level, intervals, open_upper
        if level is None:
            return
        if len(intervals) != level:
            raise BoxSpecError(
                f"box at level {level} has {len(intervals)} intervals, needs {level}"
            )
        if any(i < 1 or i > level for i in open_upper):
            bad = next(i for i in open_upper if i < 1 or i > level)
            raise BoxSpecError(f"open= index {bad} outside 1..{level}")
        ivs = tuple(
            Interval(lo, hi, hi_closed=(idx not in open_upper))
            for idx, (lo, hi) in enumerate(intervals, start=1)
        )
        boxes.append(BoxSpec(level, ivs))
        level, intervals, open_upper = None, [], set()

    for seg in segments:
        header = _BOX_HEADER.match(seg)
        if header:
            flush()
            level = int(header.group(1))
            if level < 1:
                raise BoxSpecError(f"box level must be >= 1 in {seg!r}")
            continue
        if level is None:
            raise BoxSpecError(f"segment {seg!r} appears before any box:k= header")
        open_m = _OPEN_DIRECTIVE.match(seg)
        if open_m:
            body = open_m.group(1)
            try:
                open_upper = {int(s) for s in body.split(",") if s.strip()}
            except ValueError:
                raise BoxSpecError(f"open= list {body!r} is not integers") from None
            continue
        parts = seg.split(",")
        if len(parts) != 2:
            raise BoxSpecError(f"interval segment {seg!r} is not '<lo>,<hi>'")
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise BoxSpecError(f"interval segment {seg!r} is not numeric") from None
        if not (0.0 <= lo <= hi <= 1.0):
            raise BoxSpecError(f"interval {seg!r} is not inside [0, 1]")
        intervals.append((lo, hi))
    flush()
    return BoxUnion(tuple(boxes))
