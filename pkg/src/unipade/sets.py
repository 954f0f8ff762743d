"""Sampled compact subsets of the plane and sup/inf norms over them.

A :class:`CompactSet` is a union of primitives (disks, annuli, rectangles,
point lists) replaced by two deterministic point grids: the working grid
at spacing ``h`` and a validation grid at spacing ``h/4`` that contains it.
Every "for all z in K" statement in the library is checked on one of them.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Literal, Union

import numpy as np
from scipy.spatial import cKDTree

from .algebra import as_complex
from .errors import EmptyShape, PoleAtPoint, PoleOnSet

VALIDATION_REFINEMENT = 4
MIN_DEFAULT_H = 1e-3


@dataclass(frozen=True)
class Disk:
    c: complex
    r: float

    def boundary(self, h: float) -> np.ndarray:
        if self.r == 0:
            return np.array([self.c], dtype=np.complex128)
        n = max(int(math.ceil(2 * math.pi * self.r / h)), 3)
        return self.c + self.r * np.exp(2j * np.pi * np.arange(n) / n)

    def interior(self, h: float) -> np.ndarray:
        pts = _lattice(self.c, self.r, h)
        return pts[np.abs(pts - self.c) < self.r]

    def contains(self, z, tol: float = 0.0):
        return np.abs(np.asarray(z) - self.c) <= self.r + tol

    @property
    def diameter(self) -> float:
        return 2 * self.r

    def to_json(self) -> dict:
        return {"c": [self.c.real, self.c.imag], "r": self.r}


@dataclass(frozen=True)
class Annulus:
    c: complex
    r_in: float
    r_out: float

    def boundary(self, h: float) -> np.ndarray:
        return np.concatenate([Disk(self.c, self.r_in).boundary(h), Disk(self.c, self.r_out).boundary(h)])

    def interior(self, h: float) -> np.ndarray:
        pts = _lattice(self.c, self.r_out, h)
        d = np.abs(pts - self.c)
        return pts[(d > self.r_in) & (d < self.r_out)]

    def contains(self, z, tol: float = 0.0):
        d = np.abs(np.asarray(z) - self.c)
        return (d >= self.r_in - tol) & (d <= self.r_out + tol)

    @property
    def diameter(self) -> float:
        return 2 * self.r_out

    def to_json(self) -> dict:
        return {"c": [self.c.real, self.c.imag], "r_in": self.r_in, "r_out": self.r_out}


@dataclass(frozen=True)
class Rect:
    lo: complex
    hi: complex

    def boundary(self, h: float) -> np.ndarray:
        x0, x1 = sorted((self.lo.real, self.hi.real))
        y0, y1 = sorted((self.lo.imag, self.hi.imag))
        corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
        out = []
        for a, b in zip(corners, corners[1:] + corners[:1]):
            n = max(int(math.ceil(abs(b - a) / h)), 1)
            out.append(a + (b - a) * np.arange(n) / n)
        return np.concatenate(out)

    def interior(self, h: float) -> np.ndarray:
        x0, x1 = sorted((self.lo.real, self.hi.real))
        y0, y1 = sorted((self.lo.imag, self.hi.imag))
        xs = x0 + h * np.arange(1, max(int(math.ceil((x1 - x0) / h)), 1))
        ys = y0 + h * np.arange(1, max(int(math.ceil((y1 - y0) / h)), 1))
        xs, ys = xs[xs < x1], ys[ys < y1]
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return (gx + 1j * gy).reshape(-1)

    def contains(self, z, tol: float = 0.0):
        z = np.asarray(z)
        x0, x1 = sorted((self.lo.real, self.hi.real))
        y0, y1 = sorted((self.lo.imag, self.hi.imag))
        return (z.real >= x0 - tol) & (z.real <= x1 + tol) & (z.imag >= y0 - tol) & (z.imag <= y1 + tol)

    @property
    def diameter(self) -> float:
        return abs(self.hi - self.lo)

    def to_json(self) -> dict:
        return {"lo": [self.lo.real, self.lo.imag], "hi": [self.hi.real, self.hi.imag]}


@dataclass(frozen=True)
class Points:
    pts: tuple[complex, ...]

    def boundary(self, h: float) -> np.ndarray:
        return np.array(self.pts, dtype=np.complex128)

    def interior(self, h: float) -> np.ndarray:
        return np.zeros(0, dtype=np.complex128)

    def contains(self, z, tol: float = 0.0):
        z = np.asarray(z)
        return np.any(np.abs(z[..., None] - np.array(self.pts)) <= tol, axis=-1)

    @property
    def diameter(self) -> float:
        pts = np.array(self.pts)
        return float(np.abs(pts[:, None] - pts[None, :]).max()) if len(pts) else 0.0

    def to_json(self) -> list:
        return [[z.real, z.imag] for z in self.pts]


Primitive = Union[Disk, Annulus, Rect, Points]


def _lattice(c: complex, radius: float, h: float) -> np.ndarray:
    n = int(math.floor(radius / h))
    k = np.arange(-n, n + 1) * h
    gx, gy = np.meshgrid(k, k, indexing="ij")
    return (c + gx + 1j * gy).reshape(-1)


def disk(c, r: float) -> Disk:
    return Disk(as_complex(c), float(r))


def annulus(c, r_in: float, r_out: float) -> Annulus:
    if not 0 <= r_in < r_out:
        raise ValueError("annulus needs 0 <= r_in < r_out")
    return Annulus(as_complex(c), float(r_in), float(r_out))


def rect(lo, hi) -> Rect:
    return Rect(as_complex(lo), as_complex(hi))


def points(pts: Iterable) -> Points:
    return Points(tuple(as_complex(z) for z in pts))


def _origin_inside(prim: Primitive) -> bool:
    return bool(prim.contains(0j))


def _default_complement_connected(shapes: tuple[Primitive, ...]) -> bool:
    return not any(isinstance(s, Annulus) and s.r_in > 0 for s in shapes)


@dataclass(frozen=True)
class SetBounds:
    M: float
    dist_to_origin: float


@dataclass(frozen=True, eq=False)
class CompactSet:
    shapes: tuple[Primitive, ...]
    h: float
    eval_grid: np.ndarray = field(repr=False)
    validation_grid: np.ndarray = field(repr=False)
    complement_connected: bool = True
    contains_origin: bool = False

    @property
    def flags(self) -> dict:
        return {"complement_connected": self.complement_connected, "contains_origin": self.contains_origin}

    def grid(self, which: str = "eval") -> np.ndarray:
        if which == "eval":
            return self.eval_grid
        if which == "validation":
            return self.validation_grid
        raise ValueError(f"unknown grid {which!r}")

    @property
    def diameter(self) -> float:
        g = self.eval_grid
        lo = np.array([g.real.min(), g.imag.min()])
        hi = np.array([g.real.max(), g.imag.max()])
        return float(np.hypot(*(hi - lo)))

    def with_flags(self, **flags) -> "CompactSet":
        return replace(self, **flags)

    def to_json(self) -> dict:
        out: dict = {"disks": [], "annuli": [], "rects": [], "points": []}
        for s in self.shapes:
            if isinstance(s, Disk):
                out["disks"].append(s.to_json())
            elif isinstance(s, Annulus):
                out["annuli"].append(s.to_json())
            elif isinstance(s, Rect):
                out["rects"].append(s.to_json())
            else:
                out["points"].extend(s.to_json())
        out["h"] = self.h
        out["flags"] = self.flags
        return out


def default_h(shapes: Iterable[Primitive]) -> float:
    diam = max((s.diameter for s in shapes), default=0.0)
    return max(diam / 200.0, MIN_DEFAULT_H)


def sample(shape, h: float | None = None, flags: dict | None = None) -> CompactSet:
    """Sample a primitive or a union of primitives.

    Boundaries are sampled at arclength spacing <= h, interiors on a
    lattice of spacing h; the validation grid uses h/4 on the same anchors
    so it refines the working grid.
    """
    shapes = (shape,) if not isinstance(shape, (list, tuple)) else tuple(shape)
    if not shapes:
        raise EmptyShape("no primitives given")
    if h is None:
        h = default_h(shapes)
    if not h > 0:
        raise ValueError("density h must be positive")
    hv = h / VALIDATION_REFINEMENT
    coarse = [np.concatenate([s.boundary(h), s.interior(h)]) for s in shapes]
    fine = [np.concatenate([s.boundary(hv), s.interior(hv)]) for s in shapes]
    eval_grid = np.concatenate(coarse).astype(np.complex128)
    if eval_grid.size == 0:
        raise EmptyShape("shape produced no sample points")
    validation = np.concatenate([eval_grid] + fine).astype(np.complex128)
    eval_grid.setflags(write=False)
    validation.setflags(write=False)
    flags = dict(flags or {})
    return CompactSet(
        shapes=shapes,
        h=float(h),
        eval_grid=eval_grid,
        validation_grid=validation,
        complement_connected=bool(flags.get("complement_connected", _default_complement_connected(shapes))),
        contains_origin=bool(flags.get("contains_origin", any(_origin_inside(s) for s in shapes))),
    )


def _values(fn: Callable, pts: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(fn(pts), dtype=np.complex128)
    except PoleAtPoint as exc:
        raise PoleOnSet(str(exc)) from exc
    except ZeroDivisionError as exc:
        raise PoleOnSet(str(exc)) from exc
    vals = np.broadcast_to(vals, pts.shape)
    if not np.all(np.isfinite(vals)):
        raise PoleOnSet("function is not finite on the set")
    return vals


Grid = Literal["eval", "validation"]


def sup_norm(fn: Callable, s: CompactSet, grid: Grid = "eval") -> float:
    """max |fn(z)| over the chosen grid of ``s``."""
    with np.errstate(all="ignore"):
        return float(np.abs(_values(fn, s.grid(grid))).max())


def inf_abs(fn: Callable, s: CompactSet, grid: Grid = "eval") -> float:
    with np.errstate(all="ignore"):
        return float(np.abs(_values(fn, s.grid(grid))).min())


def bounds(s: CompactSet) -> SetBounds:
    a = np.abs(s.validation_grid)
    return SetBounds(M=float(a.max()), dist_to_origin=float(a.min()))


def union(a: CompactSet, b: CompactSet) -> CompactSet:
    ev = np.concatenate([a.eval_grid, b.eval_grid])
    va = np.concatenate([a.validation_grid, b.validation_grid])
    ev.setflags(write=False)
    va.setflags(write=False)
    return CompactSet(
        shapes=a.shapes + b.shapes,
        h=min(a.h, b.h),
        eval_grid=ev,
        validation_grid=va,
        complement_connected=a.complement_connected and b.complement_connected,
        contains_origin=a.contains_origin or b.contains_origin,
    )


def with_origin(s: CompactSet) -> CompactSet:
    """``s`` united with the single point 0."""
    return union(s, sample(points([0]), s.h, {"contains_origin": True}))


def min_distance(a: CompactSet, b: CompactSet, grid: Grid = "validation") -> float:
    ga, gb = a.grid(grid), b.grid(grid)
    if ga.size > gb.size:
        ga, gb = gb, ga
    tree = cKDTree(np.column_stack([gb.real, gb.imag]))
    dist, _ = tree.query(np.column_stack([ga.real, ga.imag]), k=1)
    return float(dist.min())


def are_disjoint(a: CompactSet, b: CompactSet, margin: float = 0.0) -> bool:
    return min_distance(a, b) > margin


def set_from_json(data: dict) -> CompactSet:
    shapes: list[Primitive] = []
    for d in data.get("disks", []):
        shapes.append(disk(d["c"], d["r"]))
    for d in data.get("annuli", []):
        shapes.append(annulus(d["c"], d["r_in"], d["r_out"]))
    for d in data.get("rects", []):
        shapes.append(rect(d["lo"], d["hi"]))
    if data.get("points"):
        shapes.append(points(data["points"]))
    if not shapes:
        raise EmptyShape("set description has no primitives")
    return sample(shapes, data.get("h"), data.get("flags"))


def grid_to_csv(pts: np.ndarray, values: np.ndarray | None = None, header: tuple[str, ...] = ("x", "y")) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header if values is None else header + ("abs_err",))
    for i, z in enumerate(pts):
        row = [f"{z.real:.17g}", f"{z.imag:.17g}"]
        if values is not None:
            row.append(f"{values[i]:.17g}")
        w.writerow(row)
    return buf.getvalue()
