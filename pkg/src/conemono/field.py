"""Grid domains, sampled scalar fields, level-set components and subdomains.

Cells are addressed ``(i, j)`` with ``i`` the row (y index) and ``j`` the
column (x index).  The physical center of cell ``(i, j)`` is
``(origin[0] + j * spacing, origin[1] + i * spacing)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
from scipy import ndimage

FOUR = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
STEPS4 = ((0, 1), (1, 0), (0, -1), (-1, 0))


class FieldError(ValueError):
    """Raised for malformed domains, fields or field files."""


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class GridDomain:
    nx: int
    ny: int
    spacing: float
    origin: tuple[float, float]
    mask: np.ndarray

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise FieldError(f"grid must be at least 2x2, got {self.nx}x{self.ny}")
        if not self.spacing > 0:
            raise FieldError("spacing must be positive")
        mask = _frozen(self.mask, bool)
        if mask.shape != (self.ny, self.nx):
            raise FieldError(f"mask shape {mask.shape} != ({self.ny}, {self.nx})")
        if not mask.any():
            raise FieldError("domain mask is empty")
        _, ncomp = ndimage.label(mask, structure=FOUR)
        if ncomp != 1:
            raise FieldError(f"domain mask has {ncomp} 4-connected components, need 1")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        object.__setattr__(self, "spacing", float(self.spacing))

    @classmethod
    def square(cls, n, lo, hi, ny=None, mask=None):
        """Cell-centered grid tiling ``[lo, hi]`` along x with ``n`` cells."""
        ny = n if ny is None else ny
        h = (hi - lo) / n
        if mask is None:
            mask = np.ones((ny, n), dtype=bool)
        return cls(n, ny, h, (lo + h / 2, lo + h / 2), mask)

    def coords(self):
        """Physical (X, Y) center arrays of shape (ny, nx)."""
        xs = self.origin[0] + self.spacing * np.arange(self.nx)
        ys = self.origin[1] + self.spacing * np.arange(self.ny)
        return np.meshgrid(xs, ys)

    def cell_center(self, cell):
        i, j = cell
        return (self.origin[0] + j * self.spacing, self.origin[1] + i * self.spacing)

    def edge_adjacent(self):
        """Masked-in cells that lie on the grid edge or touch a masked-out cell."""
        cached = self.__dict__.get("_edge")
        if cached is None:
            padded = np.pad(self.mask, 1, constant_values=False)
            eroded = ndimage.binary_erosion(padded, structure=FOUR)[1:-1, 1:-1]
            cached = self.mask & ~eroded
            cached.flags.writeable = False
            self.__dict__["_edge"] = cached
        return cached

    def boundary_distance(self):
        """Distance (in cells) from each cell center to the nearest outside cell center."""
        padded = np.pad(self.mask, 1, constant_values=False)
        return ndimage.distance_transform_edt(padded)[1:-1, 1:-1]

    @property
    def cell_count(self):
        return int(self.mask.sum())


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Values on a grid domain; masked-out cells hold NaN."""

    domain: GridDomain
    values: np.ndarray
    continuity_hint: str = "continuous"

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        d = self.domain
        if v.shape != (d.ny, d.nx):
            raise FieldError(f"values shape {v.shape} != ({d.ny}, {d.nx})")
        if not np.all(np.isfinite(v[d.mask])):
            raise FieldError("every masked-in cell needs a finite value")
        v[~d.mask] = np.nan
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if self.continuity_hint not in ("continuous", "discontinuous"):
            raise FieldError(f"bad continuity_hint {self.continuity_hint!r}")

    @property
    def vmin(self):
        return float(np.nanmin(self.values))

    @property
    def vmax(self):
        return float(np.nanmax(self.values))

    @property
    def value_range(self):
        return self.vmax - self.vmin

    def scaled(self, c):
        return ScalarField(self.domain, np.where(self.domain.mask, self.values * c, np.nan),
                           self.continuity_hint)


def quantize(field, q):
    """Uniform bin index over [min f, max f]; -1 outside the mask."""
    if q < 2:
        raise FieldError("q must be >= 2")
    v = field.values
    lo, span = field.vmin, field.value_range
    bins = np.full(v.shape, -1, dtype=np.int64)
    m = field.domain.mask
    if span <= 0:
        bins[m] = 0
        return bins
    # rounding first keeps values that are equal up to float noise in one bin
    b = np.floor(np.round((v[m] - lo) / span * q, 9)).astype(np.int64)
    bins[m] = np.clip(b, 0, q - 1)
    return bins


@dataclass(frozen=True, eq=False)
class LevelSetComponent:
    level_index: int
    cells: np.ndarray  # (k, 2) int array of (i, j), row-major sorted
    is_boundary_touching: bool
    kind: str  # "interior-min" | "interior-max" | "neither"

    def as_dict(self, max_cells=32):
        return {
            "level_index": int(self.level_index),
            "size": int(len(self.cells)),
            "cells": self.cells[:max_cells].tolist(),
            "is_boundary_touching": bool(self.is_boundary_touching),
            "kind": self.kind,
        }


def label_levels(field, q):
    """Return (bins, labels, ncomp): 4-connected components of equal bins.

    Labels are numbered 1..ncomp in row-major order of each component's
    first cell, so the numbering does not depend on q-loop order.
    """
    bins = quantize(field, q)
    labels = np.zeros(bins.shape, dtype=np.int64)
    offset = 0
    for b in np.unique(bins[bins >= 0]):
        lab, n = ndimage.label(bins == b, structure=FOUR)
        labels[lab > 0] = lab[lab > 0] + offset
        offset += n
    flat = labels.ravel()
    nz = np.flatnonzero(flat)
    _, first = np.unique(flat[nz], return_index=True)
    order = np.argsort(nz[first], kind="stable")
    remap = np.zeros(offset + 1, dtype=np.int64)
    remap[np.unique(flat[nz])[order]] = np.arange(1, offset + 1)
    return bins, remap[labels], offset


def _neighbor_pairs(labels, values):
    """All 4-adjacent (label_a, label_b) with different labels, plus the value of b."""
    labs, vals = [], []
    for di, dj in ((0, 1), (1, 0)):
        a = labels[: labels.shape[0] - di, : labels.shape[1] - dj]
        b = labels[di:, dj:]
        va = values[: labels.shape[0] - di, : labels.shape[1] - dj]
        vb = values[di:, dj:]
        sel = (a > 0) & (b > 0) & (a != b)
        labs += [np.stack([a[sel], b[sel]], axis=1), np.stack([b[sel], a[sel]], axis=1)]
        vals += [vb[sel], va[sel]]
    return np.concatenate(labs, axis=0), np.concatenate(vals)


def extract_level_components(field, q=64, eps=0.0):
    """Partition the masked-in cells into level components and classify them.

    A component is an interior minimum (maximum) when neither it nor any of
    its neighbours touches the domain edge and every neighbouring cell
    outside it sits in a higher (lower) bin and exceeds (falls below) the
    component's values by more than ``eps``.  The collar of neighbours keeps
    the component together with its surroundings compactly inside the domain.
    """
    if eps < 0:
        raise FieldError("eps must be >= 0")
    bins, labels, n = label_levels(field, q)
    v = field.values
    flat_lab = labels.ravel()
    inside = flat_lab > 0
    idx = flat_lab[inside]
    vals = v.ravel()[inside]
    cmin = np.full(n + 1, np.inf)
    cmax = np.full(n + 1, -np.inf)
    np.minimum.at(cmin, idx, vals)
    np.maximum.at(cmax, idx, vals)
    touching = np.zeros(n + 1, dtype=bool)
    edge = field.domain.edge_adjacent()
    touching[np.unique(labels[edge])] = True
    collar = np.zeros(n + 1, dtype=bool)
    collar[np.unique(labels[ndimage.binary_dilation(edge, structure=FOUR) & field.domain.mask])] = True

    lower = np.zeros(n + 1, dtype=bool)
    higher = np.zeros(n + 1, dtype=bool)
    has_nb = np.zeros(n + 1, dtype=bool)
    pairs, nb_vals = _neighbor_pairs(labels, v)
    if len(pairs):
        la = pairs[:, 0]
        has_nb[la] = True
        np.logical_or.at(lower, la, nb_vals <= cmax[la] + eps)
        np.logical_or.at(higher, la, nb_vals >= cmin[la] - eps)

    ii, jj = np.nonzero(labels)
    order = np.lexsort((jj, ii))
    ii, jj = ii[order], jj[order]
    labs = labels[ii, jj]
    sort = np.argsort(labs, kind="stable")
    split = np.searchsorted(labs[sort], np.arange(1, n + 2))
    comps = []
    for k in range(1, n + 1):
        sel = sort[split[k - 1]: split[k]]
        cells = np.stack([ii[sel], jj[sel]], axis=1)
        kind = "neither"
        if has_nb[k] and not collar[k]:
            if not lower[k]:
                kind = "interior-min"
            elif not higher[k]:
                kind = "interior-max"
        b0 = bins[cells[0, 0], cells[0, 1]]
        comps.append(LevelSetComponent(int(b0), cells, bool(touching[k]), kind))
    return comps


@dataclass(frozen=True, eq=False)
class SubdomainSample:
    cells: np.ndarray  # (k, 2)
    inner_boundary: np.ndarray  # (m, 2), subset of cells
    relatively_compact: bool
    origin: str = dc_field(default="sampled")

    def as_dict(self, max_cells=64):
        return {
            "origin": self.origin,
            "size": int(len(self.cells)),
            "cells": self.cells[:max_cells].tolist(),
            "inner_boundary_size": int(len(self.inner_boundary)),
            "relatively_compact": bool(self.relatively_compact),
        }


def subdomain_from_mask(domain, sub, origin="sampled"):
    """Build a SubdomainSample from a boolean cell set (must be connected)."""
    sub = sub & domain.mask
    pad = np.pad(sub, 1, constant_values=False)
    outside_in_omega = np.pad(domain.mask & ~sub, 1, constant_values=False)
    ring = np.zeros_like(pad)
    for di, dj in STEPS4:
        ring |= np.roll(outside_in_omega, (di, dj), axis=(0, 1))
    ring = ring[1:-1, 1:-1] & sub
    rc = not (sub & domain.edge_adjacent()).any()
    cells = np.argwhere(sub)
    return SubdomainSample(cells, np.argwhere(ring), rc, origin)


def _component_at(mask, cell):
    lab, _ = ndimage.label(mask, structure=FOUR)
    k = lab[cell]
    return lab == k if k else np.zeros_like(mask)


def sample_subdomains(field_or_domain, strategy="balls", count=1, seed=0):
    """Seeded Monte-Carlo sample of connected subdomains of the field's domain."""
    if count < 1:
        raise FieldError("count must be >= 1")
    dom = getattr(field_or_domain, "domain", field_or_domain)
    rng = np.random.default_rng(seed)
    inside = np.argwhere(dom.mask)
    ny, nx = dom.ny, dom.nx
    rmax = max(2, min(nx, ny) // 3)
    out = []
    for _ in range(count):
        c = tuple(inside[rng.integers(len(inside))])
        if strategy == "balls":
            r = rng.uniform(1.0, rmax)
            ii, jj = np.ogrid[:ny, :nx]
            sub = (ii - c[0]) ** 2 + (jj - c[1]) ** 2 <= r * r
        elif strategy == "rects":
            # bounds may overshoot the grid so edge-hugging rectangles are common
            h = rng.integers(1, ny // 2 + 1)
            w = rng.integers(1, nx // 2 + 1)
            i0 = int(np.clip(c[0] - rng.integers(0, h + 1), 0, ny - 1))
            j0 = int(np.clip(c[1] - rng.integers(0, w + 1), 0, nx - 1))
            sub = np.zeros((ny, nx), dtype=bool)
            sub[i0: i0 + h + 1, j0: j0 + w + 1] = True
            sub[c] = True
        elif strategy == "blobs":
            # a chain of overlapping random discs walking away from the seed
            ii, jj = np.ogrid[:ny, :nx]
            sub = np.zeros((ny, nx), dtype=bool)
            ci, cj = c
            for _ in range(int(rng.integers(2, 7))):
                r = rng.uniform(1.0, rmax / 2 + 1)
                sub |= (ii - ci) ** 2 + (jj - cj) ** 2 <= r * r
                ang = rng.uniform(0, 2 * np.pi)
                ci, cj = ci + r * np.sin(ang), cj + r * np.cos(ang)
        else:
            raise FieldError(f"unknown strategy {strategy!r}")
        sub = _component_at(sub & dom.mask, c)
        out.append(subdomain_from_mask(dom, sub, origin=strategy))
    return out


# ---------------------------------------------------------------------------
# file I/O
# ---------------------------------------------------------------------------

def field_to_dict(field):
    d = field.domain
    vals = field.values.ravel()
    mask = d.mask.ravel()
    return {
        "nx": d.nx,
        "ny": d.ny,
        "spacing": d.spacing,
        "origin": [d.origin[0], d.origin[1]],
        "mask": [int(m) for m in mask],
        "values": [float(v) if m else None for v, m in zip(vals, mask)],
        "continuity_hint": field.continuity_hint,
    }


def field_from_dict(obj):
    try:
        nx, ny = int(obj["nx"]), int(obj["ny"])
        spacing = float(obj["spacing"])
        origin = tuple(float(o) for o in obj["origin"])
        mask = obj["mask"]
        values = obj["values"]
        hint = obj.get("continuity_hint", "continuous")
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldError(f"malformed field: {exc}") from exc
    if len(origin) != 2:
        raise FieldError("origin must have two entries")
    if len(mask) != nx * ny or len(values) != nx * ny:
        raise FieldError("mask/values length must equal nx*ny")
    if any(m not in (0, 1) for m in mask):
        raise FieldError("mask entries must be 0 or 1")
    m = np.array(mask, dtype=bool)
    v = np.full(nx * ny, np.nan)
    for k, (mk, val) in enumerate(zip(m, values)):
        if mk:
            if val is None:
                raise FieldError(f"masked-in cell {k} has no value")
            v[k] = float(val)
        elif val is not None:
            raise FieldError(f"masked-out cell {k} carries a value")
    dom = GridDomain(nx, ny, spacing, origin, m.reshape(ny, nx))
    return ScalarField(dom, v.reshape(ny, nx), hint)


def save_field(field, path):
    Path(path).write_text(json.dumps(field_to_dict(field)), encoding="utf-8")


def load_field(path):
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FieldError(f"{path}: not JSON ({exc})") from exc
    return field_from_dict(obj)


def save_pgm(field, path):
    """8-bit binary PGM heatmap, row 0 of the image is the top (max y) row."""
    d = field.domain
    span = field.value_range
    img = np.zeros((d.ny, d.nx), dtype=np.uint8)
    if span > 0:
        scaled = np.round((field.values - field.vmin) / span * 255)
        img[d.mask] = scaled[d.mask].astype(np.uint8)
    img = img[::-1]
    header = f"P5\n{d.nx} {d.ny}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.tobytes())
