"""Decision procedures, with witnesses, for the seven monotonicity notions.

Every checker is a pure function of the field and a :class:`ClassifyParams`
and returns a :class:`Verdict`.  A false verdict always carries a witness
that names the cells involved, so the violated inequality can be
re-evaluated directly from ``field.values``.  When several violations
exist the witness is the first one in row-major cell order (or sample
order, for subdomain-based checks).
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np
from scipy import ndimage

from .field import (
    FOUR,
    FieldError,
    extract_level_components,
    label_levels,
    quantize,
    sample_subdomains,
    subdomain_from_mask,
)
from .geometry import Cone, grid_cone_mask, normal_cone_at

DEFINITIONS = ("lebesgue", "mostow", "vg", "weak", "cone", "k", "normal")
DEFAULT_WIDTHS_DEG = (0.0, 22.5, 45.0, 90.0, 180.0, 360.0)
EIGHT = ((0, 1), (1, 0), (1, 1), (1, -1))


@dataclass(frozen=True)
class ClassifyParams:
    """Tolerances and search settings shared by all checkers.

    ``eps=None`` means ``1e-9 * (max f - min f)``.  ``radii`` are physical
    VG radii; ``None`` picks ``n_radii`` values between two cells and the
    largest admissible radius.
    """

    eps: float | None = None
    q: int = 64
    subdomains: int = 200
    seed: int = 0
    radii: tuple | None = None
    n_radii: int = 8
    cone_widths_deg: tuple = DEFAULT_WIDTHS_DEG
    n_orient: int = 72
    tau: float = 0.0
    bin_slack: int = 1
    jump_frac: float = 0.5
    a_res_deg: float = 2.0
    stencil: int = 3
    closed_domain: bool = True

    def __post_init__(self):
        if self.eps is not None and self.eps < 0:
            raise FieldError("eps must be >= 0")
        if self.q < 2:
            raise FieldError("q must be >= 2")
        if not 0 <= self.tau < 1:
            raise FieldError("tau must be in [0, 1)")
        if self.subdomains < 1 or self.n_radii < 1 or self.n_orient < 1:
            raise FieldError("subdomains, n_radii and n_orient must be >= 1")
        if self.bin_slack < 0 or self.jump_frac < 0:
            raise FieldError("bin_slack and jump_frac must be >= 0")
        if self.radii is not None:
            object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
            if any(r <= 0 for r in self.radii):
                raise FieldError("radii must be positive")
        object.__setattr__(self, "cone_widths_deg", tuple(float(w) for w in self.cone_widths_deg))

    def eps_for(self, field):
        return 1e-9 * field.value_range if self.eps is None else float(self.eps)

    def to_dict(self):
        """Settings as given; ``eps`` stays None when it scales with the field."""
        d = asdict(self)
        d["radii"] = list(self.radii) if self.radii is not None else None
        d["cone_widths_deg"] = list(self.cone_widths_deg)
        return d

    def echo(self, field):
        """Settings with ``eps`` resolved for ``field``."""
        d = self.to_dict()
        d["eps"] = self.eps_for(field)
        return d


@dataclass
class Verdict:
    definition: str
    holds: bool
    witness: dict | None
    params: dict
    report: dict = dc_field(default_factory=dict)

    def to_dict(self, with_report=False):
        d = {"definition": self.definition, "holds": bool(self.holds), "witness": self.witness}
        if with_report and self.report:
            d["report"] = self.report
        return d


def _cells(a):
    return [[int(i), int(j)] for i, j in a]


def _is_constant(field):
    return field.value_range == 0


# ---------------------------------------------------------------------------
# Lebesgue
# ---------------------------------------------------------------------------

def check_lebesgue(field, params=ClassifyParams()):
    """No level component may be an interior local minimum or maximum."""
    eps = params.eps_for(field)
    echo = params.echo(field)
    if _is_constant(field):
        return Verdict("lebesgue", True, None, echo)
    for comp in extract_level_components(field, params.q, eps):
        if comp.kind != "neither":
            return Verdict("lebesgue", False, {"component": comp.as_dict()}, echo)
    return Verdict("lebesgue", True, None, echo)


# ---------------------------------------------------------------------------
# subdomain based: Mostow and weak
# ---------------------------------------------------------------------------

def _extremum_neighbourhoods(field, params, eps):
    """One subdomain per interior extremum: the component plus its 4-neighbours."""
    out = []
    if _is_constant(field):
        return out
    mask = field.domain.mask
    for comp in extract_level_components(field, params.q, eps):
        if comp.kind == "neither":
            continue
        sub = np.zeros(mask.shape, dtype=bool)
        sub[comp.cells[:, 0], comp.cells[:, 1]] = True
        sub = ndimage.binary_dilation(sub, structure=FOUR) & mask
        out.append(subdomain_from_mask(field.domain, sub, origin="extremum"))
    return out


def subdomain_family(field, params, eps=None):
    """The seeded subdomain sample used by the Mostow and weak checks."""
    eps = params.eps_for(field) if eps is None else eps
    n = params.subdomains
    counts = {"balls": n - 2 * (n // 3), "rects": n // 3, "blobs": n // 3}
    subs = []
    for k, (strategy, c) in enumerate(counts.items()):
        if c:
            subs += sample_subdomains(field, strategy, c, params.seed * 3 + k)
    return subs + _extremum_neighbourhoods(field, params, eps)


def _sub_dict(k, sub):
    d = sub.as_dict()
    d["index"] = k
    return d


def check_mostow(field, params=ClassifyParams(), relatively_compact_only=True, family=None):
    """Max and min over each sampled subdomain are attained on its inner boundary.

    ``family`` reuses a precomputed :func:`subdomain_family`.
    """
    eps = params.eps_for(field)
    v = field.values
    family = subdomain_family(field, params, eps) if family is None else family
    for k, sub in enumerate(family):
        if relatively_compact_only and not sub.relatively_compact:
            continue
        if len(sub.inner_boundary) == 0:
            continue  # the whole domain has no boundary relative to itself
        inside = v[sub.cells[:, 0], sub.cells[:, 1]]
        bd = v[sub.inner_boundary[:, 0], sub.inner_boundary[:, 1]]
        for side, bad in (("max", inside.max() > bd.max() + eps),
                          ("min", inside.min() < bd.min() - eps)):
            if bad:
                pick = np.argmax(inside) if side == "max" else np.argmin(inside)
                w = {
                    "subdomain": _sub_dict(k, sub),
                    "side": side,
                    "cell": _cells(sub.cells[pick:pick + 1])[0],
                    "value": float(inside[pick]),
                    "boundary_extreme": float(bd.max() if side == "max" else bd.min()),
                }
                return Verdict("mostow", False, w, _echo_flag(params, field, relatively_compact_only))
    return Verdict("mostow", True, None, _echo_flag(params, field, relatively_compact_only))


def _echo_flag(params, field, rc):
    e = params.echo(field)
    e["relatively_compact_only"] = bool(rc)
    return e


def weak_slack(field, params):
    """Value slack for the weak check: ``bin_slack`` bins plus eps."""
    return params.bin_slack * field.value_range / params.q + params.eps_for(field)


def check_weak(field, params=ClassifyParams(), family=None):
    """Values inside each compactly contained subdomain stay within its boundary range.

    A subdomain fails when more than ``tau`` of its cells fall outside
    ``[m - slack, M + slack]``, ``m`` and ``M`` being the boundary extremes
    and ``slack`` one quantization bin (see :func:`weak_slack`).
    """
    eps = params.eps_for(field)
    slack = weak_slack(field, params)
    v = field.values
    family = subdomain_family(field, params, eps) if family is None else family
    for k, sub in enumerate(family):
        if not sub.relatively_compact or len(sub.inner_boundary) == 0:
            continue
        inside = v[sub.cells[:, 0], sub.cells[:, 1]]
        bd = v[sub.inner_boundary[:, 0], sub.inner_boundary[:, 1]]
        lo, hi = bd.min() - slack, bd.max() + slack
        out = (inside < lo) | (inside > hi)
        frac = out.mean()
        if frac > params.tau:
            w = {
                "subdomain": _sub_dict(k, sub),
                "boundary_min": float(bd.min()),
                "boundary_max": float(bd.max()),
                "slack": float(slack),
                "fraction": float(frac),
                "cells": _cells(sub.cells[out][:64]),
            }
            return Verdict("weak", False, w, params.echo(field))
    return Verdict("weak", True, None, params.echo(field))


# ---------------------------------------------------------------------------
# Vodopyanov-Goldstein
# ---------------------------------------------------------------------------

def vg_radii(field, params):
    """Radii in cell units: the explicit list, or an even spread up to the widest ball."""
    dom = field.domain
    if params.radii is not None:
        return np.array(sorted(params.radii)) / dom.spacing
    rmax = float(dom.boundary_distance().max()) - 0.5
    if rmax < 2:
        return np.array([])
    return np.linspace(2.0, rmax, params.n_radii)


@lru_cache(maxsize=256)
def _offsets(r):
    R = int(math.ceil(r))
    di, dj = np.mgrid[-R: R + 1, -R: R + 1]
    d = np.hypot(di, dj)
    keep = d <= r
    di, dj, d = di[keep], dj[keep], d[keep]
    ring = d >= r - 1
    pa, pb = _ring_pairs(di[ring], dj[ring])
    return di, dj, ring, pa, pb


def _ring_pairs(di, dj):
    """Index pairs of 8-adjacent offsets in a ring."""
    pos = {(a, b): k for k, (a, b) in enumerate(zip(di.tolist(), dj.tolist()))}
    pa, pb = [], []
    for k, (a, b) in enumerate(zip(di.tolist(), dj.tolist())):
        for sa, sb in EIGHT:
            m = pos.get((a + sa, b + sb))
            if m is not None:
                pa.append(k)
                pb.append(m)
    return np.array(pa, dtype=int), np.array(pb, dtype=int)


def _vg_radius(bins, values, centers, r, q, slack, jump):
    """Violation counts |V| and disk sizes |B| for every center at cell radius r."""
    di, dj, ring, pa, pb = _offsets(float(r))
    ci, cj = centers[:, 0:1], centers[:, 1:2]
    DB = bins[ci + di, cj + dj]  # (n, disk)
    rdi, rdj = di[ring], dj[ring]
    RB = bins[ci + rdi, cj + rdj]
    RV = values[ci + rdi, cj + rdj]
    n = len(centers)
    width = q + 1
    rows = np.arange(n)[:, None] * width
    starts = [(rows + RB).ravel()]
    stops = [(rows + RB + 1).ravel()]
    if len(pa):
        lo = np.minimum(RB[:, pa], RB[:, pb])
        hi = np.maximum(RB[:, pa], RB[:, pb])
        ok = np.abs(RV[:, pa] - RV[:, pb]) <= jump
        rr = np.broadcast_to(rows, lo.shape)[ok]
        starts.append(rr + lo[ok])
        stops.append(rr + hi[ok] + 1)
    size = n * width
    diff = (np.bincount(np.concatenate(starts), minlength=size)
            - np.bincount(np.concatenate(stops), minlength=size)).reshape(n, width)
    covered = np.cumsum(diff, axis=1)[:, :q] > 0
    if slack:
        covered = ndimage.binary_dilation(covered, structure=np.ones((1, 2 * slack + 1), bool))
    bad = ~np.take_along_axis(covered, DB, axis=1)
    return bad, di, dj


def check_vg(field, params=ClassifyParams()):
    """Every admissible ball takes only values already seen on its bounding sphere.

    For a center x and radius r the sphere S is the one-cell shell of the
    disk B.  A bin counts as attained on S when a shell cell lies in it or
    when it sits between the bins of two 8-adjacent shell cells whose
    values differ by at most ``jump_frac`` of the range (a continuous
    field passes through it); attained bins are widened by ``bin_slack``.
    The ball violates when the fraction of disk cells in unattained bins
    exceeds ``tau``.
    """
    echo = params.echo(field)
    if _is_constant(field):
        return Verdict("vg", True, None, echo)
    dom = field.domain
    bins = np.pad(quantize(field, params.q), 1, constant_values=0)
    vals = np.pad(np.nan_to_num(field.values), 1)
    bins = np.maximum(bins, 0)
    dist = dom.boundary_distance()
    jump = params.jump_frac * field.value_range
    best = None
    for r in vg_radii(field, params):
        centers = np.argwhere(dom.mask & (dist - 0.5 >= r))
        if len(centers) == 0:
            continue
        for start in range(0, len(centers), 512):
            chunk = centers[start: start + 512]
            bad, di, dj = _vg_radius(bins, vals, chunk + 1, r, params.q, params.bin_slack, jump)
            frac = bad.mean(axis=1)
            hit = np.flatnonzero(frac > params.tau)
            if len(hit):
                k = hit[0]
                cell = (int(chunk[k, 0]), int(chunk[k, 1]))
                if best is None or cell < best[0]:
                    vcells = np.stack([chunk[k, 0] + di[bad[k]], chunk[k, 1] + dj[bad[k]]], axis=1)
                    best = (cell, float(r), float(frac[k]), vcells)
                break
    if best is None:
        return Verdict("vg", True, None, echo)
    cell, r, frac, vcells = best
    w = {
        "cell": list(cell),
        "radius": r * dom.spacing,
        "radius_cells": r,
        "fraction": frac,
        "violating_cells": _cells(vcells[:64]),
        "violating_count": int(len(vcells)),
    }
    return Verdict("vg", False, w, echo)


# ---------------------------------------------------------------------------
# K monotone and cone monotone
# ---------------------------------------------------------------------------

def check_k_monotone(field, K, params=ClassifyParams()):
    """f(x) <= f(y) + eps whenever y - x lies in K (pairwise over all cells).

    Rays are digital: a cell is on the ray when its center is within half a
    cell of the ray line.
    """
    eps = params.eps_for(field)
    echo = params.echo(field)
    echo["cone"] = K.to_dict()
    cells = np.argwhere(field.domain.mask)
    v = field.values[cells[:, 0], cells[:, 1]]
    ny, nx = field.domain.mask.shape
    DI, DJ = _offset_grid(ny, nx)
    in_K = grid_cone_mask(K, DI, DJ).ravel()
    flat, centre = _flat_offsets(cells, ny, nx)
    for rows in _chunks(len(cells)):
        bad = (v[None, :] < v[rows, None] - eps) & in_K[flat[None, :] - (flat[rows, None] - centre)]
        hit = np.flatnonzero(bad.any(axis=1))
        if len(hit):
            a = int(rows[hit[0]])
            b = int(np.flatnonzero(bad[hit[0]])[0])
            w = {
                "x": _cells(cells[a:a + 1])[0],
                "y": _cells(cells[b:b + 1])[0],
                "f_x": float(v[a]),
                "f_y": float(v[b]),
                "cone": K.to_dict(),
            }
            return Verdict("k", False, w, echo)
    return Verdict("k", True, None, echo)


def _offset_grid(ny, nx):
    """Row and column offsets between any two cells of an ny x nx grid."""
    return np.mgrid[1 - ny:ny, 1 - nx:nx]


def _flat_offsets(cells, ny, nx):
    """Per-cell keys whose differences, plus the returned centre, index the offset table."""
    flat = (cells[:, 0] * (2 * nx - 1) + cells[:, 1]).astype(np.int32)
    return flat, (ny - 1) * (2 * nx - 1) + nx - 1


def _chunks(n, budget=1 << 18):
    size = max(1, budget // n)
    for s in range(0, n, size):
        yield np.arange(s, min(s + size, n))


def _circ_dist(a, b):
    d = np.abs(a - b) % (2 * math.pi)
    return np.minimum(d, 2 * math.pi - d)


class _SectorSlots:
    """Exact sector membership by arcs between sector edges.

    Every finite family sector is a closed arc whose ends are breakpoints.
    An angle falls in slot 2m when it sits on breakpoint m and in slot
    2m + 1 when it lies strictly between breakpoints m and m + 1, so a
    sector is blocked when any slot in its circular range is occupied.
    """

    def __init__(self, widths, axes, tol=1e-12):
        self.tol = tol
        finite = [w for w in widths if 0 < w < 2 * math.pi - tol]
        edges = np.mod(np.concatenate([axes + s * w / 2 for w in finite for s in (-1, 1)]
                                      or [np.zeros(0)]), 2 * math.pi)
        edges = np.sort(edges)
        keep = np.ones(len(edges), bool)
        keep[1:] = np.diff(edges) > tol
        self.breaks = edges[keep]
        if len(self.breaks) > 1 and _circ_dist(self.breaks[0], self.breaks[-1]) <= tol:
            self.breaks = self.breaks[:-1]
        self.n = 2 * len(self.breaks)
        self.ranges = {}
        for w in finite:
            lo = self._nearest(np.mod(axes - w / 2, 2 * math.pi))
            hi = self._nearest(np.mod(axes + w / 2, 2 * math.pi))
            self.ranges[w] = (2 * lo, 2 * hi)

    def _nearest(self, ang):
        k = np.searchsorted(self.breaks, ang)
        m = len(self.breaks)
        up, down = k % m, (k - 1) % m
        return np.where(_circ_dist(ang, self.breaks[up]) <= _circ_dist(ang, self.breaks[down]), up, down)

    def slot(self, ang):
        m = len(self.breaks)
        idx = self._nearest(ang)
        on = _circ_dist(ang, self.breaks[idx]) <= self.tol
        after = (np.searchsorted(self.breaks, ang, side="right") - 1) % m
        return np.where(on, 2 * idx, 2 * after + 1)

    def blocked(self, counts, w):
        """(rows, orientations) mask from per-row slot occupancy counts."""
        lo, hi = self.ranges[w]
        c = np.concatenate([np.zeros((len(counts), 1), counts.dtype), np.cumsum(counts, axis=1)], axis=1)
        inner = c[:, hi + 1] - c[:, lo]
        wrapped = c[:, -1:] - c[:, lo] + c[:, hi + 1]
        return np.where(lo <= hi, inner, wrapped) > 0


def cone_family(params):
    """(widths_rad, axes_rad) of the candidate cone search family."""
    widths = np.radians(np.array(params.cone_widths_deg))
    axes = np.arange(params.n_orient) * (2 * math.pi / params.n_orient)
    return widths, axes


def family_cone(width, axis):
    return Cone.from_axis(float(axis), float(width))


def cone_feasibility(field, params=ClassifyParams()):
    """Boolean (cells, widths, orientations) array of feasible family cones.

    A cone K is feasible at x when no cell y in x + K has f(y) < f(x) - eps.
    Digital rays widen each offset by the angle half a cell subtends at its
    distance.
    """
    eps = params.eps_for(field)
    widths, axes = cone_family(params)
    n_orient = len(axes)
    cells = np.argwhere(field.domain.mask)
    v = field.values[cells[:, 0], cells[:, 1]]
    ny, nx = field.domain.mask.shape
    DI, DJ = _offset_grid(ny, nx)
    ang = np.mod(np.arctan2(DI, DJ), 2 * math.pi).ravel()
    dist = np.maximum(np.hypot(DI, DJ), 0.5).ravel()
    rays = _ray_bits(ang, dist, n_orient) if (widths == 0).any() else None
    slots = _SectorSlots(widths, axes)
    slot = slots.slot(ang) if slots.n else None
    feas = np.ones((len(cells), len(widths), n_orient), dtype=bool)
    flat, centre = _flat_offsets(cells, ny, nx)
    for rows in _chunks(len(cells)):
        r, c = np.nonzero(v[None, :] < v[rows, None] - eps)
        if len(r) == 0:
            continue
        o = flat[c] - flat[rows[r]] + centre
        nrow = len(rows)
        any_bad = np.bincount(r, minlength=nrow) > 0
        counts = None
        if slots.n:
            counts = np.bincount(r * slots.n + slot[o], minlength=nrow * slots.n).reshape(nrow, slots.n)
        for w, width in enumerate(widths):
            if width >= 2 * math.pi - 1e-12:
                block = np.repeat(any_bad[:, None], n_orient, axis=1)
            elif width > 0:
                block = slots.blocked(counts, width)
            else:
                starts = np.flatnonzero(np.diff(r, prepend=-1))
                hits = np.bitwise_or.reduceat(rays[o], starts, axis=0)
                block = np.zeros((nrow, n_orient), dtype=bool)
                block[r[starts]] = np.unpackbits(hits, axis=1, count=n_orient).astype(bool)
            feas[rows, w] = ~block
    return cells, feas


def _ray_bits(ang, dist, n_orient):
    """Packed (offsets, orientations) membership of each offset in each digital ray."""
    step = 2 * math.pi / n_orient
    spread = np.arcsin(np.minimum(1.0, 0.5 / dist)) + 1e-12
    k = np.arange(n_orient)
    d = np.abs(np.mod(ang[:, None] - k * step + math.pi, 2 * math.pi) - math.pi)
    return np.packbits(d <= spread[:, None], axis=1)


def check_cone_monotone(field, params=ClassifyParams(), feasibility=None):
    """Every cell has some family cone along which f does not drop below f(x) - eps.

    On success ``report`` holds the widest feasible cone per cell.
    """
    echo = params.echo(field)
    cells, feas = cone_feasibility(field, params) if feasibility is None else feasibility
    widths, axes = cone_family(params)
    any_ok = feas.any(axis=(1, 2))
    if not any_ok.all():
        a = int(np.flatnonzero(~any_ok)[0])
        w = {"cell": _cells(cells[a:a + 1])[0], "feasible_cones": [],
             "searched_widths_deg": list(params.cone_widths_deg), "n_orient": params.n_orient}
        return Verdict("cone", False, w, echo)
    wsel = np.array([np.flatnonzero(feas[a].any(axis=1))[-1] for a in range(len(cells))])
    osel = feas[np.arange(len(cells)), wsel].argmax(axis=1)
    kinds = {}
    per_cell = []
    for a in range(len(cells)):
        K = family_cone(widths[wsel[a]], axes[osel[a]])
        kinds[K.kind] = kinds.get(K.kind, 0) + 1
        per_cell.append([int(cells[a, 0]), int(cells[a, 1]), K.kind,
                         round(math.degrees(widths[wsel[a]]), 9), round(math.degrees(axes[osel[a]]), 9)])
    report = {"kinds": dict(sorted(kinds.items())), "cells": per_cell}
    return Verdict("cone", True, None, echo, report)


def check_k_any(field, params=ClassifyParams(), feasibility=None):
    """Is there one family cone K for which the field is K monotone?

    A fixed cone works exactly when it is feasible at every cell, so this
    reads off the per-cell feasibility.  The full plane is excluded since
    only constant fields are monotone along it.
    """
    echo = params.echo(field)
    cells, feas = cone_feasibility(field, params) if feasibility is None else feasibility
    widths, axes = cone_family(params)
    common = feas.all(axis=0)
    common[widths >= 2 * math.pi - 1e-12] = False
    if common.any():
        w_i, o_i = np.argwhere(common)[-1]
        K = family_cone(widths[w_i], axes[o_i])
        return Verdict("k", True, None, echo, {"cone": K.to_dict()})
    return Verdict("k", False, {"searched_widths_deg": list(params.cone_widths_deg),
                                "n_orient": params.n_orient, "feasible_for_all": []}, echo)


# ---------------------------------------------------------------------------
# normal monotone
# ---------------------------------------------------------------------------

def _quad_mask(mask):
    """quad[i, j]: all four cell centers of the square with lower-left (i, j) are in the mask."""
    return mask[:-1, :-1] & mask[1:, :-1] & mask[:-1, 1:] & mask[1:, 1:]


def _trace_batch(values, quad, i0, j0, dirs, nstep):
    """Bilinear samples along i0,j0 + t*dirs for t = -nstep..nstep cells.

    Returns (n_dirs, 2*nstep+1) with NaN past the first untraversable sample
    on each side.
    """
    ny, nx = values.shape
    k = np.arange(1, nstep + 1, dtype=float)
    rows = []
    for sgn in (-1.0, 1.0):
        u = j0 + sgn * dirs[:, 0:1] * k
        w = i0 + sgn * dirs[:, 1:2] * k
        inside = (w >= 0) & (w <= ny - 1) & (u >= 0) & (u <= nx - 1)
        wi = np.clip(np.floor(w).astype(int), 0, ny - 2)
        ui = np.clip(np.floor(u).astype(int), 0, nx - 2)
        fw = w - wi
        fu = u - ui
        ok = np.logical_and.accumulate(inside & quad[wi, ui], axis=1)
        with np.errstate(invalid="ignore"):
            s = (values[wi, ui] * (1 - fw) * (1 - fu) + values[wi, ui + 1] * (1 - fw) * fu
                 + values[wi + 1, ui] * fw * (1 - fu) + values[wi + 1, ui + 1] * fw * fu)
        rows.append(np.where(ok, s, np.nan))
    centre = np.full((len(dirs), 1), values[i0, j0])
    return np.concatenate([rows[0][:, ::-1], centre, rows[1]], axis=1)


def _monotone_violation(tr, tol, strict):
    """Index pairs (drop, rise) showing a trace is not monotone, or None.

    Non-strict: the trace fails when some sample sits more than ``tol``
    below an earlier one and some sample more than ``tol`` above an
    earlier one.  Strict: every step must move by more than ``tol`` in one
    common direction.
    """
    v = tr[~np.isnan(tr)]
    if len(v) < 2:
        return None
    if strict:
        d = np.diff(v)
        if (d > tol).all() or (d < -tol).all():
            return None
        return int(np.flatnonzero(~(d > tol))[0]), int(np.flatnonzero(~(d < -tol))[0])
    run_max = np.maximum.accumulate(v)
    run_min = np.minimum.accumulate(v)
    drop = run_max - v
    rise = v - run_min
    if drop.max() > tol and rise.max() > tol:
        a = int(np.argmax(drop > tol))
        b = int(np.argmax(rise > tol))
        return (int(np.argmax(v[: a + 1] >= run_max[a])), a), (int(np.argmax(v[: b + 1] <= run_min[b])), b)
    return None


def _suspect_rows(traces, tol, strict):
    """Vectorised pre-screen: rows that may violate (exact test follows)."""
    if strict:
        d = np.diff(traces, axis=1)
        nan = np.isnan(d)
        up = np.where(nan, True, d > tol).all(axis=1)
        dn = np.where(nan, True, d < -tol).all(axis=1)
        return ~(up | dn)
    run_max = np.fmax.accumulate(traces, axis=1)
    run_min = np.fmin.accumulate(traces, axis=1)
    with np.errstate(invalid="ignore"):
        drop = np.nanmax(run_max - traces, axis=1)
        rise = np.nanmax(traces - run_min, axis=1)
    return (drop > tol) & (rise > tol)


def trace_tolerance(field, params):
    """Non-strict trace slack: eps plus ``bin_slack`` quantization bins."""
    return weak_slack(field, params)


def level_boundary_cells(labels):
    """Cells of a level component with a 4-neighbour outside that component."""
    pad = np.pad(labels, 1, constant_values=0)
    core = pad[1:-1, 1:-1]
    edge = np.zeros(labels.shape, dtype=bool)
    for di, dj in ((0, 1), (1, 0), (0, -1), (-1, 0)):
        edge |= pad[1 + di: 1 + di + labels.shape[0], 1 + dj: 1 + dj + labels.shape[1]] != core
    return edge & (labels > 0)


def check_normal(field, params=ClassifyParams(), strict=False):
    """f is monotone along every line normal to a level component.

    Normals come from :func:`normal_cone_at` at each boundary cell of each
    level component; lines are followed in both directions until they
    leave the domain.  A non-strict trace may not both drop and rise by
    more than eps plus one quantization bin relative to earlier samples,
    which absorbs interpolation ripple along level lines; strict traces
    must change by more than eps at every step, all in one direction.
    """
    eps = params.eps_for(field)
    echo = params.echo(field)
    echo["strict"] = bool(strict)
    tol = trace_tolerance(field, params)
    if _is_constant(field):
        holds = not strict
        w = None if holds else {"cell": _cells(np.argwhere(field.domain.mask)[:1])[0],
                                "reason": "constant field is nowhere strictly monotone"}
        return Verdict("normal", holds, w, echo)
    dom = field.domain
    mask = dom.mask
    _, labels, _ = label_levels(field, params.q)
    values = np.nan_to_num(field.values)
    quad = _quad_mask(mask)
    n_half = int(round(180.0 / params.a_res_deg))
    for i, j in np.argwhere(level_boundary_cells(labels)):
        D = normal_cone_at(labels, labels[i, j], (i, j), params.a_res_deg, params.stencil,
                           params.closed_domain, mask)
        if len(D) == 0:
            continue
        # a trace runs both ways, so d and -d are the same line
        idx = np.round(np.mod(np.arctan2(D[:, 1], D[:, 0]), math.pi) / math.pi * n_half).astype(int) % n_half
        _, first = np.unique(idx, return_index=True)
        D = D[np.sort(first)]
        reach = math.hypot(max(i, dom.ny - 1 - i), max(j, dom.nx - 1 - j))
        traces = _trace_batch(values, quad, i, j, D, int(reach) + 2)
        for k in np.flatnonzero(_suspect_rows(traces, eps if strict else tol, strict)):
            tr = traces[k]
            bad = _monotone_violation(tr, eps if strict else tol, strict)
            if bad is not None:
                first = int(np.flatnonzero(~np.isnan(tr))[0])
                if strict:
                    pairs = [[first + bad[0], first + bad[0] + 1], [first + bad[1], first + bad[1] + 1]]
                else:
                    pairs = [[first + bad[0][0], first + bad[0][1]], [first + bad[1][0], first + bad[1][1]]]
                w = {
                    "cell": [int(i), int(j)],
                    "direction": [float(D[k, 0]), float(D[k, 1])],
                    "step": dom.spacing,
                    "trace_offset": -((traces.shape[1] - 1) // 2),
                    "tolerance": float(eps if strict else tol),
                    "trace_indices": pairs,
                    "trace_values": [[float(tr[a]), float(tr[b])] for a, b in pairs],
                }
                return Verdict("normal", False, w, echo)
    return Verdict("normal", True, None, echo)


# ---------------------------------------------------------------------------

def classify(field, checks=DEFINITIONS, params=ClassifyParams(), cone=None,
             relatively_compact_only=True, strict=False):
    """Run the requested checks; ``k`` needs ``cone`` (else it searches the family)."""
    out = []
    feas = None
    for name in checks:
        if name == "lebesgue":
            out.append(check_lebesgue(field, params))
        elif name == "mostow":
            out.append(check_mostow(field, params, relatively_compact_only))
        elif name == "vg":
            out.append(check_vg(field, params))
        elif name == "weak":
            out.append(check_weak(field, params))
        elif name in ("cone", "k") and feas is None and (name == "cone" or cone is None):
            feas = cone_feasibility(field, params)
        if name == "cone":
            out.append(check_cone_monotone(field, params, feas))
        elif name == "k":
            out.append(check_k_monotone(field, cone, params) if cone is not None
                       else check_k_any(field, params, feas))
        elif name == "normal":
            out.append(check_normal(field, params, strict))
        elif name not in DEFINITIONS:
            raise FieldError(f"unknown check {name!r}; choose from {', '.join(DEFINITIONS)}")
    return out
