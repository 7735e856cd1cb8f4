"""Planar convex cones, the order they induce, and level-set normals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2 * math.pi
ANGLE_TOL = 1e-12
KINDS = ("ray", "sector", "half_plane", "full_plane")


class ConeError(ValueError):
    pass


def _wrap(a):
    return a % TWO_PI


@dataclass(frozen=True)
class Cone:
    """Closed (by default) convex cone given by an angular sector.

    ``theta_lo`` and ``theta_hi`` are radians; the sector runs
    counter-clockwise from ``theta_lo`` to ``theta_hi``.
    """

    kind: str
    theta_lo: float = 0.0
    theta_hi: float = 0.0
    include_boundary: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConeError(f"unknown cone kind {self.kind!r}")
        lo, hi = _wrap(self.theta_lo), _wrap(self.theta_hi)
        object.__setattr__(self, "theta_lo", lo)
        object.__setattr__(self, "theta_hi", hi)
        w = self.width
        if self.kind == "ray" and not math.isclose(w, 0.0, abs_tol=1e-9):
            raise ConeError("a ray has zero width")
        if self.kind == "sector" and not (1e-9 < w < math.pi - 1e-9):
            raise ConeError(f"sector width must be in (0, pi), got {w}")
        if self.kind == "half_plane" and not math.isclose(w, math.pi, abs_tol=1e-9):
            raise ConeError("a half plane has width pi")

    @classmethod
    def from_degrees(cls, lo, hi, include_boundary=True):
        """Infer the kind from the sector width (``hi - lo`` >= 360 is the full plane)."""
        width = hi - lo
        if width >= 360 or width <= -360:
            return cls("full_plane", 0.0, 0.0, include_boundary)
        wd = width % 360
        if math.isclose(wd, 0.0, abs_tol=1e-9):
            kind = "ray"
        elif math.isclose(wd, 180.0, abs_tol=1e-9):
            kind = "half_plane"
        elif wd < 180:
            kind = "sector"
        else:
            raise ConeError(f"sector wider than 180 degrees is not convex: {lo}:{hi}")
        return cls(kind, math.radians(lo), math.radians(hi), include_boundary)

    @classmethod
    def from_axis(cls, axis, width):
        """Cone of angular ``width`` (radians) centred on direction ``axis``."""
        if width >= TWO_PI - 1e-12:
            return cls("full_plane")
        if width <= 0:
            return cls("ray", axis, axis)
        if math.isclose(width, math.pi):
            return cls("half_plane", axis - math.pi / 2, axis + math.pi / 2)
        return cls("sector", axis - width / 2, axis + width / 2)

    @property
    def width(self):
        if self.kind == "full_plane":
            return TWO_PI
        return _wrap(self.theta_hi - self.theta_lo)

    @property
    def axis(self):
        return _wrap(self.theta_lo + self.width / 2)

    def to_dict(self):
        return {
            "kind": self.kind,
            "theta_lo_deg": round(math.degrees(self.theta_lo), 12),
            "theta_hi_deg": round(math.degrees(self.theta_hi), 12),
            "include_boundary": self.include_boundary,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["kind"], math.radians(float(d["theta_lo_deg"])),
                       math.radians(float(d["theta_hi_deg"])), bool(d.get("include_boundary", True)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConeError(f"malformed cone: {exc}") from exc

    def label(self):
        if self.kind == "full_plane":
            return "full_plane"
        return f"{self.kind}[{math.degrees(self.theta_lo):g}:{math.degrees(self.theta_lo + self.width):g}]"


def parse_cone(text):
    """CLI shorthand ``LO:HI`` in degrees, e.g. ``0:90``."""
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise ConeError(f"cone must look like LO:HI (degrees), got {text!r}") from exc
    return Cone.from_degrees(lo, hi)


def _past_edge(c, vx, vy, closed):
    """``c >= -ANGLE_TOL |v|`` when ``closed``, else ``c > ANGLE_TOL |v|``.

    The norm is only evaluated where ``c`` is small enough for it to matter.
    """
    c = np.asarray(c)
    out = np.array(c >= 0 if closed else c > 0)
    bound = ANGLE_TOL * (np.max(np.abs(vx), initial=0.0) + np.max(np.abs(vy), initial=0.0))
    near = np.abs(c) <= bound
    if near.any():
        tol = ANGLE_TOL * np.hypot(vx[near], vy[near])
        out[near] = c[near] >= -tol if closed else c[near] > tol
    return out


def in_cone(K, vx, vy, thick=0.0):
    """Vectorised membership of vectors (vx, vy) in K; zero vectors count as inside.

    ``thick`` > 0 widens a ray to a strip of that half-width (same units as v).
    """
    vx, vy = np.broadcast_arrays(np.asarray(vx, float), np.asarray(vy, float))
    zero = (vx == 0) & (vy == 0)
    if K.kind == "full_plane":
        return np.ones(vx.shape, dtype=bool)
    lo = (math.cos(K.theta_lo), math.sin(K.theta_lo))
    if K.kind == "ray":
        cross = lo[0] * vy - lo[1] * vx
        dot = lo[0] * vx + lo[1] * vy
        strip = np.abs(cross) - max(thick, 0.0)
        on_line = _past_edge(-strip, vx, vy, True) if K.include_boundary else strip <= 0
        return (on_line & (dot > 0)) | zero
    hi_ang = K.theta_lo + K.width
    hi = (math.cos(hi_ang), math.sin(hi_ang))
    c_lo = lo[0] * vy - lo[1] * vx  # >= 0 when v is counter-clockwise of lo
    inside = _past_edge(c_lo, vx, vy, K.include_boundary)
    if K.kind == "sector":
        c_hi = vx * hi[1] - vy * hi[0]  # >= 0 when v is clockwise of hi
        inside &= _past_edge(c_hi, vx, vy, K.include_boundary)
    return inside | zero


def cone_contains(K, v):
    """True iff the nonzero vector ``v`` lies in K."""
    if v[0] == 0 and v[1] == 0:
        raise ConeError("zero vector has no direction")
    return bool(in_cone(K, v[0], v[1]))


def cone_leq(K, x, y):
    """The cone order: x <=_K y iff y - x is in K (x == y always holds)."""
    return bool(in_cone(K, y[0] - x[0], y[1] - x[1]))


def cone_negate(K):
    if K.kind == "full_plane":
        return K
    return Cone(K.kind, K.theta_lo + math.pi, K.theta_hi + math.pi, K.include_boundary)


def grid_cone_mask(K, di, dj, ray_halfwidth=0.5):
    """Membership of integer cell offsets (row di, column dj) in K.

    Rays are thickened to a digital ray: cells whose center lies within
    ``ray_halfwidth`` cells of the ray count, so oblique rays still see cells.
    """
    return in_cone(K, dj, di, thick=ray_halfwidth)


def unit(theta):
    return np.array([math.cos(theta), math.sin(theta)])


def angular_grid(a_res_deg=2.0):
    n = int(round(360.0 / a_res_deg))
    th = np.arange(n) * (TWO_PI / n)
    return th, np.stack([np.cos(th), np.sin(th)], axis=1)


def normal_cone_at(labels, label, cell, a_res_deg=2.0, stencil=3, closed_domain=True,
                   mask=None):
    """Sampled unit normals to a level component at one of its boundary cells.

    Tangent directions are the unit offsets from ``cell`` to other cells of
    the component within ``stencil`` cells; a grid direction d is normal
    when ``d . v <= sin(a_res / 2)`` for every tangent v.  With
    ``closed_domain=False`` the level set is assumed to continue past the
    domain edge: offsets whose mirror image falls outside the domain also
    contribute the mirrored tangent.

    Returns an (m, 2) array of (dx, dy) unit vectors.
    """
    ny, nx = labels.shape
    i, j = cell
    r = int(stencil)
    di, dj = np.mgrid[-r: r + 1, -r: r + 1]
    keep = (di * di + dj * dj <= r * r) & ~((di == 0) & (dj == 0))
    di, dj = di[keep], dj[keep]
    ii, jj = i + di, j + dj
    valid = (ii >= 0) & (ii < ny) & (jj >= 0) & (jj < nx)
    member = np.zeros(di.shape, dtype=bool)
    member[valid] = labels[ii[valid], jj[valid]] == label
    vx, vy = dj[member].astype(float), di[member].astype(float)
    if not closed_domain:
        if mask is None:
            mask = labels > 0
        mi, mj = i - di[member], j - dj[member]
        inside = (mi >= 0) & (mi < ny) & (mj >= 0) & (mj < nx)
        mirrored_out = ~inside
        mirrored_out[inside] = ~mask[mi[inside], mj[inside]]
        vx = np.concatenate([vx, -vx[mirrored_out]])
        vy = np.concatenate([vy, -vy[mirrored_out]])
    _, D = angular_grid(a_res_deg)
    if len(vx) == 0:
        return D
    V = np.stack([vx, vy], axis=1)
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    tol = math.sin(math.radians(a_res_deg) / 2)
    ok = (V @ D.T).max(axis=0) <= tol
    return D[ok]


def line_trace(field, start, d, step=None, max_steps=None):
    """Sample f along start + t d in both directions.

    ``start`` is a cell (i, j); ``d`` a unit (dx, dy).  Samples use bilinear
    interpolation and are kept only where all four surrounding cell centers
    are in the mask.  Each side stops at its first non-traversable sample.
    Returns (t, values) with t in physical units, sorted ascending, t=0
    included.
    """
    dom = field.domain
    h = dom.spacing
    step = h if step is None else step
    i0, j0 = start
    if max_steps is None:
        max_steps = int(math.hypot(dom.nx, dom.ny) * h / step) + 2
    k = np.arange(1, max_steps + 1)
    ts = []
    vs = []
    for sgn in (-1.0, 1.0):
        t = sgn * k * step
        u = j0 + t * d[0] / h
        w = i0 + t * d[1] / h
        vals, ok = _bilinear(field.values, dom.mask, w, u)
        bad = np.flatnonzero(~ok)
        n = bad[0] if len(bad) else len(t)
        ts.append(t[:n])
        vs.append(vals[:n])
    t = np.concatenate([ts[0][::-1], [0.0], ts[1]])
    v = np.concatenate([vs[0][::-1], [field.values[i0, j0]], vs[1]])
    return t, v


def _bilinear(values, mask, w, u):
    ny, nx = mask.shape
    inside = (w >= 0) & (w <= ny - 1) & (u >= 0) & (u <= nx - 1)
    wi = np.clip(np.floor(w).astype(int), 0, ny - 2)
    ui = np.clip(np.floor(u).astype(int), 0, nx - 2)
    fw = np.where(inside, w - wi, 0.0)
    fu = np.where(inside, u - ui, 0.0)
    ok = inside & mask[wi, ui] & mask[wi + 1, ui] & mask[wi, ui + 1] & mask[wi + 1, ui + 1]
    v00 = values[wi, ui]
    v01 = values[wi, ui + 1]
    v10 = values[wi + 1, ui]
    v11 = values[wi + 1, ui + 1]
    with np.errstate(invalid="ignore"):
        out = (v00 * (1 - fw) * (1 - fu) + v01 * (1 - fw) * fu
               + v10 * fw * (1 - fu) + v11 * fw * fu)
    return np.where(ok, out, np.nan), ok
