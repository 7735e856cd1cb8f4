"""Total variation of sampled fields and the cone-based upper bound.

Two estimators of the same integral: ``tv_gradient`` sums the finite
difference gradient magnitude over cells, ``tv_coarea`` integrates level
set perimeter over levels.  ``tv_upper_bound`` is the bound available for
bounded K-monotone fields, ``pi (R^2 + C^2) sqrt(1 + L^2)`` in the plane.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from skimage import measure

from .field import FieldError

PERIMETERS = ("contour", "manhattan")


@dataclass(frozen=True)
class TvReport:
    tv_gradient: float
    tv_coarea: float
    q: int
    perimeter: str
    R: float | None = None
    C: float | None = None
    L: float | None = None
    xhat_norm: float | None = None
    delta: float | None = None
    n: int = 2
    tv_bound: float | None = None

    @property
    def within_bound(self):
        return None if self.tv_bound is None else self.tv_gradient <= self.tv_bound

    def to_dict(self):
        d = asdict(self)
        d["within_bound"] = self.within_bound
        return d


def _one_sided(values, mask, axis, h):
    """Forward difference, backward where the forward cell is missing, 0 if isolated."""
    v = np.where(mask, values, 0.0)
    fwd = np.zeros_like(v)
    bwd = np.zeros_like(v)
    has_f = np.zeros_like(mask)
    has_b = np.zeros_like(mask)
    lo = [slice(None)] * 2
    hi = [slice(None)] * 2
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    lo, hi = tuple(lo), tuple(hi)
    pair = mask[lo] & mask[hi]
    d = (v[hi] - v[lo]) / h
    fwd[lo] = np.where(pair, d, 0.0)
    has_f[lo] = pair
    bwd[hi] = np.where(pair, d, 0.0)
    has_b[hi] = pair
    return np.where(has_f, fwd, np.where(has_b, bwd, 0.0))


def gradient_magnitude(field):
    m = field.domain.mask
    h = field.domain.spacing
    gx = _one_sided(field.values, m, 1, h)
    gy = _one_sided(field.values, m, 0, h)
    return np.where(m, np.hypot(gx, gy), 0.0)


def tv_gradient(field):
    """Sum over masked-in cells of |grad f| times the cell area."""
    h = field.domain.spacing
    return float(gradient_magnitude(field).sum() * h * h)


def _manhattan_perimeter(above, mask, h):
    n = 0
    for a, b, ma, mb in ((above[:, 1:], above[:, :-1], mask[:, 1:], mask[:, :-1]),
                         (above[1:], above[:-1], mask[1:], mask[:-1])):
        n += int(((a != b) & ma & mb).sum())
    return n * h


def _contour_perimeter(values, mask, level, h):
    length = 0.0
    for c in measure.find_contours(values, level, mask=mask):
        length += float(np.hypot(*np.diff(c, axis=0).T).sum())
    return length * h


def tv_coarea(field, q=256, perimeter="contour"):
    """Integral over levels t of the perimeter of {f >= t} inside the domain.

    Levels sit at bin midpoints ``min + (k + 1/2) dt`` with ``dt = range / q``.
    ``perimeter="contour"`` measures the marching-squares iso-line length;
    ``"manhattan"`` counts cell edges crossed by the level set, which
    overstates oblique boundaries by up to sqrt(2).
    """
    if q < 2:
        raise FieldError("q must be >= 2")
    if perimeter not in PERIMETERS:
        raise FieldError(f"perimeter must be one of {PERIMETERS}")
    span = field.value_range
    if span == 0:
        return 0.0
    m = field.domain.mask
    h = field.domain.spacing
    v = np.where(m, field.values, field.vmin)
    dt = span / q
    total = 0.0
    for k in range(q):
        t = field.vmin + (k + 0.5) * dt
        if perimeter == "contour":
            total += _contour_perimeter(v, m, t, h)
        else:
            total += _manhattan_perimeter(v >= t, m, h)
    return total * dt


def tipped_lipschitz_bound(xhat_norm, delta):
    """Lipschitz constant after tipping: sqrt(|xhat|^2 + delta^2) / delta."""
    if not delta > 0:
        raise FieldError("delta must be positive")
    if delta > xhat_norm:
        raise FieldError("delta may not exceed |xhat|: the ball would contain the apex")
    return math.hypot(xhat_norm, delta) / delta


def cone_inradius(K):
    """(|xhat|, delta) for the graph-space cone (-K) x [0, inf) of a sector K.

    xhat is a unit vector in the plane through the sector axis and the
    vertical, tilted so that the largest ball around it stays inside; for a
    sector of half-angle b that ball has radius sin b / sqrt(1 + sin^2 b).
    """
    if K.kind not in ("sector", "half_plane"):
        raise FieldError(f"the tipped Lipschitz bound needs a cone with interior, got {K.kind}")
    s = math.sin(K.width / 2)
    return 1.0, s / math.sqrt(1 + s * s)


def tv_upper_bound(R, C, L):
    """pi (R^2 + C^2) sqrt(1 + L^2)."""
    if R < 0 or C < 0 or L < 0:
        raise FieldError("R, C and L must be >= 0")
    return math.pi * (R * R + C * C) * math.sqrt(1 + L * L)


def field_extent(field):
    """(R, C): radius of a centered ball covering every cell, and max |f|."""
    X, Y = field.domain.coords()
    m = field.domain.mask
    h = field.domain.spacing
    R = float(np.hypot(X[m], Y[m]).max() + h * math.sqrt(2) / 2)
    C = float(np.abs(field.values[m]).max())
    return R, C


def tv_report(field, K=None, q=256, perimeter="contour"):
    """Both estimators, plus the upper bound when a cone with interior is given."""
    g = tv_gradient(field)
    c = tv_coarea(field, q, perimeter)
    if K is None:
        return TvReport(g, c, q, perimeter)
    R, C = field_extent(field)
    xn, delta = cone_inradius(K)
    L = tipped_lipschitz_bound(xn, delta)
    return TvReport(g, c, q, perimeter, R, C, L, xn, delta, 2, tv_upper_bound(R, C, L))
