"""K-monotone fields built as envelopes of translated graph-space cones.

Each anchor ``(x_i, z_i)`` contributes the downward cone
``(x_i, z_i) + (-K) x [0, inf)``; the union's lower boundary is

    f(x) = min { z_i : x <=_K x_i }

which is K monotone by transitivity of the cone order.  Points no anchor
dominates get ``+inf`` and drop out of the synthesized domain.  The
``mode="sup"`` variant uses the dual upper cones, ``max { z_i : x_i <=_K x }``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .field import FOUR, FieldError, GridDomain, ScalarField
from .geometry import Cone, ConeError, in_cone

MODES = ("inf", "sup")


@dataclass(frozen=True, eq=False)
class ConePointCloud:
    points: np.ndarray  # (n, 3): x, y, z
    K: Cone

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) == 0:
            raise FieldError("a point cloud needs at least one (x, y, z) row")
        if not np.isfinite(pts).all():
            raise FieldError("point cloud entries must be finite")
        if self.K.kind == "full_plane":
            raise ConeError("full-plane cone orders every pair, so the envelope would be constant")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def to_dict(self):
        return {"cone": self.K.to_dict(), "points": self.points.tolist()}

    @classmethod
    def from_dict(cls, obj):
        try:
            return cls(np.asarray(obj["points"], dtype=float), Cone.from_dict(obj["cone"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FieldError):
                raise
            raise FieldError(f"malformed point cloud: {exc}") from exc


def load_cloud(path):
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FieldError(f"{path}: not JSON ({exc})") from exc
    return ConePointCloud.from_dict(obj)


def save_cloud(cloud, path):
    Path(path).write_text(json.dumps(cloud.to_dict()), encoding="utf-8")


def _envelope(cloud, qx, qy, mode):
    """Envelope at query coordinate arrays (flattened), chunked over queries."""
    if mode not in MODES:
        raise FieldError(f"mode must be one of {MODES}")
    px, py, pz = cloud.points.T
    out = np.empty(qx.shape)
    step = max(1, (1 << 16) // len(pz))  # blocks small enough to stay in cache
    for s in range(0, len(qx), step):
        ax = qx[s: s + step, None]
        ay = qy[s: s + step, None]
        if mode == "inf":
            dom = in_cone(cloud.K, px[None, :] - ax, py[None, :] - ay)
            out[s: s + step] = np.where(dom, pz[None, :], np.inf).min(axis=1)
        else:
            dom = in_cone(cloud.K, ax - px[None, :], ay - py[None, :])
            out[s: s + step] = np.where(dom, pz[None, :], -np.inf).max(axis=1)
    return out


def envelope_value(cloud, x, mode="inf"):
    """min z_i over anchors with x <=_K x_i (``+inf`` if none); ``mode="sup"`` is the dual."""
    v = _envelope(cloud, np.array([float(x[0])]), np.array([float(x[1])]), mode)
    return float(v[0])


def synth_field(cloud, grid, mode="inf"):
    """Sample the envelope on ``grid``; undefined cells are masked out.

    The domain must stay 4-connected, so when the defined cells split into
    several pieces the largest one is kept (ties go to the piece whose
    first cell comes first in row-major order).
    """
    X, Y = grid.coords()
    vals = _envelope(cloud, X.ravel(), Y.ravel(), mode).reshape(X.shape)
    defined = np.isfinite(vals) & grid.mask
    if not defined.any():
        raise FieldError("no grid cell is dominated by an anchor; the envelope is undefined everywhere")
    lab, n = ndimage.label(defined, structure=FOUR)
    if n > 1:
        sizes = np.bincount(lab.ravel())[1:]
        defined = lab == int(np.argmax(sizes)) + 1
    dom = GridDomain(grid.nx, grid.ny, grid.spacing, grid.origin, defined)
    return ScalarField(dom, np.where(defined, vals, np.nan), "discontinuous")


def field_anchors(field):
    """(x, y, value) for every defined cell: the anchor set of a field."""
    X, Y = field.domain.coords()
    m = field.domain.mask
    return np.stack([X[m], Y[m], field.values[m]], axis=1)


def random_cloud(n, K, seed=0, lo=-1.0, hi=1.0, zscale=1.0):
    """Seeded uniform anchors in ``[lo, hi]^2`` with z in ``[0, zscale)``."""
    rng = np.random.default_rng(seed)
    xy = rng.uniform(lo, hi, size=(n, 2))
    z = rng.random(n) * zscale
    return ConePointCloud(np.column_stack([xy, z]), K)


def random_sector(seed=0, min_width_deg=20.0, max_width_deg=180.0):
    """Seeded sector or half-plane cone with a random axis."""
    rng = np.random.default_rng(seed)
    width = rng.uniform(min_width_deg, max_width_deg)
    if width >= 179.0:
        width = 180.0
    axis = rng.uniform(0.0, 360.0)
    return Cone.from_axis(math.radians(axis), math.radians(width))
