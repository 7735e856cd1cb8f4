"""Named example fields: the counterexample gallery.

Every generator is a pure function of ``(nx, ny, params)``; the only
random one (``random_rows``) draws from ``numpy.random.default_rng(seed)``.
"""

from __future__ import annotations

import math

import numpy as np

from .field import FieldError, GridDomain, ScalarField

GALLERY = {}


def register(name, lo, hi, continuity="continuous", **defaults):
    def deco(fn):
        GALLERY[name] = dict(fn=fn, lo=lo, hi=hi, continuity=continuity, defaults=defaults)
        return fn
    return deco


def gallery_names():
    return sorted(GALLERY)


def gallery_generate(name, nx=65, ny=None, **params):
    """Sample the named example on an ``nx`` x ``ny`` cell-centered grid."""
    if name not in GALLERY:
        raise FieldError(f"unknown gallery field {name!r}; known: {', '.join(gallery_names())}")
    entry = GALLERY[name]
    ny = nx if ny is None else ny
    if nx < 2 or ny < 2:
        raise FieldError("nx, ny must be >= 2")
    unknown = set(params) - set(entry["defaults"]) - {"lo", "hi"}
    if unknown:
        raise FieldError(f"{name}: unknown params {sorted(unknown)}")
    p = dict(entry["defaults"], **params)
    lo = p.pop("lo", entry["lo"])
    hi = p.pop("hi", entry["hi"])
    if not hi > lo:
        raise FieldError("need hi > lo")
    dom = GridDomain.square(nx, lo, hi, ny=ny)
    X, Y = dom.coords()
    values, mask = entry["fn"](X, Y, dom, **p)
    if mask is not None:
        dom = GridDomain(dom.nx, dom.ny, dom.spacing, dom.origin, mask)
    return ScalarField(dom, np.where(dom.mask, values, np.nan), entry["continuity"])


@register("plane", -1.0, 1.0, a=1.0, b=1.0)
def _plane(X, Y, dom, a, b):
    return a * X + b * Y, None


@register("cubic", -2.0, 2.0)
def _cubic(X, Y, dom):
    return X ** 3 - X, None


@register("tipped_sine", 0.0, 2 * math.pi)
def _tipped_sine(X, Y, dom):
    return np.sin(X) + X + Y, None


@register("paraboloid", -1.0, 1.0)
def _paraboloid(X, Y, dom):
    return X ** 2 + Y ** 2, None


def manfredi_profile(theta):
    """Piecewise-angular profile on [0, 2pi)."""
    t = np.mod(theta, 2 * np.pi)
    return np.select(
        [t <= np.pi / 2, t <= np.pi, t <= 3 * np.pi / 2],
        [t, np.full_like(t, np.pi / 2), 3 * np.pi / 2 - t],
        default=0.0,
    )


@register("manfredi", -1.0, 1.0, "discontinuous")
def _manfredi(X, Y, dom):
    return manfredi_profile(np.arctan2(Y, X)), None


@register("step_band", -1.0, 1.0, "discontinuous", half_length=0.3, half_width=0.12)
def _step_band(X, Y, dom, half_length, half_width):
    f = np.where(Y > 0, 1.0, -1.0)
    band = (np.abs(X) <= half_length) & (np.abs(Y) <= half_width)
    return np.where(band, 0.0, f), None


@register("random_rows", 0.0, 1.0, "discontinuous", seed=0, sorted_rows=0)
def _random_rows(X, Y, dom, seed, sorted_rows):
    rng = np.random.default_rng(int(seed))
    if sorted_rows:
        vals = np.sort(rng.random((dom.ny, dom.nx)), axis=1)
    else:
        vals = np.repeat(rng.random((dom.ny, 1)), dom.nx, axis=1)
    return vals, None


@register("oscillatory", -1.0, 1.0, amplitude=0.1, frequency=9.5)
def _oscillatory(X, Y, dom, amplitude, frequency):
    if amplitude * frequency > 1:
        raise FieldError("amplitude*frequency must be <= 1 to stay quadrant monotone")
    return X + Y + amplitude * np.sin(frequency * (X - Y)), None


@register("u_affine", -1.0, 1.0, gx=0.3, gy=1.0, notch_half_width=0.35, notch_bottom=-0.2)
def _u_affine(X, Y, dom, gx, gy, notch_half_width, notch_bottom):
    mask = ~((np.abs(X) < notch_half_width) & (Y > notch_bottom))
    return gx * X + gy * Y, mask


@register("annulus_spiral", -1.0, 1.0, r_in=0.4, r_out=0.95, gap_deg=30.0)
def _annulus_spiral(X, Y, dom, r_in, r_out, gap_deg):
    r = np.hypot(X, Y)
    half_gap = math.radians(gap_deg) / 2
    phi = np.mod(np.arctan2(Y, X) - half_gap, 2 * np.pi)
    mask = (r >= r_in) & (r <= r_out) & (phi <= 2 * np.pi - 2 * half_gap)
    return phi, mask


def polyline_distance(X, Y, pts):
    """Euclidean distance from each (X, Y) to the polyline through ``pts``."""
    P = np.stack([X, Y], axis=-1)
    best = np.full(X.shape, np.inf)
    for a, b in zip(pts[:-1], pts[1:]):
        a = np.asarray(a, float)
        ab = np.asarray(b, float) - a
        t = np.clip(((P - a) @ ab) / (ab @ ab), 0.0, 1.0)
        d = np.linalg.norm(P - (a + t[..., None] * ab), axis=-1)
        best = np.minimum(best, d)
    return best


def _valley(X, Y, pts, floor):
    # flat floor keeps the minimum level 4-connected at grid resolution
    return np.maximum(polyline_distance(X, Y, pts) - floor, 0.0)


@register("hook", -1.0, 1.0, floor=0.05)
def _hook(X, Y, dom, floor):
    pts = [(-0.85, -0.3), (0.8, -0.3), (0.8, 0.7)]
    return _valley(X, Y, pts, floor), None


def spiral_channel(X, Y, pitch, base, growth, sink, floor=0.1, ramp=0.25):
    """Smooth field whose minimum is an Archimedean spiral arm from the origin.

    ``w`` counts turns outward from the arm, ``u`` is the position across the
    channel between consecutive turns and ``A`` the unwrapped polar angle
    along the channel.  Across the channel the profile has a flat floor on
    the arm and a flat top mid-channel (both several cells thick at the
    default pitch); along it the top grows with ``growth`` per radian while
    the arm descends with ``sink`` per radian.
    """
    r = np.hypot(X, Y)
    theta = np.mod(np.arctan2(Y, X), 2 * np.pi)
    w = (r - pitch * theta / (2 * np.pi)) / pitch
    k = np.floor(w)
    u = w - k
    A = np.maximum(theta + 2 * np.pi * k, 0.0)  # cells inside the first turn start the arm
    t = np.clip((np.minimum(u, 1 - u) - floor) / ramp, 0.0, 1.0)
    return t * (base + growth * A) - sink * A


@register("hook_turn", -1.0, 1.0, pitch=0.5, base=1.5, growth=0.2)
def _hook_turn(X, Y, dom, pitch, base, growth):
    return spiral_channel(X, Y, pitch, base, growth, 0.0), None


@register("lebesgue_not_cone", -1.0, 1.0, pitch=0.5, base=1.5, growth=0.2, sink=0.02)
def _lebesgue_not_cone(X, Y, dom, pitch, base, growth, sink):
    return spiral_channel(X, Y, pitch, base, growth, sink), None


@register("random_smooth", -1.0, 1.0, seed=0, modes=3, tilt=1.0)
def _random_smooth(X, Y, dom, seed, modes, tilt):
    """Random tilt plus a few low-frequency Fourier modes; seeded."""
    rng = np.random.default_rng(int(seed))
    a, b = rng.normal(0.0, tilt, size=2)
    f = a * X + b * Y
    for _ in range(int(modes)):
        w = rng.normal(0.0, 3.0, size=2)
        f = f + rng.uniform(0.0, 0.6) * np.sin(w[0] * X + w[1] * Y + rng.uniform(0, 2 * np.pi))
    return f, None
