import json
import math

import numpy as np
import pytest
from scipy import ndimage

from conemono.field import (
    FOUR,
    FieldError,
    GridDomain,
    ScalarField,
    extract_level_components,
    field_to_dict,
    load_field,
    quantize,
    sample_subdomains,
    save_field,
    save_pgm,
)
from conemono.gallery import gallery_generate, gallery_names, manfredi_profile


def _plain(values, mask=None, lo=-1.0, hi=1.0):
    ny, nx = values.shape
    dom = GridDomain.square(nx, lo, hi, ny=ny, mask=mask)
    return ScalarField(dom, values)


class TestGridDomain:
    def test_cell_centres(self):
        dom = GridDomain.square(4, 0.0, 1.0)
        X, Y = dom.coords()
        assert np.allclose(X[0], [0.125, 0.375, 0.625, 0.875])
        assert np.allclose(Y[:, 0], X[0])
        assert dom.cell_center((1, 2)) == pytest.approx((0.625, 0.375))

    @pytest.mark.parametrize("kw", [dict(nx=1, ny=4), dict(nx=4, ny=1)])
    def test_too_small(self, kw):
        with pytest.raises(FieldError):
            GridDomain(kw["nx"], kw["ny"], 1.0, (0, 0), np.ones((kw["ny"], kw["nx"]), bool))

    def test_rejects_disconnected_mask(self):
        mask = np.zeros((5, 5), bool)
        mask[0, 0] = mask[4, 4] = True
        with pytest.raises(FieldError, match="connected"):
            GridDomain(5, 5, 1.0, (0, 0), mask)

    def test_diagonal_cells_are_not_connected(self):
        mask = np.eye(3, dtype=bool)
        with pytest.raises(FieldError):
            GridDomain(3, 3, 1.0, (0, 0), mask)

    def test_rejects_empty_mask(self):
        with pytest.raises(FieldError):
            GridDomain(3, 3, 1.0, (0, 0), np.zeros((3, 3), bool))

    def test_edge_adjacent(self):
        mask = np.ones((5, 5), bool)
        mask[2, 2] = False
        dom = GridDomain(5, 5, 1.0, (0, 0), mask)
        edge = dom.edge_adjacent()
        assert edge[0].all() and edge[:, 0].all()
        assert edge[1, 2] and edge[2, 1] and edge[3, 2] and edge[2, 3]
        assert not edge[1, 1]
        assert not edge[2, 2]


class TestScalarField:
    def test_masked_out_cells_become_nan(self):
        mask = np.ones((3, 3), bool)
        mask[0, 0] = False
        f = _plain(np.ones((3, 3)), mask)
        assert math.isnan(f.values[0, 0])

    def test_requires_finite_values(self):
        v = np.ones((3, 3))
        v[1, 1] = np.inf
        with pytest.raises(FieldError):
            _plain(v)

    def test_values_are_read_only(self):
        f = _plain(np.ones((3, 3)))
        with pytest.raises(ValueError):
            f.values[0, 0] = 2.0

    def test_quantize_bins(self):
        f = _plain(np.array([[0.0, 0.5], [0.99, 1.0]]))
        assert quantize(f, 4).tolist() == [[0, 2], [3, 3]]


class TestGallery:
    def test_names(self):
        for name in ("plane", "cubic", "tipped_sine", "paraboloid", "manfredi", "hook", "hook_turn",
                     "step_band", "u_affine", "oscillatory", "annulus_spiral", "lebesgue_not_cone",
                     "random_rows", "random_smooth"):
            assert name in gallery_names()

    @pytest.mark.parametrize("name, formula", [
        ("plane", lambda X, Y: X + Y),
        ("cubic", lambda X, Y: X ** 3 - X),
        ("tipped_sine", lambda X, Y: np.sin(X) + X + Y),
        ("paraboloid", lambda X, Y: X ** 2 + Y ** 2),
    ])
    def test_closed_forms(self, name, formula):
        f = gallery_generate(name, 65)
        X, Y = f.domain.coords()
        expect = formula(X, Y)
        assert np.allclose(f.values, expect, rtol=1e-12, atol=1e-12)

    def test_cubic_range_and_y_invariance(self):
        f = gallery_generate("cubic", 65)
        X, _ = f.domain.coords()
        assert X.min() > -2 and X.max() < 2
        assert np.all(f.values == f.values[0])

    def test_manfredi_second_quadrant(self):
        f = gallery_generate("manfredi", 65)
        X, Y = f.domain.coords()
        sel = (X < 0) & (Y > 0) & f.domain.mask
        assert np.allclose(f.values[sel], math.pi / 2, rtol=1e-12)

    def test_manfredi_profile_matches_formula(self):
        f = gallery_generate("manfredi", 65)
        X, Y = f.domain.coords()
        th = np.mod(np.arctan2(Y, X), 2 * math.pi)
        m = f.domain.mask
        assert np.allclose(f.values[m], manfredi_profile(th[m]), rtol=1e-12)

    def test_annulus_mask(self):
        f = gallery_generate("annulus_spiral", 65)
        X, Y = f.domain.coords()
        r = np.hypot(X, Y)[f.domain.mask]
        assert r.min() >= 0.4 - 1e-12 and r.max() <= 0.95 + 1e-12

    def test_u_shape_has_notch(self):
        f = gallery_generate("u_affine", 65)
        X, Y = f.domain.coords()
        assert not f.domain.mask[(np.abs(X) < 0.3) & (Y > 0)].any()

    @pytest.mark.parametrize("name", ["random_rows", "random_smooth", "hook"])
    def test_deterministic(self, name):
        a = gallery_generate(name, 33)
        b = gallery_generate(name, 33)
        assert np.array_equal(a.values, b.values, equal_nan=True)

    def test_random_rows_constant_per_row(self):
        f = gallery_generate("random_rows", 33, seed=3)
        assert np.all(f.values == f.values[:, :1])

    def test_random_rows_sorted_variant(self):
        f = gallery_generate("random_rows", 33, seed=3, sorted_rows=1)
        assert np.all(np.diff(f.values, axis=1) >= 0)

    def test_unknown_name(self):
        with pytest.raises(FieldError):
            gallery_generate("nope")

    def test_unknown_param(self):
        with pytest.raises(FieldError):
            gallery_generate("plane", bogus=1.0)


class TestLevelComponents:
    def test_paraboloid_origin_is_interior_min(self):
        f = gallery_generate("paraboloid", 65)
        comps = extract_level_components(f, q=32)
        origin = next(c for c in comps if any((c.cells == [32, 32]).all(axis=1)))
        assert origin.kind == "interior-min"
        assert not origin.is_boundary_touching

    def test_paraboloid_oracle(self):
        # brute force: a component is an interior min iff it and its 4-neighbours stay off
        # the grid edge and every 4-neighbour outside it is larger
        f = gallery_generate("paraboloid", 17)
        v = f.values
        for c in extract_level_components(f, q=8):
            inside = {tuple(x) for x in c.cells.tolist()}
            nbrs = {(i + a, j + b) for i, j in inside for a, b in ((0, 1), (1, 0), (0, -1), (-1, 0))}
            nbrs = {(i, j) for i, j in nbrs if 0 <= i < 17 and 0 <= j < 17} - inside
            edge = any(i in (0, 16) or j in (0, 16) for i, j in inside | nbrs)
            vmax = max(v[x] for x in inside)
            is_min = not edge and nbrs and all(v[x] > vmax for x in nbrs)
            assert (c.kind == "interior-min") == is_min

    @pytest.mark.parametrize("row, kind", [(1, "neither"), (2, "interior-min"), (4, "interior-min")])
    def test_extremum_needs_a_collar(self, row, kind):
        # a dip whose neighbours touch the edge is not compactly inside the domain
        v = np.ones((9, 9))
        v[row, 4] = 0.0
        comps = extract_level_components(_plain(v), q=4)
        dip = next(c for c in comps if c.cells.tolist() == [[row, 4]])
        assert dip.kind == kind
        assert not dip.is_boundary_touching

    @pytest.mark.parametrize("q", [2, 16, 64])
    def test_plane_has_no_extrema(self, q):
        f = gallery_generate("plane", 33)
        assert all(c.kind == "neither" for c in extract_level_components(f, q))

    def test_cubic_has_no_extrema(self):
        f = gallery_generate("cubic", 65)
        assert all(c.kind == "neither" for c in extract_level_components(f, 32))

    def test_partition(self):
        f = gallery_generate("annulus_spiral", 33)
        comps = extract_level_components(f, 16)
        seen = np.zeros(f.domain.mask.shape, int)
        for c in comps:
            seen[c.cells[:, 0], c.cells[:, 1]] += 1
        assert np.array_equal(seen, f.domain.mask.astype(int))

    def test_components_connected(self):
        f = gallery_generate("oscillatory", 33)
        for c in extract_level_components(f, 16):
            m = np.zeros(f.domain.mask.shape, bool)
            m[c.cells[:, 0], c.cells[:, 1]] = True
            assert ndimage.label(m, structure=FOUR)[1] == 1


class TestSubdomains:
    def test_single_ball(self):
        f = gallery_generate("plane", 33)
        (s,) = sample_subdomains(f, "balls", 1, seed=0)
        cells = {tuple(c) for c in s.cells.tolist()}
        ring = {tuple(c) for c in s.inner_boundary.tolist()}
        assert ring <= cells and ring
        # boundary is relative to the domain: neighbours off the grid do not count
        omega = {tuple(c) for c in np.argwhere(f.domain.mask).tolist()}
        for i, j in cells:
            nbrs = {(i + a, j + b) for a, b in ((0, 1), (1, 0), (0, -1), (-1, 0))} & omega
            assert ((i, j) in ring) == bool(nbrs - cells)

    def test_annulus_blobs_connected(self):
        f = gallery_generate("annulus_spiral", 65)
        subs = sample_subdomains(f, "blobs", 100, seed=7)
        assert len(subs) == 100
        for s in subs:
            m = np.zeros(f.domain.mask.shape, bool)
            m[s.cells[:, 0], s.cells[:, 1]] = True
            assert ndimage.label(m, structure=FOUR)[1] == 1
            assert f.domain.mask[m].all()

    def test_rects_relative_compactness(self):
        f = gallery_generate("plane", 65)
        subs = sample_subdomains(f, "rects", 10, seed=1)
        edge = f.domain.edge_adjacent()
        for s in subs:
            touches = bool(edge[s.cells[:, 0], s.cells[:, 1]].any())
            assert s.relatively_compact == (not touches)
        assert any(not s.relatively_compact for s in subs)

    def test_deterministic(self):
        f = gallery_generate("plane", 33)
        a = sample_subdomains(f, "blobs", 5, seed=4)
        b = sample_subdomains(f, "blobs", 5, seed=4)
        assert all(np.array_equal(x.cells, y.cells) for x, y in zip(a, b))

    def test_unknown_strategy(self):
        with pytest.raises(FieldError):
            sample_subdomains(gallery_generate("plane", 9), "stars")


class TestFiles:
    def test_round_trip(self, tmp_path):
        f = gallery_generate("u_affine", 33)
        p = tmp_path / "f.json"
        save_field(f, p)
        g = load_field(p)
        assert np.array_equal(f.values, g.values, equal_nan=True)
        assert np.array_equal(f.domain.mask, g.domain.mask)
        assert g.domain.spacing == f.domain.spacing and g.domain.origin == f.domain.origin

    def test_value_at_masked_out_cell(self, tmp_path):
        d = field_to_dict(gallery_generate("u_affine", 9))
        k = d["mask"].index(0)
        d["values"][k] = 1.0
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(d))
        with pytest.raises(FieldError, match="masked-out"):
            load_field(p)

    def test_disconnected_mask(self, tmp_path):
        d = field_to_dict(gallery_generate("plane", 5))
        d["mask"] = [1, 0, 0, 0, 1] + [0] * 20
        d["values"] = [v if m else None for v, m in zip(d["values"], d["mask"])]
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(d))
        with pytest.raises(FieldError, match="connected"):
            load_field(p)

    def test_not_json(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{")
        with pytest.raises(FieldError):
            load_field(p)

    def test_pgm(self, tmp_path):
        f = gallery_generate("plane", 8)
        p = tmp_path / "f.pgm"
        save_pgm(f, p)
        data = p.read_bytes()
        header = b"P5\n8 8\n255\n"
        assert data.startswith(header)
        img = np.frombuffer(data[len(header):], np.uint8).reshape(8, 8)
        assert img[-1, 0] == 0 and img[0, -1] == 255
