import math

import numpy as np
import pytest

from impulsive_rd import (
    Ball,
    HyperRect,
    Masked,
    ParameterError,
    ResolutionError,
    parse_domain,
    rasterize,
    read_mask,
    symmetrize,
    unit_ball_volume,
    volume,
    write_mask,
)


def unit_square_mask(h):
    return Masked.from_predicate(lambda x, y: (x > 0) & (x < 1) & (y > 0) & (y < 1), (0, 0), (1, 1), h)


class TestVolume:
    def test_rect(self):
        assert volume(HyperRect((2, 3))) == 6

    def test_disk(self):
        assert volume(Ball(1, 2)) == pytest.approx(math.pi, rel=1e-15)

    def test_masked_square(self):
        h = 1 / 64
        assert volume(unit_square_mask(h)) == pytest.approx(1.0, abs=4 * h)

    @pytest.mark.parametrize("n,expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3)])
    def test_unit_ball(self, n, expected):
        assert unit_ball_volume(n) == pytest.approx(expected, rel=1e-14)
        assert unit_ball_volume(3) == pytest.approx(4.18879, abs=1e-5)


class TestSymmetrize:
    def test_rect_2d(self):
        assert symmetrize(HyperRect((2, 3))).radius == pytest.approx(math.sqrt(6 / math.pi), rel=1e-14)
        assert symmetrize(HyperRect((2, 3))).radius == pytest.approx(1.381977, abs=1e-6)

    def test_ball_identity(self):
        b = Ball(1.0, 2)
        assert symmetrize(b) == b

    def test_cube(self):
        assert symmetrize(HyperRect((1, 1, 1))).radius == pytest.approx(0.620350, abs=1e-6)

    @pytest.mark.parametrize("dom", [HyperRect((2, 3)), HyperRect((0.5, 1, 2)), Ball(0.7, 3), HyperRect((4,))])
    def test_volume_preserved_and_idempotent(self, dom):
        s = symmetrize(dom)
        assert volume(s) == pytest.approx(volume(dom), rel=1e-12)
        assert symmetrize(s) == s

    def test_masked_volume(self):
        m = unit_square_mask(1 / 32)
        assert volume(symmetrize(m)) == pytest.approx(volume(m), rel=1e-12)


class TestRasterize:
    def test_square_interior_count(self):
        g = rasterize(HyperRect((1, 1)), 1 / 8)
        assert g.n_interior == 49 and g.shape == (9, 9)
        assert not g.interior[0].any() and not g.interior[:, -1].any()

    def test_disk_area(self):
        h = 1 / 64
        g = rasterize(Ball(1, 2), h)
        assert g.n_interior * h**2 == pytest.approx(math.pi, abs=8 * h)

    def test_disk_area_first_order(self):
        errs = []
        for h in (1 / 16, 1 / 32, 1 / 64):
            g = rasterize(Ball(1, 2), h)
            errs.append(abs(g.n_interior * h**2 - math.pi))
        assert all(e <= 8 * h for e, h in zip(errs, (1 / 16, 1 / 32, 1 / 64)))
        assert errs[-1] < errs[0]

    def test_masked_identity(self):
        m = unit_square_mask(1 / 16)
        g = rasterize(m)
        np.testing.assert_array_equal(g.interior, m.mask)

    def test_masked_wrong_spacing(self):
        with pytest.raises(ParameterError):
            rasterize(unit_square_mask(1 / 16), 1 / 8)

    def test_too_coarse(self):
        with pytest.raises(ResolutionError):
            rasterize(HyperRect((1, 1)), 1 / 4)

    def test_round_trip_fields(self):
        g = rasterize(HyperRect((1, 2)), 1 / 16)
        vals = np.arange(g.n_interior, dtype=float)
        np.testing.assert_array_equal(g.to_interior(g.to_full(vals)), vals)
        assert g.interior_coordinates().shape == (g.n_interior, 2)


class TestValidation:
    @pytest.mark.parametrize("bad", [lambda: HyperRect((1, -1)), lambda: Ball(0), lambda: Ball(1, 0),
                                     lambda: Masked(np.zeros((4, 4)), 0.1), lambda: Masked(np.ones(4), 0.1)])
    def test_invalid(self, bad):
        with pytest.raises(ParameterError):
            bad()


class TestTextIO:
    def test_parse(self):
        assert parse_domain("rect:1,2") == HyperRect((1, 2))
        assert parse_domain("ball:0.5@3") == Ball(0.5, 3)
        with pytest.raises(ParameterError):
            parse_domain("cone:1")
        with pytest.raises(ParameterError):
            parse_domain("rect:a")

    def test_mask_round_trip(self, tmp_path):
        m = unit_square_mask(1 / 16)
        path = tmp_path / "sq.txt"
        write_mask(m, path)
        back = read_mask(path)
        np.testing.assert_array_equal(back.mask, m.mask)
        assert back.spacing == m.spacing
        assert parse_domain(f"mask:{path}").mask.sum() == m.mask.sum()

    def test_malformed_mask(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2 0.1\n1 0\n")
        with pytest.raises(ParameterError):
            read_mask(path)
