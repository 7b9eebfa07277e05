import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bqplane.errors import (
    FieldMismatch,
    NoImaginaryPresentation,
    NoImaginaryUnit,
    ZeroScale,
)
from bqplane.fields import Q, QuadExt, from_coeff_vector
from bqplane.geometry import (
    Point,
    all_points,
    eta,
    lambda_map,
    lm_distance,
    phi,
    point,
    psi,
    random_point,
    swap_map,
    verify_transform_identities,
    xi,
)

QI = QuadExt(Q, -1)

fractions = st.builds(Fraction, st.integers(-8, 8), st.integers(1, 6))


def qi_points():
    return st.builds(
        lambda a, b, c, d: Point(from_coeff_vector(QI, [a, b]),
                                 from_coeff_vector(QI, [c, d])),
        fractions, fractions, fractions, fractions)


class TestForms:
    def test_known_values(self, qi):
        x = point(qi, 1, 2)
        y = point(qi, 4, 6)
        assert phi(x, y) == qi(25)
        assert lm_distance(x, y) == qi(12)
        assert psi(x, y) == Q.zero

    def test_psi_sees_imaginary_parts(self, qi):
        i = from_coeff_vector(qi, [0, 1])
        x = Point(qi(1) + 2 * i, qi(0))
        y = Point(qi(5) + 3 * i, i)
        assert psi(x, y) == Q(6)

    def test_psi_needs_i_presentation(self):
        with pytest.raises(NoImaginaryPresentation):
            psi(point(Q, 0, 0), point(Q, 1, 0))

    @given(qi_points(), qi_points())
    def test_phi_symmetric_and_translation_invariant(self, x, y):
        assert phi(x, y) == phi(y, x)
        t = point(QI, 3, -2)
        shifted_x = Point(x.x1 + t.x1, x.x2 + t.x2)
        shifted_y = Point(y.x1 + t.x1, y.x2 + t.x2)
        assert phi(shifted_x, shifted_y) == phi(x, y)


class TestCoordinateChange:
    @given(qi_points(), qi_points())
    def test_xi_turns_phi_into_product_form(self, x, y):
        assert phi(x, y) == lm_distance(xi(x), xi(y))

    @given(qi_points(), qi_points())
    def test_eta_turns_product_form_into_phi(self, x, y):
        assert lm_distance(x, y) == phi(eta(x), eta(y))

    @given(qi_points())
    def test_xi_eta_mutually_inverse(self, x):
        assert eta(xi(x)) == x
        assert xi(eta(x)) == x

    def test_xi_needs_imaginary_unit(self):
        with pytest.raises(NoImaginaryUnit):
            xi(point(Q, 1, 2))

    @given(qi_points(), qi_points())
    def test_lambda_and_swap_preserve_product_form(self, x, y):
        z = QI(3) / QI(7)
        assert lm_distance(lambda_map(z, x), lambda_map(z, y)) == lm_distance(x, y)
        assert lm_distance(swap_map(x), swap_map(y)) == lm_distance(x, y)

    def test_lambda_rejects_zero_scale(self, qi):
        with pytest.raises(ZeroScale):
            lambda_map(qi.zero, point(qi, 1, 1))

    def test_swap_involutive(self, qi):
        x = point(qi, 2, 5)
        assert swap_map(swap_map(x)) == x


class TestPointEnumeration:
    def test_all_points_row_major_and_cached(self, gf13):
        pts = all_points(gf13)
        assert len(pts) == 169
        assert pts[0] == point(gf13, 0, 0)
        assert pts[1] == point(gf13, 0, 1)
        assert pts[13] == point(gf13, 1, 0)
        assert all_points(gf13) is pts

    def test_random_point_deterministic(self, qi):
        a = random_point(qi, random.Random(7))
        b = random_point(qi, random.Random(7))
        assert a == b


class TestIdentityReports:
    def test_exhaustive_scan(self, gf13):
        rep = verify_transform_identities(gf13)
        assert rep.ok and rep.mode == "exhaustive"
        by_name = {c.name: c for c in rep.checks}
        assert by_name["phi_matches_lm_after_xi"].checked == 169 * 169
        assert by_name["eta_after_xi_is_id"].checked == 169

    def test_parallel_scan_matches_serial(self, gf13):
        serial = verify_transform_identities(gf13)
        parallel = verify_transform_identities(gf13, workers=2)
        assert parallel.ok
        assert [(c.name, c.checked) for c in parallel.checks] == \
            [(c.name, c.checked) for c in serial.checks]

    def test_worker_env_override(self, gf13, monkeypatch):
        monkeypatch.setenv("BQ_WORKERS", "2")
        rep = verify_transform_identities(gf13)
        assert rep.ok and rep.checks[0].checked == 169 * 169

    def test_sampled_scan(self, qi):
        rep = verify_transform_identities(qi, "samples", samples=60, seed=2)
        assert rep.ok
        assert all(c.checked == 60 for c in rep.checks)
        again = verify_transform_identities(qi, "samples", samples=60, seed=2)
        assert [(c.name, c.checked) for c in again.checks] == \
            [(c.name, c.checked) for c in rep.checks]

    def test_exhaustive_needs_finite_field(self, qi):
        with pytest.raises(FieldMismatch):
            verify_transform_identities(qi, "exhaustive")

    def test_field_without_i_fails_early(self, qs2):
        with pytest.raises(NoImaginaryUnit):
            verify_transform_identities(qs2, "samples")
