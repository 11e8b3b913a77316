import math

import numpy as np
import pytest

from kuznetsov.analysis.group import (
    IDENTITY,
    WEYL,
    BigCell,
    GroupElement,
    IwasawaCoords,
    SmallCell,
    a_matrix,
    bruhat_decompose,
    compose,
    haar_density,
    haar_integral,
    iwasawa_decompose,
    k_matrix,
    left_action,
    n_matrix,
    random_element,
)
from kuznetsov.errors import DomainError


def _same_coords(c1, c2, tol):
    dtheta = abs(c1.theta - c2.theta)
    dtheta = min(dtheta, math.pi - dtheta)
    return abs(c1.x - c2.x) < tol and abs(c1.y - c2.y) < tol and dtheta < tol


class TestGroupElement:
    def test_canonical_sign(self):
        g = GroupElement(0.0, 1.0, -1.0, 0.0)
        assert (g.a, g.b, g.c, g.d) == (0.0, -1.0, 1.0, 0.0)
        assert GroupElement(-1.0, 0.0, 0.0, -1.0) == IDENTITY

    def test_rescales_determinant(self):
        g = GroupElement(1.0 + 4e-7, 0.0, 0.0, 1.0)
        assert g.a * g.d - g.b * g.c == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("entries", [(1.0, 0.0, 0.0, 2.0), (0.0, 1.0, 1.0, 0.0)])
    def test_rejects_bad_determinant(self, entries):
        with pytest.raises(DomainError):
            GroupElement(*entries)

    def test_inverse(self):
        g = random_element(np.random.default_rng(1))
        assert (g @ g.inverse()).isclose(IDENTITY)


class TestIwasawa:
    def test_identity_and_weyl(self):
        assert iwasawa_decompose(IDENTITY) == IwasawaCoords(0.0, 1.0, 0.0)
        w = iwasawa_decompose(WEYL)
        assert _same_coords(w, IwasawaCoords(0.0, 1.0, math.pi / 2), 1e-15)

    def test_roundtrip_coordinates(self):
        coords = iwasawa_decompose(compose(IwasawaCoords(2.0, 4.0, 1.0)))
        assert _same_coords(coords, IwasawaCoords(2.0, 4.0, 1.0), 1e-13)

    def test_compose_examples(self):
        assert compose(IwasawaCoords(0.0, 1.0, 0.0)).isclose(IDENTITY)
        assert compose(IwasawaCoords(0.0, 1.0, math.pi / 2)).isclose(WEYL)
        assert compose(IwasawaCoords(1.0, 1.0, 0.0)).isclose(GroupElement(1.0, 1.0, 0.0, 1.0))

    def test_compose_is_product(self):
        g = n_matrix(0.7) @ a_matrix(2.5) @ k_matrix(2.2)
        assert compose(IwasawaCoords(0.7, 2.5, 2.2)).isclose(g)

    def test_rejects_non_positive_y(self):
        with pytest.raises(DomainError):
            IwasawaCoords(0.0, 0.0, 0.0)

    def test_theta_reduced(self):
        assert IwasawaCoords(0.0, 1.0, -0.5).theta == pytest.approx(math.pi - 0.5)

    def test_random_roundtrip(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            g = random_element(rng)
            assert compose(iwasawa_decompose(g)).distance(g) < 1e-12


class TestLeftAction:
    def test_identity(self):
        z = IwasawaCoords(0.3, 0.8, 0.4)
        assert _same_coords(left_action(IDENTITY, z), z, 1e-15)

    def test_translation(self):
        z = IwasawaCoords(0.3, 0.8, 0.4)
        assert _same_coords(left_action(n_matrix(1.25), z), IwasawaCoords(1.55, 0.8, 0.4), 1e-14)

    def test_weyl(self):
        assert _same_coords(left_action(WEYL, IwasawaCoords(0.0, 1.0, 0.0)), iwasawa_decompose(WEYL), 1e-15)

    def test_matches_decomposed_product(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            g = random_element(rng)
            z = iwasawa_decompose(random_element(rng))
            expected = iwasawa_decompose(g @ compose(z))
            assert _same_coords(left_action(g, z), expected, 1e-10)

    def test_cocycle(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            g1, g2 = random_element(rng), random_element(rng)
            z = iwasawa_decompose(random_element(rng))
            assert _same_coords(left_action(g1 @ g2, z), left_action(g1, left_action(g2, z)), 1e-10)


class TestBruhat:
    def test_examples(self):
        assert bruhat_decompose(IDENTITY) == SmallCell(0.0, 1.0)
        form = bruhat_decompose(GroupElement(1.0, 1.0, 1.0, 2.0))
        assert isinstance(form, BigCell)
        assert (form.x1, form.x2, form.u) == pytest.approx((1.0, 2.0, 1.0))
        w = bruhat_decompose(WEYL)
        assert (w.x1, w.x2, w.u) == pytest.approx((0.0, 0.0, 1.0))

    def test_tiny_lower_left_entry(self):
        g = GroupElement(2.0, 3.0, 1e-14, 0.5)
        assert isinstance(bruhat_decompose(g), SmallCell)
        assert isinstance(bruhat_decompose(GroupElement(2.0, 3.0, 1e-9, 0.5)), BigCell)

    def test_reassembly(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            g = random_element(rng)
            form = bruhat_decompose(g)
            # near the small cell the reassembly loses digits in proportion to |x1| = |a/c|
            assert form.element().distance(g) < 1e-12 * max(1.0, abs(form.x1))
        for x, u in [(0.5, 2.0), (-3.0, 0.1)]:
            g = n_matrix(x) @ a_matrix(u)
            assert bruhat_decompose(g).element().distance(g) < 1e-12


class TestHaar:
    def test_density(self):
        assert haar_density(IwasawaCoords(0.0, 1.0)) == 1.0
        assert haar_density(IwasawaCoords(0.0, 2.0)) == 0.25

    def test_left_invariance(self):
        def bump(x, y, theta):
            # exp(-2 cosh d(z, i)) times a theta profile
            return np.exp(-(x * x + y * y + 1.0) / y) * (1.0 + 0.5 * np.cos(2.0 * theta))

        g = n_matrix(0.3) @ a_matrix(1.5) @ k_matrix(0.4)
        plain = haar_integral(bump)
        moved = haar_integral(bump, g)
        assert plain == pytest.approx(math.pi**2 * math.exp(-2.0), abs=1e-8)
        assert abs(moved - plain) < 1e-8
