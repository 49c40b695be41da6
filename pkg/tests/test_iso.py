import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isocurv.curvature import CurvatureDecomposition
from isocurv.domain import Circle, annulus, disk, polygon, square
from isocurv.errors import NumericalRejection
from isocurv.measure import SignedAtomicMeasure
from isocurv.metric import Flat, HarmonicPolynomial, Potential, example1, example2, scaled, spherical_cone
from isocurv.iso import (
    alexandrov_check,
    alexandrov_regular_check,
    bol_check,
    fit_sharp_metric,
    huber_check,
    huber_regular_check,
)

PI = np.pi


def cd(g):
    return CurvatureDecomposition.from_metric(g)


def atom_metric(*pairs, h=None):
    return Potential(h, SignedAtomicMeasure.from_pairs(pairs))


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_huber_flat_disk_equality(R):
    rep = huber_check(Flat(), disk(0.2, R))
    assert rep.lhs == pytest.approx(4 * PI**2 * R**2, rel=1e-12)
    assert rep.rhs == pytest.approx(4 * PI**2 * R**2, rel=1e-9)
    assert rep.equality and rep.passed


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
def test_huber_cone_equality(alpha):
    rep = huber_check(atom_metric((0j, 4 * PI * alpha)), disk(0, 1))
    assert rep.lhs == pytest.approx(4 * PI**2, rel=1e-12)
    assert rep.rhs == pytest.approx(4 * PI**2, rel=1e-9)
    assert abs(rep.deficit) <= 1e-8 * rep.lhs


def test_huber_flat_square_strict():
    rep = huber_check(Flat(), square(1.0))
    assert rep.lhs == pytest.approx(64.0, rel=1e-12)
    assert rep.rhs == pytest.approx(16 * PI, rel=1e-9)
    assert rep.strict and not rep.equality


def test_huber_needs_simple_domain():
    with pytest.raises(ValueError):
        huber_check(Flat(), annulus(0.5, 1))


@pytest.mark.parametrize("R0", [0.1, 0.4, 0.7])
def test_huber_regular_flat_annulus(R0):
    R1 = 1.0
    rep = huber_regular_check(Flat(), annulus(R0, R1), disk(0, R1))
    assert rep.lhs == pytest.approx(4 * PI**2 * (R1 + R0) ** 2, rel=1e-12)
    assert rep.rhs == pytest.approx(4 * PI * PI * (R1**2 - R0**2), rel=1e-9)
    assert rep.must_be_strict and rep.strict and rep.passed


def test_huber_regular_deficit_grows_with_hole():
    R0 = np.linspace(0.05, 0.9, 8)
    d = [huber_regular_check(Flat(), annulus(r, 1.0), disk(0, 1.0)).deficit for r in R0]
    assert d[0] > 0 and np.all(np.diff(d) > 0)


def test_huber_regular_same_domain_consistent():
    g = atom_metric((0.2 + 0.1j, 2.0), h=HarmonicPolynomial.from_complex([0, 0.3]))
    E = disk(0, 1)
    a, b = huber_check(g, E), huber_regular_check(g, E, E)
    assert a.lhs == b.lhs and a.rhs == b.rhs and not b.must_be_strict


def test_huber_regular_atom_in_hole():
    g = atom_metric((0j, 2 * PI))
    rep = huber_regular_check(g, annulus(0.5, 1.0), disk(0, 1.0))
    L = 2 * PI * (1 + 0.5**0.5)
    M = 2 * PI * (1 - 0.5)
    assert rep.lhs == pytest.approx(L**2, rel=1e-10)
    assert rep.rhs == pytest.approx((4 * PI - 2 * PI) * M, rel=1e-9)
    assert rep.strict


def test_huber_regular_subset_required():
    with pytest.raises(ValueError):
        huber_regular_check(Flat(), disk(0.5, 1.0), disk(0, 1.0))


@pytest.mark.parametrize("a2", [0.0, -0.25, -0.5, -0.75])
@pytest.mark.parametrize("R", [0.25, 0.5, 1.0])
def test_alexandrov_example2_equality(a2, R):
    g = example2(0.0, a2)
    rep = alexandrov_check(g, cd(g), disk(0, R), 1.0)
    assert rep.equality and abs(rep.deficit) <= 1e-6 * rep.lhs
    M = 4 * PI * (1 + a2) * R ** (2 * (1 + a2)) / (1 + R ** (2 * (1 + a2)))
    assert rep.rhs == pytest.approx((4 * PI * (1 + a2) - M) * M, rel=1e-8)


@pytest.mark.parametrize("r", [0.2, 0.6, 0.95])
def test_alexandrov_round_caps(r):
    g = spherical_cone(1, 0, 2)
    rep = alexandrov_check(g, cd(g), disk(0, r), 1.0)
    M = 4 * PI * r**2 / (1 + r**2)
    assert rep.lhs == pytest.approx(16 * PI**2 * r**2 / (1 + r**2) ** 2, rel=1e-10)
    assert rep.inputs.M == pytest.approx(M, rel=1e-9)
    assert rep.equality


def test_alexandrov_strict_across_gluing():
    g = example2(-0.5, -0.25)
    rep = alexandrov_check(g, cd(g), disk(0, 2.0), 1.0)
    assert rep.strict and rep.deficit > 1e-3


def test_alexandrov_rejects_negative_K0():
    g = Flat()
    with pytest.raises(ValueError):
        alexandrov_check(g, cd(g), disk(0, 1), -1.0)


def test_alexandrov_vacuous_flag():
    g = spherical_cone(1, 0, 2)
    rep = alexandrov_check(g, cd(g), disk(0, 5.0), 2.0)
    assert rep.rhs < 0 and rep.vacuous and rep.passed


def test_alexandrov_regular_flat_annulus():
    g = Flat()
    rep = alexandrov_regular_check(g, cd(g), annulus(0.3, 1.0), 0.0)
    ref = huber_regular_check(g, annulus(0.3, 1.0), disk(0, 1.0))
    assert rep.deficit == pytest.approx(ref.deficit, rel=1e-9)
    assert rep.must_be_strict and rep.strict


def test_alexandrov_regular_includes_filled_atom():
    a2 = -0.5
    g = example2(0.0, a2)
    rep = alexandrov_regular_check(g, cd(g), annulus(0.5, 0.75), 1.0)
    assert rep.inputs.Kplus == pytest.approx(2 * PI * abs(a2), abs=1e-12)
    # radial closed forms: M(B_R) = 4 pi (1+a2) R^(2(1+a2)) / (1 + R^(2(1+a2)))
    Mb = lambda R: 4 * PI * (1 + a2) * R ** (2 * (1 + a2)) / (1 + R ** (2 * (1 + a2)))  # noqa: E731
    M = Mb(0.75) - Mb(0.5)
    L = lambda R: 4 * PI * (1 + a2) * R ** (1 + a2) / (1 + R ** (2 * (1 + a2)))  # noqa: E731
    assert rep.lhs == pytest.approx((L(0.75) + L(0.5)) ** 2, rel=1e-10)
    assert rep.rhs == pytest.approx((4 * PI - 2 * PI - M) * M, rel=1e-9)
    assert rep.strict


def test_alexandrov_regular_simple_matches():
    g = example2(-0.5, -0.25)
    c = cd(g)
    a, b = alexandrov_check(g, c, disk(0.1, 0.5), 1.0), alexandrov_regular_check(g, c, disk(0.1, 0.5), 1.0)
    assert a.deficit == b.deficit and not b.must_be_strict


def test_bol_examples():
    g = example2(0, -0.5)
    rep = bol_check(g, cd(g), disk(0, 1.0))
    assert rep.lhs == pytest.approx(PI**2, rel=1e-10)
    assert rep.rhs == pytest.approx(PI**2, rel=1e-9)
    assert rep.equality
    g = example2(0, 0)
    rep = bol_check(g, cd(g), disk(0, 1.0))
    assert rep.lhs == pytest.approx(4 * PI**2) and rep.rhs == pytest.approx(4 * PI**2) and rep.equality
    for R in (0.2, 0.5, 0.8):
        assert bol_check(g, cd(g), disk(0, R)).equality


def test_bol_rejects_nonconstant_K():
    g = example2(-0.5, -0.25)
    with pytest.raises(NumericalRejection, match="K = 1"):
        bol_check(g, cd(g), disk(0, 2.0))
    g = example1(0.5)
    with pytest.raises(NumericalRejection):
        bol_check(g, cd(g), disk(0.2, 0.5))


@settings(max_examples=8, deadline=None)
@given(st.floats(0.3, 4.0), st.floats(-0.6, -0.05), st.floats(0.2, 1.8))
def test_scaling_covariance(lam, a2, R):
    g = example2(-0.5, a2)
    gs = scaled(g, lam)
    E = disk(0, R)
    r1 = alexandrov_check(g, cd(g), E, 1.0)
    r2 = alexandrov_check(gs, cd(gs), E, 1.0 / lam**2)
    assert r2.lhs == pytest.approx(lam**2 * r1.lhs, rel=1e-9)
    assert r2.inputs.M == pytest.approx(lam**2 * r1.inputs.M, rel=1e-8)
    assert r2.deficit == pytest.approx(lam**2 * r1.deficit, rel=1e-6, abs=1e-7 * lam**2 * r1.lhs)
    assert r1.equality == r2.equality


@settings(max_examples=10, deadline=None)
@given(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6), st.floats(0.1, 6.0))
def test_rhs_decreases_with_added_atom(x, y, w):
    base = atom_metric((0.7 + 0.1j, 2.0))
    E = disk(0, 1.0)
    more = atom_metric((0.7 + 0.1j, 2.0), (complex(x, y), w))
    if abs(complex(x, y) - (0.7 + 0.1j)) < 0.05:
        return
    Kp0 = huber_check(base, E).inputs.Kplus
    Kp1 = huber_check(more, E).inputs.Kplus
    assert Kp1 == pytest.approx(Kp0 + w / 2)
    # all else fixed: same M, larger positive variation
    M = 1.7
    assert (4 * PI - 2 * Kp1) * M < (4 * PI - 2 * Kp0) * M


@pytest.mark.parametrize("i", range(20))
def test_sharp_fit_round_trip(i):
    rng = np.random.default_rng([8, i])
    K0, alpha, tau = rng.uniform(0, 2), rng.uniform(0, 0.9), rng.uniform(0.3, 2.5)
    g = spherical_cone(K0, alpha, tau)
    fit = fit_sharp_metric(g, cd(g), disk(0, 1.0), K0)
    assert fit.sharp
    assert fit.alpha == pytest.approx(alpha, rel=1e-9)
    assert fit.tau == pytest.approx(tau, rel=1e-9)


def test_sharp_fit_cone_quarter():
    g = spherical_cone(1, 0.25, 1.2)
    fit = fit_sharp_metric(g, cd(g), disk(0, 1.0), 1.0)
    assert fit.residual < 1e-9 and fit.alpha == pytest.approx(0.25) and abs(fit.mobius_a) < 1e-12


def test_sharp_fit_example2_half_disk():
    a2 = -0.5
    g = example2(0.0, a2)
    fit = fit_sharp_metric(g, cd(g), disk(0, 0.5), 1.0)
    assert fit.sharp and fit.residual <= 1e-6
    assert fit.alpha == pytest.approx(abs(a2))


def test_sharp_fit_example2_not_sharp():
    g = example2(-0.5, -0.25)
    fit = fit_sharp_metric(g, cd(g), disk(0, 2.0), 1.0)
    assert not fit.sharp and "K-mismatch" in fit.diagnostic


def test_sharp_fit_off_center_disk_flat():
    # flat metric on any disk is the K0 = 0, alpha = 0 extremal with tau = R
    g = Flat()
    fit = fit_sharp_metric(g, cd(g), disk(0.3 - 0.2j, 1.7), 0.0)
    assert fit.sharp and fit.tau == pytest.approx(1.7, rel=1e-9)


def test_sharp_fit_rejects_non_disk():
    with pytest.raises(ValueError):
        fit_sharp_metric(Flat(), cd(Flat()), square(1.0), 0.0)


def test_sharp_fit_two_atoms_not_sharp():
    g = atom_metric((0.1j, 1.0), (-0.3 + 0j, 1.0))
    fit = fit_sharp_metric(g, cd(g), disk(0, 1.0), 0.0)
    assert not fit.sharp and "multiple atoms" in fit.diagnostic


def test_polygon_alexandrov_strict():
    g = spherical_cone(1, 0.2, 1.0)
    E = polygon([(-0.5, -0.4), (0.6, -0.5), (0.5, 0.6), (-0.4, 0.5)])
    rep = alexandrov_check(g, cd(g), E, 1.0)
    assert rep.passed and rep.deficit > 0


def test_report_serializable():
    import json

    g = example2(0, -0.5)
    rep = alexandrov_check(g, cd(g), disk(0, 0.5), 1.0)
    d = rep.to_dict()
    json.dumps(d)
    assert d["inputs"]["K0"] == 1.0


def test_hole_filled_flat_disk_with_offset_hole():
    g = Flat()
    E = disk(0, 1.0, [Circle(0.3 + 0j, 0.2)])
    rep = alexandrov_regular_check(g, cd(g), E, 0.0)
    assert rep.strict
