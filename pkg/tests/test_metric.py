import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isocurv.curvature import recover_density
from isocurv.errors import CuspError, NotRadialError, SingularPointError
from isocurv.measure import SignedAtomicMeasure
from isocurv.metric import (
    Composite,
    Flat,
    HarmonicPolynomial,
    Potential,
    decompose,
    eval_conformal_factor,
    example1,
    example2,
    example2_chart1,
    example3_chart1,
    example3_chart2,
    glued_radial,
    pullback_inversion,
    scaled,
    spherical_cone,
)

PI = np.pi
RNG = np.random.default_rng(3)


def sample(n, rmin, rmax, rng=RNG):
    r = rng.uniform(rmin, rmax, n)
    return r * np.exp(1j * rng.uniform(0, 2 * PI, n))


def test_cone_round_sphere_at_origin():
    assert eval_conformal_factor(spherical_cone(1, 0, 2), 0j) == pytest.approx(4.0)


def test_cone_round_sphere_closed_form():
    z = sample(50, 0.0, 3.0)
    assert np.allclose(spherical_cone(1, 0, 2).factor(z), 4 / (1 + np.abs(z) ** 2) ** 2, rtol=1e-14)


def test_cone_flat_disk():
    z = sample(20, 0.0, 5.0)
    assert np.allclose(spherical_cone(0, 0, 1).factor(z), 1.0)


def test_cone_negative_order_value():
    assert eval_conformal_factor(spherical_cone(1, -0.5, 3.0), 1 + 0j) == pytest.approx(9 / 4)


@pytest.mark.parametrize("a2", [0.0, -0.25, -0.5, -0.75])
def test_example2_continuity_on_unit_circle(a2):
    g = example2(-0.3, a2)
    inner, outer = g._rho[0](1.0), g._rho[1](1.0)
    assert np.exp(inner) == pytest.approx((1 + a2) ** 2, rel=1e-14)
    assert np.exp(outer) == pytest.approx((1 + a2) ** 2, rel=1e-14)


def test_flat_factor():
    assert eval_conformal_factor(Flat(), 0.3 - 2j) == 1.0


def test_cone_parameter_errors():
    with pytest.raises(ValueError):
        spherical_cone(1, 1.0, 1.0)
    with pytest.raises(ValueError):
        spherical_cone(1, 0.0, 0.0)


def test_evaluation_at_atom_is_singular():
    with pytest.raises(SingularPointError):
        spherical_cone(1, 0.25, 1.0).factor(0j)
    g = Potential(atoms=SignedAtomicMeasure.from_pairs([(0.5 + 0j, PI)]))
    with pytest.raises(SingularPointError):
        g.factor(0.5 + 0j)


@pytest.mark.parametrize("a2", [-0.25, -0.5])
def test_example2_decomposition(a2):
    a1 = -0.1
    d = decompose(example2(a1, a2))
    assert len(d.f_atoms) == 1 and d.f_atoms.weight_at(0j) == pytest.approx(4 * PI * abs(a2))
    assert d.k_s().weight_at(0j) == pytest.approx(2 * PI * abs(a2))
    assert d.K(0.5 + 0j) == pytest.approx(1.0)
    assert d.K(2.0 + 0j) == pytest.approx((1 + a1) ** 2 / (1 + a2) ** 2)
    z = sample(30, 0.05, 0.95)
    assert np.allclose(d.f(z), 2 * a2 * np.log(np.abs(z)), rtol=1e-13, atol=1e-14)


@pytest.mark.parametrize("a", [0.5, -0.5])
def test_example1_decomposition(a):
    g = example1(a)
    d = decompose(g)
    assert len(d.f_atoms) == 0
    z = sample(30, 0.01, 0.99)
    assert np.allclose(d.u(z), g.log_factor(z), rtol=1e-14)
    r = np.abs(z)
    assert np.allclose(d.K(z), -(a / 2) * r**-2 * np.log(np.e / r) ** (-(2 - a)), rtol=1e-13)


def test_example1_parameter_range():
    for a in (0.0, 1.0, 2.0):
        with pytest.raises(ValueError):
            example1(a)


def test_flat_decomposition():
    d = decompose(Flat())
    z = sample(10, 0, 2)
    assert len(d.f_atoms) == 0 and np.all(d.u(z) == 0) and np.all(d.K(z) == 0)


def test_decompose_rejects_cusp():
    with pytest.raises(CuspError):
        decompose(example3_chart1())


def test_pullback_flat_has_point_at_infinity():
    g1 = pullback_inversion(Flat())
    w = sample(20, 0.1, 3)
    assert np.allclose(g1.log_factor(w), -4 * np.log(np.abs(w)), atol=1e-13)
    assert g1.atoms.weight_at(0j) == pytest.approx(8 * PI)


def test_pullback_example3_matches_second_chart():
    g1 = pullback_inversion(example3_chart2())
    ref = example3_chart1()
    w = np.concatenate([sample(40, 0.05, 0.98), sample(40, 1.02, 5.0)])
    assert np.allclose(g1.log_factor(w), ref.log_factor(w), rtol=1e-12, atol=1e-12)
    assert g1.atoms.weight_at(0j) == pytest.approx(9 * PI)


@pytest.mark.parametrize("a1,a2", [(0.0, 0.0), (-0.5, -0.25), (-0.75, -0.5)])
def test_pullback_example2_matches_chart1(a1, a2):
    g1 = pullback_inversion(example2(a1, a2))
    ref = example2_chart1(a1, a2)
    w = np.concatenate([sample(40, 0.05, 0.98), sample(40, 1.02, 5.0)])
    assert np.allclose(g1.log_factor(w), ref.log_factor(w), rtol=1e-12, atol=1e-12)
    assert np.allclose(g1.curvature(w), ref.curvature(w))
    # roles of the two cone orders swap
    assert g1.atoms.weight_at(0j) == pytest.approx(-4 * PI * a1, abs=1e-12)
    d = decompose(ref)
    assert np.allclose(d.rho(w), ref.log_factor(w), rtol=1e-12, atol=1e-12)


def test_pullback_rejects_potential():
    with pytest.raises(NotRadialError):
        pullback_inversion(Potential())


def test_harmonic_polynomial_checked():
    HarmonicPolynomial(np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]]))  # x^2 - y^2
    with pytest.raises(ValueError):
        HarmonicPolynomial(np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]]))


def test_harmonic_from_complex():
    h = HarmonicPolynomial.from_complex([1.0, 2 - 1j, 0.5j])
    z = sample(20, 0, 2)
    assert np.allclose(h(z), (1.0 + (2 - 1j) * z + 0.5j * z**2).real, rtol=1e-13)


def _metrics():
    atoms = SignedAtomicMeasure.from_pairs([(0.3 + 0.2j, 2.0), (-0.4 + 0j, -1.5)])
    return [
        example1(0.5),
        example1(-0.5),
        example2(-0.5, -0.25),
        example3_chart2(),
        spherical_cone(0.7, 0.3, 1.4),
        Potential(HarmonicPolynomial.from_complex([0.1, 0.3j]), atoms),
        glued_radial(0.2, 0.9, [0.5, 1.1], [1.0, 0.3, 2.0]),
        Composite(glued_radial(0.1, 1.0, [0.6], [1.0, 0.5]), Potential(atoms=atoms)),
    ]


@pytest.mark.parametrize("g", _metrics(), ids=lambda g: g.kind)
def test_recombination(g):
    d = decompose(g)
    rmax = 0.98 if getattr(g, "r_max", np.inf) <= 1 else 1.8
    z = sample(100, 0.02, rmax, np.random.default_rng(1))
    for p in g.atoms.points:
        z = z[np.abs(z - p) > 1e-3]
    lhs = np.exp(np.asarray(d.f(z)) + np.asarray(d.u(z)))
    assert np.max(np.abs(lhs - g.factor(z)) / g.factor(z)) <= 1e-8


coef = st.floats(-2, 2, allow_nan=False)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(coef, coef), min_size=1, max_size=4))
def test_gauge_invariance(cs):
    h = HarmonicPolynomial.from_complex([complex(a, b) for a, b in cs])
    g = example2(-0.5, -0.25)
    d0 = decompose(g)
    d1 = decompose(g, gauge=h)
    z = sample(40, 0.05, 1.8, np.random.default_rng(2))
    assert np.allclose(d0.rho(z), d1.rho(z), rtol=1e-10, atol=1e-10)
    assert np.allclose(d0.K(z), d1.K(z))
    assert d0.f_atoms == d1.f_atoms


def test_cone_equals_example2_inside_unit_disk():
    z = sample(200, 0.0, 0.999)
    assert np.allclose(spherical_cone(1, 0, 2).factor(z), example2(0, 0).factor(z), rtol=1e-12, atol=0)


@settings(max_examples=20, deadline=None)
@given(
    st.floats(-0.5, 0.9), st.floats(0.5, 1.5),
    st.lists(st.floats(0.2, 1.6), min_size=0, max_size=3, unique=True),
    st.lists(st.floats(0.0, 2.0), min_size=4, max_size=4),
)
def test_glued_radial_is_c1_with_piecewise_constant_K(alpha, tau0, radii, ks):
    radii = sorted(radii)
    if any(b - a < 0.05 for a, b in zip(radii, radii[1:])):
        return
    ks = ks[: len(radii) + 1]
    g = glued_radial(alpha, tau0, radii, ks)
    for i, R in enumerate(radii):
        lo, hi = g._rho[i], g._rho[i + 1]
        assert hi(R) == pytest.approx(lo(R), rel=1e-10, abs=1e-10)
        h = 1e-6
        d_lo = (lo(R) - lo(R - h)) / h
        d_hi = (hi(R + h) - hi(R)) / h
        assert d_hi == pytest.approx(d_lo, abs=1e-4)
    edges = [0.0] + radii + [2.5]
    for i, k in enumerate(ks):
        r = 0.5 * (edges[i] + edges[i + 1])
        if min(abs(r - b) for b in radii + [0.0]) < 0.05:
            continue
        assert recover_density(g, complex(r, 0.0), 1e-4) == pytest.approx(k, abs=2e-3 * max(1, k))


def test_composite_curvature_recovered():
    atoms = SignedAtomicMeasure.from_pairs([(0.3 + 0.2j, 2.0)])
    g = Composite(glued_radial(0.1, 1.0, [0.6], [1.0, 0.5]), Potential(atoms=atoms))
    for z in (0.2 - 0.3j, -0.9 + 0.1j, 0.1 + 0.8j):
        assert recover_density(g, z, 1e-4) == pytest.approx(float(g.curvature(z)), rel=1e-4, abs=1e-6)


def test_scaled_metric():
    g = example2(-0.5, -0.25)
    gs = scaled(g, 3.0)
    z = sample(20, 0.1, 1.8)
    assert np.allclose(gs.factor(z), 9 * g.factor(z), rtol=1e-13)
    assert np.allclose(gs.curvature(z), g.curvature(z) / 9)
