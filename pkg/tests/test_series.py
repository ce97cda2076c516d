import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import back_substitution_inverse, euler_naive, naive_product, overpartitions_3regular
from thetacong import _arith
from thetacong.errors import IntegralityError, PrecisionError, UsageError
from thetacong.series import (
    CycloSeries,
    LaurentSeries,
    dilate,
    invert,
    mul,
    named_series,
    pochhammer_power,
    theta_f,
    twist,
    u3,
)

S = LaurentSeries.from_coeffs


def coeffs_upto(s, n):
    return s.coefficient_list(0, n)


# -- construction and canonical form ---------------------------------------


def test_zero_series_canonical():
    z = S([0, 0, 0], 0, 5)
    assert z.is_zero() and z.valuation == 0 and z.coeffs == () and z.precision == 5


def test_leading_zeros_stripped():
    s = S([0, 0, 3, 1], -1, 5)
    assert s.valuation == 1 and s.coeffs == (3, 1, 0, 0)


def test_noncanonical_raw_constructor_rejected():
    with pytest.raises(ValueError):
        LaurentSeries(0, (0, 1), 2)


def test_coefficient_beyond_horizon_raises():
    with pytest.raises(PrecisionError):
        S([1, 1], 0, 2).coeff(2)


# -- pochhammer and theta ----------------------------------------------------


def test_pochhammer_pentagonal_against_naive_product():
    assert coeffs_upto(pochhammer_power(1, 1, 8), 8) == euler_naive(8)
    assert coeffs_upto(pochhammer_power(1, 1, 8), 8) == [1, -1, -1, 0, 0, 1, 0, 1]


def test_pochhammer_trivial_cases():
    assert coeffs_upto(pochhammer_power(1, 0, 5), 5) == [1, 0, 0, 0, 0]
    assert coeffs_upto(pochhammer_power(3, 1, 4), 4) == [1, 0, 0, -1]


@pytest.mark.parametrize("delta,r", [(1, 3), (2, -2), (5, 1), (1, -1), (3, 4)])
def test_pochhammer_powers_against_naive(delta, r):
    n = 60
    base = euler_naive(n, delta)
    if r >= 0:
        want = naive_product([dict(enumerate(base))] * r, n)
    else:
        want = back_substitution_inverse(naive_product([dict(enumerate(base))] * (-r), n), n)
    assert coeffs_upto(pochhammer_power(delta, r, n), n) == want


@pytest.mark.parametrize("args", [(0, 1, 5), (1, 1, 0), (-1, 1, 5)])
def test_pochhammer_usage_errors(args):
    with pytest.raises(UsageError):
        pochhammer_power(*args)


def test_theta_specializations():
    assert coeffs_upto(theta_f(1, 1, 10), 10) == [1, 2, 0, 0, 2, 0, 0, 0, 0, 2]
    assert coeffs_upto(theta_f(1, 3, 11), 11) == [1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1]
    assert coeffs_upto(theta_f(1, 1, 10, -1, -1), 10) == [1, -2, 0, 0, 2, 0, 0, 0, 0, -2]


def test_theta_rejects_degenerate():
    with pytest.raises(UsageError):
        theta_f(0, 0, 10)


def test_triple_product_consistency():
    n = 200
    e1, e2 = pochhammer_power(1, 1, n), pochhammer_power(2, 1, n)
    phi_neg = (e1 * e1 * e2.invert()).truncate(n)
    psi = (e2 * e2 * e1.invert()).truncate(n)
    assert phi_neg.agrees_with(theta_f(1, 1, n, -1, -1))
    assert psi.agrees_with(theta_f(1, 3, n))


# -- arithmetic ---------------------------------------------------------------


def test_mul_examples():
    assert (S([1, 1], 0, 10) * S([1, -1], 0, 10)).agrees_with(S([1, 0, -1], 0, 10))
    s = S([1, 0, 1], -2, 8) * LaurentSeries.monomial(1, 2, 12)
    assert s.valuation == 0 and coeffs_upto(s, 3) == [1, 0, 1]


def test_add_identity():
    s = S([3, 1, 4, 1, 5], 0, 5)
    assert (LaurentSeries.zero(9) + s) == s


def test_precision_rules():
    a = S([1, 2, 3], 1, 6)  # valuation 1, precision 6
    b = S([1, 1], -1, 3)  # valuation -1, precision 3
    assert (a * b).precision == min(6 - 1, 3 + 1)
    assert (a + b).precision == 3
    z = LaurentSeries.zero(4)
    assert (z * a).precision == min(4 + 1, 6 + 4)


def test_invert_examples():
    assert coeffs_upto(invert(S([1, -1], 0, 5)), 5) == [1, 1, 1, 1, 1]
    phi_neg4 = named_series("phi_neg", 4)
    assert coeffs_upto(invert(phi_neg4), 4) == back_substitution_inverse([1, -2, 0, 0], 4) == [1, 2, 4, 8]
    inv = invert(S([1, 1], 1, 8))
    assert inv.valuation == -1
    assert inv.coefficient_list(-1, 3) == [1, -1, 1, -1]
    assert inv.precision == 8 - 2


def test_invert_rejects_non_unit():
    with pytest.raises(IntegralityError):
        S([2, 1], 0, 5).invert()


def test_invert_two_sided_random():
    rng = random.Random(1)
    for _ in range(500):
        n = rng.randint(1, 40)
        v = rng.randint(-3, 3)
        c = [rng.choice((1, -1))] + [rng.randint(-50, 50) for _ in range(n - 1)]
        a = S(c, v, v + n)
        inv = a.invert()
        one_l, one_r = a * inv, inv * a
        assert one_l.agrees_with(LaurentSeries.one(one_l.precision))
        assert one_r.agrees_with(LaurentSeries.one(one_r.precision))


def test_dilate_examples():
    assert dilate(S([1, 1], 0, 2), 3).agrees_with(S([1, 0, 0, 1], 0, 4))
    s = S([1, 2, 3], 0, 3)
    assert dilate(s, 1) == s
    d = dilate(S([1], -1, 0), 3)
    assert d.valuation == -3


def test_dilate_precision_and_cap():
    s = S([1, 1, 1], 0, 3)
    assert s.dilate(5).precision == 5 * 2 + 1
    with pytest.raises(PrecisionError):
        S([1] * 100, 0, 100).dilate(3000)


def test_u3_examples():
    assert u3(S([1, 2, 0, 3, 0, 0, 4], 0, 7)).agrees_with(S([1, 3, 4], 0, 3))
    r = u3(S([1, 0, 1], -3, 0))
    assert r.valuation == -1 and r.coefficient_list(-1, 0) == [1]
    s = S([5, -1, 2, 7], 0, 4)
    assert u3(dilate(s, 3)) == s


def test_u3_precision():
    assert S([1] * 10, 0, 10).u3().precision == 4


def test_named_series_shapes():
    assert named_series("zeta", 3).valuation == 1
    assert named_series("delta", 3).valuation == -2
    assert named_series("F", 5).coeff(1) == 2
    for name in ("F", "G", "xi", "gamma"):
        s = named_series(name, 20)
        assert s.valuation == 0 and s.coeff(0) == 1
    with pytest.raises(UsageError):
        named_series("nosuch", 10)


def test_F_counts_3regular_overpartitions():
    F = named_series("F", 16)
    assert [F.coeff(n) for n in range(16)] == [overpartitions_3regular(n) for n in range(16)]


def test_gamma_is_ratio_of_xi():
    n = 120
    xi = named_series("xi", n)
    gamma = named_series("gamma", n)
    assert (gamma * xi.dilate(3, n)).agrees_with(xi)


def test_json_roundtrip_big_integers():
    s = S([10**40, -(3**100), 7], -2, 2)
    data = json.loads(json.dumps(s.to_json()))
    assert all(isinstance(c, str) for c in data["coeffs"])
    assert LaurentSeries.from_json(data) == s


# -- cyclotomic series ---------------------------------------------------------


def test_twist_examples():
    s = S([3, 1, 4], 0, 3)
    t0 = twist(s, 0)
    assert t0.re == s and t0.om.is_zero()
    t = twist(S([1], 1, 5), 1)
    assert t.coeff(1) == (0, 1)
    t3 = twist(S([1], 3, 5), 1)
    assert t3.coeff(3) == (1, 0)


def _rand_series(rng, n, v=0, lo=-9, hi=9):
    return S([rng.randint(lo, hi) for _ in range(n)], v, v + n)


def _rand_cyclo(rng, n):
    return CycloSeries(_rand_series(rng, n), _rand_series(rng, n))


def test_cyclo_ring_axioms_random():
    rng = random.Random(7)
    for _ in range(60):
        a, b, c = (_rand_cyclo(rng, 15) for _ in range(3))
        assert ((a * b) * c).first_difference(a * (b * c)) is None
        assert (a * (b + c)).first_difference(a * b + a * c) is None
        assert (a * b).first_difference(b * a) is None


def test_omega_squared():
    w = CycloSeries(LaurentSeries.zero(3), S([1], 0, 3))
    sq = w * w
    # omega^2 = -1 - omega
    assert sq.coeff(0) == (-1, -1)


def test_embedding_commutes():
    rng = random.Random(3)
    for _ in range(40):
        a, b = _rand_series(rng, 12), _rand_series(rng, 12)
        E = CycloSeries.embed
        assert (E(a) * E(b)).first_difference(E(a * b)) is None
        assert (E(a) + E(b)).first_difference(E(a + b)) is None


def test_root_of_unity_filter():
    rng = random.Random(11)
    for _ in range(20):
        f = _rand_series(rng, 90, lo=-10**6, hi=10**6)
        total = twist(f, 0) + twist(f, 1) + twist(f, 2)
        assert total.is_rational()
        filtered = total.divexact(3).to_series()
        assert filtered.agrees_with(dilate(u3(f), 3, 90))


# -- properties ----------------------------------------------------------------

small_series = st.builds(
    lambda c, v: S(c, v, v + len(c)),
    st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=40),
    st.integers(-6, 6),
)


@given(small_series, small_series, st.integers(-100, 100), st.integers(-100, 100))
def test_u3_linear(a, b, x, y):
    assert u3(a * x + b * y).agrees_with(u3(a) * x + u3(b) * y)


@given(small_series, small_series)
def test_mul_commutative_and_pure(a, b):
    before = (a.coeffs, b.coeffs)
    assert (a * b) == (b * a)
    assert a * b == a * b
    assert (a.coeffs, b.coeffs) == before


@given(
    st.lists(st.integers(-10**30, 10**30), min_size=1, max_size=120),
    st.lists(st.integers(-10**30, 10**30), min_size=1, max_size=120),
    st.one_of(st.none(), st.integers(1, 250)),
)
@settings(max_examples=60)
def test_fast_convolution_matches_schoolbook(a, b, n):
    assert _arith.convolve(a, b, n) == _arith.schoolbook(a, b, n)


def test_mul_module_function():
    a, b = S([1, 1], 0, 5), S([1, -1], 0, 5)
    assert mul(a, b) == a * b


@given(small_series)
def test_u3_undoes_dilation(f):
    assert u3(dilate(f, 3)).agrees_with(f)


@given(st.lists(st.integers(-10**6, 10**6), max_size=30), st.sampled_from([1, -1]))
def test_unit_inverse(tail, c0):
    f = S([c0] + tail, 0, len(tail) + 1)
    g = f.invert()
    assert [g.coeff(k) for k in range(f.precision)] == back_substitution_inverse(list(f.coeffs), f.precision)
    assert (f * g).agrees_with(LaurentSeries.one(f.precision))
