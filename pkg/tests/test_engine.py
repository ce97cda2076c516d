import random

import pytest

from oracles import overpartitions_3regular, pod3_enumerated
from thetacong import engine, fastu
from thetacong.engine import (
    HatSequence,
    build_hats,
    build_phi,
    compare_sequences,
    hat_bound_check,
    iterate_u,
    pod3,
    pod_cross_check,
    probe_open_problem,
    scan_congruence,
    scan_internal,
    u_gamma_poly,
    u_poly,
    verify_phi_series,
)
from thetacong.errors import HorizonError, PreconditionError, UsageError
from thetacong.modeq import build_table
from thetacong.polyring import IntPoly
from thetacong.series import named_series

PHI2 = (1, -9, 36, -81, 135, -162, 81)


@pytest.fixture(scope="module")
def xi60():
    return build_table("xi", 60)


@pytest.fixture(scope="module")
def zeta60():
    return build_table("zeta", 60)


@pytest.fixture(scope="module")
def phi7(xi60):
    return build_phi("phi", 7, xi60)


def test_u_poly_examples(xi60):
    assert u_poly(IntPoly([1, -3, 3]), xi60).coeffs == PHI2
    assert u_poly(IntPoly([1]), xi60) == IntPoly([1])
    assert u_poly(IntPoly([0, 1]), xi60) == xi60.row(1)


def test_u_poly_table_too_short(xi60):
    short = build_table("xi", 4)
    with pytest.raises(PreconditionError):
        u_poly(IntPoly([0] * 5 + [1]), short)
    with pytest.raises(PreconditionError):
        u_gamma_poly(IntPoly([0] * 4 + [1]), short)


def test_u_gamma_poly_examples(xi60):
    phi3 = u_gamma_poly(IntPoly(PHI2), xi60)
    assert phi3[0] == 55 and phi3.leading() == 129140163 == 3**17 and phi3.degree == 20
    assert u_gamma_poly(IntPoly([1]), xi60) == IntPoly([1, -3, 3])


def test_u_gamma_degree_law(xi60):
    rng = random.Random(2)
    for d in range(1, 15):
        p = IntPoly([rng.randint(-9, 9) for _ in range(d)] + [1])
        assert u_gamma_poly(p, xi60).degree == 3 * d + 2


def test_routes_agree(xi60):
    rng = random.Random(4)
    A = xi60.row(1)
    for d in range(0, 45):
        p = IntPoly([rng.randint(-10**12, 10**12) for _ in range(d + 1)])
        want = u_poly(p, xi60)
        assert engine.u_poly_stream(p, xi60) == want
        assert fastu.u_closed(p, A) == want
        if d + 1 <= xi60.max_i:
            g = u_gamma_poly(p, xi60)
            assert engine.u_gamma_poly_stream(p, xi60) == g
            assert fastu.u_gamma_closed(p, A) == g


def test_build_phi_examples(phi7):
    assert phi7[1].coeffs == (1, -3, 3)
    assert phi7[2].coeffs == PHI2
    assert phi7[3][0] == 55
    assert phi7[3].leading() == 129140163


def test_degree_law(phi7):
    degs = [phi7[M].degree for M in range(1, 8)]
    assert degs[:3] == [2, 6, 20]
    for M in range(2, 8):
        prev = phi7[M - 1].degree
        assert phi7[M].degree == (3 * prev if M % 2 == 0 else 3 * prev + 2)


def test_methods_agree(xi60, phi7):
    for method in ("stream", "closed"):
        assert compare_sequences(build_phi("phi", 7, xi60, method), phi7) is None


def test_build_phi_usage(xi60):
    with pytest.raises(UsageError):
        build_phi("phi", 0, xi60)
    with pytest.raises(UsageError):
        build_phi("psi", 3, xi60)


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_verify_phi_series_ph(phi7, M):
    assert verify_phi_series(phi7, M).passed


@pytest.mark.parametrize("M", [1, 2, 3])
def test_verify_phi_series_ps(zeta60, M):
    seq = build_phi("psi", 3, zeta60)
    assert verify_phi_series(seq, M, 700 if M == 3 else None).passed


def test_phi_series_at_q0(phi7):
    xi = named_series("xi", 5)
    F = named_series("F", 5)
    assert (phi7[1].eval_series(xi) * F.dilate(3, 5)).coeff(0) == 1 == F.coeff(0)


def test_phi1_reading():
    readings = engine.phi1_readings(120)
    assert readings == {"3n": True, "3n+2": False}


def test_iterate_u_ps_offsets():
    G = named_series("G", 3**5 * 30 + 400)
    for M, off in ((1, 2), (3, 20), (5, 182)):
        it = iterate_u("psi", M, 30)
        assert [it.coeff(n) for n in range(30)] == [G.coeff(3**M * n + off) for n in range(30)]


def test_hats_examples(phi7, xi60):
    hats = build_hats(phi7, 3, xi60)
    C1 = hats.hats[1]
    assert C1[0] == 54 and C1[1] == -2160 and C1[2] == 34506 == 3**5 * 142
    report = hat_bound_check(hats)
    assert report.passed


def test_hat_negative_control(phi7, xi60):
    hats = build_hats(phi7, 3, xi60)
    bad = dict(hats.hats)
    c = list(bad[2].coeffs)
    c[0] += 3**3
    bad[2] = IntPoly(c)
    report = hat_bound_check(HatSequence("phi", bad, hats.utilde))
    # C_2(0) + 27 breaks nu >= 4 and the anchor
    kinds = {(f[0], f[1]) for f in report.failures}
    assert (2, "C") in kinds and (2, "anchor") in kinds
    assert report.status == "fail"


def test_psi_hat_constant_terms_match_probe(zeta60):
    seq = build_phi("psi", 7, zeta60)
    hats = build_hats(seq, 3, zeta60)
    report = hat_bound_check(hats)
    assert report.passed
    G = named_series("G", 1641)
    for m in (1, 2, 3):
        diff = G.coeff(engine.ps_offset(2 * m + 2)) - G.coeff(engine.ps_offset(2 * m))
        assert report.notes[f"constant_term_{m}"] == hats.hats[m][0] == diff


@pytest.mark.parametrize("family", ["ph3", "ps3"])
def test_scan_m1(family):
    scan = scan_congruence(family, 1, 100)
    assert scan.passed and scan.modulus == 27
    assert scan.max_uniform_extra_power == 0 and not scan.holds_at_next_power


def test_scan_ps_progressions():
    scan = scan_congruence("ps3", 1, 10)
    assert scan.progressions == ("27n+20", "3n+2")


def test_scan_usage_and_horizon():
    with pytest.raises(UsageError):
        scan_congruence("ph3", 0, 10)
    with pytest.raises(UsageError):
        scan_congruence("pod", 1, 10)
    with pytest.raises(HorizonError):
        scan_congruence("ph3", 1, 100, series=named_series("F", 500))


def test_scan_overstrong_modulus_fails_with_witness():
    scan = scan_congruence("ph3", 1, 50, modulus_extra=5)
    cert = scan.certificate()
    assert cert.status == "fail"
    assert cert.witness["n"] == scan.violations[0]


def test_direct_ph3_values_against_enumeration():
    F = named_series("F", 13)
    assert [F.coeff(n) for n in range(13)] == [overpartitions_3regular(n) for n in range(13)]


def test_quoted_congruences_both_readings():
    assert scan_internal("ps3", 27, 20, 3, 2, 3, 100) == []
    assert scan_internal("ph3", 27, 20, 3, 2, 3, 100) != []
    readings = engine.quoted_reading_check(60)
    assert readings == {"ph3": [False, False], "ps3": [True, True]}


def test_pod_product_against_enumeration():
    assert pod3(25) == [pod3_enumerated(n) for n in range(26)]


def test_pod_cross_check():
    assert pod_cross_check(500).passed
    G = named_series("G", 2)
    assert G.coeff(0) == 1 and G.coeff(1) == -1


def test_probe():
    cert = probe_open_problem(3)
    assert cert.passed
    levels = cert.data["levels"]
    assert [(x["low_index"], x["high_index"]) for x in levels] == [(2, 20), (20, 182), (182, 1640)]
    with pytest.raises(HorizonError):
        probe_open_problem(2, series=named_series("G", 100))
