import json
import math

import mpmath as mp
import pytest

from coulombkit import (
    CoulombParams,
    DomainError,
    PoleError,
    SingularCoefficientError,
    eval_regular,
    first_positive_zero,
    in_region_1a,
    in_region_1b,
    in_region_1c,
    ma_inequality,
    mittag_leffler_check,
    miyazaki_sum_check,
    ratio_constant,
    ratio_gap,
    ross_identity_check,
    scan,
    sharp_turan_bound,
    theta_BC,
    turan1,
    turan1_limit,
    turan2,
    turan3,
    wilker,
    zero_table,
)

mp.mp.dps = 40


def P(L, eta):
    return CoulombParams(L, eta)


def mpF(L, eta, rho):
    return mp.coulombf(L, eta, rho)


def F0(r):
    return math.sin(r)


def F1(r):
    return math.sin(r) / r - math.cos(r)


def F2(r):
    return (3 / r ** 2 - 1) * math.sin(r) - 3 * math.cos(r) / r


# -- first Turan expression ---------------------------------------------------------------


@pytest.mark.parametrize("rho", [0.3, math.pi / 2, 2.0, 5.0, 11.0])
def test_turan1_trig_closed_form(rho):
    assert turan1(P(0, 0), rho) == pytest.approx(1 - math.sin(2 * rho) / (2 * rho), rel=1e-13)


@pytest.mark.parametrize("L,eta", [(1, 0), (2, -1), (0.5, -0.5), (3.5, -2), (1, 1.5)])
def test_turan1_small_rho_limit(L, eta):
    p = P(L, eta)
    # the ratio approaches its limit linearly in rho when eta != 0
    rho = 1e-7
    f = eval_regular(p, rho).value
    assert turan1(p, rho) / (f * f) == pytest.approx(turan1_limit(p), abs=1e-6)


def test_turan1_limit_szasz_constant():
    assert turan1_limit(P(1, 0)) == pytest.approx(0.4, rel=1e-15)
    assert turan1_limit(P(0, 0)) == pytest.approx(2 / 3, rel=1e-15)


@pytest.mark.parametrize("L,eta,rho", [(1.0, -1.0, 3.0), (0.5, 0.5, 2.0), (2.5, -2.0, 6.0)])
def test_turan1_against_mpmath(L, eta, rho):
    ref = mpF(L, eta, rho) ** 2 - mpF(L - 1, eta, rho) * mpF(L + 1, eta, rho)
    assert turan1(P(L, eta), rho) == pytest.approx(float(ref), rel=1e-11, abs=1e-14)


def region_rhos(L, eta, count=40):
    x1 = first_positive_zero(L, eta)
    top = min(x1, L * (L + 1) / eta) if eta > 0 else x1
    return [top * k / (count + 1) for k in range(1, count + 1)]


def test_turan1_nonnegative_in_region():
    rep = scan("turan1", [0.0, 0.5, 1.0, 2.0], [-2.0, -1.0, 0.0], region_rhos)
    assert all(s.in_region for s in rep.samples)
    extra = [scan("turan1", [L], [eta], region_rhos) for L, eta in [(1.0, 1.0), (2.0, 0.5)]]
    assert all(r.samples and all(s.in_region for s in r.samples) for r in extra)
    for r in [rep] + extra:
        assert r.ok, r.violations[:5]


def test_region_1a_branches():
    assert in_region_1a(P(1, 1), 1.0).branch == "L>0,eta>0"
    assert not in_region_1a(P(1, 1), 2.5)  # past L(L+1)/eta = 2
    assert in_region_1a(P(0, -1), 1.0).branch == "eta<=0,L>=0"
    assert in_region_1a(P(-1.25, 0.5), 0.3).branch == "-3/2<L<-1,eta>0"
    assert not in_region_1a(P(-0.5, -1), 0.3)


# -- weighted Turan expressions ------------------------------------------------------------


def test_turan2_trig_example():
    expected = F1(1.0) ** 2 - F0(1.0) * F2(1.0)
    assert turan2(P(1, 0), 1.0) == pytest.approx(expected, rel=1e-13)


def test_turan2_region_and_domain():
    assert not in_region_1b(P(1, 1), 1.5)  # L(L+1)/eta = 2 > 1.5
    with pytest.raises(DomainError):
        turan2(P(0, 1), 1.0)


def test_turan3_examples():
    assert turan3(P(1, 0), 0.5) == pytest.approx(turan1(P(1, 0), 0.5), rel=1e-14)
    expected = F1(0.5) ** 2 - F0(0.5) * F2(0.5)
    assert turan3(P(1, 0), 0.5) == pytest.approx(expected, rel=1e-12)
    assert not in_region_1c(P(1, 0), 0.5)
    assert not in_region_1c(P(1, 3), 1.0)
    with pytest.raises(DomainError):
        turan3(P(0, 1), 1.0)


def test_turan3_region_excludes_singular_orders():
    r = in_region_1c(P(1e-8, 1.0), 0.5)
    assert not r and r.excluded


def test_empty_regions_are_reported():
    rep = scan("turan2", [0.5, 1.0], [-1.0, 0.0], [0.5, 1.0, 1.5])
    assert not any(s.in_region for s in rep.samples)
    assert set(rep.empty_regions) == {(0.5, -1.0), (0.5, 0.0), (1.0, -1.0), (1.0, 0.0)}


def weighted2(L, eta, rho):
    L, rho = mp.mpf(L), mp.mpf(rho)
    f = mpF(L, eta, rho)
    val = mp.sqrt(L ** 2 + eta ** 2) / L * f ** 2 - mp.sqrt((L + 1) ** 2 + eta ** 2) / (L + 1) * mpF(
        L - 1, eta, rho) * mpF(L + 1, eta, rho)
    return val / f ** 2


def weighted3(L, eta, rho):
    L, rho = mp.mpf(L), mp.mpf(rho)
    f = mpF(L, eta, rho)
    w = mp.sqrt(L ** 2 + eta ** 2) * mp.sqrt((L + 1) ** 2 + eta ** 2) / (L * (L + 1))
    return (f ** 2 - w * mpF(L - 1, eta, rho) * mpF(L + 1, eta, rho)) / f ** 2


# in-region points where the weighted expressions are negative, confirmed in 40-digit arithmetic
TURAN2_NEGATIVE = [(-1.25, 0.5, 0.7), (-0.25, -1.0, 0.2), (-0.25, -2.0, 0.3)]
TURAN3_NEGATIVE = [(0.5, 1.0, 0.8), (0.5, 1.0, 0.9), (0.5, 3.0, 0.3)]


@pytest.mark.parametrize("L,eta,rho", TURAN2_NEGATIVE)
def test_turan2_negative_inside_region(L, eta, rho):
    p = P(L, eta)
    assert in_region_1b(p, rho)
    ref = float(weighted2(L, eta, rho))
    got = turan2(p, rho) / eval_regular(p, rho).value ** 2
    assert got == pytest.approx(ref, rel=1e-12)
    assert ref < -1.0


@pytest.mark.parametrize("L,eta,rho", TURAN3_NEGATIVE)
def test_turan3_negative_inside_region(L, eta, rho):
    p = P(L, eta)
    assert in_region_1c(p, rho)
    ref = float(weighted3(L, eta, rho))
    got = turan3(p, rho) / eval_regular(p, rho).value ** 2
    assert got == pytest.approx(ref, rel=1e-12)
    assert ref < -0.1


@pytest.mark.xfail(strict=True, reason="refuted: negative in-region values, see the pinned points above")
def test_turan2_nonnegative_in_region():
    rep = scan("turan2", [-1.25, -0.25, 0.5, 1.0, 2.0], [-2.0, -1.0, 0.5, 1.0], [0.1 * k for k in range(1, 120)])
    assert rep.ok


@pytest.mark.xfail(strict=True, reason="refuted: negative in-region values, see the pinned points above")
def test_turan3_nonnegative_in_region():
    rep = scan("turan3", [0.5, 1.0, 2.0], [-1.0, 1.0, 3.0], [0.05 * k for k in range(1, 60)])
    assert rep.ok


# -- sharp constant --------------------------------------------------------------------------


def test_sharp_bound_examples():
    assert sharp_turan_bound(1, 0) == pytest.approx(0.4, rel=1e-15)
    assert sharp_turan_bound(0, -1) == 1.0
    assert sharp_turan_bound(2, 0) == pytest.approx(2 / 7, rel=1e-15)
    with pytest.raises(DomainError):
        sharp_turan_bound(0, 0)
    with pytest.raises(DomainError):
        sharp_turan_bound(1, 0.5)
    with pytest.raises(DomainError):
        sharp_turan_bound(-0.5, -1)


@pytest.mark.parametrize("L,eta", [(1.0, 0.0), (2.0, -1.0), (3.5, -0.5), (0.0, -1.0)])
def test_sharp_bound_is_the_small_rho_limit(L, eta):
    assert sharp_turan_bound(L, eta) == pytest.approx(turan1_limit(P(L, eta)), rel=1e-14)


def below_first_zero(L, eta, count=60):
    x1 = first_positive_zero(L, eta)
    return [x1 * k / (count + 1) for k in range(1, count + 1)]


def test_sharp_inequality_below_first_zero():
    rep = scan("sharp", [0.0, 1.0, 2.0, 3.5], [-2.0, -1.0, -0.5, 0.0], below_first_zero)
    assert rep.ok, rep.min_margin_in_region


@pytest.mark.parametrize("L,eta,rho,margin", [(0.0, -1.0, 2.0, -1.40945324313204), (1.0, -2.0, 10.2, -0.199329498469)])
def test_sharp_inequality_fails_past_first_zero(L, eta, rho, margin):
    # oracle: 40-digit F_L with the L -> -1 limit taken numerically
    lower = mpF(L - 1 + mp.mpf("1e-30") if L == 0 else L - 1, eta, rho)
    f = mpF(L, eta, rho)
    ref = (f ** 2 - lower * mpF(L + 1, eta, rho)) / f ** 2 - sharp_turan_bound(L, eta)
    assert float(ref) == pytest.approx(margin, rel=1e-9)
    fl = eval_regular(P(L, eta), rho).value
    assert turan1(P(L, eta), rho) / fl ** 2 - sharp_turan_bound(L, eta) == pytest.approx(float(ref), rel=1e-9)
    assert rho > first_positive_zero(L, eta)


@pytest.mark.xfail(strict=True, reason="refuted past the first zero, see the pinned margins above")
def test_sharp_inequality_on_whole_axis():
    rep = scan("sharp", [0.0, 1.0, 2.0, 3.5], [-2.0, -1.0, -0.5], [0.1 * k for k in range(1, 121)])
    assert rep.ok


# -- Ross identity ------------------------------------------------------------------------------


def test_ross_identity_trig():
    chk = ross_identity_check(P(1, 0), 1.0, n=0, terms=30)
    assert chk.lhs == pytest.approx(F1(1.0) ** 2 - F0(1.0) * F2(1.0), rel=1e-13)
    assert chk.rel_diff <= 1e-10


@pytest.mark.parametrize("L,eta,rho,n", [(1.0, -1.0, 1.5, 0), (0.5, 0.7, 2.0, 0), (2.0, -0.3, 0.8, 2), (0.25, 1.5, 1.2, 1)])
def test_ross_identity_against_mpmath_lhs(L, eta, rho, n):
    chk = ross_identity_check(P(L, eta), rho, n=n, terms=40)
    Ln = L + n
    ref = mpF(Ln, eta, rho) ** 2 - mpF(Ln - 1, eta, rho) * mpF(Ln + 1, eta, rho)
    assert chk.lhs == pytest.approx(float(ref), rel=1e-11)
    assert chk.rel_diff <= 1e-8
    assert abs(chk.lhs - chk.rhs) <= 1e-8 * abs(chk.lhs) + chk.truncation_bound


def test_ross_identity_other_numerator_fails():
    chk = ross_identity_check(P(1.0, -1.0), 1.5, terms=40, numerator_factors="i+1")
    assert chk.rel_diff > 1e-3


def test_ross_identity_singular_ladder():
    # L(L+1)/rho + eta = 0 at L = 1, eta = -1, rho = 2
    with pytest.raises(SingularCoefficientError):
        ross_identity_check(P(1.0, -1.0), 2.0, terms=5)


# -- sign of Theta(B C) ----------------------------------------------------------------------


def test_theta_counterexample_exact():
    # L = 0, eta = -1, rho = 1, i = 1: B_0 = 0, B_1 = sqrt5/3, C_2 = 3 sqrt5/25, so Theta = 1/5
    b1 = math.sqrt(5) / 3
    c2 = 3 * math.sqrt(5) / 25
    assert b1 * c2 == pytest.approx(0.2, rel=1e-15)
    assert theta_BC(P(0.0, -1.0), 1.0, 1) == pytest.approx(0.2, rel=1e-14)


def test_theta_nonpositive_where_denominators_positive():
    worst = -math.inf
    for L in [0.0, 0.5, 1.0, 2.0, 3.5, 5.0]:
        for eta in [-3.0, -2.0, -1.0, -0.5, 0.0]:
            for k in range(1, 41):
                rho = 0.25 * k
                if L * (L + 1) + rho * eta <= 0:
                    continue
                for i in range(1, 21):
                    worst = max(worst, theta_BC(P(L, eta), rho, i))
    assert worst <= 1e-14


@pytest.mark.xfail(strict=True, reason="refuted: Theta = 1/5 at L = 0, eta = -1, rho = 1")
def test_theta_nonpositive_on_full_grid():
    rep = scan("theta", [0.0, 1.0, 2.0], [-3.0, -1.0, 0.0], [0.25 * k for k in range(1, 41)])
    assert rep.ok


def test_theta_scan_marks_singular_points():
    rep = scan("theta", [1.0], [-1.0], [2.0])
    assert rep.samples[0].branch == "singular" and not rep.samples[0].in_region


def test_ratio_gap_increases_between_poles():
    for L in [0.0, 0.5, 1.0, 2.0]:
        for eta in [-2.0, -1.0, -0.5, 0.0]:
            pole = -(L + 1) * (L + 2) / eta if eta < 0 else math.inf
            lo_pole = -L * (L + 1) / eta if eta < 0 and L > 0 else math.inf
            rhos = [0.05 * k for k in range(1, 400)]
            pieces, cur = [], []
            for r in rhos:
                if any(abs(r - p) < 1e-9 for p in (pole, lo_pole)):
                    continue
                if cur and any(cur[-1][0] < p < r for p in (pole, lo_pole)):
                    pieces.append(cur)
                    cur = []
                cur.append((r, ratio_gap(P(L, eta), r)))
            pieces.append(cur)
            for piece in pieces:
                for (_, a), (_, b) in zip(piece, piece[1:]):
                    assert b >= a - 1e-12 * max(1.0, abs(a))


def test_ratio_gap_has_a_pole_with_charge():
    # 1 - C_{L+1}/C_L jumps at rho = -(L+1)(L+2)/eta, so it is not monotone on the whole half-line
    p = P(0.0, -1.0)
    assert ratio_gap(p, 1.999) > 100 and ratio_gap(p, 2.001) < -100


# -- Miyazaki sum -------------------------------------------------------------------------------


def test_miyazaki_trig():
    chk = miyazaki_sum_check(P(0, 0), 1.0, terms=40)
    # rho^2 (F_1' F_0 - F_0' F_1) at rho = 1 from closed forms
    d0, d1 = math.cos(1), math.cos(1) - math.sin(1) + math.sin(1)
    assert chk.lhs == pytest.approx(d1 * F0(1) - d0 * F1(1), rel=1e-13)
    assert chk.rel_diff <= 1e-10


def test_miyazaki_with_charge():
    assert miyazaki_sum_check(P(1, -1), 2.0, terms=40).rel_diff <= 1e-8


def test_miyazaki_near_origin():
    chk = miyazaki_sum_check(P(0.5, 1.0), 1e-4, terms=10)
    assert abs(chk.lhs) < 1e-10 and abs(chk.rhs) < 1e-10
    assert chk.rel_diff <= 1e-8


# -- Mitrinovic-Adamovic and Wilker --------------------------------------------------------------


def test_ma_margin_trig():
    oracle = 2.5 * math.log(3 * (math.sin(1) - math.cos(1))) - 1.5 * math.log(math.sin(1))
    assert oracle == pytest.approx(0.0052244, abs=1e-7)
    assert ma_inequality(P(0, 0), 1.0) == pytest.approx(oracle, rel=1e-12)


def test_ma_margin_vanishes_at_origin():
    # first order in rho when eta != 0
    p = P(1, -1)
    a, b = ma_inequality(p, 1e-6), ma_inequality(p, 1e-7)
    assert abs(a) < 1e-6
    assert b / a == pytest.approx(0.1, rel=1e-4)


def test_ma_domain():
    with pytest.raises(DomainError):
        ma_inequality(P(0, 0), 3.2)
    with pytest.raises(DomainError):
        ma_inequality(P(0, 1), 1.0)


def test_wilker_values():
    a, b = math.sin(1), 3 * (math.sin(1) - math.cos(1))
    assert wilker(P(0, 0), 1.0) == pytest.approx(b ** (2 / 3) + b / a, rel=1e-13)
    assert wilker(P(0, 0), 1.0) == pytest.approx(2.0083, abs=1e-4)
    assert wilker(P(1, -1), 0.5) >= 2 - 1e-12
    assert wilker(P(0.5, -2), 1e-8) == pytest.approx(2.0, abs=1e-8)


def test_ma_implies_wilker_on_grid():
    rhos = lambda L, eta: below_first_zero(L, eta, 30)
    ma = scan("ma", [0.0, 0.5, 1.0, 2.0, -0.5], [-2.0, -1.0, 0.0], rhos)
    wk = scan("wilker", [0.0, 0.5, 1.0, 2.0, -0.5], [-2.0, -1.0, 0.0], rhos)
    assert ma.ok and wk.ok
    for a, b in zip(ma.samples, wk.samples):
        assert not (a.margin >= -1e-12 and b.margin < -1e-12)


# -- Mittag-Leffler -----------------------------------------------------------------------------


def test_mittag_leffler_trig():
    p = P(0, 0)
    chk = mittag_leffler_check(p, 1.0, zero_table(p, 200))
    oracle = (math.sin(1) - math.cos(1)) / math.sin(1)
    assert oracle == pytest.approx(0.357908, abs=1e-6)
    assert chk.lhs == pytest.approx(oracle, rel=1e-14)
    assert abs(chk.rhs - oracle) <= 1e-5
    assert abs(chk.rhs - oracle) <= chk.truncation_bound


@pytest.mark.parametrize("L,eta,rho", [(1.0, -1.0, 2.0), (0.5, 1.0, 1.5), (2.0, -2.0, 3.0), (0.0, 1.0, -2.0), (-0.5, 0.5, 4.0)])
def test_mittag_leffler_against_mpmath(L, eta, rho):
    p = P(L, eta)
    chk = mittag_leffler_check(p, rho, zero_table(p, 200))
    if rho > 0:
        ref = float(mpF(L + 1, eta, rho) / mpF(L, eta, rho))
        assert chk.lhs == pytest.approx(ref, rel=1e-12)
    assert abs(chk.lhs - chk.rhs) <= chk.truncation_bound
    assert abs(chk.lhs - chk.rhs) <= 1e-5


def test_mittag_leffler_pole_and_origin():
    p = P(0, 0)
    t = zero_table(p, 20)
    with pytest.raises(PoleError):
        mittag_leffler_check(p, math.pi, t)
    chk = mittag_leffler_check(p, 0.0, t)
    assert chk.lhs == chk.rhs == 0.0


def test_mittag_leffler_first_order_coefficient():
    p = P(1.0, -0.5)
    chk = mittag_leffler_check(p, 1e-5, zero_table(p, 200))
    assert chk.lhs / 1e-5 == pytest.approx(ratio_constant(p), rel=1e-4)


# -- reports ------------------------------------------------------------------------------------


def test_report_violations_are_in_region_samples_below_tol():
    rep = scan("sharp", [0.0], [-1.0], [0.5, 1.0, 2.0, 3.0, 5.0])
    expected = [i for i, s in enumerate(rep.samples) if s.in_region and s.margin < -rep.tol]
    assert rep.violations == expected and rep.violations


def test_report_serialization():
    rep = scan("ma", [0.0], [-1.0, 0.0], [0.5, 1.0, 5.0])
    doc = json.loads(rep.to_json())
    assert doc["name"] == "ma" and len(doc["samples"]) == 6
    assert doc["samples"][2]["margin"] is None  # rho = 5 lies past the first zero
    lines = rep.to_csv().splitlines()
    assert lines[0] == "index,L,eta,rho,margin,in_region,branch" and len(lines) == 7


def test_report_order_independent_of_threads(monkeypatch):
    args = ("turan1", [0.0, 1.0, 2.0], [-1.0, 0.0, 0.5], [0.25 * k for k in range(1, 30)])
    monkeypatch.setenv("COULOMBKIT_THREADS", "1")
    one = scan(*args).to_json()
    monkeypatch.setenv("COULOMBKIT_THREADS", "4")
    assert scan(*args).to_json() == one


def test_unknown_inequality():
    with pytest.raises(DomainError):
        scan("nope", [0.0], [0.0], [1.0])
