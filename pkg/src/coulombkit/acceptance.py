"""The acceptance suite: ten numbered pass/fail checks with their tolerances and time limits.

Each check returns a ``CriterionResult``; a criterion passes when its
numerical condition holds and it finishes inside its time limit.
"""

import math
import random
import time
from dataclasses import dataclass, field

from .core import (
    CoulombParams,
    derivative_from_lower,
    derivative_from_upper,
    eval_derivative,
    eval_normalized,
    eval_regular,
    eval_regular_order,
    ode_terms,
    recurrence_BC,
    series_coefficients,
)
from .errors import CoulombError, SingularCoefficientError
from .inequalities import (
    miyazaki_sum_check,
    mittag_leffler_check,
    ross_identity_check,
    scan,
    sharp_turan_bound,
    turan1,
    turan1_limit,
)
from .zeros import (
    check_interlacing,
    derivative_zeros,
    first_positive_zero,
    hadamard_eval,
    positive_zeros,
    scaled_derivative_zeros,
    zero_table,
)
from .zeta import (
    SELECTORS,
    cm_probe,
    generating_function_check,
    first_zero_radius,
    rayleigh_sigma,
    zeta_from_zeros,
    zeta_via_coefficients,
    zeta_via_quadratic,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    numeric_ok: bool
    seconds: float
    limit: float
    detail: dict = field(default_factory=dict)

    @property
    def within_time(self):
        return self.seconds < self.limit

    @property
    def passed(self):
        return self.numeric_ok and self.within_time

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        timing = f"{self.seconds:.2f}s/{self.limit:g}s"
        return f"[{status}] {self.number:2d}. {self.title} ({timing})"

    def to_dict(self):
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "numeric_ok": self.numeric_ok,
            "within_time": self.within_time,
            "seconds": self.seconds,
            "limit": self.limit,
            "detail": self.detail,
        }


def _timed(number, title, limit, body):
    t0 = time.perf_counter()
    ok, detail = body()
    return CriterionResult(number, title, bool(ok), time.perf_counter() - t0, limit, detail)


# -- 1 -------------------------------------------------------------------------------


def _trig_reduction():
    p0, p1 = CoulombParams(0.0, 0.0), CoulombParams(1.0, 0.0)
    e0 = e1 = 0.0
    for k in range(1, 201):
        r = k / 10.0
        s, c = math.sin(r), math.cos(r)
        e0 = max(e0, abs(eval_normalized(p0, r).value - s / r))
        e1 = max(e1, abs(eval_normalized(p1, r).value - 3.0 * (s / r - c) / (r * r)))
    return e0 <= 1e-12 and e1 <= 1e-11, {"max_err_L0": e0, "max_err_L1": e1}


def criterion_1():
    return _timed(1, "trigonometric reduction of the normalized function", 1.0, _trig_reduction)


# -- 2 -------------------------------------------------------------------------------


def tan_root_oracle():
    """Smallest positive root of tan x = x, by bisection of sin x - x cos x on (pi, 3pi/2)."""
    lo, hi = math.pi, 1.5 * math.pi
    f = lambda x: math.sin(x) - x * math.cos(x)
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 4e-16 * hi:
            break
    return 0.5 * (lo + hi)


def _zeros():
    zs = positive_zeros(CoulombParams(0.0, 0.0), 10).positive
    err_sin = max(abs(z - (n + 1) * math.pi) for n, z in enumerate(zs))
    x = positive_zeros(CoulombParams(1.0, 0.0), 1).positive[0]
    oracle = tan_root_oracle()
    err_tan = abs(x - oracle)
    # the printed reference 4.4934095 is rounded to 7 decimals
    err_printed = abs(x - 4.4934095)
    ok = len(zs) == 10 and err_sin <= 1e-10 and err_tan <= 1e-8 and err_printed <= 0.5e-7
    return ok, {"max_err_sin": err_sin, "x_1_0_1": x, "oracle": oracle, "err_oracle": err_tan,
                "err_printed": err_printed}


def criterion_2():
    return _timed(2, "zeros of sin and the first root of tan x = x", 1.0, _zeros)


# -- 3 -------------------------------------------------------------------------------


def _zeta_routes():
    p = CoulombParams(0.0, 0.0)
    c = zeta_via_coefficients(p, 4).values
    q = zeta_via_quadratic(p, 4).values
    rec_err = max(abs(c[2] - 1 / 3), abs(q[2] - 1 / 3), abs(c[4] - 1 / 45), abs(q[4] - 1 / 45))
    table = zero_table(p, 1000)
    s2 = zeta_from_zeros(p, 2, table)
    s4 = zeta_from_zeros(p, 4, table)
    e2, e4 = abs(s2.value - 1 / 3), abs(s4.value - 1 / 45)
    r2, r4 = rayleigh_sigma(0.5, 1), rayleigh_sigma(0.5, 2)
    ray_err = max(abs(r2 - 1 / 6), abs(r4 - 1 / 90))
    ok = rec_err <= 1e-14 and e2 <= 1e-6 and e4 <= 1e-10 and ray_err <= 1e-14
    return ok, {"recurrence_err": rec_err, "zero_sum_s2_err": e2, "zero_sum_s2_bound": s2.tail_bound,
                "zero_sum_s4_err": e4, "zero_sum_s4_bound": s4.tail_bound, "rayleigh_err": ray_err}


def criterion_3():
    return _timed(3, "zeta values by recurrences, zero sums and Rayleigh sums", 5.0, _zeta_routes)


# -- 4 -------------------------------------------------------------------------------

SHARP_L = (0.0, 1.0, 2.0, 3.5)
SHARP_ETA = (-2.0, -1.0, -0.5, 0.0)
SHARP_RHO = [k / 10.0 for k in range(1, 121)]


def sharp_bound_for(L, eta):
    """The constant used on the grid; at L = eta = 0 the bound formula is 0/0 and the limit 2/3 is used."""
    if L == 0.0 and eta == 0.0:
        return turan1_limit(CoulombParams(0.0, 0.0))
    return sharp_turan_bound(L, eta)


def _sharp():
    p = CoulombParams(1.0, 0.0)
    rho = 1e-3
    fl = eval_regular(p, rho).value
    ratio = turan1(p, rho) / (fl * fl)
    ratio_err = abs(ratio - 0.4)
    rep = scan("sharp", SHARP_L, SHARP_ETA, SHARP_RHO)
    worst = {}
    for i in rep.violations:
        s = rep.samples[i]
        key = (s.L, s.eta)
        if key not in worst or s.margin < worst[key][1]:
            worst[key] = (s.rho, s.margin)
    ok = ratio_err <= 1e-5 and rep.ok
    return ok, {"ratio_at_1e-3": ratio, "ratio_err": ratio_err, "samples": len(rep.samples),
                "violations": len(rep.violations), "min_margin": rep.min_margin_in_region,
                "worst_by_params": {f"L={k[0]:g},eta={k[1]:g}": v for k, v in sorted(worst.items())}}


def criterion_4():
    return _timed(4, "sharp Turan constant and its grid inequality", 10.0, _sharp)


# -- 5 -------------------------------------------------------------------------------

THETA_L = (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0)
THETA_ETA = (-3.0, -2.0, -1.0, -0.5, 0.0)
THETA_RHO = [k / 4.0 for k in range(1, 41)]


def identity_points(count=20, seed=20240611):
    """Seeded (L, eta, rho) draws with rho <= 2 on which both identities are defined."""
    rng = random.Random(seed)
    pts = []
    while len(pts) < count:
        L = round(rng.uniform(0.0, 3.0), 3)
        eta = round(rng.uniform(-2.0, 2.0), 3)
        rho = round(rng.uniform(0.2, 2.0), 3)
        if eta != 0.0 and L == 0.0:
            continue
        try:
            ross_identity_check(CoulombParams(L, eta), rho, terms=2)
        except SingularCoefficientError:
            continue
        pts.append((L, eta, rho))
    return pts


def _identities():
    worst_ross = worst_miy = 0.0
    for L, eta, rho in identity_points():
        p = CoulombParams(L, eta)
        worst_ross = max(worst_ross, ross_identity_check(p, rho, terms=40).rel_diff)
        worst_miy = max(worst_miy, miyazaki_sum_check(p, rho, terms=40).rel_diff)
    rep = scan("theta", THETA_L, THETA_ETA, THETA_RHO)
    singular = sum(1 for s in rep.samples if s.branch == "singular")
    # supplementary: the part of the grid where L(L+1) + rho*eta > 0
    sub = [s.margin for s in rep.samples if s.in_region and s.L * (s.L + 1) + s.rho * s.eta > 0]
    ok = worst_ross <= 1e-8 and worst_miy <= 1e-8 and rep.ok
    return ok, {"ross_max_rel": worst_ross, "miyazaki_max_rel": worst_miy,
                "theta_samples": len(rep.samples), "theta_singular": singular,
                "theta_violations": len(rep.violations), "theta_min_margin": rep.min_margin_in_region,
                "theta_min_margin_where_L(L+1)+rho*eta>0": min(sub) if sub else None}


def criterion_5():
    return _timed(5, "Ross and Miyazaki identities and the sign of Theta(BC)", 5.0, _identities)


# -- 6 -------------------------------------------------------------------------------

ML_POINTS = (
    (0.0, 0.0, 1.0), (0.0, 0.0, 2.5), (1.0, 0.0, 2.0), (1.0, -1.0, 2.0), (0.5, 1.0, 1.5),
    (2.0, -2.0, 3.0), (0.0, 1.0, 5.0), (1.5, 0.5, -1.0), (3.0, -0.5, 4.0), (0.0, -1.0, 7.5),
)
GF_POINTS = ((0.0, 0.0, 1.0), (0.0, -1.0, 0.5), (1.0, 0.5, 1.0), (2.0, -2.0, 0.5), (0.5, 1.0, 1.2))


def _expansions():
    ml_worst = 0.0
    ml_within = True
    for L, eta, rho in ML_POINTS:
        p = CoulombParams(L, eta)
        chk = mittag_leffler_check(p, rho, zero_table(p, 200))
        diff = abs(chk.lhs - chk.rhs)
        ml_worst = max(ml_worst, diff)
        ml_within = ml_within and diff <= chk.truncation_bound
    gf_worst = 0.0
    for L, eta, rho in GF_POINTS:
        p = CoulombParams(L, eta)
        if not rho < first_zero_radius(p):
            raise CoulombError(f"generating-function point ({L}, {eta}, {rho}) lies outside the disc")
        gf_worst = max(gf_worst, generating_function_check(p, rho, 24).difference)
    ok = ml_within and ml_worst <= 1e-5 and gf_worst <= 1e-6
    return ok, {"ml_max_abs": ml_worst, "ml_within_bound": ml_within, "gf_max_abs": gf_worst}


def criterion_6():
    return _timed(6, "Mittag-Leffler expansion and zeta generating function", 10.0, _expansions)


# -- 7 -------------------------------------------------------------------------------

MA_L = (0.0, 0.5, 1.0, 2.0)
MA_ETA = (-2.0, -1.0, 0.0)


def ma_rhos(L, eta, count=50):
    x1 = first_positive_zero(L, eta)
    return [x1 * k / (count + 1) for k in range(1, count + 1)]


def _ma_wilker():
    ma = scan("ma", MA_L, MA_ETA, ma_rhos)
    wk = scan("wilker", MA_L, MA_ETA, ma_rhos)
    full = all(s.in_region for s in ma.samples) and all(s.in_region for s in wk.samples)
    ok = ma.ok and wk.ok and full and len(ma.samples) == 600
    return ok, {"samples": len(ma.samples), "ma_min_margin": ma.min_margin_in_region,
                "wilker_min_margin": wk.min_margin_in_region, "all_in_region": full}


def criterion_7():
    return _timed(7, "Mitrinovic-Adamovic and Wilker inequalities", 5.0, _ma_wilker)


# -- 8 -------------------------------------------------------------------------------

CM_GRID = [round(-0.9 + 0.1 * k, 10) for k in range(110)]
CM_ETA = (0.0, -1.0, -2.0)


def _cm():
    failures = []
    zero_cases = 0
    runs = 0
    for sel in SELECTORS:
        for eta in CM_ETA:
            for m in range(2, 7):
                rep = cm_probe(sel, eta, m, CM_GRID, 4)
                runs += 1
                zero_cases += rep.identically_zero
                if not rep.ok:
                    k, _, L = rep.first_violation
                    failures.append({"selector": sel, "eta": eta, "m": m, "order": k, "L": L})
    return not failures, {"probes": runs, "identically_zero": zero_cases, "failures": failures}


def criterion_8():
    return _timed(8, "complete monotonicity probes in L", 10.0, _cm)


# -- 9 -------------------------------------------------------------------------------

INTERLACE_PARAMS = ((0.0, 0.0), (1.0, 0.0), (0.5, -1.0), (2.0, -2.0), (1.0, 1.0))


def _interlacing():
    bad = []
    for L, eta in INTERLACE_PARAMS:
        p = CoulombParams(L, eta)
        zs = positive_zeros(p, 6).positive
        for name, other in (("derivative", derivative_zeros(p, 6)), ("scaled", scaled_derivative_zeros(p, 6))):
            rep = check_interlacing(zs, other)
            if not rep.ok or len(other) != 6:
                bad.append({"L": L, "eta": eta, "against": name, "detail": rep.detail})
    return not bad, {"failures": bad}


def criterion_9():
    return _timed(9, "interlacing of zeros of F with those of F' and rho F' - (L+1) F", 5.0, _interlacing)


# -- 10 ------------------------------------------------------------------------------

INVARIANT_PARAMS = ((0.0, 0.0), (0.5, 1.0), (1.0, -1.0), (2.0, 0.5), (3.5, -2.0), (-0.25, 0.75))
INVARIANT_RHO = (0.3, 1.0, 2.5, 5.0, 9.0)


def _parity():
    coeff = 0.0
    value = 0.0
    for L, eta in INVARIANT_PARAMS:
        a = series_coefficients(CoulombParams(L, eta), 40)
        b = series_coefficients(CoulombParams(L, -eta), 40)
        for n, (x, y) in enumerate(zip(a, b)):
            coeff = max(coeff, abs(x - (-1) ** n * y))
        for r in INVARIANT_RHO:
            u = eval_normalized(CoulombParams(L, eta), -r)
            v = eval_normalized(CoulombParams(L, -eta), r)
            # difference measured in units of the reported error estimates
            value = max(value, abs(u.value - v.value) / (u.est_abs_error + v.est_abs_error))
    return coeff == 0.0 and value <= 1.0, {"coefficient_mismatch": coeff, "value_mismatch_over_bound": value}


def _three_term():
    worst = 0.0
    for L, eta in INVARIANT_PARAMS:
        if L < 0.5:
            continue
        for r in INVARIANT_RHO:
            b, c = recurrence_BC(CoulombParams(L, eta), r)
            fd = eval_regular_order(L - 1.0, eta, r)
            f0 = eval_regular_order(L, eta, r)
            fu = eval_regular_order(L + 1.0, eta, r)
            worst = max(worst, abs(f0 - b * fu - c * fd) / max(abs(fd), abs(f0), abs(fu)))
    return worst <= 1e-10, worst


def _ode():
    worst = 0.0
    for L, eta in INVARIANT_PARAMS:
        for r in INVARIANT_RHO:
            second, pot = ode_terms(CoulombParams(L, eta), r)
            worst = max(worst, abs(second + pot) / max(abs(second), abs(pot)))
    return worst <= 1e-10, worst


def _dual_derivative():
    worst = 0.0
    for L, eta in INVARIANT_PARAMS:
        p = CoulombParams(L, eta)
        for r in INVARIANT_RHO:
            d = eval_derivative(p, r).value
            routes = [derivative_from_upper(p, r)]
            if L != 0.0:
                routes.append(derivative_from_lower(p, r))
            scale = max(abs(d), abs(eval_regular(p, r).value))
            for e in routes:
                worst = max(worst, abs(d - e) / scale)
    return worst <= 1e-10, worst


def _hadamard():
    steps = (10, 20, 50, 100, 200)
    worst_rise = 0.0
    shrinks = True
    last = {}
    for L, eta in ((0.0, 0.0), (1.0, -1.0), (0.5, 1.0)):
        p = CoulombParams(L, eta)
        table = zero_table(p, max(steps))
        rho = 0.5 * first_positive_zero(L, eta)
        target = eval_normalized(p, rho).value
        errs = []
        for n in steps:
            sub = type(table)(p, table.positive[:n], table.negative[:n], table.accuracy)
            errs.append(abs(hadamard_eval(p, rho, sub) - target))
        for a, b in zip(errs, errs[1:]):
            worst_rise = max(worst_rise, b - a)
        shrinks = shrinks and errs[-1] < errs[0]
        last[f"L={L:g},eta={eta:g}"] = errs
    return worst_rise <= 1e-14 and shrinks, {"max_rise": worst_rise, "errors_by_zero_count": last}


def _invariants():
    parts = {
        "parity": _parity(),
        "three_term": _three_term(),
        "ode": _ode(),
        "dual_derivative": _dual_derivative(),
        "hadamard": _hadamard(),
    }
    return all(ok for ok, _ in parts.values()), {k: {"ok": ok, "value": v} for k, (ok, v) in parts.items()}


def criterion_10():
    return _timed(10, "core invariants: parity, recurrence, ODE, derivatives, Hadamard", 10.0, _invariants)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_all(numbers=None):
    """Run the selected criteria (all by default) in order."""
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if numbers is None or i in numbers:
            out.append(fn())
    return out
