"""Turan-type, Mitrinovic-Adamovic and Wilker inequalities for F_L, the
identities behind them, and grid scans that report margins.

Margins are scale-free: Turan expressions are divided by F_L^2, so a margin
of -1e-12 means a relative violation of that size.  Region predicates
transcribe the hypotheses literally and report which alternative applied.
"""

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .core import (
    DEFAULT_POLICY,
    CoulombParams,
    eval_derivative,
    eval_normalized,
    eval_regular,
    eval_regular_order,
    normalization_constant,
    recurrence_BC,
)
from .errors import DomainError, PoleError, SingularCoefficientError
from .zeros import first_positive_zero

__all__ = [
    "Region",
    "turan1",
    "turan2",
    "turan3",
    "in_region_1a",
    "in_region_1b",
    "in_region_1c",
    "turan1_limit",
    "sharp_turan_bound",
    "ratio_gap",
    "theta_BC",
    "ross_identity_check",
    "miyazaki_sum_check",
    "ma_inequality",
    "wilker",
    "mittag_leffler_check",
    "InequalityReport",
    "Sample",
    "scan",
    "SCANS",
]

# half-width of the windows around L = -1 and L = 0 excluded from the third region
REGION_1C_EXCLUSION = 1e-6


def _F(L, eta, rho, policy):
    return eval_regular_order(L, eta, rho, policy)


def _check_rho(rho):
    rho = float(rho)
    if not rho > 0.0:
        raise DomainError("rho must be positive")
    return rho


# -- Turan expressions ---------------------------------------------------------------


def turan1(params, rho, policy=DEFAULT_POLICY):
    """F_L^2 - F_{L-1} F_{L+1}."""
    L, eta = params.L, params.eta
    f = _F(L, eta, rho, policy)
    return f * f - _F(L - 1.0, eta, rho, policy) * _F(L + 1.0, eta, rho, policy)


def turan2(params, rho, policy=DEFAULT_POLICY):
    """(sqrt(L^2+eta^2)/L) F_L^2 - (sqrt((L+1)^2+eta^2)/(L+1)) F_{L-1} F_{L+1}."""
    L, eta = params.L, params.eta
    if L == 0.0 or L == -1.0:
        raise DomainError("weights need L not in {0, -1}")
    f = _F(L, eta, rho, policy)
    lo = _F(L - 1.0, eta, rho, policy)
    hi = _F(L + 1.0, eta, rho, policy)
    return math.hypot(L, eta) / L * f * f - math.hypot(L + 1.0, eta) / (L + 1.0) * lo * hi


def turan3(params, rho, policy=DEFAULT_POLICY):
    """F_L^2 - sqrt(L^2+eta^2) sqrt((L+1)^2+eta^2) / (L(L+1)) F_{L-1} F_{L+1}."""
    L, eta = params.L, params.eta
    if L == 0.0 or L == -1.0:
        raise DomainError("weight needs L not in {0, -1}")
    f = _F(L, eta, rho, policy)
    w = math.hypot(L, eta) * math.hypot(L + 1.0, eta) / (L * (L + 1.0))
    return f * f - w * _F(L - 1.0, eta, rho, policy) * _F(L + 1.0, eta, rho, policy)


@dataclass(frozen=True)
class Region:
    """Outcome of a region predicate: whether rho is inside and by which alternative."""

    inside: bool
    branch: str = None
    excluded: bool = False
    note: str = ""

    def __bool__(self):
        return self.inside


def _first_zero_or_none(L, eta):
    try:
        return first_positive_zero(L, eta)
    except DomainError:
        return None


def in_region_1a(params, rho):
    """Three alternatives under which F_L^2 - F_{L-1} F_{L+1} >= 0 is asserted.

    (i)   L > 0, eta > 0, 0 < rho < L(L+1)/eta, rho < x_{L,eta,1}
    (ii)  -3/2 < L < -1, eta > 0, 0 < rho < L(L+1)/eta, rho < x_{L,eta,1}
    (iii) eta <= 0, L >= 0, 0 < rho < x_{L,eta,1}
    """
    L, eta = params.L, params.eta
    if not rho > 0:
        return Region(False)
    if eta > 0 and (L > 0 or -1.5 < L < -1):
        if rho < L * (L + 1.0) / eta and rho < first_positive_zero(L, eta):
            return Region(True, "L>0,eta>0" if L > 0 else "-3/2<L<-1,eta>0")
        return Region(False)
    if eta <= 0 and L >= 0:
        if rho < first_positive_zero(L, eta):
            return Region(True, "eta<=0,L>=0")
    return Region(False)


def in_region_1b(params, rho):
    """Three alternatives for the weighted expression turan2 >= 0.

    (i)   L > 0, eta > 0, L(L+1)/eta <= rho < x_{L-1,eta,1}
    (ii)  -3/2 < L < -1, eta > 0, L(L+1)/eta <= rho < x_{L-1,eta,1}
    (iii) -1 < L < 0, eta < 0, L(L+1)/eta <= rho < x_{L-1,eta,1}
    """
    L, eta = params.L, params.eta
    if eta > 0 and L > 0:
        branch = "L>0,eta>0"
    elif eta > 0 and -1.5 < L < -1:
        branch = "-3/2<L<-1,eta>0"
    elif eta < 0 and -1 < L < 0:
        branch = "-1<L<0,eta<0"
    else:
        return Region(False)
    x1 = _first_zero_or_none(L - 1.0, eta)
    if x1 is None:
        return Region(False, excluded=True, note=f"F at order {L - 1.0:g} is undefined")
    if L * (L + 1.0) / eta <= rho < x1:
        return Region(True, branch)
    return Region(False)


def in_region_1c(params, rho):
    """L > -1, rho^2 <= (L^3+1)/(L^2+eta^2), eta/(L(L+1)) - 1/rho > 0, 0 < rho < x_{L-1,eta,1}.

    Orders within 1e-6 of -1 or 0 are reported as excluded: the condition
    divides by L(L+1) there.
    """
    L, eta = params.L, params.eta
    if not L > -1.0:
        return Region(False)
    if abs(L + 1.0) < REGION_1C_EXCLUSION or abs(L) < REGION_1C_EXCLUSION:
        return Region(False, excluded=True, note="L within 1e-6 of -1 or 0")
    if not rho > 0:
        return Region(False)
    if rho * rho > (L ** 3 + 1.0) / (L * L + eta * eta):
        return Region(False)
    if not eta / (L * (L + 1.0)) - 1.0 / rho > 0:
        return Region(False)
    x1 = _first_zero_or_none(L - 1.0, eta)
    if x1 is None:
        return Region(False, excluded=True, note=f"F at order {L - 1.0:g} is undefined")
    if rho < x1:
        return Region(True, "L>-1")
    return Region(False)


# -- the sharp constant ------------------------------------------------------------------


def turan1_limit(params):
    """lim_{rho->0} (F_L^2 - F_{L-1}F_{L+1}) / F_L^2.

    Equals 1 - L(2L+1) sqrt((L+1)^2+eta^2) / ((L+1)(2L+3) sqrt(L^2+eta^2));
    at eta = 0 this is 2/(2L+3), which also covers L = 0.
    """
    L, eta = params.L, params.eta
    if eta == 0.0:
        return 2.0 / (2.0 * L + 3.0)
    return 1.0 - L * (2 * L + 1.0) * math.hypot(L + 1.0, eta) / ((L + 1.0) * (2 * L + 3.0) * math.hypot(L, eta))


def sharp_turan_bound(L, eta):
    """Best constant c in F_L^2 - F_{L-1}F_{L+1} >= c F_L^2 for L >= 0, eta <= 0."""
    L, eta = float(L), float(eta)
    if L < 0 or eta > 0:
        raise DomainError("the sharp bound is stated for L >= 0 and eta <= 0")
    if L == 0.0 and eta == 0.0:
        raise DomainError("the bound is 0/0 at L = 0, eta = 0")
    if L == 0.0:
        return 1.0
    return 1.0 - L * (2 * L + 1.0) * math.hypot(L + 1.0, eta) / ((L + 1.0) * (2 * L + 3.0) * math.hypot(L, eta))


def ratio_gap(params, rho):
    """1 - C_{L+1}(rho)/C_L(rho) with C the lower recurrence coefficient."""
    L, eta = params.L, params.eta
    _, c0 = recurrence_BC(CoulombParams.ladder(L, eta), rho)
    _, c1 = recurrence_BC(CoulombParams.ladder(L + 1.0, eta), rho)
    return 1.0 - c1 / c0


# -- identities ----------------------------------------------------------------------


def _BC(L, eta, rho):
    return recurrence_BC(CoulombParams.ladder(L, eta), rho)


def theta_BC(params, rho, i):
    """Forward difference B_{L+i} C_{L+i+1} - B_{L+i-1} C_{L+i}."""
    L, eta = params.L, params.eta
    b0, _ = _BC(L + i - 1.0, eta, rho)
    b1, c1 = _BC(L + i, eta, rho)
    _, c2 = _BC(L + i + 1.0, eta, rho)
    return b1 * c2 - b0 * c1


@dataclass(frozen=True)
class IdentityCheck:
    """Two sides of an identity; unpacks as (lhs, rhs)."""

    lhs: float
    rhs: float
    truncation_bound: float = 0.0

    def __iter__(self):
        return iter((self.lhs, self.rhs))

    @property
    def rel_diff(self):
        scale = max(abs(self.lhs), abs(self.rhs))
        return abs(self.lhs - self.rhs) / scale if scale else 0.0


def ross_identity_check(params, rho, n=0, terms=40, numerator_factors="i-1", policy=DEFAULT_POLICY):
    """F_{L+n}^2 - F_{L+n-1}F_{L+n+1} against its series over the ladder.

    With y_k = F_{L+k} and y_k = B_k y_{k+1} + C_k y_{k-1},

        y_n^2 - y_{n-1} y_{n+1} = -(C_{n+1}-C_n)/C_n y_n^2
            - sum_{i>=1} P_i / (C_n ... C_{n+i}) (B_{n+i}C_{n+i+1} - B_{n+i-1}C_{n+i}) y_{n+i}^2,

    where P_i = B_{n+1} ... B_{n+i-1} (empty for i = 1).  Passing
    ``numerator_factors="i+1"`` uses B_{n+1} ... B_{n+i+1} instead; that
    variant does not satisfy the identity and is kept for comparison.
    """
    if numerator_factors not in ("i-1", "i+1"):
        raise DomainError("numerator_factors must be 'i-1' or 'i+1'")
    rho = _check_rho(rho)
    L, eta = params.L, params.eta
    if n < 0 or terms < 1:
        raise DomainError("need n >= 0 and terms >= 1")
    top = n + terms + 3
    B, C = {}, {}
    for k in range(n, top + 1):
        B[k], C[k] = _BC(L + k, eta, rho)
    for k in range(n, top + 1):
        if C[k] == 0.0:
            raise SingularCoefficientError(f"C vanishes at order {L + k:g}")
    y = {k: _F(L + k, eta, rho, policy) for k in range(n - 1, n + terms + 2)}
    lhs = y[n] * y[n] - y[n - 1] * y[n + 1]
    parts = [-(C[n + 1] - C[n]) / C[n] * y[n] * y[n]]
    extra = 2 if numerator_factors == "i+1" else 0
    last = 0.0
    for i in range(1, terms + 2):
        num = 1.0
        for j in range(1, i + extra):
            num *= B[n + j]
        den = 1.0
        for j in range(0, i + 1):
            den *= C[n + j]
        theta = B[n + i] * C[n + i + 1] - B[n + i - 1] * C[n + i]
        yi = y[n + i] if n + i in y else _F(L + n + i, eta, rho, policy)
        term = -num / den * theta * yi * yi
        if i <= terms:
            parts.append(term)
        else:
            last = term
    return IdentityCheck(lhs, math.fsum(parts), abs(last))


def miyazaki_sum_check(params, rho, terms=40, policy=DEFAULT_POLICY):
    """rho^2 sqrt((L+1)^2+eta^2)/(L+1) (F_{L+1}' F_L - F_L' F_{L+1}) against sum_{n>=1} (2L+2n+1) F_{L+n}^2."""
    rho = _check_rho(rho)
    if terms < 1:
        raise DomainError("terms must be >= 1")
    L, eta = params.L, params.eta
    up = CoulombParams.ladder(L + 1.0, eta)
    f0 = eval_regular(params, rho, policy).value
    f1 = eval_regular(up, rho, policy).value
    d0 = eval_derivative(params, rho, policy).value
    d1 = eval_derivative(up, rho, policy).value
    lhs = rho * rho * math.hypot(L + 1.0, eta) / (L + 1.0) * (d1 * f0 - d0 * f1)
    parts = []
    for k in range(1, terms + 2):
        f = _F(L + k, eta, rho, policy)
        parts.append((2 * L + 2 * k + 1.0) * f * f)
    return IdentityCheck(lhs, math.fsum(parts[:terms]), abs(parts[terms]))


# -- Mitrinovic-Adamovic and Wilker ---------------------------------------------------


def _positive_pair(params, rho, policy):
    L, eta = params.L, params.eta
    if eta > 0 or not L > -1.0:
        raise DomainError("these inequalities are stated for eta <= 0 and L > -1")
    rho = _check_rho(rho)
    x1 = first_positive_zero(L, eta)
    if not rho < x1:
        raise DomainError(f"rho = {rho!r} is not below the first zero {x1:.15g}")
    a = eval_normalized(params, rho, policy).value
    b = eval_normalized(CoulombParams(L + 1.0, eta), rho, policy).value
    if not (a > 0 and b > 0):
        raise DomainError("normalized functions must be positive")
    return a, b


def ma_inequality(params, rho, policy=DEFAULT_POLICY):
    """(L+5/2) ln NF_{L+1} - (L+3/2) ln NF_L; positive when NF_L^{L+3/2} < NF_{L+1}^{L+5/2}."""
    a, b = _positive_pair(params, rho, policy)
    L = params.L
    return (L + 2.5) * math.log(b) - (L + 1.5) * math.log(a)


def wilker(params, rho, policy=DEFAULT_POLICY):
    """NF_{L+1}^{1/(L+3/2)} + NF_{L+1}/NF_L, expected >= 2."""
    a, b = _positive_pair(params, rho, policy)
    return b ** (1.0 / (params.L + 1.5)) + b / a


# -- Mittag-Leffler expansion ----------------------------------------------------------


def _gap_band(zs):
    if len(zs) < 3:
        return 0.0
    tail = [abs(zs[i + 1] - zs[i]) for i in range(max(0, len(zs) - 6), len(zs) - 1)]
    return max(abs(g - math.pi) for g in tail)


def _ml_tail(r, rho, sign, band):
    """sum_{k>=1} rho/(u_k (u_k - sign*rho)), u_k = r + k*pi, as (midpoint, half-width)."""
    hi = _ml_integral(r, rho, sign, math.pi, 0.0)
    lo = _ml_integral(r, rho, sign, math.pi, 1.0)
    mid = 0.5 * (hi + lo)
    d = min(2.0 * band, 0.5 * math.pi)
    hi_w = _ml_integral(r, rho, sign, math.pi - d, 0.0)
    lo_w = _ml_integral(r, rho, sign, math.pi + d, 1.0)
    return mid, max(abs(hi_w - mid), abs(mid - lo_w), abs(hi - lo) / 2)


def _ml_integral(r, rho, sign, spacing, start):
    """integral_{k>=start} rho / (u (u - sign*rho)) dk with u = r + k*spacing.

    The antiderivative in u is sign * ln((u - sign*rho)/u); the integral to
    infinity is therefore sign * ln(u0/(u0 - sign*rho)) / spacing.
    """
    u0 = r + start * spacing
    return sign * math.log(u0 / (u0 - sign * rho)) / spacing


def mittag_leffler_check(params, rho, table, policy=DEFAULT_POLICY):
    """F_{L+1}/F_L against (L+1)/sqrt((L+1)^2+eta^2) sum_n rho/(z_n (z_n - rho)).

    The sum runs over the table's zeros of both signs; unlisted zeros are
    modelled as continuing from the last listed one with spacing pi, and the
    reported bound covers the gap spread seen at the end of the table.
    """
    L, eta = params.L, params.eta
    rho = float(rho)
    if rho == 0.0:
        return IdentityCheck(0.0, 0.0, 0.0)
    zs = table.positive + table.negative
    if not table.positive or not table.negative:
        raise DomainError("table needs zeros of both signs")
    nf = eval_normalized(params, rho, policy).value
    if abs(nf) <= policy.rel_tol or any(abs(rho - z) <= max(table.accuracy, 1e-15 * abs(z)) for z in zs):
        raise PoleError(f"rho = {rho!r} sits on a zero of F_L")
    up = CoulombParams(L + 1.0, eta)
    if rho > 0:
        lhs = eval_regular(up, rho, policy).value / eval_regular(params, rho, policy).value
    else:
        ratio = normalization_constant(up) / normalization_constant(params)
        lhs = ratio * rho * eval_normalized(up, rho, policy).value / nf
    pref = (L + 1.0) / math.hypot(L + 1.0, eta)
    partial = math.fsum(rho / (z * (z - rho)) for z in zs)
    t_pos, b_pos = _ml_tail(table.positive[-1], rho, 1.0, _gap_band(table.positive))
    t_neg, b_neg = _ml_tail(-table.negative[-1], rho, -1.0, _gap_band(table.negative))
    # zero positions carry table.accuracy each: d/dz [rho/(z(z-rho))] = -rho(2z-rho)/(z(z-rho))^2
    pos_err = table.accuracy * math.fsum(abs(rho * (2 * z - rho)) / (z * (z - rho)) ** 2 for z in zs)
    rhs = pref * (partial + t_pos + t_neg)
    bound = abs(pref) * (b_pos + b_neg + pos_err) + 64 * policy.rel_tol * abs(lhs) + len(zs) * 2.2e-16 * abs(rhs)
    return IdentityCheck(lhs, rhs, bound)


# -- grid scans ------------------------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    L: float
    eta: float
    rho: float
    margin: float
    in_region: bool
    branch: str = None


@dataclass
class InequalityReport:
    """Margins of one inequality over a grid; ``violations`` index in-region samples below -tol."""

    name: str
    tol: float
    samples: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    min_margin_in_region: float = math.inf
    empty_regions: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {
            "name": self.name,
            "tol": self.tol,
            "min_margin_in_region": self.min_margin_in_region if math.isfinite(self.min_margin_in_region) else None,
            "violations": list(self.violations),
            "empty_regions": [list(p) for p in self.empty_regions],
            "samples": [
                {"L": s.L, "eta": s.eta, "rho": s.rho, "margin": _json_num(s.margin),
                 "in_region": s.in_region, "branch": s.branch}
                for s in self.samples
            ],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "L", "eta", "rho", "margin", "in_region", "branch"])
        for i, s in enumerate(self.samples):
            w.writerow([i, "%.17g" % s.L, "%.17g" % s.eta, "%.17g" % s.rho, "%.17g" % s.margin,
                        int(s.in_region), s.branch or ""])
        return buf.getvalue()


def _json_num(x):
    return x if math.isfinite(x) else None


def _margin_turan(fn, region):
    def f(params, rho):
        reg = region(params, rho)
        if not reg:
            return math.nan, False, None
        fl = _F(params.L, params.eta, rho, DEFAULT_POLICY)
        return fn(params, rho) / (fl * fl), True, reg.branch
    return f


def _margin_sharp(params, rho):
    L, eta = params.L, params.eta
    if L < 0 or eta > 0 or not rho > 0:
        return math.nan, False, None
    bound = turan1_limit(params) if (L == 0.0 and eta == 0.0) else sharp_turan_bound(L, eta)
    fl = _F(L, eta, rho, DEFAULT_POLICY)
    return turan1(params, rho) / (fl * fl) - bound, True, "L>=0,eta<=0"


def _margin_theta(params, rho, i_max=20):
    L, eta = params.L, params.eta
    if L < 0 or eta > 0 or not rho > 0:
        return math.nan, False, None
    try:
        worst = -max(theta_BC(params, rho, i) for i in range(1, i_max + 1))
    except SingularCoefficientError:
        # a coefficient pole sits on this grid point; the difference is undefined
        return math.nan, False, "singular"
    return worst, True, "L>=0,eta<=0"


def _margin_guarded(fn, offset):
    def f(params, rho):
        try:
            return fn(params, rho) - offset, True, "eta<=0,L>-1,rho<x1"
        except DomainError:
            return math.nan, False, None
    return f


SCANS = {
    "turan1": (_margin_turan(turan1, in_region_1a), 1e-12),
    "turan2": (_margin_turan(turan2, in_region_1b), 1e-12),
    "turan3": (_margin_turan(turan3, in_region_1c), 1e-12),
    "sharp": (_margin_sharp, 1e-12),
    "theta": (_margin_theta, 1e-14),
    "ma": (_margin_guarded(ma_inequality, 0.0), 1e-12),
    "wilker": (_margin_guarded(wilker, 2.0), 1e-12),
}


def _threads():
    try:
        return max(1, int(os.environ.get("COULOMBKIT_THREADS", "1")))
    except ValueError:
        return 1


def scan(name, L_values, eta_values, rho_values, tol=None):
    """Evaluate the named inequality on the product grid, in grid order.

    ``rho_values`` is a sequence or a callable (L, eta) -> sequence.
    COULOMBKIT_THREADS caps the worker threads; the report order never
    depends on it.
    """
    if name not in SCANS:
        raise DomainError(f"unknown inequality {name!r}; choose from {sorted(SCANS)}")
    fn, default_tol = SCANS[name]
    tol = default_tol if tol is None else tol
    points = []
    for L in L_values:
        for eta in eta_values:
            rhos = rho_values(L, eta) if callable(rho_values) else rho_values
            for rho in rhos:
                points.append((float(L), float(eta), float(rho)))

    def work(p):
        L, eta, rho = p
        margin, inside, branch = fn(CoulombParams(L, eta), rho)
        return Sample(L, eta, rho, margin, inside, branch)

    n = _threads()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as ex:
            samples = list(ex.map(work, points))
    else:
        samples = [work(p) for p in points]
    report = InequalityReport(name, tol, samples)
    seen = {}
    for i, s in enumerate(samples):
        key = (s.L, s.eta)
        seen[key] = seen.get(key, False) or s.in_region
        if s.in_region:
            report.min_margin_in_region = min(report.min_margin_in_region, s.margin)
            if not s.margin >= -tol:
                report.violations.append(i)
    report.empty_regions = [k for k, v in seen.items() if not v]
    return report
