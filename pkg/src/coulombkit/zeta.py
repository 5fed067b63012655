"""Coulomb zeta functions: sums of inverse powers over all real zeros of F_L.

zeta_s(L, eta) = sum over positive zeros x_n and negative zeros y_n of z^-s.
Four independent routes are provided (closed forms for s = 2, 3, a
convolution with the series coefficients, a quadratic recurrence and direct
zero sums), plus the eta = 0 Rayleigh sums and finite-difference probes of
complete monotonicity in L.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .core import (
    DEFAULT_POLICY,
    CoulombParams,
    eval_normalized,
    eval_regular,
    normalization_constant,
    series_coefficients,
)
from .errors import DomainError, PoleError
from .zeros import first_positive_zero

__all__ = [
    "ROUTES",
    "SELECTORS",
    "ZetaTable",
    "ZeroSum",
    "GeneratingCheck",
    "CMReport",
    "zeta_closed_form",
    "zeta_table_closed_form",
    "zeta_via_coefficients",
    "zeta_via_quadratic",
    "zeta_value",
    "zeta_from_zeros",
    "zeta_table_from_zeros",
    "rayleigh_sigma",
    "first_zero_radius",
    "generating_function_check",
    "generating_limit",
    "ratio_constant",
    "cm_from_values",
    "cm_probe",
    "rayleigh_probe",
]

EPS = 2.0 ** -52

ROUTES = ("closed_form", "coefficient_recurrence", "quadratic_recurrence", "zero_sum")


@dataclass(frozen=True)
class ZetaTable:
    """zeta_s for s = 2..m_max from a single route, with per-entry error estimates."""

    params: CoulombParams
    values: dict
    route: str
    est_error: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.route not in ROUTES:
            raise DomainError(f"unknown route {self.route!r}")

    def __getitem__(self, s):
        return self.values[s]

    def rows(self):
        for s in sorted(self.values):
            yield s, self.values[s], self.route, self.est_error.get(s, 0.0)

    def to_dict(self):
        return {
            "L": self.params.L,
            "eta": self.params.eta,
            "route": self.route,
            "values": {str(s): v for s, v in sorted(self.values.items())},
            "est_error": {str(s): e for s, e in sorted(self.est_error.items())},
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "value", "route", "est_error"])
        for s, v, route, e in self.rows():
            w.writerow([s, "%.17g" % v, route, "%.3g" % e])
        return buf.getvalue()


# -- closed forms ---------------------------------------------------------------------


def _require_L(L):
    if not L > -1.0:
        raise DomainError(f"zeta functions need L > -1, got {L!r}")


def zeta_closed_form(params, s):
    """zeta_2 or zeta_3 from their rational closed forms."""
    L, eta = params.L, params.eta
    _require_L(L)
    a = L + 1.0
    b = 2.0 * L + 3.0
    if s == 2:
        return (a * a + eta * eta) / (a * a * b)
    if s == 3:
        return -eta * (a * a + eta * eta) / (a ** 3 * (L + 2.0) * b)
    raise DomainError(f"closed forms exist for s = 2 and 3 only, got {s!r}")


def _seeds(params):
    return zeta_closed_form(params, 2), zeta_closed_form(params, 3)


def _check_mmax(m_max):
    if int(m_max) != m_max or m_max < 2:
        raise DomainError("m_max must be an integer >= 2")
    return int(m_max)


def zeta_table_closed_form(params, m_max=3):
    m_max = _check_mmax(m_max)
    if m_max > 3:
        raise DomainError("closed forms reach s = 3 only")
    vals = {s: zeta_closed_form(params, s) for s in range(2, m_max + 1)}
    return ZetaTable(params, vals, "closed_form", {s: 4 * EPS * abs(v) for s, v in vals.items()})


# -- recurrences --------------------------------------------------------------------


def zeta_via_coefficients(params, m_max):
    """Solve zeta_2 a_{L+1,n} = sum_{k=0}^{n} a_{L,k} zeta_{n-k+2} for zeta_{n+2}."""
    m_max = _check_mmax(m_max)
    _require_L(params.L)
    n_top = m_max - 2
    a = series_coefficients(params, n_top)
    up = series_coefficients(CoulombParams(params.L + 1.0, params.eta), n_top)
    z2, z3 = _seeds(params)
    vals = {2: z2}
    mags = {2: abs(z2)}
    if m_max >= 3:
        vals[3] = z3
        mags[3] = abs(z3)
    for n in range(2, n_top + 1):
        acc = z2 * up[n]
        mag = abs(acc)
        for k in range(1, n + 1):
            t = a[k] * vals[n - k + 2]
            acc -= t
            mag += abs(a[k]) * mags[n - k + 2]
        vals[n + 2] = acc
        mags[n + 2] = mag
    err = {s: 4 * s * EPS * mags[s] for s in vals}
    return ZetaTable(params, vals, "coefficient_recurrence", err)


def _quadratic(L, eta, m_max):
    a = L + 1.0
    z2 = (a * a + eta * eta) / (a * a * (2.0 * L + 3.0))
    z3 = -eta * (a * a + eta * eta) / (a ** 3 * (L + 2.0) * (2.0 * L + 3.0))
    vals = [0.0, 0.0, z2, z3]
    mags = [0.0, 0.0, abs(z2), abs(z3)]
    c = 2.0 * eta / a
    for m in range(2, m_max - 1):
        d = m + 2.0 * L + 3.0
        if abs(d) < 1e-12:
            raise DomainError(f"m + 2L + 3 vanishes at m = {m}")
        acc = -c * vals[m + 1]
        mag = abs(acc)
        for k in range(2, m + 1):
            acc += vals[k] * vals[m - k + 2]
            mag += mags[k] * mags[m - k + 2]
        vals.append(acc / d)
        mags.append(mag / abs(d))
    return vals[: m_max + 1], mags[: m_max + 1]


def zeta_via_quadratic(params, m_max):
    """Forward substitution of (m+2L+3) zeta_{m+2} + (2 eta/(L+1)) zeta_{m+1} = sum zeta_k zeta_{m-k+2}."""
    m_max = _check_mmax(m_max)
    _require_L(params.L)
    vals, mags = _quadratic(params.L, params.eta, max(m_max, 3))
    out = {s: vals[s] for s in range(2, m_max + 1)}
    err = {s: 4 * s * EPS * mags[s] for s in out}
    return ZetaTable(params, out, "quadratic_recurrence", err)


def zeta_value(L, eta, s):
    """zeta_s(L, eta) by the quadratic recurrence (a plain float)."""
    _require_L(L)
    if s < 2:
        raise DomainError("s must be >= 2")
    return _quadratic(L, eta, max(s, 3))[0][s]


# -- direct zero sums -----------------------------------------------------------------


@dataclass(frozen=True)
class ZeroSum:
    """Partial sum over listed zeros plus the modelled tail and its bound."""

    value: float
    partial: float
    tail: float
    tail_bound: float

    def __float__(self):
        return self.value


def _spacing_band(zs):
    """Half-width of the band around pi that the last listed gaps fall in."""
    if len(zs) < 3:
        return 0.0
    gaps = [abs(zs[i + 1] - zs[i]) for i in range(max(0, len(zs) - 6), len(zs) - 1)]
    return max(abs(g - math.pi) for g in gaps)


def _tail_integrals(r, s, spacing, start):
    """integral_{k >= start} (r + k*spacing)^-s dk."""
    return (r + start * spacing) ** (1 - s) / (spacing * (s - 1))


def _one_sided_tail(zs, s):
    """Tail of sum |z|^-s beyond the last listed zero as (midpoint, half-width)."""
    r = abs(zs[-1])
    hi = _tail_integrals(r, s, math.pi, 0.0)
    lo = _tail_integrals(r, s, math.pi, 1.0)
    mid = 0.5 * (hi + lo)
    # widen the model when the listed gaps have not settled to pi yet
    d = min(2.0 * _spacing_band(zs), 0.5 * math.pi)
    hi_w = _tail_integrals(r, s, math.pi - d, 0.0)
    lo_w = _tail_integrals(r, s, math.pi + d, 1.0)
    return mid, max(hi_w - mid, mid - lo_w)


def zeta_from_zeros(params, s, table, tail="integral_estimate"):
    """Direct sum of z^-s over the table's zeros, optionally with a pi-spaced tail."""
    if int(s) != s or s < 2:
        raise DomainError("s must be an integer >= 2")
    if tail not in ("none", "integral_estimate"):
        raise DomainError(f"unknown tail mode {tail!r}")
    if not table.positive and not table.negative:
        raise DomainError("zero table is empty")
    s = int(s)
    partial = math.fsum(z ** -s for z in table.positive) + math.fsum(z ** -s for z in table.negative)
    t = tb = 0.0
    if tail == "integral_estimate":
        for zs, sign in ((table.positive, 1.0), (table.negative, (-1.0) ** s)):
            if zs:
                mid, half = _one_sided_tail(zs, s)
                t += sign * mid
                tb += half
    # uncertainty of the listed zeros themselves
    n = len(table.positive) + len(table.negative)
    tb += s * table.accuracy * math.fsum(abs(z) ** (-s - 1) for z in table.positive + table.negative)
    tb += n * EPS * abs(partial)
    return ZeroSum(float(partial + t), float(partial), float(t), float(tb))


def zeta_table_from_zeros(params, m_max, table, tail="integral_estimate"):
    m_max = _check_mmax(m_max)
    vals, err = {}, {}
    for s in range(2, m_max + 1):
        r = zeta_from_zeros(params, s, table, tail)
        vals[s] = r.value
        err[s] = r.tail_bound
    return ZetaTable(params, vals, "zero_sum", err)


# -- Rayleigh sums (eta = 0) ------------------------------------------------------------


def rayleigh_sigma(nu, q):
    """sigma_{2q}(nu) = sum_n j_{nu,n}^{-2q} over the positive zeros of J_nu.

    Seeded with sigma_2 = 1/(4(nu+1)) and continued by
    (nu+q) sigma_{2q} = sum_{k=1}^{q-1} sigma_{2k} sigma_{2q-2k}.
    """
    if not nu > -1.0:
        raise DomainError(f"Rayleigh sums need nu > -1, got {nu!r}")
    if int(q) != q or q < 1:
        raise DomainError("q must be an integer >= 1")
    sig = [0.0, 1.0 / (4.0 * (nu + 1.0))]
    for p in range(2, int(q) + 1):
        sig.append(math.fsum(sig[k] * sig[p - k] for k in range(1, p)) / (nu + p))
    return sig[int(q)]


# -- generating function ----------------------------------------------------------------


def first_zero_radius(params):
    """min(x_1, -y_1): distance from the origin to the nearest zero of F_L."""
    return min(first_positive_zero(params.L, params.eta), first_positive_zero(params.L, -params.eta))


@dataclass(frozen=True)
class GeneratingCheck:
    """Both sides of the generating-function identity; unpacks as (lhs, rhs)."""

    lhs: float
    rhs: float
    truncation_bound: float

    def __iter__(self):
        return iter((self.lhs, self.rhs))

    @property
    def difference(self):
        return abs(self.lhs - self.rhs)


def generating_function_check(params, rho, m_max, policy=DEFAULT_POLICY):
    """F_{L+1}/(rho F_L) against (L+1)/sqrt((L+1)^2+eta^2) * sum_{m=0}^{m_max} zeta_{m+2} rho^m."""
    L, eta = params.L, params.eta
    _require_L(L)
    m_max = _check_mmax(m_max)
    if not rho > 0.0:
        raise DomainError("rho must be positive")
    r1 = first_zero_radius(params)
    f = eval_normalized(params, rho, policy).value
    if abs(f) <= 64 * policy.rel_tol or abs(rho - r1) < 1e-12 * r1:
        raise PoleError(f"rho = {rho!r} sits on a zero of F_L")
    if rho >= r1:
        raise DomainError(f"rho = {rho!r} lies outside the disc of convergence (radius {r1:.15g})")
    up = CoulombParams(L + 1.0, eta)
    lhs = eval_regular(up, rho, policy).value / (rho * eval_regular(params, rho, policy).value)
    a = L + 1.0
    pref = a / math.hypot(a, eta)
    vals, _ = _quadratic(L, eta, m_max + 2)
    rhs = pref * math.fsum(vals[m + 2] * rho ** m for m in range(m_max + 1))
    q = rho / r1
    bound = pref * vals[2] * q ** (m_max + 1) / (1.0 - q)
    bound += 64 * policy.rel_tol * abs(lhs)
    return GeneratingCheck(lhs, rhs, bound)


def generating_limit(params):
    """The rho -> 0 value sqrt((L+1)^2+eta^2)/((L+1)(2L+3))."""
    a = params.L + 1.0
    return math.hypot(a, params.eta) / (a * (2.0 * params.L + 3.0))


def ratio_constant(params):
    """C_{L+1}/C_L computed from the normalization constants themselves."""
    return normalization_constant(CoulombParams(params.L + 1.0, params.eta)) / normalization_constant(params)


# -- complete monotonicity probes ------------------------------------------------------

SELECTORS = ("zeta", "ratio", "scaled", "combo")


def _selector_value(selector, L, eta, m):
    """(value, magnitude of the pieces it was formed from)."""
    if selector == "combo":
        # (m+2L+3) zeta_{m+2} + (2 eta/(L+1)) zeta_{m+1}, read off the coefficient route
        t = zeta_via_coefficients(CoulombParams(L, eta), m + 2).values
        u = (m + 2.0 * L + 3.0) * t[m + 2]
        v = 2.0 * eta / (L + 1.0) * t[m + 1]
        return u + v, abs(u) + abs(v)
    z = zeta_via_coefficients(CoulombParams(L, eta), max(m, 2)).values[m]
    if selector == "zeta":
        return z, abs(z)
    if selector == "ratio":
        r = z / zeta_closed_form(CoulombParams(L, eta), 2)
        return r, abs(r)
    if selector == "scaled":
        r = (2.0 * L + 3.0) ** (m - 1) * z
        return r, abs(r)
    raise DomainError(f"unknown selector {selector!r}; expected one of {SELECTORS}")


@dataclass(frozen=True)
class CMReport:
    """Sign pattern of the divided differences (-1)^k Delta^k f / h^k, k = 0..max_order."""

    ok: bool
    identically_zero: bool
    max_order: int
    worst: tuple  # per order: min over the grid of (-1)^k D^k f / tol_k
    first_violation: tuple = None  # (order, grid index, grid point)

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {
            "ok": self.ok,
            "identically_zero": self.identically_zero,
            "max_order": self.max_order,
            "worst": list(self.worst),
            "first_violation": list(self.first_violation) if self.first_violation else None,
        }


def _uniform_step(grid):
    if len(grid) < 2:
        raise DomainError("grid needs at least two points")
    h = grid[1] - grid[0]
    if not h > 0:
        raise DomainError("grid must be strictly increasing")
    for a, b in zip(grid, grid[1:]):
        if abs((b - a) - h) > 1e-9 * max(1.0, abs(h)):
            raise DomainError("grid spacing must be uniform")
    return h


def cm_from_values(grid, values, max_order, rel_tol=1e-9, magnitudes=None):
    """Check (-1)^k Delta^k f / h^k >= -rel_tol*max|f|*(2/h)^k on a uniform grid.

    ``magnitudes`` gives the size of the pieces each value was formed from;
    values that are pure cancellation noise relative to them count as zero.
    """
    if not 0 <= max_order <= 6:
        raise DomainError("max_order must lie in 0..6")
    h = _uniform_step(grid)
    if len(values) != len(grid):
        raise DomainError("values and grid differ in length")
    scale = max(abs(v) for v in values)
    if magnitudes is not None and scale <= 1e-12 * max(magnitudes):
        scale = 0.0
    if scale == 0.0:
        return CMReport(True, True, max_order, tuple(0.0 for _ in range(max_order + 1)))
    diff = list(values)
    worst = []
    violation = None
    for k in range(max_order + 1):
        if k:
            diff = [(b - a) for a, b in zip(diff, diff[1:])]
        if not diff:
            break
        tol = rel_tol * scale * (2.0 / h) ** k
        sign = -1.0 if k % 2 else 1.0
        scaled = [sign * d / h ** k / tol for d in diff]
        worst.append(min(scaled))
        if violation is None:
            for i, v in enumerate(scaled):
                if v < -1.0:
                    violation = (k, i, grid[i])
                    break
    return CMReport(violation is None, False, max_order, tuple(worst), violation)


def cm_probe(selector, eta, m, L_grid, max_order):
    """Finite-difference probe of complete monotonicity in L of a zeta-derived function."""
    if eta > 0:
        raise DomainError("complete monotonicity is probed for eta <= 0 only")
    if any(not L > -1.0 for L in L_grid):
        raise DomainError("grid points must lie in (-1, inf)")
    if int(m) != m or m < (1 if selector == "combo" else 2):
        raise DomainError("index m too small for this selector")
    pairs = [_selector_value(selector, L, eta, int(m)) for L in L_grid]
    return cm_from_values(list(L_grid), [v for v, _ in pairs], max_order, magnitudes=[g for _, g in pairs])


def rayleigh_probe(q, nu_grid, max_order, scaled=False):
    """Complete monotonicity probe for sigma_{2q}(nu) or (nu+1)^q sigma_{2q}(nu)."""
    vals = []
    for nu in nu_grid:
        s = rayleigh_sigma(nu, q)
        vals.append((nu + 1.0) ** q * s if scaled else s)
    return cm_from_values(list(nu_grid), vals, max_order)
