"""Regular Coulomb wave functions F_L(eta, rho) from their power series.

F_L(eta, rho) = C_L(eta) rho**(L+1) * NF_L(eta, rho), where the normalized
function NF_L = sum_n a_{L,n} rho**n is entire in rho with NF_L(eta, 0) = 1.
The coefficients obey

    a_0 = 1,  a_1 = eta/(L+1),  n(n+2L+1) a_n = 2 eta a_{n-1} - a_{n-2}.

The alternating series cancels badly once rho grows (at rho = 20 the largest
summand is ~1e8 times the sum), so both the coefficients and the partial sums
are carried in double-double arithmetic and only the final value is rounded.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

from . import _dd
from .errors import ConvergenceError, DomainError, PoleError, SingularCoefficientError
from .gamma import log_abs_gamma

__all__ = [
    "CoulombParams",
    "SeriesPolicy",
    "EvalResult",
    "DEFAULT_POLICY",
    "normalization_constant",
    "series_coefficients",
    "eval_normalized",
    "eval_normalized_derivative",
    "eval_regular",
    "eval_regular_order",
    "eval_derivative",
    "derivative_from_upper",
    "derivative_from_lower",
    "recurrence_BC",
    "ode_residual",
    "ode_terms",
    "log_derivative",
]

# exclusion half-widths around the excluded orders
_ORDER_WINDOW = 1e-8
_DENOM_WINDOW = 1e-12


@dataclass(frozen=True)
class CoulombParams:
    """Order ``L`` and Sommerfeld parameter ``eta``.

    Valid when L > -3/2, and L != -1 unless eta == 0.
    """

    L: float
    eta: float

    def __post_init__(self):
        L, eta = float(self.L), float(self.eta)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "eta", eta)
        if not (math.isfinite(L) and math.isfinite(eta)):
            raise DomainError("L and eta must be finite")
        if L <= -1.5 + _ORDER_WINDOW:
            raise DomainError(f"L must exceed -3/2, got L={L:g}")
        if eta != 0.0 and abs(L + 1.0) < _ORDER_WINDOW:
            raise DomainError("L = -1 is excluded when eta != 0")

    @classmethod
    def ladder(cls, L, eta):
        """Build an order on a recurrence ladder without the L > -3/2 check.

        Used for the shifted orders L-1 that Turan expressions need; the
        series itself still refuses orders where its recurrence is singular.
        """
        self = object.__new__(cls)
        object.__setattr__(self, "L", float(L))
        object.__setattr__(self, "eta", float(eta))
        return self


@dataclass(frozen=True)
class SeriesPolicy:
    rel_tol: float = 1e-16
    max_terms: int = 600
    rho_max: float = 25.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.max_terms < 10:
            raise DomainError("max_terms must be at least 10")
        if not self.rho_max > 0:
            raise DomainError("rho_max must be positive")


DEFAULT_POLICY = SeriesPolicy()


@dataclass(frozen=True)
class EvalResult:
    value: float
    terms_used: int
    est_abs_error: float

    def __float__(self):
        return self.value


# -- normalization ----------------------------------------------------------


@lru_cache(maxsize=4096)
def _normalization_constant(L, eta):
    if eta == 0.0 and L == -1.0:
        # right-hand limit of 2^L |Gamma(L+1)| / Gamma(2L+2); gives F_{-1}(0, rho) = cos(rho)
        return 1.0
    two_l2 = 2.0 * L + 2.0
    if two_l2 <= 0 and two_l2 == math.floor(two_l2):
        raise DomainError(f"Gamma(2L+2) has a pole at L={L:g}")
    if L >= 0 and L == math.floor(L) and L < 170:
        n = int(L)
        if eta == 0.0:
            return 2.0 ** n * math.factorial(n) / math.factorial(2 * n + 1)
        # product form, valid for integer L >= 0
        log_prod = sum(math.log(k * k + eta * eta) for k in range(n + 1))
        if eta > 0:
            log_den = math.log(eta) + 2 * math.pi * eta + math.log1p(-math.exp(-2 * math.pi * eta))
        else:
            log_den = math.log(-eta) + math.log(-math.expm1(2 * math.pi * eta))
        log_c = n * math.log(2.0) - math.lgamma(2 * n + 2) + 0.5 * (math.log(2 * math.pi) + log_prod - log_den)
        return math.exp(log_c)
    if eta == 0.0:
        log_abs_num = math.lgamma(L + 1.0)
    else:
        log_abs_num = log_abs_gamma(complex(L + 1.0, eta))
    log_den = math.lgamma(two_l2)
    sign = math.copysign(1.0, math.gamma(two_l2)) if two_l2 < 0 else 1.0
    return sign * math.exp(L * math.log(2.0) - 0.5 * math.pi * eta + log_abs_num - log_den)


def normalization_constant(params):
    """C_L(eta) = 2^L exp(-pi eta/2) |Gamma(L+1+i eta)| / Gamma(2L+2).

    Integer L >= 0 uses the closed product form; other orders go through the
    Lanczos log-gamma.  At (L, eta) = (-1, 0) the one-sided limit 1 is used.
    """
    return _normalization_constant(params.L, params.eta)


# -- coefficients -------------------------------------------------------------


class _CoefficientCache:
    """Grow-only store of double-double coefficients a_{L,n} per (L, eta)."""

    def __init__(self, maxsize=256):
        self._lock = threading.Lock()
        self._store = {}
        self._maxsize = maxsize

    def get(self, L, eta, n):
        key = (L, eta)
        with self._lock:
            coeffs = self._store.get(key)
            if coeffs is None:
                if len(self._store) >= self._maxsize:
                    self._store.pop(next(iter(self._store)))
                coeffs = _initial_coefficients(L, eta)
                self._store[key] = coeffs
            if len(coeffs) <= n:
                _extend_coefficients(coeffs, L, eta, n)
            return coeffs


def _initial_coefficients(L, eta):
    if eta == 0.0:
        a1 = (0.0, 0.0)
    else:
        a1 = _dd.div((eta, 0.0), _dd.two_sum(L, 1.0))
    return [(1.0, 0.0), a1]


def _extend_coefficients(coeffs, L, eta, n_max):
    two_l1 = _dd.two_sum(2.0 * L, 1.0)
    two_eta = 2.0 * eta
    for n in range(len(coeffs), n_max + 1):
        shifted = _dd.add_d(two_l1, float(n))
        if abs(_dd.to_float(shifted)) < _DENOM_WINDOW:
            raise DomainError(f"coefficient recurrence singular: n+2L+1 = 0 at n={n}, L={L:g}")
        den = _dd.mul_d(shifted, float(n))
        num = _dd.add(_dd.mul_d(coeffs[n - 1], two_eta), (-coeffs[n - 2][0], -coeffs[n - 2][1]))
        if num[0] == 0.0:
            coeffs.append((0.0, 0.0))
        else:
            coeffs.append(_dd.div(num, den))


_COEFFS = _CoefficientCache()


def series_coefficients(params, n_max):
    """Return [a_{L,0}, ..., a_{L,n_max}] rounded to double."""
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    coeffs = _COEFFS.get(params.L, params.eta, n_max)
    return [_dd.to_float(c) for c in coeffs[: n_max + 1]]


# -- series summation ------------------------------------------------------------


def _check_rho(rho, policy):
    if not math.isfinite(rho):
        raise DomainError("rho must be finite")
    if abs(rho) > policy.rho_max:
        raise DomainError(f"|rho|={abs(rho):g} exceeds rho_max={policy.rho_max:g}")


def _sum(L, eta, rho, policy, order=0):
    """Sum d^k/drho^k of sum_n a_n rho^n for k = ``order`` (0 or 1).

    Stops once three consecutive terms are each below rel_tol times the
    current partial sum, or below the double-double noise floor of the
    largest partial sum seen.  Returns (value, terms_used, est_abs_error).
    """
    coeffs = _COEFFS.get(L, eta, 64)
    S = (0.0, 0.0)
    power = (1.0, 0.0)  # rho ** (n - order)
    big = 0.0
    quiet = 0
    n = order
    max_terms = policy.max_terms
    while True:
        if n >= max_terms:
            raise ConvergenceError(
                f"series for L={L:g}, eta={eta:g} did not converge at rho={rho:g} in {max_terms} terms"
            )
        if n >= len(coeffs):
            coeffs = _COEFFS.get(L, eta, 2 * n)
        a = coeffs[n]
        if order:
            a = _dd.mul_d(a, float(n))
        term = _dd.mul(a, power)
        S = _dd.add(S, term)
        mag = abs(S[0])
        if mag > big:
            big = mag
        if abs(term[0]) <= policy.rel_tol * max(mag, _dd.EPS * big):
            quiet += 1
            if quiet == 3:
                break
        else:
            quiet = 0
        power = _dd.mul_d(power, rho)
        n += 1
    if n + 1 >= len(coeffs):
        coeffs = _COEFFS.get(L, eta, n + 2)
    nxt = _dd.to_float(coeffs[n + 1]) * (n + 1 if order else 1) * _dd.to_float(power) * rho
    value = _dd.to_float(S)
    err = abs(nxt) + _dd.EPS * (n + 1) * big + 2.0 ** -53 * abs(value)
    return value, n + 1, err


def eval_normalized(params, rho, policy=DEFAULT_POLICY):
    """NF_L(eta, rho) = sum_n a_{L,n} rho^n; exactly 1 at rho = 0."""
    rho = float(rho)
    _check_rho(rho, policy)
    if rho == 0.0:
        return EvalResult(1.0, 1, 0.0)
    value, used, err = _sum(params.L, params.eta, rho, policy)
    return EvalResult(value, used, err)


def eval_normalized_derivative(params, rho, policy=DEFAULT_POLICY):
    """d/drho NF_L(eta, rho) by term-by-term differentiation of the series."""
    rho = float(rho)
    _check_rho(rho, policy)
    value, used, err = _sum(params.L, params.eta, rho, policy, order=1)
    return EvalResult(value, used, err)


def _power(rho, exponent, L):
    if rho > 0:
        return rho ** exponent
    if L != math.floor(L):
        raise DomainError(f"rho={rho:g} <= 0 needs integer L for a real rho**(L+1); got L={L:g}")
    if rho == 0.0 and exponent < 0:
        raise DomainError("rho = 0 is singular for this order")
    return rho ** int(exponent)


def eval_regular(params, rho, policy=DEFAULT_POLICY):
    """F_L(eta, rho) = C_L(eta) rho^(L+1) NF_L(eta, rho)."""
    rho = float(rho)
    scale = normalization_constant(params) * _power(rho, params.L + 1.0, params.L)
    nf = eval_normalized(params, rho, policy)
    return EvalResult(scale * nf.value, nf.terms_used, abs(scale) * nf.est_abs_error)


def eval_regular_order(L, eta, rho, policy=DEFAULT_POLICY):
    """F at an arbitrary ladder order, including the eta != 0 limit at L = -1.

    As L -> -1 with eta != 0 the function tends to sign(eta) F_0(eta, rho),
    which is also what the lowering recurrence gives at L = 0.
    """
    if eta != 0.0 and L == -1.0:
        return math.copysign(1.0, eta) * eval_regular(CoulombParams(0.0, eta), rho, policy).value
    return eval_regular(CoulombParams.ladder(L, eta), rho, policy).value


# -- derivatives -------------------------------------------------------------------


def _upper_weight(L, eta):
    lp = L + 1.0
    return (lp * lp + eta * eta) / (lp * lp * (2.0 * L + 3.0))


def eval_derivative(params, rho, policy=DEFAULT_POLICY):
    """F_L'(eta, rho) from NF_L and NF_{L+1}.

    Uses NF_L' = eta/(L+1) NF_L - ((L+1)^2+eta^2)/((L+1)^2 (2L+3)) rho NF_{L+1},
    so no 1/rho appears and rho = 0 is fine for L >= 0.
    """
    L, eta = params.L, params.eta
    rho = float(rho)
    if L == -1.0:
        raise DomainError("derivative route needs L != -1")
    if rho == 0.0 and L < 0:
        raise DomainError("F_L' is singular at rho = 0 for L < 0")
    if rho < 0 and L != math.floor(L):
        raise DomainError("rho <= 0 needs integer L")
    lp = L + 1.0
    f0 = eval_normalized(params, rho, policy)
    f1 = eval_normalized(CoulombParams.ladder(L + 1.0, eta), rho, policy)
    k = _upper_weight(L, eta)
    inner = (lp + rho * eta / lp) * f0.value - k * rho * rho * f1.value
    err = (abs(lp) + abs(rho * eta / lp)) * f0.est_abs_error + k * rho * rho * f1.est_abs_error
    if rho == 0.0:
        scale = normalization_constant(params) * (1.0 if L == 0 else 0.0)
    else:
        scale = normalization_constant(params) * _power(rho, L, L)
    return EvalResult(scale * inner, max(f0.terms_used, f1.terms_used), abs(scale) * err)


def derivative_from_upper(params, rho, policy=DEFAULT_POLICY):
    """F_L' = [(L+1)/rho + eta/(L+1)] F_L - sqrt((L+1)^2+eta^2)/(L+1) F_{L+1}."""
    L, eta = params.L, params.eta
    lp = L + 1.0
    if rho == 0.0 or lp == 0.0:
        raise DomainError("needs rho != 0 and L != -1")
    fl = eval_regular(params, rho, policy).value
    fu = eval_regular_order(L + 1.0, eta, rho, policy)
    return (lp / rho + eta / lp) * fl - math.hypot(lp, eta) / lp * fu


def derivative_from_lower(params, rho, policy=DEFAULT_POLICY):
    """F_L' = [sqrt(L^2+eta^2) F_{L-1} - (L^2/rho + eta) F_L] / L."""
    L, eta = params.L, params.eta
    if rho == 0.0 or L == 0.0:
        raise DomainError("needs rho != 0 and L != 0")
    fl = eval_regular(params, rho, policy).value
    fd = eval_regular_order(L - 1.0, eta, rho, policy)
    return (math.hypot(L, eta) * fd - (L * L / rho + eta) * fl) / L


def recurrence_BC(params, rho):
    """Coefficients (B, C) with F_L = B F_{L+1} + C F_{L-1}."""
    L, eta = params.L, params.eta
    rho = float(rho)
    if rho == 0.0:
        raise SingularCoefficientError("rho = 0")
    if 2.0 * L + 1.0 == 0.0:
        raise SingularCoefficientError("L = -1/2")
    if eta == 0.0:
        # the Bessel recurrence; the general form is 0/0 at L in {0, -1}
        b = rho / (2.0 * L + 1.0)
        return b, b
    den = L * (L + 1.0) / rho + eta
    if abs(den) <= 1e-14 * (abs(L * (L + 1.0) / rho) + abs(eta)) or den == 0.0:
        raise SingularCoefficientError(f"L(L+1)/rho + eta vanishes at L={L:g}, eta={eta:g}, rho={rho:g}")
    den *= 2.0 * L + 1.0
    return L * math.hypot(L + 1.0, eta) / den, (L + 1.0) * math.hypot(L, eta) / den


# -- ODE check -----------------------------------------------------------------


def ode_terms(params, rho, policy=DEFAULT_POLICY):
    """Return (w'', q(rho) w) for w = F_L and q = 1 - 2 eta/rho - L(L+1)/rho^2.

    w'' is summed term by term from the series, independently of the ODE.
    """
    L, eta = params.L, params.eta
    rho = float(rho)
    if rho <= 0.0:
        raise DomainError("ODE residual needs rho > 0")
    _check_rho(rho, policy)
    coeffs = _COEFFS.get(L, eta, 64)
    S0 = (0.0, 0.0)
    S2 = (0.0, 0.0)
    power = (1.0, 0.0)
    big = 0.0
    quiet = 0
    n = 0
    while True:
        if n >= policy.max_terms:
            raise ConvergenceError("ODE series did not converge")
        if n >= len(coeffs):
            coeffs = _COEFFS.get(L, eta, 2 * n)
        term = _dd.mul(coeffs[n], power)
        S0 = _dd.add(S0, term)
        term2 = _dd.mul_d(term, (n + L + 1.0) * (n + L))
        S2 = _dd.add(S2, term2)
        big = max(big, abs(S0[0]), abs(S2[0]))
        limit = policy.rel_tol * max(min(abs(S0[0]), abs(S2[0])), _dd.EPS * big)
        if abs(term[0]) <= limit and abs(term2[0]) <= limit:
            quiet += 1
            if quiet == 3:
                break
        else:
            quiet = 0
        power = _dd.mul_d(power, rho)
        n += 1
    scale = normalization_constant(params) * rho ** (L - 1.0)
    second = scale * _dd.to_float(S2)
    potential = scale * (rho * rho - 2.0 * eta * rho - L * (L + 1.0)) * _dd.to_float(S0)
    return second, potential


def ode_residual(params, rho, policy=DEFAULT_POLICY):
    """w'' + [1 - 2 eta/rho - L(L+1)/rho^2] w for w = F_L; rounding-level."""
    second, potential = ode_terms(params, rho, policy)
    return second + potential


def log_derivative(params, rho, policy=DEFAULT_POLICY):
    """F_L'/F_L; raises PoleError when |NF_L| <= rel_tol."""
    rho = float(rho)
    if rho <= 0.0:
        raise DomainError("log derivative needs rho > 0")
    nf = eval_normalized(params, rho, policy)
    if abs(nf.value) <= policy.rel_tol:
        raise PoleError(f"rho={rho:g} is at a zero of F_L")
    return eval_derivative(params, rho, policy).value / eval_regular(params, rho, policy).value
