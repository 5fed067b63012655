"""Real zeros of F_L(eta, .) and of its derivative.

Two routes are available:

* bracketing: scan NF_L on a grid, refine every sign change by bisection.
  Limited to |rho| <= rho_max of the series.
* jacobi: the reciprocals 1/z of all nonzero zeros are the eigenvalues of the
  symmetric tridiagonal operator that the three-term recurrence in L induces
  on the ladder F_{L+1}, F_{L+2}, ...  A truncation of size M resolves the
  zeros with |z| well below M, so thousands of zeros come cheap.

``method="auto"`` brackets inside the series range and continues with the
eigenvalue route beyond it, after checking the two agree on the overlap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .core import (
    DEFAULT_POLICY,
    CoulombParams,
    eval_derivative,
    eval_normalized,
    eval_regular,
)
from .errors import CoulombError, DomainError, InsufficientRangeError

__all__ = [
    "BracketPolicy",
    "ZeroTable",
    "InterlacingReport",
    "default_scan_step",
    "positive_zeros",
    "negative_zeros",
    "zero_table",
    "first_positive_zero",
    "jacobi_zeros",
    "derivative_zeros",
    "scaled_derivative_zeros",
    "check_interlacing",
    "hadamard_eval",
]

MAX_BRACKETED = 64


def default_scan_step(eta):
    return min(math.pi / 8, math.pi / (8 * (1 + abs(eta) / 4)))


@dataclass(frozen=True)
class BracketPolicy:
    scan_step: float | None = None  # None: pick from eta
    refine_tol: float = 1e-12
    max_scan: float = 25.0

    def __post_init__(self):
        if self.scan_step is not None and not 0 < self.scan_step < math.pi:
            raise DomainError("scan_step must lie in (0, pi)")
        if not self.refine_tol > 0:
            raise DomainError("refine_tol must be positive")
        if not self.max_scan > 0:
            raise DomainError("max_scan must be positive")

    def step_for(self, eta):
        return self.scan_step if self.scan_step is not None else default_scan_step(eta)


DEFAULT_BRACKETS = BracketPolicy()


@dataclass(frozen=True)
class ZeroTable:
    """Ordered zeros: ``positive`` increasing, ``negative`` decreasing."""

    params: CoulombParams
    positive: tuple = ()
    negative: tuple = ()
    accuracy: float = 0.0

    def __post_init__(self):
        pos, neg = tuple(self.positive), tuple(self.negative)
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "negative", neg)
        if any(z <= 0 for z in pos) or any(b <= a for a, b in zip(pos, pos[1:])):
            raise DomainError("positive zeros must be positive and strictly increasing")
        if any(z >= 0 for z in neg) or any(b >= a for a, b in zip(neg, neg[1:])):
            raise DomainError("negative zeros must be negative and strictly decreasing")

    def to_dict(self):
        return {
            "L": self.params.L,
            "eta": self.params.eta,
            "positive": list(self.positive),
            "negative": list(self.negative),
            "accuracy": self.accuracy,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data):
        return cls(
            CoulombParams(data["L"], data["eta"]),
            tuple(data["positive"]),
            tuple(data["negative"]),
            float(data["accuracy"]),
        )


# -- bracketing --------------------------------------------------------------


def _bisect(f, a, b, fa, tol):
    """Shrink [a, b] around a sign change of f until b - a <= tol."""
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _scan(f, nodes, count, tol):
    """Zeros of f from sign changes between consecutive grid nodes."""
    found = []
    a, fa = nodes[0], f(nodes[0])
    for b in nodes[1:]:
        fb = f(b)
        if fb == 0.0:
            found.append(b)
        elif fa != 0.0 and (fa > 0) != (fb > 0):
            found.append(_bisect(f, a, b, fa, tol))
        if len(found) >= count:
            break
        a, fa = b, fb
    return found[:count]


def _uniform_nodes(start, stop, step):
    n = int(math.floor((stop - start) / step + 1e-9))
    nodes = [start + k * step for k in range(n + 1)]
    if stop - nodes[-1] > 1e-12:
        nodes.append(stop)
    return nodes


def _bracketed_positive(params, count, policy, core_policy):
    if count > MAX_BRACKETED:
        raise InsufficientRangeError(f"bracketing is limited to {MAX_BRACKETED} zeros per sign")
    stop = min(policy.max_scan, core_policy.rho_max)

    def nf(r):
        return eval_normalized(params, r, core_policy).value

    # NF_L(eta, 0) = 1, so the scan may start at the origin
    nodes = _uniform_nodes(0.0, stop, policy.step_for(params.eta))
    return _scan(nf, nodes, count, policy.refine_tol)


@lru_cache(maxsize=1024)
def first_positive_zero(L, eta):
    """x_{L,eta,1} for any ladder order L (shifted orders L-1 included).

    Returns inf when F_L keeps its sign up to the scan limit.  At L = -1 with
    eta != 0 the function is sign(eta) F_0, so the zero of F_0 is returned.
    """
    if eta != 0.0 and L == -1.0:
        L = 0.0
    found = _bracketed_positive(CoulombParams.ladder(L, eta), 1, DEFAULT_BRACKETS, DEFAULT_POLICY)
    return found[0] if found else math.inf


# -- eigenvalue route --------------------------------------------------------------


def _jacobi_bands(L, eta, size):
    ell = L + np.arange(1, size + 1, dtype=float)
    diag = -eta / (ell * (ell + 1.0))
    if eta == 0.0:
        diag = np.zeros(size)
    e = ell[:-1]
    off = np.sqrt((e + 1.0) ** 2 + eta * eta) / ((e + 1.0) * np.sqrt((2 * e + 1.0) * (2 * e + 3.0)))
    return diag, off


def _jacobi_select(L, eta, size, n_pos, n_neg):
    diag, off = _jacobi_bands(L, eta, size)
    pos = neg = np.empty(0)
    if n_pos + n_neg > size // 20:
        # a full root-free QR sweep beats bisection once many eigenvalues are wanted
        ev = eigvalsh_tridiagonal(diag, off, lapack_driver="sterf")
        if n_pos:
            pos = 1.0 / ev[size - n_pos:][::-1]
        if n_neg:
            neg = 1.0 / ev[:n_neg]
        return pos, neg
    if n_pos:
        pos = eigvalsh_tridiagonal(diag, off, select="i", select_range=(size - n_pos, size - 1))
        pos = 1.0 / pos[::-1]
    if n_neg:
        neg = eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, n_neg - 1))
        neg = 1.0 / neg
    return pos, neg


def _jacobi_size(reach, L, eta):
    return int(1.25 * reach + 6.0 * reach ** (1.0 / 3.0) + 2.0 * abs(eta) + abs(L) + 40)


def jacobi_zeros(params, n_pos, n_neg=0):
    """Zeros from eigenvalues of the truncated recurrence operator.

    Returns (positive, negative, accuracy); the accuracy is the change seen
    when the truncation is enlarged.
    """
    L, eta = params.L, params.eta
    if L + 1.0 <= -0.5 + 1e-12:
        raise DomainError("eigenvalue route needs L > -3/2")
    if n_pos == 0 and n_neg == 0:
        return (), (), 0.0
    n = max(n_pos, n_neg)
    reach = (n + 1.0 + abs(L)) * math.pi + 2.0 * abs(eta) * math.log(2.0 + n)
    for _ in range(8):
        size = max(_jacobi_size(reach, L, eta), n_pos + n_neg + 8)
        pos, neg = _jacobi_select(L, eta, size, n_pos, n_neg)
        if (n_pos and (pos[-1] <= 0)) or (n_neg and (neg[-1] >= 0)):
            reach *= 1.5
            continue
        far = max(abs(pos[-1]) if n_pos else 0.0, abs(neg[-1]) if n_neg else 0.0)
        if _jacobi_size(far, L, eta) <= size:
            break
        reach = far * 1.1
    else:
        raise CoulombError("eigenvalue route failed to size its truncation")
    # the farthest requested zeros converge last; recompute just those on an
    # enlarged truncation (a few bisected eigenvalues cost O(size) each)
    bigger = size + max(40, size // 5)
    diag, off = _jacobi_bands(L, eta, bigger)
    drift = 0.0
    tail = 8
    if n_pos:
        k = min(tail, n_pos)
        ev = eigvalsh_tridiagonal(diag, off, select="i", select_range=(bigger - n_pos, bigger - n_pos + k - 1))
        drift = max(drift, float(np.max(np.abs(1.0 / ev[::-1] - pos[n_pos - k:]))))
    if n_neg:
        k = min(tail, n_neg)
        ev = eigvalsh_tridiagonal(diag, off, select="i", select_range=(n_neg - k, n_neg - 1))
        drift = max(drift, float(np.max(np.abs(1.0 / ev - neg[n_neg - k:]))))
    # eigenvalue error ~ eps * ||T|| maps to eps * z^2 on the zero
    roundoff = 4.0 * float(np.finfo(float).eps) * far * far
    return tuple(float(z) for z in pos), tuple(float(z) for z in neg), float(max(drift, roundoff))


# -- public zero tables ----------------------------------------------------------------


def _merge(found, eig, acc, refine_tol):
    """Bracketed zeros first, eigenvalue zeros beyond them, after checking the overlap."""
    k = len(found)
    if k:
        gap = max(abs(a - b) for a, b in zip(found, eig[:k]))
        if gap > 1e-8 * max(1.0, found[-1]):
            raise CoulombError(f"bracketed and eigenvalue zeros disagree by {gap:.3g}")
    return tuple(found) + tuple(eig[k:]), max(acc, refine_tol)


def _positive(params, count, policy, core_policy, method, eig=None):
    """``eig`` optionally supplies precomputed (zeros, accuracy) from the eigenvalue route."""
    if count < 0:
        raise DomainError("count must be non-negative")
    if count == 0:
        return (), 0.0
    if method == "jacobi":
        if eig is None:
            pos, _, acc = jacobi_zeros(params, count)
            eig = (pos, acc)
        return eig
    if method not in ("bisect", "auto"):
        raise DomainError(f"unknown method {method!r}")
    if method == "bisect" or count <= MAX_BRACKETED:
        found = _bracketed_positive(params, min(count, MAX_BRACKETED), policy, core_policy)
        if len(found) >= count:
            return tuple(found), policy.refine_tol
        if method == "bisect":
            raise InsufficientRangeError(
                f"found {len(found)} of {count} zeros below rho={min(policy.max_scan, core_policy.rho_max):g}"
            )
    else:
        found = _bracketed_positive(params, MAX_BRACKETED, policy, core_policy)
    if eig is None:
        pos, _, acc = jacobi_zeros(params, count)
        eig = (pos, acc)
    return _merge(found, eig[0], eig[1], policy.refine_tol)


def positive_zeros(params, count, policy=DEFAULT_BRACKETS, core_policy=DEFAULT_POLICY, method="auto"):
    """First ``count`` positive zeros x_{L,eta,n} as a ZeroTable."""
    pos, acc = _positive(params, count, policy, core_policy, method)
    return ZeroTable(params, pos, (), acc)


def negative_zeros(params, count, policy=DEFAULT_BRACKETS, core_policy=DEFAULT_POLICY, method="auto"):
    """First ``count`` negative zeros y_{L,eta,n} = -x_{L,-eta,n}.

    The parity NF_L(eta, -rho) = NF_L(-eta, rho) maps the negative axis onto
    the positive one; zeros inside the series range are re-checked by a
    direct sign test of NF_L(eta, .) on the negative axis.
    """
    return _negative(params, count, policy, core_policy, method, None)


def _negative(params, count, policy, core_policy, method, eig):
    mirror = CoulombParams.ladder(params.L, -params.eta) if params.eta != 0.0 else params
    pos, acc = _positive(mirror, count, policy, core_policy, method, eig)
    neg = tuple(-z for z in pos)
    delta = max(16 * acc, 1e-9)
    for y in neg:
        if abs(y) + delta > core_policy.rho_max:
            break
        lo = eval_normalized(params, y - delta, core_policy).value
        hi = eval_normalized(params, y + delta, core_policy).value
        if (lo > 0) == (hi > 0):
            raise CoulombError(f"no sign change of NF_L around mirrored zero {y:.15g}")
    return ZeroTable(params, (), neg, acc)


def zero_table(params, count, policy=DEFAULT_BRACKETS, core_policy=DEFAULT_POLICY, method="auto"):
    """Both signs, ``count`` zeros each."""
    eig_pos = eig_neg = None
    if method == "jacobi" or (method == "auto" and count > MAX_BRACKETED):
        # one eigenvalue solve yields both signs
        p, n, acc = jacobi_zeros(params, count, count)
        eig_pos, eig_neg = (p, acc), (tuple(-z for z in n), acc)
    pos, pacc = _positive(params, count, policy, core_policy, method, eig_pos)
    neg = _negative(params, count, policy, core_policy, method, eig_neg)
    return ZeroTable(params, pos, neg.negative, max(pacc, neg.accuracy))


# -- derivative zeros -------------------------------------------------------------------


def _nodes_between(zeros, step):
    nodes = [step / 16.0]
    prev = 0.0
    for z in zeros:
        pieces = max(2, int(math.ceil((z - prev) / step)))
        nodes.extend(prev + (z - prev) * k / pieces for k in range(1, pieces))
        nodes.append(z)
        prev = z
    return nodes


def _zeros_of(g, params, count, policy, core_policy, extra):
    if count < 0:
        raise DomainError("count must be non-negative")
    if count == 0:
        return ()
    want = min(count + extra, MAX_BRACKETED)
    fz = _bracketed_positive(params, want, policy, core_policy)
    step = policy.step_for(params.eta)
    nodes = _nodes_between(fz, step)
    if len(fz) < want:
        # F has run out of zeros inside the series range; scan what remains of it
        stop = min(policy.max_scan, core_policy.rho_max)
        nodes.extend(x for x in _uniform_nodes(nodes[-1], stop, step)[1:])
    found = _scan(g, nodes, count, policy.refine_tol)
    if len(found) < count:
        raise InsufficientRangeError(f"found {len(found)} of {count} derivative zeros")
    return tuple(found)


def derivative_zeros(params, count, policy=DEFAULT_BRACKETS, core_policy=DEFAULT_POLICY):
    """First ``count`` positive zeros of F_L'(eta, .), L > -1/2.

    Every sign change of F_L' on a grid whose nodes include the zeros of F_L
    is reported, so a second zero inside one gap would surface rather than
    be hidden.
    """
    if params.L <= -0.5:
        raise DomainError("derivative zeros need L > -1/2")
    return _zeros_of(
        lambda r: eval_derivative(params, r, core_policy).value, params, count, policy, core_policy, 0
    )


def scaled_derivative_zeros(params, count, policy=DEFAULT_BRACKETS, core_policy=DEFAULT_POLICY):
    """First ``count`` positive zeros of rho F_L' - (L+1) F_L, L > -1."""
    if params.L <= -1.0:
        raise DomainError("needs L > -1")
    lp = params.L + 1.0

    def g(r):
        return r * eval_derivative(params, r, core_policy).value - lp * eval_regular(params, r, core_policy).value

    return _zeros_of(g, params, count, policy, core_policy, 1)


# -- interlacing -------------------------------------------------------------------


@dataclass(frozen=True)
class InterlacingReport:
    ok: bool
    first_violation: int | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def check_interlacing(a, b):
    """Do the increasing sequences ``a`` and ``b`` strictly alternate?

    Between consecutive entries of either list there must be exactly one
    entry of the other.  ``first_violation`` indexes the merged sequence.
    """
    for name, seq in (("a", a), ("b", b)):
        if any(y <= x for x, y in zip(seq, seq[1:])):
            raise DomainError(f"{name} must be strictly increasing")
    merged = sorted([(x, 0) for x in a] + [(x, 1) for x in b])
    for i in range(1, len(merged)):
        (x0, s0), (x1, s1) = merged[i - 1], merged[i]
        if x0 == x1:
            return InterlacingReport(False, i, f"shared value {x1!r}")
        if s0 == s1:
            src = "ab"[s1]
            return InterlacingReport(False, i, f"two consecutive entries of {src}: {x0!r}, {x1!r}")
    return InterlacingReport(True)


# -- Hadamard product -------------------------------------------------------------------


def hadamard_eval(params, rho, table):
    """exp(eta rho/(L+1)) * prod (1 - rho/z) exp(rho/z) over the table's zeros.

    Approximates NF_L(eta, rho); the truncation error shrinks as zeros are added.
    """
    if params.L == -1.0:
        raise DomainError("L = -1 has no exponential factor")
    zeros = table.positive + table.negative
    if not zeros:
        raise DomainError("table holds no zeros")
    rho = float(rho)
    if rho == 0.0:
        return 1.0
    log_mag = params.eta * rho / (params.L + 1.0)
    negative = False
    for z in zeros:
        u = rho / z
        if abs(1.0 - u) <= 4 * np.finfo(float).eps:
            raise DomainError(f"rho={rho!r} coincides with the listed zero {z!r}")
        factor = 1.0 - u
        if factor < 0:
            negative = not negative
        log_mag += math.log(abs(factor)) + u if abs(u) > 0.5 else math.log1p(-u) + u
    value = math.exp(log_mag)
    return -value if negative else value
