"""Log-gamma for complex arguments via the Lanczos approximation (g = 7, n = 9)."""

import cmath
import math

from .errors import DomainError

_G = 7.0
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def loggamma(z):
    """log Gamma(z), determined up to a multiple of 2*pi*i.

    The real part is log|Gamma(z)| everywhere off the poles.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise DomainError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return math.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - loggamma(1.0 - z)
    z -= 1.0
    x = _COEF[0]
    for i in range(1, len(_COEF)):
        x += _COEF[i] / (z + i)
    t = z + _G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def log_abs_gamma(z):
    """log |Gamma(z)| for complex z."""
    return loggamma(z).real


def abs_gamma(z):
    """|Gamma(z)| for complex z."""
    return math.exp(log_abs_gamma(z))
