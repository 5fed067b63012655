"""Regular Coulomb wave functions: evaluation, real zeros, zeta functions of the zeros,
and numerical checks of the inequalities and identities they satisfy."""

from .core import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .inequalities import *  # noqa: F401,F403
from .zeros import *  # noqa: F401,F403
from .zeta import *  # noqa: F401,F403
from . import core, errors, inequalities, zeros, zeta  # noqa: F401

__version__ = "0.1.0"
