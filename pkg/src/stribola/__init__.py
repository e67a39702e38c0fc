"""Grid-based analysis of the operator T f = I(f*) on decreasing functions of [0, 1]."""

from .monotone_fn import *  # noqa: F401,F403
from .monotone_fn import __all__ as _mono_all
from .operators import *  # noqa: F401,F403
from .operators import __all__ as _ops_all
from .crossing import *  # noqa: F401,F403
from .crossing import __all__ as _cross_all
from .solver import *  # noqa: F401,F403
from .solver import __all__ as _solver_all

__version__ = "0.1.0"
__all__ = [*_mono_all, *_ops_all, *_cross_all, *_solver_all]
