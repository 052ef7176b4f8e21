"""Supermartingales relative to convex sets of equivalent measures on finite
filtration trees: condition checks, conditional-expectation calculus, optional
decomposition, the cone solver and the unit-expectation families.

Everything lives in the compiled core; this package just re-exports it.
"""

from doobdec._core import *  # noqa: F401,F403
from doobdec._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
