"""jetlie: exact-arithmetic Lie symmetry checker on jet spaces."""

__version__ = "0.1.0"

from .expr import Expr, as_expr, assumptions, collect, is_zero  # noqa: F401
from .symbols import Kind, Symbol, parameter, symbol  # noqa: F401
