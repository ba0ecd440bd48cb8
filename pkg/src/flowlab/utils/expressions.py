"""Index expressions such as ``1/2 + 1/n`` used by TOML inputs.

Expressions are parsed with sympy, so no Python code from an input file is
ever executed.
"""

from functools import lru_cache
from typing import Callable, Union

import sympy

from flowlab.errors import InputError

INDEX_SYMBOL = sympy.Symbol("n", integer=True)

Number = Union[int, float]


@lru_cache(maxsize=256)
def _compile(text: str) -> Callable[[int], float]:
    try:
        expr = sympy.sympify(text, locals={"n": INDEX_SYMBOL})
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise InputError(f"cannot parse expression {text!r}: {e}") from e

    unknown = expr.free_symbols - {INDEX_SYMBOL}
    if unknown:
        names = ", ".join(sorted(str(s) for s in unknown))
        raise InputError(f"expression {text!r} uses unknown symbols: {names}")

    def evaluate(n: int) -> float:
        value = expr.subs(INDEX_SYMBOL, n)
        if not value.is_real or value.is_infinite:
            raise InputError(f"expression {text!r} is not a finite real at n={n}")
        return float(value)

    return evaluate


def index_function(source: Union[str, Number]) -> Callable[[int], float]:
    """Turn a TOML value into a function of the index ``n``.

    Args:
        source: A number (constant function) or a sympy expression in ``n``

    Returns:
        Function mapping an integer index to a float

    Raises:
        InputError: If the expression cannot be parsed or evaluated
    """
    if isinstance(source, bool):
        raise InputError(f"expected a number or expression, got {source!r}")
    if isinstance(source, (int, float)):
        constant = float(source)
        return lambda n: constant
    if not isinstance(source, str):
        raise InputError(f"expected a number or expression, got {source!r}")
    return _compile(source.strip())
