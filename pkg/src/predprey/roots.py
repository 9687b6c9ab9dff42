"""Bracketed scalar root finding for transcendental level equations."""

from __future__ import annotations

from typing import Callable

from .errors import NoSignChange


def solve_scalar_bracketed(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    tol: float = 1e-12,
    df: Callable[[float], float] | None = None,
    max_iter: int = 256,
) -> float:
    """Find a root of ``f`` inside ``bracket``.

    ``f`` must be continuous and change sign across the bracket. Each
    iteration tries a Newton step (when ``df`` is given) or a secant step,
    safeguarded to the interior of the current bracket; whenever the
    accelerated step stalls, a plain bisection step restores guaranteed
    convergence. Stops once the bracket width or ``|f|`` drops to ``tol``.
    """
    a, b = float(bracket[0]), float(bracket[1])
    if a > b:
        a, b = b, a
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise NoSignChange(
            f"no sign change on bracket: f({a!r})={fa!r}, f({b!r})={fb!r}"
        )

    stalled = 0
    for _ in range(max_iter):
        width = b - a
        if width <= tol:
            break
        x = None
        if stalled < 2:
            if df is not None:
                # Newton from the endpoint with the smaller residual
                x0, f0 = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
                d0 = df(x0)
                if d0 != 0.0:
                    x = x0 - f0 / d0
            if x is None and fb != fa:
                x = b - fb * (b - a) / (fb - fa)
            if x is not None:
                pad = 0.01 * width
                if not (a + pad < x < b - pad):
                    x = None
        if x is None:
            x = a + 0.5 * width
            stalled = 0
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0.0) == (fa > 0.0):
            a, fa = x, fx
        else:
            b, fb = x, fx
        stalled = stalled + 1 if (b - a) > 0.5 * width else 0
    return a if abs(fa) <= abs(fb) else b


def expand_bracket_left(
    f: Callable[[float], float], start: float, factor: float = 0.5, max_iter: int = 2000
) -> tuple[float, float]:
    """Shrink geometrically toward 0 from ``start`` until ``f`` changes sign.

    Requires f(start) <= 0 and f -> +inf as the argument -> 0+.
    """
    hi = start
    lo = start * factor
    for _ in range(max_iter):
        if f(lo) > 0.0:
            return lo, hi
        hi = lo
        lo *= factor
    raise NoSignChange(f"no sign change found shrinking toward 0 from {start!r}")


def expand_bracket_right(
    f: Callable[[float], float], start: float, factor: float = 2.0, max_iter: int = 2000
) -> tuple[float, float]:
    """Grow geometrically from ``start`` until ``f`` changes sign.

    Requires f(start) <= 0 and f -> +inf as the argument -> +inf.
    """
    lo = start
    hi = start * factor
    for _ in range(max_iter):
        if f(hi) > 0.0:
            return lo, hi
        lo = hi
        hi *= factor
    raise NoSignChange(f"no sign change found growing from {start!r}")
