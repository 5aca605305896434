"""Derivative-free scalar maximization on a closed interval."""

from __future__ import annotations

import math
from typing import Callable

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8
) -> float:
    """Return the maximizer of a unimodal ``f`` on ``[lo, hi]``.

    The bracket is shrunk until its width is below ``tol``; the endpoints are
    then compared against the interior estimate so that boundary maxima are
    returned exactly (ties resolve to the bound).
    """
    if hi < lo:
        raise ValueError("empty interval")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    best, fbest = x, fx
    for edge in (lo, hi):
        fe = f(edge)
        if fe >= fbest:
            best, fbest = edge, fe
    return best
