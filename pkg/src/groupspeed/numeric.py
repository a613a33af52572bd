"""Scalar search primitives: golden-section minimization and bisection."""

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_section_minimize(f, lo, hi, width_tol=1e-8):
    """Minimize a strictly unimodal function on [lo, hi].

    Shrinks the bracket until its width falls below `width_tol` and returns
    the midpoint of the final bracket.
    """
    a, b = float(lo), float(hi)
    h = b - a
    if h <= width_tol:
        return (a + b) / 2.0

    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    fc, fd = f(c), f(d)

    n = int(math.ceil(math.log(width_tol / h) / math.log(_INVPHI)))
    for _ in range(n):
        if fc < fd:
            b, d, fd = d, c, fc
            h *= _INVPHI
            c = a + _INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h *= _INVPHI
            d = a + _INVPHI * h
            fd = f(d)
    return (a + b) / 2.0


def bisect_root(f, lo, hi, width_tol=1e-10, f_lo=None, f_hi=None):
    """Root of a continuous sign-changing function on [lo, hi].

    Returns (root, final_bracket_width); the root is the bracket midpoint.
    Raises ValueError if f(lo) and f(hi) have the same strict sign.
    """
    a, b = float(lo), float(hi)
    fa = f(a) if f_lo is None else f_lo
    fb = f(b) if f_hi is None else f_hi
    if fa == 0.0:
        return a, 0.0
    if fb == 0.0:
        return b, 0.0
    if fa * fb > 0.0:
        raise ValueError("no sign change on bracket")

    while b - a > width_tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:  # bracket at floating-point resolution
            break
        fm = f(m)
        if fm == 0.0:
            return m, 0.0
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b), b - a
