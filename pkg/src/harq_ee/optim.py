"""Golden-section search with runtime unimodality checks.

The searches in this package target objectives argued (not proved) to be
unimodal, so the three-point bracket condition is asserted while iterating
and violations surface as BracketError instead of a silently wrong optimum.
"""

from __future__ import annotations

import math

from .errors import BracketError

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def minimize_unimodal(f, lo: float, hi: float, tol: float = 1e-9) -> tuple[float, float]:
    """Golden-section minimum of f on [lo, hi]; returns (x, f(x)).

    Requires an interior bracket: some coarse probe must beat both endpoints,
    otherwise a BracketError is raised (boundary minima are the caller's
    business to rule out).
    """
    if not (hi > lo):
        raise ValueError(f"empty interval [{lo}, {hi}]")
    a, b, c = _coarse_bracket(f, lo, hi)
    return _golden(f, a, c, b, tol)


def _coarse_bracket(f, lo, hi, n=65):
    xs = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    fs = [f(x) for x in xs]
    k = min(range(n), key=fs.__getitem__)
    if k == 0 or k == n - 1:
        raise BracketError(
            f"no interior minimum on [{lo}, {hi}]: coarse scan bottoms out at the boundary"
        )
    return xs[k - 1], xs[k], xs[k + 1]


def _golden(f, a, c, probe, tol):
    fa, fc, fp = f(a), f(c), f(probe)
    if not (fp <= fa and fp <= fc):
        raise BracketError("three-point condition violated at bracket construction")
    x1 = c - _INVPHI * (c - a)
    x2 = a + _INVPHI * (c - a)
    f1, f2 = f(x1), f(x2)
    while c - a > tol:
        if f1 <= f2:
            c, x2, f2 = x2, x1, f1
            x1 = c - _INVPHI * (c - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (c - a)
            f2 = f(x2)
        # Interior best must keep dominating the original endpoints.
        if min(f1, f2) > min(fa, fc) + _slack(fa, fc):
            raise BracketError("three-point condition violated while shrinking the bracket")
    x = 0.5 * (a + c)
    return x, f(x)


def _slack(fa, fc):
    return 1e-12 * (1.0 + abs(fa) + abs(fc))


def maximize_on_ray(f, x0: float, x_cap: float, tol: float = 1e-9) -> tuple[float, float]:
    """Maximum of f over (0, x_cap] by geometric bracket expansion from x0.

    f must vanish at 0+, rise to a single interior peak and decay; the
    expansion doubles until the objective turns over, then golden-section
    refines inside the bracket. Returns (x, f(x)).
    """
    if not (0 < x0 < x_cap):
        raise ValueError(f"need 0 < x0 < x_cap, got x0={x0}, x_cap={x_cap}")
    xs, fs = [x0], [f(x0)]
    x = x0
    while True:
        x = min(x * 2.0, x_cap)
        xs.append(x)
        fs.append(f(x))
        if len(fs) >= 2 and fs[-1] < fs[-2] and max(fs) > 0.0:
            break
        if x >= x_cap:
            if max(fs) <= 0.0:
                raise BracketError("objective never rose above zero during expansion")
            raise BracketError(f"objective still rising at the search cap {x_cap}")
    k = max(range(len(fs)), key=fs.__getitem__)
    a = xs[k - 1] if k > 0 else 0.0
    c = xs[k + 1]
    xbest, fneg = _golden(lambda t: -f(t), a, c, xs[k], tol)
    return xbest, -fneg
