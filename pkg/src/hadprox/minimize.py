"""One-dimensional minimization of convex, possibly infinite-valued functions.

Everything here assumes the objective is convex on the search interval and
may take the value ``+inf`` outside an (unknown) subinterval. Convexity gives
two facts used throughout: the minimizer over a grid's neighbourhood
brackets the true minimizer, and an infinite probe cuts off everything
beyond it on the side away from a known finite point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class LineMin:
    s: float
    value: float
    evals: int
    ok: bool = True
    polished: bool = False


def golden_section(phi: Callable[[float], float], lo: float, hi: float,
                   tol: float = 1e-12, max_iter: int = 300,
                   ref: float | None = None) -> LineMin:
    """Minimize a convex extended-real function on ``[lo, hi]``.

    ``ref`` is a point known to have a finite value; it decides which side
    to keep when both interior probes are infinite. The endpoints are
    compared at the end, so minimizers sitting on the boundary are found.
    """
    evals = 0
    a, b = lo, hi
    best_s, best_v = math.nan, math.inf

    def f(s):
        nonlocal evals, best_s, best_v
        evals += 1
        v = phi(s)
        if v < best_v:
            best_s, best_v = s, v
        return v

    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > tol and it < max_iter:
        it += 1
        if math.isinf(f1) and math.isinf(f2):
            r = best_s if not math.isnan(best_s) else ref
            if r is None:
                break
            if r < x1:
                b = x1
            elif r > x2:
                a = x2
            else:
                a, b = x1, x2
            x1 = b - INV_PHI * (b - a)
            x2 = a + INV_PHI * (b - a)
            f1, f2 = f(x1), f(x2)
            continue
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    for end in (lo, hi, 0.5 * (a + b)):
        f(end)
    return LineMin(best_s, best_v, evals, not math.isinf(best_v))


def _chord_root(phi, s0: float, h: float, width: float, lo: float, hi: float) -> float | None:
    """Zero of ``c(s) = phi(s + h) - phi(s - h)`` near ``s0``.

    For convex ``phi`` the chord slope ``c`` is nondecreasing and its zero
    lies within ``h`` of the minimizer. Its sign stays readable far below
    the ``sqrt(eps)`` resolution of plain value comparisons.
    """
    def c(s):
        if s - h < lo or s + h > hi:
            return math.nan
        return phi(s + h) - phi(s - h)

    a, b = s0 - width, s0 + width
    ca, cb = c(a), c(b)
    if not (ca <= 0.0 <= cb) or math.isinf(ca) or math.isinf(cb):
        return None
    side = 0
    for _ in range(100):
        if cb == ca:
            return 0.5 * (a + b)
        m = b - cb * (b - a) / (cb - ca)
        if not a < m < b:
            m = 0.5 * (a + b)
        cm = c(m)
        if math.isnan(cm) or math.isinf(cm):
            return None
        if cm == 0.0:
            return m
        if cm < 0.0:
            a, ca = m, cm
            if side == -1:
                cb *= 0.5
            side = -1
        else:
            b, cb = m, cm
            if side == 1:
                ca *= 0.5
            side = 1
        if b - a <= 4e-16 * (1.0 + abs(m)):
            break
    return 0.5 * (a + b)


def polish(phi: Callable[[float], float], s0: float, v0: float, lo: float, hi: float,
           h: float) -> float | None:
    """Sharpen a value-based minimizer ``s0`` of a smooth convex ``phi``.

    Chord roots at ``h``, ``2h`` and ``4h`` carry a bias ``K h^2`` when
    ``phi`` is smooth; Richardson extrapolation removes it. If the three
    roots do not follow that pattern (a kink nearby) or the result is not
    at least as good in value, ``None`` is returned.
    """
    roots = []
    for k in (1.0, 2.0, 4.0):
        r = _chord_root(phi, s0, k * h, 2.0 * k * h, lo, hi)
        if r is None:
            return None
        roots.append(r)
    r1, r2, r4 = roots
    d1, d2 = r2 - r1, r4 - r2
    # rounding noise of a chord root: eps |phi| / (2 k h phi'')
    curv = (phi(s0 + 2.0 * h) - 2.0 * v0 + phi(s0 - 2.0 * h)) / (4.0 * h * h)
    if not (curv > 0.0 and math.isfinite(curv)):
        return None
    n1, n2, n4 = (8.0 * 2.2e-16 * (1.0 + abs(v0)) / (2.0 * k * h * curv) for k in (1, 2, 4))
    if abs(d1) <= 2.0 * (n1 + n2) and abs(d2) <= 2.0 * (n2 + n4):
        s = r4
    elif abs(d2 - 4.0 * d1) <= 0.25 * abs(d2) + 4.0 * (n1 + n2 + n4):
        s = r2 - d2 / 3.0
    else:
        return None
    if abs(s - s0) <= 2.0 * (n1 + n2 + n4):
        return s0  # below the resolution of the roots themselves
    if not lo <= s <= hi:
        return None
    v = phi(s)
    if not v <= v0 + 8.0 * 2.2e-16 * (1.0 + abs(v0)):
        return None
    return s


def minimize_on_line(phi: Callable[[float], float], lo: float = -math.inf,
                     hi: float = math.inf, scale: float = 1.0, grid: int = 32,
                     tol: float = 1e-12, max_scale: float = 1e8,
                     hints: tuple[float, ...] = (), smooth_h: float = 0.0) -> LineMin:
    """Global minimizer of a convex function along a parameter interval.

    A symmetric grid around ``s = 0`` is evaluated; if the best finite grid
    value sits on an open end of the bracket the bracket doubles. The final
    bracket is the pair of grid neighbours of the best grid point, refined by
    golden section. With ``smooth_h > 0`` the result is then passed to
    :func:`polish`; ``LineMin.polished`` records whether that succeeded.
    """
    evals = 0
    R = max(scale, 1e-6)
    hint_vals = []
    for h in hints:
        if lo <= h <= hi:
            hint_vals.append((phi(h), h))
            evals += 1
    while True:
        a = max(lo, -R)
        b = min(hi, R)
        step = (b - a) / grid
        ss = [a + i * step for i in range(grid + 1)]
        vals = [phi(s) for s in ss]
        evals += len(ss)
        i = min(range(len(vals)), key=vals.__getitem__)
        vbest = vals[i]
        at_open_end = (i == 0 and a > lo) or (i == grid and b < hi)
        if math.isinf(vbest):
            finite_hints = [h for v, h in hint_vals if not math.isinf(v)]
            if finite_hints and R < max_scale:
                R = max(R * 2.0, 2.0 * max(abs(h) for h in finite_hints))
                continue
            if R >= max_scale or (a <= lo and b >= hi):
                return LineMin(math.nan, math.inf, evals, False)
            R *= 2.0
            continue
        if at_open_end and R < max_scale:
            R *= 2.0
            continue
        break
    left = ss[max(i - 1, 0)]
    right = ss[min(i + 1, grid)]
    # with polishing on, golden section only has to land within the chord
    # width; the fine search is the fallback when polishing declines
    coarse = smooth_h > 0.0
    res = golden_section(phi, left, right, tol=0.5 * smooth_h if coarse else tol * (1.0 + R),
                         ref=ss[i])
    res.evals += evals
    if vbest <= res.value:  # ties go to the grid point, which is often exact
        res.s, res.value = ss[i], vbest
    if at_open_end:
        res.ok = False
    if coarse and res.ok:
        s = polish(phi, res.s, res.value, lo, hi, smooth_h)
        if s is not None:
            res.s, res.value, res.polished = s, phi(s), True
        else:
            a, b = max(left, res.s - smooth_h), min(right, res.s + smooth_h)
            fine = golden_section(phi, a, b, tol=tol * (1.0 + R), ref=res.s)
            res.evals += fine.evals
            if fine.value < res.value:
                res.s, res.value = fine.s, fine.value
    return res
