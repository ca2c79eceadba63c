"""Exact piecewise-linear function algebra on breakpoint lists.

A function is a pair of equal-length lists ``(xs, ys)`` with strictly
increasing ``xs``; it is linear between breakpoints, defined on
``[xs[0], xs[-1]]`` and minus infinity outside.  These are the value-of-level
functions of the trading dynamic program, so the operations here must be
exact: no sampling grids, every kink is carried explicitly.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import deque

XEPS = 1e-12
NEG_INF = float("-inf")


def evaluate(xs: list, ys: list, x: float) -> float:
    """Value at ``x``; minus infinity outside the domain."""
    if x < xs[0] - XEPS or x > xs[-1] + XEPS:
        return NEG_INF
    if x <= xs[0]:
        return ys[0]
    if x >= xs[-1]:
        return ys[-1]
    i = bisect_right(xs, x)
    x0, x1 = xs[i - 1], xs[i]
    y0, y1 = ys[i - 1], ys[i]
    if x1 == x0:
        return max(y0, y1)
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def simplify(xs: list, ys: list) -> tuple[list, list]:
    """Drop breakpoints that sit exactly on the segment through their neighbours."""
    n = len(xs)
    if n <= 2:
        return xs, ys
    out_x = [xs[0]]
    out_y = [ys[0]]
    for i in range(1, n - 1):
        x0, y0 = out_x[-1], out_y[-1]
        x1, y1 = xs[i], ys[i]
        x2, y2 = xs[i + 1], ys[i + 1]
        if x1 - x0 <= XEPS:
            if y1 > y0:
                out_y[-1] = y1
            continue
        interp = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0)
        if abs(y1 - interp) <= 1e-12 * (1.0 + abs(y1)):
            continue
        out_x.append(x1)
        out_y.append(y1)
    if xs[-1] - out_x[-1] <= XEPS:
        out_y[-1] = max(out_y[-1], ys[-1])
    else:
        out_x.append(xs[-1])
        out_y.append(ys[-1])
    return out_x, out_y


def truncate(xs: list, ys: list, lo: float, hi: float):
    """Restrict the domain to ``[lo, hi]``; None when nothing remains."""
    if hi < lo or hi < xs[0] - XEPS or lo > xs[-1] + XEPS:
        return None
    lo = max(lo, xs[0])
    hi = min(hi, xs[-1])
    new_x = [lo]
    new_y = [evaluate(xs, ys, lo)]
    i = bisect_right(xs, lo)
    while i < len(xs) and xs[i] < hi - XEPS:
        new_x.append(xs[i])
        new_y.append(ys[i])
        i += 1
    if hi - new_x[-1] > XEPS:
        new_x.append(hi)
        new_y.append(evaluate(xs, ys, hi))
    return new_x, new_y


def pointwise_max(f, g):
    """Upper envelope of two functions on the union of their domains.

    Outside its own domain a function contributes minus infinity; the union is
    assumed contiguous (always true for the solver's charge/idle/discharge
    branches).
    """
    if f is None:
        return g
    if g is None:
        return f
    fx, fy = f
    gx, gy = g
    grid = sorted(set(fx) | set(gx))
    out_x: list = []
    out_y: list = []

    def push(x, y):
        if out_x and x - out_x[-1] <= XEPS:
            if y > out_y[-1]:
                out_y[-1] = y
            return
        out_x.append(x)
        out_y.append(y)

    prev_x = None
    prev_fv = prev_gv = None
    for x in grid:
        fv = evaluate(fx, fy, x)
        gv = evaluate(gx, gy, x)
        if prev_x is not None:
            # insert the crossing when the leader changes inside the interval
            df0 = (prev_fv - prev_gv) if (prev_fv > NEG_INF and prev_gv > NEG_INF) else None
            df1 = (fv - gv) if (fv > NEG_INF and gv > NEG_INF) else None
            if df0 is not None and df1 is not None and df0 * df1 < 0:
                tcross = df0 / (df0 - df1)
                xc = prev_x + tcross * (x - prev_x)
                if prev_x + XEPS < xc < x - XEPS:
                    push(xc, max(evaluate(fx, fy, xc), evaluate(gx, gy, xc)))
        v = max(fv, gv)
        if v > NEG_INF:
            push(x, v)
        prev_x, prev_fv, prev_gv = x, fv, gv
    if not out_x:
        return None
    return simplify(out_x, out_y)


def dilate_right(f, slope: float, reach: float):
    """``H(x) = max over u in [0, reach] of f(x + u) + slope * u``.

    Domain grows to ``[f.lo - reach, f.hi]``.  Used for the charge branch
    (looking right along the next period's value-of-level curve, paying
    ``-slope`` per unit of level added).

    On each interval between adjacent candidate kinks H is the envelope of at
    most three lines: stay put (u = 0), move the full reach (u = reach), or
    land exactly on an interior breakpoint of f.  All interior-breakpoint
    lines share the slope ``-slope``, so a sliding-window maximum over the
    breakpoint keys picks the single relevant one.
    """
    xs, ys = f
    if reach <= XEPS:
        return list(xs), list(ys)
    n = len(xs)
    if n == 1:
        return [xs[0] - reach, xs[0]], [ys[0] + slope * reach, ys[0]]
    keys = [ys[j] + slope * xs[j] for j in range(n)]
    grid = sorted({*xs, *(x - reach for x in xs)})
    grid = [x for x in grid if xs[0] - reach - XEPS <= x <= xs[-1] + XEPS]

    out_x: list = []
    out_y: list = []

    def push(x, y):
        if out_x and x - out_x[-1] <= XEPS:
            if y > out_y[-1]:
                out_y[-1] = y
            return
        out_x.append(x)
        out_y.append(y)

    def segment_line(mid: float) -> tuple[float, float]:
        i = max(1, min(n - 1, bisect_right(xs, mid)))
        s = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])
        return s, ys[i - 1] - s * xs[i - 1]

    window: deque = deque()  # breakpoint indices, keys decreasing
    admit = 0
    for k in range(len(grid) - 1):
        a, b = grid[k], grid[k + 1]
        if b - a <= XEPS:
            continue
        while admit < n and xs[admit] <= a + reach + XEPS:
            while window and keys[window[-1]] <= keys[admit]:
                window.pop()
            window.append(admit)
            admit += 1
        while window and xs[window[0]] < b - XEPS:
            window.popleft()

        lines = []
        if a >= xs[0] - XEPS and b <= xs[-1] + XEPS:
            lines.append(segment_line((a + b) / 2))  # u = 0
        if a + reach >= xs[0] - XEPS and b + reach <= xs[-1] + XEPS:
            s, c = segment_line((a + b) / 2 + reach)  # u = reach
            lines.append((s, c + s * reach + slope * reach))
        if window:
            lines.append((-slope, keys[window[0]]))
        if not lines:
            continue

        cands = [a, b]
        for i1 in range(len(lines)):
            for i2 in range(i1 + 1, len(lines)):
                s1, c1 = lines[i1]
                s2, c2 = lines[i2]
                if abs(s1 - s2) > 1e-15:
                    xc = (c2 - c1) / (s1 - s2)
                    if a + XEPS < xc < b - XEPS:
                        cands.append(xc)
        for x in sorted(cands):
            push(x, max(s * x + c for s, c in lines))
    return simplify(out_x, out_y)


def dilate_left(f, slope: float, reach: float):
    """``H(x) = max over v in [0, reach] of f(x - v) + slope * v``.

    Domain grows to ``[f.lo, f.hi + reach]``.  Used for the discharge branch.
    Implemented by reflecting, dilating right, and reflecting back.
    """
    xs, ys = f
    rx = [-x for x in reversed(xs)]
    ry = list(reversed(ys))
    hx, hy = dilate_right((rx, ry), slope, reach)
    return [-x for x in reversed(hx)], list(reversed(hy))


def peak(f) -> float:
    """Maximum value over the domain."""
    return max(f[1])


def argmax_window(f, lo: float, hi: float, slope: float, origin: float):
    """Maximise ``f(x) + slope * (x - origin)`` over ``x in [lo, hi]``.

    Returns ``(best_value, best_x)`` with the smallest maximising ``x`` (ties
    resolved within an absolute 1e-12 band).  Used during schedule replay.
    """
    xs, ys = f
    lo = max(lo, xs[0])
    hi = min(hi, xs[-1])
    if hi < lo - XEPS:
        return NEG_INF, None
    hi = max(hi, lo)
    cand = [lo, hi]
    i = bisect_right(xs, lo)
    while i < len(xs) and xs[i] < hi:
        cand.append(xs[i])
        i += 1
    best_v, best_x = NEG_INF, None
    for x in sorted(cand):
        v = evaluate(xs, ys, x) + slope * (x - origin)
        if v > best_v + 1e-12:
            best_v, best_x = v, x
    return best_v, best_x
