#!/usr/bin/env python3
"""Independent reference values, frozen into frozen_values.hpp.

Run once; the header is committed.  Nothing here shares code with the C++ side.
"""
from fractions import Fraction as Fr
import math
import pathlib

import mpmath as mp

mp.mp.dps = 40
OUT = pathlib.Path(__file__).with_name("frozen_values.hpp")


def tent(t):
    t = t - mp.floor(t)
    return 1 - abs(2 * t - 1)


GOLD = (mp.sqrt(5) - 1) / 2
SILVER = mp.sqrt(2) - 1


# --- core dynamics -------------------------------------------------------
def skew_sum(c, b, n):
    return mp.fsum(c + b * tent(k * GOLD) for k in range(n))


skew10 = skew_sum(mp.mpf("0.3"), mp.mpf("0.1"), 10)

# error constant for the mean-0.3 fixture phi = 0.25 + 0.1 tent, started at theta = 0
worst = mp.mpf(0)
acc = mp.mpf(0)
checkpoints = {1000, 10000, 100000}
mp.mp.dps = 25
for k in range(100000):
    acc += mp.mpf("0.25") + mp.mpf("0.1") * tent(k * GOLD) - mp.mpf("0.3")
    if k + 1 in checkpoints:
        worst = max(worst, abs(acc))
mp.mp.dps = 40
rot_const = float(worst)


# --- exact base and curve intersections ----------------------------------
def convergents(a0, a_rest, tol):
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    i = 0
    while True:
        a = a_rest(i)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        i += 1
        if Fr(1, k_prev * k) <= tol and i > 2:
            return Fr(h_prev, k_prev)


TOL = Fr(1, 10**30)
omega_q = convergents(0, lambda i: 1, TOL)
rho_q = convergents(0, lambda i: 2, TOL)


def pl_eval(bps, t):
    """bps: list of (theta, value) with theta in [0,1) sorted, degree 0."""
    t = t - math.floor(t)
    ext = bps + [(bps[0][0] + 1, bps[0][1])]
    pre = [(bps[-1][0] - 1, bps[-1][1])] + ext
    for (t0, v0), (t1, v1) in zip(pre, pre[1:]):
        if t0 <= t <= t1:
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    raise AssertionError


def frac(x):
    return x - math.floor(x)


def isolated_crossings(c, b, k):
    """Isolated intersection abscissas of c + b*tent and its k-th translate image."""
    base = [(Fr(0), c), (Fr(1, 2), c + b)]
    shift_t = frac(k * omega_q)
    shift_v = k * rho_q
    img = sorted((frac(t + shift_t), v + shift_v) for t, v in base)
    cuts = sorted({t for t, _ in base} | {t for t, _ in img} | {Fr(0)})
    cuts.append(Fr(1))
    pts = set()
    arcs = 0
    for a, e in zip(cuts, cuts[1:]):
        da = pl_eval(base, a) - pl_eval(img, a)
        de = pl_eval(base, e) - pl_eval(img, e)
        lo, hi = min(da, de), max(da, de)
        for m in range(math.ceil(lo), math.floor(hi) + 1):
            if da == de:
                arcs += 1
                continue
            t = a + (e - a) * (m - da) / (de - da)
            pts.add(frac(t))
    return sorted(pts), arcs


crit1 = {k: len(isolated_crossings(Fr(1, 20), Fr(9, 10), k)[0]) for k in range(1, 5)}
blow = {k: len(isolated_crossings(Fr(1, 10), Fr(1, 20), k)[0]) for k in range(1, 33)}
blow_k = [k for k, v in blow.items() if v]

# --- weights --------------------------------------------------------------
def weights(k, n):
    return {j: Fr(1, (abs(j) + k) ** 2) for j in range(-n, n + 1)}


w = weights(4, 8)
beta = 1 - sum(w.values())
eps = Fr(1, 2)
ratio = max(max(w[j + 1] - w[j], 0) / ((1 - eps) * w[j + 1]) for j in range(-8, 8))

# --- sl2 triple map -------------------------------------------------------
t = 1 / mp.sqrt(1 + mp.sqrt(2))
triple = (t, 0, 0, 1 / t)

# --- emit -----------------------------------------------------------------
lines = [
    "#pragma once",
    "// Generated by tests/oracle/make_oracles.py; do not edit by hand.",
    "#include <array>",
    "",
    "namespace oracle {",
    f"inline constexpr double kSkewSum10 = {mp.nstr(skew10, 20)};",
    f"inline constexpr double kRotErrorConst = {rot_const * 1.05:.6f};",
    f'inline constexpr const char* kOmegaQ = "{omega_q.numerator}/{omega_q.denominator}";',
    f'inline constexpr const char* kRhoQ = "{rho_q.numerator}/{rho_q.denominator}";',
    "inline constexpr std::array<int, 4> kTentCrossings = {"
    + ", ".join(str(crit1[k]) for k in range(1, 5)) + "};",
    "inline constexpr std::array<int, " + str(len(blow_k)) + "> kLowTentCrossingDepths = {"
    + ", ".join(map(str, blow_k)) + "};",
    f'inline constexpr const char* kBetaK4N8 = "{beta.numerator}/{beta.denominator}";',
    f"inline constexpr double kBetaK4N8d = {float(beta)!r};",
    f"inline constexpr double kRatioK4N8 = {float(ratio)!r};",
    f"inline constexpr double kHFloorK4N8 = {float(1 - ratio)!r};",
    "inline constexpr std::array<double, 4> kTripleMat = {"
    + ", ".join(mp.nstr(x, 20) for x in triple) + "};",
    f"inline constexpr double kLog2 = {mp.nstr(mp.log(2), 20)};",
    "}  // namespace oracle",
    "",
]
OUT.write_text("\n".join(lines))
print("\n".join(lines))
print("low-tent crossing counts", blow)
