#!/usr/bin/env python3
"""Regenerate tests/data/*_oracle.inc from mpmath at 400 digits.

The tables are frozen into the C++ tests; this script only documents
where the numbers came from.
"""
import math
import mpmath as mp

mp.mp.dps = 400


def f(x):
    return mp.nstr(x, 20, min_fixed=-1, max_fixed=-1) if x != 0 else "0.0"


def c(z):
    return "{%s, %s}" % (f(mp.re(z)), f(mp.im(z)))


out = []
out.append("// Generated by tools/oracles/gen_specfun_oracle.py (mpmath, 400 digits). Do not edit.")
out.append("struct RealPair { double x; double value; };")
out.append("inline constexpr RealPair kZetaOracle[] = {")
for s in [-49.5, -40.0 + 0.25, -31.0, -20.5, -10.5, -7.0, -3.5, -2.5, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5,
          0.75, 0.999, 1.001, 1.5, 2.0, 3.0, 7.5, 12.0, 25.0, 50.0]:
    out.append("    {%s, %s}," % (f(mp.mpf(s)), f(mp.zeta(s))))
out.append("};")
out.append("inline constexpr RealPair kZetaDerivNegEvenOracle[] = {")
for k in range(26):
    out.append("    {%d, %s}," % (k, f(mp.zeta(-2 * k, derivative=1))))
out.append("};")
out.append("struct BesselRow { double re; double im; double j0[2]; double j1[2]; double h0[2]; double h1[2]; };")
out.append("inline constexpr BesselRow kBesselOracle[] = {")
mods = [1e-8, 1e-3, 0.3, 1.0, 1.9, 2.1, 3.0, 4.5, 6.25, 8.0, 12.0, 17.0, 25.0, 42.0, 80.0, 200.0, 390.0]
angles = [0.0, math.pi / 16, math.pi / 8, math.pi / 4, 3 * math.pi / 8, 7 * math.pi / 16, math.pi / 2]
for r in mods:
    for a in angles:
        z = mp.mpc(r * math.cos(a), r * math.sin(a))
        # keep J/H magnitudes inside double range
        if abs(mp.im(z)) > 300:
            continue
        z = mp.mpc(float(mp.re(z)), float(mp.im(z)))
        row = (f(mp.re(z)), f(mp.im(z)), c(mp.besselj(0, z)), c(mp.besselj(1, z)),
               c(mp.hankel1(0, z)), c(mp.hankel1(1, z)))
        out.append("    {%s, %s, %s, %s, %s, %s}," % row)
out.append("};")
out.append("inline constexpr BesselRow kHankelDecayOracle[] = {")
for z in [mp.mpc(10, 10), mp.mpc(2, 30), mp.mpc(100, 50)]:
    out.append("    {%s, %s, %s, %s, %s, %s}," % (f(mp.re(z)), f(mp.im(z)), c(mp.besselj(0, z)), c(mp.besselj(1, z)),
                                                c(mp.hankel1(0, z)), c(mp.hankel1(1, z))))
out.append("};")
print("\n".join(out))
