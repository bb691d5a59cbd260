"""Arbitrary-precision reference constants frozen into the unit tests.

Run: python3 tests/oracles/constants_oracle.py
"""
import mpmath as mp

mp.mp.dps = 40

# Unit-ball volumes omega_s = pi^{s/2} / Gamma(s/2 + 1).
for s in (1, 2, 3, 0.5):
    print(f"omega_{s} =", mp.nstr(mp.pi ** (mp.mpf(s) / 2) / mp.gamma(mp.mpf(s) / 2 + 1), 25))

# Integral of exp(1/(|x|^2 - 1)) over the unit ball of R^N.
for n in (1, 2, 3):
    sphere = 2 * mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2)
    radial = mp.quad(lambda r: r ** (n - 1) * mp.exp(1 / (r * r - 1)), [0, 0.5, 0.9, 1])
    print(f"bump_integral_{n} =", mp.nstr(sphere * radial, 25))

# Surface measure of the unit sphere S^{N-1}.
for n in (2, 3):
    print(f"sigma_{n - 1} =", mp.nstr(2 * mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2), 25))
