"""Reference values of D(r) = r^{-1} * integral of f_alpha^+ over B(0, r) in 2D.

With W = e1 * eta_R, f_alpha(rho, theta) = cos(theta) * F(rho), so the angular
integral of the positive part is 2|F(rho)| and

    D(r) = (1/r) * int_0^r 2 |F(rho)| rho d rho.

Substituting t = rho^{-alpha} turns the oscillation into a unit-frequency one;
the integral is taken zero-to-zero with Gauss-Legendre up to t = T and the
rest uses the mean of |cos| (2/pi), whose error is O(T^{-2/alpha}).

Usage: python3 ualpha_profile_oracle.py  (prints C++ initialisers)
"""

import numpy as np

R = 0.25
RADII = [2.0 ** -k for k in range(3, 10)]
T_MAX = 1.0e6


def big_f(rho, alpha):
    t = rho ** -alpha
    s = rho * rho / (R * R)
    eta = np.where(s < 1.0, np.exp(1.0 - 1.0 / (1.0 - np.minimum(s, 0.999999))), 0.0)
    return eta * (np.sin(t) - alpha * t * np.cos(t) - 2.0 * rho * rho * np.sin(t) / (R * R * (1.0 - s) ** 2))


def integrand_t(t, alpha):
    # 2|F| rho d rho expressed in t.
    rho = t ** (-1.0 / alpha)
    return (2.0 / alpha) * t ** (-2.0 / alpha - 1.0) * np.abs(big_f(rho, alpha))


def zeros_between(a, b, alpha, per_period=8):
    n = max(16, int((b - a) / np.pi * per_period))
    t = np.linspace(a, b, n + 1)
    g = big_f(t ** (-1.0 / alpha), alpha)
    idx = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    lo, hi = t[idx].copy(), t[idx + 1].copy()
    glo = g[idx]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        gm = big_f(mid ** (-1.0 / alpha), alpha)
        left = np.sign(gm) == np.sign(glo)
        lo = np.where(left, mid, lo)
        glo = np.where(left, gm, glo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def integral_t(a, b, alpha):
    nodes, weights = np.polynomial.legendre.leggauss(24)
    total = 0.0
    # Chunks keep memory bounded.
    edges = np.unique(np.concatenate(([a], np.geomspace(a, b, 200), [b])))
    for lo_e, hi_e in zip(edges[:-1], edges[1:]):
        z = zeros_between(lo_e, hi_e, alpha)
        pts = np.concatenate(([lo_e], z, [hi_e]))
        left, right = pts[:-1], pts[1:]
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        x = mid[:, None] + half[:, None] * nodes[None, :]
        total += float(np.sum(half[:, None] * weights[None, :] * integrand_t(x, alpha)))
    return total


def tail(alpha):
    p = 2.0 / alpha
    if p <= 1.0:
        raise ValueError("tail diverges")
    # (2/alpha) t^{-p-1} * alpha t * 2/pi integrated from T_MAX to infinity.
    return (4.0 / np.pi) * T_MAX ** (1.0 - p) / (p - 1.0)


def profile(alpha):
    # Accumulate from the innermost radius outwards so each t-range is done once.
    ts = [r ** -alpha for r in RADII] + [T_MAX]
    acc = tail(alpha)
    inner = []
    for k in range(len(RADII) - 1, -1, -1):
        acc += integral_t(ts[k], ts[k + 1], alpha)
        inner.append(acc / RADII[k])
    return inner[::-1]


if __name__ == "__main__":
    for alpha in (1.5, 0.5):
        vals = profile(alpha)
        print(f"// alpha = {alpha}, R = {R}, radii 2^-3 .. 2^-9")
        print("{" + ", ".join(f"{v:.10g}" for v in vals) + "}")
