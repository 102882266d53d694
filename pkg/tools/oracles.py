"""Independent reference values frozen into the test suite.

Nothing here imports the package: the response formula is re-typed, scalars
use mpmath at 50 digits and integrals use a plain midpoint rule.  Run with
``python tools/oracles.py``; it prints every frozen value.
"""

import math

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

A, E, C = 1.95, 3.56, 500.0
N = 1_800_000  # midpoint nodes over one period; 1000 nodes per 0.1 degree


def p_scalar(x):
    mpmath.mp.dps = 50
    x = abs(mpmath.mpf(x))
    ex = mpmath.exp(-A * x**E)
    return 1 - (1 - ex) / (1 + C * ex)


def p_grid():
    h = math.pi / N
    lam = (np.arange(N) + 0.5) * h
    lam = np.where(lam > math.pi / 2, lam - math.pi, lam)
    ex = np.exp(-A * np.abs(lam) ** E)
    return 1.0 - (1.0 - ex) / (1.0 + C * ex)


def shift(P, deg_tenths):
    # P(lam - theta) on the same midpoint grid, theta = deg_tenths * 0.1 degree
    return np.roll(P, 1000 * deg_tenths)


def main():
    print("hv(pi/2) =", mpmath.nstr(p_scalar(mpmath.pi / 2), 17))
    print("hv(pi/4) =", mpmath.nstr(p_scalar(mpmath.pi / 4), 17))

    P = p_grid()
    print("v0 = mean p^2 =", repr(float(np.mean(P * P))))
    print("cascade(0,45,90) =", repr(float(np.mean(P * shift(P, 450) * shift(P, 900)))))

    base = P * shift(P, 450)
    scan = np.array([np.mean(base * shift(P, k)) for k in range(1800)])
    k = int(np.argmin(scan))
    print("sweep alpha=45: beta* =", k / 10, "deg, p_min =", repr(float(scan[k])))

    alphas = np.arange(91)
    P2 = np.array([np.mean(P * shift(P, 10 * a)) for a in alphas])
    c2 = np.cos(np.radians(alphas)) ** 2

    def sse(eps):
        s = (1 - eps) * c2 + eps
        amp = s @ P2 / (s @ s)
        return float(np.sum((amp * s - P2) ** 2)), amp

    grid = np.linspace(0, 1, 10001)
    e0 = grid[int(np.argmin([sse(e)[0] for e in grid]))]
    eps = minimize_scalar(lambda e: sse(e)[0], bounds=(max(e0 - 1e-4, 0), min(e0 + 1e-4, 1)),
                          method="bounded", options={"xatol": 1e-13}).x
    amp = sse(eps)[1]
    resid = (amp * ((1 - eps) * c2 + eps) - P2) / amp
    print("fit: A =", repr(float(amp)), "eps =", repr(float(eps)),
          "sup =", repr(float(np.abs(resid).max())), "rms =", repr(float(np.sqrt(np.mean(resid**2)))))
    print("P2 at 0,22.5,45,67.5,90 deg =", [repr(float(np.mean(P * shift(P, t)))) for t in (0, 225, 450, 675, 900)])


if __name__ == "__main__":
    main()
