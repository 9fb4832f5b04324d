"""Independent reference computations used by the tests.

Nothing here imports the package under test.
"""

import cmath
import math

import numpy as np


def dirichlet_db(theta_deg, count, spacing=0.5):
    """Normalized |AF| (dB) of a uniform linear array, broadside at 90 deg."""
    x = np.pi * spacing * np.cos(np.radians(theta_deg))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.abs(np.sin(count * x) / (count * np.sin(x)))
    r = np.where(np.abs(np.sin(x)) < 1e-15, 1.0, r)
    return 20 * np.log10(r)


def dirichlet_magnitude(theta_deg, count, spacing=0.5):
    x = np.pi * spacing * np.cos(np.radians(theta_deg))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.abs(np.sin(count * x) / np.sin(x))
    return np.where(np.abs(np.sin(x)) < 1e-15, float(count), r)


def brute_force_af(amplitudes, theta_deg, phi_deg, dx=0.5, dy=0.5, use_cos=True):
    """Double loop over elements, phase referenced to the first element."""
    th, ph = math.radians(theta_deg), math.radians(phi_deg)
    s = math.cos(th) if use_cos else math.sin(th)
    kx = 2 * math.pi * s * math.cos(ph)
    ky = 2 * math.pi * s * math.sin(ph)
    total = 0j
    for m, row in enumerate(amplitudes):
        for n, a in enumerate(row):
            total += a * cmath.exp(1j * (m * kx * dx + n * ky * dy))
    return total


# Frozen from scipy.optimize.minimize_scalar on the closed form above
# (bounded search between the first and second nulls, xatol 1e-13).
UNIFORM16_FIRST_SIDELOBE_DB = -13.146830559264197
UNIFORM16_FIRST_NULL_DEG = 82.81924421854171  # arccos(1/8)


def density_tail_slope(samples, quantile=0.99, bins=15):
    """Log-log slope of the |x| density above the given quantile (log-spaced histogram)."""
    a = np.abs(np.asarray(samples))
    t = np.quantile(a, quantile)
    tail = a[a > t]
    edges = np.geomspace(t, tail.max(), bins + 1)
    counts, _ = np.histogram(tail, edges)
    keep = counts > 0
    centres = np.sqrt(edges[:-1] * edges[1:])
    density = counts / np.diff(edges)
    return np.polyfit(np.log(centres[keep]), np.log(density[keep]), 1, w=np.sqrt(counts[keep]))[0]


def sphere(centre):
    c = np.asarray(centre, dtype=float)
    return lambda x: float(np.sum((np.asarray(x) - c) ** 2))


def first_null_pair(theta, db):
    i = int(np.argmax(db))
    lo = i
    while lo > 0 and db[lo - 1] < db[lo]:
        lo -= 1
    hi = i
    while hi < len(db) - 1 and db[hi + 1] < db[hi]:
        hi += 1
    return theta[lo], theta[hi]
