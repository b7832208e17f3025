"""
OAM modes, petals and the coincidence fringe
============================================

The hash qubits live in the +-l subspace of Laguerre-Gauss modes.  Their
superpositions show 2|l| intensity petals that rotate with the relative phase,
and projecting one onto another gives a cos^2 fringe in the coincidences.
"""

import math

import numpy as np

from oamhash.photonics import (
    LGMode, OAMQubit, SPD1, SPD2, coincidence_sweep, fit_fringe, make_grid, mode_norm,
    optimal_waists, superposition_intensity,
)

wp, wsi = optimal_waists(10e-3, 532e-9)
print(f"pump waist {wp * 1e6:.1f} um, signal/idler waist {wsi * 1e6:.1f} um")

mode = LGMode(p=0, ell=2, w0=wsi, wavelength=1480e-9)
print("norm:", mode_norm(mode))

# count petals on a ring through the intensity maximum
theta = np.linspace(0, 2 * math.pi, 360, endpoint=False)
r = wsi * math.sqrt(mode.ell / 2)
ring = superposition_intensity(OAMQubit(2, 0.5), mode, (r * np.cos(theta), r * np.sin(theta)))
peaks = np.sum((ring > np.roll(ring, 1)) & (ring > np.roll(ring, -1)))
print("petals:", peaks)

# the full 2-D map is available on a square grid as well
img = superposition_intensity(OAMQubit(2, 0.5), mode, make_grid(mode, n=129))
print("map", img.shape, "on-axis", img[64, 64])

# fringe with ideal detectors, then with the lab detectors; the idler
# detector efficiency scales the whole curve down, dark counts lift its floor
phases = np.linspace(0, 2 * math.pi, 17)
for label, kw in [("ideal", {}), ("lab", dict(herald_det=SPD1, idler_det=SPD2))]:
    data = coincidence_sweep(1, phases, 1e4, seed=3, **kw)
    fit = fit_fringe(data[:, 0], data[:, 2] / np.maximum(data[:, 1], 1))
    peak = fit["offset"] + fit["amplitude"]
    print(f"{label}: visibility {fit['visibility']:.3f}, peak coincidences/herald {peak:.3f}")
