"""
The loop exponential map misses targets
=======================================

The sphere is geodesically complete, and so is its loop space, but
completeness no longer implies that the exponential map is onto.  Reaching a
target loop from a constant base loop requires a continuous choice of
logarithm at every circle parameter.  A great circle through the base point
forces the lift across the cut locus, where the nodewise log jumps by about
2 pi.  Circles staying away from the cut locus lift continuously, with
node-to-node increments of order 1/N.
"""

import numpy as np

from loopspace_lab import SampledLoop, Sphere2, exp_nonsurjectivity_witness

sphere = Sphere2()
n = 128
t = np.arange(n) / n

# a great circle through the south pole: no continuous lift exists
through = SampledLoop(np.stack([np.sin(2 * np.pi * t), np.zeros(n),
                                -np.cos(2 * np.pi * t)], axis=-1))
report = exp_nonsurjectivity_witness(sphere, through)
print(f"through the pole: jump = {report['jump_magnitude']:.3f} "
      f"(offset {report['offset']:.4f} avoids the exact antipode)")

# latitude circles at increasing distance from the pole lift continuously
for radius in (0.2, 0.7, 1.2):
    lat = SampledLoop(np.stack([np.sin(radius) * np.cos(2 * np.pi * t),
                                np.sin(radius) * np.sin(2 * np.pi * t),
                                -np.cos(radius) * np.ones(n)], axis=-1))
    r = exp_nonsurjectivity_witness(sphere, lat)
    print(f"latitude circle at distance {radius}: jump = "
          f"{r['jump_magnitude']:.4f}")

# the equator is a great circle that stays pi/2 from both pole and antipode
equator = SampledLoop(np.stack([np.cos(2 * np.pi * t),
                                np.sin(2 * np.pi * t), np.zeros(n)], axis=-1))
r = exp_nonsurjectivity_witness(sphere, equator)
print(f"equator: jump = {r['jump_magnitude']:.4f}")
