"""
Fourier polarization and Toeplitz blocks
========================================

Complex loops split into nonnegative and negative Fourier modes, the
constant loops joining the plus side.  Multiplication by an invertible
matrix loop almost respects the splitting: against the two mode sectors it
is block Toeplitz, the diagonal blocks are Fredholm with index minus the
winding number of the determinant, and the off-diagonal blocks have
singular values decaying like the symbol's Fourier coefficients.
"""

import numpy as np

from loopspace_lab import (
    MatrixLoop, SampledLoop, compactness_profile, fourier_split,
    fredholm_data, fredholm_index, toeplitz_blocks, winding_number,
)
from loopspace_lab.suites import _entire_rotation_symbol

n = 64
t = np.arange(n) / n
z = np.exp(2j * np.pi * t)

# splitting a Laurent polynomial: 3 + 2/z + z^2
loop = SampledLoop((3 + 2 / z + z ** 2)[:, None])
split = fourier_split(loop)
print("plus modes with mass:",
      split.plus_modes[np.abs(split.plus[:, 0]) > 1e-12])
print("minus modes with mass:",
      split.minus_modes[np.abs(split.minus[:, 0]) > 1e-12])

# multiplication by z is the shift: Fredholm of index -1
shift = MatrixLoop(z[:, None, None])
blocks = toeplitz_blocks(shift, 8)
print("index of z:", fredholm_index(blocks),
      " winding:", winding_number(shift))

# diag(z, 1/z): index 0 through a 1-dimensional kernel and cokernel
mats = np.zeros((n, 2, 2), dtype=complex)
mats[:, 0, 0] = z
mats[:, 1, 1] = 1 / z
idx, ker, coker = fredholm_data(toeplitz_blocks(MatrixLoop(mats), 8))
print(f"diag(z, 1/z): index {idx} with kernel {ker}, cokernel {coker}")

# a mixed symbol: index follows the determinant's winding
mixed = MatrixLoop((z ** 2 * np.exp(0.2 * z + 0.1 / z))[:, None, None])
print("index of z^2 e^(0.2 z + 0.1/z):",
      fredholm_index(toeplitz_blocks(mixed, 16)),
      " winding:", winding_number(mixed))

# the compactness certificate: entire symbols mix the sectors
# through rapidly decaying singular values
prof = compactness_profile(toeplitz_blocks(_entire_rotation_symbol(), 64))
s = prof["plus_minus"]
print("off-diagonal singular values at 0, 8, 16, 24:",
      [f"{s[j]:.2e}" for j in (0, 8, 16, 24)])
print("decay factors across 8 modes:",
      f"{s[8] / s[16]:.1e}", f"{s[16] / s[24]:.1e}")
