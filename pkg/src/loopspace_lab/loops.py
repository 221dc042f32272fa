"""Discrete loops in R^d: sampling, trigonometric interpolation, spectral
differentiation, sup-seminorms of the jet, and the circle action.

A loop is stored as N uniform samples on the unit circle R/Z, with sample j
taken at t_j = j/N.  All evaluation between nodes goes through the
band-limited trigonometric interpolant, so any identity that holds pointwise
for smooth loops holds here to spectral accuracy.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

MIN_RESOLUTION = 8
MAX_DERIVATIVE_ORDER = 4


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SampledLoop:
    """A loop sampled at N uniform nodes of the circle R/Z.

    Parameters
    ----------
    samples : ndarray, shape (N, d)
        Sample j is the value at t_j = j/N.  N must be a power of two,
        N >= 8.  Real and complex loops are both supported.
    """

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim != 2:
            raise ValueError("samples must be a 2-d array of shape (N, d)")
        dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
        arr = np.ascontiguousarray(arr, dtype=dtype)
        if not _is_power_of_two(arr.shape[0]) or arr.shape[0] < MIN_RESOLUTION:
            raise ValueError(
                f"resolution must be a power of two >= {MIN_RESOLUTION}, got {arr.shape[0]}"
            )
        if arr.shape[1] < 1:
            raise ValueError("dimension must be positive")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", arr)

    @property
    def resolution(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples)

    @property
    def nodes(self) -> np.ndarray:
        """The sample parameters t_j = j/N."""
        n = self.resolution
        return np.arange(n) / n

    @classmethod
    def constant(cls, point, n: int = 128) -> "SampledLoop":
        point = np.atleast_1d(np.asarray(point))
        return cls(np.tile(point, (n, 1)))

    @classmethod
    def from_function(cls, f, n: int = 128) -> "SampledLoop":
        """Sample ``f : [0,1) -> R^d`` at the N uniform nodes."""
        t = np.arange(n) / n
        try:
            vals = np.asarray(f(t))
            if vals.shape[0] != n:
                raise ValueError
        except Exception:
            vals = np.asarray([f(tj) for tj in t])
        if vals.ndim == 1:
            vals = vals[:, None]
        return cls(vals)


@dataclass(frozen=True)
class FourierRep:
    """Fourier coefficients c_k of a loop for modes -N/2 < k <= N/2.

    ``coefficients[i]`` belongs to ``modes[i]``; for a real loop,
    c_{-k} = conj(c_k) for every stored pair.
    """

    dim: int
    coefficients: np.ndarray  # (N, d) complex, ordered by `modes`

    @property
    def resolution(self) -> int:
        return self.coefficients.shape[0]

    @property
    def modes(self) -> np.ndarray:
        n = self.resolution
        return np.arange(-n // 2 + 1, n // 2 + 1)


def to_fourier(loop: SampledLoop) -> FourierRep:
    """Fourier coefficients of the interpolant, modes -N/2 < k <= N/2."""
    n = loop.resolution
    c = np.fft.fft(loop.samples, axis=0) / n
    modes = np.arange(-n // 2 + 1, n // 2 + 1)
    return FourierRep(loop.dim, c[modes % n])


def to_samples(rep: FourierRep) -> SampledLoop:
    """Inverse of :func:`to_fourier`."""
    n = rep.resolution
    c = np.zeros((n, rep.dim), dtype=np.complex128)
    c[rep.modes % n] = rep.coefficients
    vals = np.fft.ifft(c * n, axis=0)
    if np.max(np.abs(vals.imag)) < 1e-9 * max(1.0, np.max(np.abs(vals.real))):
        vals = vals.real
    return SampledLoop(vals)


def _split_spectrum(loop: SampledLoop):
    """Spectrum on the symmetric mode grid -N/2 .. N/2 with the Nyquist
    coefficient split in half between +N/2 and -N/2.

    This is the unique representation whose interpolant is real for real
    data and whose derivative at the nodes matches spectral differentiation.
    """
    n = loop.resolution
    c = np.fft.fft(loop.samples, axis=0) / n
    modes = np.arange(-n // 2, n // 2 + 1)
    coeffs = c[modes % n].astype(np.complex128)
    coeffs[0] *= 0.5
    coeffs[-1] *= 0.5
    return modes, coeffs


def evaluate(loop: SampledLoop, t) -> np.ndarray:
    """Evaluate the trigonometric interpolant at circle parameter ``t``.

    ``t`` is reduced mod 1 and may be a scalar or an array; the result has
    shape ``t.shape + (d,)``.  Evaluation is exact at sample nodes.
    """
    modes, coeffs = _split_spectrum(loop)
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64)) % 1.0
    phases = np.exp(2j * np.pi * np.outer(t_arr, modes))
    out = phases @ coeffs
    if loop.is_real:
        out = out.real
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return out[0]
    return out.reshape(np.asarray(t).shape + (loop.dim,))


def derivative(loop: SampledLoop, order: int = 1) -> SampledLoop:
    """Samples of the order-th derivative of the interpolant.

    Orders above ``MAX_DERIVATIVE_ORDER`` are rejected: truncation noise is
    amplified by (2 pi N)^order.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order capped at {MAX_DERIVATIVE_ORDER}")
    n = loop.resolution
    k = np.fft.fftfreq(n, d=1.0 / n)
    if order % 2 == 1:
        k[n // 2] = 0.0  # symmetric interpolant: odd derivatives kill Nyquist
    factor = (2j * np.pi * k) ** order
    c = np.fft.fft(loop.samples, axis=0)
    vals = np.fft.ifft(c * factor[:, None], axis=0)
    if loop.is_real:
        vals = vals.real
    return SampledLoop(vals)


def ck_seminorm(loop: SampledLoop, k: int = 0) -> float:
    """Sup over nodes of the Euclidean norm of the k-th derivative.

    k = 0 is the sup-norm of the loop itself.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > MAX_DERIVATIVE_ORDER:
        raise ValueError(f"seminorm order capped at {MAX_DERIVATIVE_ORDER}")
    vals = loop.samples if k == 0 else derivative(loop, k).samples
    return float(np.max(np.linalg.norm(vals, axis=1)))


def rotate(loop: SampledLoop, s: float) -> SampledLoop:
    """The circle action: ``rotate(loop, s)(t) = loop(t + s)``.

    When s is a multiple of 1/N this is an exact cyclic shift of the
    samples; otherwise the interpolant is resampled.
    """
    n = loop.resolution
    shift = (float(s) % 1.0) * n
    nearest = round(shift)
    if abs(shift - nearest) < 1e-12:
        return SampledLoop(np.roll(loop.samples, -int(nearest) % n, axis=0))
    return SampledLoop(evaluate(loop, (np.arange(n) + shift) / n))


def random_bandlimited_loop(rng, dim: int, n: int = 128, bandwidth: int = 4,
                            amplitude: float = 1.0) -> SampledLoop:
    """A random real loop with Fourier support in |k| <= bandwidth."""
    if bandwidth > n // 4:
        raise ValueError("bandwidth above N/4 would not survive resampling")
    t = np.arange(n) / n
    vals = np.zeros((n, dim))
    for k in range(bandwidth + 1):
        a = rng.normal(size=dim) * amplitude / (1 + k)
        b = rng.normal(size=dim) * amplitude / (1 + k)
        vals += np.outer(np.cos(2 * np.pi * k * t), a)
        if k > 0:
            vals += np.outer(np.sin(2 * np.pi * k * t), b)
    return SampledLoop(vals)


# -- serialization -------------------------------------------------------------

def loop_to_dict(loop: SampledLoop) -> dict:
    if not loop.is_real:
        raise ValueError("loop files store real loops only")
    return {"dim": loop.dim, "n": loop.resolution,
            "samples": loop.samples.tolist()}


def loop_from_dict(data: dict) -> SampledLoop:
    loop = SampledLoop(np.asarray(data["samples"], dtype=np.float64))
    if loop.dim != data["dim"] or loop.resolution != data["n"]:
        raise ValueError("loop file header disagrees with its samples")
    return loop


def save_loop(loop: SampledLoop, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(loop_to_dict(loop), fh)


def load_loop(path) -> SampledLoop:
    with open(path, encoding="utf-8") as fh:
        return loop_from_dict(json.load(fh))


def loop_to_csv(loop: SampledLoop, path) -> None:
    """One row per node: t, x_1, ..., x_d."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x_{i + 1}" for i in range(loop.dim)])
        for tj, row in zip(loop.nodes, loop.samples):
            writer.writerow([repr(float(tj))] + [repr(float(x)) for x in row])
