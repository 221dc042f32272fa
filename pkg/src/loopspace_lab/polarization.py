"""Fourier polarization of complex loop spaces at finite truncation.

Loops in C^n split into the spans of the nonnegative and negative Fourier
modes (the constant loops sit on the plus side).  Multiplication by a loop
of matrices mixes the two sides only a little: the diagonal blocks of the
truncated operator are Fredholm with index minus the winding number of the
determinant, and the off-diagonal blocks have rapidly decaying singular
values when the symbol is smooth.  This module builds the blocks, computes
the index from numerical kernel dimensions, and measures the decay.

Finite square sections of a Toeplitz block always have matching kernel and
cokernel counts, so kernel dimensions are computed on boundary-extended
rectangular sections: rows run over the plus modes reachable from the
truncated columns (padded by the symbol bandwidth).  For banded symbols this
reproduces the kernels of the semi-infinite operator.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import IndexUnstable, SingularSymbol
from .geometry import MatrixLoop
from .loops import SampledLoop, to_fourier

RANK_THRESHOLD = 1e-8
SYMBOL_CONDITION_LIMIT = 1e8
STABILITY_STEP = 4


@dataclass(frozen=True)
class FourierSplit:
    """Fourier coefficients of a loop split by mode sign (0 goes to plus)."""

    dim: int
    plus_modes: np.ndarray
    plus: np.ndarray
    minus_modes: np.ndarray
    minus: np.ndarray


def fourier_split(loop: SampledLoop) -> FourierSplit:
    """Split the loop's spectrum into the k >= 0 and k < 0 parts."""
    rep = to_fourier(loop)
    modes = rep.modes
    pos = modes >= 0
    return FourierSplit(loop.dim,
                        modes[pos], rep.coefficients[pos],
                        modes[~pos], rep.coefficients[~pos])


def recombine(split: FourierSplit) -> np.ndarray:
    """The coefficients on the full mode range, exactly as stored."""
    modes = np.concatenate([split.minus_modes, split.plus_modes])
    coeffs = np.concatenate([split.minus, split.plus])
    order = np.argsort(modes)
    return modes[order], coeffs[order]


# -- symbols and their coefficients ---------------------------------------------

def symbol_coefficients(symbol: MatrixLoop) -> dict:
    """Matrix Fourier coefficients of the symbol, indexed by mode."""
    n_nodes = symbol.resolution
    c = np.fft.fft(symbol.matrices.astype(np.complex128), axis=0) / n_nodes
    out = {}
    for m in range(-n_nodes // 2 + 1, n_nodes // 2 + 1):
        out[m] = c[m % n_nodes]
    return out


def active_bandwidth(symbol: MatrixLoop, tol: float = 1e-12) -> int:
    coeffs = symbol_coefficients(symbol)
    bw = 0
    for m, mat in coeffs.items():
        if np.max(np.abs(mat)) > tol:
            bw = max(bw, abs(m))
    return bw


def _coeff_lookup(coeffs: dict, n: int):
    zero = np.zeros((n, n), dtype=np.complex128)

    def get(m: int):
        return coeffs.get(m, zero)

    return get


def _require_invertible(symbol: MatrixLoop):
    conds = np.linalg.cond(symbol.matrices)
    if not np.all(np.isfinite(conds)) or np.max(conds) >= SYMBOL_CONDITION_LIMIT:
        raise SingularSymbol("symbol matrix nearly singular at some node")


# -- truncated blocks -----------------------------------------------------------

@dataclass(frozen=True)
class OperatorBlocks:
    """The four mode-sign blocks of a truncated multiplication operator.

    Plus-sector modes are 0..K ascending, minus-sector modes are -K..-1
    ascending, each inflated by the matrix size n.
    """

    symbol: MatrixLoop
    truncation: int
    pp: np.ndarray
    pm: np.ndarray
    mp: np.ndarray
    mm: np.ndarray

    @property
    def n(self) -> int:
        return self.symbol.n

    def assembled(self) -> np.ndarray:
        """The full truncated operator, minus modes first."""
        top = np.hstack([self.mm, self.mp])
        bottom = np.hstack([self.pm, self.pp])
        return np.vstack([top, bottom])


def _block(get, n, row_modes, col_modes) -> np.ndarray:
    out = np.zeros((len(row_modes) * n, len(col_modes) * n), dtype=np.complex128)
    for i, k in enumerate(row_modes):
        for j, m in enumerate(col_modes):
            out[i * n:(i + 1) * n, j * n:(j + 1) * n] = get(k - m)
    return out


def full_multiplication_matrix(symbol: MatrixLoop, truncation: int) -> np.ndarray:
    """The truncated multiplication operator on modes -K..K (independent
    assembly used to validate the block decomposition)."""
    get = _coeff_lookup(symbol_coefficients(symbol), symbol.n)
    modes = list(range(-truncation, truncation + 1))
    return _block(get, symbol.n, modes, modes)


def toeplitz_blocks(symbol: MatrixLoop, truncation: int) -> OperatorBlocks:
    """Block decomposition of multiplication by the symbol at truncation K.

    Requires K at least the active bandwidth (so no convolution mass falls
    off the ends) and 2K at most the node count (so no aliasing).
    """
    if truncation < active_bandwidth(symbol):
        raise ValueError("truncation below the active bandwidth of the symbol")
    if 2 * truncation > symbol.resolution:
        raise ValueError("truncation beyond the Nyquist range of the symbol")
    get = _coeff_lookup(symbol_coefficients(symbol), symbol.n)
    plus = list(range(0, truncation + 1))
    minus = list(range(-truncation, 0))
    return OperatorBlocks(
        symbol=symbol, truncation=truncation,
        pp=_block(get, symbol.n, plus, plus),
        pm=_block(get, symbol.n, plus, minus),
        mp=_block(get, symbol.n, minus, plus),
        mm=_block(get, symbol.n, minus, minus),
    )


# -- Fredholm index ---------------------------------------------------------------

def _adjoint_symbol(symbol: MatrixLoop) -> MatrixLoop:
    return MatrixLoop(np.conj(np.swapaxes(symbol.matrices, 1, 2)))


def _numerical_kernel_dim(matrix: np.ndarray, threshold: float) -> int:
    svals = np.linalg.svd(matrix, compute_uv=False)
    return int(np.sum(svals <= threshold))


def _plus_kernel_dim(symbol: MatrixLoop, truncation: int, pad: int,
                     threshold: float) -> int:
    """Kernel dimension of the plus-sector compression on a rectangular
    window: columns are modes 0..K, rows all plus modes they can reach."""
    if 2 * (truncation + pad) > symbol.resolution:
        raise ValueError("stabilized truncation beyond the symbol's Nyquist range")
    get = _coeff_lookup(symbol_coefficients(symbol), symbol.n)
    rows = list(range(0, truncation + pad + 1))
    cols = list(range(0, truncation + 1))
    return _numerical_kernel_dim(_block(get, symbol.n, rows, cols), threshold)


def fredholm_data(blocks: OperatorBlocks, threshold: float = RANK_THRESHOLD):
    """(index, dim kernel, dim cokernel) of the plus-plus compression.

    Kernel counts are taken at the block's truncation and again four modes
    higher; disagreement raises IndexUnstable.
    """
    symbol = blocks.symbol
    _require_invertible(symbol)
    pad = max(1, active_bandwidth(symbol))
    adj = _adjoint_symbol(symbol)
    results = []
    for k in (blocks.truncation, blocks.truncation + STABILITY_STEP):
        ker = _plus_kernel_dim(symbol, k, pad, threshold)
        coker = _plus_kernel_dim(adj, k, pad, threshold)
        results.append((ker - coker, ker, coker))
    if results[0] != results[1]:
        raise IndexUnstable(
            f"kernel counts differ across truncations: {results[0]} vs {results[1]}")
    return results[0]


def fredholm_index(blocks: OperatorBlocks, threshold: float = RANK_THRESHOLD) -> int:
    """dim ker - dim coker of the plus-sector compression of the symbol."""
    return fredholm_data(blocks, threshold)[0]


def winding_number(symbol: MatrixLoop) -> int:
    """Winding of det(symbol) around 0, by principal-branch phase increments.

    Node counts of 64 and up keep each increment well below pi for the
    banded symbols used here.
    """
    dets = np.linalg.det(symbol.matrices.astype(np.complex128))
    if np.min(np.abs(dets)) < 1e-12:
        raise SingularSymbol("determinant vanishes at a node")
    phases = np.angle(dets)
    steps = np.diff(np.concatenate([phases, phases[:1]]))
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    total = steps.sum() / (2 * np.pi)
    rounded = int(np.round(total))
    if abs(total - rounded) > 1e-6:
        raise SingularSymbol(f"phase increments do not close up ({total:.3e})")
    return rounded


# -- compactness profiles ----------------------------------------------------------

def compactness_profile(blocks: OperatorBlocks) -> dict:
    """Descending singular values of the off-diagonal blocks.

    For smooth symbols these decay at the rate of the symbol's Fourier
    coefficients, which is the finite-truncation face of compactness.
    """
    s_pm = np.linalg.svd(blocks.pm, compute_uv=False)
    s_mp = np.linalg.svd(blocks.mp, compute_uv=False)
    return {"plus_minus": np.sort(s_pm)[::-1], "minus_plus": np.sort(s_mp)[::-1]}


def profile_to_csv(profile: dict, path) -> None:
    """CSV rows (block, index j, singular value)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["block", "j", "singular_value"])
        for name in ("plus_minus", "minus_plus"):
            for j, s in enumerate(profile[name]):
                writer.writerow([name, j, repr(float(s))])
