"""NumPy fallback for the Monte Carlo reduction kernels.

Semantics match spclab._speedups; results may differ from the compiled path
in the last bits because NumPy uses pairwise summation (documented relative
tolerance 1e-9).
"""

from __future__ import annotations

import numpy as np


def spc_replicates(shift: np.ndarray, scale: np.ndarray, noise: np.ndarray) -> np.ndarray:
    """Per-replicate sum of (shift_j - scale_j * noise_rj)^2."""
    d = shift[None, :] - noise * scale[None, :]
    return np.einsum("rj,rj->r", d, d)


def count_outside(
    dev: np.ndarray,
    sd: np.ndarray,
    tail_sq: float,
    radius_sq: float,
    noise: np.ndarray,
) -> int:
    """Number of rows with sum_j (dev_j + sd_j * noise_rj)^2 + tail_sq > radius_sq."""
    d = dev[None, :] + noise * sd[None, :]
    nrm = np.einsum("rj,rj->r", d, d) + tail_sq
    return int(np.count_nonzero(nrm > radius_sq))
