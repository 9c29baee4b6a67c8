"""Discrete Fourier helpers with angular-frequency convention.

Continuous pair used throughout the package:

    F[f](xi)      = integral f(x) exp(-i xi.x) dx
    Finv[F](x)    = (2 pi)^-d integral F(xi) exp(+i xi.x) dxi

Grids are centered: the spatial samples sit at x_j = (j - n//2) * dx,
the frequency samples at the unshifted ``2*pi*fftfreq(n, dx)`` points.
"""

import numpy as np


def grid_coords(n: int, half_width: float) -> np.ndarray:
    """Centered spatial sample positions for ``n`` points spanning
    ``[-half_width, half_width)``."""
    dx = 2.0 * half_width / n
    return (np.arange(n) - n // 2) * dx


def freq_coords(n: int, dx: float) -> np.ndarray:
    """Angular frequencies matching :func:`grid_coords`, fft order."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=dx)


def _center_phase(n: int) -> np.ndarray:
    # exp(+i xi_k * x_{n//2-origin shift}); reduces to (-1)^k for even n
    k = np.arange(n)
    return np.exp(2j * np.pi * k * (n // 2) / n)


def inverse_fft_nd(spectrum: np.ndarray, dxs) -> np.ndarray:
    """Evaluate the continuous inverse transform of samples taken on the
    :func:`freq_coords` grid, returning values at the centered spatial grid.

    ``dxs`` is the spatial step per axis (scalar or sequence).
    """
    nd = spectrum.ndim
    dxs = np.broadcast_to(np.asarray(dxs, dtype=float), (nd,))
    work = np.asarray(spectrum, dtype=complex)
    for ax in range(nd):
        shape = [1] * nd
        shape[ax] = spectrum.shape[ax]
        work = work * np.conj(_center_phase(spectrum.shape[ax])).reshape(shape)
    out = np.fft.ifftn(work)
    return out / np.prod(dxs)


def forward_fft_nd(values: np.ndarray, dxs) -> np.ndarray:
    """Evaluate the continuous forward transform of samples on the centered
    spatial grid, returning spectrum samples on the :func:`freq_coords` grid."""
    nd = values.ndim
    dxs = np.broadcast_to(np.asarray(dxs, dtype=float), (nd,))
    work = np.fft.fftn(np.asarray(values, dtype=complex))
    for ax in range(nd):
        shape = [1] * nd
        shape[ax] = values.shape[ax]
        work = work * _center_phase(values.shape[ax]).reshape(shape)
    return work * np.prod(dxs)
