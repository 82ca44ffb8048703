"""Truncated free-space Green's functions and precomputed convolution tables.

The free-space Poisson kernel is cut off at radius L and transformed in
closed form.  Provided the truncation radius satisfies
L >= sqrt(d) * 2h + 2R (box diameter plus twice the shape radius), the
periodized convolution that the mode sums implement reproduces the true
free-space field inside the box exactly.

Two usage modes exist:

* direct: sample ghat on the quadruply extended lattice (alpha = 4), which
  resolves the kernel's oscillation at scale L and is spectrally accurate;
* precomputed: collapse ghat * Shat products into effective tables on the
  doubly extended lattice (alpha = 2).  The tables are exact at the lattice
  collocation points and second-order accurate off-grid, and halve the
  transform sizes of every subsequent solve.

The precomputed tables are Fourier coefficients of the real-space kernels
g*S (potential) and g*S*S (interaction energy) restricted to the period-4h
torus; force multipliers are formed later as the spectral derivative of the
energy table, which keeps action-reaction and the discrete energy gradient
exact (truncating the vector kernel directly would break both at the seam).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import factorial as _factorial

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.fft as sfft
from scipy.special import j0, j1

from freepif.nufft import ModeGrid
from freepif.shapes import RadialBSpline, ShapeFunction, TruncatedGaussian

__all__ = [
    "ghat",
    "min_truncation_radius",
    "PrecomputedKernels",
    "precompute_kernels",
    "save_kernels",
    "load_kernels",
]

# switch to the small-argument series below this value of s * L; the direct
# form suffers 1 - J0 cancellation there while the series still converges fast
_SERIES_THRESHOLD = 0.5

# ascending coefficients in u = (s L / 2)^2 for (1 - J0(z))/z^2 and J1(z)/z;
# twelve terms keep the truncation error far below roundoff for u <= 1/16
_C_ONE_MINUS_J0 = np.array(
    [(-1.0) ** (m + 1) / (4.0 * _factorial(m) ** 2) for m in range(1, 13)]
)
_C_J1_OVER_Z = np.array(
    [(-1.0) ** m / (2.0 * _factorial(m) * _factorial(m + 1)) for m in range(12)]
)


def ghat(s, L: float, d: int = 2):
    """Fourier transform of the radius-L truncated Green's function.

    Parameters
    ----------
    s : array_like
        Radial wavenumber |k|, any nonnegative values including 0.
    L : float
        Truncation radius of the kernel.
    d : int
        Spatial dimension, 2 or 3.

    Returns
    -------
    ndarray
        For d=2: (1 - J0(L s))/s^2 - L log(L) J1(L s)/s, with the
        s -> 0 limit L^2/4 - L^2 log(L)/2 taken through a Taylor branch.
        For d=3: 2 (sin(L s / 2)/s)^2, evaluated in a cancellation-free
        sinc form whose s -> 0 limit is L^2/2.
    """
    s = np.asarray(s, dtype=float)
    if L <= 0:
        raise ValueError("L must be positive")
    if d == 3:
        half = 0.5 * L * s / np.pi
        return 0.5 * L * L * np.sinc(half) ** 2
    if d != 2:
        raise ValueError(f"d must be 2 or 3, got {d}")
    lnL = np.log(L)
    out = np.empty_like(s)
    small = s * L < _SERIES_THRESHOLD
    sb = s[~small]
    out[~small] = (1.0 - j0(L * sb)) / sb**2 - L * lnL * j1(L * sb) / sb
    u = (0.5 * L * s[small]) ** 2
    p1 = npoly.polyval(u, _C_ONE_MINUS_J0)  # (1 - J0(z))/z^2 in u = (z/2)^2
    p2 = npoly.polyval(u, _C_J1_OVER_Z)  # J1(z)/z
    out[small] = L * L * (p1 - lnL * p2)
    return out


def min_truncation_radius(d: int, shape_radius: float, half_extent: float = 0.5) -> float:
    """Smallest admissible L: box diameter plus two shape radii."""
    return np.sqrt(d) * 2.0 * half_extent + 2.0 * shape_radius


def mode_quadrature_weight(grid: ModeGrid) -> float:
    """Weight (dk / 2 pi)^2 that turns mode sums into inverse-transform quadratures."""
    return (grid.dk / (2.0 * np.pi)) ** 2


def _synthesize_kernel_samples(coeff_centered: np.ndarray, workers: int = 1) -> np.ndarray:
    """Real-space samples sum_n C_n exp(i k_n x) on the lattice's own grid."""
    m = coeff_centered.shape[0]
    wrapped = np.fft.ifftshift(coeff_centered)
    samples = sfft.ifft2(wrapped, workers=workers) * (m * m)
    return np.real(samples)  # even real coefficients give a real kernel


@dataclass
class PrecomputedKernels:
    """Effective kernel tables on the doubly extended lattice.

    pot_coeff and energy_coeff are centered (2 N_m, 2 N_m) real arrays of
    Fourier coefficients for the period-4h kernels g*S and g*S*S.  They were
    produced by sampling the exact multipliers on the alpha=4 lattice,
    transforming to real space, restricting to the alpha=2 torus, and
    transforming back.
    """

    n_modes: int
    L: float
    half_extent: float
    shape_key: tuple
    pot_coeff: np.ndarray
    energy_coeff: np.ndarray

    def matches(self, n_modes: int, L: float, half_extent: float, shape: ShapeFunction) -> bool:
        return (
            self.n_modes == n_modes
            and self.L == L
            and self.half_extent == half_extent
            and self.shape_key == shape.cache_key
        )


def precompute_kernels(
    n_modes: int,
    shape: ShapeFunction,
    L: float,
    half_extent: float = 0.5,
    workers: int = 1,
) -> PrecomputedKernels:
    """Build the alpha=2 effective tables from an alpha=4 sampling pass."""
    grid4 = ModeGrid(n_modes, alpha=4, half_extent=half_extent)
    s = grid4.k_radius
    w4 = mode_quadrature_weight(grid4)
    g = ghat(s, L, d=2)
    sh = shape.fourier(s)
    tables = []
    for mult in (w4 * g * sh, w4 * g * sh * sh):
        samples4 = _synthesize_kernel_samples(mult, workers=workers)  # fftshifted back below
        # samples live on x_m = m * (8h / 4N); keep the central [-2h, 2h) block
        n4 = 4 * n_modes
        shifted = np.fft.fftshift(samples4)
        lo = n4 // 2 - n_modes
        hi = n4 // 2 + n_modes
        block = shifted[lo:hi, lo:hi]
        m2 = 2 * n_modes
        coeff = sfft.fft2(np.fft.ifftshift(block), workers=workers) / (m2 * m2)
        tables.append(np.real(np.fft.fftshift(coeff)))
    return PrecomputedKernels(
        n_modes=n_modes,
        L=float(L),
        half_extent=float(half_extent),
        shape_key=shape.cache_key,
        pot_coeff=tables[0],
        energy_coeff=tables[1],
    )


# ---------------------------------------------------------------------------
# kernel cache file: magic, version, geometry, shape descriptor, two tables,
# everything little-endian

_MAGIC = b"FPIFKRN1"
_SHAPE_TAGS = {"bspline": 1, "tgauss": 2}


def save_kernels(path, kernels: PrecomputedKernels) -> None:
    """Write tables to a versioned little-endian binary container."""
    kind, p1, p2 = kernels.shape_key
    tag = _SHAPE_TAGS[kind]
    side = 2 * kernels.n_modes
    header = struct.pack(
        "<8sIIIddIddI",
        _MAGIC,
        1,  # version
        2,  # spatial dimension
        kernels.n_modes,
        kernels.L,
        kernels.half_extent,
        tag,
        float(p1),
        float(p2),
        side,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(kernels.pot_coeff, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(kernels.energy_coeff, dtype="<f8").tobytes())


def load_kernels(path) -> PrecomputedKernels:
    """Read a container written by save_kernels, validating magic and version."""
    with open(path, "rb") as fh:
        head = fh.read(struct.calcsize("<8sIIIddIddI"))
        magic, version, d, n_modes, L, half_extent, tag, p1, p2, side = struct.unpack(
            "<8sIIIddIddI", head
        )
        if magic != _MAGIC:
            raise ValueError(f"not a kernel cache file: bad magic {magic!r}")
        if version != 1 or d != 2:
            raise ValueError(f"unsupported kernel cache version={version} d={d}")
        if side != 2 * n_modes:
            raise ValueError("corrupt kernel cache: table side does not match n_modes")
        count = side * side
        pot = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(side, side).copy()
        energy = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(side, side).copy()
    kind = {v: k for k, v in _SHAPE_TAGS.items()}[tag]
    if kind == "bspline":
        key = ("bspline", int(p1), p2)
    else:
        key = ("tgauss", p1, p2)
    return PrecomputedKernels(
        n_modes=n_modes,
        L=L,
        half_extent=half_extent,
        shape_key=key,
        pot_coeff=pot,
        energy_coeff=energy,
    )


def shape_from_key(key) -> ShapeFunction:
    """Rebuild a shape object from its cache key."""
    kind, p1, p2 = key
    if kind == "bspline":
        return RadialBSpline(int(p1), p2)
    if kind == "tgauss":
        return TruncatedGaussian(p1, p2)
    raise ValueError(f"unknown shape kind {kind!r}")
