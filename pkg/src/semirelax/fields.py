"""Complex fields on periodic grids and Fourier-multiplier calculus.

Transform normalization is fixed once for the whole package: the forward
transform carries the cell volume dx^n, so spectral coefficients approximate
the continuum Fourier integral f_hat(xi) = int f(x) exp(-i x.xi) dx, and
spectral sums divided by L^n approximate int |f_hat|^2 dxi / (2 pi)^n.
Parseval then reads  sum |f|^2 dx^n = sum |f_hat|^2 / L^n.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Callable, Sequence, Union

import numpy as np
import scipy.fft

from .grids import Grid, make_grid

__all__ = [
    "Field",
    "PHYSICAL",
    "SPECTRAL",
    "to_spectral",
    "to_physical",
    "apply_multiplier",
    "half_laplacian",
    "gradient",
    "second_derivative",
    "gaussian_field",
    "mode_field",
    "constant_field",
    "save_field",
    "load_field",
    "fft_workers",
]

PHYSICAL = "physical"
SPECTRAL = "spectral"

Symbol = Union[np.ndarray, Callable[[Sequence[np.ndarray]], np.ndarray]]


def fft_workers() -> int:
    """Worker count for FFT internals, capped by SEMIRELAX_THREADS.

    Results are bitwise deterministic for a fixed worker count; setting
    SEMIRELAX_THREADS=1 (the default) forces serial transforms.
    """
    raw = os.environ.get("SEMIRELAX_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class Field:
    """Complex scalar function sampled on a Grid.

    ``values`` has shape (N,)*n and is interpreted according to
    ``representation``: either point samples (physical) or Fourier
    coefficients in FFT order (spectral).  Fields are treated as immutable;
    all operations return new instances.
    """

    grid: Grid
    values: np.ndarray
    representation: str = PHYSICAL

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != self.grid.shape:
            raise ValueError(
                f"values shape {vals.shape} does not match grid shape {self.grid.shape}"
            )
        if self.representation not in (PHYSICAL, SPECTRAL):
            raise ValueError(f"unknown representation {self.representation!r}")
        object.__setattr__(self, "values", vals)

    @property
    def is_physical(self) -> bool:
        return self.representation == PHYSICAL

    @property
    def is_spectral(self) -> bool:
        return self.representation == SPECTRAL

    def copy(self) -> "Field":
        return replace(self, values=self.values.copy())


def to_spectral(f: Field) -> Field:
    """Forward transform; no-op if already spectral."""
    if f.is_spectral:
        return f
    coeffs = scipy.fft.fftn(f.values, workers=fft_workers()) * f.grid.cell_volume
    return Field(f.grid, coeffs, SPECTRAL)


def to_physical(f: Field) -> Field:
    """Inverse transform; no-op if already physical."""
    if f.is_physical:
        return f
    vals = scipy.fft.ifftn(f.values, workers=fft_workers()) / f.grid.cell_volume
    return Field(f.grid, vals, PHYSICAL)


def _symbol_array(grid: Grid, symbol: Symbol) -> np.ndarray:
    if callable(symbol):
        arr = np.asarray(symbol(grid.wavenumber_arrays), dtype=np.complex128)
    else:
        arr = np.asarray(symbol, dtype=np.complex128)
    arr = np.broadcast_to(arr, grid.shape)
    return arr


def _first_bad_mode(grid: Grid, arr: np.ndarray) -> tuple[float, ...]:
    idx = np.unravel_index(int(np.flatnonzero(~np.isfinite(arr))[0]), grid.shape)
    return tuple(float(grid.wavenumbers[i]) for i in idx)


def _is_even_symbol(grid: Grid, arr: np.ndarray) -> bool:
    # index map k -> -k (mod N) along every axis; Nyquist maps to itself
    rev = (-np.arange(grid.N)) % grid.N
    mirrored = arr[np.ix_(*([rev] * grid.n))]
    scale = float(np.max(np.abs(arr))) or 1.0
    return bool(np.max(np.abs(arr - mirrored)) <= 1e-14 * scale)


def _zero_nyquist(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    out = coeffs.copy()
    ny = grid.N // 2
    for ax in range(grid.n):
        sl = [slice(None)] * grid.n
        sl[ax] = ny
        out[tuple(sl)] = 0.0
    return out


def apply_multiplier(f: Field, symbol: Symbol, representation: str | None = None) -> Field:
    """Apply a Fourier multiplier to a field.

    Args:
        f: input field, either representation.
        symbol: multiplier m(xi); a callable receiving the tuple of per-axis
            wavenumber arrays (FFT order, broadcastable) and returning the
            multiplier values, or a precomputed array of shape grid.shape.
        representation: representation of the result; defaults to the input's.

    The unpaired Nyquist mode -N/2 is zeroed before multiplication whenever
    the symbol is not even in xi, which avoids asymmetric aliasing for odd
    symbols such as i*xi_j.

    Raises:
        ValueError: if the symbol is non-finite at some grid mode (the
            offending wavenumber vector is named in the message).
    """
    arr = _symbol_array(f.grid, symbol)
    if not np.isfinite(arr).all():
        xi = _first_bad_mode(f.grid, arr)
        raise ValueError(f"multiplier is non-finite at grid mode xi = {xi}")
    return _multiply_spectral(
        f, arr, even=_is_even_symbol(f.grid, arr),
        representation=representation or f.representation,
    )


def _multiply_spectral(f: Field, arr: np.ndarray, even: bool,
                       representation: str) -> Field:
    """Multiplier application with evenness already established; symbols of
    known parity (the propagator phase, |xi|) skip the detection pass."""
    spec = to_spectral(f)
    coeffs = spec.values
    if not even:
        coeffs = _zero_nyquist(f.grid, coeffs)
    out = Field(f.grid, coeffs * arr, SPECTRAL)
    return to_physical(out) if representation == PHYSICAL else out


def half_laplacian(f: Field) -> Field:
    """Apply D = (-Laplacian)^(1/2), the multiplier |xi|."""
    return _multiply_spectral(
        f, f.grid.xi_norm.astype(np.complex128), even=True,
        representation=f.representation,
    )


def gradient(f: Field) -> tuple[Field, ...]:
    """Spectral gradient, one Field per axis (multiplier i*xi_j)."""
    out = []
    for j in range(f.grid.n):
        kj = np.broadcast_to(f.grid.wavenumber_arrays[j], f.grid.shape)
        out.append(apply_multiplier(f, 1j * kj, representation=f.representation))
    return tuple(out)


def second_derivative(f: Field, j: int, k: int) -> Field:
    """Spectral second derivative d_j d_k (multiplier -xi_j xi_k)."""
    kj = np.broadcast_to(f.grid.wavenumber_arrays[j], f.grid.shape)
    kk = np.broadcast_to(f.grid.wavenumber_arrays[k], f.grid.shape)
    return apply_multiplier(f, -(kj * kk), representation=f.representation)


def gaussian_field(grid: Grid, amplitude: complex = 1.0, width: float = 1.0,
                   center: float = 0.0) -> Field:
    """amplitude * exp(-(|x - center|/width)^2), center applied on axis 0."""
    coords = list(grid.coordinate_arrays)
    coords[0] = coords[0] - center
    r2 = sum(np.asarray(c, dtype=float) ** 2 for c in coords)
    return Field(grid, amplitude * np.exp(-r2 / width**2), PHYSICAL)


def mode_field(grid: Grid, k: int, amplitude: complex = 1.0) -> Field:
    """Plane wave amplitude * exp(i * (2 pi k / L) * x_1)."""
    xi = 2.0 * np.pi * k / grid.L
    x = np.broadcast_to(grid.coordinate_arrays[0], grid.shape)
    return Field(grid, amplitude * np.exp(1j * xi * x), PHYSICAL)


def constant_field(grid: Grid, value: complex = 1.0) -> Field:
    return Field(grid, np.full(grid.shape, value, dtype=np.complex128), PHYSICAL)


def save_field(f: Field, path) -> None:
    """Write a field snapshot: header 'n N L representation', then one
    're im' line per value (17 significant digits, row-major order)."""
    vals = f.values.reshape(-1)
    with open(path, "w") as fh:
        fh.write(f"{f.grid.n} {f.grid.N} {f.grid.L:.17g} {f.representation}\n")
        for v in vals:
            fh.write(f"{v.real:.17g} {v.imag:.17g}\n")


def load_field(path) -> Field:
    """Read a field snapshot written by save_field."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValueError(f"malformed field header in {path}")
        n, N, L, rep = int(header[0]), int(header[1]), float(header[2]), header[3]
        grid = make_grid(n, N, L)
        data = np.loadtxt(fh, dtype=float, ndmin=2)
    if data.shape != (grid.size, 2):
        raise ValueError(
            f"expected {grid.size} 're im' lines in {path}, got {data.shape[0]}"
        )
    vals = (data[:, 0] + 1j * data[:, 1]).reshape(grid.shape)
    return Field(grid, vals, rep)
