"""Periodic grids, algebra-valued fields, and spectral calculus.

A field stores one coefficient column per basis unit, shape ``(n, 2**level)``.
All differentiation is Fourier-based and componentwise, exact on band-limited
data; quadrature is the rectangle rule, spectrally accurate on the torus.
"""

from __future__ import annotations

import csv
from functools import lru_cache

import numpy as np

from .algebra import CDElement, mul_values

__all__ = [
    "Grid",
    "AlgebraField",
    "spectral_diff",
    "integrate",
    "dealias",
    "fmul",
    "fadd",
    "fscale",
    "freal",
    "fimag",
    "fcommutator",
    "spectral_shift",
    "spectral_antiderivative",
    "random_smooth_field",
    "soliton_profile",
    "save_field_csv",
    "load_field_csv",
]

DEALIAS_FRACTION = 2.0 / 3.0


class Grid:
    """Periodic domain [0, L) sampled at n equispaced nodes (n a power of two)."""

    def __init__(self, n: int, length: float):
        n = int(n)
        if n < 8 or n & (n - 1):
            raise ValueError("n must be a power of two and >= 8")
        if not (length > 0):
            raise ValueError("length must be positive")
        self.n = n
        self.length = float(length)
        self.dx = self.length / n
        self.nodes = np.arange(n) * self.dx
        # rfft wavenumbers 2*pi*k/L, k = 0..n/2
        self.wavenumbers = 2.0 * np.pi * np.fft.rfftfreq(n, d=self.dx)

    def diff_symbol(self, order: int) -> np.ndarray:
        sym = (1j * self.wavenumbers) ** order
        if order % 2 == 1:
            # Nyquist mode carries no sign information for odd derivatives
            sym = sym.copy()
            sym[-1] = 0.0
        return sym

    @lru_cache(maxsize=None)
    def dealias_mask(self, fraction: float = DEALIAS_FRACTION) -> np.ndarray:
        keep = int(np.floor(fraction * (self.n // 2)))
        mask = np.zeros(self.n // 2 + 1)
        mask[: keep + 1] = 1.0
        return mask

    def quad(self, values: np.ndarray) -> np.ndarray | float:
        """Rectangle-rule integral over the torus (axis 0 is space)."""
        out = values.mean(axis=0) * self.length
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and self.n == other.n
            and self.length == other.length
        )

    def __hash__(self) -> int:
        return hash((self.n, self.length))

    def __repr__(self) -> str:
        return f"Grid(n={self.n}, length={self.length})"


class AlgebraField:
    """Algebra-valued function sampled on a grid: values shape (n, 2**level).

    Treated as immutable by every operation in this package: functions
    return new fields and never write into their arguments.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray):
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != grid.n:
            raise ValueError("values must have shape (grid.n, 2**level)")
        d = arr.shape[1]
        if d == 0 or d & (d - 1):
            raise ValueError("component count must be a power of two")
        self.grid = grid
        self.values = arr

    @property
    def level(self) -> int:
        return int(self.values.shape[1]).bit_length() - 1

    @classmethod
    def zeros(cls, grid: Grid, level: int = 3) -> "AlgebraField":
        return cls(grid, np.zeros((grid.n, 2**level)))

    @classmethod
    def from_components(cls, grid: Grid, **comps) -> "AlgebraField":
        """Build a level-3 field from named components u0..u7 (arrays or scalars)."""
        values = np.zeros((grid.n, 8))
        for name, data in comps.items():
            if not (name.startswith("u") and name[1:].isdigit()):
                raise ValueError(f"unknown component {name!r}")
            values[:, int(name[1:])] = data
        return cls(grid, values)

    def copy(self) -> "AlgebraField":
        return AlgebraField(self.grid, self.values.copy())

    def at(self, node: int) -> CDElement:
        return CDElement(self.values[node].copy())

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def allclose(self, other: "AlgebraField", atol: float = 1e-12) -> bool:
        return self.grid == other.grid and bool(
            np.allclose(self.values, other.values, atol=atol, rtol=0.0)
        )


def _check_fields(f: AlgebraField, g: AlgebraField) -> None:
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    if f.level != g.level:
        raise ValueError("level mismatch")


def diff_values(values: np.ndarray, grid: Grid, order: int) -> np.ndarray:
    sym = grid.diff_symbol(order)
    return np.fft.irfft(sym[:, None] * np.fft.rfft(values, axis=0), n=grid.n, axis=0)


def spectral_diff(f: AlgebraField, order: int) -> AlgebraField:
    """Componentwise Fourier derivative of the given order (1, 2 or 3)."""
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    return AlgebraField(f.grid, diff_values(f.values, f.grid, order))


def integrate(f: AlgebraField) -> CDElement:
    """Integral over the torus as an algebra element."""
    return CDElement(f.grid.quad(f.values))


def dealias_values(
    values: np.ndarray, grid: Grid, fraction: float = DEALIAS_FRACTION
) -> np.ndarray:
    mask = grid.dealias_mask(fraction)
    return np.fft.irfft(mask[:, None] * np.fft.rfft(values, axis=0), n=grid.n, axis=0)


def dealias(f: AlgebraField, fraction: float = DEALIAS_FRACTION) -> AlgebraField:
    """Zero all modes above ``fraction`` of the resolvable band."""
    return AlgebraField(f.grid, dealias_values(f.values, f.grid, fraction))


def fmul(f: AlgebraField, g: AlgebraField) -> AlgebraField:
    """Nodewise algebra product (no filtering; callers dealias as needed)."""
    _check_fields(f, g)
    return AlgebraField(f.grid, mul_values(f.values, g.values, f.level))


def fadd(f: AlgebraField, g: AlgebraField) -> AlgebraField:
    _check_fields(f, g)
    return AlgebraField(f.grid, f.values + g.values)


def fscale(f: AlgebraField, c: float) -> AlgebraField:
    return AlgebraField(f.grid, f.values * float(c))


def freal(f: AlgebraField) -> np.ndarray:
    """Real-part component as a plain (n,) array."""
    return f.values[:, 0].copy()


def fimag(f: AlgebraField) -> AlgebraField:
    values = f.values.copy()
    values[:, 0] = 0.0
    return AlgebraField(f.grid, values)


def fcommutator(f: AlgebraField, v) -> AlgebraField:
    """[f, v] nodewise; v may be a constant element or another field."""
    if isinstance(v, CDElement):
        if v.level != f.level:
            raise ValueError("level mismatch")
        vv = np.broadcast_to(v.coeffs, f.values.shape)
        out = mul_values(f.values, vv, f.level) - mul_values(vv, f.values, f.level)
        return AlgebraField(f.grid, out)
    _check_fields(f, v)
    out = mul_values(f.values, v.values, f.level) - mul_values(
        v.values, f.values, f.level
    )
    return AlgebraField(f.grid, out)


def spectral_shift(f: AlgebraField, delta: float) -> AlgebraField:
    """Trigonometric translation: returns x -> f(x - delta), exact on band-limited data."""
    phase = np.exp(-1j * f.grid.wavenumbers * delta)
    out = np.fft.irfft(
        phase[:, None] * np.fft.rfft(f.values, axis=0), n=f.grid.n, axis=0
    )
    return AlgebraField(f.grid, out)


def spectral_antiderivative(f: AlgebraField) -> AlgebraField:
    """Periodic antiderivative in the zero-mean gauge.

    The mean of each component is projected out (an x-linear part would not
    be periodic); the returned field itself has zero mean.
    """
    fh = np.fft.rfft(f.values, axis=0)
    sym = np.zeros_like(f.grid.wavenumbers, dtype=complex)
    sym[1:] = 1.0 / (1j * f.grid.wavenumbers[1:])
    sym[-1] = 0.0
    out = np.fft.irfft(sym[:, None] * fh, n=f.grid.n, axis=0)
    return AlgebraField(f.grid, out)


def random_smooth_field(
    grid: Grid,
    seed: int,
    mode_cutoff: int = 6,
    amplitude: float = 0.5,
    components=None,
    zero_mean: bool = False,
) -> AlgebraField:
    """Reproducible band-limited random field, scaled to the given sup norm."""
    if mode_cutoff < 1 or mode_cutoff > grid.n // 2 - 1:
        raise ValueError("mode_cutoff out of range")
    rng = np.random.default_rng(seed)
    comps = range(8) if components is None else components
    values = np.zeros((grid.n, 8))
    for m in comps:
        spec = np.zeros(grid.n // 2 + 1, dtype=complex)
        spec[1 : mode_cutoff + 1] = rng.normal(size=mode_cutoff) + 1j * rng.normal(
            size=mode_cutoff
        )
        if not zero_mean:
            spec[0] = rng.normal() * grid.n / 8.0
        values[:, m] = np.fft.irfft(spec, n=grid.n)
    peak = np.abs(values).max()
    if peak > 0:
        values *= amplitude / peak
    return AlgebraField(grid, values)


def soliton_profile(grid: Grid, c: float = 1.0, x0: float = 0.0) -> AlgebraField:
    """Real-sector traveling wave 3c sech^2(sqrt(c)/2 (x - x0)), wrapped periodically."""
    if c <= 0:
        raise ValueError("speed c must be positive")
    d = np.mod(grid.nodes - x0 + grid.length / 2.0, grid.length) - grid.length / 2.0
    values = np.zeros((grid.n, 8))
    values[:, 0] = 3.0 * c / np.cosh(0.5 * np.sqrt(c) * d) ** 2
    return AlgebraField(grid, values)


def save_field_csv(f: AlgebraField, path) -> None:
    """Snapshot format: header x,u0..u7 then one row per node."""
    d = f.values.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x"] + [f"u{m}" for m in range(d)])
        for i in range(f.grid.n):
            writer.writerow(
                [format(f.grid.nodes[i], ".17g")]
                + [format(v, ".17g") for v in f.values[i]]
            )


def load_field_csv(path) -> AlgebraField:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "x":
            raise ValueError("snapshot file must start with header x,u0,...")
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows)
    x = data[:, 0]
    n = x.size
    length = x[-1] + (x[1] - x[0])
    return AlgebraField(Grid(n, length), data[:, 1:])
