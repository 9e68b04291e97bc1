import functools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import fft as spfft

from .utils import is_power_of_two, power_sum_norm

Position = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class GridSpec:
    """Periodic sampling lattice with ``N`` points per axis on a torus of
    period ``L``. Sample k of an axis sits at ``-L/2 + k*h``.
    """

    n: int
    L: float
    N: int

    def __post_init__(self):
        if self.n not in [1, 2]:
            raise ValueError(f"Unsupported dimension n={self.n}, expected 1 or 2")
        if not self.L > 0:
            raise ValueError(f"Period length must be positive, got L={self.L}")
        if not is_power_of_two(self.N):
            raise ValueError(f"N must be a power of two, got N={self.N}")

    @property
    def h(self) -> float:
        """Sample spacing L/N"""
        return self.L / self.N

    @property
    def nyquist(self) -> float:
        return self.N / (2 * self.L)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def cellVolume(self) -> float:
        return self.h**self.n

    @property
    def positions(self) -> np.ndarray:
        """Lattice positions, shape ``(n,) + shape``

        :rtype: np.ndarray
        """
        return _lattice(self)[0]

    @property
    def frequencies(self) -> np.ndarray:
        """Frequency lattice k/L in fft ordering, shape ``(n,) + shape``

        :rtype: np.ndarray
        """
        return _lattice(self)[1]

    @property
    def radius(self) -> np.ndarray:
        """|xi| on the frequency lattice"""
        return _lattice(self)[2]

    @property
    def distance(self) -> np.ndarray:
        """|x| on the position lattice"""
        return _lattice(self)[3]

    @property
    def sign(self) -> np.ndarray:
        return _lattice(self)[4]

    def torusDistance(self, a: Position, b: Position) -> float:
        """Distance between two points of the torus."""
        d = np.abs(np.atleast_1d(np.asarray(a, float) - np.asarray(b, float)))
        d = np.mod(d, self.L)
        d = np.minimum(d, self.L - d)
        return float(np.sqrt(np.sum(d**2)))

    def __repr__(self):
        return "<GridSpec n={} L={} N={}>".format(self.n, self.L, self.N)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@functools.lru_cache(maxsize=4)
def _lattice(grid: GridSpec):
    axis = -grid.L / 2 + grid.h * np.arange(grid.N)
    freq = spfft.fftfreq(grid.N, d=grid.h)
    # (-1)^m per axis: phase of the -L/2 origin shift
    index = np.rint(freq * grid.L).astype(np.int64)
    parity = np.where(index % 2 == 0, 1.0, -1.0)
    xs = np.stack(np.meshgrid(*([axis] * grid.n), indexing="ij"))
    ks = np.stack(np.meshgrid(*([freq] * grid.n), indexing="ij"))
    sign = functools.reduce(np.multiply, np.meshgrid(*([parity] * grid.n), indexing="ij"))
    radius = np.sqrt(np.sum(ks**2, axis=0))
    distance = np.sqrt(np.sum(xs**2, axis=0))
    return tuple(_readonly(a) for a in (xs, ks, radius, distance, sign))


def _forward(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    return grid.cellVolume * grid.sign * spfft.fftn(values)


def _inverse(grid: GridSpec, spectrum: np.ndarray) -> np.ndarray:
    return spfft.ifftn(spectrum * grid.sign) / grid.cellVolume


class SampledField:
    """Complex samples on a GridSpec with lazily computed, cached spectrum.

    The spectrum follows the convention ``f^(xi) = int f(x) exp(-2 pi i x.xi) dx``
    restricted to the frequency lattice. Both arrays are read-only.
    """

    def __init__(self, grid: GridSpec, values):
        arr = np.array(values, dtype=complex)
        if arr.shape != grid.shape:
            raise ValueError(
                f"Values of shape {arr.shape} do not match grid shape {grid.shape}"
            )
        self.grid = grid
        self._values: Optional[np.ndarray] = _readonly(arr)
        self._spectrum: Optional[np.ndarray] = None

    @classmethod
    def fromSpectrum(cls, grid: GridSpec, spectrum) -> "SampledField":
        arr = np.array(spectrum, dtype=complex)
        if arr.shape != grid.shape:
            raise ValueError(
                f"Spectrum of shape {arr.shape} does not match grid shape {grid.shape}"
            )
        field = cls.__new__(cls)
        field.grid = grid
        field._values = None
        field._spectrum = _readonly(arr)
        return field

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SampledField":
        return cls(grid, np.zeros(grid.shape))

    @property
    def values(self) -> np.ndarray:
        """
        :rtype: np.ndarray
        """
        if self._values is None:
            self._values = _readonly(_inverse(self.grid, self._spectrum))
        return self._values

    @property
    def spectrum(self) -> np.ndarray:
        """
        :rtype: np.ndarray
        """
        if self._spectrum is None:
            self._spectrum = _readonly(_forward(self.grid, self._values))
        return self._spectrum

    def _combine(self, other, op: Callable) -> "SampledField":
        if isinstance(other, SampledField):
            if other.grid != self.grid:
                raise ValueError("Fields live on different grids")
            return SampledField(self.grid, op(self.values, other.values))
        return NotImplemented

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex, np.number)):
            return SampledField(self.grid, scalar * self.values)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return SampledField(self.grid, -self.values)

    def __repr__(self):
        return "<SampledField n={} N={} max|f|={:.3g}>".format(
            self.grid.n, self.grid.N, float(np.abs(self.values).max())
        )


def make_grid(n: int, L: float, N: int) -> GridSpec:
    """Create the periodic lattice the rest of the lab works on.

    :param n: dimension, 1 or 2
    :type  n: int
    :param L: period length per axis
    :type  L: float
    :param N: samples per axis, a power of two
    :type  N: int
    :rtype: GridSpec
    """
    if isinstance(N, float) and N.is_integer():
        N = int(N)
    grid = GridSpec(n, float(L), N)
    logging.debug("Created grid: %s, h=%s, nyquist=%s", grid, grid.h, grid.nyquist)
    return grid


def lp_quadrature(f: SampledField, p: float) -> float:
    """Riemann sum approximation of the L^p quasi-norm over one period.

    :param f: the field
    :type  f: SampledField
    :param p: exponent in (0, inf]
    :type  p: float
    :rtype: float
    """
    if not p > 0:
        raise ValueError(f"Exponent p must be positive, got {p}")
    return power_sum_norm(f.values, p, f.grid.cellVolume)


def spectral_l2(f: SampledField) -> float:
    """L^2 norm computed from the spectrum (Parseval on the torus)."""
    return float(np.sqrt(np.sum(np.abs(f.spectrum) ** 2) / f.grid.L**f.grid.n))


def _frequency_argument(grid: GridSpec) -> np.ndarray:
    if grid.n == 1:
        return grid.frequencies[0]
    return grid.frequencies


def spectral_multiplier(f: SampledField, symbol) -> SampledField:
    """Multiply the spectrum of f by a symbol.

    :param f: the field
    :type  f: SampledField
    :param symbol: callable taking the frequency lattice (a 1d array for n=1,
        shape (2, N, N) for n=2) or an array already evaluated on it
    :returns: field with spectrum symbol * f^
    :rtype: SampledField
    """
    if callable(symbol):
        values = np.asarray(symbol(_frequency_argument(f.grid)))
    elif isinstance(symbol, np.ndarray):
        values = symbol
    else:
        raise TypeError(f"Symbol must be callable or an array, got {type(symbol)}")
    if values.shape != f.grid.shape:
        values = np.broadcast_to(values, f.grid.shape)
    return SampledField.fromSpectrum(f.grid, f.spectrum * values)


def _as_vector(grid: GridSpec, y: Position) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(y, dtype=float))
    if vec.shape != (grid.n,):
        raise ValueError(f"Expected a vector with {grid.n} components, got {vec}")
    return vec


def translation_phase(grid: GridSpec, y: Position) -> np.ndarray:
    """exp(-2 pi i y.xi) on the frequency lattice"""
    vec = _as_vector(grid, y)
    arg = np.tensordot(vec, grid.frequencies, axes=1)
    return np.exp(-2j * np.pi * arg)


def translate(f: SampledField, y: Position) -> SampledField:
    """Periodic translation x -> f(x - y) by an arbitrary real vector.

    :param f: the field
    :type  f: SampledField
    :param y: translation vector, scalar allowed for n=1
    :rtype: SampledField
    """
    vec = _as_vector(f.grid, y)
    if not np.any(vec):
        return f
    return SampledField.fromSpectrum(f.grid, f.spectrum * translation_phase(f.grid, vec))


def modulation_index(grid: GridSpec, j: int, y0: Optional[Position] = None) -> np.ndarray:
    """Lattice index of the modulation frequency 2^j y0.

    :raises ValueError: if 2^j y0 is off the lattice or above Nyquist
    """
    vec = np.zeros(grid.n)
    vec[0] = 1.0
    if y0 is not None:
        vec = _as_vector(grid, y0)
    freq = 2.0**j * vec
    index = freq * grid.L
    rounded = np.rint(index)
    if np.any(np.abs(index - rounded) > 1e-9):
        raise ValueError(f"Modulation frequency {freq} is not on the frequency lattice")
    if np.sqrt(np.sum(freq**2)) >= grid.nyquist:
        raise ValueError(
            f"Modulation frequency {freq} is not below Nyquist {grid.nyquist}"
        )
    return rounded.astype(np.int64)


def modulate(f: SampledField, j: int, y0: Optional[Position] = None) -> SampledField:
    """Multiply f by exp(2 pi i 2^j y0.x), default y0 = e_1.

    :param f: the field
    :type  f: SampledField
    :param j: band index
    :type  j: int
    :param y0: unit direction
    :rtype: SampledField
    """
    grid = f.grid
    index = modulation_index(grid, j, y0)
    # exact integer phase: x_k = -L/2 + k h gives (-1)^m exp(2 pi i m k / N)
    k = np.arange(grid.N, dtype=np.int64)
    phase = np.ones(grid.shape, dtype=complex)
    for axis, m in enumerate(index):
        factor = np.exp(2j * np.pi * ((m * k) % grid.N) / grid.N)
        if m % 2:
            factor = -factor
        shape = [1] * grid.n
        shape[axis] = grid.N
        phase = phase * factor.reshape(shape)
    return SampledField(grid, f.values * phase)


def boundary_fraction(f: SampledField, width: float) -> float:
    """Fraction of the mass of |f| within ``width`` of the period boundary.

    :rtype: float
    """
    mass = np.abs(f.values)
    total = float(mass.sum())
    if total == 0.0:
        return 0.0
    mask = np.any(np.abs(f.grid.positions) > f.grid.L / 2 - width, axis=0)
    return float(mass[mask].sum()) / total


def spectral_tail(f: SampledField, cutoff: float) -> float:
    """Relative spectral l^2 mass of f at |xi| > cutoff."""
    energy = np.abs(f.spectrum) ** 2
    total = float(energy.sum())
    if total == 0.0:
        return 0.0
    return math.sqrt(float(energy[f.grid.radius > cutoff].sum()) / total)


def ball_offsets(grid: GridSpec, R: float) -> np.ndarray:
    """Quadrature weights of the ball B(0, R) indexed by lattice offset in fft
    ordering. In 1d cells are weighted by their overlap with the ball, in 2d
    lattice points inside the disk count fully.
    """
    offsets = np.rint(spfft.fftfreq(grid.N, d=1.0 / grid.N)).astype(np.int64)
    if grid.n == 1:
        return np.clip(R / grid.h + 0.5 - np.abs(offsets), 0.0, 1.0)
    a, b = np.meshgrid(offsets, offsets, indexing="ij")
    return ((a**2 + b**2) * grid.h**2 <= R**2).astype(float)


@functools.lru_cache(maxsize=32)
def _ball_spectrum(grid: GridSpec, R: float) -> np.ndarray:
    # the weights are even in every offset, so their transform is real
    spectrum = spfft.rfftn(ball_offsets(grid, R)).real
    return _readonly(spectrum)


def ball_integrals(density: np.ndarray, grid: GridSpec, R: float) -> np.ndarray:
    """Integral of a real density over B(x, R) for every lattice center x."""
    conv = spfft.irfftn(
        spfft.rfftn(density) * _ball_spectrum(grid, float(R)), s=grid.shape
    )
    return grid.cellVolume * conv


def random_field(
    grid: GridSpec, rng: np.random.Generator, cutoff: float
) -> SampledField:
    """Random field with complex Gaussian spectrum supported on |xi| <= cutoff.

    :param rng: numpy random generator
    :param cutoff: spectral radius of the support
    :rtype: SampledField
    """
    shape = grid.shape
    spectrum = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    spectrum[grid.radius > cutoff] = 0.0
    return SampledField.fromSpectrum(grid, spectrum)
