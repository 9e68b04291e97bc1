import csv
import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .family import LPFamily
from .grid import GridSpec, SampledField, translation_phase


@dataclass(frozen=True, eq=False)
class TranslationSequence:
    """Separated translation vectors y_1 .. y_Jmax, one per band.

    ``ys[j - 1]`` is y_j. mu0 is half the minimal pairwise separation and
    |y_j| <= 2^(N0 j) holds for every j.
    """

    ys: np.ndarray
    mu0: float
    N0: int
    grid: Optional[GridSpec] = field(default=None, repr=False)

    def __post_init__(self):
        ys = np.array(self.ys, dtype=float)
        if ys.ndim == 1:
            ys = ys[:, None]
        ys.setflags(write=False)
        object.__setattr__(self, "ys", ys)
        norms = np.sqrt(np.sum(ys**2, axis=1))
        for j, length in enumerate(norms, start=1):
            if length > 2.0 ** (self.N0 * j):
                raise ValueError(f"|y_{j}| = {length} exceeds 2^(N0 j) with N0={self.N0}")
        if self.grid is not None:
            for j in range(len(ys)):
                for k in range(j + 1, len(ys)):
                    if self.grid.torusDistance(ys[j], ys[k]) < 2 * self.mu0 - 1e-12:
                        raise ValueError(f"y_{j + 1} and y_{k + 1} closer than 2 mu0")
            limit = self.grid.L / 2 - 4 * self.mu0
            if np.any(np.abs(ys) > limit):
                raise ValueError(
                    f"Translations leave the guard zone |y| <= {limit} of the period"
                )

    @property
    def Jmax(self) -> int:
        return len(self.ys)

    def __getitem__(self, j: int) -> np.ndarray:
        """y_j for 1 <= j <= Jmax"""
        if not 1 <= j <= self.Jmax:
            raise ValueError(f"Translation index {j} outside 1..{self.Jmax}")
        return self.ys[j - 1]

    def scaled(self, factor: float) -> "TranslationSequence":
        """Same directions with every y_j multiplied by factor, validated
        against the same grid.
        """
        if not factor > 0:
            raise ValueError(f"Scale factor must be positive, got {factor}")
        ys = factor * self.ys
        top = float(np.sqrt(np.sum(ys**2, axis=1)).max())
        N0 = max(1, math.ceil(math.log2(top))) if top > 1 else 1
        return TranslationSequence(ys, factor * self.mu0, N0, self.grid)

    def __repr__(self):
        return "<TranslationSequence Jmax={} mu0={} N0={}>".format(
            self.Jmax, self.mu0, self.N0
        )


def make_translations(Jmax: int, spacing: float, grid: GridSpec) -> TranslationSequence:
    """Linear translation sequence y_j = j * spacing * e_1.

    :param Jmax: number of translations
    :type  Jmax: int
    :param spacing: distance between consecutive y_j, equals 2 mu0
    :type  spacing: float
    :param grid: grid the sequence must fit into
    :type  grid: GridSpec
    :rtype: TranslationSequence
    """
    if not spacing > 0:
        raise ValueError(f"Spacing must be positive, got {spacing}")
    extent = Jmax * spacing + 2 * spacing
    if not extent < grid.L / 2:
        raise ValueError(
            f"Translations do not fit the period: {Jmax} * {spacing} plus guard "
            f"{2 * spacing} is not below L/2 = {grid.L / 2}"
        )
    ys = np.zeros((Jmax, grid.n))
    ys[:, 0] = spacing * np.arange(1, Jmax + 1)
    top = Jmax * spacing
    N0 = max(1, math.ceil(math.log2(top))) if top > 1 else 1
    sequence = TranslationSequence(ys, spacing / 2, N0, grid)
    logging.info("Created translations: %s", sequence)
    return sequence


def _check_compatible(fam: LPFamily, ys: TranslationSequence):
    if ys.Jmax < fam.Jmax:
        raise ValueError(
            f"Incompatible Jmax: family has {fam.Jmax} bands, "
            f"translation sequence only {ys.Jmax}"
        )
    if ys.ys.shape[1] != fam.grid.n:
        raise ValueError("Translation vectors and grid differ in dimension")


@functools.lru_cache(maxsize=8)
def transfer_symbol(fam: LPFamily, ys: TranslationSequence) -> np.ndarray:
    """sum_{j=1}^{Jmax} phi^_j exp(-2 pi i y_j.xi) on the frequency lattice,
    the symbol apply_T multiplies with.

    :rtype: np.ndarray
    """
    _check_compatible(fam, ys)
    symbol = np.zeros(fam.grid.shape, dtype=complex)
    for j in range(1, fam.Jmax + 1):
        symbol += fam.bands[j] * translation_phase(fam.grid, ys[j])
    symbol.setflags(write=False)
    return symbol


def apply_T(f: SampledField, fam: LPFamily, ys: TranslationSequence) -> SampledField:
    """Tf = sum_{j=1}^{Jmax} tau_{y_j}(phi_j * f), evaluated as one spectral sum.

    :param f: the input field
    :type  f: SampledField
    :param fam: the family, Jmax sets the truncation
    :type  fam: LPFamily
    :param ys: translations, one per band
    :type  ys: TranslationSequence
    :rtype: SampledField
    """
    _check_compatible(fam, ys)
    if f.grid != fam.grid:
        raise ValueError("Field and family live on different grids")
    return SampledField.fromSpectrum(f.grid, f.spectrum * transfer_symbol(fam, ys))


def _as_points(xi, n: int) -> np.ndarray:
    points = np.asarray(xi, dtype=float)
    if n == 1:
        return points.reshape(-1, 1)
    points = np.atleast_2d(points)
    if points.shape[-1] != n:
        raise ValueError(f"Frequencies must have {n} components")
    return points


def multiplier_m(xi, ys: TranslationSequence, fam: LPFamily) -> np.ndarray:
    """Symbol m(xi) = sum_j exp(-2 pi i y_j.xi) phi^_1(2^(1-j) xi) of T at
    arbitrary frequencies.

    :param xi: frequencies, shape (M,) for n=1 or (M, n)
    :rtype: np.ndarray
    """
    _check_compatible(fam, ys)
    points = _as_points(xi, fam.grid.n)
    r = np.sqrt(np.sum(points**2, axis=1))
    out = np.zeros(len(points), dtype=complex)
    for j in range(1, fam.Jmax + 1):
        phase = np.exp(-2j * np.pi * (points @ ys[j]))
        out += phase * fam.symbol(1, r * 2.0 ** (1 - j))
    return out


def grad_m(xi, ys: TranslationSequence, fam: LPFamily) -> np.ndarray:
    """Analytic gradient of m, shape (M, n).

    Term j contributes exp(-2 pi i y_j.xi) (-2 pi i y_j phi^_j(xi) + grad phi^_j(xi)).
    """
    _check_compatible(fam, ys)
    points = _as_points(xi, fam.grid.n)
    r = np.sqrt(np.sum(points**2, axis=1))
    direction = np.zeros_like(points)
    nonzero = r > 0
    direction[nonzero] = points[nonzero] / r[nonzero, None]
    out = np.zeros(points.shape, dtype=complex)
    for j in range(1, fam.Jmax + 1):
        y = ys[j]
        phase = np.exp(-2j * np.pi * (points @ y))
        value = fam.symbol(1, r * 2.0 ** (1 - j))
        slope = 2.0 ** (1 - j) * fam.symbolDerivative(1, r * 2.0 ** (1 - j))
        out += phase[:, None] * (
            -2j * np.pi * value[:, None] * y[None, :] + slope[:, None] * direction
        )
    return out


def grad_m_dyadic(j: int, xi0, ys: TranslationSequence, fam: LPFamily) -> float:
    """|grad m(2^j xi0)| for a unit vector xi0, equal to 2 pi |y_j|.

    :param j: band index, 1 <= j <= Jmax
    :param xi0: unit direction
    :rtype: float
    """
    if not 1 <= j <= fam.Jmax:
        raise ValueError(f"Band index {j} outside 1..{fam.Jmax}")
    direction = np.atleast_1d(np.asarray(xi0, dtype=float))
    if abs(np.linalg.norm(direction) - 1.0) > 1e-12:
        raise ValueError(f"xi0 must be a unit vector, got {xi0}")
    grad = grad_m(2.0**j * direction[None, :], ys, fam)
    return float(np.linalg.norm(grad[0]))


def _annulus_points(j: int, n: int, samples: int) -> np.ndarray:
    radii = np.linspace(2.0 ** (j - 1), 2.0 ** (j + 1), samples + 2)[1:-1]
    if n == 1:
        return np.concatenate([radii, -radii]).reshape(-1, 1)
    # golden angle spiral over the annulus
    angles = np.arange(samples) * np.pi * (3.0 - math.sqrt(5.0))
    return np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)


def growth_scan(
    k: int, j: int, ys: TranslationSequence, fam: LPFamily, samples: int = 1024
) -> float:
    """Max of |m| (k=0) or |grad m| (k=1) over the annulus 2^(j-1) < |xi| < 2^(j+1).

    :param k: derivative order
    :type  k: int
    :param samples: number of sample radii
    :type  samples: int
    :rtype: float
    """
    if k not in [0, 1]:
        raise NotImplementedError(f"Derivative order {k} not implemented")
    if samples < 64:
        raise ValueError(f"Need at least 64 samples, got {samples}")
    points = _annulus_points(j, fam.grid.n, samples)
    if k == 0:
        return float(np.abs(multiplier_m(points, ys, fam)).max())
    grad = grad_m(points, ys, fam)
    return float(np.sqrt(np.sum(np.abs(grad) ** 2, axis=1)).max())


def dilated_sobolev_seminorm(
    j: int, ys: TranslationSequence, fam: LPFamily, samples: int = 4096
) -> float:
    """L^2 norm over 1/2 < |xi| < 2 of the derivative of xi -> m(2^j xi).

    Unbounded in j for growing y_j.
    """
    if fam.grid.n != 1:
        raise NotImplementedError("Dilated seminorm is implemented for n=1 only")
    if samples < 64:
        raise ValueError(f"Need at least 64 samples, got {samples}")
    xi = np.linspace(0.5, 2.0, samples)
    total = 0.0
    for sign in [1.0, -1.0]:
        grad = 2.0**j * grad_m(sign * 2.0**j * xi, ys, fam)[:, 0]
        total += float(integrate.trapezoid(np.abs(grad) ** 2, xi))
    return math.sqrt(total)


def export_multiplier(xi, ys: TranslationSequence, fam: LPFamily, path: str):
    """Write xi, Re m, Im m, |grad m| as CSV."""
    points = _as_points(xi, fam.grid.n)
    values = multiplier_m(points, ys, fam)
    grads = np.sqrt(np.sum(np.abs(grad_m(points, ys, fam)) ** 2, axis=1))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["xi"] if fam.grid.n == 1 else ["xi_%s" % (i + 1) for i in range(fam.grid.n)]
        writer.writerow(header + ["re_m", "im_m", "abs_grad_m"])
        for point, value, grad in zip(points, values, grads):
            writer.writerow(
                ["%.12g" % c for c in point]
                + ["%.12g" % value.real, "%.12g" % value.imag, "%.12g" % grad]
            )
    logging.info("Wrote multiplier table: %s", path)
