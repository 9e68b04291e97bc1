import csv
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import GridSpec, SampledField
from .utils import smooth_step, smooth_step_derivative


class LPFamily:
    """Littlewood-Paley multiplier bank phi^_0 .. phi^_Jmax on the frequency
    lattice of a grid.

    phi^_0 is radial, equal to 1 for |xi| <= 2^eps0 and 0 for
    |xi| >= 2^(1-eps0); phi^_j(xi) = phi^_0(2^-j xi) - phi^_0(2^(1-j) xi).
    """

    def __init__(self, grid: GridSpec, Jmax: int, eps0: float = 0.1):
        if not 0 < eps0 < 0.5:
            raise ValueError(f"eps0 must lie in (0, 1/2), got {eps0}")
        if int(Jmax) != Jmax or Jmax < 1:
            raise ValueError(f"Jmax must be a positive integer, got {Jmax}")
        Jmax = int(Jmax)
        if 2.0 ** (Jmax + 1) > grid.nyquist:
            raise ValueError(
                f"Jmax={Jmax} too large for grid: 2^{Jmax + 1} exceeds "
                f"Nyquist {grid.nyquist}"
            )
        self.grid = grid
        self.Jmax = Jmax
        self.eps0 = float(eps0)
        self.plateau = 2.0**self.eps0
        self.support = 2.0 ** (1 - self.eps0)
        self._bands = self._buildTable()
        self._partition = self.phi0_hat(grid.radius * 2.0**-Jmax)
        self._partition.setflags(write=False)

    def _buildTable(self) -> np.ndarray:
        radius = self.grid.radius
        table = np.empty((self.Jmax + 1,) + self.grid.shape)
        previous = self.phi0_hat(radius)
        table[0] = previous
        for j in range(1, self.Jmax + 1):
            current = self.phi0_hat(radius * 2.0**-j)
            table[j] = current - previous
            previous = current
        table.setflags(write=False)
        return table

    def phi0_hat(self, r) -> np.ndarray:
        """Radial profile of phi^_0 at |xi| = r"""
        r = np.asarray(r, dtype=float)
        return smooth_step((self.support - r) / (self.support - self.plateau))

    def phi0_hat_derivative(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        width = self.support - self.plateau
        return -smooth_step_derivative((self.support - r) / width) / width

    def symbol(self, j: int, r) -> np.ndarray:
        """phi^_j at radius r, any j >= 0 including j > Jmax

        :param j: band index
        :type  j: int
        :param r: radii |xi|
        :rtype: np.ndarray
        """
        if j < 0:
            raise ValueError(f"Band index must be non negative, got {j}")
        r = np.abs(np.asarray(r, dtype=float))
        if j == 0:
            return self.phi0_hat(r)
        return self.phi0_hat(r * 2.0**-j) - self.phi0_hat(r * 2.0 ** (1 - j))

    def symbolDerivative(self, j: int, r) -> np.ndarray:
        """Radial derivative d/dr phi^_j(r)"""
        r = np.abs(np.asarray(r, dtype=float))
        if j == 0:
            return self.phi0_hat_derivative(r)
        return 2.0**-j * self.phi0_hat_derivative(r * 2.0**-j) - 2.0 ** (
            1 - j
        ) * self.phi0_hat_derivative(r * 2.0 ** (1 - j))

    @property
    def bands(self) -> np.ndarray:
        """Band table of shape ``(Jmax + 1,) + grid.shape``

        :rtype: np.ndarray
        """
        return self._bands

    def __getitem__(self, j: int) -> np.ndarray:
        self._checkIndex(j)
        return self._bands[j]

    def _checkIndex(self, j: int):
        if not 0 <= j <= self.Jmax:
            raise ValueError(f"Band index {j} outside 0..{self.Jmax}")

    @property
    def partition(self) -> np.ndarray:
        """Sum of all bands, phi^_0(2^-Jmax xi)"""
        return self._partition

    def kernel(self, j: int) -> SampledField:
        """Physical space kernel phi_j on the grid, centered at the origin."""
        self._checkIndex(j)
        return SampledField.fromSpectrum(self.grid, self._bands[j])

    def __repr__(self):
        return "<LPFamily Jmax={} eps0={} {}>".format(self.Jmax, self.eps0, self.grid)


def build_family(grid: GridSpec, Jmax: int, eps0: float = 0.1) -> LPFamily:
    """Build the Littlewood-Paley family up to band Jmax.

    :param grid: the grid the band table is evaluated on
    :type  grid: GridSpec
    :param Jmax: top band index, needs 2^(Jmax+1) <= Nyquist
    :type  Jmax: int
    :param eps0: plateau margin in (0, 1/2)
    :type  eps0: float
    :rtype: LPFamily
    """
    fam = LPFamily(grid, Jmax, eps0)
    logging.info("Built family: Jmax=%s, eps0=%s on %s", fam.Jmax, fam.eps0, grid)
    return fam


def band(f: SampledField, j: int, fam: LPFamily) -> SampledField:
    """Band projection phi_j * f

    :rtype: SampledField
    """
    fam._checkIndex(j)
    if f.grid != fam.grid:
        raise ValueError("Field and family live on different grids")
    return SampledField.fromSpectrum(f.grid, f.spectrum * fam.bands[j])


def band_stack(f: SampledField, fam: LPFamily) -> np.ndarray:
    """Magnitudes |phi_j * f| of all bands 0..Jmax, shape ``(Jmax + 1,) + grid.shape``.

    Every norm of f can be taken from one stack, so each band is transformed
    only once.

    :rtype: np.ndarray
    """
    if f.grid != fam.grid:
        raise ValueError("Field and family live on different grids")
    stack = np.empty((fam.Jmax + 1,) + f.grid.shape)
    for j in range(fam.Jmax + 1):
        stack[j] = np.abs(band(f, j, fam).values)
    stack.setflags(write=False)
    return stack


def truncation_defect(f: SampledField, fam: LPFamily) -> float:
    """Relative spectral l^2 mass of f not reproduced by the bands 0..Jmax."""
    energy = np.abs(f.spectrum) ** 2
    total = float(energy.sum())
    if total == 0.0:
        return 0.0
    missing = float(np.sum(energy * (1.0 - fam.partition) ** 2))
    return math.sqrt(missing / total)


@dataclass
class Reconstruction:
    field: SampledField
    defect: float
    ok: bool


def reconstruct(f: SampledField, fam: LPFamily, tol: float = 1e-10) -> Reconstruction:
    """Sum all band projections of f.

    A defect above ``tol`` means the spectrum of f reaches beyond the range
    where the bands sum to one; it is reported and logged, never raised.

    :param tol: accepted relative defect
    :type  tol: float
    :rtype: Reconstruction
    """
    total = np.zeros(f.grid.shape, dtype=complex)
    for j in range(fam.Jmax + 1):
        total += fam.bands[j]
    field = SampledField.fromSpectrum(f.grid, f.spectrum * total)
    defect = truncation_defect(f, fam)
    ok = defect <= tol
    if not ok:
        logging.warning("Reconstruction defect %s exceeds %s", defect, tol)
    return Reconstruction(field, defect, ok)


def export_bands(fam: LPFamily, path: str, stride: Optional[int] = None):
    """Write the band table along the positive first frequency axis as CSV
    with columns j, xi, phi_hat.

    :param stride: keep every stride-th frequency, default keeps about 4096
    """
    grid = fam.grid
    count = grid.N // 2
    if stride is None:
        stride = max(1, count // 4096)
    index = np.arange(0, count, stride)
    xi = index / grid.L
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["j", "xi", "phi_hat"])
        for j in range(fam.Jmax + 1):
            values = fam.symbol(j, xi)
            for x, v in zip(xi, values):
                writer.writerow([j, "%.12g" % x, "%.12g" % v])
    logging.info("Wrote band table: %s", path)
