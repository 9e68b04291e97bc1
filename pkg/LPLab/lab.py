import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np

from .counterexample import Case, Measurement, build_chi, make_spec, measure
from .family import LPFamily, build_family
from .grid import GridSpec, SampledField, make_grid, random_field
from .operator import TranslationSequence, make_translations
from .version import banner


class Lab:
    """Grid, Littlewood-Paley family and translation sequence shared by all
    experiments of a run. Needed for everything this framework does.
    """

    boundary_tol: float = 1e-8
    coarseN: int = 2**16
    coarseJmax: int = 8

    def __init__(
        self,
        n: int = 1,
        L: float = 64.0,
        N: int = 2**20,
        Jmax: int = 12,
        eps0: float = 0.1,
        spacing: float = 2.0,
        seed: int = 0,
        boundary_tol: Optional[float] = None,
    ):
        """
        Build the grid, the family and the translations
        """
        self.grid: GridSpec = make_grid(n, L, N)
        self.fam: LPFamily = build_family(self.grid, Jmax, eps0)
        self.ys: TranslationSequence = make_translations(Jmax, spacing, self.grid)
        self.seed = seed
        if boundary_tol is not None:
            self.boundary_tol = boundary_tol
        self._chi: Optional[SampledField] = None
        self._measurements: Dict[Tuple, Measurement] = {}
        self._coarse: Optional["Lab"] = None
        self._truncated: Dict[int, "Lab"] = {}
        logging.info("%s lab ready: %s", banner, self.fam)

    @classmethod
    def fromConfig(cls, config) -> "Lab":
        return cls(
            config.n,
            config.L,
            config.N,
            config.Jmax,
            config.eps0,
            config.spacing,
            config.seed,
            config.boundary_tol,
        )

    @property
    def chi(self) -> SampledField:
        """Default bump at mu0 of the translation sequence"""
        if self._chi is None:
            self._chi = build_chi(self.grid, self.ys.mu0)
        return self._chi

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Independent generator per stream, all derived from the seed."""
        return np.random.default_rng([self.seed, stream])

    def randomField(self, rng: np.random.Generator) -> SampledField:
        """Random field band-limited to |xi| <= 2^(Jmax-1), exactly reproduced by
        the family.
        """
        return random_field(self.grid, rng, 2.0 ** (self.fam.Jmax - 1))

    def coarse(self) -> "Lab":
        """Smaller lab on the same period for randomized checks."""
        if self._coarse is None:
            spacing = self.ys.mu0 * 2
            N = min(self.coarseN, self.grid.N)
            resolvable = int(math.floor(math.log2(N / (2 * self.grid.L)))) - 1
            self._coarse = Lab(
                self.grid.n,
                self.grid.L,
                N,
                min(self.coarseJmax, self.fam.Jmax, resolvable),
                self.fam.eps0,
                spacing,
                self.seed,
                self.boundary_tol,
            )
        return self._coarse

    def atJmax(self, Jmax: int) -> "Lab":
        """Lab on the same period and spacing truncated at Jmax, on the
        smallest grid whose Nyquist frequency admits it.
        """
        if Jmax == self.fam.Jmax:
            return self
        if Jmax not in self._truncated:
            N = 2 ** int(math.ceil(math.log2(self.grid.L * 2.0 ** (Jmax + 2))))
            self._truncated[Jmax] = Lab(
                self.grid.n,
                self.grid.L,
                N,
                Jmax,
                self.fam.eps0,
                self.ys.mu0 * 2,
                self.seed,
                self.boundary_tol,
            )
        return self._truncated[Jmax]

    def measure(self, s: float, p: float, q: float, J: int) -> Measurement:
        """Measured norms of the counterexample for (s, p, q) truncated at J,
        cached per lab.

        :rtype: Measurement
        """
        key = (float(s), float(p), float(q), int(J))
        if key not in self._measurements:
            case = Case.forExponents(p, q)
            if case is None:
                raise ValueError(f"No counterexample for p = q = {p}")
            spec = make_spec(case, p, q, J, self.ys, s)
            self._measurements[key] = measure(spec, self.grid, self.fam, self.boundary_tol)
        return self._measurements[key]

    def __repr__(self):
        return "<Lab {} Jmax={} spacing={}>".format(
            self.grid, self.fam.Jmax, 2 * self.ys.mu0
        )

