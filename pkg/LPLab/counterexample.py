import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .family import LPFamily, band, band_stack
from .grid import (
    GridSpec,
    SampledField,
    ball_integrals,
    boundary_fraction,
    lp_quadrature,
    modulate,
    translate,
    translation_phase,
)
from .norms import (
    NormParams,
    besov_norm,
    mixed_norm,
    scale_range,
    tl_norm,
    tl_norm_infq,
    vector_besov_norm,
)
from .operator import TranslationSequence, apply_T
from .utils import ball_volume, log2_slope, sequence_norm, smooth_step


class Case(str, Enum):
    """PLT: p < q, atoms stacked at the origin. PGT: p > q, atoms dispersed
    to -y_j so that T stacks them.
    """

    PLT = "PLT"
    PGT = "PGT"

    @classmethod
    def forExponents(cls, p: float, q: float) -> Optional["Case"]:
        if p < q:
            return cls.PLT
        if p > q:
            return cls.PGT
        return None


def weight_sequence(case: Case, p: float, q: float, J: int) -> np.ndarray:
    """Weights a_1 .. a_J, in l^q but not l^p (PLT) or in l^p but not l^q (PGT).

    :param case: PLT uses (j + 3/p)^(-1/p), PGT uses (j + 3/q)^(-1/q)
    :type  case: Case
    :rtype: np.ndarray
    """
    case = Case(case)
    if Case.forExponents(p, q) != case:
        raise ValueError(f"Case {case.value} does not match exponents p={p}, q={q}")
    j = np.arange(1, J + 1, dtype=float)
    r = p if case == Case.PLT else q
    return (j + 3.0 / r) ** (-1.0 / r)


@dataclass(frozen=True, eq=False)
class CounterexampleSpec:
    """Parameters of the truncated counterexample
    f = sum_{j=1}^J 2^(-js) a_j tau_{-u_j}(chi e_j).
    """

    s: float
    p: float
    q: float
    J: int
    mu0: float
    case: Case
    ys: TranslationSequence
    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "case", Case(self.case))
        if Case.forExponents(self.p, self.q) != self.case:
            raise ValueError(
                f"Case {self.case.value} does not match exponents p={self.p}, q={self.q}"
            )
        if self.J < 1:
            raise ValueError(f"Need at least one atom, got J={self.J}")
        if self.J > self.ys.Jmax:
            raise ValueError(f"J={self.J} exceeds the {self.ys.Jmax} translations")
        a = np.asarray(self.a, dtype=float)
        if len(a) < self.J:
            raise ValueError(f"Weight sequence has {len(a)} entries, need {self.J}")
        a = a[: self.J].copy()
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        absA = np.abs(a)
        gap = np.abs(np.subtract.outer(np.arange(self.J), np.arange(self.J)))
        if np.any(absA[:, None] > 2.0**gap * absA[None, :] * (1 + 1e-12)):
            raise ValueError("Weights violate |a_j| <= 2^|j-k| |a_k|")

    @property
    def params(self) -> NormParams:
        return NormParams(self.p, self.q, self.s)

    @property
    def shifts(self) -> np.ndarray:
        """u_1 .. u_J, shape (J, n)"""
        if self.case == Case.PLT:
            return np.zeros((self.J, self.ys.ys.shape[1]))
        return np.array(self.ys.ys[: self.J])

    @property
    def centers(self) -> np.ndarray:
        """y_j - u_j, where band j of Tf concentrates"""
        return self.ys.ys[: self.J] - self.shifts

    def __repr__(self):
        return "<CounterexampleSpec {} s={} p={} q={} J={}>".format(
            self.case.value, self.s, self.p, self.q, self.J
        )


def make_spec(
    case: Case,
    p: float,
    q: float,
    J: int,
    ys: TranslationSequence,
    s: float = 0.0,
) -> CounterexampleSpec:
    """Counterexample with the standard weight sequence and mu0 taken from ys.

    :rtype: CounterexampleSpec
    """
    a = weight_sequence(case, p, q, J)
    return CounterexampleSpec(s, p, q, J, ys.mu0, case, ys, a)


@dataclass(frozen=True)
class OracleBracket:
    lower: float
    upper: float
    model: str = ""

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"Bracket lower {self.lower} above upper {self.upper}")

    def inflated(self, low: float = 0.7, high: float = 1.4) -> "OracleBracket":
        return OracleBracket(low * self.lower, high * self.upper, self.model)

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class OracleNorms:
    besov_f: OracleBracket
    tl_f: OracleBracket
    besov_Tf: OracleBracket
    tl_Tf: OracleBracket


def build_chi(grid: GridSpec, mu0: float) -> SampledField:
    """Smooth bump equal to 1 on B(0, mu0) and 0 outside B(0, 2 mu0),
    radially decreasing in between.

    :type  grid: GridSpec
    :param mu0: plateau radius
    :rtype: SampledField
    """
    if not 0 < 2 * mu0 < grid.L / 4:
        raise ValueError(f"mu0={mu0} too large for period L={grid.L}: need 2 mu0 < L/4")
    return SampledField(grid, smooth_step((2 * mu0 - grid.distance) / mu0))


def build_f(spec: CounterexampleSpec, grid: GridSpec, fam: LPFamily) -> SampledField:
    """Truncated counterexample sum_{j=1}^J 2^(-js) a_j tau_{-u_j}(chi e_j).

    :type  spec: CounterexampleSpec
    :rtype: SampledField
    """
    if spec.J > fam.Jmax - 2:
        raise ValueError(f"J={spec.J} too large, need J <= Jmax - 2 = {fam.Jmax - 2}")
    shifts = spec.shifts
    reach = float(np.sqrt(np.sum(shifts**2, axis=1)).max()) + 2 * spec.mu0
    if reach > grid.L / 2 - 2 * spec.mu0:
        raise ValueError(
            f"Atom supports reach {reach}, beyond the guard zone at "
            f"{grid.L / 2 - 2 * spec.mu0}"
        )
    chi = build_chi(grid, spec.mu0)
    spectrum = np.zeros(grid.shape, dtype=complex)
    for j in range(1, spec.J + 1):
        atom = modulate(chi, j)
        coefficient = 2.0 ** (-j * spec.s) * spec.a[j - 1]
        spectrum += coefficient * atom.spectrum * translation_phase(grid, -shifts[j - 1])
    return SampledField.fromSpectrum(grid, spectrum)


def decay_matrix(fam: LPFamily, chi: SampledField, jmax: int, kmax: int) -> np.ndarray:
    """D[j][k] = sup |phi_j * (chi e_k)| for 0 <= j <= jmax, 0 <= k <= kmax

    :rtype: np.ndarray
    """
    if jmax > fam.Jmax or kmax > fam.Jmax:
        raise ValueError(f"jmax={jmax}, kmax={kmax} must not exceed Jmax={fam.Jmax}")
    D = np.zeros((jmax + 1, kmax + 1))
    for k in range(kmax + 1):
        atom = modulate(chi, k)
        for j in range(jmax + 1):
            D[j, k] = float(np.abs(band(atom, j, fam).values).max())
    return D


def decay_slope(D: np.ndarray, lo: int = 3, dmin: int = 2, dmax: int = 6) -> float:
    """Slope of log2 of the off-diagonal envelope of D against |j - k|.

    For each distance d the envelope is the largest D[j][k] with |j - k| = d
    and j, k >= lo, floored at 2^-50 max(D) to stay above roundoff.

    :rtype: float
    """
    D = np.asarray(D, dtype=float)
    floor = 2.0**-50 * float(D.max())
    ds, envelope = [], []
    for d in range(dmin, dmax + 1):
        values = [
            D[j, k]
            for j in range(lo, D.shape[0])
            for k in range(lo, D.shape[1])
            if abs(j - k) == d
        ]
        if values:
            ds.append(d)
            envelope.append(max(max(values), floor))
    return log2_slope(ds, envelope)


@dataclass
class LowerBound:
    K_emp: Optional[int]
    margins: Dict[int, float] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.K_emp is not None


def _torus_mask(grid: GridSpec, center, radius: float) -> np.ndarray:
    diff = grid.positions - np.asarray(center, dtype=float).reshape(
        (grid.n,) + (1,) * grid.n
    )
    diff = np.mod(diff + grid.L / 2, grid.L) - grid.L / 2
    return np.sqrt(np.sum(diff**2, axis=0)) <= radius


def lower_bound_check(
    spec: CounterexampleSpec,
    grid: GridSpec,
    fam: LPFamily,
    ys: Optional[TranslationSequence] = None,
    Tf: Optional[SampledField] = None,
    threshold: float = 0.5,
    bands: Optional[np.ndarray] = None,
) -> LowerBound:
    """Margins min_{B(y_j - u_j, mu0/2)} 2^(js) |phi_j * Tf| / |a_j| and the
    least K with margin >= threshold for every K <= j <= J.

    :param Tf: T applied to build_f(spec), computed when omitted
    :param bands: band_stack(Tf, fam), bands are projected one by one when omitted
    :rtype: LowerBound
    """
    ys = spec.ys if ys is None else ys
    if Tf is None and bands is None:
        Tf = apply_T(build_f(spec, grid, fam), fam, ys)
    margins = {}
    for j in range(1, spec.J + 1):
        center = ys[j] - spec.shifts[j - 1]
        mask = _torus_mask(grid, center, spec.mu0 / 2)
        layer = bands[j] if bands is not None else np.abs(band(Tf, j, fam).values)
        weighted = 2.0 ** (j * spec.s) * layer[mask]
        margins[j] = float(weighted.min()) / abs(spec.a[j - 1])
    K_emp = None
    for j in range(spec.J, 0, -1):
        if margins[j] < threshold:
            break
        K_emp = j
    if K_emp is None:
        logging.warning("No lower bound index up to J=%s, margins: %s", spec.J, margins)
    else:
        logging.info("Lower bound holds from K=%s for %s", K_emp, spec)
    return LowerBound(K_emp, margins)


def _check_b(b: Sequence[float], phi: SampledField, ys: TranslationSequence) -> np.ndarray:
    b = np.asarray(b, dtype=complex)
    if len(b) > ys.Jmax:
        raise ValueError(f"{len(b)} coefficients but only {ys.Jmax} translations")
    if not np.any(b):
        raise ValueError("Coefficient sequence b is zero")
    return b


def _translated_sum(b: np.ndarray, phi: SampledField, ys: TranslationSequence) -> SampledField:
    spectrum = np.zeros(phi.grid.shape, dtype=complex)
    for j, coefficient in enumerate(b, start=1):
        spectrum += coefficient * translation_phase(phi.grid, ys[j])
    return SampledField.fromSpectrum(phi.grid, spectrum * phi.spectrum)


def disjoint_sum_ratio(b, phi: SampledField, ys: TranslationSequence, r: float) -> float:
    """||sum_j b_j tau_{y_j} phi||_{L^r} / ||b||_{l^r}

    :param b: coefficients b_1 .. b_m, m <= Jmax
    :param phi: the profile translated to each y_j
    :param r: exponent, r < 1 allowed
    :rtype: float
    """
    b = _check_b(b, phi, ys)
    if r < 1:
        logging.debug("Disjoint sum with r=%s below 1", r)
    return lp_quadrature(_translated_sum(b, phi, ys), r) / sequence_norm(np.abs(b), r)


def disjoint_sum_local_ratio(
    b, phi: SampledField, ys: TranslationSequence, r: float, radii=None
) -> float:
    """sup over dyadic R and lattice x of R^(-n/r) ||g||_{L^r(B(x,R))} / ||b||_inf
    with g = sum_j b_j tau_{y_j} phi.

    :param radii: ball radii, default 2^-J over the resolvable dyadic scales
    :rtype: float
    """
    b = _check_b(b, phi, ys)
    grid = phi.grid
    g = np.abs(_translated_sum(b, phi, ys).values)
    scale = float(np.abs(b).max())
    if math.isinf(r):
        return float(g.max()) / scale
    if radii is None:
        top = int(math.floor(math.log2(grid.N / grid.L))) - 2
        radii = [2.0**-J for J in scale_range(grid, top)]
    density = g**r
    best = 0.0
    for R in radii:
        local = float(ball_integrals(density, grid, R).max())
        best = max(best, (max(local, 0.0) / R**grid.n) ** (1.0 / r))
    return best / scale


def sequence_oracle(
    a: Sequence[float], p: float, q: float, mu0: float, n: int, stacked: bool
) -> Tuple[OracleBracket, OracleBracket]:
    """Besov and Triebel-Lizorkin brackets of the model where band j equals
    a_j times the indicator of a ball of radius between mu0 and 2 mu0. Stacked
    balls share one center, dispersed balls are disjoint.

    :returns: (besov bracket, triebel-lizorkin bracket)
    """
    a = np.abs(np.asarray(a, dtype=float))
    lo, hi = ball_volume(mu0, n), ball_volume(2 * mu0, n)
    normQ = sequence_norm(a, q)
    tag = "stacked" if stacked else "dispersed"
    if math.isinf(p):
        besov = OracleBracket(normQ, normQ, "besov")
        if math.isinf(q):
            value = float(a.max())
            return besov, OracleBracket(value, value, tag)
        inner = ball_volume(min(mu0, 1.0), n) ** (1.0 / q)
        unit = ball_volume(1.0, n) ** (1.0 / q)
        if stacked:
            return besov, OracleBracket(normQ * inner, normQ * unit, tag)
        top = float(a.max())
        return besov, OracleBracket(top * inner, top * 2 ** (1.0 / q) * unit, tag)
    besov = OracleBracket(normQ * lo ** (1.0 / p), normQ * hi ** (1.0 / p), "besov")
    norm = normQ if stacked else sequence_norm(a, p)
    return besov, OracleBracket(norm * lo ** (1.0 / p), norm * hi ** (1.0 / p), tag)


def oracle_norms(spec: CounterexampleSpec) -> OracleNorms:
    """Oracle brackets for f and Tf. In the PLT case f is stacked and Tf
    dispersed, in the PGT case the roles swap.

    :rtype: OracleNorms
    """
    n = spec.ys.ys.shape[1]
    stackedF = spec.case == Case.PLT
    besov, tlF = sequence_oracle(spec.a, spec.p, spec.q, spec.mu0, n, stackedF)
    _, tlTf = sequence_oracle(spec.a, spec.p, spec.q, spec.mu0, n, not stackedF)
    return OracleNorms(besov, tlF, besov, tlTf)


def vector_components(
    a: Sequence[float],
    u,
    ys: TranslationSequence,
    grid: GridSpec,
    mu0: Optional[float] = None,
) -> list:
    """Components f_k = a_k tau_{-u_k}(chi e_k), k = 1 .. len(a)."""
    mu0 = ys.mu0 if mu0 is None else mu0
    K = len(a)
    if u is None:
        shifts = np.zeros((K, grid.n))
    else:
        shifts = np.asarray(u, dtype=float).reshape(K, grid.n)
    reach = float(np.sqrt(np.sum(shifts**2, axis=1)).max()) + 2 * mu0
    if reach > grid.L / 2 - 2 * mu0:
        raise ValueError(f"Components reach {reach}, beyond the guard zone")
    chi = build_chi(grid, mu0)
    fields = []
    for k in range(1, K + 1):
        atom = a[k - 1] * modulate(chi, k)
        fields.append(translate(atom, -shifts[k - 1]))
    return fields


@dataclass
class VectorNorms:
    """Norms of the components f_k and of their images T f_k."""

    mixed_f: float
    mixed_Tf: float
    besov_f: Optional[float] = None
    besov_Tf: Optional[float] = None

    @property
    def ratio(self) -> float:
        return self.mixed_Tf / self.mixed_f

    @property
    def besovRatio(self) -> float:
        if self.besov_f is None:
            raise ValueError("Besov norms were not measured")
        return self.besov_Tf / self.besov_f


def vector_norms(
    a: Sequence[float],
    u,
    ys: TranslationSequence,
    q: float,
    fam: LPFamily,
    grid: GridSpec,
    mu0: Optional[float] = None,
    params: Optional[NormParams] = None,
) -> VectorNorms:
    """L^2(l^q) norms of the components f_k and of T f_k, and with params
    also their vector-valued Besov norms with inner exponent q. Components and
    images are built once for all four.

    :param a: component weights a_1 .. a_K
    :param u: shifts, shape (K, n), None for no shift
    :param q: exponent of the component sum
    :type  params: NormParams
    :rtype: VectorNorms
    """
    if len(a) > fam.Jmax - 2:
        raise ValueError(f"{len(a)} components, need at most Jmax - 2 = {fam.Jmax - 2}")
    fields = vector_components(a, u, ys, grid, mu0)
    images = [apply_T(f, fam, ys) for f in fields]
    result = VectorNorms(mixed_norm(fields, 2, q, grid), mixed_norm(images, 2, q, grid))
    if params is not None:
        result.besov_f = vector_besov_norm(fields, fam, params, q)
        result.besov_Tf = vector_besov_norm(images, fam, params, q)
    return result


def vector_valued_ratio(
    a: Sequence[float],
    u,
    ys: TranslationSequence,
    q: float,
    fam: LPFamily,
    grid: GridSpec,
    mu0: Optional[float] = None,
) -> Tuple[float, float]:
    """L^2(l^q) norms of the components f_k and of T f_k.

    :returns: (input norm, output norm)
    """
    norms = vector_norms(a, u, ys, q, fam, grid, mu0)
    return norms.mixed_f, norms.mixed_Tf


@dataclass
class Measurement:
    """Measured norms of one counterexample and its image under T."""

    spec: CounterexampleSpec
    besov_f: float
    tl_f: float
    besov_Tf: float
    tl_Tf: float
    oracle: OracleNorms
    lower: LowerBound
    boundary: float
    boundary_ok: bool

    @property
    def besovRatio(self) -> float:
        return self.besov_Tf / self.besov_f

    @property
    def tlRatio(self) -> float:
        return self.tl_Tf / self.tl_f


def _tl(f: SampledField, fam: LPFamily, params: NormParams, bands: np.ndarray) -> float:
    if math.isinf(params.p):
        return tl_norm_infq(f, fam, params.q, params.s, bands=bands)
    return tl_norm(f, fam, params, bands)


def measure(
    spec: CounterexampleSpec,
    grid: GridSpec,
    fam: LPFamily,
    boundary_tol: float = 1e-8,
) -> Measurement:
    """Build f and Tf and measure all four norms, the lower bound margins
    and the boundary mass.

    :param boundary_tol: accepted mass fraction near the period boundary
    :rtype: Measurement
    """
    f = build_f(spec, grid, fam)
    Tf = apply_T(f, fam, spec.ys)
    params = spec.params
    boundary = max(
        boundary_fraction(f, 2 * spec.mu0), boundary_fraction(Tf, 2 * spec.mu0)
    )
    boundary_ok = boundary <= boundary_tol
    if not boundary_ok:
        logging.warning("Boundary mass %s exceeds %s for %s", boundary, boundary_tol, spec)
    fBands, TfBands = band_stack(f, fam), band_stack(Tf, fam)
    result = Measurement(
        spec=spec,
        besov_f=besov_norm(f, fam, params, fBands),
        tl_f=_tl(f, fam, params, fBands),
        besov_Tf=besov_norm(Tf, fam, params, TfBands),
        tl_Tf=_tl(Tf, fam, params, TfBands),
        oracle=oracle_norms(spec),
        lower=lower_bound_check(spec, grid, fam, Tf=Tf, bands=TfBands),
        boundary=boundary,
        boundary_ok=boundary_ok,
    )
    logging.info(
        "Measured %s: besov ratio %s, tl ratio %s",
        spec,
        result.besovRatio,
        result.tlRatio,
    )
    return result
