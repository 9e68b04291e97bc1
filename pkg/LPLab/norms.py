import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from .family import LPFamily, band, band_stack, truncation_defect
from .grid import GridSpec, SampledField, ball_integrals
from .utils import check_exponent, power_sum_norm, sequence_norm

Layer = Union[SampledField, np.ndarray]


@dataclass(frozen=True)
class NormParams:
    """Exponents and smoothness of a Besov or Triebel-Lizorkin quasi-norm."""

    p: float
    q: float
    s: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p", check_exponent("p", self.p))
        object.__setattr__(self, "q", check_exponent("q", self.q))
        if not math.isfinite(self.s):
            raise ValueError(f"Smoothness s must be finite, got {self.s}")

    def __str__(self):
        return f"s={self.s:g}, p={self.p:g}, q={self.q:g}"


def discarded_mass(f: SampledField, fam: LPFamily) -> float:
    """Relative spectral mass of f outside the range reproduced by fam.

    :rtype: float
    """
    return truncation_defect(f, fam)


def _warn_truncation(f: SampledField, fam: LPFamily, tol: float = 1e-10):
    mass = discarded_mass(f, fam)
    if mass > tol:
        logging.warning("Norm truncated at Jmax=%s, discarded mass %s", fam.Jmax, mass)


def _stack(f: SampledField, fam: LPFamily, bands: Optional[np.ndarray]) -> np.ndarray:
    if bands is None:
        return band_stack(f, fam)
    if bands.shape != (fam.Jmax + 1,) + f.grid.shape:
        raise ValueError(
            f"Band stack of shape {bands.shape} does not match Jmax={fam.Jmax} "
            f"on {f.grid}"
        )
    return bands


def _weighted_bands(stack: np.ndarray, s: float) -> Iterable[np.ndarray]:
    for j, layer in enumerate(stack):
        yield 2.0 ** (j * s) * layer


def besov_norm(
    f: SampledField,
    fam: LPFamily,
    params: NormParams,
    bands: Optional[np.ndarray] = None,
) -> float:
    """Besov quasi-norm: l^q over bands of 2^(js) ||phi_j * f||_{L^p}

    :param f: band-limited field
    :type  f: SampledField
    :param fam: the Littlewood-Paley family, truncates the sum at fam.Jmax
    :type  fam: LPFamily
    :param params: exponents and smoothness
    :type  params: NormParams
    :param bands: band_stack(f, fam), computed when omitted
    :rtype: float
    """
    _warn_truncation(f, fam)
    stack = _stack(f, fam, bands)
    weight = f.grid.cellVolume
    terms = [
        2.0 ** (j * params.s) * power_sum_norm(layer, params.p, weight)
        for j, layer in enumerate(stack)
    ]
    return sequence_norm(terms, params.q)


def _pointwise_lq(layers: Iterable[Layer], q: float) -> np.ndarray:
    acc = None
    for layer in layers:
        values = np.abs(layer.values if isinstance(layer, SampledField) else layer)
        if math.isinf(q):
            acc = values if acc is None else np.maximum(acc, values)
        else:
            acc = values**q if acc is None else acc + values**q
    if acc is None:
        raise ValueError("Need at least one layer")
    if math.isinf(q):
        return acc
    return acc ** (1.0 / q)


def mixed_norm(layers: Iterable[Layer], p: float, q: float, grid: GridSpec) -> float:
    """L^p(l^q) quasi-norm of a finite family of layers on one grid.

    :param layers: fields or arrays of grid shape
    :param p: outer exponent
    :param q: inner exponent
    :type  grid: GridSpec
    :rtype: float
    """
    p = check_exponent("p", p)
    q = check_exponent("q", q)
    return power_sum_norm(_pointwise_lq(layers, q), p, grid.cellVolume)


def tl_norm(
    f: SampledField,
    fam: LPFamily,
    params: NormParams,
    bands: Optional[np.ndarray] = None,
) -> float:
    """Triebel-Lizorkin quasi-norm for p < inf: L^p over space of the l^q
    sum over bands of 2^(js) |phi_j * f|.

    :param bands: band_stack(f, fam), computed when omitted
    :rtype: float
    """
    if math.isinf(params.p):
        raise ValueError("tl_norm needs p < inf, use tl_norm_infq")
    _warn_truncation(f, fam)
    stack = _stack(f, fam, bands)
    return mixed_norm(_weighted_bands(stack, params.s), params.p, params.q, f.grid)


def scale_range(grid: GridSpec, Jmax: int) -> range:
    """Dyadic scales J of the ball sup, radius 2^-J from below L/2 down to
    2^-Jmax.
    """
    Jmin = -int(math.floor(math.log2(grid.L))) + 1
    return range(Jmin, Jmax + 1)


def tl_norm_infq(
    f: SampledField,
    fam: LPFamily,
    q: float,
    s: float = 0.0,
    stride: int = 1,
    bands: Optional[np.ndarray] = None,
) -> float:
    """Triebel-Lizorkin quasi-norm for p = inf: sup over lattice centers x
    and dyadic J of 2^(Jn/q) (int_{B(x,2^-J)} sum_{j>=max(J,0)} |2^(js) phi_j * f|^q)^(1/q).

    :param q: inner exponent, inf gives sup_j sup_x |2^(js) phi_j * f|
    :param s: smoothness
    :param stride: use every stride-th lattice point per axis as ball center
    :param bands: band_stack(f, fam), computed when omitted
    :rtype: float
    """
    q = check_exponent("q", q)
    if not math.isfinite(s):
        raise ValueError(f"Smoothness s must be finite, got {s}")
    _warn_truncation(f, fam)
    stack = _stack(f, fam, bands)
    grid = f.grid
    centers = (slice(None, None, stride),) * grid.n
    if math.isinf(q):
        best = 0.0
        for layer in _weighted_bands(stack, s):
            best = max(best, float(layer[centers].max()))
        return best
    best = 0.0
    # running holds sum_{j >= max(J,0)} |.|^q, built from the top band down
    running = np.zeros(grid.shape)
    for J in reversed(scale_range(grid, fam.Jmax)):
        if J >= 0:
            running = running + (2.0 ** (J * s) * stack[J]) ** q
        R = 2.0**-J
        integral = ball_integrals(running, grid, R)[centers]
        top = float(integral.max())
        if top > 0:
            value = 2.0 ** (J * grid.n / q) * top ** (1.0 / q)
            best = max(best, value)
    return best


def conv_inequality_ratio(
    g: Sequence[Layer],
    delta: float,
    params: NormParams,
    grid: Optional[GridSpec] = None,
) -> float:
    """Ratio ||(sum_j 2^(-delta|j-k|) g_j)_k||_{L^p(l^q)} / ||(g_j)||_{L^p(l^q)}
    with output index k ranging over the input window.

    :param g: nonnegative layers
    :param delta: decay rate, positive
    :type  params: NormParams
    :rtype: float
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    arrays: List[np.ndarray] = []
    for layer in g:
        if isinstance(layer, SampledField):
            grid = layer.grid
            layer = layer.values
        values = np.asarray(layer)
        if np.iscomplexobj(values):
            if np.any(np.abs(values.imag) > 0):
                raise ValueError("Layers must be real and nonnegative")
            values = values.real
        if np.any(values < 0):
            raise ValueError("Layers must be nonnegative")
        arrays.append(values)
    if grid is None:
        raise ValueError("A grid is needed when the layers are plain arrays")
    denominator = mixed_norm(arrays, params.p, params.q, grid)
    if denominator == 0.0:
        raise ValueError("Zero denominator: all layers vanish")

    def smoothed():
        for k in range(len(arrays)):
            out = np.zeros_like(arrays[0])
            for j, values in enumerate(arrays):
                out = out + 2.0 ** (-delta * abs(j - k)) * values
            yield out

    return mixed_norm(smoothed(), params.p, params.q, grid) / denominator


def vector_besov_norm(
    fields: Sequence[SampledField], fam: LPFamily, params: NormParams, r: float
) -> float:
    """Besov quasi-norm of a vector-valued field: l^q over bands j of
    ||(2^(js) phi_j * f_k)_k||_{L^p(l^r)}.

    :param fields: components f_k on one grid
    :param r: exponent of the component sum
    :rtype: float
    """
    r = check_exponent("r", r)
    if not fields:
        raise ValueError("Need at least one component")
    grid = fields[0].grid
    terms = []
    for j in range(fam.Jmax + 1):
        layers = (2.0 ** (j * params.s) * np.abs(band(f, j, fam).values) for f in fields)
        terms.append(mixed_norm(layers, params.p, r, grid))
    return sequence_norm(terms, params.q)
