import functools
import math
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import special

Number = Union[int, float]


def is_power_of_two(N) -> bool:
    return isinstance(N, (int, np.integer)) and N > 0 and (N & (N - 1)) == 0


def check_exponent(name: str, value: Number, allowInf: bool = True) -> float:
    """Validate an integrability or summability exponent.

    :param name: name used in the error message
    :type  name: str
    :param value: the exponent, ``math.inf`` allowed unless allowInf is False
    :type  value: float
    :returns: the exponent as float
    :rtype: float
    """
    if isinstance(value, bool) or not isinstance(
        value, (int, float, np.integer, np.floating)
    ):
        raise TypeError(f"Exponent {name} must be a number, got {type(value)}")
    value = float(value)
    if math.isnan(value) or value <= 0:
        raise ValueError(f"Exponent {name} must be positive, got {value}")
    if math.isinf(value) and not allowInf:
        raise ValueError(f"Exponent {name} must be finite, got {value}")
    return value


def _psi(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive])
    return out


def smooth_step(t) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly increasing in
    between.
    """
    t = np.asarray(t, dtype=float)
    left = _psi(t)
    right = _psi(1.0 - t)
    return left / (left + right)


def smooth_step_derivative(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    left = np.exp(-1.0 / ti)
    right = np.exp(-1.0 / (1.0 - ti))
    # psi(t) / t^2 in log space, 1 / t^2 overflows before exp(-1/t) underflows
    leftSlope = np.exp(-1.0 / ti - 2.0 * np.log(ti))
    rightSlope = np.exp(-1.0 / (1.0 - ti) - 2.0 * np.log1p(-ti))
    out[inside] = (leftSlope * right + left * rightSlope) / (left + right) ** 2
    return out


def power_sum_norm(values: np.ndarray, p: float, weight: float = 1.0) -> float:
    """(weight * sum |v|^p)^(1/p), or max |v| for p = inf.

    Valid as a quasi-norm for 0 < p < 1 as well.
    """
    a = np.abs(np.asarray(values))
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    top = float(a.max())
    if top == 0.0:
        return 0.0
    # scaled to keep a**p in range for small p
    return top * float(weight * np.sum((a / top) ** p)) ** (1.0 / p)


def sequence_norm(a: Iterable[Number], r: float) -> float:
    """l^r (quasi-)norm of a finite sequence

    :param a: the sequence
    :param r: exponent in (0, inf]
    :type  r: float
    :rtype: float
    """
    r = check_exponent("r", r)
    return power_sum_norm(np.fromiter(a, dtype=float), r)


@functools.lru_cache()
def ball_volume(radius: float, n: int) -> float:
    """Lebesgue measure of a Euclidean ball of the given radius in R^n."""
    if radius < 0:
        raise ValueError(f"Radius must be non negative, got {radius}")
    return math.pi ** (n / 2) / special.gamma(n / 2 + 1) * radius**n


def log2_slope(xs: Sequence[Number], ys: Sequence[Number]) -> float:
    """Least squares slope of log2(ys) against xs."""
    ys = np.asarray(ys, dtype=float)
    if len(ys) < 2:
        raise ValueError("Need at least two points for a slope")
    if np.any(ys <= 0):
        raise ValueError("Cannot take the logarithm of non positive values")
    slope, _ = np.polyfit(np.asarray(xs, dtype=float), np.log2(ys), 1)
    return float(slope)


def format_exponent(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return "%.12g" % value


def parse_exponent(value) -> float:
    """Accept numbers and the strings "inf" or "Infinity"."""
    if isinstance(value, str):
        if value.strip().lower() in ["inf", "infinity", "+inf"]:
            return math.inf
        return float(value)
    if type(value) in [int, float]:
        return float(value)
    raise TypeError(f"Can not convert type {type(value)} to an exponent")
