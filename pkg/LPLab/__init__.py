# -*-coding:utf-8-*
import logging
from typing import List, Optional, Sequence

from .config import ExperimentConfig
from .counterexample import (
    Case,
    CounterexampleSpec,
    LowerBound,
    Measurement,
    OracleBracket,
    OracleNorms,
    VectorNorms,
    build_chi,
    build_f,
    decay_matrix,
    decay_slope,
    disjoint_sum_local_ratio,
    disjoint_sum_ratio,
    lower_bound_check,
    make_spec,
    measure,
    oracle_norms,
    sequence_oracle,
    vector_norms,
    vector_valued_ratio,
    weight_sequence,
)
from .experiments import Check, Report, run
from .family import (
    LPFamily,
    Reconstruction,
    band,
    band_stack,
    build_family,
    export_bands,
    reconstruct,
)
from .grid import (
    GridSpec,
    SampledField,
    lp_quadrature,
    make_grid,
    modulate,
    spectral_multiplier,
    translate,
)
from .lab import Lab
from .norms import (
    NormParams,
    besov_norm,
    conv_inequality_ratio,
    discarded_mass,
    mixed_norm,
    tl_norm,
    tl_norm_infq,
    vector_besov_norm,
)
from .operator import (
    TranslationSequence,
    apply_T,
    dilated_sobolev_seminorm,
    export_multiplier,
    grad_m,
    grad_m_dyadic,
    growth_scan,
    make_translations,
    multiplier_m,
    transfer_symbol,
)
from .table import NormRow, NormTable, emit, read_table
from .version import version as __version__


def setup_lab(config: Optional[ExperimentConfig] = None, **overrides) -> Lab:
    """Create a lab from a config, from keyword arguments or from the defaults

    :param config: run configuration, optional
    :type  config: ExperimentConfig
    :param overrides: grid, family or translation parameters (n, L, N, Jmax,
        eps0, spacing, seed)
    :returns: Lab with grid, family and translation sequence built
    :rtype: Lab

    """
    if config is not None:
        if overrides:
            config = config.replace(**overrides)
        return Lab.fromConfig(config)
    return Lab(**overrides)


def tl_ratios(
    lab: Lab, s: float, p: float, q: float, Js: Sequence[int]
) -> List[float]:
    """
    Ratios ||Tf_J||_F / ||f_J||_F of the counterexample over a sweep of
    truncation levels. They grow without bound unless p = q.

    :param lab: the lab to measure in
    :type  lab: Lab
    :param s: smoothness
    :type  s: float
    :param p: integrability exponent
    :type  p: float
    :param q: summability exponent
    :type  q: float
    :param Js: truncation levels, ascending
    :type  Js: Sequence[int]
    :returns: one ratio per truncation level
    :rtype: List[float]
    """
    ratios = [lab.measure(s, p, q, J).tlRatio for J in Js]
    if any(b <= a for a, b in zip(ratios, ratios[1:])):
        logging.warning("Ratios not increasing for s=%s, p=%s, q=%s: %s", s, p, q, ratios)
    return ratios


def besov_ratios(
    lab: Lab, s: float, p: float, q: float, Js: Sequence[int]
) -> List[float]:
    """Ratios ||Tf_J||_B / ||f_J||_B over a sweep of truncation levels,
    bounded uniformly in J.

    :rtype: List[float]
    """
    return [lab.measure(s, p, q, J).besovRatio for J in Js]
