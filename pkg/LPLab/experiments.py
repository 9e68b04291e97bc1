import json
import logging
import math
import os
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .config import ExperimentConfig
from .counterexample import (
    Case,
    build_chi,
    decay_matrix,
    decay_slope,
    disjoint_sum_local_ratio,
    disjoint_sum_ratio,
    sequence_oracle,
    vector_norms,
    vector_valued_ratio,
    weight_sequence,
)
from .family import band_stack, export_bands, reconstruct
from .grid import lp_quadrature, modulate, spectral_multiplier, spectral_tail
from .lab import Lab
from .norms import NormParams, besov_norm, conv_inequality_ratio
from .operator import (
    apply_T,
    dilated_sobolev_seminorm,
    export_multiplier,
    grad_m,
    grad_m_dyadic,
    growth_scan,
    make_translations,
    multiplier_m,
)
from .table import NormRow, NormTable, emit
from .utils import ball_volume, log2_slope
from .version import banner


@dataclass
class Check:
    """One verified property: measured value, the bound it is held to and
    the verdict. ``passed`` is None for recorded-only or not applicable checks.
    """

    name: str
    measured: float
    bound: str
    passed: Optional[bool]
    note: str = ""

    @property
    def status(self) -> str:
        if self.passed is None:
            return self.note or "recorded"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return "{}: measured={} bound={} {}".format(
            self.name, "%.6g" % self.measured, self.bound, self.status
        )


class Report(list):
    """Checks of a run, in execution order"""

    @property
    def passed(self) -> bool:
        return all(check.passed is not False for check in self)

    @property
    def failures(self) -> List[Check]:
        return [check for check in self if check.passed is False]

    def lines(self) -> List[str]:
        return [check.line() for check in self]

    def toJson(self) -> Dict:
        return {
            "version": banner,
            "passed": self.passed,
            "checks": [dict(asdict(check), status=check.status) for check in self],
        }


def _at_most(name: str, value: float, bound: float, note: str = "") -> Check:
    return Check(name, value, "<= %.6g" % bound, bool(value <= bound), note)


def _at_least(name: str, value: float, bound: float, note: str = "") -> Check:
    return Check(name, value, ">= %.6g" % bound, bool(value >= bound), note)


def _inside(name: str, value: float, lower: float, upper: float) -> Check:
    return Check(
        name, value, "[%.6g, %.6g]" % (lower, upper), bool(lower <= value <= upper)
    )


def _triples(config: ExperimentConfig):
    """(s, p, q, case) for the configured triples, case None when p = q"""
    for s, p, q in config.norm_params:
        case = Case.forExponents(p, q)
        if case is not None and case.value not in config.cases:
            continue
        yield s, p, q, case


def _label(s: float, p: float, q: float) -> str:
    return "s=%g,p=%g,q=%g" % (s, p, q)


def _row(experiment: str, m) -> NormRow:
    spec = m.spec
    return NormRow(
        experiment=experiment,
        case=spec.case.value,
        s=spec.s,
        p=spec.p,
        q=spec.q,
        J=spec.J,
        besov_f=m.besov_f,
        tl_f=m.tl_f,
        besov_Tf=m.besov_Tf,
        tl_Tf=m.tl_Tf,
        oracle_tl_Tf_lo=m.oracle.tl_Tf.lower,
        oracle_tl_Tf_hi=m.oracle.tl_Tf.upper,
        K_emp=m.lower.K_emp,
        boundary_ok=m.boundary_ok,
    )


def family_check(lab: Lab, config: ExperimentConfig, outdir: Optional[str]):
    fam, grid = lab.fam, lab.grid
    r = grid.radius
    report = Report()

    running = np.zeros(grid.shape)
    telescoping = 0.0
    for J in range(fam.Jmax + 1):
        running = running + fam.bands[J]
        error = np.abs(running - fam.phi0_hat(r * 2.0**-J)).max()
        telescoping = max(telescoping, float(error))
    report.append(_at_most("family.telescoping", telescoping, 1e-12))

    support = 0.0
    for j in range(1, fam.Jmax + 1):
        outside = (r <= 2.0 ** (j - 1)) | (r >= 2.0 ** (j + 1))
        support = max(support, float(np.abs(fam.bands[j][outside]).max(initial=0.0)))
    report.append(_at_most("family.support", support, 0.0))

    adjacent = 0.0
    for j in range(1, fam.Jmax + 1):
        above = fam.symbol(j + 1, r)
        total = fam.bands[j - 1] + fam.bands[j] + above
        error = np.abs(fam.bands[j] * total - fam.bands[j]).max()
        adjacent = max(adjacent, float(error))
    report.append(_at_most("family.adjacent_identity", adjacent, 1e-14))

    mirrored = fam.bands
    for axis in range(1, grid.n + 1):
        mirrored = np.roll(np.flip(mirrored, axis=axis), 1, axis=axis)
    symmetry = float(np.abs(mirrored - fam.bands).max())
    report.append(_at_most("family.symmetry", symmetry, 0.0))

    defect = 0.0
    for k in range(fam.Jmax - 1):
        atom = modulate(lab.chi, k)
        defect = max(defect, reconstruct(atom, fam, config.reconstruction_tol).defect)
    report.append(_at_most("family.reconstruction", defect, config.reconstruction_tol))
    tail = spectral_tail(lab.chi, 2.0 ** (fam.Jmax - 1))
    report.append(Check("family.chi_tail", tail, "-", None, "recorded"))

    if outdir is not None:
        export_bands(fam, os.path.join(outdir, "bands.csv"))
    return NormTable(), report


def decay(lab: Lab, config: ExperimentConfig, outdir: Optional[str]):
    Jmax = lab.fam.Jmax
    D = decay_matrix(lab.fam, lab.chi, Jmax, Jmax)
    report = Report()
    report.append(_at_most("decay.slope", decay_slope(D, 3, 2, 6), config.decay_slope_max))
    diagonal = [D[j, j] for j in range(3, Jmax + 1)]
    report.append(_inside("decay.diagonal_min", min(diagonal), 0.5, 1.5))
    report.append(_inside("decay.diagonal_max", max(diagonal), 0.5, 1.5))
    return NormTable(), report


SWEEP_EXPONENTS = [(1.0, 2.0), (0.5, 1.0), (2.0, 1.0)]


def _worst_besov_ratios(
    lab: Lab, rng: np.random.Generator, count: int, exponents: List[NormParams]
) -> Dict[NormParams, float]:
    """Largest besov(Tf) / besov(f) over count random band-limited fields."""
    worst = {params: 0.0 for params in exponents}
    for _ in range(count):
        f = lab.randomField(rng)
        Tf = apply_T(f, lab.fam, lab.ys)
        fBands, TfBands = band_stack(f, lab.fam), band_stack(Tf, lab.fam)
        for params in exponents:
            ratio = besov_norm(Tf, lab.fam, params, TfBands) / besov_norm(
                f, lab.fam, params, fBands
            )
            worst[params] = max(worst[params], ratio)
    return worst


def besov_bound(lab: Lab, config: ExperimentConfig, outdir: Optional[str]):
    table, report = NormTable(), Report()
    for s, p, q, case in _triples(config):
        if case is None:
            continue
        label = _label(s, p, q)
        ratios = []
        for J in config.J_sweep:
            m = lab.measure(s, p, q, J)
            table.append(_row("besov-bound", m))
            ratios.append(m.besovRatio)
            for name, value, bracket in [
                ("besov_f", m.besov_f, m.oracle.besov_f),
                ("besov_Tf", m.besov_Tf, m.oracle.besov_Tf),
            ]:
                wide = bracket.inflated(config.bracket_low, config.bracket_high)
                check = f"besov.{name}_bracket[{label},J={J}]"
                report.append(_inside(check, value, wide.lower, wide.upper))
        spread = (max(ratios) - min(ratios)) / min(ratios)
        report.append(_at_most(f"besov.spread[{label}]", spread, config.besov_spread))
        report.append(_at_most(f"besov.max_ratio[{label}]", max(ratios), config.besov_max))

    coarse = lab.coarse()
    exponents = [
        NormParams(p, q, s)
        for s in [0.0, 1.0, -1.0]
        for p in [0.5, 1.0, 2.0]
        for q in [1.0, 2.0]
    ]
    worst = _worst_besov_ratios(coarse, lab.rng(1), config.random_fields, exponents)
    for params in exponents:
        label = _label(params.s, params.p, params.q)
        report.append(_at_most(f"besov.random[{label}]", worst[params], config.besov_max))

    # one constant per (s, p, q) across truncation levels
    levels = [Jmax for Jmax in config.Jmax_sweep if Jmax <= lab.fam.Jmax]
    if len(levels) < 2:
        report.append(Check("besov.jmax_sweep", math.nan, "-", None, "needs two levels"))
        return table, report
    sweep = [NormParams(p, q, s) for s in [0.0, 1.0, -1.0] for p, q in SWEEP_EXPONENTS]
    constants = {params: [] for params in sweep}
    for Jmax in levels:
        worst = _worst_besov_ratios(
            lab.atJmax(Jmax), lab.rng(10 + Jmax), config.sweep_fields, sweep
        )
        for params in sweep:
            constants[params].append(worst[params])
    for params in sweep:
        values = constants[params]
        logging.info("Besov constants for %s over Jmax %s: %s", params, levels, values)
        spread = (max(values) - min(values)) / min(values)
        label = _label(params.s, params.p, params.q)
        report.append(_at_most(f"besov.jmax_spread[{label}]", spread, config.besov_spread))
    return table, report


def tl_diverge(lab: Lab, config: ExperimentConfig, outdir: Optional[str]):
    table, report = NormTable(), Report()
    for s, p, q, case in _triples(config):
        label = _label(s, p, q)
        if case is None:
            report.append(
                Check(f"tl.divergence[{label}]", math.nan, "-", None, "not applicable (p=q)")
            )
            continue
        measurements = [lab.measure(s, p, q, J) for J in config.J_sweep]
        ratios = []
        for m in measurements:
            table.append(_row("tl-diverge", m))
            ratios.append(m.tlRatio)
            J = m.spec.J
            for name, value, bracket in [
                ("tl_f", m.tl_f, m.oracle.tl_f),
                ("tl_Tf", m.tl_Tf, m.oracle.tl_Tf),
            ]:
                wide = bracket.inflated(config.bracket_low, config.bracket_high)
                report.append(
                    _inside(f"tl.{name}_bracket[{label},J={J}]", value, wide.lower, wide.upper)
                )
            report.append(
                Check(
                    f"tl.boundary[{label},J={J}]",
                    m.boundary,
                    "<= %.6g" % config.boundary_tol,
                    m.boundary_ok,
                )
            )
        increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
        report.append(
            Check(
                f"tl.increasing[{label}]",
                ratios[-1],
                "strictly increasing over J",
                increasing,
            )
        )
        first, last = measurements[0].oracle, measurements[-1].oracle
        predicted = (last.tl_Tf.lower / last.tl_f.lower) / (
            first.tl_Tf.lower / first.tl_f.lower
        )
        growth = ratios[-1] / ratios[0]
        report.append(
            _inside(
                f"tl.growth[{label}]",
                growth,
                predicted * (1 - config.divergence_rtol),
                predicted * (1 + config.divergence_rtol),
            )
        )
        lower = measurements[-1].lower
        K = lower.K_emp
        report.append(
            Check(
                f"lower_bound.K_emp[{label}]",
                math.nan if K is None else K,
                "<= %s" % config.k_emp_max,
                K is not None and K <= config.k_emp_max,
                "" if K is not None else "no index found",
            )
        )
        if K is not None:
            tail = min(v for j, v in lower.margins.items() if j >= K)
            report.append(_at_least(f"lower_bound.margin[{label}]", tail, 0.5))
    return table, report


def _finite_difference(ys, fam, points: np.ndarray, step: float = 1e-5) -> np.ndarray:
    shift = np.zeros_like(points)
    shift[:, 0] = step
    return (multiplier_m(points + shift, ys, fam) - multiplier_m(points - shift, ys, fam)) / (
        2 * step
    )


def multiplier(lab: Lab, config: ExperimentConfig, outdir: Optional[str]):
    fam, ys, grid = lab.fam, lab.ys, lab.grid
    report = Report()
    e1 = np.zeros(grid.n)
    e1[0] = 1.0

    identity = 0.0
    for j in range(1, fam.Jmax + 1):
        exact = 2 * math.pi * float(np.linalg.norm(ys[j]))
        identity = max(identity, abs(grad_m_dyadic(j, e1, ys, fam) - exact) / exact)
    report.append(_at_most("multiplier.gradient_identity", identity, 1e-8))

    # inside the plateau of band j, off the dyadic point itself
    points = np.array([1.05 * 2.0**j * e1 for j in range(1, fam.Jmax + 1)])
    analytic = grad_m(points, ys, fam)[:, 0]
    numeric = _finite_difference(ys, fam, points)
    fd = float(np.max(np.abs(analytic - numeric) / np.abs(analytic)))
    report.append(_at_most("multiplier.finite_difference", fd, 1e-6))

    bounded = max(growth_scan(0, j, ys, fam) for j in range(1, fam.Jmax + 1))
    report.append(_at_most("multiplier.growth_k0", bounded, 2.0 + 1e-12))
    js = list(range(2, fam.Jmax + 1))
    slope = log2_slope(js, [growth_scan(1, j, ys, fam) for j in js])
    report.append(_at_most("multiplier.growth_k1_slope", slope, 1.0))

    if grid.n == 1:
        seminorms = [dilated_sobolev_seminorm(j, ys, fam) for j in range(1, fam.Jmax)]
        increasing = all(b > a for a, b in zip(seminorms, seminorms[1:]))
        report.append(
            Check("multiplier.dilated_seminorm", seminorms[-1], "increasing in j", increasing)
        )

    coarse = lab.coarse()
    frequencies = coarse.grid.frequencies.reshape(coarse.grid.n, -1).T
    symbol = multiplier_m(frequencies, coarse.ys, coarse.fam).reshape(coarse.grid.shape)
    rng = lab.rng(2)
    worst = 0.0
    for _ in range(config.random_fields):
        f = coarse.randomField(rng)
        direct = apply_T(f, coarse.fam, coarse.ys).values
        viaSymbol = spectral_multiplier(f, symbol).values
        worst = max(worst, float(np.linalg.norm(direct - viaSymbol) / np.linalg.norm(direct)))
    report.append(_at_most("multiplier.spectral_consistency", worst, 1e-10))

    if outdir is not None:
        xi = np.linspace(0.0, 2.0 ** (fam.Jmax + 1), 4097)
        points = xi[:, None] * e1[None, :]
        export_multiplier(points, ys, fam, os.path.join(outdir, "multiplier.csv"))
    return NormTable(), report


def disjoint_sum(lab: Lab, config: ExperimentConfig, outdir: Optional[str]):
    coarse = lab.coarse()
    grid = coarse.grid
    mu0 = lab.ys.mu0
    ys = make_translations(10, 2 * mu0, grid)
    narrow = build_chi(grid, mu0 / 2)
    rng = lab.rng(3)
    report = Report()
    for r in [1.0, 2.0, math.inf]:
        bound = lp_quadrature(narrow, r) * (1 + 1e-10)
        worst = max(
            disjoint_sum_ratio(rng.standard_normal(10), narrow, ys, r)
            for _ in range(config.random_fields)
        )
        report.append(_at_most("disjoint_sum.ratio[r=%g]" % r, worst, bound))
        localBound = (1.0 if math.isinf(r) else ball_volume(1.0, grid.n) ** (1 / r)) * float(
            np.abs(narrow.values).max()
        )
        local = max(
            disjoint_sum_local_ratio(rng.standard_normal(10), narrow, ys, r) for _ in range(3)
        )
        report.append(
            _at_most("disjoint_sum.local_ratio[r=%g]" % r, local, localBound * (1 + 1e-10))
        )
    kernel = coarse.fam.kernel(5)
    bound = lp_quadrature(kernel, 1.0) * (1 + 1e-10)
    worst = max(
        disjoint_sum_ratio(rng.standard_normal(10), kernel, ys, 1.0)
        for _ in range(config.random_sequences)
    )
    report.append(_at_most("disjoint_sum.kernel_ratio[r=1]", worst, bound))
    small = max(
        disjoint_sum_ratio(rng.standard_normal(10), narrow, ys, 0.5)
        for _ in range(config.random_fields)
    )
    report.append(Check("disjoint_sum.ratio[r=0.5]", small, "-", None, "recorded"))
    return NormTable(), report


def conv_ineq(lab: Lab, config: ExperimentConfig, outdir: Optional[str]):
    coarse = lab.coarse()
    grid = coarse.grid
    rng = lab.rng(4)
    report = Report()

    def layers():
        return [np.abs(coarse.randomField(rng).values) for _ in range(8)]

    for delta in [1.0, 2.0]:
        young = (1 + 2.0**-delta) / (1 - 2.0**-delta)
        for p in [1.0, 2.0]:
            for q in [1.0, 2.0]:
                worst = max(
                    conv_inequality_ratio(layers(), delta, NormParams(p, q), grid)
                    for _ in range(5)
                )
                report.append(
                    _at_most(
                        "conv_ineq[p=%g,q=%g,delta=%g]" % (p, q, delta), worst, young + 1e-10
                    )
                )
    young = (1 + 2.0**-2) / (1 - 2.0**-2)
    worst = max(
        conv_inequality_ratio(layers(), 2.0, NormParams(0.5, 2.0), grid)
        for _ in range(config.random_sequences)
    )
    report.append(_at_most("conv_ineq[p=0.5,q=2,delta=2]", worst, young + 1e-10))
    return NormTable(), report


def vector_valued(lab: Lab, config: ExperimentConfig, outdir: Optional[str]):
    grid, fam, ys = lab.grid, lab.fam, lab.ys
    mu0 = ys.mu0
    report = Report()
    Jfirst, Jlast = config.J_sweep[0], config.J_sweep[-1]
    for q in [1.0, 4.0]:
        # q < 2: dispersed inputs stacked by T, q > 2: the reverse
        case = Case.PGT if q < 2 else Case.PLT
        params = NormParams(2.0, q)
        ratios, predicted = [], []
        for J in [Jfirst, Jlast]:
            a = weight_sequence(case, 2.0, q, J)
            u = ys.ys[:J] if case == Case.PGT else None
            besov = params if J == Jlast else None
            norms = vector_norms(a, u, ys, q, fam, grid, params=besov)
            ratios.append(norms.ratio)
            _, tlIn = sequence_oracle(a, 2.0, q, mu0, grid.n, case == Case.PLT)
            _, tlOut = sequence_oracle(a, 2.0, q, mu0, grid.n, case == Case.PGT)
            predicted.append(tlOut.lower / tlIn.lower)
        factor = predicted[1] / predicted[0]
        report.append(
            _inside(
                "vector.growth[q=%g]" % q,
                ratios[1] / ratios[0],
                factor * (1 - config.vector_rtol),
                factor * (1 + config.vector_rtol),
            )
        )
        besovRatio = norms.besovRatio
        report.append(_at_most("vector.besov_ratio[q=%g]" % q, besovRatio, config.besov_max))
    a = 1.0 / (np.arange(1, Jlast + 1) + 3.0)
    inputNorm, outputNorm = vector_valued_ratio(a, ys.ys[:Jlast], ys, 2.0, fam, grid)
    report.append(_inside("vector.l2_ratio[q=2]", outputNorm / inputNorm, 0.5, 2.0))
    return NormTable(), report


EXPERIMENTS: Dict[str, Callable] = {
    "family-check": family_check,
    "decay": decay,
    "besov-bound": besov_bound,
    "tl-diverge": tl_diverge,
    "multiplier": multiplier,
    "disjoint-sum": disjoint_sum,
    "conv-ineq": conv_ineq,
    "vector-valued": vector_valued,
}


def write_outputs(outdir: str, table: NormTable, report: Report):
    emit(table, os.path.join(outdir, "norms.csv"))
    with open(os.path.join(outdir, "report.txt"), "w") as fh:
        fh.write("\n".join(report.lines()) + "\n")
    with open(os.path.join(outdir, "report.json"), "w") as fh:
        fh.write(json.dumps(report.toJson(), sort_keys=True, indent=2, default=str) + "\n")


def run(
    config: ExperimentConfig,
    experiment: str,
    lab: Optional[Lab] = None,
    write: bool = True,
) -> Tuple[NormTable, Report]:
    """Run one experiment, or all of them, and collect rows and checks.

    :param config: the run configuration
    :type  config: ExperimentConfig
    :param experiment: an experiment name or "all"
    :type  experiment: str
    :param lab: reuse an existing lab built from the same config
    :param write: write norms.csv, report.txt and report.json to config.out
    :returns: the table and the report
    :rtype: Tuple[NormTable, Report]
    """
    if experiment == "all":
        names = list(EXPERIMENTS)
    elif experiment in EXPERIMENTS:
        names = [experiment]
    else:
        raise ValueError(
            f"Unknown experiment {experiment}, expected one of {', '.join(EXPERIMENTS)} or all"
        )
    if lab is None:
        lab = Lab.fromConfig(config)
    outdir = config.out if write else None
    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)
    table, report = NormTable(), Report()
    for name in names:
        rows, checks = EXPERIMENTS[name](lab, config, outdir)
        table.extend(rows)
        report.extend(checks)
        logging.info(
            "Finished %s: %s checks, %s failed",
            name,
            len(checks),
            len(checks.failures),
        )
    if outdir is not None:
        write_outputs(outdir, table, report)
    return table, report
