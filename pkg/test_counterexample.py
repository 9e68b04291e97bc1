#!/usr/bin/env python3
import math

import numpy as np
import pytest

import LPLab
from LPLab.counterexample import vector_components


@pytest.fixture(scope="module")
def lab():
    return LPLab.setup_lab(L=64, N=2**16, Jmax=8, spacing=2)


def test_case_for_exponents():
    assert LPLab.Case.forExponents(1, 2) == LPLab.Case.PLT
    assert LPLab.Case.forExponents(2, 1) == LPLab.Case.PGT
    assert LPLab.Case.forExponents(math.inf, 1) == LPLab.Case.PGT
    assert LPLab.Case.forExponents(2, 2) is None
    assert LPLab.Case("PGT") == "PGT"


def test_weight_sequence():
    a = LPLab.weight_sequence(LPLab.Case.PLT, 1.0, 2.0, 4)
    assert np.allclose(a, [1 / 4, 1 / 5, 1 / 6, 1 / 7])
    b = LPLab.weight_sequence(LPLab.Case.PGT, 2.0, 1.0, 4)
    assert np.allclose(a, b)
    c = LPLab.weight_sequence(LPLab.Case.PLT, 0.5, 1.0, 2)
    assert np.allclose(c, [1 / 49, 1 / 64])
    with pytest.raises(ValueError):
        LPLab.weight_sequence(LPLab.Case.PGT, 1.0, 2.0, 4)


def test_spec_validation(lab):
    ys = lab.ys
    with pytest.raises(ValueError):
        LPLab.CounterexampleSpec(0.0, 1.0, 2.0, 2, 1.0, LPLab.Case.PLT, ys, [1.0, 0.1])
    with pytest.raises(ValueError):
        LPLab.CounterexampleSpec(0.0, 1.0, 2.0, 3, 1.0, LPLab.Case.PLT, ys, [1.0, 1.0])
    with pytest.raises(ValueError):
        LPLab.CounterexampleSpec(0.0, 1.0, 2.0, 2, 1.0, LPLab.Case.PGT, ys, [1.0, 1.0])
    with pytest.raises(ValueError):
        LPLab.make_spec(LPLab.Case.PLT, 1.0, 2.0, 9, ys)
    with pytest.raises(ValueError):
        LPLab.make_spec(LPLab.Case.PLT, 1.0, 2.0, 0, ys)


def test_spec_geometry(lab):
    plt = LPLab.make_spec("PLT", 1.0, 2.0, 4, lab.ys)
    assert plt.case is LPLab.Case.PLT
    assert not np.any(plt.shifts)
    assert np.array_equal(plt.centers, lab.ys.ys[:4])
    pgt = LPLab.make_spec(LPLab.Case.PGT, 2.0, 1.0, 4, lab.ys, s=1.0)
    assert np.array_equal(pgt.shifts, lab.ys.ys[:4])
    assert not np.any(pgt.centers)
    assert pgt.params == LPLab.NormParams(2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        pgt.a[0] = 1.0


def test_oracle_brackets():
    bracket = LPLab.OracleBracket(1.0, 2.0)
    assert 1.5 in bracket and 2.5 not in bracket
    wide = bracket.inflated(0.5, 2.0)
    assert (wide.lower, wide.upper) == (0.5, 4.0)
    with pytest.raises(ValueError):
        LPLab.OracleBracket(2.0, 1.0)


def test_oracle_growth(lab):
    def predicted(p, q, J):
        oracle = LPLab.oracle_norms(LPLab.make_spec(LPLab.Case.PLT, p, q, J, lab.ys))
        return oracle.tl_Tf.lower / oracle.tl_f.lower

    assert predicted(1.0, 2.0, 4) == pytest.approx(0.7595 / 0.3882, rel=1e-3)
    assert predicted(1.0, 2.0, 8) / predicted(1.0, 2.0, 4) > 1.3
    assert predicted(0.5, 1.0, 4) == pytest.approx(3.9297, abs=1e-3)


def test_sequence_oracle():
    a = 1.0 / (np.arange(1, 11) + 3.0)
    stacked = LPLab.sequence_oracle(a, 1.0, 2.0, 1.0, 1, True)[1]
    dispersed = LPLab.sequence_oracle(a, 1.0, 2.0, 1.0, 1, False)[1]
    assert dispersed.lower / stacked.lower == pytest.approx(1.3468 / 0.45802, rel=1e-3)
    assert stacked.upper / stacked.lower == pytest.approx(2.0)
    same = [LPLab.sequence_oracle(a, 2.0, 2.0, 1.0, 1, flag)[1] for flag in [True, False]]
    assert same[0] == LPLab.OracleBracket(same[1].lower, same[1].upper, "stacked")
    besov, tl = LPLab.sequence_oracle(a, math.inf, math.inf, 1.0, 1, False)
    assert tl.lower == tl.upper == 0.25
    assert besov.lower == 0.25


def test_build_chi(lab):
    chi = LPLab.build_chi(lab.grid, 1.0)
    values = chi.values.real
    distance = lab.grid.distance
    assert np.all(values[distance <= 1.0] == 1.0)
    assert np.all(values[distance >= 2.0] == 0.0)
    order = np.argsort(distance)
    assert np.all(np.diff(values[order]) <= 0)
    with pytest.raises(ValueError):
        LPLab.build_chi(lab.grid, 10.0)
    assert lab.chi.grid == lab.grid


def test_build_f(lab):
    grid = lab.grid
    plt = LPLab.make_spec(LPLab.Case.PLT, 1.0, 2.0, 6, lab.ys)
    f = LPLab.build_f(plt, grid, lab.fam)
    origin = grid.N // 2
    assert f.values[origin] == pytest.approx(plt.a.sum(), abs=1e-10)
    pgt = LPLab.make_spec(LPLab.Case.PGT, 2.0, 1.0, 6, lab.ys)
    g = LPLab.build_f(pgt, grid, lab.fam)
    for j in range(1, 7):
        index = origin - int(round(lab.ys[j][0] / grid.h))
        assert abs(g.values[index]) == pytest.approx(pgt.a[j - 1], abs=1e-10)
    with pytest.raises(ValueError):
        LPLab.build_f(LPLab.make_spec(LPLab.Case.PLT, 1.0, 2.0, 7, lab.ys), grid, lab.fam)


def test_lower_bound_thresholds(lab):
    spec = LPLab.make_spec(LPLab.Case.PLT, 1.0, 2.0, 6, lab.ys)
    everything = LPLab.lower_bound_check(spec, lab.grid, lab.fam, threshold=0.0)
    assert everything.K_emp == 1
    assert sorted(everything.margins) == list(range(1, 7))
    nothing = LPLab.lower_bound_check(spec, lab.grid, lab.fam, threshold=10.0)
    assert nothing.K_emp is None
    assert not nothing.found


def test_measure(lab):
    early = lab.measure(0.0, 1.0, 2.0, 2)
    late = lab.measure(0.0, 1.0, 2.0, 6)
    assert early.boundary_ok and late.boundary_ok
    assert late.tlRatio > early.tlRatio
    assert late.besovRatio <= 2.5
    assert lab.measure(0.0, 1.0, 2.0, 6) is late
    with pytest.raises(ValueError):
        lab.measure(0.0, 2.0, 2.0, 4)
    ratios = LPLab.tl_ratios(lab, 0.0, 1.0, 2.0, [2, 6])
    assert ratios == [early.tlRatio, late.tlRatio]


def test_decay_matrix(lab):
    D = LPLab.decay_matrix(lab.fam, lab.chi, 6, 6)
    assert D.shape == (7, 7)
    assert np.all(D >= 0)
    for j in range(3, 7):
        assert 0.5 <= D[j, j] <= 1.5
    assert D[3, 6] < D[3, 4]
    with pytest.raises(ValueError):
        LPLab.decay_matrix(lab.fam, lab.chi, 9, 6)
    model = np.array([[2.0 ** -abs(j - k) for k in range(10)] for j in range(10)])
    assert LPLab.decay_slope(model) == pytest.approx(-1.0)


def test_disjoint_sums(lab):
    grid = lab.grid
    narrow = LPLab.build_chi(grid, 0.5)
    ys = lab.ys
    rng = np.random.default_rng(9)
    b = rng.standard_normal(8)
    for r in [1.0, 2.0]:
        ratio = LPLab.disjoint_sum_ratio(b, narrow, ys, r)
        assert ratio == pytest.approx(LPLab.lp_quadrature(narrow, r), rel=1e-10)
    small = LPLab.disjoint_sum_ratio(b, narrow, ys, 0.5)
    assert small == pytest.approx(LPLab.lp_quadrature(narrow, 0.5), rel=1e-4)
    assert LPLab.disjoint_sum_local_ratio(b, narrow, ys, math.inf) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        LPLab.disjoint_sum_ratio(np.zeros(3), narrow, ys, 1.0)
    with pytest.raises(ValueError):
        LPLab.disjoint_sum_ratio(np.ones(9), narrow, ys, 1.0)


def test_vector_valued(lab):
    grid, fam, ys = lab.grid, lab.fam, lab.ys
    a = 1.0 / (np.arange(1, 7) + 3.0)
    fields = vector_components(a, None, ys, grid)
    assert len(fields) == 6
    inputNorm, outputNorm = LPLab.vector_valued_ratio(a, ys.ys[:6], ys, 2.0, fam, grid)
    assert 0.5 <= outputNorm / inputNorm <= 2.0
    with pytest.raises(ValueError):
        LPLab.vector_valued_ratio(np.ones(7), None, ys, 2.0, fam, grid)


def test_vector_norms(lab):
    grid, fam, ys = lab.grid, lab.fam, lab.ys
    a = 1.0 / (np.arange(1, 5) + 3.0)
    plain = LPLab.vector_norms(a, None, ys, 2.0, fam, grid)
    with pytest.raises(ValueError):
        plain.besovRatio
    assert (plain.mixed_f, plain.mixed_Tf) == LPLab.vector_valued_ratio(a, None, ys, 2.0, fam, grid)
    full = LPLab.vector_norms(a, None, ys, 2.0, fam, grid, params=LPLab.NormParams(2.0, 2.0))
    assert full.ratio == pytest.approx(plain.ratio)
    assert full.besov_f > 0 and full.besov_Tf > 0
    assert full.besovRatio == pytest.approx(full.besov_Tf / full.besov_f)
