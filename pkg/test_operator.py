#!/usr/bin/env python3
import csv
import math

import numpy as np
import pytest

import LPLab
from LPLab.grid import random_field


@pytest.fixture(scope="module")
def grid():
    return LPLab.make_grid(1, 32, 2**14)


@pytest.fixture(scope="module")
def fam(grid):
    return LPLab.build_family(grid, 7)


@pytest.fixture(scope="module")
def ys(grid):
    return LPLab.make_translations(7, 1.0, grid)


@pytest.fixture(scope="module")
def field(grid):
    return random_field(grid, np.random.default_rng(21), 64.0)


def test_make_translations():
    grid = LPLab.make_grid(1, 64, 2**10)
    ys = LPLab.make_translations(10, 2, grid)
    assert ys.ys[:, 0].tolist() == [2.0 * j for j in range(1, 11)]
    assert ys.mu0 == 1.0
    assert ys.N0 == 5
    assert ys.Jmax == 10
    assert ys[3].tolist() == [6.0]
    with pytest.raises(ValueError):
        ys[0]
    with pytest.raises(ValueError):
        LPLab.make_translations(12, 4, grid)
    with pytest.raises(ValueError):
        LPLab.make_translations(4, 0.0, grid)
    assert repr(ys) == "<TranslationSequence Jmax=10 mu0=1.0 N0=5>"


def test_translation_sequence_validation(grid):
    with pytest.raises(ValueError):
        LPLab.TranslationSequence([1.0, 1.5], 0.5, 2, grid)
    with pytest.raises(ValueError):
        LPLab.TranslationSequence([1.0, 100.0], 0.5, 1)
    with pytest.raises(ValueError):
        LPLab.TranslationSequence([1.0, 15.0], 0.5, 4, grid)
    ys = LPLab.TranslationSequence(np.array([[1.0], [2.0]]), 0.5, 1, grid)
    with pytest.raises(ValueError):
        ys.ys[0, 0] = 3.0
    scaled = ys.scaled(4.0)
    assert scaled.ys[:, 0].tolist() == [4.0, 8.0]
    assert scaled.mu0 == 2.0
    assert scaled.grid == grid
    # mu0 = 4 puts the guard zone limit L/2 - 4 mu0 at 0
    with pytest.raises(ValueError):
        ys.scaled(8.0)
    with pytest.raises(ValueError):
        ys.scaled(0.0)


def test_apply_T_is_linear(grid, fam, ys, field):
    other = random_field(grid, np.random.default_rng(22), 64.0)
    combined = LPLab.apply_T(2.0 * field - other, fam, ys)
    separate = 2.0 * LPLab.apply_T(field, fam, ys) - LPLab.apply_T(other, fam, ys)
    assert np.allclose(combined.values, separate.values, atol=1e-10)
    zero = LPLab.apply_T(LPLab.SampledField.zeros(grid), fam, ys)
    assert not np.any(zero.values)


def test_apply_T_removes_low_band(grid, fam, ys):
    low = random_field(grid, np.random.default_rng(23), 0.5)
    assert np.allclose(LPLab.apply_T(low, fam, ys).values, 0.0, atol=1e-12)


def test_apply_T_translates_plateau(grid, fam, ys):
    # spectrum inside the plateau of band 4, where phi^_4 = 1
    f = LPLab.modulate(random_field(grid, np.random.default_rng(24), 1.0), 4)
    Tf = LPLab.apply_T(f, fam, ys)
    assert np.allclose(Tf.values, LPLab.translate(f, ys[4]).values, atol=1e-10)


def test_apply_T_compatibility(grid, fam, field):
    short = LPLab.make_translations(3, 1.0, grid)
    with pytest.raises(ValueError):
        LPLab.apply_T(field, fam, short)


def test_spectral_consistency(grid, fam, ys, field):
    symbol = LPLab.multiplier_m(grid.frequencies[0], ys, fam)
    direct = LPLab.apply_T(field, fam, ys)
    viaSymbol = LPLab.spectral_multiplier(field, symbol)
    assert np.allclose(direct.values, viaSymbol.values, atol=1e-10)


def test_multiplier_values(fam, ys):
    assert np.abs(LPLab.multiplier_m([0.0], ys, fam))[0] == 0.0
    xi = np.array([2.0**j for j in range(1, fam.Jmax + 1)])
    values = LPLab.multiplier_m(xi, ys, fam)
    assert np.allclose(np.abs(values), 1.0)
    expected = np.exp(-2j * math.pi * ys.ys[:, 0] * xi)
    assert np.allclose(values, expected)


def test_grad_m_dyadic():
    grid = LPLab.make_grid(1, 64, 2**14)
    fam = LPLab.build_family(grid, 6)
    ys = LPLab.make_translations(10, 2, grid)
    assert LPLab.grad_m_dyadic(5, [1.0], ys, fam) == pytest.approx(62.8319, abs=1e-4)
    for j in range(1, fam.Jmax + 1):
        exact = 2 * math.pi * 2 * j
        assert LPLab.grad_m_dyadic(j, [1.0], ys, fam) == pytest.approx(exact, rel=1e-12)
    with pytest.raises(ValueError):
        LPLab.grad_m_dyadic(2, [2.0], ys, fam)
    with pytest.raises(ValueError):
        LPLab.grad_m_dyadic(7, [1.0], ys, fam)


def test_grad_m_finite_difference(fam, ys):
    points = np.array(
        [1.05 * 2.0**j for j in range(1, fam.Jmax + 1)]
        + [1.5 * 2.0**j for j in range(1, fam.Jmax)]
    )
    step = 1e-5
    upper = LPLab.multiplier_m(points + step, ys, fam)
    lower = LPLab.multiplier_m(points - step, ys, fam)
    numeric = (upper - lower) / (2 * step)
    analytic = LPLab.grad_m(points, ys, fam)[:, 0]
    assert np.allclose(analytic, numeric, rtol=1e-6, atol=1e-6)


@pytest.fixture(scope="module")
def plane():
    grid = LPLab.make_grid(2, 16, 2**10)
    return LPLab.build_family(grid, 4), LPLab.make_translations(4, 1.0, grid)


def test_grad_m_two_dimensional(plane):
    fam, ys = plane
    assert ys.ys.shape == (4, 2)
    e2 = [0.0, 1.0]
    assert LPLab.grad_m_dyadic(3, e2, ys, fam) == pytest.approx(2 * math.pi * 3)
    points = np.array([[3.0, 4.0], [10.0, -7.0]])
    grads = LPLab.grad_m(points, ys, fam)
    assert grads.shape == (2, 2)
    with pytest.raises(ValueError):
        LPLab.multiplier_m([[1.0, 2.0, 3.0]], ys, fam)


def test_growth_scan(fam, ys):
    for j in range(1, fam.Jmax + 1):
        assert LPLab.growth_scan(0, j, ys, fam) <= 2.0 + 1e-12
    gradients = [LPLab.growth_scan(1, j, ys, fam) for j in range(2, fam.Jmax)]
    assert gradients == sorted(gradients)
    with pytest.raises(NotImplementedError):
        LPLab.growth_scan(2, 3, ys, fam)
    with pytest.raises(ValueError):
        LPLab.growth_scan(1, 3, ys, fam, samples=10)


def test_dilated_sobolev_seminorm(fam, ys, plane):
    seminorms = [LPLab.dilated_sobolev_seminorm(j, ys, fam) for j in range(1, fam.Jmax)]
    assert all(b > a for a, b in zip(seminorms, seminorms[1:]))
    with pytest.raises(NotImplementedError):
        LPLab.dilated_sobolev_seminorm(2, plane[1], plane[0])


def test_export_multiplier(fam, ys, tmp_path):
    path = tmp_path / "multiplier.csv"
    LPLab.export_multiplier(np.linspace(0.0, 16.0, 33), ys, fam, str(path))
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["xi", "re_m", "im_m", "abs_grad_m"]
    assert len(rows) == 34
    assert [float(c) for c in rows[1]] == [0.0] * 4


def test_image_bands_come_from_neighbours(grid, fam, ys, field):
    Tf = LPLab.apply_T(field, fam, ys)
    scale = float(np.abs(Tf.values).max())
    for j in range(fam.Jmax + 1):
        expected = LPLab.SampledField.zeros(grid)
        for k in range(max(j - 1, 1), min(j + 1, fam.Jmax) + 1):
            inner = LPLab.band(LPLab.band(field, k, fam), j, fam)
            expected = expected + LPLab.translate(inner, ys[k])
        error = np.abs(LPLab.band(Tf, j, fam).values - expected.values).max()
        assert error <= 1e-10 * scale


def test_transfer_symbol_is_shared(fam, ys):
    symbol = LPLab.transfer_symbol(fam, ys)
    assert LPLab.transfer_symbol(fam, ys) is symbol
    with pytest.raises(ValueError):
        symbol[0] = 1.0
    xi = fam.grid.frequencies[0]
    assert np.allclose(symbol, LPLab.multiplier_m(xi, ys, fam))


def test_doubling_spacing_doubles_gradient():
    grid = LPLab.make_grid(1, 64, 2**14)
    fam = LPLab.build_family(grid, 6)
    ys = LPLab.make_translations(6, 2, grid)
    wide = ys.scaled(2.0)
    assert wide.grid == grid
    for j in range(1, fam.Jmax + 1):
        single = LPLab.grad_m_dyadic(j, [1.0], ys, fam)
        double = LPLab.grad_m_dyadic(j, [1.0], wide, fam)
        assert double == pytest.approx(2 * single, rel=1e-12)
