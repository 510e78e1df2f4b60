import numpy as np
import pytest

from okdv.algebra import CDElement
from okdv.fields import (
    AlgebraField,
    Grid,
    dealias,
    fadd,
    fcommutator,
    fimag,
    fmul,
    freal,
    fscale,
    integrate,
    load_field_csv,
    random_smooth_field,
    save_field_csv,
    soliton_profile,
    spectral_antiderivative,
    spectral_diff,
    spectral_shift,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(100, 10.0)   # not a power of two
    with pytest.raises(ValueError):
        Grid(4, 10.0)     # too small
    with pytest.raises(ValueError):
        Grid(64, -1.0)


def test_field_shape_validation(grid64):
    with pytest.raises(ValueError):
        AlgebraField(grid64, np.zeros((32, 8)))
    with pytest.raises(ValueError):
        AlgebraField(grid64, np.zeros((64, 5)))


def test_spectral_diff_single_mode_exact(grid64):
    L = grid64.length
    k = 2 * np.pi / L
    f = AlgebraField.from_components(grid64, u2=np.sin(k * grid64.nodes))
    df = spectral_diff(f, 1)
    expected = k * np.cos(k * grid64.nodes)
    assert np.abs(df.values[:, 2] - expected).max() < 1e-10
    assert np.abs(df.values[:, [0, 1, 3, 4, 5, 6, 7]]).max() < 1e-14


def test_spectral_diff_constant_is_zero(grid64):
    f = AlgebraField(grid64, np.ones((grid64.n, 8)))
    for order in (1, 2, 3):
        assert spectral_diff(f, order).max_abs() < 1e-13


def test_spectral_diff_order3_against_finite_differences():
    # 8th-order central differences as the independent oracle
    grid = Grid(256, 10.0)
    g = np.exp(np.sin(2 * np.pi * grid.nodes / grid.length))
    f = AlgebraField.from_components(grid, u0=g)
    d3 = spectral_diff(f, 3).values[:, 0]

    w1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
    offsets = np.arange(-4, 5)

    def fd(values, weights):
        out = np.zeros_like(values)
        for o, w in zip(offsets, weights):
            out += w * np.roll(values, -o)
        return out / grid.dx

    fd3 = fd(fd(fd(g, w1), w1), w1)
    assert np.abs(d3 - fd3).max() < 1e-6


def test_spectral_diff_rejects_bad_order(grid64):
    f = AlgebraField.zeros(grid64)
    with pytest.raises(ValueError):
        spectral_diff(f, 4)


def test_diff_twice_matches_order_two(grid128):
    f = random_smooth_field(grid128, 8, mode_cutoff=6, amplitude=1.0)
    twice = spectral_diff(spectral_diff(f, 1), 1)
    once = spectral_diff(f, 2)
    assert np.abs(twice.values - once.values).max() < 1e-9


def test_integrate_constant():
    grid = Grid(64, 10.0)
    f = AlgebraField(grid, np.ones((64, 8)))
    out = integrate(f)
    assert np.allclose(out.coeffs, 10.0, atol=1e-12)


def test_integrate_sine_and_sine_squared():
    grid = Grid(128, 10.0)
    k = 2 * np.pi / grid.length
    f = AlgebraField.from_components(grid, u0=np.sin(k * grid.nodes))
    assert abs(integrate(f).coeffs[0]) < 1e-12
    g = AlgebraField.from_components(grid, u0=np.sin(k * grid.nodes) ** 2)
    assert integrate(g).coeffs[0] == pytest.approx(5.0, abs=1e-10)


def test_integral_of_derivative_vanishes(grid128):
    f = random_smooth_field(grid128, 9, mode_cutoff=10, amplitude=2.0)
    out = integrate(spectral_diff(f, 1))
    assert np.abs(out.coeffs).max() < 1e-10


def test_fmul_bilinear(grid64):
    f = random_smooth_field(grid64, 1, amplitude=1.0)
    g = random_smooth_field(grid64, 2, amplitude=1.0)
    h = random_smooth_field(grid64, 3, amplitude=1.0)
    lhs = fmul(fadd(f, g), h).values
    rhs = fmul(f, h).values + fmul(g, h).values
    assert np.abs(lhs - rhs).max() < 1e-12


def test_fcommutator_with_self_is_zero(grid64):
    f = random_smooth_field(grid64, 4, amplitude=1.0)
    assert fcommutator(f, f).max_abs() == 0.0


def test_fcommutator_with_real_constant_is_zero(grid64):
    f = random_smooth_field(grid64, 5, amplitude=1.0)
    v = CDElement.from_real(2.5)
    assert fcommutator(f, v).max_abs() < 1e-14


def test_freal_of_square_at_one_plus_e1(grid64):
    values = np.zeros((grid64.n, 8))
    values[:, 0] = 1.0
    values[:, 1] = 1.0
    f = AlgebraField(grid64, values)
    sq = fmul(f, f)
    # (1+e1)^2 = 2 e1
    assert np.abs(freal(sq)).max() < 1e-14
    assert np.allclose(sq.values[:, 1], 2.0, atol=1e-14)


def test_fadd_fscale_cancel(grid64):
    f = random_smooth_field(grid64, 6, amplitude=1.0)
    assert fadd(f, fscale(f, -1.0)).max_abs() == 0.0


def test_fimag_removes_real_part(grid64):
    f = random_smooth_field(grid64, 7, amplitude=1.0)
    g = fimag(f)
    assert np.abs(g.values[:, 0]).max() == 0.0
    assert np.array_equal(g.values[:, 1:], f.values[:, 1:])


def test_dealias_idempotent_and_band_limited(grid64):
    f = random_smooth_field(grid64, 10, mode_cutoff=5, amplitude=1.0)
    # cutoff 5 is inside the 2/3 band of n=64: filter is the identity
    assert np.abs(dealias(f).values - f.values).max() < 1e-14
    spiky = AlgebraField.from_components(
        grid64, u0=np.cos(2 * np.pi * 30 * grid64.nodes / grid64.length)
    )
    assert dealias(spiky).max_abs() < 1e-13


def test_spectral_shift_matches_analytic(grid128):
    k = 2 * np.pi / grid128.length
    f = AlgebraField.from_components(grid128, u1=np.sin(3 * k * grid128.nodes))
    delta = 0.7331
    g = spectral_shift(f, delta)
    expected = np.sin(3 * k * (grid128.nodes - delta))
    assert np.abs(g.values[:, 1] - expected).max() < 1e-12


def test_spectral_shift_roundtrip(grid128):
    f = random_smooth_field(grid128, 11, mode_cutoff=8, amplitude=1.0)
    g = spectral_shift(spectral_shift(f, 1.234), -1.234)
    assert np.abs(g.values - f.values).max() < 1e-12


def test_antiderivative_inverts_derivative(grid128):
    f = random_smooth_field(grid128, 12, mode_cutoff=6, amplitude=1.0, zero_mean=True)
    s = spectral_antiderivative(f)
    assert np.abs(spectral_diff(s, 1).values - f.values).max() < 1e-11
    assert np.abs(s.values.mean(axis=0)).max() < 1e-14


def test_soliton_profile_peak_and_positivity(grid256):
    f = soliton_profile(grid256, c=1.0, x0=10.0)
    assert f.values[:, 0].max() == pytest.approx(3.0, rel=1e-6)
    assert np.abs(f.values[:, 1:]).max() == 0.0


def test_field_csv_roundtrip(tmp_path, grid64):
    f = random_smooth_field(grid64, 13, amplitude=0.8)
    path = tmp_path / "snap.csv"
    save_field_csv(f, path)
    g = load_field_csv(path)
    assert g.grid == f.grid
    assert np.array_equal(g.values, f.values)
    header = path.read_text().splitlines()[0]
    assert header == "x,u0,u1,u2,u3,u4,u5,u6,u7"


def test_load_field_csv_rejects_missing_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        load_field_csv(path)


def test_random_smooth_field_reproducible(grid64):
    a = random_smooth_field(grid64, 99, amplitude=0.5)
    b = random_smooth_field(grid64, 99, amplitude=0.5)
    assert np.array_equal(a.values, b.values)
    c = random_smooth_field(grid64, 100, amplitude=0.5)
    assert not np.array_equal(a.values, c.values)
