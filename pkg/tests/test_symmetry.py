import numpy as np
import pytest

from okdv.algebra import CDElement, derivation_matrix
from okdv.fields import AlgebraField, Grid, random_smooth_field, soliton_profile
from okdv.flows import FlowSpec, evolve, kdv_rhs
from okdv.symmetry import (
    StabilizerError,
    SymmetrySpec,
    apply_automorphism,
    automorphism_matrix,
    derivation_span,
    equivariance_residual,
    galileo_boost,
    stabilizer_generator,
    stabilizer_subspace,
)

E7 = CDElement.basis(3, 7)


def test_symmetry_spec_validation():
    with pytest.raises(ValueError):
        SymmetrySpec(kind="rotation")
    with pytest.raises(ValueError):
        SymmetrySpec(kind="automorphism", i=1, j=1)
    with pytest.raises(ValueError):
        SymmetrySpec(kind="automorphism", i=0, j=2)


def test_galileo_zero_speed_is_identity(grid64):
    u0 = random_smooth_field(grid64, 40, mode_cutoff=4, amplitude=0.4)
    spec = FlowSpec("kdv", grid64, dt=1e-3, t_end=0.05)
    traj = evolve(spec, u0, snapshot_every=10, record_charges=False)
    boosted = galileo_boost(traj, 0.0)
    for f, g in zip(traj.fields, boosted.fields):
        assert np.abs(f.values - g.values).max() < 1e-14


def test_galileo_on_constant_solution(grid64):
    a = np.array([0.2, 0.1, 0, 0, 0.4, 0, 0, 0])
    u0 = AlgebraField(grid64, np.tile(a, (grid64.n, 1)))
    spec = FlowSpec("kdv", grid64, dt=1e-3, t_end=0.1)
    traj = evolve(spec, u0, snapshot_every=50, record_charges=False)
    boosted = galileo_boost(traj, 1.5)
    expected = a.copy()
    expected[0] += 1.5
    for f in boosted.fields:
        assert np.abs(f.values - expected).max() < 1e-11


def test_galileo_equivariance_soliton():
    grid = Grid(128, 40.0)
    u0 = soliton_profile(grid, c=1.0, x0=10.0)
    flow = FlowSpec("kdv", grid, dt=5e-4, t_end=0.5)
    res = equivariance_residual(
        SymmetrySpec(kind="galileo", c=1.0), flow, u0, snapshot_every=250
    )
    assert res < 1e-6


def test_galileo_boosted_trajectory_satisfies_flow_pointwise():
    # centered time differences of the boosted snapshots against the rhs
    grid = Grid(128, 40.0)
    u0 = soliton_profile(grid, c=1.0, x0=10.0)
    flow = FlowSpec("kdv", grid, dt=2.5e-4, t_end=0.25)
    traj = evolve(flow, u0, snapshot_every=1, record_charges=False)
    boosted = galileo_boost(traj, 1.0)
    dt = boosted.times[1] - boosted.times[0]
    worst = 0.0
    for k in range(1, len(boosted.fields) - 1, 100):
        ut = (boosted.fields[k + 1].values - boosted.fields[k - 1].values) / (2 * dt)
        resid = ut - kdv_rhs(boosted.fields[k]).values
        worst = max(worst, np.abs(resid).max())
    assert worst < 1e-6


def test_automorphism_t0_residual_exactly_zero(grid64):
    u0 = random_smooth_field(grid64, 41, mode_cutoff=4, amplitude=0.4)
    flow = FlowSpec("kdv", grid64, dt=1e-3, t_end=0.02)
    res = equivariance_residual(
        SymmetrySpec(kind="automorphism", i=1, j=2, t=0.0), flow, u0
    )
    assert res == 0.0


def test_automorphism_equivariance_v0():
    grid = Grid(128, 20.0)
    u0 = random_smooth_field(grid, 42, mode_cutoff=5, amplitude=0.4)
    flow = FlowSpec("kdv", grid, dt=5e-4, t_end=0.5)
    res = equivariance_residual(
        SymmetrySpec(kind="automorphism", i=1, j=2, t=0.7), flow, u0, snapshot_every=250
    )
    assert res < 1e-6


def test_gardner_and_miura_equivariance():
    grid = Grid(128, 20.0)
    u0 = random_smooth_field(grid, 43, mode_cutoff=5, amplitude=0.4)
    for kind, eps in [("gardner", 0.6), ("miura", 0.0)]:
        flow = FlowSpec(kind, grid, dt=5e-4, t_end=0.5, epsilon=eps)
        res = equivariance_residual(
            SymmetrySpec(kind="automorphism", i=2, j=6, t=0.8), flow, u0,
            snapshot_every=250,
        )
        assert res < 1e-6, kind


def test_derivation_span_has_dimension_14():
    assert derivation_span().shape == (14, 64)


@pytest.mark.parametrize("seed", [0, 1])
def test_stabilizer_dimension_generic_imaginary(seed):
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(8)
    coeffs[1:] = rng.normal(size=7)
    dim, basis = stabilizer_subspace(CDElement(coeffs))
    assert dim == 8
    # every basis element annihilates v
    for row in basis:
        assert np.abs(row.reshape(8, 8) @ coeffs).max() < 1e-9


def test_stabilizer_dimension_e7():
    dim, _ = stabilizer_subspace(E7)
    assert dim == 8


def test_pair_generator_stabilizes_e7():
    # frozen from the table: D_{e3,e4} annihilates e7, D_{e1,e2} does not
    D34 = derivation_matrix(CDElement.basis(3, 3), CDElement.basis(3, 4))
    assert np.abs(D34 @ E7.coeffs).max() == 0.0
    D12 = derivation_matrix(CDElement.basis(3, 1), CDElement.basis(3, 2))
    assert np.abs(D12 @ E7.coeffs).max() > 1.0


def test_equivariance_with_external_field_stabilizer_pair():
    grid = Grid(128, 20.0)
    u0 = random_smooth_field(grid, 44, mode_cutoff=5, amplitude=0.4)
    flow = FlowSpec("kdv", grid, dt=5e-4, t_end=0.5, v=E7)
    res = equivariance_residual(
        SymmetrySpec(kind="automorphism", i=3, j=4, t=0.7), flow, u0, snapshot_every=250
    )
    assert res < 1e-6


def test_non_stabilizer_generator_rejected():
    grid = Grid(64, 20.0)
    u0 = random_smooth_field(grid, 45, mode_cutoff=4, amplitude=0.4)
    flow = FlowSpec("kdv", grid, dt=1e-3, t_end=0.01, v=E7)
    with pytest.raises(StabilizerError):
        equivariance_residual(
            SymmetrySpec(kind="automorphism", i=1, j=2, t=0.7), flow, u0
        )


def test_stabilizer_contrast():
    from scipy.linalg import expm

    grid = Grid(128, 20.0)
    u0 = random_smooth_field(grid, 46, mode_cutoff=5, amplitude=0.4)
    flow = FlowSpec("kdv", grid, dt=5e-4, t_end=0.5, v=E7)
    D = stabilizer_generator(E7, seed=3)
    res_stab = equivariance_residual(
        SymmetrySpec(kind="automorphism", t=0.7), flow, u0,
        snapshot_every=250, generator=D,
    )
    Dbad = derivation_matrix(CDElement.basis(3, 1), CDElement.basis(3, 2))
    Dbad /= np.linalg.norm(Dbad)
    phi = expm(0.7 * Dbad)
    base = evolve(flow, u0, snapshot_every=250, record_charges=False)
    other = evolve(flow, apply_automorphism(u0, phi), snapshot_every=250,
                   record_charges=False)
    res_bad = max(
        float(np.abs(apply_automorphism(f, phi).values - g.values).max())
        for f, g in zip(base.fields, other.fields)
    )
    assert res_stab < 1e-6
    assert res_bad > 1e-2
    assert res_bad / max(res_stab, 1e-300) > 1e4


def test_automorphism_matrix_cached():
    a = automorphism_matrix(1, 2, 0.3)
    b = automorphism_matrix(1, 2, 0.3)
    assert a is b


def test_equivariance_residual_scales_with_integrator_error():
    # quartic reduction under dt halving: the residual is discretization noise
    grid = Grid(64, 20.0)
    u0 = random_smooth_field(grid, 47, mode_cutoff=4, amplitude=0.5)
    spec_c = SymmetrySpec(kind="galileo", c=0.5)
    res = []
    for dt in (4e-3, 2e-3):
        flow = FlowSpec("kdv", grid, dt=dt, t_end=0.4, stepper="ifrk4")
        res.append(equivariance_residual(spec_c, flow, u0, snapshot_every=None))
    ratio = res[0] / res[1]
    assert 8.0 < ratio < 32.0
