import math

import numpy as np
import pytest

from gravphase.noisefield import (
    CUBE_SELF_CONSTANT,
    ConfigurationError,
    EnsembleStats,
    FieldGrid,
    measured_covariance,
    sample_field_step,
    simulate_phase_variance,
    smeared_potential,
)
from gravphase.packets import GaussianPacket
from gravphase.units import CODATA2018, NATURAL, make_params, nondimensionalize
from gravphase.variance import phase_variance

HBAR = CODATA2018.hbar
G = CODATA2018.G


def _pair(mu, rho, tau_max, a=1e-6):
    m = (mu * HBAR**2 / (G * a)) ** (1.0 / 3.0)
    T = tau_max * m * a**2 / HBAR
    return make_params(m, a, rho * a, T)


def _grid_for(pair, n=32, steps=4, seed=0):
    d = nondimensionalize(pair)
    box = 8.0 * pair.a * max(d.rho, math.hypot(1.0, d.tau_max))
    return FieldGrid(n=n, box_length=box, dt=pair.T / steps, n_steps=steps, seed=seed)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=24, box_length=1.0, dt=1.0, n_steps=1, seed=0),  # not a power of two
        dict(n=16, box_length=1.0, dt=1.0, n_steps=1, seed=0),  # too small
        dict(n=32, box_length=-1.0, dt=1.0, n_steps=1, seed=0),
        dict(n=32, box_length=1.0, dt=0.0, n_steps=1, seed=0),
        dict(n=32, box_length=1.0, dt=1.0, n_steps=0, seed=0),
    ],
)
def test_grid_validation(kwargs):
    with pytest.raises(ConfigurationError):
        FieldGrid(**kwargs)


def test_cube_self_constant_against_mc():
    # independent check of the coincident-cell average of 1/r: draw
    # uniform points in the unit cube and average 1/|u|
    rng = np.random.default_rng(314159)
    u = rng.uniform(-0.5, 0.5, size=(2_000_000, 3))
    inv = 1.0 / np.linalg.norm(u, axis=1)
    est, se = float(inv.mean()), float(inv.std() / math.sqrt(len(inv)))
    assert abs(est - CUBE_SELF_CONSTANT) < 4.0 * se


def test_field_determinism_and_stream_separation():
    g = FieldGrid(n=32, box_length=1.0, dt=0.5, n_steps=4, seed=99)
    f1 = sample_field_step(g, member=3, step=2)
    f2 = sample_field_step(g, member=3, step=2)
    assert np.array_equal(f1, f2)
    assert not np.array_equal(f1, sample_field_step(g, member=3, step=3))
    assert not np.array_equal(f1, sample_field_step(g, member=4, step=2))
    g2 = FieldGrid(n=32, box_length=1.0, dt=0.5, n_steps=4, seed=100)
    assert not np.array_equal(f1, sample_field_step(g2, member=3, step=2))


def test_field_zero_mean_option():
    g = FieldGrid(n=32, box_length=1.0, dt=1.0, n_steps=1, seed=5)
    f = sample_field_step(g, 0, 0, zero_mean=True)
    assert abs(f.mean()) < 1e-13 * f.std()
    # default keeps the k = 0 mode, so the mean is a nonzero Gaussian draw
    f_raw = sample_field_step(g, 0, 0)
    assert abs(f_raw.mean()) > 1e-6 * f_raw.std()


def test_field_dt_scaling():
    # white-in-time normalization: amplitudes scale as 1/sqrt(dt)
    g1 = FieldGrid(n=32, box_length=1.0, dt=1.0, n_steps=1, seed=7)
    g4 = FieldGrid(n=32, box_length=1.0, dt=4.0, n_steps=1, seed=7)
    f1 = sample_field_step(g1, 0, 0)
    f4 = sample_field_step(g4, 0, 0)
    assert np.allclose(f1, 2.0 * f4)


def test_measured_covariance_matches_kernel():
    g = FieldGrid(n=32, box_length=1.0, dt=0.25, n_steps=1, seed=21)
    seps = [2 * g.dx, 4 * g.dx, 8 * g.dx, 0.5]
    rows = measured_covariance(g, 400, seps)
    assert [r.separation for r in rows] == pytest.approx(seps)
    for row in rows:
        assert row.target == HBAR * G / row.separation
        assert abs(row.estimate - row.target) < 4.0 * row.standard_error
    # hard accuracy backstop on the interior lags; the half-box point is
    # dominated by sampling noise at this ensemble size
    for row in rows[:3]:
        assert abs(row.estimate - row.target) <= 0.10 * row.target


def test_measured_covariance_snaps_to_lattice():
    g = FieldGrid(n=32, box_length=1.0, dt=1.0, n_steps=1, seed=21)
    rows = measured_covariance(g, 100, [3.4 * g.dx])
    assert rows[0].separation == 3.0 * g.dx


def test_measured_covariance_validation():
    g = FieldGrid(n=32, box_length=1.0, dt=1.0, n_steps=1, seed=0)
    with pytest.raises(ValueError, match="realizations"):
        measured_covariance(g, 50, [0.25])
    with pytest.raises(ValueError, match="separation"):
        measured_covariance(g, 100, [0.6])  # beyond half the box
    with pytest.raises(ValueError, match="separation"):
        measured_covariance(g, 100, [g.dx / 3.0])  # below the lattice spacing


def test_smeared_potential_constant_field():
    g = FieldGrid(n=64, box_length=16.0, dt=1.0, n_steps=1, seed=0)
    pk = GaussianPacket(center=(8.0, 8.0, 8.0), a=1.0, m=2.5)
    field = np.full((64, 64, 64), 3.0)
    v = smeared_potential(g, field, pk, 0.0, NATURAL)
    assert math.isclose(v, 2.5 * 3.0, rel_tol=1e-12)


def test_smeared_potential_linear_field():
    # a linear potential averages to its value at the packet center
    g = FieldGrid(n=64, box_length=16.0, dt=1.0, n_steps=1, seed=0)
    pk = GaussianPacket(center=(6.0, 8.0, 8.0), a=1.0, m=1.0)
    x = np.arange(64) * g.dx
    field = np.broadcast_to(x[:, None, None], (64, 64, 64)).copy()
    v = smeared_potential(g, field, pk, 0.0, NATURAL)
    assert math.isclose(v, 6.0, rel_tol=1e-9)


def test_smeared_potential_clipped_support_raises():
    g = FieldGrid(n=64, box_length=16.0, dt=1.0, n_steps=1, seed=0)
    pk = GaussianPacket(center=(0.5, 8.0, 8.0), a=3.0, m=1.0)
    field = np.ones((64, 64, 64))
    with pytest.raises(ConfigurationError, match="mass"):
        smeared_potential(g, field, pk, 30.0, NATURAL)


def test_simulate_worker_invariance():
    pair = _pair(1.0, 1.0, 0.1)
    grid = _grid_for(pair, seed=11)
    e1 = simulate_phase_variance(pair, grid, 64, workers=1)
    e4 = simulate_phase_variance(pair, grid, 64, workers=4)
    assert e1 == e4
    assert isinstance(e1, EnsembleStats)


def test_simulate_matches_analytic_small():
    pair = _pair(1.0, 1.0, 0.1)
    grid = _grid_for(pair, seed=11)
    ens = simulate_phase_variance(pair, grid, 64)
    target = phase_variance(nondimensionalize(pair)).total
    assert abs(ens.variance - target) < 3.0 * ens.standard_error_of_variance
    assert abs(ens.mean) < 3.0 * math.sqrt(ens.variance / ens.n_members)


def test_simulate_zero_separation_gives_zero_variance():
    pair = make_params(1e-17, 1e-6, 0.0, 1e4)
    d = nondimensionalize(pair)
    box = 8.0 * pair.a * math.hypot(1.0, d.tau_max)
    grid = FieldGrid(n=32, box_length=box, dt=pair.T / 2, n_steps=2, seed=1)
    ens = simulate_phase_variance(pair, grid, 64)
    assert ens.variance == 0.0 and ens.mean == 0.0


def test_simulate_time_step_refinement_consistent():
    # halving dt must not move the variance beyond joint noise
    pair = _pair(1.0, 1.0, 0.1)
    e_coarse = simulate_phase_variance(pair, _grid_for(pair, steps=4, seed=13), 64)
    e_fine = simulate_phase_variance(pair, _grid_for(pair, steps=8, seed=13), 64)
    joint = math.hypot(
        e_coarse.standard_error_of_variance, e_fine.standard_error_of_variance
    )
    assert abs(e_coarse.variance - e_fine.variance) < 3.0 * joint


def test_simulate_preconditions():
    pair = _pair(1.0, 1.0, 0.1)
    grid = _grid_for(pair)
    with pytest.raises(ValueError, match="members"):
        simulate_phase_variance(pair, grid, 32)
    bad_horizon = FieldGrid(
        n=32, box_length=grid.box_length, dt=grid.dt * 0.9, n_steps=4, seed=0
    )
    with pytest.raises(ConfigurationError, match="horizon"):
        simulate_phase_variance(pair, bad_horizon, 64)
    small_box = FieldGrid(
        n=32, box_length=grid.box_length / 4.0, dt=grid.dt, n_steps=4, seed=0
    )
    with pytest.raises(ConfigurationError, match="box_length"):
        simulate_phase_variance(pair, small_box, 64)
