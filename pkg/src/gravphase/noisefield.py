"""Sampling of the spatially correlated, temporally white noise potential.

Target statistics: <phi(r, t) phi(r', t')> = hbar G |r - r'|^(-1) delta(t - t').

On a periodic n^3 grid the field is synthesized spectrally as a circulant
Gaussian: take the kernel row K(d) = hbar G / r_min_image(d) at every
nonzero lattice offset, assign the coincident-cell value from the exact
cell average of 1/r (the integral of 1/|u| over a unit cube is
2.3800774 dx^2, so K(0) = 2.3800774 hbar G / dx), and filter white noise
with the square root of the kernel's DFT,

    phi = ifftn(fftn(w) sqrt(P)) / sqrt(dt),      P = fftn(K) >= 0.

Because the field is then literally a convolution of iid Gaussians, its
lattice covariance equals K at every lag in expectation, with no band
limit or truncation artifacts: the measured two-point function matches
hbar G / r exactly (up to sampling noise) for all separations below half
the box. The minimum-image kernel row is what keeps the spectrum
positive; a sharp spherical cutoff at L/2 does not. If a pathological
(n, dx) combination ever produced a negative mode, the spectrum is lifted
uniformly, which only changes the same-point variance (a grid-scale
quantity with no continuum meaning) and no nonzero lag.

The 1/sqrt(dt) factor realizes the white-in-time normalization on a
discrete time grid: fields at different steps are independent, and the
covariance times dt reproduces the delta-correlation weight.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .packets import GaussianPacket
from .units import CODATA2018, PacketPair, PhysicalConstants, nondimensionalize

__all__ = [
    "FieldGrid",
    "EnsembleStats",
    "CovarianceRow",
    "ConfigurationError",
    "CUBE_SELF_CONSTANT",
    "sample_field_step",
    "measured_covariance",
    "smeared_potential",
    "simulate_phase_variance",
    "default_workers",
]

# integral of 1/|u| over the unit cube centered at the origin
CUBE_SELF_CONSTANT = 2.380077363979553

_TAG_FIELD = 0xF1
_TAG_COV = 0xC0
_TAG_SIM = 0x51

_MIN_MEMBERS = 64

_spectrum_cache: dict[tuple[int, float], np.ndarray] = {}


class ConfigurationError(ValueError):
    """Grid or ensemble configuration violates a stated precondition."""


@dataclass(frozen=True)
class FieldGrid:
    """Periodic sampling grid: n points per axis (power of two, >= 32),
    box length [m], time step dt [s], step count, and the ensemble seed."""

    n: int
    box_length: float
    dt: float
    n_steps: int
    seed: int

    def __post_init__(self):
        if self.n < 32 or (self.n & (self.n - 1)) != 0:
            raise ConfigurationError(
                f"n must be a power of two >= 32, got {self.n}"
            )
        if not (self.box_length > 0 and math.isfinite(self.box_length)):
            raise ConfigurationError(f"box_length must be positive, got {self.box_length}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be >= 1, got {self.n_steps}")

    @property
    def dx(self) -> float:
        return self.box_length / self.n


@dataclass(frozen=True)
class EnsembleStats:
    """Ensemble estimate of the phase variance.

    The standard error of the variance comes from the fourth-moment
    estimator var(s^2) = (m4 - (n-3)/(n-1) s^4) / n.
    """

    n_members: int
    mean: float
    variance: float
    standard_error_of_variance: float


@dataclass(frozen=True)
class CovarianceRow:
    separation: float
    estimate: float
    standard_error: float
    target: float


def default_workers() -> int:
    """Worker count: GRAVPHASE_THREADS if set, else 1."""
    env = os.environ.get("GRAVPHASE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _unit_spectrum(n: int, dx: float) -> np.ndarray:
    """DFT of the min-image 1/r kernel row for unit coupling; always >= 0."""
    key = (n, dx)
    cached = _spectrum_cache.get(key)
    if cached is not None:
        return cached
    o = (np.arange(n) + n // 2) % n - n // 2
    ox, oy, oz = np.meshgrid(o, o, o, indexing="ij", sparse=True)
    r = np.sqrt((ox * ox + oy * oy + oz * oz).astype(float)) * dx
    r[0, 0, 0] = 1.0
    k_row = 1.0 / r
    k_row[0, 0, 0] = CUBE_SELF_CONSTANT / dx
    p = np.fft.fftn(k_row).real
    floor = p.min()
    if floor < 0.0:
        p -= floor  # uniform lift: shifts only the coincident-point value
    if len(_spectrum_cache) > 8:
        _spectrum_cache.clear()
    _spectrum_cache[key] = p
    return p


def _white(seed: int, tag: int, member: int, step: int, n: int) -> np.ndarray:
    key = np.array([seed, tag], dtype=np.uint64)
    counter = np.array([0, member, step, 0], dtype=np.uint64)
    g = Generator(Philox(key=key, counter=counter))
    return g.standard_normal((n, n, n))


def sample_field_step(
    grid: FieldGrid,
    member: int,
    step: int,
    constants: PhysicalConstants = CODATA2018,
    zero_mean: bool = False,
) -> np.ndarray:
    """One realization of the noise potential for (member, step).

    Deterministic in (seed, member, step). With ``zero_mean`` the k = 0
    mode is nulled, making the spatial mean of each realization exactly
    zero; the mode carries no weight in any phase difference (a constant
    potential shifts both packets equally) but it does contribute to the
    raw two-point function, so the default keeps it and reproduces
    hbar G / r without a constant offset.
    """
    p = constants.hbar * constants.G * _unit_spectrum(grid.n, grid.dx)
    amp = np.sqrt(p)
    if zero_mean:
        amp = amp.copy()
        amp[0, 0, 0] = 0.0
    w = _white(grid.seed, _TAG_FIELD, member, step, grid.n)
    return np.fft.ifftn(np.fft.fftn(w) * amp).real / math.sqrt(grid.dt)


def measured_covariance(
    grid: FieldGrid,
    n_realizations: int,
    separations,
    constants: PhysicalConstants = CODATA2018,
) -> list[CovarianceRow]:
    """Ensemble two-point function along the axes, already multiplied by dt.

    Each requested separation is snapped to the nearest axis lag; the
    estimate at each lag averages the three axis directions and all grid
    sites (one circular autocorrelation per realization), with the
    standard error taken across realizations. Targets are hbar G / r at
    the snapped separations.
    """
    if n_realizations < 100:
        raise ValueError(f"need at least 100 realizations, got {n_realizations}")
    dx = grid.dx
    lags = []
    for r in separations:
        if not (dx <= r <= grid.box_length / 2.0):
            raise ValueError(
                f"separation {r} outside [{dx}, {grid.box_length / 2.0}]"
            )
        lags.append(max(1, round(r / dx)))
    p = constants.hbar * constants.G * _unit_spectrum(grid.n, dx)
    n = grid.n
    per_real = np.empty((n_realizations, len(lags)))
    for m in range(n_realizations):
        w = _white(grid.seed, _TAG_COV, m, 0, n)
        wh = np.fft.fftn(w)
        # covariance*dt of the synthesized field, all lags at once
        acov = np.fft.ifftn((wh.real**2 + wh.imag**2) * p).real / n**3
        for j, lag in enumerate(lags):
            per_real[m, j] = (acov[lag, 0, 0] + acov[0, lag, 0] + acov[0, 0, lag]) / 3.0
    rows = []
    for j, lag in enumerate(lags):
        r_snap = lag * dx
        est = float(per_real[:, j].mean())
        se = float(per_real[:, j].std(ddof=1) / math.sqrt(n_realizations))
        rows.append(
            CovarianceRow(
                separation=r_snap,
                estimate=est,
                standard_error=se,
                target=constants.hbar * constants.G / r_snap,
            )
        )
    return rows


def _density_grid(n: int, box: float, center, c1: float) -> np.ndarray:
    """Normalized Gaussian density on grid nodes with periodic min-image distances."""
    x = np.arange(n) * (box / n)

    def axis(c):
        d = x - c
        d -= box * np.round(d / box)
        return d

    dxx, dyy, dzz = np.meshgrid(
        axis(center[0]), axis(center[1]), axis(center[2]), indexing="ij", sparse=True
    )
    r2 = dxx * dxx + dyy * dyy + dzz * dzz
    return np.exp(-r2 / c1) / (math.pi * c1) ** 1.5


def smeared_potential(
    grid: FieldGrid,
    field: np.ndarray,
    packet: GaussianPacket,
    t: float,
    constants: PhysicalConstants = CODATA2018,
) -> float:
    """Grid quadrature of m int |psi(r')|^2 phi(r') d^3r' [J].

    Raises ConfigurationError if the packet's density mass on the grid
    deviates from 1 by more than 1e-6 (support clipped by the box).
    """
    c1 = packet.c1(t, constants)
    dens = _density_grid(grid.n, grid.box_length, packet.center, c1)
    cell = grid.dx**3
    mass = float(dens.sum() * cell)
    if abs(mass - 1.0) > 1e-6:
        raise ConfigurationError(
            f"packet density mass on grid is {mass:.9f}; support clipped by the box"
        )
    return packet.m * float(np.dot(dens.ravel(), field.ravel())) * cell


def simulate_phase_variance(
    p: PacketPair,
    grid: FieldGrid,
    n_members: int,
    constants: PhysicalConstants = CODATA2018,
    workers: int | None = None,
) -> EnsembleStats:
    """Ensemble variance of the stochastic phase difference.

    Each member integrates DeltaPhi = -(1/hbar) sum_steps [V(r1) - V(r2)] dt
    with both smeared potentials evaluated on the same field realization,
    the packet width following C1(t) at midstep times. The computation
    runs in the dimensionless variables (mu, rho, tau): lengths in units
    of a, and the overall factor sqrt(mu dtau) applied per step, which
    keeps every intermediate O(1). The deterministic self-gravity term is
    omitted because it cancels identically between the two centers (see
    oracle.sn_cancellation_check for the explicit verification).

    Ensemble members map to counter-based streams indexed (member, step),
    so the result is bit-identical for any worker count.
    """
    if n_members < _MIN_MEMBERS:
        raise ValueError(f"need at least {_MIN_MEMBERS} members, got {n_members}")
    d = nondimensionalize(p, constants)
    horizon = grid.n_steps * grid.dt
    if abs(horizon - p.T) > 1e-9 * p.T:
        raise ConfigurationError(
            f"n_steps*dt = {horizon} does not match the horizon T = {p.T}"
        )
    c1_final = p.a * math.hypot(1.0, d.tau_max)
    required = 8.0 * max(p.R, c1_final)
    if grid.box_length < required * (1.0 - 1e-12):
        raise ConfigurationError(
            f"box_length {grid.box_length} below 8*max(R, sqrt(C1(T))) = {required}"
        )

    n = grid.n
    box = grid.box_length / p.a  # box in units of a
    dtau = d.tau_max / grid.n_steps
    cell = (box / n) ** 3
    half = box / 2.0
    c_lo = (half - d.rho / 2.0, half, half)
    c_hi = (half + d.rho / 2.0, half, half)

    # density differences per step, shared by all members
    diffs = []
    for s in range(grid.n_steps):
        c1 = 1.0 + ((s + 0.5) * dtau) ** 2
        dd = (_density_grid(n, box, c_lo, c1) - _density_grid(n, box, c_hi, c1)) * cell
        diffs.append(dd.ravel())

    amp = np.sqrt(_unit_spectrum(n, box / n))
    scale = math.sqrt(d.mu * dtau)

    def member_phase(mem: int) -> float:
        acc = 0.0
        for s in range(grid.n_steps):
            w = _white(grid.seed, _TAG_SIM, mem, s, n)
            phi = np.fft.ifftn(np.fft.fftn(w) * amp).real
            acc += float(np.dot(diffs[s], phi.ravel()))
        return -scale * acc

    nw = workers if workers is not None else default_workers()
    phases = np.empty(n_members)
    if nw <= 1:
        for mem in range(n_members):
            phases[mem] = member_phase(mem)
    else:
        with ThreadPoolExecutor(max_workers=nw) as ex:
            for mem, val in enumerate(ex.map(member_phase, range(n_members))):
                phases[mem] = val

    mean = float(phases.mean())
    var = float(phases.var(ddof=1))
    m4 = float(np.mean((phases - mean) ** 4))
    nm = n_members
    se_var = math.sqrt(max(m4 - (nm - 3) / (nm - 1) * var * var, 0.0) / nm)
    return EnsembleStats(
        n_members=n_members,
        mean=mean,
        variance=var,
        standard_error_of_variance=se_var,
    )
