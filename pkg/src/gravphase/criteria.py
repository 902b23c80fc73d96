"""Decoherence criteria: damping time, critical length, critical mass, regime.

The damping time T is the time at which the phase variance reaches a
threshold of order pi^2. Comparing T with the quantum kinematic time
t_q = m L^2 / hbar defines a critical separation L_c, with closed-form
asymptotes

    L_c = (hbar^2 / G m^3)^(1/4) a^(3/4)    for mu >> 1,
    L_c = (hbar^2 / G m^3)^(1/2) a^(1/2)    for mu << 1,

both of which reduce to L_c = a = hbar^2 / G m^3 on the boundary mu = 1.
All order-one constants (the threshold, the constant in t_q) are
conventions; only scaling exponents and the mu = 1 boundary are
convention-free, and the defaults here fix the conventions explicitly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq
from scipy.special import erf

from .units import CODATA2018, DimensionlessParams, PacketPair, PhysicalConstants
from .variance import phase_variance

__all__ = [
    "Regime",
    "Method",
    "Threshold",
    "DecoherenceResult",
    "CriticalLengthResult",
    "BracketError",
    "T_CAP_DEFAULT",
    "damping_time",
    "damping_time_short",
    "critical_length",
    "critical_mass",
    "classify",
    "decoherence_summary",
]

# beyond this horizon the pair is reported as simply not decohering
T_CAP_DEFAULT = 1e18  # s


class Regime(enum.Enum):
    QUANTUM = "Quantum"
    CLASSICAL = "Classical"
    BOUNDARY = "Boundary"


class Method(enum.Enum):
    FULL_QUADRATURE = "FullQuadrature"
    MACRO_ASYMPTOTIC = "MacroAsymptotic"
    MICRO_ASYMPTOTIC = "MicroAsymptotic"


@dataclass(frozen=True)
class Threshold:
    """Phase-variance level that counts as decohered; pi^2 by convention."""

    variance_threshold: float = math.pi**2

    def __post_init__(self):
        if not (self.variance_threshold > 0 and math.isfinite(self.variance_threshold)):
            raise ValueError(
                f"variance_threshold must be positive, got {self.variance_threshold}"
            )


@dataclass(frozen=True)
class CriticalLengthResult:
    """Root-found critical length plus the applicable closed-form asymptote."""

    l_c: float
    method: Method
    asymptote: float
    asymptote_method: Method


@dataclass(frozen=True)
class DecoherenceResult:
    damping_time: float
    critical_length: float
    critical_mass: float
    regime: Regime
    method: Method


class BracketError(RuntimeError):
    """Root bracketing failed; carries the scanned interval."""

    def __init__(self, message: str, lo: float, hi: float):
        super().__init__(f"{message} (scanned [{lo:.6g}, {hi:.6g}])")
        self.scanned = (lo, hi)


def _total(mu: float, rho: float, tau: float) -> float:
    # bracket scans start at tau = 0 or rho = 0, where the variance is 0
    if rho == 0.0 or tau == 0.0:
        return 0.0
    return phase_variance(DimensionlessParams(mu=mu, rho=rho, tau_max=tau)).total


def damping_time(
    p: PacketPair,
    th: Threshold = Threshold(),
    constants: PhysicalConstants = CODATA2018,
    t_cap: float = T_CAP_DEFAULT,
) -> float:
    """Time at which the phase variance reaches the threshold [s].

    The variance is strictly increasing in time for rho > 0, so the root is
    unique and safe to bracket by geometric expansion from t = m a^2 / hbar.
    If the threshold is not reached by ``t_cap`` (the variance saturates at
    a finite value once the packets have spread beyond their separation),
    the cap itself is returned as a "no decoherence at cap" sentinel rather
    than raising.
    """
    mu = constants.G * p.m**3 * p.a / constants.hbar**2
    rho = p.R / p.a
    t_unit = p.m * p.a**2 / constants.hbar  # seconds per unit tau
    tau_cap = t_cap / t_unit
    target = th.variance_threshold
    if rho == 0.0 or _total(mu, rho, tau_cap) < target:
        return t_cap

    f = lambda tau: _total(mu, rho, tau) - target
    lo, hi = 0.0, 1.0
    while f(hi) < 0.0:
        lo = hi
        hi = min(hi * 8.0, tau_cap)
    tau_root = brentq(f, lo, hi, rtol=1e-10)
    return tau_root * t_unit


def damping_time_short(
    p: PacketPair,
    constants: PhysicalConstants = CODATA2018,
    threshold: float | None = None,
) -> float:
    """Closed-form short-time damping time [s].

    In the frozen-width regime T << m a^2 / hbar the variance grows
    linearly and the damping time has the closed form

        T = (hbar / G m^2) [sqrt(2/pi)/a - erf(R / sqrt(2) a)/R]^(-1),

    with the order-unity threshold constant absorbed, which is the
    ``threshold=None`` default. Passing an explicit variance threshold th
    multiplies this by th/2, making the result directly comparable with
    the root-found ``damping_time`` at the same threshold.

    R = 0 returns math.inf: coincident packets never decohere.
    """
    rho = p.R / p.a
    bracket = _short_time_bracket(rho) / p.a
    if bracket == 0.0:
        return math.inf
    t = constants.hbar / (constants.G * p.m**2) / bracket
    if threshold is not None:
        t *= threshold / 2.0
    return t


def _short_time_bracket(rho: float) -> float:
    """sqrt(2/pi) - erf(rho/sqrt(2))/rho, series-protected for small rho."""
    if rho == 0.0:
        return 0.0
    if rho < 0.1:
        # erf(rho/sqrt(2))/rho = sqrt(2/pi) sum (-1)^k x2^k / ((2k+1) k!)
        # with x2 = rho^2/2, so the bracket is the k >= 1 tail of that sum
        x2 = rho * rho / 2.0
        term = math.sqrt(2.0 / math.pi)
        out = 0.0
        k = 0
        while True:
            k += 1
            term *= -x2 / k
            out -= term / (2 * k + 1)
            if abs(term) < 1e-18 * math.sqrt(2.0 / math.pi):
                return out
    return math.sqrt(2.0 / math.pi) - erf(rho / math.sqrt(2.0)) / rho


def critical_length(
    m: float,
    a: float,
    constants: PhysicalConstants = CODATA2018,
    th: Threshold = Threshold(),
) -> CriticalLengthResult:
    """Separation at which damping time equals the kinematic time t_q = m L^2 / hbar.

    In dimensionless variables t_q corresponds to tau = rho^2, so the
    defining condition T(L_c) = t_q(L_c) becomes the single equation
    DeltaPhi^2(mu, rho, tau = rho^2) = threshold, whose left side is
    strictly increasing in rho. Solved by geometric bracketing plus Brent.

    Also evaluates the closed-form asymptote for the applicable regime
    (macro a^(3/4) law for mu >= 1, micro a^(1/2) law otherwise).
    """
    if m <= 0 or a <= 0:
        raise ValueError("m and a must be positive")
    mu = constants.G * m**3 * a / constants.hbar**2
    target = th.variance_threshold

    g = lambda rho: _total(mu, rho, rho * rho) - target
    lo, hi = 0.0, max(mu**-0.25, 1e-3)
    # the variance saturates like mu log(rho) at large rho, so deep in the
    # micro regime the root can sit at astronomically large rho or not
    # exist at double precision at all; cap the scan and report it
    while g(hi) < 0.0:
        lo = hi
        hi *= 8.0
        if hi > 1e100:
            raise BracketError("critical length root not bracketable", lo, hi)
    rho_c = brentq(g, lo, hi, rtol=1e-10)

    l_chr = constants.hbar**2 / (constants.G * m**3)
    if mu >= 1.0:
        asym = l_chr**0.25 * a**0.75
        asym_method = Method.MACRO_ASYMPTOTIC
    else:
        asym = l_chr**0.5 * a**0.5
        asym_method = Method.MICRO_ASYMPTOTIC
    return CriticalLengthResult(
        l_c=rho_c * a,
        method=Method.FULL_QUADRATURE,
        asymptote=asym,
        asymptote_method=asym_method,
    )


def critical_mass(density: float, constants: PhysicalConstants = CODATA2018) -> float:
    """Mass at which an object of the given density sits on the boundary [kg].

    For a uniform-density object, a = (3 m / 4 pi rho_d)^(1/3). The
    quantum-classical boundary is mu = 1, i.e. a = hbar^2 / G m^3, and
    solving the two simultaneously gives

        m_c = (hbar^2 (4 pi rho_d / 3)^(1/3) / G)^(3/10)
            = (hbar rho_d^(1/6) / sqrt(G))^(3/5) (4 pi / 3)^(1/10),

    about 1e-17 kg at 1000 kg/m^3. Scales as rho_d^(1/10).
    """
    if density <= 0 or not math.isfinite(density):
        raise ValueError(f"density must be positive, got {density}")
    return (
        constants.hbar**2 * (4.0 * math.pi * density / 3.0) ** (1.0 / 3.0) / constants.G
    ) ** 0.3


def width_from_density(m: float, density: float) -> float:
    """Width of a uniform ball of mass m and the given density [m]."""
    return (3.0 * m / (4.0 * math.pi * density)) ** (1.0 / 3.0)


def classify(
    m: float,
    density: float,
    a: float | None = None,
    constants: PhysicalConstants = CODATA2018,
    band: float = 0.1,
) -> Regime:
    """Regime of an object: Classical iff L_c < a, Quantum iff L_c > a.

    Uses the asymptotic critical-length laws, under which the ratio

        L_c / a = mu^(-1/4)  (mu >= 1),   mu^(-1/2)  (mu < 1)

    is continuous and strictly decreasing in m, equals 1 exactly at
    m = critical_mass(density) when a is derived from the density, and
    defines the Boundary verdict within ``band`` of 1.
    """
    if a is None:
        a = width_from_density(m, density)
    mu = constants.G * m**3 * a / constants.hbar**2
    ratio = mu**-0.25 if mu >= 1.0 else mu**-0.5
    if abs(ratio - 1.0) <= band:
        return Regime.BOUNDARY
    return Regime.CLASSICAL if ratio < 1.0 else Regime.QUANTUM


def decoherence_summary(
    p: PacketPair,
    density: float,
    th: Threshold = Threshold(),
    constants: PhysicalConstants = CODATA2018,
    t_cap: float = T_CAP_DEFAULT,
) -> DecoherenceResult:
    """Bundle damping time, critical length, critical mass and regime."""
    clr = critical_length(p.m, p.a, constants, th)
    return DecoherenceResult(
        damping_time=damping_time(p, th, constants, t_cap),
        critical_length=clr.l_c,
        critical_mass=critical_mass(density, constants),
        regime=classify(p.m, density, a=p.a, constants=constants),
        method=clr.method,
    )
