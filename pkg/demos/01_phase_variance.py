"""Phase variance accumulated by a superposed pair of Gaussian wavepackets.

Walks the dimensionless variance engine through its three regimes: the
short-horizon linear ramp, the log growth of the self term, and the
near-cancellation between self and cross contributions when the packets
overlap strongly (rho -> 0).
"""

import numpy as np

from gravphase import (
    CODATA2018,
    DimensionlessParams,
    make_params,
    nondimensionalize,
    phase_variance,
    redimensionalize,
)


def main() -> None:
    print("=== dimensionless sweep at mu = 1 ===")
    print(f"{'rho':>8} {'tau_max':>8} {'i7':>12} {'i8':>12} {'total':>12}")
    for rho in (0.05, 0.3, 1.0, 5.0):
        for tau in (0.1, 1.0, 10.0):
            p = DimensionlessParams(mu=1.0, rho=rho, tau_max=tau)
            vb = phase_variance(p)
            print(
                f"{rho:8.2f} {tau:8.1f} {vb.i7:12.5e} {vb.i8:12.5e}"
                f" {vb.total:12.5e}"
            )

    # at rho = 0 the two packets coincide and the variance cancels exactly
    vb0 = phase_variance(DimensionlessParams(mu=1.0, rho=0.0, tau_max=5.0))
    print(f"\ncoincident packets: total = {vb0.total} (i7 = {vb0.i7:.5e})")

    print("\n=== SI round trip for a 1e-17 kg grain ===")
    pair = make_params(m=1e-17, a=1e-7, R=5e-7, T=1.0)
    dimless = nondimensionalize(pair, CODATA2018)
    print(f"mu = {dimless.mu:.5e}, rho = {dimless.rho:.3f},"
          f" tau_max = {dimless.tau_max:.5e}")
    vb = phase_variance(dimless)
    print(f"phase variance over {pair.T} s: {vb.total:.5e}")
    back = redimensionalize(dimless, pair.m, CODATA2018)
    print(f"round trip separation: {back.R:.6e} m (input {pair.R:.6e} m)")

    # linearity in mu: variance is a single power of the coupling
    doubled = phase_variance(
        DimensionlessParams(mu=2.0, rho=1.0, tau_max=1.0)
    ).total
    single = phase_variance(
        DimensionlessParams(mu=1.0, rho=1.0, tau_max=1.0)
    ).total
    print(f"\nmu linearity check: {doubled / single:.15f} (expect 2)")
    assert np.isclose(doubled, 2.0 * single, rtol=1e-12)


if __name__ == "__main__":
    main()
