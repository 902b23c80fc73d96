"""Monte Carlo cross-checks for the Gaussian-smeared potential integrals.

Every closed form used by the variance engine has an independent sampling
oracle. This script runs the oracles against the analytic values, shows
the 1/sqrt(N) error scaling, and demonstrates the self-energy cancellation
that makes the coincident-packet variance vanish.
"""

from gravphase import (
    erf_identity_check,
    i4_closed_form,
    i6_closed_form,
    mc_i4_spatial,
    mc_i6_spatial,
    sn_cancellation_check,
)


def main() -> None:
    c1 = 1.7  # spread packet, mid-flight
    sep = 0.8

    print("=== oracle vs closed form ===")
    est4 = mc_i4_spatial(c1, 10**6, seed=3)
    ref4 = i4_closed_form(c1)
    print(f"self term:  MC {est4.value:+.6f} +- {est4.standard_error:.2e}"
          f"   analytic {ref4:+.6f}"
          f"   pull {(est4.value - ref4) / est4.standard_error:+.2f} sigma")

    est6 = mc_i6_spatial(c1, sep, 10**6, seed=3)
    ref6 = i6_closed_form(c1, sep)
    print(f"cross term: MC {est6.value:+.6f} +- {est6.standard_error:.2e}"
          f"   analytic {ref6:+.6f}"
          f"   pull {(est6.value - ref6) / est6.standard_error:+.2f} sigma")

    print("\n=== error scaling ===")
    for n in (10**4, 10**5, 10**6):
        est = mc_i4_spatial(c1, n, seed=7)
        print(f"n = {n:>9,}: se = {est.standard_error:.3e}"
              f"  (se * sqrt(n) = {est.standard_error * n**0.5:.4f})")

    print("\n=== self-energy cancellation between packet centers ===")
    rep = sn_cancellation_check(c1, sep, 10**6, seed=11)
    print(f"i1 = {rep.i1:+.6f}, i2 = {rep.i2:+.6f}, i3 = {rep.i3:+.6f}")
    print(f"i1 + i2 + i3 = {rep.sum_value:+.3e}"
          f" +- {rep.combined_se:.3e} (analytic {rep.analytic_difference})")
    print(f"ratio i3/i1 = {rep.ratio_i3_i1:+.6f} (expect -2)")

    print("\n=== erf identity residuals ===")
    for r, c in ((0.5, 1.0), (2.0, 1.7), (8.0, 0.3)):
        resid = erf_identity_check(r, c)
        print(f"R = {r:4.1f}, C1 = {c:3.1f}: residual = {resid:.3e}")


if __name__ == "__main__":
    main()
