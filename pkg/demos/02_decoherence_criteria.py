"""Decoherence criteria: damping times, critical lengths, critical masses.

Shows where the quantum-to-classical boundary sits for matter-wave
interference with gravitational phase noise, and how the critical length
tracks its closed-form asymptotes in the micro and macro regimes.
"""

from gravphase import (
    CODATA2018,
    BracketError,
    PacketPair,
    classify,
    critical_length,
    critical_mass,
    damping_time,
    damping_time_short,
    decoherence_summary,
    width_from_density,
)


def main() -> None:
    print("=== damping time for a heavy test grain ===")
    pair = PacketPair(m=1e-14, a=1e-7, R=1e-6, T=1.0)
    t_full = damping_time(pair)
    t_short = damping_time_short(pair)
    print(f"full criterion:   t_d = {t_full:.6e} s")
    print(f"short-time form:  t_d = {t_short:.6e} s"
          f" (ratio {t_full / t_short:.4f})")

    print("\n=== critical length vs mass ===")
    print(f"{'m [kg]':>10} {'l_c [m]':>14} {'asymptote':>14} {'method':>16}")
    for m in (1e-18, 1e-16, 1e-15, 1e-13, 1e-11):
        try:
            res = critical_length(m, 1e-7)
        except BracketError as exc:
            # far micro regime: variance saturates below threshold
            print(f"{m:10.1e} {'(no root)':>14} scanned to"
                  f" {exc.scanned[1]:.1e}")
            continue
        print(f"{m:10.1e} {res.l_c:14.6e} {res.asymptote:14.6e}"
              f" {res.method.value:>16}")

    print("\n=== critical mass for homogeneous spheres ===")
    for density in (1000.0, 2200.0, 19300.0):
        m_c = critical_mass(density)
        a_c = width_from_density(m_c, density)
        print(f"rho_d = {density:7.1f} kg/m^3: m_c = {m_c:.6e} kg,"
              f" a = {a_c:.4e} m")

    print("\n=== regime classification at water density ===")
    for m in (1e-19, 1e-17, 1e-15):
        regime = classify(m, 1000.0)
        print(f"m = {m:.1e} kg -> {regime.value}")

    print("\n=== bundled summary ===")
    summary = decoherence_summary(pair, density=2200.0,
                                  constants=CODATA2018)
    print(f"  damping_time    = {summary.damping_time:.6e} s")
    print(f"  critical_length = {summary.critical_length:.6e} m")
    print(f"  critical_mass   = {summary.critical_mass:.6e} kg")
    print(f"  regime          = {summary.regime.value}")
    print(f"  method          = {summary.method.value}")


if __name__ == "__main__":
    main()
