"""Driving that keeps B1 - B2 fixed produces no friction.

When both fields move together the eigenvectors do not change, the
Hamiltonian commutes with itself at all times and the populations are
frozen. Work is then independent of how fast the strokes are run.
"""

from dataclasses import replace

from heisenberg_otto import CycleConfig, run_constant_delta_b_cycle, run_cycle

base = CycleConfig(j_coupling=0.1, b1=3.0, b2_start=3.5, b3=4.0, t_cold=1.0, t_hot=2.0)

print("constant field difference (B1 - B2 = -0.5 throughout)")
for tau in (0.0, 1.0, 10.0, 100.0):
    r = run_constant_delta_b_cycle(replace(base, tau_total=tau))
    print(f"  tau={tau:6.1f}  W={r.w_total:.12f}  entropy={r.entropy_production_total:.1e}")

print("\nfor contrast: B1 held at 3, B2 driven 3 -> 4 by a sine pulse")
homogeneous = CycleConfig(j_coupling=0.1, b1=3.0, b2_start=3.0, b3=4.0, t_cold=1.0, t_hot=2.0)
for tau in (0.0, 1.0, 10.0, 100.0):
    r = run_cycle(replace(homogeneous, tau_total=tau))
    print(f"  tau={tau:6.1f}  W={r.w_total:.12f}  entropy={r.entropy_production_total:.1e}")
