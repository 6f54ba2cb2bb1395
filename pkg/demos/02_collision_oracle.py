"""Closed form against per-collision simulation of the control's environment."""
from openswitch import INF, bell_mub_switch, make_params
from openswitch.opencontrol import analytic_coeffs, oracle_gap

sw = bell_mub_switch(0.7)

for g_tau in (0.05, 0.2, 0.5):
    for beta in (0.0, 1.0, INF):
        gap = oracle_gap(sw, make_params(beta, g_tau=g_tau), 20)
        print(f"g*tau={g_tau:<5} beta={beta:<4} max trace distance over n<=20: {gap:.1e}")

# The order-interference term fades as cos(g tau)^(2n).
p = make_params(1.0, g_tau=0.2)
for n in (0, 5, 20, 100, 300):
    k = analytic_coeffs(n, p)
    print(f"n={n:<3} b_indef+ = {k.b_indef_plus:.6f}  b_def+ = {k.b_def_plus:.6f}")
