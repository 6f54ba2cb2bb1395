"""Concurrence of the post-selected pair versus monitoring strength.

Writes sweep.csv and plot.gp into ./demo_out; run `gnuplot plot.gp` there
for the figure.
"""
from pathlib import Path

from openswitch import ScenarioConfig, run_sweep
from openswitch.cli import emit_csv, emit_plot_script
from openswitch.experiments import EpsilonGrid

out = Path("demo_out")
out.mkdir(exist_ok=True)

cfg = ScenarioConfig(epsilon=EpsilonGrid(0.0, 1.0, 101))
records = run_sweep(cfg)

with open(out / "sweep.csv", "w", newline="") as fh:
    emit_csv(records, fh)
with open(out / "plot.gp", "w", newline="") as fh:
    emit_plot_script(records, fh)


def first_zero(beta, outcome, n):
    for r in records:
        if r.beta == beta and r.postselect == outcome and r.n == n and r.concurrence is not None and r.concurrence <= 1e-12:
            return r.epsilon
    return None


print("definite order dies at eps ~", first_zero(0.1, "definite", 0))
for beta in cfg.betas:
    for n in (1, 5, 20):
        print(f"beta={beta}, plus, n={n}: dies at eps ~ {first_zero(beta, 'plus', n)}")
print(f"{len(records)} rows written to {out}/")
