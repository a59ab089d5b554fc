"""Baseline vs optimized cut fidelity and optimal (a1, a2) over horizons.

Writes one CSV row per T; the columns feed the fidelity-vs-T plot and the
optimal-parameter trajectory in the (a1, a2) plane.
"""
import argparse
import csv

import numpy as np

from chaincut import EvolutionConfig, SpinChainSpec, sweep_horizon


def run(t_min, t_max, points, out, scale_steps):
    horizons = np.linspace(t_min, t_max, points)
    results = sweep_horizon(SpinChainSpec(5, 0.5), "cut", "poly", horizons, EvolutionConfig(300, scale_steps))
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["T", "baseline", "fidelity", "a1", "a2", "admissible", "iterations"])
        for r in results:
            w.writerow([f"{r.horizon:.12g}", f"{r.baseline:.12g}", f"{r.fidelity:.12g}",
                        f"{r.parameters[0]:.12g}", f"{r.parameters[1]:.12g}",
                        str(r.admissible).lower(), r.iterations])
            print(f"T={r.horizon:6.3f}  f_T0={r.baseline:.4f}  f_T={r.fidelity:.4f}  "
                  f"a=({r.parameters[0]:8.3f}, {r.parameters[1]:8.3f})  admissible={r.admissible}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t-min", type=float, default=0.5)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--scale-steps", action="store_true")
    p.add_argument("-o", "--output", default="horizon_sweep.csv")
    a = p.parse_args()
    run(a.t_min, a.t_max, a.points, a.output, a.scale_steps)
