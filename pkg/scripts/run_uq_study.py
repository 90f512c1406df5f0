#!/usr/bin/env python3
"""Run the composite-buckling uncertainty study and print its summary.

In-process counterpart of submitting W_uq through the REST API: Latin
hypercube design over the uncertain laminate inputs, buckling load per
sample, polynomial surrogate and pick-freeze Sobol indices.

    python3 scripts/run_uq_study.py [--samples N] [--seed S] [--bins B]
"""

import argparse
import time

from copla.data import Property, TimeStep
from copla.demos.uq import DEMO_UNCERTAIN, UqStudy
from copla.units import unit


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--bins", type=int, default=20)
    args = parser.parse_args()

    study = UqStudy(bins=args.bins)
    study.initialize()
    study.set_data_component(Property(float(args.samples), unit("1"), "PID_SampleCount"))
    study.set_data_component(Property(float(args.seed), unit("1"), "PID_Seed"))

    step = TimeStep(1.0, 1.0, 1.0, 1)
    t0 = time.perf_counter()
    study.solve_step(step)
    study.finish_step(step)
    elapsed = time.perf_counter() - t0

    out = {pid: study.get_data_component(pid, 1.0) for pid in study.advertised_outputs()}
    mean, std = out["PID_Mean"].value, out["PID_Std"].value
    print(
        f"critical buckling load: mean {mean:.6g} N, std {std:.4g} N"
        f"  ({args.samples} samples, seed {args.seed}, {elapsed:.2f}s)"
    )
    print(f"surrogate train R^2: {out['PID_TrainR2'].value:.4f}")

    print("\nfirst-order Sobol indices:")
    names = [d.name for d in DEMO_UNCERTAIN]
    for name, s in sorted(zip(names, out["PID_Sobol"].value), key=lambda p: -abs(p[1])):
        bar = "#" * int(round(40 * max(s, 0.0)))
        print(f"  {name:<16s} {s:+.3f}  {bar}")

    edges = out["PID_HistogramEdges"].value
    counts = out["PID_HistogramCounts"].value
    peak = max(counts) or 1
    print("\nload distribution [N]:")
    for i, count in enumerate(counts):
        bar = "#" * int(round(40 * count / peak))
        print(f"  {edges[i]:>10.4g} .. {edges[i + 1]:<10.4g} {bar} {int(count)}")


if __name__ == "__main__":
    main()
