#!/usr/bin/env python3
"""Compare clear hallways against cluttered ones across several seeds.

Re-runs each fixture with and without obstacles (two crates on the route
and a person pacing beside it) and tabulates how the deviation
statistics respond -- detours raise the maximum and the variance while
everyone still arrives.
"""

import numpy as np

from vroad import Environment, SimulationConfig, deviation_stats, load_map, run_scenario
from vroad.fixtures import FIXTURE_NAMES, ROUTES, env_doc, map_doc

SEEDS = range(8)


def summarize(name, obstacles):
    graph, _ = load_map(map_doc(name))
    env = Environment.from_doc(env_doc(name, obstacles))
    cfg = SimulationConfig()
    maxs, avgs, variances, arrived = [], [], [], 0
    for seed in SEEDS:
        rec = run_scenario(env, graph, *ROUTES[name], cfg, seed=seed)
        st = deviation_stats(rec, rec.path)
        arrived += rec.outcome.value == "arrived"
        maxs.append(st.max_dev)
        avgs.append(st.avg_dev)
        variances.append(st.variance)
    return arrived, max(maxs), float(np.mean(avgs)), float(np.mean(variances))


def main():
    print(f"{'fixture':<10} {'clutter':<8} {'arrived':<8} {'worst max':>10} "
          f"{'mean avg':>9} {'mean var':>9}")
    for name in FIXTURE_NAMES:
        for obstacles in (False, True):
            arrived, worst, avg, var = summarize(name, obstacles)
            label = "yes" if obstacles else "no"
            print(f"{name:<10} {label:<8} {arrived}/{len(SEEDS):<6} "
                  f"{worst:>9.3f}m {avg:>8.3f}m {var:>9.5f}")


if __name__ == "__main__":
    main()
