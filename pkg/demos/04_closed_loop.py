#!/usr/bin/env python3
"""Run the full closed loop on the L-shaped fixture and report deviations.

Plans Dock -> Lab, walks it with the simulated user and sensors, prints
the deviation statistics, and saves a trajectory plot when matplotlib is
available.
"""

from pathlib import Path

import numpy as np

from vroad import Environment, SimulationConfig, deviation_stats, load_map, run_scenario
from vroad.fixtures import env_doc, map_doc


def main():
    graph, _ = load_map(map_doc("lshape"))
    env = Environment.from_doc(env_doc("lshape"))
    cfg = SimulationConfig()

    record = run_scenario(env, graph, "Dock", "Lab", cfg, seed=7)
    stats = deviation_stats(record, record.path)
    duration = len(record.samples) * cfg.walker.dt
    print(f"outcome: {record.outcome.value} after {duration:.1f} simulated seconds")
    print(f"max deviation: {stats.max_dev:.3f} m")
    print(f"avg deviation: {stats.avg_dev:.3f} m")
    print(f"variance:      {stats.variance:.5f} m^2")

    cues = {}
    for s in record.samples:
        cues[s.guidance.cue.value] = cues.get(s.guidance.cue.value, 0) + 1
    print("cues issued:", ", ".join(f"{k} x{v}" for k, v in sorted(cues.items())))

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping the plot")
        return

    grid = env.grid_at(0.0)
    walked = np.array([[s.pose.x, s.pose.y] for s in record.samples])
    fig, ax = plt.subplots(figsize=(7, 7))
    ax.imshow(
        grid.cells,
        origin="lower",
        cmap="gray_r",
        extent=(0, grid.width * grid.resolution, 0, grid.height * grid.resolution),
    )
    ax.plot(record.path.points[:, 0], record.path.points[:, 1], "b--", lw=1.5, label="planned")
    ax.plot(walked[:, 0], walked[:, 1], "r-", lw=1.0, label="walked")
    ax.legend()
    ax.set_title("planned vs walked")
    out = Path(__file__).parent / "data" / "lshape_run.png"
    out.parent.mkdir(exist_ok=True)
    fig.savefig(out, dpi=120)
    print(f"plot saved to {out}")


if __name__ == "__main__":
    main()
