"""Run the bundled merge scenario once and narrate the timeline.

Run: python3 demos/merge_run.py [style]
"""

import sys

import numpy as np

from lanegame.scenario import load_scenario
from lanegame.simulate import run_simulation, summarize


def main():
    style = sys.argv[1] if len(sys.argv) > 1 else "normal"
    cfg = load_scenario("scenario_a")
    print(f"merge scenario, {style} ego, simultaneous-play strategy")
    trace = run_simulation(cfg, style=style, strategy="nash")
    m = summarize(trace)

    t = trace.column("t")
    d = trace.column("d_ec")
    v = trace.column("v_ec")
    lane = trace.column("lane_ec")
    gap = trace.column("s_ec") - trace.column("s_ac1")

    events = []
    if not np.isnan(m.t_commit):
        events.append((m.t_commit, f"commits to the left change "
                                   f"(gap to the other car "
                                   f"{m.gap_at_commit['AC1']:+.2f} m)"))
    if m.merged:
        events.append((m.t_merge_done, "lane change complete"))
    for tt, msg in events:
        print(f"  t={tt:5.2f} s  {msg}")
    print()

    print("   t     d_ec   v_ec  lane   gap")
    for k in range(0, len(t), 20):
        print(f"{t[k]:5.1f} {d[k]:8.2f} {v[k]:6.2f}  {int(lane[k])}  "
              f"{gap[k]:+7.2f}")
    print()
    print(f"RMS safety {m.rms_safety:.3f}, comfort {m.rms_comfort:.3f}, "
          f"efficiency {m.rms_efficiency:.3f}, total {m.rms_total:.3f}")
    print(f"closest approach {m.min_clearance:.2f} m, "
          f"peak field {m.max_field:.2f}")


if __name__ == "__main__":
    main()
