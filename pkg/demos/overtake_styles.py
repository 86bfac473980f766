"""Sweep all three styles through the overtaking scenario and compare.

The slow car ahead makes keeping the lane expensive; the left lane is
open but guarded by a trailing car, the right lane is slower and
blocked by another. Aggressive and normal egos buy the left change at
different times; the conservative ego keeps following.

Run: python3 demos/overtake_styles.py [nash|stackelberg]
"""

import sys

from lanegame.scenario import load_scenario
from lanegame.simulate import batch, comparison_csv


def main():
    strategy = sys.argv[1] if len(sys.argv) > 1 else "nash"
    cfg = load_scenario("scenario_b")
    runs = batch(cfg, strategies=(strategy,))
    print(comparison_csv([m for _, m in runs]))
    for _, m in runs:
        if m.sigma_commit == -1:
            print(f"{m.style}: overtakes at t={m.t_commit:.2f} s, "
                  f"finishes in lane {m.final_lane}")
        else:
            print(f"{m.style}: never commits, follows the slow car")


if __name__ == "__main__":
    main()
