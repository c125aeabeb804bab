"""Capacity decay and endurance under a time-varying load.

A static hold is compared with an intermittent duty cycle of the same peak
load and with an RK4 run over a sampled ramp.

    python3 scripts/dynamic_profile_demo.py --mvc 200 --k 1.0
"""
import argparse

import numpy as np

from metfatigue.core import (
    FatigueParams,
    LoadProfile,
    endurance_time,
    met_extended,
    simulate_capacity,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mvc", type=float, default=200.0)
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--fraction", type=float, default=0.5, help="peak load / MVC")
    ap.add_argument("--duration", type=float, default=10.0, help="minutes")
    args = ap.parse_args(argv)
    params = FatigueParams(args.mvc, args.k)
    peak = args.fraction * args.mvc

    static = LoadProfile.constant(peak, args.duration)
    print(f"static hold at {args.fraction:.0%} MVC: MET {met_extended(args.fraction, args.k):.4f} min, "
          f"endurance {endurance_time(static, params):.4f} min")

    segments = []
    for i in range(int(args.duration)):
        segments += [(float(i), peak), (i + 0.5, 0.0)]
    duty = LoadProfile.piecewise(segments, args.duration)
    t_duty = endurance_time(duty, params)
    print("50% duty cycle: endurance",
          "not reached" if t_duty is None else f"{t_duty:.4f} min")

    times = np.linspace(0.0, args.duration, 11)
    ramp = LoadProfile.sampled(times, peak * times / args.duration)
    traj = simulate_capacity(ramp, params, step=0.01)
    print(f"linear ramp to peak: endurance {endurance_time(ramp, params):.4f} min")
    print("linear ramp to peak, capacity every minute:")
    for t, c in traj.as_rows()[::100]:
        print(f"  t={t:6.2f}  F_cem={c:9.3f}")


if __name__ == "__main__":
    main()
