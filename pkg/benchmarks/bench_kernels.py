"""Compare the compiled and pure-numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from coexsim import _backend
from coexsim.harness import projected_waveform
from coexsim.detection import mc_geometry
from coexsim.scenario import preset


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    s = preset("fig1a")
    _, Xt, R = projected_waveform(s, "eigen")
    grid = s.grid()
    small = mc_geometry([0.0], Xt[:8, :32], type(s.radar)(8))
    sweep = mc_geometry(np.arange(-90.0, 91.0, 1.0), Xt, s.radar)

    cases = {
        "steering_forms  M=128, 1801 angles": lambda k: k.steering_forms(R, 0.5, grid, 0.0),
        "glrt_noise      M=8 L=32, 1 angle, 20000 trials": lambda k: k.glrt_noise(1, 0, 20_000, small.Ah, small.C),
        "glrt_noise      M=128 L=128, 181 angles, 20 trials": lambda k: k.glrt_noise(1, 0, 20, sweep.Ah, sweep.C),
        "noise_block     M=128 L=128, 200 trials":
            lambda k: [k.noise_block(1, t, 128, 128) for t in range(200)],
    }
    names = _backend.available()
    print(f"{'kernel':52s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases.items():
        row = [best_of(lambda: fn(_backend.load(n)), args.repeat) for n in names]
        line = f"{label:52s}" + "".join(f"{t * 1e3:10.1f}ms" for t in row)
        if len(row) > 1:
            line += f"{row[1] / row[0]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
