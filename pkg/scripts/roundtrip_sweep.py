"""Synthesize random targets and report worst fidelity and timing per (protocol, N)."""
import argparse
import time

import numpy as np

from cyclepulse import SynthesisConfig, run_schedule, synthesize
from cyclepulse.synthesis import fidelity
from cyclepulse.testkit import random_spectrum, random_target


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--max-n", type=int, default=8)
    parser.add_argument("--targets", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'protocol':>10} {'N':>3} {'worst 1-F':>11} {'max total T':>12} {'ms/target':>10}")
    for protocol in ("system-i", "system-ii"):
        for n in range(2, args.max_n + 1):
            spectrum = random_spectrum(n, protocol, rng)
            config = SynthesisConfig(rabi=float(rng.uniform(0.2, 2.0)))
            worst, longest = 0.0, 0.0
            start = time.perf_counter()
            for k in range(args.targets):
                target = random_target(n, 10_000 * n + k)
                sched = synthesize(spectrum, protocol, target, config)
                final, _ = run_schedule(spectrum, sched)
                worst = max(worst, 1 - fidelity(final, target))
                longest = max(longest, float(sum(sched.totals())))
            ms = 1e3 * (time.perf_counter() - start) / args.targets
            print(f"{protocol:>10} {n:>3} {worst:11.2e} {longest:12.2f} {ms:10.2f}")


if __name__ == "__main__":
    main()
