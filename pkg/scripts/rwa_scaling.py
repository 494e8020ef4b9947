"""Exact-vs-RWA infidelity as the drive gets weaker, on a three-level ladder.

Usage: python3 scripts/rwa_scaling.py [--seeds 12] [--ratios 1e-1 1e-2 1e-3]
"""
import argparse

import numpy as np

from cyclepulse import SynthesisConfig, synthesize, validate_spectrum
from cyclepulse.spectrum import transition_table
from cyclepulse.testkit import random_target
from cyclepulse.verifier import IntegratorConfig, rwa_report


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--levels", type=float, nargs="+", default=[-1.0, 0.0, 1.5])
    parser.add_argument("--ratios", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3])
    parser.add_argument("--seeds", type=int, default=12)
    args = parser.parse_args()

    spectrum = validate_spectrum(args.levels)
    nu_min = min(transition_table(spectrum, "system-ii").frequencies)
    print("seed  " + "  ".join(f"{r:>10.0e}" for r in args.ratios) + "   decade ratios")
    for seed in range(args.seeds):
        target = random_target(spectrum.n, seed)
        infid = []
        for ratio in args.ratios:
            config = SynthesisConfig(rabi=2 * spectrum.hbar * ratio * nu_min)
            sched = synthesize(spectrum, "system-ii", target, config)
            infid.append(1 - rwa_report(spectrum, sched, target, IntegratorConfig())
                         .fidelity_full_vs_analytic)
        decades = np.array(infid[:-1]) / np.maximum(infid[1:], 1e-300)
        print(f"{seed:>4d}  " + "  ".join(f"{x:10.3e}" for x in infid)
              + "   " + " ".join(f"{d:7.1f}" for d in decades))


if __name__ == "__main__":
    main()
