#!/usr/bin/env python3
"""Sweep the failure budget on the rotating-projector family.

For each epsilon: certify the step count, run the idealized sweep, and run the
measured sweep with delta = epsilon / 2. Prints a table and optionally writes
it as CSV.
"""

import argparse
import math
from pathlib import Path

from zenopath import (
    ProtocolConfig,
    required_steps,
    rotating_projector_path,
    run_ideal,
    run_measured,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--total-angle", type=float, default=math.pi / 2)
    parser.add_argument("--epsilons", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--csv", type=Path, default=None, help="optional output CSV path")
    args = parser.parse_args()

    path = rotating_projector_path(args.total_angle)
    rows = []
    print(f"{'eps':>7} {'N':>5} {'ideal':>10} {'bound':>10} {'measured':>10} {'max k':>6}")
    for eps in args.epsilons:
        n_steps = required_steps(path, eps)
        ideal = run_ideal(ProtocolConfig(path=path, epsilon=eps, N=n_steps, seed=args.seed))
        measured = run_measured(
            ProtocolConfig(path=path, epsilon=eps, delta=eps / 2, N=n_steps, seed=args.seed)
        )
        max_k = max(r.k_used for r in measured.per_step)
        rows.append(
            (
                eps,
                n_steps,
                ideal.overall_success_exact,
                ideal.success_lower_bound,
                measured.overall_success_exact,
                max_k,
            )
        )
        print(
            f"{eps:>7.4f} {n_steps:>5d} {ideal.overall_success_exact:>10.6f} "
            f"{ideal.success_lower_bound:>10.6f} {measured.overall_success_exact:>10.6f} "
            f"{max_k:>6d}"
        )

    if args.csv:
        header = "epsilon,N,ideal_success,bound,measured_success,max_k\n"
        body = "".join(
            f"{e!r},{n},{i!r},{b!r},{m!r},{k}\n" for e, n, i, b, m, k in rows
        )
        args.csv.write_text(header + body)
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
