#!/usr/bin/env python3
"""Drive the |++> to Bell-state stabilizer sweep and report what the checks allow.

The linear interpolant between the {XI, IX} and {ZZ, XX} groups leaves the
frustration-free regime mid-path, so the measured variant refuses it by
default. The idealized projection sweep, which needs only gapped steps, still
prepares the Bell state. Both facts are demonstrated here.
"""

import argparse

from zenopath import (
    ProtocolConfig,
    RepetitionPolicy,
    required_steps,
    run_ideal,
    run_measured,
    stabilizer_path,
)
from zenopath.errors import FrustrationFreeViolation


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--epsilon", type=float, default=0.05)
    parser.add_argument("--delta", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    path = stabilizer_path(["XI", "IX"], ["ZZ", "XX"], 2)
    report = path.ff_report
    print(
        f"frustration-free along path: {report.passed} "
        f"(max ground-energy residual {report.max_residual:.4f} at s={report.worst_s:.2f})"
    )

    n_steps = required_steps(path, args.epsilon)
    print(f"certified step count for eps={args.epsilon}: N={n_steps}")

    ideal = run_ideal(
        ProtocolConfig(path=path, epsilon=args.epsilon, N=n_steps, seed=args.seed)
    )
    print(
        f"ideal sweep: success={ideal.overall_success_exact:.6f} "
        f"bound={ideal.success_lower_bound:.6f} fidelity={ideal.final_state_fidelity:.6f}"
    )

    config = ProtocolConfig(
        path=path, epsilon=args.epsilon, delta=args.delta, N=n_steps, seed=args.seed
    )
    try:
        run_measured(config)
        print("measured sweep ran (path was frustration-free)")
    except FrustrationFreeViolation as exc:
        print(f"measured sweep refused: {exc}")
        flagged = run_measured(
            ProtocolConfig(
                path=path,
                epsilon=args.epsilon,
                delta=args.delta,
                N=n_steps,
                repetition=RepetitionPolicy.fixed(3),
                enforce_frustration_free=False,
                seed=args.seed,
            )
        )
        print(
            f"diagnostic run (flagged, fixed k=3): success={flagged.overall_success_exact:.6f} "
            f"fidelity={flagged.final_state_fidelity:.6f} "
            f"frustration_free={flagged.frustration_free}"
        )


if __name__ == "__main__":
    main()
