#!/usr/bin/env python3
"""Run the full adversarial matrix and write the detection table as CSV."""

from fractions import Fraction
from pathlib import Path

from amakey.harness import matrix_to_csv, run_honest_control, scenario_matrix
from amakey.model import TrustPolicy

OUT = Path(__file__).parent / "harness_matrix.csv"

POLICIES = [
    TrustPolicy(2, Fraction(1, 2)),
    TrustPolicy(0, Fraction(9, 10)),
    TrustPolicy(5, Fraction(1, 4)),
]


def main():
    reports = scenario_matrix(POLICIES, seeds=(0, 1, 2))
    controls = [run_honest_control(policy, seed) for policy in POLICIES for seed in (0, 1, 2)]

    detected = sum(1 for r in reports if r.detected)
    false_positives = sum(1 for c in controls if c.detected)
    print(f"adversarial runs: {len(reports)}, detected: {detected}")
    print(f"honest controls:  {len(controls)}, false positives: {false_positives}")
    for report in reports:
        flag = "ok " if report.detected else "MISS"
        print(f"  [{flag}] {report.scenario_id:28s} alpha={report.policy_alpha} beta={report.policy_beta}")

    OUT.write_text(matrix_to_csv(reports), encoding="utf-8")
    print(f"\nmatrix CSV: {OUT}")


if __name__ == "__main__":
    main()
