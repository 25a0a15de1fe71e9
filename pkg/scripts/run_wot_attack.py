#!/usr/bin/env python3
"""Certification-graph attack demo: why low path distance is not trust.

Builds the colluder scenario, prints the per-querier comparison of genuine
vs impostor keys, and writes the full CSV report next to this script.
"""

from pathlib import Path

from amakey.wotsim import attack_report, build_eve_scenario, report_to_csv

OUT = Path(__file__).parent / "wot_attack_report.csv"


def main():
    graph = build_eve_scenario()
    report = attack_report(graph)

    print("querier      owner  genuine_dist  impostor_dist  disjoint_paths  closer")
    for row in report.rows:
        genuine = "-" if row.genuine_distance is None else row.genuine_distance
        print(
            f"{row.querier:12s} {row.owner:6s} {str(genuine):>12s}  {row.impostor_distance:>13d}"
            f"  {row.disjoint_paths_to_impostor:>14d}  {row.closer}"
        )

    print("\nmean shortest distance per key (unreachable nodes excluded):")
    for entry in report.msd.entries.values():
        kind = "impostor" if entry.impostor else "genuine "
        print(f"  {entry.node_id:16s} {kind}  msd={entry.msd}  reaches {entry.reachable}")

    OUT.write_text(report_to_csv(report), encoding="utf-8")
    print(f"\nfull report: {OUT}")


if __name__ == "__main__":
    main()
