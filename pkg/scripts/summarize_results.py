"""
Summarize experiment CSVs written by capg-lab.

    python scripts/summarize_results.py results/bandit.csv [results/verify.csv ...]

Curve files print the per-seed final CAPG - PG gap; verification reports
print every failed check.
"""

import logging
import os
import sys

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.experiments import CurvePoint, summarize_curves
from src.utils import read_rows

logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger("summarize_results")


def summarize_curve_file(frame):
    points = [CurvePoint(**record) for record in frame.to_dict("records")]
    for summary in summarize_curves(points):
        logger.info(
            f"seed={summary.seed} {summary.estimator}: final={summary.final_smoothed_reward:.4f} "
            f"mean={summary.mean_smoothed_reward:.4f} capg-pg={summary.capg_minus_pg:+.4f}"
        )


def summarize_verify_file(frame):
    failed = frame[frame["passed"] != "pass"]
    logger.info(f"{len(frame) - len(failed)} of {len(frame)} check(s) passed")
    for _, row in failed.iterrows():
        logger.info(f"FAILED {row['check']}: statistic={row['statistic']!r} threshold={row['threshold']!r}")


def main(paths):
    if not paths:
        logger.error("usage: summarize_results.py <csv> [<csv> ...]")
        return 2

    for path in paths:
        logger.info(f"\n--- {path} ---")
        try:
            frame = read_rows(path)
        except (OSError, ValueError) as e:
            logger.error(f"FAILED to read: {e}")
            continue

        if "smoothed_reward" in frame.columns:
            summarize_curve_file(frame)
        elif "passed" in frame.columns:
            summarize_verify_file(frame)
        else:
            logger.info(f"{len(frame)} row(s), columns: {', '.join(frame.columns)}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
