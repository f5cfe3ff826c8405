"""Evaluator: corpus-wide Np/Na summaries from an eval-all results file.

Usage:
    python -m benchmarks.evaluator benchmarks/data/results/eval_XXXXXXXX_XXXXXX.json
    python -m benchmarks.evaluator RESULTS.json --csv totals.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from dotenv import load_dotenv

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from benchmarks.runner import CorpusRun
from unrolling.evaluate import normalized


def load_run(results_file: str | Path) -> CorpusRun:
    path = Path(results_file)
    if not path.exists():
        raise FileNotFoundError(f"Results file not found: {path}")
    return CorpusRun.model_validate_json(path.read_text(encoding="utf-8"))


def corpus_totals(run: CorpusRun) -> dict[int, tuple[float, int]]:
    """Depth -> (sum of Np, sum of Na) over the routines evaluated at that depth."""
    totals: dict[int, tuple[float, int]] = {}
    for rep in run.reports:
        for depth in rep.depths:
            np_sum, na_sum = totals.get(depth, (0.0, 0))
            totals[depth] = (np_sum + rep.np.get(depth, 0.0), na_sum + rep.na.get(depth, 0))
    return dict(sorted(totals.items()))


def na_increases(run: CorpusRun, low: int = 1, high: int = 2) -> bool:
    totals = corpus_totals(run)
    return low in totals and high in totals and totals[high][1] > totals[low][1]


def print_summary(run: CorpusRun) -> None:
    """Print per-routine Na by depth, corpus totals and the generation timing table."""
    if not run.reports:
        return
    depths = sorted({d for rep in run.reports for d in rep.depths})
    header = "".join(f"{'d' + str(d):>7}" for d in depths)

    print("\n=== Na (distinct faults over all runs) ===")
    print(f"{'Routine':<22}{header}")
    print("-" * (22 + 7 * len(depths)))
    for rep in run.reports:
        print(f"{rep.routine:<22}" + "".join(f"{rep.na.get(d, 0):>7}" for d in depths))

    totals = corpus_totals(run)
    p_np = normalized({d: np for d, (np, _) in totals.items()})
    p_na = normalized({d: float(na) for d, (_, na) in totals.items()})
    print("\n--- Corpus totals ---")
    print(f"{'depth':>5}  {'Np':>8}  {'Na':>5}  {'P(Np)%':>7}  {'P(Na)%':>7}")
    for d, (np, na) in totals.items():
        print(f"{d:>5}  {np:>8.2f}  {na:>5}  {p_np[d]:>7.1f}  {p_na[d]:>7.1f}")
    if 1 in totals and 2 in totals:
        print(f"depth 1 -> 2: Np {p_np[2] - p_np[1]:+.1f} pts, Na {p_na[2] - p_na[1]:+.1f} pts")

    print("\n--- Generation time (s, summed over runs) ---")
    print(f"{'Routine':<22}{header}")
    for rep in run.reports:
        print(f"{rep.routine:<22}" + "".join(f"{rep.generation_seconds.get(d, 0.0):>7.2f}" for d in depths))


def write_totals_csv(run: CorpusRun, path: str | Path) -> Path:
    totals = corpus_totals(run)
    p_np = normalized({d: np for d, (np, _) in totals.items()})
    p_na = normalized({d: float(na) for d, (_, na) in totals.items()})
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["depth", "np", "na", "p_np", "p_na"])
        for d, (np, na) in totals.items():
            writer.writerow([d, f"{np:.2f}", na, f"{p_np[d]:.2f}", f"{p_na[d]:.2f}"])
    return path


def main():
    load_dotenv()

    parser = argparse.ArgumentParser(description="Summarize an eval-all results file")
    parser.add_argument("results_file", help="Path to an eval results JSON file")
    parser.add_argument("--csv", help="Also write the corpus totals as CSV")
    args = parser.parse_args()

    run = load_run(args.results_file)
    print(f"Run {run.run_id} ({run.timestamp}), seed {run.seed}, {len(run.reports)} routine(s)")
    print_summary(run)
    if args.csv:
        print(f"\nTotals written to {write_totals_csv(run, args.csv)}")


if __name__ == "__main__":
    main()
