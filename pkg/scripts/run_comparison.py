#!/usr/bin/env python3
"""Run the four-way code/decoder comparison and write results to disk.

Produces one JSON + CSV pair per (code, decoder) combination plus a merged
long-format CSV ready for plotting, all under --out-dir.

Typical full run (budget 1e6, 100 block errors per point):

    python3 scripts/run_comparison.py --out-dir results --workers 4

A quick smoke run:

    python3 scripts/run_comparison.py --out-dir /tmp/smoke \
        --ebn0 7:0.5:8 --min-block-errors 10
"""

import argparse
import itertools
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from aesfec.campaign import CampaignConfig, run_campaign
from aesfec.cli import parse_grid


def build_args():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, required=True)
    ap.add_argument("--ebn0", type=parse_grid, default=parse_grid("6:0.5:8"))
    ap.add_argument("--max-queries", type=int, default=10**6)
    ap.add_argument("--min-block-errors", type=int, default=100)
    ap.add_argument("--max-blocks", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--rlc-seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    return ap.parse_args()


def main():
    args = build_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    results = {}
    t0 = time.perf_counter()
    for code, decoder in itertools.product(("aes", "rlc"), ("grand", "orbgrand")):
        cfg = CampaignConfig(
            code_kind=code,
            decoder_kind=decoder,
            ebn0_grid_db=args.ebn0,
            max_queries=args.max_queries,
            min_block_errors=args.min_block_errors,
            max_blocks=args.max_blocks,
            master_seed=args.seed,
            rlc_seed=args.rlc_seed,
        )
        print(f"== {code}/{decoder} ==", flush=True)
        res = run_campaign(cfg, workers=args.workers, progress=True)
        stem = args.out_dir / f"{code}-{decoder}"
        res.save(stem.with_suffix(".json"))
        stem.with_suffix(".csv").write_text(res.to_csv())
        results[code, decoder] = res
        print(f"   saved {stem}.json ({res.wall_time_s:.1f} s)", flush=True)

    merged = args.out_dir / "comparison.csv"
    lines = ["code,decoder,ebn0_db,bler,bler_ci_low,bler_ci_high,ber,blocks"]
    for (code, decoder), res in results.items():
        for p in res.points:
            lines.append(
                f"{code},{decoder},{p.ebn0_db},{p.bler},{p.bler_ci_low},"
                f"{p.bler_ci_high},{p.ber},{p.blocks}"
            )
    merged.write_text("\n".join(lines) + "\n")
    print(f"merged table: {merged}")
    print(f"total {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
