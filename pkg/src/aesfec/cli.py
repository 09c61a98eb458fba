"""Command line front end: run campaigns, self-check, merge plot data."""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .aes_core import Aes128, DEFAULT_KEY_HEX, decrypt_block, encrypt_block, expand_key, key_from_hex
from .bitblock import BitVec
from .campaign import CampaignConfig, CampaignResult, run_campaign
from .channel import sigma_from_ebn0
from .codes import CodeParams, RlcOracle, rlc_generate
from .grand import grand_decode, hamming_order_patterns, logistic_order_patterns

__all__ = ["main", "parse_grid"]


def parse_grid(text):
    """Eb/N0 grid: 'start:step:stop' (inclusive) or a comma list or one value."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError("expected start:step:stop")
            start, step, stop = (float(p) for p in parts)
            if step <= 0:
                raise ValueError("step must be positive")
            if stop < start:
                raise ValueError("stop must be >= start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = tuple(round(start + i * step, 12) for i in range(count))
        else:
            values = tuple(float(p) for p in text.split(","))
        if not values:
            raise ValueError("grid is empty")
        if any(not math.isfinite(v) for v in values):
            raise ValueError("grid values must be finite")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("grid values must be strictly increasing")
        return values
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _aes_key(text):
    try:
        key_from_hex(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    return text


def build_parser():
    parser = argparse.ArgumentParser(
        prog="aesfec",
        description="AES-as-a-code and random-linear-code baselines decoded by noise guessing over BPSK/AWGN.",
    )
    parser.add_argument("--version", action="version", version=f"aesfec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a BER/BLER campaign and write JSON + CSV results")
    run.add_argument("--code", choices=("aes", "rlc"), default="aes")
    run.add_argument("--decoder", choices=("grand", "orbgrand"), default="grand")
    run.add_argument("--n", type=_positive_int, default=128, help="block length (default 128)")
    run.add_argument("--k", type=_positive_int, default=116, help="message bits per block (default 116)")
    run.add_argument(
        "--ebn0",
        type=parse_grid,
        default=parse_grid("6:0.5:8"),
        help="Eb/N0 grid in dB: start:step:stop or comma list (default 6:0.5:8)",
    )
    run.add_argument("--max-queries", type=_positive_int, default=10**6, help="abandon a block after this many oracle queries")
    run.add_argument("--min-block-errors", type=_positive_int, default=100, help="stop a point after this many block errors")
    run.add_argument("--max-blocks", type=_positive_int, default=10**6, help="hard cap on blocks per point")
    run.add_argument("--seed", type=_nonneg_int, default=1, help="master RNG seed")
    run.add_argument("--aes-key", type=_aes_key, default=DEFAULT_KEY_HEX, help="AES-128 key, 32 hex digits")
    run.add_argument("--rlc-seed", type=_nonneg_int, default=1, help="seed of the random linear code draw")
    run.add_argument("--workers", type=_positive_int, default=1, help="worker processes (results are worker-count independent)")
    run.add_argument("--out", type=Path, default=None, help="output JSON path (default campaign_<code>_<decoder>.json)")
    run.add_argument("--quiet", action="store_true", help="suppress per-point progress lines")
    run.set_defaults(func=_cmd_run)

    self_p = sub.add_parser("selftest", help="fast built-in checks (known answers, orders, ML equivalence, channel calibration)")
    self_p.set_defaults(func=_cmd_selftest)

    plot = sub.add_parser("plot-data", help="merge campaign JSON files into one long-format CSV")
    plot.add_argument("inputs", nargs="+", type=Path, help="campaign result JSON files")
    plot.add_argument("--out", type=Path, required=True, help="merged CSV path")
    plot.set_defaults(func=_cmd_plot_data)
    return parser


def _cmd_run(args):
    try:
        config = CampaignConfig(
            code_kind=args.code,
            decoder_kind=args.decoder,
            n=args.n,
            k=args.k,
            ebn0_grid_db=args.ebn0,
            max_queries=args.max_queries,
            min_block_errors=args.min_block_errors,
            max_blocks=args.max_blocks,
            master_seed=args.seed,
            aes_key_hex=args.aes_key,
            rlc_seed=args.rlc_seed,
        )
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(f"running {config.code_kind}/{config.decoder_kind} n={config.n} k={config.k} "
              f"grid={list(config.ebn0_grid_db)} seed={config.master_seed}")
    result = run_campaign(config, workers=args.workers, progress=not args.quiet)
    out = args.out or Path(f"campaign_{config.code_kind}_{config.decoder_kind}.json")
    result.save(out)
    csv_path = out.with_suffix(".csv")
    csv_path.write_text(result.to_csv())
    if not args.quiet:
        print(f"wrote {out} and {csv_path} ({result.wall_time_s:.1f} s)")
    _print_table(result)
    return 0


def _print_table(result):
    print(f"{'Eb/N0':>6} {'blocks':>9} {'errs':>5} {'BLER':>10} {'BER':>10} {'mean q':>10} {'p99 q':>10}")
    for p in result.points:
        print(
            f"{p.ebn0_db:6.2f} {p.blocks:9d} {p.block_errors:5d} "
            f"{p.bler:10.3e} {p.ber:10.3e} {p.mean_queries:10.1f} {p.p99_queries:10.1f}"
        )


def _cmd_plot_data(args):
    header = ["code", "decoder", "n", "k", "master_seed"] + list(CampaignResult.CSV_FIELDS)
    lines = []
    comments = []
    for path in args.inputs:
        res = CampaignResult.load(path)
        cfg = res.config
        comments.append(f"# source={path} code={cfg.code_kind} decoder={cfg.decoder_kind} "
                        f"n={cfg.n} k={cfg.k} seed={cfg.master_seed}")
        for p in res.points:
            d = p.to_dict()
            row = [cfg.code_kind, cfg.decoder_kind, cfg.n, cfg.k, cfg.master_seed]
            row += [d[f] for f in CampaignResult.CSV_FIELDS]
            lines.append(",".join("" if v is None else str(v) for v in row))
    out_text = "\n".join(comments + [",".join(header)] + lines) + "\n"
    args.out.write_text(out_text)
    print(f"wrote {args.out} ({len(lines)} rows from {len(args.inputs)} campaigns)")
    return 0


# selftest checks: each returns (ok, detail)


def _check_aes():
    key = key_from_hex(DEFAULT_KEY_HEX)
    ks = expand_key(key)
    pt = BitVec.from_hex("00112233445566778899aabbccddeeff", 128)
    ct = encrypt_block(ks, pt)
    ok = ct.to_hex() == "69c4e0d86a7b0430d8cdb78070b4c55a" and decrypt_block(ks, ct) == pt
    ks2 = expand_key(bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c"))
    ok &= ks2.round_keys[10].tobytes().hex() == "d014f9a8c9ee2589e13f0cc8b6630ca6"
    cipher = Aes128(key)  # construction cross-checks openssl against the reference
    rng = np.random.default_rng(7)
    blocks = rng.integers(0, 256, (1 << 12, 16), dtype=np.uint8)
    ok &= bool(np.array_equal(cipher.decrypt_batch(cipher.encrypt_batch(blocks)), blocks))
    t0 = time.perf_counter()
    reps = 8
    for _ in range(reps):
        cipher.decrypt_batch(blocks)
    rate = reps * len(blocks) / (time.perf_counter() - t0)
    ok &= rate >= 1e5
    return ok, f"decrypt throughput {rate / 1e6:.1f} M blocks/s"


def _check_patterns():
    n = 12
    got = list(hamming_order_patterns(n))
    want = sorted(range(1 << n), key=lambda v: (v.bit_count(), v))
    ok = got == want
    got_l = list(logistic_order_patterns(n))
    subsets = [()]
    for r in range(1, n + 1):
        subsets = subsets + [(*s, r) for s in subsets]
    want_l = sorted(subsets, key=lambda s: (sum(s), len(s), s))
    ok &= got_l == want_l
    return ok, f"both orders complete and exact for n={n} ({len(got)} patterns)"


def _check_ml():
    params = CodeParams(n=8, k=4)
    code = rlc_generate(params, seed=3)
    oracle = RlcOracle(code)
    msgs = np.array([[(m >> (3 - j)) & 1 for j in range(4)] for m in range(16)], dtype=np.uint8)
    book = {}
    for m in range(16):
        cw = int("".join(map(str, code.encode_bits(msgs[m : m + 1])[0])), 2)
        book[cw] = m
    ok = True
    for y in range(256):
        word = BitVec(y, 8)
        out = grand_decode(word, oracle, max_queries=1 << 8)
        # reference: first codeword reached walking patterns in pinned order
        expect = None
        for pat in hamming_order_patterns(8):
            flipped = y ^ int(f"{pat:08b}"[::-1], 2)  # pattern bit i flips position i
            if flipped in book:
                expect = book[flipped]
                break
        ok &= out.decoded and out.message.to_int() == expect
    return ok, "grand matches brute-force nearest codeword on an exhaustive [8,4] code"


def _check_channel():
    rng = np.random.default_rng(11)
    rate = 116 / 128
    ok = True
    worst = 0.0
    for ebn0 in (4.0, 6.0, 8.0):
        sigma = sigma_from_ebn0(ebn0, rate)
        nbits = 1 << 20
        flips = np.count_nonzero(1.0 + sigma * rng.standard_normal(nbits) < 0)
        q = 0.5 * math.erfc(1.0 / (sigma * math.sqrt(2.0)))
        tol = 5.0 * math.sqrt(q * (1.0 - q) / nbits)
        worst = max(worst, abs(flips / nbits - q) / tol)
        ok &= abs(flips / nbits - q) <= tol
    return ok, f"hard-decision flip rate matches Q(1/sigma) (worst {worst:.2f} of tolerance)"


def _cmd_selftest(args):
    checks = (
        ("aes known answers + throughput", _check_aes),
        ("pattern order completeness", _check_patterns),
        ("ml equivalence on [8,4]", _check_ml),
        ("channel calibration", _check_channel),
    )
    failed = 0
    t0 = time.perf_counter()
    for name, fn in checks:
        t = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as e:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(e).__name__}: {e}"
        dt = time.perf_counter() - t
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail} ({dt:.2f} s)")
        failed += 0 if ok else 1
    print(f"selftest {'passed' if not failed else 'FAILED'} in {time.perf_counter() - t0:.2f} s")
    return 1 if failed else 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
