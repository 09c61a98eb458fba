"""Monte Carlo BER/BLER campaigns over a BPSK AWGN grid.

Every trial is deterministically addressable: trial t of grid point p lives
in batch b = t // TRIAL_BATCH, and batch b draws its messages from
default_rng((master_seed, p, b, 0)) and its channel noise from
default_rng((master_seed, p, b, 1)). Results are therefore bit-identical
for any worker count, and campaigns that differ only in code or decoder
see identical messages and noise (paired comparisons).

A point stops after the trial that produces the min_block_errors-th block
error, or at max_blocks. The stopping trial is found on the concatenated
per-trial record, so workers racing ahead never change which trials are
counted. Abandoned blocks (query budget exhausted) count as block errors
with ceil(k/2) message bit errors.
"""

from __future__ import annotations

import json
import math
import multiprocessing
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .aes_core import DEFAULT_KEY_HEX, Aes128, key_from_hex
from .channel import ChannelPoint, llr_from_samples, sigma_from_ebn0
from .codes import AesPadOracle, CodeParams, RlcOracle, message_bit_mask, rlc_generate
from .grand import DEFAULT_MAX_QUERIES, _grand_engine, _orb_engine

__all__ = [
    "TRIAL_BATCH",
    "CampaignConfig",
    "BlockRecord",
    "PointResult",
    "CampaignResult",
    "wilson_interval",
    "run_block",
    "run_point",
    "run_campaign",
]

# Trials per RNG batch. Fixed: it is part of the trial-addressing scheme,
# so changing it changes every campaign's sample path.
TRIAL_BATCH = 256

# two-sided 95% normal quantile
Z95 = 1.9599639845400545

CODE_KINDS = ("aes", "rlc")
DECODER_KINDS = ("grand", "orbgrand")


@dataclass(frozen=True)
class CampaignConfig:
    """Everything a campaign depends on; two equal configs replay identically."""

    code_kind: str = "aes"
    decoder_kind: str = "grand"
    n: int = 128
    k: int = 116
    ebn0_grid_db: tuple = (6.0, 6.5, 7.0, 7.5, 8.0)
    max_queries: int = DEFAULT_MAX_QUERIES
    min_block_errors: int = 100
    max_blocks: int = 10**6
    master_seed: int = 1
    aes_key_hex: str = DEFAULT_KEY_HEX
    rlc_seed: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ebn0_grid_db", tuple(float(x) for x in self.ebn0_grid_db))
        if self.code_kind not in CODE_KINDS:
            raise ValueError(f"code_kind must be one of {CODE_KINDS}, got {self.code_kind!r}")
        if self.decoder_kind not in DECODER_KINDS:
            raise ValueError(f"decoder_kind must be one of {DECODER_KINDS}, got {self.decoder_kind!r}")
        CodeParams(self.n, self.k)
        if self.code_kind == "aes":
            if self.n != 128:
                raise ValueError(f"the aes code needs n = 128, got n = {self.n}")
            key_from_hex(self.aes_key_hex)
        if not self.ebn0_grid_db:
            raise ValueError("ebn0_grid_db must not be empty")
        if any(not math.isfinite(x) for x in self.ebn0_grid_db):
            raise ValueError(f"ebn0_grid_db must be finite, got {self.ebn0_grid_db}")
        for name in ("max_queries", "min_block_errors", "max_blocks"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.master_seed < 0:
            raise ValueError(f"master_seed must be >= 0, got {self.master_seed}")

    @property
    def params(self):
        return CodeParams(self.n, self.k)

    def to_dict(self):
        d = asdict(self)
        d["ebn0_grid_db"] = list(self.ebn0_grid_db)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class BlockRecord:
    """Outcome of one simulated block."""

    point_index: int
    trial_index: int
    error: bool
    bit_errors: int
    queries: int
    abandoned: bool


@dataclass
class PointResult:
    """Aggregated statistics for one Eb/N0 grid point."""

    ebn0_db: float
    sigma: float
    noise_entropy_bits: float
    blocks: int
    block_errors: int
    bit_errors: int
    abandoned_blocks: int
    bler: float
    bler_ci_low: float
    bler_ci_high: float
    ber: float
    ber_ci_low: float
    ber_ci_high: float
    bler_rule_of_three_upper: float | None
    mean_queries: float
    p99_queries: float

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def wilson_interval(successes, trials, z=Z95):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    zz = z * z
    denom = 1.0 + zz / trials
    center = (p + zz / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + zz / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


class _PointContext:
    """Per-(config, point) working state: cipher or code, oracle, masks."""

    def __init__(self, config, point_index):
        self.config = config
        self.point_index = point_index
        self.params = config.params
        self.sigma = sigma_from_ebn0(config.ebn0_grid_db[point_index], self.params.rate)
        if config.code_kind == "aes":
            self.cipher = Aes128(config.aes_key_hex)
            self.oracle = AesPadOracle(self.params, self.cipher)
            self.code = None
        else:
            self.code = rlc_generate(self.params, config.rlc_seed)
            self.oracle = RlcOracle(self.code)
        self.msg_mask = message_bit_mask(self.params)
        self.abandon_bit_errors = (self.params.k + 1) // 2

    def encode_bits(self, msgs):
        if self.code is not None:
            return self.code.encode_bits(msgs)
        padded = np.zeros((msgs.shape[0], self.params.n), dtype=np.uint8)
        padded[:, : self.params.k] = msgs
        ct = self.cipher.encrypt_batch(np.packbits(padded, axis=1))
        return np.unpackbits(ct, axis=1)

    def reference_blocks(self, msgs, codeword_bits):
        # What a correct decode hands back: the padded plaintext for the aes
        # code, the codeword itself for the rlc.
        if self.code is not None:
            return np.packbits(codeword_bits, axis=1)
        padded = np.zeros((msgs.shape[0], self.params.n), dtype=np.uint8)
        padded[:, : self.params.k] = msgs
        return np.packbits(padded, axis=1)

    def _message_bit_errors(self, decoded, reference):
        return int(np.bitwise_count((decoded ^ reference) & self.msg_mask).sum())

    def run_batch(self, batch_index, size):
        cfg = self.config
        mrng = np.random.default_rng((cfg.master_seed, self.point_index, batch_index, 0))
        msgs = mrng.integers(0, 2, size=(size, self.params.k), dtype=np.uint8)
        nrng = np.random.default_rng((cfg.master_seed, self.point_index, batch_index, 1))
        noise = nrng.standard_normal((size, self.params.n))

        cw_bits = self.encode_bits(msgs)
        y = (1.0 - 2.0 * cw_bits) + self.sigma * noise
        words = np.packbits((y < 0).astype(np.uint8), axis=1)
        ref = self.reference_blocks(msgs, cw_bits)

        error = np.zeros(size, dtype=bool)
        bit_errors = np.zeros(size, dtype=np.int64)
        queries = np.ones(size, dtype=np.int64)
        abandoned = np.zeros(size, dtype=bool)

        # First query (the empty pattern) for the whole batch at once; both
        # decoders start there, so clean blocks cost exactly one query.
        ok, blocks = self.oracle.decode_batch(words)
        if ok.any():
            diff = (blocks[ok] ^ ref[ok]) & self.msg_mask
            be = np.bitwise_count(diff).sum(axis=1).astype(np.int64)
            bit_errors[ok] = be
            error[ok] = be > 0

        rest = np.flatnonzero(~ok)
        if rest.size:
            if cfg.decoder_kind == "orbgrand":
                llrs = llr_from_samples(y[rest], self.sigma)
                perms = np.argsort(np.abs(llrs), axis=1, kind="stable")
            for j, i in enumerate(rest):
                if cfg.decoder_kind == "grand":
                    block, q, _ = _grand_engine(
                        words[i], self.oracle, cfg.max_queries, start_weight=1, queries_done=1
                    )
                else:
                    block, q, _ = _orb_engine(
                        words[i], perms[j], self.oracle, cfg.max_queries, start_index=1, queries_done=1
                    )
                queries[i] = q
                if block is None:
                    abandoned[i] = True
                    error[i] = True
                    bit_errors[i] = self.abandon_bit_errors
                else:
                    be = self._message_bit_errors(block, ref[i])
                    bit_errors[i] = be
                    error[i] = be > 0
        return error, bit_errors, queries, abandoned


def _batch_size(config, batch_index):
    start = batch_index * TRIAL_BATCH
    return max(0, min(TRIAL_BATCH, config.max_blocks - start))


def run_block(config, point_index, trial_index):
    """Replay a single trial; used for spot checks and debugging.

    The block is reproduced from its containing RNG batch, so the record
    matches what a campaign computes for the same (seed, point, trial).
    """
    if not 0 <= point_index < len(config.ebn0_grid_db):
        raise ValueError(f"point_index {point_index} out of range")
    if not 0 <= trial_index < config.max_blocks:
        raise ValueError(f"trial_index {trial_index} out of range")
    ctx = _PointContext(config, point_index)
    b = trial_index // TRIAL_BATCH
    error, bit_errors, queries, abandoned = ctx.run_batch(b, _batch_size(config, b))
    row = trial_index - b * TRIAL_BATCH
    return BlockRecord(
        point_index=point_index,
        trial_index=trial_index,
        error=bool(error[row]),
        bit_errors=int(bit_errors[row]),
        queries=int(queries[row]),
        abandoned=bool(abandoned[row]),
    )


# Pool worker state: the config once per pool, contexts per grid point.
_WORKER_CONFIG = None
_WORKER_CTX = {}


def _pool_init(config_dict):
    global _WORKER_CONFIG, _WORKER_CTX
    _WORKER_CONFIG = CampaignConfig.from_dict(config_dict)
    _WORKER_CTX = {}


def _pool_batch(task):
    point_index, batch_index = task
    ctx = _WORKER_CTX.get(point_index)
    if ctx is None:
        ctx = _WORKER_CTX[point_index] = _PointContext(_WORKER_CONFIG, point_index)
    return ctx.run_batch(batch_index, _batch_size(_WORKER_CONFIG, batch_index))


def _iter_batches(config, point_index, pool, workers):
    """Yield per-batch record arrays in batch order."""
    n_batches = -(-config.max_blocks // TRIAL_BATCH)
    if pool is None:
        ctx = _PointContext(config, point_index)
        for b in range(n_batches):
            yield ctx.run_batch(b, _batch_size(config, b))
        return
    # Waves keep the pool busy while letting the consumer stop early; a
    # wave that overshoots the stopping trial wastes work but never changes
    # the result, because trials are cut on the concatenated record.
    next_b = 0
    wave = max(workers, 1)
    while next_b < n_batches:
        take = min(wave, n_batches - next_b)
        tasks = [(point_index, b) for b in range(next_b, next_b + take)]
        yield from pool.map(_pool_batch, tasks)
        next_b += take
        wave = min(wave * 2, 64)


def run_point(config, point_index, workers=1, pool=None):
    """Simulate one grid point until the stopping rule fires."""
    errs = []
    bits = []
    qrys = []
    abds = []
    seen_errors = 0
    for error, bit_errors, queries, abandoned in _iter_batches(config, point_index, pool, workers):
        errs.append(error)
        bits.append(bit_errors)
        qrys.append(queries)
        abds.append(abandoned)
        seen_errors += int(error.sum())
        if seen_errors >= config.min_block_errors:
            break
    error = np.concatenate(errs)
    bit_errors = np.concatenate(bits)
    queries = np.concatenate(qrys)
    abandoned = np.concatenate(abds)

    if seen_errors >= config.min_block_errors:
        cum = np.cumsum(error)
        blocks = int(np.searchsorted(cum, config.min_block_errors)) + 1
    else:
        blocks = len(error)
    error = error[:blocks]
    bit_errors = bit_errors[:blocks]
    queries = queries[:blocks]
    abandoned = abandoned[:blocks]

    point = ChannelPoint(config.ebn0_grid_db[point_index], config.params.rate)
    block_errors = int(error.sum())
    total_bits = blocks * config.k
    total_bit_errors = int(bit_errors.sum())
    bler_lo, bler_hi = wilson_interval(block_errors, blocks)
    ber_lo, ber_hi = wilson_interval(total_bit_errors, total_bits)
    return PointResult(
        ebn0_db=config.ebn0_grid_db[point_index],
        sigma=point.sigma,
        noise_entropy_bits=point.noise_entropy_bits,
        blocks=blocks,
        block_errors=block_errors,
        bit_errors=total_bit_errors,
        abandoned_blocks=int(abandoned.sum()),
        bler=block_errors / blocks,
        bler_ci_low=bler_lo,
        bler_ci_high=bler_hi,
        ber=total_bit_errors / total_bits,
        ber_ci_low=ber_lo,
        ber_ci_high=ber_hi,
        bler_rule_of_three_upper=(3.0 / blocks if block_errors == 0 else None),
        mean_queries=float(queries.mean()),
        p99_queries=float(np.percentile(queries, 99)),
    )


@dataclass
class CampaignResult:
    """All grid points of one campaign plus run metadata.

    canonical_json covers config and points only; wall time and software
    version live in a meta block so reruns compare bit-identically.
    """

    config: CampaignConfig
    points: list = field(default_factory=list)
    wall_time_s: float = 0.0
    version: str = ""

    def data_dict(self):
        return {
            "config": self.config.to_dict(),
            "points": [p.to_dict() for p in self.points],
        }

    def canonical_json(self):
        return json.dumps(self.data_dict(), sort_keys=True, separators=(",", ":"))

    def to_json(self):
        doc = self.data_dict()
        doc["meta"] = {"wall_time_s": self.wall_time_s, "version": self.version}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        meta = doc.get("meta", {})
        return cls(
            config=CampaignConfig.from_dict(doc["config"]),
            points=[PointResult.from_dict(p) for p in doc["points"]],
            wall_time_s=meta.get("wall_time_s", 0.0),
            version=meta.get("version", ""),
        )

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())

    CSV_FIELDS = (
        "ebn0_db",
        "sigma",
        "blocks",
        "block_errors",
        "bit_errors",
        "abandoned_blocks",
        "bler",
        "bler_ci_low",
        "bler_ci_high",
        "ber",
        "ber_ci_low",
        "ber_ci_high",
        "bler_rule_of_three_upper",
        "mean_queries",
        "p99_queries",
    )

    def to_csv(self):
        """Plot-ready per-point table with provenance comments."""
        cfg = self.config
        lines = [
            f"# code={cfg.code_kind} decoder={cfg.decoder_kind} n={cfg.n} k={cfg.k} "
            f"seed={cfg.master_seed} max_queries={cfg.max_queries}",
            ",".join(self.CSV_FIELDS),
        ]
        for p in self.points:
            row = [p.to_dict()[f] for f in self.CSV_FIELDS]
            lines.append(",".join("" if v is None else repr(v) for v in row))
        return "\n".join(lines) + "\n"


def run_campaign(config, workers=1, progress=False):
    """Run every grid point; bit-identical output for any worker count."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    from . import __version__

    t0 = time.perf_counter()
    points = []
    pool = None
    try:
        if workers > 1:
            pool = multiprocessing.Pool(
                processes=workers, initializer=_pool_init, initargs=(config.to_dict(),)
            )
        for i in range(len(config.ebn0_grid_db)):
            res = run_point(config, i, workers=workers, pool=pool)
            points.append(res)
            if progress:
                print(
                    f"  {res.ebn0_db:5.2f} dB: blocks={res.blocks} "
                    f"errors={res.block_errors} bler={res.bler:.3e} "
                    f"ber={res.ber:.3e} mean_queries={res.mean_queries:.1f}",
                    flush=True,
                )
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return CampaignResult(
        config=config,
        points=points,
        wall_time_s=time.perf_counter() - t0,
        version=__version__,
    )
