"""Monte Carlo end-to-end link simulation of the layered two-stream scheme.

Chain per trial (one frame = one codeword pair): draw source bits, encode
both streams, map bit pairs to symbols, add AWGN, demap the axis stream,
decode it, rebuild the axis word, demap the sign stream on the chosen axes,
decode it, tally errors.

Reproducibility contract: trial t draws from a private generator seeded by
SeedSequence([seed, t]), so tallies are independent of how trials are split
into shards and of the execution order of shards.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np
from scipy.special import erfc

from . import codec
from .awgn_info import NoiseModel
from .ocb import Constellation, demap_stage1, demap_stage2, map_bits, reconstruct_v1

__all__ = [
    "LinkConfig",
    "TxBlock",
    "SimStats",
    "transmit_block",
    "run_trials",
    "uncoded_symbol_error_rates",
    "q_function",
]

STAGE2_MODES = ("reconstructed", "raw_hard", "genie")

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


def q_function(x):
    """Gaussian tail probability P(N > x) for standard normal N."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


@dataclass
class LinkConfig:
    """Everything needed to reproduce a simulation run bit for bit."""

    code1: codec.LinearCode
    code2: codec.LinearCode
    alpha: float
    sigma2: float
    trials: int
    seed: int = 0
    stage2_input: str = "reconstructed"
    shards: int = 1

    def __post_init__(self):
        if self.code1.M != self.code2.M:
            raise ValueError(
                f"both streams must span the same block length, got {self.code1.M} and {self.code2.M}"
            )
        if not self.alpha > 0.0:
            raise ValueError("alpha must be positive")
        if self.sigma2 < 0.0:
            raise ValueError("sigma2 must be nonnegative")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.stage2_input not in STAGE2_MODES:
            raise ValueError(f"stage2_input must be one of {STAGE2_MODES}")
        if self.shards < 1:
            raise ValueError("shards must be >= 1")


@dataclass
class TxBlock:
    """One transmitted frame: source words, codewords, received samples."""

    c1: np.ndarray
    c2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    y: np.ndarray  # complex, length M


@dataclass
class SimStats:
    """Integer tallies from a batch of trials; rates are derived views."""

    trials: int
    k1: int
    k2: int
    block_len: int
    bit_errors1: int = 0
    bit_errors2: int = 0
    frame_errors1: int = 0
    frame_errors2: int = 0
    cond_events: int = 0
    cond_errors: int = 0

    def __add__(self, other: "SimStats") -> "SimStats":
        if (self.k1, self.k2, self.block_len) != (other.k1, other.k2, other.block_len):
            raise ValueError("cannot merge stats from different configurations")
        merged = {f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)}
        merged.update(k1=self.k1, k2=self.k2, block_len=self.block_len)
        return SimStats(**merged)

    @property
    def ber1(self) -> float:
        return self.bit_errors1 / (self.trials * self.k1)

    @property
    def ber2(self) -> float:
        return self.bit_errors2 / (self.trials * self.k2)

    @property
    def fer1(self) -> float:
        return self.frame_errors1 / self.trials

    @property
    def fer2(self) -> float:
        return self.frame_errors2 / self.trials

    @property
    def cond_ber2_given_v1_err(self):
        """Stage-2 symbol error rate among symbols whose axis word was wrong.

        None when no conditioning event occurred (undefined, not zero).
        """
        if self.cond_events == 0:
            return None
        return self.cond_errors / self.cond_events

    def ci95(self, which: str) -> float:
        """95% Wald half-width for one of ber1/ber2/fer1/fer2/cond."""
        lookup = {
            "ber1": (self.bit_errors1, self.trials * self.k1),
            "ber2": (self.bit_errors2, self.trials * self.k2),
            "fer1": (self.frame_errors1, self.trials),
            "fer2": (self.frame_errors2, self.trials),
            "cond": (self.cond_errors, self.cond_events),
        }
        errors, n = lookup[which]
        if n == 0:
            return float("nan")
        p = errors / n
        return _Z95 * np.sqrt(p * (1.0 - p) / n)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def transmit_block(cfg: LinkConfig, rng: np.random.Generator) -> TxBlock:
    """Draw a source frame, encode both streams, map, add noise."""
    c1 = rng.integers(0, 2, size=cfg.code1.K, dtype=np.uint8)
    c2 = rng.integers(0, 2, size=cfg.code2.K, dtype=np.uint8)
    v1 = codec.encode(cfg.code1, c1)
    v2 = codec.encode(cfg.code2, c2)
    cons = Constellation(cfg.alpha)
    sym = map_bits(v1, v2, cons)
    sigma = np.sqrt(cfg.sigma2)
    y = sym + rng.normal(0.0, sigma, v1.size) + 1j * rng.normal(0.0, sigma, v1.size)
    return TxBlock(c1, c2, v1, v2, y)


def _run_one(cfg: LinkConfig, cons: Constellation, noise: NoiseModel, trial: int) -> tuple:
    rng = _trial_rng(cfg.seed, trial)
    blk = transmit_block(cfg, rng)
    llr1 = demap_stage1(blk.y, cons, noise)
    c1_hat = codec.decode(cfg.code1, llr1)
    if cfg.stage2_input == "reconstructed":
        v1_used = reconstruct_v1(c1_hat, cfg.code1)
    elif cfg.stage2_input == "raw_hard":
        v1_used = (llr1 < 0.0).astype(np.uint8)
    else:  # genie: axis word forced correct
        v1_used = blk.v1
    llr2 = demap_stage2(blk.y, v1_used, cons, noise)
    c2_hat = codec.decode(cfg.code2, llr2)

    be1 = int(np.count_nonzero(c1_hat != blk.c1))
    be2 = int(np.count_nonzero(c2_hat != blk.c2))
    wrong_axis = v1_used != blk.v1
    v2_hard = (llr2 < 0.0).astype(np.uint8)
    cond_events = int(np.count_nonzero(wrong_axis))
    cond_errors = int(np.count_nonzero((v2_hard != blk.v2) & wrong_axis))
    return be1, be2, be1 > 0, be2 > 0, cond_events, cond_errors


def run_shard(cfg: LinkConfig, shard: int) -> SimStats:
    """Tallies for the trials t with t % shards == shard."""
    cons = Constellation(cfg.alpha)
    noise = NoiseModel(cfg.sigma2)
    trial_ids = range(shard, cfg.trials, cfg.shards)
    stats = SimStats(trials=len(trial_ids), k1=cfg.code1.K, k2=cfg.code2.K, block_len=cfg.code1.M)
    for t in trial_ids:
        be1, be2, fe1, fe2, ce, cx = _run_one(cfg, cons, noise, t)
        stats.bit_errors1 += be1
        stats.bit_errors2 += be2
        stats.frame_errors1 += int(fe1)
        stats.frame_errors2 += int(fe2)
        stats.cond_events += ce
        stats.cond_errors += cx
    return stats


def _shard_worker(args) -> SimStats:
    cfg, shard = args
    return run_shard(cfg, shard)


def run_trials(cfg: LinkConfig, threads: int = 1) -> SimStats:
    """Full receiver chain over cfg.trials frames; shard-count invariant."""
    if threads > 1 and cfg.shards > 1:
        with ProcessPoolExecutor(max_workers=min(threads, cfg.shards)) as pool:
            parts = list(pool.map(_shard_worker, [(cfg, s) for s in range(cfg.shards)]))
    else:
        parts = [run_shard(cfg, s) for s in range(cfg.shards)]
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total


def uncoded_symbol_error_rates(alpha: float, sigma2: float, samples: int, seed: int) -> tuple[float, float]:
    """(axis-decision error rate, sign error rate given the correct axis).

    Uncoded per-symbol statistics: the first output is the raw hard stage-1
    error probability, the second the stage-2 sign error with the true axis
    supplied (genie conditioning), which has the closed form Q(sqrt(2)a/sigma).
    """
    if samples < 100_000:
        raise ValueError(f"samples must be at least 100000, got {samples}")
    cons = Constellation(alpha)
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    sigma = np.sqrt(sigma2)
    axis_errors = 0
    sign_errors = 0
    left = samples
    while left > 0:
        m = min(left, 1_000_000)
        v1 = rng.integers(0, 2, size=m, dtype=np.uint8)
        v2 = rng.integers(0, 2, size=m, dtype=np.uint8)
        y = map_bits(v1, v2, cons) + rng.normal(0.0, sigma, m) + 1j * rng.normal(0.0, sigma, m)
        v1_hat = (np.abs(y.imag) > np.abs(y.real)).astype(np.uint8)  # tie goes to 0
        axis_errors += int(np.count_nonzero(v1_hat != v1))
        coord = np.where(v1 == 0, y.real, y.imag)
        v2_hat = (coord < 0.0).astype(np.uint8)
        sign_errors += int(np.count_nonzero(v2_hat != v2))
        left -= m
    return axis_errors / samples, sign_errors / samples
