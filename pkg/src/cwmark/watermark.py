"""Keyed embedding and extraction of constant-weight codewords in weight vectors.

Embedding pushes the magnitude of 1-coded positions to at least t1 and
caps 0-coded positions at t0. Because 0 < t0 < t1, extraction is just
"the alpha largest magnitudes are the ones", which survives any attack
that removes small magnitudes without touching large ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import CodeParams, as_bits, decode, encode, find_params
from .errors import (
    MalformedCodewordError,
    PositionRangeError,
    SelectionRatioError,
)
from .rng import MASK64, SplitMix64, mix64
from .stats import ThresholdPair

# Positions must cover at most 1/DENSITY_LIMIT of the host vector so the
# watermark stays statistically invisible; override only for tests/toys.
DENSITY_LIMIT = 100


def as_weight_vector(values) -> np.ndarray:
    """Coerce to a finite one-dimensional binary32 vector."""
    w = np.asarray(values, dtype=np.float32)
    if w.ndim != 1:
        raise ValueError("weight vector must be one-dimensional")
    if w.size < 1:
        raise ValueError("weight vector must not be empty")
    if not np.all(np.isfinite(w)):
        raise ValueError("weight vector must be finite")
    return w


def select_positions(key: int, n: int, l: int, allow_dense: bool = False) -> np.ndarray:
    """l distinct indices in [0, n), deterministic in (key, n, l).

    Partial Fisher-Yates shuffle over 0..n-1 driven by SplitMix64(key),
    with index draws by modulo reduction; uniform without replacement and
    bit-exact across implementations. Output order is selection order.
    """
    if l < 1:
        raise ValueError("must select at least one position")
    if l > n:
        raise ValueError(f"cannot select {l} positions from {n}")
    if not allow_dense and l * DENSITY_LIMIT > n:
        raise SelectionRatioError(
            f"{l} positions in a vector of {n} exceeds the 1/{DENSITY_LIMIT} "
            "density limit; pass allow_dense/--force to override"
        )
    rng = SplitMix64(key)
    swapped: dict[int, int] = {}
    out = np.empty(l, dtype=np.int64)
    for i in range(l):
        j = i + rng.next_below(n - i)
        out[i] = swapped.get(j, j)
        swapped[j] = swapped.get(i, i)
    return out


@dataclass(frozen=True)
class EmbedSpec:
    """Everything needed to embed or re-extract one codeword."""

    key: int
    params: CodeParams
    thresholds: ThresholdPair
    positions: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.key <= MASK64:
            raise ValueError("key must be an unsigned 64-bit integer")
        object.__setattr__(self, "positions", tuple(int(p) for p in self.positions))
        if len(self.positions) != self.params.L:
            raise ValueError(
                f"{len(self.positions)} positions for codeword length {self.params.L}"
            )
        if len(set(self.positions)) != len(self.positions):
            raise ValueError("positions must be distinct")
        if min(self.positions) < 0:
            raise ValueError("positions must be nonnegative")


@dataclass(frozen=True)
class EmbedReceipt:
    """Audit record of one embedding."""

    spec: EmbedSpec
    modified_count: int
    max_perturbation: float


def _positions_array(spec: EmbedSpec, n: int) -> np.ndarray:
    pos = np.asarray(spec.positions, dtype=np.int64)
    if pos.max() >= n:
        raise PositionRangeError(
            f"spec position {pos.max()} out of range for vector of length {n}"
        )
    return pos


def embed(weights, codeword, spec: EmbedSpec) -> tuple[np.ndarray, EmbedReceipt]:
    """Project the codeword onto the selected positions.

    Per position: a 1 with |w| < t1 becomes sgn(w) * t1, a 0 with
    |w| > t0 becomes sgn(w) * t0, everything else is untouched;
    sgn(0) = +1. Comparisons run in binary64 after widening; results are
    stored back as binary32. All non-selected entries are bit-identical
    to the input.
    """
    w = as_weight_vector(weights)
    pos = _positions_array(spec, w.size)
    bits = as_bits(codeword, expect_len=spec.params.L)
    if int(bits.sum()) != spec.params.alpha:
        raise MalformedCodewordError(
            f"codeword weight {int(bits.sum())} != alpha {spec.params.alpha}"
        )
    t0, t1 = spec.thresholds
    old = w[pos]
    vals = old.astype(np.float64)
    mag = np.abs(vals)
    sign = np.where(vals >= 0.0, 1.0, -1.0)
    ones = bits == 1
    new = vals.copy()
    new[ones & (mag < t1)] = sign[ones & (mag < t1)] * t1
    zeros_over = ~ones & (mag > t0)
    new[zeros_over] = sign[zeros_over] * t0

    out = w.copy()
    out[pos] = new.astype(np.float32)
    stored = out[pos]
    modified = int(np.count_nonzero(stored.view(np.uint32) != old.view(np.uint32)))
    max_pert = float(np.max(np.abs(stored.astype(np.float64) - vals)))
    return out, EmbedReceipt(spec=spec, modified_count=modified, max_perturbation=max_pert)


def extract(weights, spec: EmbedSpec) -> np.ndarray:
    """Recover a weight-alpha codeword from the selected positions.

    Marks the alpha largest magnitudes as ones; ties break toward the
    lower position-list index (stable sort), so the output weight is
    always exactly alpha even on corrupted input.
    """
    w = as_weight_vector(weights)
    pos = _positions_array(spec, w.size)
    mag = np.abs(w[pos].astype(np.float64))
    order = np.argsort(-mag, kind="stable")
    bits = np.zeros(spec.params.L, dtype=np.uint8)
    bits[order[: spec.params.alpha]] = 1
    return bits


def embed_message(
    weights,
    message,
    key: int,
    thresholds: ThresholdPair,
    params: CodeParams,
    allow_dense: bool = False,
) -> tuple[np.ndarray, EmbedReceipt]:
    """encode -> select_positions -> embed, returning the new vector and receipt."""
    w = as_weight_vector(weights)
    codeword = encode(message, params)
    positions = select_positions(key, w.size, params.L, allow_dense=allow_dense)
    spec = EmbedSpec(
        key=key, params=params, thresholds=thresholds, positions=tuple(positions)
    )
    return embed(w, codeword, spec)


def extract_message(weights, spec: EmbedSpec) -> np.ndarray:
    """extract -> decode; raises MessageRangeError on out-of-space codewords."""
    return decode(extract(weights, spec), spec.params)


def split_blocks(message, k_block: int) -> list[np.ndarray]:
    """Split bits into k_block-sized blocks, zero-padding the last one."""
    bits = as_bits(message)
    if bits.size == 0:
        raise ValueError("message must not be empty")
    if k_block < 1:
        raise ValueError("k_block must be >= 1")
    blocks = []
    for start in range(0, bits.size, k_block):
        block = bits[start : start + k_block]
        if block.size < k_block:
            block = np.concatenate(
                [block, np.zeros(k_block - block.size, dtype=np.uint8)]
            )
        blocks.append(block)
    return blocks


def join_blocks(blocks, total_bits: int) -> np.ndarray:
    """Inverse of split_blocks given the original bit length."""
    if total_bits < 1:
        raise ValueError("total_bits must be >= 1")
    joined = np.concatenate([as_bits(b) for b in blocks])
    if joined.size < total_bits:
        raise ValueError(f"blocks hold {joined.size} bits, need {total_bits}")
    if np.any(joined[total_bits:]):
        raise ValueError("padding bits beyond total_bits must be zero")
    return joined[:total_bits]


def _block_selection_seed(key: int, block_index: int, attempt: int) -> int:
    """Deterministic per-block, per-attempt selection seed.

    Block j starts from mix64(key XOR j); each rejected attempt re-mixes
    the previous seed, so the draw sequence is fixed by the key alone.
    """
    seed = mix64((key ^ block_index) & MASK64)
    for _ in range(attempt):
        seed = mix64(seed)
    return seed


def embed_message_blocks(
    weights,
    message,
    key: int,
    thresholds: ThresholdPair,
    alpha: int,
    k_block: int,
    allow_dense: bool = False,
) -> tuple[np.ndarray, list[EmbedSpec], list[EmbedReceipt]]:
    """Embed a long message as k_block-bit blocks on disjoint position sets.

    Every block uses the same (k_block, alpha, L) code. Block j draws its
    positions with _block_selection_seed(key, j, attempt), re-drawing on
    any collision with earlier blocks until the sets are disjoint. The
    density limit applies to the total position count across blocks.
    """
    w = as_weight_vector(weights)
    bits = as_bits(message)
    blocks = split_blocks(bits, k_block)
    params = find_params(k_block, alpha).params
    total = len(blocks) * params.L
    if total > w.size:
        raise ValueError(f"{total} positions exceed vector length {w.size}")
    if not allow_dense and total * DENSITY_LIMIT > w.size:
        raise SelectionRatioError(
            f"{total} total positions in a vector of {w.size} exceeds the "
            f"1/{DENSITY_LIMIT} density limit; pass allow_dense to override"
        )
    taken: set[int] = set()
    specs: list[EmbedSpec] = []
    receipts: list[EmbedReceipt] = []
    for j, block in enumerate(blocks):
        for attempt in range(1000):
            seed = _block_selection_seed(key, j, attempt)
            positions = select_positions(seed, w.size, params.L, allow_dense=True)
            if taken.isdisjoint(positions.tolist()):
                break
        else:
            raise SelectionRatioError(
                "could not find disjoint positions for all blocks"
            )
        taken.update(positions.tolist())
        spec = EmbedSpec(
            key=key, params=params, thresholds=thresholds, positions=tuple(positions)
        )
        w, receipt = embed(w, encode(block, params), spec)
        specs.append(spec)
        receipts.append(receipt)
    return w, specs, receipts


def extract_message_blocks(weights, specs, total_bits: int) -> np.ndarray:
    """Extract and rejoin a block-embedded message."""
    blocks = [extract_message(weights, spec) for spec in specs]
    return join_blocks(blocks, total_bits)
