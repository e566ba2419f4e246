"""Enumerative coding for binary constant-weight codes.

A codeword is a length-L bit vector with exactly `alpha` ones. The coder
is a bijection between integers 0 .. binomial(L, alpha) - 1 and those
vectors, built from binomial coefficients, so a k-bit payload fits as
soon as binomial(L, alpha) >= 2**k.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, MalformedCodewordError, MessageRangeError


def binomial(n: int, r: int) -> int:
    """Exact binomial coefficient with the convention binomial(n, r) = 0 for r > n."""
    if n < 0 or r < 0:
        raise ValueError("binomial arguments must be nonnegative")
    return math.comb(n, r)


@dataclass(frozen=True)
class CodeParams:
    """Code geometry: k payload bits, Hamming weight alpha, codeword length L."""

    k: int
    alpha: int
    L: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 1 <= self.alpha <= self.L:
            raise ValueError("alpha must satisfy 1 <= alpha <= L")
        if binomial(self.L, self.alpha) < (1 << self.k):
            raise CapacityError(
                f"binomial({self.L}, {self.alpha}) < 2**{self.k}: "
                "code cannot hold a k-bit payload"
            )

    @property
    def capacity(self) -> int:
        """Number of distinct codewords, binomial(L, alpha)."""
        return binomial(self.L, self.alpha)


def as_bits(values, expect_len: int | None = None) -> np.ndarray:
    """Coerce a 0/1 sequence to a uint8 array, validating contents."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError("bit sequence must be one-dimensional")
    if arr.dtype == np.uint8:
        out = arr
    else:
        out = arr.astype(np.uint8)
        if not np.array_equal(out, arr):
            raise ValueError("bit sequence must contain only 0 and 1")
    if out.size and out.max() > 1:
        raise ValueError("bit sequence must contain only 0 and 1")
    if expect_len is not None and out.size != expect_len:
        raise ValueError(f"expected {expect_len} bits, got {out.size}")
    return out


def bits_to_int(bits) -> int:
    """Little-endian bits to integer: bit t carries weight 2**t."""
    arr = as_bits(bits)
    packed = np.packbits(arr, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def int_to_bits(value: int, k: int) -> np.ndarray:
    """Integer to k little-endian bits; rejects values needing more than k bits."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if value < 0:
        raise ValueError("value must be nonnegative")
    if value >= (1 << k):
        raise MessageRangeError(f"value needs more than {k} bits")
    raw = value.to_bytes((k + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:k]


@lru_cache(maxsize=2)
def _weight_rows(L: int, alpha: int) -> tuple:
    """Per-weight binomial lookup: rows[l][n] = binomial(n, l) for n in 0..L.

    Each row is built with one exact multiply/divide per entry; rows are
    nondecreasing in n, which lets encode use bisect directly on them.
    Cached because building the k=1024 ladders costs ~1 s and ~150 MB,
    and encode/decode for one parameter set reuse the same rows.
    """
    rows = [None] * (alpha + 1)
    for l in range(1, alpha + 1):
        row = [0] * l + [1]
        v = 1
        for n in range(l + 1, L + 1):
            v = v * n // (n - l)
            row.append(v)
        rows[l] = row
    return tuple(rows)


def encode_index(value: int, alpha: int, L: int) -> np.ndarray:
    """Codeword of weight `alpha`, length `L`, for index `value`.

    Walks the index down one weight level at a time: the 1 at level l goes
    to the largest position p with binomial(p, l) <= remaining index, then
    the coefficient is subtracted. Equivalent to scanning positions from
    L-1 down to 0 and emitting a 1 whenever the remaining index reaches
    binomial(position, level); the bisect jump just skips the 0 runs.
    """
    if value < 0:
        raise ValueError("index must be nonnegative")
    if value >= binomial(L, alpha):
        raise CapacityError(
            f"index {value} >= binomial({L}, {alpha}); message exceeds code capacity"
        )
    rows = _weight_rows(L, alpha)
    bits = np.zeros(L, dtype=np.uint8)
    hi = L
    for l in range(alpha, 0, -1):
        row = rows[l]
        p = bisect_right(row, value, 0, hi) - 1
        value -= row[p]
        bits[p] = 1
        hi = p
    return bits


def decode_index(codeword, alpha: int) -> int:
    """Index of a weight-`alpha` codeword; inverse of encode_index."""
    bits = as_bits(codeword)
    ones = np.flatnonzero(bits)
    if ones.size != alpha:
        raise MalformedCodewordError(
            f"codeword weight {ones.size} != alpha {alpha}"
        )
    rows = _weight_rows(int(bits.size), alpha)
    value = 0
    for l, p in enumerate(ones, start=1):
        value += rows[l][p]
    return value


def encode(message, params: CodeParams) -> np.ndarray:
    """Encode k message bits into a constant-weight codeword.

    Raises CapacityError if the message's integer value does not fit the
    code; never truncates.
    """
    bits = as_bits(message, expect_len=params.k)
    return encode_index(bits_to_int(bits), params.alpha, params.L)


def decode(codeword, params: CodeParams) -> np.ndarray:
    """Decode a constant-weight codeword back to k message bits.

    Raises MalformedCodewordError on wrong length/weight and
    MessageRangeError when the reconstructed index needs more than k bits
    (a corrupted codeword outside the message space).
    """
    bits = as_bits(codeword, expect_len=params.L)
    value = decode_index(bits, params.alpha)
    if value >= (1 << params.k):
        raise MessageRangeError(
            f"decoded index {value} does not fit in {params.k} bits; "
            "codeword is corrupted"
        )
    return int_to_bits(value, params.k)


@dataclass(frozen=True)
class ParamSearchResult:
    """Outcome of the minimal-length search for a (k, alpha) code."""

    params: CodeParams
    tolerance: float        # 1 - alpha/L: highest pruning rate the code survives
    capacity_bits: float    # log2 binomial(L, alpha)
    within_upper_bound: bool  # binomial(L, alpha) < 2**(k+1)


def find_params(k: int, alpha: int) -> ParamSearchResult:
    """Code length for a k-bit message at weight alpha, plus derived figures.

    Sizes L so that even the conservative estimate
    (L - alpha)**alpha / alpha! <= binomial(L, alpha) already reaches 2**k:
    the returned L is the smallest with (L - alpha)**alpha >= 2**k * alpha!.
    That certifies the capacity with cheap integer arithmetic (no huge
    binomials during the search) and reproduces the published parameter
    grid; it can run a few positions above the bare minimum L, which only
    adds margin. Found by doubling then bisecting on L - alpha.

    The tightness flag reports whether the true capacity also stays below
    2**(k+1); large-alpha choices can overshoot that bound, which is
    harmless for correctness.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    target = (1 << k) * math.factorial(alpha)
    hi = 1
    while hi**alpha < target:
        hi *= 2
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if mid**alpha >= target:
            hi = mid
        else:
            lo = mid
    L = alpha + hi
    c = math.comb(L, alpha)
    params = CodeParams(k=k, alpha=alpha, L=L)
    return ParamSearchResult(
        params=params,
        tolerance=1.0 - alpha / L,
        capacity_bits=math.log2(c),
        within_upper_bound=c < (1 << (k + 1)),
    )


def find_params_for_tolerance(k: int, tolerance: float) -> ParamSearchResult:
    """Shortest code whose pruning tolerance 1 - alpha/L meets the target.

    Scans alpha upward. L(alpha) falls to a single minimum and then rises,
    while the tolerance decreases, so the scan can stop a few steps after
    lengths start rising with nothing better reachable. The tolerance
    comparison is exact, not rounded to 4 decimals, so a target copied
    from a rounded table can land one alpha step conservative.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 <= tolerance < 1.0:
        raise ValueError("tolerance must lie in [0, 1)")
    best = None
    rising = 0
    prev_len = None
    alpha = 1
    while True:
        result = find_params(k, alpha)
        length = result.params.L
        meets = result.tolerance >= tolerance
        if meets and (best is None or length < best.params.L):
            best = result
        rising = rising + 1 if (prev_len is not None and length >= prev_len) else 0
        if rising >= 3 and (
            not meets or (best is not None and length > best.params.L)
        ):
            break
        prev_len = length
        alpha += 1
    if best is None:
        raise ValueError(f"no weight meets tolerance {tolerance} for k={k}")
    return best
