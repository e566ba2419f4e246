"""Bit-exact persistence for weight vectors, embed specs, and reports.

Weight files are little-endian regardless of host: 4-byte magic "CWCW",
u16 format version (currently 1), u64 count, then the binary32 payload.
Spec files are line-oriented "name: value" text with positions stored
explicitly, so extraction never has to reproduce the position PRNG.
All writes go through a temp file and os.replace, so readers never see
a half-written file.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
from dataclasses import dataclass

import numpy as np

from .codec import CodeParams
from .errors import (
    BadMagicError,
    NonFiniteWeightError,
    SpecFormatError,
    TrailingDataError,
    TruncatedPayloadError,
    UnsupportedVersionError,
)
from .stats import ThresholdPair
from .watermark import EmbedSpec, as_weight_vector

MAGIC = b"CWCW"
VERSION = 1
_HEADER = struct.Struct("<4sHQ")

SPEC_FORMAT = "cwmark-spec/1"


def _atomic_write_bytes(path, data: bytes) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cwmark-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_weights(path, weights) -> None:
    """Serialize a weight vector; read_weights(write_weights(w)) is bit-identical.

    Rejects vectors the reader would refuse, so every written file parses.
    """
    w = np.ascontiguousarray(as_weight_vector(weights))
    header = _HEADER.pack(MAGIC, VERSION, w.size)
    payload = w.astype("<f4", copy=False).tobytes()
    _atomic_write_bytes(path, header + payload)


def read_weights(path) -> np.ndarray:
    with open(path, "rb") as handle:
        blob = handle.read()
    if len(blob) < _HEADER.size:
        raise TruncatedPayloadError(
            f"file is {len(blob)} bytes, shorter than the {_HEADER.size}-byte header"
        )
    magic, version, n = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported format version {version}")
    expected = _HEADER.size + 4 * n
    if len(blob) < expected:
        raise TruncatedPayloadError(
            f"header declares {n} weights ({expected} bytes) but file has {len(blob)}"
        )
    if len(blob) > expected:
        raise TrailingDataError(f"{len(blob) - expected} trailing bytes after payload")
    w = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).astype(
        np.float32, copy=True
    )
    if not np.all(np.isfinite(w)):
        raise NonFiniteWeightError("payload contains NaN or infinity")
    return w


@dataclass(frozen=True)
class SpecDocument:
    """One watermark's full recovery record: metadata plus per-block specs.

    Single-codeword watermarks are the one-block case. All blocks share
    the key, code parameters, and thresholds; position sets are disjoint.
    total_bits is the payload length before zero-padding the last block.
    """

    specs: tuple[EmbedSpec, ...]
    sigma: float
    rate: float
    total_bits: int

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.specs:
            raise ValueError("document needs at least one block spec")
        first = self.specs[0]
        for spec in self.specs[1:]:
            if (
                spec.key != first.key
                or spec.params != first.params
                or spec.thresholds != first.thresholds
            ):
                raise ValueError("blocks must share key, params, and thresholds")
        seen: set[int] = set()
        for spec in self.specs:
            if not seen.isdisjoint(spec.positions):
                raise ValueError("block position sets must be disjoint")
            seen.update(spec.positions)
        k = first.params.k
        blocks = len(self.specs)
        if not (blocks - 1) * k < self.total_bits <= blocks * k:
            raise ValueError(
                f"total_bits {self.total_bits} inconsistent with "
                f"{blocks} blocks of {k} bits"
            )
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("sigma must be positive and finite")
        if not 0.0 <= self.rate < 1.0:
            raise ValueError("rate must lie in [0, 1)")

    @classmethod
    def single(cls, spec: EmbedSpec, sigma: float, rate: float) -> "SpecDocument":
        return cls(specs=(spec,), sigma=sigma, rate=rate, total_bits=spec.params.k)

    @property
    def spec(self) -> EmbedSpec:
        if len(self.specs) != 1:
            raise ValueError("document holds multiple blocks; use .specs")
        return self.specs[0]


def write_spec(path, doc: SpecDocument) -> None:
    """Write a spec document; floats carry full binary64 precision."""
    first = doc.specs[0]
    lines = [
        f"format: {SPEC_FORMAT}",
        f"key: {first.key}",
        f"k: {first.params.k}",
        f"alpha: {first.params.alpha}",
        f"L: {first.params.L}",
        f"t0: {first.thresholds.t0!r}",
        f"t1: {first.thresholds.t1!r}",
        f"sigma: {doc.sigma!r}",
        f"rate: {doc.rate!r}",
        f"blocks: {len(doc.specs)}",
        f"total_bits: {doc.total_bits}",
    ]
    if len(doc.specs) == 1:
        lines.append("positions: " + " ".join(map(str, first.positions)))
    else:
        for j, spec in enumerate(doc.specs):
            lines.append(f"positions.{j}: " + " ".join(map(str, spec.positions)))
    _atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def _parse_fields(text: str) -> dict[str, str]:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = line.partition(":")
        if not sep:
            raise SpecFormatError(f"line {lineno}: expected 'name: value'")
        name = name.strip()
        if name in fields:
            raise SpecFormatError(f"line {lineno}: duplicate field {name!r}")
        fields[name] = value.strip()
    return fields


def _require(fields: dict[str, str], name: str) -> str:
    try:
        return fields.pop(name)
    except KeyError:
        raise SpecFormatError(f"missing field {name!r}") from None


def _parse_int(name: str, value: str) -> int:
    try:
        return int(value, 10)
    except ValueError:
        raise SpecFormatError(f"field {name!r}: not a decimal integer: {value!r}") from None


def _parse_float(name: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise SpecFormatError(f"field {name!r}: not a number: {value!r}") from None


def _parse_positions(name: str, value: str) -> tuple[int, ...]:
    if not value:
        raise SpecFormatError(f"field {name!r}: empty position list")
    return tuple(_parse_int(name, token) for token in value.split())


def read_spec(path) -> SpecDocument:
    """Parse a spec document back into SpecDocument, validating as it goes.

    Structural problems raise SpecFormatError; semantically invalid values
    (t0 >= t1, weight/length mismatches) surface as the constructors'
    ValueError subclasses.
    """
    with open(path, "r", encoding="ascii") as handle:
        text = handle.read()
    fields = _parse_fields(text)
    fmt = _require(fields, "format")
    if fmt != SPEC_FORMAT:
        raise SpecFormatError(f"unknown format {fmt!r}, expected {SPEC_FORMAT!r}")
    key = _parse_int("key", _require(fields, "key"))
    k = _parse_int("k", _require(fields, "k"))
    alpha = _parse_int("alpha", _require(fields, "alpha"))
    big_l = _parse_int("L", _require(fields, "L"))
    t0 = _parse_float("t0", _require(fields, "t0"))
    t1 = _parse_float("t1", _require(fields, "t1"))
    sigma = _parse_float("sigma", _require(fields, "sigma"))
    rate = _parse_float("rate", _require(fields, "rate"))
    blocks = _parse_int("blocks", fields.pop("blocks", "1"))
    if blocks < 1:
        raise SpecFormatError(f"blocks must be >= 1, got {blocks}")
    total_bits = _parse_int("total_bits", fields.pop("total_bits", str(blocks * k)))

    if blocks == 1:
        position_lists = [_parse_positions("positions", _require(fields, "positions"))]
    else:
        position_lists = [
            _parse_positions(f"positions.{j}", _require(fields, f"positions.{j}"))
            for j in range(blocks)
        ]
    if fields:
        raise SpecFormatError(f"unknown fields: {sorted(fields)}")

    params = CodeParams(k=k, alpha=alpha, L=big_l)
    thresholds = ThresholdPair(t0=t0, t1=t1)
    specs = tuple(
        EmbedSpec(key=key, params=params, thresholds=thresholds, positions=positions)
        for positions in position_lists
    )
    return SpecDocument(specs=specs, sigma=sigma, rate=rate, total_bits=total_bits)
