"""Command-line front end: codec utilities, embedding pipeline, attack harness.

Verbs: params, encode, decode, embed, extract, prune, noise, attack, eval.
Global flags (before the verb): --seed, --quiet, --json.

Exit codes: 0 success, 2 usage error, 3 unreadable or malformed data,
4 verification failure (failed range check or failed recovery trial).

Messages travel as hex strings. A hex string of d digits carries k = 4d
bits: it is read as a big-endian integer whose bit t (LSB first) becomes
message bit t, and extraction prints the same hex back.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import attacks, codec, model_io, stats, watermark
from .errors import (
    CwmarkError,
    MessageRangeError,
    PositionRangeError,
    SpecFormatError,
    WeightFileError,
)
from .rng import MASK64, SplitMix64, random_bits, splitmix64_stream

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_VERIFY = 4

# Built-in demonstration grid: four weight choices for each of five
# message sizes, spanning pruning tolerances from 0.96 to 0.99.
DEMO_PARAM_GRID = (
    (64, 8), (64, 9), (64, 10), (64, 11),
    (128, 16), (128, 18), (128, 20), (128, 22),
    (254, 32), (254, 36), (254, 40), (254, 43),
    (512, 63), (512, 73), (512, 79), (512, 85),
    (1024, 127), (1024, 145), (1024, 159), (1024, 170),
)

CSV_HEADER = (
    "seed", "n", "sigma", "k", "alpha", "L", "design_rate", "attack_rate",
    "bit_errors", "recovered", "cutoff", "t1", "modified_count",
)


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError("value must fit in 64 unsigned bits")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("value must be >= 0")
    return value


def _unit_rate(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value < 1.0:
        raise argparse.ArgumentTypeError("rate must lie in [0, 1)")
    return value


def _rate_list(text: str) -> list[float]:
    items = [token for token in text.split(",") if token.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty rate list")
    return [_unit_rate(token.strip()) for token in items]


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("value must be > 0")
    return value


def _nonneg_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("value must be >= 0")
    return value


def _hex_message(text: str) -> str:
    body = text[2:] if text[:2].lower() == "0x" else text
    if not body:
        raise argparse.ArgumentTypeError("empty message")
    try:
        int(body, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex string: {text!r}") from None
    return body.lower()


def _bitstring(text: str) -> np.ndarray:
    if not text or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError("codeword must be a nonempty 0/1 string")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


def hex_to_bits(message: str) -> np.ndarray:
    """d hex digits -> 4d bits, bit t = (int(message, 16) >> t) & 1."""
    return codec.int_to_bits(int(message, 16), 4 * len(message))


def bits_to_hex(bits, total_bits: int | None = None) -> str:
    """Inverse of hex_to_bits; width covers total_bits (default len(bits))."""
    arr = codec.as_bits(bits)
    width = -(-(total_bits if total_bits is not None else arr.size) // 4)
    return format(codec.bits_to_int(arr), f"0{width}x")


def codeword_str(bits) -> str:
    return "".join("1" if b else "0" for b in codec.as_bits(bits))


class _Console:
    """stdout/JSON switchboard honoring --quiet and --json."""

    def __init__(self, args):
        self.quiet = args.quiet
        self.json = args.json
        self.payload: dict = {}

    def info(self, line: str) -> None:
        if not self.quiet and not self.json:
            print(line)

    def result(self, line: str) -> None:
        if not self.json:
            print(line)

    def put(self, **fields) -> None:
        self.payload.update(fields)

    def flush(self) -> None:
        if self.json:
            print(json.dumps(self.payload))


def _param_row(result: codec.ParamSearchResult) -> dict:
    p = result.params
    return {
        "k": p.k,
        "alpha": p.alpha,
        "L": p.L,
        "capacity_bits": round(result.capacity_bits, 2),
        "tolerance": round(result.tolerance, 4),
        "tight": result.within_upper_bound,
    }


def _print_param_rows(console: _Console, rows: list[dict]) -> None:
    console.put(rows=rows)
    if console.json:
        return
    header = f"{'k':>6} {'alpha':>6} {'L':>8} {'capacity':>10} {'tolerance':>10} {'tight':>6}"
    console.result(header)
    for row in rows:
        console.result(
            f"{row['k']:>6} {row['alpha']:>6} {row['L']:>8} "
            f"{row['capacity_bits']:>10.2f} {row['tolerance']:>10.4f} "
            f"{'yes' if row['tight'] else 'no':>6}"
        )


def cmd_params(args, console: _Console) -> int:
    if args.grid:
        rows = [_param_row(codec.find_params(k, a)) for k, a in DEMO_PARAM_GRID]
    elif args.k is None:
        raise CwmarkError("provide -k with -a or --tolerance, or use --grid")
    elif (args.alpha is None) == (args.tolerance is None):
        raise CwmarkError("provide exactly one of -a or --tolerance")
    elif args.alpha is not None:
        rows = [_param_row(codec.find_params(args.k, args.alpha))]
    else:
        rows = [_param_row(codec.find_params_for_tolerance(args.k, args.tolerance))]
    _print_param_rows(console, rows)
    return EXIT_OK


def cmd_encode(args, console: _Console) -> int:
    bits = hex_to_bits(args.message)
    result = codec.find_params(bits.size, args.alpha)
    word = codec.encode(bits, result.params)
    console.put(
        k=result.params.k,
        alpha=result.params.alpha,
        L=result.params.L,
        codeword=codeword_str(word),
    )
    console.info(
        f"k: {result.params.k}  alpha: {result.params.alpha}  L: {result.params.L}"
    )
    console.result(codeword_str(word))
    return EXIT_OK


def cmd_decode(args, console: _Console) -> int:
    bits = args.codeword
    alpha = int(bits.sum())
    params = codec.CodeParams(k=args.k, alpha=alpha, L=int(bits.size))
    try:
        message = codec.decode(bits, params)
    except MessageRangeError as exc:
        print(f"cwmark: range check failed: {exc}", file=sys.stderr)
        console.put(range_ok=False)
        return EXIT_VERIFY
    console.put(message=bits_to_hex(message), k=params.k, range_ok=True)
    console.result(bits_to_hex(message))
    return EXIT_OK


def _design_from_args(args, sigma: float) -> tuple[stats.ThresholdPair, float]:
    explicit = args.t0 is not None or args.t1 is not None
    if args.rate is not None and explicit:
        raise CwmarkError("--rate and --t0/--t1 are mutually exclusive")
    if explicit:
        if args.t0 is None or args.t1 is None:
            raise CwmarkError("--t0 and --t1 must be given together")
        return stats.ThresholdPair(t0=args.t0, t1=args.t1), 0.0
    if args.rate is None:
        raise CwmarkError("need --rate or an explicit --t0/--t1 pair")
    pair = stats.design_thresholds(sigma, args.rate, two_sided=args.two_sided)
    return pair, args.rate


def cmd_embed(args, console: _Console) -> int:
    weights = model_io.read_weights(args.weights_in)
    bits = hex_to_bits(args.message)
    sigma = stats.estimate_sigma(weights)
    thresholds, rate = _design_from_args(args, sigma)

    if args.block_bits is not None and args.block_bits < bits.size:
        marked, specs, receipts = watermark.embed_message_blocks(
            weights,
            bits,
            args.key,
            thresholds,
            alpha=args.alpha,
            k_block=args.block_bits,
            allow_dense=args.force,
        )
        doc = model_io.SpecDocument(
            specs=tuple(specs), sigma=sigma, rate=rate, total_bits=int(bits.size)
        )
        modified = sum(r.modified_count for r in receipts)
        max_pert = max(r.max_perturbation for r in receipts)
    else:
        params = codec.find_params(bits.size, args.alpha).params
        marked, receipt = watermark.embed_message(
            weights, bits, args.key, thresholds, params, allow_dense=args.force
        )
        doc = model_io.SpecDocument.single(receipt.spec, sigma=sigma, rate=rate)
        modified = receipt.modified_count
        max_pert = receipt.max_perturbation

    model_io.write_weights(args.weights_out, marked)
    model_io.write_spec(args.spec_out, doc)
    console.put(
        modified_count=modified,
        max_perturbation=max_pert,
        sigma=sigma,
        t0=thresholds.t0,
        t1=thresholds.t1,
        blocks=len(doc.specs),
    )
    console.info(f"sigma: {sigma!r}  t0: {thresholds.t0!r}  t1: {thresholds.t1!r}")
    console.result(f"modified_count: {modified}")
    console.result(f"max_perturbation: {max_pert!r}")
    return EXIT_OK


def cmd_extract(args, console: _Console) -> int:
    weights = model_io.read_weights(args.weights_in)
    doc = model_io.read_spec(args.spec_in)
    words = [watermark.extract(weights, spec) for spec in doc.specs]
    blocks = []
    range_ok = True
    for spec, word in zip(doc.specs, words):
        try:
            blocks.append(codec.decode(word, spec.params))
        except MessageRangeError:
            range_ok = False
            blocks.append(None)
    console.put(weight_ok=True, range_ok=range_ok)
    if range_ok:
        try:
            joined = watermark.join_blocks(blocks, doc.total_bits)
        except ValueError:
            range_ok = False
            console.put(range_ok=False)
    if not range_ok:
        for word in words:
            console.result(f"codeword: {codeword_str(word)}")
        console.result("range check: failed")
        return EXIT_VERIFY
    message = bits_to_hex(joined, doc.total_bits)
    console.put(message=message, total_bits=doc.total_bits)
    console.info("codeword weight check: ok  range check: ok")
    console.result(message)
    return EXIT_OK


def cmd_prune(args, console: _Console) -> int:
    weights = model_io.read_weights(args.weights_in)
    pruned, report = attacks.prune(weights, args.rate)
    model_io.write_weights(args.weights_out, pruned)
    console.put(
        rate=report.rate, p=report.p, cutoff=report.cutoff, zeroed=report.zeroed
    )
    console.result(f"rate: {report.rate!r}  p: {report.p}")
    console.result(f"cutoff: {report.cutoff!r}")
    console.result(f"zeroed: {report.zeroed}")
    return EXIT_OK


def cmd_noise(args, console: _Console) -> int:
    weights = model_io.read_weights(args.weights_in)
    noisy = attacks.add_noise(weights, args.level, args.seed)
    model_io.write_weights(args.weights_out, noisy)
    console.put(level=args.level, seed=args.seed, n=int(weights.size))
    console.result(f"level: {args.level!r}  seed: {args.seed}")
    return EXIT_OK


def cmd_attack(args, console: _Console) -> int:
    weights = model_io.read_weights(args.weights_in)
    attacked, touched = attacks.targeted_flip_attack(
        weights, args.budget, args.seed, strategy=args.strategy
    )
    model_io.write_weights(args.weights_out, attacked)
    console.put(
        strategy=args.strategy,
        budget=args.budget,
        touched=int(touched.size),
        touched_indices=[int(i) for i in touched],
    )
    console.result(f"strategy: {args.strategy}  touched: {touched.size}")
    return EXIT_OK


def _eval_rows(args):
    params = codec.find_params(args.k, args.alpha).params
    thresholds = stats.design_thresholds(
        args.sigma, args.design_rate, two_sided=args.two_sided
    )
    for trial_seed in splitmix64_stream(args.seed, args.trials):
        trial_seed = int(trial_seed)
        sub = SplitMix64(trial_seed)
        weight_seed = sub.next_u64()
        key = sub.next_u64()
        message_seed = sub.next_u64()
        weights = stats.sample_gaussian_weights(args.n, args.sigma, weight_seed)
        message = random_bits(message_seed, args.k)
        codeword = codec.encode(message, params)
        positions = watermark.select_positions(
            key, args.n, params.L, allow_dense=args.force
        )
        spec = watermark.EmbedSpec(
            key=key,
            params=params,
            thresholds=thresholds,
            positions=tuple(positions),
        )
        marked, receipt = watermark.embed(weights, codeword, spec)
        for rate in args.attack_rates:
            pruned, report = attacks.prune(marked, rate)
            recovered = watermark.extract(pruned, spec)
            errors = int(np.count_nonzero(recovered != codeword))
            yield {
                "seed": trial_seed,
                "n": args.n,
                "sigma": repr(args.sigma),
                "k": params.k,
                "alpha": params.alpha,
                "L": params.L,
                "design_rate": repr(args.design_rate),
                "attack_rate": repr(rate),
                "bit_errors": errors,
                "recovered": "yes" if errors == 0 else "no",
                "cutoff": repr(report.cutoff),
                "t1": repr(thresholds.t1),
                "modified_count": receipt.modified_count,
            }


def cmd_eval(args, console: _Console) -> int:
    rows = list(_eval_rows(args))
    failures = [
        row
        for row in rows
        if row["recovered"] == "no"
        and float(row["attack_rate"]) <= args.design_rate - 0.01 + 1e-12
    ]
    if args.out is not None:
        with open(args.out, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            writer.writerows([row[name] for name in CSV_HEADER] for row in rows)
    console.put(rows=rows, trials=args.trials, failures=len(failures))
    if args.out is None and not console.json:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows([row[name] for name in CSV_HEADER] for row in rows)
    if not args.quiet:
        recovered = sum(1 for row in rows if row["recovered"] == "yes")
        print(
            f"cwmark: {recovered}/{len(rows)} recoveries, "
            f"{len(failures)} failures at protected rates",
            file=sys.stderr,
        )
    return EXIT_VERIFY if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cwmark",
        description=(
            "Watermark weight vectors with constant-weight codewords that "
            "survive magnitude pruning."
        ),
    )
    parser.add_argument("--seed", type=_u64, default=0, help="master seed (default 0)")
    parser.add_argument("--quiet", action="store_true", help="suppress informational output")
    parser.add_argument("--json", action="store_true", help="emit one JSON object")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("params", help="search code parameters (L, capacity, tolerance)")
    p.add_argument("-k", type=_positive_int, help="message bits")
    p.add_argument("-a", "--alpha", type=_positive_int, help="codeword weight")
    p.add_argument("--tolerance", type=_unit_rate, help="target pruning tolerance")
    p.add_argument(
        "--grid",
        "--table-1",
        dest="grid",
        action="store_true",
        help="print the built-in 20-row demonstration grid",
    )
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("encode", help="encode a hex message into a codeword")
    p.add_argument("--message", type=_hex_message, required=True, help="hex message")
    p.add_argument("-a", "--alpha", type=_positive_int, required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a 0/1 codeword back to hex")
    p.add_argument("--codeword", type=_bitstring, required=True)
    p.add_argument("-k", type=_positive_int, required=True, help="message bits")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("embed", help="embed a hex message into a weight file")
    p.add_argument("weights_in")
    p.add_argument("spec_out")
    p.add_argument("weights_out")
    p.add_argument("--message", type=_hex_message, required=True)
    p.add_argument("--key", type=_u64, required=True, help="64-bit secret key")
    p.add_argument("-a", "--alpha", type=_positive_int, required=True)
    p.add_argument("--rate", type=_unit_rate, help="design thresholds for this pruning rate")
    p.add_argument("--two-sided", action="store_true", help="rate counts |w| below t1")
    p.add_argument("--t0", type=_positive_float, help="explicit lower threshold")
    p.add_argument("--t1", type=_positive_float, help="explicit upper threshold")
    p.add_argument("--block-bits", type=_positive_int, help="split message into blocks")
    p.add_argument("--force", action="store_true", help="override the density limit")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover the hex message from weights + spec")
    p.add_argument("weights_in")
    p.add_argument("spec_in")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("prune", help="zero the smallest-magnitude fraction of weights")
    p.add_argument("weights_in")
    p.add_argument("weights_out")
    p.add_argument("--rate", type=_unit_rate, required=True)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("noise", help="add seeded Gaussian noise")
    p.add_argument("weights_in")
    p.add_argument("weights_out")
    p.add_argument("--level", type=_nonneg_float, required=True, help="noise std dev")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("attack", help="keyless bit-flip attack (suppress or inflate)")
    p.add_argument("weights_in")
    p.add_argument("weights_out")
    p.add_argument("--budget", type=_positive_int, required=True)
    p.add_argument(
        "--strategy", choices=("suppress", "inflate"), default="suppress"
    )
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("eval", help="Monte-Carlo embed/prune/extract harness (CSV)")
    p.add_argument("--trials", type=_nonneg_int, default=10)
    p.add_argument("--n", type=_positive_int, default=1_000_000)
    p.add_argument("--sigma", type=_positive_float, default=0.01)
    p.add_argument("-k", type=_positive_int, default=64)
    p.add_argument("-a", "--alpha", type=_positive_int, default=10)
    p.add_argument("--design-rate", type=_unit_rate, default=0.95)
    p.add_argument(
        "--attack-rates", type=_rate_list, default=[0.5, 0.9, 0.94],
        help="comma-separated pruning rates",
    )
    p.add_argument("--two-sided", action="store_true")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    console = _Console(args)
    try:
        code = args.func(args, console)
    except (WeightFileError, SpecFormatError, PositionRangeError, OSError) as exc:
        print(f"cwmark: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (CwmarkError, ValueError) as exc:
        print(f"cwmark: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    console.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
