"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 pipeline error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import aes, haar
from .errors import StegoError
from .image_io import atomic_write, read_pgm, write_pgm
from .pipeline import EmbedParams, embed, extract
from .selftest import run_checks
from .sweep import parse_grid, sweep, to_csv

EXIT_OK, EXIT_USAGE, EXIT_PIPELINE, EXIT_IO = 0, 1, 2, 3
KEY_ENV = "STEGOWAVE_KEY"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


def _hex16(text: str) -> bytes:
    try:
        return aes.parse_key(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--key", type=_hex16, help=f"32 hex chars; falls back to ${KEY_ENV}")
    p.add_argument("--k", type=_positive_float, default=20.0, help="hard threshold K (default 20)")
    p.add_argument("--bps", type=int, choices=(1, 2, 3), default=2, help="bits per symbol (default 2)")
    p.add_argument("--epsilon", type=_positive_float, default=1.5, help="error margin (default 1.5)")
    p.add_argument("--permissive", action="store_true",
                   help="allow any k above the largest amplitude; skip the self-check")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stegowave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", help="hide a file in a cover image")
    p.add_argument("--cover", required=True, help="cover image, binary PGM")
    p.add_argument("--secret", required=True, help="file to hide")
    p.add_argument("--out", required=True, help="stego image to write")
    p.add_argument("--iv", type=_hex16, help="fixed IV (32 hex chars), for reproducible runs")
    _add_params(p)

    p = sub.add_parser("extract", help="recover a hidden file from a stego image")
    p.add_argument("--stego", required=True)
    p.add_argument("--out", required=True)
    _add_params(p)

    p = sub.add_parser("sweep", help="capacity/quality table over a (k, bps) grid")
    p.add_argument("--cover", required=True)
    p.add_argument("--grid", default="default",
                   help='"default" (18-point table) or "k:bps,k:bps,..."')
    p.add_argument("--key", type=_hex16, help=f"32 hex chars; falls back to ${KEY_ENV}, then zeros")
    p.add_argument("--seed", type=int, default=0, help="payload RNG seed")
    p.add_argument("--out", help="CSV path (default: standard output)")

    sub.add_parser("selftest", help="run built-in known-answer and round-trip checks")

    p = sub.add_parser("haar-dump", help="print the Haar matrix as CSV")
    p.add_argument("--n", type=int, required=True)
    return parser


def _key(args, required: bool = True) -> bytes:
    if args.key is not None:
        return args.key
    env = os.environ.get(KEY_ENV)
    if env:
        try:
            return aes.parse_key(env)
        except ValueError as exc:
            raise UsageError(f"${KEY_ENV}: {exc}") from None
    if required:
        raise UsageError(f"no key given: use --key or set ${KEY_ENV}")
    return bytes(16)


def _params(args) -> EmbedParams:
    return EmbedParams(k=args.k, bps=args.bps, epsilon=args.epsilon, strict=not args.permissive)


def cmd_embed(args) -> int:
    key = _key(args)
    params = _params(args)
    params.check_separation()
    cover = read_pgm(args.cover)
    with open(args.secret, "rb") as fh:
        payload = fh.read()
    stego, stats = embed(cover, payload, key, params, args.iv)
    write_pgm(args.out, stego)
    sys.stdout.write(stats.as_lines())
    return EXIT_OK


def cmd_extract(args) -> int:
    key = _key(args)
    params = _params(args)
    payload = extract(read_pgm(args.stego), key, params)
    atomic_write(args.out, payload)
    print(f"bytes={len(payload)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        grid = parse_grid(args.grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for k, bps in grid:
        if bps not in (1, 2, 3) or not k > 0:
            raise UsageError(f"bad grid point {k:g}:{bps}")
    text = to_csv(sweep(read_pgm(args.cover), _key(args, required=False), grid, seed=args.seed))
    if args.out:
        atomic_write(args.out, text.encode())
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_checks()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_PIPELINE


def cmd_haar_dump(args) -> int:
    try:
        sys.stdout.write(haar.haar_csv(args.n))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


COMMANDS = {
    "embed": cmd_embed,
    "extract": cmd_extract,
    "sweep": cmd_sweep,
    "selftest": cmd_selftest,
    "haar-dump": cmd_haar_dump,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"stegowave: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        where = f": {exc.filename}" if exc.filename else ""
        print(f"stegowave: I/O error{where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except StegoError as exc:
        print(f"stegowave: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
