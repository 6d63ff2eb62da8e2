"""Command-line surface.

    cgap measure --input SET [--output CSV] [--format text|bin]
    cgap table --dist uniform|binomial --k-min A --k-max B [--n N] [--seed S] [--output CSV]
    cgap build --input SET --output IDX [--format text|bin]
    cgap query --index IDX (rank|select) --arg X [--oracle SET] [--format text|bin]
    cgap bench --index IDX [--queries Q] [--seed S] [--mix R:S]
    cgap verify --index IDX --input SET [--format text|bin]

Set text format: a header line "u n", then the n elements in increasing
order, one per line.  Binary format (--format bin): u and n as 64-bit
little-endian words, then the elements likewise.

Exit codes: 0 success, 1 usage error, 2 malformed input file or container,
3 verification failure.  Set CGAP_LOG=debug (or any logging level name) for
diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
import time
from bisect import bisect_right

from .bsd import QueryStats
from .errors import FormatError, VerificationError
from .fid import (
    Fid,
    deserialize,
    fid_build,
    fid_elements,
    fid_rank,
    fid_select,
    fid_space_report,
    serialize,
    verify_index,
)
from .gapcore import SortedSet, measure_report
from .simgen import table_csv

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_VERIFY = 3

log = logging.getLogger("cgap")

MEASURE_HEADER = (
    "u,n,d,g_max,gap,z_gamma,z_delta,binom,uh0,nh0g,c_length,huffman,cb,flag,tail,"
    "gap_pi,gap_zdelta_pi,uh0_pi,nh0g_pi,nh0g_zdelta_pi,nh0g_zdelta_cb_pi"
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; our contract reserves 2 for format errors
    def error(self, message: str) -> "None":
        raise _UsageError(message)


def read_set(path: str, fmt: str) -> SortedSet:
    """Parse a set file; FormatError messages cite the offending line."""
    if fmt == "bin":
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as e:
            raise FormatError(f"cannot read {path}: {e}") from e
        if len(raw) < 16:
            raise FormatError(f"{path}: truncated header, need 16 bytes")
        u = int.from_bytes(raw[0:8], "little")
        n = int.from_bytes(raw[8:16], "little")
        if len(raw) != 16 + 8 * n:
            raise FormatError(
                f"{path}: expected {16 + 8 * n} bytes for n={n}, found {len(raw)}"
            )
        elements = tuple(
            int.from_bytes(raw[16 + 8 * i : 24 + 8 * i], "little") for i in range(n)
        )
        try:
            return SortedSet(u, elements)
        except ValueError as e:
            raise FormatError(f"{path}: {e}") from e
    try:
        with open(path, encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise FormatError(f"cannot read {path}: {e}") from e
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError(f"{path}:1: missing 'u n' header")
    parts = lines[0].split()
    if len(parts) != 2:
        raise FormatError(f"{path}:1: header must be 'u n', got {lines[0]!r}")
    try:
        u, n = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(f"{path}:1: header must be two integers") from None
    if len(lines) - 1 != n:
        raise FormatError(f"{path}: header says n={n}, found {len(lines) - 1} elements")
    elements = []
    prev = -1
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            x = int(line)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: not an integer: {line!r}") from None
        if x <= prev:
            kind = "duplicate" if x == prev else "out-of-order"
            raise FormatError(f"{path}:{lineno}: {kind} element {x}")
        if not 0 <= x < u:
            raise FormatError(f"{path}:{lineno}: element {x} outside [0, {u})")
        prev = x
        elements.append(x)
    return SortedSet(u, tuple(elements))


def _read_index(path: str) -> Fid:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from e
    f = deserialize(blob)
    log.debug("loaded index %s: u=%d n=%d v=%d", path, f.u, f.n, f.v)
    return f


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def cmd_measure(args: argparse.Namespace) -> int:
    s = read_set(args.input, args.format)
    if s.n == 0:
        raise FormatError(f"{args.input}: cannot measure an empty set")
    r = measure_report(s)
    ints = (r.u, r.n, r.d, r.g_max, r.gap_bits, r.z_gamma_bits, r.z_delta_bits,
            r.binom_bound_bits)
    tail_ints = (r.c_length_bits, r.huffman_bits, r.cb_bits, r.flag_bits, r.tail_bits)
    per_item = (
        r.gap_per_item,
        (r.gap_bits + r.z_delta_bits) / r.n,
        r.u_h0_per_item,
        r.n_h0_g_per_item,
        r.c_length_per_item,
        (r.c_length_bits + r.cb_bits) / r.n,
    )
    row = (
        ",".join(str(x) for x in ints)
        + f",{r.u_h0_bits:.5f},{r.n_h0_g_bits:.5f},"
        + ",".join(str(x) for x in tail_ints)
        + "".join(f",{x:.5f}" for x in per_item)
    )
    _emit(MEASURE_HEADER + "\n" + row + "\n", args.output)
    return EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    if not 1 <= args.k_min <= args.k_max <= 30:
        raise _UsageError(
            f"need 1 <= k-min <= k-max <= 30, got {args.k_min}..{args.k_max}"
        )
    if args.n < 1:
        raise _UsageError(f"n must be at least 1, got {args.n}")
    t0 = time.perf_counter()
    text = table_csv(args.dist, args.k_min, args.k_max, args.n, args.seed)
    log.info("table %s k=%d..%d took %.2fs",
             args.dist, args.k_min, args.k_max, time.perf_counter() - t0)
    _emit(text, args.output)
    return EXIT_OK


def cmd_build(args: argparse.Namespace) -> int:
    s = read_set(args.input, args.format)
    try:
        f = fid_build(s)
    except ValueError as e:
        raise FormatError(f"{args.input}: {e}") from e
    blob = serialize(f)
    with open(args.output, "wb") as fh:
        fh.write(blob)
    r = fid_space_report(f)
    print(f"wrote {args.output}: {len(blob)} bytes")
    print(f"u={f.u} n={f.n} v={f.v} t_sel={f.t_sel} blocks={len(f.bsds)}")
    print(
        f"bits: streams={r.streams_bits} heads={r.heads_bits} ptrs={r.ptrs_bits}"
        f" occupancy={r.v_bits} ranks={r.r_bits} samples={r.sel_bits}"
        f" codebook={r.codebook_bits} framing={r.framing_bits}"
        f" payload={r.payload_bits} total={r.total_bits}"
    )
    print(f"per-item: {r.total_bits / f.n:.5f} bits")
    return EXIT_OK


def cmd_query(args: argparse.Namespace) -> int:
    f = _read_index(args.index)
    try:
        if args.kind == "rank":
            answer = fid_rank(f, args.arg)
        else:
            answer = fid_select(f, args.arg)
    except IndexError as e:
        raise _UsageError(str(e)) from e
    if args.oracle is not None:
        s = read_set(args.oracle, args.format)
        if (s.universe, s.n) != (f.u, f.n):
            raise VerificationError(
                f"index is (u={f.u}, n={f.n}) but oracle set is "
                f"(u={s.universe}, n={s.n})"
            )
        if args.kind == "rank":
            expected = bisect_right(s.elements, args.arg)
        else:
            expected = s.elements[args.arg]
        if answer != expected:
            raise VerificationError(
                f"{args.kind}({args.arg}) = {answer}, oracle says {expected}"
            )
    print(answer)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    if args.queries < 1:
        raise _UsageError(f"queries must be at least 1, got {args.queries}")
    try:
        rank_w, select_w = (int(t) for t in args.mix.split(":"))
    except ValueError:
        raise _UsageError(f"bad --mix {args.mix!r}, expected RANK:SELECT integers") from None
    if rank_w < 0 or select_w < 0 or rank_w + select_w == 0:
        raise _UsageError(f"bad --mix {args.mix!r}, weights must be nonnegative and not both zero")
    f = _read_index(args.index)
    elements = fid_elements(f)
    rng = random.Random(args.seed)
    kinds = rng.choices(("rank", "select"), weights=(rank_w, select_w), k=args.queries)
    queries = [
        (kind, rng.randrange(f.u) if kind == "rank" else rng.randrange(f.n))
        for kind in kinds
    ]

    stats = QueryStats()
    checksums = {"rank": 0, "select": 0}
    counts = {"rank": 0, "select": 0}
    max_decoded = max_probes = 0
    t0 = time.perf_counter()
    for kind, arg in queries:
        before_d, before_p = stats.decoded, stats.probes
        if kind == "rank":
            answer = fid_rank(f, arg, stats)
        else:
            answer = fid_select(f, arg, stats)
        max_decoded = max(max_decoded, stats.decoded - before_d)
        max_probes = max(max_probes, stats.probes - before_p)
        checksums[kind] = (checksums[kind] * 31 + answer) % (1 << 64)
        counts[kind] += 1
    fid_time = time.perf_counter() - t0

    base_checksums = {"rank": 0, "select": 0}
    t0 = time.perf_counter()
    for kind, arg in queries:
        if kind == "rank":
            answer = bisect_right(elements, arg)
        else:
            answer = elements[arg]
        base_checksums[kind] = (base_checksums[kind] * 31 + answer) % (1 << 64)
    base_time = time.perf_counter() - t0
    if base_checksums != checksums:
        raise VerificationError("fid answers disagree with the sorted-array baseline")

    log_u = (f.u - 1).bit_length()
    print(f"queries={args.queries} mix=rank:{rank_w},select:{select_w} seed={args.seed}")
    print(f"rank: count={counts['rank']} checksum={checksums['rank']}")
    print(f"select: count={counts['select']} checksum={checksums['select']}")
    print(
        f"decoded codewords/query: mean={stats.decoded / args.queries:.5f}"
        f" max={max_decoded} bound={log_u}"
    )
    print(f"select probes/query: max={max_probes}")
    print("baseline agreement: ok")
    print(f"fid: {fid_time:.3f}s, {args.queries / fid_time:.0f} queries/s")
    print(f"baseline: {base_time:.3f}s, {args.queries / base_time:.0f} queries/s")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    f = _read_index(args.index)
    s = read_set(args.input, args.format)
    verify_index(f, s)
    print(f"ok: index matches set (u={f.u}, n={f.n})")
    return EXIT_OK


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "bin"), default="text",
                   help="set file format (default text)")


def build_parser() -> _Parser:
    parser = _Parser(prog="cgap", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("measure", help="measure one set file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    _add_format(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("table", help="regenerate a simulation table")
    p.add_argument("--dist", choices=("uniform", "binomial"), required=True)
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=15)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("build", help="build an index container from a set file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="answer one rank/select query")
    p.add_argument("--index", required=True)
    p.add_argument("kind", choices=("rank", "select"))
    p.add_argument("--arg", type=int, required=True)
    p.add_argument("--oracle", default=None,
                   help="set file to check the answer against")
    _add_format(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="measure query throughput and decode work")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mix", default="1:1", help="rank:select weights (default 1:1)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="full index-vs-set equivalence check")
    p.add_argument("--index", required=True)
    p.add_argument("--input", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_verify)

    return parser


def _configure_logging() -> None:
    level = os.environ.get("CGAP_LOG")
    if level:
        logging.basicConfig(
            level=getattr(logging, level.upper(), logging.INFO),
            format="%(levelname)s %(name)s: %(message)s",
        )


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
