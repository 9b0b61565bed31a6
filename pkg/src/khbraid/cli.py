"""Command-line front end: braid files in, JSON/CSV reports out.

Commands
--------
``homology``
    Per-bidegree table.  With ``--theory bn``: free rank and torsion orders
    of H^i over F_p[U] at each (i, q).  With ``--theory kh``: dim H^{i,q}
    over F_p.  The two-variable theories have no implemented decomposition,
    so requesting them here is a usage error.
``invariants``
    One record per braid: sl, c, c_bar, psi_vanishes, s (null with a reason
    for multi-component closures), plus the convention metadata needed to
    compare against other implementations.
``verify``
    Drive the random transverse-move harness on each braid; write its
    JSON-lines trace (to ``--out`` when given, else stdout) followed by one
    summary record per braid.  Exits 1 with the counterexample record in the
    summary if any assertion fails.  Traces are byte-reproducible per seed.
``check-c-simple``
    Evaluate the sufficient conditions under which c is determined by s and
    sl alone, and confirm s - 1 == sl + 2c on every row where a condition
    holds.  Multi-component closures are reported as skipped.  Exits 1 if
    the identity fails on a qualifying row.
``batch``
    Same records as ``invariants``, but braids are computed concurrently on
    a thread pool; output is buffered back into input order.

Input is braid text (see :func:`khbraid.braid.parse_braid_text`): one entry
per line, ``name : strands : letters``, with ``#`` comments.  The positional
INPUT is a file path, ``-`` for stdin, or an inline entry (recognised by the
``:`` it must contain).

Exit codes: 0 success, 1 assertion/consistency failure, 2 usage/parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .braid import BraidParseError, BraidWord, parse_braid_text
from .cube import build_complex
from .frobenius import UnsupportedTheoryError, theory
from .homalg import ConsistencyError, all_barcodes, kh_table
from .invariants import CONVENTIONS, c_simplicity_check, invariant_report
from .moves import invariance_harness

# commands that need the homology engine accept only the two theories whose
# module category is implemented; vt/big complexes build but do not decompose
ENGINE_THEORIES = ("bn", "kh")


# ---------------------------------------------------------------------------
# input / output plumbing


def _load_entries(arg: str) -> list[tuple[str, BraidWord]]:
    """Resolve INPUT: stdin, a file path, or an inline single entry."""
    if arg == "-":
        return parse_braid_text(sys.stdin.read())
    if os.path.exists(arg):
        try:
            with open(arg, encoding="utf-8") as fh:
                return parse_braid_text(fh.read())
        except OSError as exc:
            raise BraidParseError(f"cannot read {arg!r}: {exc.strerror}") from exc
    if ":" in arg:
        return parse_braid_text(arg)
    raise BraidParseError(
        f"{arg!r} is neither an existing file nor an inline "
        "'name : strands : letters' entry"
    )


def _csv_cell(value):
    if isinstance(value, str):
        return value
    return json.dumps(value, separators=(",", ":"))


def _render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in rows)
    cols: list[str] = []
    for row in rows:
        for key in row:
            if key not in cols:
                cols.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) if c in row else "" for c in cols])
    return buf.getvalue()


def _write_text(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _word_str(w: BraidWord) -> str:
    return f"{w.strands}:" + " ".join(str(x) for x in w.letters)


def _theory_for(args, allowed=ENGINE_THEORIES) -> str:
    tag = args.theory.lower()
    if tag not in allowed:
        raise UnsupportedTheoryError(
            f"theory {args.theory!r} is not supported by '{args.command}' "
            f"(choose from: {', '.join(allowed)})"
        )
    theory(tag, args.char)  # validates the tag/characteristic pair
    return tag


# ---------------------------------------------------------------------------
# commands


def _invariant_row(name: str, w: BraidWord, p: int, tag: str) -> dict:
    rep = invariant_report(w, p=p)
    row = {
        "name": name,
        "strands": w.strands,
        "letters": list(w.letters),
        "writhe": w.writhe,
        "sl": rep.sl,
        "c": rep.c,
        "c_bar": rep.c_bar,
        "psi_vanishes": rep.psi_vanishes,
        "s": rep.s,
        "theory": tag,
        "char": p,
        "conventions": CONVENTIONS,
    }
    if rep.s is None:
        row["s_reason"] = (
            f"s is defined for knots; this closure has {w.components()} components"
        )
    return row


def cmd_invariants(args) -> int:
    tag = _theory_for(args)
    rows = [
        _invariant_row(name, w, args.char, tag)
        for name, w in _load_entries(args.input)
    ]
    _write_text(_render(rows, args.format), args.out)
    return 0


def cmd_batch(args) -> int:
    tag = _theory_for(args)
    entries = _load_entries(args.input)
    if entries:
        with ThreadPoolExecutor(max_workers=min(8, len(entries))) as pool:
            rows = list(
                pool.map(lambda e: _invariant_row(e[0], e[1], args.char, tag), entries)
            )
    else:
        rows = []
    _write_text(_render(rows, args.format), args.out)
    return 0


def cmd_homology(args) -> int:
    tag = _theory_for(args)
    rows: list[dict] = []
    for name, w in _load_entries(args.input):
        cx = build_complex(w, theory(tag, args.char))
        base = {"name": name, "theory": tag, "char": args.char}
        if tag == "kh":
            for (i, q), dim in sorted(kh_table(cx).items()):
                rows.append({**base, "i": i, "q": q, "dim": dim})
        else:
            per: dict[tuple[int, int], dict] = {}
            for i, bc in all_barcodes(cx).items():
                for q in bc.free:
                    cell = per.setdefault((i, q), {"free_rank": 0, "torsion": []})
                    cell["free_rank"] += 1
                for q, order in bc.torsion:
                    cell = per.setdefault((i, q), {"free_rank": 0, "torsion": []})
                    cell["torsion"].append(order)
            for (i, q) in sorted(per):
                rows.append(
                    {
                        **base,
                        "i": i,
                        "q": q,
                        "free_rank": per[(i, q)]["free_rank"],
                        "torsion": sorted(per[(i, q)]["torsion"]),
                    }
                )
    _write_text(_render(rows, args.format), args.out)
    return 0


def cmd_verify(args) -> int:
    _theory_for(args)
    trace: list[str] = []
    summaries: list[dict] = []
    all_ok = True
    for name, w in _load_entries(args.input):
        report = invariance_harness(
            w,
            seed=args.seed,
            n_moves=args.moves,
            allow_negative=args.allow_negative,
            p=args.char,
        )
        all_ok = all_ok and report.ok
        trace.extend(report.trace)
        row = {
            "name": name,
            "ok": report.ok,
            "seed": report.seed,
            "moves_applied": report.moves_applied,
            "start": _word_str(report.start),
            "end": _word_str(report.end),
            "r1n_signs": report.r1n_signs,
            "relation_checks": report.relation_checks,
        }
        if report.failure is not None:
            row["failure"] = report.failure
        summaries.append(row)
    _write_text("".join(line + "\n" for line in trace), args.out)
    for row in summaries:
        print(json.dumps(row, separators=(",", ":")))
    return 0 if all_ok else 1


def cmd_check_c_simple(args) -> int:
    _theory_for(args)
    rows: list[dict] = []
    all_ok = True
    for name, w in _load_entries(args.input):
        if w.components() != 1:
            rows.append(
                {
                    "name": name,
                    "skipped": (
                        f"conditions are defined for knots; this closure has "
                        f"{w.components()} components"
                    ),
                }
            )
            continue
        flags = c_simplicity_check(w, p=args.char)
        rep = invariant_report(w, p=args.char)
        any_condition = any(flags.values())
        row = {
            "name": name,
            "sl": rep.sl,
            "c": rep.c,
            "s": rep.s,
            **flags,
            "any_condition": any_condition,
        }
        if any_condition:
            row["identity_holds"] = rep.s - 1 == rep.sl + 2 * rep.c
            all_ok = all_ok and row["identity_holds"]
        rows.append(row)
    _write_text(_render(rows, args.format), args.out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit int")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("move count must be non-negative")
    return value


_COMMANDS = (
    ("homology", cmd_homology, "per-bidegree homology table"),
    ("invariants", cmd_invariants, "transverse invariants per braid"),
    ("verify", cmd_verify, "run the transverse-move invariance harness"),
    ("check-c-simple", cmd_check_c_simple, "c-simplicity conditions and identity"),
    ("batch", cmd_batch, "invariants for many braids, computed concurrently"),
)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--theory",
        default="bn",
        choices=["kh", "bn", "vt", "big"],
        help="coefficient theory (default: bn)",
    )
    common.add_argument(
        "--char", type=int, default=3, metavar="P", help="prime characteristic (default: 3)"
    )
    common.add_argument(
        "--format", default="json", choices=["json", "csv"], help="output format"
    )
    common.add_argument(
        "--seed", type=_u64, default=0, metavar="N", help="harness RNG seed (u64)"
    )
    common.add_argument(
        "--moves", type=_nonneg, default=20, metavar="N", help="harness move count"
    )
    common.add_argument(
        "--allow-negative",
        action="store_true",
        help="let the harness apply negative stabilizations",
    )
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument(
        "input",
        metavar="INPUT",
        help="braid file path, '-' for stdin, or an inline 'name : strands : letters'",
    )
    parser = argparse.ArgumentParser(
        prog="khbraid",
        description="homology of braid closures and transverse invariants",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for cmd_name, fn, help_text in _COMMANDS:
        sp = sub.add_parser(cmd_name, parents=[common], help=help_text, description=help_text)
        sp.set_defaults(func=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BraidParseError as exc:
        print(f"khbraid: parse error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedTheoryError as exc:
        print(f"khbraid: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"khbraid: consistency failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
