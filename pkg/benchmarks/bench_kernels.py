#!/usr/bin/env python3
"""Benchmark the numba kernel builds against the pure-python originals.

Every hot kernel is registered in ``khbraid.linalg.KERNELS`` with both
builds.  This script swaps one build at a time into the live module, times
matched workloads on identical inputs, verifies both builds return identical
results, and finally times a fresh end-to-end process under
``KHBRAID_PURE_PYTHON=1`` versus the default path — the selection mechanism a
user actually exercises.

Usage:
    python benchmarks/bench_kernels.py [--repeat N] [--word STRANDS:LETTERS]
                                       [--skip-subprocess]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from khbraid import homalg, linalg
from khbraid.braid import BraidWord
from khbraid.cube import GradedComplex, d_squared_zero
from khbraid.frobenius import theory

PUBLIC = {
    "_trace_circles_all": "trace_circles_all",
    "_build_edges": "build_edges",
    "_compose_is_zero": "compose_is_zero",
    "_reduce_lows": "reduce_lows",
    "_reduce_cols": "reduce_cols",
    "_rref_dense": "rref_dense",
}

DEFAULT_WORD = "3:1 2 -1 2 2 -1 1 2 -2"


def use_build(mode: str) -> None:
    for private, public in PUBLIC.items():
        fn = linalg.KERNELS[private][mode]
        if fn is None:
            raise SystemExit(
                "numba builds are unavailable in this environment; "
                "only the python build can run"
            )
        setattr(linalg, public, fn)


def parse_word(text: str) -> BraidWord:
    strands, _, rest = text.partition(":")
    letters = tuple(int(x) for x in rest.split())
    return BraidWord(int(strands), letters)


def make_workloads(word: BraidWord, p: int, rng: np.random.Generator):
    """(kernel, label, callable) triples; callables return a comparable value."""
    th = theory("BN", p)
    dense = (rng.integers(0, p, size=(160, 240))).astype(np.int64)

    def construct():
        cx = GradedComplex(word, th)
        return (cx.total_states, int(cx.counts.sum()))

    def edges():
        cx = GradedComplex(word, th)
        src, dst, co, du, dv = cx.edges
        return (len(src), int(co.sum()), int(du.sum()), int(dv.sum()))

    def d_squared():
        cx = GradedComplex(word, th)
        return d_squared_zero(cx)

    def barcodes():
        cx = GradedComplex(word, th)
        return tuple(sorted(homalg.all_barcodes(cx).items()))

    def presentation():
        cx = GradedComplex(word, th)
        pres = homalg.homology_u(cx, 0)
        return tuple((s.order, s.q) for s in pres.summands)

    def dense_nullspace():
        basis = linalg.nullspace_dense(dense.copy(), p)
        return (basis.shape, int(basis.sum()))

    return [
        ("trace_circles_all", "cube construction", construct),
        ("build_edges", "differential generation", edges),
        ("compose_is_zero", "d^2 check", d_squared),
        ("reduce_lows", "barcodes (all degrees)", barcodes),
        ("reduce_cols", "H^0 presentation", presentation),
        ("rref_dense", "dense nullspace 160x240", dense_nullspace),
    ]


def bench_kernels(word: BraidWord, p: int, repeat: int) -> None:
    rng = np.random.default_rng(7)
    workloads = make_workloads(word, p, rng)
    print(f"word: {word.strands} strands, {len(word)} letters; p = {p}; "
          f"best of {repeat}\n")
    header = f"{'kernel':20s} {'workload':26s} {'python':>10s} {'numba':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for kernel, label, fn in workloads:
        results, best = {}, {}
        for mode in ("python", "numba"):
            use_build(mode)
            results[mode] = fn()  # warm (and JIT-compile on first numba call)
            times = []
            for _ in range(repeat):
                t0 = time.perf_counter()
                out = fn()
                times.append(time.perf_counter() - t0)
            assert out == results[mode]
            best[mode] = min(times)
        assert results["python"] == results["numba"], f"{kernel}: builds disagree"
        ratio = best["python"] / best["numba"] if best["numba"] > 0 else float("inf")
        print(
            f"{kernel:20s} {label:26s} {best['python'] * 1e3:9.1f}ms "
            f"{best['numba'] * 1e3:9.1f}ms {ratio:7.1f}x"
        )
    use_build("numba")


SNIPPET = """
import time
t0 = time.perf_counter()
from khbraid.braid import BraidWord
from khbraid.cube import build_complex, d_squared_zero
from khbraid.frobenius import theory
from khbraid import homalg
word = BraidWord({strands}, {letters})
cx = build_complex(word, theory("BN", 3))
assert d_squared_zero(cx)
homalg.all_barcodes(cx)
homalg.homology_u(cx, 0)
print(f"{{time.perf_counter() - t0:.2f}}s (including import)")
"""


def bench_subprocess(word: BraidWord) -> None:
    print("\nend-to-end fresh process (build + d^2 + barcodes + H^0):")
    code = SNIPPET.format(strands=word.strands, letters=tuple(word.letters))
    for label, extra in (("default (numba)", {}), ("KHBRAID_PURE_PYTHON=1", {"KHBRAID_PURE_PYTHON": "1"})):
        env = {k: v for k, v in os.environ.items() if k != "KHBRAID_PURE_PYTHON"}
        env.update(extra)
        run = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        if run.returncode:
            sys.exit(f"subprocess failed:\n{run.stderr}")
        print(f"  {label:24s} {run.stdout.strip()}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--word", default=DEFAULT_WORD, help="STRANDS:LETTERS, e.g. '3:1 2 -1'")
    ap.add_argument("--char", type=int, default=3)
    ap.add_argument("--skip-subprocess", action="store_true")
    args = ap.parse_args()
    if not linalg.NUMBA_AVAILABLE:
        sys.exit("numba is not importable; nothing to compare")
    word = parse_word(args.word)
    bench_kernels(word, args.char, args.repeat)
    if not args.skip_subprocess:
        bench_subprocess(word)


if __name__ == "__main__":
    main()
