"""revfp command line: build, sim, verify, report, check-decompositions.

Exit status: 0 pass, 1 mismatch, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import netlist
from .core import CircuitError, cost_summary, load_cost_table
from .refmodel import OutOfRange, UnsupportedOperand, oracle_add_rtz, pair_status, to_hex

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
DECOMP_RECORD = "decomposition_report.json"


class UsageError(Exception):
    pass


def _hex_word(text: str) -> int:
    t = text.lower().removeprefix("0x")
    if not t or len(t) > 8 or any(ch not in "0123456789abcdef" for ch in t):
        raise argparse.ArgumentTypeError(f"not a 32-bit hex word: {text!r}")
    return int(t, 16)


# ---------------------------------------------------------------------------
# verification sweep

def random_pairs(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded normalized operand pairs; half draw nearby exponents so alignment,
    cancellation and the 26-place clamp are all exercised."""
    rng = np.random.default_rng(seed)
    ea = rng.integers(1, 255, n)
    near = np.clip(ea + rng.integers(-30, 31, n), 1, 254)
    far = rng.integers(1, 255, n)
    eb = np.where(rng.random(n) < 0.5, near, far)
    a = (rng.integers(0, 2, n) << 31) | (ea << 23) | rng.integers(0, 1 << 23, n)
    b = (rng.integers(0, 2, n) << 31) | (eb << 23) | rng.integers(0, 1 << 23, n)
    return a.astype(np.uint64), b.astype(np.uint64)


def read_vectors(path: str) -> list[tuple[int, int, int]]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise UsageError(f"{path}:{lineno}: expected 'a b expected', got {line!r}")
            try:
                out.append(tuple(_hex_word(p) for p in parts))
            except argparse.ArgumentTypeError as e:
                raise UsageError(f"{path}:{lineno}: {e}") from None
    return out


def verify_pairs(a, b, expected=None, art=None) -> dict:
    """Circuit vs oracle (or supplied expectations) plus ancilla cleanliness."""
    from .pipeline import run_batch
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    status = [pair_status(int(x), int(y)) for x, y in zip(a, b)]
    keep = np.array([s == "ok" for s in status], dtype=bool)
    skipped: dict[str, int] = {}
    for s in status:
        if s != "ok":
            skipped[s] = skipped.get(s, 0) + 1
    idx = np.flatnonzero(keep)
    run = run_batch(a[idx], b[idx], art)
    first = None
    mismatches = 0
    for k, i in enumerate(idx):
        want = expected[i] if expected is not None else oracle_add_rtz(int(a[i]), int(b[i]))
        got = int(run.sums[k])
        if got != want:
            mismatches += 1
            if first is None:
                first = (to_hex(a[i]), to_hex(b[i]), to_hex(got), to_hex(want))
    return {"pairs": int(len(a)), "checked": int(len(idx)), "skipped": skipped,
            "mismatches": mismatches, "first_counterexample": first,
            "dirty_wires": len(run.dirty)}


def _print_verify(rep: dict) -> int:
    print(f"pairs      {rep['pairs']}")
    print(f"checked    {rep['checked']}")
    for k in sorted(rep["skipped"]):
        print(f"skipped    {k}: {rep['skipped'][k]}")
    print(f"mismatches {rep['mismatches']}")
    print(f"dirty      {rep['dirty_wires']}")
    if rep["first_counterexample"]:
        a, b, got, want = rep["first_counterexample"]
        print(f"first counterexample: {a} + {b} -> {got}, expected {want}")
    ok = rep["mismatches"] == 0 and rep["dirty_wires"] == 0
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# commands

def cmd_build(args) -> int:
    from .pipeline import assemble_fp_adder
    art = assemble_fp_adder()
    try:
        netlist.dump(art.forward, args.out)
    except OSError as e:
        raise UsageError(f"cannot write {args.out}: {e}") from None
    rep = cost_summary(art.forward, load_cost_table(), art.stage_claims)
    print(f"wrote {args.out}: {art.forward.width} wires, {len(art.forward.gates)} gates, "
          f"QC {rep.quantum_cost}")
    return EXIT_OK


def cmd_sim(args) -> int:
    from .pipeline import UnsupportedPair, run_fp_add
    try:
        got, diag = run_fp_add(args.a, args.b, trace=args.trace)
    except UnsupportedPair as e:
        raise UsageError(str(e)) from None
    print(f"{to_hex(args.a)} + {to_hex(args.b)} = {to_hex(got)}")
    if args.trace:
        for name, regs in diag["stages"].items():
            vals = "  ".join(f"{r}={v[0]:#x}" for r, v in regs.items())
            print(f"  [{name}] {vals}")
        print(f"  dirty wires after wrap: {len(diag['dirty_wires'])}")
    try:
        want = oracle_add_rtz(args.a, args.b)
    except OutOfRange as e:
        print(f"oracle: out of model ({e.kind})")
        return EXIT_OK
    except UnsupportedOperand as e:
        raise UsageError(str(e)) from None
    print(f"oracle  {to_hex(want)}  {'match' if want == got else 'MISMATCH'}")
    return EXIT_OK if want == got and not diag["dirty_wires"] else EXIT_MISMATCH


def cmd_verify(args) -> int:
    if args.vectors:
        vecs = read_vectors(args.vectors)
        a = [v[0] for v in vecs]
        b = [v[1] for v in vecs]
        bad = [f"{to_hex(x)} {to_hex(y)}" for x, y in zip(a, b)
               if pair_status(x, y) == "unsupported"]
        if bad:
            raise UsageError(f"unsupported operands in vector file: {bad[0]}")
        rep = verify_pairs(a, b, expected=[v[2] for v in vecs])
    else:
        if args.random is None or args.seed is None:
            raise UsageError("verify needs --random N --seed S or --vectors FILE")
        if args.random < 1:
            raise UsageError("--random must be positive")
        a, b = random_pairs(args.random, args.seed)
        rep = verify_pairs(a, b)
    return _print_verify(rep)


def cmd_report(args) -> int:
    from .report import build_report, format_report
    if not args.tables:
        raise UsageError("report needs --tables")
    rep = build_report(load_cost_table())
    sys.stdout.write(format_report(rep))
    if args.ledger:
        try:
            with open(args.ledger, "w") as fh:
                json.dump(rep, fh, indent=1, sort_keys=True)
                fh.write("\n")
        except OSError as e:
            raise UsageError(f"cannot write {args.ledger}: {e}") from None
    return EXIT_OK


def cmd_check_decompositions(args) -> int:
    from .cliffordt import verify_decompositions
    t0 = time.perf_counter()
    rows = verify_decompositions()
    elapsed = time.perf_counter() - t0
    print(f"{'gate':<9}{'T-count':>8}{'T-depth':>8}{'expect':>8}{'max dev':>11}  status")
    for r in rows:
        exp = "-" if r.expected_t_depth is None else str(r.expected_t_depth)
        print(f"{r.name:<9}{r.t_count:>8}{r.t_depth:>8}{exp:>8}{r.max_deviation:>11.1e}  "
              f"{'ok' if r.passed else 'FAIL'}")
    with open(DECOMP_RECORD, "w") as fh:
        json.dump([r.as_dict() for r in rows], fh, indent=1)
        fh.write("\n")
    print(f"record written to {DECOMP_RECORD} ({elapsed:.2f} s)")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_MISMATCH


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="revfp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("build", help="assemble the adder and write its netlist")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_build)

    s = sub.add_parser("sim", help="add two binary32 words on the circuit")
    s.add_argument("--a", required=True, type=_hex_word)
    s.add_argument("--b", required=True, type=_hex_word)
    s.add_argument("--trace", action="store_true")
    s.set_defaults(fn=cmd_sim)

    s = sub.add_parser("verify", help="compare the circuit with the reference model")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--random", type=int, metavar="N")
    g.add_argument("--vectors", metavar="FILE")
    s.add_argument("--seed", type=int)
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("report", help="cost tables and discrepancy ledger")
    s.add_argument("--tables", action="store_true")
    s.add_argument("--ledger", metavar="PATH")
    s.set_defaults(fn=cmd_report)

    s = sub.add_parser("check-decompositions", help="verify the Clifford+T decompositions")
    s.set_defaults(fn=cmd_check_decompositions)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, CircuitError, FileNotFoundError) as e:
        print(f"revfp: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
