"""Command-line front end.

    mtrank rank2 -m "0 1; 1 1"
    mtrank delta -m "0 1; 1 1" --nmax 6 --format csv
    mtrank corpus --dim 2 --count 100 --seed 7 --format json
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from math import inf
from typing import Sequence

from .errors import MtrankError, NonSquare, ParseError
from .exact import Matrix, charpoly, det, identity
from .nielsen import NielsenVerdict, infinite_nielsen_probe, nielsen_count_d2
from .polynomials import finite_order, format_poly
from .powers import delta_scan, min_2gen_index
from .rank2 import DEFAULT_PRIMES, Verdict, decide_rank2_d2, rank_report, vrank
from .spectral import growth_K, matrix_spectrum

COMMANDS = ("rank2", "rank", "vrank", "delta", "powers", "nielsen", "spectral", "corpus")


@dataclass
class RunConfig:
    bound: int = 5
    primes: list[int] = field(default_factory=lambda: list(DEFAULT_PRIMES))
    n_max: int = 20
    m_max: int = 4
    height: int = 10
    exp_range: int = 12
    bits: int = 96
    seed: int = 0
    format: str = "text"
    dim: int = 2
    count: int = 100
    steps: int = 12

    def __post_init__(self):
        for name in ("bound", "n_max", "m_max", "bits", "dim", "count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("height", "exp_range", "seed", "steps"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if any(p < 2 for p in self.primes):
            raise ValueError("primes must be >= 2")


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


def _parse_rows_text(text: str) -> list[list[int]]:
    rows = []
    pieces = text.split(";")
    offset = 0
    for k, chunk in enumerate(pieces):
        row = []
        for tok in re.finditer(r"[^\s,]+", chunk):
            try:
                row.append(int(tok.group()))
            except ValueError:
                raise ParseError(f"not an integer: {tok.group()!r}", *_position(text, offset + tok.start())) from None
        if row:
            rows.append(row)
        elif k < len(pieces) - 1:
            raise ParseError("empty row", *_position(text, offset))
        offset += len(chunk) + 1
    return rows


def parse_matrix(text: str) -> Matrix:
    """``"0 1; 1 1"`` or a JSON nested array ``"[[0,1],[1,1]]"``."""
    s = text.strip()
    if not s:
        raise ParseError("empty matrix", 1, 1)
    if s.startswith("["):
        try:
            rows = json.loads(s)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, e.lineno, e.colno) from None
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ParseError("expected a list of rows", 1, 1)
        for r in rows:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise ParseError(f"not an integer: {x!r}", 1, 1)
    else:
        rows = _parse_rows_text(s)
    if not rows:
        raise ParseError("empty matrix", 1, 1)
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"row {i + 1} has {len(r)} entries, expected {width}", 1, i + 1)
    if width != len(rows):
        raise NonSquare(f"{len(rows)}x{width} matrix is not square")
    return [list(map(int, r)) for r in rows]


def format_matrix(M: Matrix) -> str:
    return "; ".join(" ".join(str(x) for x in row) for row in M)


def random_unimodular(d: int, steps: int, seed: int) -> Matrix:
    """Product of ``steps`` seeded elementary matrices (det ±1 by construction)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = random.Random(seed)
    M = identity(d)
    for _ in range(steps):
        kind = rng.randrange(3) if d > 1 else 2
        if kind == 0:
            i, j = rng.sample(range(d), 2)
            k = rng.choice([-3, -2, -1, 1, 2, 3])
            M[i] = [a + k * b for a, b in zip(M[i], M[j])]
        elif kind == 1:
            i, j = rng.sample(range(d), 2)
            M[i], M[j] = M[j], M[i]
        else:
            i = rng.randrange(d)
            M[i] = [-a for a in M[i]]
    return M


def _jsonable(x):
    if isinstance(x, float) and x == inf:
        return "inf"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _cmd_rank2(M, cfg):
    if len(M) == 2:
        dec = decide_rank2_d2(M)
        return {"verdict": dec.verdict.value,
                "witness": list(dec.witness.v) if dec.witness else None,
                "form": [dec.form.a, dec.form.b, dec.form.c],
                "method": "binary quadratic form"}
    rep = rank_report(M, cfg.bound, cfg.primes)
    out = {"verdict": rep.verdict.value,
           "witness": list(rep.witness.v) if rep.witness else None,
           "method": "box search",
           "search_bound": cfg.bound}
    if rep.filters:
        out["filters"] = rep.filters.to_dict()
    return out


def _cmd_rank(M, cfg):
    return rank_report(M, cfg.bound, cfg.primes).to_dict()


def _cmd_vrank(M, cfg):
    return {"vrank": vrank(M), "charpoly": format_poly(charpoly(M))}


def _cmd_delta(M, cfg):
    return delta_scan(M, cfg.n_max, cfg.bound).to_dict()


def _cmd_powers(M, cfg):
    seq = delta_scan(M, cfg.n_max, cfg.bound)
    mins = {}
    for n in (1, 2, 4, 8):
        if n <= cfg.n_max:
            mins[str(n)] = min_2gen_index(M, n, cfg.m_max, min(cfg.bound, 4)).to_dict()
    return {**seq.to_dict(), "min_2gen_index": mins}


def _cmd_nielsen(M, cfg):
    if len(M) == 2:
        return nielsen_count_d2(M).to_dict()
    return infinite_nielsen_probe(M, cfg.height, cfg.exp_range, cfg.bits).to_dict()


def _cmd_spectral(M, cfg):
    spec = matrix_spectrum(M, cfg.bits)
    deltas = None
    if spec.moduli_distinct():
        seq = delta_scan(M, cfg.n_max, cfg.bound)
        deltas = {n: v for n, v in zip(seq.ns, seq.values) if v != inf}
    g = growth_K(spec, deltas)
    return {
        "eigenvalues": [[float(z.real), float(z.imag)] for z in spec.eigenvalues()],
        "moduli": [float(abs(z)) for z in spec.eigenvalues()],
        "moduli_distinct": g.moduli_distinct,
        "K": g.K,
        "log_ratio_errors": {str(k): v for k, v in g.log_ratio_errors.items()},
    }


def _cmd_corpus(_M, cfg):
    entries = []
    counts: dict[str, int] = {}
    for i in range(cfg.count):
        A = random_unimodular(cfg.dim, cfg.steps, cfg.seed * 1_000_003 + i)
        if cfg.dim == 2:
            verdict = decide_rank2_d2(A).verdict.value
        else:
            verdict = rank_report(A, min(cfg.bound, 2), cfg.primes).verdict.value
        counts[verdict] = counts.get(verdict, 0) + 1
        entries.append({"index": i, "matrix": A, "det": det(A), "verdict": verdict,
                        "finite_order": finite_order(A)})
    return {"entries": entries, "verdict_counts": dict(sorted(counts.items()))}


_HANDLERS = {
    "rank2": _cmd_rank2,
    "rank": _cmd_rank,
    "vrank": _cmd_vrank,
    "delta": _cmd_delta,
    "powers": _cmd_powers,
    "nielsen": _cmd_nielsen,
    "spectral": _cmd_spectral,
    "corpus": _cmd_corpus,
}


def run_command(cmd: str, M: Matrix | None, cfg: RunConfig, timings: bool = False) -> dict:
    """Run one command and return the self-describing report document."""
    if cmd not in _HANDLERS:
        raise ValueError(f"unknown command {cmd!r}")
    if cmd != "corpus" and M is None:
        raise ValueError(f"{cmd} needs a matrix (-m or --file)")
    t0 = time.perf_counter()
    results = _HANDLERS[cmd](M, cfg)
    doc = {"command": cmd, "config": asdict(cfg), "matrix": M, "results": _jsonable(results)}
    if timings:
        doc["timings"] = {"seconds": round(time.perf_counter() - t0, 6)}
    return doc


def _is_unknown(doc: dict) -> bool:
    r = doc["results"]
    v = r.get("verdict")
    if v in (Verdict.UNKNOWN.value, NielsenVerdict.UNKNOWN.value):
        return True
    if doc["command"] == "corpus":
        return Verdict.UNKNOWN.value in r.get("verdict_counts", {})
    return False


def _csv(doc: dict) -> str:
    r = doc["results"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "delta" in r and "n" in r:
        w.writerow(["n", "delta", "is_rank2_power"])
        for n, dv in zip(r["n"], r["delta"]):
            w.writerow([n, dv, str(dv == 1).lower()])
    elif doc["command"] == "corpus":
        w.writerow(["index", "matrix", "det", "verdict"])
        for e in r["entries"]:
            w.writerow([e["index"], format_matrix(e["matrix"]), e["det"], e["verdict"]])
    else:
        w.writerow(["key", "value"])
        for k in sorted(r):
            w.writerow([k, json.dumps(r[k], sort_keys=True)])
    return buf.getvalue()


def _text(doc: dict) -> str:
    r = doc["results"]
    lines = [f"command: {doc['command']}"]
    if doc["matrix"] is not None:
        lines.append(f"matrix: {format_matrix(doc['matrix'])}")
    if doc["command"] == "corpus":
        lines.append(f"entries: {len(r['entries'])}")
        for k, v in r["verdict_counts"].items():
            lines.append(f"  {k}: {v}")
    elif "delta" in r and "n" in r:
        lines.append(f"witness: {tuple(r['witness']['v'])}")
        for n, dv in zip(r["n"], r["delta"]):
            lines.append(f"  n={n}: delta={dv}")
        lines.append(f"rank-2 powers: {r['rank2_powers']}")
    else:
        for k in sorted(r):
            lines.append(f"{k}: {json.dumps(r[k], sort_keys=True)}")
    return "\n".join(lines) + "\n"


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        return _csv(doc)
    return _text(doc)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mtrank", description="Rank computations for mapping tori of Z^d.")
    p.add_argument("command", choices=COMMANDS)
    src = p.add_mutually_exclusive_group()
    src.add_argument("-m", "--matrix", help='matrix text, e.g. "0 1; 1 1" or "[[0,1],[1,1]]"')
    src.add_argument("--file", help="read the matrix from a file")
    p.add_argument("--bound", type=int, default=5, help="search box radius B (default 5)")
    p.add_argument("--primes", default=",".join(map(str, DEFAULT_PRIMES)),
                   help="comma-separated primes for the modular filters")
    p.add_argument("--nmax", type=int, default=20, help="largest power n (default 20)")
    p.add_argument("--mmax", type=int, default=4, help="largest t-exponent m (default 4)")
    p.add_argument("--height", type=int, default=10, help="unit search height H (default 10)")
    p.add_argument("--range", dest="exp_range", type=int, default=12,
                   help="exponent range R for relation checks (default 12)")
    p.add_argument("--bits", type=int, default=96, help="working precision in bits (default 96)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=2, help="corpus dimension")
    p.add_argument("--count", type=int, default=100, help="corpus size")
    p.add_argument("--steps", type=int, default=12, help="elementary factors per corpus matrix")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--strict", action="store_true", help="exit 2 on Unknown verdicts")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    p.add_argument("--output", help="write the report here instead of stdout")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        primes = [int(x) for x in args.primes.split(",") if x.strip()]
        cfg = RunConfig(bound=args.bound, primes=primes, n_max=args.nmax, m_max=args.mmax,
                        height=args.height, exp_range=args.exp_range, bits=args.bits,
                        seed=args.seed, format=args.format, dim=args.dim, count=args.count,
                        steps=args.steps)
        M = None
        if args.matrix is not None:
            M = parse_matrix(args.matrix)
        elif args.file is not None:
            with open(args.file, encoding="utf-8") as fh:
                M = parse_matrix(fh.read())
        doc = run_command(args.command, M, cfg, timings=args.timings)
    except ParseError as e:
        print(f"mtrank: parse error at line {e.line}, column {e.column}: {e}", file=sys.stderr)
        return 1
    except (MtrankError, ValueError, OSError) as e:
        print(f"mtrank: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    out = render(doc, cfg.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    if args.strict and _is_unknown(doc):
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
