"""Command line entry point: ``trianglefa --n 3..6 --check all``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Sequence

from . import config
from .freegroup import GeneratorParseError, RankError, abelianize, aut_order, evaluate_generator_word
from .intmat import mat_det
from .verify import ASSUMPTIONS, FAIL, INCONCLUSIVE, PASS, combine, run_tree_suite, verify_aut, verify_sl

EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_ranks(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected k or lo..hi, got {text!r}") from None
    if lo < 3 or hi < lo:
        raise argparse.ArgumentTypeError(f"rank range {text!r} must satisfy 3 <= lo <= hi")
    return list(range(lo, hi + 1))


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    lo, hi = config.DEFAULT_RANKS
    p = _Parser(
        prog="trianglefa",
        description="Certify the triangle criterion for Aut(F_n) and SL(n,Z) and run tree fixed-point checks.",
        epilog=f"Exit codes: 0 pass, 1 fail, 2 inconclusive, {EXIT_USAGE} usage. "
        f"H12/H13 closures are skipped above rank {config.MAX_HEAVY_RANK}.",
    )
    p.add_argument("--n", type=parse_ranks, default=list(range(lo, hi + 1)), metavar="k|lo..hi")
    p.add_argument("--check", choices=["aut", "sl", "tree", "all"], default="all")
    p.add_argument("--cap", type=_positive, default=config.DEFAULT_CAP, help="closure element cap")
    p.add_argument(
        "--bfs-depth", type=int, default=None,
        help=f"SL even-rank search depth (default: pinned per rank, else {config.DEFAULT_BFS_DEPTH})",
    )
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--iters", type=_positive, default=config.DEFAULT_ITERS)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--timings", action="store_true", help="include timings in JSON output")
    p.add_argument("--word", help="evaluate a generator word such as 'theta tau' at the first rank and exit")
    return p


def run(args: argparse.Namespace) -> tuple[dict[str, Any], dict[str, float]]:
    report: dict[str, Any] = {
        "header": {
            "assumptions": ASSUMPTIONS,
            "check": args.check,
            "ranks": args.n,
            "cap": args.cap,
            "seed": args.seed,
            "iters": args.iters,
        },
        "ranks": {},
    }
    timings: dict[str, float] = {}
    verdicts = []
    for n in args.n:
        sections: dict[str, Any] = {}
        if args.check in ("aut", "all"):
            t0 = time.perf_counter()
            sections["aut"] = verify_aut(n, args.cap)
            timings[f"{n}/aut"] = time.perf_counter() - t0
            verdicts.append(sections["aut"]["verdict"])
        if args.check in ("sl", "all"):
            depth = args.bfs_depth
            if depth is None:
                depth = config.SL_EVEN_BFS_DEPTH.get(n, config.DEFAULT_BFS_DEPTH)
            t0 = time.perf_counter()
            sections["sl"] = verify_sl(n, args.cap, depth)
            timings[f"{n}/sl"] = time.perf_counter() - t0
            verdicts.append(sections["sl"]["verdict"])
        if sections:
            report["ranks"][str(n)] = sections
    if args.check in ("tree", "all"):
        t0 = time.perf_counter()
        report["tree"] = run_tree_suite(args.seed, args.iters)
        timings["tree"] = time.perf_counter() - t0
        verdicts.append(report["tree"]["verdict"])
    report["verdict"] = combine(*verdicts)
    return report, timings


def to_json(report: dict[str, Any], timings: dict[str, float] | None = None) -> str:
    out = dict(report)
    if timings is not None:
        out["timings"] = {k: round(v, 3) for k, v in timings.items()}
    return json.dumps(out, sort_keys=True, indent=2, ensure_ascii=False)


def format_text(report: dict[str, Any], timings: dict[str, float]) -> str:
    lines = ["assumptions:"] + [f"  - {a}" for a in report["header"]["assumptions"]]
    for n, sections in report["ranks"].items():
        if "aut" in sections:
            a = sections["aut"]
            parts = [f"orders {a['orders']}", f"|H23|={a['H23']['order']}"]
            if "H12" in a:
                parts += [f"|H12|={a['H12']['order']}", f"|H13|={a['H13']['order']}"]
            parts.append(f"witnesses {a['witnesses'].get('entries', '?')}")
            lines.append(f"n={n} aut {a['verdict']:<12} " + ", ".join(parts) + f"  ({timings[f'{n}/aut']:.2f}s)")
        if "sl" in sections:
            s = sections["sl"]
            g = s["generation"]
            lines.append(
                f"n={n} sl  {s['verdict']:<12} {s['parity']}, |H12+|={s['H12']['order']} "
                f"|H13+|={s['H13']['order']} |H23+|={s['H23']['order']}, "
                f"E_ij hit {g['targets_hit']}/{g['targets']} via {g['method']}  ({timings[f'{n}/sl']:.2f}s)"
            )
    if "tree" in report:
        t = report["tree"]
        lines.append(f"tree suite {t['verdict']} (seed {t['seed']}, {timings['tree']:.2f}s)")
        for key in ("helly", "fixed_set_identity", "circumcentre", "product_criterion"):
            sec = t[key]
            size = sec.get("families", sec.get("instances"))
            lines.append(f"  {key}: {size - sec['violations']}/{size} ok")
        bs = t["bass_serre"]
        lines.append(f"  bass_serre {bs['group']}: min displacement {bs['min_displacement']}")
    lines.append(f"verdict: {report['verdict']}")
    return "\n".join(lines)


def eval_word(text: str, n: int) -> str:
    f = evaluate_generator_word(text, n)
    m = abelianize(f)
    order = aut_order(f, 64)
    return "\n".join([
        f"automorphism: {f}",
        f"order: {'unbounded (> 64)' if order is None else order}",
        f"abelianisation: {m} det {mat_det(m)}",
    ])


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.bfs_depth is not None and args.bfs_depth < 0:
        parser.error("--bfs-depth must be >= 0")
    if args.word is not None:
        try:
            print(eval_word(args.word, args.n[0]))
        except (GeneratorParseError, RankError) as exc:
            print(f"trianglefa: {exc}", file=sys.stderr)
            return EXIT_USAGE
        return 0
    report, timings = run(args)
    if args.format == "json":
        print(to_json(report, timings if args.timings else None))
    else:
        print(format_text(report, timings))
    return EXIT[report["verdict"]]


if __name__ == "__main__":
    sys.exit(main())
