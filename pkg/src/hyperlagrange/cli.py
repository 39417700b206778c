"""Command line interface.

    hyperlagrange lambda    --family K:6:3 [--mesh 30] [--certify 0.0963]
    hyperlagrange free      --family B2:10 --forbid K4e
    hyperlagrange verify    --suite {battery,lagrangian,motzkin-straus,colex,all}
    hyperlagrange enumerate 5 --forbid K4e --out free5.txt
    hyperlagrange densify   --family K4e
    hyperlagrange extend    --family K4e

Exit codes: 0 success, 1 verification failure (or NOT FREE), 2 usage or
parse error, 3 capacity limit exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import hypergraph as hg
from .certify import certify_upper_bound
from .families import FamilyError, family
from .hypergraph import CapacityError, Hypergraph, HypergraphError, ParseError
from .search import canonical_form, contains_subgraph, enumerate_free
from .solver import LagrangianResult, SolverConfig, densify, grid_oracle, maximize

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

log = logging.getLogger("hyperlagrange")

CONFIG_KEYS = {
    "seed": int,
    "restarts": int,
    "max_iterations": int,
    "tol": float,
    "mesh": int,
    "certify_tol": float,
    "cache": str,
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# inputs

def read_config(path: str) -> dict:
    """key=value lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def read_graphs(path: str) -> list[Hypergraph]:
    """A text file with one or more graphs (blank-line separated) or JSON lines."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        graphs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if line.strip():
                try:
                    graphs.append(hg.from_json(line))
                except (ValueError, KeyError, TypeError) as exc:
                    raise ParseError(f"bad JSON graph: {exc}", lineno) from None
        return graphs
    return hg.parse_many(text)


def input_graphs(args) -> list[tuple[str, Hypergraph]]:
    if bool(args.family) == bool(args.file):
        raise UsageError("give exactly one of --family or --file")
    if args.family:
        return [(args.family, family(args.family))]
    graphs = read_graphs(args.file)
    if not graphs:
        raise UsageError(f"{args.file}: no graphs found")
    if len(graphs) == 1:
        return [(args.file, graphs[0])]
    return [(f"{args.file}#{k + 1}", G) for k, G in enumerate(graphs)]


def solver_config(args) -> SolverConfig:
    return SolverConfig(
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        gradient_tolerance=args.tol,
        seed=args.seed,
    )


# ---------------------------------------------------------------------------
# results cache keyed by canonical form and solver configuration

class ResultCache:
    def __init__(self, root: str | None):
        self.root = Path(root) if root else None
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, G: Hypergraph, cfg: SolverConfig) -> Path:
        key = canonical_form(G)
        digest = hashlib.sha256(key.key + cfg.digest().encode()).hexdigest()[:32]
        return self.root / f"{digest}.json"

    def get(self, G: Hypergraph, cfg: SolverConfig) -> LagrangianResult | None:
        if not self.root:
            return None
        path = self._path(G, cfg)
        if not path.exists():
            return None
        data = json.loads(path.read_text())
        stored = hg.from_json(data["graph"])
        if stored.n != G.n or stored.m != G.m:
            return None
        emb = contains_subgraph(G, stored)
        if emb is None:
            # invariant hash collision above the exact threshold
            return None
        w = np.zeros(G.n)
        w[np.array(emb, dtype=int) - 1] = data["result"]["weights"]
        r = data["result"]
        log.info("cache hit %s", path.name)
        return LagrangianResult(r["value"], w, r["kkt_residual"], r["method"], cfg.restarts, r["seed"])

    def put(self, G: Hypergraph, cfg: SolverConfig, res: LagrangianResult) -> None:
        if not self.root:
            return
        payload = {"graph": hg.to_json(G), "result": res.to_json()}
        self._path(G, cfg).write_text(json.dumps(payload))


# ---------------------------------------------------------------------------
# commands

def cmd_lambda(args) -> tuple[dict, list[str], int]:
    cfg = solver_config(args)
    cache = ResultCache(args.cache)
    results, lines, status = [], [], EXIT_OK
    for label, G in input_graphs(args):
        res = cache.get(G, cfg)
        if res is None:
            res = maximize(G, cfg)
            cache.put(G, cfg, res)
        item = {"input": label, "n": G.n, "r": G.r, "m": G.m, **res.to_json()}
        line = f"{label}: lambda = {res.value:.15g}  kkt = {res.kkt_residual:.1e}"
        if args.mesh:
            item["grid_oracle"] = grid_oracle(G, args.mesh)
            line += f"  grid({args.mesh}) = {item['grid_oracle']:.12g}"
        if args.certify is not None:
            cb = certify_upper_bound(G, args.certify, args.certify_tol, cfg=cfg)
            item["certificate"] = cb.to_json()
            line += f"  certified <= {cb.bound:.12g} ({'CERTIFIED' if cb.success else 'NOT CERTIFIED'})"
            if not cb.success:
                status = EXIT_FAIL
        if args.assert_below is not None and not res.value < args.assert_below:
            status = EXIT_FAIL
            line += f"  NOT BELOW {args.assert_below}"
        results.append(item)
        lines.append(line)
        if len(results) == 1 and G.n <= 30:
            lines.append("weights: " + " ".join(f"{w:.15g}" for w in res.weights))
    if len(results) > 1:
        top = max(results, key=lambda d: d["value"])
        lines.append(f"{len(results)} graphs, max lambda = {top['value']:.15g} ({top['input']})")
    return {"results": results}, lines, status


def cmd_free(args) -> tuple[dict, list[str], int]:
    if not args.forbid:
        raise UsageError("free needs at least one --forbid family")
    patterns = [(f, family(f)) for f in args.forbid]
    results, lines, status = [], [], EXIT_OK
    for label, G in input_graphs(args):
        item = {"input": label, "free": True, "witness": None}
        for name, F in patterns:
            emb = contains_subgraph(G, F)
            if emb is not None:
                item.update(free=False, witness={"pattern": name, "embedding": list(emb)})
                status = EXIT_FAIL
                break
        results.append(item)
        if item["free"]:
            lines.append(f"{label}: FREE of {', '.join(args.forbid)}")
        else:
            w = item["witness"]
            lines.append(f"{label}: NOT FREE, contains {w['pattern']} at {' '.join(map(str, w['embedding']))}")
    return {"results": results}, lines, status


def cmd_verify(args) -> tuple[dict, list[str], int]:
    from .verification import run_suite

    suites = run_suite(args.suite, solver_config(args))
    lines = [ln for s in suites for ln in s.lines()]
    ok = all(s.passed for s in suites)
    return {"suites": [s.to_json() for s in suites], "passed": ok}, lines, EXIT_OK if ok else EXIT_FAIL


def cmd_enumerate(args) -> tuple[dict, list[str], int]:
    forbid = [family(f) for f in args.forbid]
    graphs = list(enumerate_free(args.n, forbid))
    if args.out:
        if args.format == "jsonl":
            text = "".join(json.dumps(hg.to_json(G)) + "\n" for G in graphs)
        else:
            text = hg.serialize_many(graphs)
        Path(args.out).write_text(text)
    payload = {"n": args.n, "forbid": args.forbid, "classes": len(graphs), "out": args.out}
    lines = [f"{len(graphs)} isomorphism classes on {args.n} vertices free of {', '.join(args.forbid) or 'nothing'}"]
    if not args.out:
        payload["graphs"] = [hg.to_json(G) for G in graphs]
        lines.append(hg.serialize_many(graphs).rstrip("\n"))
    return payload, lines, EXIT_OK


def cmd_densify(args) -> tuple[dict, list[str], int]:
    cfg = solver_config(args)
    results, lines = [], []
    for label, G in input_graphs(args):
        H = densify(G, cfg)
        value = maximize(H, cfg).value
        missing = hg.uncovered_pairs(H)
        results.append({"input": label, "graph": hg.to_json(H), "lambda": value, "uncovered_pairs": missing})
        lines.append(f"# {label}: dense subgraph with lambda = {value:.15g}, uncovered pairs: {len(missing)}")
        lines.append(hg.serialize(H).rstrip("\n"))
    return {"results": results}, lines, EXIT_OK


def cmd_extend(args) -> tuple[dict, list[str], int]:
    results, lines = [], []
    for label, G in input_graphs(args):
        H = hg.extension(G)
        results.append({"input": label, "graph": hg.to_json(H)})
        lines.append(f"# {label}: extension on {H.n} vertices with {H.m} edges")
        lines.append(hg.serialize(H).rstrip("\n"))
    return {"results": results}, lines, EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--restarts", type=int, default=None)
    common.add_argument("--max-iterations", type=int, default=None)
    common.add_argument("--tol", type=float, default=None, help="solver gradient tolerance")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--out", help="write the output to this file")
    common.add_argument("--cache", default=None, help="directory for cached Lagrangian results")
    common.add_argument("--timing", action="store_true", help="include wall time in the report")
    common.add_argument("-v", "--verbose", action="store_true")

    graph_in = argparse.ArgumentParser(add_help=False)
    graph_in.add_argument("--family", help="family name such as K:6:3, B2:28, H2:9, K4e")
    graph_in.add_argument("--file", help="graph file: text format, several graphs separated by blank lines, or JSON lines")

    p = argparse.ArgumentParser(prog="hyperlagrange", description="hypergraph Lagrangians and their bounds")
    p.add_argument("--version", action="version", version=f"hyperlagrange {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("lambda", parents=[common, graph_in], help="maximize the Lagrangian")
    q.add_argument("--mesh", type=int, default=None, help="also run the grid oracle with this mesh")
    q.add_argument("--certify", type=float, default=None, metavar="TARGET", help="certify lambda <= TARGET")
    q.add_argument("--certify-tol", type=float, default=None)
    q.add_argument("--assert-below", type=float, default=None, metavar="X", help="exit 1 unless every value is < X")
    q.set_defaults(func=cmd_lambda)

    q = sub.add_parser("free", parents=[common, graph_in], help="test F-freeness")
    q.add_argument("--forbid", action="append", default=[], help="forbidden family (repeatable)")
    q.set_defaults(func=cmd_free)

    q = sub.add_parser("verify", parents=[common], help="run a verification suite")
    q.add_argument("--suite", default="all", choices=["battery", "lagrangian", "motzkin-straus", "colex", "all"])
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("enumerate", parents=[common], help="enumerate free 3-graphs on n <= 6 vertices")
    q.add_argument("n", type=int)
    q.add_argument("--forbid", action="append", default=[])
    q.add_argument("--format", choices=["text", "jsonl"], default="text")
    q.set_defaults(func=cmd_enumerate)

    q = sub.add_parser("densify", parents=[common, graph_in], help="reduce to a dense subgraph")
    q.set_defaults(func=cmd_densify)

    q = sub.add_parser("extend", parents=[common, graph_in], help="the extension H^F")
    q.set_defaults(func=cmd_extend)
    return p


DEFAULTS = {
    "seed": 0,
    "restarts": 64,
    "max_iterations": 5000,
    "tol": 1e-11,
    "mesh": None,
    "certify_tol": 1e-3,
    "cache": None,
}


def _merge_config(args) -> None:
    file_cfg = read_config(args.config) if args.config else {}
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, file_cfg.get(key, default))


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    start = time.perf_counter()
    try:
        _merge_config(args)
        payload, lines, status = args.func(args)
    except (UsageError, FamilyError, ParseError, HypergraphError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        report = {
            "schema": SCHEMA,
            "command": args.command,
            "argv": argv,
            "config": {k: getattr(args, k) for k in DEFAULTS if k != "cache"},
            "versions": {"hyperlagrange": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
            "status": status,
            **payload,
        }
        if args.timing:
            report["wall_time"] = time.perf_counter() - start
        text = json.dumps(report, indent=2, default=_jsonable)
    else:
        text = "\n".join(lines)
        if args.timing:
            text += f"\nwall time {time.perf_counter() - start:.2f}s"
    # enumerate writes its graph stream to --out itself
    if args.out and args.command != "enumerate":
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return status


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())
