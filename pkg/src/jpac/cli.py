"""Command line entry point: ``jpac {gen,solve,bench,verify}``.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import bench, verify
from .feasibility import ORACLE_MAX_K, brute_force_optimum
from .model import InvalidInstanceError, build_normalized, load_network, save_network
from .nlpd import NlpdParams, alpha_nlpd, run_nlpd
from .pnmd import IpmParams, PnmdParams, run_pnmd

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("jpac")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    text = text.strip()
    if not text:
        return []
    out = []
    for part in text.split(","):
        if ":" in part:
            lo, hi, *step = (int(x) for x in part.split(":"))
            out.extend(range(lo, hi + 1, step[0] if step else 1))
        else:
            out.append(int(part))
    return out


def _alpha2(text):
    if text == "default":
        return None
    if text.startswith("value:"):
        return float(text.split(":", 1)[1])
    raise argparse.ArgumentTypeError("expected 'default' or 'value:<x>'")


def _add_solver_flags(p):
    p.add_argument("--p", type=float, default=0.5, help="lp exponent in (0, 1) (default 0.5)")
    p.add_argument("--c1", type=float, default=0.2)
    p.add_argument("--c2", type=float, default=0.2)
    p.add_argument("--c3", type=float, default=4.0)
    p.add_argument("--alpha2-mode", type=_alpha2, default=None, metavar="{default,value:<x>}",
                   help="secondary alpha bound; 'default' uses alpha1")
    p.add_argument("--epsilon", type=float, default=1e-6, help="epsilon-KKT target of the lp solver")


def _options(args):
    nlpd = NlpdParams(args.c1, args.c2, args.alpha2_mode)
    pnmd = PnmdParams(args.c1, args.c2, args.c3, args.alpha2_mode, IpmParams(p=args.p, epsilon=args.epsilon))
    return {"nlpd": nlpd, "pnmd": pnmd}


def _instance_config(args):
    return bench.InstanceConfig(gamma_db=args.gamma_db, eta_dbm=args.eta_dbm,
                                budget_multiplier=args.budget_multiplier, seed=args.seed)


def _add_instance_flags(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gamma-db", type=float, default=2.0)
    p.add_argument("--eta-dbm", type=float, default=-90.0)
    p.add_argument("--budget-multiplier", type=float, default=2.0)


def build_parser():
    parser = _Parser(prog="jpac", description="Joint power and admission control solvers and benchmarks.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a random instance as JSON")
    g.add_argument("--k", type=int, required=True, help="number of links")
    _add_instance_flags(g)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="solve one instance with one algorithm")
    s.add_argument("instance", help="instance JSON file")
    s.add_argument("--algo", choices=["nlpd", "pnmd", "oracle"], default="pnmd")
    _add_solver_flags(s)
    s.add_argument("--trace", action="store_true", help="include per-iteration solver stats")
    s.add_argument("--out", default="-", help="output JSON path ('-' for stdout)")

    b = sub.add_parser("bench", help="Monte-Carlo sweep over K")
    b.add_argument("--k-list", type=_int_list, default=[4, 6, 8, 10, 12], help="e.g. 5,10,20 or 5:30:5")
    b.add_argument("--trials", type=int, default=20)
    b.add_argument("--algos", default="nlpd,pnmd")
    _add_instance_flags(b)
    _add_solver_flags(b)
    b.add_argument("--out", default="bench.csv")
    b.add_argument("--json", action="store_true", help="also write a JSON mirror")
    b.add_argument("--no-timing", action="store_true", help="blank wall-time columns (byte-reproducible output)")

    v = sub.add_parser("verify", help="run the invariant and oracle checks")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--quick", action="store_true", help="reduced trial counts")
    return parser


def _write_json(doc, path):
    text = json.dumps(doc, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_gen(args):
    net = bench.generate_instance(_instance_config(args), args.k, args.seed)
    save_network(net, args.out)
    return EXIT_OK


def cmd_solve(args):
    net = load_network(args.instance)
    opts = _options(args)
    if args.algo == "oracle":
        if net.K > ORACLE_MAX_K:
            log.error("oracle is limited to K <= %d", ORACLE_MAX_K)
            return EXIT_USAGE
        chan = build_normalized(net)
        res = brute_force_optimum(chan, alpha_nlpd(chan, args.c1, args.c2, args.alpha2_mode).alpha)
        powers = np.zeros(net.K)
        powers[list(res.best_set)] = res.qstar * net.pbar[list(res.best_set)]
        doc = {"algorithm": "oracle", "K": net.K, "supported": [k + 1 for k in res.best_set],
               "num_supported": len(res.best_set), "powers_watts": powers.tolist(),
               "total_power_watts": float(powers.sum()), "l0_objective": res.l0_objective}
    elif args.algo == "nlpd":
        doc = run_nlpd(net, opts["nlpd"], trace=args.trace).to_dict(trace=args.trace)
    else:
        doc = run_pnmd(net, opts["pnmd"], trace=args.trace).to_dict(trace=args.trace)
    _write_json(doc, args.out)
    return EXIT_OK


def cmd_bench(args):
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    report = bench.run_benchmark(_instance_config(args), args.k_list, args.trials, algos, _options(args))
    bench.emit(report, args.out, fmt="json" if args.json else "csv", timing=not args.no_timing)
    failed = sum(r.status != "ok" for r in report.rows)
    if failed:
        log.warning("%d trial(s) failed", failed)
    return EXIT_OK


def cmd_verify(args):
    results = verify.run_all(seed=args.seed, quick=args.quick)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERICAL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"gen": cmd_gen, "solve": cmd_solve, "bench": cmd_bench, "verify": cmd_verify}
    try:
        return handlers[args.command](args)
    except (ValueError, InvalidInstanceError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
