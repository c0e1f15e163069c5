"""Command-line interface: ``treehit {analyze,verify,simulate,family,regular}``.

Reports are TSV on standard output.  Values beyond 1e300 are written as
``log:<natural log>``.  Exit status: 0 success, 1 usage, 2 parse or
validation error, 3 failed verification.
"""
import argparse
import math
import sys

import numpy as np

from . import chainfile, regular
from .drift import DEFAULT_THRESHOLD, drift_report, family_verdict
from .hitting import LOG_SWITCH, HittingTimes
from .sim import (SimConfig, TransitionTable, ks_critical, simulate_final_excursion,
                  simulate_hitting, simulate_return)
from .tree import TreeError, root_path
from .verify import check_instance, merge, random_corpus

EXIT_USAGE, EXIT_INPUT, EXIT_VERIFY = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v):
    """Shortest round-trip text for a float; integers stay integers."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)


def fmt_log(log_v):
    """Value given by its log; switches to ``log:`` past 1e300."""
    if log_v == -math.inf:
        return "0.0"
    if log_v >= LOG_SWITCH:
        return f"log:{float(log_v)!r}"
    return fmt(math.exp(log_v))


def _row(out, *cells):
    out.write("\t".join(c if isinstance(c, str) else fmt(c) for c in cells) + "\n")


def _load(path):
    return chainfile.load(path)


# --- analyze ----------------------------------------------------------------

DRIFT_FIELDS = ("K_mu", "Kp_mu", "K_a", "K_a_pi", "Kp_a", "Q_a", "R_a", "Gamma_a",
                "mean_to_root", "sup_mean_to_root", "variance_to_root", "cutoff_ratio",
                "sup_ratio", "kp_ratio", "var_ratio", "var_ratio_bound", "r_ratio")


def _drift_rows(out, rep):
    for name in DRIFT_FIELDS:
        _row(out, name, getattr(rep, name))
    _row(out, "mean_from_root", fmt_log(rep.log_mean_from_root))


def cmd_analyze(args, out):
    tree, spec = _load(args.file)
    a = args.a
    if not 0 < a < tree.node_count:
        raise TreeError(f"node {a} must be a non-root node of the tree")
    ht = HittingTimes(tree, spec)
    m = ht.measure
    d = len(root_path(tree, a))
    out.write("# stationary\n")
    _row(out, "nodes", tree.node_count)
    _row(out, "pi0", m.pi0)
    _row(out, "min_pi", fmt_log(float(m.log_pi.min())))
    _row(out, "underflow", m.underflow)
    out.write("# path\n")
    _row(out, "k", "node", "depth", "pi", "rho", "mu")
    for k, x in enumerate(ht.path(a)):
        _row(out, k, x, int(tree.depth[x]), fmt_log(float(m.log_pi[x])),
             float(m.branch_ratio[x]), float(spec.mu[x]))
    pairs = args.pair or [(0, d), (d, 0)]
    out.write("# moments\n")
    _row(out, "j", "n", "source", "target", "mean", "second", "variance")
    for j, n in pairs:
        rep = ht.hitting(j, n, a)
        _row(out, j, n, rep.source, rep.target, fmt_log(rep.log_mean),
             fmt_log(rep.log_second), fmt_log(rep.log_variance))
    out.write("# drift\n")
    _drift_rows(out, drift_report(tree, spec, a=a, hitting=ht))
    return 0


# --- verify -----------------------------------------------------------------

def cmd_verify(args, out):
    if args.random is not None:
        count, seed = args.random
        corpus = random_corpus(count, seed, max_nodes=args.max_nodes)
    elif args.file:
        tree, spec = _load(args.file)
        if tree.node_count < 2:
            raise TreeError("verification needs at least one non-root node")
        targets = [args.a] if args.a else [int(np.argmax(tree.depth))]
        corpus = ((tree, spec, a) for a in targets)
    else:
        raise _UsageError("verify needs a FILE or --random N SEED")
    agg = merge(check_instance(*inst) for inst in corpus)
    _row(out, "check", "instances", "worst", "tol", "status")
    ok = True
    for name, r in agg.items():
        ok &= r.ok
        _row(out, name, r.count, float(r.worst), r.tol, "pass" if r.ok else "FAIL")
    _row(out, "verdict", "pass" if ok else "FAIL")
    return 0 if ok else EXIT_VERIFY


# --- simulate ---------------------------------------------------------------

def _summary_rows(out, s):
    _row(out, "n", s.n)
    _row(out, "truncated", s.truncated)
    _row(out, "unusable", s.unusable)
    _row(out, "mean", s.mean)
    _row(out, "variance", s.variance)
    _row(out, "standard_error", s.standard_error)
    _row(out, "exact_mean", s.exact_mean)
    if math.isfinite(s.exact_mean):
        _row(out, "z_score", (s.mean - s.exact_mean) / s.standard_error)
    for c, p in s.cutoff_profile.items():
        _row(out, f"P(T>{c}E)", p)
    _row(out, "ks_exp1", s.ks_exp1)
    kept = s.n - s.truncated
    if kept:
        _row(out, "ks_critical_1pct", ks_critical(kept))


def cmd_simulate(args, out):
    tree, spec = _load(args.file)
    n = tree.node_count
    for x in (args.source, args.target):
        if not 0 <= x < n:
            raise TreeError(f"node {x} outside 0..{n - 1}")
    table = TransitionTable(tree, spec)
    if args.mode == "hitting":
        if args.source == args.target:
            raise _UsageError("hitting mode needs distinct source and target")
        cfg = SimConfig(args.seed, args.replicas, args.max_steps, args.source, args.target)
        _row(out, "mode", "hitting")
        _summary_rows(out, simulate_hitting(tree, spec, cfg, table, args.threads))
    elif args.mode == "return":
        cfg = SimConfig(args.seed, args.replicas, args.max_steps, args.source, args.source)
        _row(out, "mode", "return")
        _summary_rows(out, simulate_return(tree, spec, args.source, cfg, table, args.threads))
    else:
        if args.source != 0 or args.target == 0:
            raise _UsageError("final mode runs between the root 0 and a non-root target")
        cfg = SimConfig(args.seed, args.replicas, args.max_steps, 0, args.target)
        fe = simulate_final_excursion(tree, spec, args.target, cfg, table, args.threads)
        _row(out, "mode", "final")
        _row(out, "n_up", fe.samples_up.size)
        _row(out, "n_down", fe.samples_down.size)
        _row(out, "truncated_up", fe.truncated_up)
        _row(out, "truncated_down", fe.truncated_down)
        _row(out, "mean_up", float(fe.samples_up.mean()) if fe.samples_up.size else math.nan)
        _row(out, "mean_down", float(fe.samples_down.mean()) if fe.samples_down.size else math.nan)
        _row(out, "two_sample_ks", fe.two_sample_ks)
        _row(out, "ks_critical_1pct", fe.critical_value)
    return 0


# --- family -----------------------------------------------------------------

FAMILY_COLUMNS = ("depth", "a", "K_mu", "Kp_mu", "K_a", "Kp_a", "Q_a", "R_a", "Gamma_a",
                  "mean_to_root", "mean_from_root", "cutoff_ratio", "sup_ratio", "kp_ratio",
                  "var_ratio", "var_ratio_bound", "r_ratio", "L_size")


def _family_members(args):
    if args.regular is not None:
        r, lam, dmin, dmax, dstep = args.regular
        r, dmin, dmax, dstep = int(r), int(dmin), int(dmax), int(dstep)
        if r < 1 or dstep < 1 or dmin < 1 or dmax < dmin:
            raise _UsageError("--regular needs r >= 1 and 1 <= dmin <= dmax, dstep >= 1")
        for d in range(dmin, dmax + 1, dstep):
            rs = regular.RegularSpec(r, lam, d)
            tree, spec = regular.generate(rs)
            yield tree, spec, regular.deepest_node(rs)
    else:
        targets = args.targets or []
        if targets and len(targets) != len(args.files):
            raise _UsageError("--targets needs one node per file")
        for i, path in enumerate(args.files):
            tree, spec = _load(path)
            a = targets[i] if targets else int(np.argmax(tree.depth))
            yield tree, spec, a


def cmd_family(args, out):
    members = list(_family_members(args))
    v = family_verdict(members, threshold=args.threshold, K=args.K, Kp=args.Kp,
                       Kp_mu=args.Kp_mu, C=args.C)
    _row(out, *FAMILY_COLUMNS)
    for rep, ls in zip(v.reports, v.l_sets):
        _row(out, rep.depth, rep.a, rep.K_mu, rep.Kp_mu, rep.K_a, rep.Kp_a, rep.Q_a, rep.R_a,
             rep.Gamma_a, rep.mean_to_root, fmt_log(rep.log_mean_from_root), rep.cutoff_ratio,
             rep.sup_ratio, rep.kp_ratio, rep.var_ratio, rep.var_ratio_bound, rep.r_ratio,
             int(ls.size))
    for key in ("K", "Kp", "Kp_mu", "sup_ratio_ok", "kp_ratio_ok", "Kp_mu_ok"):
        _row(out, f"# {key}", v.bounds[key])
    _row(out, "# drift_trend", v.drift_holds)
    _row(out, "# timescale_trend", v.timescale_holds)
    _row(out, "verdict", v.verdict)
    return 0


# --- regular ----------------------------------------------------------------

def cmd_regular(args, out):
    rs = regular.RegularSpec(args.r, args.bias, args.depth)
    tree, spec = regular.generate(rs, cap=args.cap)
    out.write(f"# regular tree r={args.r} bias={fmt(args.bias)} depth={args.depth}; "
              f"deepest node {regular.deepest_node(rs)}\n")
    out.write(chainfile.emit(tree, spec))
    return 0


class _UsageError(Exception):
    pass


def build_parser():
    p = _Parser(prog="treehit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="exact moments and drift constants for one node")
    a.add_argument("file")
    a.add_argument("a", type=int, help="non-root target node")
    a.add_argument("--pair", nargs=2, type=int, action="append", metavar=("J", "N"),
                   help="moments of T_{a_J -> a_N} along the root path (repeatable)")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="closed forms vs linear solver, and the inequality checks")
    v.add_argument("file", nargs="?")
    v.add_argument("--random", nargs=2, type=int, metavar=("N", "SEED"))
    v.add_argument("--max-nodes", type=int, default=50)
    v.add_argument("--a", type=int, help="target node for FILE (default: a deepest node)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="Monte Carlo hitting, return or final-excursion times")
    s.add_argument("file")
    s.add_argument("source", type=int)
    s.add_argument("target", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--replicas", type=int, default=10_000)
    s.add_argument("--max-steps", type=int)
    s.add_argument("--mode", choices=("hitting", "return", "final"), default="hitting")
    s.add_argument("--threads", type=int, help="worker threads (default: $TREEHIT_THREADS or all CPUs)")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("family", help="drift diagnostics across depths and a trend verdict")
    g = f.add_mutually_exclusive_group(required=True)
    g.add_argument("--regular", nargs=5, type=float, metavar=("R", "LAMBDA", "DMIN", "DMAX", "DSTEP"))
    g.add_argument("--files", nargs="+")
    f.add_argument("--targets", nargs="+", type=int)
    f.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    f.add_argument("--K", type=float)
    f.add_argument("--Kp", type=float)
    f.add_argument("--Kp-mu", type=float)
    f.add_argument("--C", type=float, default=1.0)
    f.set_defaults(func=cmd_family)

    r = sub.add_parser("regular", help="write the chain file of a biased walk on an r-ary tree")
    r.add_argument("r", type=int)
    r.add_argument("bias", type=float)
    r.add_argument("depth", type=int)
    r.add_argument("--cap", type=int, default=regular.DEFAULT_NODE_CAP)
    r.set_defaults(func=cmd_regular)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except _UsageError as exc:
        print(f"treehit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (chainfile.ChainFileError, TreeError, OSError, ValueError) as exc:
        print(f"treehit: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
