"""Command-line entry point.

Exit status: 0 on success, 1 on usage or input errors, 2 when a computation
finished but the checked property (equilibrium, audit) failed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bounds, instances
from .audits import run_audits
from .core import evaluate_profile
from .equilibrium import InfeasibleProfileError, best_response_dynamics, verify_equilibrium
from .frontier import best_response
from .io import dumps, instance_to_dict, load_document, profile_to_list

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(cast):
    def parse(text):
        v = cast(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def _unit(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fpa-autobid", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def io_args(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", "-i", help="JSON document (default: stdin)")
        sp.add_argument("--output", "-o", help="output file (default: stdout)")

    def solver_args(sp):
        sp.add_argument("--grid-size", type=_positive(int), default=200)
        sp.add_argument("--epsilon", type=_positive(float), default=1e-6)

    sp = sub.add_parser("bounds", help="price-of-anarchy bounds for one reserve accuracy")
    sp.add_argument("--gamma", type=_unit, default=0.0)
    io_args(sp, needs_input=False)

    sp = sub.add_parser("sweep-gamma", help="CSV of bounds against reserve accuracy")
    sp.add_argument("--step", type=float, default=0.01)
    io_args(sp, needs_input=False)

    sp = sub.add_parser("make-instance", help="emit a hard instance with its profile")
    sp.add_argument("which", choices=["thm1", "lem-lb", "random"])
    sp.add_argument("--eps", type=float, help="thm1: value gap")
    sp.add_argument("--t", type=float, help="lem-lb: free-win mass (default: the minimizer)")
    sp.add_argument("--grid", type=int, default=2000, help="lem-lb: number of atoms")
    sp.add_argument("--seed", type=int, help="random: RNG seed")
    sp.add_argument("--n", type=_positive(int), default=2)
    sp.add_argument("--m", type=_positive(int), default=2)
    sp.add_argument("--gamma", type=_unit, help="random: reserve accuracy")
    io_args(sp, needs_input=False)

    sp = sub.add_parser("best-response", help="best response of one bidder")
    sp.add_argument("--bidder", type=int, required=True)
    solver_args(sp)
    io_args(sp)

    for name, text in (("verify", "check an epsilon-equilibrium"), ("audit", "check the welfare inequalities")):
        sp = sub.add_parser(name, help=text)
        solver_args(sp)
        io_args(sp)

    sp = sub.add_parser("dynamics", help="round-robin best-response dynamics")
    solver_args(sp)
    sp.add_argument("--max-iters", type=_positive(int), default=100)
    io_args(sp)
    return p


def _read(args):
    if args.input:
        with open(args.input) as fh:
            return fh.read()
    return sys.stdin.read()


def _needs_profile(prof, command):
    if prof is None:
        raise UsageError(f"{command} needs a document with a 'profile'")
    return prof


def _bounds(args):
    res = bounds.ml_poa_bound(args.gamma)
    return dumps({
        "gamma": args.gamma,
        "mixed_bound": res.bound_value,
        "minimizer_t": res.minimizer_t,
        "full_autobidding_bound": bounds.full_autobidding_ml_bound(args.gamma),
    }), EXIT_OK


def _sweep(args):
    if not 0.0 < args.step <= 0.5:
        raise UsageError("--step must lie in (0, 0.5]")
    return bounds.sweep_to_csv(bounds.gamma_sweep(args.step)), EXIT_OK


def _make(args):
    if args.which == "thm1":
        if args.eps is None or not 0.0 < args.eps < 1.0:
            raise UsageError("thm1 needs --eps in (0, 1)")
        hard = instances.thm1_instance(args.eps)
    elif args.which == "lem-lb":
        t = bounds.mixed_poa_bound().minimizer_t if args.t is None else args.t
        if not 0.0 < t < 1.0 or args.grid < 10:
            raise UsageError("lem-lb needs --t in (0, 1) and --grid >= 10")
        hard = instances.lemma_lb_instance(t, args.grid)
    else:
        if args.seed is None:
            raise UsageError("random needs an explicit --seed")
        rng = np.random.default_rng(args.seed)
        inst = instances.random_instance(rng, args.n, args.m, gamma=args.gamma)
        return dumps({"instance": instance_to_dict(inst)}), EXIT_OK
    return dumps({
        "instance": instance_to_dict(hard.instance),
        "profile": profile_to_list(hard.profile),
        "predicted_ratio": hard.predicted_ratio,
        "params": hard.params,
    }), EXIT_OK


def _best_response(args):
    inst, prof, _ = load_document(_read(args))
    prof = _needs_profile(prof, "best-response")
    if not 0 <= args.bidder < inst.num_bidders:
        raise UsageError(f"--bidder must lie in [0, {inst.num_bidders})")
    br = best_response(inst, prof, args.bidder, args.grid_size)
    return dumps({
        "bidder": args.bidder,
        "row": profile_to_list(prof.with_row(args.bidder, br.row))[args.bidder],
        "objective": br.objective,
        "value": br.value,
        "payment": br.payment,
    }), EXIT_OK


def _verify(args):
    inst, prof, _ = load_document(_read(args))
    prof = _needs_profile(prof, "verify")
    try:
        report = verify_equilibrium(inst, prof, args.grid_size, args.epsilon)
    except InfeasibleProfileError as e:
        return dumps({"is_equilibrium": False, "infeasible_bidder": e.bidder, "roi_slack": e.slack}), EXIT_FAILED
    return dumps(report.to_dict()), EXIT_OK if report.is_equilibrium else EXIT_FAILED


def _dynamics(args):
    inst, prof, _ = load_document(_read(args))
    out, converged, iters = best_response_dynamics(inst, prof, args.grid_size, args.max_iters, args.epsilon)
    outcome = evaluate_profile(inst, out)
    return dumps({
        "instance": instance_to_dict(inst),
        "profile": profile_to_list(out),
        "converged": converged,
        "iters": iters,
        "welfare": outcome.welfare,
        "ratio": outcome.ratio,
    }), EXIT_OK


def _audit(args):
    inst, prof, _ = load_document(_read(args))
    prof = _needs_profile(prof, "audit")
    results = run_audits(inst, prof, args.epsilon)
    lines = [f"{'lemma':<16}{'lhs':>14}{'rhs':>14}{'margin':>14}  pass"]
    for r in results:
        lines.append(f"{r.name:<16}{r.lhs:>14.6g}{r.rhs:>14.6g}{r.margin:>14.3e}  {'yes' if r.passed else 'NO'}")
    ok = all(r.passed for r in results)
    return "\n".join(lines) + "\n", EXIT_OK if ok else EXIT_FAILED


COMMANDS = {
    "bounds": _bounds,
    "sweep-gamma": _sweep,
    "make-instance": _make,
    "best-response": _best_response,
    "verify": _verify,
    "dynamics": _dynamics,
    "audit": _audit,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, status = COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
