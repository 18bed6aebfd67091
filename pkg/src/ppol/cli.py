"""``ppol`` command line.

Exit codes: 0 success / check passed, 1 a checked property was violated,
2 bad usage or parameters, 3 I/O failure. Errors go to stderr as one line
``ppol: error: <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import analysis, simulator
from .construction import build_ppol, load_difference_set
from .difference_sets import DifferenceSetError, SearchLimitError, singer_difference_set, verify_perfect
from .finite_field import factor_prime_power
from .remap import make_plan, remap_sequence, remap_sequence_pessimistic

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _difference_set(args, m: int):
    if getattr(args, "set", None):
        return load_difference_set(m, args.set)
    return None


def _m_for(args) -> int:
    if factor_prime_power(args.m) is None:
        raise UsageError(f"m={args.m} is not a prime power")
    return args.m


def cmd_gen(args):
    seq = build_ppol(_m_for(args), _difference_set(args, args.m))
    if args.format == "csv":
        return EXIT_OK, seq.to_csv()
    return EXIT_OK, _dump(seq.to_dict())


def cmd_verify_pds(args):
    if args.set is None:
        if args.m is None:
            raise UsageError("verify-pds needs --set (with --p) or --m")
        D = singer_difference_set(_m_for(args))
        elements, p = D.elements, D.p
    else:
        elements = args.set
        p = args.p if args.p is not None else None
        if p is None:
            k = len(elements)
            p = k * k - k + 1
    report = verify_perfect(elements, p)
    status = EXIT_OK if report.passed else EXIT_VIOLATION
    if not report.passed:
        print(f"ppol: violation: {report.summary()}", file=sys.stderr)
    return status, _dump({"check": "perfect_difference_set", **report.to_dict()})


def cmd_dor(args):
    seq = build_ppol(_m_for(args), _difference_set(args, args.m))
    prof = analysis.dor_profile(seq)
    if args.format == "csv":
        return EXIT_OK, prof.to_csv()
    return EXIT_OK, _dump({"m": seq.m, "difference_set": list(seq.difference_set.elements), **prof.to_dict()})


def _verdict(report) -> tuple[int, str]:
    return (EXIT_OK if report.passed else EXIT_VIOLATION), _dump(report.to_dict())


def cmd_theorem1(args):
    return _verdict(analysis.verify_theorem1(_m_for(args), _difference_set(args, args.m)))


def _D_for_N(args):
    if not getattr(args, "set", None):
        return None
    from .finite_field import smallest_prime_power_geq

    return load_difference_set(smallest_prime_power_geq(args.N + 1), args.set)


def cmd_theorem2(args):
    return _verdict(analysis.verify_theorem2(args.N, _D_for_N(args), max_N=args.max_N))


def cmd_corollary1(args):
    return _verdict(analysis.verify_corollary1(args.N, _D_for_N(args), max_N=args.max_N))


def cmd_remap(args):
    plan = make_plan(args.N, args.available)
    base = build_ppol(plan.m, _D_for_N(args))
    if args.pessimistic:
        seq = remap_sequence_pessimistic(base, plan)
    else:
        seq = remap_sequence(base, plan, args.seed)
    if args.format == "csv":
        return EXIT_OK, seq.to_csv()
    out = seq.to_dict()
    out["difference_set"] = list(base.difference_set.elements)
    return EXIT_OK, _dump(out)


def _scenario(args) -> simulator.Scenario:
    if args.scenario:
        with open(args.scenario) as fh:
            return simulator.Scenario.from_json(fh.read())
    if args.N is None:
        raise UsageError("--N or --scenario is required")
    return simulator.Scenario(
        N=args.N,
        trials=args.trials,
        seed=args.seed,
        c1=args.c1,
        c2=args.c2,
        n1=args.n1,
        n2=args.n2,
        g=args.g,
        drift=args.drift,
        horizon=args.horizon,
        difference_set=tuple(args.set) if args.set else None,
    )


def cmd_simulate(args):
    sc = _scenario(args)
    stats = [simulator.simulate_ppol(sc)]
    if args.baseline:
        stats.append(simulator.simulate_random_baseline(sc))
    if args.format == "csv":
        return EXIT_OK, simulator.statistics_csv(stats)
    return EXIT_OK, _dump({"scenario": sc.to_dict(), "m": sc.m, "p": sc.p, "results": [s.to_dict() for s in stats]})


def cmd_compare(args):
    report = simulator.compare_ettr(_scenario(args))
    if args.format == "csv":
        return EXIT_OK, report.to_csv()
    return EXIT_OK, _dump(report.to_dict())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ppol", description="PPoL channel hopping: generation, verification, simulation")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        return sp

    sp = add("gen", cmd_gen, "build the PPoL sequence for order m")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--set", type=_int_list, help="normalized difference set to use instead of Singer")

    sp = add("verify-pds", cmd_verify_pds, "check a perfect difference set")
    sp.add_argument("--p", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--set", type=_int_list)

    sp = add("dor", cmd_dor, "degree-of-rendezvous profile")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--set", type=_int_list)

    sp = add("verify-theorem1", cmd_theorem1, "DoR(d) >= m-1 for all d != 0")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--set", type=_int_list)

    for name, func in (("verify-theorem2", cmd_theorem2), ("verify-corollary1", cmd_corollary1)):
        sp = add(name, func, "exhaustive MTTR certification" if func is cmd_theorem2 else "every common channel")
        sp.add_argument("--N", type=int, required=True)
        sp.add_argument("--set", type=_int_list)
        sp.add_argument("--max-N", dest="max_N", type=int, default=analysis.MAX_EXHAUSTIVE_N)

    sp = add("remap", cmd_remap, "remap the PPoL sequence onto an available channel set")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--available", type=_int_list, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--pessimistic", action="store_true", help="leave randomized slots as -1")
    sp.add_argument("--set", type=_int_list)

    for name, func in (("simulate", cmd_simulate), ("compare", cmd_compare)):
        sp = add(name, func, "Monte-Carlo TTR statistics" if func is cmd_simulate else "PPoL vs random ETTR")
        sp.add_argument("--scenario", help="scenario JSON file")
        sp.add_argument("--N", type=int)
        sp.add_argument("--c1", type=_int_list)
        sp.add_argument("--c2", type=_int_list)
        sp.add_argument("--n1", type=int)
        sp.add_argument("--n2", type=int)
        sp.add_argument("--g", type=int)
        sp.add_argument("--drift", type=int)
        sp.add_argument("--trials", type=int, default=1000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--horizon", type=int)
        sp.add_argument("--set", type=_int_list)
        if func is cmd_simulate:
            sp.add_argument("--baseline", action="store_true", help="also run the uniform random baseline")
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    print(f"ppol: error: {kind}: {' '.join(str(message).split())}", file=sys.stderr)
    return code


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        status, text = args.func(args)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except (ValueError, DifferenceSetError, SearchLimitError, analysis.EnumerationBudgetError) as exc:
        return _fail("parameters", exc, EXIT_USAGE)
    except OSError as exc:
        return _fail("io", exc, EXIT_IO)
    try:
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        return _fail("io", exc, EXIT_IO)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
