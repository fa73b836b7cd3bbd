"""``quasichoice`` command line.

Exit status: 0 on success, 1 for domain errors (bad profile, rule that cannot
be evaluated), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import axioms as ax
from .majority import critical_strengths, build_chain, parse_strength, verify_inclusions
from .profile_io import read_profile
from .profiles import ProfileError, component_label
from .relations import NotNestedError, RelationError
from .rules import (
    RuleConfigError,
    evaluate,
    minimal_components,
    pair_components,
    parse_rule,
)
from .simulation import ExperimentError, ExperimentSpec, run_experiment, write_csv, write_trial_log


class UsageError(Exception):
    pass


def _feasible(profile, text: str | None) -> frozenset:
    if not text:
        return frozenset(profile.labels)
    labels = [t.strip() for t in text.split(",") if t.strip()]
    if not labels:
        raise UsageError("--set is empty")
    for lab in labels:
        profile.index(lab)
    return frozenset(labels)


def _braced(B) -> str:
    return component_label(B)


def cmd_choose(args, out) -> None:
    profile = read_profile(args.profile)
    S = _feasible(profile, args.set)
    result = evaluate(parse_rule(args.rule), S, profile)
    if args.trace:
        for step in result.trace:
            out.write(f"# {step}\n")
    for lab in sorted(result.chosen):
        out.write(lab + "\n")


def cmd_axioms(args, out) -> None:
    ids = [a.strip() for a in (args.axioms or "").split(",") if a.strip()] or list(ax.AXIOM_IDS)
    unknown = [a for a in ids if a not in ax.AXIOM_IDS]
    if unknown:
        raise UsageError(f"unknown axiom id(s): {', '.join(unknown)}; known: {', '.join(ax.AXIOM_IDS)}")
    spec = parse_rule(args.rule)
    profile = read_profile(args.profile)
    scope = ax.Scope(samples=args.scope, iso_limit=args.scope, seed=args.seed)
    for axiom in ids:
        out.write(ax.run_axiom(axiom, spec, profile, scope).to_line() + "\n")


def cmd_components(args, out) -> None:
    profile = read_profile(args.profile)
    S = _feasible(profile, args.set)
    found = minimal_components(S, profile) if len(S) > 2 else []
    if found:
        for B in found:
            out.write(_braced(B) + "\n")
    else:
        out.write("none\n")
    if args.pairs:
        for (x, y), B in sorted(pair_components(S, profile).items()):
            out.write(f"{x} {y}: {_braced(B)}\n")


def cmd_chain(args, out) -> None:
    profile = read_profile(args.profile)
    S = _feasible(profile, args.set)
    spec = parse_rule(args.rule)
    sub = profile.restrict(S)
    for seg in spec.chain.segments:
        values = critical_strengths(seg.kind, None, sub, seg.beta, seg.gamma)
        out.write(f"{seg}: critical " + " ".join(str(v) for v in values) + "\n")
    chain = build_chain(spec.chain, S, profile)
    off_diag = len(S)
    for k, member in enumerate(chain.members, start=1):
        size = int(member.hull.matrix.sum()) - off_diag
        raw = sorted({int(r.matrix.sum()) - off_diag for _, _, r in member.sources})
        out.write(f"member {k}: hull_pairs={size} relation_pairs={','.join(map(str, raw))} "
                  f"sources={' '.join(member.source_names)}\n")


def cmd_inclusions(args, out) -> None:
    profile = read_profile(args.profile)
    S = _feasible(profile, args.set)
    alpha = parse_strength(args.alpha)
    for check in verify_inclusions(profile, S, alpha):
        out.write(str(check) + "\n")


def cmd_simulate(args, out) -> None:
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec = ExperimentSpec.from_json(fh.read())
    else:
        if not (args.rule and args.m and args.ns and args.trials):
            raise UsageError("simulate needs --spec FILE or --rule, --m, --ns and --trials")
        ns = tuple(int(v) for v in args.ns.split(",") if v.strip())
        spec = ExperimentSpec(parse_rule(args.rule), args.profile_class, args.m, ns, args.trials, args.seed)
    result = run_experiment(spec, workers=args.workers)
    out.write(write_csv(result))
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write(write_trial_log(result))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quasichoice", description="Majority-chain choice rules on arbitrary reflexive preferences.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, rule=True, set_=True):
        if rule:
            p.add_argument("--rule", required=True, help="e.g. 'D(0.5,1]+N1+M1^C^GC^CC^Id'")
        p.add_argument("--profile", required=True, help="profile file")
        if set_:
            p.add_argument("--set", help="comma-separated feasible set (default: all alternatives)")

    p = sub.add_parser("choose", help="print the chosen alternatives")
    common(p)
    p.add_argument("--trace", action="store_true", help="show every modification stage")
    p.set_defaults(func=cmd_choose)

    p = sub.add_parser("axioms", help="check axioms on all feasible sets of a profile")
    common(p, set_=False)
    p.add_argument("--axioms", default="", help="comma-separated axiom ids (default: all)")
    p.add_argument("--scope", type=int, default=200, help="sample budget for subsets and isomorphisms")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("components", help="minimal proper components")
    common(p, rule=False)
    p.add_argument("--pairs", action="store_true", help="also print the smallest component of every pair")
    p.set_defaults(func=cmd_components)

    p = sub.add_parser("chain", help="critical strengths and chain members")
    common(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("inclusions", help="check the inclusions between majority types at one strength")
    common(p, rule=False)
    p.add_argument("--alpha", required=True, help="strength as decimal or p/q")
    p.set_defaults(func=cmd_inclusions)

    p = sub.add_parser("simulate", help="Monte Carlo determinism experiment (CSV on stdout)")
    p.add_argument("--spec", help="JSON experiment spec")
    p.add_argument("--rule")
    p.add_argument("--profile-class", default="linear-order")
    p.add_argument("--m", type=int)
    p.add_argument("--ns", help="comma-separated numbers of individuals")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--log", help="write one line per trial to this file")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except NotNestedError as exc:
        witness = " ".join(map(str, exc.witness)) if exc.witness else "-"
        sys.stderr.write(f"error: {exc} (witness: {witness})\n")
        return 1
    except (ProfileError, RelationError, RuleConfigError, ExperimentError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
