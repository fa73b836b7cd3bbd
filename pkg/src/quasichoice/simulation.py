"""Monte Carlo experiments: how often a rule chooses a single alternative.

Each trial draws a random profile, evaluates the rule on the full set of
alternatives and records the choice size together with whether the relations of the rule's
leading type above one half grow by exactly one pair at a time until every
pair of alternatives is related in one direction.
Every trial gets its own seed derived from ``(seed, n, trial)``, so results
do not depend on trial order or on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np

from .generators import PROFILE_CLASSES, random_profile
from .majority import HALF, MajorityType, critical_strengths, majority_matrix
from .rules import CompiledRule, RuleSpec, parse_rule

CSV_HEADER = ("n", "trials", "determinism_rate", "mean_choice_size", "chain_distinct_rate")

# leading types for which a full set of distinct relations forces a single choice
IMPLICATION_TYPES = (MajorityType.R, MajorityType.P, MajorityType.E, MajorityType.D)


class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    rule: RuleSpec
    profile_class: str
    m: int
    ns: tuple[int, ...]
    trials: int
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.rule, str):
            object.__setattr__(self, "rule", parse_rule(self.rule))
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        if self.trials < 1:
            raise ExperimentError("trials must be at least 1")
        if any(n < 1 for n in self.ns):
            raise ExperimentError("every n must be positive")
        if self.m < 1:
            raise ExperimentError("m must be positive")
        if self.profile_class not in PROFILE_CLASSES:
            raise ExperimentError(f"unknown profile class {self.profile_class!r}")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        data = json.loads(text)
        try:
            return cls(
                rule=data["rule"],
                profile_class=data.get("profile_class", "linear-order"),
                m=int(data["m"]),
                ns=tuple(data["ns"]),
                trials=int(data["trials"]),
                seed=int(data.get("seed", 0)),
            )
        except KeyError as exc:
            raise ExperimentError(f"experiment spec is missing {exc.args[0]!r}") from None


@dataclass(frozen=True)
class TrialRecord:
    n: int
    trial: int
    choice_size: int  # 0 when the rule raised
    distinct: bool
    implication_checked: bool
    implication_violated: bool
    error: Optional[str] = None

    def log_line(self) -> str:
        return (f"n={self.n} trial={self.trial} size={self.choice_size} "
                f"distinct={int(self.distinct)} error={self.error or '-'}")


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    trials: int
    completed: int
    deterministic: int
    total_choice_size: int
    distinct: int
    errors: int
    implication_checked: int
    implication_violations: int

    @property
    def determinism_rate(self) -> float:
        return self.deterministic / self.completed if self.completed else 0.0

    @property
    def mean_choice_size(self) -> float:
        return self.total_choice_size / self.completed if self.completed else 0.0

    @property
    def chain_distinct_rate(self) -> float:
        return self.distinct / self.completed if self.completed else 0.0


@dataclass(frozen=True)
class ExperimentResult:
    spec: ExperimentSpec
    rows: tuple[ExperimentRow, ...]
    records: tuple[TrialRecord, ...] = field(default=(), repr=False)

    @property
    def implication_violations(self) -> int:
        return sum(r.implication_violations for r in self.rows)


def trial_rng(seed: int, n: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, n, trial]))


def nonempty_relations(kind: MajorityType, profile) -> list[np.ndarray]:
    """Distinct relations of ``kind`` over strengths in (1/2, 1] with an off-diagonal pair, largest first."""
    off = ~np.eye(profile.m, dtype=bool)
    found = []
    for alpha in critical_strengths(kind, None, profile, HALF, 1):
        mat = majority_matrix(kind, alpha, profile) & off
        if mat.any():
            found.append(mat)
    return found


def chain_distinct(kind: MajorityType, profile) -> bool:
    """Every pair of alternatives enters the chain on its own, in a single orientation.

    Equivalent to one non-empty relation per pair with an antisymmetric
    largest relation, so consecutive relations differ by exactly one pair.
    """
    found = nonempty_relations(kind, profile)
    if len(found) != comb(profile.m, 2):
        return False
    return not (found[0] & found[0].T).any()


def _run_trial(args) -> TrialRecord:
    spec, n, t = args
    profile = random_profile(trial_rng(spec.seed, n, t), spec.m, n, spec.profile_class)
    S = frozenset(profile.labels)
    kind = spec.rule.chain.segments[0].kind
    distinct = chain_distinct(kind, profile)
    try:
        chosen = CompiledRule(spec.rule)(S, profile)
    except Exception as exc:  # counted, not fatal
        return TrialRecord(n, t, 0, distinct, False, False, f"{type(exc).__name__}: {exc}")
    checked = distinct and kind in IMPLICATION_TYPES
    violated = False
    if checked:
        plain = CompiledRule(f"{kind}(1/2,1]")
        violated = len(plain(S, profile)) != 1
    return TrialRecord(n, t, len(chosen), distinct, checked, violated)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    jobs = [(spec, n, t) for n in spec.ns for t in range(spec.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_trial, jobs, chunksize=64))
    else:
        records = [_run_trial(job) for job in jobs]
    rows = []
    for n in spec.ns:
        mine = [r for r in records if r.n == n]
        done = [r for r in mine if r.error is None]
        rows.append(ExperimentRow(
            n=n,
            trials=len(mine),
            completed=len(done),
            deterministic=sum(r.choice_size == 1 for r in done),
            total_choice_size=sum(r.choice_size for r in done),
            distinct=sum(r.distinct for r in done),
            errors=len(mine) - len(done),
            implication_checked=sum(r.implication_checked for r in done),
            implication_violations=sum(r.implication_violated for r in done),
        ))
    return ExperimentResult(spec, tuple(rows), tuple(records))


def write_csv(result: ExperimentResult | Sequence[ExperimentRow]) -> str:
    rows = result.rows if isinstance(result, ExperimentResult) else result
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([
            row.n,
            row.trials,
            f"{row.determinism_rate:.6f}",
            f"{row.mean_choice_size:.6f}",
            f"{row.chain_distinct_rate:.6f}",
        ])
    return buf.getvalue()


def write_trial_log(result: ExperimentResult) -> str:
    return "".join(r.log_line() + "\n" for r in result.records)
