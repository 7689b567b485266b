"""Pre-deployment testing: drive a program over its whole finite domain until
the monitor concludes, plus exhaustive minimality oracles over full tables.

The test loop probes each domain element exactly once, in a seeded random
permutation by default, stepping a monitor on every observation. A conclusive
verdict is guaranteed within domain.size probes: a violation stops early,
otherwise full coverage forces TRUE on the last probe.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass

from .errors import BudgetExceeded, DomainMismatch
from .monitor import Monitor, MonitorConfig, Verdict
from .properties import Mode, Witness
from .trace import InputDomain, InputTuple, Trace

RANDOM_PERMUTATION = "random-permutation"
LEXICOGRAPHIC = "lexicographic"

DEFAULT_BUDGET = 10**7
BUDGET_ENV_VAR = "MINIMON_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from None


@dataclass
class FunctionTable:
    """A program materialised as a total map over a product domain."""

    domain: InputDomain
    outputs: dict[InputTuple, str]


def build_table(program, domain: InputDomain) -> FunctionTable:
    """Invoke the program once per domain element, in enumeration order."""
    if program.arity != domain.arity:
        raise ValueError(
            f"program arity {program.arity} does not match domain arity {domain.arity}"
        )
    outputs = {inputs: program.evaluate(inputs) for inputs in domain.enumerate()}
    return FunctionTable(domain, outputs)


@dataclass(frozen=True)
class CollisionWitness:
    """Two domain inputs sharing an output; `differing_source` set when the
    collision is between inputs at Hamming distance 1."""

    input_a: InputTuple
    input_b: InputTuple
    differing_source: int | None = None


@dataclass(frozen=True)
class IndistinguishablePair:
    """Two values of one source that no context of the others separates."""

    source: int
    value_a: str
    value_b: str


def table_mono_minimal(table: FunctionTable) -> tuple[bool, CollisionWitness | None]:
    """True iff the table is injective; else the least colliding input pair
    (by enumeration order)."""
    first_by_output: dict[str, tuple[int, InputTuple]] = {}
    best: tuple[int, InputTuple, InputTuple] | None = None
    for pos, inputs in enumerate(table.domain.enumerate()):
        out = table.outputs[inputs]
        prior = first_by_output.get(out)
        if prior is None:
            first_by_output[out] = (pos, inputs)
        elif best is None or prior[0] < best[0]:
            best = (prior[0], prior[1], inputs)
    if best is None:
        return True, None
    return False, CollisionWitness(best[1], best[2])


def table_strong_dist_minimal(table: FunctionTable) -> tuple[bool, CollisionWitness | None]:
    """True iff every input pair differing in exactly one coordinate has
    distinct outputs; else the least such colliding pair."""
    masked: dict[tuple[int, InputTuple], dict[str, tuple[str, int]]] = {}
    best: tuple[int, int, int, str, InputTuple] | None = None
    for pos, inputs in enumerate(table.domain.enumerate()):
        out = table.outputs[inputs]
        for j in range(len(inputs)):
            key = (j, inputs[:j] + inputs[j + 1:])
            slot = masked.setdefault(key, {})
            prior = slot.get(out)
            if prior is None:
                slot[out] = (inputs[j], pos)
            elif prior[0] != inputs[j]:
                if best is None or (prior[1], pos) < (best[0], best[1]):
                    best = (prior[1], pos, j, prior[0], inputs)
    if best is None:
        return True, None
    _, _, j, prior_coord, inputs_b = best
    inputs_a = inputs_b[:j] + (prior_coord,) + inputs_b[j + 1:]
    return False, CollisionWitness(inputs_a, inputs_b, differing_source=j)


def table_dist_minimal(
    table: FunctionTable, budget: int | None = None
) -> tuple[bool, IndistinguishablePair | None]:
    """True iff for every source, every pair of its values is distinguished by
    the outputs in at least one context of the other sources.

    Two values are indistinguishable exactly when their full output vectors
    over all contexts are equal, so each source is checked by grouping its
    values by output vector. The scan costs arity * domain.size table lookups
    and refuses to start past `budget` (default 10^7, env-overridable).
    """
    if budget is None:
        budget = default_budget()
    domain = table.domain
    planned = domain.arity * domain.size
    if planned > budget:
        raise BudgetExceeded(
            f"distributed-minimality scan needs {planned} table lookups, "
            f"budget is {budget}"
        )
    for j, src in enumerate(domain.sources):
        others = [s for k, s in enumerate(domain.sources) if k != j]
        groups: dict[tuple[str, ...], list[int]] = {}
        for rank, u in enumerate(src):
            vec = tuple(
                table.outputs[ctx[:j] + (u,) + ctx[j:]]
                for ctx in itertools.product(*others)
            )
            groups.setdefault(vec, []).append(rank)
        best: tuple[int, int] | None = None
        for ranks in groups.values():
            if len(ranks) >= 2 and (best is None or (ranks[0], ranks[1]) < best):
                best = (ranks[0], ranks[1])
        if best is not None:
            return False, IndistinguishablePair(j, src[best[0]], src[best[1]])
    return True, None


@dataclass
class TestReport:
    """Outcome of a full-domain test run. Verdicts are always conclusive."""

    verdict: Verdict
    witness: Witness | None
    steps: int
    trace: Trace
    strategy: str
    seed: int | None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.token,
            "witness": self.witness.to_dict() if self.witness else None,
            "steps": self.steps,
            "strategy": self.strategy,
            "seed": self.seed,
        }


def run_test(
    program,
    domain: InputDomain,
    mode: Mode,
    strategy: str = RANDOM_PERMUTATION,
    seed: int = 0,
) -> TestReport:
    """Probe every domain element until the monitor concludes.

    The monitor observes `program.observe(i)`, so for pre-processed
    compositions the declared domain must be the pre-processor's range;
    otherwise observed inputs repeat, the domain runs out inconclusively, and
    DomainMismatch is raised (same for a size-1 domain, which can never reach
    the two-event minimum for a conclusive verdict).
    """
    if strategy not in (RANDOM_PERMUTATION, LEXICOGRAPHIC):
        raise ValueError(f"unknown strategy {strategy!r}")
    if program.arity != domain.arity:
        raise ValueError(
            f"program arity {program.arity} does not match domain arity {domain.arity}"
        )
    order = list(domain.enumerate())
    if strategy == RANDOM_PERMUTATION:
        random.Random(seed).shuffle(order)
    monitor = Monitor(MonitorConfig(mode, domain))
    events = []
    for inputs in order:
        event = program.observe(inputs)
        verdict = monitor.step(event)
        events.append(event)
        if verdict.conclusive:
            return TestReport(
                verdict,
                monitor.witness,
                len(events),
                Trace(events),
                strategy,
                seed if strategy == RANDOM_PERMUTATION else None,
            )
    raise DomainMismatch(
        f"probed all {domain.size} domain elements without a conclusive verdict; "
        "either the domain has fewer than 2 elements or the declared domain is "
        "not the domain of observed inputs (compositions must be tested over "
        "the pre-processor's range)"
    )
