"""Input-minimiser synthesis by output partitioning, plus validation and
composition of arbitrary pre-processor tables.

A pre-processor maps the domain into itself without changing the program's
output and is idempotent; it is a minimiser when the program restricted to
the pre-processor's range is injective. Synthesis groups the domain by
output and sends every input to its class representative, which yields a
minimiser by construction.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

from .errors import BudgetExceeded, InputOutsideDomain, ParseError
from .programs import Program
from .trace import Event, InputDomain, InputTuple, is_token

DEFAULT_SYNTH_CAP = 10**6

REP_LEAST = "least"
REP_FIRST = "first"


@dataclass
class PartitionMap:
    """Domain inputs grouped by program output (groups in first-seen order,
    members in visitation order)."""

    classes: dict[str, tuple[InputTuple, ...]]
    domain: InputDomain

    @property
    def count(self) -> int:
        return len(self.classes)


@dataclass
class MinimiserTable:
    """A total input -> representative map over some domain."""

    mapping: dict[InputTuple, InputTuple]
    arity: int

    @property
    def representatives(self) -> frozenset[InputTuple]:
        return frozenset(self.mapping.values())

    def apply(self, inputs: InputTuple) -> InputTuple:
        try:
            return self.mapping[inputs]
        except KeyError:
            raise InputOutsideDomain(
                f"input {inputs} has no entry in the minimiser table"
            ) from None


def _parse_rep_strategy(rep_strategy: str):
    if rep_strategy in (REP_LEAST, REP_FIRST):
        return rep_strategy, None
    if rep_strategy.startswith("rand:"):
        raw = rep_strategy[len("rand:"):]
        try:
            return "rand", int(raw)
        except ValueError:
            raise ValueError(f"rand strategy needs an integer seed, got {raw!r}") from None
    raise ValueError(
        f"unknown rep_strategy {rep_strategy!r} (expected least, first, or rand:SEED)"
    )


def synthesize(
    program: Program,
    domain: InputDomain,
    rep_strategy: str = REP_LEAST,
    cap: int = DEFAULT_SYNTH_CAP,
    order: Sequence[InputTuple] | None = None,
) -> tuple[MinimiserTable, PartitionMap]:
    """Partition the domain by output and map each input to its class
    representative.

    Representatives: "least" picks each class's least element in enumeration
    order, "first" the first one visited (identical under the default
    enumeration-order visitation; `order` overrides visitation), "rand:SEED"
    a seeded random member. Deterministic for a fixed strategy.
    """
    kind, seed = _parse_rep_strategy(rep_strategy)
    if program.arity != domain.arity:
        raise ValueError(
            f"program arity {program.arity} does not match domain arity {domain.arity}"
        )
    if domain.size > cap:
        raise BudgetExceeded(
            f"domain has {domain.size} elements, synthesis cap is {cap}"
        )
    visitation = domain.enumerate() if order is None else order
    classes: dict[str, list[InputTuple]] = {}
    for inputs in visitation:
        classes.setdefault(program.evaluate(inputs), []).append(inputs)
    total = sum(len(c) for c in classes.values())
    if total != domain.size:
        raise ValueError(
            f"visitation order covered {total} inputs, domain has {domain.size}"
        )

    if kind == "rand":
        rnd = random.Random(seed)
        reps = {out: rnd.choice(members) for out, members in classes.items()}
    elif kind == REP_FIRST or order is None:
        reps = {out: members[0] for out, members in classes.items()}
    else:
        rank = {inputs: k for k, inputs in enumerate(domain.enumerate())}
        reps = {out: min(members, key=rank.__getitem__) for out, members in classes.items()}

    mapping = {
        inputs: reps[out] for out, members in classes.items() for inputs in members
    }
    partition = PartitionMap(
        {out: tuple(members) for out, members in classes.items()}, domain
    )
    return MinimiserTable(mapping, domain.arity), partition


@dataclass(frozen=True)
class ValidationFailure:
    """One counterexample found by validate_preprocessor."""

    kind: str
    inputs: tuple[InputTuple, ...]
    note: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "inputs": [list(i) for i in self.inputs], "note": self.note}


@dataclass
class ValidationReport:
    is_preprocessor: bool
    is_minimiser: bool
    failures: list[ValidationFailure]

    def to_dict(self) -> dict:
        return {
            "is_preprocessor": self.is_preprocessor,
            "is_minimiser": self.is_minimiser,
            "failures": [f.to_dict() for f in self.failures],
        }


def validate_preprocessor(
    program: Program, domain: InputDomain, table: MinimiserTable
) -> ValidationReport:
    """Check a candidate table over the whole domain: targets stay inside the
    domain, outputs are preserved, the map is idempotent, and (for minimiser
    status) the program is injective on the table's range."""
    mapping = table.mapping
    failures: list[ValidationFailure] = []
    pre_ok = True
    flagged_targets: set[InputTuple] = set()
    reps_in_order: list[InputTuple] = []
    reps_seen: set[InputTuple] = set()
    for inputs in domain.enumerate():
        target = mapping.get(inputs)
        if target is None:
            raise InputOutsideDomain(
                f"table is not total on the domain: no entry for {inputs}"
            )
        if not domain.contains(target):
            if target not in flagged_targets:
                flagged_targets.add(target)
                failures.append(ValidationFailure(
                    "target-outside-domain",
                    (inputs, target),
                    f"{inputs} maps to {target}, which is outside the domain",
                ))
            pre_ok = False
            continue
        if target not in reps_seen:
            reps_seen.add(target)
            reps_in_order.append(target)
            retarget = mapping.get(target)
            if retarget != target:
                failures.append(ValidationFailure(
                    "not-idempotent",
                    (inputs, target),
                    f"{inputs} maps to {target}, which maps on to {retarget}",
                ))
                pre_ok = False
        if program.evaluate(target) != program.evaluate(inputs):
            failures.append(ValidationFailure(
                "changes-output",
                (inputs, target),
                f"program({inputs}) != program({target}) so the table changes behaviour",
            ))
            pre_ok = False

    injective = True
    first_by_output: dict[str, InputTuple] = {}
    for rep in reps_in_order:
        out = program.evaluate(rep)
        prior = first_by_output.get(out)
        if prior is None:
            first_by_output[out] = rep
        else:
            failures.append(ValidationFailure(
                "representatives-collide",
                (prior, rep),
                f"representatives {prior} and {rep} share output {out!r}",
            ))
            injective = False
    return ValidationReport(pre_ok, pre_ok and injective, failures)


class ComposedProgram(Program):
    """`program` behind a pre-processor: evaluates program(apply(table, i));
    monitors attached to it observe the pre-processed input."""

    def __init__(self, program: Program, table: MinimiserTable, cache: bool = True):
        if program.arity != table.arity:
            raise ValueError(
                f"program arity {program.arity} does not match table arity {table.arity}"
            )
        super().__init__(program.arity, f"pre+{program.name}", cache)
        self.program = program
        self.table = table

    def _call(self, inputs: InputTuple) -> str:
        return self.program.evaluate(self.table.apply(inputs))

    def observe(self, inputs: InputTuple) -> Event:
        pre_processed = self.table.apply(inputs)
        return Event(pre_processed, self.program.evaluate(pre_processed))

    def close(self) -> None:
        self.program.close()


def compose(program: Program, table: MinimiserTable) -> ComposedProgram:
    return ComposedProgram(program, table)


def save_minimiser(table: MinimiserTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for src, dst in table.mapping.items():
            fh.write(json.dumps({"from": list(src), "to": list(dst)}, separators=(",", ":")) + "\n")


def load_minimiser(path: str) -> MinimiserTable:
    """Read a JSONL pre-processor table: lines {"from": [...], "to": [...]}."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    mapping: dict[InputTuple, InputTuple] = {}
    arity: int | None = None
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=line_no) from exc
        if not isinstance(obj, dict) or set(obj) != {"from", "to"}:
            raise ParseError('expected exactly the fields "from" and "to"', line=line_no)
        sides = []
        for field in ("from", "to"):
            raw = obj[field]
            if not isinstance(raw, list) or len(raw) == 0:
                raise ParseError(f'"{field}" must be a non-empty array', line=line_no)
            for c in raw:
                if not is_token(c):
                    raise ParseError(f'invalid token in "{field}": {c!r}', line=line_no)
            sides.append(tuple(raw))
        src, dst = sides
        if arity is None:
            arity = len(src)
        if len(src) != arity or len(dst) != arity:
            raise ParseError(
                f"arities {len(src)}/{len(dst)} differ from earlier arity {arity}",
                line=line_no,
            )
        prior = mapping.get(src)
        if prior is not None and prior != dst:
            raise ParseError(
                f"duplicate entry for {list(src)} with a different target", line=line_no
            )
        mapping[src] = dst
    if arity is None:
        raise ParseError("minimiser table file has no entries")
    return MinimiserTable(mapping, arity)
