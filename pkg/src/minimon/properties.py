"""Trace-level minimality predicates and witness extraction.

Monolithic minimality asks that distinct inputs never share an output;
strong distributed minimality restricts the same demand to input pairs that
differ in exactly one coordinate. Both are decided over whole traces here;
the incremental equivalents live in `monitor` and must agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InputOutsideDomain
from .trace import InputDomain, InputTuple, Trace


class Mode(Enum):
    MONOLITHIC = "monolithic"
    STRONG_DISTRIBUTED = "strong-distributed"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Witness:
    """A violating pair of trace positions.

    index_a < index_b, outputs equal; the inputs differ (monolithic) or
    differ at exactly `differing_source` (strong-distributed, 0-based).
    """

    kind: Mode
    index_a: int
    index_b: int
    differing_source: int | None = None

    def __post_init__(self):
        if not 0 <= self.index_a < self.index_b:
            raise ValueError(f"bad witness indices ({self.index_a}, {self.index_b})")
        if (self.differing_source is not None) != (self.kind is Mode.STRONG_DISTRIBUTED):
            raise ValueError("differing_source is for strong-distributed witnesses only")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "index_a": self.index_a,
            "index_b": self.index_b,
            "differing_source": self.differing_source,
        }


def single_diff_source(a: InputTuple, b: InputTuple) -> int | None:
    """The unique coordinate where `a` and `b` differ, or None when they
    differ at zero or several coordinates."""
    if len(a) != len(b):
        raise ValueError(f"arity mismatch: {len(a)} vs {len(b)}")
    found = None
    for j, (x, y) in enumerate(zip(a, b)):
        if x != y:
            if found is not None:
                return None
            found = j
    return found


def mono_witness(trace: Trace) -> Witness | None:
    """Least (index_a, index_b) pair of events with different inputs and equal
    outputs, or None.

    Single pass: the least pair's first element is always the first
    occurrence of its output, so tracking one (input, position) per output
    suffices.
    """
    first_by_output: dict[str, tuple[InputTuple, int]] = {}
    best: tuple[int, int] | None = None
    for pos, e in enumerate(trace):
        prior = first_by_output.get(e.output)
        if prior is None:
            first_by_output[e.output] = (e.inputs, pos)
        elif prior[0] != e.inputs:
            if best is None or prior[1] < best[0]:
                best = (prior[1], pos)
    if best is None:
        return None
    return Witness(Mode.MONOLITHIC, best[0], best[1])


def strong_dist_witness(trace: Trace) -> Witness | None:
    """Least violating pair whose inputs differ in exactly one coordinate.

    Indexes events by (source, input with that coordinate dropped, output):
    two events collide exactly when they agree everywhere but one source and
    share an output. First occurrences per key cover the least pair.
    """
    masked: dict[tuple[int, InputTuple], dict[str, tuple[str, int]]] = {}
    best: tuple[int, int, int] | None = None
    for pos, e in enumerate(trace):
        coords = e.inputs
        for j in range(len(coords)):
            key = (j, coords[:j] + coords[j + 1:])
            slot = masked.setdefault(key, {})
            prior = slot.get(e.output)
            if prior is None:
                slot[e.output] = (coords[j], pos)
            elif prior[0] != coords[j]:
                if best is None or (prior[1], pos) < (best[0], best[1]):
                    best = (prior[1], pos, j)
    if best is None:
        return None
    return Witness(Mode.STRONG_DISTRIBUTED, best[0], best[1], differing_source=best[2])


def is_mono_minimal(trace: Trace) -> bool:
    """True iff no two events have different inputs and equal outputs."""
    return mono_witness(trace) is None


def is_strong_dist_minimal(trace: Trace) -> bool:
    """True iff no two events have inputs differing in exactly one coordinate
    and equal outputs. Coincides with is_mono_minimal at arity 1."""
    return strong_dist_witness(trace) is None


def find_witness(mode: Mode, trace: Trace) -> Witness | None:
    if mode is Mode.MONOLITHIC:
        return mono_witness(trace)
    return strong_dist_witness(trace)


def covers_domain(domain: InputDomain, trace: Trace) -> bool:
    """True iff every element of the domain occurs as an input of `trace`.

    Short-circuits to False when the trace is shorter than the domain size;
    otherwise scans with a seen-set and stops as soon as the count of
    distinct in-domain inputs reaches domain.size. An input outside the
    domain is an error (the declared domain is wrong), not a False.
    """
    if trace.arity is not None and trace.arity != domain.arity:
        raise ValueError(
            f"trace arity {trace.arity} does not match domain arity {domain.arity}"
        )
    if len(trace) < domain.size:
        return False
    seen: set[InputTuple] = set()
    for pos, e in enumerate(trace):
        if not domain.contains(e.inputs):
            raise InputOutsideDomain(
                f"input {e.inputs} at position {pos} is outside the declared domain",
                position=pos,
            )
        seen.add(e.inputs)
        if len(seen) == domain.size:
            return True
    return False
