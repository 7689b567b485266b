"""Core data model: value tokens, events, deterministic traces, input domains.

Values are opaque text tokens compared by exact equality ("5000" != "05000").
A trace is a finite word of input-output events in which equal inputs always
carry equal outputs; violating that constraint is an error, never a verdict,
because it means the observed subject is not a deterministic program.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import DeterminismViolation, ParseError

InputTuple = tuple[str, ...]

_INT_RE = re.compile(r"-?[0-9]+")


def is_token(value: object) -> bool:
    """True iff `value` is a legal value token: non-empty text, no whitespace."""
    return (
        isinstance(value, str)
        and len(value) > 0
        and not any(ch.isspace() for ch in value)
    )


def check_token(value: object) -> str:
    if not is_token(value):
        raise ValueError(f"not a valid value token: {value!r}")
    return value  # type: ignore[return-value]


def check_input_tuple(coords: object) -> InputTuple:
    """Validate an input event: a non-empty tuple of value tokens."""
    if not isinstance(coords, tuple) or len(coords) == 0:
        raise ValueError(f"input event must be a non-empty tuple, got {coords!r}")
    for c in coords:
        check_token(c)
    return coords


def _source_key(tokens: Iterable[str]):
    """Canonical per-source sort key: numeric when every token is a decimal
    integer, text otherwise. Tokens with equal numeric value but different
    text ("05" vs "5") tie-break on the text."""
    toks = list(tokens)
    if all(_INT_RE.fullmatch(t) for t in toks):
        return lambda t: (int(t), t)
    return lambda t: t


@dataclass(frozen=True)
class Event:
    """One observation: an input tuple and the output it produced."""

    inputs: InputTuple
    output: str

    def __post_init__(self):
        check_input_tuple(self.inputs)
        check_token(self.output)

    @property
    def arity(self) -> int:
        return len(self.inputs)


class Trace:
    """An immutable deterministic trace (equal inputs imply equal outputs)."""

    __slots__ = ("_events", "_arity", "_first_seen")

    def __init__(self, events: Iterable[Event] = ()):
        evs = tuple(events)
        arity: int | None = None
        first_seen: dict[InputTuple, tuple[str, int]] = {}
        for pos, e in enumerate(evs):
            if not isinstance(e, Event):
                raise TypeError(f"expected Event, got {type(e).__name__}")
            if arity is None:
                arity = e.arity
            elif e.arity != arity:
                raise ValueError(
                    f"event {pos} has arity {e.arity}, trace has arity {arity}"
                )
            prior = first_seen.get(e.inputs)
            if prior is None:
                first_seen[e.inputs] = (e.output, pos)
            elif prior[0] != e.output:
                raise DeterminismViolation(
                    f"input {e.inputs} produced {e.output!r} at position {pos} "
                    f"but {prior[0]!r} at position {prior[1]}",
                    index=prior[1],
                )
        self._events = evs
        self._arity = arity
        self._first_seen = first_seen

    @property
    def events(self) -> tuple[Event, ...]:
        return self._events

    @property
    def arity(self) -> int | None:
        """Common arity of all events; None for the empty trace."""
        return self._arity

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __getitem__(self, i: int) -> Event:
        return self._events[i]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Trace) and self._events == other._events

    def __hash__(self) -> int:
        return hash(self._events)

    def __repr__(self) -> str:
        return f"Trace({len(self._events)} events, arity={self._arity})"

    def append(self, event: Event) -> Trace:
        """Extended trace, or DeterminismViolation naming the conflicting
        prior position."""
        if self._arity is not None and event.arity != self._arity:
            raise ValueError(
                f"event has arity {event.arity}, trace has arity {self._arity}"
            )
        prior = self._first_seen.get(event.inputs)
        if prior is not None and prior[0] != event.output:
            raise DeterminismViolation(
                f"input {event.inputs} produced {event.output!r} "
                f"but {prior[0]!r} at position {prior[1]}",
                index=prior[1],
            )
        return Trace(self._events + (event,))

    def is_prefix_of(self, other: Trace) -> bool:
        return len(self) <= len(other) and other._events[: len(self)] == self._events

    def output_of(self, inputs: InputTuple) -> str | None:
        """Output recorded for `inputs`, or None if the input never occurs."""
        hit = self._first_seen.get(inputs)
        return hit[0] if hit else None

    def distinct_inputs(self) -> int:
        return len(self._first_seen)


class InputDomain:
    """A finite product domain, one ordered value set per input source."""

    __slots__ = ("_sources", "_sets", "_size")

    def __init__(self, sources: Iterable[Iterable[str]]):
        canon = []
        for k, src in enumerate(sources):
            tokens = set(src)
            if not tokens:
                raise ValueError(f"source {k} is empty")
            for t in tokens:
                check_token(t)
            canon.append(tuple(sorted(tokens, key=_source_key(tokens))))
        if not canon:
            raise ValueError("domain needs at least one source")
        self._sources = tuple(canon)
        self._sets = tuple(frozenset(s) for s in canon)
        size = 1
        for s in canon:
            size *= len(s)
        self._size = size

    @property
    def sources(self) -> tuple[tuple[str, ...], ...]:
        return self._sources

    @property
    def arity(self) -> int:
        return len(self._sources)

    @property
    def size(self) -> int:
        return self._size

    def contains(self, inputs: InputTuple) -> bool:
        return len(inputs) == len(self._sets) and all(
            c in s for c, s in zip(inputs, self._sets)
        )

    def enumerate(self) -> Iterator[InputTuple]:
        """Every element of the product exactly once, lexicographic in source
        order."""
        return itertools.product(*self._sources)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, InputDomain) and self._sources == other._sources

    def __hash__(self) -> int:
        return hash(self._sources)

    def __repr__(self) -> str:
        return f"InputDomain(arity={self.arity}, size={self._size})"

    @classmethod
    def from_dict(cls, obj: object) -> InputDomain:
        """Build from `{"sources": [{"set": [...]} | {"range": [lo, hi]}, ...]}`."""
        if not isinstance(obj, dict) or set(obj) != {"sources"}:
            raise ParseError('domain must be an object with a single "sources" key')
        sources = obj["sources"]
        if not isinstance(sources, list) or not sources:
            raise ParseError('"sources" must be a non-empty array')
        built: list[list[str]] = []
        for k, spec in enumerate(sources):
            if not isinstance(spec, dict) or len(spec) != 1:
                raise ParseError(f'source {k}: expected {{"set": ...}} or {{"range": ...}}')
            if "set" in spec:
                vals = spec["set"]
                if not isinstance(vals, list) or not vals:
                    raise ParseError(f'source {k}: "set" must be a non-empty array')
                for v in vals:
                    if not is_token(v):
                        raise ParseError(f"source {k}: invalid token {v!r}")
                built.append(list(vals))
            elif "range" in spec:
                rng = spec["range"]
                if (
                    not isinstance(rng, list)
                    or len(rng) != 2
                    or not all(isinstance(b, int) and not isinstance(b, bool) for b in rng)
                ):
                    raise ParseError(f'source {k}: "range" must be [lo, hi] integers')
                lo, hi = rng
                if lo > hi:
                    raise ParseError(f"source {k}: empty range {lo}..{hi}")
                built.append([str(i) for i in range(lo, hi + 1)])
            else:
                raise ParseError(f'source {k}: expected "set" or "range"')
        return cls(built)


def load_domain(path: str) -> InputDomain:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"domain file is not valid JSON: {exc}") from exc
    return InputDomain.from_dict(obj)


def _parse_record(obj: object, line_no: int, *, input_key: str, output_key: str) -> tuple[InputTuple, str]:
    """Shared JSONL record shape check for trace and table files."""
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", line=line_no)
    if set(obj) != {input_key, output_key}:
        raise ParseError(
            f'expected exactly the fields "{input_key}" and "{output_key}", '
            f"got {sorted(obj)}",
            line=line_no,
        )
    raw_in = obj[input_key]
    if not isinstance(raw_in, list) or len(raw_in) == 0:
        raise ParseError(f'"{input_key}" must be a non-empty array', line=line_no)
    for c in raw_in:
        if not is_token(c):
            raise ParseError(f'invalid token in "{input_key}": {c!r}', line=line_no)
    raw_out = obj[output_key]
    if not is_token(raw_out):
        raise ParseError(f'invalid "{output_key}" token: {raw_out!r}', line=line_no)
    return tuple(raw_in), raw_out


def iter_io_lines(text: str, *, input_key: str = "in", output_key: str = "out") -> Iterator[tuple[int, InputTuple, str]]:
    """Yield (line_number, inputs, output) for each JSONL record; blank lines
    are skipped."""
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=line_no) from exc
        yield (line_no, *_parse_record(obj, line_no, input_key=input_key, output_key=output_key))


def parse_trace(text: str) -> Trace:
    """Parse JSONL `{"in": [...], "out": "..."}` lines into a Trace.

    Raises ParseError with the offending line number, or DeterminismViolation
    when two lines give the same input different outputs.
    """
    events: list[Event] = []
    arity: int | None = None
    first_seen: dict[InputTuple, tuple[str, int, int]] = {}
    for line_no, inputs, output in iter_io_lines(text):
        if arity is None:
            arity = len(inputs)
        elif len(inputs) != arity:
            raise ParseError(
                f"arity {len(inputs)} differs from earlier arity {arity}",
                line=line_no,
            )
        prior = first_seen.get(inputs)
        if prior is not None and prior[0] != output:
            raise DeterminismViolation(
                f"line {line_no}: input {list(inputs)} produced {output!r} "
                f"but {prior[0]!r} on line {prior[2]}",
                index=prior[1],
                line=line_no,
            )
        if prior is None:
            first_seen[inputs] = (output, len(events), line_no)
        events.append(Event(inputs, output))
    return Trace(events)


def load_trace(path: str) -> Trace:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_trace(fh.read())


def serialize_trace(trace: Trace) -> str:
    """Inverse of parse_trace (round-trip identity), one event per line."""
    lines = [
        json.dumps({"in": list(e.inputs), "out": e.output}, separators=(",", ":"))
        for e in trace
    ]
    return "".join(line + "\n" for line in lines)


def parse_input_lines(text: str) -> list[InputTuple]:
    """Parse an inputs file: JSONL with an "in" array per line; an extra "out"
    field is tolerated so recorded traces replay as input streams."""
    inputs: list[InputTuple] = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=line_no) from exc
        if not isinstance(obj, dict) or "in" not in obj or not set(obj) <= {"in", "out"}:
            raise ParseError('expected an object with an "in" array', line=line_no)
        raw = obj["in"]
        if not isinstance(raw, list) or len(raw) == 0:
            raise ParseError('"in" must be a non-empty array', line=line_no)
        for c in raw:
            if not is_token(c):
                raise ParseError(f'invalid token in "in": {c!r}', line=line_no)
        inputs.append(tuple(raw))
    return inputs
