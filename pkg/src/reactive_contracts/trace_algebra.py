"""Events and finite-sequence traces.

Traces are plain tuples.  The operations below only rely on tuple
concatenation and slicing, so they work equally for tuples of ``Event``
values and for tuples of integer event indices (which is what the
enumeration engine uses internally).
"""

from __future__ import annotations

from math import comb
from typing import NamedTuple, Sequence


class NotAPrefix(ValueError):
    pass


class Event(NamedTuple):
    channel: str
    args: tuple = ()

    def __str__(self):
        return ".".join([self.channel, *(str(a).lower() if isinstance(a, bool) else str(a) for a in self.args)])


Trace = tuple


def empty() -> Trace:
    return ()


def concat(s: Trace, t: Trace) -> Trace:
    return tuple(s) + tuple(t)


def prefix_le(s: Trace, t: Trace) -> bool:
    return len(s) <= len(t) and tuple(t[: len(s)]) == tuple(s)


def prefix_lt(s: Trace, t: Trace) -> bool:
    return len(s) < len(t) and prefix_le(s, t)


def subtract(t: Trace, s: Trace) -> Trace:
    """The unique ``u`` with ``concat(s, u) == t``."""
    if not prefix_le(s, t):
        raise NotAPrefix(f"{fmt_trace(s)} is not a prefix of {fmt_trace(t)}")
    return tuple(t[len(s):])


def measure(t: Trace) -> int:
    return len(t)


def interleavings(s: Trace, t: Trace) -> frozenset:
    s, t = tuple(s), tuple(t)
    if not s:
        return frozenset([t])
    if not t:
        return frozenset([s])
    left = {(s[0],) + r for r in interleavings(s[1:], t)}
    right = {(t[0],) + r for r in interleavings(s, t[1:])}
    return frozenset(left | right)


def interleaving_bound(s: Trace, t: Trace) -> int:
    return comb(len(s) + len(t), len(s))


def fmt_trace(t: Sequence, names: Sequence[str] | None = None) -> str:
    if names is not None:
        t = [names[e] for e in t]
    return "⟨" + ",".join(str(e) for e in t) + "⟩"


class SequenceTraces:
    """The finite-sequence instance of the trace algebra.

    Anything that needs a carrier takes an object with this interface;
    it is the only instance shipped.
    """

    empty = staticmethod(empty)
    concat = staticmethod(concat)
    le = staticmethod(prefix_le)
    lt = staticmethod(prefix_lt)
    minus = staticmethod(subtract)
    measure = staticmethod(measure)


SEQ = SequenceTraces()
