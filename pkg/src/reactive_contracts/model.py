"""Finite universes and alphabetised relations.

A relation is stored as a boolean array with one axis per variable of its
alphabet: cell ``[i0, i1, ...]`` is true exactly when the binding that
gives each variable the value with that index belongs to the relation.
This is an explicit set of bindings, just packed densely so that the
relational operators become array operations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .trace_algebra import Event, fmt_trace

VARS = ("ok", "wait", "tr", "st", "ref", "ok'", "wait'", "tr'", "st'", "ref'")
FULL = VARS
DESIGN = ("ok", "st", "ok'", "st'")
MAX_COUNTEREXAMPLES = 10
# field order used whenever a binding or row is printed
PRINT_ORDER = ("ok", "wait", "ok'", "wait'", "tr", "tr'", "tt", "st", "st'", "ref", "ref'")


class AlphabetMismatch(ValueError):
    pass


class EmptyFamily(ValueError):
    pass


class NotMonotone(ValueError):
    pass


class Undefined(Exception):
    """Raised while evaluating an expression outside its domain."""


# -- domains ----------------------------------------------------------------


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int

    @property
    def size(self):
        return self.hi - self.lo + 1

    def values(self):
        return range(self.lo, self.hi + 1)

    def __str__(self):
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class BoolDom:
    size = 2

    def values(self):
        return (False, True)

    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class MapDom:
    """Partial maps from a key range to a value range."""

    keys: IntRange
    vals: IntRange

    @property
    def slot(self):
        # absent plus every value
        return self.vals.size + 1

    @property
    def size(self):
        return self.slot ** self.keys.size

    def values(self):
        opts = [None, *self.vals.values()]
        return itertools.product(opts, repeat=self.keys.size)

    def __str__(self):
        return f"map {self.keys} to {self.vals}"


def _fmt_value(dom, v):
    if isinstance(dom, MapDom):
        items = [f"{k}:{x}" for k, x in zip(dom.keys.values(), v) if x is not None]
        return "{" + ",".join(items) + "}"
    if isinstance(dom, BoolDom):
        return "true" if v else "false"
    return str(v)


class TruncationCounter:
    """Counts composed rows dropped because their trace exceeds the bound."""

    def __init__(self):
        self.count = 0

    def add(self, n):
        self.count += int(n)

    def reset(self):
        self.count = 0


truncation = TruncationCounter()


# -- universe ---------------------------------------------------------------


class Universe:
    def __init__(self, channels: Sequence = (), state_vars: Sequence = (), bound: int = 2):
        if bound < 1:
            raise ValueError("trace bound must be at least 1")
        self.channels = tuple((name, tuple(rs)) for name, rs in channels)
        self.state_vars = tuple((name, dom) for name, dom in state_vars)
        self.bound = bound
        for name, rs in self.channels:
            if any(r.size < 1 for r in rs):
                raise ValueError(f"empty argument range on channel {name}")
        for name, dom in self.state_vars:
            if dom.size < 1:
                raise ValueError(f"empty domain for {name}")
        self._build_events()
        self._build_states()
        self._build_traces()
        self._le = self._minus = None

    # identity by configuration
    def _key(self):
        return (self.channels, self.state_vars, self.bound)

    def __eq__(self, other):
        return isinstance(other, Universe) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (f"Universe(events={len(self.events)}, states={self.S}, "
                f"traces={self.T}, bound={self.bound})")

    def with_bound(self, bound):
        return Universe(self.channels, self.state_vars, bound)

    # events
    def _build_events(self):
        self.events: list[Event] = []
        self.channel_info = {}
        for name, rs in self.channels:
            base = len(self.events)
            self.channel_info[name] = (base, tuple(rs))
            for args in itertools.product(*(r.values() for r in rs)):
                self.events.append(Event(name, tuple(args)))
        self.event_index = {e: i for i, e in enumerate(self.events)}
        self.event_names = [str(e) for e in self.events]
        self.E = len(self.events)
        self.R = 1 << self.E

    def event_id(self, name_or_event) -> int:
        if isinstance(name_or_event, str):
            parts = name_or_event.split(".")
            name_or_event = Event(parts[0], tuple(int(p) for p in parts[1:]))
        return self.event_index[name_or_event]

    def refset(self, events: Iterable) -> int:
        mask = 0
        for e in events:
            mask |= 1 << (e if isinstance(e, int) else self.event_id(e))
        return mask

    def fmt_ref(self, mask: int) -> str:
        return "{" + ",".join(self.event_names[i] for i in range(self.E) if mask >> i & 1) + "}"

    # states
    def _build_states(self):
        doms = [d for _, d in self.state_vars]
        self.var_index = {n: i for i, (n, _) in enumerate(self.state_vars)}
        self.states = list(itertools.product(*(d.values() for d in doms)))
        self.state_index = {s: i for i, s in enumerate(self.states)}
        self.S = len(self.states)
        sizes = [d.size for d in doms]
        self.strides = [int(np.prod(sizes[i + 1:], dtype=np.int64)) for i in range(len(sizes))]
        # per-variable value tables, used by vectorised expression evaluation
        self.var_values = {}
        for vi, (name, dom) in enumerate(self.state_vars):
            col = [s[vi] for s in self.states]
            if isinstance(dom, MapDom):
                vals = np.array([[0 if x is None else x for x in m] for m in col], dtype=np.int64)
                present = np.array([[x is not None for x in m] for m in col], dtype=bool)
                self.var_values[name] = (vals.reshape(self.S, dom.keys.size), present.reshape(self.S, dom.keys.size))
            else:
                self.var_values[name] = np.array([int(x) for x in col], dtype=np.int64)

    def state_id(self, **values) -> int:
        vals = []
        for name, dom in self.state_vars:
            v = values[name]
            if isinstance(dom, MapDom) and isinstance(v, dict):
                v = tuple(v.get(k) for k in dom.keys.values())
            vals.append(v)
        return self.state_index[tuple(vals)]

    def state_env(self, s: int) -> dict:
        out = {}
        for (name, dom), v in zip(self.state_vars, self.states[s]):
            if isinstance(dom, MapDom):
                v = {k: x for k, x in zip(dom.keys.values(), v) if x is not None}
            out[name] = v
        return out

    def fmt_state(self, s: int) -> str:
        if not self.state_vars:
            return "()"
        return "(" + ",".join(f"{n}={_fmt_value(d, v)}" for (n, d), v in zip(self.state_vars, self.states[s])) + ")"

    def state_fn(self, fn: Callable[[dict], dict | None]) -> np.ndarray:
        """Tabulate a state update: ``fn`` maps an environment to the updated
        variables; ``None`` or ``Undefined`` marks the state as undefined."""
        out = np.full(self.S, -1, dtype=np.int64)
        for s in range(self.S):
            try:
                upd = fn(self.state_env(s))
            except Undefined:
                continue
            if upd is None:
                continue
            env = self.state_env(s)
            env.update(upd)
            try:
                out[s] = self.state_id(**env)
            except KeyError:
                continue
        return out

    def state_pred(self, fn: Callable[[dict], bool]) -> np.ndarray:
        out = np.zeros(self.S, dtype=bool)
        for s in range(self.S):
            try:
                out[s] = bool(fn(self.state_env(s)))
            except Undefined:
                pass
        return out

    # traces
    def _build_traces(self):
        E, L = self.E, self.bound
        self.traces = []
        lens, nums, self.offset = [], [], []
        for k in range(L + 1):
            self.offset.append(len(self.traces))
            for n, t in enumerate(itertools.product(range(E), repeat=k)):
                self.traces.append(t)
                lens.append(k)
                nums.append(n)
        self.offset.append(len(self.traces))
        self.T = len(self.traces)
        self.tlen = np.array(lens, dtype=np.int64)
        self.tnum = np.array(nums, dtype=np.int64)
        self.offset = np.array(self.offset, dtype=np.int64)
        self.trace_index = {t: i for i, t in enumerate(self.traces)}
        self.parent = np.array([self.trace_index[t[:-1]] if t else -1 for t in self.traces], dtype=np.int64)
        self.last = np.array([t[-1] if t else -1 for t in self.traces], dtype=np.int64)

    def upto(self, k: int) -> int:
        """Number of traces of length at most ``k``."""
        if k < 0:
            return 0
        return int(self.offset[min(k, self.bound) + 1])

    def trace_id(self, t) -> int:
        return self.trace_index[tuple(e if isinstance(e, int) else self.event_id(e) for e in t)]

    def fmt_trace(self, i: int) -> str:
        return fmt_trace(self.traces[i], self.event_names)

    def cat_many(self, i: int, js: np.ndarray) -> np.ndarray:
        """Indices of ``t_i ⌢ t_j`` for each j; callers keep lengths within bound."""
        lj = self.tlen[js]
        return self.offset[self.tlen[i] + lj] + self.tnum[i] * (self.E ** lj) + self.tnum[js]

    @property
    def le(self) -> np.ndarray:
        if self._le is None:
            self._le = self.minus >= 0
        return self._le

    @property
    def minus(self) -> np.ndarray:
        """``minus[s, t]`` is the index of ``t - s`` or -1."""
        if self._minus is None:
            T, E = self.T, self.E
            m = np.full((T, T), -1, dtype=np.int64)
            ts = np.arange(T)
            for p in range(self.bound + 1):
                sel = ts[self.tlen >= p]
                k = self.tlen[sel] - p
                pw = E ** k
                pre = self.offset[p] + self.tnum[sel] // pw
                suf = self.offset[k] + self.tnum[sel] % pw
                m[pre, sel] = suf
            self._minus = m
        return self._minus

    def dim(self, var: str) -> int:
        base = var.rstrip("'")
        return {"ok": 2, "wait": 2, "tr": self.T, "tt": self.T, "st": self.S, "ref": self.R}[base]

    def fmt_value(self, var: str, i: int) -> str:
        base = var.rstrip("'")
        if base in ("ok", "wait"):
            return "true" if i else "false"
        if base in ("tr", "tt"):
            return self.fmt_trace(i)
        if base == "st":
            return self.fmt_state(i)
        return self.fmt_ref(i)


# -- relations --------------------------------------------------------------


def _check_alpha(alphabet):
    alphabet = tuple(alphabet)
    if any(v not in VARS for v in alphabet) or list(alphabet) != sorted(alphabet, key=VARS.index):
        raise AlphabetMismatch(f"bad alphabet {alphabet}")
    return alphabet


class Rel:
    __slots__ = ("universe", "alphabet", "data")

    def __init__(self, universe: Universe, alphabet, data: np.ndarray):
        self.universe = universe
        self.alphabet = _check_alpha(alphabet)
        shape = tuple(universe.dim(v) for v in self.alphabet)
        data = np.asarray(data, dtype=bool)
        if data.shape != shape:
            data = np.broadcast_to(data, shape)
        self.data = np.ascontiguousarray(data)

    def _same(self, other: "Rel"):
        if self.alphabet != other.alphabet or self.universe != other.universe:
            raise AlphabetMismatch(f"{self.alphabet} vs {other.alphabet}")

    def __eq__(self, other):
        if not isinstance(other, Rel):
            return NotImplemented
        self._same(other)
        return bool(np.array_equal(self.data, other.data))

    __hash__ = None

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)

    def __len__(self):
        return int(np.count_nonzero(self.data))

    def axis(self, var):
        return self.alphabet.index(var)

    def bindings(self, limit: int | None = None) -> Iterator[dict]:
        for n, idx in enumerate(zip(*np.nonzero(self.data))):
            if limit is not None and n >= limit:
                return
            yield dict(zip(self.alphabet, (int(i) for i in idx)))

    def fmt_binding(self, b: dict) -> str:
        u = self.universe
        return "{" + ", ".join(f"{v}={u.fmt_value(v, b[v])}" for v in sorted(b, key=PRINT_ORDER.index)) + "}"

    def __repr__(self):
        return f"Rel({', '.join(self.alphabet)}; {len(self)} rows)"


def cyl(u: Universe, alphabet, vars: Sequence[str], arr) -> Rel:
    """Cylinder of ``arr`` (indexed by ``vars``) over the whole alphabet."""
    alphabet = _check_alpha(alphabet)
    arr = np.asarray(arr, dtype=bool)
    order = sorted(range(len(vars)), key=lambda i: alphabet.index(vars[i]))
    arr = np.transpose(arr, order)
    used = [vars[i] for i in order]
    shape = [u.dim(v) if v in used else 1 for v in alphabet]
    return Rel(u, alphabet, arr.reshape(shape))


def top(u: Universe, alphabet=FULL) -> Rel:
    return Rel(u, alphabet, np.zeros((), dtype=bool))


def bottom(u: Universe, alphabet=FULL) -> Rel:
    return Rel(u, alphabet, np.ones((), dtype=bool))


def conj(P: Rel, Q: Rel) -> Rel:
    P._same(Q)
    return Rel(P.universe, P.alphabet, P.data & Q.data)


def disj(P: Rel, Q: Rel) -> Rel:
    P._same(Q)
    return Rel(P.universe, P.alphabet, P.data | Q.data)


def neg(P: Rel) -> Rel:
    return Rel(P.universe, P.alphabet, ~P.data)


def implies(P: Rel, Q: Rel) -> Rel:
    P._same(Q)
    return Rel(P.universe, P.alphabet, ~P.data | Q.data)


def exists(P: Rel, vars) -> Rel:
    axes = tuple(P.axis(v) for v in vars)
    if not axes:
        return P
    return Rel(P.universe, P.alphabet, P.data.any(axis=axes, keepdims=True))


def forall(P: Rel, vars) -> Rel:
    return neg(exists(neg(P), vars))


def subst(P: Rel, var: str, value) -> Rel:
    """``P[value/var]``.  ``value`` is a value index, a bool, or the name of
    another alphabet variable ranging over the same domain."""
    ax = P.axis(var)
    if isinstance(value, str):
        other = P.axis(value)
        if P.data.shape[ax] != P.data.shape[other]:
            raise AlphabetMismatch(f"cannot substitute {value} for {var}")
        moved = np.moveaxis(P.data, (ax, other), (0, 1))
        diag = np.diagonal(moved, axis1=0, axis2=1)  # other axes..., value
        diag = np.moveaxis(diag, -1, 0)[None]  # 1, value, others...
        out = np.broadcast_to(diag, moved.shape)
        return Rel(P.universe, P.alphabet, np.moveaxis(out, (0, 1), (ax, other)))
    sl = np.take(P.data, [int(value)], axis=ax)
    return Rel(P.universe, P.alphabet, sl)


def substs(P: Rel, **values) -> Rel:
    for var, v in values.items():
        P = subst(P, var.replace("_", "'") if var.endswith("_") else var, v)
    return P


def _split(alphabet):
    un = [v for v in alphabet if not v.endswith("'")]
    pr = [v for v in alphabet if v.endswith("'")]
    if pr != [v + "'" for v in un]:
        raise AlphabetMismatch(f"alphabet {alphabet} is not homogeneous")
    return un, pr


def seq_compose(P: Rel, Q: Rel) -> Rel:
    """``∃ v₀ • P[v₀/v'] ∧ Q[v₀/v]`` over a homogeneous alphabet."""
    P._same(Q)
    un, _ = _split(P.alphabet)
    u = P.universe
    n = int(np.prod([u.dim(v) for v in un], dtype=np.int64))
    a = P.data.reshape(n, n)
    b = Q.data.reshape(n, n)
    rows = a.any(axis=1)
    mids = a.any(axis=0) & b.any(axis=1)
    out = np.zeros((n, n), dtype=bool)
    if rows.any() and mids.any():
        prod = a[np.ix_(rows, mids)].astype(np.float32) @ b[mids].astype(np.float32)
        out[rows] = prod > 0
    return Rel(u, P.alphabet, out.reshape(P.data.shape))


def identity(u: Universe, alphabet=FULL, skip_vars=()) -> Rel:
    """``v' = v`` for every variable pair except those in ``skip_vars``."""
    un, _ = _split(_check_alpha(alphabet))
    R = bottom(u, alphabet)
    for v in un:
        if v in skip_vars:
            continue
        R = R & cyl(u, alphabet, (v, v + "'"), np.eye(u.dim(v), dtype=bool))
    return R


def state_update(u: Universe, sigma: np.ndarray) -> np.ndarray:
    """(S, S) table of ``st' = σ(st)``; undefined entries give no row."""
    sigma = np.asarray(sigma)
    tab = np.zeros((u.S, u.S), dtype=bool)
    ok = sigma >= 0
    tab[np.nonzero(ok)[0], sigma[ok]] = True
    return tab


def assign(u: Universe, sigma=None, alphabet=FULL) -> Rel:
    """``st' = σ(st)`` with every other variable left unchanged."""
    if sigma is None:
        return identity(u, alphabet)
    return identity(u, alphabet, skip_vars=("st",)) & cyl(u, alphabet, ("st", "st'"), state_update(u, sigma))


def skip(u: Universe, alphabet=FULL) -> Rel:
    return identity(u, alphabet)


def cond(P: Rel, b: Rel, Q: Rel) -> Rel:
    P._same(Q)
    P._same(b)
    primed = [v for v in b.alphabet if v.endswith("'")]
    if exists(b, primed) != b:
        raise ValueError("condition constrains primed variables")
    return Rel(P.universe, P.alphabet, (b.data & P.data) | (~b.data & Q.data))


@dataclass
class Verdict:
    holds: bool
    counterexamples: list

    def __bool__(self):
        return self.holds


def refines(P: Rel, Q: Rel, k: int = MAX_COUNTEREXAMPLES) -> Verdict:
    """``P ⊑ Q``: every binding of ``Q`` is a binding of ``P``."""
    P._same(Q)
    bad = Rel(P.universe, P.alphabet, Q.data & ~P.data)
    wit = [bad.fmt_binding(b) for b in bad.bindings(k)]
    return Verdict(not wit, wit)


def inf_indexed(family: Sequence[Rel]) -> Rel:
    family = list(family)
    if not family:
        raise EmptyFamily("empty infimum")
    out = family[0]
    for P in family[1:]:
        out = disj(out, P)
    return out


def sup_indexed(family: Sequence[Rel]) -> Rel:
    family = list(family)
    if not family:
        raise EmptyFamily("empty supremum")
    out = family[0]
    for P in family[1:]:
        out = conj(out, P)
    return out


def _check_samples(F, samples):
    samples = list(samples)
    for P in samples:
        for Q in samples:
            if refines(P, Q) and not refines(F(P), F(Q)):
                raise NotMonotone("function is not monotone on the samples")


def _iterate(F, X, shrinking):
    while True:
        Y = F(X)
        if Y == X:
            return X
        step_ok = refines(Y, X) if not shrinking else refines(X, Y)
        if not step_ok:
            raise NotMonotone("fixed-point iteration is not a chain")
        X = Y


def mu(F: Callable[[Rel], Rel], u: Universe, alphabet=FULL, samples=()) -> Rel:
    """Weakest fixed point, by iteration from ``true``."""
    _check_samples(F, samples)
    return _iterate(F, bottom(u, alphabet), shrinking=True)


def nu(F: Callable[[Rel], Rel], u: Universe, alphabet=FULL, samples=()) -> Rel:
    """Strongest fixed point, by iteration from ``false``."""
    _check_samples(F, samples)
    return _iterate(F, top(u, alphabet), shrinking=False)


def kleene_chain(F, u: Universe, alphabet=FULL, limit: int = 1000) -> list[Rel]:
    """``[F⁰(false), F¹(false), ...]`` up to the first repeat."""
    chain = [top(u, alphabet)]
    for _ in range(limit):
        nxt = F(chain[-1])
        if nxt == chain[-1]:
            return chain
        chain.append(nxt)
    raise RuntimeError("chain did not stabilise")
