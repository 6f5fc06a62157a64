"""Reactive relations in trace-contribution form.

A reactive relation only ever looks at the trace through ``tt = tr' - tr``,
so it is stored over the variables ``st, tt, st', ref'`` (any subset, in
that order).  Variables missing from the alphabet are unconstrained.
"""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from . import healthiness as hc
from . import model as m
from .model import FULL, Rel, Universe, truncation

RR_VARS = ("st", "tt", "st'", "ref'")
COND = ("st", "tt")
PERI = ("st", "tt", "ref'")
POST = ("st", "tt", "st'")


class NotRRHealthy(ValueError):
    pass


class NotRC(ValueError):
    pass


class NotRepresentable(ValueError):
    pass


def _alpha(alphabet):
    alphabet = tuple(alphabet)
    if any(v not in RR_VARS for v in alphabet) or list(alphabet) != sorted(alphabet, key=RR_VARS.index):
        raise m.AlphabetMismatch(f"bad reactive alphabet {alphabet}")
    return alphabet


def union_alpha(*alphas):
    vs = set().union(*alphas)
    return tuple(v for v in RR_VARS if v in vs)


class RRRel:
    __slots__ = ("universe", "alphabet", "data")

    def __init__(self, universe: Universe, alphabet, data):
        self.universe = universe
        self.alphabet = _alpha(alphabet)
        shape = tuple(universe.dim(v) for v in self.alphabet)
        data = np.asarray(data, dtype=bool)
        if data.shape != shape:
            data = np.broadcast_to(data, shape)
        self.data = np.ascontiguousarray(data)

    def __eq__(self, other):
        if not isinstance(other, RRRel):
            return NotImplemented
        if self.universe != other.universe:
            raise m.AlphabetMismatch("different universes")
        al = union_alpha(self.alphabet, other.alphabet)
        return bool(np.array_equal(widen(self, al).data, widen(other, al).data))

    __hash__ = None

    def __and__(self, other):
        return conj_r(self, other)

    def __or__(self, other):
        return disj_r(self, other)

    def __len__(self):
        return int(np.count_nonzero(self.data))

    @property
    def is_false(self):
        return not self.data.any()

    def axis(self, v):
        return self.alphabet.index(v)

    def rows(self, limit: int | None = None) -> Iterator[dict]:
        for n, idx in enumerate(zip(*np.nonzero(self.data))):
            if limit is not None and n >= limit:
                return
            yield dict(zip(self.alphabet, (int(i) for i in idx)))

    def fmt_row(self, row: dict) -> str:
        u = self.universe
        keys = sorted(row, key=m.PRINT_ORDER.index)
        return "{" + ", ".join(f"{v}={u.fmt_value(v, row[v])}" for v in keys) + "}"

    def __repr__(self):
        return f"RRRel({', '.join(self.alphabet)}; {len(self)} rows)"


def rr_cyl(u: Universe, alphabet, vars: Sequence[str], arr) -> RRRel:
    alphabet = _alpha(alphabet)
    arr = np.asarray(arr, dtype=bool)
    order = sorted(range(len(vars)), key=lambda i: alphabet.index(vars[i]))
    arr = np.transpose(arr, order)
    used = [vars[i] for i in order]
    return RRRel(u, alphabet, arr.reshape([u.dim(v) if v in used else 1 for v in alphabet]))


def widen(P: RRRel, alphabet) -> RRRel:
    alphabet = _alpha(alphabet)
    if P.alphabet == alphabet:
        return P
    if not set(P.alphabet) <= set(alphabet):
        raise m.AlphabetMismatch(f"cannot widen {P.alphabet} to {alphabet}")
    return rr_cyl(P.universe, alphabet, P.alphabet, P.data)


def depends_on(P: RRRel, var: str) -> bool:
    if var not in P.alphabet:
        return False
    ax = P.axis(var)
    return not np.array_equal(P.data, np.broadcast_to(P.data.any(axis=ax, keepdims=True), P.data.shape))


def narrow(P: RRRel, alphabet) -> RRRel:
    """Drop variables the relation does not constrain."""
    alphabet = _alpha(alphabet)
    drop = [v for v in P.alphabet if v not in alphabet]
    for v in drop:
        if depends_on(P, v):
            raise NotRepresentable(f"relation constrains {v}")
    P = widen(P, union_alpha(P.alphabet, alphabet))
    data = P.data
    for v in reversed(drop):
        data = np.take(data, 0, axis=P.axis(v))
    return RRRel(P.universe, alphabet, data)


def hide(P: RRRel, vars) -> RRRel:
    """Existentially quantify and drop ``vars``."""
    keep = tuple(v for v in P.alphabet if v not in vars)
    axes = tuple(P.axis(v) for v in vars if v in P.alphabet)
    return RRRel(P.universe, keep, P.data.any(axis=axes) if axes else P.data)


# -- Boolean structure --------------------------------------------------------


def true_r(u: Universe, alphabet=RR_VARS) -> RRRel:
    return RRRel(u, alphabet, np.ones((), dtype=bool))


def false_r(u: Universe, alphabet=RR_VARS) -> RRRel:
    return RRRel(u, alphabet, np.zeros((), dtype=bool))


def neg_r(P: RRRel) -> RRRel:
    return RRRel(P.universe, P.alphabet, ~P.data)


def _pair(P, Q):
    if P.universe != Q.universe:
        raise m.AlphabetMismatch("different universes")
    al = union_alpha(P.alphabet, Q.alphabet)
    return widen(P, al), widen(Q, al)


def conj_r(P: RRRel, Q: RRRel) -> RRRel:
    P, Q = _pair(P, Q)
    return RRRel(P.universe, P.alphabet, P.data & Q.data)


def disj_r(P: RRRel, Q: RRRel) -> RRRel:
    P, Q = _pair(P, Q)
    return RRRel(P.universe, P.alphabet, P.data | Q.data)


def implies_r(P: RRRel, Q: RRRel) -> RRRel:
    P, Q = _pair(P, Q)
    return RRRel(P.universe, P.alphabet, ~P.data | Q.data)


def conj_all(Ps: Sequence[RRRel]) -> RRRel:
    if not Ps:
        raise m.EmptyFamily("empty conjunction")
    out = Ps[0]
    for P in Ps[1:]:
        out = conj_r(out, P)
    return out


def disj_all(Ps: Sequence[RRRel]) -> RRRel:
    if not Ps:
        raise m.EmptyFamily("empty disjunction")
    out = Ps[0]
    for P in Ps[1:]:
        out = disj_r(out, P)
    return out


def refines_r(P: RRRel, Q: RRRel, k: int = m.MAX_COUNTEREXAMPLES):
    """``P ⊑ Q`` on reactive relations, with up to ``k`` witness rows."""
    P, Q = _pair(P, Q)
    bad = RRRel(P.universe, P.alphabet, Q.data & ~P.data)
    return [bad.fmt_row(r) for r in bad.rows(k)]


# -- atoms ----------------------------------------------------------------


def tt_eq(u: Universe, trace) -> RRRel:
    arr = np.zeros(u.T, dtype=bool)
    arr[u.trace_id(trace)] = True
    return rr_cyl(u, COND, ("tt",), arr)


def tt_prefix(u: Universe, trace) -> RRRel:
    """``trace ≤ tt``"""
    return rr_cyl(u, COND, ("tt",), u.le[u.trace_id(trace)])


def refuses(u: Universe, event) -> RRRel:
    e = event if isinstance(event, int) else u.event_id(event)
    arr = (np.arange(u.R) >> e & 1).astype(bool)
    return rr_cyl(u, ("ref'",), ("ref'",), arr)


def state_cond(u: Universe, mask) -> RRRel:
    """``[s]ᵣ`` for a state predicate given as an (S,) mask."""
    return rr_cyl(u, COND, ("st",), np.asarray(mask, dtype=bool))


def assigns_r(u: Universe, sigma=None) -> RRRel:
    """``⟨σ⟩ᵣ``: empty contribution and ``st' = σ(st)``; ref' is free."""
    upd = np.eye(u.S, dtype=bool) if sigma is None else m.state_update(u, sigma)
    data = np.zeros((u.S, u.T, u.S), dtype=bool)
    data[:, 0, :] = upd
    return RRRel(u, POST, data)


def II_r(u: Universe) -> RRRel:
    return assigns_r(u)


def subst_state(sigma, P: RRRel) -> RRRel:
    """``σ † P``: read the initial state through ``σ``."""
    if "st" not in P.alphabet:
        return P
    sigma = np.asarray(sigma)
    ax = P.axis("st")
    picked = np.take(P.data, np.where(sigma >= 0, sigma, 0), axis=ax)
    shape = [1] * P.data.ndim
    shape[ax] = -1
    return RRRel(P.universe, P.alphabet, picked & (sigma >= 0).reshape(shape))


# -- sequential composition and weakest precondition --------------------------


def _compose(P: RRRel, Q: RRRel, count: bool = True) -> RRRel:
    u = P.universe
    if u != Q.universe:
        raise m.AlphabetMismatch("different universes")
    Pw = widen(P, union_alpha(P.alphabet, POST))
    pa = Pw.data.any(axis=Pw.axis("ref'")) if "ref'" in Pw.alphabet else Pw.data
    extra = tuple(v for v in ("st'", "ref'") if v in Q.alphabet)
    Qw = widen(Q, union_alpha(COND, Q.alphabet))
    S, T = u.S, u.T
    X = int(np.prod([u.dim(v) for v in extra], dtype=np.int64))
    qa = Qw.data.reshape(S, T * X)
    out = np.zeros((S, T, X), dtype=bool)
    t1s = np.nonzero(pa.any(axis=(0, 2)))[0]
    if len(t1s) and qa.any():
        qf = qa.astype(np.float32)
        qany = Qw.data.reshape(S, T, X).any(axis=2).astype(np.float32)
        for t1 in t1s:
            n = u.upto(u.bound - int(u.tlen[t1]))
            m1 = pa[:, t1, :].astype(np.float32)
            block = (m1 @ qf[:, : n * X]).reshape(S, n, X) > 0
            idx = u.cat_many(int(t1), np.arange(n))
            out[:, idx, :] |= block
            if count and n < T:
                truncation.add(np.count_nonzero(m1 @ qany[:, n:]))
    return RRRel(u, COND + extra, out.reshape((S, T) + tuple(u.dim(v) for v in extra)))


def rr_seq(P: RRRel, Q: RRRel, count: bool = True) -> RRRel:
    """``P ⨾ Q``: contributions concatenate, the state threads through.

    Pairs whose joint contribution would exceed the bound are dropped and,
    when ``count`` is set, added to the global truncation counter.
    """
    return _compose(P, Q, count)


def is_rc(P: RRRel) -> bool:
    """Prefix closure in ``tt`` (the RC2 reading)."""
    try:
        P = narrow(P, COND)
    except NotRepresentable:
        return False
    u = P.universe
    d = P.data
    return bool(np.all(~d[:, 1:] | d[:, u.parent[1:]]))


def is_rc1(P: RRRel) -> bool:
    """The literal ``¬ᵣ((¬ᵣ P) ⨾ trueᵣ) = P`` reading."""
    try:
        P = narrow(P, COND)
    except NotRepresentable:
        return False
    closed = neg_r(_compose(neg_r(P), true_r(P.universe, COND), count=False))
    return closed == P


def wpR(P: RRRel, Q: RRRel) -> RRRel:
    """``P wpR Q = ¬ᵣ (P ⨾ ¬ᵣ Q)``, computed on decompositions of tt."""
    if not is_rc(Q):
        raise NotRC("wpR needs a reactive condition on the right")
    Q = narrow(Q, COND)
    return neg_r(_compose(P, neg_r(Q), count=False))


def power_r(P: RRRel, n: int, count: bool = True) -> RRRel:
    out = II_r(P.universe)
    for _ in range(n):
        out = rr_seq(out, P, count)
    return out


# -- link with full relations -------------------------------------------------


def to_full(P: RRRel) -> Rel:
    """``tr ≤ tr' ∧ P[tr' - tr / tt]`` with ok, wait and ref free."""
    u = P.universe
    P = widen(P, RR_VARS)
    mi = np.where(u.le, u.minus, 0)
    D = P.data[:, mi] & u.le[None, :, :, None, None]  # st, tr, tr', st', ref'
    D = D.transpose(1, 0, 2, 3, 4)
    T, S, R = u.T, u.S, u.R
    return Rel(u, FULL, D.reshape(1, 1, T, S, 1, 1, 1, T, S, R))


def from_full(Q: Rel) -> RRRel:
    if Q.alphabet != FULL:
        raise m.AlphabetMismatch("expected the full alphabet")
    if hc.RR(Q) != Q:
        raise NotRRHealthy("relation is not RR-healthy")
    if m.exists(Q, ["ref"]) != Q:
        raise NotRRHealthy("relation depends on the initial refusal")
    return RRRel(Q.universe, RR_VARS, Q.data[0, 0, 0, :, 0, 0, 0])
