"""Reactive design contracts: pre/peri/postcondition triples.

A contract is stored as three dense tables:

* ``pre``  over ``(st, tt)``: a prefix-closed reactive condition,
* ``peri`` over ``(st, tt, ref')``,
* ``post`` over ``(st, tt, st')``; the final refusal is left free.

Peri and post are intersected with the precondition on construction, so
two contracts denote the same reactive design exactly when their tables
are equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import healthiness as hc
from . import model as m
from . import reactive_relations as rr
from .model import FULL, Rel, Universe
from .reactive_relations import COND, PERI, POST, RRRel


class NotSRDHealthy(ValueError):
    pass


class PeriMentionsFinalState(ValueError):
    pass


class PostMentionsRefusal(ValueError):
    pass


class NotProductive(ValueError):
    pass


def _coerce(u, P, alphabet, what):
    if P is None or P is False:
        return np.zeros([u.dim(v) for v in alphabet], dtype=bool)
    if P is True:
        return np.ones([u.dim(v) for v in alphabet], dtype=bool)
    if isinstance(P, np.ndarray):
        return RRRel(u, alphabet, P).data
    if P.universe != u:
        raise m.AlphabetMismatch("contract parts come from different universes")
    try:
        return rr.narrow(rr.widen(P, rr.union_alpha(P.alphabet, alphabet)), alphabet).data
    except rr.NotRepresentable as e:
        raise what(f"{e}") from None


class Contract:
    """``⦗pre ⊢ peri ⋄ post⦘``."""

    __slots__ = ("universe", "_pre", "_peri", "_post")

    def __init__(self, pre, peri, post, universe: Universe | None = None):
        u = universe or next(p.universe for p in (pre, peri, post) if isinstance(p, RRRel))
        self.universe = u
        pre_a = _coerce(u, pre, COND, rr.NotRC)
        if not rr.is_rc(RRRel(u, COND, pre_a)):
            raise rr.NotRC("precondition is not prefix closed")
        peri_a = _coerce(u, peri, PERI, PeriMentionsFinalState)
        post_a = _coerce(u, post, POST, PostMentionsRefusal)
        self._pre = pre_a
        self._peri = peri_a & pre_a[:, :, None]
        self._post = post_a & pre_a[:, :, None]
        for a in (self._pre, self._peri, self._post):
            a.flags.writeable = False

    @property
    def pre(self) -> RRRel:
        return RRRel(self.universe, COND, self._pre)

    @property
    def peri(self) -> RRRel:
        return RRRel(self.universe, PERI, self._peri)

    @property
    def post(self) -> RRRel:
        return RRRel(self.universe, POST, self._post)

    def __eq__(self, other):
        if not isinstance(other, Contract):
            return NotImplemented
        if self.universe != other.universe:
            raise m.AlphabetMismatch("different universes")
        return (np.array_equal(self._pre, other._pre) and np.array_equal(self._peri, other._peri)
                and np.array_equal(self._post, other._post))

    __hash__ = None

    def __repr__(self):
        return (f"Contract(pre {int(self._pre.sum())}/{self._pre.size}, "
                f"peri {int(self._peri.sum())}, post {int(self._post.sum())})")

    def __str__(self):
        return fmt_contract(self)


def mk_contract(pre, peri, post) -> Contract:
    return Contract(pre, peri, post)


# -- link with full relations -------------------------------------------------


def rdes(P1: RRRel, P2: RRRel, P3: RRRel) -> Rel:
    """``Rs((ok ∧ P1) ⇒ (ok' ∧ (P2 ◁ wait' ▷ P3)))`` for arbitrary reactive
    relations, without any normalisation."""
    u = P1.universe
    ok, okp, wp = hc.flag(u, FULL, "ok"), hc.flag(u, FULL, "ok'"), hc.flag(u, FULL, "wait'")
    p1, p2, p3 = rr.to_full(P1), rr.to_full(P2), rr.to_full(P3)
    body = m.implies(ok & p1, okp & ((wp & p2) | (~wp & p3)))
    return hc.Rs(body)


def expand(C: Contract) -> Rel:
    return rdes(C.pre, C.peri, C.post)


def pre_r(P: Rel) -> RRRel:
    """``¬ᵣ P[true, false, false / ok, ok', wait]``"""
    sub = m.substs(P, ok=1, ok_=0, wait=0)
    return rr.from_full(hc.R1(~sub))


def peri_r(P: Rel) -> RRRel:
    return rr.from_full(hc.R1(m.substs(P, ok=1, ok_=1, wait=0, wait_=1)))


def post_r(P: Rel) -> RRRel:
    return rr.from_full(hc.R1(m.substs(P, ok=1, ok_=1, wait=0, wait_=0)))


def contract_of(P: Rel) -> Contract:
    if hc.SRD(P) != P:
        raise NotSRDHealthy("relation is not SRD-healthy")
    return Contract(pre_r(P), peri_r(P), post_r(P))


# -- basic contracts ----------------------------------------------------------


def miracle(u: Universe) -> Contract:
    return Contract(True, False, False, universe=u)


def chaos(u: Universe) -> Contract:
    return Contract(False, False, False, universe=u)


def assignsR(u: Universe, sigma=None) -> Contract:
    return Contract(True, False, rr.assigns_r(u, sigma), universe=u)


def skip_srd(u: Universe) -> Contract:
    return assignsR(u)


def refusal_table(u: Universe) -> np.ndarray:
    """(E, R) table: ``e ∈ ref``."""
    return (np.arange(u.R)[None, :] >> np.arange(u.E)[:, None] & 1).astype(bool)


def prefix(u: Universe, event) -> Contract:
    """``e → Skip``; ``event`` may be an (S,) array of event indices when
    the event depends on the state (-1 means undefined)."""
    ev = np.broadcast_to(np.asarray(event if isinstance(event, (int, np.integer, np.ndarray))
                                    else u.event_id(event)), (u.S,))
    defined = ev >= 0
    peri = np.zeros((u.S, u.T, u.R), dtype=bool)
    post = np.zeros((u.S, u.T, u.S), dtype=bool)
    refuses = refusal_table(u)
    ss = np.nonzero(defined)[0]
    peri[ss, 0, :] = ~refuses[ev[ss]]
    post[ss, u.offset[1] + ev[ss], ss] = True
    return Contract(True, peri, post, universe=u)


def stop(u: Universe) -> Contract:
    peri = np.zeros((u.S, u.T, u.R), dtype=bool)
    peri[:, 0, :] = True
    return Contract(True, peri, False, universe=u)


def skip(u: Universe) -> Contract:
    return skip_srd(u)


# -- composition ----------------------------------------------------------------


def seq(C1: Contract, C2: Contract) -> Contract:
    pre = rr.conj_r(C1.pre, rr.wpR(C1.post, C2.pre))
    peri = rr.disj_r(C1.peri, rr.rr_seq(C1.post, C2.peri))
    post = rr.rr_seq(C1.post, C2.post)
    return Contract(pre, peri, post)


def seq_all(Cs: Sequence[Contract]) -> Contract:
    if not Cs:
        raise m.EmptyFamily("empty sequence")
    out = Cs[0]
    for C in Cs[1:]:
        out = seq(out, C)
    return out


def intchoice(C1: Contract, C2: Contract) -> Contract:
    return intchoice_indexed([C1, C2])


def intchoice_indexed(family: Sequence[Contract]) -> Contract:
    family = list(family)
    if not family:
        raise m.EmptyFamily("empty internal choice")
    pre = rr.conj_all([C.pre for C in family])
    peri = rr.disj_all([C.peri for C in family])
    post = rr.disj_all([C.post for C in family])
    return Contract(pre, peri, post)


def conj(C1: Contract, C2: Contract) -> Contract:
    """``C1 ⊔ C2``"""
    pre = rr.disj_r(C1.pre, C2.pre)
    peri = rr.conj_r(rr.implies_r(C1.pre, C1.peri), rr.implies_r(C2.pre, C2.peri))
    post = rr.conj_r(rr.implies_r(C1.pre, C1.post), rr.implies_r(C2.pre, C2.post))
    return Contract(pre, peri, post)


def _state_mask(u, b):
    if isinstance(b, RRRel):
        b = rr.narrow(b, ("st",)).data
    if isinstance(b, (bool, np.bool_)):
        b = np.full(u.S, bool(b))
    return np.asarray(b, dtype=bool)


def cond(C1: Contract, b, C2: Contract) -> Contract:
    """``C1 ◁ b ▷ C2`` with ``b`` a condition on the initial state."""
    u = C1.universe
    b = _state_mask(u, b)
    pick = lambda x, y: np.where(b.reshape((-1,) + (1,) * (x.ndim - 1)), x, y)
    return Contract(pick(C1._pre, C2._pre), pick(C1._peri, C2._peri), pick(C1._post, C2._post), universe=u)


def guard(b, C: Contract) -> Contract:
    """``b & C``: behave as ``C`` when ``b`` holds, deadlock otherwise."""
    return cond(C, b, stop(C.universe))


def extchoice(family: Sequence[Contract]) -> Contract:
    """External choice: all periconditions hold until the first event, one
    of them afterwards."""
    family = list(family)
    if not family:
        raise m.EmptyFamily("empty external choice")
    u = family[0].universe
    pre = rr.conj_all([C.pre for C in family]).data
    both = np.logical_and.reduce([C._peri for C in family])
    either = np.logical_or.reduce([C._peri for C in family])
    peri = either.copy()
    peri[:, 0, :] = both[:, 0, :]
    post = np.logical_or.reduce([C._post for C in family])
    return Contract(pre, peri, post, universe=u)


def power(C: Contract, n: int) -> Contract:
    """``C`` composed with itself ``n`` times (``n ≥ 1``), by the closed form
    over the iterates of the postcondition."""
    if n < 1:
        raise ValueError("power needs n >= 1")
    u = C.universe
    Ri = rr.II_r(u)
    pres, peris = [], []
    for i in range(n):
        if i:
            Ri = rr.rr_seq(Ri, C.post)
        pres.append(rr.wpR(Ri, C.pre))
        peris.append(rr.rr_seq(Ri, C.peri))
    post = rr.rr_seq(Ri, C.post)
    return Contract(rr.conj_all(pres), rr.disj_all(peris), post)


def is_productive(C: Contract) -> bool:
    return not C._post[:, 0, :].any()


@dataclass
class Recursion:
    contract: Contract
    stabilised_at: int


def tail_rec_info(C: Contract) -> Recursion:
    """``μ X • C ⨾ X`` for productive ``C``.

    Every iterate of the postcondition lengthens the trace, so the iterates
    vanish within the bound; the meet and join over all iterates are taken
    up to that point.  Rows beyond the bound are exact omissions here (no
    observation within the bound depends on them), so the truncation
    counter is not touched.
    """
    if not is_productive(C):
        raise NotProductive("recursion body can terminate without an event")
    u = C.universe
    Ri = rr.II_r(u)
    pres, peris = [], []
    i = 0
    while not Ri.is_false:
        pres.append(rr.wpR(Ri, C.pre))
        peris.append(rr.rr_seq(Ri, C.peri, count=False))
        Ri = rr.rr_seq(Ri, C.post, count=False)
        i += 1
    return Recursion(Contract(rr.conj_all(pres), rr.disj_all(peris), False), i)


def tail_rec(C: Contract) -> Contract:
    return tail_rec_info(C).contract


# -- recursion checks at the relation level -----------------------------------


def gv(u: Universe, n: int) -> Rel:
    """``tr ≤ tr' ∧ #tt < n``"""
    mi = u.minus
    ok = (mi >= 0) & (u.tlen[np.maximum(mi, 0)] < n)
    return m.cyl(u, FULL, ("tr", "tr'"), ok)


def body_of(C: Contract) -> Callable[[Rel], Rel]:
    """``λ X • C ⨾ SRD(X)`` at the relation level."""
    E = expand(C)
    return lambda X: m.seq_compose(E, hc.SRD(X))


def gv_guard_check(F: Callable[[Rel], Rel], samples: Sequence, n_max: int,
                   k: int = m.MAX_COUNTEREXAMPLES) -> m.Verdict:
    """Check ``F(P) ∧ gv(n+1) = F(P ∧ gv(n)) ∧ gv(n+1)`` on samples for
    every ``n < n_max``."""
    wit = []
    for P in samples:
        if isinstance(P, Contract):
            P = expand(P)
        u = P.universe
        if n_max > u.bound:
            raise ValueError("n_max must not exceed the trace bound")
        FP = F(P)
        for n in range(n_max):
            g1 = gv(u, n + 1)
            lhs, rhs = FP & g1, F(P & gv(u, n)) & g1
            if lhs != rhs:
                diff = Rel(u, FULL, lhs.data ^ rhs.data)
                wit.extend(f"n={n}: {diff.fmt_binding(b)}" for b in diff.bindings(1))
                if len(wit) >= k:
                    return m.Verdict(False, wit)
    return m.Verdict(not wit, wit)


# -- refinement and equivalence -------------------------------------------------


@dataclass
class RefinementReport:
    holds: bool
    obligations: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def failed(self):
        return [name for name, v in self.obligations.items() if not v.holds]


def _witnesses(u, alphabet, arr, k):
    R = RRRel(u, alphabet, arr)
    return [R.fmt_row(r) for r in R.rows(k)]


def refines(spec: Contract, impl: Contract, k: int = m.MAX_COUNTEREXAMPLES) -> RefinementReport:
    """``spec ⊑ impl`` by the three obligations: the precondition is
    weakened, the peri- and postconditions are strengthened under the
    specification's precondition."""
    u = spec.universe
    p1 = spec._pre
    pre_bad = p1 & ~impl._pre
    peri_bad = impl._peri & p1[:, :, None] & ~spec._peri
    post_bad = impl._post & p1[:, :, None] & ~spec._post
    obs = {
        "pre": m.Verdict(not pre_bad.any(), _witnesses(u, COND, pre_bad, k)),
        "peri": m.Verdict(not peri_bad.any(), _witnesses(u, PERI, peri_bad, k)),
        "post": m.Verdict(not post_bad.any(), _witnesses(u, POST, post_bad, k)),
    }
    return RefinementReport(all(v.holds for v in obs.values()), obs)


def equiv_triples(P1: RRRel, P2: RRRel, P3: RRRel, Q1: RRRel, Q2: RRRel, Q3: RRRel) -> bool:
    """Equality of two contracts given by arbitrary (un-normalised) parts."""
    return (P1 == Q1 and rr.conj_r(P2, Q1) == rr.conj_r(Q2, P1)
            and rr.conj_r(P3, Q1) == rr.conj_r(Q3, P1))


def equiv(C1: Contract, C2: Contract) -> bool:
    return equiv_triples(C1.pre, C1.peri, C1.post, C2.pre, C2.peri, C2.post)


def subst_contract(sigma, C: Contract) -> Contract:
    """``⦗σ†P₁ ⊢ σ†P₂ ⋄ σ†P₃⦘``"""
    return Contract(rr.subst_state(sigma, C.pre), rr.subst_state(sigma, C.peri), rr.subst_state(sigma, C.post))


# -- printing -------------------------------------------------------------------


def _maximal(masks):
    masks = sorted(set(masks), key=lambda x: -bin(x).count("1"))
    out = []
    for x in masks:
        if not any(x | y == y for y in out):
            out.append(x)
    return sorted(out)


def _downward_closed(allowed: np.ndarray) -> bool:
    R = allowed.size
    for e in range(R.bit_length() - 1):
        # removing event e from an allowed refusal must stay allowed
        if np.any(allowed & ~allowed[np.arange(R) & ~(1 << e)]):
            return False
    return True


def fmt_contract(C: Contract) -> str:
    u = C.universe
    lines = ["pre:"]
    if C._pre.all():
        lines.append("  true")
    else:
        # the smallest traces at which divergence becomes possible
        bad = ~C._pre
        for s, t in zip(*np.nonzero(bad)):
            par = u.parent[t]
            if t == 0 or C._pre[s, par]:
                lines.append(f"  fails from st={u.fmt_state(s)} tt={u.fmt_trace(t)}")
    lines.append("peri:")
    rows = 0
    for s, t in zip(*np.nonzero(C._peri.any(axis=2))):
        allowed = C._peri[s, t]
        head = f"  st={u.fmt_state(s)} tt={u.fmt_trace(t)}"
        if _downward_closed(allowed):
            sets = " | ".join(f"ref'⊆{u.fmt_ref(x)}" for x in _maximal(np.nonzero(allowed)[0].tolist()))
            lines.append(f"{head} {sets}")
        else:
            for x in np.nonzero(allowed)[0]:
                lines.append(f"{head} ref'={u.fmt_ref(x)}")
        rows += 1
    if not rows:
        lines.append("  false")
    lines.append("post:")
    if not C._post.any():
        lines.append("  false")
    for s, t, s2 in zip(*np.nonzero(C._post)):
        lines.append(f"  st={u.fmt_state(s)} tt={u.fmt_trace(t)} st'={u.fmt_state(s2)}")
    return "\n".join(lines)


def dump_contract(C: Contract) -> str:
    """Line-oriented dump: a header per part, then one row per line."""
    u = C.universe
    out = []
    for name, alphabet, arr in (("pre", COND, C._pre), ("peri", PERI, C._peri), ("post", POST, C._post)):
        out.append("\t".join([f"#{name}", *alphabet]))
        for idx in zip(*np.nonzero(arr)):
            out.append("\t".join([name, *(u.fmt_value(v, int(i)) for v, i in zip(alphabet, idx))]))
    return "\n".join(out)
