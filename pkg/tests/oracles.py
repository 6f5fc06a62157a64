"""Independent brute-force oracles for the tests.

Nothing here calls the triple-level calculus.  Relations are compared as
plain Python sets of bindings, contracts are tabulated by hand from their
defining predicates, and programs are composed monolithically on full
relations.
"""

from __future__ import annotations

import itertools

import numpy as np

from reactive_contracts import contracts as c
from reactive_contracts import healthiness as hc
from reactive_contracts import model as m
from reactive_contracts import parallel as par
from reactive_contracts import reactive_relations as rr
from reactive_contracts.circus import syntax as s
from reactive_contracts.model import FULL, Rel, Universe
from reactive_contracts.reactive_relations import COND, PERI, POST, RRRel


# -- relations as sets of index tuples ---------------------------------------------


def as_set(P: Rel) -> set:
    return set(map(tuple, np.argwhere(P.data)))


def brute_seq(P: Rel, Q: Rel) -> set:
    """Relational composition by matching the after-half of one binding with
    the before-half of another."""
    k = len(P.alphabet) // 2
    by_mid: dict = {}
    for b in as_set(Q):
        by_mid.setdefault(b[:k], []).append(b[k:])
    return {a[:k] + z for a in as_set(P) for z in by_mid.get(a[k:], ())}


def all_traces(events, n: int):
    return [tuple(p) for k in range(n + 1) for p in itertools.product(events, repeat=k)]


# -- hand-tabulated contracts --------------------------------------------------------


def refuses(u: Universe, e: int) -> np.ndarray:
    return np.array([(r >> e) & 1 == 1 for r in range(u.R)])


def prefix_triple(u: Universe, name: str) -> c.Contract:
    """``true ⊢ tt = ⟨⟩ ∧ a ∉ ref' ⋄ tt = ⟨a⟩ ∧ st' = st``"""
    a = u.event_id(name)
    peri = np.zeros((u.S, u.T, u.R), dtype=bool)
    post = np.zeros((u.S, u.T, u.S), dtype=bool)
    for st in range(u.S):
        for r in range(u.R):
            peri[st, u.trace_id([]), r] = not (r >> a) & 1
        post[st, u.trace_id([name]), st] = True
    return c.Contract(True, peri, post, universe=u)


def skip_triple(u: Universe) -> c.Contract:
    post = np.zeros((u.S, u.T, u.S), dtype=bool)
    for st in range(u.S):
        post[st, 0, st] = True
    return c.Contract(True, False, post, universe=u)


def stop_triple(u: Universe) -> c.Contract:
    peri = np.zeros((u.S, u.T, u.R), dtype=bool)
    peri[:, 0, :] = True
    return c.Contract(True, peri, False, universe=u)


def divergent_triple(u: Universe) -> c.Contract:
    """``a → Chaos □ b → Skip``: diverges once ``a`` has happened, offers
    both events initially and terminates after ``b``."""
    a, b = u.event_id("a"), u.event_id("b")
    ta = u.trace_id(["a"])
    pre = np.array([[not u.le[ta, t] for t in range(u.T)] for _ in range(u.S)])
    peri = np.zeros((u.S, u.T, u.R), dtype=bool)
    post = np.zeros((u.S, u.T, u.S), dtype=bool)
    for st in range(u.S):
        for r in range(u.R):
            peri[st, 0, r] = not (r >> a) & 1 and not (r >> b) & 1
        post[st, u.trace_id(["b"]), st] = True
    return c.Contract(pre, peri, post, universe=u)


def pay_triple(u: Universe, i: int, j: int, n: int) -> c.Contract:
    """The calculated contract of ``Pay(i, j, n)`` written out state by
    state.  A valid payment whose credit leaves the balance range has no
    successor state, so its accepting rows are absent."""
    pay, acc, rej = (u.event_id(e) for e in (f"pay.{i}.{j}.{n}", f"accept.{i}", f"reject.{i}"))
    t_pay = u.trace_id([pay])
    pre = np.ones((u.S, u.T), dtype=bool)
    peri = np.zeros((u.S, u.T, u.R), dtype=bool)
    post = np.zeros((u.S, u.T, u.S), dtype=bool)
    for st in range(u.S):
        accts = u.state_env(st)["accts"]
        valid = i != j and i in accts and 0 < n <= accts[i]
        peri[st, 0] = ~refuses(u, pay)
        if not valid:
            peri[st, t_pay] = ~refuses(u, rej)
            post[st, u.trace_id([pay, rej]), st] = True
            continue
        if j not in accts:
            pre[st] = ~u.le[t_pay]
            continue
        new = dict(accts)
        new[i] -= n
        new[j] += n
        try:
            st2 = u.state_id(accts=new)
        except KeyError:
            continue
        peri[st, t_pay] = ~refuses(u, acc)
        post[st, u.trace_id([pay, acc]), st2] = True
    return c.Contract(pre, peri, post, universe=u)


# -- monolithic denotation ----------------------------------------------------------------


def _ext_choice(u: Universe, Ps: list) -> Rel:
    """External choice on full relations: the preconditions are conjoined,
    the periconditions conjoined while the trace is empty and disjoined
    afterwards, and the postconditions disjoined."""
    pres = [c.pre_r(P) for P in Ps]
    peris = [c.peri_r(P) for P in Ps]
    posts = [c.post_r(P) for P in Ps]
    empty = rr.tt_eq(u, ())
    both, either = rr.conj_all(peris), rr.disj_all(peris)
    peri = rr.disj_r(rr.conj_r(empty, both), rr.conj_r(rr.neg_r(empty), either))
    return c.rdes(rr.conj_all(pres), peri, rr.disj_all(posts))


def monolithic(model, p: s.Proc, ev=None) -> Rel:
    """Denote a process by composing full relations.  Only the atoms
    (basic actions and assignments) are taken from their contracts."""
    u = model.universe
    from reactive_contracts.circus.expr import Evaluator, state_only

    ev = ev or Evaluator(u)
    go = lambda q: monolithic(model, q, ev)
    if isinstance(p, (s.Skip, s.Stop, s.Chaos, s.Miracle, s.Assign, s.IndexedAssign)):
        return c.expand(model.denote(p, ev))
    if isinstance(p, s.Prefix):
        head = c.expand(model.denote(s.Prefix(p.channel, p.args, s.Skip()), ev))
        return head if isinstance(p.body, s.Skip) else m.seq_compose(head, go(p.body))
    if isinstance(p, s.Seq):
        return m.seq_compose(go(p.left), go(p.right))
    if isinstance(p, s.IntChoice):
        out = go(p.branches[0])
        for q in p.branches[1:]:
            out = out | go(q)
        return out
    if isinstance(p, (s.Cond, s.Guard)):
        b = state_only(u, ev.pred(p.cond), "a condition")
        bt = m.cyl(u, FULL, ("st",), b)
        if isinstance(p, s.Guard):
            return m.cond(go(p.body), bt, c.expand(c.stop(u)))
        return m.cond(go(p.left), bt, go(p.right))
    if isinstance(p, s.ExtChoice):
        return _ext_choice(u, [go(q) for q in p.branches])
    if isinstance(p, s.Interleave):
        return par.par_by_merge(go(p.left), go(p.right), par.interleave_merge(u))
    if isinstance(p, s.MuTail):
        body = go(p.body)
        return m.mu(lambda X: m.seq_compose(body, hc.SRD(X)), u)
    if isinstance(p, s.Ref):
        from reactive_contracts.circus.expr import const

        args = model._args(ev, p.args)
        if p.name in model.spec.contracts:
            return c.expand(model.lookup(p.name, args))
        d = model.spec.processes[p.name]
        inner = Evaluator(u, {k: const("int", v) for k, v in zip(d.params, args)})
        return monolithic(model, d.body, inner)
    raise TypeError(type(p).__name__)
