"""Designs over the state-only alphabet ``ok, st, ok', st'``, and the
lifting between designs and reactive contracts."""

from __future__ import annotations

import numpy as np

from . import healthiness as hc
from . import model as m
from .model import DESIGN, Rel, Universe, cyl


class NotHHealthy(ValueError):
    pass


class NotNHealthy(ValueError):
    pass


def state_rel(u: Universe, arr) -> Rel:
    """Embed an (S,) condition or (S, S) relation on states."""
    arr = np.asarray(arr, dtype=bool)
    if arr.ndim == 1:
        return cyl(u, DESIGN, ("st",), arr)
    return cyl(u, DESIGN, ("st", "st'"), arr)


def _as_state_rel(u, P):
    if isinstance(P, Rel):
        if P.alphabet != DESIGN:
            raise m.AlphabetMismatch("expected the design alphabet")
        return P
    if isinstance(P, bool):
        return m.bottom(u, DESIGN) if P else m.top(u, DESIGN)
    return state_rel(u, P)


def design(u: Universe, pre, post) -> Rel:
    """``(ok ∧ pre) ⇒ (ok' ∧ post)``"""
    pre, post = _as_state_rel(u, pre), _as_state_rel(u, post)
    ok, okp = hc.flag(u, DESIGN, "ok"), hc.flag(u, DESIGN, "ok'")
    return m.implies(ok & pre, okp & post)


def preD(D: Rel) -> Rel:
    if hc.H(D) != D:
        raise NotHHealthy("design extraction needs an H-healthy relation")
    # ¬ D[true, false / ok, ok'], as a relation that ignores ok and ok'
    return cyl(D.universe, DESIGN, ("st", "st'"), ~D.data[1, :, 0, :])


def postD(D: Rel) -> Rel:
    if hc.H(D) != D:
        raise NotHHealthy("design extraction needs an H-healthy relation")
    return cyl(D.universe, DESIGN, ("st", "st'"), D.data[1, :, 1, :])


def pre_cond(D: Rel) -> np.ndarray:
    """The precondition of a normal design as an (S,) mask."""
    S = D.universe.S
    p = np.broadcast_to(preD(D).data, (2, S, 2, S))[0, :, 0, :]
    if not (p.all(axis=1) | ~p.any(axis=1)).all():
        raise NotNHealthy("precondition mentions the final state")
    return p[:, 0]


def post_table(D: Rel) -> np.ndarray:
    return np.broadcast_to(postD(D).data, (2, D.universe.S, 2, D.universe.S))[0, :, 0, :]


def design_refines(D1: Rel, D2: Rel, k: int = m.MAX_COUNTEREXAMPLES) -> m.Verdict:
    """``D1 ⊑ D2`` by the two design obligations."""
    p1, q1 = preD(D1), postD(D1)
    p2, q2 = preD(D2), postD(D2)
    weaken = m.refines(p2, p1, k)  # [p1 ⇒ p2]
    strengthen = m.refines(q1, q2 & p1, k)
    return m.Verdict(weaken.holds and strengthen.holds, weaken.counterexamples + strengthen.counterexamples)


def top_D(u: Universe) -> Rel:
    return design(u, True, False)


def bottom_D(u: Universe) -> Rel:
    return m.bottom(u, DESIGN)


def II_D(u: Universe) -> Rel:
    return design(u, True, np.eye(u.S, dtype=bool))


def assign_D(u: Universe, sigma) -> Rel:
    return design(u, True, m.state_update(u, sigma))


def intchoice_D(D1: Rel, D2: Rel) -> Rel:
    return D1 | D2


def cond_D(D1: Rel, b, D2: Rel) -> Rel:
    return m.cond(D1, state_rel(D1.universe, np.asarray(b, dtype=bool)), D2)


def seq_D(D1: Rel, D2: Rel) -> Rel:
    return m.seq_compose(D1, D2)


def hoare(u: Universe, p, Q: Rel, r) -> m.Verdict:
    """``{p} Q {r}``: ``p`` is an (S,) mask on the initial state, ``r`` an
    (S,) mask on the final state or an (S, S) relation."""
    r = np.asarray(r, dtype=bool)
    if r.ndim == 1:
        r = np.broadcast_to(r[None, :], (u.S, u.S))
    return m.refines(design(u, p, r), Q)


def frame(u: Universe, w) -> np.ndarray:
    """(S, S) table relating states that agree outside the variables ``w``."""
    keep = [i for i, (n, _) in enumerate(u.state_vars) if n not in set(w)]
    key = [tuple(s[i] for i in keep) for s in u.states]
    key = np.array([hash(k) for k in key])
    return key[:, None] == key[None, :]


def spec_stmt(u: Universe, w, pre, post) -> Rel:
    """``w : [pre, post]``, leaving every variable outside ``w`` unchanged."""
    post = np.asarray(post, dtype=bool)
    if post.ndim == 1:
        post = np.broadcast_to(post[None, :], (u.S, u.S))
    return design(u, pre, post & frame(u, w))


# -- lifting ------------------------------------------------------------------


def lift_RD(D: Rel):
    """Embed a normal design as a contract with no intermediate states and
    an empty trace contribution on termination."""
    from .contracts import Contract
    from .reactive_relations import COND, POST, RRRel

    if hc.N(D) != D:
        raise NotNHealthy("lifting needs a normal design")
    u = D.universe
    pre = pre_cond(D)
    post = np.zeros((u.S, u.T, u.S), dtype=bool)
    post[:, 0, :] = post_table(D)
    return Contract(
        RRRel(u, COND, np.broadcast_to(pre[:, None], (u.S, u.T))),
        None,
        RRRel(u, POST, post),
    )


def drop_DR(C) -> Rel:
    """Keep only what a contract does without touching the trace."""
    u = C.universe
    return design(u, C.pre.data[:, 0], C.post.data[:, 0, :])
