"""Parallel composition by merge.

An inner merge relates, for a shared initial state, the contribution of
each side ``(tt0, st0', ref0')`` and ``(tt1, st1', ref1')`` to a merged
contribution ``(tt, st', ref')``.  It is held as a boolean array
broadcastable to::

    (st, tt0, st0', ref0', tt1, st1', ref1', tt, st', ref')

Storing contributions rather than whole traces means the merge cannot see
the trace history, and it never mentions ok or wait.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import healthiness as hc
from . import model as m
from . import reactive_relations as rr
from .contracts import Contract
from .model import FULL, Rel, Universe, truncation
from .reactive_relations import COND, PERI, POST, RR_VARS, RRRel
from .trace_algebra import interleavings


class MergeNotSymmetric(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MergeRel:
    universe: Universe
    data: np.ndarray
    # (T, T) pairs of side contributions whose merge may exceed the bound
    overflow: np.ndarray

    def full_shape(self):
        u = self.universe
        side = (u.T, u.S, u.R)
        return (u.S,) + side * 3

    def dense(self) -> np.ndarray:
        return np.broadcast_to(self.data, self.full_shape())


@lru_cache(maxsize=16)
def interleave_merge(u: Universe) -> MergeRel:
    """Merged trace is an interleaving, merged refusal is contained in both
    refusals, and the final state is left unconstrained."""
    T, L = u.T, u.bound
    il = np.zeros((T, T, T), dtype=bool)
    over = np.zeros((T, T), dtype=bool)
    for i, s in enumerate(u.traces):
        for j, t in enumerate(u.traces):
            if len(s) + len(t) > L:
                over[i, j] = True
                continue
            for w in interleavings(s, t):
                il[i, j, u.trace_index[w]] = True
    r = np.arange(u.R)
    refs = (r[None, None, :] & ~(r[:, None, None] & r[None, :, None])) == 0
    data = (il.reshape(1, T, 1, 1, T, 1, 1, T, 1, 1)
            & refs.reshape(1, 1, 1, u.R, 1, 1, u.R, 1, 1, u.R))
    return MergeRel(u, data, over)


def hide_state(M: MergeRel) -> MergeRel:
    """``∃ st' • M``"""
    return MergeRel(M.universe, M.data.any(axis=8, keepdims=True), M.overflow)


def ext_close(M: MergeRel) -> MergeRel:
    """``M ⨾ trueᵣ``: any extension of a merged contribution, with final
    state and refusal unconstrained."""
    u = M.universe
    red = M.data.any(axis=(8, 9))
    out = (red.astype(np.float32) @ u.le.astype(np.float32)) > 0
    return MergeRel(u, out[..., None, None], M.overflow)


def swap(M: MergeRel) -> MergeRel:
    return MergeRel(M.universe, np.ascontiguousarray(np.swapaxes(
        np.swapaxes(np.swapaxes(M.data, 1, 4), 2, 5), 3, 6)), M.overflow.T)


def is_symmetric(M: MergeRel) -> bool:
    a, b = M.data, swap(M).data
    shape = np.broadcast_shapes(a.shape, b.shape)
    return (np.array_equal(np.broadcast_to(a, shape), np.broadcast_to(b, shape))
            and np.array_equal(M.overflow, M.overflow.T))


def _merge_one(p, q, Ms, overflow):
    """Merged ``(tt, st', ref')`` table for one initial state."""
    u_shape = p.shape
    r0 = tuple(i for i in (1, 2) if Ms.shape[i] == 1)
    r1 = tuple(i for i in (1, 2) if Ms.shape[i + 3] == 1)
    pr = p.any(axis=r0, keepdims=True) if r0 else p
    qr = q.any(axis=r1, keepdims=True) if r1 else q
    i0 = np.nonzero(pr)
    i1 = np.nonzero(qr)
    out_shape = Ms.shape[6:]
    if not len(i0[0]) or not len(i1[0]):
        return np.zeros(u_shape, dtype=bool), 0
    t0, s0, f0 = (x[:, None] for x in i0)
    t1, s1, f1 = (x[None, :] for x in i1)
    # clip indices on broadcast axes
    s0 = s0 * (Ms.shape[1] > 1)
    f0 = f0 * (Ms.shape[2] > 1)
    t0b = t0 * (Ms.shape[0] > 1)
    s1 = s1 * (Ms.shape[4] > 1)
    f1 = f1 * (Ms.shape[5] > 1)
    t1b = t1 * (Ms.shape[3] > 1)
    picked = Ms[t0b, s0, f0, t1b, s1, f1]  # (n0, n1, *out)
    merged = picked.any(axis=(0, 1))
    n_over = int(np.count_nonzero(overflow[i0[0][:, None], i1[0][None, :]]))
    return np.broadcast_to(merged.reshape(out_shape), u_shape), n_over


def merge(P: RRRel, M: MergeRel, Q: RRRel, count: bool = True) -> RRRel:
    """``P ∥_M Q`` on reactive relations."""
    u = P.universe
    p = rr.widen(P, RR_VARS).data
    q = rr.widen(Q, RR_VARS).data
    out = np.zeros((u.S, u.T, u.S, u.R), dtype=bool)
    total = 0
    for s in range(u.S):
        Ms = M.data[s if M.data.shape[0] > 1 else 0]
        out[s], n = _merge_one(p[s], q[s], Ms, M.overflow)
        total += n
    if count:
        truncation.add(total)
    return RRRel(u, RR_VARS, out)


def wpp(P: RRRel, M: MergeRel, Q: RRRel) -> RRRel:
    """Weakest rely: ``¬ᵣ((¬ᵣ Q) ∥_{M ⨾ trueᵣ} P)``."""
    if not rr.is_rc(Q):
        raise rr.NotRC("weakest rely needs a reactive condition")
    bad = merge(rr.neg_r(rr.narrow(Q, COND)), ext_close(M), P, count=False)
    return rr.neg_r(rr.hide(bad, ("st'", "ref'")))


def intermediate_merge(P: RRRel, M: MergeRel, Q: RRRel) -> RRRel:
    return rr.hide(merge(P, hide_state(M), Q), ("st'",))


def rd_par(C1: Contract, C2: Contract, M: MergeRel) -> Contract:
    """Parallel composition of two contracts under an inner merge."""
    if not is_symmetric(M):
        raise MergeNotSymmetric("the inner merge is not symmetric")
    P1, P2, P3 = C1.pre, C1.peri, C1.post
    Q1, Q2, Q3 = C2.pre, C2.peri, C2.post
    pre = rr.conj_all([
        wpp(rr.implies_r(P1, P2), M, Q1),
        wpp(rr.implies_r(P1, P3), M, Q1),
        wpp(rr.implies_r(Q1, Q2), M, P1),
        wpp(rr.implies_r(Q1, Q3), M, P1),
    ])
    peri = rr.disj_all([
        intermediate_merge(P2, M, Q2),
        intermediate_merge(P3, M, Q2),
        intermediate_merge(P2, M, Q3),
    ])
    # postconditions carry no refusal
    post = rr.hide(merge(P3, M, Q3), ("ref'",))
    return Contract(pre, peri, post)


def interleave(C1: Contract, C2: Contract) -> Contract:
    return rd_par(C1, C2, interleave_merge(C1.universe))


# -- monolithic parallel-by-merge ---------------------------------------------


def par_by_merge(P: Rel, Q: Rel, M: MergeRel) -> Rel:
    """``(P₀ ∧ Q₁ ∧ v' = v) ⨾ M_R(M)`` on full relations, where the outer
    merge conjoins the ok flags, disjoins the wait flags, extends the
    initial trace by the inner merge and applies RD3 ∘ RD1 ∘ R3h."""
    u = P.universe
    T, S, R = u.T, u.S, u.R
    side = (2, 2, T, S, R)
    pd = P.data.reshape(side + side)
    qd = Q.data.reshape(side + side)
    axes = tuple(range(5, 10))
    live = pd.any(axis=axes) & qd.any(axis=axes)  # both sides have an outcome
    out = np.zeros(side + side, dtype=bool)
    le = u.le.reshape(1, T, 1, 1, 1, 1, T, 1, 1)
    out[0] = live[0].reshape(2, T, S, R, 1, 1, 1, 1, 1) & le
    out[1, 1] = live[1, 1].reshape(T, S, R, 1, 1, 1, 1, 1) & hc.II_srd(u).data.reshape(side + side)[1, 1]
    for tr, st, ref in zip(*np.nonzero(live[1, 0])):
        room = u.bound - int(u.tlen[tr])
        n = u.upto(room)
        ext = u.cat_many(int(tr), np.arange(n))
        Ms = M.data[st if M.data.shape[0] > 1 else 0]
        pc = np.zeros((2, 2, T, S, R), dtype=bool)
        qc = np.zeros((2, 2, T, S, R), dtype=bool)
        pc[:, :, :n] = pd[1, 0, tr, st, ref][:, :, ext]
        qc[:, :, :n] = qd[1, 0, tr, st, ref][:, :, ext]
        for o0 in range(2):
            for w0 in range(2):
                for o1 in range(2):
                    for w1 in range(2):
                        merged, _ = _merge_one(pc[o0, w0], qc[o1, w1], Ms, M.overflow)
                        if not merged.any():
                            continue
                        view = out[1, 0, tr, st, ref, o0 & o1, w0 | w1]
                        view[ext] |= merged[:n]
    res = Rel(u, FULL, out.reshape(P.data.shape))
    return m.seq_compose(res, hc.II_srd(u))


def rd_par_full(P: Rel, Q: Rel, M: MergeRel) -> Rel:
    return par_by_merge(P, Q, M)
