"""Denotation of process terms and contract definitions as contracts."""

from __future__ import annotations

import itertools

import numpy as np

from .. import contracts as c
from .. import parallel as par
from .. import reactive_relations as rr
from ..contracts import Contract, NotProductive
from ..model import Universe
from . import syntax as s
from .expr import (DenotationError, Evaluator, ExprTypeError, UndeclaredChannel, UndeclaredName,
                   assignment, const, state_only)


class RecursiveReference(DenotationError):
    pass


class UnknownDefinition(DenotationError):
    pass


def cdf(u: Universe) -> Contract:
    """Deadlock freedom: while waiting, some event is not refused."""
    if u.E < 1:
        raise ValueError("deadlock freedom needs at least one event")
    peri = np.ones((u.S, u.T, u.R), dtype=bool)
    peri[:, :, u.R - 1] = False
    return Contract(True, peri, True, universe=u)


class Model:
    """A parsed specification bound to its universe, with memoised
    denotations of its named definitions."""

    def __init__(self, spec: s.ModelSpec, bound: int | None = None):
        self.spec = spec
        self.universe = Universe(spec.channels, spec.state_vars, bound or spec.bound)
        self._memo: dict = {}
        self._active: set = set()
        # recursion stabilisation index per MuTail node, for reporting
        self.stabilised: list[int] = []

    # -- names ---------------------------------------------------------------------

    def _args(self, ev: Evaluator, args) -> tuple:
        out = []
        for a in args:
            v = ev.value(a) if not isinstance(a, (int, np.integer)) else const("int", int(a))
            vals = state_only(self.universe, np.where(v.ok, v.val, -10**9), "an argument")
            if not (vals == vals[0]).all() or vals[0] == -10**9:
                raise ExprTypeError("arguments must be constants")
            out.append(int(vals[0]))
        return tuple(out)

    def lookup(self, name: str, args=(), ev: Evaluator | None = None) -> Contract:
        ev = ev or Evaluator(self.universe)
        vals = self._args(ev, args)
        key = (name, vals)
        if key in self._memo:
            return self._memo[key]
        if key in self._active:
            raise RecursiveReference(f"{name} refers to itself; write recursion as 'mu X . P ; X'")
        if name in self.spec.processes:
            d = self.spec.processes[name]
            kind = "process"
        elif name in self.spec.contracts:
            d = self.spec.contracts[name]
            kind = "contract"
        else:
            raise UnknownDefinition(f"no process or contract named {name}")
        if len(d.params) != len(vals):
            raise ExprTypeError(f"{name} takes {len(d.params)} arguments")
        inner = Evaluator(self.universe, dict(zip(d.params, (const("int", v) for v in vals))))
        self._active.add(key)
        try:
            out = self.denote(d.body, inner) if kind == "process" else self.contract_def(d, inner)
        finally:
            self._active.discard(key)
        self._memo[key] = out
        return out

    def resolve(self, text: str) -> Contract:
        """Denote a name such as ``Pay(0,1,1)`` or any process term."""
        return self.denote(s.parse_proc(text))

    # -- contract definitions ----------------------------------------------------------

    def contract_def(self, d: s.ContractDef, ev: Evaluator) -> Contract:
        u = self.universe
        pre = np.asarray(ev.pred(d.pre))
        peri = np.asarray(ev.pred(d.peri))
        post = np.asarray(ev.pred(d.post))
        for arr, free, what in ((pre, (2, 3), "precondition"), (peri, (2,), "pericondition"),
                                (post, (3,), "postcondition")):
            if any(arr.shape[i] > 1 for i in free if i < arr.ndim):
                raise ExprTypeError(f"{what} of {d.name} mentions a variable outside its alphabet")
        pre = np.broadcast_to(pre, (u.S, u.T, 1, 1))[:, :, 0, 0]
        peri = np.broadcast_to(peri, (u.S, u.T, 1, u.R))[:, :, 0, :]
        post = np.broadcast_to(post, (u.S, u.T, u.S, 1))[:, :, :, 0]
        try:
            return Contract(pre.copy(), peri.copy(), post.copy(), universe=u)
        except rr.NotRC as e:
            raise DenotationError(f"precondition of {d.name} is not prefix closed") from e

    # -- processes --------------------------------------------------------------------------

    def denote(self, p: s.Proc, ev: Evaluator | None = None) -> Contract:
        u = self.universe
        ev = ev or Evaluator(u)
        if isinstance(p, s.Skip):
            return c.skip(u)
        if isinstance(p, s.Stop):
            return c.stop(u)
        if isinstance(p, s.Chaos):
            return c.chaos(u)
        if isinstance(p, s.Miracle):
            return c.miracle(u)
        if isinstance(p, s.Prefix):
            return self._prefix(p, ev)
        if isinstance(p, s.Guard):
            return c.guard(state_only(u, ev.pred(p.cond), "a guard"), self.denote(p.body, ev))
        if isinstance(p, s.Cond):
            b = state_only(u, ev.pred(p.cond), "a condition")
            return c.cond(self.denote(p.left, ev), b, self.denote(p.right, ev))
        if isinstance(p, s.Assign):
            return c.assignsR(u, assignment(u, p.var, ev.value(p.expr), ev))
        if isinstance(p, s.IndexedAssign):
            return self._indexed_assign(p, ev)
        if isinstance(p, s.Seq):
            return c.seq(self.denote(p.left, ev), self.denote(p.right, ev))
        if isinstance(p, s.ExtChoice):
            return c.extchoice([self.denote(q, ev) for q in p.branches])
        if isinstance(p, s.IntChoice):
            return c.intchoice_indexed([self.denote(q, ev) for q in p.branches])
        if isinstance(p, s.Interleave):
            return par.interleave(self.denote(p.left, ev), self.denote(p.right, ev))
        if isinstance(p, s.MuTail):
            info = c.tail_rec_info(self.denote(p.body, ev))
            self.stabilised.append(info.stabilised_at)
            return info.contract
        if isinstance(p, s.Ref):
            if p.name in ev.locals:
                raise RecursiveReference(f"{p.name} may only appear in tail position of its mu")
            return self.lookup(p.name, p.args, ev)
        raise DenotationError(f"cannot denote {type(p).__name__}")

    def _prefix(self, p: s.Prefix, ev: Evaluator) -> Contract:
        u = self.universe
        if p.channel not in u.channel_info:
            raise UndeclaredChannel(f"undeclared channel {p.channel}")
        _, ranges = u.channel_info[p.channel]
        if len(p.args) != len(ranges):
            raise ExprTypeError(f"channel {p.channel} takes {len(ranges)} arguments")
        inputs = [i for i, a in enumerate(p.args) if isinstance(a, s.Input)]
        if inputs:
            # c?x -> P is the external choice over every value of x
            branches = []
            for vals in itertools.product(*(ranges[i].values() for i in inputs)):
                inner, args = ev, list(p.args)
                for i, v in zip(inputs, vals):
                    inner = inner.bind(p.args[i].name, const("int", v))
                    args[i] = v
                args = [s_const(a) for a in args]
                branches.append(self._prefix(s.Prefix(p.channel, tuple(args), p.body), inner))
            return c.extchoice(branches)
        e = ev.event(p.channel, [ev.value(a) for a in p.args])
        ids = state_only(u, e.val, "an event")
        pre = c.prefix(u, ids)
        if isinstance(p.body, s.Skip):
            return pre
        return c.seq(pre, self.denote(p.body, ev))

    def _indexed_assign(self, p: s.IndexedAssign, ev: Evaluator) -> Contract:
        u = self.universe
        from lark import Token, Tree

        var = Tree("var", [Token("NAME", p.var)])
        m = ev.value(var)
        k = ev.value(p.index)
        # defined exactly when the index is in the map's domain
        pre = state_only(u, ev.member(k, ev.value(Tree("dom", [var]))), "an index")
        upd = ev.value(Tree("update", [var, p.index, p.expr]))
        sigma = assignment(u, p.var, upd, ev)
        post = rr.assigns_r(u, sigma).data
        return Contract(np.broadcast_to(pre[:, None], (u.S, u.T)).copy(), False, post, universe=u)


def s_const(v):
    """An already-evaluated event argument."""
    if isinstance(v, int):
        from lark import Token, Tree
        return Tree("num", [Token("INT", str(v))])
    return v


def load(text: str, bound: int | None = None) -> Model:
    return Model(s.parse(text), bound)


def denote(p: s.Proc, u: Universe, spec: s.ModelSpec | None = None) -> Contract:
    """Denote a process term over a universe; named references resolve
    against ``spec`` when given."""
    spec = spec or s.ModelSpec(list(u.channels), list(u.state_vars), u.bound)
    model = Model(spec, u.bound)
    if model.universe != u:
        raise DenotationError("specification and universe disagree")
    return model.denote(p)
