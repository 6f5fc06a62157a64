"""Vectorised evaluation of expressions and predicates.

Every value is an array broadcastable to ``(st, tt, st', ref')`` together
with a mask saying where it is defined.  Atomic predicates are false where
any operand is undefined, so connectives only ever see total booleans.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from lark import Token, Tree

from ..model import BoolDom, IntRange, MapDom, Universe

ST, TT, STP, REFP = range(4)


class DenotationError(ValueError):
    pass


class UndeclaredName(DenotationError):
    pass


class UndeclaredChannel(DenotationError):
    pass


class ExprTypeError(DenotationError):
    pass


def _on(arr, axis: int) -> np.ndarray:
    shape = [1, 1, 1, 1]
    shape[axis] = -1
    return np.asarray(arr).reshape(shape)


def _const(v) -> np.ndarray:
    return np.asarray(v).reshape(1, 1, 1, 1)


TRUE = _const(True)


@dataclass
class Num:
    kind: str  # int | bool | event | trace
    val: np.ndarray
    ok: np.ndarray = TRUE

    def safe(self):
        return np.where(self.ok, self.val, 0)


@dataclass
class MapVal:
    keys: IntRange
    vals: list
    present: list
    ok: np.ndarray = TRUE


@dataclass
class MapLit:
    pairs: list


@dataclass
class SetLit:
    elems: list


@dataclass
class Dom:
    m: MapVal


class RefSet:
    pass


class Empty:
    pass


def const(kind: str, v) -> Num:
    return Num(kind, _const(v))


class Evaluator:
    def __init__(self, u: Universe, locals_: dict | None = None):
        self.u = u
        self.locals = dict(locals_ or {})
        self.doms = dict(u.state_vars)

    def bind(self, name: str, v) -> "Evaluator":
        return Evaluator(self.u, {**self.locals, name: v})

    # -- entry points ----------------------------------------------------------

    def pred(self, t) -> np.ndarray:
        """Boolean array broadcastable to ``(S, T, S, R)``."""
        return self.as_bool(self.ev(t))

    def value(self, t):
        return self.ev(t)

    # -- helpers ----------------------------------------------------------------

    def as_bool(self, v) -> np.ndarray:
        if isinstance(v, Num) and v.kind == "bool":
            return v.val & v.ok
        raise ExprTypeError(f"expected a predicate, got {type(v).__name__}")

    def as_num(self, v, kind="int") -> Num:
        if isinstance(v, Num) and v.kind == kind:
            return v
        raise ExprTypeError(f"expected a value of kind {kind}")

    def state_var(self, name: str, axis: int):
        dom = self.doms[name]
        vv = self.u.var_values[name]
        if isinstance(dom, MapDom):
            vals, present = vv
            K = dom.keys.size
            return MapVal(dom.keys, [_on(vals[:, k], axis) for k in range(K)],
                          [_on(present[:, k], axis) for k in range(K)])
        kind = "bool" if isinstance(dom, BoolDom) else "int"
        arr = _on(vv, axis)
        return Num(kind, arr.astype(bool) if kind == "bool" else arr)

    def to_map(self, v, keys: IntRange) -> MapVal:
        if isinstance(v, MapVal):
            if v.keys != keys:
                raise ExprTypeError("maps over different key ranges")
            return v
        if isinstance(v, Empty):
            z = _const(False)
            return MapVal(keys, [_const(0)] * keys.size, [z] * keys.size)
        if isinstance(v, MapLit):
            vals = [_const(0)] * keys.size
            present = [_const(False)] * keys.size
            ok = TRUE
            for k, x in v.pairs:
                k, x = self.as_num(k), self.as_num(x)
                ok = ok & k.ok & x.ok & (k.val >= keys.lo) & (k.val <= keys.hi)
                for i, kk in enumerate(keys.values()):
                    hit = k.val == kk
                    vals[i] = np.where(hit, x.val, vals[i])
                    present[i] = present[i] | hit
            return MapVal(keys, vals, present, ok)
        raise ExprTypeError("expected a map")

    def member(self, x: Num, s) -> np.ndarray:
        if isinstance(s, Dom):
            out = _const(False)
            for k, p in zip(s.m.keys.values(), s.m.present):
                out = out | ((x.val == k) & p)
            return out & x.ok & s.m.ok
        if isinstance(s, SetLit):
            out = _const(False)
            for e in s.elems:
                out = out | ((x.val == e.val) & e.ok)
            return out & x.ok
        if isinstance(s, RefSet):
            x = self.as_num(x, "event")
            bit = (_on(np.arange(self.u.R), REFP) >> np.maximum(x.val, 0)) & 1
            return bit.astype(bool) & x.ok & (x.val >= 0)
        if isinstance(s, Empty):
            return _const(False)
        raise ExprTypeError("membership needs a set")

    def _elements(self, s):
        """(value, mask) pairs enumerating a finite set."""
        if isinstance(s, Dom):
            return [(const("int", k), p & s.m.ok) for k, p in zip(s.m.keys.values(), s.m.present)]
        if isinstance(s, SetLit):
            return [(e, e.ok) for e in s.elems]
        if isinstance(s, Empty):
            return []
        if isinstance(s, RefSet):
            return [(const("event", e), self.member(const("event", e), s)) for e in range(self.u.E)]
        raise ExprTypeError("expected a set")

    def subset(self, a, b) -> np.ndarray:
        out = TRUE
        for x, m in self._elements(a):
            out = out & (~m | self.member(x, b))
        return out

    def equal(self, a, b) -> np.ndarray:
        if isinstance(a, Num) and isinstance(b, Num):
            if a.kind != b.kind:
                raise ExprTypeError(f"comparing {a.kind} with {b.kind}")
            return (a.val == b.val) & a.ok & b.ok
        sets = (Dom, SetLit, RefSet)
        if isinstance(a, sets) or isinstance(b, sets):
            return self.subset(a, b) & self.subset(b, a)
        keys = a.keys if isinstance(a, MapVal) else b.keys if isinstance(b, MapVal) else None
        if keys is None:
            raise ExprTypeError("cannot compare two map literals")
        ma, mb = self.to_map(a, keys), self.to_map(b, keys)
        out = ma.ok & mb.ok
        for va, pa, vb, pb in zip(ma.vals, ma.present, mb.vals, mb.present):
            out = out & (pa == pb) & (~pa | (va == vb))
        return out

    def event(self, channel: str, args: list) -> Num:
        u = self.u
        if channel not in u.channel_info:
            raise UndeclaredChannel(f"undeclared channel {channel}")
        base, ranges = u.channel_info[channel]
        if len(args) != len(ranges):
            raise ExprTypeError(f"channel {channel} takes {len(ranges)} arguments")
        idx, ok = _const(0), TRUE
        for a, r in zip(args, ranges):
            a = self.as_num(a)
            ok = ok & a.ok & (a.val >= r.lo) & (a.val <= r.hi)
            idx = idx * r.size + (a.val - r.lo)
        return Num("event", np.where(ok, base + idx, -1), ok)

    def trace(self, elems: list) -> Num:
        u = self.u
        k = len(elems)
        if k > u.bound:
            return Num("trace", _const(-1), _const(False))
        idx, ok = _const(0), TRUE
        for e in elems:
            e = self.as_num(e, "event")
            ok = ok & e.ok
            idx = idx * u.E + e.safe()
        idx = idx + u.offset[k]
        return Num("trace", np.where(ok, idx, -1), ok)

    # -- the evaluator ---------------------------------------------------------------

    def ev(self, t):
        if t is None:
            return Empty()
        name = str(t.data)
        fn = getattr(self, "_" + name, None)
        if fn is None:
            raise ExprTypeError(f"unsupported expression form {name}")
        return fn(*t.children)

    def _num(self, tok):
        return const("int", int(tok))

    def _true(self):
        return const("bool", True)

    def _false(self):
        return const("bool", False)

    def _var(self, tok):
        name = str(tok)
        if name in self.locals:
            v = self.locals[name]
            return v if not isinstance(v, (int, np.integer)) else const("int", int(v))
        if name in self.doms:
            return self.state_var(name, ST)
        if name in self.u.channel_info:
            return self.event(name, [])
        raise UndeclaredName(f"undeclared name {name}")

    def _primed(self, tok):
        name = str(tok)
        if name not in self.doms:
            raise UndeclaredName(f"undeclared state variable {name}")
        return self.state_var(name, STP)

    def _lookup(self, m, k):
        k = self.as_num(k)
        val, hit = _const(0), _const(False)
        for kk, v, p in zip(m.keys.values(), m.vals, m.present):
            sel = k.val == kk
            val = np.where(sel, v, val)
            hit = hit | (sel & p)
        return Num("int", val, hit & k.ok & m.ok)

    def _apply(self, tok, k):
        m = self._var(tok)
        if not isinstance(m, MapVal):
            raise ExprTypeError(f"{tok} is not a map")
        return self._lookup(m, self.ev(k))

    def _apply_primed(self, tok, k):
        m = self._primed(tok)
        if not isinstance(m, MapVal):
            raise ExprTypeError(f"{tok} is not a map")
        return self._lookup(m, self.ev(k))

    def _evlit(self, tok, *args):
        return self.event(str(tok), [self.ev(a) for a in args])

    def _tt(self):
        return Num("trace", _on(np.arange(self.u.T), TT))

    def _refusal(self):
        return RefSet()

    def _length(self, a):
        t = self.as_num(self.ev(a), "trace")
        return Num("int", self.u.tlen[t.safe()], t.ok)

    def _last(self, a):
        t = self.as_num(self.ev(a), "trace")
        s = t.safe()
        return Num("event", self.u.last[s], t.ok & (self.u.tlen[s] > 0))

    def _total(self, a):
        v = self.ev(a)
        if isinstance(v, Empty):
            return const("int", 0)
        if isinstance(v, MapLit):
            out, ok = _const(0), TRUE
            for _, x in v.pairs:
                x = self.as_num(x)
                out, ok = out + x.val, ok & x.ok
            return Num("int", out, ok)
        if not isinstance(v, MapVal):
            raise ExprTypeError("sum needs a map")
        out = _const(0)
        for x, p in zip(v.vals, v.present):
            out = out + np.where(p, x, 0)
        return Num("int", out, v.ok)

    def _dom(self, a):
        v = self.ev(a)
        if isinstance(v, Empty):
            return v
        if not isinstance(v, MapVal):
            raise ExprTypeError("dom needs a map")
        return Dom(v)

    def _tracelit(self, *elems):
        return self.trace([self.ev(e) for e in elems if e is not None])

    def _emptytrace(self):
        return self.trace([])

    def _emptyset(self):
        return Empty()

    def _setlit(self, *elems):
        return SetLit([self.ev(e) for e in elems])

    def _maplit(self, *pairs):
        return MapLit([(self.ev(p.children[0]), self.ev(p.children[1])) for p in pairs])

    def _update(self, m, k, x):
        m = self.ev(m)
        if not isinstance(m, MapVal):
            raise ExprTypeError("update needs a map")
        k, x = self.as_num(self.ev(k)), self.as_num(self.ev(x))
        vals, present = [], []
        for kk, v, p in zip(m.keys.values(), m.vals, m.present):
            sel = k.val == kk
            vals.append(np.where(sel, x.val, v))
            present.append(p | sel)
        ok = m.ok & k.ok & x.ok & (k.val >= m.keys.lo) & (k.val <= m.keys.hi)
        return MapVal(m.keys, vals, present, ok)

    def _negate(self, a):
        a = self.as_num(self.ev(a))
        return Num("int", -a.val, a.ok)

    def _sum(self, *parts):
        acc = self.as_num(self.ev(parts[0]))
        for op, t in zip(parts[1::2], parts[2::2]):
            b = self.as_num(self.ev(t))
            val = acc.val + b.val if str(op) == "+" else acc.val - b.val
            acc = Num("int", val, acc.ok & b.ok)
        return acc

    def _comp(self, a, op, b):
        op = str(op)
        x, y = self.ev(a), self.ev(b)
        if op in ("in", "notin"):
            if not isinstance(x, Num):
                raise ExprTypeError("membership needs a value on the left")
            r = self.member(x, y)
            return Num("bool", r if op == "in" else ~r & x.ok)
        if op == "==":
            return Num("bool", self.equal(x, y))
        if op == "!=":
            if isinstance(x, Num) and isinstance(y, Num):
                return Num("bool", (x.val != y.val) & x.ok & y.ok)
            return Num("bool", ~self.equal(x, y))
        if isinstance(x, Num) and x.kind == "trace":
            y = self.as_num(y, "trace")
            ok = x.ok & y.ok
            le = self.u.le[x.safe(), y.safe()]
            rel = {"<=": le, "<": le & (x.val != y.val),
                   ">=": self.u.le[y.safe(), x.safe()], ">": self.u.le[y.safe(), x.safe()] & (x.val != y.val)}[op]
            return Num("bool", rel & ok)
        x, y = self.as_num(x), self.as_num(y)
        cmp = {"<=": np.less_equal, "<": np.less, ">=": np.greater_equal, ">": np.greater}[op]
        return Num("bool", cmp(x.val, y.val) & x.ok & y.ok)

    def _not_(self, a):
        return Num("bool", ~self.pred(a))

    def _conj(self, *parts):
        out = TRUE
        for p in parts:
            out = out & self.pred(p)
        return Num("bool", out)

    def _disj(self, *parts):
        out = _const(False)
        for p in parts:
            out = out | self.pred(p)
        return Num("bool", out)

    def _implies(self, a, b):
        return Num("bool", ~self.pred(a) | self.pred(b))

    def _quant(self, q, name, dom, body):
        name = str(name)
        rng = dom.children[0] if dom.children else None
        vals = [const("int", v) for v in rng.values()] if rng is not None else \
            [const("event", e) for e in range(self.u.E)]
        universal = str(q) == "forall"
        out = _const(universal)
        for v in vals:
            r = self.bind(name, v).pred(body)
            out = out & r if universal else out | r
        return Num("bool", out)


# -- state updates ------------------------------------------------------------------


def _codes(u: Universe, name: str) -> np.ndarray:
    """Per-state code of one variable, as used in the state index."""
    dom = dict(u.state_vars)[name]
    vv = u.var_values[name]
    if isinstance(dom, MapDom):
        vals, present = vv
        slots = np.where(present, 1 + vals - dom.vals.lo, 0)
        out = np.zeros(u.S, dtype=np.int64)
        for k in range(dom.keys.size):
            out = out * dom.slot + slots[:, k]
        return out
    if isinstance(dom, BoolDom):
        return vv.astype(np.int64)
    return vv - dom.lo


def _new_codes(u: Universe, name: str, v, ev: Evaluator):
    """Code of the assigned value per state and where it is defined and in
    the variable's domain."""
    dom = dict(u.state_vars)[name]
    flat = lambda a: np.broadcast_to(np.asarray(a), (u.S, 1, 1, 1))[:, 0, 0, 0]
    if isinstance(dom, MapDom):
        m = ev.to_map(v, dom.keys)
        code, ok = np.zeros(u.S, dtype=np.int64), flat(m.ok)
        for x, p in zip(m.vals, m.present):
            x, p = flat(x), flat(p)
            ok = ok & (~p | ((x >= dom.vals.lo) & (x <= dom.vals.hi)))
            code = code * dom.slot + np.where(p, 1 + x - dom.vals.lo, 0)
        return code, ok
    if isinstance(dom, BoolDom):
        b = ev.as_num(v, "bool")
        return flat(b.val).astype(np.int64), flat(b.ok)
    n = ev.as_num(v)
    val, ok = flat(n.val), flat(n.ok)
    return val - dom.lo, ok & (val >= dom.lo) & (val <= dom.hi)


def assignment(u: Universe, name: str, v, ev: Evaluator) -> np.ndarray:
    """Successor state per state; -1 where the value is undefined or out of
    the variable's domain."""
    if name not in dict(u.state_vars):
        raise UndeclaredName(f"undeclared state variable {name}")
    stride = u.strides[u.var_index[name]]
    new, ok = _new_codes(u, name, v, ev)
    succ = np.arange(u.S) + (new - _codes(u, name)) * stride
    return np.where(ok, succ, -1)


def state_only(u: Universe, arr, what: str) -> np.ndarray:
    a = np.asarray(arr)
    if any(d > 1 for d in a.shape[1:]):
        raise ExprTypeError(f"{what} may only mention the current state")
    return np.broadcast_to(a, (u.S, 1, 1, 1))[:, 0, 0, 0]
