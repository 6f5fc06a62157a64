"""Abstract syntax and parser for the process language."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from lark import Lark, Token, Transformer, Tree, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from ..model import BoolDom, IntRange, MapDom


class ParseError(SyntaxError):
    def __init__(self, msg: str, line: int = 0, col: int = 0, expected=()):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.reason = msg
        self.line, self.col, self.expected = line, col, tuple(sorted(expected))


# -- process syntax -------------------------------------------------------------


class Proc:
    pass


@dataclass(frozen=True)
class Skip(Proc):
    pass


@dataclass(frozen=True)
class Stop(Proc):
    pass


@dataclass(frozen=True)
class Chaos(Proc):
    pass


@dataclass(frozen=True)
class Miracle(Proc):
    pass


@dataclass(frozen=True)
class Input:
    """``?x`` in an event: bind ``x`` to each value of the argument range."""
    name: str


@dataclass(frozen=True)
class Prefix(Proc):
    channel: str
    args: tuple  # expression trees or Input
    body: Proc


@dataclass(frozen=True)
class Guard(Proc):
    cond: Tree
    body: Proc


@dataclass(frozen=True)
class Assign(Proc):
    var: str
    expr: Tree


@dataclass(frozen=True)
class IndexedAssign(Proc):
    var: str
    index: Tree
    expr: Tree


@dataclass(frozen=True)
class Seq(Proc):
    left: Proc
    right: Proc


@dataclass(frozen=True)
class ExtChoice(Proc):
    branches: tuple


@dataclass(frozen=True)
class IntChoice(Proc):
    branches: tuple


@dataclass(frozen=True)
class Cond(Proc):
    cond: Tree
    left: Proc
    right: Proc


@dataclass(frozen=True)
class MuTail(Proc):
    """``mu X . body ; X``"""
    body: Proc
    var: str = "X"


@dataclass(frozen=True)
class Interleave(Proc):
    left: Proc
    right: Proc


@dataclass(frozen=True)
class Ref(Proc):
    name: str
    args: tuple = ()


# -- declarations -----------------------------------------------------------------


@dataclass(frozen=True)
class ProcessDef:
    name: str
    params: tuple
    body: Proc


@dataclass(frozen=True)
class ContractDef:
    name: str
    params: tuple
    pre: Tree
    peri: Tree
    post: Tree


@dataclass
class ModelSpec:
    channels: list = field(default_factory=list)  # (name, ranges)
    state_vars: list = field(default_factory=list)  # (name, domain)
    bound: int = 2
    processes: dict = field(default_factory=dict)
    contracts: dict = field(default_factory=dict)

    def names(self):
        return list(self.processes) + list(self.contracts)


class _RecursionForm(ValueError):
    pass


def _occurs(name: str, p: Proc) -> bool:
    if isinstance(p, Ref):
        return p.name == name
    if isinstance(p, MuTail):
        return _occurs(name, p.body)
    for v in vars(p).values():
        if isinstance(v, Proc) and _occurs(name, v):
            return True
        if isinstance(v, tuple) and any(isinstance(x, Proc) and _occurs(name, x) for x in v):
            return True
    return False


def _nested_mu(p: Proc) -> bool:
    if isinstance(p, MuTail):
        return True
    for v in vars(p).values():
        if isinstance(v, Proc) and _nested_mu(v):
            return True
        if isinstance(v, tuple) and any(isinstance(x, Proc) and _nested_mu(x) for x in v):
            return True
    return False


def _split_tail(var: str, body: Proc) -> Proc:
    """Strip the trailing recursion variable from ``P ; X`` (or ``e -> X``)."""
    if isinstance(body, Seq) and body.right == Ref(var):
        return body.left
    if isinstance(body, Seq):
        return Seq(body.left, _split_tail(var, body.right))
    if isinstance(body, Prefix) and not any(isinstance(a, Input) for a in body.args):
        if body.body == Ref(var):
            return Prefix(body.channel, body.args, Skip())
        return Prefix(body.channel, body.args, _split_tail(var, body.body))
    raise _RecursionForm(var)


def _seq(items):
    out = items[-1]
    for p in reversed(items[:-1]):
        out = Seq(p, out)
    return out


def _range(t):
    lo, hi = t.children
    return IntRange(lo, hi)


@v_args(inline=True)
class _Build(Transformer):
    # declarations
    def start(self, *decls):
        spec = ModelSpec()
        for kind, *rest in decls:
            if kind == "channel":
                spec.channels.append(tuple(rest))
            elif kind == "state":
                spec.state_vars.append(tuple(rest))
            elif kind == "bound":
                spec.bound = rest[0]
            elif kind == "process":
                d = rest[0]
                if d.name in spec.processes or d.name in spec.contracts:
                    raise ValueError(f"duplicate definition {d.name}")
                spec.processes[d.name] = d
            else:
                d = rest[0]
                if d.name in spec.processes or d.name in spec.contracts:
                    raise ValueError(f"duplicate definition {d.name}")
                spec.contracts[d.name] = d
        return spec

    def channel(self, name, *ranges):
        return ("channel", str(name), tuple(r for r in ranges if r is not None))

    def state(self, name, dom):
        return ("state", str(name), dom)

    def bound(self, n):
        return ("bound", int(n))

    def process(self, name, params, body):
        return ("process", ProcessDef(str(name), params or (), body))

    def contract(self, name, params, pre, peri, post):
        return ("contract", ContractDef(str(name), params or (), pre, peri, post))

    def params(self, *names):
        return tuple(str(n) for n in names)

    def sint(self, *parts):
        return -int(parts[1]) if len(parts) == 2 else int(parts[0])

    def range(self, lo, hi):
        return IntRange(lo, hi)

    def int_type(self, r):
        return r

    def bool_type(self):
        return BoolDom()

    def map_type(self, k, v):
        return MapDom(k, v)

    # processes
    def skip(self):
        return Skip()

    def stop(self):
        return Stop()

    def chaos(self):
        return Chaos()

    def miracle(self):
        return Miracle()

    def mu(self, name, body):
        name = str(name)
        if _nested_mu(body):
            raise _RecursionForm(name)
        p = _split_tail(name, body)
        if _occurs(name, p):
            raise _RecursionForm(name)
        return MuTail(p, name)

    def extchoice(self, *ps):
        return ExtChoice(tuple(ps))

    def intchoice(self, *ps):
        return IntChoice(tuple(ps))

    def interleave(self, *ps):
        out = ps[0]
        for p in ps[1:]:
            out = Interleave(out, p)
        return out

    def seqc(self, *ps):
        return _seq(list(ps))

    def prefix(self, ev, body):
        name, args = ev
        return Prefix(name, args, body)

    def guard(self, g, body):
        return Guard(g, body)

    def cond(self, b, p, q):
        return Cond(b, p, q)

    def assign(self, name, e):
        return Assign(str(name), e)

    def iassign(self, name, i, e):
        return IndexedAssign(str(name), i, e)

    def ref(self, name, args):
        return Ref(str(name), tuple(args.children) if args is not None else ())

    def event(self, name, *parts):
        return (str(name), tuple(parts))

    def evarg(self, e):
        return e

    def evinput(self, name):
        return Input(str(name))


@lru_cache(maxsize=1)
def _parser() -> Lark:
    text = resources.files(__package__).joinpath("grammar.lark").read_text()
    return Lark(text, parser="earley", lexer="dynamic", propagate_positions=True, ambiguity="resolve")


def _pos(e: UnexpectedInput):
    return getattr(e, "line", 0) or 0, getattr(e, "column", 0) or 0


def parse(text: str) -> ModelSpec:
    try:
        tree = _parser().parse(text)
    except UnexpectedCharacters as e:
        line, col = _pos(e)
        raise ParseError(f"unexpected character {text[e.pos_in_stream]!r}", line, col,
                         e.allowed or ()) from None
    except UnexpectedToken as e:
        line, col = _pos(e)
        raise ParseError(f"unexpected token {str(e.token)!r}", line, col, e.expected) from None
    except UnexpectedEOF as e:
        lines = text.splitlines() or [""]
        raise ParseError("unexpected end of input", len(lines), len(lines[-1]) + 1, e.expected) from None
    try:
        return _Build().transform(tree)
    except VisitError as e:
        meta = getattr(e.obj, "meta", None)
        line = getattr(meta, "line", 0) if meta is not None and not meta.empty else 0
        col = getattr(meta, "column", 0) if meta is not None and not meta.empty else 0
        if isinstance(e.orig_exc, _RecursionForm):
            raise ParseError(f"recursion on {e.orig_exc} must have the tail form 'mu X . P ; X' "
                             "with X absent from P", line, col) from None
        raise ParseError(str(e.orig_exc), line, col) from None


def parse_proc(text: str) -> Proc:
    """Parse a process term on its own, e.g. ``Pay(0,1,1)`` on the command line."""
    spec = parse(f"process _ = {text}")
    return spec.processes["_"].body
