"""Property suites: every algebraic law of the engine, checked on seeded
samples or exhaustively on small universes."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import contracts as c
from . import designs as ds
from . import healthiness as hc
from . import model as m
from . import parallel as par
from . import reactive_relations as rr
from . import sampling as smp
from . import trace_algebra as ta
from .model import DESIGN, FULL, IntRange, Rel, Universe, cyl, truncation
from .reactive_relations import COND, PERI, POST, RR_VARS, RRRel


class UnknownSuite(ValueError):
    pass


@dataclass
class LawResult:
    name: str
    holds: bool
    cases: int = 0
    witness: str = ""


@dataclass
class SuiteReport:
    name: str
    results: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self):
        return all(r.holds for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.holds]


@dataclass
class Ctx:
    seed: int = 0
    samples: int = 50

    def rng(self, salt: int = 0):
        return np.random.default_rng([self.seed, salt])


def law(name: str, cases: Iterable) -> LawResult:
    """Each case is a bool or a ``(bool, witness)`` pair; stops at the
    first failure."""
    n = 0
    for case in cases:
        ok, wit = case if isinstance(case, tuple) else (case, "")
        n += 1
        if not ok:
            return LawResult(name, False, n, wit() if callable(wit) else str(wit))
    return LawResult(name, True, n)


def _diff(P: Rel, Q: Rel) -> str:
    d = Rel(P.universe, P.alphabet, P.data ^ Q.data)
    b = next(d.bindings(1), None)
    return d.fmt_binding(b) if b is not None else ""


def eq(P: Rel, Q: Rel):
    return (P == Q, lambda: _diff(P, Q))


def ceq(C1: c.Contract, C2: c.Contract):
    return (C1 == C2, lambda: f"\n{C1}\n--- versus ---\n{C2}")


# -- trace algebra ----------------------------------------------------------------


def suite_trace(ctx: Ctx) -> list[LawResult]:
    ev = (ta.Event("a"), ta.Event("b"))
    ts = [tuple(p) for k in range(4) for p in itertools.product(ev, repeat=k)]
    cat, e = ta.concat, ta.empty()
    pairs = list(itertools.product(ts, ts))
    out = [
        law("TA1 associativity", (cat(x, cat(y, z)) == cat(cat(x, y), z) for x, y, z in itertools.product(ts, ts, ts))),
        law("TA2 unit", (cat(e, x) == x == cat(x, e) for x in ts)),
        law("TA3 left cancellation", (cat(x, y) != cat(x, z) or y == z for x, y, z in itertools.product(ts, ts, ts))),
        law("TA4 right cancellation", (cat(x, z) != cat(y, z) or x == y for x, y, z in itertools.product(ts, ts, ts))),
        law("TA5 no inverses", (cat(x, y) != e or x == e for x, y in pairs)),
        law("measure of empty", [ta.measure(e) == 0]),
        law("measure additive", (ta.measure(cat(x, y)) == ta.measure(x) + ta.measure(y) for x, y in pairs)),
        law("measure positive", (x == e or ta.measure(x) > 0 for x in ts)),
        law("subtract inverts concat",
            (not ta.prefix_le(s, t) or cat(s, ta.subtract(t, s)) == t for s, t in pairs)),
        law("prefix is existence of a suffix",
            (ta.prefix_le(s, t) == any(cat(s, w) == t for w in ts) for s, t in pairs if len(t) <= 3)),
        law("interleaving count bound",
            (len(ta.interleavings(s, t)) <= ta.interleaving_bound(s, t) for s, t in pairs)),
        law("interleaving count exact on disjoint events",
            (len(ta.interleavings(s, t)) == ta.interleaving_bound(s, t)
             for s, t in pairs if not set(s) & set(t))),
    ]
    return out


# -- relational calculus ------------------------------------------------------------


def _rel_samples(ctx: Ctx, u: Universe, salt: int):
    g = ctx.rng(salt)
    return [smp.sparse_rel(u, g) for _ in range(ctx.samples)]


def suite_relational(ctx: Ctx) -> list[LawResult]:
    u = smp.default_universe()
    Ps = _rel_samples(ctx, u, 1)
    n = len(Ps)
    g = ctx.rng(2)
    II = m.skip(u)
    F, T = m.top(u), m.bottom(u)
    trip = [(Ps[i], Ps[(i + 1) % n], Ps[(i + 2) % n]) for i in range(n)]
    conds = [cyl(u, FULL, ("ok", "wait", "tr", "st"), g.random((2, 2, u.T, u.S)) < 0.5) for _ in range(n)]

    def families():
        for i in range(n):
            k = int(g.integers(1, 5))
            yield [Ps[(i + j * 7) % n] for j in range(k)], Ps[(i + 3) % n]

    fams = list(families())
    out = [
        law("seq identity", (eq(m.seq_compose(P, II), P) for P in Ps)),
        law("seq identity (left)", (eq(m.seq_compose(II, P), P) for P in Ps)),
        law("seq annihilation", (eq(m.seq_compose(P, F), F) for P in Ps)),
        law("seq annihilation (left)", (eq(m.seq_compose(F, P), F) for P in Ps)),
        law("seq associativity",
            (eq(m.seq_compose(m.seq_compose(P, Q), R), m.seq_compose(P, m.seq_compose(Q, R))) for P, Q, R in trip)),
        law("cond right distribution",
            (eq(m.seq_compose(m.cond(P, b, Q), R), m.cond(m.seq_compose(P, R), b, m.seq_compose(Q, R)))
             for (P, Q, R), b in zip(trip, conds))),
        law("seq distributes over inf (left)",
            (eq(m.seq_compose(m.inf_indexed(A), Q), m.inf_indexed([m.seq_compose(P, Q) for P in A])) for A, Q in fams)),
        law("seq distributes over inf (right)",
            (eq(m.seq_compose(Q, m.inf_indexed(A)), m.inf_indexed([m.seq_compose(Q, P) for P in A])) for A, Q in fams)),
        law("L1 inf is a lower bound", (m.refines(m.inf_indexed(A), P).holds for A, _ in fams for P in A)),
        law("L2 inf is the greatest lower bound",
            (m.refines(X, m.inf_indexed(A)).holds
             for A, X in fams if all(m.refines(X, P).holds for P in A))),
        law("L1 sup is an upper bound", (m.refines(P, m.sup_indexed(A)).holds for A, _ in fams for P in A)),
        law("L2 sup is the least upper bound",
            (m.refines(m.sup_indexed(A), X).holds
             for A, X in fams if all(m.refines(P, X).holds for P in A))),
        law("mu of identity is true", [eq(m.mu(lambda X: X, u), T)]),
        law("nu of identity is false", [eq(m.nu(lambda X: X, u), F)]),
        law("mu of a constant", (eq(m.mu(lambda X, P=P: P, u), P) for P in Ps[:5])),
    ]
    fixes = []
    for P, Q, _ in trip[: min(6, n)]:
        Fn = lambda X, P=P, Q=Q: Q | m.seq_compose(P, X)
        lo, hi = m.mu(Fn, u), m.nu(Fn, u)
        chain = m.kleene_chain(Fn, u)
        cands = [X for X in (F, hi, lo, Fn(F), Fn(T), P, Q) if m.refines(X, Fn(X)).holds]
        fixes.append((Fn, lo, hi, chain, cands))
    out += [
        law("mu is a fixed point", (eq(Fn(lo), lo) for Fn, lo, *_ in fixes)),
        law("mu is below every pre-fixed point",
            (m.refines(lo, X).holds for _, lo, _, _, cands in fixes for X in cands)),
        law("nu is a fixed point", (eq(Fn(hi), hi) for Fn, _, hi, *_ in fixes)),
        law("Kleene: nu is the limit of the chain from false", (eq(chain[-1], hi) for _, _, hi, chain, _ in fixes)),
    ]
    return out


# -- healthiness --------------------------------------------------------------------


META_CONDITIONS = ("SRD", "NSRD", "RR", "RC", "Rs")


def meta_reports(ctx: Ctx, names=META_CONDITIONS) -> dict:
    u = smp.default_universe()
    S = _rel_samples(ctx, u, 3)
    return {h: hc.check_meta(h, S, seed=ctx.seed) for h in names}


def _meta_law(h, r, props=("idempotent", "monotone", "continuous")) -> LawResult:
    ok = all(getattr(r, p) for p in props)
    wit = "; ".join(f"{k}: {w}" for k, w in r.failures if k in props)[:400]
    return LawResult(f"{h} " + ", ".join(props), ok, 1, wit)


def rc_discontinuity(u: Universe):
    """Two reactive relations whose disjunction has a prefix-closed part
    larger than the disjunction of their prefix-closed parts."""
    ab = u.trace_id(["a", "b"])
    p = np.zeros(u.T, dtype=bool)
    p[[0, u.trace_id(["a"])]] = True
    q = np.zeros(u.T, dtype=bool)
    q[ab] = True
    P, Q = (rr.to_full(rr.rr_cyl(u, COND, ("tt",), x)) for x in (p, q))
    lhs, rhs = hc.RC(P | Q), hc.RC(P) | hc.RC(Q)
    return lhs != rhs, _diff(lhs, rhs)


def suite_healthiness(ctx: Ctx) -> list[LawResult]:
    u = smp.default_universe()
    S = _rel_samples(ctx, u, 3)
    g = ctx.rng(4)
    du = smp.design_universe()
    DS = [smp.sparse_rel(du, g, DESIGN) for _ in range(ctx.samples)]
    reps = meta_reports(ctx)
    out = [_meta_law(h, r) for h, r in reps.items() if h != "RC"]
    gap, wit = rc_discontinuity(u)
    out += [
        _meta_law("RC", reps["RC"], ("idempotent", "monotone")),
        LawResult("RC is not continuous", gap, 1, wit),
    ]
    h1r1 = hc.commutation_witness("H1", "R1", S)
    out += [
        law("R1 and R2c commute", [hc.commutes("R1", "R2c", S)]),
        law("R3h commutes with R1 and R2c", [hc.commutes("R3h", "R1", S) and hc.commutes("R3h", "R2c", S)]),
        law("Rs order is irrelevant",
            (eq(hc.Rs(P), hc.R3h(hc.R2c(hc.R1(P)))) for P in S)),
        LawResult("H1 and R1 do not commute", h1r1 is not None, len(S),
                  "" if h1r1 is not None else "no witness found"),
        law("a condition commutes with itself", [hc.commutes("RD3", "RD3", S)]),
        law("R1-R2c trace contribution", (eq(hc.R1(hc.R2c(P)), _trcontr(P)) for P in S)),
        law("RD3 subsumes RD2",
            (eq(hc.RD2(hc.RD3(P)), hc.RD3(P)) and hc.RD3(hc.RD2(P)) == hc.RD3(P) for P in S)),
        law("H as a design", (eq(hc.H(P), _h_design(P)) for P in DS)),
        law("N as a design", (eq(hc.N(D), _n_design(D)) for D in (hc.H(P) for P in DS))),
        law("H2 characterisation", (hc.is_healthy("H2", P) == _h2_char(P) for P in DS)),
        law("RC1 agrees with RC2 on reactive relations",
            (hc.is_healthy("RC1", P) == hc.is_healthy("RC2", P)
             for P in [hc.RR(X) for X in S] + [hc.RC(X) for X in S])),
        law("R1 is not satisfied by true", [not hc.is_healthy("R1", m.bottom(u))]),
        law("RR of false is false", [eq(hc.RR(m.top(u)), m.top(u))]),
        law("RR of true is true_r", [eq(hc.RR(m.bottom(u)), hc.true_r(u))]),
        law("SRD lattice top is Miracle", [eq(hc.theory_lattice("SRD", u).top, c.expand(c.miracle(u)))]),
        law("SRD lattice bottom is Chaos", [eq(hc.theory_lattice("SRD", u).bottom, c.expand(c.chaos(u)))]),
        law("RR lattice bottom is R1(true)", [eq(hc.theory_lattice("RR", u).bottom, hc.true_r(u))]),
        law("state condition is RC1",
            (hc.is_healthy("RC1", rr.to_full(rr.state_cond(u, smp.state_mask(u, g)))) for _ in range(5))),
        law("theory fixed point", _theory_mu_cases(ctx)),
    ]
    return out


def _trcontr(P: Rel) -> Rel:
    """``∃ t • P[ε, t / tr, tr'] ∧ tr' = tr ⌢ t``"""
    u = P.universe
    A = np.moveaxis(P.data, (2, 7), (0, 1))[0]  # (tt, ...) at tr = ε
    mi = np.where(u.le, u.minus, 0)
    out = np.where(u.le.reshape(u.le.shape + (1,) * (A.ndim - 1)), A[mi], False)
    return Rel(u, FULL, np.moveaxis(out, (0, 1), (2, 7)))


def _h_design(P: Rel) -> Rel:
    u = P.universe
    pre = cyl(u, DESIGN, ("st", "st'"), ~P.data[1, :, 0, :])
    post = cyl(u, DESIGN, ("st", "st'"), P.data[1, :, 1, :])
    return ds.design(u, pre, post)


def _n_design(D: Rel) -> Rel:
    """``¬(¬pre ⨾ true) ⊢ post``: the precondition becomes a condition."""
    u = D.universe
    p = ds.preD(D).data[0, :, 0, :]
    return ds.design(u, p.all(axis=1), ds.post_table(D))


def _h2_char(P: Rel) -> bool:
    return bool(np.all(~P.data[:, :, 0, :] | P.data[:, :, 1, :]))


def _theory_mu_cases(ctx: Ctx):
    u = smp.default_universe()
    g = ctx.rng(5)
    for _ in range(3):
        A, B = c.expand(smp.contract(u, g)), c.expand(smp.productive(u, g))
        Fn = lambda X, A=A, B=B: A | m.seq_compose(B, X)
        # iterate inside the theory from its bottom element
        X = hc.SRD(m.bottom(u))
        while (Y := Fn(X)) != X:
            X = Y
        yield eq(X, hc.theory_mu("SRD", Fn, u))


# -- reactive relations and weakest preconditions ------------------------------------


def suite_wp(ctx: Ctx) -> list[LawResult]:
    tiny = Universe([("a", ())], [], 1)
    shape = [tiny.dim(v) for v in RR_VARS]
    allr = [RRRel(tiny, RR_VARS, np.array(bits, dtype=bool).reshape(shape))
            for bits in itertools.product((False, True), repeat=int(np.prod(shape)))]
    trips = list(itertools.product(allr, allr, allr))
    n_, a_, o_ = rr.neg_r, rr.conj_r, rr.disj_r
    out = [
        law("commutativity", (a_(P, Q) == a_(Q, P) and o_(P, Q) == o_(Q, P) for P, Q, _ in trips)),
        law("associativity", (a_(a_(P, Q), R) == a_(P, a_(Q, R)) and o_(o_(P, Q), R) == o_(P, o_(Q, R))
                              for P, Q, R in trips)),
        law("distributivity", (a_(P, o_(Q, R)) == o_(a_(P, Q), a_(P, R)) for P, Q, R in trips)),
        law("De Morgan", (n_(a_(P, Q)) == o_(n_(P), n_(Q)) for P, Q, _ in trips)),
        law("complement", (o_(P, n_(P)) == rr.true_r(tiny) and a_(P, n_(P)).is_false for P in allr)),
        law("double negation", (n_(n_(P)) == P for P in allr)),
        law("false implies anything", (rr.implies_r(rr.false_r(tiny), P) == rr.true_r(tiny) for P in allr)),
        law("negated true is false", [rr.neg_r(rr.true_r(tiny)).is_false]),
    ]
    u = smp.default_universe()
    g = ctx.rng(6)
    N = ctx.samples
    Ps = [smp.rr(u, g, RR_VARS, 0.3, 1) for _ in range(N)]
    Qs = [smp.rr(u, g, RR_VARS, 0.3, 1) for _ in range(N)]
    Rs = [smp.rc(u, g) for _ in range(N)]
    R2 = [smp.rc(u, g) for _ in range(N)]
    bs = [smp.state_mask(u, g) for _ in range(N)]
    sig = [smp.sigma(u, g) for _ in range(N)]
    W = rr.wpR
    data = list(zip(Ps, Qs, Rs, R2, bs, sig))
    out += [
        law("rr_seq agrees with relational composition",
            (rr.from_full(m.seq_compose(rr.to_full(P), rr.to_full(Q))) == rr.rr_seq(P, Q) for P, Q, *_ in data)),
        law("round trip through full relations", (rr.from_full(rr.to_full(P)) == P for P in Ps)),
        law("true_r expands to RR(true)", [rr.to_full(rr.true_r(u)) == hc.RR(m.bottom(u))]),
        law("rr_seq identity", (rr.rr_seq(rr.II_r(u), P) == P for P in Ps)),
        law("rr_seq annihilation", (rr.rr_seq(P, rr.false_r(u)).is_false for P in Ps)),
        law("wp literal formula",
            (W(P, R) == rr.neg_r(rr.rr_seq(P, rr.neg_r(R), count=False)) for P, _, R, *_ in data)),
        law("wp agrees with the relational formula",
            (W(P, R) == rr.from_full(hc.neg_r(m.seq_compose(rr.to_full(P), hc.neg_r(rr.to_full(R)))))
             for P, _, R, *_ in data[:20])),
        law("P wp true_r = true_r", (W(P, rr.true_r(u, COND)) == rr.true_r(u, COND) for P in Ps)),
        law("wp distributes over conjunction",
            (W(P, rr.conj_r(R, S)) == rr.conj_r(W(P, R), W(P, S)) for P, _, R, S, *_ in data)),
        law("wp of a conditional",
            (W(rr.disj_r(rr.conj_r(rr.state_cond(u, b), P), rr.conj_r(rr.state_cond(u, ~b), Q)), R)
             == rr.disj_r(rr.conj_r(rr.state_cond(u, b), W(P, R)), rr.conj_r(rr.state_cond(u, ~b), W(Q, R)))
             for P, Q, R, _, b, _ in data)),
        law("wp of a composition", (W(rr.rr_seq(P, Q, count=False), R) == W(P, W(Q, R)) for P, Q, R, *_ in data)),
        law("II_r wp R = R", (W(rr.II_r(u), R) == R for R in Rs)),
        law("assignment wp is substitution", (W(rr.assigns_r(u, s), R) == rr.subst_state(s, R) for R, s in zip(Rs, sig))),
        law("false wp R = true_r", (W(rr.false_r(u), R) == rr.true_r(u, COND) for R in Rs)),
        law("wp of a choice", (W(rr.disj_r(P, Q), R) == rr.conj_r(W(P, R), W(Q, R)) for P, Q, R, *_ in data)),
        law("wp of an indexed choice",
            (W(rr.disj_all(Ps[i:i + 4]), R) == rr.conj_all([W(P, R) for P in Ps[i:i + 4]])
             for i, R in enumerate(Rs[:-4]))),
        law("wp yields a reactive condition", (rr.is_rc(W(P, R)) for P, _, R, *_ in data)),
        law("RC1 and RC2 checks agree",
            (rr.is_rc(X) == rr.is_rc1(X) for X in Rs + [smp.rr(u, g, COND, 0.7) for _ in range(N)])),
        law("state condition is a reactive condition", (rr.is_rc(rr.state_cond(u, b)) for b in bs)),
        law("constrained prefix is a reactive condition",
            [rr.is_rc(rr.neg_r(rr.tt_prefix(u, ["a"]))) and rr.is_rc(rr.neg_r(rr.tt_prefix(u, ["a", "b"])))]),
        law("a trace without its prefix is not a condition", [not rr.is_rc(rr.tt_eq(u, ["a"]))]),
    ]
    return out


# -- contract laws -------------------------------------------------------------------------


def _contract_samples(ctx: Ctx, salt: int, n: int | None = None):
    u = smp.default_universe()
    g = ctx.rng(salt)
    return u, g, [smp.contract(u, g) for _ in range(n or ctx.samples)]


def _no_post(C: c.Contract) -> c.Contract:
    return c.Contract(C.pre, C.peri, False)


def golden_rd(u: Universe) -> list[LawResult]:
    """Hand-written instances of RD1-RD10 with concrete contracts."""
    a, b = u.event_id("a"), u.event_id("b")
    A = c.prefix(u, "a")
    STOP = c.stop(u)
    # a → Miracle: waits for a, and the final observation is infeasible
    peri = np.zeros((u.S, u.T, u.R), dtype=bool)
    peri[:, 0, :] = ~c.refusal_table(u)[a]
    a_miracle = c.Contract(True, peri, False, universe=u)
    # a → Chaos: diverges as soon as a has happened
    pre = ~u.le[u.trace_id(["a"])]
    a_chaos = c.Contract(np.broadcast_to(pre, (u.S, u.T)), peri, False, universe=u)
    two = np.zeros((u.S, u.T, u.S), dtype=bool)
    two[:, u.trace_id(["a", "b"]), :] = np.eye(u.S, dtype=bool)
    peri_ab = peri.copy()
    peri_ab[:, u.trace_id(["a"]), :] = ~c.refusal_table(u)[b]
    ab = c.Contract(True, peri_ab, two, universe=u)
    return [
        law("RD1 golden: Miracle ⊓ a→Skip", [ceq(c.intchoice(c.miracle(u), A), A)]),
        law("RD2 golden: Chaos ⊓ a→Skip", [ceq(c.intchoice(c.chaos(u), A), c.chaos(u))]),
        law("RD3 golden: Skip ; a→Skip", [ceq(c.seq(c.skip(u), A), A)]),
        law("RD4 golden: a→Skip ; Skip", [ceq(c.seq(A, c.skip(u)), A)]),
        law("RD5 golden: Stop ; a→Skip", [ceq(c.seq(STOP, A), STOP)]),
        law("RD6 golden: Miracle ; Stop", [ceq(c.seq(c.miracle(u), STOP), c.miracle(u))]),
        law("RD7 golden: Chaos ; a→Skip", [ceq(c.seq(c.chaos(u), A), c.chaos(u))]),
        law("RD8 golden: false precondition", [ceq(c.Contract(False, peri, two, universe=u), c.chaos(u))]),
        law("RD9 golden: a→Skip ; Miracle", [ceq(c.seq(A, c.miracle(u)), a_miracle)]),
        law("RD10 golden: a→Skip ; Chaos", [ceq(c.seq(A, c.chaos(u)), a_chaos)]),
        law("composition golden: a→Skip ; b→Skip", [ceq(c.seq(A, c.prefix(u, "b")), ab)]),
    ]


def oracle_results(ctx: Ctx, n: int | None = None, with_par: bool = True) -> list[LawResult]:
    """Triple-level operators against composition of the expansions."""
    u, g, Cs = _contract_samples(ctx, 7, 2 * (n or ctx.samples))
    pairs = list(zip(Cs[::2], Cs[1::2]))
    E = {id(C): c.expand(C) for C in Cs}
    ex = lambda C: E[id(C)]
    bs = [smp.state_mask(u, g) for _ in pairs]
    truncation.reset()
    ops = [
        ("seq", lambda A, B, b: (c.seq(A, B), m.seq_compose(ex(A), ex(B)))),
        ("intchoice", lambda A, B, b: (c.intchoice(A, B), ex(A) | ex(B))),
        ("conj", lambda A, B, b: (c.conj(A, B), ex(A) & ex(B))),
        ("cond", lambda A, B, b: (c.cond(A, b, B), m.cond(ex(A), cyl(u, FULL, ("st",), b), ex(B)))),
        ("power 2", lambda A, B, b: (c.power(A, 2), m.seq_compose(ex(A), ex(A)))),
    ]
    if with_par:
        M = par.interleave_merge(u)
        ops.append(("rd_par interleaving", lambda A, B, b: (par.rd_par(A, B, M), par.par_by_merge(ex(A), ex(B), M))))
    out = []
    for name, op in ops:
        def cases(op=op):
            for (A, B), b in zip(pairs, bs):
                tri, mono = op(A, B, b)
                yield ceq(tri, c.contract_of(mono))
        out.append(law(f"{name} matches the monolithic semantics", cases()))
    out.append(LawResult("no truncation during oracle checks", truncation.count == 0, len(pairs),
                         f"{truncation.count} truncated compositions"))
    return out


def extraction_results(ctx: Ctx, n: int | None = None) -> list[LawResult]:
    u, g, Cs = _contract_samples(ctx, 8, n)
    trip = [(smp.rc(u, g), smp.rr(u, g, PERI, 0.4), smp.rr(u, g, POST, 0.4)) for _ in Cs]
    return [
        law("round trip through the expansion", (ceq(c.contract_of(c.expand(C)), C) for C in Cs)),
        law("expansion is NSRD", (hc.NSRD(c.expand(C)) == c.expand(C) for C in Cs)),
        law("precondition extraction", (c.pre_r(c.rdes(*t)) == t[0] for t in trip)),
        law("pericondition extraction", (c.peri_r(c.rdes(*t)) == rr.implies_r(t[0], t[1]) for t in trip)),
        law("postcondition extraction", (c.post_r(c.rdes(*t)) == rr.implies_r(t[0], t[2]) for t in trip)),
    ]


def suite_rdlaws(ctx: Ctx) -> list[LawResult]:
    u, g, Cs = _contract_samples(ctx, 9)
    Ds = Cs[1:] + Cs[:1]
    MIR, CH, SK = c.miracle(u), c.chaos(u), c.skip_srd(u)
    out = [
        law("RD1 Miracle ⊓ C = C", (ceq(c.intchoice(MIR, C), C) for C in Cs)),
        law("RD2 Chaos ⊓ C = Chaos", (ceq(c.intchoice(CH, C), CH) for C in Cs)),
        law("RD3 Skip ; C = C", (ceq(c.seq(SK, C), C) for C in Cs)),
        law("RD4 C ; Skip = C", (ceq(c.seq(C, SK), C) for C in Cs)),
        law("RD5 non-terminating contracts are left zeros",
            (ceq(c.seq(_no_post(C), D), _no_post(C)) for C, D in zip(Cs, Ds))),
        law("RD6 Miracle ; C = Miracle", (ceq(c.seq(MIR, C), MIR) for C in Cs)),
        law("RD7 Chaos ; C = Chaos", (ceq(c.seq(CH, C), CH) for C in Cs)),
        law("RD8 false precondition gives Chaos", (ceq(c.Contract(False, C.peri, C.post), CH) for C in Cs)),
        law("RD9 C ; Miracle drops the postcondition", (ceq(c.seq(C, MIR), _no_post(C)) for C in Cs)),
        law("RD10 C ; Chaos",
            (ceq(c.seq(C, CH), c.Contract(rr.conj_r(C.pre, rr.wpR(C.post, rr.false_r(u, COND))), C.peri, False))
             for C in Cs)),
    ]
    out += golden_rd(u)
    out += [
        law("refinement agrees with the expansion",
            (c.refines(C, D).holds == m.refines(c.expand(C), c.expand(D)).holds for C, D in zip(Cs, Ds))),
        law("refinement of a weakened contract",
            (c.refines(C, c.intchoice(C, MIR)).holds and c.refines(CH, C).holds and c.refines(C, MIR).holds
             for C in Cs)),
        law("equivalence on un-normalised parts", _rdesequiv_cases(u, g, len(Cs))),
        law("Skip after an SRD relation", _srdskip_cases(u, g, len(Cs))),
        law("conjunction matches the expansion", (ceq(c.conj(C, D), c.contract_of(c.expand(C) & c.expand(D)))
                                                  for C, D in zip(Cs[:20], Ds))),
        law("ExtChoice singleton", (ceq(c.extchoice([C]), C) for C in Cs)),
        law("ExtChoice commutative", (ceq(c.extchoice([C, D]), c.extchoice([D, C])) for C, D in zip(Cs, Ds))),
        law("ExtChoice associative",
            (ceq(c.extchoice([C, c.extchoice([D, E])]), c.extchoice([c.extchoice([C, D]), E]))
             for C, D, E in zip(Cs, Ds, Cs[2:] + Cs[:2]))),
    ]
    out += extraction_results(ctx)
    out += oracle_results(ctx, with_par=False)
    return out


def _rdesequiv_cases(u, g, n):
    for _ in range(n):
        P1, P2, P3 = smp.rc(u, g), smp.rr(u, g, PERI), smp.rr(u, g, POST)
        # change the parts only outside the precondition, or anywhere
        if g.random() < 0.5:
            Q2 = rr.disj_r(P2, rr.conj_r(rr.neg_r(P1), smp.rr(u, g, PERI)))
            Q3 = rr.conj_r(P3, rr.disj_r(P1, smp.rr(u, g, POST)))
        else:
            Q2, Q3 = smp.rr(u, g, PERI), P3
        yield (c.equiv_triples(P1, P2, P3, P1, Q2, Q3) == (c.rdes(P1, P2, P3) == c.rdes(P1, Q2, Q3)),
               "equivalence disagrees with the expansion")


def _srdskip_cases(u, g, n):
    II = hc.II_srd(u)
    for _ in range(n):
        P1 = smp.rr(u, g, COND, 0.8)
        P2 = smp.rr(u, g, RR_VARS, 0.3, 1)
        P3 = smp.rr(u, g, POST, 0.3, 1)
        lhs = m.seq_compose(c.rdes(P1, P2, P3), II)
        pre = rr.neg_r(rr.rr_seq(rr.neg_r(P1), rr.true_r(u), count=False))
        rhs = c.rdes(rr.narrow(rr.hide(pre, ("st'", "ref'")), COND), rr.narrow(rr.hide(P2, ("st'",)), PERI), P3)
        yield eq(lhs, rhs)


def golden_ra(u: Universe) -> list[LawResult]:
    """Assignment laws on a channel whose value depends on the state."""
    cu = Universe([("c", (IntRange(0, 1),))], [("x", IntRange(0, 1))], 2)
    x1 = cu.state_fn(lambda env: {"x": 1})
    inc = cu.state_fn(lambda env: {"x": 1 - env["x"]})
    cx = np.array([cu.event_id(f"c.{cu.state_env(s)['x']}") for s in range(cu.S)])
    c1 = np.full(cu.S, cu.event_id("c.1"))
    return [
        law("RA1 golden", [ceq(c.assignsR(u, np.arange(u.S)), c.skip_srd(u))]),
        law("RA2 golden: x := 1 ; c.x → Skip",
            [ceq(c.seq(c.assignsR(cu, x1), c.prefix(cu, cx)), c.seq(c.prefix(cu, c1), c.assignsR(cu, x1)))]),
        law("RA3 golden: x := 1-x twice", [ceq(c.seq(c.assignsR(cu, inc), c.assignsR(cu, inc)), c.skip_srd(cu))]),
        law("RA4 golden", [ceq(c.seq(c.assignsR(cu, x1), c.miracle(cu)), c.miracle(cu))]),
        law("RA5 golden", [ceq(c.seq(c.assignsR(cu, x1), c.chaos(cu)), c.chaos(cu))]),
        law("assignment through a prefix",
            (ceq(c.seq(c.assignsR(cu, s), c.seq(c.prefix(cu, cx), C)),
                 c.seq(c.prefix(cu, cx[s]), c.seq(c.assignsR(cu, s), C)))
             for s in (x1, inc, np.arange(cu.S)) for C in (c.skip(cu), c.stop(cu), c.prefix(cu, "c.0")))),
    ]


def suite_ralaws(ctx: Ctx) -> list[LawResult]:
    u, g, Cs = _contract_samples(ctx, 10)
    sig = [smp.sigma(u, g) for _ in Cs]
    rho = [smp.sigma(u, g) for _ in Cs]
    A = lambda s: c.assignsR(u, s)
    out = [
        law("RA1 identity assignment is Skip", [ceq(A(np.arange(u.S)), c.skip_srd(u))]),
        law("RA2 assignment before a contract substitutes",
            (ceq(c.seq(A(s), C), c.subst_contract(s, C)) for s, C in zip(sig, Cs))),
        law("RA3 assignments compose", (ceq(c.seq(A(s), A(r)), A(r[s])) for s, r in zip(sig, rho))),
        law("RA4 Miracle is a right zero", (ceq(c.seq(A(s), c.miracle(u)), c.miracle(u)) for s in sig)),
        law("RA5 Chaos is a right zero", (ceq(c.seq(A(s), c.chaos(u)), c.chaos(u)) for s in sig)),
        law("assignment matches the expansion",
            (c.expand(A(s)) == _full_assign(u, s) for s in sig[:10])),
    ]
    return out + golden_ra(u)


def _full_assign(u, s):
    """``R(true ⊢ false ⋄ tr' = tr ∧ st' = σ(st))`` built directly."""
    P1 = rr.true_r(u, COND)
    return c.rdes(P1, rr.false_r(u, PERI), rr.assigns_r(u, s))


# -- parallel composition ------------------------------------------------------------------


def interleaving_example(u: Universe | None = None):
    """``(a → Skip) ||| (b → Stop)`` and its expected external-choice form."""
    u = u or Universe([("a", ()), ("b", ())], [], 3)
    A, B = c.prefix(u, "a"), c.prefix(u, "b")
    lhs = par.interleave(A, c.seq(B, c.stop(u)))
    rhs = c.extchoice([c.seq(A, c.seq(B, c.stop(u))), c.seq(B, c.seq(A, c.stop(u)))])
    return lhs, rhs


def wpp_results(ctx: Ctx, n: int | None = None) -> list[LawResult]:
    u = smp.default_universe()
    g = ctx.rng(11)
    M = par.interleave_merge(u)
    N = n or ctx.samples
    Ps = [smp.rr(u, g, RR_VARS, 0.3, 1) for _ in range(N)]
    Rs = [smp.rc(u, g) for _ in range(N)]
    TR, FR = rr.true_r(u, COND), rr.false_r(u)
    return [
        law("false wpp Q = true", (par.wpp(FR, M, R) == TR for R in Rs)),
        law("P wpp true = true", (par.wpp(P, M, TR) == TR for P in Ps)),
        law("wpp of a choice", (par.wpp(rr.disj_r(P, Q), M, R) == rr.conj_r(par.wpp(P, M, R), par.wpp(Q, M, R))
                                for P, Q, R in zip(Ps, Ps[1:] + Ps[:1], Rs))),
        law("wpp yields a reactive condition", (rr.is_rc(par.wpp(P, M, R)) for P, R in zip(Ps, Rs))),
    ]


def suite_parallel(ctx: Ctx) -> list[LawResult]:
    u, g, Cs = _contract_samples(ctx, 12)
    M = par.interleave_merge(u)
    Ds = Cs[1:] + Cs[:1]
    lhs, rhs = interleaving_example()
    eu = lhs.universe
    eM = par.interleave_merge(eu)
    A = c.prefix(eu, "a")
    mono = par.par_by_merge(c.expand(A), c.expand(c.seq(c.prefix(eu, "b"), c.stop(eu))), eM)
    out = [
        law("interleaving merge is symmetric", [par.is_symmetric(M)]),
        law("interleaving merge of single events",
            [_merge_traces(u, M, ["a"], ["b"]) == {("a", "b"), ("b", "a")}]),
        law("Miracle annihilates", (ceq(par.rd_par(c.miracle(u), C, M), c.miracle(u)) for C in Cs)),
        law("Miracle annihilates (monolithic)",
            (eq(par.par_by_merge(c.expand(c.miracle(u)), c.expand(C), M), c.expand(c.miracle(u))) for C in Cs[:10])),
        law("parallel is symmetric", (ceq(par.rd_par(C, D, M), par.rd_par(D, C, M)) for C, D in zip(Cs, Ds))),
        law("interleaving calculation", [ceq(lhs, rhs)]),
        law("interleaving calculation (monolithic)", [ceq(c.contract_of(mono), rhs)]),
        law("parallel result is NSRD",
            (hc.NSRD(X) == X for X in (par.par_by_merge(c.expand(C), c.expand(D), M) for C, D in zip(Cs[:10], Ds)))),
        law("parallel keeps R1 and R2c", _parreaclos_cases(u, g, min(10, len(Cs)), M)),
    ]
    out += wpp_results(ctx)
    out += oracle_results(ctx, n=min(ctx.samples, 50))[-2:]
    return out


def _merge_traces(u, M, s, t):
    tid = lambda x: u.trace_id(x)
    row = M.dense()[0, tid(s), 0, 0, tid(t), 0, 0, :, 0, 0]
    return {tuple(u.event_names[e] for e in u.traces[i]) for i in np.nonzero(row)[0]}


def _parreaclos_cases(u, g, n, M):
    # every initial observation keeps an outcome with an empty contribution,
    # otherwise the bound alone can remove all outcomes after a long trace
    stay = cyl(u, FULL, ("tr", "tr'"), np.eye(u.T, dtype=bool))
    for _ in range(n):
        P, Q = (hc.R1(hc.R2c(smp.sparse_rel(u, g) | stay)) for _ in range(2))
        X = par.par_by_merge(P, Q, M)
        yield eq(hc.R1(hc.R2c(X)), X)


# -- lifting -------------------------------------------------------------------------------


def suite_lifting(ctx: Ctx) -> list[LawResult]:
    u = smp.design_universe()
    g = ctx.rng(13)
    Ds = [smp.normal_design(u, g) for _ in range(ctx.samples)]
    Es = Ds[1:] + Ds[:1]
    bs = [smp.state_mask(u, g) for _ in Ds]
    sig = [smp.sigma(u, g) for _ in Ds]
    L = ds.lift_RD
    out = [
        law("lifting top gives Miracle", [ceq(L(ds.top_D(u)), c.miracle(u))]),
        law("lifting bottom gives Chaos", [ceq(L(ds.bottom_D(u)), c.chaos(u))]),
        law("lifting skip gives Skip", [ceq(L(ds.II_D(u)), c.skip_srd(u))]),
        law("lifting distributes over choice", (ceq(L(ds.intchoice_D(D, E)), c.intchoice(L(D), L(E))) for D, E in zip(Ds, Es))),
        law("lifting distributes over conditional",
            (ceq(L(ds.cond_D(D, b, E)), c.cond(L(D), b, L(E))) for D, E, b in zip(Ds, Es, bs))),
        law("lifting distributes over composition", (ceq(L(ds.seq_D(D, E)), c.seq(L(D), L(E))) for D, E in zip(Ds, Es))),
        law("lifting assignment", (ceq(L(ds.assign_D(u, s)), c.assignsR(u, s)) for s in sig)),
        law("dropping undoes lifting", (eq(ds.drop_DR(L(D)), D) for D in Ds)),
        law("lifting is monotone",
            (c.refines(L(D), L(D & E)).holds for D, E in zip(Ds, Es))),
        law("lifting matches the relational definition", (eq(c.expand(L(D)), _lift_full(D)) for D in Ds[:10])),
        law("design refinement agrees with relational refinement",
            (ds.design_refines(D, E).holds == m.refines(D, E).holds for D, E in zip(Ds, Es))),
        law("design extraction", (eq(ds.design(u, ds.preD(D), ds.postD(D)), D) for D in Ds)),
        law("H3 designs have condition preconditions",
            (ds.preD(D) == m.forall(ds.preD(D), ["st'"]) for D in Ds)),
        law("design with false precondition is abort", [eq(ds.design(u, False, True), ds.bottom_D(u))]),
        law("Hoare triple for an assignment",
            [ds.hoare(u, True, ds.assign_D(u, u.state_fn(lambda e: {"x": 1})),
                      u.state_pred(lambda e: e["x"] == 1)).holds]),
        law("Hoare triple with false precondition", (ds.hoare(u, False, D, np.zeros(u.S, bool)).holds for D in Ds)),
        law("specification statement frames the rest",
            [m.refines(ds.spec_stmt(u, ["x"], True, u.state_pred(lambda e: e["x"] == 1)),
                       ds.design(u, True, ds.frame(u, ["x"]) & u.state_pred(lambda e: e["x"] == 1)[None, :])).holds
             and not ds.frame(u, ["x"])[u.state_id(x=0, y=False), u.state_id(x=0, y=True)]]),
    ]
    return out


def _lift_full(D: Rel) -> Rel:
    """``Rs(pre ⊢ false ⋄ tt = ⟨⟩ ∧ post)`` built from the full relation."""
    u = D.universe
    pre = ds.pre_cond(D)
    post = np.zeros((u.S, u.T, u.S), dtype=bool)
    post[:, 0, :] = ds.post_table(D)
    return c.rdes(rr.state_cond(u, pre), rr.false_r(u, PERI), RRRel(u, POST, post))


# -- recursion -----------------------------------------------------------------------------


def suite_recursion(ctx: Ctx) -> list[LawResult]:
    u = smp.default_universe()
    g = ctx.rng(14)
    A = c.prefix(u, "a")
    Ps = [smp.productive(u, g) for _ in range(min(ctx.samples, 8))]
    samples = [smp.contract(u, g) for _ in range(4)]
    out = [
        law("tail recursion matches the weakest fixed point",
            (ceq(c.tail_rec(C), c.contract_of(m.mu(c.body_of(C), u))) for C in [A] + Ps)),
        law("weakest and strongest fixed points agree",
            (eq(m.mu(c.body_of(C), u), m.nu(c.body_of(C), u)) for C in [A] + Ps[:3])),
        law("tail recursion never terminates", (c.tail_rec(C).post.is_false for C in [A] + Ps)),
        law("a prefix is productive", [c.is_productive(A)]),
        law("an assignment is not productive", [not c.is_productive(c.assignsR(u, smp.sigma(u, g)))]),
        law("Chaos is productive", [c.is_productive(c.chaos(u))]),
        law("productive body is guarded",
            [c.gv_guard_check(lambda X: m.seq_compose(c.expand(A), hc.SRD(X)), samples, 2).holds]),
        law("identity is not guarded", [not c.gv_guard_check(lambda X: X, samples, 2).holds]),
        law("constant body is guarded", [c.gv_guard_check(lambda X: c.expand(A), samples, 2).holds]),
        law("power 1 is the contract", (ceq(c.power(C, 1), C) for C in samples + Ps)),
        law("power 2 is self composition", (ceq(c.power(C, 2), c.seq(C, C)) for C in samples + Ps)),
        law("power 3 is threefold composition",
            (ceq(c.power(C, 3), c.seq(C, c.seq(C, C))) for C in samples + Ps)),
        law("power of Skip", (ceq(c.power(c.skip_srd(u), k), c.skip_srd(u)) for k in (1, 2, 3))),
        law("non-productive recursion is rejected", [_rejects_unproductive(u)]),
    ]
    return out


def _rejects_unproductive(u):
    try:
        c.tail_rec(c.skip_srd(u))
    except c.NotProductive:
        return True
    return False


SUITES: dict[str, Callable[[Ctx], list[LawResult]]] = {
    "trace": suite_trace,
    "relational": suite_relational,
    "healthiness": suite_healthiness,
    "wp": suite_wp,
    "rdlaws": suite_rdlaws,
    "ralaws": suite_ralaws,
    "parallel": suite_parallel,
    "lifting": suite_lifting,
    "recursion": suite_recursion,
}


def run_suite(name: str, seed: int = 0, samples: int = 50) -> list[SuiteReport]:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}")
    reports = []
    for n in names:
        t0 = time.perf_counter()
        res = SUITES[n](Ctx(seed, samples))
        reports.append(SuiteReport(n, res, time.perf_counter() - t0))
    return reports
