"""Acceptance criteria 1-12, one printed verdict line each.

Run standalone with ``python3 tests/test_acceptance.py`` or through
pytest, where the verdict lines are printed as the tests run.
"""

from __future__ import annotations

import re
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import (divergent_triple, monolithic, pay_triple, prefix_triple, skip_triple,
                     stop_triple)
from reactive_contracts import contracts as c
from reactive_contracts import healthiness as hc
from reactive_contracts import laws
from reactive_contracts import model as m
from reactive_contracts import parallel as par
from reactive_contracts import sampling as smp
from reactive_contracts.circus import Model, cdf, corpus, load, mondex_spec, mondex_text, parse_proc
from reactive_contracts.model import Universe, truncation

SEED = 0


class Verdict:
    def __init__(self, n: int, title: str):
        self.n, self.title = n, title
        self.failures: list[str] = []
        self.t0 = time.perf_counter()

    def check(self, ok: bool, what: str):
        if not ok:
            self.failures.append(what)

    def suite(self, reports, names=None):
        for rep in reports:
            for r in rep.results:
                if names is None or r.name in names:
                    self.check(r.holds, f"{rep.name}: {r.name} {r.witness}".strip())

    def within(self, seconds: float):
        el = time.perf_counter() - self.t0
        self.check(el < seconds, f"took {el:.1f}s, budget {seconds}s")

    def finish(self):
        el = time.perf_counter() - self.t0
        status = "PASS" if not self.failures else "FAIL"
        line = f"[{status}] criterion {self.n:2d}: {self.title} ({el:.1f}s)"
        for f in self.failures[:5]:
            line += f"\n           {f[:300]}"
        return line


@pytest.fixture
def verdict(capsys, request):
    holder = {}

    def make(n, title):
        holder["v"] = Verdict(n, title)
        return holder["v"]

    yield make
    v = holder.get("v")
    if v is not None:
        with capsys.disabled():
            print("\n" + v.finish())


def _done(v: Verdict):
    assert not v.failures, "; ".join(v.failures[:5])


# 1 ---------------------------------------------------------------------------------


def crit_trace(v: Verdict):
    v.suite(laws.run_suite("trace", SEED))
    v.within(5)


def test_c01_trace_algebra(verdict):
    v = verdict(1, "trace algebra axioms and measure, exhaustive to length 3")
    crit_trace(v)
    _done(v)


# 2 ---------------------------------------------------------------------------------


def crit_relational(v: Verdict):
    v.suite(laws.run_suite("relational", SEED, 100))
    v.within(30)


def test_c02_relational_calculus(verdict):
    v = verdict(2, "relational calculus laws on 100 random relations")
    crit_relational(v)
    _done(v)


# 3 ---------------------------------------------------------------------------------


def crit_healthiness(v: Verdict):
    ctx = laws.Ctx(SEED, 50)
    for h, r in laws.meta_reports(ctx).items():
        for prop in ("idempotent", "monotone", "continuous"):
            wit = "; ".join(w for k, w in r.failures if k == prop)
            v.check(getattr(r, prop), f"{h} not {prop}: {wit}")
    S = laws._rel_samples(ctx, smp.default_universe(), 3)
    v.check(hc.commutes("R1", "R2c", S), "R1 and R2c do not commute")
    v.check(hc.commutation_witness("H1", "R1", S) is not None, "no witness that H1 and R1 differ")
    v.within(60)


def test_c03_healthiness_meta(verdict):
    v = verdict(3, "SRD, NSRD, RR, RC, Rs idempotent, monotone, continuous; commutation")
    crit_healthiness(v)
    _done(v)


# 4 ---------------------------------------------------------------------------------


def crit_extraction(v: Verdict):
    res = laws.extraction_results(laws.Ctx(SEED, 200), 200)
    v.suite([laws.SuiteReport("extraction", res)])
    v.check(all(r.cases == 200 for r in res), "fewer than 200 cases")


def test_c04_extraction_round_trip(verdict):
    v = verdict(4, "contract extraction round trip on 200 contracts")
    crit_extraction(v)
    _done(v)


# 5 ---------------------------------------------------------------------------------


def crit_law_suites(v: Verdict):
    reps = laws.run_suite("rdlaws", SEED, 200) + laws.run_suite("ralaws", SEED, 200)
    names = [f"RD{i}" for i in range(1, 11)] + [f"RA{i}" for i in range(1, 6)]
    picked = [r for rep in reps for r in rep.results if r.name.split()[0] in names]
    v.suite(reps, {r.name for r in picked})
    for n in names:
        v.check(any(r.name.startswith(n + " ") and "golden" not in r.name for r in picked), f"{n} missing")
        v.check(any(r.name.startswith(n + " golden") for r in picked), f"{n} golden instance missing")
    v.within(120)


def test_c05_rd_ra_laws(verdict):
    v = verdict(5, "RD1-RD10 and RA1-RA5 on 200 tuples plus golden instances")
    crit_law_suites(v)
    _done(v)


# 6 ---------------------------------------------------------------------------------


def crit_oracle(v: Verdict):
    res = laws.oracle_results(laws.Ctx(SEED, 200), 200, with_par=True)
    v.suite([laws.SuiteReport("oracle", res)])
    v.check(any("rd_par" in r.name for r in res), "parallel oracle missing")


def test_c06_triple_vs_monolithic(verdict):
    v = verdict(6, "triple-level operators equal the monolithic semantics on 200 pairs")
    crit_oracle(v)
    _done(v)


# 7 ---------------------------------------------------------------------------------


def crit_worked_examples(v: Verdict):
    M = load(corpus("examples"))
    u = M.universe
    v.check(M.lookup("Prefix") == prefix_triple(u, "a"), "prefix triple")
    v.check(M.lookup("Term") == skip_triple(u), "Skip triple")
    v.check(M.lookup("Dead") == stop_triple(u), "Stop triple")
    D = M.lookup("Divergent")
    v.check(D == divergent_triple(u), "divergent process triple")
    ta = u.trace_id(["a"])
    v.check(np.array_equal(D._pre, np.broadcast_to(~u.le[ta], (u.S, u.T))), "divergent precondition")
    v.check(M.lookup("DivergentIndex") == c.chaos(u), "divergent indexed assignment")
    # a → Miracle waits for a and has no final observation
    am = M.lookup("AMiracle")
    v.check(am == c.Contract(True, prefix_triple(u, "a")._peri, False, universe=u), "a -> miracle")
    # a → Skip □ Miracle performs a at once, with no waiting observation
    ua = M.lookup("UrgentA")
    v.check(ua == c.Contract(True, False, prefix_triple(u, "a")._post, universe=u), "a -> skip [] miracle")
    v.check(c.equiv(M.lookup("Interleaved"), M.lookup("Sequenced")), "interleaving calculation")
    lhs, rhs = laws.interleaving_example()
    v.check(lhs == rhs, "interleaving calculation at bound 3")


def test_c07_worked_examples(verdict):
    v = verdict(7, "worked examples reproduced as row sets")
    crit_worked_examples(v)
    _done(v)


# 8 ---------------------------------------------------------------------------------


def crit_cdf(v: Verdict):
    M = load(corpus("examples"))
    u = M.universe
    v.check(c.refines(cdf(u), M.lookup("Prefix")).holds, "CDF is not refined by a -> skip")
    r = c.refines(cdf(u), M.lookup("Dead"))
    v.check(not r.holds, "CDF is refined by stop")
    v.check(r.failed() == ["peri"], f"failed obligations {r.failed()}")
    full = u.fmt_ref(u.R - 1)
    v.check(any(f"ref'={full}" in w for w in r.obligations["peri"].counterexamples),
            "no counterexample refusing the whole alphabet")


def test_c08_deadlock_freedom(verdict):
    v = verdict(8, "deadlock freedom: a -> skip refines CDF, stop does not")
    crit_cdf(v)
    _done(v)


# 9 ---------------------------------------------------------------------------------


def crit_recursion(v: Verdict):
    u = Universe([("a", ())], [], 4)
    A = c.prefix(u, "a")
    R = c.tail_rec(A)
    v.check(R.post.is_false, "post is not false")
    v.check(bool(R._pre.all()), "pre is not true_r")
    want = np.zeros((u.S, u.T, u.R), dtype=bool)
    for i in range(4):
        want[:, u.trace_id(["a"] * i), 0] = True  # only the empty refusal omits a
    extra = sorted({u.fmt_trace(t) for _, t, _ in zip(*np.nonzero(R._peri & ~want))})
    missing = sorted({u.fmt_trace(t) for _, t, _ in zip(*np.nonzero(want & ~R._peri))})
    v.check(not extra and not missing, f"peri rows differ: extra at {extra}, missing at {missing}")
    F = c.body_of(A)
    v.check(m.mu(F, u) == m.nu(F, u), "weakest and strongest fixed points differ")
    v.within(60)


def test_c09_recursion(verdict):
    v = verdict(9, "tail recursion of a -> skip at L=4; fixed points agree")
    crit_recursion(v)
    _done(v)


# 10 --------------------------------------------------------------------------------


def crit_parallel(v: Verdict):
    u = smp.default_universe()
    g = np.random.default_rng([SEED, 10])
    M = par.interleave_merge(u)
    for C in [smp.contract(u, g) for _ in range(20)]:
        v.check(par.rd_par(c.miracle(u), C, M) == c.miracle(u), "Miracle does not annihilate")
    res = laws.wpp_results(laws.Ctx(SEED, 50))
    v.suite([laws.SuiteReport("wpp", res)])


def test_c10_parallel(verdict):
    v = verdict(10, "Miracle annihilates parallel; weakest rely laws")
    crit_parallel(v)
    _done(v)


# 11 --------------------------------------------------------------------------------


def crit_lifting(v: Verdict):
    v.suite(laws.run_suite("lifting", SEED, 100))


def test_c11_lifting(verdict):
    v = verdict(11, "lifting homomorphisms and theorems on 100 normal designs")
    crit_lifting(v)
    _done(v)


# 12 --------------------------------------------------------------------------------


def reduced_mondex(bound: int = 2) -> str:
    """The cash-card model with only the events of ``Pay(0,1,1)``."""
    text = mondex_text(2, 2, {1})
    for pat, rep in ((r"channel pay\(.*\)", "channel pay(0..0, 1..1, 1..1)"),
                     (r"channel accept\(.*\)", "channel accept(0..0)"),
                     (r"channel reject\(.*\)", "channel reject(0..0)"),
                     (r"bound \d+", f"bound {bound}")):
        text = re.sub(pat, rep, text)
    return text


def crit_mondex(v: Verdict):
    truncation.reset()
    D = Model(mondex_spec(2, 2, {1}))
    u = D.universe
    v.check(u.bound == 4, "bound is not 4")
    for i, j in ((0, 1), (1, 0), (0, 0), (1, 1)):
        v.check(D.resolve(f"Pay({i},{j},1)") == pay_triple(u, i, j, 1), f"Pay({i},{j},1) calculation")
    for name in ("Conservation", "NoOverdraft", "TransferAcceptance(0,1,1)", "TransferAcceptance(1,0,1)"):
        for i, j in ((0, 1), (1, 0)):
            r = c.refines(D.resolve(name), D.resolve(f"Pay({i},{j},1)"))
            v.check(r.holds, f"{name} not refined by Pay({i},{j},1): {r.failed()}")
    broken = c.refines(D.resolve("Conservation"), D.resolve("PayBroken(0,1,1)"), 1)
    v.check(not broken.holds and broken.failed() == ["post"], "broken Pay does not fail conservation")
    cex = broken.obligations["post"].counterexamples
    v.check(bool(cex), "no counterexample printed")
    if cex:
        print(f"\n  broken Pay counterexample: {cex[0]}")
    D.resolve("System")
    v.check(truncation.count == 0, f"truncation {truncation.count}")
    # monolithic comparison on the events Pay(0,1,1) uses
    R = load(reduced_mondex())
    v.check(c.contract_of(monolithic(R, parse_proc("Pay(0,1,1)"))) == R.resolve("Pay(0,1,1)"),
            "Pay differs from its monolithic denotation")
    v.within(300)


def test_c12_mondex(verdict):
    v = verdict(12, "cash cards: Pay calculation, three specifications, broken variant")
    crit_mondex(v)
    _done(v)


CRITERIA = [
    (1, "trace algebra", crit_trace), (2, "relational calculus", crit_relational),
    (3, "healthiness meta-properties", crit_healthiness), (4, "extraction round trip", crit_extraction),
    (5, "RD and RA laws", crit_law_suites), (6, "triple vs monolithic", crit_oracle),
    (7, "worked examples", crit_worked_examples), (8, "deadlock freedom", crit_cdf),
    (9, "recursion", crit_recursion), (10, "parallel", crit_parallel), (11, "lifting", crit_lifting),
    (12, "cash cards", crit_mondex),
]


if __name__ == "__main__":
    bad = 0
    for n, title, fn in CRITERIA:
        v = Verdict(n, title)
        try:
            fn(v)
        except Exception as e:  # report and keep going
            v.check(False, f"{type(e).__name__}: {e}")
        print(v.finish(), flush=True)
        bad += bool(v.failures)
    sys.exit(1 if bad else 0)
