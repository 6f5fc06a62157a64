import numpy as np
import pytest

from oracles import as_set, brute_seq
from reactive_contracts import laws
from reactive_contracts import model as m
from reactive_contracts import sampling as smp
from reactive_contracts.model import BoolDom, FULL, IntRange, MapDom, Universe


def test_relational_suite_passes():
    (rep,) = laws.run_suite("relational", 1, 30)
    assert rep.ok, rep.failures()


def test_seq_compose_matches_binding_sets():
    u = Universe([("a", ())], [("x", BoolDom())], 1)
    g = np.random.default_rng(3)
    for _ in range(5):
        P, Q = smp.sparse_rel(u, g), smp.sparse_rel(u, g)
        assert as_set(m.seq_compose(P, Q)) == brute_seq(P, Q)


def test_state_encoding_round_trips():
    u = Universe([("c", (IntRange(0, 1),))],
                 [("n", IntRange(-1, 1)), ("b", BoolDom()), ("f", MapDom(IntRange(0, 1), IntRange(0, 1)))], 1)
    assert u.S == 3 * 2 * 9
    for s in range(u.S):
        assert u.state_id(**u.state_env(s)) == s
    assert u.event_id("c.1") == 1
    assert u.fmt_state(u.state_id(n=0, b=True, f={1: 0})) == "(n=0,b=true,f={1:0})"


def test_trace_tables():
    u = Universe([("a", ()), ("b", ())], [], 3)
    assert u.T == 1 + 2 + 4 + 8
    ab, abb = u.trace_id(["a", "b"]), u.trace_id(["a", "b", "b"])
    assert u.le[ab, abb] and not u.le[abb, ab]
    assert u.minus[ab, abb] == u.trace_id(["b"])
    assert u.parent[abb] == ab


def test_truncation_counts_dropped_rows():
    u = Universe([("a", ())], [], 1)
    from reactive_contracts import contracts as c

    m.truncation.reset()
    c.seq(c.prefix(u, "a"), c.prefix(u, "a"))
    assert m.truncation.count > 0


def test_refinement_counterexamples_are_capped():
    u = smp.default_universe()
    r = m.refines(m.top(u, FULL), m.bottom(u, FULL), k=3)
    assert not r.holds and len(r.counterexamples) == 3


def test_bound_must_be_positive():
    with pytest.raises(ValueError):
        Universe([("a", ())], [], 0)
