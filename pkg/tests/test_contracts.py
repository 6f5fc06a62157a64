import numpy as np
import pytest

from oracles import prefix_triple, skip_triple, stop_triple
from reactive_contracts import contracts as c
from reactive_contracts import laws
from reactive_contracts import model as m
from reactive_contracts import sampling as smp
from reactive_contracts.model import Universe


@pytest.mark.parametrize("suite", ["rdlaws", "ralaws", "recursion"])
def test_suite_passes(suite):
    (rep,) = laws.run_suite(suite, 4, 20)
    assert rep.ok, rep.failures()


def test_basic_triples():
    u = smp.default_universe()
    assert c.prefix(u, "a") == prefix_triple(u, "a")
    assert c.skip(u) == skip_triple(u)
    assert c.stop(u) == stop_triple(u)


def test_contract_round_trip():
    u = smp.default_universe()
    for C in smp.contracts(u, 5, 10):
        assert c.contract_of(c.expand(C)) == C


def test_refinement_report():
    u = smp.default_universe()
    r = c.refines(c.prefix(u, "a"), c.stop(u))
    assert not r.holds
    assert "peri" in r.failed()
    assert all(w.startswith("{") for w in r.obligations["peri"].counterexamples)


def test_tail_recursion_stabilises_after_the_bound():
    u = Universe([("a", ())], [], 3)
    info = c.tail_rec_info(c.prefix(u, "a"))
    assert info.stabilised_at == u.bound + 1
    assert info.contract.post.is_false


def test_non_productive_recursion_is_rejected():
    u = smp.default_universe()
    with pytest.raises(c.NotProductive):
        c.tail_rec(c.skip(u))


def test_indexed_choice_needs_members():
    with pytest.raises(m.EmptyFamily):
        c.intchoice_indexed([])


def test_printing_is_stable():
    u = Universe([("a", ())], [], 1)
    text = c.fmt_contract(c.prefix(u, "a"))
    assert text == "pre:\n  true\nperi:\n  st=() tt=⟨⟩ ref'⊆{}\npost:\n  st=() tt=⟨a⟩ st'=()"
    dump = c.dump_contract(c.prefix(u, "a")).splitlines()
    assert dump[0] == "#pre\tst\ttt"
    assert "post\t()\t⟨a⟩\t()" in dump
