import numpy as np
import pytest

from oracles import monolithic, pay_triple, prefix_triple
from reactive_contracts import contracts as c
from reactive_contracts.circus import (AlphabetTooLarge, Model, ParseError, UndeclaredChannel, cdf,
                                       corpus, corpus_names, denote, load, mondex_spec, mondex_text,
                                       parse, parse_proc)
from reactive_contracts.circus import syntax as s
from reactive_contracts.circus.denote import RecursiveReference
from reactive_contracts.model import Universe, truncation


def test_parse_prefix():
    spec = parse("process P = a -> skip")
    assert spec.processes["P"].body == s.Prefix("a", (), s.Skip())


def test_parse_external_choice():
    body = parse("process P = a -> skip [] b -> stop").processes["P"].body
    assert body == s.ExtChoice((s.Prefix("a", (), s.Skip()), s.Prefix("b", (), s.Stop())))


def test_parse_tail_recursion():
    body = parse("process P = mu X . a -> skip ; X").processes["P"].body
    assert body == s.MuTail(s.Prefix("a", (), s.Skip()), "X")


def test_prefix_binds_tighter_than_sequence():
    assert parse_proc("a -> skip ; b -> skip") == s.Seq(s.Prefix("a", (), s.Skip()), s.Prefix("b", (), s.Skip()))


def test_mixed_operators_need_parentheses():
    with pytest.raises(ParseError):
        parse("process P = a -> skip [] b -> skip |~| stop")
    parse("process P = (a -> skip [] b -> skip) |~| stop")


def test_general_recursion_is_rejected():
    with pytest.raises(ParseError) as e:
        parse("process P = mu X . a -> X ; X")
    assert "tail form" in str(e.value)


def test_syntax_error_position():
    with pytest.raises(ParseError) as e:
        parse("channel a\nprocess P = a -> ")
    assert e.value.line == 2


def test_denote_prefix_matches_printed_triple():
    u = Universe([("a", ()), ("b", ())], [], 2)
    assert denote(parse_proc("a -> skip"), u) == prefix_triple(u, "a")


def test_undeclared_channel():
    u = Universe([("a", ())], [], 1)
    with pytest.raises(UndeclaredChannel):
        denote(parse_proc("b -> skip"), u)


def test_self_reference_is_rejected():
    M = load("channel a\nprocess P = a -> P")
    with pytest.raises(RecursiveReference):
        M.lookup("P")


def test_guard_false_is_stop():
    M = load(corpus("examples"))
    assert M.lookup("GuardFalse") == c.stop(M.universe)


def test_input_prefix_is_a_choice_over_values():
    M = load("channel c(0..1)\nchannel d(0..1)\nbound 2\nprocess P = c?x -> d.x -> skip\n"
             "process Q = c.0 -> d.0 -> skip [] c.1 -> d.1 -> skip")
    assert M.lookup("P") == M.lookup("Q")


def test_assignment_out_of_range_has_no_outcome():
    M = load("channel a\nstate n : int 0..1\nprocess P = n := n + 1")
    C = M.lookup("P")
    u = M.universe
    assert C._pre.all()
    assert C._post[u.state_id(n=0), 0, u.state_id(n=1)]
    assert not C._post[u.state_id(n=1)].any()


def test_indexed_assignment_outside_domain_diverges():
    M = load(corpus("examples"))
    assert M.lookup("DivergentIndex") == c.chaos(M.universe)


def test_contract_definition_alphabet_is_checked():
    from reactive_contracts.circus import ExprTypeError

    M = load("channel a\nstate n : int 0..1\ncontract C = [n' == 0 |- true <> true]")
    with pytest.raises(ExprTypeError):
        M.lookup("C")


def test_cdf_examples():
    M = load(corpus("examples"))
    u = M.universe
    assert M.lookup("CDF") == cdf(u)
    assert c.refines(cdf(u), M.lookup("Prefix")).holds
    assert not c.refines(cdf(u), M.lookup("Dead")).holds
    assert c.refines(cdf(u), M.lookup("UrgentA")).holds


def test_extchoice_laws_on_corpus_terms():
    M = load(corpus("examples"))
    A, B, D = (M.lookup(n) for n in ("Prefix", "Dead", "Divergent"))
    assert c.extchoice([A]) == A
    assert c.extchoice([A, B]) == c.extchoice([B, A])
    assert c.extchoice([c.extchoice([A, B]), D]) == c.extchoice([A, c.extchoice([B, D])])


@pytest.mark.parametrize("name", list(parse(corpus("examples")).processes))
def test_corpus_matches_monolithic(name):
    M = load(corpus("examples"))
    assert c.contract_of(monolithic(M, M.spec.processes[name].body)) == M.lookup(name)


def test_corpus_has_no_truncation():
    for n in corpus_names():
        M = load(corpus(n))
        truncation.reset()
        for name, d in {**M.spec.processes, **M.spec.contracts}.items():
            if not d.params:
                M.lookup(name)
        assert truncation.count == 0, n


def test_mondex_corpus_is_generated():
    assert corpus("mondex") == mondex_text(2, 2, {1})


def test_mondex_alphabet_cap():
    with pytest.raises(AlphabetTooLarge):
        mondex_spec(3, 2, {1, 2})


def test_pay_contract_at_desk_scale():
    M = Model(mondex_spec(2, 2, {1}))
    u = M.universe
    C = M.resolve("Pay(0,1,1)")
    assert C == pay_triple(u, 0, 1, 1)
    # the precondition only fails after pay.0.1.1 in states lacking card 1
    t_pay = u.trace_id(["pay.0.1.1"])
    bad = ~C._pre
    assert all(u.le[t_pay, t] for _, t in zip(*np.nonzero(bad)))


def test_mondex_specifications():
    M = Model(mondex_spec(2, 2, {1}))
    for spec in ("Conservation", "NoOverdraft", "TransferAcceptance(0,1,1)"):
        assert c.refines(M.resolve(spec), M.resolve("Pay(0,1,1)")).holds, spec
    assert not c.refines(M.resolve("Conservation"), M.resolve("PayBroken(0,1,1)")).holds
    assert not c.refines(M.resolve("NoOverdraft"), M.resolve("PayUnchecked(0,1,1)")).holds
    # a payment to oneself is rejected, so acceptance is not guaranteed
    assert not c.refines(M.resolve("TransferAcceptance(0,0,1)"), M.resolve("Pay(0,0,1)")).holds
