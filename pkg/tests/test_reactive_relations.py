import numpy as np

from reactive_contracts import laws
from reactive_contracts import reactive_relations as rr
from reactive_contracts import sampling as smp
from reactive_contracts.reactive_relations import COND


def test_wp_suite_passes():
    (rep,) = laws.run_suite("wp", 3, 20)
    assert rep.ok, rep.failures()


def test_conditions():
    u = smp.default_universe()
    assert rr.is_rc(rr.state_cond(u, np.array([True, False])))
    # a trace that must equal ⟨a⟩ is not prefix closed
    assert not rr.is_rc(rr.tt_eq(u, ("a",)))
    assert rr.is_rc(rr.neg_r(rr.tt_prefix(u, ("a",))))


def test_wp_of_false_is_true():
    u = smp.default_universe()
    g = smp.rng_of(1)
    Q = smp.rc(u, g)
    assert rr.wpR(rr.false_r(u), Q) == rr.true_r(u, COND)
