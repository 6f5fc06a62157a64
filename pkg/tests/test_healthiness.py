import pytest

from reactive_contracts import healthiness as hc
from reactive_contracts import laws
from reactive_contracts import model as m
from reactive_contracts import sampling as smp


def test_healthiness_suite_passes():
    (rep,) = laws.run_suite("healthiness", 2, 20)
    assert rep.ok, rep.failures()


def test_rc_is_not_continuous():
    differs, witness = laws.rc_discontinuity(smp.default_universe())
    assert differs and witness


def test_true_is_not_r1():
    u = smp.default_universe()
    assert not hc.is_healthy("R1", m.bottom(u))
    assert hc.is_healthy("R1", hc.true_r(u))


def test_composite_names():
    u = smp.default_universe()
    P = smp.srd_rel(u, smp.rng_of(0))
    assert hc.is_healthy(("RD1", "RD2"), P) == (hc.RD1(hc.RD2(P)) == P)
    with pytest.raises(ValueError):
        hc.transformer("nonsense")
