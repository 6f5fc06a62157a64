import numpy as np
import pytest

from reactive_contracts import designs as ds
from reactive_contracts import laws
from reactive_contracts import sampling as smp


def test_lifting_suite_passes():
    (rep,) = laws.run_suite("lifting", 6, 20)
    assert rep.ok, rep.failures()


def test_design_parts():
    u = smp.design_universe()
    pre = np.arange(u.S) % 2 == 0
    post = np.eye(u.S, dtype=bool)
    D = ds.design(u, pre, post)
    assert np.array_equal(ds.pre_cond(D), pre)
    assert np.array_equal(ds.post_table(D)[pre], post[pre])


def test_lifting_needs_a_normal_design():
    u = smp.design_universe()
    from reactive_contracts import model as m

    # false is not H1-healthy, so not a design at all
    with pytest.raises(ds.NotNHealthy):
        ds.lift_RD(m.top(u, ds.DESIGN))
