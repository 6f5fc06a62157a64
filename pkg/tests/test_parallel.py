import numpy as np
import pytest

from reactive_contracts import contracts as c
from reactive_contracts import laws
from reactive_contracts import parallel as par
from reactive_contracts import sampling as smp


def test_parallel_suite_passes():
    (rep,) = laws.run_suite("parallel", 5, 10)
    assert rep.ok, rep.failures()


def test_interleaving_example():
    lhs, rhs = laws.interleaving_example()
    assert lhs == rhs


def test_asymmetric_merge_is_rejected():
    u = smp.default_universe()
    M = par.interleave_merge(u)
    data = np.array(np.broadcast_to(M.data, M.data.shape))
    data[0, 1, 0, 0, 0, 0, 0, 1, 0, 0] = ~data[0, 1, 0, 0, 0, 0, 0, 1, 0, 0]
    bad = par.MergeRel(u, data, M.overflow)
    with pytest.raises(par.MergeNotSymmetric):
        par.rd_par(c.skip(u), c.skip(u), bad)


def test_chaos_absorbs_interleaving():
    u = smp.default_universe()
    assert par.interleave(c.chaos(u), c.prefix(u, "a")) == c.chaos(u)
