import pytest

from oracles import all_traces
from reactive_contracts import laws
from reactive_contracts import trace_algebra as ta


def test_trace_suite_passes():
    (rep,) = laws.run_suite("trace")
    assert rep.ok, rep.failures()


def test_subtract_and_prefix():
    a, b = ta.Event("a"), ta.Event("b")
    assert ta.subtract((a, b, a), (a,)) == (b, a)
    assert ta.prefix_le((a,), (a, b))
    assert not ta.prefix_lt((a, b), (a, b))
    with pytest.raises(ta.NotAPrefix):
        ta.subtract((a,), (b,))


def test_interleavings_match_brute_force():
    # every merge keeps both traces as subsequences, in order
    def brute(s, t):
        n = len(s) + len(t)
        out = set()
        for w in all_traces(set(s) | set(t) or {"x"}, n):
            if len(w) != n:
                continue
            for mask in range(1 << n):
                left = tuple(w[k] for k in range(n) if mask >> k & 1)
                right = tuple(w[k] for k in range(n) if not mask >> k & 1)
                if left == s and right == t:
                    out.add(w)
                    break
        return out

    for s in all_traces("ab", 2):
        for t in all_traces("ab", 2):
            assert ta.interleavings(s, t) == brute(s, t)


def test_event_printing():
    assert str(ta.Event("pay", (0, 1, 2))) == "pay.0.1.2"
    assert ta.fmt_trace(("a", "b")) == "⟨a,b⟩"
