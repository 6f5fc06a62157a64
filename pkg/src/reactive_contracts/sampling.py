"""Seeded random relations, reactive relations, contracts and designs for
property checks."""

from __future__ import annotations

import numpy as np

from . import designs as ds
from . import healthiness as hc
from .contracts import Contract
from .model import FULL, BoolDom, IntRange, Rel, Universe
from .reactive_relations import COND, PERI, POST, RRRel


def default_universe(bound: int = 2) -> Universe:
    """Two plain events and one boolean-valued variable."""
    return Universe([("a", ()), ("b", ())], [("x", IntRange(0, 1))], bound)


def design_universe() -> Universe:
    return Universe([("a", ())], [("x", IntRange(0, 1)), ("y", BoolDom())], 1)


def rng_of(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def rel(u: Universe, rng, alphabet=FULL, density: float = 0.5) -> Rel:
    shape = [u.dim(v) for v in alphabet]
    return Rel(u, alphabet, rng.random(shape) < density)


def sparse_rel(u: Universe, rng, alphabet=FULL) -> Rel:
    """A relation whose density is itself random, so that both nearly
    empty and nearly full relations turn up."""
    return rel(u, rng, alphabet, float(rng.choice([0.02, 0.2, 0.5, 0.8, 0.98])))


def srd_rel(u: Universe, rng) -> Rel:
    return hc.SRD(sparse_rel(u, rng))


def rr(u: Universe, rng, alphabet=PERI, density: float = 0.3, max_len: int | None = None) -> RRRel:
    """Random reactive relation; with ``max_len`` rows only use short
    trace contributions."""
    shape = [u.dim(v) for v in alphabet]
    d = rng.random(shape) < density
    if max_len is not None and "tt" in alphabet:
        ax = alphabet.index("tt")
        sel = [slice(None)] * len(alphabet)
        sel[ax] = u.tlen > max_len
        d[tuple(sel)] = False
    return RRRel(u, alphabet, d)


def rc(u: Universe, rng, density: float = 0.85) -> RRRel:
    """Random prefix-closed reactive condition."""
    d = rng.random((u.S, u.T)) < density
    for t in range(1, u.T):
        d[:, t] &= d[:, u.parent[t]]
    return RRRel(u, COND, d)


def contract(u: Universe, rng, max_len: int | None = 1, density: float = 0.3) -> Contract:
    """Random contract.  With the default ``max_len`` the peri and post
    rows have trace contributions of length at most one, so that two of
    them compose within a bound of two."""
    return Contract(rc(u, rng), rr(u, rng, PERI, density, max_len), rr(u, rng, POST, density, max_len))


def productive(u: Universe, rng, max_len: int | None = 1, density: float = 0.3) -> Contract:
    post = rr(u, rng, POST, density, max_len)
    post.data[:, 0, :] = False
    return Contract(rc(u, rng), rr(u, rng, PERI, density, max_len), post)


def sigma(u: Universe, rng) -> np.ndarray:
    """Random total state update."""
    return rng.integers(0, u.S, size=u.S)


def state_mask(u: Universe, rng) -> np.ndarray:
    return rng.random(u.S) < 0.5


def normal_design(u: Universe, rng) -> Rel:
    pre = rng.random(u.S) < 0.7
    post = rng.random((u.S, u.S)) < 0.4
    return ds.design(u, pre, post)


def contracts(u: Universe, seed, n: int, **kw) -> list[Contract]:
    g = rng_of(seed)
    return [contract(u, g, **kw) for _ in range(n)]
