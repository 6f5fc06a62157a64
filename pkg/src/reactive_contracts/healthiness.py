"""Healthiness conditions as transformers on relations, plus a small harness
for checking idempotence, monotonicity, continuity and commutation on
sampled relations."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np

from . import model as m
from .model import FULL, Rel, Universe, cyl

HEALTH_NAMES = ("R1", "R2c", "R3", "R3h", "Rs", "RD1", "RD2", "RD3", "SRD", "NSRD",
                "RR", "RC1", "RC2", "RC", "R4", "H1", "H2", "H3", "H", "N")


# -- fixed relations ----------------------------------------------------------


def _full(P: Rel):
    if P.alphabet != FULL:
        raise m.AlphabetMismatch(f"expected the full alphabet, got {P.alphabet}")


@lru_cache(maxsize=32)
def tr_le(u: Universe) -> Rel:
    return cyl(u, FULL, ("tr", "tr'"), u.le)


@lru_cache(maxsize=32)
def tr_lt(u: Universe) -> Rel:
    return cyl(u, FULL, ("tr", "tr'"), u.le & ~np.eye(u.T, dtype=bool))


@lru_cache(maxsize=32)
def true_r(u: Universe) -> Rel:
    return tr_le(u)


def flag(u, alphabet, var, val=True):
    return cyl(u, alphabet, (var,), np.array([not val, val]))


@lru_cache(maxsize=32)
def II(u: Universe, alphabet=FULL) -> Rel:
    return m.identity(u, alphabet)


@lru_cache(maxsize=32)
def II_srd(u: Universe) -> Rel:
    """``((∃st • II) ◁ wait ▷ II) ◁ ok ▷ R1(true)``"""
    ii = II(u)
    waiting = m.exists(ii, ["st"])
    inner = m.cond(waiting, flag(u, FULL, "wait"), ii)
    return m.cond(inner, flag(u, FULL, "ok"), true_r(u))


@lru_cache(maxsize=32)
def II_rea(u: Universe) -> Rel:
    return m.cond(II(u), flag(u, FULL, "ok"), true_r(u))


@lru_cache(maxsize=32)
def J(u: Universe, alphabet=FULL) -> Rel:
    """``(ok ⇒ ok') ∧ v' = v`` for the other variables."""
    okimp = cyl(u, alphabet, ("ok", "ok'"), np.array([[True, True], [False, True]]))
    return okimp & m.identity(u, alphabet, skip_vars=("ok",))


@lru_cache(maxsize=32)
def II_D(u: Universe, alphabet=FULL) -> Rel:
    """``true ⊢ II``"""
    return m.implies(flag(u, alphabet, "ok"), flag(u, alphabet, "ok'") & II(u, alphabet))


# -- transformers -------------------------------------------------------------


def R1(P: Rel) -> Rel:
    _full(P)
    return P & tr_le(P.universe)


def R2c(P: Rel) -> Rel:
    """``P[ε, tt/tr, tr'] ◁ tr ≤ tr' ▷ P``"""
    _full(P)
    u = P.universe
    ax, ax2 = P.axis("tr"), P.axis("tr'")
    A = np.moveaxis(P.data, (ax, ax2), (0, 1))
    mi = np.where(u.le, u.minus, 0)
    B = A[0][mi]  # B[tr, tr'] = A[ε, tr' - tr]
    le = u.le.reshape(u.le.shape + (1,) * (A.ndim - 2))
    out = np.where(le, B, A)
    return Rel(u, FULL, np.moveaxis(out, (0, 1), (ax, ax2)))


def R3(P: Rel) -> Rel:
    _full(P)
    u = P.universe
    return m.cond(II_rea(u), flag(u, FULL, "wait"), P)


def R3h(P: Rel) -> Rel:
    _full(P)
    u = P.universe
    return m.cond(II_srd(u), flag(u, FULL, "wait"), P)


def Rs(P: Rel) -> Rel:
    return R1(R2c(R3h(P)))


def RD1(P: Rel) -> Rel:
    """``ok ⇒ᵣ P``"""
    _full(P)
    u = P.universe
    return P | (~flag(u, FULL, "ok") & true_r(u))


def RD2(P: Rel) -> Rel:
    return m.seq_compose(P, J(P.universe, P.alphabet))


def RD3(P: Rel) -> Rel:
    _full(P)
    return m.seq_compose(P, II_srd(P.universe))


def SRD(P: Rel) -> Rel:
    return RD1(RD2(Rs(P)))


def NSRD(P: Rel) -> Rel:
    return RD1(RD3(Rs(P)))


def neg_r(P: Rel) -> Rel:
    return R1(~P)


def RR(P: Rel) -> Rel:
    return m.exists(R1(R2c(P)), ["ok", "ok'", "wait", "wait'"])


def RC1(P: Rel) -> Rel:
    """``¬ᵣ((¬ᵣ P) ⨾ trueᵣ)``"""
    return neg_r(m.seq_compose(neg_r(P), true_r(P.universe)))


def RC2(P: Rel) -> Rel:
    u = P.universe
    back = cyl(u, FULL, ("tr", "tr'"), u.le.T)
    return R1(m.seq_compose(P, back))


def RC(P: Rel) -> Rel:
    return RC1(RR(P))


def R4(P: Rel) -> Rel:
    _full(P)
    return P & tr_lt(P.universe)


def H1(P: Rel) -> Rel:
    return m.implies(flag(P.universe, P.alphabet, "ok"), P)


def H2(P: Rel) -> Rel:
    return m.seq_compose(P, J(P.universe, P.alphabet))


def H3(P: Rel) -> Rel:
    return m.seq_compose(P, II_D(P.universe, P.alphabet))


def H(P: Rel) -> Rel:
    return H1(H2(P))


def N(P: Rel) -> Rel:
    return H1(H3(P))


TRANSFORMERS: dict[str, Callable[[Rel], Rel]] = {
    "R1": R1, "R2c": R2c, "R3": R3, "R3h": R3h, "Rs": Rs,
    "RD1": RD1, "RD2": RD2, "RD3": RD3, "SRD": SRD, "NSRD": NSRD,
    "RR": RR, "RC1": RC1, "RC2": RC2, "RC": RC, "R4": R4,
    "H1": H1, "H2": H2, "H3": H3, "H": H, "N": N,
}

Health = Union[str, Sequence[str], Callable[[Rel], Rel]]


def transformer(h: Health) -> Callable[[Rel], Rel]:
    """A name, a composite ``(outer, ..., inner)`` or a function."""
    if callable(h):
        return h
    if isinstance(h, str):
        try:
            return TRANSFORMERS[h]
        except KeyError:
            raise ValueError(f"unknown healthiness condition {h!r}") from None
    fs = [transformer(x) for x in h]

    def composite(P):
        for f in reversed(fs):
            P = f(P)
        return P

    return composite


def apply(h: Health, P: Rel) -> Rel:
    return transformer(h)(P)


def is_healthy(h: Health, P: Rel) -> bool:
    return apply(h, P) == P


# -- meta-theory harness ------------------------------------------------------


@dataclass
class MetaReport:
    idempotent: bool = True
    monotone: bool = True
    continuous: bool = True
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return self.idempotent and self.monotone and self.continuous


def _witness(P: Rel, Q: Rel) -> str:
    diff = Rel(P.universe, P.alphabet, P.data ^ Q.data)
    b = next(diff.bindings(1), None)
    return diff.fmt_binding(b) if b is not None else ""


def check_meta(h: Health, samples: Sequence[Rel], seed: int = 0, subsets: int | None = None) -> MetaReport:
    f = transformer(h)
    samples = list(samples)
    if not samples:
        raise ValueError("no samples")
    rng = np.random.default_rng(seed)
    rep = MetaReport()
    images = [f(P) for P in samples]
    for P, fP in zip(samples, images):
        ffP = f(fP)
        if ffP != fP:
            rep.idempotent = False
            rep.failures.append(("idempotent", _witness(ffP, fP)))
    n = len(samples)
    for i in range(n):
        for j in {(i + 1) % n, (i + 3) % n}:
            # P ∨ Q ⊑ P always holds, so its image must too
            lo = samples[i] | samples[j]
            if not m.refines(f(lo), images[i]):
                rep.monotone = False
                rep.failures.append(("monotone", _witness(f(lo), images[i])))
    for _ in range(subsets if subsets is not None else n):
        k = int(rng.integers(2, min(5, n) + 1)) if n >= 2 else 1
        pick = rng.choice(n, size=k, replace=False)
        lhs = f(m.inf_indexed([samples[i] for i in pick]))
        rhs = m.inf_indexed([images[i] for i in pick])
        if lhs != rhs:
            rep.continuous = False
            rep.failures.append(("continuous", _witness(lhs, rhs)))
    return rep


def commutes(h1: Health, h2: Health, samples: Sequence[Rel]) -> bool:
    f, g = transformer(h1), transformer(h2)
    return all(f(g(P)) == g(f(P)) for P in samples)


def commutation_witness(h1: Health, h2: Health, samples: Sequence[Rel]):
    f, g = transformer(h1), transformer(h2)
    for P in samples:
        a, b = f(g(P)), g(f(P))
        if a != b:
            return P, _witness(a, b)
    return None


@dataclass
class TheoryLattice:
    top: Rel
    bottom: Rel


def theory_lattice(h: Health, u: Universe, alphabet=FULL) -> TheoryLattice:
    f = transformer(h)
    return TheoryLattice(top=f(m.top(u, alphabet)), bottom=f(m.bottom(u, alphabet)))


def theory_mu(h: Health, F: Callable[[Rel], Rel], u: Universe, alphabet=FULL) -> Rel:
    """``μ X • F(HC(X))``, the least fixed point inside the theory."""
    f = transformer(h)
    return m.mu(lambda X: F(f(X)), u, alphabet)
