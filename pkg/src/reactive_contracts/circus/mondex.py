"""Generator for the scaled cash-card (MiniMondex) corpus."""

from __future__ import annotations

from . import syntax as s

ALPHABET_CAP = 12


class AlphabetTooLarge(ValueError):
    pass


def _alts(terms):
    return " |~| ".join(terms) if len(terms) > 1 else terms[0]


def mondex_text(cards: int, max_balance: int, amounts, bound: int = 4, cap: int = ALPHABET_CAP) -> str:
    amounts = sorted(set(amounts))
    if cards < 2 or not amounts or amounts[0] < 1:
        raise ValueError("need at least two cards and positive transfer amounts")
    if amounts != list(range(amounts[0], amounts[-1] + 1)):
        raise ValueError("transfer amounts must form a contiguous range")
    n_events = cards * cards * len(amounts) + 2 * cards
    if n_events > cap:
        raise AlphabetTooLarge(f"{n_events} events exceed the cap of {cap}")
    c_hi, a_lo, a_hi = cards - 1, amounts[0], amounts[-1]
    cs = ", ".join(str(k) for k in range(cards))
    invalid = "i == j or i notin dom accts or n <= 0 or n > accts(i)"
    pays = [(i, j, n) for i in range(cards) for j in range(cards) if i != j for n in amounts]
    every = [(i, j, n) for i in range(cards) for j in range(cards) for n in amounts]
    init = ", ".join(f"{k} |-> {max_balance // 2}" for k in range(cards))
    return f"""\
-- cash cards: {cards} cards, balances up to {max_balance}, amounts {a_lo}..{a_hi}
-- balances may dip to -{a_hi} so that an overdraft is representable
channel pay(0..{c_hi}, 0..{c_hi}, {a_lo}..{a_hi})
channel accept(0..{c_hi})
channel reject(0..{c_hi})
state accts : map 0..{c_hi} to -{a_hi}..{max_balance}
bound {bound}

process Pay(i, j, n) = pay.i.j.n ->
  (if {invalid}
   then reject.i -> skip
   else (accts(i) := accts(i) - n ; accts(j) := accts(j) + n ; accept.i -> skip))

-- credits the payee without debiting the payer
process PayBroken(i, j, n) = pay.i.j.n ->
  (if {invalid}
   then reject.i -> skip
   else (accts(j) := accts(j) + n ; accept.i -> skip))

-- forgets the balance check
process PayUnchecked(i, j, n) = pay.i.j.n ->
  (if i == j or i notin dom accts or n <= 0
   then reject.i -> skip
   else (accts(i) := accts(i) - n ; accts(j) := accts(j) + n ; accept.i -> skip))

process SomePay = {_alts([f"Pay({i},{j},{n})" for i, j, n in pays])}
-- also offers payments from a card to itself, which are rejected
process SomePayAll = {_alts([f"Pay({i},{j},{n})" for i, j, n in every])}
process Cycle = mu X . SomePay ; X
process CycleAll = mu X . SomePayAll ; X
process System = accts := {{{init}}} ; Cycle

contract Conservation = [dom(accts) == {{{cs}}} |- true <> sum(accts) == sum(accts')]
contract NoOverdraft = [dom(accts) == {{{cs}}} |- true <>
  forall k in 0..{c_hi} . accts(k) >= 0 => accts'(k) >= 0]
contract TransferAcceptance(i, j, n) = [dom(accts) == {{{cs}}} |-
  tt != <> and last(tt) == pay.i.j.n and n <= accts(i) => accept.i notin ref' <> true]
"""


def mondex_spec(cards: int, max_balance: int, amounts, bound: int = 4, cap: int = ALPHABET_CAP) -> s.ModelSpec:
    return s.parse(mondex_text(cards, max_balance, amounts, bound, cap))


def pay_set(cards: int, amounts) -> list[tuple[int, int, int]]:
    return [(i, j, n) for i in range(cards) for j in range(cards) if i != j for n in sorted(set(amounts))]
