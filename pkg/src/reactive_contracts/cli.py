"""Command-line front end: calculate contracts, check refinement,
equivalence and healthiness, and run the law suites."""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click
import numpy as np

from . import contracts as c
from . import healthiness as hc
from . import laws
from . import model as m
from . import parallel as par
from . import reactive_relations as rr
from .circus import corpus, load
from .circus.denote import Model
from .circus.expr import DenotationError
from .circus.mondex import AlphabetTooLarge, mondex_text
from .circus.syntax import ParseError

EXIT_OK, EXIT_FAIL, EXIT_DENOTE = 0, 1, 2

# largest expanded relation, in cells, that healthy will build
EXPAND_LIMIT = 2 * 10**8

DENOTATION_ERRORS = (DenotationError, c.NotProductive, rr.NotRC, par.MergeNotSymmetric,
                     AlphabetTooLarge, m.EmptyFamily)


def _fail(msg: str, code: int):
    click.echo(msg, err=True)
    sys.exit(code)


def common(f):
    @click.option("--seed", type=int, default=0, show_default=True)
    @click.option("--samples", type=int, default=50, show_default=True)
    @click.option("--max-counterexamples", "max_cex", type=int, default=m.MAX_COUNTEREXAMPLES, show_default=True)
    @click.option("--format", "fmt", type=click.Choice(["text", "dump"]), default="text", show_default=True)
    @click.option("--bound-override", "bound", type=int, default=None, help="Replace the file's trace bound.")
    @functools.wraps(f)
    def wrapper(*args, **kw):
        return f(*args, **kw)

    return wrapper


def _load(source: str, bound) -> Model:
    """``source`` is a file path or ``corpus:NAME``."""
    if source.startswith("corpus:"):
        try:
            text = corpus(source.split(":", 1)[1])
        except FileNotFoundError:
            _fail(f"{source}: no such corpus file", EXIT_FAIL)
    else:
        try:
            text = Path(source).read_text()
        except OSError as e:
            _fail(f"{source}: {e.strerror}", EXIT_FAIL)
    try:
        return load(text, bound)
    except ParseError as e:
        _fail(f"{source}:{e.line}:{e.col}: {e.reason}" + (f" (expected {', '.join(e.expected[:8])})" if e.expected else ""),
              EXIT_FAIL)
    except ValueError as e:
        _fail(f"{source}: {e}", EXIT_DENOTE)


def _resolve(model: Model, name: str) -> c.Contract:
    try:
        return model.resolve(name)
    except ParseError as e:
        _fail(f"{name!r}: {e.reason}", EXIT_FAIL)
    except DENOTATION_ERRORS as e:
        _fail(f"{name}: {type(e).__name__}: {e}", EXIT_DENOTE)


def _emit_contract(C: c.Contract, fmt: str):
    click.echo(c.dump_contract(C) if fmt == "dump" else c.fmt_contract(C))


@click.group()
def main():
    """Reactive design contracts over finite universes."""


@main.command()
@click.argument("source")
@click.argument("name")
@common
def calc(source, name, seed, samples, max_cex, fmt, bound):
    """Calculate the contract of a process or contract definition."""
    model = _load(source, bound)
    m.truncation.reset()
    C = _resolve(model, name)
    _emit_contract(C, fmt)
    if fmt == "dump":
        click.echo(f"#truncation\t{m.truncation.count}")
        for k in model.stabilised:
            click.echo(f"#stabilised\t{k}")
    else:
        click.echo(f"truncation: {m.truncation.count}")
        for k in model.stabilised:
            click.echo(f"stabilised at: {k}")


def _report(report: c.RefinementReport, fmt: str):
    for name, v in report.obligations.items():
        if fmt == "dump":
            click.echo(f"{name}\t{'holds' if v.holds else 'fails'}")
            for w in v.counterexamples:
                click.echo(f"{name}\tcounterexample\t{w}")
        else:
            click.echo(f"{name}: {'holds' if v.holds else 'fails'}")
            for w in v.counterexamples:
                click.echo(f"  {w}")


@main.command()
@click.argument("source")
@click.argument("spec")
@click.argument("impl")
@common
def refine(source, spec, impl, seed, samples, max_cex, fmt, bound):
    """Check that IMPL refines SPEC by the three obligations."""
    model = _load(source, bound)
    m.truncation.reset()
    S, I = _resolve(model, spec), _resolve(model, impl)
    r = c.refines(S, I, max_cex)
    _report(r, fmt)
    click.echo(f"refinement {'holds' if r.holds else 'fails'}")
    click.echo(f"truncation: {m.truncation.count}")
    sys.exit(EXIT_OK if r.holds else EXIT_FAIL)


@main.command()
@click.argument("source")
@click.argument("left")
@click.argument("right")
@common
def equiv(source, left, right, seed, samples, max_cex, fmt, bound):
    """Check that two names denote the same contract."""
    model = _load(source, bound)
    A, B = _resolve(model, left), _resolve(model, right)
    same = c.equiv(A, B)
    if not same:
        _report(c.refines(A, B, max_cex), fmt)
        _report(c.refines(B, A, max_cex), fmt)
    click.echo("equivalent" if same else "not equivalent")
    sys.exit(EXIT_OK if same else EXIT_FAIL)


@main.command()
@click.argument("source")
@click.argument("name")
@click.argument("health")
@common
def healthy(source, name, health, seed, samples, max_cex, fmt, bound):
    """Check a healthiness condition, e.g. NSRD or RD1,RD2, on the expansion
    of NAME as a full relation."""
    model = _load(source, bound)
    C = _resolve(model, name)
    u = model.universe
    side = 4 * u.T * u.S * u.R
    if side * side > EXPAND_LIMIT:
        _fail(f"universe too large to expand ({side} bindings per side); lower the bound", EXIT_DENOTE)
    parts = [h.strip() for h in health.split(",")]
    try:
        h = hc.transformer(parts[0] if len(parts) == 1 else parts)
    except ValueError as e:
        _fail(str(e), EXIT_FAIL)
    P = c.expand(C)
    ok = h(P) == P
    click.echo(f"{name} is {'' if ok else 'not '}{health}-healthy")
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


@main.command("laws")
@click.argument("suite")
@common
def laws_cmd(suite, seed, samples, max_cex, fmt, bound):
    """Run a law suite (or all of them) on seeded samples."""
    try:
        reports = laws.run_suite(suite, seed, samples)
    except laws.UnknownSuite as e:
        _fail(str(e), EXIT_FAIL)
    ok = True
    for rep in reports:
        for r in rep.results:
            if fmt == "dump":
                click.echo("\t".join([rep.name, r.name, "pass" if r.holds else "fail", str(r.cases), r.witness]))
            else:
                click.echo(f"{'PASS' if r.holds else 'FAIL'} {rep.name}: {r.name} ({r.cases} cases)"
                           + ("" if r.holds else f"\n  witness: {r.witness}"))
        if fmt == "text":
            click.echo(f"{rep.name}: {len(rep.results) - len(rep.failures())}/{len(rep.results)} laws hold")
        ok &= rep.ok
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


@main.command("mondex")
@click.option("--cards", type=int, default=2, show_default=True)
@click.option("--max-balance", type=int, default=2, show_default=True)
@click.option("--amount", "amounts", type=int, multiple=True, default=(1,), show_default=True)
@click.option("--bound", type=int, default=4, show_default=True)
def mondex_cmd(cards, max_balance, amounts, bound):
    """Print a scaled cash-card model."""
    try:
        click.echo(mondex_text(cards, max_balance, amounts, bound), nl=False)
    except ValueError as e:
        _fail(str(e), EXIT_DENOTE)


if __name__ == "__main__":
    main()
