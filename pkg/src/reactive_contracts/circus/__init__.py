"""A small process language denoted as reactive contracts."""

from importlib import resources

from .denote import Model, RecursiveReference, UnknownDefinition, cdf, denote, load
from .expr import DenotationError, ExprTypeError, UndeclaredChannel, UndeclaredName
from .mondex import AlphabetTooLarge, mondex_spec, mondex_text
from .syntax import ModelSpec, ParseError, parse, parse_proc


def corpus_names() -> list[str]:
    root = resources.files(__package__).joinpath("corpus")
    return sorted(p.name.removesuffix(".circ") for p in root.iterdir() if p.name.endswith(".circ"))


def corpus(name: str) -> str:
    return resources.files(__package__).joinpath("corpus", f"{name}.circ").read_text()


__all__ = [
    "AlphabetTooLarge", "DenotationError", "ExprTypeError", "Model", "ModelSpec", "ParseError",
    "RecursiveReference", "UndeclaredChannel", "UndeclaredName", "UnknownDefinition", "cdf",
    "corpus", "corpus_names", "denote", "load", "mondex_spec", "mondex_text", "parse", "parse_proc",
]
