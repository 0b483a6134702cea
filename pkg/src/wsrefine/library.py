"""Names and arities of the built-in functors and library predicates.

Kept free of numpy so the parser can consult it cheaply.
"""

from __future__ import annotations

# canonical functor name -> arity
BUILTIN_FUNCTORS: dict[str, int] = {
    "+": 2,
    "-": 2,
    "*": 2,
    "/": 2,
    "mod": 2,
    "max": 2,
    "min": 2,
    "abs": 1,
    "neg": 1,
    "suc": 1,
    "fact": 1,
    "len": 1,
    "nth": 2,
    "cons": 2,
    "nil": 0,
    "pair": 2,
    "fst": 1,
    "snd": 1,
}

FUNCTOR_ALIASES: dict[str, str] = {
    "plus": "+",
    "minus": "-",
    "times": "*",
    "div": "/",
}

INFIX_FUNCTORS = {"+": 1, "-": 1, "*": 2, "/": 2}

ARITHMETIC_FUNCTORS = frozenset({"+", "-", "*", "/", "mod", "max", "min", "abs", "neg", "suc"})

LIBRARY_PREDICATES: dict[str, int] = {
    "nat": 1,
    "int": 1,
    "list": 1,
    "even": 1,
    "odd": 1,
    "suffix": 2,
    "member": 2,
    "length": 2,
    "fact": 2,
    "psoln": 2,
    "notrow": 2,
    "notdiag": 2,
}


def canonical_functor(name: str) -> str:
    return FUNCTOR_ALIASES.get(name, name)
