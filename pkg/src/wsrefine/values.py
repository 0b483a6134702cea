"""Ground values of a finite universe.

Integers are plain Python ints; the other value shapes are small frozen
dataclasses so they hash and compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Nil:
    def __str__(self) -> str:
        return "[]"


NIL = Nil()


@dataclass(frozen=True)
class Cons:
    head: "Value"
    tail: "Value"

    def __str__(self) -> str:
        items = []
        cur: Value = self
        while isinstance(cur, Cons):
            items.append(value_str(cur.head))
            cur = cur.tail
        if isinstance(cur, Nil):
            return "[" + ",".join(items) + "]"
        return "[" + ",".join(items) + "|" + value_str(cur) + "]"


@dataclass(frozen=True)
class Pair:
    left: "Value"
    right: "Value"

    def __str__(self) -> str:
        return f"pair({value_str(self.left)},{value_str(self.right)})"


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.functor}({','.join(value_str(a) for a in self.args)})"


Value = Union[int, Atom, Nil, Cons, Pair, Compound]


def is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def value_str(v) -> str:
    return str(v)


def from_pylist(items, tail: "Value" = NIL) -> "Value":
    out = tail
    for x in reversed(list(items)):
        out = Cons(x, out)
    return out


def as_pylist(v) -> Optional[list]:
    """Elements of a proper list value, or None when ``v`` is not one."""
    out = []
    while isinstance(v, Cons):
        out.append(v.head)
        v = v.tail
    return out if isinstance(v, Nil) else None


def value_sort_key(v):
    if is_int(v):
        return (0, v)
    items = as_pylist(v)
    if items is not None:
        return (1, len(items), tuple(value_sort_key(x) for x in items))
    if isinstance(v, Atom):
        return (2, v.name)
    return (3, str(v))
