"""Tokenizer shared by the program, pattern and derivation-script parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError

# Longest operators first so that e.g. ``<=>`` wins over ``<=`` and ``<``.
_OPERATORS = [
    "<=>", ":=", "=>", "<=", ">=", "\\/", "/\\", "\\=", "!=", "..", "->",
    "=", "<", ">", ",", ";", ".", "(", ")", "[", "]", "{", "}", "|",
    "+", "-", "*", "/", "~", ":",
]

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)"
    r"|(?P<nl>\n)"
    r"|(?P<comment>\#[^\n]*)"
    r"|(?P<int>\d+)"
    r"|(?P<string>\"(?:[^\"\\\n]|\\.)*\")"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>" + "|".join(re.escape(o) for o in _OPERATORS) + ")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # INT, VAR, IDENT, STRING, OP, EOF
    value: str
    line: int
    col: int

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"{self.kind}({self.value!r})@{self.line}:{self.col}"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ws", "comment"):
            pass
        elif kind == "int":
            tokens.append(Token("INT", value, line, col))
        elif kind == "string":
            tokens.append(Token("STRING", bytes(value[1:-1], "utf-8").decode("unicode_escape"), line, col))
        elif kind == "name":
            k = "VAR" if (value[0].isupper() or value[0] == "_") else "IDENT"
            tokens.append(Token(k, value, line, col))
        else:
            tokens.append(Token("OP", value, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens
