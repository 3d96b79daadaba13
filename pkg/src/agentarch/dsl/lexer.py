"""Tokenizer shared by the architecture and environment formats."""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = ["Token", "DslError", "DslSyntaxError", "UnknownSymbol", "DuplicateSymbol", "tokenize"]


class DslError(Exception):
    """Base class; every DSL error carries a 1-based line and column."""

    def __init__(self, message: str, line: int, col: int, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(sorted(set(expected)))
        where = f"{line}:{col}"
        tail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}: {message}{tail}")

    def to_json(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "line": self.line,
            "col": self.col,
            "expected": list(self.expected),
        }


class DslSyntaxError(DslError):
    pass


class UnknownSymbol(DslError):
    pass


class DuplicateSymbol(DslError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER STRING PUNCT EOF
    value: str
    line: int
    col: int

    def __str__(self) -> str:
        return "end of input" if self.kind == "EOF" else repr(self.value)


_SPEC = [
    ("WS", r"[ \t\r]+"),
    ("NL", r"\n"),
    ("COMMENT", r"#[^\n]*"),
    ("NUMBER", r"-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_']*"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("PUNCT", r"->|[{}()\[\];:,*=|]"),
]
_RX = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _SPEC))


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _RX.match(text, pos)
        col = pos - start + 1
        if m is None:
            ch = text[pos]
            if ch == '"':
                raise DslSyntaxError("unterminated string", line, col)
            raise DslSyntaxError(f"unexpected character {ch!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind == "NL":
            line += 1
            start = m.end()
        elif kind == "STRING":
            out.append(Token("STRING", _unescape(val[1:-1]), line, col))
        elif kind not in ("WS", "COMMENT"):
            out.append(Token(kind, val, line, col))
        pos = m.end()
    out.append(Token("EOF", "", line, pos - start + 1))
    return out


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), s)
