"""Environment kernel files.

    states: s0, s1, goal
    actions: back, advance
    gamma: 0.9
    start: s0
    (s0, advance) -> [(0, s1, 1.0)]
    (s1, advance | back) -> [(0, s0, 1.0)]   # row used only after action back
"""

from __future__ import annotations

from ..rl_runtime import EnvSpec
from .lexer import DslSyntaxError, DuplicateSymbol, Token, UnknownSymbol, tokenize

__all__ = ["parse_env", "render_env", "looks_like_env"]

_HEADERS = ("states", "actions", "gamma", "start")


def looks_like_env(text: str) -> bool:
    try:
        toks = tokenize(text)
    except DslSyntaxError:
        return False
    t = toks[0]
    return (t.kind == "IDENT" and t.value in _HEADERS and toks[1].value == ":") or (
        t.kind == "PUNCT" and t.value == "("
    )


class _EnvParser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, expected) -> DslSyntaxError:
        return DslSyntaxError(f"unexpected {self.tok}", self.tok.line, self.tok.col, expected)

    def expect(self, v: str) -> Token:
        if self.tok.value != v or self.tok.kind not in ("PUNCT", "IDENT"):
            raise self.error([v])
        t = self.tok
        self.i += 1
        return t

    def accept(self, v: str) -> bool:
        if self.tok.kind in ("PUNCT", "IDENT") and self.tok.value == v:
            self.i += 1
            return True
        return False

    def ident(self) -> Token:
        if self.tok.kind != "IDENT":
            raise self.error(["identifier"])
        t = self.tok
        self.i += 1
        return t

    def number(self) -> tuple[float, Token]:
        if self.tok.kind != "NUMBER":
            raise self.error(["number"])
        t = self.tok
        self.i += 1
        return float(t.value), t

    def names(self) -> list[Token]:
        out = [self.ident()]
        while self.accept(","):
            out.append(self.ident())
        return out

    def parse(self, name: str) -> EnvSpec:
        header: dict[str, object] = {}
        rows: dict = {}
        hist: dict = {}
        while self.tok.kind == "IDENT" and self.tok.value in _HEADERS:
            key = self.ident()
            if key.value in header:
                raise DuplicateSymbol(f"duplicate header {key.value}", key.line, key.col)
            self.expect(":")
            if key.value in ("states", "actions"):
                toks = self.names()
                seen = set()
                for t in toks:
                    if t.value in seen:
                        raise DuplicateSymbol(f"duplicate {key.value[:-1]} {t.value}", t.line, t.col)
                    seen.add(t.value)
                header[key.value] = [t.value for t in toks]
            elif key.value == "gamma":
                header["gamma"] = self.number()
            else:
                header["start"] = self.ident()
        for h in ("states", "actions", "gamma"):
            if h not in header:
                raise self.error([x for x in _HEADERS if x not in header])
        states, actions = header["states"], header["actions"]

        def lookup(t: Token, table, what) -> int:
            if t.value not in table:
                raise UnknownSymbol(f"unknown {what} {t.value}", t.line, t.col)
            return table.index(t.value)

        while self.tok.kind != "EOF":
            open_tok = self.tok
            self.expect("(")
            s = lookup(self.ident(), states, "state")
            self.expect(",")
            a = lookup(self.ident(), actions, "action")
            prev = lookup(self.ident(), actions, "action") if self.accept("|") else None
            self.expect(")")
            self.expect("->")
            self.expect("[")
            outcomes = []
            if not self.accept("]"):
                while True:
                    self.expect("(")
                    r, _ = self.number()
                    self.expect(",")
                    s2 = lookup(self.ident(), states, "state")
                    self.expect(",")
                    p, ptok = self.number()
                    if p < 0:
                        raise DslSyntaxError("probabilities must be nonnegative", ptok.line, ptok.col)
                    self.expect(")")
                    outcomes.append((r, s2, p))
                    if not self.accept(","):
                        break
                self.expect("]")
            self.accept(";")
            total = sum(p for _, _, p in outcomes)
            if abs(total - 1.0) > 1e-9:
                raise DslSyntaxError(
                    f"probabilities sum to {total:g}, not 1", open_tok.line, open_tok.col
                )
            key = (s, a) if prev is None else (s, a, prev)
            target = rows if prev is None else hist
            if key in target:
                raise DuplicateSymbol(f"duplicate row for {key}", open_tok.line, open_tok.col)
            target[key] = tuple(outcomes)
        for s in range(len(states)):
            for a in range(len(actions)):
                if (s, a) not in rows:
                    t = self.tok
                    raise DslSyntaxError(f"no row for ({states[s]}, {actions[a]})", t.line, t.col)
        gamma, gtok = header["gamma"]
        if not 0 <= gamma < 1:
            raise DslSyntaxError("gamma must lie in [0,1)", gtok.line, gtok.col)
        start = lookup(header["start"], states, "state") if "start" in header else 0
        return EnvSpec(tuple(states), tuple(actions), rows, gamma, start, hist, name)


def parse_env(text: str, name: str = "") -> EnvSpec:
    return _EnvParser(text).parse(name)


def _num(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


def render_env(env: EnvSpec) -> str:
    out = [
        f"states: {', '.join(env.states)}",
        f"actions: {', '.join(env.actions)}",
        f"gamma: {repr(float(env.gamma))}",
        f"start: {env.states[env.start]}",
    ]

    def row(r):
        return "[" + ", ".join(f"({_num(rw)}, {env.states[s2]}, {_num(p)})" for rw, s2, p in r) + "]"

    for s in range(env.nS):
        for a in range(env.nA):
            out.append(f"({env.states[s]}, {env.actions[a]}) -> {row(env.kernel[(s, a)])}")
    for (s, a, b) in sorted(env.history):
        out.append(f"({env.states[s]}, {env.actions[a]} | {env.actions[b]}) -> {row(env.history[(s, a, b)])}")
    return "\n".join(out) + "\n"
