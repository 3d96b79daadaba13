"""Recursive-descent parser for architecture and morphism files.

Parsing produces a small AST with token positions; resolution against the
declared presentations happens afterwards so unknown and duplicate symbols
are reported at the offending token.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..archcat import Architecture, ArchMorphism
from ..constraint import Constraint, ConstraintKind, Ref, RefKind, ScopeRef
from ..diagram import (
    DiagramError,
    Edge,
    GeneratorSymbol,
    OpenHypergraph,
    TypeSymbol,
    og_compose,
    og_generator,
    og_identity,
    og_spider,
    og_symmetry,
    og_tensor,
)
from ..interface import RelationalInterface
from ..signature import HypergraphPresentation, SyntaxPattern
from .lexer import DslSyntaxError, DuplicateSymbol, Token, UnknownSymbol, tokenize

__all__ = [
    "Document",
    "Expr",
    "Seq",
    "Tensor",
    "GenAtom",
    "StructAtom",
    "SpiderAtom",
    "NetAtom",
    "parse_document",
    "parse_expr",
    "build_diagram",
    "format_expr",
    "STRUCT_ARITY",
]

STRUCT_ARITY = {
    "copy": (1, 2),
    "merge": (2, 1),
    "unit": (0, 1),
    "counit": (1, 0),
    "cap": (2, 0),
    "cup": (0, 2),
}
_STRUCT = {"id", "sym", "spider", *STRUCT_ARITY}
_RESERVED = _STRUCT | {"net", "I"}
_KINDS = {k.value for k in ConstraintKind}
_STATEMENT_KEYWORDS = {
    "types", "generators", "equations", "pattern", "knowledge", "interface", "constraints",
    "type", "ktype", "gen", "kgen", "support", "bindings", "table",
}
_REF_PREFIX = {
    "syn": RefKind.SYN_TYPE,
    "know": RefKind.KNOW_TYPE,
    "sgen": RefKind.SYN_GEN,
    "kgen": RefKind.KNOW_GEN,
}


# ------------------------------------------------------------------ expression AST


class Expr:
    tok: Token


@dataclass
class Seq(Expr):
    parts: list
    tok: Token


@dataclass
class Tensor(Expr):
    parts: list
    tok: Token


@dataclass
class GenAtom(Expr):
    name: str
    tok: Token


@dataclass
class TypeRef:
    name: str
    tok: Token


@dataclass
class StructAtom(Expr):
    kind: str
    args: list  # list of lists of TypeRef (tensor types)
    tok: Token


@dataclass
class SpiderAtom(Expr):
    type: TypeRef
    m: int
    n: int
    tok: Token


@dataclass
class WireRef:
    name: str
    type: TypeRef | None
    tok: Token


@dataclass
class NetStmt:
    gen: str
    ins: list
    outs: list
    tok: Token


@dataclass
class NetAtom(Expr):
    ins: list
    outs: list
    body: list  # NetStmt or WireRef (bare wire declarations)
    tok: Token


# ------------------------------------------------------------------ declaration AST


@dataclass
class TypeDecl:
    name: str
    display: str | None
    tok: Token


@dataclass
class GenDecl:
    name: str
    dom: list
    cod: list
    family: str | None
    tok: Token


@dataclass
class LayerDecl:
    types: list = field(default_factory=list)
    gens: list = field(default_factory=list)
    eqs: list = field(default_factory=list)


@dataclass
class ConstraintDecl:
    kind: str
    id: str
    refs: list
    params: dict
    tok: Token


@dataclass
class ArchDecl:
    name: str
    tok: Token
    syn: LayerDecl = field(default_factory=LayerDecl)
    know: LayerDecl = field(default_factory=LayerDecl)
    pattern: Expr | None = None
    support: list = field(default_factory=list)
    bindings: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    cols: list = field(default_factory=list)
    constraints: list = field(default_factory=list)


@dataclass
class MorphDecl:
    name: str
    source: Token
    target: Token
    tok: Token
    items: list = field(default_factory=list)  # (keyword, name_tok, value)


@dataclass
class Document:
    architectures: list = field(default_factory=list)
    morphisms: list = field(default_factory=list)

    def architecture(self, name: str) -> Architecture:
        for a in self.architectures:
            if a.name == name:
                return a
        raise KeyError(name)

    def morphism(self, name: str) -> ArchMorphism:
        for m in self.morphisms:
            if m.name == name:
                return m
        raise KeyError(name)


# ------------------------------------------------------------------ parser


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.in_equations = False

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        t = self.tok
        return t.kind in ("PUNCT", "IDENT") and t.value == value

    def error(self, expected) -> DslSyntaxError:
        t = self.tok
        return DslSyntaxError(f"unexpected {t}", t.line, t.col, expected)

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise self.error([value])
        t = self.tok
        self.i += 1
        return t

    def accept(self, value: str) -> Token | None:
        if self.at(value):
            t = self.tok
            self.i += 1
            return t
        return None

    def ident(self, what: str = "identifier", allow_reserved: bool = False) -> Token:
        t = self.tok
        if t.kind != "IDENT" or (not allow_reserved and t.value in _RESERVED):
            raise self.error([what])
        self.i += 1
        return t

    def string(self) -> Token:
        t = self.tok
        if t.kind != "STRING":
            raise self.error(["string"])
        self.i += 1
        return t

    def integer(self) -> int:
        t = self.tok
        if t.kind != "NUMBER" or not t.value.lstrip("-").isdigit():
            raise self.error(["integer"])
        self.i += 1
        return int(t.value)

    # -- file level

    def document(self) -> tuple[list, list]:
        archs, morphs = [], []
        while self.tok.kind != "EOF":
            if self.at("architecture"):
                archs.append(self.architecture())
            elif self.at("morphism"):
                morphs.append(self.morphism())
            else:
                raise self.error(["architecture", "morphism"])
        return archs, morphs

    def block(self, item: Callable[[], None]) -> None:
        self.expect("{")
        while not self.at("}"):
            if self.tok.kind == "EOF":
                raise self.error(["}"])
            item()
        self.expect("}")

    def architecture(self) -> ArchDecl:
        kw = self.expect("architecture")
        decl = ArchDecl(self.ident("architecture name").value, kw)

        def item():
            if self.at("types"):
                self.types_block(decl.syn)
            elif self.at("generators"):
                self.gens_block(decl.syn)
            elif self.at("equations"):
                self.eqs_block(decl.syn)
            elif self.at("pattern"):
                self.i += 1
                self.expect("=")
                decl.pattern = self.expr()
                self.expect(";")
            elif self.at("knowledge"):
                self.i += 1
                self.block(self.layer_item(decl.know))
            elif self.at("interface"):
                self.i += 1
                self.block(lambda: self.interface_item(decl))
            elif self.at("constraints"):
                self.i += 1
                self.block(lambda: decl.constraints.append(self.constraint()))
            else:
                raise self.error(
                    ["types", "generators", "equations", "pattern", "knowledge", "interface", "constraints", "}"]
                )

        self.block(item)
        return decl

    def layer_item(self, layer: LayerDecl):
        def item():
            if self.at("types"):
                self.types_block(layer)
            elif self.at("generators"):
                self.gens_block(layer)
            elif self.at("equations"):
                self.eqs_block(layer)
            else:
                raise self.error(["types", "generators", "equations", "}"])

        return item

    def types_block(self, layer: LayerDecl) -> None:
        self.expect("types")

        def item():
            t = self.ident("type name")
            disp = self.string().value if self.tok.kind == "STRING" else None
            self.expect(";")
            layer.types.append(TypeDecl(t.value, disp, t))

        self.block(item)

    def tensor_type(self) -> list[TypeRef]:
        if self.accept("I"):
            return []
        out = [self._typeref()]
        while self.accept("*"):
            out.append(self._typeref())
        return out

    def _typeref(self) -> TypeRef:
        t = self.ident("type name")
        return TypeRef(t.value, t)

    def gens_block(self, layer: LayerDecl) -> None:
        self.expect("generators")

        def item():
            t = self.ident("generator name")
            self.expect(":")
            dom = self.tensor_type()
            self.expect("->")
            cod = self.tensor_type()
            fam = self.ident("family name").value if self.accept("family") else None
            self.expect(";")
            layer.gens.append(GenDecl(t.value, dom, cod, fam, t))

        self.block(item)

    def eqs_block(self, layer: LayerDecl) -> None:
        self.expect("equations")

        def item():
            lhs = self.expr()
            self.expect("=")
            self.in_equations = True
            try:
                rhs = self.expr()
            finally:
                self.in_equations = False
            self.expect(";")
            layer.eqs.append((lhs, rhs))

        self.block(item)

    def interface_item(self, decl: ArchDecl) -> None:
        if self.accept("support"):

            def pair():
                self.expect("(")
                s = self.ident("syntax type")
                self.expect(",")
                k = self.ident("knowledge type")
                self.expect(")")
                self.expect(";")
                decl.support.append((s, k))

            self.block(pair)
        elif self.accept("bindings"):

            def binding():
                g = self.ident("generator name")
                self.expect("->")
                e = self.expr()
                self.expect(";")
                decl.bindings.append((g, e))

            self.block(binding)
        elif self.accept("table"):
            self.expect("rows")
            self.expect("(")
            decl.rows = self.comma(lambda: self.ident("knowledge type"), ")")
            self.expect("cols")
            self.expect("(")

            def col():
                if self.accept("("):
                    return self.comma(lambda: self.ident("syntax type"), ")")
                return [self.ident("syntax type")]

            decl.cols = self.comma(col, ")")
            self.expect(";")
        else:
            raise self.error(["support", "bindings", "table", "}"])

    def comma(self, item, close: str) -> list:
        out = []
        if self.accept(close):
            return out
        out.append(item())
        while self.accept(","):
            out.append(item())
        self.expect(close)
        return out

    def constraint(self) -> ConstraintDecl:
        t = self.tok
        if t.kind != "IDENT" or t.value not in _KINDS:
            raise self.error(sorted(_KINDS) + ["}"])
        self.i += 1
        cid = self.string().value
        self.expect("scope")
        self.expect("(")
        refs = self.comma(self.scope_ref, ")")
        params: dict = {}
        if self.accept("params"):
            self.expect("(")

            def param():
                k = self.ident("parameter name")
                self.expect("=")
                params[k.value] = self.value()

            self.comma(param, ")")
        self.expect(";")
        return ConstraintDecl(t.value, cid, refs, params, t)

    def scope_ref(self):
        if self.accept("("):
            s = self.ident("syntax type")
            self.expect(",")
            k = self.ident("knowledge type")
            self.expect(")")
            return (Ref(f"{s.value},{k.value}", RefKind.PAIR), s)
        t = self.ident("symbol")
        if t.value in _REF_PREFIX and self.accept(":"):
            n = self.ident("symbol")
            return (Ref(n.value, _REF_PREFIX[t.value]), n)
        return (Ref(t.value), t)

    def value(self):
        t = self.tok
        if t.kind == "NUMBER":
            self.i += 1
            v = t.value
            return int(v) if v.lstrip("-").isdigit() else float(v)
        if t.kind == "STRING":
            self.i += 1
            return t.value
        if t.kind == "IDENT":
            self.i += 1
            return t.value
        if self.accept("["):
            return self.comma(self.value, "]")
        raise self.error(["number", "string", "identifier", "["])

    def morphism(self) -> MorphDecl:
        kw = self.expect("morphism")
        name = self.ident("morphism name")
        self.expect(":")
        src = self.ident("architecture name")
        self.expect("->")
        dst = self.ident("architecture name")
        decl = MorphDecl(name.value, src, dst, kw)

        def item():
            for key in ("type", "ktype"):
                if self.accept(key):
                    a = self.ident("type name")
                    self.expect("->")
                    b = self.ident("type name")
                    self.expect(";")
                    decl.items.append((key, a, b))
                    return
            for key in ("gen", "kgen"):
                if self.accept(key):
                    a = self.ident("generator name")
                    self.expect("->")
                    e = self.expr()
                    self.expect(";")
                    decl.items.append((key, a, e))
                    return
            raise self.error(["type", "ktype", "gen", "kgen", "}"])

        self.block(item)
        return decl

    # -- expressions: ';' binds looser than '*'

    def expr(self) -> Expr:
        first = self.tensor()
        parts = [first]
        while self.at(";") and self._continues_expr():
            self.i += 1
            parts.append(self.tensor())
        return parts[0] if len(parts) == 1 else Seq(parts, first.tok)

    def _continues_expr(self) -> bool:
        """Decide whether the ';' under the cursor composes or ends a statement."""
        nxt = self.peek()
        if nxt.kind == "PUNCT":
            return nxt.value == "("
        if nxt.kind != "IDENT" or nxt.value in _STATEMENT_KEYWORDS:
            return False
        after = self.peek(2)
        if after.kind == "PUNCT" and after.value == "->" and nxt.value != "net":
            return False
        if self.in_equations:
            # a depth-0 '=' before the next statement end starts a new equation
            depth, j = 0, self.i + 1
            while True:
                t = self.toks[j]
                if t.kind == "EOF":
                    break
                if t.kind == "PUNCT":
                    if t.value in "([{":
                        depth += 1
                    elif t.value in ")]}":
                        depth -= 1
                        if depth < 0:
                            break
                    elif depth == 0 and t.value == ";":
                        break
                    elif depth == 0 and t.value == "=":
                        return False
                j += 1
        return True

    def tensor(self) -> Expr:
        first = self.atom()
        parts = [first]
        while self.accept("*"):
            parts.append(self.atom())
        return parts[0] if len(parts) == 1 else Tensor(parts, first.tok)

    def atom(self) -> Expr:
        t = self.tok
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind != "IDENT":
            raise self.error(["(", "generator name", "net", *sorted(_STRUCT)])
        if t.value == "net":
            return self.net()
        if t.value == "spider":
            self.i += 1
            self.expect("[")
            ty = self._typeref()
            self.expect(",")
            m = self.integer()
            self.expect(",")
            n = self.integer()
            self.expect("]")
            return SpiderAtom(ty, m, n, t)
        if t.value in _STRUCT:
            self.i += 1
            self.expect("[")
            if t.value == "sym":
                p = self.tensor_type()
                self.expect(",")
                q = self.tensor_type()
                args = [p, q]
            elif t.value == "id":
                args = [self.tensor_type()]
            else:
                args = [[self._typeref()]]
            self.expect("]")
            return StructAtom(t.value, args, t)
        if t.value == "I":
            raise self.error(["(", "generator name", "net", *sorted(_STRUCT)])
        self.i += 1
        return GenAtom(t.value, t)

    def wire(self) -> WireRef:
        t = self.ident("wire name")
        ty = self._typeref() if self.accept(":") else None
        return WireRef(t.value, ty, t)

    def net(self) -> NetAtom:
        kw = self.expect("net")
        self.expect("[")
        ins = self.comma(self.wire, "]")
        self.expect("->")
        self.expect("[")
        outs = self.comma(self.wire, "]")
        body: list = []

        def stmt():
            t = self.ident("generator or wire name")
            if self.accept(":"):
                ty = self._typeref()
                self.expect(";")
                body.append(WireRef(t.value, ty, t))
                return
            self.expect("(")
            args = self.comma(self.wire, ")")
            self.expect("->")
            self.expect("[")
            res = self.comma(self.wire, "]")
            self.expect(";")
            body.append(NetStmt(t.value, args, res, t))

        self.block(stmt)
        return NetAtom(ins, outs, body, kw)


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "EOF":
        raise p.error(["end of input", "*", ";"])
    return e


# ------------------------------------------------------------------ diagram building


def _type(pres: HypergraphPresentation, ref: TypeRef) -> TypeSymbol:
    if not pres.has_type(ref.name):
        raise UnknownSymbol(f"unknown type {ref.name}", ref.tok.line, ref.tok.col)
    return pres.type_named(ref.name)


def build_diagram(e: Expr, pres: HypergraphPresentation) -> OpenHypergraph:
    try:
        return _build(e, pres)
    except DiagramError as err:
        raise DslSyntaxError(str(err), e.tok.line, e.tok.col) from None


def _build(e: Expr, pres: HypergraphPresentation) -> OpenHypergraph:
    if isinstance(e, Seq):
        d = _build(e.parts[0], pres)
        for part in e.parts[1:]:
            nxt = _build(part, pres)
            try:
                d = og_compose(d, nxt)
            except DiagramError as err:
                raise DslSyntaxError(f"cannot compose: {err}", part.tok.line, part.tok.col) from None
        return d
    if isinstance(e, Tensor):
        d = _build(e.parts[0], pres)
        for part in e.parts[1:]:
            d = og_tensor(d, _build(part, pres))
        return d
    if isinstance(e, GenAtom):
        if not pres.has_generator(e.name):
            raise UnknownSymbol(f"unknown generator {e.name}", e.tok.line, e.tok.col)
        return og_generator(pres.generator_named(e.name))
    if isinstance(e, SpiderAtom):
        return og_spider(_type(pres, e.type), e.m, e.n)
    if isinstance(e, StructAtom):
        ts = [[_type(pres, r) for r in arg] for arg in e.args]
        if e.kind == "id":
            return og_identity(ts[0])
        if e.kind == "sym":
            return og_symmetry(ts[0], ts[1])
        m, n = STRUCT_ARITY[e.kind]
        return og_spider(ts[0][0], m, n)
    if isinstance(e, NetAtom):
        return _build_net(e, pres)
    raise TypeError(e)


def _build_net(e: NetAtom, pres: HypergraphPresentation) -> OpenHypergraph:
    order: list[str] = []
    types: dict[str, TypeSymbol] = {}
    first: dict[str, Token] = {}

    def note(w: WireRef, inferred: TypeSymbol | None):
        if w.name not in first:
            first[w.name] = w.tok
            order.append(w.name)
        for t in ([_type(pres, w.type)] if w.type else []) + ([inferred] if inferred else []):
            have = types.get(w.name)
            if have is None:
                types[w.name] = t
            elif have != t:
                raise DslSyntaxError(
                    f"wire {w.name} used at type {t.name} but has type {have.name}", w.tok.line, w.tok.col
                )

    stmts = []
    for w in e.ins:
        note(w, None)
    for s in e.body:
        if isinstance(s, WireRef):
            note(s, None)
            continue
        if not pres.has_generator(s.gen):
            raise UnknownSymbol(f"unknown generator {s.gen}", s.tok.line, s.tok.col)
        g = pres.generator_named(s.gen)
        if len(s.ins) != len(g.dom) or len(s.outs) != len(g.cod):
            raise DslSyntaxError(
                f"{g.name} takes {len(g.dom)} inputs and {len(g.cod)} outputs", s.tok.line, s.tok.col
            )
        for w, t in zip(s.ins, g.dom):
            note(w, t)
        for w, t in zip(s.outs, g.cod):
            note(w, t)
        stmts.append((g, s))
    for w in e.outs:
        note(w, None)
    for name in order:
        if name not in types:
            t = first[name]
            raise DslSyntaxError(f"wire {name} has no type", t.line, t.col)
    idx = {n: i for i, n in enumerate(order)}
    edges = tuple(Edge(g, tuple(idx[w.name] for w in s.ins), tuple(idx[w.name] for w in s.outs)) for g, s in stmts)
    return OpenHypergraph(
        tuple(types[n] for n in order),
        edges,
        tuple(idx[w.name] for w in e.ins),
        tuple(idx[w.name] for w in e.outs),
    )


def format_expr(e: Expr) -> str:
    """Print an expression with the fewest parentheses the grammar allows."""
    if isinstance(e, Seq):
        return " ; ".join(format_expr(p) for p in e.parts)
    if isinstance(e, Tensor):
        return " * ".join(f"({format_expr(p)})" if isinstance(p, Seq) else format_expr(p) for p in e.parts)
    if isinstance(e, GenAtom):
        return e.name
    if isinstance(e, SpiderAtom):
        return f"spider[{e.type.name}, {e.m}, {e.n}]"
    if isinstance(e, StructAtom):
        args = ", ".join(" * ".join(r.name for r in a) or "I" for a in e.args)
        return f"{e.kind}[{args}]"
    if isinstance(e, NetAtom):
        from .render import render_diagram_ast

        return render_diagram_ast(e)
    raise TypeError(e)


# ------------------------------------------------------------------ resolution


def _layer(decl: LayerDecl) -> HypergraphPresentation:
    seen: dict[str, Token] = {}
    types = []
    display = {}
    for t in decl.types:
        if t.name in seen:
            raise DuplicateSymbol(f"duplicate type {t.name}", t.tok.line, t.tok.col)
        seen[t.name] = t.tok
        types.append(TypeSymbol(t.name))
        if t.display is not None:
            display[t.name] = t.display
    pres = HypergraphPresentation(tuple(types), (), (), display)
    gens = []
    gseen: set[str] = set()
    for g in decl.gens:
        if g.name in gseen:
            raise DuplicateSymbol(f"duplicate generator {g.name}", g.tok.line, g.tok.col)
        gseen.add(g.name)
        gens.append(
            GeneratorSymbol(g.name, tuple(_type(pres, r) for r in g.dom), tuple(_type(pres, r) for r in g.cod), g.family)
        )
    pres = HypergraphPresentation(tuple(types), tuple(gens), (), display)
    eqs = []
    for lhs, rhs in decl.eqs:
        a, b = build_diagram(lhs, pres), build_diagram(rhs, pres)
        if a.dom != b.dom or a.cod != b.cod:
            raise DslSyntaxError("equation sides have different boundary types", lhs.tok.line, lhs.tok.col)
        eqs.append((a, b))
    return HypergraphPresentation(tuple(types), tuple(gens), tuple(eqs), display)


def resolve_arch(decl: ArchDecl) -> Architecture:
    syn = _layer(decl.syn)
    know = _layer(decl.know)
    pattern = build_diagram(decl.pattern, syn) if decl.pattern is not None else og_identity([])
    support = set()
    for s, k in decl.support:
        if not syn.has_type(s.value):
            raise UnknownSymbol(f"unknown syntax type {s.value}", s.line, s.col)
        if not know.has_type(k.value):
            raise UnknownSymbol(f"unknown knowledge type {k.value}", k.line, k.col)
        support.add((TypeSymbol(s.value), TypeSymbol(k.value)))
    bindings = {}
    for g, e in decl.bindings:
        if not syn.has_generator(g.value):
            raise UnknownSymbol(f"unknown generator {g.value}", g.line, g.col)
        if g.value in bindings:
            raise DuplicateSymbol(f"duplicate binding for {g.value}", g.line, g.col)
        bindings[g.value] = build_diagram(e, know)
    for t in decl.rows:
        if not know.has_type(t.value):
            raise UnknownSymbol(f"unknown knowledge type {t.value}", t.line, t.col)
    for col in decl.cols:
        for t in col:
            if not syn.has_type(t.value):
                raise UnknownSymbol(f"unknown syntax type {t.value}", t.line, t.col)
    iface = RelationalInterface(
        frozenset(support),
        bindings,
        frozenset(syn.types),
        frozenset(know.types),
        tuple(t.value for t in decl.rows),
        tuple(tuple(t.value for t in c) for c in decl.cols),
    )
    cons = []
    ids: set[str] = set()
    for c in decl.constraints:
        if c.id in ids:
            raise DuplicateSymbol(f"duplicate constraint {c.id}", c.tok.line, c.tok.col)
        ids.add(c.id)
        try:
            cons.append(Constraint(c.id, ConstraintKind(c.kind), ScopeRef(frozenset(r for r, _ in c.refs)), c.params))
        except ValueError as err:
            raise DslSyntaxError(str(err), c.tok.line, c.tok.col) from None
    arch = Architecture(decl.name, syn, SyntaxPattern(pattern), know, iface, tuple(cons))
    _check_scopes(arch, decl)
    return arch


def _check_scopes(arch: Architecture, decl: ArchDecl) -> None:
    from ..constraint import UnknownRef, scope_resolve

    for c in decl.constraints:
        for r, tok in c.refs:
            try:
                scope_resolve(arch, ScopeRef(frozenset([r])))
            except UnknownRef as err:
                raise UnknownSymbol(str(err.args[0]), tok.line, tok.col) from None


def resolve_morphism(decl: MorphDecl, lookup: Callable[[str], Architecture | None]) -> ArchMorphism:
    src, dst = lookup(decl.source.value), lookup(decl.target.value)
    for a, t in ((src, decl.source), (dst, decl.target)):
        if a is None:
            raise UnknownSymbol(f"unknown architecture {t.value}", t.line, t.col)
    maps: dict[str, dict] = {"type": {}, "ktype": {}, "gen": {}, "kgen": {}}
    for key, a, v in decl.items:
        layer_src = src.syn if key in ("type", "gen") else src.know
        layer_dst = dst.syn if key in ("type", "gen") else dst.know
        if a.value in maps[key]:
            raise DuplicateSymbol(f"{a.value} is mapped twice", a.line, a.col)
        if key in ("type", "ktype"):
            if not layer_src.has_type(a.value):
                raise UnknownSymbol(f"unknown type {a.value} in {src.name}", a.line, a.col)
            if not layer_dst.has_type(v.value):
                raise UnknownSymbol(f"unknown type {v.value} in {dst.name}", v.line, v.col)
            maps[key][a.value] = v.value
        else:
            if not layer_src.has_generator(a.value):
                raise UnknownSymbol(f"unknown generator {a.value} in {src.name}", a.line, a.col)
            maps[key][a.value] = build_diagram(v, layer_dst)
    return ArchMorphism(decl.name, src, dst, maps["type"], maps["gen"], maps["ktype"], maps["kgen"])


def parse_document(text: str, lookup: Callable[[str], Architecture | None] | None = None) -> Document:
    p = _Parser(text)
    arch_decls, morph_decls = p.document()
    doc = Document()
    names: set[str] = set()
    for d in arch_decls:
        if d.name in names:
            raise DuplicateSymbol(f"duplicate architecture {d.name}", d.tok.line, d.tok.col)
        names.add(d.name)
        doc.architectures.append(resolve_arch(d))

    def find(name: str):
        for a in doc.architectures:
            if a.name == name:
                return a
        return lookup(name) if lookup else None

    for d in morph_decls:
        doc.morphisms.append(resolve_morphism(d, find))
    return doc
