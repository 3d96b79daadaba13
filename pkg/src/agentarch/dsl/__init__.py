"""Textual front end: architecture, morphism and environment files."""

from __future__ import annotations

from pathlib import Path

from .envfile import looks_like_env, parse_env, render_env
from .lexer import DslError, DslSyntaxError, DuplicateSymbol, UnknownSymbol, tokenize
from .parser import Document, build_diagram, format_expr, parse_document, parse_expr
from .render import render, render_architecture, render_diagram, render_morphism

__all__ = [
    "DslError",
    "DslSyntaxError",
    "DuplicateSymbol",
    "UnknownSymbol",
    "Document",
    "parse",
    "parse_file",
    "parse_document",
    "parse_env",
    "parse_expr",
    "build_diagram",
    "format_expr",
    "render",
    "render_architecture",
    "render_morphism",
    "render_diagram",
    "render_env",
    "tokenize",
]


def parse(text: str, lookup=None, name: str = ""):
    """A Document for architecture/morphism text, an EnvSpec for kernel tables."""
    if looks_like_env(text):
        return parse_env(text, name)
    return parse_document(text, lookup)


def parse_file(path, lookup=None):
    p = Path(path)
    return parse(p.read_text(encoding="utf-8"), lookup, p.stem)
