"""Specification, checking and a verified runtime for layered agent architectures."""

from . import rl_runtime as _rl_runtime  # noqa: F401  (registers the RL constraint evaluators)
from .archcat import Architecture, ArchMorphism, arch_validate, morphism_compose, morphism_validate
from .diagram import OpenHypergraph, TypeSymbol, GeneratorSymbol, og_equal

__all__ = [
    "Architecture",
    "ArchMorphism",
    "arch_validate",
    "morphism_compose",
    "morphism_validate",
    "OpenHypergraph",
    "TypeSymbol",
    "GeneratorSymbol",
    "og_equal",
]

__version__ = "0.1.0"
