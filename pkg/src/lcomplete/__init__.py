"""Exact computations with finitely presented modules, L0F-completion and its
transported abelian and monoidal structure, and certificates about completions
of countably generated modules."""

__version__ = "0.1.0"
