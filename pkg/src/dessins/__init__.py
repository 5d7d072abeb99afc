"""Enumerate and verify complete regular dessins on K_{p^d, p^e} for odd primes p.

Modules: ``numtheory`` (residue arithmetic), ``group_core`` (the metacyclic
groups and their normal form), ``bicyclic`` (exact generating pairs),
``autgroup`` (automorphisms), ``classify`` (orbit counting and closed forms),
``dessin`` (rotation systems) and ``cli``.
"""
from .classify import theorem_formula, verify
from .group_core import Element, Family, GroupSpec, enumerate_specs

__version__ = "0.1.0"

__all__ = ["Element", "Family", "GroupSpec", "enumerate_specs", "theorem_formula", "verify"]
