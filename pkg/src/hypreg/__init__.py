"""Regulators of higher Chow cycles on products of hyperelliptic curves.

Submodules: ``extalg`` (extensions of finitely generated modules), ``hodge``
(mixed Hodge extensions, Carlson representatives), ``curve`` (periods,
harmonic forms, Abel-Jacobi), ``paths`` (lifted paths, iterated integrals),
``cycles`` (divisors, tame symbols, cycles), ``modular`` (q-series, modular
units), ``regulator`` (both sides of the comparison) and ``cli``.
"""

__version__ = "0.1.0"
