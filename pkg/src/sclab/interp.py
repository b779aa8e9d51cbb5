"""Exact polynomial interpolation over rational nodes.

Functionals and fields along a line conn + t * dir are polynomials in t of
known bounded degree, so sampling at enough rational nodes and solving the
Vandermonde system recovers their coefficients exactly.  Values may be
Fractions or any objects supporting addition and .scale(Fraction).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def lagrange_weights(nodes: Sequence[Fraction]) -> list[list[Fraction]]:
    """Row j holds the weights w such that coeff_j = sum_i w[i] * value[i]
    for the interpolating polynomial through (nodes[i], value[i])."""
    n = len(nodes)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i, xi in enumerate(nodes):
        # Lagrange basis l_i expanded to monomial coefficients
        basis = [Fraction(1)]
        denom = Fraction(1)
        for k, xk in enumerate(nodes):
            if k == i:
                continue
            denom *= xi - xk
            new = [Fraction(0)] * (len(basis) + 1)
            for d, c in enumerate(basis):
                new[d] -= xk * c
                new[d + 1] += c
            basis = new
        for d, c in enumerate(basis):
            rows[d][i] += c / denom
    return rows


def fit_poly(nodes: Sequence[Fraction], values: Sequence):
    """Exact monomial coefficients of the interpolating polynomial.

    The sampled function must be a polynomial of degree < len(nodes);
    otherwise the coefficients are silently wrong, so callers pick the node
    count from the known degree bound.
    """
    if len(nodes) != len(values):
        raise ValueError("need as many values as nodes")
    if len(set(nodes)) != len(nodes):
        raise ValueError("nodes must be distinct")
    rows = lagrange_weights([Fraction(x) for x in nodes])
    return [_combine(values, row) for row in rows]


def _combine(values: Sequence, weights: Sequence[Fraction]):
    acc = None
    for v, w in zip(values, weights):
        term = v * w if isinstance(v, Fraction) else v.scale(w)
        acc = term if acc is None else acc + term
    return acc
