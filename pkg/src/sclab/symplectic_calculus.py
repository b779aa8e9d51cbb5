"""Connection-dependent differential operators on symmetric tensor fields.

The reference connection is the flat coordinate derivative on the torus,
which is torsion-free and preserves the Darboux form.  A general symplectic
connection is the flat one plus a fully symmetric degree-3 difference
tensor Pi; every covariant derivative here expands term by term as

    nabla_i T_{j...} = d_i T_{j...} - sum_slots Pi_{i j_s}{}^p T_{...p...}

through the single routine cov_deriv_component.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact_scalars import TrigScalar, ts_sum
from .sym_tensors import (
    Idx,
    MixedTensorField,
    SymplecticModel,
    SymTensorField,
    TensorBase,
    algebraic_bracket,
    build_mixed_field,
    build_sym_field,
)


@dataclass(frozen=True)
class DiffOperatorContext:
    """A symplectic connection presented as flat plus a symmetric difference."""

    model: SymplecticModel
    pi: SymTensorField | None = None

    def __post_init__(self):
        if self.pi is not None:
            if self.pi.degree != 3:
                raise ValueError("difference tensor must have degree 3")
            if self.pi.model != self.model:
                raise ValueError("model mismatch")

    @property
    def is_flat(self) -> bool:
        return self.pi is None or self.pi.is_zero()


def flat_context(model: SymplecticModel) -> DiffOperatorContext:
    return DiffOperatorContext(model)


def cov_deriv_component(ctx: DiffOperatorContext, t: TensorBase, i: int, idx: Idx) -> TrigScalar:
    """Component (nabla_i t)_idx of the covariant derivative."""
    val = t.get(idx).partial(i)
    pi = ctx.pi
    if pi is None:
        return val
    model = ctx.model
    dim = model.dim
    corrections = [val]
    for s, j in enumerate(idx):
        for p in range(dim):
            # Pi_{i j}{}^p = Omega^{pq} Pi_{i j q} with q = partner(p)
            q = model.partner(p)
            coef = pi.get((i, j, q))
            if coef.is_zero():
                continue
            rest = t.get(idx[:s] + (p,) + idx[s + 1 :])
            if rest.is_zero():
                continue
            term = coef * rest
            corrections.append(-term if model.omega_sign(p) == 1 else term)
    return ts_sum(corrections, t.model.dim, t.exact)


def delta_star(ctx: DiffOperatorContext, a: SymTensorField) -> SymTensorField:
    """Symmetrized covariant derivative with a sign:
    (d* a)_{i_1..i_{k+1}} = -nabla_{(i_1} a_{i_2..i_{k+1})}.  On scalars d*f = -df.
    """

    def fn(t: Idx) -> TrigScalar:
        return -cov_deriv_component(ctx, a, t[0], t[1:])

    return build_sym_field(a.model, a.degree + 1, fn, a.exact)


def delta_star_scalar(model: SymplecticModel, f: TrigScalar) -> SymTensorField:
    """d*f = -df; connection independent."""
    comps = {}
    for i in range(model.dim):
        v = -f.partial(i)
        if not v.is_zero():
            comps[(i,)] = v
    return SymTensorField(model, 1, comps, f.exact)


def delta(ctx: DiffOperatorContext, a: SymTensorField) -> SymTensorField:
    """Symplectic divergence:
    (d a)_{i_1..i_{k-1}} = (-1)^{k-1} nabla_p a_{i_1..i_{k-1}}{}^p.
    """
    k = a.degree
    if k < 1:
        raise ValueError("divergence needs degree >= 1")
    model = a.model
    dim = model.dim
    sign = Fraction((-1) ** (k - 1))

    def fn(t: Idx) -> TrigScalar:
        vals = []
        for p in range(dim):
            q = model.partner(p)
            s = model.omega_sign(p)  # Omega^{pq}
            term = cov_deriv_component(ctx, a, p, t + (q,))
            vals.append(term if s == 1 else -term)
        return ts_sum(vals, dim, a.exact)

    # contraction of a symmetric tensor in its free slots stays symmetric
    return build_sym_field(model, k - 1, fn, a.exact).scale(sign)


def d_nabla(ctx: DiffOperatorContext, a: SymTensorField) -> MixedTensorField:
    """Antisymmetrized derivative (d_nabla a)_{i j ...} = 2 nabla_{[i} a_{j] ...}."""
    k = a.degree
    if k < 1:
        raise ValueError("d_nabla needs degree >= 1")
    blocks = (("a", 2), ("s", k - 1))

    def fn(t: Idx) -> TrigScalar:
        i, j, rest = t[0], t[1], t[2:]
        return cov_deriv_component(ctx, a, i, (j,) + rest) - cov_deriv_component(
            ctx, a, j, (i,) + rest
        )

    return build_mixed_field(a.model, blocks, fn, a.exact)


def schouten(ctx: DiffOperatorContext, a: SymTensorField, b: SymTensorField) -> SymTensorField:
    """Degree -1 bracket transported from the cotangent-bundle Poisson structure:

        [[a, b]] = -k a_{p(i_1..} nabla^p b_{..)} + l b_{p(..} nabla^p a_{..)}.

    The value does not depend on the symmetric difference carried by ctx;
    callers normally pass the flat context.
    """
    if a.model != b.model:
        raise ValueError("model mismatch")
    model = a.model
    k, l = a.degree, b.degree
    deg = k + l - 1
    if deg < 0:
        return SymTensorField.zero(model, 0, a.exact)
    if k == 0 and l == 0:
        return SymTensorField.zero(model, 0, a.exact)
    dim = model.dim
    ka = Fraction(k)
    lb = Fraction(l)

    def fn(t: Idx) -> TrigScalar:
        vals = []
        for p in range(dim):
            q = model.partner(p)
            s = 1 if model.omega_sign(p) == 1 else -1  # Omega^{pq}
            if k:
                term = a.get((p,) + t[: k - 1]) * cov_deriv_component(ctx, b, q, t[k - 1 :])
                term = term.scale(-ka)
                vals.append(term if s == 1 else -term)
            if l:
                term = b.get((p,) + t[: l - 1]) * cov_deriv_component(ctx, a, q, t[l - 1 :])
                term = term.scale(lb)
                vals.append(term if s == 1 else -term)
        return ts_sum(vals, dim, a.exact)

    return build_sym_field(model, deg, fn, a.exact)


def is_closed_oneform(model: SymplecticModel, x: SymTensorField) -> bool:
    if x.degree != 1:
        return False
    for i in range(model.dim):
        for j in range(i + 1, model.dim):
            if not (x.get((j,)).partial(i) - x.get((i,)).partial(j)).is_zero():
                return False
    return True


def is_exact_oneform(model: SymplecticModel, x: SymTensorField) -> bool:
    """Exact on the torus: closed with no harmonic (constant-coefficient) part."""
    if not is_closed_oneform(model, x):
        return False
    zero = (0,) * model.dim
    return all(zero not in x.get((i,)).terms for i in range(model.dim))


def scalar_potential(model: SymplecticModel, x: SymTensorField) -> TrigScalar:
    """A function f with df = x, for an exact one-form; mean-zero choice."""
    if not is_exact_oneform(model, x):
        raise ValueError("one-form is not exact")
    terms = {}
    for i in range(model.dim):
        for m, c in x.get((i,)).terms.items():
            if m in terms or not m[i]:
                continue
            # df coefficient at m along axis i is i*m_i*f_m
            terms[m] = c * _inv_i_times(m[i])
    return TrigScalar(model.dim, terms, x.exact)


def _inv_i_times(k: int):
    from .exact_scalars import GaussianRational

    return GaussianRational(0, Fraction(-1, k))


def lie_derivative(ctx: DiffOperatorContext, xflat: SymTensorField, a: SymTensorField) -> SymTensorField:
    """Lie derivative along the symplectic field dual to the closed one-form xflat."""
    if xflat.degree != 1:
        raise ValueError("xflat must be a one-form")
    if not is_closed_oneform(ctx.model, xflat):
        raise ValueError("xflat is not closed")
    return schouten(ctx, xflat, a)


def interior_derivation(model: SymplecticModel, xflat: SymTensorField, a: SymTensorField) -> SymTensorField:
    """Degree-scaled interior product I(X) a = k iota(X) a = -(xflat, a)."""
    if xflat.degree != 1:
        raise ValueError("xflat must be a one-form")
    return -algebraic_bracket(xflat, a)
