"""Graded Lie brackets on truncated formal sums of symmetric tensors.

Two compatible brackets live on formal sums: the degree -2 fiberwise
bracket and the degree -1 differential one.  Their combinations
[.,.]_{s,t} = s(.,.) + t[[.,.]], the truncated variants, the subalgebra of
sums whose degree-1 part is minus the symmetrized derivative of the
degree-0 part, and the central extension of the quotient triple space by
the nonequivariance cocycle are all built here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .connection_geometry import (
    RIEM_BLOCKS,
    Connection,
    conn_pairing,
    curvature_tensor,
    op_H,
)
from .exact_scalars import TrigScalar, ts_sum
from .sym_tensors import (
    FormalSum,
    Idx,
    MixedTensorField,
    SymplecticModel,
    SymTensorField,
    algebraic_bracket,
    build_mixed_field,
    global_pairing,
)
from .symplectic_calculus import (
    delta,
    delta_star,
    delta_star_scalar,
    flat_context,
    is_closed_oneform,
    schouten,
)

_F1 = Fraction(1)

DEFAULT_MAX_DEGREE = 6


@dataclass(frozen=True)
class BracketParams:
    """The (s, t) weights of the combined bracket s(.,.) + t[[.,.]]."""

    s: Fraction
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        object.__setattr__(self, "t", Fraction(self.t))

    @property
    def degenerate(self) -> bool:
        return self.s == 0 or self.t == 0


def bracket_st(p: BracketParams, a: FormalSum, b: FormalSum) -> FormalSum:
    """[a, b]_{s,t} = s (a, b) + t [[a, b]], degreewise, truncated."""
    if a.model != b.model or a.max_degree != b.max_degree:
        raise ValueError("formal sums live in different truncations")
    model = a.model
    nmax = a.max_degree
    ctx = flat_context(model)
    parts: dict[int, SymTensorField] = {}

    def accumulate(deg: int, field: SymTensorField):
        if deg > nmax or field.is_zero():
            return
        parts[deg] = parts[deg] + field if deg in parts else field

    for i, ai in a.parts.items():
        for j, bj in b.parts.items():
            if p.s:
                accumulate(i + j - 2, algebraic_bracket(ai, bj).scale(p.s))
            if p.t:
                accumulate(i + j - 1, schouten(ctx, ai, bj).scale(p.t))
    return FormalSum(model, nmax, parts, a.exact)


def psi_st(p: BracketParams, a: FormalSum) -> FormalSum:
    """Degreewise rescaling by s^{k-1} t^{2-k}; intertwines [.,.]_{s,t}
    with [.,.]_{1,1}."""
    if p.degenerate:
        raise ValueError("psi needs both parameters nonzero")
    parts = {}
    for k, f in a.parts.items():
        factor = p.s ** (k - 1) * p.t ** (2 - k)
        parts[k] = f.scale(factor)
    return FormalSum(a.model, a.max_degree, parts, a.exact)


def bracket_truncated(kind: str, a: FormalSum, b: FormalSum, k: int | None = None) -> FormalSum:
    """Truncated brackets: 'alg_k' is (pi_k a, pi_k b), 'schouten_k' the same
    for [[.,.]], and 'top' the sum (.,.)_{(2)} + [[.,.]]_{(1)} on sums whose
    degree-1 parts are closed."""
    if kind == "alg_k":
        if k is None or k < 2:
            raise ValueError("alg_k needs k >= 2")
        return bracket_st(BracketParams(1, 0), a.project_low(k), b.project_low(k))
    if kind == "schouten_k":
        if k is None or k < 1:
            raise ValueError("schouten_k needs k >= 1")
        return bracket_st(BracketParams(0, 1), a.project_low(k), b.project_low(k))
    if kind == "top":
        for x in (a, b):
            if not is_closed_oneform(x.model, x.part(1)):
                raise ValueError("top bracket needs closed degree-1 parts")
        return bracket_st(BracketParams(1, 0), a.project_low(2), b.project_low(2)) + bracket_st(
            BracketParams(0, 1), a.project_low(1), b.project_low(1)
        )
    raise ValueError(f"unknown truncated bracket kind {kind!r}")


# -- the Hamiltonian subalgebra -----------------------------------------------


class HamSecElement:
    """Formal sum whose degree-1 part is -d* of its degree-0 part."""

    __slots__ = ("sum",)

    def __init__(self, fs: FormalSum):
        model = fs.model
        want = -delta_star_scalar(model, fs.part(0).scalar())
        if fs.part(1) != want:
            raise ValueError("degree-1 part must equal -d* of the degree-0 part")
        self.sum = fs

    @property
    def model(self) -> SymplecticModel:
        return self.sum.model

    def part(self, k: int) -> SymTensorField:
        return self.sum.part(k)

    def scalar0(self) -> TrigScalar:
        return self.sum.part(0).scalar()

    def __add__(self, other: "HamSecElement") -> "HamSecElement":
        return HamSecElement(self.sum + other.sum)

    def scale(self, q) -> "HamSecElement":
        return HamSecElement(self.sum.scale(q))

    def __eq__(self, other):
        return isinstance(other, HamSecElement) and self.sum == other.sum

    def __repr__(self):
        return f"HamSecElement({self.sum!r})"


def hamsec_make(
    a0: TrigScalar,
    higher: dict[int, SymTensorField] | None = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
    model: SymplecticModel | None = None,
) -> HamSecElement:
    """Build the element with degree-0 part a0; the degree-1 part is forced."""
    if model is None:
        model = SymplecticModel(a0.dim // 2)
    parts: dict[int, SymTensorField] = {}
    if higher:
        for k, f in higher.items():
            if k < 2:
                raise ValueError("higher parts start at degree 2")
            parts[k] = f
    parts[0] = SymTensorField.from_scalar(model, a0)
    parts[1] = -delta_star_scalar(model, a0)
    return HamSecElement(FormalSum(model, max_degree, parts, a0.exact))


def iota(f: TrigScalar, max_degree: int = DEFAULT_MAX_DEGREE) -> HamSecElement:
    """The splitting homomorphism f -> -f + d*f."""
    return hamsec_make(-f, None, max_degree)


def hamsec_bracket(a: HamSecElement, b: HamSecElement) -> HamSecElement:
    """[.,.]_{1,1} restricted to the subalgebra; closure is re-checked."""
    return HamSecElement(bracket_st(BracketParams(1, 1), a.sum, b.sum))


def pi1_project(a: HamSecElement) -> FormalSum:
    """Forget the degree-0 part; lands in sums with exact degree-1 part."""
    return a.sum.project_low(1)


# -- the extension carrier ----------------------------------------------------


class ExtElement:
    """Triple (scalar, degree-2, degree-3) representing the quotient carrier
    of the extended algebra."""

    __slots__ = ("model", "a0", "a2", "a3")

    def __init__(self, model: SymplecticModel, a0: TrigScalar, a2: SymTensorField, a3: SymTensorField):
        if a2.degree != 2 or a3.degree != 3:
            raise ValueError("tensor parts must have degrees 2 and 3")
        if a0.dim != model.dim or a2.model != model or a3.model != model:
            raise ValueError("model mismatch")
        self.model = model
        self.a0 = a0
        self.a2 = a2
        self.a3 = a3

    @classmethod
    def zero(cls, model: SymplecticModel, exact: bool = True) -> "ExtElement":
        return cls(
            model,
            TrigScalar.zero(model.dim, exact),
            SymTensorField.zero(model, 2, exact),
            SymTensorField.zero(model, 3, exact),
        )

    @classmethod
    def random(cls, model: SymplecticModel, band: int, seed: int, mag: int = 2) -> "ExtElement":
        return cls(
            model,
            TrigScalar.random(seed * 101 + 1, model.dim, band, mag),
            SymTensorField.random(model, 2, band, seed * 101 + 2, mag),
            SymTensorField.random(model, 3, band, seed * 101 + 3, mag),
        )

    def __add__(self, other: "ExtElement") -> "ExtElement":
        return ExtElement(self.model, self.a0 + other.a0, self.a2 + other.a2, self.a3 + other.a3)

    def __sub__(self, other: "ExtElement") -> "ExtElement":
        return self + other.scale(-1)

    def scale(self, q) -> "ExtElement":
        return ExtElement(self.model, self.a0.scale(q), self.a2.scale(q), self.a3.scale(q))

    def is_zero(self) -> bool:
        return self.a0.is_zero() and self.a2.is_zero() and self.a3.is_zero()

    def __eq__(self, other):
        if not isinstance(other, ExtElement):
            return NotImplemented
        return (
            self.model == other.model
            and self.a0 == other.a0
            and self.a2 == other.a2
            and self.a3 == other.a3
        )

    def __repr__(self):
        return f"ExtElement(n={self.model.n})"

    def to_payload(self) -> dict:
        return {
            "a0": self.a0.to_payload(),
            "a2": self.a2.to_payload(),
            "a3": self.a3.to_payload(),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ExtElement":
        try:
            a0 = TrigScalar.from_payload(payload["a0"])
            a2 = SymTensorField.from_payload(payload["a2"])
            a3 = SymTensorField.from_payload(payload["a3"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed extension payload: {exc}") from exc
        return cls(SymplecticModel(a0.dim // 2), a0, a2, a3)


def hat_j(a: ExtElement, max_degree: int = DEFAULT_MAX_DEGREE) -> HamSecElement:
    """Lift f + a2 + a3 to iota(f) + a2 + a3 in the subalgebra."""
    return hamsec_make(-a.a0, {2: a.a2, 3: a.a3}, max_degree, a.model)


def j_inverse(fs: FormalSum | HamSecElement) -> ExtElement:
    """Quotient a subalgebra element back to the triple carrier."""
    if isinstance(fs, HamSecElement):
        fs = fs.sum
    return ExtElement(fs.model, -fs.part(0).scalar(), fs.part(2), fs.part(3))


def quotient_bracket(a: ExtElement, b: ExtElement) -> ExtElement:
    """The bracket on triples obtained from [.,.]_{1,1} through the lift;
    restricted to scalars it is the Poisson bracket."""
    return j_inverse(hamsec_bracket(hat_j(a), hat_j(b)))


def psi_ext(p: BracketParams, a: ExtElement) -> ExtElement:
    """The degreewise scaling (t a0, s a2, s^2/t a3) on triples."""
    if p.degenerate:
        raise ValueError("psi needs both parameters nonzero")
    return ExtElement(
        a.model,
        a.a0.scale(p.t),
        a.a2.scale(p.s),
        a.a3.scale(p.s * p.s / p.t),
    )


def psi_ext_inv(p: BracketParams, a: ExtElement) -> ExtElement:
    return ExtElement(
        a.model,
        a.a0.scale(1 / p.t),
        a.a2.scale(1 / p.s),
        a.a3.scale(p.t / (p.s * p.s)),
    )


# -- the nonequivariance cocycle ------------------------------------------------


def star_product(alpha: SymTensorField, beta: SymTensorField) -> MixedTensorField:
    """(alpha * beta)_{ijkl} = 2 alpha_{k[i} beta_{j]l} + 2 alpha_{l[i} beta_{j]k};
    antisymmetric in ij, symmetric in kl."""
    if alpha.degree != 2 or beta.degree != 2:
        raise ValueError("star product is defined on degree-2 tensors")
    model = alpha.model

    def fn(t: Idx) -> TrigScalar:
        i, j, k, l = t
        return (
            alpha.get((k, i)) * beta.get((j, l))
            - alpha.get((k, j)) * beta.get((i, l))
            + alpha.get((l, i)) * beta.get((j, k))
            - alpha.get((l, j)) * beta.get((i, k))
        )

    return build_mixed_field(model, RIEM_BLOCKS, fn, alpha.exact)


def moment_field_ext(a: ExtElement, conn: Connection) -> SymTensorField:
    """The degree-3 field generated by the triple's moment functional at conn:
    -H(a0) - 3 d* a2 - 3 a3."""
    ctx = conn.ctx()
    return -op_H(conn, a.a0) - delta_star(ctx, a.a2).scale(3) - a.a3.scale(3)


def sigma_cocycle(a: ExtElement, b: ExtElement, ref_conn: Connection):
    """The constant measuring nonequivariance of the moment map at the
    reference connection; a 2-cocycle of the quotient bracket."""
    if not ref_conn.torsion_free:
        raise ValueError("reference connection must be torsion-free")
    ctx = ref_conn.ctx()
    curv = curvature_tensor(ref_conn)
    val = global_pairing(star_product(a.a2, b.a2), curv) * 3
    val -= global_pairing(delta(ctx, a.a2), delta(ctx, b.a2)) * 6
    val -= conn_pairing(moment_field_ext(a, ref_conn), b.a3) * 3
    val -= conn_pairing(a.a3, moment_field_ext(b, ref_conn)) * 3
    val -= global_pairing(a.a3, b.a3) * 9
    return val


def extended_bracket(
    p: BracketParams, a: ExtElement, b: ExtElement, ref_conn: Connection
) -> ExtElement:
    """The centrally extended bracket, pulled back through the (s, t)
    rescaling: the quotient bracket plus the cocycle constant added to the
    scalar part."""
    if p.degenerate:
        raise ValueError("the pulled-back family needs both parameters nonzero")
    pa, pb = psi_ext(p, a), psi_ext(p, b)
    base = quotient_bracket(pa, pb)
    sigma = sigma_cocycle(pa, pb, ref_conn)
    shifted = ExtElement(
        base.model,
        base.a0 + TrigScalar.const(base.model.dim, sigma, a.a0.exact),
        base.a2,
        base.a3,
    )
    return psi_ext_inv(p, shifted)
