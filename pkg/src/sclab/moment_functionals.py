"""Functionals on the affine space of symplectic connections, their
Hamiltonian fields, the moment map into the extended algebra, and the
residual fields of the interpolating critical equation.

Sign convention, used consistently: the Hamiltonian field of a functional F
satisfies  delta_Pi F = Omega(Pi, H_F)  for the antisymmetric pairing on
degree-3 directions.  With that convention the closed forms are

    H_Theta = -Pi,   H_{R_alpha} = -d* alpha,   H_{R_(k)} = -d* Ric^{2k-1},
    H_{E_f} = -H(f'(K)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .connection_geometry import (
    Connection,
    cahen_gutt_scalar,
    conn_pairing,
    endo_trace,
    mixed_to_sym,
    lie_derivative_connection,
    op_H,
    ricci,
    ricci_power,
    ricci_power_sym,
)
from .exact_scalars import TrigScalar
from .lie_structures import (
    BracketParams,
    ExtElement,
    FormalSum,
    HamSecElement,
    hamsec_bracket,
    hat_j,
    j_inverse,
    moment_field_ext,
    psi_ext,
    sigma_cocycle,
)
from .sym_tensors import SymplecticModel, SymTensorField, global_pairing
from .symplectic_calculus import delta_star, is_closed_oneform

_F0 = Fraction(0)
_F1 = Fraction(1)


@dataclass(frozen=True)
class FunctionalId:
    """A functional on connection space, identified by tag and defining data.

    Tags: 'theta' (translation pairing against a fixed direction), 'r_alpha'
    (Ricci paired with a fixed degree-2 tensor), 'r_k' (Ricci-power trace
    integrals), 'e_poly' (integral of a rational polynomial of the moment
    density), 'm_pqr' (weighted combination attached to a triple), 'n_st'
    (the squared moment map), 'j_st' (the descent objective
    t^2 E + 2 s^2 R_(1))."""

    tag: str
    ref_conn: Connection | None = None
    direction: SymTensorField | None = None
    alpha: SymTensorField | None = None
    k: int = 1
    poly: tuple[Fraction, ...] = ()
    weights: tuple[Fraction, Fraction, Fraction] = (_F1, _F1, _F1)
    ext: ExtElement | None = None
    params: BracketParams | None = None

    def __post_init__(self):
        tag = self.tag
        if tag == "theta":
            if self.ref_conn is None or self.direction is None or self.direction.degree != 3:
                raise ValueError("theta needs a reference connection and a degree-3 direction")
        elif tag == "r_alpha":
            if self.alpha is None or self.alpha.degree != 2:
                raise ValueError("r_alpha needs a degree-2 tensor")
        elif tag == "r_k":
            if self.k < 1:
                raise ValueError("r_k needs k >= 1")
        elif tag == "e_poly":
            if not self.poly:
                raise ValueError("e_poly needs polynomial coefficients")
        elif tag == "m_pqr":
            if self.ext is None or self.ref_conn is None:
                raise ValueError("m_pqr needs a triple and a reference connection")
        elif tag in ("n_st", "j_st"):
            if self.params is None or self.ref_conn is None:
                raise ValueError(f"{tag} needs bracket parameters and a reference connection")
        else:
            raise ValueError(f"unknown functional tag {tag!r}")


def theta_functional(ref_conn: Connection, direction: SymTensorField) -> FunctionalId:
    return FunctionalId("theta", ref_conn=ref_conn, direction=direction)


def r_alpha_functional(alpha: SymTensorField) -> FunctionalId:
    return FunctionalId("r_alpha", alpha=alpha)


def r_k_functional(k: int) -> FunctionalId:
    return FunctionalId("r_k", k=k)


def e_poly_functional(coeffs: Sequence) -> FunctionalId:
    return FunctionalId("e_poly", poly=tuple(Fraction(c) for c in coeffs))


def m_pqr_functional(p, q, r, ext: ExtElement, ref_conn: Connection) -> FunctionalId:
    return FunctionalId(
        "m_pqr", ext=ext, ref_conn=ref_conn, weights=(Fraction(p), Fraction(q), Fraction(r))
    )


def m_functional(ext: ExtElement, ref_conn: Connection) -> FunctionalId:
    """The weighting (-1, 3, 3) whose fields generate the affine action."""
    return m_pqr_functional(-1, 3, 3, ext, ref_conn)


def n_st_functional(params: BracketParams, ref_conn: Connection) -> FunctionalId:
    return FunctionalId("n_st", params=params, ref_conn=ref_conn)


def j_st_functional(params: BracketParams, ref_conn: Connection) -> FunctionalId:
    return FunctionalId("j_st", params=params, ref_conn=ref_conn)


def _poly_eval_scalar(coeffs: Sequence[Fraction], x: TrigScalar) -> TrigScalar:
    """Polynomial in a scalar field, exact Horner."""
    out = TrigScalar.const(x.dim, coeffs[-1], x.exact) if x.exact else TrigScalar.const(
        x.dim, float(coeffs[-1]), False
    )
    for c in reversed(coeffs[:-1]):
        const = TrigScalar.const(x.dim, c if x.exact else float(c), x.exact)
        out = out * x + const
    return out


def _poly_derivative(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(Fraction(j) * coeffs[j] for j in range(1, len(coeffs))) or (Fraction(0),)


def scalar_mean(f: TrigScalar):
    """Integral of a scalar field; the float twin overrides this hook to run
    through grid quadrature."""
    if f.exact:
        return f.mean()
    from .quadrature import grid_mean

    return grid_mean(f)


def energy(conn: Connection, poly: Sequence[Fraction]):
    k = cahen_gutt_scalar(conn)
    return scalar_mean(_poly_eval_scalar(poly, k))


def r_k_value(conn: Connection, k: int):
    tr = endo_trace(conn.model, ricci_power(conn, 2 * k))
    return scalar_mean(tr) * Fraction(-1, 2 * k) if conn.exact else scalar_mean(tr) * (-1.0 / (2 * k))


def evaluate(fid: FunctionalId, conn: Connection):
    """Exact value of the functional at a torsion-free connection."""
    if not conn.torsion_free:
        raise ValueError("functionals are evaluated on torsion-free connections")
    tag = fid.tag
    if tag == "theta":
        return conn_pairing(fid.direction, conn.difference_sym(fid.ref_conn))
    if tag == "r_alpha":
        return global_pairing(fid.alpha, ricci(conn))
    if tag == "r_k":
        return r_k_value(conn, fid.k)
    if tag == "e_poly":
        return energy(conn, fid.poly)
    if tag == "m_pqr":
        p, q, r = fid.weights
        a = hat_j(fid.ext)
        val = scalar_mean(a.scalar0() * cahen_gutt_scalar(conn)) * p
        val += global_pairing(a.part(2), ricci(conn)) * q
        val += conn_pairing(a.part(3), conn.difference_sym(fid.ref_conn)) * r
        return val
    if tag == "n_st":
        return n_closed_form(fid.params, conn)
    if tag == "j_st":
        s, t = fid.params.s, fid.params.t
        return energy(conn, (_F0, _F0, _F1)) * (t * t) + r_k_value(conn, 1) * (2 * s * s)
    raise ValueError(f"unknown functional tag {tag!r}")


def n_closed_form(params: BracketParams, conn: Connection):
    """The displayed closed form of the squared moment functional:
    t^2 (1 - kappa^2 + t^2 E + 18 s^2 R_(1)) with unit volume; on the torus
    kappa = 0."""
    s, t = params.s, params.t
    e = energy(conn, (_F0, _F0, _F1))
    r1 = r_k_value(conn, 1)
    return t * t * (1 + t * t * e + 18 * s * s * r1)


def n_pairing_form(params: BracketParams, conn: Connection, ref_conn: Connection):
    """The same functional assembled literally as the graded self-pairing of
    the rescaled moment map; reported next to the closed form because their
    parameter powers disagree."""
    img = moment_hat(conn, ref_conn, params)
    e = img.ext
    val = scalar_mean(e.a0 * e.a0)
    val += global_pairing(e.a2, e.a2)
    val += conn_pairing(e.a3, e.a3)  # vanishes by antisymmetry
    return val


def hamiltonian_field(fid: FunctionalId, conn: Connection) -> SymTensorField:
    """Closed-form Hamiltonian field of the functional at conn."""
    if not conn.torsion_free:
        raise ValueError("fields are computed at torsion-free connections")
    tag = fid.tag
    ctx = conn.ctx()
    if tag == "theta":
        return -fid.direction
    if tag == "r_alpha":
        return -delta_star(ctx, fid.alpha)
    if tag == "r_k":
        return -delta_star(ctx, ricci_power_sym(conn, 2 * fid.k - 1))
    if tag == "e_poly":
        fprime = _poly_derivative(fid.poly)
        return -op_H(conn, _poly_eval_scalar(fprime, cahen_gutt_scalar(conn)))
    if tag == "m_pqr":
        p, q, r = fid.weights
        a = hat_j(fid.ext)
        return (
            -op_H(conn, a.scalar0()).scale(p)
            - delta_star(ctx, a.part(2)).scale(q)
            - a.part(3).scale(r)
        )
    if tag == "j_st":
        res = residuals(conn, fid.params)
        return -res["coupled"].scale(2)
    raise ValueError(f"no closed-form field for tag {fid.tag!r}")


def variation(fid: FunctionalId, conn: Connection, direction: SymTensorField):
    """delta_Pi F as the pairing Omega(direction, H_F)."""
    return conn_pairing(direction, hamiltonian_field(fid, conn))


def poisson_functionals(f1: FunctionalId, f2: FunctionalId, conn: Connection):
    """{{F, G}} = Omega(H_F, H_G) at conn."""
    return conn_pairing(hamiltonian_field(f1, conn), hamiltonian_field(f2, conn))


# -- the moment map -------------------------------------------------------------


@dataclass
class MomentImage:
    """The element of the extended algebra identified with the moment map at
    a connection; ext carries the (s, t)-rescaled components, and the
    normalization (constant part of the unscaled scalar equal to 1) is
    checked at construction."""

    ext: ExtElement
    params: BracketParams


def moment_hat(conn: Connection, ref_conn: Connection, params: BracketParams) -> MomentImage:
    """(1 + Kbar, 3 Ric, 3 (nabla - nabla_0)), then rescaled by psi_{s,t}."""
    for c in (conn, ref_conn):
        if not c.torsion_free:
            raise ValueError("moment map needs torsion-free connections")
    model = conn.model
    k = cahen_gutt_scalar(conn)
    kappa = scalar_mean(k)
    kbar = k - TrigScalar.const(model.dim, kappa, conn.exact)
    one = TrigScalar.const(model.dim, 1, conn.exact)
    unscaled = ExtElement(
        model,
        one + kbar,
        ricci(conn).scale(3),
        conn.difference_sym(ref_conn).scale(3),
    )
    if conn.exact and unscaled.a0.mean() != 1:
        raise AssertionError("moment scalar part is not volume-normalized")
    return MomentImage(psi_ext(params, unscaled), params)


def equivariance_defect(a: ExtElement, b: ExtElement, conn: Connection, ref_conn: Connection):
    """{{M_a, M_b}}(conn) - M_{[a,b]}(conn); constant in conn and equal to the
    cocycle at the reference connection."""
    fa = m_functional(a, ref_conn)
    fb = m_functional(b, ref_conn)
    bracket = j_inverse(hamsec_bracket(hat_j(a), hat_j(b)))
    val = poisson_functionals(fa, fb, conn)
    val -= evaluate(m_functional(bracket, ref_conn), conn)
    return val


# -- the affine action -----------------------------------------------------------


def affine_action(a, conn: Connection) -> Connection:
    """alpha . nabla = nabla + L(alpha_1) + 3 d* alpha_2 + 3 alpha_3 for a
    formal sum with closed degree-1 part (triples are lifted first)."""
    if isinstance(a, ExtElement):
        a = hat_j(a)
    if isinstance(a, HamSecElement):
        a = a.sum
    if not isinstance(a, FormalSum):
        raise TypeError("action takes a formal sum, subalgebra element, or triple")
    if not conn.torsion_free:
        raise ValueError("the action preserves torsion-free connections only")
    model = conn.model
    a1 = a.part(1)
    if not is_closed_oneform(model, a1):
        raise ValueError("degree-1 part must be closed")
    ctx = conn.ctx()
    shift = SymTensorField.zero(model, 3, conn.exact)
    if not a1.is_zero():
        shift = shift + mixed_to_sym(lie_derivative_connection(conn, a1))
    shift = shift + delta_star(ctx, a.part(2)).scale(3)
    shift = shift + a.part(3).scale(3)
    return conn.shift_sym(shift)


def stabilizer_completion(a: FormalSum, conn: Connection) -> FormalSum:
    """Replace the degree-3 part so the element fixes conn:
    3 alpha_3 = -L(alpha_1) - 3 d* alpha_2."""
    model = conn.model
    ctx = conn.ctx()
    a1 = a.part(1)
    l1 = (
        mixed_to_sym(lie_derivative_connection(conn, a1))
        if not a1.is_zero()
        else SymTensorField.zero(model, 3, conn.exact)
    )
    a3 = (-l1 - delta_star(ctx, a.part(2)).scale(3)).scale(Fraction(1, 3))
    return a.with_part(3, a3)


# -- residual fields --------------------------------------------------------------


def residuals(conn: Connection, params: BracketParams) -> dict[str, SymTensorField]:
    """The three residual fields: 'preferred' is d* Ric, 'critical' is
    H(K), and 'coupled' is t^2 critical + s^2 preferred."""
    if not conn.torsion_free:
        raise ValueError("residuals need a torsion-free connection")
    ctx = conn.ctx()
    preferred = delta_star(ctx, ricci(conn))
    critical = op_H(conn, cahen_gutt_scalar(conn))
    s, t = params.s, params.t
    coupled = critical.scale(t * t) + preferred.scale(s * s)
    return {"preferred": preferred, "critical": critical, "coupled": coupled}
