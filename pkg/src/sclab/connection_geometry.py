"""Connections preserving the Darboux form on the torus: curvature, Ricci,
the moment-map density, the degree-shift operators built from curvature,
and the gauge action on connections with torsion.

A connection is stored as the flat coordinate derivative plus a difference
tensor Pi_{ijk} symmetric in its last two slots (that symmetry is exactly
compatibility with the symplectic form).  Full symmetry of Pi is
equivalent to vanishing torsion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .exact_scalars import TrigScalar, ts_sum
from .sym_tensors import (
    Idx,
    MixedTensorField,
    SymplecticModel,
    SymTensorField,
    TensorBase,
    build_mixed_field,
    build_sym_field,
    canonical_keys,
    full_contraction_mean,
    raise_all,
)
from .symplectic_calculus import (
    DiffOperatorContext,
    cov_deriv_component,
    delta,
    delta_star,
    delta_star_scalar,
)

PI_BLOCKS = (("a", 1), ("s", 2))
RIEM_BLOCKS = (("a", 2), ("s", 2))
ENDO_BLOCKS = (("a", 1), ("a", 1))

_F1 = Fraction(1)


class Connection:
    """A symplectic affine connection flat + Pi on the torus.

    Instances are immutable, so derived curvature data is cached lazily."""

    __slots__ = ("model", "pi", "exact", "_torsion_free", "_cache")

    def __init__(self, model: SymplecticModel, pi: MixedTensorField | SymTensorField):
        self.model = model
        if isinstance(pi, SymTensorField):
            if pi.degree != 3:
                raise ValueError("symmetric difference tensor must have degree 3")
            pi = _sym_to_mixed(pi)
        if pi.blocks != PI_BLOCKS:
            raise ValueError(f"difference tensor must have blocks {PI_BLOCKS}")
        if pi.model != model:
            raise ValueError("model mismatch")
        self.pi = pi
        self.exact = pi.exact
        self._torsion_free = None
        self._cache = {}

    @classmethod
    def flat(cls, model: SymplecticModel, exact: bool = True) -> "Connection":
        return cls(model, MixedTensorField.zero(model, PI_BLOCKS, exact))

    @classmethod
    def from_sym(cls, pi: SymTensorField) -> "Connection":
        return cls(pi.model, pi)

    @classmethod
    def random(cls, model: SymplecticModel, band: int, seed: int, mag: int = 2) -> "Connection":
        return cls.from_sym(SymTensorField.random(model, 3, band, seed, mag))

    @property
    def torsion_free(self) -> bool:
        if self._torsion_free is None:
            dim = self.model.dim
            ok = True
            for i in range(dim):
                for j in range(i + 1, dim):
                    for k in range(dim):
                        if self.pi.get((i, j, k)) != self.pi.get((j, i, k)):
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            self._torsion_free = ok
        return self._torsion_free

    def pi_sym(self) -> SymTensorField:
        if "pi_sym" not in self._cache:
            if not self.torsion_free:
                raise ValueError("connection has torsion")
            comps = {}
            for key in itertools.combinations_with_replacement(range(self.model.dim), 3):
                v = self.pi.get(key)
                if not v.is_zero():
                    comps[key] = v
            self._cache["pi_sym"] = SymTensorField(self.model, 3, comps, self.exact)
        return self._cache["pi_sym"]

    def ctx(self) -> DiffOperatorContext:
        if "ctx" not in self._cache:
            pi = self.pi_sym()
            self._cache["ctx"] = DiffOperatorContext(self.model, None if pi.is_zero() else pi)
        return self._cache["ctx"]

    def shift_sym(self, direction: SymTensorField, t=_F1) -> "Connection":
        return Connection(self.model, self.pi + _sym_to_mixed(direction.scale(t)))

    def shift_mixed(self, direction: MixedTensorField, t=_F1) -> "Connection":
        return Connection(self.model, self.pi + direction.scale(t))

    def difference_sym(self, other: "Connection") -> SymTensorField:
        """self - other as a symmetric tensor (both torsion-free)."""
        return self.pi_sym() - other.pi_sym()

    def to_inexact(self) -> "Connection":
        return Connection(self.model, self.pi.to_inexact())

    def __eq__(self, other):
        return isinstance(other, Connection) and self.model == other.model and self.pi == other.pi

    def __repr__(self):
        return f"Connection(n={self.model.n}, torsion_free={self.torsion_free})"

    def to_payload(self) -> dict:
        tf = self.torsion_free
        payload = {"n": self.model.n, "torsion_free": tf}
        payload["pi"] = self.pi_sym().to_payload() if tf else self.pi.to_payload()
        return payload

    @classmethod
    def from_payload(cls, payload: dict) -> "Connection":
        try:
            model = SymplecticModel(int(payload["n"]))
            if payload["torsion_free"]:
                return cls(model, SymTensorField.from_payload(payload["pi"]))
            return cls(model, MixedTensorField.from_payload(payload["pi"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed connection payload: {exc}") from exc


def _sym_to_mixed(pi: SymTensorField) -> MixedTensorField:
    comps = {}
    for key in canonical_keys(pi.model.dim, PI_BLOCKS):
        v = pi.get(key)
        if not v.is_zero():
            comps[key] = v
    return MixedTensorField(pi.model, PI_BLOCKS, comps, pi.exact)


def _cov_component(conn: Connection, t: TensorBase, i: int, idx: Idx) -> TrigScalar:
    """nabla_i t_idx with the connection's (possibly torsion) difference."""
    model = conn.model
    val = t.get(idx).partial(i)
    if conn.pi.is_zero():
        return val
    dim = model.dim
    pieces = [val]
    for s, j in enumerate(idx):
        for p in range(dim):
            q = model.partner(p)
            coef = conn.pi.get((i, j, q))
            if coef.is_zero():
                continue
            rest = t.get(idx[:s] + (p,) + idx[s + 1 :])
            if rest.is_zero():
                continue
            term = coef * rest
            pieces.append(-term if model.omega_sign(p) == 1 else term)
    return ts_sum(pieces, model.dim, t.exact)


# -- curvature ----------------------------------------------------------------


def riem_component(conn: Connection, i: int, j: int, k: int, l: int) -> TrigScalar:
    """Raw R_{ijkl} of flat + Pi, valid with torsion:

        R_{ijkl} = 2 d_{[i} Pi_{j]kl} + 2 Pi_{[i|p l|} Pi_{j]k}{}^p.
    """
    model = conn.model
    pi = conn.pi
    dim = model.dim
    pieces = [pi.get((j, k, l)).partial(i), -pi.get((i, k, l)).partial(j)]
    for p in range(dim):
        q = model.partner(p)
        s = model.omega_sign(p)  # Omega^{pq}
        quad = pi.get((i, p, l)) * pi.get((j, k, q)) - pi.get((j, p, l)) * pi.get((i, k, q))
        pieces.append(quad if s == 1 else -quad)
    return ts_sum(pieces, dim, conn.exact)


@dataclass
class CurvatureField:
    """Curvature data of a connection: the full tensor, its Ricci trace and,
    when torsion is present, the torsion trace one-form."""

    riem: MixedTensorField
    ricci: SymTensorField | None
    torsion_trace: SymTensorField | None


def curvature_tensor(conn: Connection) -> MixedTensorField:
    if "riem" not in conn._cache:
        conn._cache["riem"] = build_mixed_field(
            conn.model, RIEM_BLOCKS, lambda t: riem_component(conn, *t), conn.exact
        )
    return conn._cache["riem"]


def ricci(conn: Connection) -> SymTensorField:
    """Ricci trace R_{ij} = R_{pij}{}^p; symmetric for torsion-free input."""
    if "ricci" in conn._cache:
        return conn._cache["ricci"]
    if not conn.torsion_free:
        raise ValueError("ricci is defined here for torsion-free connections")
    model = conn.model
    dim = model.dim

    def fn(t: Idx) -> TrigScalar:
        i, j = t
        vals = []
        for p in range(dim):
            q = model.partner(p)
            s = model.omega_sign(p)  # Omega^{pq} for the raised 4th slot
            term = riem_component(conn, p, i, j, q)
            vals.append(term if s == 1 else -term)
        return ts_sum(vals, dim, conn.exact)

    out = build_sym_field(model, 2, fn, conn.exact)
    conn._cache["ricci"] = out
    return out


def curvature_form_trace(conn: Connection) -> SymTensorField:
    """F_{ij} = R_p{}^p{}_{ij}, the endomorphism trace of curvature; equals
    2 Ric for torsion-free connections but not in general."""
    model = conn.model
    dim = model.dim
    riem = curvature_tensor(conn)

    def fn(t: Idx) -> TrigScalar:
        i, j = t
        vals = []
        for s_ in range(dim):
            tpart = model.partner(s_)
            sgn = model.omega_sign(s_)  # Omega^{s t}
            term = riem.get((s_, tpart, i, j))
            vals.append(term if sgn == 1 else -term)
        return ts_sum(vals, dim, conn.exact)

    return build_sym_field(model, 2, fn, conn.exact)


def torsion_trace(conn: Connection) -> SymTensorField:
    """tau_{ip}{}^p as a one-form; zero iff the trace part of torsion is."""
    model = conn.model
    dim = model.dim
    comps = {}
    for i in range(dim):
        vals = []
        for p in range(dim):
            q = model.partner(p)
            s = model.omega_sign(p)
            # tau_{ip}{}^p = Omega^{pq}(Pi_{ipq} - Pi_{piq}); the first term
            # traces the symmetric pair so only the second survives
            term = conn.pi.get((i, p, q)) - conn.pi.get((p, i, q))
            vals.append(term if s == 1 else -term)
        v = ts_sum(vals, dim, conn.exact)
        if not v.is_zero():
            comps[(i,)] = v
    return SymTensorField(model, 1, comps, conn.exact)


def curvature(conn: Connection) -> CurvatureField:
    riem = curvature_tensor(conn)
    if conn.torsion_free:
        return CurvatureField(riem, ricci(conn), None)
    return CurvatureField(riem, None, torsion_trace(conn))


def contraction_square_field(t: TensorBase) -> TrigScalar:
    """The scalar field sum_I t_I t^I over all index tuples."""
    traised = raise_all(t)
    dim = t.model.dim
    vals = []
    for idx in itertools.product(range(dim), repeat=t.degree):
        a = t.get(idx)
        if a.is_zero():
            continue
        b = traised.get(idx)
        if not b.is_zero():
            vals.append(a * b)
    return ts_sum(vals, dim, t.exact)


def contraction_square_mean(t: TensorBase):
    """mean(sum_I t_I t^I) by pairing coefficients, never forming products."""
    traised = raise_all(t)
    dim = t.model.dim
    acc = Fraction(0) if t.exact else 0.0
    for idx in itertools.product(range(dim), repeat=t.degree):
        a = t.get(idx)
        if a.is_zero():
            continue
        b = traised.get(idx)
        if not b.is_zero():
            acc += a.dot_mean(b)
    return acc


def cahen_gutt_scalar(conn: Connection) -> TrigScalar:
    """The moment-map density of the Hamiltonian action on connections:

        K = -d d Ric - (1/2) R^{ij} R_{ij} + (1/4) R^{ijkl} R_{ijkl}.
    """
    if not conn.torsion_free:
        raise ValueError("defined for torsion-free connections only")
    if "cahen_gutt" in conn._cache:
        return conn._cache["cahen_gutt"]
    ctx = conn.ctx()
    ric = ricci(conn)
    riem = curvature_tensor(conn)
    out = -delta(ctx, delta(ctx, ric)).scalar()
    out = out + contraction_square_field(ric).scale(Fraction(-1, 2))
    out = out + contraction_square_field(riem).scale(Fraction(1, 4))
    conn._cache["cahen_gutt"] = out
    return out


def cahen_gutt_mean(conn: Connection):
    """mean(K): the divergence part integrates to zero exactly, so only the
    curvature-squared contractions contribute; computed coefficientwise."""
    if not conn.torsion_free:
        raise ValueError("defined for torsion-free connections only")
    ric = ricci(conn)
    riem = curvature_tensor(conn)
    return contraction_square_mean(ric) * Fraction(-1, 2) + contraction_square_mean(
        riem
    ) * Fraction(1, 4)


# -- curvature operators -------------------------------------------------------


def lie_derivative_connection(conn: Connection, xflat: SymTensorField) -> MixedTensorField:
    """(L_X nabla)_{ijl} = nabla_i nabla_j X_l + X^p R_{pijl}, stored with the
    symmetric pair first; input is the lowered vector field X_l."""
    if not conn.torsion_free:
        raise ValueError("defined for torsion-free connections only")
    if xflat.degree != 1:
        raise ValueError("vector field must be given as a one-form")
    model = conn.model
    dim = model.dim
    riem = curvature_tensor(conn)
    xup = raise_all(xflat)

    grad = build_mixed_field(
        model, ENDO_BLOCKS, lambda t: _cov_component(conn, xflat, t[0], t[1:]), conn.exact
    )

    def fn(t: Idx) -> TrigScalar:
        i, j, l = t
        vals = [_cov_component(conn, grad, i, (j, l))]
        for p in range(dim):
            xv = xup.get((p,))
            if xv.is_zero():
                continue
            rv = riem.get((p, i, j, l))
            if not rv.is_zero():
                vals.append(xv * rv)
        return ts_sum(vals, dim, conn.exact)

    return build_mixed_field(model, (("s", 2), ("a", 1)), fn, conn.exact)


def mixed_to_sym(t: MixedTensorField) -> SymTensorField:
    """Reinterpret a mixed field as fully symmetric.

    On the exact ring the claimed symmetry is verified literally; on the
    float ring it holds only to roundoff, so the arrangements are averaged.
    """
    model = t.model
    deg = t.degree
    comps = {}
    for key in itertools.combinations_with_replacement(range(model.dim), deg):
        arrangements = set(itertools.permutations(key))
        if t.exact:
            vals = {t.get(p) for p in arrangements}
            if len(vals) != 1:
                raise ValueError(f"field is not fully symmetric at {key}")
            v = vals.pop()
        else:
            v = ts_sum((t.get(p) for p in arrangements), model.dim, False).scale(
                Fraction(1, len(arrangements))
            )
        if not v.is_zero():
            comps[key] = v
    return SymTensorField(model, deg, comps, t.exact)


def op_S(conn: Connection, beta: SymTensorField) -> SymTensorField:
    """S(beta)_i = beta^{abc} R_{iabc}."""
    if not conn.torsion_free:
        raise ValueError("torsion-free input required")
    if beta.degree != 3:
        raise ValueError("argument must have degree 3")
    model = conn.model
    dim = model.dim
    riem = curvature_tensor(conn)
    up = raise_all(beta)
    comps = {}
    for i in range(dim):
        vals = []
        for abc in itertools.product(range(dim), repeat=3):
            bv = up.get(abc)
            if bv.is_zero():
                continue
            rv = riem.get((i,) + abc)
            if not rv.is_zero():
                vals.append(bv * rv)
        v = ts_sum(vals, dim, conn.exact)
        if not v.is_zero():
            comps[(i,)] = v
    return SymTensorField(model, 1, comps, conn.exact)


def op_S_star(conn: Connection, alpha: SymTensorField) -> SymTensorField:
    """S*(alpha)_{ijk} = -alpha^p R_{p(ijk)}."""
    if not conn.torsion_free:
        raise ValueError("torsion-free input required")
    if alpha.degree != 1:
        raise ValueError("argument must have degree 1")
    model = conn.model
    dim = model.dim
    riem = curvature_tensor(conn)
    up = raise_all(alpha)

    def fn(t: Idx) -> TrigScalar:
        vals = []
        for p in range(dim):
            av = up.get((p,))
            if av.is_zero():
                continue
            rv = riem.get((p,) + t)
            if not rv.is_zero():
                vals.append(av * rv)
        return -ts_sum(vals, dim, conn.exact)

    return build_sym_field(model, 3, fn, conn.exact)


def op_L(conn: Connection, alpha: SymTensorField) -> SymTensorField:
    """L(alpha) = d*d* alpha - S*(alpha): the symmetrized Lie-derivative
    image of the vector field dual to a one-form."""
    ctx = conn.ctx()
    return delta_star(ctx, delta_star(ctx, alpha)) - op_S_star(conn, alpha)


def op_H(conn: Connection, f: TrigScalar) -> SymTensorField:
    """H(f) = L(d*f): the action of the Hamiltonian field of f on the connection."""
    return op_L(conn, delta_star_scalar(conn.model, f))


def op_H_star(conn: Connection, pi: SymTensorField) -> TrigScalar:
    """H*(pi) = -d^3 pi - d S(pi), the formal adjoint of H."""
    ctx = conn.ctx()
    d3 = delta(ctx, delta(ctx, delta(ctx, pi))).scalar()
    ds = delta(ctx, op_S(conn, pi)).scalar()
    return -d3 - ds


def hamiltonian_oneform(model: SymplecticModel, f: TrigScalar) -> SymTensorField:
    """The lowered Hamiltonian vector field of f: H_f^flat = d*f = -df."""
    return delta_star_scalar(model, f)


# -- Ricci endomorphism powers --------------------------------------------------


def endo_compose(model: SymplecticModel, a: MixedTensorField, b: MixedTensorField) -> MixedTensorField:
    """(a o b)_{ij} = a_p{}^j b_i{}^p on lowered endomorphisms:
    (a o b)_{ij} = Omega^{pq} b_{iq} a_{pj}."""
    dim = model.dim

    def fn(t: Idx) -> TrigScalar:
        i, j = t
        vals = []
        for p in range(dim):
            q = model.partner(p)
            s = model.omega_sign(p)
            term = b.get((i, q)) * a.get((p, j))
            if not term.is_zero():
                vals.append(term if s == 1 else -term)
        return ts_sum(vals, dim, a.exact)

    return build_mixed_field(model, ENDO_BLOCKS, fn, a.exact)


def endo_trace(model: SymplecticModel, a: MixedTensorField) -> TrigScalar:
    """a_p{}^p = Omega^{pt} a_{pt}."""
    dim = model.dim
    vals = []
    for p in range(dim):
        t = model.partner(p)
        s = model.omega_sign(p)
        v = a.get((p, t))
        if not v.is_zero():
            vals.append(v if s == 1 else -v)
    return ts_sum(vals, dim, a.exact)


def ricci_power(conn: Connection, m: int) -> MixedTensorField:
    """Lowered m-th power (Rc^{o m})_{ij} of the Ricci endomorphism."""
    if m < 1:
        raise ValueError("power must be >= 1")
    ric = ricci(conn)
    base = build_mixed_field(conn.model, ENDO_BLOCKS, lambda t: ric.get(t), conn.exact)
    out = base
    for _ in range(m - 1):
        out = endo_compose(conn.model, out, base)
    return out


def ricci_power_sym(conn: Connection, m: int) -> SymTensorField:
    """Odd powers are symmetric 2-tensors; checked conversion."""
    return mixed_to_sym(ricci_power(conn, m))


# -- gauge action ----------------------------------------------------------------


class GaugeField:
    """Endomorphism field g_i{}^j preserving the symplectic pairing:
    g_i{}^p g_j{}^q Omega_{pq} = Omega_{ij} exactly."""

    __slots__ = ("model", "up", "exact")

    def __init__(self, model: SymplecticModel, up: dict[tuple[int, int], TrigScalar], check: bool = True):
        self.model = model
        first = next(iter(up.values()), None)
        self.exact = first.exact if first is not None else True
        self.up = {k: v for k, v in up.items() if not v.is_zero()}
        if check and not self.satisfies_constraint():
            raise ValueError("gauge field does not preserve the symplectic form")

    @classmethod
    def identity(cls, model: SymplecticModel, exact: bool = True) -> "GaugeField":
        one = TrigScalar.const(model.dim, 1, exact)
        return cls(model, {(i, i): one for i in range(model.dim)}, check=False)

    def entry(self, i: int, j: int) -> TrigScalar:
        v = self.up.get((i, j))
        if v is None:
            return TrigScalar.zero(self.model.dim, self.exact)
        return v

    def lowered(self, i: int, j: int) -> TrigScalar:
        """g_{ij} = g_i{}^p Omega_{pj}: single sparse term."""
        p = self.model.partner(j)
        s = self.model.omega_sign(p)  # Omega_{p j}
        v = self.entry(i, p)
        return v.scale(Fraction(s))

    def satisfies_constraint(self) -> bool:
        model = self.model
        dim = model.dim
        for i in range(dim):
            for j in range(dim):
                vals = []
                for p in range(dim):
                    q = model.partner(p)
                    s = model.omega_sign(p)  # Omega_{pq}
                    term = self.entry(i, p) * self.entry(j, q)
                    vals.append(term if s == 1 else -term)
                acc = ts_sum(vals, dim, self.exact)
                expect = TrigScalar.const(dim, model.omega_lower(i, j), self.exact)
                if not (acc - expect).is_zero():
                    return False
        return True

    def compose(self, other: "GaugeField") -> "GaugeField":
        """(self o other)_i{}^j = self_p{}^j other_i{}^p (apply other first)."""
        model = self.model
        dim = model.dim
        out = {}
        for i in range(dim):
            for j in range(dim):
                vals = [self.entry(p, j) * other.entry(i, p) for p in range(dim)]
                v = ts_sum(vals, dim, self.exact)
                if not v.is_zero():
                    out[(i, j)] = v
        return GaugeField(model, out, check=False)

    def inverse_lowered(self, i: int, j: int) -> TrigScalar:
        """(g^{-1})_{ij} = -g_{ji}."""
        return -self.lowered(j, i)


def gauge_delta_component(conn: Connection, g: GaugeField, i: int, j: int, m: int) -> TrigScalar:
    """Raw (g . nabla - nabla)_{ijm} = (g^{-1})_{pm} nabla_i g_j{}^p."""
    model = conn.model
    dim = model.dim
    vals = []
    for p in range(dim):
        ginv = g.inverse_lowered(p, m)
        if ginv.is_zero():
            continue
        # nabla_i g_j{}^p = d_i g_j{}^p + Pi_{iq}{}^p g_j{}^q - Pi_{ij}{}^q g_q{}^p
        grad = [g.entry(j, p).partial(i)]
        if not conn.pi.is_zero():
            pr = model.partner(p)
            sp = model.omega_sign(p)
            for q in range(dim):
                r = model.partner(q)
                s = model.omega_sign(q)
                # -Pi_{ij}{}^q g_q{}^p with Pi_{ij}{}^q = Omega^{qr} Pi_{ijr}
                t1 = conn.pi.get((i, j, r)) * g.entry(q, p)
                if not t1.is_zero():
                    grad.append(-t1 if s == 1 else t1)
                # +Pi_{iq}{}^p g_j{}^q with Pi_{iq}{}^p = Omega^{p r'} Pi_{iq r'}
                t2 = conn.pi.get((i, q, pr)) * g.entry(j, q)
                if not t2.is_zero():
                    grad.append(t2 if sp == 1 else -t2)
        vals.append(ginv * ts_sum(grad, dim, conn.exact))
    return ts_sum(vals, dim, conn.exact)


def gauge_transform(conn: Connection, g: GaugeField) -> Connection:
    """g . nabla = nabla + (g^{-1})_p{}^k nabla_i g_j{}^p; preserves the form,
    may create torsion."""
    if not g.satisfies_constraint():
        raise ValueError("gauge field does not preserve the symplectic form")
    model = conn.model
    delta_pi = build_mixed_field(
        model, PI_BLOCKS, lambda t: gauge_delta_component(conn, g, *t), conn.exact
    )
    return Connection(model, conn.pi + delta_pi)


# -- the gauge moment pairing -----------------------------------------------------


def conn_pairing(a: TensorBase, b: TensorBase):
    """The symplectic pairing of connection-difference tensors:
    the integral of a_{ijk} b^{ijk}; antisymmetric on symmetric degree-3."""
    return full_contraction_mean(a, b)


def atiyah_bott_pairing(conn: Connection, alpha: SymTensorField):
    """<<Gamma(nabla), alpha>> = -(1/2) int alpha^{ij} R_p{}^p{}_{ij}."""
    if alpha.degree != 2:
        raise ValueError("gauge parameter must have degree 2")
    ftrace = curvature_form_trace(conn)
    return full_contraction_mean(alpha, ftrace) * Fraction(-1, 2)


def nabla_alpha(conn: Connection, alpha: SymTensorField) -> MixedTensorField:
    """The field nabla_i alpha_{jk} in connection-difference shape."""
    return build_mixed_field(
        conn.model, PI_BLOCKS, lambda t: _cov_component(conn, alpha, t[0], t[1:]), conn.exact
    )


def ab_variation_check(conn: Connection, alpha: SymTensorField, pi_dir: MixedTensorField):
    """Both sides of the first variation of the gauge moment pairing along a
    general (possibly torsion) direction: the derivative of the pairing in t,
    extracted by exact interpolation, against Omega(nabla alpha, direction)."""
    if pi_dir.blocks != PI_BLOCKS:
        raise ValueError(f"direction must have blocks {PI_BLOCKS}")
    plus = atiyah_bott_pairing(conn.shift_mixed(pi_dir, _F1), alpha)
    minus = atiyah_bott_pairing(conn.shift_mixed(pi_dir, -_F1), alpha)
    lhs = (plus - minus) / 2
    rhs = full_contraction_mean(nabla_alpha(conn, alpha), pi_dir)
    return lhs, rhs
