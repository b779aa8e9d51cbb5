"""Floating-point layer: parameterized connections, finite-difference
variation oracles, gradient descent toward the interpolating critical
equation, and RK4 integration of the Ricci-power Hamiltonian flows.

The descent gradient is the coefficient-space Euclidean gradient assembled
from the analytic residual field; symplectic steepest descent is ill-posed
because the antisymmetric pairing of a direction with itself vanishes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .connection_geometry import Connection, conn_pairing
from .exact_scalars import TrigScalar
from .lie_structures import BracketParams
from .moment_functionals import (
    FunctionalId,
    evaluate,
    hamiltonian_field,
    r_k_value,
    residuals,
)
from .sym_tensors import SymplecticModel, SymTensorField

LayoutEntry = tuple[tuple[int, ...], tuple[int, ...], str]  # (component, frequency, re|im)


@dataclass
class ParamVector:
    """Real coordinates on band-limited symmetric degree-3 fields.

    Each canonical (component, frequency) pair carries one real and, for
    nonzero frequencies, one imaginary parameter; the opposite frequency is
    implied by Hermitian symmetry."""

    model: SymplecticModel
    band: int
    layout: tuple[LayoutEntry, ...]
    values: np.ndarray

    @classmethod
    def zeros(cls, model: SymplecticModel, band: int) -> "ParamVector":
        layout = build_layout(model, band)
        return cls(model, band, layout, np.zeros(len(layout)))

    @classmethod
    def random(cls, model: SymplecticModel, band: int, seed: int, mag: float = 0.1) -> "ParamVector":
        pv = cls.zeros(model, band)
        rng = np.random.default_rng(seed)
        pv.values = mag * rng.uniform(-1.0, 1.0, len(pv.layout))
        return pv

    def copy_with(self, values: np.ndarray) -> "ParamVector":
        return ParamVector(self.model, self.band, self.layout, np.asarray(values, dtype=float))

    def to_field(self) -> SymTensorField:
        """The inexact degree-3 field these coordinates parameterize."""
        comps: dict[tuple[int, ...], dict] = {}
        for (key, m, part), v in zip(self.layout, self.values):
            if v == 0.0:
                continue
            terms = comps.setdefault(key, {})
            if not any(m):
                terms[m] = terms.get(m, 0.0 + 0.0j) + complex(v)
                continue
            mneg = tuple(-x for x in m)
            c = complex(v) if part == "re" else 1j * v
            terms[m] = terms.get(m, 0.0 + 0.0j) + c
            terms[mneg] = terms.get(mneg, 0.0 + 0.0j) + c.conjugate()
        fields = {
            key: TrigScalar(self.model.dim, terms, exact=False) for key, terms in comps.items()
        }
        return SymTensorField(self.model, 3, fields, exact=False)

    def to_connection(self) -> Connection:
        return Connection.from_sym(self.to_field())

    def load_field(self, f: SymTensorField) -> "ParamVector":
        """Project a (possibly wider-band) field onto this layout."""
        vals = np.zeros(len(self.layout))
        for i, (key, m, part) in enumerate(self.layout):
            c = f.get(key).terms.get(m)
            if c is None:
                continue
            vals[i] = c.real if part == "re" else c.imag
        return self.copy_with(vals)


def build_layout(model: SymplecticModel, band: int) -> tuple[LayoutEntry, ...]:
    entries: list[LayoutEntry] = []
    freqs = sorted(
        m
        for m in itertools.product(range(-band, band + 1), repeat=model.dim)
        if _canonical(m)
    )
    for key in itertools.combinations_with_replacement(range(model.dim), 3):
        for m in freqs:
            entries.append((key, m, "re"))
            if any(m):
                entries.append((key, m, "im"))
    return tuple(entries)


def _canonical(m) -> bool:
    for x in m:
        if x > 0:
            return True
        if x < 0:
            return False
    return True


def basis_direction(model: SymplecticModel, entry: LayoutEntry) -> SymTensorField:
    """d(field)/d(parameter): the unit coordinate direction as a field."""
    key, m, part = entry
    if not any(m):
        scalar = TrigScalar(model.dim, {m: 1.0 + 0.0j}, exact=False)
    elif part == "re":
        mneg = tuple(-x for x in m)
        scalar = TrigScalar(model.dim, {m: 1.0 + 0.0j, mneg: 1.0 + 0.0j}, exact=False)
    else:
        mneg = tuple(-x for x in m)
        scalar = TrigScalar(model.dim, {m: 1j, mneg: -1j}, exact=False)
    return SymTensorField(model, 3, {key: scalar}, exact=False)


def field_l2_norm(f: SymTensorField) -> float:
    """Positive L2 norm over all index tuples; the diagnostic residual size."""
    dim = f.model.dim
    acc = 0.0
    for idx in itertools.product(range(dim), repeat=f.degree):
        v = f.get(idx)
        if not v.is_zero():
            acc += v.dot_mean(v)
    return math.sqrt(max(acc, 0.0))


# -- functionals in floating point ----------------------------------------------


def fid_to_inexact(fid: FunctionalId) -> FunctionalId:
    """Mirror a functional id with inexact payloads."""
    return FunctionalId(
        fid.tag,
        ref_conn=fid.ref_conn.to_inexact() if fid.ref_conn is not None else None,
        direction=fid.direction.to_inexact() if fid.direction is not None else None,
        alpha=fid.alpha.to_inexact() if fid.alpha is not None else None,
        k=fid.k,
        poly=fid.poly,
        weights=fid.weights,
        ext=_ext_to_inexact(fid.ext),
        params=fid.params,
    )


def _ext_to_inexact(ext):
    if ext is None:
        return None
    from .lie_structures import ExtElement

    return ExtElement(ext.model, ext.a0.to_inexact(), ext.a2.to_inexact(), ext.a3.to_inexact())


def evaluate_at(fid: FunctionalId, theta: ParamVector) -> float:
    return float(evaluate(fid_to_inexact(fid), theta.to_connection()))


def fd_variation(fid: FunctionalId, theta: ParamVector, direction: ParamVector, h: float) -> float:
    """Central difference (F(theta + h dir) - F(theta - h dir)) / 2h."""
    if h <= 0:
        raise ValueError("step must be positive")
    plus = evaluate_at(fid, theta.copy_with(theta.values + h * direction.values))
    minus = evaluate_at(fid, theta.copy_with(theta.values - h * direction.values))
    out = (plus - minus) / (2.0 * h)
    if not math.isfinite(out):
        raise FloatingPointError("finite-difference variation is not finite")
    return out


def fd_richardson(fid: FunctionalId, theta: ParamVector, direction: ParamVector, h: float) -> float:
    """Two-point Richardson extrapolation of the central difference."""
    d1 = fd_variation(fid, theta, direction, h)
    d2 = fd_variation(fid, theta, direction, h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def analytic_variation(fid: FunctionalId, theta: ParamVector, direction: ParamVector) -> float:
    """Omega(direction, H_F) with the analytic field, in floating point."""
    conn = theta.to_connection()
    fld = hamiltonian_field(fid_to_inexact(fid), conn)
    return float(conn_pairing(direction.to_field(), fld))


# -- gradient descent --------------------------------------------------------------


@dataclass
class FlowState:
    theta: ParamVector
    time: float
    diagnostics: dict


@dataclass
class DescentResult:
    final: FlowState
    trace: list[dict] = field(default_factory=list)
    converged: bool = False


def _descent_diagnostics(theta: ParamVector, params: BracketParams) -> tuple[dict, SymTensorField]:
    conn = theta.to_connection()
    res = residuals(conn, params)
    e = evaluate(FunctionalId("e_poly", poly=(Fraction(0), Fraction(0), Fraction(1))), conn)
    r1 = r_k_value(conn, 1)
    s, t = float(params.s), float(params.t)
    j = t * t * e + 2.0 * s * s * r1
    diag = {
        "J": float(j),
        "E": float(e),
        "R1": float(r1),
        "preferred_norm": field_l2_norm(res["preferred"]),
        "critical_norm": field_l2_norm(res["critical"]),
        "coupled_norm": field_l2_norm(res["coupled"]),
    }
    return diag, res["coupled"]


def coefficient_gradient(theta: ParamVector, params: BracketParams) -> np.ndarray:
    """Analytic gradient of J in the layout coordinates: the residual field
    paired against each coordinate direction."""
    _, coupled = _descent_diagnostics(theta, params)
    resid = coupled.scale(2.0)
    grad = np.zeros(len(theta.layout))
    for i, entry in enumerate(theta.layout):
        grad[i] = float(conn_pairing(resid, basis_direction(theta.model, entry)))
    return grad


def gradient_descent(
    params: BracketParams,
    theta0: ParamVector,
    step: float = 1e-2,
    max_iters: int = 500,
    tol: float = 1e-8,
    target_j: float | None = None,
) -> DescentResult:
    """Backtracking descent of J = t^2 E + 2 s^2 R_(1); accepted steps never
    increase J.  Stops on gradient norm below tol, on reaching target_j, or
    after max_iters; raises on divergence (60 failed halvings)."""
    if step <= 0:
        raise ValueError("step must be positive")
    theta = theta0
    diag, coupled = _descent_diagnostics(theta, params)
    trace: list[dict] = []
    converged = False
    for it in range(max_iters + 1):
        resid = coupled.scale(2.0)
        grad = np.zeros(len(theta.layout))
        for i, entry in enumerate(theta.layout):
            grad[i] = float(conn_pairing(resid, basis_direction(theta.model, entry)))
        gnorm = float(np.linalg.norm(grad))
        trace.append({"iter": it, **diag, "grad_norm": gnorm, "step": step})
        if gnorm < tol:
            converged = True
            break
        if target_j is not None and diag["J"] <= target_j:
            converged = True
            break
        if it == max_iters:
            break
        halvings = 0
        while True:
            cand = theta.copy_with(theta.values - step * grad)
            cand_diag, cand_coupled = _descent_diagnostics(cand, params)
            if not math.isfinite(cand_diag["J"]):
                raise FloatingPointError("descent produced a non-finite objective")
            if cand_diag["J"] <= diag["J"]:
                theta, diag, coupled = cand, cand_diag, cand_coupled
                step *= 1.5
                break
            step *= 0.5
            halvings += 1
            if halvings > 60:
                raise RuntimeError("descent diverged: objective never decreased")
    state = FlowState(theta, 0.0, diag)
    return DescentResult(state, trace, converged)


# -- Hamiltonian flows -------------------------------------------------------------


def flow_field(theta: ParamVector, k: int, cflow: float) -> np.ndarray:
    """Layout projection of c * H_{R_(k)} = -c d* Ric^{2k-1} at theta."""
    conn = theta.to_connection()
    fid = FunctionalId("r_k", k=k)
    fld = hamiltonian_field(fid, conn)
    return cflow * theta.load_field(fld).values


def flow_integrate(
    k: int,
    cflow: float,
    state0: FlowState,
    dt: float,
    steps: int,
) -> list[FlowState]:
    """Classical RK4 for d theta/dt = c H_{R_(k)}(theta); tracks the drift of
    the conserved quadratic moment integral E."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    theta = state0.theta
    e_fid = FunctionalId("e_poly", poly=(Fraction(0), Fraction(0), Fraction(1)))

    def energy_of(v: np.ndarray) -> float:
        return evaluate_at(e_fid, theta.copy_with(v))

    e0 = energy_of(theta.values)
    out = [FlowState(theta, state0.time, {"E": e0, "E_drift": 0.0})]
    v = theta.values.copy()
    t = state0.time
    for _ in range(steps):
        k1 = flow_field(theta.copy_with(v), k, cflow)
        k2 = flow_field(theta.copy_with(v + 0.5 * dt * k1), k, cflow)
        k3 = flow_field(theta.copy_with(v + 0.5 * dt * k2), k, cflow)
        k4 = flow_field(theta.copy_with(v + dt * k3), k, cflow)
        v = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(v)):
            raise FloatingPointError("flow state is not finite")
        t += dt
        e = energy_of(v)
        out.append(FlowState(theta.copy_with(v), t, {"E": e, "E_drift": e - e0}))
    return out
