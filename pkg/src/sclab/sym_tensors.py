"""Symmetric and block-symmetric covariant tensor fields on the torus.

Conventions, fixed once here and used everywhere:

* the symplectic form is the constant Darboux matrix Omega_{a, n+a} = 1
  (0-based: Omega[i][i+n] = 1, Omega[i+n][i] = -1);
* the inverse bivector satisfies Omega^{ip} Omega_{pj} = -delta_j^i, which
  makes its matrix of components numerically equal to the lower one;
* indices are raised and lowered by X^i = Omega^{ip} X_p and
  X_i = X^p Omega_{pi}, keeping the horizontal slot position.

Components are stored sparsely on canonical index keys: sorted inside
symmetric blocks, strictly increasing inside antisymmetric blocks (with the
sign tracked on lookup).  All multiplicity bookkeeping runs through the two
builders at the bottom, which average a raw index formula over the distinct
arrangements of each canonical key.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .exact_scalars import Freq, GaussianRational, TrigScalar, ts_sum

Idx = tuple[int, ...]
Blocks = tuple[tuple[str, int], ...]

_F0 = Fraction(0)
_F1 = Fraction(1)

_ZERO_CACHE: dict[tuple[int, bool], TrigScalar] = {}


def _zero_ts(dim: int, exact: bool) -> TrigScalar:
    key = (dim, exact)
    z = _ZERO_CACHE.get(key)
    if z is None:
        z = TrigScalar.zero(dim, exact)
        _ZERO_CACHE[key] = z
    return z


class SymplecticModel:
    """The torus T^{2n} with the standard constant Darboux form."""

    __slots__ = ("n", "dim")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.dim = 2 * n

    def partner(self, i: int) -> int:
        return i + self.n if i < self.n else i - self.n

    def omega_sign(self, i: int) -> int:
        """Omega_{i, partner(i)} = Omega^{i, partner(i)} = this sign."""
        return 1 if i < self.n else -1

    def omega_lower(self, i: int, j: int) -> Fraction:
        if j == self.partner(i):
            return Fraction(self.omega_sign(i))
        return _F0

    def omega_upper(self, i: int, j: int) -> Fraction:
        return self.omega_lower(i, j)

    def __eq__(self, other):
        return isinstance(other, SymplecticModel) and self.n == other.n

    def __hash__(self):
        return hash(("SymplecticModel", self.n))

    def __repr__(self):
        return f"SymplecticModel(n={self.n})"


# -- canonical index handling ------------------------------------------------


def _perm_sign(seq: Sequence[int]) -> int:
    s = 1
    lst = list(seq)
    for i in range(len(lst)):
        for j in range(i + 1, len(lst)):
            if lst[i] > lst[j]:
                s = -s
    return s


def canonicalize(blocks: Blocks, idx: Idx) -> tuple[int, Idx | None]:
    """Return (sign, canonical key); sign 0 means identically zero slot."""
    pos = 0
    sign = 1
    out: list[int] = []
    for kind, size in blocks:
        part = idx[pos : pos + size]
        pos += size
        if kind == "s":
            out.extend(sorted(part))
        else:
            if len(set(part)) != size:
                return 0, None
            sign *= _perm_sign(part)
            out.extend(sorted(part))
    return sign, tuple(out)


def canonical_keys(dim: int, blocks: Blocks) -> Iterable[Idx]:
    pools = []
    for kind, size in blocks:
        if kind == "s":
            pools.append(itertools.combinations_with_replacement(range(dim), size))
        else:
            pools.append(itertools.combinations(range(dim), size))
    for combo in itertools.product(*pools):
        yield tuple(itertools.chain.from_iterable(combo))


class TensorBase:
    """Shared storage and linear structure for tensor fields."""

    __slots__ = ("model", "blocks", "comps", "exact")

    def __init__(self, model: SymplecticModel, blocks: Blocks, comps: dict[Idx, TrigScalar], exact: bool = True):
        self.model = model
        self.blocks = blocks
        self.exact = exact
        self.comps = {k: v for k, v in comps.items() if not v.is_zero()}

    @property
    def degree(self) -> int:
        return sum(size for _, size in self.blocks)

    def get(self, idx: Idx) -> TrigScalar:
        sign, key = canonicalize(self.blocks, idx)
        if sign == 0:
            return _zero_ts(self.model.dim, self.exact)
        v = self.comps.get(key)
        if v is None:
            return _zero_ts(self.model.dim, self.exact)
        return v if sign == 1 else -v

    def is_zero(self) -> bool:
        return not self.comps

    def _check(self, other: "TensorBase"):
        if self.model != other.model:
            raise ValueError("model mismatch")
        if self.blocks != other.blocks:
            raise ValueError(f"shape mismatch: {self.blocks} != {other.blocks}")

    def _new(self, comps: dict[Idx, TrigScalar]):
        return type(self)._from_parts(self.model, self.blocks, comps, self.exact)

    def __add__(self, other):
        self._check(other)
        out = dict(self.comps)
        for k, v in other.comps.items():
            prev = out.get(k)
            out[k] = v if prev is None else prev + v
        return self._new(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._new({k: -v for k, v in self.comps.items()})

    def scale(self, q) -> "TensorBase":
        return self._new({k: v.scale(q) for k, v in self.comps.items()})

    def scale_scalar(self, f: TrigScalar) -> "TensorBase":
        """Pointwise multiplication by a scalar field."""
        return self._new({k: v * f for k, v in self.comps.items()})

    def band(self) -> int:
        return max((v.band() for v in self.comps.values()), default=0)

    def to_inexact(self):
        if not self.exact:
            return self
        return type(self)._from_parts(
            self.model, self.blocks, {k: v.to_inexact() for k, v in self.comps.items()}, False
        )

    def __eq__(self, other):
        if not isinstance(other, TensorBase):
            return NotImplemented
        return (
            self.model == other.model
            and self.blocks == other.blocks
            and self.exact == other.exact
            and self.comps == other.comps
        )

    def __hash__(self):
        return hash((self.model, self.blocks, frozenset(self.comps.items())))


class SymTensorField(TensorBase):
    """Fully symmetric covariant tensor field of a fixed degree."""

    __slots__ = ()

    def __init__(self, model: SymplecticModel, degree: int, comps: dict[Idx, TrigScalar] | None = None, exact: bool = True):
        super().__init__(model, (("s", degree),), comps or {}, exact)

    @classmethod
    def _from_parts(cls, model, blocks, comps, exact):
        return cls(model, blocks[0][1], comps, exact)

    @classmethod
    def zero(cls, model: SymplecticModel, degree: int, exact: bool = True) -> "SymTensorField":
        return cls(model, degree, {}, exact)

    @classmethod
    def from_scalar(cls, model: SymplecticModel, f: TrigScalar) -> "SymTensorField":
        return cls(model, 0, {(): f}, f.exact)

    @classmethod
    def random(cls, model: SymplecticModel, degree: int, band: int, seed: int, mag: int = 2) -> "SymTensorField":
        comps = {}
        for i, key in enumerate(canonical_keys(model.dim, (("s", degree),))):
            comps[key] = TrigScalar.random(seed * 7919 + 31 * i, model.dim, band, mag)
        return cls(model, degree, comps)

    def scalar(self) -> TrigScalar:
        if self.degree != 0:
            raise ValueError("scalar() needs a degree-0 tensor")
        return self.comps.get((), _zero_ts(self.model.dim, self.exact))

    def __repr__(self):
        return f"SymTensorField(n={self.model.n}, degree={self.degree}, {len(self.comps)} comps)"

    # -- serialization --------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "n": self.model.n,
            "degree": self.degree,
            "comps": [
                {"idx": list(k), "scalar": self.comps[k].to_payload()}
                for k in sorted(self.comps)
            ],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "SymTensorField":
        try:
            model = SymplecticModel(int(payload["n"]))
            degree = int(payload["degree"])
            comps: dict[Idx, TrigScalar] = {}
            for entry in payload["comps"]:
                idx = tuple(int(x) for x in entry["idx"])
                if len(idx) != degree or list(idx) != sorted(idx):
                    raise ValueError(f"component index {idx} is not a sorted degree-{degree} key")
                if any(not 0 <= i < model.dim for i in idx):
                    raise ValueError(f"component index {idx} out of range")
                if idx in comps:
                    raise ValueError(f"duplicate component index {idx}")
                comps[idx] = TrigScalar.from_payload(entry["scalar"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed tensor payload: {exc}") from exc
        return cls(model, degree, comps)


class MixedTensorField(TensorBase):
    """Covariant tensor field with declared block symmetries.

    Blocks are ('s', size) or ('a', size); a size-1 'a' block is a free slot.
    Curvature lives in blocks (('a', 2), ('s', 2)), connection differences
    with torsion in (('a', 1), ('s', 2)).
    """

    __slots__ = ()

    @classmethod
    def _from_parts(cls, model, blocks, comps, exact):
        return cls(model, blocks, comps, exact)

    @classmethod
    def zero(cls, model: SymplecticModel, blocks: Blocks, exact: bool = True) -> "MixedTensorField":
        return cls(model, blocks, {}, exact)

    def __repr__(self):
        return f"MixedTensorField(n={self.model.n}, blocks={self.blocks}, {len(self.comps)} comps)"

    def to_payload(self) -> dict:
        return {
            "n": self.model.n,
            "blocks": [[kind, size] for kind, size in self.blocks],
            "comps": [
                {"idx": list(k), "scalar": self.comps[k].to_payload()}
                for k in sorted(self.comps)
            ],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "MixedTensorField":
        try:
            model = SymplecticModel(int(payload["n"]))
            blocks = tuple((str(kind), int(size)) for kind, size in payload["blocks"])
            comps: dict[Idx, TrigScalar] = {}
            for entry in payload["comps"]:
                idx = tuple(int(x) for x in entry["idx"])
                sign, key = canonicalize(blocks, idx)
                if sign != 1 or key != idx:
                    raise ValueError(f"component index {idx} is not canonical for {blocks}")
                if idx in comps:
                    raise ValueError(f"duplicate component index {idx}")
                comps[idx] = TrigScalar.from_payload(entry["scalar"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed tensor payload: {exc}") from exc
        return cls(model, blocks, comps)


class FormalSum:
    """Graded finite family of symmetric tensor fields, degrees 0..max_degree.

    Degrees above max_degree are identically zero by convention; operations
    that would land there are silently truncated.
    """

    __slots__ = ("model", "max_degree", "parts", "exact")

    def __init__(self, model: SymplecticModel, max_degree: int, parts: dict[int, SymTensorField] | None = None, exact: bool = True):
        self.model = model
        self.max_degree = max_degree
        self.exact = exact
        clean: dict[int, SymTensorField] = {}
        if parts:
            for k, f in parts.items():
                if k > max_degree or f.is_zero():
                    continue
                if f.degree != k:
                    raise ValueError(f"part at degree {k} has degree {f.degree}")
                clean[k] = f
        self.parts = clean

    def part(self, k: int) -> SymTensorField:
        f = self.parts.get(k)
        if f is None:
            return SymTensorField.zero(self.model, k, self.exact)
        return f

    def with_part(self, k: int, f: SymTensorField) -> "FormalSum":
        parts = dict(self.parts)
        parts[k] = f
        return FormalSum(self.model, self.max_degree, parts, self.exact)

    def __add__(self, other: "FormalSum") -> "FormalSum":
        if self.model != other.model or self.max_degree != other.max_degree:
            raise ValueError("formal sums live in different truncations")
        parts = dict(self.parts)
        for k, f in other.parts.items():
            parts[k] = parts[k] + f if k in parts else f
        return FormalSum(self.model, self.max_degree, parts, self.exact)

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + other.scale(-1)

    def scale(self, q) -> "FormalSum":
        return FormalSum(self.model, self.max_degree, {k: f.scale(q) for k, f in self.parts.items()}, self.exact)

    def project_low(self, k: int) -> "FormalSum":
        """pi_k: zero out the parts of degree below k."""
        return FormalSum(
            self.model, self.max_degree, {d: f for d, f in self.parts.items() if d >= k}, self.exact
        )

    def is_zero(self) -> bool:
        return not self.parts

    def __eq__(self, other):
        if not isinstance(other, FormalSum):
            return NotImplemented
        return (
            self.model == other.model
            and self.max_degree == other.max_degree
            and self.parts == other.parts
        )

    def __repr__(self):
        return f"FormalSum(n={self.model.n}, degrees={sorted(self.parts)})"


# -- builders ---------------------------------------------------------------


def build_sym_field(
    model: SymplecticModel,
    degree: int,
    fn: Callable[[Idx], TrigScalar],
    exact: bool = True,
) -> SymTensorField:
    """Symmetric field whose component at I is the average of fn over the
    distinct arrangements of I.  fn need not be symmetric."""
    comps: dict[Idx, TrigScalar] = {}
    dim = model.dim
    for key in itertools.combinations_with_replacement(range(dim), degree):
        arrangements = set(itertools.permutations(key))
        total = ts_sum((fn(t) for t in arrangements), dim, exact)
        val = total.scale(Fraction(1, len(arrangements)))
        if not val.is_zero():
            comps[key] = val
    return SymTensorField(model, degree, comps, exact)


def build_mixed_field(
    model: SymplecticModel,
    blocks: Blocks,
    fn: Callable[[Idx], TrigScalar],
    exact: bool = True,
) -> MixedTensorField:
    """Mixed field from a formula already carrying the declared symmetries;
    fn is evaluated at canonical keys only."""
    comps: dict[Idx, TrigScalar] = {}
    for key in canonical_keys(model.dim, blocks):
        val = fn(key)
        if not val.is_zero():
            comps[key] = val
    return MixedTensorField(model, blocks, comps, exact)


# -- core operations ----------------------------------------------------------


def sym_product(a: SymTensorField, b: SymTensorField) -> SymTensorField:
    """Symmetric product: full symmetrization of the tensor product."""
    if a.model != b.model:
        raise ValueError("model mismatch")
    k, l = a.degree, b.degree
    if k == 0:
        return b.scale_scalar(a.scalar())
    if l == 0:
        return a.scale_scalar(b.scalar())

    def fn(t: Idx) -> TrigScalar:
        return a.get(t[:k]) * b.get(t[k:])

    return build_sym_field(a.model, k + l, fn, a.exact)


def raise_all(a: TensorBase) -> TensorBase:
    """Raise every index with X^i = Omega^{ip} X_p; sparse in the Darboux frame.

    The stored slot p contributes to the raised slot i = partner(p) with the
    factor Omega^{i, p} = -omega_sign(p).
    """
    model = a.model
    out: dict[Idx, TrigScalar] = {}
    for key, val in a.comps.items():
        sgn = 1
        img = []
        for i in key:
            img.append(model.partner(i))
            sgn *= -model.omega_sign(i)
        csign, ckey = canonicalize(a.blocks, tuple(img))
        if csign == 0:
            continue
        v = val if sgn * csign == 1 else -val
        prev = out.get(ckey)
        out[ckey] = v if prev is None else prev + v
    return a._new(out)


def lower_all(a: TensorBase) -> TensorBase:
    """Lower every index with X_i = X^p Omega_{pi}; inverse of raise_all.

    The stored slot p contributes to the lowered slot i = partner(p) with the
    factor Omega_{p, i} = omega_sign(p).
    """
    model = a.model
    out: dict[Idx, TrigScalar] = {}
    for key, val in a.comps.items():
        sgn = 1
        img = []
        for i in key:
            img.append(model.partner(i))
            sgn *= model.omega_sign(i)
        csign, ckey = canonicalize(a.blocks, tuple(img))
        if csign == 0:
            continue
        v = val if sgn * csign == 1 else -val
        prev = out.get(ckey)
        out[ckey] = v if prev is None else prev + v
    return a._new(out)


def full_contraction_mean(a: TensorBase, b: TensorBase):
    """Integral of a_I b^I summed over all index tuples (no block factors)."""
    if a.model != b.model or a.blocks != b.blocks:
        raise ValueError("shape mismatch")
    braised = raise_all(b)
    dim = a.model.dim
    acc = _F0 if a.exact else 0.0
    for idx in itertools.product(range(dim), repeat=a.degree):
        va = a.get(idx)
        if va.is_zero():
            continue
        vb = braised.get(idx)
        if vb.is_zero():
            continue
        acc += va.dot_mean(vb)
    return acc


def global_pairing(a: TensorBase, b: TensorBase):
    """Graded symmetric pairing <<a, b>> with the (-1)^p / p! normalization
    on shapes with an antisymmetric block of total size p."""
    p = sum(size for kind, size in a.blocks if kind == "a")
    raw = full_contraction_mean(a, b)
    if p == 0:
        return raw
    factor = Fraction((-1) ** p, _factorial(p))
    if isinstance(raw, Fraction):
        return raw * factor
    return raw * float(factor)


def _factorial(p: int) -> int:
    out = 1
    for i in range(2, p + 1):
        out *= i
    return out


def algebraic_bracket(a: SymTensorField, b: SymTensorField) -> SymTensorField:
    """Degree -2 fiberwise Poisson bracket of symmetric tensor fields:

        (a, b)_{i_1...} = k l a_{p(i_1..i_{k-1}} b_{i_k...)}{}^p.
    """
    if a.model != b.model:
        raise ValueError("model mismatch")
    model = a.model
    k, l = a.degree, b.degree
    deg = k + l - 2
    if k == 0 or l == 0 or deg < 0:
        return SymTensorField.zero(model, max(deg, 0), a.exact)
    dim = model.dim

    def fn(t: Idx) -> TrigScalar:
        head, tail = t[: k - 1], t[k - 1 :]
        vals = []
        for p in range(dim):
            q = model.partner(p)
            s = model.omega_sign(p)  # Omega^{pq}
            term = a.get((p,) + head) * b.get(tail + (q,))
            vals.append(term if s == 1 else -term)
        return ts_sum(vals, dim, a.exact)

    return build_sym_field(model, deg, fn, a.exact).scale(Fraction(k * l))


def eta_map(a: FormalSum) -> FormalSum:
    """Multiply the degree-k part by k (kills constants)."""
    return FormalSum(
        a.model, a.max_degree, {k: f.scale(k) for k, f in a.parts.items() if k > 0}, a.exact
    )


def prolongation_bracket(a: SymTensorField, b: SymTensorField) -> SymTensorField:
    """The bracket with k l [a, b] = (k + l - 2)(a, b); undefined below degree 1."""
    k, l = a.degree, b.degree
    if k == 0 or l == 0:
        raise ValueError("prolongation bracket needs both degrees >= 1")
    return algebraic_bracket(a, b).scale(Fraction(k + l - 2, k * l))


def poisson_scalar(f: TrigScalar, g: TrigScalar, model: SymplecticModel) -> TrigScalar:
    """Poisson bracket {f, g} = (d^*f, d^*g) with d^*f = -df on scalars."""
    df = _minus_d(f, model)
    dg = _minus_d(g, model)
    return algebraic_bracket(df, dg).scalar()


def _minus_d(f: TrigScalar, model: SymplecticModel) -> SymTensorField:
    comps = {}
    for i in range(model.dim):
        v = -f.partial(i)
        if not v.is_zero():
            comps[(i,)] = v
    return SymTensorField(model, 1, comps, f.exact)
