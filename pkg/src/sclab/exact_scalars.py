"""Exact scalar fields on the torus T^{2n} = (R/2piZ)^{2n}.

A scalar field is a finite Fourier series sum_m c_m e^{i m.x} whose
coefficients c_m are Gaussian rationals and satisfy the Hermitian symmetry
c_{-m} = conj(c_m), so the field is real valued.  Products, partial
derivatives and the normalized torus integral (the mean) are then computed
without any rounding.  The same container also runs with complex floating
coefficients; that inexact twin is what the numerical layer drives.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import cmath

Freq = tuple[int, ...]

_F0 = Fraction(0)
_F1 = Fraction(1)


class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def conjugate(self) -> "GaussianRational":
        return _gr(self.re, -self.im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __add__(self, other):
        return _gr(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return _gr(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return _gr(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return _gr(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return _gr(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return float(self.re) + 1j * float(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


def _gr(re: Fraction, im: Fraction) -> GaussianRational:
    g = GaussianRational.__new__(GaussianRational)
    g.re = re
    g.im = im
    return g


_GR_ZERO = _gr(_F0, _F0)


class TrigScalar:
    """Real-valued trigonometric polynomial on the torus.

    ``terms`` maps an integer frequency vector of length ``dim`` to its
    coefficient.  Zero coefficients are never stored, so equality of the
    term mappings is equality of fields.  ``exact`` selects the coefficient
    ring: GaussianRational when True, complex floats otherwise.
    """

    __slots__ = ("dim", "terms", "exact")

    def __init__(self, dim: int, terms: Mapping[Freq, object] | None = None, exact: bool = True):
        self.dim = dim
        self.exact = exact
        if terms:
            if exact:
                self.terms = {m: c for m, c in terms.items() if not c.is_zero()}
            else:
                self.terms = {m: c for m, c in terms.items() if c != 0}
        else:
            self.terms = {}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int, exact: bool = True) -> "TrigScalar":
        return cls(dim, None, exact)

    @classmethod
    def const(cls, dim: int, value, exact: bool = True) -> "TrigScalar":
        if exact:
            c = GaussianRational(value)
            return cls(dim, {(0,) * dim: c}, True)
        return cls(dim, {(0,) * dim: complex(value)}, False)

    @classmethod
    def cosine(cls, dim: int, m: Sequence[int], scale=1) -> "TrigScalar":
        """scale * cos(m.x) stored as the Hermitian pair at +-m."""
        m = tuple(m)
        half = Fraction(scale) / 2
        if not any(m):
            return cls.const(dim, 2 * half)
        return cls(dim, {m: _gr(half, _F0), _neg(m): _gr(half, _F0)})

    @classmethod
    def sine(cls, dim: int, m: Sequence[int], scale=1) -> "TrigScalar":
        """scale * sin(m.x): coefficient -i/2 at m and i/2 at -m."""
        m = tuple(m)
        half = Fraction(scale) / 2
        if not any(m):
            return cls.zero(dim)
        return cls(dim, {m: _gr(_F0, -half), _neg(m): _gr(_F0, half)})

    @classmethod
    def from_terms(cls, dim: int, terms: Mapping[Freq, GaussianRational]) -> "TrigScalar":
        """Validating constructor: checks shapes and Hermitian symmetry."""
        clean: dict[Freq, GaussianRational] = {}
        for m, c in terms.items():
            m = tuple(int(x) for x in m)
            if len(m) != dim:
                raise ValueError(f"frequency {m} does not have length {dim}")
            if not isinstance(c, GaussianRational):
                c = GaussianRational(c)
            if not c.is_zero():
                clean[m] = c
        for m, c in clean.items():
            cc = clean.get(_neg(m), _GR_ZERO)
            if cc != c.conjugate():
                raise ValueError(f"coefficients at {m} and {_neg(m)} break Hermitian symmetry")
        return cls(dim, clean, True)

    @classmethod
    def random(cls, seed: int, dim: int, band: int, mag: int = 3) -> "TrigScalar":
        """Deterministic random field with frequencies in the band box.

        Numerators are drawn from [-mag, mag] and denominators from {1, 2};
        the coefficient at -m is forced to conj(c_m).
        """
        if band < 0:
            raise ValueError("band must be >= 0")
        rng = random.Random(seed)
        terms: dict[Freq, GaussianRational] = {}
        for m in _band_box(dim, band):
            if not _is_canonical_freq(m):
                continue
            re = Fraction(rng.randint(-mag, mag), rng.choice((1, 2)))
            if any(m):
                im = Fraction(rng.randint(-mag, mag), rng.choice((1, 2)))
            else:
                im = _F0
            c = _gr(re, im)
            if c.is_zero():
                continue
            terms[m] = c
            if any(m):
                terms[_neg(m)] = c.conjugate()
        return cls(dim, terms, True)

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "TrigScalar") -> "TrigScalar":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
        return TrigScalar(self.dim, out, self.exact)

    def __sub__(self, other: "TrigScalar") -> "TrigScalar":
        return self + (-other)

    def __neg__(self) -> "TrigScalar":
        return TrigScalar(self.dim, {m: -c for m, c in self.terms.items()}, self.exact)

    def __mul__(self, other):
        if isinstance(other, TrigScalar):
            self._check(other)
            out: dict[Freq, object] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    p = c1 * c2
                    prev = out.get(m)
                    out[m] = p if prev is None else prev + p
            return TrigScalar(self.dim, out, self.exact)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, q) -> "TrigScalar":
        """Multiply by a rational (or real) constant, staying in the ring."""
        if self.exact:
            q = q if isinstance(q, Fraction) else Fraction(q)
            if not q:
                return TrigScalar.zero(self.dim, True)
            return TrigScalar(self.dim, {m: c * q for m, c in self.terms.items()}, True)
        qf = float(q)
        if qf == 0.0:
            return TrigScalar.zero(self.dim, False)
        return TrigScalar(self.dim, {m: c * qf for m, c in self.terms.items()}, False)

    def partial(self, axis: int) -> "TrigScalar":
        """d/dx_axis: the coefficient at m becomes i*m_axis*c_m."""
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dim {self.dim}")
        out = {}
        if self.exact:
            for m, c in self.terms.items():
                k = m[axis]
                if k:
                    out[m] = _gr(-k * c.im, k * c.re)
        else:
            for m, c in self.terms.items():
                k = m[axis]
                if k:
                    out[m] = c * (1j * k)
        return TrigScalar(self.dim, out, self.exact)

    def mean(self):
        """Average over the torus with volume normalized to 1."""
        c = self.terms.get((0,) * self.dim)
        if c is None:
            return _F0 if self.exact else 0.0
        return c.re if self.exact else c.real

    def dot_mean(self, other: "TrigScalar"):
        """mean(self * other) without forming the product field."""
        self._check(other)
        a, b = self.terms, other.terms
        if len(b) < len(a):
            a, b = b, a
        if self.exact:
            acc = _F0
            for m, c in a.items():
                cc = b.get(_neg(m))
                if cc is not None:
                    acc += c.re * cc.re - c.im * cc.im
            return acc
        acc = 0.0
        for m, c in a.items():
            cc = b.get(_neg(m))
            if cc is not None:
                acc += (c * cc).real
        return acc

    def eval(self, point: Sequence[float]) -> float:
        """Evaluate at a point, discarding the imaginary residue."""
        acc = 0.0 + 0.0j
        for m, c in self.terms.items():
            phase = 0.0
            for k, x in zip(m, point):
                if k:
                    phase += k * x
            acc += complex(c) * cmath.exp(1j * phase)
        return acc.real

    # -- queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def band(self) -> int:
        b = 0
        for m in self.terms:
            for k in m:
                if abs(k) > b:
                    b = abs(k)
        return b

    def to_inexact(self) -> "TrigScalar":
        if not self.exact:
            return self
        return TrigScalar(self.dim, {m: complex(c) for m, c in self.terms.items()}, False)

    def __eq__(self, other):
        if not isinstance(other, TrigScalar):
            return NotImplemented
        return self.dim == other.dim and self.exact == other.exact and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"TrigScalar(dim={self.dim}, 0)"
        parts = [f"{m}:{c!r}" for m, c in sorted(self.terms.items())[:4]]
        suffix = "..." if len(self.terms) > 4 else ""
        return f"TrigScalar(dim={self.dim}, {{{', '.join(parts)}{suffix}}})"

    def _check(self, other: "TrigScalar"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} != {other.dim}")
        if self.exact != other.exact:
            raise ValueError("cannot mix exact and inexact coefficient rings")

    # -- serialization ---------------------------------------------------

    def to_payload(self) -> dict:
        """JSON form: canonical half of each +-m pair, sorted by frequency."""
        if not self.exact:
            raise ValueError("only exact fields are serialized")
        entries = []
        for m in sorted(k for k in self.terms if _is_canonical_freq(k)):
            c = self.terms[m]
            entries.append(
                {
                    "m": list(m),
                    "re": [str(c.re.numerator), str(c.re.denominator)],
                    "im": [str(c.im.numerator), str(c.im.denominator)],
                }
            )
        return {"dim": self.dim, "terms": entries}

    @classmethod
    def from_payload(cls, payload: dict) -> "TrigScalar":
        try:
            dim = int(payload["dim"])
            terms: dict[Freq, GaussianRational] = {}
            for entry in payload["terms"]:
                m = tuple(int(x) for x in entry["m"])
                if len(m) != dim:
                    raise ValueError(f"frequency {m} does not have length {dim}")
                if not _is_canonical_freq(m):
                    raise ValueError(f"frequency {m} is not the canonical half of its pair")
                re = Fraction(int(entry["re"][0]), int(entry["re"][1]))
                im = Fraction(int(entry["im"][0]), int(entry["im"][1]))
                if not any(m) and im:
                    raise ValueError("constant term must be real")
                c = _gr(re, im)
                if c.is_zero():
                    continue
                if m in terms:
                    raise ValueError(f"duplicate frequency {m}")
                terms[m] = c
                if any(m):
                    terms[_neg(m)] = c.conjugate()
        except (KeyError, IndexError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed scalar payload: {exc}") from exc
        return cls(dim, terms, True)


def ts_sum(fields: Iterable[TrigScalar], dim: int | None = None, exact: bool = True) -> TrigScalar:
    """Sum a sequence of fields with a single accumulator pass."""
    out: dict[Freq, object] = {}
    it = iter(fields)
    first = next(it, None)
    if first is None:
        if dim is None:
            raise ValueError("ts_sum of an empty sequence needs an explicit dim")
        return TrigScalar.zero(dim, exact)
    dim = first.dim
    exact = first.exact
    out.update(first.terms)
    for f in it:
        first._check(f)
        for m, c in f.terms.items():
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
    return TrigScalar(dim, out, exact)


def check_hermitian(f: TrigScalar) -> bool:
    """Exact-layer invariant check used by tests and deserialization."""
    for m, c in f.terms.items():
        cc = f.terms.get(_neg(m))
        if cc is None or cc != c.conjugate():
            return False
    return True


def _neg(m: Freq) -> Freq:
    return tuple(-x for x in m)


def _is_canonical_freq(m: Freq) -> bool:
    for x in m:
        if x > 0:
            return True
        if x < 0:
            return False
    return True  # the zero frequency


def _band_box(dim: int, band: int):
    if dim == 0:
        yield ()
        return
    for head in _band_box(dim - 1, band):
        for k in range(-band, band + 1):
            yield head + (k,)
