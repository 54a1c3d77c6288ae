"""Exact arithmetic in Q_p and F_p((theta)) at finite absolute precision.

An element is ``x = sum_{j=N}^{M-1} d_j * pi^j`` where ``pi`` is ``p`` (Q_p,
carries propagate) or ``theta`` (F_p((theta)), digits add mod p without
carry). ``N`` is the valuation and ``M`` the absolute precision: the element
is known modulo ``pi^M``. Binary operations return the coarser precision,
and anything that would need an unknown digit raises
:class:`~padic_levy.errors.PrecisionExhausted` instead of guessing.

Q_p elements keep their unit part as a Python integer; F_p((theta))
elements keep their coefficient tuple. Digits of Q_p elements are derived
lazily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DivisionByZero,
    FieldMismatch,
    InvalidParams,
    PrecisionExhausted,
)

INF = math.inf
TWO_PI = 2.0 * math.pi


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class FieldKind(str, Enum):
    QP = "qp"
    FPTHETA = "fptheta"


@dataclass(frozen=True)
class FieldSpec:
    """Prime, field kind and default absolute precision."""

    p: int
    kind: FieldKind = FieldKind.QP
    precision: int = 32

    def __post_init__(self):
        object.__setattr__(self, "kind", FieldKind(self.kind))
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise InvalidParams(f"p={self.p!r} is not a prime")
        if self.precision < 1:
            raise InvalidParams("precision must be >= 1")

    @property
    def char_p(self) -> bool:
        return self.kind is FieldKind.FPTHETA

    def __repr__(self):
        name = "Q" if self.kind is FieldKind.QP else "F"
        suffix = "" if self.kind is FieldKind.QP else "(theta)"
        return f"{name}_{self.p}{suffix}[M={self.precision}]"

    # -- constructors -------------------------------------------------
    def zero(self, prec: int | None = None) -> "PElement":
        return PElement._zero(self, self.precision if prec is None else prec)

    def one(self, prec: int | None = None) -> "PElement":
        return self.monomial(1, 0, prec)

    def monomial(self, coeff: int, exponent: int, prec: int | None = None) -> "PElement":
        """``coeff * pi^exponent`` for a digit ``coeff``."""
        return PElement(self, exponent, [coeff % self.p], prec)

    def from_digits(self, valuation: int, digits: Sequence[int],
                    prec: int | None = None) -> "PElement":
        return PElement(self, valuation, digits, prec)

    def from_int(self, n: int, prec: int | None = None) -> "PElement":
        """Embed an integer. In characteristic p this is ``n mod p``."""
        prec = self.precision if prec is None else prec
        if self.char_p:
            return PElement(self, 0, [n % self.p], prec)
        return self.from_fraction(Fraction(n), prec)

    def from_fraction(self, r, prec: int | None = None) -> "PElement":
        """Embed a rational number (Q_p only)."""
        if self.char_p:
            raise InvalidParams("rational embedding is only defined for Q_p")
        prec = self.precision if prec is None else prec
        r = Fraction(r)
        if r == 0:
            return self.zero(prec)
        p = self.p
        num, den = r.numerator, r.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        if v >= prec:
            return self.zero(prec)
        mod = p ** (prec - v)
        unit = (num * pow(den, -1, mod)) % mod
        return PElement._qp(self, v, unit, prec)

    def element(self, value, prec: int | None = None) -> "PElement":
        """Convenience: int/Fraction (Q_p) or ``{exponent: digit}`` mapping."""
        if isinstance(value, PElement):
            return value
        if isinstance(value, dict):
            if not value:
                return self.zero(prec)
            lo = min(value)
            hi = max(value)
            digits = [0] * (hi - lo + 1)
            for e, d in value.items():
                digits[e - lo] = d % self.p
            return PElement(self, lo, digits, prec)
        if self.char_p:
            return self.from_int(int(value), prec)
        return self.from_fraction(value, prec)

    def vector(self, *coords, prec: int | None = None) -> "PVector":
        return PVector([self.element(c, prec) for c in coords])

    def to_json(self) -> dict:
        return {"p": self.p, "kind": self.kind.value, "precision": self.precision}

    @classmethod
    def from_json(cls, d: dict) -> "FieldSpec":
        return cls(int(d["p"]), FieldKind(d.get("kind", "qp")), int(d.get("precision", 32)))


class PElement:
    """A finite-precision element of Q_p or F_p((theta)).

    Immutable. ``valuation`` is ``math.inf`` for zero. Equality is value
    equality at the common (coarser) precision, so elements are not
    hashable; use :meth:`key` for grouping.
    """

    __slots__ = ("spec", "valuation", "prec", "_unit", "_digits")

    def __init__(self, spec: FieldSpec, valuation: int, digits: Sequence[int],
                 prec: int | None = None):
        prec = spec.precision if prec is None else int(prec)
        p = spec.p
        ds = [int(d) for d in digits]
        if any(d < 0 or d >= p for d in ds):
            raise InvalidParams(f"digits must lie in [0, {p})")
        i = 0
        while i < len(ds) and ds[i] == 0:
            i += 1
        v = int(valuation) + i
        if i == len(ds) or v >= prec:
            self._set_zero(spec, prec)
            return
        ds = ds[i:i + prec - v]
        ds += [0] * (prec - v - len(ds))
        self.spec = spec
        self.valuation = v
        self.prec = prec
        if spec.char_p:
            self._unit = None
            self._digits = tuple(ds)
        else:
            u = 0
            for d in reversed(ds):
                u = u * p + d
            self._unit = u
            self._digits = tuple(ds)

    def _set_zero(self, spec, prec):
        self.spec = spec
        self.valuation = INF
        self.prec = prec
        self._unit = 0
        self._digits = ()

    # -- fast internal constructors ------------------------------------
    @classmethod
    def _zero(cls, spec, prec):
        obj = cls.__new__(cls)
        obj._set_zero(spec, int(prec))
        return obj

    @classmethod
    def _qp(cls, spec, v, unit, prec):
        obj = cls.__new__(cls)
        obj.spec = spec
        obj.valuation = v
        obj.prec = prec
        obj._unit = unit
        obj._digits = None
        return obj

    @classmethod
    def _fp(cls, spec, v, coeffs, prec):
        obj = cls.__new__(cls)
        obj.spec = spec
        obj.valuation = v
        obj.prec = prec
        obj._unit = None
        obj._digits = coeffs
        return obj

    @classmethod
    def _qp_norm(cls, spec, v0, u, prec):
        p = spec.p
        length = prec - v0
        if length <= 0:
            return cls._zero(spec, prec)
        u %= p ** length
        if u == 0:
            return cls._zero(spec, prec)
        while u % p == 0:
            u //= p
            v0 += 1
        return cls._qp(spec, v0, u, prec)

    @classmethod
    def _fp_norm(cls, spec, v0, coeffs, prec):
        i = 0
        n = len(coeffs)
        while i < n and coeffs[i] == 0:
            i += 1
        v = v0 + i
        if i == n or v >= prec:
            return cls._zero(spec, prec)
        length = prec - v
        cs = list(coeffs[i:i + length])
        if len(cs) < length:
            cs += [0] * (length - len(cs))
        return cls._fp(spec, v, tuple(cs), prec)

    # -- basic accessors -----------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.valuation == INF

    @property
    def digits(self) -> tuple:
        """Digits ``d_N .. d_{M-1}`` (empty for zero)."""
        if self._digits is None:
            p = self.spec.p
            u = self._unit
            out = []
            for _ in range(self.prec - self.valuation):
                u, d = divmod(u, p)
                out.append(d)
            self._digits = tuple(out)
        return self._digits

    def digit(self, exponent: int) -> int:
        if exponent >= self.prec:
            raise PrecisionExhausted(f"digit {exponent} is beyond precision {self.prec}")
        if self.is_zero or exponent < self.valuation:
            return 0
        return self.digits[exponent - self.valuation]

    def key(self) -> tuple:
        return (self.valuation if not self.is_zero else None, self.digits, self.prec)

    def norm(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.spec.p) ** (-self.valuation)

    @property
    def log_norm(self):
        """``log_p |x|`` (``-inf`` for zero)."""
        return -self.valuation

    def to_fraction(self) -> Fraction:
        """The truncated digit sum as a rational (Q_p only)."""
        if self.spec.char_p:
            raise InvalidParams("to_fraction is only defined for Q_p")
        if self.is_zero:
            return Fraction(0)
        return Fraction(self._unit) * Fraction(self.spec.p) ** self.valuation

    def truncate(self, prec: int) -> "PElement":
        """Reduce modulo ``pi^prec`` (no-op if already coarser)."""
        if prec >= self.prec:
            return self
        if self.is_zero:
            return PElement._zero(self.spec, prec)
        if self.spec.char_p:
            return PElement._fp_norm(self.spec, self.valuation, self._digits[:max(0, prec - self.valuation)], prec)
        return PElement._qp_norm(self.spec, self.valuation, self._unit, prec)

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "PElement":
        if isinstance(other, PElement):
            if other.spec != self.spec:
                raise FieldMismatch(f"{self.spec!r} vs {other.spec!r}")
            return other
        if isinstance(other, (int, Fraction)):
            v = 0 if self.is_zero else self.valuation
            slack = self.prec + abs(int(v)) + 64
            return self.spec.element(other, prec=slack)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        spec = self.spec
        prec = min(self.prec, other.prec)
        if self.is_zero:
            return other.truncate(prec)
        if other.is_zero:
            return self.truncate(prec)
        vx, vy = self.valuation, other.valuation
        v0 = min(vx, vy)
        if spec.char_p:
            length = prec - v0
            if length <= 0:
                return PElement._zero(spec, prec)
            p = spec.p
            acc = [0] * length
            for src, off in ((self._digits, vx - v0), (other._digits, vy - v0)):
                for i in range(min(len(src), length - off)):
                    acc[off + i] += src[i]
            return PElement._fp_norm(spec, v0, [a % p for a in acc], prec)
        p = spec.p
        u = self._unit * p ** (vx - v0) + other._unit * p ** (vy - v0)
        return PElement._qp_norm(spec, v0, u, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        p = self.spec.p
        if self.spec.char_p:
            return PElement._fp(self.spec, self.valuation, tuple((-d) % p for d in self._digits), self.prec)
        mod = p ** (self.prec - self.valuation)
        return PElement._qp(self.spec, self.valuation, (-self._unit) % mod, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        spec = self.spec
        if self.is_zero or other.is_zero:
            if self.is_zero and other.is_zero:
                prec = self.prec + other.prec
            elif self.is_zero:
                prec = self.prec + other.valuation
            else:
                prec = other.prec + self.valuation
            return PElement._zero(spec, int(prec))
        vx, vy = self.valuation, other.valuation
        v = vx + vy
        prec = min(vx + other.prec, vy + self.prec)
        length = prec - v
        p = spec.p
        if spec.char_p:
            return PElement._fp(spec, v, _poly_mul_trunc(self._digits, other._digits, length, p), prec)
        return PElement._qp(spec, v, (self._unit * other._unit) % p ** length, prec)

    __rmul__ = __mul__

    def invert(self) -> "PElement":
        """Multiplicative inverse to the available relative precision."""
        if self.is_zero:
            raise DivisionByZero("element is indistinguishable from 0 at this precision")
        v = self.valuation
        length = self.prec - v
        prec = -v + length
        p = self.spec.p
        if self.spec.char_p:
            return PElement._fp(self.spec, -v, _poly_inverse(self._digits, length, p), prec)
        return PElement._qp(self.spec, -v, pow(self._unit, -1, p ** length), prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.invert()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.invert()

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        result = self.spec.one(prec=self.prec + abs(int(0 if self.is_zero else self.valuation)) * k + 64)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, PElement):
            return NotImplemented
        if other.spec != self.spec:
            return False
        return (self - other).is_zero

    __hash__ = None

    def __repr__(self):
        if self.is_zero:
            return f"PElement(0 mod {_pi(self.spec)}^{self.prec})"
        terms = []
        for j, d in enumerate(self.digits[:8]):
            if d:
                terms.append(f"{d}*{_pi(self.spec)}^{self.valuation + j}")
        more = " + ..." if any(self.digits[8:]) else ""
        return f"PElement({' + '.join(terms)}{more} mod {_pi(self.spec)}^{self.prec})"


def _pi(spec):
    return "t" if spec.char_p else str(spec.p)


def _poly_mul_trunc(a: Sequence[int], b: Sequence[int], length: int, p: int) -> tuple:
    if length > 24:
        prod = np.convolve(np.asarray(a[:length], dtype=np.int64), np.asarray(b[:length], dtype=np.int64))
        out = (prod[:length] % p).tolist()
    else:
        out = [0] * length
        lb = len(b)
        for i in range(min(len(a), length)):
            ai = a[i]
            if ai:
                for j in range(min(lb, length - i)):
                    out[i + j] += ai * b[j]
        out = [c % p for c in out]
    if len(out) < length:
        out += [0] * (length - len(out))
    return tuple(out)


def _poly_inverse(u: Sequence[int], length: int, p: int) -> tuple:
    """Inverse of a unit power series mod theta^length by Newton doubling."""
    w = [pow(u[0], -1, p)]
    known = 1
    while known < length:
        known = min(2 * known, length)
        uw = _poly_mul_trunc(u, w, known, p)
        corr = [(-c) % p for c in uw]
        corr[0] = (corr[0] + 2) % p
        w = list(_poly_mul_trunc(w, corr, known, p))
    return tuple(w[:length])


@dataclass(frozen=True)
class TurnAngle:
    """Exact angle ``num / p**exp`` turns, reduced into ``[0, 1)``."""

    p: int
    num: int = 0
    exp: int = 0

    def __post_init__(self):
        p, a, m = self.p, self.num, self.exp
        if m < 0:
            raise InvalidParams("exponent must be >= 0")
        a %= p ** m
        while m > 0 and a % p == 0:
            a //= p
            m -= 1
        if m == 0:
            a = 0
        object.__setattr__(self, "num", a)
        object.__setattr__(self, "exp", m)

    def __add__(self, other: "TurnAngle") -> "TurnAngle":
        m = max(self.exp, other.exp)
        p = self.p
        return TurnAngle(p, self.num * p ** (m - self.exp) + other.num * p ** (m - other.exp), m)

    def __neg__(self):
        return TurnAngle(self.p, -self.num, self.exp)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        return TurnAngle(self.p, self.num * int(k), self.exp)

    __rmul__ = __mul__

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.p ** self.exp)

    def __float__(self):
        return self.num / self.p ** self.exp

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def to_complex(self) -> complex:
        return to_complex(self)


def to_complex(a: TurnAngle) -> complex:
    """``exp(2 pi i a)``; quarter turns are returned exactly."""
    if a.num == 0:
        return 1 + 0j
    if a.p == 2 and a.exp <= 2:
        return (1j) ** (a.num * 2 ** (2 - a.exp))
    t = TWO_PI * a.num / a.p ** a.exp
    return complex(math.cos(t), math.sin(t))


class PVector:
    """A point of K^n: a tuple of elements sharing one FieldSpec."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable[PElement]):
        coords = tuple(coords)
        if not coords:
            raise DimensionMismatch("a vector needs at least one coordinate")
        spec = coords[0].spec
        for c in coords:
            if not isinstance(c, PElement):
                raise TypeError(f"expected PElement, got {type(c).__name__}")
            if c.spec != spec:
                raise FieldMismatch("coordinates must share one FieldSpec")
        self.coords = coords

    @property
    def spec(self) -> FieldSpec:
        return self.coords[0].spec

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def _check(self, other):
        if not isinstance(other, PVector):
            raise TypeError("expected PVector")
        if other.spec != self.spec:
            raise FieldMismatch(f"{self.spec!r} vs {other.spec!r}")
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimension {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check(other)
        return PVector(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other):
        self._check(other)
        return PVector(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return PVector(-a for a in self.coords)

    def scale(self, c: PElement) -> "PVector":
        return PVector(c * a for a in self.coords)

    @property
    def valuation(self):
        return min(c.valuation for c in self.coords)

    @property
    def prec(self) -> int:
        return min(c.prec for c in self.coords)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coords)

    def norm(self) -> Fraction:
        return max(c.norm() for c in self.coords)

    def key(self) -> tuple:
        return tuple(c.key() for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, PVector):
            return NotImplemented
        return self.dim == other.dim and all(a == b for a, b in zip(self.coords, other.coords))

    __hash__ = None

    def __repr__(self):
        return f"PVector({', '.join(map(repr, self.coords))})"


def zero_vector(spec: FieldSpec, n: int, prec: int | None = None) -> PVector:
    return PVector([spec.zero(prec)] * n)


# -- module-level operations ---------------------------------------------

def add(x: PElement, y: PElement) -> PElement:
    return x + y


def mul(x: PElement, y: PElement) -> PElement:
    return x * y


def negate(x: PElement) -> PElement:
    return -x


def invert(x: PElement) -> PElement:
    return x.invert()


def norm(x: PElement | PVector) -> Fraction:
    return x.norm()


def frac_part(x: PElement) -> TurnAngle:
    """``[x]_F`` as an exact angle in turns.

    Q_p: the sum of the negative-exponent digits. F_p((theta)): the digit
    of ``theta^-1`` divided by ``p``.
    """
    spec = x.spec
    p = spec.p
    if not x.is_zero and x.valuation >= 0:
        return TurnAngle(p)
    if x.prec < 0:
        raise PrecisionExhausted(f"fractional part needs digits down to -1, precision is {x.prec}")
    if x.is_zero:
        return TurnAngle(p)
    if spec.char_p:
        return TurnAngle(p, x._digits[-1 - x.valuation], 1)
    e = -x.valuation
    return TurnAngle(p, x._unit % p ** e, e)


def pairing(x: PVector, y: PVector) -> PElement:
    """``(x, y)_K = sum_j x_j y_j``."""
    x._check(y)
    acc = x.coords[0] * y.coords[0]
    for a, b in zip(x.coords[1:], y.coords[1:]):
        acc = acc + a * b
    return acc


def _product_prec(a: PElement, b: PElement):
    if a.is_zero and b.is_zero:
        return a.prec + b.prec
    if a.is_zero:
        return a.prec + b.valuation
    if b.is_zero:
        return b.prec + a.valuation
    return min(a.valuation + b.prec, b.valuation + a.prec)


def char_angle(s: PVector, z: PVector) -> TurnAngle:
    """Angle ``[(s, z)_K]_F`` so that ``chi_s(z) = exp(2 pi i * angle)``.

    Computed term by term; ``[a + b] = [a] + [b] mod 1`` makes this exact.
    """
    s._check(z)
    spec = s.spec
    p = spec.p
    if spec.char_p:
        total = 0
        for a, b in zip(s.coords, z.coords):
            if _product_prec(a, b) < 0:
                raise PrecisionExhausted("pairing does not determine the theta^-1 digit")
            if a.is_zero or b.is_zero:
                continue
            va, vb = a.valuation, b.valuation
            if va + vb > -1:
                continue
            da, db = a._digits, b._digits
            # coefficient of theta^-1: sum over i + j = -1
            for i in range(va, -vb):
                j = -1 - i
                total += da[i - va] * db[j - vb]
        return TurnAngle(p, total % p, 1)
    num = 0
    den_exp = 0
    for a, b in zip(s.coords, z.coords):
        if _product_prec(a, b) < 0:
            raise PrecisionExhausted("pairing does not determine all negative digits")
        if a.is_zero or b.is_zero:
            continue
        n = a.valuation + b.valuation
        if n >= 0:
            continue
        e = -n
        r = (a._unit * b._unit) % p ** e
        if e > den_exp:
            num *= p ** (e - den_exp)
            den_exp = e
            num += r
        else:
            num += r * p ** (den_exp - e)
    return TurnAngle(p, num, den_exp)


def sum_roots_of_unity(p: int, weights: dict) -> complex:
    """``sum_a w_a exp(2 pi i a)`` over exact angles ``a``.

    Weights are first reduced modulo the cyclotomic polynomial of the
    common denominator ``p^m`` so that exactly cancelling sums come out as
    exactly zero instead of float noise.
    """
    if not weights:
        return 0j
    m = max(a.exp for a in weights)
    if m == 0:
        return complex(sum(weights.values()))
    size = p ** m
    if size > 2_000_000:
        return complex(sum(w * to_complex(a) for a, w in weights.items()))
    vec = np.zeros(size, dtype=np.result_type(*[type(w) for w in weights.values()], np.float64))
    for a, w in weights.items():
        vec[a.num * p ** (m - a.exp)] += w
    q = p ** (m - 1)
    rows = vec.reshape(p, q)
    reduced = (rows[:p - 1] - rows[p - 1]).ravel()
    nz = np.nonzero(reduced)[0]
    if nz.size == 0:
        return 0j
    return complex(np.sum(reduced[nz] * np.exp(2j * np.pi * nz / size)))


def character(s: PVector, z: PVector) -> complex:
    return to_complex(char_angle(s, z))


def bracket(x: PElement) -> float:
    """``<x>_F = 2 pi [x]_F`` as a float."""
    return TWO_PI * float(frac_part(x))


def bracket_vector(y: PVector) -> tuple:
    """Coordinate-wise bracket ``<y>_F`` (a point of [0, 2 pi)^n)."""
    return tuple(bracket(c) for c in y.coords)


def pairing_bracket(y: PVector, x: PVector) -> float:
    """``<(y, x)_K>_F`` as a float."""
    return TWO_PI * float(char_angle(y, x))


# -- random elements --------------------------------------------------------

def random_element(spec: FieldSpec, rng: np.random.Generator, min_val: int, max_val: int,
                   prec: int | None = None, zero_prob: float = 0.0) -> PElement:
    """Random element with valuation in ``[min_val, max_val]`` and uniform digits."""
    prec = spec.precision if prec is None else prec
    if zero_prob and rng.random() < zero_prob:
        return spec.zero(prec)
    v = int(rng.integers(min_val, max_val + 1))
    if v >= prec:
        return spec.zero(prec)
    length = prec - v
    p = spec.p
    digits = rng.integers(0, p, size=length)
    digits[0] = rng.integers(1, p)
    if spec.char_p:
        return PElement._fp(spec, v, tuple(digits.tolist()), prec)
    if p < 10:
        unit = int("".join(map(str, digits[::-1].tolist())), p)
    else:
        unit = 0
        for d in digits[::-1].tolist():
            unit = unit * p + d
    return PElement._qp(spec, v, unit, prec)


def random_elements(spec: FieldSpec, rng: np.random.Generator, count: int, min_val: int, max_val: int,
                    prec: int | None = None) -> list:
    """``count`` draws of :func:`random_element`, taking the randomness in bulk."""
    prec = spec.precision if prec is None else prec
    p = spec.p
    vals = rng.integers(min_val, max_val + 1, size=count)
    width = max(prec - min_val, 1)
    digits = rng.integers(0, p, size=(count, width))
    digits[:, 0] = rng.integers(1, p, size=count)
    out = []
    for v, row in zip(vals.tolist(), digits.tolist()):
        if v >= prec:
            out.append(spec.zero(prec))
            continue
        ds = row[:prec - v]
        if spec.char_p:
            out.append(PElement._fp(spec, v, tuple(ds), prec))
        elif p < 10:
            out.append(PElement._qp(spec, v, int("".join(map(str, reversed(ds))), p), prec))
        else:
            unit = 0
            for d in reversed(ds):
                unit = unit * p + d
            out.append(PElement._qp(spec, v, unit, prec))
    return out


def random_vector(spec: FieldSpec, rng: np.random.Generator, n: int, min_val: int, max_val: int,
                  prec: int | None = None, zero_prob: float = 0.0) -> PVector:
    return PVector(random_element(spec, rng, min_val, max_val, prec, zero_prob) for _ in range(n))


# -- serialization ------------------------------------------------------------

def element_to_json(x: PElement) -> dict:
    return {"val": None if x.is_zero else x.valuation, "digits": list(x.digits), "prec": x.prec}


def element_from_json(spec: FieldSpec, d) -> PElement:
    # hand-written configs may use the short text form instead of a dict
    if isinstance(d, str):
        return element_from_text(spec, d)
    if d.get("val") is None:
        return spec.zero(int(d["prec"]))
    return PElement(spec, int(d["val"]), d["digits"], int(d["prec"]))


def element_to_text(x: PElement) -> str:
    val = "inf" if x.is_zero else str(x.valuation)
    digits = list(x.digits)
    while digits and digits[-1] == 0:
        digits.pop()
    return f"{val}|{' '.join(map(str, digits))}|{x.prec}"


def element_from_text(spec: FieldSpec, s: str) -> PElement:
    try:
        val, digits, prec = s.strip().split("|")
    except ValueError:
        raise InvalidParams(f"malformed element text {s!r}") from None
    if val == "inf":
        return spec.zero(int(prec))
    return PElement(spec, int(val), [int(d) for d in digits.split()], int(prec))


def vector_to_text(x: PVector) -> str:
    return ";".join(element_to_text(c) for c in x.coords)


def vector_from_text(spec: FieldSpec, s: str) -> PVector:
    return PVector(element_from_text(spec, part) for part in s.split(";"))


def vector_to_json(x: PVector) -> list:
    return [element_to_json(c) for c in x.coords]


def vector_from_json(spec: FieldSpec, d: list) -> PVector:
    return PVector(element_from_json(spec, c) for c in d)
