"""Finite step measures on K^n and exact integration of locally constant functions.

A :class:`StepMeasure` is a finite list of atoms plus pieces. A piece is a
density times Haar measure restricted to a ball or annulus, multiplied by a
radial weight ``|x|^a (1 + |x|^2)^b``. The radial weight keeps the usual
reweightings (``|x|^2``, ``|x|^2/(1+|x|^2)``, ``(1+|x|^2)/|x|^2``)
exact on balls around the origin, where infinitely many spheres meet.

Integration refines balls into cosets until the integrand and the weight
are both constant, then sums. Geometry is exact; masses are floats.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DivergentJ,
    FieldMismatch,
    InvalidParams,
    PrecisionExhausted,
    RefinementExplosion,
    SingularAtZero,
    UndefinedAtZero,
    UnsupportedDensityConvolution,
)
from .field import (
    FieldSpec,
    PElement,
    PVector,
    TurnAngle,
    char_angle,
    frac_part,
    sum_roots_of_unity,
    to_complex,
    vector_from_json,
    vector_to_json,
    zero_vector,
)

DEFAULT_COSET_CAP = 10 ** 7
COSET_CAP_ENV = "PADIC_LEVY_COSET_CAP"


def coset_cap(cap: int | None = None) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get(COSET_CAP_ENV)
    return int(env) if env else DEFAULT_COSET_CAP


# -- geometry ---------------------------------------------------------------

def in_ball(z: PVector, center: PVector, radius_log: int) -> bool:
    """Whether ``|z - center| <= p^radius_log``."""
    threshold = -radius_log
    for a, c in zip(z.coords, center.coords):
        d = a - c
        if d.is_zero:
            if d.prec < threshold:
                raise PrecisionExhausted("membership undecidable at this precision")
        elif d.valuation < threshold:
            return False
    return True


def in_ball0(z: PVector, radius_log) -> bool:
    """Whether ``|z| <= p^radius_log``; exact for zero coordinates."""
    if radius_log == math.inf:
        return True
    threshold = -radius_log
    return all(c.is_zero or c.valuation >= threshold for c in z.coords)


@dataclass(frozen=True, eq=False)
class BallRegion:
    """``B(center, p^radius_log)``, optionally minus ``B(center, p^inner_radius_log)``."""

    center: PVector
    radius_log: int
    inner_radius_log: int | None = None

    def __post_init__(self):
        if self.inner_radius_log is not None and self.inner_radius_log >= self.radius_log:
            raise InvalidParams("inner radius must be smaller than the outer radius")

    @property
    def dim(self) -> int:
        return self.center.dim

    @property
    def spec(self) -> FieldSpec:
        return self.center.spec

    @property
    def is_annulus(self) -> bool:
        return self.inner_radius_log is not None

    def contains(self, z: PVector) -> bool:
        if not in_ball(z, self.center, self.radius_log):
            return False
        if self.inner_radius_log is not None:
            return not in_ball(z, self.center, self.inner_radius_log)
        return True

    def contains_origin(self) -> bool:
        return self.contains(zero_vector(self.spec, self.dim))

    def haar_mass(self) -> Fraction:
        return haar_mass(self, self.dim)


def haar_mass(region: BallRegion, n: int | None = None) -> Fraction:
    """Haar mass normalized so the unit ball has mass 1."""
    n = region.dim if n is None else n
    p = Fraction(region.spec.p)
    mass = p ** (region.radius_log * n)
    if region.inner_radius_log is not None:
        mass -= p ** (region.inner_radius_log * n)
    return mass


def ball_relation(a: BallRegion, b: BallRegion) -> str:
    """'disjoint', 'equal', 'a_in_b' or 'b_in_a' for two balls (outer radii)."""
    if a.radius_log <= b.radius_log:
        if in_ball(a.center, b.center, b.radius_log):
            return "equal" if a.radius_log == b.radius_log else "a_in_b"
        return "disjoint"
    if in_ball(b.center, a.center, a.radius_log):
        return "b_in_a"
    return "disjoint"


# -- radial weights -----------------------------------------------------------

@dataclass(frozen=True)
class RadialWeight:
    """``w(r) = r^power * (1 + r^2)^damping``."""

    power: int = 0
    damping: int = 0

    def __call__(self, r: float) -> float:
        return r ** self.power * (1.0 + r * r) ** self.damping

    def __mul__(self, other: "RadialWeight") -> "RadialWeight":
        return RadialWeight(self.power + other.power, self.damping + other.damping)

    @property
    def trivial(self) -> bool:
        return self.power == 0 and self.damping == 0

    def to_json(self) -> list:
        return [self.power, self.damping]


UNIT_WEIGHT = RadialWeight()
LAMBDA_WEIGHT = RadialWeight(2, -1)   # |z|^2 / (1 + |z|^2)
ETA_V_WEIGHT = RadialWeight(2, 0)     # |x|^2
ETA_WEIGHT = RadialWeight(-2, 1)      # (1 + |x|^2) / |x|^2
INV_SQUARE = RadialWeight(-2, 0)      # |x|^-2


def radial_ball_mass(p: int, n: int, k: int, weight: RadialWeight) -> float:
    """``int_{B(0, p^k)} w(|x|) dmu`` as a sum over spheres ``|x| = p^j, j <= k``."""
    if weight.trivial:
        return float(Fraction(p) ** (k * n))
    a = weight.power + n
    if a <= 0:
        raise DivergentJ(f"sphere series diverges near 0 (|x|^{weight.power} in dimension {n})")
    shell = 1.0 - float(p) ** (-n)
    if weight.damping == 0:
        exact = Fraction(p) ** (k * a) * (1 - Fraction(p) ** (-n)) / (1 - Fraction(p) ** (-a))
        return float(exact)
    total = 0.0
    j = k
    while True:
        r = float(p) ** j
        term = weight(r) * r ** n * shell
        total += term
        if j < 0 and term <= 1e-18 * total:
            break
        if j < k - 4000:
            raise DivergentJ("sphere series failed to converge")
        j -= 1
    return total


# -- measures -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Atom:
    point: PVector
    mass: float


@dataclass(frozen=True, eq=False)
class Piece:
    region: BallRegion
    density: float
    weight: RadialWeight = UNIT_WEIGHT

    def mass(self) -> float:
        return _weighted_region_mass(self.region, self.weight) * self.density


def _weighted_ball_mass(center: PVector, k: int, weight: RadialWeight) -> float:
    p, n = center.spec.p, center.dim
    if weight.trivial:
        return float(Fraction(p) ** (k * n))
    if in_ball0(center, k):
        return radial_ball_mass(p, n, k, weight)
    return weight(float(center.norm())) * float(Fraction(p) ** (k * n))


def _weighted_region_mass(region: BallRegion, weight: RadialWeight) -> float:
    m = _weighted_ball_mass(region.center, region.radius_log, weight)
    if region.inner_radius_log is not None:
        m -= _weighted_ball_mass(region.center, region.inner_radius_log, weight)
    return m


class StepMeasure:
    """Finite non-negative measure: atoms plus weighted Haar pieces."""

    __slots__ = ("atoms", "pieces")

    def __init__(self, atoms: Sequence[Atom] = (), pieces: Sequence[Piece] = ()):
        atoms = tuple(atoms)
        pieces = tuple(pieces)
        for a in atoms:
            if not a.mass >= 0:
                raise InvalidParams("atom masses must be non-negative")
        for pc in pieces:
            if not pc.density >= 0:
                raise InvalidParams("densities must be non-negative")
        points = [a.point for a in atoms] + [pc.region.center for pc in pieces]
        if points:
            spec, dim = points[0].spec, points[0].dim
            for pt in points[1:]:
                if pt.spec != spec:
                    raise FieldMismatch("all points must share one FieldSpec")
                if pt.dim != dim:
                    raise DimensionMismatch("all points must share one dimension")
        self.atoms = atoms
        self.pieces = pieces

    @classmethod
    def dirac(cls, point: PVector, mass: float = 1.0) -> "StepMeasure":
        return cls([Atom(point, float(mass))])

    @classmethod
    def haar_ball(cls, center: PVector, radius_log: int, density: float = 1.0,
                  weight: RadialWeight = UNIT_WEIGHT) -> "StepMeasure":
        return cls(pieces=[Piece(BallRegion(center, radius_log), float(density), weight)])

    @classmethod
    def uniform_ball(cls, center: PVector, radius_log: int) -> "StepMeasure":
        """Probability measure uniform on a ball."""
        mass = float(Fraction(center.spec.p) ** (radius_log * center.dim))
        return cls.haar_ball(center, radius_log, 1.0 / mass)

    @property
    def is_empty(self) -> bool:
        return not self.atoms and not self.pieces

    @property
    def is_atomic(self) -> bool:
        return not self.pieces

    @property
    def spec(self) -> FieldSpec | None:
        if self.atoms:
            return self.atoms[0].point.spec
        if self.pieces:
            return self.pieces[0].region.spec
        return None

    @property
    def dim(self) -> int | None:
        if self.atoms:
            return self.atoms[0].point.dim
        if self.pieces:
            return self.pieces[0].region.dim
        return None

    def total_mass(self) -> float:
        return sum(a.mass for a in self.atoms) + sum(pc.mass() for pc in self.pieces)

    def has_atom_at_zero(self) -> bool:
        return any(a.point.is_zero and a.mass > 0 for a in self.atoms)

    def scaled(self, c: float) -> "StepMeasure":
        return StepMeasure([Atom(a.point, a.mass * c) for a in self.atoms],
                           [Piece(pc.region, pc.density * c, pc.weight) for pc in self.pieces])

    def __add__(self, other: "StepMeasure") -> "StepMeasure":
        return StepMeasure(self.atoms + other.atoms, self.pieces + other.pieces)

    def normalized(self) -> "StepMeasure":
        """Merge coincident atoms, drop null parts, check pieces are disjoint."""
        merged: dict = {}
        for a in self.atoms:
            if a.mass == 0:
                continue
            k = a.point.key()
            if k in merged:
                merged[k] = Atom(merged[k].point, merged[k].mass + a.mass)
            else:
                merged[k] = a
        pieces = [pc for pc in self.pieces if pc.density > 0]
        for i, a in enumerate(pieces):
            for b in pieces[i + 1:]:
                if not _pieces_disjoint(a.region, b.region):
                    raise InvalidParams("density pieces overlap; split them into disjoint regions first")
        return StepMeasure(list(merged.values()), pieces)

    def to_json(self) -> dict:
        return measure_to_json(self)

    def __repr__(self):
        return f"StepMeasure({len(self.atoms)} atoms, {len(self.pieces)} pieces, mass={self.total_mass():.6g})"


def _pieces_disjoint(a: BallRegion, b: BallRegion) -> bool:
    rel = ball_relation(a, b)
    if rel == "disjoint":
        return True
    # nested: disjoint only if the smaller ball sits inside the larger one's hole
    small, big = (a, b) if rel in ("a_in_b", "equal") else (b, a)
    if big.inner_radius_log is None:
        return False
    return (in_ball(small.center, big.center, big.inner_radius_log)
            and small.radius_log <= big.inner_radius_log)


# -- locally constant integrands ------------------------------------------------

@dataclass(frozen=True)
class LocallyConstantFn:
    """``evaluate`` is constant on ``B(z, p^radius_log(z))``.

    ``evaluate`` may return a float, a complex number or a
    :class:`TurnAngle` (meaning ``exp(2 pi i angle)``). ``radius_log`` may
    return ``inf`` (constant everywhere) or ``-inf`` (singular point).
    ``vanishing_log``, when set, declares ``f == 0`` on ``B(0, p^vanishing_log)``.
    """

    evaluate: Callable[[PVector], Any]
    radius_log: Callable[[PVector], float]
    vanishing_log: float | None = None


def constant_fn(value) -> LocallyConstantFn:
    return LocallyConstantFn(lambda z: value, lambda z: math.inf)


def character_fn(s: PVector) -> LocallyConstantFn:
    """``x -> chi_s(x)`` as exact angles; constant on balls of radius ``1/|s|``."""
    r = math.inf if s.is_zero else s.valuation
    return LocallyConstantFn(lambda z: char_angle(s, z), lambda z: r)


def restrict(f: LocallyConstantFn, radius_log: int, inside: bool = True) -> LocallyConstantFn:
    """``f`` times the indicator of ``B(0, p^radius_log)`` (or of its complement)."""
    def radius(z):
        return min(f.radius_log(z), radius_log)

    if inside:
        def ev(z):
            return f.evaluate(z) if in_ball0(z, radius_log) else 0.0
        return LocallyConstantFn(ev, radius, f.vanishing_log)

    def ev_out(z):
        return 0.0 if in_ball0(z, radius_log) else f.evaluate(z)
    vanish = radius_log if f.vanishing_log is None else max(f.vanishing_log, radius_log)
    return LocallyConstantFn(ev_out, radius, vanish)


class _Accumulator:
    def __init__(self, p: int):
        self.p = p
        self.plain = 0j
        self.angles: dict = {}

    def add(self, value, weight: float):
        if isinstance(value, TurnAngle):
            self.angles[value] = self.angles.get(value, 0.0) + weight
        elif value:
            self.plain += value * weight

    def value(self) -> complex:
        return self.plain + sum_roots_of_unity(self.p, self.angles)


def _is_null(value) -> bool:
    if isinstance(value, TurnAngle):
        return False
    return value == 0


def _child_offsets(spec: FieldSpec, n: int, k: int) -> list:
    """Offsets ``d * pi^-k`` for all digit vectors ``d`` (children of a radius-``p^k`` ball)."""
    mono = [spec.zero()] + [spec.monomial(d, -k) for d in range(1, spec.p)]
    return [PVector(combo) for combo in itertools.product(mono, repeat=n)]


def integrate_locally_constant(f: LocallyConstantFn, m: StepMeasure, cap: int | None = None,
                               extra_refine: int = 0) -> complex:
    """``int f dm`` exactly, up to float rounding of masses.

    ``extra_refine`` splits every coset that many extra levels; the result
    must not change.
    """
    if m.is_empty:
        return 0j
    spec = m.spec
    acc = _Accumulator(spec.p)
    vanish = f.vanishing_log
    for a in m.atoms:
        if a.mass == 0:
            continue
        if vanish is not None and in_ball0(a.point, vanish):
            continue
        acc.add(f.evaluate(a.point), a.mass)
    budget = [coset_cap(cap)]
    offsets: dict = {}
    for pc in m.pieces:
        reg = pc.region
        _integrate_ball(f, reg.center, reg.radius_log, pc.density, pc.weight, acc, budget, offsets, extra_refine)
        if reg.inner_radius_log is not None:
            _integrate_ball(f, reg.center, reg.inner_radius_log, -pc.density, pc.weight, acc, budget,
                            offsets, extra_refine)
    return acc.value()


def _integrate_ball(f, center, k, density, weight, acc, budget, offsets, extra_refine):
    spec = center.spec
    p, n = spec.p, center.dim
    vanish = f.vanishing_log
    origin = zero_vector(spec, n)
    stack = [(center, k)]
    while stack:
        c, k = stack.pop()
        contains0 = in_ball0(c, k)
        if contains0:
            c = origin
            if vanish is not None and k <= vanish:
                continue
        weight_const = weight.trivial or not contains0
        r = f.radius_log(c)
        f_const = r >= k + extra_refine
        if f_const and weight_const:
            w = 1.0 if weight.trivial else weight(float(c.norm()))
            acc.add(f.evaluate(c), density * w * float(Fraction(p) ** (k * n)))
            continue
        if f_const:
            value = f.evaluate(c)
            if _is_null(value):
                continue
            acc.add(value, density * radial_ball_mass(p, n, k, weight))
            continue
        if contains0 and vanish is None and r == -math.inf:
            raise UndefinedAtZero("integrand is singular at 0 and declares no vanishing ball")
        if -k + 1 > spec.precision:
            if contains0:
                raise UndefinedAtZero("refinement toward 0 exhausted the precision window")
            raise PrecisionExhausted("coset refinement exhausted the precision window")
        budget[0] -= p ** n
        if budget[0] < 0:
            raise RefinementExplosion("coset count exceeded the cap; raise PADIC_LEVY_COSET_CAP if intended")
        offs = offsets.get(k)
        if offs is None:
            offs = offsets[k] = _child_offsets(spec, n, k)
        for off in offs:
            stack.append((c + off, k - 1))


# -- character integrals ----------------------------------------------------------

def ball_integral_closed_form(s: PVector, k: int, n: int | None = None) -> Fraction:
    """``p^{kn}`` if ``|s| <= p^-k``, else 0 (norms are powers of p, so ``|s| >= p^{1-k}``)."""
    n = s.dim if n is None else n
    p = Fraction(s.spec.p)
    if s.is_zero or s.norm() <= p ** (-k):
        return p ** (k * n)
    return Fraction(0)


def ball_character_integral(s: PVector, k: int, n: int | None = None, cap: int | None = None) -> complex:
    """``int_{B(0, p^k)} chi_s dmu`` by summing over every coset on which ``chi_s`` is constant.

    Each coordinate's coset angles are computed by field arithmetic; the
    n-dimensional coset angles are their sums mod 1 (the character is a
    homomorphism), tallied exactly and reduced cyclotomically.
    """
    spec = s.spec
    n = s.dim if n is None else n
    if n != s.dim:
        raise DimensionMismatch("n must equal the dimension of s")
    p = spec.p
    if s.is_zero:
        return complex(float(Fraction(p) ** (k * n)))
    ns = s.valuation
    levels = k - ns
    if levels <= 0:
        return complex(float(Fraction(p) ** (k * n)))
    count = p ** (levels * n)
    if count > coset_cap(cap):
        raise RefinementExplosion(f"{count} cosets exceed the cap")
    mod = p ** levels
    reps = [PElement(spec, -k, ds) for ds in itertools.product(range(p), repeat=levels)]
    table = None
    for sj in s.coords:
        angles = np.empty(len(reps), dtype=np.int64)
        for i, x in enumerate(reps):
            a = frac_part(sj * x)
            angles[i] = a.num * p ** (levels - a.exp)
        table = angles if table is None else np.add.outer(table, angles).ravel() % mod
    counts = np.bincount(table, minlength=mod).astype(np.float64)
    weights = {TurnAngle(p, r, levels): float(c) for r, c in enumerate(counts) if c}
    coset_mass = float(Fraction(p) ** (ns * n))
    return sum_roots_of_unity(p, weights) * coset_mass


def charfn_of_measure(m: StepMeasure, s: PVector, cap: int | None = None) -> complex:
    """``m^(s) = int chi_s dm``."""
    if m.is_empty:
        return 0j
    acc = _Accumulator(m.spec.p)
    for a in m.atoms:
        acc.add(char_angle(s, a.point), a.mass)
    total = acc.value()
    weighted = []
    for pc in m.pieces:
        if not pc.weight.trivial:
            weighted.append(pc)
            continue
        reg = pc.region
        shift = to_complex(char_angle(s, reg.center))
        val = ball_character_integral(s, reg.radius_log, cap=cap)
        if reg.inner_radius_log is not None:
            val -= ball_character_integral(s, reg.inner_radius_log, cap=cap)
        total += pc.density * shift * val
    if weighted:
        total += integrate_locally_constant(character_fn(s), StepMeasure(pieces=weighted), cap=cap)
    return total


# -- transforms -----------------------------------------------------------------

def reweight(m: StepMeasure, weight: RadialWeight, v: float = 1.0) -> StepMeasure:
    """``A -> v^-1 int_A w(|x|) m(dx)`` for a radial weight ``w``."""
    if v <= 0:
        raise InvalidParams("v must be positive")
    atoms = []
    for a in m.atoms:
        if a.point.is_zero:
            if weight.power < 0 and a.mass > 0:
                raise SingularAtZero("weight is singular at 0 but the measure has an atom there")
            if weight.power > 0:
                continue
            atoms.append(Atom(a.point, a.mass * weight(0.0) / v))
            continue
        atoms.append(Atom(a.point, a.mass * weight(float(a.point.norm())) / v))
    pieces = [Piece(pc.region, pc.density / v, pc.weight * weight) for pc in m.pieces]
    return StepMeasure(atoms, pieces)


def convolve(P: StepMeasure, Q: StepMeasure) -> StepMeasure:
    """Convolution of two atomic measures; coincident sums are merged."""
    if not P.is_atomic or not Q.is_atomic:
        raise UnsupportedDensityConvolution("only atomic measures can be convolved")
    merged: dict = {}
    for a in P.atoms:
        for b in Q.atoms:
            pt = a.point + b.point
            key = pt.key()
            mass = a.mass * b.mass
            if key in merged:
                merged[key] = (merged[key][0], merged[key][1] + mass)
            else:
                merged[key] = (pt, mass)
    return StepMeasure([Atom(pt, mass) for pt, mass in merged.values()])


def convolve_power(P: StepMeasure, m: int) -> StepMeasure:
    """``P^{*m}`` by repeated squaring."""
    if m < 1:
        raise InvalidParams("m must be a positive integer")
    if not P.is_atomic:
        raise UnsupportedDensityConvolution("only atomic measures can be convolved")
    result = None
    base = P
    while m:
        if m & 1:
            result = base if result is None else convolve(result, base)
        m >>= 1
        if m:
            base = convolve(base, base)
    return result


# -- serialization ---------------------------------------------------------------

def measure_to_json(m: StepMeasure) -> dict:
    pieces = []
    for pc in m.pieces:
        d = {
            "center": vector_to_json(pc.region.center),
            "radius_log": pc.region.radius_log,
            "inner_radius_log": pc.region.inner_radius_log,
            "density": pc.density,
        }
        if not pc.weight.trivial:
            d["weight"] = pc.weight.to_json()
        pieces.append(d)
    return {
        "atoms": [{"point": vector_to_json(a.point), "mass": a.mass} for a in m.atoms],
        "pieces": pieces,
    }


def measure_from_json(spec: FieldSpec, d: dict) -> StepMeasure:
    atoms = [Atom(vector_from_json(spec, a["point"]), float(a["mass"])) for a in d.get("atoms", [])]
    pieces = []
    for pc in d.get("pieces", []):
        inner = pc.get("inner_radius_log")
        region = BallRegion(vector_from_json(spec, pc["center"]), int(pc["radius_log"]),
                            None if inner is None else int(inner))
        weight = RadialWeight(*pc["weight"]) if pc.get("weight") else UNIT_WEIGHT
        pieces.append(Piece(region, float(pc["density"]), weight))
    return StepMeasure(atoms, pieces)
