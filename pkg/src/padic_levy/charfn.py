"""Levy-Khinchine exponents over Q_p and F_p((theta)).

Two cocycles measure how far the bracket is from additive and from
homogeneous:

    f1(y, z; x) = [(y+z, x)] - [(y, x)] - [(z, x)]
    f2(beta, a) = [beta a] - [beta][a]

The jump functionals A(y), B(y, z) integrate brackets against
``|x|^-2 nu(dx)``. The exponent ``g`` comes in two forms. The compensated
form uses ``nu``. The epsilon-ball form uses ``eta = (1+|x|^2)|x|^-2 nu``.
With the canonical A and B both forms reduce to ``int (chi - 1) d eta``.
Each term is computed separately so that the cancellation can be checked.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
from scipy import stats

from .errors import DimensionMismatch, InvalidParams
from .field import (
    TWO_PI,
    FieldSpec,
    PElement,
    PVector,
    bracket_vector,
    char_angle,
    element_from_json,
    element_to_json,
    frac_part,
    pairing,
    vector_from_json,
    vector_to_json,
)
from .measure import (
    ETA_V_WEIGHT,
    ETA_WEIGHT,
    INV_SQUARE,
    LAMBDA_WEIGHT,
    UNIT_WEIGHT,
    Atom,
    BallRegion,
    LocallyConstantFn,
    Piece,
    StepMeasure,
    charfn_of_measure,
    integrate_locally_constant,
    measure_from_json,
    measure_to_json,
    restrict,
    reweight,
)

# -- cocycles -------------------------------------------------------------------


@dataclass(frozen=True)
class CocycleReport:
    value: Fraction
    integrality_ok: bool
    bound_ok: bool
    in_vanishing_set: bool = False

    @property
    def ok(self) -> bool:
        vanish_ok = self.value == 0 if self.in_vanishing_set else True
        return self.integrality_ok and self.bound_ok and vanish_ok


def _angle(s: PVector, z: PVector) -> Fraction:
    return char_angle(s, z).as_fraction()


def f1_value(y: PVector, z: PVector, x: PVector) -> Fraction:
    """``[(y+z, x)] - [(y, x)] - [(z, x)]`` as an exact rational."""
    return _angle(y + z, x) - _angle(y, x) - _angle(z, x)


def f1(y: PVector, z: PVector, x: PVector) -> CocycleReport:
    value = f1_value(y, z, x)
    p = y.spec.p
    scaled = value * p if y.spec.char_p else value
    a, b = pairing(y, x), pairing(z, x)
    vanish = a.norm() <= 1 and b.norm() <= 1
    return CocycleReport(value, scaled.denominator == 1, -2 <= value <= 1, vanish)


def f2_value(beta: PElement, gamma: PElement) -> Fraction:
    """``[beta gamma] - [beta][gamma]`` as an exact rational."""
    return (frac_part(beta * gamma).as_fraction()
            - frac_part(beta).as_fraction() * frac_part(gamma).as_fraction())


def f2(beta: PElement, gamma: PElement) -> CocycleReport:
    value = f2_value(beta, gamma)
    spec = beta.spec
    p = spec.p
    vanish = beta.norm() <= 1 and gamma.norm() <= 1
    if spec.char_p:
        integral = (value * p * p).denominator == 1
    else:
        order = min(beta.valuation, gamma.valuation)
        if order < 0:
            integral = (value * Fraction(p) ** (-order)).denominator == 1
        else:
            integral = value == 0
    return CocycleReport(value, integral, -1 <= value <= 1, vanish)


# -- integrands -------------------------------------------------------------------

def _val(y: PVector):
    return math.inf if y.is_zero else y.valuation


def bracket_fn(y: PVector, power: int = 1) -> LocallyConstantFn:
    """``x -> <(y, x)>^power``; zero on ``|x| <= 1/|y|``."""
    r = _val(y)

    def ev(x):
        return (TWO_PI * float(char_angle(y, x))) ** power
    return LocallyConstantFn(ev, lambda x: r, r)


def bracket_pair_fn(y: PVector, z: PVector) -> LocallyConstantFn:
    """``x -> <(y, x)> <(z, x)>``."""
    r = min(_val(y), _val(z))
    vanish = max(_val(y), _val(z))

    def ev(x):
        return TWO_PI ** 2 * float(char_angle(y, x)) * float(char_angle(z, x))
    return LocallyConstantFn(ev, lambda x: r, vanish)


def _norm_radius(x: PVector) -> float:
    # |x| is constant on B(x, p^r) for r < log_p |x|
    return -x.valuation - 1 if not x.is_zero else -math.inf


def compensated_fn(y: PVector) -> LocallyConstantFn:
    """The compensated jump integrand used against ``nu`` in the first form."""
    r = _val(y)

    def ev(x):
        b = TWO_PI * float(char_angle(y, x))
        if b == 0.0:
            return 0.0
        n2 = float(x.norm()) ** 2
        damp = 1.0 / (1.0 + n2)
        return (cmath.exp(1j * b) - 1 - 1j * b * damp + b * b * damp / 2) * (1 + n2) / n2
    return LocallyConstantFn(ev, lambda x: min(r, _norm_radius(x)), r)


def _inner_fn(y: PVector) -> LocallyConstantFn:
    r = _val(y)

    def ev(x):
        b = TWO_PI * float(char_angle(y, x))
        return cmath.exp(1j * b) - 1 - 1j * b + b * b / 2
    return LocallyConstantFn(ev, lambda x: r, r)


def chi_minus_one_fn(y: PVector) -> LocallyConstantFn:
    r = _val(y)

    def ev(x):
        return cmath.exp(1j * TWO_PI * float(char_angle(y, x))) - 1
    return LocallyConstantFn(ev, lambda x: r, r)


def _real(v: complex) -> float:
    return float(np.real(v))


# -- jump functionals --------------------------------------------------------------

def A_functional(nu: StepMeasure, y: PVector) -> float:
    """``int <(y, x)> |x|^-2 nu(dx)``."""
    if nu.is_empty or y.is_zero:
        return 0.0
    return _real(integrate_locally_constant(bracket_fn(y), reweight(nu, INV_SQUARE)))


def B_functional(nu: StepMeasure, y: PVector, z: PVector | None = None) -> float:
    """``int <(y, x)> <(z, x)> |x|^-2 nu(dx)``; ``z`` defaults to ``y``."""
    z = y if z is None else z
    if nu.is_empty or y.is_zero or z.is_zero:
        return 0.0
    return _real(integrate_locally_constant(bracket_pair_fn(y, z), reweight(nu, INV_SQUARE)))


def AB_tilde_from_nu(nu: StepMeasure, epsilon_log: int, y: PVector, z: PVector | None = None) -> tuple:
    """The pair of epsilon-ball functionals, each the sum of a plain and a ``|x|^-2`` integral over ``B(0, p^epsilon_log)``."""
    z = y if z is None else z
    if nu.is_empty or y.is_zero:
        return 0.0, 0.0
    inv = reweight(nu, INV_SQUARE)
    fa = restrict(bracket_fn(y), epsilon_log)
    fb = restrict(bracket_pair_fn(y, z), epsilon_log)
    a = integrate_locally_constant(fa, nu) + integrate_locally_constant(fa, inv)
    b = 0.0 if z.is_zero else (integrate_locally_constant(fb, nu) + integrate_locally_constant(fb, inv))
    return _real(a), _real(b)


def AB_tilde(triplet: "LevyTriplet", y: PVector, z: PVector | None = None) -> tuple:
    """Epsilon-ball functionals of a triplet whose jump measure is ``eta``."""
    if triplet.mode != "T7":
        raise InvalidParams("AB_tilde needs a triplet in T7 mode")
    nu = reweight(triplet.jump, LAMBDA_WEIGHT)
    return AB_tilde_from_nu(nu, triplet.epsilon_log, y, z)


# -- functional equations ---------------------------------------------------------

def _f1_fn(y: PVector, z: PVector) -> LocallyConstantFn:
    r = min(_val(y), _val(z))
    return LocallyConstantFn(lambda x: float(f1_value(y, z, x)), lambda x: r, r)


def _f2_fn(beta: PElement, y: PVector) -> LocallyConstantFn:
    bv = beta.valuation if not beta.is_zero else math.inf
    r = _val(y) + min(0, bv)

    def ev(x):
        return float(f2_value(beta, pairing(y, x)))
    return LocallyConstantFn(ev, lambda x: r, r)


def _product_fn(f: LocallyConstantFn, g: LocallyConstantFn) -> LocallyConstantFn:
    vanish = [v for v in (f.vanishing_log, g.vanishing_log) if v is not None]
    return LocallyConstantFn(lambda x: f.evaluate(x) * g.evaluate(x),
                             lambda x: min(f.radius_log(x), g.radius_log(x)),
                             max(vanish) if vanish else None)


def _mu(nu: StepMeasure) -> StepMeasure:
    return reweight(nu, INV_SQUARE)


def check_A_additivity(nu: StepMeasure, y: PVector, z: PVector) -> tuple:
    """Both sides of the additivity law for ``A``."""
    lhs = A_functional(nu, y + z)
    rhs = A_functional(nu, y) + A_functional(nu, z) + TWO_PI * _real(
        integrate_locally_constant(_f1_fn(y, z), _mu(nu)))
    return lhs, rhs


def check_A_scaling(nu: StepMeasure, beta: PElement, y: PVector) -> tuple:
    """Both sides of the scaling law for ``A``."""
    lhs = A_functional(nu, y.scale(beta))
    br = float(frac_part(beta).as_fraction())
    rhs = br * A_functional(nu, y) + TWO_PI * _real(integrate_locally_constant(_f2_fn(beta, y), _mu(nu)))
    return lhs, rhs


def check_B_additivity(nu: StepMeasure, q: PVector, y: PVector, z: PVector) -> tuple:
    lhs = B_functional(nu, q + y, z)
    corr = integrate_locally_constant(_product_fn(_f1_fn(q, y), bracket_fn(z)), _mu(nu))
    rhs = B_functional(nu, q, z) + B_functional(nu, y, z) + TWO_PI * _real(corr)
    return lhs, rhs


def check_B_scaling(nu: StepMeasure, beta: PElement, y: PVector, z: PVector) -> tuple:
    lhs = B_functional(nu, y.scale(beta), z)
    br = float(frac_part(beta).as_fraction())
    corr = integrate_locally_constant(_product_fn(_f2_fn(beta, y), bracket_fn(z)), _mu(nu))
    rhs = br * B_functional(nu, y, z) + TWO_PI * _real(corr)
    return lhs, rhs


# -- triplets -----------------------------------------------------------------------

@dataclass(frozen=True)
class KDrift:
    """``A(y) = q <(a, y)>``."""

    a: PVector
    q: float = 1.0

    def __post_init__(self):
        if not self.q > 0:
            raise InvalidParams("drift q must be positive")

    def value(self, y: PVector) -> float:
        return self.q * TWO_PI * float(char_angle(self.a, y))


@dataclass(frozen=True)
class RealDrift:
    """``A(y) = q (v, <y>)`` with the real dot product."""

    v: tuple
    q: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))
        if not self.q > 0:
            raise InvalidParams("drift q must be positive")
        if any(c < 0 or c > 1 for c in self.v):
            raise InvalidParams("real drift entries must lie in [0, 1]")

    def value(self, y: PVector) -> float:
        if len(self.v) != y.dim:
            raise DimensionMismatch("drift vector and y differ in dimension")
        return self.q * float(np.dot(self.v, bracket_vector(y)))


@dataclass(frozen=True, eq=False)
class KDiffusion:
    """``B(y, z) = <(h y, z)>`` with ``h`` a symmetric matrix over the field."""

    h: tuple

    def __post_init__(self):
        h = tuple(tuple(row) for row in self.h)
        n = len(h)
        if any(len(row) != n for row in h):
            raise InvalidParams("h must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if not h[i][j] == h[j][i]:
                    raise InvalidParams("h must be symmetric")
        object.__setattr__(self, "h", h)

    def apply(self, y: PVector) -> PVector:
        rows = []
        for row in self.h:
            rows.append(pairing(PVector(row), y))
        return PVector(rows)

    def value(self, y: PVector, z: PVector | None = None) -> float:
        z = y if z is None else z
        return TWO_PI * float(char_angle(self.apply(y), z))


@dataclass(frozen=True, eq=False)
class RealDiffusion:
    """``B(y, z) = (b <y>, <z>)`` with ``b`` real symmetric PSD."""

    b: Any

    def __post_init__(self):
        b = np.array(self.b, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise InvalidParams("b must be square")
        if not np.allclose(b, b.T, atol=0, rtol=0):
            raise InvalidParams("b must be symmetric")
        if np.linalg.eigvalsh(b).min() < -1e-12:
            raise InvalidParams("b must be positive semidefinite")
        object.__setattr__(self, "b", b)

    def value(self, y: PVector, z: PVector | None = None) -> float:
        z = y if z is None else z
        return float(np.dot(self.b @ np.array(bracket_vector(y)), bracket_vector(z)))


class LevyTriplet:
    """Drift, diffusion and jump measure, read in one of two forms.

    ``mode="T5"``: the jump measure is ``nu`` and the compensated integral
    carries the weight ``(1+|x|^2)/|x|^2``. ``mode="T7"``: the jump measure
    is ``eta`` and the compensation is applied only on
    ``B(0, p^epsilon_log)``. Drift and diffusion are added to the canonical
    functionals computed from the jump measure.
    """

    def __init__(self, jump: StepMeasure | None = None, drift=None, diffusion=None,
                 mode: str = "T5", epsilon_log: int = 0):
        if mode not in ("T5", "T7"):
            raise InvalidParams("mode must be 'T5' or 'T7'")
        jump = StepMeasure() if jump is None else jump
        if jump.has_atom_at_zero():
            raise InvalidParams("jump measure must not charge the origin")
        if isinstance(drift, KDrift) and isinstance(diffusion, RealDiffusion):
            raise InvalidParams("mixed field-valued drift and real diffusion is not supported")
        if isinstance(drift, RealDrift) and isinstance(diffusion, KDiffusion):
            raise InvalidParams("mixed real drift and field-valued diffusion is not supported")
        dims = set()
        if jump.dim is not None:
            dims.add(jump.dim)
        if isinstance(drift, KDrift):
            dims.add(drift.a.dim)
        elif isinstance(drift, RealDrift):
            dims.add(len(drift.v))
        if isinstance(diffusion, KDiffusion):
            dims.add(len(diffusion.h))
        elif isinstance(diffusion, RealDiffusion):
            dims.add(diffusion.b.shape[0])
        if len(dims) > 1:
            raise DimensionMismatch(f"triplet components disagree on dimension: {sorted(dims)}")
        self.jump = jump
        self.drift = drift
        self.diffusion = diffusion
        self.mode = mode
        self.epsilon_log = int(epsilon_log)

    def with_epsilon(self, epsilon_log: int) -> "LevyTriplet":
        return LevyTriplet(self.jump, self.drift, self.diffusion, self.mode, epsilon_log)

    def drift_value(self, y: PVector) -> float:
        return 0.0 if self.drift is None else self.drift.value(y)

    def diffusion_value(self, y: PVector, z: PVector | None = None) -> float:
        return 0.0 if self.diffusion is None else self.diffusion.value(y, z)

    def to_json(self) -> dict:
        return triplet_to_json(self)

    def __repr__(self):
        return (f"LevyTriplet(mode={self.mode}, epsilon_log={self.epsilon_log}, drift={self.drift!r}, "
                f"diffusion={type(self.diffusion).__name__ if self.diffusion else None}, jump={self.jump!r})")


def g_compensated(triplet: LevyTriplet, y: PVector) -> complex:
    """Exponent in the compensated form, with the three terms computed separately."""
    if triplet.mode != "T5":
        raise InvalidParams("g_compensated needs a T5 triplet")
    if y.is_zero:
        return 0j
    nu = triplet.jump
    A = A_functional(nu, y) + triplet.drift_value(y)
    B = B_functional(nu, y) + triplet.diffusion_value(y)
    jumps = integrate_locally_constant(compensated_fn(y), nu) if not nu.is_empty else 0j
    return 1j * A - B / 2 + jumps


def g_ball_split(triplet: LevyTriplet, y: PVector) -> complex:
    """Exponent in the epsilon-ball form."""
    if triplet.mode != "T7":
        raise InvalidParams("g_ball_split needs a T7 triplet")
    if y.is_zero:
        return 0j
    eta = triplet.jump
    A, B = AB_tilde(triplet, y)
    A += triplet.drift_value(y)
    B += triplet.diffusion_value(y)
    if eta.is_empty:
        return 1j * A - B / 2
    eps = triplet.epsilon_log
    inner = integrate_locally_constant(restrict(_inner_fn(y), eps, inside=True), eta)
    outer = integrate_locally_constant(restrict(chi_minus_one_fn(y), eps, inside=False), eta)
    return 1j * A - B / 2 + inner + outer


def g(triplet: LevyTriplet, y: PVector) -> complex:
    return g_compensated(triplet, y) if triplet.mode == "T5" else g_ball_split(triplet, y)


def jump_exponent(triplet: LevyTriplet, y: PVector) -> complex:
    """``int (chi_y - 1) d eta`` computed directly, without the compensators."""
    eta = triplet.jump if triplet.mode == "T7" else reweight(triplet.jump, ETA_WEIGHT)
    if eta.is_empty or y.is_zero:
        return 0j
    return integrate_locally_constant(chi_minus_one_fn(y), eta)


def psi(triplet: LevyTriplet, t: float, y: PVector) -> complex:
    """``exp(t g(y))``."""
    if t < 0:
        raise InvalidParams("t must be non-negative")
    if t == 0:
        return 1 + 0j
    return cmath.exp(t * g(triplet, y))


# -- particular cases ------------------------------------------------------------

class ParticularCase(str, Enum):
    DRIFT_K = "drift_k"
    DRIFT_R = "drift_r"
    GAUSS_K = "gauss_k"
    GAUSS_R = "gauss_r"
    POISSON = "poisson"
    COMPOUND_POISSON = "compound_poisson"


def poisson_triplet(z0: PVector, q: float = 1.0, mode: str = "T7") -> LevyTriplet:
    """Single-jump-size process: ``eta = q delta_{z0}``."""
    if z0.is_zero:
        raise InvalidParams("z0 must be nonzero")
    if not q > 0:
        raise InvalidParams("q must be positive")
    if mode == "T7":
        # a ball strictly inside |z0| keeps the atom in the uncompensated part
        return LevyTriplet(StepMeasure([Atom(z0, float(q))]), mode="T7", epsilon_log=-z0.valuation - 1)
    n2 = float(z0.norm()) ** 2
    return LevyTriplet(StepMeasure([Atom(z0, q * n2 / (1 + n2))]), mode="T5")


def compound_poisson_triplet(w: float, lam: StepMeasure, drift=None, epsilon_log: int = 0) -> LevyTriplet:
    """``eta = w lambda`` plus an optional drift; an atom of ``lambda`` at 0 is dropped (it jumps by nothing)."""
    if not w > 0:
        raise InvalidParams("w must be positive")
    total = lam.total_mass()
    if abs(total - 1) > 1e-12:
        raise InvalidParams("lambda must be a probability measure")
    atoms = [Atom(a.point, w * a.mass) for a in lam.atoms if not a.point.is_zero]
    pieces = [Piece(pc.region, w * pc.density, pc.weight) for pc in lam.pieces]
    return LevyTriplet(StepMeasure(atoms, pieces), drift=drift, mode="T7", epsilon_log=epsilon_log)


def particular_triplet(case: ParticularCase | str, params: dict) -> LevyTriplet:
    """The triplet whose ``psi`` each particular-case closed form should reproduce."""
    case = ParticularCase(case)
    if case == ParticularCase.DRIFT_K:
        return LevyTriplet(drift=KDrift(params["a"], params.get("q", 1.0)))
    if case == ParticularCase.DRIFT_R:
        return LevyTriplet(drift=RealDrift(params["v"], params.get("q", 1.0)))
    if case == ParticularCase.GAUSS_K:
        return LevyTriplet(drift=KDrift(params["a"], params.get("q", 1.0)), diffusion=KDiffusion(params["h"]))
    if case == ParticularCase.GAUSS_R:
        return LevyTriplet(drift=RealDrift(params["v"], 1.0), diffusion=RealDiffusion(params["b"]))
    if case == ParticularCase.POISSON:
        return poisson_triplet(params["z0"], params.get("q", 1.0), params.get("mode", "T7"))
    return compound_poisson_triplet(params["w"], params["lam"], params.get("drift"),
                                    params.get("epsilon_log", 0))


def compound_poisson_series(w: float, lam_hat: complex, t: float, tail: float = 1e-14) -> complex:
    """``sum_k P(N = k) lam_hat^k`` for ``N ~ Poisson(wt)``, truncated once the Poisson tail is below ``tail``."""
    mean = w * t
    if mean == 0:
        return 1 + 0j
    kmax = int(stats.poisson.isf(tail, mean)) + 1
    while stats.poisson.sf(kmax, mean) >= tail:
        kmax += 1
    k = np.arange(kmax + 1)
    weights = stats.poisson.pmf(k, mean)
    return complex(np.sum(weights * lam_hat ** k))


def particular_closed_form(case: ParticularCase | str, params: dict, t: float, y: PVector) -> complex:
    """Closed-form ``psi(t, y)`` for the six particular cases."""
    case = ParticularCase(case)
    if t < 0:
        raise InvalidParams("t must be non-negative")
    try:
        if case == ParticularCase.DRIFT_K:
            q = params.get("q", 1.0)
            return cmath.exp(1j * t * q * TWO_PI * float(char_angle(params["a"], y)))
        if case == ParticularCase.DRIFT_R:
            q = params.get("q", 1.0)
            return cmath.exp(1j * t * q * float(np.dot(params["v"], bracket_vector(y))))
        if case == ParticularCase.GAUSS_K:
            q = params.get("q", 1.0)
            drift = q * TWO_PI * float(char_angle(params["a"], y))
            diff = KDiffusion(params["h"]).value(y)
            return cmath.exp(1j * t * drift - t * diff / 2)
        if case == ParticularCase.GAUSS_R:
            br = np.array(bracket_vector(y))
            b = np.array(params["b"], dtype=float)
            return cmath.exp(1j * t * float(np.dot(params["v"], br)) - t * float(br @ b @ br) / 2)
        if case == ParticularCase.POISSON:
            q = params.get("q", 1.0)
            chi = cmath.exp(1j * TWO_PI * float(char_angle(y, params["z0"])))
            return cmath.exp(q * t * (chi - 1))
        w, lam = params["w"], params["lam"]
        drift = params.get("drift")
        d = 0.0 if drift is None else drift.value(y)
        series = compound_poisson_series(w, charfn_of_measure(lam, y), t, params.get("tail", 1e-14))
        return cmath.exp(1j * t * d) * series
    except KeyError as exc:
        raise InvalidParams(f"missing parameter {exc} for case {case.value}") from None


def compound_poisson_exponential(w: float, lam: StepMeasure, t: float, y: PVector, drift=None) -> complex:
    """``exp(i t drift(y)) exp(w t (lam_hat(y) - 1))``."""
    d = 0.0 if drift is None else drift.value(y)
    return cmath.exp(1j * t * d + w * t * (charfn_of_measure(lam, y) - 1))


# -- derivative identities ----------------------------------------------------------

def phi(nu: StepMeasure, beta: float, y: PVector) -> complex:
    """``int exp(i beta <(y, x)>) |x|^-2 nu(dx)``."""
    if nu.is_empty:
        return 0j
    mu = _mu(nu)
    mu.total_mass()  # raises DivergentJ for a non-integrable |x|^-2
    r = _val(y)

    def ev(x):
        return cmath.exp(1j * beta * TWO_PI * float(char_angle(y, x)))
    return integrate_locally_constant(LocallyConstantFn(ev, lambda x: r), mu)


@dataclass(frozen=True)
class DerivativeReport:
    A: float
    B: float
    A_fd: float
    B_fd: float
    step: float
    gap_A: float
    gap_B: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.gap_A <= self.tolerance and self.gap_B <= self.tolerance


def derivative_check(nu: StepMeasure, y: PVector, step: float = 1e-3, richardson: bool = True) -> DerivativeReport:
    """Compare finite differences of ``phi`` at 0 with ``A`` and ``B``; tolerance ``10 step^2``."""
    f0 = phi(nu, 0.0, y)

    def d1(h):
        return (phi(nu, h, y) - phi(nu, -h, y)) / (2 * h)

    def d2(h):
        return (phi(nu, h, y) - 2 * f0 + phi(nu, -h, y)) / (h * h)

    if richardson:
        first = (4 * d1(step / 2) - d1(step)) / 3
        second = (4 * d2(step / 2) - d2(step)) / 3
    else:
        first, second = d1(step), d2(step)
    A_fd = _real(-1j * first)
    B_fd = _real(-second)
    A, B = A_functional(nu, y), B_functional(nu, y)
    return DerivativeReport(A, B, A_fd, B_fd, step, abs(A - A_fd), abs(B - B_fd), 10 * step ** 2)


# -- unit-ball jump measures --------------------------------------------------------

class UnitBallVariant(str, Enum):
    WEIGHTED_HAAR = "weighted_haar"   # |x|^-2 nu = q mu on the unit ball
    PLAIN_HAAR = "plain_haar"         # nu = q mu on the unit ball


def unit_ball_jump(spec: FieldSpec, q: float, variant: UnitBallVariant | str) -> StepMeasure:
    """The jump measure ``nu`` on the unit ball of ``F`` for either variant."""
    variant = UnitBallVariant(variant)
    region = BallRegion(spec.vector(0), 0)
    weight = ETA_V_WEIGHT if variant == UnitBallVariant.WEIGHTED_HAAR else UNIT_WEIGHT
    return StepMeasure(pieces=[Piece(region, float(q), weight)])


def _sphere_bracket_sums(spec: FieldSpec, j: int) -> tuple:
    """``sum [z]`` and ``sum [z]^2`` over unit cosets of the sphere ``|z| = p^j``."""
    p = spec.p
    s1 = s2 = Fraction(0)
    for lead in range(1, p):
        for rest in itertools.product(range(p), repeat=j - 1):
            digits = (lead,) + rest  # exponents -j .. -1
            if spec.char_p:
                frac = Fraction(digits[-1], p)
            else:
                frac = sum((Fraction(d, p ** (j - i)) for i, d in enumerate(digits)), Fraction(0))
            s1 += frac
            s2 += frac * frac
    return s1, s2


def unit_ball_closed_form(q: float, y: PVector, variant: UnitBallVariant | str) -> tuple:
    """``(A(y), B(y))`` for a Haar-type jump measure on the unit ball, as finite sphere sums.

    Substituting ``z = y x`` maps the unit ball onto ``|z| <= |y|`` and only
    the spheres ``1 < |z| <= |y|`` carry a nonzero bracket.
    """
    variant = UnitBallVariant(variant)
    if y.dim != 1:
        raise DimensionMismatch("the unit-ball closed form is one-dimensional")
    if y.is_zero:
        return 0.0, 0.0
    spec = y.spec
    p = spec.p
    top = -y.valuation
    if top <= 0:
        return 0.0, 0.0
    ny = Fraction(p) ** top
    A = B = Fraction(0)
    for j in range(1, top + 1):
        s1, s2 = _sphere_bracket_sums(spec, j)
        if variant == UnitBallVariant.WEIGHTED_HAAR:
            A += s1
            B += s2
        else:
            A += s1 / Fraction(p) ** (2 * j)
            B += s2 / Fraction(p) ** (2 * j)
    scale = 1 / ny if variant == UnitBallVariant.WEIGHTED_HAAR else ny
    return q * float(A * scale) * TWO_PI, q * float(B * scale) * TWO_PI ** 2


# -- serialization --------------------------------------------------------------------

def triplet_to_json(tr: LevyTriplet) -> dict:
    d: dict = {"mode": tr.mode, "epsilon_log": tr.epsilon_log}
    if tr.drift is None:
        d["drift"] = {"type": "none"}
    elif isinstance(tr.drift, KDrift):
        d["drift"] = {"type": "k", "a": vector_to_json(tr.drift.a), "q": tr.drift.q}
    else:
        d["drift"] = {"type": "r", "v": list(tr.drift.v), "q": tr.drift.q}
    if tr.diffusion is None:
        d["diffusion"] = {"type": "none"}
    elif isinstance(tr.diffusion, KDiffusion):
        d["diffusion"] = {"type": "k", "h": [[element_to_json(e) for e in row] for row in tr.diffusion.h]}
    else:
        d["diffusion"] = {"type": "r", "b": tr.diffusion.b.tolist()}
    d["jump"] = measure_to_json(tr.jump)
    return d


def triplet_from_json(spec: FieldSpec, d: dict) -> LevyTriplet:
    dr = d.get("drift") or {"type": "none"}
    if dr["type"] == "k":
        drift = KDrift(vector_from_json(spec, dr["a"]), float(dr.get("q", 1.0)))
    elif dr["type"] == "r":
        drift = RealDrift(dr["v"], float(dr.get("q", 1.0)))
    elif dr["type"] == "none":
        drift = None
    else:
        raise InvalidParams(f"unknown drift type {dr['type']!r}")
    df = d.get("diffusion") or {"type": "none"}
    if df["type"] == "k":
        diffusion = KDiffusion([[element_from_json(spec, e) for e in row] for row in df["h"]])
    elif df["type"] == "r":
        diffusion = RealDiffusion(df["b"])
    elif df["type"] == "none":
        diffusion = None
    else:
        raise InvalidParams(f"unknown diffusion type {df['type']!r}")
    jump = measure_from_json(spec, d.get("jump", {}))
    return LevyTriplet(jump, drift, diffusion, d.get("mode", "T5"), int(d.get("epsilon_log", 0)))


def grid_values(triplet: LevyTriplet, ts: Sequence[float], ys: Sequence[PVector]) -> np.ndarray:
    """``psi`` on a (t, y) grid, reusing one exponent per y."""
    out = np.empty((len(ts), len(ys)), dtype=complex)
    for j, y in enumerate(ys):
        gy = g(triplet, y)
        for i, t in enumerate(ts):
            out[i, j] = 1.0 if t == 0 else cmath.exp(t * gy)
    return out


# short names for the mode-specific exponents and closed forms
g_T5 = g_compensated
g_T7 = g_ball_split
closed_form_16 = particular_closed_form
check_corollary6 = derivative_check
section17_closed_form = unit_ball_closed_form
