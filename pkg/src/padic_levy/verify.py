"""Invariant suites behind ``padic-levy verify``.

Each check returns a dict with ``name``, ``passed``, a few summary numbers
and, on failure, a ``counterexample`` payload. Sizes are kept small enough
that ``run_suite("all")`` finishes in well under five minutes.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable

import numpy as np

from . import charfn as cf
from .field import (
    FieldKind,
    FieldSpec,
    PElement,
    PVector,
    char_angle,
    frac_part,
    random_element,
    random_elements,
    random_vector,
    vector_from_text,
    vector_to_text,
)
from .measure import (
    ETA_V_WEIGHT,
    Atom,
    BallRegion,
    LocallyConstantFn,
    Piece,
    StepMeasure,
    UNIT_WEIGHT,
    ball_character_integral,
    charfn_of_measure,
    character_fn,
    convolve,
    integrate_locally_constant,
    ball_integral_closed_form,
    reweight,
)
from . import process as pr

SUITES = ("field", "measure", "charfn", "process")

SPECS = [FieldSpec(2), FieldSpec(3), FieldSpec(2, FieldKind.FPTHETA), FieldSpec(3, FieldKind.FPTHETA)]


def _check(name: str, passed: bool, counterexample=None, **info) -> dict:
    out = {"name": name, "passed": bool(passed), **info}
    if not passed and counterexample is not None:
        out["counterexample"] = counterexample
    return out


def _txt(x) -> str:
    return vector_to_text(x) if isinstance(x, PVector) else vector_to_text(PVector([x]))


# -- field ------------------------------------------------------------------------

def field_checks(rng: np.random.Generator, size: int = 2000) -> list:
    out = []
    for spec in SPECS:
        tag = f"{spec.kind.value}{spec.p}"
        bad = None
        for _ in range(size):
            x = random_element(spec, rng, -4, 4, zero_prob=0.05)
            y = random_element(spec, rng, -4, 4, zero_prob=0.05)
            s = (x + y).norm()
            nx, ny = x.norm(), y.norm()
            if s > max(nx, ny) or (nx != ny and s != max(nx, ny)):
                bad = {"x": _txt(x), "y": _txt(y)}
                break
            if not x.is_zero and not y.is_zero and (x * y).norm() != nx * ny:
                bad = {"x": _txt(x), "y": _txt(y), "law": "multiplicativity"}
                break
        out.append(_check(f"ultrametric_multiplicative[{tag}]", bad is None, bad, trials=size))

        bad = None
        for _ in range(size):
            s_ = random_vector(spec, rng, 2, -3, 3)
            z = random_vector(spec, rng, 2, -3, 3)
            v = random_vector(spec, rng, 2, -3, 3)
            if char_angle(s_, z + v) != char_angle(s_, z) + char_angle(s_, v):
                bad = {"s": _txt(s_), "z": _txt(z), "v": _txt(v)}
                break
        out.append(_check(f"character_homomorphism[{tag}]", bad is None, bad, trials=size))

        bad = None
        for _ in range(size):
            x = random_element(spec, rng, -4, 4)
            y = random_element(spec, rng, -4, 4)
            v = frac_part(x + y).as_fraction() - frac_part(x).as_fraction() - frac_part(y).as_fraction()
            scaled = v * spec.p if spec.char_p else v
            if scaled.denominator != 1:
                bad = {"x": _txt(x), "y": _txt(y), "value": str(v)}
                break
        out.append(_check(f"frac_part_cocycle[{tag}]", bad is None, bad, trials=size))

        if spec.char_p:
            bad = None
            for _ in range(size // 10):
                x = random_element(spec, rng, -4, 4)
                acc = spec.zero()
                for _ in range(spec.p):
                    acc = acc + x
                if not acc.is_zero:
                    bad = {"x": _txt(x)}
                    break
            out.append(_check(f"char_p_torsion[{tag}]", bad is None, bad))

        bad = None
        for _ in range(size // 10):
            z = random_vector(spec, rng, 2, -4, 4, zero_prob=0.1)
            text = vector_to_text(z)
            if vector_to_text(vector_from_text(spec, text)) != text:
                bad = {"z": text}
                break
        out.append(_check(f"round_trip[{tag}]", bad is None, bad))
    return out


# -- measure ----------------------------------------------------------------------

def ball_integral_grid_check(closed_form: Callable = ball_integral_closed_form, primes=(2, 3, 5), dims=(1, 2),
                       ks=range(-2, 3), norm_logs=range(-3, 4), kinds=(FieldKind.QP, FieldKind.FPTHETA)) -> dict:
    """Coset sums against the closed form; ``closed_form`` is injectable for fault tests."""
    worst, where = 0.0, None
    count = 0
    for kind in kinds:
        for p in primes:
            spec = FieldSpec(p, kind)
            for n in dims:
                for k in ks:
                    for j in norm_logs:
                        # |s| = p^j, attained on the first coordinate
                        coords = [spec.monomial(1, -j)] + [spec.monomial(p - 1, -j + 1)] * (n - 1)
                        s = PVector(coords)
                        gap = abs(ball_character_integral(s, k) - float(closed_form(s, k)))
                        count += 1
                        if gap > worst:
                            worst = gap
                            where = {"p": p, "kind": kind.value, "n": n, "k": k, "s": vector_to_text(s), "gap": gap}
    return _check("ball_integral_exactness", worst <= 1e-12, where, max_gap=worst, cases=count)


def _random_atomic(spec: FieldSpec, rng, n_atoms: int, n: int = 1, lo: int = -3, hi: int = 2) -> StepMeasure:
    masses = rng.dirichlet(np.ones(n_atoms))
    return StepMeasure([Atom(random_vector(spec, rng, n, lo, hi), float(m)) for m in masses])


def measure_checks(rng: np.random.Generator, size: int = 100, closed_form: Callable = ball_integral_closed_form) -> list:
    out = [ball_integral_grid_check(closed_form)]
    for spec in SPECS:
        tag = f"{spec.kind.value}{spec.p}"
        worst, bad = 0.0, None
        for _ in range(size):
            P = _random_atomic(spec, rng, int(rng.integers(1, 4)))
            Q = _random_atomic(spec, rng, int(rng.integers(1, 4)))
            s = random_vector(spec, rng, 1, -3, 3)
            gap = abs(charfn_of_measure(convolve(P, Q), s) - charfn_of_measure(P, s) * charfn_of_measure(Q, s))
            if gap > worst:
                worst, bad = gap, {"s": vector_to_text(s)}
        out.append(_check(f"fourier_of_convolution[{tag}]", worst <= 1e-9, bad, max_gap=worst))

        P = _random_atomic(spec, rng, 3)
        same = reweight(P, UNIT_WEIGHT)
        ok = all(a.mass == b.mass and a.point == b.point for a, b in zip(P.atoms, same.atoms))
        out.append(_check(f"reweight_identity[{tag}]", ok))

        worst = 0.0
        for _ in range(10):
            s = random_vector(spec, rng, 1, -2, 1)
            m = StepMeasure.haar_ball(random_vector(spec, rng, 1, -1, 2), int(rng.integers(-1, 2)))
            base = integrate_locally_constant(character_fn(s), m)
            finer = integrate_locally_constant(character_fn(s), m, extra_refine=1)
            worst = max(worst, abs(base - finer))
        out.append(_check(f"refinement_soundness[{tag}]", worst <= 1e-12, None, max_gap=worst))

        worst = 0.0
        for _ in range(10):
            s = random_vector(spec, rng, 1, -2, 1)
            c = random_vector(spec, rng, 1, -2, 2)
            k = int(rng.integers(-1, 2))
            origin = spec.vector(0)
            shifted = LocallyConstantFn(lambda z, s=s, c=c: char_angle(s, z - c), lambda z, s=s: s.valuation)
            a = integrate_locally_constant(shifted, StepMeasure.haar_ball(c, k))
            b = integrate_locally_constant(character_fn(s), StepMeasure.haar_ball(origin, k))
            worst = max(worst, abs(a - b))
        out.append(_check(f"translation_invariance[{tag}]", worst <= 1e-12, None, max_gap=worst))
    return out


# -- charfn ------------------------------------------------------------------------

def cocycle_check(spec: FieldSpec, rng, size: int) -> dict:
    bad = None
    pool = random_elements(spec, rng, 5 * size, -3, 3)
    for i in range(size):
        a, b, c, beta, gamma = pool[5 * i:5 * i + 5]
        y, z, x = PVector([a]), PVector([b]), PVector([c])
        r = cf.f1(y, z, x)
        if not r.ok:
            bad = {"f": "f1", "y": _txt(y), "z": _txt(z), "x": _txt(x), "value": str(r.value)}
            break
        r = cf.f2(beta, gamma)
        if not r.ok:
            bad = {"f": "f2", "beta": _txt(beta), "gamma": _txt(gamma), "value": str(r.value)}
            break
    return _check(f"cocycles[{spec.kind.value}{spec.p}]", bad is None, bad, trials=size)


def random_jump_measure(spec: FieldSpec, rng, n: int = 1) -> StepMeasure:
    """Atoms away from 0 plus, sometimes, a Haar ball or annulus piece."""
    atoms = [Atom(random_vector(spec, rng, n, -2, 2), float(rng.uniform(0.1, 1.0)))
             for _ in range(int(rng.integers(1, 4)))]
    pieces = []
    if rng.random() < 0.5:
        k = int(rng.integers(-1, 2))
        inner = k - 1 if rng.random() < 0.5 else None
        pieces.append(Piece(BallRegion(PVector([spec.zero()] * n), k, inner), float(rng.uniform(0.1, 1.0)),
                            [UNIT_WEIGHT, ETA_V_WEIGHT][int(rng.integers(0, 2))]))
    return StepMeasure(atoms, pieces)


def functional_equation_check(rng, size: int) -> dict:
    worst, bad = 0.0, None
    for i in range(size):
        spec = SPECS[i % len(SPECS)]
        nu = random_jump_measure(spec, rng)
        y = random_vector(spec, rng, 1, -2, 1)
        z = random_vector(spec, rng, 1, -2, 1)
        q = random_vector(spec, rng, 1, -2, 1)
        beta = random_element(spec, rng, -2, 1)
        pairs = {
            "F1": cf.check_A_additivity(nu, y, z),
            "F2": cf.check_A_scaling(nu, beta, y),
            "B1": (cf.B_functional(nu, y, z), cf.B_functional(nu, z, y)),
            "B2": cf.check_B_additivity(nu, q, y, z),
            "B3": cf.check_B_scaling(nu, beta, y, z),
        }
        if cf.B_functional(nu, y) < 0:
            pairs["B1_positive"] = (0.0, 1.0)
        for law, (lhs, rhs) in pairs.items():
            gap = abs(lhs - rhs)
            if gap > worst:
                worst = gap
                bad = {"law": law, "spec": repr(spec), "y": _txt(y), "z": _txt(z), "lhs": lhs, "rhs": rhs}
    return _check("functional_equations", worst <= 1e-9, bad, max_gap=worst, trials=size)


def representation_check(rng, size: int) -> dict:
    worst, bad = 0.0, None
    for i in range(size):
        spec = SPECS[i % len(SPECS)]
        nu = random_jump_measure(spec, rng)
        t5 = cf.LevyTriplet(nu, mode="T5")
        eta = reweight(nu, cf.ETA_WEIGHT)
        for eps in (-1, 0, 2):
            t7 = cf.LevyTriplet(eta, mode="T7", epsilon_log=eps)
            y = random_vector(spec, rng, 1, -3, 1)
            gap = abs(cf.g(t5, y) - cf.g(t7, y))
            if gap > worst:
                worst, bad = gap, {"spec": repr(spec), "y": _txt(y), "epsilon_log": eps}
    return _check("representation_consistency", worst <= 1e-9, bad, max_gap=worst)


def divisibility_check(rng, size: int) -> dict:
    worst = 0.0
    for i in range(size):
        spec = SPECS[i % len(SPECS)]
        tr = cf.LevyTriplet(random_jump_measure(spec, rng), drift=cf.KDrift(random_vector(spec, rng, 1, -2, 1), 0.7))
        y = random_vector(spec, rng, 1, -3, 1)
        t1, t2 = float(rng.uniform(0, 2)), float(rng.uniform(0, 2))
        worst = max(worst, abs(cf.psi(tr, t1 + t2, y) - cf.psi(tr, t1, y) * cf.psi(tr, t2, y)))
        for m in (2, 3, 5, 7):
            worst = max(worst, abs(cf.psi(tr, t1 / m, y) ** m - cf.psi(tr, t1, y)))
    return _check("semigroup_divisibility", worst <= 1e-12, None, max_gap=worst)


def hermitian_check(rng, size: int) -> dict:
    worst = 0.0
    for i in range(size):
        spec = SPECS[i % len(SPECS)]
        base = _random_atomic(spec, rng, 2, lo=-2, hi=1)
        atoms = []
        for a in base.atoms:
            if a.point.is_zero:
                continue
            atoms += [Atom(a.point, a.mass / 2), Atom(-a.point, a.mass / 2)]
        if not atoms:
            continue
        tr = cf.LevyTriplet(StepMeasure(atoms))
        y = random_vector(spec, rng, 1, -3, 1)
        worst = max(worst, abs(cf.psi(tr, 1.0, -y) - np.conj(cf.psi(tr, 1.0, y))))
    return _check("hermitian_symmetry", worst <= 1e-9, None, max_gap=worst)


def unit_ball_check(primes=(2, 3)) -> dict:
    worst, bad = 0.0, None
    for p in primes:
        for kind in (FieldKind.QP, FieldKind.FPTHETA):
            spec = FieldSpec(p, kind)
            for j in range(-1, 4):
                y = spec.vector(spec.monomial(1 if p == 2 else 2, -j))
                for variant in cf.UnitBallVariant:
                    nu = cf.unit_ball_jump(spec, 1.0, variant)
                    A, B = cf.unit_ball_closed_form(1.0, y, variant)
                    gap = max(abs(A - cf.A_functional(nu, y)), abs(B - cf.B_functional(nu, y)))
                    if gap > worst:
                        worst, bad = gap, {"p": p, "kind": kind.value, "log_norm_y": j, "variant": variant.value}
    A, B = cf.unit_ball_closed_form(1.0, FieldSpec(2).vector(Fraction(1, 2)), "weighted_haar")
    exact = abs(A - math.pi / 2) <= 1e-12 and abs(B - math.pi ** 2 / 2) <= 1e-12
    return _check("unit_ball_closed_form", worst <= 1e-9 and exact, bad, max_gap=worst, reference_ok=exact)


def closed_form_16_cases(spec: FieldSpec) -> dict:
    """Parameters for all six particular cases in dimension 1."""
    half = spec.vector(spec.monomial(1, -1))
    h = ((spec.monomial(1, -1),),)
    lam = StepMeasure([Atom(half, 0.5), Atom(spec.vector(spec.monomial(1, -2)), 0.5)])
    return {
        cf.ParticularCase.DRIFT_K: {"a": half, "q": 0.8},
        cf.ParticularCase.DRIFT_R: {"v": [0.3], "q": 1.5},
        cf.ParticularCase.GAUSS_K: {"a": half, "q": 0.8, "h": h},
        cf.ParticularCase.GAUSS_R: {"v": [0.4], "b": [[0.6]]},
        cf.ParticularCase.POISSON: {"z0": half, "q": 1.3},
        cf.ParticularCase.COMPOUND_POISSON: {"w": 1.7, "lam": lam, "drift": cf.KDrift(half, 0.5)},
    }


def tg_grid(spec: FieldSpec, count: int = 20) -> list:
    ts = [0.25, 0.5, 1.0, 2.0]
    ys = [spec.vector(spec.monomial(d, -j)) for j in range(0, 4) for d in range(1, min(spec.p, 3))][:5]
    while len(ys) < 5:
        ys.append(spec.vector(spec.monomial(1, -len(ys))))
    return [(t, y) for t in ts for y in ys][:count]


def closed_form_check() -> dict:
    worst, bad = 0.0, None
    series_worst = 0.0
    for spec in SPECS:
        for case, params in closed_form_16_cases(spec).items():
            tr = cf.particular_triplet(case, params)
            for t, y in tg_grid(spec):
                gap = abs(cf.particular_closed_form(case, params, t, y) - cf.psi(tr, t, y))
                if gap > worst:
                    worst, bad = gap, {"case": case.value, "spec": repr(spec), "t": t, "y": _txt(y)}
                if case == cf.ParticularCase.COMPOUND_POISSON:
                    expo = cf.compound_poisson_exponential(params["w"], params["lam"], t, y, params["drift"])
                    series_worst = max(series_worst, abs(cf.particular_closed_form(case, params, t, y) - expo))
    ok = worst <= 1e-9 and series_worst <= 1e-12
    return _check("particular_case_closed_forms", ok, bad, max_gap=worst, series_gap=series_worst)


def derivative_identity_check() -> dict:
    fails = []
    q2 = FieldSpec(2)
    half = q2.vector(Fraction(1, 2))
    quarter = q2.vector(Fraction(3, 4))
    cases = {
        "single_atom": StepMeasure([Atom(half, 4.0)]),  # |x|^-2 nu = delta_{1/2}
        "two_atoms": StepMeasure([Atom(half, 1.0), Atom(quarter, 8.0)]),
    }
    worst = 0.0
    for name, nu in cases.items():
        for step in (1e-2, 1e-3):
            rep = cf.derivative_check(nu, q2.vector(1), step)
            worst = max(worst, rep.gap_A / rep.tolerance, rep.gap_B / rep.tolerance)
            if not rep.passed:
                fails.append({"case": name, "step": step, "gap_A": rep.gap_A, "gap_B": rep.gap_B})
    return _check("derivative_identities", not fails, fails or None, worst_ratio=worst)


def charfn_checks(rng: np.random.Generator, size: int = 200) -> list:
    out = [cocycle_check(spec, rng, size * 10) for spec in SPECS]
    out.append(functional_equation_check(rng, size))
    out.append(representation_check(rng, max(size // 10, 4)))
    out.append(divisibility_check(rng, max(size // 10, 4)))
    out.append(hermitian_check(rng, max(size // 10, 4)))
    out.append(unit_ball_check())
    out.append(closed_form_check())
    out.append(derivative_identity_check())
    return out


# -- process -----------------------------------------------------------------------

def y_grid(spec: FieldSpec, count: int = 20, top: int = 4) -> list:
    """``count`` fixed nonzero points with ``1 <= |y| <= p^top`` spread over all digit patterns."""
    pool = []
    for j in range(top + 1):
        for lead in range(1, spec.p):
            for rest in itertools.product(range(spec.p), repeat=j):
                pool.append(spec.vector(PElement(spec, -j, (lead,) + rest)))
    idx = np.linspace(0, len(pool) - 1, min(count, len(pool))).round().astype(int)
    return [pool[i] for i in idx]


def sampler_corpus(spec: FieldSpec) -> dict:
    origin = spec.vector(0)
    half = spec.vector(spec.monomial(1, -1))
    return {
        "dirac": StepMeasure.dirac(half),
        "two_point": StepMeasure([Atom(origin, 0.5), Atom(spec.vector(1), 0.5)]),
        "unit_ball": StepMeasure.uniform_ball(origin, 0),
        "mixed": StepMeasure([Atom(half, 0.25)], [Piece(BallRegion(half, -1), 0.75 * spec.p)]),
        "annulus": StepMeasure(pieces=[Piece(BallRegion(origin, 1, 0), 1.0 / (spec.p - 1))]),
    }


def sampler_check(spec: FieldSpec, rng, size: int) -> dict:
    ys = y_grid(spec)
    worst, bad = 0.0, None
    for name, m in sampler_corpus(spec).items():
        xs = pr.sample_step_measure(m, rng, size)
        emp = pr.empirical_charfn_grid(xs, ys)
        exact = np.array([charfn_of_measure(m, y) for y in ys])
        ratio = float(np.max(np.abs(emp - exact))) * math.sqrt(size)
        if ratio > worst:
            worst, bad = ratio, {"measure": name}
    return _check(f"sampler_vs_exact[{spec.kind.value}{spec.p}]", worst <= 4.0, bad, max_std_errors=worst)


def compound_poisson_check(rng, size: int) -> list:
    out = []
    q2 = FieldSpec(2)
    f2 = FieldSpec(2, FieldKind.FPTHETA)
    cases = {
        "q2_dirac_half": (q2, StepMeasure.dirac(q2.vector(Fraction(1, 2)))),
        "q2_unit_ball": (q2, StepMeasure.uniform_ball(q2.vector(0), 0)),
        "f2_dirac_one": (f2, StepMeasure.dirac(f2.vector(1))),
    }
    for name, (spec, lam) in cases.items():
        xs, counts = pr.sample_compound_poisson_endpoints(1.0, lam, 1.0, rng, size)
        ys = y_grid(spec)
        emp = pr.empirical_charfn_grid(xs, ys)
        tr = cf.compound_poisson_triplet(1.0, lam)
        exact = np.array([cf.psi(tr, 1.0, y) for y in ys])
        gap = float(np.max(np.abs(emp - exact)))
        info = {"max_gap": gap, "threshold": 4 / math.sqrt(size)}
        ok = gap <= 4 / math.sqrt(size)
        if spec.char_p:
            p0 = float(np.mean([x.is_zero for x in xs]))
            target = (1 + math.exp(-2.0)) / 2
            band = 4 * math.sqrt(target * (1 - target) / size)
            info.update(parity=p0, parity_target=target)
            ok = ok and abs(p0 - target) <= band
        out.append(_check(f"compound_poisson_mc[{name}]", ok, {"case": name} if not ok else None, **info))
    return out


def independence_checks(rng, size: int) -> list:
    q2 = FieldSpec(2)
    two_point = StepMeasure([Atom(q2.vector(0), 0.5), Atom(q2.vector(Fraction(1, 2)), 0.5)])
    one = q2.vector(1)
    grid = [(one, one), (q2.vector(2), q2.vector(Fraction(1, 2))), (one, q2.vector(Fraction(1, 4)))]

    def independent(gen, n):
        return pr.sample_step_measure(two_point, gen, n), pr.sample_step_measure(two_point, gen, n)

    def dependent(gen, n):
        xs = pr.sample_step_measure(two_point, gen, n)
        return xs, list(xs)

    a = pr.independence_test(independent, grid, size, rng)
    b = pr.independence_test(dependent, [(one, one)], size, rng)
    return [
        _check("independence_independent_pair", a.passed, None, max_gap=a.max_discrepancy, threshold=a.threshold),
        _check("independence_dependent_pair", (not b.passed) and b.max_discrepancy >= 0.5, None,
               max_gap=b.max_discrepancy),
    ]


def triangular_check(rng, size: int, m_list=(1, 4, 16, 64, 256, 1024)) -> dict:
    q2 = FieldSpec(2)
    lam = StepMeasure.dirac(q2.vector(Fraction(1, 2)))
    rep = pr.triangular_array_experiment(1.0, lam, 1.0, m_list, y_grid(q2, 8), size, rng)
    last = rep.rows[-1]
    ok = rep.non_increasing and last.gap_empirical <= 0.02
    return _check("triangular_array_limit", ok, None, final_gap=last.gap_empirical,
                  gaps=[r.gap_empirical for r in rep.rows])


def uniqueness_check(rng, pairs: int = 100) -> dict:
    worst, bad = math.inf, None
    for i in range(pairs):
        spec = SPECS[i % len(SPECS)]
        m = 1 + i % 2
        P = pr.random_atomic_measure(spec, rng, m, int(rng.integers(1, 4)))
        Q = pr.random_atomic_measure(spec, rng, m, int(rng.integers(1, 4)))
        while pr.same_atomic_measure(P, Q, tol=1e-9):
            Q = pr.random_atomic_measure(spec, rng, m, int(rng.integers(1, 4)))
        d, s = pr.cf_difference_witness(P, Q, pr.dual_grid(spec, m))
        if d < worst:
            worst, bad = d, {"spec": repr(spec), "m": m}
    return _check("uniqueness_witness", worst >= 1e-6, bad, min_difference=worst, pairs=pairs)


def process_checks(rng: np.random.Generator, size: int = 20000) -> list:
    out = [sampler_check(spec, rng, size) for spec in SPECS[:3]]
    out += compound_poisson_check(rng, size)
    out += independence_checks(rng, size)
    out.append(triangular_check(rng, size, (1, 4, 16, 64)))
    out.append(uniqueness_check(rng, 40))
    return out


# -- driver ------------------------------------------------------------------------

def run_suite(suite: str = "all", seed: int = 0, closed_form: Callable = ball_integral_closed_form) -> dict:
    if suite not in SUITES + ("all",):
        raise ValueError(f"unknown suite {suite!r}")
    names = SUITES if suite == "all" else (suite,)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    results = []
    for name in names:
        if name == "field":
            results += field_checks(rng)
        elif name == "measure":
            results += measure_checks(rng, closed_form=closed_form)
        elif name == "charfn":
            results += charfn_checks(rng)
        else:
            results += process_checks(rng)
    return {
        "suite": suite,
        "seed": seed,
        "passed": all(r["passed"] for r in results),
        "checks": results,
    }
