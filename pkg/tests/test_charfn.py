import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from padic_levy import charfn as cf
from padic_levy.errors import DimensionMismatch, DivergentJ, InvalidParams
from padic_levy.field import FieldKind, FieldSpec, PElement, PVector, random_element, random_vector
from padic_levy.measure import Atom, BallRegion, ETA_V_WEIGHT, Piece, StepMeasure, UNIT_WEIGHT

Q2 = FieldSpec(2)
Q3 = FieldSpec(3)
F2 = FieldSpec(2, FieldKind.FPTHETA)
F3 = FieldSpec(3, FieldKind.FPTHETA)
SPECS = [Q2, Q3, F2, F3]
PI = math.pi


def half(spec=Q2):
    return spec.vector(Fraction(1, 2)) if not spec.char_p else spec.vector(spec.monomial(1, -1))


def jump_measure(spec, seed, n=1):
    rng = np.random.default_rng(seed)
    atoms = [Atom(random_vector(spec, rng, n, -2, 2), float(rng.uniform(0.1, 1.0))) for _ in range(3)]
    piece = Piece(BallRegion(PVector([spec.zero()] * n), 0, -1), 0.7, ETA_V_WEIGHT)
    return StepMeasure(atoms, [piece])


# -- cocycles -------------------------------------------------------------------------

def cocycle_elements(spec):
    digits = st.lists(st.integers(0, spec.p - 1), min_size=1, max_size=5)
    return st.builds(lambda v, ds: PElement(spec, v, ds), st.integers(-3, 3), digits)


def test_f1_examples():
    r = cf.f1(Q2.vector(1), Q2.vector(1), Q2.vector(Fraction(1, 2)))
    assert r.value == -1 and r.ok
    r = cf.f1(F2.vector(1), F2.vector(1), F2.vector(F2.monomial(1, -1)))
    assert r.value == -1 and r.integrality_ok and (F2.p * r.value).denominator == 1
    r = cf.f1(Q3.vector(1), Q3.vector(2), Q3.vector(1))
    assert r.value == 0 and r.in_vanishing_set


def test_f2_examples():
    h = Q2.from_fraction(Fraction(1, 2))
    r = cf.f2(h, Q2.from_fraction(Fraction(3, 2)))
    assert r.value == Fraction(1, 2) and r.integrality_ok
    assert cf.f2(h, h).value == 0
    assert cf.f2(Q3.from_int(5), Q3.from_fraction(Fraction(2, 5))).value == 0


@pytest.mark.parametrize("spec", SPECS, ids=str)
@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_cocycle_bounds_and_integrality(spec, data):
    y, z, x = (spec.vector(data.draw(cocycle_elements(spec))) for _ in range(3))
    r1 = cf.f1(y, z, x)
    assert r1.ok
    assert -2 <= r1.value <= 1
    if max((y.norm() * x.norm()), (z.norm() * x.norm())) <= 1:
        assert r1.value == 0
    b, c = data.draw(cocycle_elements(spec)), data.draw(cocycle_elements(spec))
    r2 = cf.f2(b, c)
    assert r2.ok and -1 <= r2.value <= 1
    if max(b.norm(), c.norm()) <= 1:
        assert r2.value == 0


# -- A and B --------------------------------------------------------------------------

def test_A_B_examples():
    nu = cf.unit_ball_jump(Q2, 1.0, "weighted_haar")
    y = Q2.vector(Fraction(1, 2))
    assert cf.A_functional(nu, Q2.vector(0)) == 0
    assert cf.A_functional(nu, Q2.vector(3)) == 0
    assert cf.A_functional(nu, y) == pytest.approx(PI / 2, abs=1e-12)
    assert cf.B_functional(nu, y) == pytest.approx(PI ** 2 / 2, abs=1e-12)
    assert cf.B_functional(nu, y, Q2.vector(0)) == 0


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_B_symmetric_and_nonnegative(spec):
    rng = np.random.default_rng(11)
    for seed in range(5):
        nu = jump_measure(spec, seed)
        y, z = random_vector(spec, rng, 1, -2, 1), random_vector(spec, rng, 1, -2, 1)
        assert cf.B_functional(nu, y, z) == pytest.approx(cf.B_functional(nu, z, y), abs=1e-12)
        assert cf.B_functional(nu, y) >= 0
        assert cf.A_functional(nu, y) >= 0


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_functional_equations(spec):
    rng = np.random.default_rng(5)
    for seed in range(6):
        nu = jump_measure(spec, seed)
        y, z, q = (random_vector(spec, rng, 1, -2, 1) for _ in range(3))
        beta = random_element(spec, rng, -2, 1)
        for lhs, rhs in (cf.check_A_additivity(nu, y, z), cf.check_A_scaling(nu, beta, y),
                         cf.check_B_additivity(nu, q, y, z), cf.check_B_scaling(nu, beta, y, z)):
            assert abs(lhs - rhs) <= 1e-9


def test_AB_tilde_examples():
    # Q_2, nu = delta_{1/2}, eps = 2, y = 1: |1/2| = 2, so the weighted companion carries 1/4
    d = StepMeasure.dirac(half())
    A, B = cf.AB_tilde_from_nu(d, 1, Q2.vector(1))
    assert A == pytest.approx(5 * PI / 4, abs=1e-12)
    assert B == pytest.approx(5 * PI ** 2 / 4, abs=1e-12)
    assert cf.AB_tilde_from_nu(d, 0, Q2.vector(1)) == (0.0, 0.0)
    small = StepMeasure.dirac(Q2.vector(2), 3.0)
    assert cf.AB_tilde_from_nu(small, 1, Q2.vector(1)) == (0.0, 0.0)


# -- exponents -----------------------------------------------------------------------

def test_g_T5_examples():
    y = Q2.vector(1)
    tr = cf.LevyTriplet(StepMeasure.dirac(half(), 0.8), mode="T5")
    assert cf.g(tr, y) == pytest.approx(-2, abs=1e-12)
    assert cf.g(tr, Q2.vector(0)) == 0
    a = Q2.vector(Fraction(3, 4))
    drift = cf.LevyTriplet(drift=cf.KDrift(a, 2.0))
    assert cf.g(drift, y) == pytest.approx(1j * 2.0 * 2 * PI * 0.75, abs=1e-12)


def test_g_T7_examples():
    tr = cf.poisson_triplet(half(), 1.0)
    assert cf.g(tr, Q2.vector(1)) == pytest.approx(-2, abs=1e-12)
    assert cf.g(tr, Q2.vector(2)) == 0
    q, z0 = 0.7, Q3.vector(Fraction(1, 9))
    y = Q3.vector(1)
    expected = q * (cmath.exp(2j * PI / 9) - 1)
    assert cf.g(cf.poisson_triplet(z0, q), y) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_compensated_form_matches_direct_jump_integral(spec):
    rng = np.random.default_rng(2)
    for seed in range(4):
        tr = cf.LevyTriplet(jump_measure(spec, seed), mode="T5")
        y = random_vector(spec, rng, 1, -2, 1)
        assert abs(cf.g_compensated(tr, y) - cf.jump_exponent(tr, y)) <= 1e-9


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_ball_split_epsilon_invariance(spec):
    rng = np.random.default_rng(4)
    tr = cf.LevyTriplet(jump_measure(spec, 1), mode="T7", epsilon_log=0)
    for _ in range(4):
        y = random_vector(spec, rng, 1, -2, 1)
        base = cf.g(tr, y)
        for eps in (-2, -1, 1, 2):
            assert abs(cf.g(tr.with_epsilon(eps), y) - base) <= 1e-9


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_both_forms_agree_on_atomic_jumps(spec):
    rng = np.random.default_rng(8)
    nu = StepMeasure([Atom(random_vector(spec, rng, 1, -2, 1), 0.4) for _ in range(3)])
    nu = StepMeasure([a for a in nu.atoms if not a.point.is_zero])
    eta_atoms = [Atom(a.point, a.mass * (1 + float(a.point.norm()) ** 2) / float(a.point.norm()) ** 2)
                 for a in nu.atoms]
    t5 = cf.LevyTriplet(nu, mode="T5")
    t7 = cf.LevyTriplet(StepMeasure(eta_atoms), mode="T7", epsilon_log=1)
    for _ in range(5):
        y = random_vector(spec, rng, 1, -2, 2)
        assert abs(cf.g(t5, y) - cf.g(t7, y)) <= 1e-9


def test_psi_examples():
    tr = cf.poisson_triplet(half(), 1.0)
    y = Q2.vector(1)
    assert cf.psi(tr, 0.0, y) == 1
    assert cf.psi(tr, 1.0, y) == pytest.approx(math.exp(-2), abs=1e-12)
    with pytest.raises(InvalidParams):
        cf.psi(tr, -1.0, y)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_semigroup_and_divisibility(spec):
    rng = np.random.default_rng(9)
    tr = cf.LevyTriplet(jump_measure(spec, 3), drift=cf.KDrift(random_vector(spec, rng, 1, -2, 0)))
    for _ in range(4):
        y = random_vector(spec, rng, 1, -2, 1)
        t1, t2 = rng.uniform(0, 2, size=2)
        assert abs(cf.psi(tr, t1 + t2, y) - cf.psi(tr, t1, y) * cf.psi(tr, t2, y)) <= 1e-12
        for m in (2, 3, 5, 7):
            assert abs(cf.psi(tr, t1 / m, y) ** m - cf.psi(tr, t1, y)) <= 1e-12
        assert abs(cf.psi(tr, t1, y)) <= 1 + 1e-12


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_hermitian_symmetry(spec):
    rng = np.random.default_rng(10)
    atoms = []
    for _ in range(3):
        x = random_vector(spec, rng, 1, -2, 1)
        if not x.is_zero:
            atoms += [Atom(x, 0.3), Atom(-x, 0.3)]
    tr = cf.LevyTriplet(StepMeasure(atoms))
    for _ in range(4):
        y = random_vector(spec, rng, 1, -2, 1)
        assert abs(cf.psi(tr, 1.0, -y) - cf.psi(tr, 1.0, y).conjugate()) <= 1e-12


def test_triplet_validation():
    with pytest.raises(InvalidParams):
        cf.LevyTriplet(StepMeasure.dirac(Q2.vector(0)))
    with pytest.raises(InvalidParams):
        cf.LevyTriplet(drift=cf.KDrift(Q2.vector(1)), diffusion=cf.RealDiffusion([[1.0]]))
    with pytest.raises(InvalidParams):
        cf.LevyTriplet(drift=cf.RealDrift([0.5]), diffusion=cf.KDiffusion([[Q2.one()]]))
    with pytest.raises(InvalidParams):
        cf.RealDiffusion([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(InvalidParams):
        cf.RealDrift([1.5])
    with pytest.raises(InvalidParams):
        cf.KDiffusion([[Q2.one(), Q2.zero()], [Q2.one(), Q2.one()]])
    with pytest.raises(DimensionMismatch):
        cf.LevyTriplet(StepMeasure.dirac(Q2.vector(1, 1)), drift=cf.RealDrift([0.5]))


# -- particular cases ------------------------------------------------------------------

def test_gauss_k_without_diffusion_is_drift():
    a = Q3.vector(Fraction(2, 9))
    zero_h = [[Q3.zero()]]
    for y in (Q3.vector(1), Q3.vector(Fraction(1, 3)), Q3.vector(5)):
        for t in (0.3, 1.0, 2.5):
            lhs = cf.particular_closed_form("gauss_k", {"a": a, "q": 1.5, "h": zero_h}, t, y)
            rhs = cf.particular_closed_form("drift_k", {"a": a, "q": 1.5}, t, y)
            assert lhs == pytest.approx(rhs, abs=1e-15)


def test_poisson_closed_form():
    params = {"z0": half(), "q": 1.0}
    assert cf.particular_closed_form("poisson", params, 1.0, Q2.vector(1)) == pytest.approx(math.exp(-2), abs=1e-12)


def test_compound_poisson_one_point_is_poisson():
    z0 = Q3.vector(Fraction(1, 3))
    lam = StepMeasure.dirac(z0)
    for y in (Q3.vector(1), Q3.vector(2), Q3.vector(Fraction(1, 3))):
        for t in (0.5, 1.0, 3.0):
            cp = cf.particular_closed_form("compound_poisson", {"w": 2.0, "lam": lam}, t, y)
            po = cf.particular_closed_form("poisson", {"z0": z0, "q": 2.0}, t, y)
            assert abs(cp - po) <= 1e-12


@pytest.mark.parametrize("case", list(cf.ParticularCase), ids=lambda c: c.value)
def test_closed_forms_match_engine(case):
    params = {
        cf.ParticularCase.DRIFT_K: {"a": Q2.vector(Fraction(3, 8)), "q": 0.8},
        cf.ParticularCase.DRIFT_R: {"v": [0.3], "q": 1.2},
        cf.ParticularCase.GAUSS_K: {"a": Q2.vector(Fraction(1, 4)), "q": 1.0, "h": [[Q2.from_fraction(Fraction(1, 2))]]},
        cf.ParticularCase.GAUSS_R: {"v": [0.5], "b": [[0.7]]},
        cf.ParticularCase.POISSON: {"z0": Q2.vector(Fraction(1, 4)), "q": 1.3},
        cf.ParticularCase.COMPOUND_POISSON: {"w": 1.5, "lam": StepMeasure([Atom(Q2.vector(Fraction(1, 2)), 0.5),
                                                                    Atom(Q2.vector(Fraction(3, 4)), 0.5)])},
    }[case]
    tr = cf.particular_triplet(case, params)
    for y in (Q2.vector(1), Q2.vector(Fraction(1, 2)), Q2.vector(3), Q2.vector(Fraction(5, 4))):
        for t in (0.25, 1.0, 2.0):
            assert abs(cf.particular_closed_form(case, params, t, y) - cf.psi(tr, t, y)) <= 1e-9


def test_compound_poisson_series_matches_exponential():
    for lam_hat in (1.0, -1.0, 0.3 + 0.4j, 1j):
        for wt in (0.1, 1.0, 7.0, 30.0):
            series = cf.compound_poisson_series(wt, lam_hat, 1.0)
            assert abs(series - cmath.exp(wt * (lam_hat - 1))) <= 1e-12


# -- derivatives and unit-ball sums ------------------------------------------------------

@pytest.mark.parametrize("step", [1e-2, 1e-3])
def test_derivative_identity_single_atom(step):
    nu = StepMeasure.dirac(half(), 4.0)  # |x|^-2 nu = delta_{1/2}
    rep = cf.derivative_check(nu, Q2.vector(1), step)
    assert rep.A == pytest.approx(PI, abs=1e-12)
    assert abs(rep.A_fd - rep.A) <= 1e-5 and rep.passed


def test_derivative_identity_empty_measure():
    rep = cf.derivative_check(StepMeasure(), Q2.vector(1))
    assert rep.A == rep.B == 0 and cf.phi(StepMeasure(), 0.3, Q2.vector(1)) == 0


def test_phi_diverges_for_haar_near_zero():
    nu = StepMeasure.haar_ball(Q2.vector(0), 0)
    with pytest.raises(DivergentJ):
        cf.phi(nu, 0.1, Q2.vector(1))


def test_unit_ball_examples():
    assert cf.unit_ball_closed_form(1.0, Q2.vector(1), "weighted_haar") == (0.0, 0.0)
    A, B = cf.unit_ball_closed_form(1.0, Q2.vector(Fraction(1, 2)), "weighted_haar")
    assert A == pytest.approx(PI / 2, abs=1e-12) and B == pytest.approx(PI ** 2 / 2, abs=1e-12)
    # Q_3, |y| = 3: average of <x0 / 3> and its square over the residues x0 in {0, 1, 2}
    A, B = cf.unit_ball_closed_form(1.0, Q3.vector(Fraction(1, 3)), "weighted_haar")
    assert A == pytest.approx(2 * PI / 3, abs=1e-12)
    assert B == pytest.approx(20 * PI ** 2 / 27, abs=1e-12)


@pytest.mark.parametrize("spec", [Q2, Q3, F2, F3], ids=str)
@pytest.mark.parametrize("variant", list(cf.UnitBallVariant), ids=lambda v: v.value)
def test_unit_ball_matches_pipeline(spec, variant):
    nu = cf.unit_ball_jump(spec, 1.7, variant)
    for j in range(-1, 4):
        y = spec.vector(spec.monomial(1, -j))
        A, B = cf.unit_ball_closed_form(1.7, y, variant)
        assert abs(A - cf.A_functional(nu, y)) <= 1e-9
        assert abs(B - cf.B_functional(nu, y)) <= 1e-9


def test_triplet_json_round_trip():
    h = [[Q3.from_fraction(Fraction(1, 3))]]
    tr = cf.LevyTriplet(jump_measure(Q3, 0), drift=cf.KDrift(Q3.vector(2), 0.5), diffusion=cf.KDiffusion(h),
                        mode="T7", epsilon_log=-1)
    back = cf.triplet_from_json(Q3, cf.triplet_to_json(tr))
    assert cf.triplet_to_json(back) == cf.triplet_to_json(tr)
    y = Q3.vector(Fraction(1, 9))
    assert cf.g(back, y) == pytest.approx(cf.g(tr, y), abs=1e-15)
