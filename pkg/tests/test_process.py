import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from padic_levy import charfn as cf
from padic_levy import process as pr
from padic_levy.errors import EmptySample, InvalidThinning, NotNormalized
from padic_levy.field import FieldKind, FieldSpec, PVector
from padic_levy.measure import Atom, BallRegion, StepMeasure, charfn_of_measure, in_ball0

Q2 = FieldSpec(2)
Q3 = FieldSpec(3)
F2 = FieldSpec(2, FieldKind.FPTHETA)
HALF = Q2.vector(Fraction(1, 2))


def coin(spec, a, b):
    return StepMeasure([Atom(a, 0.5), Atom(b, 0.5)])


def test_rng_stream_is_deterministic_and_splittable():
    a = pr.RngStream(42).child(3).generator.integers(0, 2 ** 32, size=5)
    b = pr.RngStream(42).child(3).generator.integers(0, 2 ** 32, size=5)
    c = pr.RngStream(42).child(4).generator.integers(0, 2 ** 32, size=5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_uniform_ball_stays_inside():
    region = BallRegion(Q3.vector(0, 0), 0)
    pts = pr.sample_uniform_ball(region, pr.RngStream(1), size=500)
    assert all(in_ball0(z, 0) for z in pts)


def test_uniform_ball_sub_ball_frequencies():
    region = BallRegion(Q2.vector(0, 0), 0)
    pts = pr.sample_uniform_ball(region, pr.RngStream(2), size=100_000)
    cells = np.zeros(4, dtype=int)
    for z in pts:
        cells[z.coords[0].digit(0) + 2 * z.coords[1].digit(0)] += 1
    assert stats.chisquare(cells).pvalue > 1e-3
    assert cells[0] / len(pts) == pytest.approx(0.25, abs=4 * math.sqrt(0.25 * 0.75 / len(pts)))


def test_annulus_rejection_trials():
    region = BallRegion(Q2.vector(0), 0, -1)
    pts, trials = pr.sample_uniform_ball(region, pr.RngStream(3), size=20_000, return_trials=True)
    assert all(z.norm() == 1 for z in pts)
    # expected trials per accepted draw is 1 / (1 - 1/p^n) = 2
    assert trials / len(pts) == pytest.approx(2.0, abs=0.05)


def test_sample_step_measure_examples():
    z0 = Q3.vector(Fraction(2, 3))
    assert all(z == z0 for z in pr.sample_step_measure(StepMeasure.dirac(z0), pr.RngStream(0), 50))
    m = coin(Q2, Q2.vector(0), Q2.vector(1))
    draws = pr.sample_step_measure(m, pr.RngStream(4), 100_000)
    freq = sum(1 for z in draws if not z.is_zero) / len(draws)
    assert abs(freq - 0.5) <= 0.005
    unit = StepMeasure.uniform_ball(Q2.vector(0), 0)
    draws = pr.sample_step_measure(unit, pr.RngStream(5), 20_000)
    est = pr.empirical_charfn(draws, Q2.vector(Fraction(1, 2)))
    assert abs(est.estimate) <= 4 * est.std_error


def test_sample_step_measure_requires_probability():
    with pytest.raises(NotNormalized):
        pr.sample_step_measure(StepMeasure.dirac(Q2.vector(1), 0.5), pr.RngStream(0))


@pytest.mark.parametrize("spec", [Q2, Q3, F2], ids=str)
def test_sampler_matches_exact_charfn(spec):
    lam = StepMeasure([Atom(spec.vector(spec.monomial(1, -1)), 0.3)])
    lam = lam + StepMeasure.haar_ball(spec.vector(0), 1, 0.7 / spec.p)
    draws = pr.sample_step_measure(lam, pr.RngStream(6), 20_000)
    ys = [spec.vector(spec.monomial(d, -j)) for j in range(-2, 4) for d in (1, spec.p - 1)]
    est = pr.empirical_charfn_grid(draws, ys)
    exact = np.array([charfn_of_measure(lam, y) for y in ys])
    assert np.max(np.abs(est - exact)) <= 4 / math.sqrt(len(draws))


def test_compound_poisson_path_structure():
    lam = StepMeasure.dirac(HALF)
    path = pr.sample_compound_poisson(3.0, lam, 2.0, pr.RngStream(7))
    assert path.times[0] == 0 and np.all(np.diff(path.times) >= 0)
    assert path.values[0].is_zero
    for (s, z), before, after in zip(path.jumps, path.values[:-1], path.values[1:]):
        assert after == before + z and 0 <= s <= 2.0
    assert len(pr.sample_compound_poisson(3.0, lam, 0.0, pr.RngStream(7))) == 1


def test_compound_poisson_is_reproducible():
    lam = StepMeasure.uniform_ball(Q3.vector(0), 1)
    a = pr.sample_compound_poisson(2.0, lam, 1.0, pr.RngStream(9))
    b = pr.sample_compound_poisson(2.0, lam, 1.0, pr.RngStream(9))
    assert np.array_equal(a.times, b.times) and a.values == b.values


def test_compound_poisson_charfn():
    lam = coin(Q2, HALF, Q2.vector(Fraction(1, 4)))
    xs, counts = pr.sample_compound_poisson_endpoints(1.0, lam, 1.0, pr.RngStream(10), 20_000)
    assert counts.mean() == pytest.approx(1.0, abs=4 / math.sqrt(len(xs)))
    for y in (Q2.vector(1), Q2.vector(2), Q2.vector(4)):
        exact = cf.compound_poisson_exponential(1.0, lam, 1.0, y)
        assert abs(pr.empirical_charfn(xs, y).estimate - exact) <= 4 / math.sqrt(len(xs))


def test_char_two_parity():
    w, t = 2.0, 1.0
    xs, _ = pr.sample_compound_poisson_endpoints(w, StepMeasure.dirac(F2.vector(1)), t, pr.RngStream(11), 20_000)
    assert all(x.is_zero or x == F2.vector(1) for x in xs)
    p0 = (1 + math.exp(-2 * w * t)) / 2
    freq = sum(x.is_zero for x in xs) / len(xs)
    assert abs(freq - p0) <= 4 * math.sqrt(p0 * (1 - p0) / len(xs))


def test_increments_are_homogeneous():
    lam = StepMeasure.dirac(HALF)
    y = Q2.vector(1)
    gen = pr.RngStream(12).generator
    incs = []
    for _ in range(5000):
        path = pr.sample_compound_poisson(1.0, lam, 2.0, gen)
        incs.append(path.value_at(2.0) - path.value_at(1.0))
    exact = cf.compound_poisson_exponential(1.0, lam, 1.0, y)
    assert abs(pr.empirical_charfn(incs, y).estimate - exact) <= 4 / math.sqrt(len(incs))


def test_empirical_charfn_examples():
    zeros = [Q2.vector(0)] * 10
    est = pr.empirical_charfn(zeros, Q2.vector(Fraction(1, 8)))
    assert est.estimate == 1 and est.n_samples == 10
    draws = pr.sample_step_measure(StepMeasure.uniform_ball(Q2.vector(0), 0), pr.RngStream(13), 1000)
    assert pr.empirical_charfn(draws, Q2.vector(1)).estimate == 1
    pair = coin(Q2, Q2.vector(0), HALF)
    draws = pr.sample_step_measure(pair, pr.RngStream(14), 100_000)
    assert abs(pr.empirical_charfn(draws, Q2.vector(1)).estimate) <= 0.013
    with pytest.raises(EmptySample):
        pr.empirical_charfn([], Q2.vector(1))


def test_independence_examples():
    pair = coin(Q2, Q2.vector(0), HALF)
    grid = [(Q2.vector(1), Q2.vector(1)), (Q2.vector(2), Q2.vector(1))]

    def independent(gen, n):
        return pr.sample_step_measure(pair, gen, n), pr.sample_step_measure(pair, gen, n)

    def dependent(gen, n):
        xs = pr.sample_step_measure(pair, gen, n)
        return xs, list(xs)

    def constant(gen, n):
        return [Q2.vector(0)] * n, [Q2.vector(0)] * n

    n = 20_000
    assert pr.independence_test(independent, grid, n, pr.RngStream(15)).passed
    rep = pr.independence_test(dependent, grid, n, pr.RngStream(15))
    assert not rep.passed and rep.max_discrepancy >= 0.5
    rep = pr.independence_test(constant, grid, n, pr.RngStream(15))
    assert rep.passed and rep.max_discrepancy == 0


def test_triangular_array_small():
    lam = coin(Q2, HALF, Q2.vector(Fraction(1, 4)))
    grid = [Q2.vector(1), Q2.vector(2), Q2.vector(4)]
    rep = pr.triangular_array_experiment(1.0, lam, 1.0, [1, 4, 16, 64], grid, 20_000, pr.RngStream(16))
    first = rep.rows[0]
    # one-row closed form: |(1 - wt) + wt lam_hat - exp(wt (lam_hat - 1))| with wt = 1
    analytic = max(abs(charfn_of_measure(lam, y) - cf.compound_poisson_exponential(1.0, lam, 1.0, y)) for y in grid)
    assert first.gap_analytic == pytest.approx(analytic, abs=1e-12)
    assert rep.non_increasing
    assert rep.rows[-1].gap_empirical <= max(rep.constant / 64, 5 / math.sqrt(20_000))


def test_triangular_array_degenerate_and_invalid():
    lam = StepMeasure.dirac(Q2.vector(0))
    rep = pr.triangular_array_experiment(1.0, lam, 1.0, [1, 8], [Q2.vector(Fraction(1, 4))], 500, pr.RngStream(0))
    assert all(r.gap_empirical == 0 for r in rep.rows)
    with pytest.raises(InvalidThinning):
        pr.triangular_array_experiment(4.0, lam, 1.0, [2], [Q2.vector(1)], 10, pr.RngStream(0))


def test_bracket_moments_integer_paths():
    lam = StepMeasure.dirac(Q3.vector(1))
    rep = pr.bracket_moments(lambda g: pr.sample_compound_poisson(1.0, lam, 2.0, g), [0.5, 1.0, 2.0], 300,
                             pr.RngStream(17))
    assert np.all(rep.mean == 0) and np.all(rep.cov == 0) and not rep.nonlinear


def test_bracket_moments_flags_parity_nonlinearity():
    lam = StepMeasure.dirac(HALF)
    times = [0.25, 0.5, 1.0, 2.0, 4.0]
    rep = pr.bracket_moments(lambda g: pr.sample_compound_poisson(1.0, lam, 4.0, g), times, 20_000,
                             pr.RngStream(18))
    expected = (1 - np.exp(-2 * np.array(times))) / 4
    assert np.all(np.abs(rep.mean[:, 0] - expected) <= 4 * rep.mean_se[:, 0])
    assert rep.nonlinear
    assert rep.increment_corr <= rep.increment_band


def test_uniqueness_witness():
    rng = pr.RngStream(19).generator
    for m in (1, 2):
        grid = pr.dual_grid(Q2, m)
        assert all(s.norm() <= Fraction(2) ** (m + 1) for s in grid)
        for _ in range(10):
            P = pr.random_atomic_measure(Q2, rng, m, 3)
            Q = pr.random_atomic_measure(Q2, rng, m, 3)
            if pr.same_atomic_measure(P, Q):
                continue
            diff, s = pr.cf_difference_witness(P, Q, grid)
            assert diff >= 1e-6
