"""Samplers, empirical characteristic functions and statistical experiments.

Every sampler takes either an :class:`RngStream` or a numpy ``Generator``.
Draws are Haar-uniform on balls (i.i.d. uniform digits from the ball's
radius down to the precision window) and compound-Poisson paths are built
from a Poisson count plus sorted uniform jump times.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import EmptySample, InvalidParams, InvalidThinning, NotNormalized, PrecisionExhausted
from .field import TWO_PI, FieldSpec, PElement, PVector, char_angle, frac_part, zero_vector
from .measure import (
    Atom,
    BallRegion,
    Piece,
    StepMeasure,
    charfn_of_measure,
    in_ball,
    in_ball0,
)


# -- random streams -----------------------------------------------------------------

class RngStream:
    """Splittable deterministic stream: PCG64 seeded by ``SeedSequence(seed, spawn_key)``."""

    def __init__(self, seed: int, stream_id: int | Sequence[int] = 0):
        key = (int(stream_id),) if isinstance(stream_id, (int, np.integer)) else tuple(int(i) for i in stream_id)
        self.seed = int(seed)
        self.key = key
        self.generator = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key)))

    def child(self, i: int) -> "RngStream":
        return RngStream(self.seed, self.key + (int(i),))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={self.key})"


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


# -- measure samplers ---------------------------------------------------------------

def _uniform_ball_points(spec: FieldSpec, center: PVector, k: int, gen: np.random.Generator, size: int) -> list:
    prec = spec.precision
    length = prec + k  # exponents -k .. prec-1
    if length <= 0:
        raise PrecisionExhausted(f"ball radius p^{k} is below the precision window")
    n = center.dim
    digits = gen.integers(0, spec.p, size=(size, n, length))
    out = []
    for row in digits:
        coords = [PElement(spec, -k, row[j].tolist(), prec) for j in range(n)]
        pt = PVector(coords)
        out.append(pt if center.is_zero else pt + center)
    return out


def sample_uniform_ball(region: BallRegion, rng, size: int | None = None, return_trials: bool = False):
    """Haar-uniform draw from a ball or annulus (annuli by rejection of the inner ball)."""
    gen = _gen(rng)
    count = 1 if size is None else int(size)
    spec = region.spec
    out: list = []
    trials = 0
    while len(out) < count:
        need = count - len(out)
        batch = _uniform_ball_points(spec, region.center, region.radius_log, gen, need)
        trials += need
        if region.inner_radius_log is None:
            out.extend(batch)
        else:
            out.extend(z for z in batch if not in_ball(z, region.center, region.inner_radius_log))
    result = out[0] if size is None else out
    return (result, trials) if return_trials else result


def _sphere_masses(p: int, n: int, top: int, bottom, weight) -> tuple:
    """Masses of spheres ``|x| = p^j`` for ``j = top, top-1, ...`` until the tail is negligible."""
    js, ms = [], []
    total = 0.0
    shell = 1.0 - float(p) ** (-n)
    j = top
    while bottom is None or j > bottom:
        r = float(p) ** j
        m = weight(r) * r ** n * shell
        js.append(j)
        ms.append(m)
        total += m
        if j < top - 2000 or (j < 0 and m <= 1e-17 * total):
            break
        j -= 1
    return np.array(js), np.array(ms)


def _sample_piece(pc: Piece, gen: np.random.Generator, size: int) -> list:
    reg = pc.region
    if pc.weight.trivial or not in_ball0(reg.center, reg.radius_log):
        return sample_uniform_ball(reg, gen, size)
    # radial weight on a ball around 0: pick a sphere, then a uniform point on it
    spec = reg.spec
    p, n = spec.p, reg.dim
    js, ms = _sphere_masses(p, n, reg.radius_log, reg.inner_radius_log, pc.weight)
    picks = gen.choice(len(js), size=size, p=ms / ms.sum())
    origin = zero_vector(spec, n)
    out = []
    for idx in picks:
        j = int(js[idx])
        out.append(sample_uniform_ball(BallRegion(origin, j, j - 1), gen))
    return out


def sample_step_measure(m: StepMeasure, rng, size: int | None = None):
    """Draws from a probability step measure: pick a component by mass, then sample inside it."""
    total = m.total_mass()
    if abs(total - 1.0) > 1e-12:
        raise NotNormalized(f"total mass is {total!r}, expected 1")
    gen = _gen(rng)
    count = 1 if size is None else int(size)
    comps = list(m.atoms) + list(m.pieces)
    masses = np.array([a.mass for a in m.atoms] + [pc.mass() for pc in m.pieces])
    idx = gen.choice(len(comps), size=count, p=masses / masses.sum())
    out: list = [None] * count
    for c in np.unique(idx):
        where = np.nonzero(idx == c)[0]
        comp = comps[c]
        if isinstance(comp, Atom):
            for i in where:
                out[i] = comp.point
        else:
            for i, z in zip(where, _sample_piece(comp, gen, len(where))):
                out[i] = z
    return out[0] if size is None else out


# -- compound Poisson ----------------------------------------------------------------

@dataclass
class SamplePath:
    """Piecewise-constant path: ``values[i]`` holds on ``[times[i], times[i+1])``."""

    times: np.ndarray
    values: list
    jumps: list = field(default_factory=list)

    def value_at(self, s: float) -> PVector:
        i = int(np.searchsorted(self.times, s, side="right")) - 1
        return self.values[max(i, 0)]

    def __len__(self):
        return len(self.times)


def _check_probability(lam: StepMeasure):
    total = lam.total_mass()
    if abs(total - 1.0) > 1e-12:
        raise NotNormalized(f"jump law has mass {total!r}, expected 1")


def sample_compound_poisson(w: float, lam: StepMeasure, t: float, rng, initial: PVector | None = None) -> SamplePath:
    """One path of the compound Poisson process with rate ``w`` and jump law ``lam`` on ``[0, t]``."""
    _check_probability(lam)
    if w <= 0 or t < 0:
        raise InvalidParams("w must be positive and t non-negative")
    gen = _gen(rng)
    x0 = zero_vector(lam.spec, lam.dim) if initial is None else initial
    count = int(gen.poisson(w * t)) if t > 0 else 0
    times = np.sort(gen.uniform(0.0, t, size=count))
    sizes = sample_step_measure(lam, gen, count) if count else []
    values = [x0]
    jumps = []
    for s, z in zip(times, sizes):
        values.append(values[-1] + z)
        jumps.append((float(s), z))
    return SamplePath(np.concatenate([[0.0], times]), values, jumps)


def sample_compound_poisson_endpoints(w: float, lam: StepMeasure, t: float, rng, size: int) -> tuple:
    """``size`` independent values of ``xi(t)`` and their jump counts."""
    _check_probability(lam)
    gen = _gen(rng)
    counts = gen.poisson(w * t, size=size) if t > 0 else np.zeros(size, dtype=int)
    jumps = sample_step_measure(lam, gen, int(counts.sum())) if counts.sum() else []
    zero = zero_vector(lam.spec, lam.dim)
    out = []
    pos = 0
    for c in counts:
        x = zero
        for z in jumps[pos:pos + c]:
            x = x + z
        pos += c
        out.append(x)
    return out, counts


# -- empirical characteristic functions ------------------------------------------------

@dataclass(frozen=True)
class EmpiricalCF:
    estimate: complex
    n_samples: int
    std_error: float


def _cuts(ys: Sequence[PVector]) -> list:
    """Per coordinate, the exponent below which sample digits can affect any ``chi_y``."""
    out = []
    for j in range(ys[0].dim):
        vals = [-y.coords[j].valuation for y in ys if not y.coords[j].is_zero]
        out.append(max(vals) if vals else None)
    return out


def group_samples(samples: Sequence[PVector], ys: Sequence[PVector]) -> tuple:
    """Group samples that no character ``chi_y, y in ys`` can tell apart.

    Returns representatives, group counts and the group index of each sample.
    """
    if not samples:
        raise EmptySample("no samples")
    cuts = _cuts(ys)
    groups: dict = {}
    reps = []
    index = np.empty(len(samples), dtype=np.int64)
    for i, x in enumerate(samples):
        key = tuple(None if c is None else xc.truncate(c).key() for xc, c in zip(x.coords, cuts))
        g = groups.get(key)
        if g is None:
            g = groups[key] = len(reps)
            reps.append(x)
        index[i] = g
    counts = np.bincount(index, minlength=len(reps))
    return reps, counts, index


def sample_angles(samples: Sequence[PVector], y: PVector, grouping=None) -> np.ndarray:
    """``[(y, xi_j)]`` in turns, one per sample.

    Only digits of ``xi`` below ``-ord(y_j)`` matter, so samples are grouped
    by that truncation and each group is evaluated once.
    """
    reps, _, index = group_samples(samples, [y]) if grouping is None else grouping
    angles = np.array([float(char_angle(y, r)) for r in reps])
    return angles[index]


def empirical_charfn(samples: Sequence[PVector], y: PVector) -> EmpiricalCF:
    """Mean of ``chi_y(xi_j)``; standard error ``1/sqrt(n)``."""
    angles = sample_angles(samples, y)
    est = complex(np.mean(np.exp(1j * TWO_PI * angles)))
    n = len(angles)
    return EmpiricalCF(est, n, 1.0 / math.sqrt(n))


def empirical_charfn_grid(samples: Sequence[PVector], ys: Sequence[PVector]) -> np.ndarray:
    """Empirical CF at every ``y`` in ``ys``, grouping the samples once."""
    if not ys:
        return np.array([], dtype=complex)
    reps, counts, _ = group_samples(samples, ys)
    n = counts.sum()
    out = []
    for y in ys:
        angles = np.array([float(char_angle(y, r)) for r in reps])
        out.append(complex(np.sum(counts * np.exp(1j * TWO_PI * angles)) / n))
    return np.array(out)


# -- independence --------------------------------------------------------------------

@dataclass
class IndependenceReport:
    max_discrepancy: float
    threshold: float
    passed: bool
    points: list


def independence_test(sampler: Callable, grid: Sequence[tuple], n: int, rng) -> IndependenceReport:
    """Compare the joint CF of paired draws with the product of marginal CFs.

    ``sampler(gen, n)`` returns two equal-length lists ``(xis, etas)``.
    Independence passes when every gap is at most ``5/sqrt(n)``.
    """
    gen = _gen(rng)
    xis, etas = sampler(gen, n)
    if len(xis) != len(etas) or not xis:
        raise EmptySample("sampler must return equal, non-empty lists")
    points = []
    worst = 0.0
    gx = group_samples(xis, [y1 for y1, _ in grid]) if grid else None
    ge = group_samples(etas, [y2 for _, y2 in grid]) if grid else None
    for y1, y2 in grid:
        a = sample_angles(xis, y1, gx)
        b = sample_angles(etas, y2, ge)
        joint = complex(np.mean(np.exp(1j * TWO_PI * (a + b))))
        prod = complex(np.mean(np.exp(1j * TWO_PI * a))) * complex(np.mean(np.exp(1j * TWO_PI * b)))
        gap = abs(joint - prod)
        worst = max(worst, gap)
        points.append({"joint": joint, "product": prod, "gap": gap})
    thr = 5.0 / math.sqrt(len(xis))
    return IndependenceReport(worst, thr, worst <= thr, points)


# -- triangular arrays ----------------------------------------------------------------

def poisson_approximation_constant(w: float, t: float) -> float:
    """``C`` with ``|(1 - q + q lam_hat)^m - exp(wt(lam_hat - 1))| <= C/m`` for ``q = wt/m <= 1``."""
    return 2.0 * (w * t) ** 2


@dataclass
class TriangularRow:
    m: int
    gap_empirical: float
    gap_analytic: float
    bound: float
    within_bound: bool
    monotone_ok: bool


@dataclass
class TriangularReport:
    rows: list
    noise: float
    constant: float

    @property
    def non_increasing(self) -> bool:
        return all(r.monotone_ok for r in self.rows)


def triangular_array_experiment(w: float, lam: StepMeasure, t: float, m_list: Sequence[int],
                                grid: Sequence[PVector], n: int, rng) -> TriangularReport:
    """Row sums of ``m`` thinned jumps against the compound Poisson limit.

    Each row entry is one ``lam``-jump with probability ``wt/m`` and 0
    otherwise, so a row is a Binomial(m, wt/m) number of jumps.
    """
    _check_probability(lam)
    m_list = [int(m) for m in m_list]
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise InvalidParams("m_list must be strictly ascending")
    for m in m_list:
        if w * t / m > 1:
            raise InvalidThinning(f"w*t/m = {w * t / m} exceeds 1 at m = {m}")
    gen = _gen(rng)
    lam_hat = np.array([charfn_of_measure(lam, y) for y in grid])
    limit = np.exp(w * t * (lam_hat - 1))
    noise = 5.0 / math.sqrt(n)
    C = poisson_approximation_constant(w, t)
    zero = zero_vector(lam.spec, lam.dim)
    rows = []
    prev = None
    for m in m_list:
        q = w * t / m
        counts = gen.binomial(m, q, size=n)
        total = int(counts.sum())
        jumps = sample_step_measure(lam, gen, total) if total else []
        sums = []
        pos = 0
        for c in counts:
            x = zero
            for z in jumps[pos:pos + c]:
                x = x + z
            pos += c
            sums.append(x)
        emp = empirical_charfn_grid(sums, grid) if grid else np.array([])
        gap_e = float(np.max(np.abs(emp - limit))) if grid else 0.0
        analytic = (1 - q + q * lam_hat) ** m
        gap_a = float(np.max(np.abs(analytic - limit))) if grid else 0.0
        bound = max(C / m, noise)
        mono = prev is None or gap_e <= prev + noise
        rows.append(TriangularRow(m, gap_e, gap_a, bound, gap_e <= bound, mono))
        prev = gap_e
    return TriangularReport(rows, noise, C)


# -- bracket moments ------------------------------------------------------------------

@dataclass
class MomentReport:
    times: np.ndarray
    mean: np.ndarray            # (len(times), n) estimates of M[xi(t)]
    mean_se: np.ndarray
    slope: np.ndarray           # least-squares a with M[xi(t)] ~ a t
    mean_z: np.ndarray          # residual / standard error
    cov: np.ndarray             # (T, T, n) coordinate-wise covariances
    cov_slope: np.ndarray       # B with R(t, s) ~ B min(t, s)
    cov_z: np.ndarray
    increment_corr: float
    increment_band: float
    linear_mean: bool
    linear_cov: bool

    @property
    def nonlinear(self) -> bool:
        return not (self.linear_mean and self.linear_cov)


def _frac_vector(x: PVector) -> np.ndarray:
    return np.array([float(frac_part(c)) for c in x.coords])


def bracket_moments(path_sampler: Callable, times: Sequence[float], n: int, rng, z_limit: float = 4.0) -> MomentReport:
    """Mean and covariance of the coordinate-wise fractional part along sampled paths.

    ``path_sampler(gen)`` returns a :class:`SamplePath`. The report fits
    ``a t`` to the mean and ``B min(t, s)`` to the covariance and flags any
    residual beyond ``z_limit`` standard errors instead of forcing a fit.
    """
    gen = _gen(rng)
    times = np.asarray(times, dtype=float)
    paths = [path_sampler(gen) for _ in range(n)]
    data = np.array([[_frac_vector(pth.value_at(s)) for s in times] for pth in paths])  # (n, T, d)
    mean = data.mean(axis=0)
    se = data.std(axis=0, ddof=1) / math.sqrt(n)
    tt = times[:, None]
    slope = (tt * mean).sum(axis=0) / (tt ** 2).sum()
    resid = mean - slope * tt
    mean_z = np.divide(np.abs(resid), se, out=np.zeros_like(resid), where=se > 0)
    mean_z[(se == 0) & (np.abs(resid) > 1e-15)] = np.inf
    centered = data - mean
    T = len(times)
    cov = np.einsum("itd,isd->tsd", centered, centered) / (n - 1)
    prod = centered[:, :, None, :] * centered[:, None, :, :]
    cov_se = prod.std(axis=0, ddof=1) / math.sqrt(n)
    mins = np.minimum.outer(times, times)[:, :, None]
    cov_slope = (mins * cov).sum(axis=(0, 1)) / (mins ** 2).sum()
    cres = cov - cov_slope * mins
    cov_z = np.divide(np.abs(cres), cov_se, out=np.zeros_like(cres), where=cov_se > 0)
    cov_z[(cov_se == 0) & (np.abs(cres) > 1e-15)] = np.inf
    inc_corr = 0.0
    if T >= 2:
        first = data[:, 0, :]
        later = np.array([_frac_vector(pth.value_at(times[1]) - pth.value_at(times[0])) for pth in paths])
        a = first - first.mean(axis=0)
        b = later - later.mean(axis=0)
        denom = np.sqrt((a ** 2).sum(axis=0) * (b ** 2).sum(axis=0))
        corr = np.divide((a * b).sum(axis=0), denom, out=np.zeros(a.shape[1]), where=denom > 0)
        inc_corr = float(np.max(np.abs(corr)))
    return MomentReport(times, mean, se, slope, mean_z, cov, cov_slope, cov_z, inc_corr,
                        z_limit / math.sqrt(n), bool(np.all(mean_z <= z_limit)), bool(np.all(cov_z <= z_limit)))


# -- uniqueness ------------------------------------------------------------------------

def lattice_points(spec: FieldSpec, low: int, high: int, n: int = 1) -> list:
    """All points whose coordinates have digits only at exponents ``low .. high``."""
    span = high - low + 1
    elems = [PElement(spec, low, ds) for ds in itertools.product(range(spec.p), repeat=span)]
    return [PVector(c) for c in itertools.product(elems, repeat=n)]


def random_atomic_measure(spec: FieldSpec, rng, m: int, n_atoms: int, n: int = 1) -> StepMeasure:
    """Probability measure on points with digits at exponents ``-m .. m-1`` (resolution ``p^-m``)."""
    gen = _gen(rng)
    p = spec.p
    width = 2 * m * n
    if n_atoms > p ** width:
        raise InvalidParams("more atoms requested than lattice points")
    atoms = []
    masses = gen.dirichlet(np.ones(n_atoms))
    # distinct locations, so the law really has n_atoms atoms
    for code, mass in zip(gen.choice(p ** width, size=n_atoms, replace=False), masses):
        digits = [(int(code) // p ** i) % p for i in range(width)]
        coords = [PElement(spec, -m, digits[2 * m * j:2 * m * (j + 1)]) for j in range(n)]
        atoms.append(Atom(PVector(coords), float(mass)))
    return StepMeasure(atoms)


def same_atomic_measure(P: StepMeasure, Q: StepMeasure, tol: float = 0.0) -> bool:
    a = {x.point.key(): x.mass for x in P.normalized().atoms}
    b = {x.point.key(): x.mass for x in Q.normalized().atoms}
    keys = set(a) | set(b)
    return all(abs(a.get(k, 0.0) - b.get(k, 0.0)) <= tol for k in keys)


def cf_difference_witness(P: StepMeasure, Q: StepMeasure, grid: Sequence[PVector]) -> tuple:
    """Largest ``|P_hat(s) - Q_hat(s)|`` over ``grid`` and the ``s`` attaining it."""
    best, arg = -1.0, None
    for s in grid:
        d = abs(charfn_of_measure(P, s) - charfn_of_measure(Q, s))
        if d > best:
            best, arg = d, s
    return best, arg


def dual_grid(spec: FieldSpec, m: int, n: int = 1) -> list:
    """Characters separating points with digits at ``-m .. m-1``: exponents ``-m .. m-1``, so ``|s| <= p^m``."""
    return lattice_points(spec, -m, m - 1, n)

