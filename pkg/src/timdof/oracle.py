"""Brute-force checks of the aligned-image-set converse machinery at block length 1.

An instance has ``m`` alignment sets arranged in a cycle. Set ``i`` owns two
codeword symbols ``a_i`` (entry message) and ``b_i`` (far end of its alignment
path). The alignment forms are ``floor(g0_i a_i) + floor(g1_i b_i)`` with
bounded-density ``g``; the conflict forms are
``floor(h_exit_i u_i) + floor(h_entry_i a_{i+1})`` with arbitrary constants
``h``, where ``u_i = a_i`` when the set is entered and exited at the same
message and ``u_i = b_i`` otherwise.

Codewords are fixed functions of the conflict outputs: by default each output
value maps to its lexicographically smallest preimage.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .cycles import CompletedCycle
from .simulator import ChannelModel

MAX_ENUMERATION = 5_000_000


class InstanceTooLarge(ValueError):
    pass


class NotADistribution(ValueError):
    pass


def eval_floor_form(coeffs: Sequence[float], symbols: Sequence[int]) -> int:
    """sum_i floor(c_i * x_i)."""
    if len(coeffs) != len(symbols):
        raise ValueError(f"arity mismatch: {len(coeffs)} coefficients, {len(symbols)} symbols")
    return kernels.floor_sum(coeffs, symbols)


@dataclass(frozen=True)
class AisInstance:
    m: int
    pbar: int
    h_exit: tuple[float, ...]
    h_entry: tuple[float, ...]
    same: tuple[bool, ...] = ()
    model: ChannelModel = field(default_factory=ChannelModel)

    def __post_init__(self):
        if self.m < 3 or self.m % 2 == 0:
            raise ValueError("m must be odd and at least 3")
        if self.pbar < 0:
            raise ValueError("pbar must be non-negative")
        if not self.same:
            object.__setattr__(self, "same", (False,) * self.m)
        if not (len(self.h_exit) == len(self.h_entry) == len(self.same) == self.m):
            raise ValueError("per-set parameters must have length m")
        if max(map(abs, self.h_exit + self.h_entry)) > self.model.delta2:
            raise ValueError("arbitrary coefficients must be bounded by delta2")

    @classmethod
    def random(cls, m: int, pbar: int, rng: np.random.Generator, model: ChannelModel | None = None,
               same: Sequence[bool] = ()) -> AisInstance:
        model = model or ChannelModel()
        h = rng.uniform(model.delta1, model.delta2, size=(2, m))
        return cls(m, pbar, tuple(map(float, h[0])), tuple(map(float, h[1])), tuple(same), model)

    @classmethod
    def from_cycle(cls, cycle: CompletedCycle, pbar: int, rng: np.random.Generator,
                   model: ChannelModel | None = None) -> AisInstance:
        same = tuple(not p for p in cycle.internal_paths)
        return cls.random(cycle.params.m, pbar, rng, model, same)

    @property
    def pbar_hat(self) -> int:
        return 3 + math.floor(2 * self.model.delta2 * self.pbar)

    def enumeration_size(self) -> int:
        free_dims = self.m + sum(1 for s in self.same if not s)
        return (self.pbar + 1) ** free_dims


@dataclass
class Support:
    """Conflict-output support with the chosen codeword for each value."""

    z: np.ndarray  # (N, m) conflict outputs, sorted lexicographically
    a: np.ndarray  # (N, m) entry symbols
    b: np.ndarray  # (N, m) far-end symbols
    counts: np.ndarray  # (N,) number of codewords mapping to each output

    def index(self, value: Sequence[int]) -> int:
        hit = np.flatnonzero(np.all(self.z == np.asarray(value), axis=1))
        if not hit.size:
            raise KeyError(f"{tuple(value)} is not in the support")
        return int(hit[0])

    def __len__(self):
        return len(self.z)


def _floor_mul(coef, x) -> np.ndarray:
    return np.floor(np.asarray(x, dtype=np.float64) * coef).astype(np.int64)


def conflict_outputs(inst: AisInstance, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    u = np.where(np.asarray(inst.same), a, b)
    a_next = np.roll(a, -1, axis=-1)
    return _floor_mul(np.asarray(inst.h_exit), u) + _floor_mul(np.asarray(inst.h_entry), a_next)


def alignment_outputs(a: np.ndarray, b: np.ndarray, g0: np.ndarray, g1: np.ndarray) -> np.ndarray:
    return _floor_mul(g0, a) + _floor_mul(g1, b)


def _row_keys(z: np.ndarray) -> np.ndarray:
    # mixed-radix scalar key; ascending keys give lexicographic row order
    lo = z.min(axis=0)
    width = z.max(axis=0) - lo + 1
    keys = np.zeros(len(z), dtype=np.int64)
    for i in range(z.shape[1]):
        keys = keys * width[i] + (z[:, i] - lo[i])
    return keys


def build_support(inst: AisInstance, psi: Mapping[tuple, tuple] | None = None) -> Support:
    """Enumerate every codeword, group by conflict output, keep one preimage per output.

    ``psi`` optionally overrides the preimage for some outputs with
    ``(a_1..a_m, b_1..b_m)`` tuples; each must be a true preimage.
    """
    size = inst.enumeration_size()
    if size > MAX_ENUMERATION:
        raise InstanceTooLarge(f"{size} codewords exceed the enumeration limit {MAX_ENUMERATION}")
    m, q = inst.m, inst.pbar + 1
    free_b = [i for i in range(m) if not inst.same[i]]
    dims = m + len(free_b)
    grid = np.indices((q,) * dims, dtype=np.int64).reshape(dims, -1).T  # lexicographic order
    a = grid[:, :m]
    b = np.zeros_like(a)
    b[:, free_b] = grid[:, m:]
    z = conflict_outputs(inst, a, b)
    keys = _row_keys(z)
    _, first, counts = np.unique(keys, return_index=True, return_counts=True)
    sup = Support(z[first], a[first].copy(), b[first].copy(), counts)
    for value, word in (psi or {}).items():
        i = sup.index(value)
        wa, wb = np.asarray(word[:m]), np.asarray(word[m:])
        if not np.array_equal(conflict_outputs(inst, wa, wb), np.asarray(value)):
            raise ValueError(f"codeword {word} does not produce {value}")
        sup.a[i], sup.b[i] = wa, wb
    return sup


def draw_alignment_coefficients(inst: AisInstance, rng: np.random.Generator, samples: int | None = None):
    shape = (2, inst.m) if samples is None else (samples, 2, inst.m)
    g = inst.model.sample(rng, shape)
    return (g[0], g[1]) if samples is None else (g[:, 0], g[:, 1])


def aligned_image_set(inst: AisInstance, nu: Sequence[int], g0, g1, support: Support | None = None) -> set[tuple]:
    """All conflict outputs whose codewords give the same alignment outputs as ``nu``."""
    sup = support or build_support(inst)
    zc = alignment_outputs(sup.a, sup.b, np.asarray(g0), np.asarray(g1))
    ref = zc[sup.index(nu)]
    return {tuple(int(v) for v in row) for row in sup.z[np.all(zc == ref, axis=1)]}


@dataclass(frozen=True)
class IntervalCheck:
    a: int
    a_prime: int
    extent: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.extent <= self.bound


def check_alignment_interval(a: int, a_prime: int, partner_difference: int | None = None,
                             model: ChannelModel | None = None, step: float = 1e-6) -> IntervalCheck:
    """Scan g over [delta1, delta2] and measure where floor(g a) - floor(g a') equals the partner term.

    ``partner_difference`` is floor(g' b') - floor(g' b) for the fixed partner
    coefficient; ``None`` takes the widest region over every attainable value.
    """
    if a == a_prime:
        raise ValueError("a and a' must differ")
    model = model or ChannelModel()
    n = max(1, math.ceil((model.delta2 - model.delta1) / step))
    values, lo, hi = kernels.alignment_extents(a, a_prime, model.delta1, (model.delta2 - model.delta1) / n, n)
    widths = hi - lo
    if partner_difference is None:
        extent = float(widths.max())
    else:
        hit = np.flatnonzero(values == partner_difference)
        extent = float(widths[hit[0]]) if hit.size else 0.0
    return IntervalCheck(a, a_prime, extent, 4 / abs(a - a_prime))


def _power_term(inst: AisInstance) -> float:
    # the chain bounds (m-1)/2 pair terms by pbar; a zero alphabet still has B+ = 1
    return max(inst.pbar, 1) ** ((inst.m - 1) / 2) * (8 * inst.model.delta2 * inst.model.f_max) ** inst.m


def alignment_probability_bound(inst: AisInstance, lam: Sequence[int], nu: Sequence[int]) -> float:
    bound = _power_term(inst)
    for x, y in zip(lam, nu):
        d = abs(int(x) - int(y))
        if d > 2:
            bound /= d - 2
    return bound


def expected_size_bound(inst: AisInstance) -> float:
    return _power_term(inst) * (7 + 2 * math.log(inst.pbar_hat)) ** inst.m


@dataclass(frozen=True)
class ProbabilityEstimate:
    estimate: float
    stderr: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.estimate <= self.bound + 3 * self.stderr


def estimate_alignment_probability(inst: AisInstance, nu, lam, samples: int, seed: int,
                                   support: Support | None = None) -> ProbabilityEstimate:
    sup = support or build_support(inst)
    i_nu, i_lam = sup.index(nu), sup.index(lam)
    rng = np.random.default_rng(seed)
    g0, g1 = draw_alignment_coefficients(inst, rng, samples)
    z_nu = alignment_outputs(sup.a[i_nu], sup.b[i_nu], g0, g1)
    z_lam = alignment_outputs(sup.a[i_lam], sup.b[i_lam], g0, g1)
    hits = np.all(z_nu == z_lam, axis=1).astype(float)
    p = float(hits.mean())
    se = math.sqrt(p * (1 - p) / samples)
    return ProbabilityEstimate(p, se, alignment_probability_bound(inst, lam, nu))


@dataclass(frozen=True)
class ImageSetResult:
    nu: tuple[int, ...]
    samples: int
    sizes: tuple[int, ...]
    mean: float
    stderr: float
    bound: float

    @property
    def ok(self) -> bool:
        return min(self.sizes) >= 1 and self.mean <= self.bound + 3 * self.stderr


def expected_image_size_check(inst: AisInstance, nu, samples: int, seed: int,
                              support: Support | None = None, threads: int = 1) -> ImageSetResult:
    sup = support or build_support(inst)
    ref = sup.index(nu)

    def one(s: int) -> int:
        g0, g1 = draw_alignment_coefficients(inst, np.random.default_rng([seed, s]))
        return kernels.image_set_size(sup.a, sup.b, g0, g1, ref)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sizes = list(pool.map(one, range(samples)))
    else:
        sizes = [one(s) for s in range(samples)]
    arr = np.asarray(sizes, dtype=float)
    se = float(arr.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return ImageSetResult(tuple(int(v) for v in sup.z[ref]), samples, tuple(sizes), float(arr.mean()), se,
                          expected_size_bound(inst))


def worst_expected_image_size(inst: AisInstance, samples: int, seed: int,
                              support: Support | None = None) -> ImageSetResult:
    """Maximise the sampled mean image-set size over every anchor in the support."""
    sup = support or build_support(inst)
    results = [expected_image_size_check(inst, sup.z[i], samples, seed, sup) for i in range(len(sup))]
    return max(results, key=lambda r: r.mean)


@dataclass(frozen=True)
class EntropyGapReport:
    h_conflict: float  # nats
    h_alignment_given_g: float  # nats
    reference: float  # (m-1)/2 ln pbar

    @property
    def gap(self) -> float:
        return self.h_conflict - self.h_alignment_given_g


def entropy_gap_report(inst: AisInstance, samples: int, seed: int, support: Support | None = None) -> EntropyGapReport:
    """Uniform independent codewords; conditional entropy averaged over sampled g."""
    sup = support or build_support(inst)
    pz = sup.counts / sup.counts.sum()
    h_x = float(-(pz * np.log(pz)).sum())
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(samples):
        g0, g1 = draw_alignment_coefficients(inst, rng)
        zc = alignment_outputs(sup.a, sup.b, g0, g1)
        _, inverse = np.unique(zc, axis=0, return_inverse=True)
        pc = np.bincount(inverse.ravel(), weights=pz)
        pc = pc[pc > 0]
        total += float(-(pc * np.log(pc)).sum())
    ref = (inst.m - 1) / 2 * math.log(inst.pbar) if inst.pbar > 0 else 0.0
    return EntropyGapReport(h_x, total / samples, ref)


# entropy and submodularity ------------------------------------------------

def _as_distribution(d) -> dict:
    if isinstance(d, Mapping):
        dist = {k: float(v) for k, v in d.items()}
    else:
        values, probs = d
        dist = {}
        for v, p in zip(values, probs):
            dist[v] = dist.get(v, 0.0) + float(p)
    probs = np.fromiter(dist.values(), dtype=float)
    if (probs < -1e-12).any() or abs(probs.sum() - 1) > 1e-9:
        raise NotADistribution("probabilities must be non-negative and sum to 1")
    return dist


def entropy_bits(dist) -> float:
    p = np.fromiter(_as_distribution(dist).values(), dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _marginal(joint: Mapping, key) -> dict:
    out: dict = {}
    for u, p in joint.items():
        k = key(u)
        out[k] = out.get(k, 0.0) + p
    return out


def product_joint(d1, d2, d3) -> dict:
    d1, d2, d3 = (_as_distribution(d) for d in (d1, d2, d3))
    return {(x, y, z): p * q * r for x, p in d1.items() for y, q in d2.items() for z, r in d3.items()}


@dataclass(frozen=True)
class SubmodularityResult:
    joint_lhs: float
    joint_rhs: float
    independent_lhs: float | None
    independent_rhs: float | None
    tol: float = 1e-9

    @property
    def joint_ok(self) -> bool:
        return self.joint_lhs <= self.joint_rhs + self.tol

    @property
    def independent_ok(self) -> bool:
        return self.independent_lhs is None or self.independent_lhs <= self.independent_rhs + self.tol

    def __bool__(self):
        return self.joint_ok and self.independent_ok


def check_submodularity(d1=None, d2=None, d3=None, joint: Mapping | None = None,
                        tol: float = 1e-9) -> SubmodularityResult:
    """Check both sum-form entropy inequalities (in bits).

    H(U1,U2,U3) + H(U1+U2+U3) <= H(U1+U2,U3) + H(U1,U2+U3) on ``joint`` (or the
    product of the marginals), and, when marginals are given,
    H(U2) + H(U1+U2+U3) <= H(U1+U2) + H(U2+U3) for independent U1, U2, U3.
    """
    if joint is None:
        if d1 is None or d2 is None or d3 is None:
            raise ValueError("need either a joint distribution or three marginals")
        joint = product_joint(d1, d2, d3)
    joint = _as_distribution(joint)
    lhs = entropy_bits(joint) + entropy_bits(_marginal(joint, lambda u: u[0] + u[1] + u[2]))
    rhs = (entropy_bits(_marginal(joint, lambda u: (u[0] + u[1], u[2])))
           + entropy_bits(_marginal(joint, lambda u: (u[0], u[1] + u[2]))))
    ind_lhs = ind_rhs = None
    if d1 is not None and d2 is not None and d3 is not None:
        ind = product_joint(d1, d2, d3)
        ind_lhs = entropy_bits(_as_distribution(d2)) + entropy_bits(_marginal(ind, lambda u: u[0] + u[1] + u[2]))
        ind_rhs = (entropy_bits(_marginal(ind, lambda u: u[0] + u[1]))
                   + entropy_bits(_marginal(ind, lambda u: u[1] + u[2])))
    return SubmodularityResult(lhs, rhs, ind_lhs, ind_rhs, tol)


def random_distribution(rng: np.random.Generator, max_support: int = 6) -> dict:
    n = int(rng.integers(1, max_support + 1))
    values = rng.choice(np.arange(-10, 11), size=n, replace=False)
    p = rng.dirichlet(np.ones(n))
    return {int(v): float(x) for v, x in zip(values, p / p.sum())}
