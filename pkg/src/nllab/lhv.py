"""Quantum versus local deterministic correlations for two spins.

The quantum singlet correlation is -a.b. A local hidden-variable model
answers with a deterministic sign A(lam, a) per particle, the second
particle forced to the negation so equal settings anticorrelate exactly,
averaged over a hidden parameter lam. The three-direction inequality
|P(a,b) - P(a,c)| <= 1 + P(b,c) holds for every such model and fails for
the quantum correlation; this module computes both sides and searches
for the maximal failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._rng import make_rng
from .linalg import DimMismatchError, LinalgError, StateVector, as_complex_matrix, tensor
from .spin import Direction

ANALYTIC_TOL = 1e-12
SIGMA_FACTOR = 4.0
DEFAULT_SAMPLES = 100_000


class NonrealExpectationError(LinalgError):
    """An expectation value that should be real has a large imaginary part."""


def quantum_correlation(s: StateVector, a1, a2) -> float:
    """<psi| a1 (x) a2 |psi> for a two-subsystem state, as a real number."""
    if len(s.dims) != 2:
        raise DimMismatchError(f"need a two-subsystem state, got dims {s.dims}")
    a1 = as_complex_matrix(a1)
    a2 = as_complex_matrix(a2)
    if a1.shape != (s.dims[0], s.dims[0]) or a2.shape != (s.dims[1], s.dims[1]):
        raise DimMismatchError(
            f"operator shapes {a1.shape}, {a2.shape} vs state dims {s.dims}"
        )
    val = s.expectation(tensor(a1, a2))
    if abs(val.imag) > 1e-10:
        raise NonrealExpectationError(f"imaginary part {val.imag:.3e} exceeds 1e-10")
    return float(val.real)


@dataclass(frozen=True)
class CorrelationEstimate:
    estimate: float
    stderr: float
    samples: int


@dataclass(frozen=True)
class LHVStrategy:
    """Deterministic response A(lam, d) in {-1, +1} for particle 1.

    Particle 2 always responds with -A(lam, d), which enforces exact
    anticorrelation at equal settings. ``respond_many`` is an optional
    vectorized form taking an (n, 3) block of lam values.
    """

    name: str
    respond: Callable[[np.ndarray, Direction], int]
    respond_many: Callable[[np.ndarray, Direction], np.ndarray] | None = None

    def responses(self, lams: np.ndarray, d: Direction) -> np.ndarray:
        if self.respond_many is not None:
            out = np.asarray(self.respond_many(lams, d), dtype=float)
        else:
            out = np.array([float(self.respond(lam, d)) for lam in lams])
        if not np.all(np.abs(out) == 1.0):
            raise ValueError(f"strategy {self.name!r} returned values outside {{-1,+1}}")
        return out


def sign_strategy() -> LHVStrategy:
    """A(lam, d) = sign(lam . d), ties broken to +1."""

    def one(lam: np.ndarray, d: Direction) -> int:
        return 1 if float(np.dot(lam, d.unit)) >= 0.0 else -1

    def many(lams: np.ndarray, d: Direction) -> np.ndarray:
        return np.where(lams @ d.unit >= 0.0, 1.0, -1.0)

    return LHVStrategy("sign", one, many)


def constant_strategy(value: int = 1) -> LHVStrategy:
    if value not in (-1, 1):
        raise ValueError("constant strategy value must be -1 or +1")

    def one(lam: np.ndarray, d: Direction) -> int:
        return value

    def many(lams: np.ndarray, d: Direction) -> np.ndarray:
        return np.full(len(lams), float(value))

    return LHVStrategy("const", one, many)


@dataclass(frozen=True)
class LambdaDistribution:
    """Source of hidden-parameter samples; rows are unit 3-vectors."""

    name: str
    sample: Callable[[np.random.Generator, int], np.ndarray]


def uniform_sphere() -> LambdaDistribution:
    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        v = rng.standard_normal((n, 3))
        norms = np.linalg.norm(v, axis=1)
        # Zero-norm rows have probability 0; nudge any that appear.
        norms[norms == 0.0] = 1.0
        return v / norms[:, None]

    return LambdaDistribution("uniform-sphere", sample)


def lhv_correlation(
    strategy: LHVStrategy,
    dist: LambdaDistribution,
    a: Direction,
    b: Direction,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    stream: int = 0,
) -> CorrelationEstimate:
    """Monte Carlo mean of A(lam, a) * B(lam, b) with B = -A."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = make_rng(seed, stream)
    lams = dist.sample(rng, samples)
    products = -strategy.responses(lams, a) * strategy.responses(lams, b)
    est = float(np.mean(products))
    if samples > 1:
        stderr = float(np.std(products, ddof=1) / math.sqrt(samples))
    else:
        stderr = 0.0
    return CorrelationEstimate(est, stderr, samples)


def sign_model_correlation(a: Direction, b: Direction) -> float:
    """Closed form of the sign model's correlation: 2*angle(a,b)/pi - 1."""
    return 2.0 * a.angle_to(b) / math.pi - 1.0


@dataclass(frozen=True)
class BellResult:
    lhs: float
    rhs: float
    margin: float
    violated: bool
    lhs_stderr: float = 0.0
    rhs_stderr: float = 0.0
    margin_stderr: float = 0.0


def _value_and_stderr(p_out) -> tuple[float, float]:
    if isinstance(p_out, CorrelationEstimate):
        return p_out.estimate, p_out.stderr
    if isinstance(p_out, tuple):
        return float(p_out[0]), float(p_out[1])
    return float(p_out), 0.0


def bell_inequality(p, a: Direction, b: Direction, c: Direction) -> BellResult:
    """Evaluate |P(a,b) - P(a,c)| <= 1 + P(b,c) for a correlation function.

    ``p`` maps a pair of directions to a correlation, either a bare float
    (analytic) or an estimate with a standard error. Analytic inputs are
    flagged violated beyond 1e-12, sampled inputs beyond 4 standard errors.
    """
    p_ab, se_ab = _value_and_stderr(p(a, b))
    p_ac, se_ac = _value_and_stderr(p(a, c))
    p_bc, se_bc = _value_and_stderr(p(b, c))
    lhs = abs(p_ab - p_ac)
    rhs = 1.0 + p_bc
    margin = lhs - rhs
    lhs_se = math.hypot(se_ab, se_ac)
    margin_se = math.sqrt(se_ab**2 + se_ac**2 + se_bc**2)
    if margin_se > 0.0:
        violated = margin > SIGMA_FACTOR * margin_se
    else:
        violated = margin > ANALYTIC_TOL
    return BellResult(lhs, rhs, margin, violated, lhs_se, se_bc, margin_se)


def coplanar_direction(phi_deg: float) -> Direction:
    """Direction in the x-y plane at the given azimuth in degrees."""
    return Direction(math.pi / 2.0, math.radians(phi_deg))


def coplanar_pair_matrix(p, phis_deg: np.ndarray) -> np.ndarray:
    """Matrix P[i, j] of correlations between coplanar grid directions."""
    dirs = [coplanar_direction(phi) for phi in phis_deg]
    n = len(dirs)
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            val, _ = _value_and_stderr(p(dirs[i], dirs[j]))
            mat[i, j] = val
            mat[j, i] = val
    return mat


@dataclass(frozen=True)
class ScanRow:
    phi_a: float
    phi_b: float
    phi_c: float
    lhs: float
    rhs: float
    margin: float


@dataclass(frozen=True)
class ViolationSearch:
    a: Direction
    b: Direction
    c: Direction
    phi_a_deg: float
    phi_b_deg: float
    phi_c_deg: float
    lhs: float
    rhs: float
    margin: float
    grid_deg: float


def coplanar_scan(p, grid_deg: float) -> tuple[np.ndarray, list[ScanRow]]:
    """Grid of inequality evaluations over coplanar triples with phi_a = 0.

    The shipped correlations depend only on relative angles, so pinning
    the first direction loses nothing and keeps the scan two-dimensional.
    """
    if grid_deg <= 0:
        raise ValueError("grid step must be positive")
    phis = np.arange(0.0, 360.0, grid_deg)
    mat = coplanar_pair_matrix(p, phis)
    rows = []
    for i, phi_b in enumerate(phis):
        for j, phi_c in enumerate(phis):
            lhs = abs(mat[0, i] - mat[0, j])
            rhs = 1.0 + mat[i, j]
            rows.append(ScanRow(0.0, float(phi_b), float(phi_c), lhs, rhs, lhs - rhs))
    return phis, rows


def maximize_violation(p, grid_deg: float = 1.0, refine_levels: int = 3) -> ViolationSearch:
    """Best coplanar triple found by a coarse grid plus local refinement.

    Deterministic for a given grid resolution and refinement depth.
    """
    phis, rows = coplanar_scan(p, grid_deg)
    best = max(rows, key=lambda r: (r.margin, -r.phi_b, -r.phi_c))
    phi_b, phi_c = best.phi_b, best.phi_c
    lhs, rhs = best.lhs, best.rhs
    step = grid_deg
    for _ in range(max(0, refine_levels)):
        step /= 10.0
        cand_b = phi_b + step * np.arange(-10, 11)
        cand_c = phi_c + step * np.arange(-10, 11)
        best_local = None
        a_dir = coplanar_direction(0.0)
        for pb in cand_b:
            for pc in cand_c:
                b_dir = coplanar_direction(pb)
                c_dir = coplanar_direction(pc)
                p_ab, _ = _value_and_stderr(p(a_dir, b_dir))
                p_ac, _ = _value_and_stderr(p(a_dir, c_dir))
                p_bc, _ = _value_and_stderr(p(b_dir, c_dir))
                margin = abs(p_ab - p_ac) - 1.0 - p_bc
                key = (margin, -pb, -pc)
                if best_local is None or key > best_local[0]:
                    best_local = (key, pb, pc, abs(p_ab - p_ac), 1.0 + p_bc)
        _, phi_b, phi_c, lhs, rhs = best_local
    return ViolationSearch(
        a=coplanar_direction(0.0),
        b=coplanar_direction(phi_b),
        c=coplanar_direction(phi_c),
        phi_a_deg=0.0,
        phi_b_deg=float(phi_b),
        phi_c_deg=float(phi_c),
        lhs=float(lhs),
        rhs=float(rhs),
        margin=float(lhs - rhs),
        grid_deg=grid_deg,
    )


def singlet_correlation(a: Direction, b: Direction) -> float:
    """The quantum singlet prediction -a.b without building matrices."""
    return -a.dot(b)
