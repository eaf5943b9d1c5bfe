"""Value-map impossibility machinery.

Joint spectra of commuting operator sets and their polynomial
constraints, orthogonal-triad graphs on the sphere with exhaustive 0/1
coloring search, the two-spin parity contradiction, reconstruction of a
linear expectation functional as a trace against a density matrix, and
the classic counterexamples to linear value maps.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .linalg import (
    DEFAULT_ATOL,
    DimMismatchError,
    LinalgError,
    StateVector,
    commutator,
    dagger,
    hermitian_eig,
    max_abs,
    require_hermitian,
    tensor,
)
from .spin import SIGMA_X, SIGMA_Y

COMMUTE_ATOL = 1e-10
CLUSTER_TOL = 1e-8
CONSTRAINT_TOL = 1e-8
ORTHO_TOL = 1e-6

# Fixed weights for the simultaneous diagonalization; any generic choice
# works, a seeded one keeps runs identical.
_WEIGHT_SEED = 0x1D5EED


class NotCommutingError(LinalgError):
    """Operators handed in as a commuting set do not commute."""


class NonlinearFunctionalError(LinalgError):
    """A functional assumed linear fails the trace round-trip check."""


@dataclass(frozen=True)
class Constraint:
    """Polynomial relation f(values) == 0 satisfied by every joint eigenvalue."""

    fn: Callable[[Sequence[float]], float]
    description: str


@dataclass(frozen=True)
class DerivedOp:
    """Marks ops[index] as f(values at args), measurable by computing f."""

    index: int
    args: tuple[int, ...]
    fn: Callable[[Sequence[float]], float]


@dataclass(frozen=True)
class CommutingSet:
    ops: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    constraints: tuple[Constraint, ...] = ()
    derived: tuple[DerivedOp, ...] = ()

    def __post_init__(self):
        ops = tuple(require_hermitian(op) for op in self.ops)
        if not ops:
            raise ValueError("a commuting set needs at least one operator")
        dim = ops[0].shape[0]
        if any(op.shape != (dim, dim) for op in ops):
            raise DimMismatchError("all operators in a set must share one dimension")
        labels = tuple(self.labels) if self.labels else tuple(f"O{i}" for i in range(len(ops)))
        if len(labels) != len(ops):
            raise ValueError("labels and ops differ in length")
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                dev = max_abs(commutator(ops[i], ops[j]))
                if dev > COMMUTE_ATOL:
                    raise NotCommutingError(
                        f"[{labels[i]}, {labels[j]}] has max entry {dev:.3e}"
                    )
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "derived", tuple(self.derived))

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]


def _split_by_clusters(values: np.ndarray, tol: float) -> list[np.ndarray]:
    order = np.argsort(values, kind="stable")
    groups: list[list[int]] = [[int(order[0])]]
    for idx in order[1:]:
        if values[idx] - values[groups[-1][-1]] <= tol:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return [np.array(g) for g in groups]


def joint_eigenspaces(cs: CommutingSet, tol: float = CLUSTER_TOL) -> list[tuple[tuple[float, ...], np.ndarray]]:
    """Simultaneous eigenspaces: (value tuple, orthonormal basis columns).

    Diagonalizes a fixed random-weight combination of the operators, then
    re-splits each eigenvalue cluster operator by operator, so accidental
    weight collisions cannot merge distinct joint eigenvalues.
    """
    rng = np.random.default_rng(_WEIGHT_SEED)
    weights = rng.uniform(1.0, 2.0, size=len(cs.ops))
    combo = sum(w * op for w, op in zip(weights, cs.ops))
    w, v = hermitian_eig(combo)
    subspaces = [v[:, grp] for grp in _split_by_clusters(w, tol)]
    for op in cs.ops:
        refined = []
        for basis in subspaces:
            block = dagger(basis) @ op @ basis
            bw, bv = hermitian_eig((block + dagger(block)) / 2.0)
            rotated = basis @ bv
            refined.extend(rotated[:, grp] for grp in _split_by_clusters(bw, tol))
        subspaces = refined
    spaces = []
    for basis in subspaces:
        vals = tuple(
            float(np.real(np.trace(dagger(basis) @ op @ basis)) / basis.shape[1])
            for op in cs.ops
        )
        spaces.append((vals, basis))
    spaces = _snap_tuples(spaces, tol)
    spaces.sort(key=lambda item: item[0])
    merged: list[tuple[tuple[float, ...], np.ndarray]] = []
    for vals, basis in spaces:
        if merged and vals == merged[-1][0]:
            prev_vals, prev_basis = merged[-1]
            merged[-1] = (prev_vals, np.hstack([prev_basis, basis]))
        else:
            merged.append((vals, basis))
    return merged


def _snap_tuples(
    spaces: list[tuple[tuple[float, ...], np.ndarray]], tol: float
) -> list[tuple[tuple[float, ...], np.ndarray]]:
    """Replace each tuple component by its eigenvalue-cluster mean.

    Removes solver noise so that lexicographic sorting and multiplicity
    merging see exact ties.
    """
    if not spaces:
        return spaces
    n_ops = len(spaces[0][0])
    snapped_cols: list[list[float]] = []
    for i in range(n_ops):
        col = np.array([vals[i] for vals, _ in spaces])
        centers = [float(np.mean(col[grp])) for grp in _split_by_clusters(col, tol)]
        snapped_cols.append(
            [min(centers, key=lambda c: abs(c - x)) for x in col]
        )
    return [
        (tuple(snapped_cols[i][k] for i in range(n_ops)), spaces[k][1])
        for k in range(len(spaces))
    ]


def joint_spectrum(cs: CommutingSet, tol: float = CLUSTER_TOL) -> list[tuple[tuple[float, ...], int]]:
    """Sorted joint eigenvalues with their eigenspace dimensions."""
    return [(vals, basis.shape[1]) for vals, basis in joint_eigenspaces(cs, tol)]


def check_spectrum_constraints(cs: CommutingSet, tol: float = CONSTRAINT_TOL) -> bool:
    """True iff every joint-spectrum tuple satisfies every constraint."""
    for vals, _ in joint_spectrum(cs):
        for con in cs.constraints:
            if abs(float(con.fn(vals))) > tol:
                return False
    return True


def candidate_tuples(cs: CommutingSet, tol: float = CLUSTER_TOL) -> list[tuple[float, ...]]:
    """Cartesian product of the per-operator eigenvalue sets."""
    per_op: list[list[float]] = []
    for op in cs.ops:
        w, _ = hermitian_eig(op)
        vals: list[float] = []
        for x in w:
            if not vals or x - vals[-1] > tol:
                vals.append(float(x))
        per_op.append(vals)
    out: list[tuple[float, ...]] = [()]
    for vals in per_op:
        out = [prefix + (v,) for prefix in out for v in vals]
    return out


# ---------------------------------------------------------------------------
# Triad graphs and 0/1 colorings


@dataclass(frozen=True)
class TriadGraph:
    """Directions on the sphere with their orthogonality structure.

    Antipodal directions are identified (first nonzero coordinate made
    positive); ``triads`` lists mutually orthogonal triples, ``pairs``
    every orthogonal pair.
    """

    directions: np.ndarray
    triads: tuple[tuple[int, int, int], ...]
    pairs: tuple[tuple[int, int], ...]
    tol: float


def canonical_direction(v) -> np.ndarray:
    vec = np.asarray(v, dtype=float).reshape(3)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValueError("zero vector has no direction")
    vec = vec / norm
    for comp in vec:
        if abs(comp) > 1e-12:
            if comp < 0.0:
                vec = -vec
            break
    return vec


def build_triad_graph(directions: Sequence, tol: float = ORTHO_TOL) -> TriadGraph:
    if len(directions) == 0:
        raise ValueError("need at least one direction")
    canon: list[np.ndarray] = []
    for raw in directions:
        vec = canonical_direction(raw)
        if not any(abs(float(np.dot(vec, kept))) >= 1.0 - 1e-9 for kept in canon):
            canon.append(vec)
    dirs = np.array(canon)
    n = len(dirs)
    dots = dirs @ dirs.T
    pairs = tuple(
        (i, j) for i in range(n) for j in range(i + 1, n) if abs(dots[i, j]) <= tol
    )
    pair_set = set(pairs)
    triads = tuple(
        (i, j, k)
        for i, j in pairs
        for k in range(j + 1, n)
        if (i, k) in pair_set and (j, k) in pair_set
    )
    return TriadGraph(directions=dirs, triads=triads, pairs=pairs, tol=tol)


@dataclass(frozen=True)
class Coloring:
    """0/1 value per direction; valid means one 0 and two 1s per triad."""

    values: tuple[int, ...]


@dataclass(frozen=True)
class KSColoringResult:
    coloring: Coloring | None
    nodes: int

    @property
    def uncolorable(self) -> bool:
        return self.coloring is None


def verify_coloring(g: TriadGraph, c: Coloring) -> list[tuple[int, int, int]]:
    """Triads violating the one-0-two-1s rule; empty means valid."""
    if len(c.values) != len(g.directions):
        raise ValueError("coloring does not cover every direction")
    bad = []
    for tri in g.triads:
        zeros = sum(1 for i in tri if c.values[i] == 0)
        if zeros != 1:
            bad.append(tri)
    return bad


def _search(
    n: int,
    triads: Sequence[tuple[int, int, int]],
    pairs: Sequence[tuple[int, int]],
    assign: dict[int, int],
) -> tuple[tuple[int, ...] | None, int]:
    """Exhaustive backtracking under the triad and pair rules.

    Chooses the most-constrained unassigned direction first and tries 0
    before 1; returns (coloring, explored-node count).
    """
    triads_of = [[] for _ in range(n)]
    for tri in triads:
        for i in tri:
            triads_of[i].append(tri)
    pairs_of = [[] for _ in range(n)]
    for i, j in pairs:
        pairs_of[i].append(j)
        pairs_of[j].append(i)

    nodes = 0

    def consistent(idx: int, val: int, values: dict[int, int]) -> bool:
        if val == 0:
            for other in pairs_of[idx]:
                if values.get(other) == 0:
                    return False
        for tri in triads_of[idx]:
            got = [val if i == idx else values.get(i) for i in tri]
            if None in got:
                # Partial triad: more than one 0 can never be completed.
                if sum(1 for v in got if v == 0) > 1:
                    return False
                continue
            if sum(1 for v in got if v == 0) != 1:
                return False
        return True

    def pick(values: dict[int, int]) -> int | None:
        best_idx, best_score = None, -1
        for i in range(n):
            if i in values:
                continue
            score = sum(
                1 for tri in triads_of[i] if any(j in values for j in tri if j != i)
            ) + sum(1 for j in pairs_of[i] if j in values)
            if score > best_score:
                best_idx, best_score = i, score
        return best_idx

    def backtrack(values: dict[int, int]) -> tuple[int, ...] | None:
        nonlocal nodes
        idx = pick(values)
        if idx is None:
            return tuple(values[i] for i in range(n))
        for val in (0, 1):
            nodes += 1
            if consistent(idx, val, values):
                values[idx] = val
                found = backtrack(values)
                if found is not None:
                    return found
                del values[idx]
        return None

    seed = dict(assign)
    for idx, val in seed.items():
        probe = dict(seed)
        del probe[idx]
        if not consistent(idx, val, probe):
            return None, 0
    return backtrack(seed), nodes


def _search_task(args):
    n, triads, pairs, assign = args
    return _search(n, triads, pairs, assign)


def ks_color(g: TriadGraph, parallel: int | None = None) -> KSColoringResult:
    """Search for a valid 0/1 coloring of the graph.

    Returns the first coloring in the deterministic search order, or an
    exhausted-search certificate (node count) when none exists. With
    ``parallel`` workers the root of the tree is split into fixed
    prefixes; the lowest-indexed successful prefix wins, so the output
    matches the sequential order.
    """
    n = len(g.directions)
    if parallel is None or parallel <= 1 or n < 2:
        values, nodes = _search(n, g.triads, g.pairs, {})
        return KSColoringResult(Coloring(values) if values is not None else None, nodes)

    split_vars = min(max(1, int(math.ceil(math.log2(parallel)) + 1)), n)
    prefixes = []
    for mask in range(2 ** split_vars):
        prefixes.append({i: (mask >> (split_vars - 1 - i)) & 1 for i in range(split_vars)})
    tasks = [(n, g.triads, g.pairs, prefix) for prefix in prefixes]
    total_nodes = 0
    winner: tuple[int, ...] | None = None
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        for values, nodes in pool.map(_search_task, tasks):
            total_nodes += nodes
            if values is not None and winner is None:
                winner = values
    return KSColoringResult(Coloring(winner) if winner is not None else None, total_nodes)


def octant_value(v) -> int:
    """0 on the closed first octant above the equator and its antipode, else 1.

    The 0-region includes the pole and the bounding meridian arcs but not
    the equator, which stays 1.
    """
    x, y, z = canonical_direction(v)
    eps = 1e-12
    if z > eps and x >= -eps and y >= -eps:
        return 0
    if z < -eps and x <= eps and y <= eps:
        return 0
    return 1


def octant_coloring(g: TriadGraph) -> Coloring:
    return Coloring(tuple(octant_value(d) for d in g.directions))


def octant_counterexample_triple() -> list[np.ndarray]:
    """Mutually orthogonal triple that the octant scheme colors all 1.

    Stored in exact radical form; the pairwise dot products vanish
    identically, so any orthogonality tolerance accepts the triad.
    """
    r = math.sqrt(2.0)
    return [
        np.array([0.5, 0.5, -r / 2.0]),
        np.array([-(2.0 - r) / 4.0, (2.0 + r) / 4.0, 0.5]),
        np.array([(2.0 + r) / 4.0, -(2.0 - r) / 4.0, 0.5]),
    ]


def coordinate_axes() -> list[np.ndarray]:
    return [np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])]


def peres33_directions() -> list[np.ndarray]:
    """The 33-ray set shipped with the package, loaded from the data file."""
    text = resources.files("nllab.data").joinpath("peres33.txt").read_text(encoding="utf-8")
    return parse_directions(text)


def parse_directions(text: str) -> list[np.ndarray]:
    """Direction-set file format: three components per line, '#' comments."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected three components, got {len(parts)}")
        try:
            vec = np.array([float(x) for x in parts])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        if float(np.linalg.norm(vec)) == 0.0:
            raise ValueError(f"line {lineno}: zero vector")
        out.append(vec / np.linalg.norm(vec))
    if not out:
        raise ValueError("no directions found")
    return out


def load_directions(path) -> list[np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_directions(fh.read())


# ---------------------------------------------------------------------------
# The two-spin parity contradiction


def mermin_observables() -> dict[str, np.ndarray]:
    """The ten observables of the two-spin parity argument, as 4x4 matrices."""
    eye = np.eye(2, dtype=complex)
    s1x = tensor(SIGMA_X, eye)
    s1y = tensor(SIGMA_Y, eye)
    s2x = tensor(eye, SIGMA_X)
    s2y = tensor(eye, SIGMA_Y)
    a = s1x @ s2y
    b = s1y @ s2x
    x = s1x @ s2x
    y = s1y @ s2y
    return {
        "s1x": s1x,
        "s1y": s1y,
        "s2x": s2x,
        "s2y": s2y,
        "A": a,
        "B": b,
        "X": x,
        "Y": y,
        "C": a @ b,
        "Z": x @ y,
    }


@dataclass(frozen=True)
class MerminAssignment:
    s1x: int
    s1y: int
    s2x: int
    s2y: int
    a: int
    b: int
    x: int
    y: int
    c: int
    z: int
    cz: int


@dataclass(frozen=True)
class MerminReport:
    assignments: tuple[MerminAssignment, ...]
    operator_product: np.ndarray
    operator_deviation: float

    @property
    def cz_values(self) -> tuple[int, ...]:
        return tuple(row.cz for row in self.assignments)

    @property
    def assignments_all_plus_one(self) -> bool:
        return all(cz == 1 for cz in self.cz_values)

    @property
    def operator_is_minus_identity(self) -> bool:
        return self.operator_deviation <= 1e-12


def mermin_check() -> MerminReport:
    """All 16 sign assignments give CZ = +1; the operator product is -I.

    The gap between the two is an exact integer: no assignment of values
    can track the operator identity.
    """
    rows = []
    for s1x in (1, -1):
        for s1y in (1, -1):
            for s2x in (1, -1):
                for s2y in (1, -1):
                    a = s1x * s2y
                    b = s1y * s2x
                    x = s1x * s2x
                    y = s1y * s2y
                    c = a * b
                    z = x * y
                    rows.append(
                        MerminAssignment(s1x, s1y, s2x, s2y, a, b, x, y, c, z, c * z)
                    )
    obs = mermin_observables()
    product = (
        obs["s1x"] @ obs["s2y"] @ obs["s1y"] @ obs["s2x"]
        @ obs["s1x"] @ obs["s2x"] @ obs["s1y"] @ obs["s2y"]
    )
    deviation = max_abs(product + np.eye(4))
    return MerminReport(tuple(rows), product, float(deviation))


def _product(vals: Sequence[float]) -> float:
    out = 1.0
    for v in vals:
        out *= v
    return out


def commuting_sets_mermin() -> tuple[CommutingSet, ...]:
    """The seven commuting sets of the parity argument with their relations."""
    obs = mermin_observables()

    def product_set(derived_label: str, l1: str, l2: str) -> CommutingSet:
        return CommutingSet(
            ops=(obs[derived_label], obs[l1], obs[l2]),
            labels=(derived_label, l1, l2),
            constraints=(
                Constraint(lambda v: v[0] - v[1] * v[2], f"{derived_label} = {l1}*{l2}"),
            ),
            derived=(DerivedOp(0, (1, 2), _product),),
        )

    cz_set = CommutingSet(
        ops=(obs["C"], obs["Z"]),
        labels=("C", "Z"),
        constraints=(Constraint(lambda v: v[0] * v[1] + 1.0, "C*Z = -1"),),
    )
    return (
        product_set("A", "s1x", "s2y"),
        product_set("B", "s1y", "s2x"),
        product_set("X", "s1x", "s2x"),
        product_set("Y", "s1y", "s2y"),
        product_set("C", "A", "B"),
        product_set("Z", "X", "Y"),
        cz_set,
    )


# ---------------------------------------------------------------------------
# Expectation-functional reconstruction and linearity counterexamples


def matrix_unit(dim: int, m: int, n: int) -> np.ndarray:
    unit = np.zeros((dim, dim), dtype=complex)
    unit[m, n] = 1.0
    return unit


@dataclass(frozen=True)
class VNReport:
    u: np.ndarray
    roundtrip_error: float
    trace: complex
    trace_expected: bool | None
    nonneg_on_projections: bool
    min_quadratic_form: float


def pure_state_functional(psi: StateVector) -> Callable[[np.ndarray], complex]:
    def e(op: np.ndarray) -> complex:
        return complex(np.vdot(psi.amps, np.asarray(op, dtype=complex) @ psi.amps))

    return e


def mixed_state_functional(dim: int) -> Callable[[np.ndarray], complex]:
    def e(op: np.ndarray) -> complex:
        return complex(np.trace(np.asarray(op, dtype=complex))) / dim

    return e


def vn_reconstruct(
    e: Callable[[np.ndarray], complex],
    dim: int,
    rng: np.random.Generator | None = None,
    checks: int = 20,
) -> VNReport:
    """Rebuild the density matrix behind a complex-linear functional.

    U[n, m] = e(|m><n|) makes e(O) = Tr(U O) for every O; the round trip
    is verified on random operators and the trace/positivity contracts
    are reported when the functional advertises them.
    """
    if rng is None:
        rng = np.random.default_rng(7)
    u = np.zeros((dim, dim), dtype=complex)
    for m in range(dim):
        for n in range(dim):
            u[n, m] = complex(e(matrix_unit(dim, m, n)))
    worst = 0.0
    for _ in range(checks):
        op = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        worst = max(worst, abs(complex(e(op)) - complex(np.trace(u @ op))))
    if worst > DEFAULT_ATOL:
        raise NonlinearFunctionalError(
            f"functional fails the trace round trip by {worst:.3e}"
        )
    trace = complex(np.trace(u))
    e_identity = complex(e(np.eye(dim, dtype=complex)))
    trace_expected: bool | None = None
    if abs(e_identity - 1.0) <= DEFAULT_ATOL:
        trace_expected = abs(trace - 1.0) <= DEFAULT_ATOL
    nonneg = True
    for _ in range(checks):
        chi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        chi /= np.linalg.norm(chi)
        val = complex(e(np.outer(chi, np.conj(chi))))
        if val.real < -DEFAULT_ATOL or abs(val.imag) > DEFAULT_ATOL:
            nonneg = False
            break
    hermitian_part = (u + dagger(u)) / 2.0
    w, _ = hermitian_eig(hermitian_part)
    return VNReport(
        u=u,
        roundtrip_error=float(worst),
        trace=trace,
        trace_expected=trace_expected,
        nonneg_on_projections=nonneg,
        min_quadratic_form=float(w[0]),
    )


@dataclass(frozen=True)
class SpinLinearityCase:
    v_x: int
    v_y: int
    needed: float
    satisfiable: bool


@dataclass(frozen=True)
class LinearityReport:
    spin_cases: tuple[SpinLinearityCase, ...]
    spin_satisfying: int
    oscillator_samples: int
    oscillator_odd_hits: int
    spectrum_multipliers: tuple[int, ...]

    @property
    def spin_impossible(self) -> bool:
        return self.spin_satisfying == 0


def oscillator_spectrum(a: float, hbar: float = 1.0, terms: int = 6) -> list[float]:
    """Energies of p^2 + a^2 q^2: a*hbar times the odd integers."""
    return [a * hbar * (2 * k + 1) for k in range(terms)]


def linearity_counterexamples(
    samples: int = 200, hbar: float = 1.0, rng: np.random.Generator | None = None
) -> LinearityReport:
    """Two classic failures of linear value maps.

    Spin: no +-1 assignment v satisfies v((sx+sy)/sqrt2) = (v(sx)+v(sy))/sqrt2,
    exhaustively over the four sign pairs. Oscillator: for sampled a > 0 and
    nonnegative values assigned to p^2 and q^2, the combination
    (v(p^2) + a^2 v(q^2))/(a hbar) is an odd integer only on a measure-zero
    set, yet the spectrum of p^2 + a^2 q^2 is exactly the odd multiples.
    """
    if rng is None:
        rng = np.random.default_rng(11)
    root2 = math.sqrt(2.0)
    cases = []
    for vx in (1, -1):
        for vy in (1, -1):
            needed = (vx + vy) / root2
            cases.append(
                SpinLinearityCase(vx, vy, needed, min(abs(needed - 1), abs(needed + 1)) <= 1e-12)
            )
    satisfying = sum(1 for c in cases if c.satisfiable)
    hits = 0
    for _ in range(samples):
        a = float(rng.uniform(0.1, 10.0))
        v_p2 = float(rng.uniform(0.0, 10.0))
        v_q2 = float(rng.uniform(0.0, 10.0))
        ratio = (v_p2 + a * a * v_q2) / (a * hbar)
        nearest_odd = 2.0 * round((ratio - 1.0) / 2.0) + 1.0
        if abs(ratio - nearest_odd) <= 1e-9:
            hits += 1
    return LinearityReport(
        spin_cases=tuple(cases),
        spin_satisfying=satisfying,
        oscillator_samples=samples,
        oscillator_odd_hits=hits,
        spectrum_multipliers=(1, 3, 5, 7, 9, 11),
    )
