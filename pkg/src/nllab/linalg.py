"""Dense complex linear algebra for small operator problems.

Everything works on plain numpy arrays at dimensions of a few dozen at
most. Robustness and determinism are preferred over speed; the
eigensolver is a Jacobi iteration rather than a LAPACK call so that the
whole numeric path is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_ATOL = 1e-10


class LinalgError(Exception):
    """Base class for numeric-contract failures in this package."""


class DimMismatchError(LinalgError):
    """Operands have incompatible dimensions."""


class NotHermitianError(LinalgError):
    """A matrix required to be self-adjoint is not, within tolerance."""


class ZeroStateError(LinalgError):
    """A state vector (or projected state) has numerically zero norm."""


def as_complex_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimMismatchError(f"expected a matrix, got array of shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -2, -1))


def max_abs(m) -> float:
    a = np.asarray(m)
    return 0.0 if a.size == 0 else float(np.max(np.abs(a)))


def is_hermitian(m, atol: float = DEFAULT_ATOL) -> bool:
    a = as_complex_matrix(m)
    return a.shape[0] == a.shape[1] and max_abs(a - dagger(a)) <= atol


def require_hermitian(m, atol: float = DEFAULT_ATOL) -> np.ndarray:
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"matrix of shape {a.shape} is not square")
    dev = max_abs(a - dagger(a))
    if dev > atol:
        raise NotHermitianError(f"matrix deviates from self-adjointness by {dev:.3e}")
    return a


def _require_square_same(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1] or a.shape != b.shape:
        raise DimMismatchError(f"need equal square shapes, got {a.shape} and {b.shape}")


def tensor(a, b) -> np.ndarray:
    """Kronecker product; works for matrices and for 1-D amplitude vectors.

    (a (x) b)[i*rows(b)+k, j*cols(b)+l] == a[i,j] * b[k,l].
    """
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def commutator(a, b) -> np.ndarray:
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    _require_square_same(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    _require_square_same(a, b)
    return a @ b + b @ a


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eig(m, *, off_tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by Jacobi rotations.

    Each rotation zeroes the current largest off-diagonal entry; iteration
    stops once the off-diagonal Frobenius norm drops below ``off_tol`` or
    after ``max_sweeps`` sweeps' worth of rotations.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and unitary ``v``
    such that ``m @ v == v @ diag(w)``.
    """
    a = require_hermitian(m)
    n = a.shape[0]
    a = (a + dagger(a)) / 2.0
    v = np.eye(n, dtype=complex)
    if n > 1:
        iu_rows, iu_cols = np.triu_indices(n, 1)
        max_rotations = max_sweeps * (n * (n - 1)) // 2
        for _ in range(max_rotations):
            if _off_diagonal_norm(a) <= off_tol:
                break
            k = int(np.argmax(np.abs(a[iu_rows, iu_cols])))
            p, q = int(iu_rows[k]), int(iu_cols[k])
            apq = a[p, q]
            if apq == 0.0:
                break
            # Phase out apq, then rotate in the real plane that zeroes it.
            beta = np.angle(apq)
            theta = 0.5 * np.arctan2(2.0 * abs(apq), a[p, p].real - a[q, q].real)
            c, s = np.cos(theta), np.sin(theta)
            g = np.array([[c, -s], [s * np.exp(-1j * beta), c * np.exp(-1j * beta)]])
            a[:, [p, q]] = a[:, [p, q]] @ g
            a[[p, q], :] = dagger(g) @ a[[p, q], :]
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = a[p, p].real
            a[q, q] = a[q, q].real
            v[:, [p, q]] = v[:, [p, q]] @ g
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


@dataclass(frozen=True)
class StateVector:
    """Normalized complex state with a tensor-factor structure.

    ``dims`` lists the subsystem dimensions; ``amps`` has length
    ``prod(dims)`` and is normalized on construction.
    """

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d <= 0 for d in dims):
            raise DimMismatchError(f"bad subsystem dimensions {dims}")
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise DimMismatchError(
                f"amplitude vector of length {amps.size} does not match dims {dims}"
            )
        norm = float(np.linalg.norm(amps))
        if norm < 1e-12:
            raise ZeroStateError("cannot normalize a zero amplitude vector")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps / norm)

    @property
    def dim(self) -> int:
        return self.amps.size

    def overlap(self, other: "StateVector") -> complex:
        if self.dim != other.dim:
            raise DimMismatchError(f"state dims {self.dims} vs {other.dims}")
        return complex(np.vdot(self.amps, other.amps))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(self.dims + other.dims, tensor(self.amps, other.amps))

    def expectation(self, op) -> complex:
        a = as_complex_matrix(op)
        if a.shape != (self.dim, self.dim):
            raise DimMismatchError(f"operator shape {a.shape} vs state dim {self.dim}")
        return complex(np.vdot(self.amps, a @ self.amps))
