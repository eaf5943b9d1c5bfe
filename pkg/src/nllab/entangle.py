"""Maximally entangled states built from anti-unitary maps.

A state (1/sqrt(n)) * sum_k U|phi_k> (x) |phi_k> with U anti-unitary pairs
every observable A of one subsystem with a unique partner UAU^-1 of the
other whose measurement outcomes agree with certainty. This module
constructs such states, the partner map, and the residuals that certify
the perfect correlations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_ATOL,
    DimMismatchError,
    LinalgError,
    StateVector,
    as_complex_matrix,
    dagger,
    max_abs,
    require_hermitian,
    tensor,
)


class NotUnitaryError(LinalgError):
    """The linear factor of an anti-unitary map must be unitary."""


class BasisNotOrthonormalError(LinalgError):
    """Basis columns fail the orthonormality check."""


class NotInvolutionError(LinalgError):
    """The map squared is neither +identity nor -identity."""


@dataclass(frozen=True)
class AntiUnitaryMap:
    """Anti-linear norm-preserving map v -> ubar @ conj(v).

    conj() is entrywise conjugation in the computational basis, which is
    therefore the invariant basis of the plain-conjugation map (ubar = I).
    """

    ubar: np.ndarray

    def __post_init__(self):
        u = as_complex_matrix(self.ubar)
        n = u.shape[0]
        if u.shape[1] != n:
            raise DimMismatchError(f"ubar must be square, got shape {u.shape}")
        if max_abs(dagger(u) @ u - np.eye(n)) > DEFAULT_ATOL:
            raise NotUnitaryError("ubar is not unitary within 1e-10")
        object.__setattr__(self, "ubar", u)

    @property
    def dim(self) -> int:
        return self.ubar.shape[0]

    @property
    def is_involution(self) -> bool:
        return max_abs(self.ubar @ np.conj(self.ubar) - np.eye(self.dim)) <= DEFAULT_ATOL

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.size != self.dim:
            raise DimMismatchError(f"vector of length {v.size} vs map dim {self.dim}")
        return self.ubar @ np.conj(v)

    def inverse(self) -> "AntiUnitaryMap":
        return AntiUnitaryMap(self.ubar.T)


def conjugation(n: int) -> AntiUnitaryMap:
    """Plain entrywise conjugation (the simplest involution)."""
    return AntiUnitaryMap(np.eye(n, dtype=complex))


def singlet_map() -> AntiUnitaryMap:
    """The anti-unitary whose entangled state is the spin singlet."""
    return AntiUnitaryMap(np.array([[0, 1], [-1, 0]], dtype=complex))


@dataclass(frozen=True)
class MaxEntangledState:
    """State (1/sqrt(n)) * sum_k U|phi_k> (x) |phi_k> with equal Schmidt weights."""

    u: AntiUnitaryMap
    basis: np.ndarray
    state: StateVector

    @property
    def n(self) -> int:
        return self.u.dim


def me_state(u: AntiUnitaryMap, basis: np.ndarray | None = None) -> MaxEntangledState:
    """Build the maximally entangled state of ``u`` over ``basis`` columns.

    The resulting amplitudes do not depend on the basis choice; that
    invariance is part of the construction and is verified by tests.
    """
    n = u.dim
    b = np.eye(n, dtype=complex) if basis is None else as_complex_matrix(basis)
    if b.shape != (n, n):
        raise DimMismatchError(f"basis shape {b.shape} vs subsystem dim {n}")
    if max_abs(dagger(b) @ b - np.eye(n)) > DEFAULT_ATOL:
        raise BasisNotOrthonormalError("basis columns are not orthonormal within 1e-10")
    amps = np.zeros((n, n), dtype=complex)
    for k in range(n):
        amps += np.outer(u.apply(b[:, k]), b[:, k])
    return MaxEntangledState(u=u, basis=b, state=StateVector((n, n), amps.reshape(-1)))


def anti_apply(u: AntiUnitaryMap, v: StateVector) -> StateVector:
    if v.dim != u.dim:
        raise DimMismatchError(f"state dim {v.dim} vs map dim {u.dim}")
    return StateVector(v.dims, u.apply(v.amps))


def tilde(a, u: AntiUnitaryMap) -> np.ndarray:
    """Partner observable U A U^-1 = ubar conj(A) ubar^dagger.

    Hermitian with the same eigenvalue multiset as ``a``; for ubar = I it
    is the entrywise conjugate of ``a``.
    """
    a = require_hermitian(a)
    if a.shape[0] != u.dim:
        raise DimMismatchError(f"operator dim {a.shape[0]} vs map dim {u.dim}")
    return u.ubar @ np.conj(a) @ dagger(u.ubar)


def perfect_correlation_residual(s: MaxEntangledState, a) -> float:
    """|| (tilde(A) (x) I - I (x) A) psi ||, which is 0 for every Hermitian A."""
    a = as_complex_matrix(a)
    n = s.n
    if a.shape != (n, n):
        raise DimMismatchError(f"operator shape {a.shape} vs subsystem dim {n}")
    eye = np.eye(n, dtype=complex)
    op = tensor(tilde(a, s.u), eye) - tensor(eye, a)
    return float(np.linalg.norm(op @ s.state.amps))


def roles_swapped_state(s: MaxEntangledState) -> StateVector:
    """The companion form (1/sqrt(n)) * sum_k |phi_k> (x) U|phi_k>.

    Requires U^2 = +-1 (ubar symmetric or antisymmetric); the result then
    equals ``s.state`` up to a global sign, which is what licenses swapping
    the two subsystem roles in the perfect-correlation argument.
    """
    n = s.n
    square = s.u.ubar @ np.conj(s.u.ubar)
    eye = np.eye(n)
    if min(max_abs(square - eye), max_abs(square + eye)) > DEFAULT_ATOL:
        raise NotInvolutionError("map squared is neither +identity nor -identity")
    amps = np.zeros((n, n), dtype=complex)
    for k in range(n):
        amps += np.outer(s.basis[:, k], s.u.apply(s.basis[:, k]))
    return StateVector((n, n), amps.reshape(-1))
