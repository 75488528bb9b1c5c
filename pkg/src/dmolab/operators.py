"""Dense operators on an enumerated basis: ladder, chiral, and spin builders.

All hamiltonians in the package are assembled from these primitives as dense
complex matrices.  Storage is deliberately dense; the target problem sizes
are a few thousand states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, FockFactor, SPIN_DOWN, SPIN_UP
from .errors import BasisError


@dataclass(frozen=True)
class OperatorMatrix:
    """A dense complex matrix tied to the basis it acts on."""

    basis: BasisSpec
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise BasisError(
                f"matrix shape {m.shape} does not match basis dimension {self.basis.dim}"
            )
        object.__setattr__(self, "entries", m)

    # -- algebra -------------------------------------------------------------

    def _check_same_basis(self, other: "OperatorMatrix"):
        if self.basis is not other.basis and self.basis != other.basis:
            raise BasisError("operators act on different bases")

    def __add__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_same_basis(other)
            return OperatorMatrix(self.basis, self.entries + other.entries)
        return OperatorMatrix(self.basis, self.entries + other * np.eye(self.basis.dim))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_same_basis(other)
            return OperatorMatrix(self.basis, self.entries - other.entries)
        return OperatorMatrix(self.basis, self.entries - other * np.eye(self.basis.dim))

    def __mul__(self, scalar):
        return OperatorMatrix(self.basis, self.entries * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return OperatorMatrix(self.basis, -self.entries)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_same_basis(other)
            return OperatorMatrix(self.basis, self.entries @ other.entries)
        return self.entries @ other

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.entries.conj().T)

    def commutator(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_basis(other)
        a, b = self.entries, other.entries
        return OperatorMatrix(self.basis, a @ b - b @ a)

    def anticommutator(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_basis(other)
        a, b = self.entries, other.entries
        return OperatorMatrix(self.basis, a @ b + b @ a)

    # -- diagnostics -----------------------------------------------------------

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.entries - self.entries.conj().T).max())

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_defect() < tol

    def max_abs(self, mask: np.ndarray | None = None) -> float:
        """Largest entry magnitude, optionally restricted to masked columns.

        Restricting columns checks the operator's action on the masked
        subspace (all output rows included).
        """
        if mask is None:
            return float(np.abs(self.entries).max())
        if not mask.any():
            return 0.0
        return float(np.abs(self.entries[:, mask]).max())


def zero(basis: BasisSpec) -> OperatorMatrix:
    return OperatorMatrix(basis, np.zeros((basis.dim, basis.dim), dtype=np.complex128))


def identity(basis: BasisSpec) -> OperatorMatrix:
    return OperatorMatrix(basis, np.eye(basis.dim, dtype=np.complex128))


def make_ladder(basis: BasisSpec, mode: int) -> OperatorMatrix:
    """Annihilation operator on one bosonic mode: a|n> = sqrt(n)|n-1>.

    The commutator [a, a^dagger] equals the identity away from the truncation
    edge; the edge row deviates by construction.
    """
    fi, offset = basis.mode_location(mode)
    mat = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for i, state in enumerate(basis.states):
        occ = state[fi]
        n = occ[offset]
        if n == 0:
            continue
        lowered = list(occ)
        lowered[offset] = n - 1
        target = list(state)
        target[fi] = tuple(lowered)
        j = basis.index_of(tuple(target))
        mat[j, i] = np.sqrt(n)
    return OperatorMatrix(basis, mat)


def number_operator(basis: BasisSpec, mode: int) -> OperatorMatrix:
    fi, offset = basis.mode_location(mode)
    diag = np.array([state[fi][offset] for state in basis.states], dtype=np.float64)
    return OperatorMatrix(basis, np.diag(diag).astype(np.complex128))


def total_number_operator(basis: BasisSpec) -> OperatorMatrix:
    return OperatorMatrix(basis, np.diag(basis.total_quanta.astype(np.complex128)))


def make_chiral_pair(
    basis: BasisSpec, mode_x: int, mode_y: int, normalization: float = 0.5
) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Right/left chiral annihilation pair built from two Cartesian modes.

    Built from the unnormalized single-mode ladders A_i = sqrt(2) a_i (which
    obey [A_i, A_i^dagger] = 2), so the unnormalized pair A_x +- i A_y has
    commutator 4 and `normalization` = 1/2 yields [b, b^dagger] = 1 on the
    safe subspace.
    """
    fx, _ = basis.mode_location(mode_x)
    fy, _ = basis.mode_location(mode_y)
    cut_x = basis.factors[fx].cutoff
    cut_y = basis.factors[fy].cutoff
    if cut_x != cut_y:
        raise BasisError(
            f"chiral pair needs equal cutoffs, got {cut_x} and {cut_y}"
        )
    ax = make_ladder(basis, mode_x).entries
    ay = make_ladder(basis, mode_y).entries
    scale = normalization * np.sqrt(2.0)
    right = OperatorMatrix(basis, scale * (ax + 1j * ay))
    left = OperatorMatrix(basis, scale * (ax - 1j * ay))
    return right, left


_PAULI = {
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "+": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128),
    "-": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128),
}


def embed_spin(basis: BasisSpec, factor: int, which: str) -> OperatorMatrix:
    """Pauli operator on one spin factor, identity on everything else.

    `which` is one of "x", "y", "z", "+", "-"; the local basis is ordered
    (sigma_3 = +1, sigma_3 = -1), so sigma_+ raises the lower state.
    """
    basis.spin_factor(factor)
    try:
        local = _PAULI[which]
    except KeyError:
        raise BasisError(f"unknown Pauli label {which!r}") from None
    local_index = {SPIN_UP: 0, SPIN_DOWN: 1}
    mat = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for i, state in enumerate(basis.states):
        col = local_index[state[factor]]
        for row in range(2):
            amp = local[row, col]
            if amp == 0.0:
                continue
            target = list(state)
            target[factor] = SPIN_UP if row == 0 else SPIN_DOWN
            j = basis.index_of(tuple(target))
            mat[j, i] += amp
    return OperatorMatrix(basis, mat)
