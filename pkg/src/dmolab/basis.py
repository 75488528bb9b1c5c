"""Enumerated tensor-product bases for truncated boson modes and spin-1/2 factors.

A basis is an ordered list of factors.  Each factor is either a block of
bosonic (Fock) modes sharing one cutoff, or a single spin-1/2.  Basis states
are enumerated row-major over factors in declaration order, so the last
declared factor varies fastest; hamiltonian builders in this package declare
spin factors first and Fock factors last, which keeps the Fock index fastest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BasisError

SPIN_UP = 1
SPIN_DOWN = -1


@dataclass(frozen=True)
class FockFactor:
    """A block of `modes` bosonic modes truncated at `cutoff` quanta.

    With ``total=True`` the truncation applies to the summed occupation of the
    block (dimension C(cutoff+modes, modes)); otherwise each mode is truncated
    independently (dimension (cutoff+1)**modes).
    """

    cutoff: int
    modes: int = 1
    total: bool = True

    def __post_init__(self):
        if self.cutoff < 0:
            raise BasisError(f"Fock cutoff must be non-negative, got {self.cutoff}")
        if self.modes < 1:
            raise BasisError(f"Fock factor needs at least one mode, got {self.modes}")

    def states(self) -> list[tuple[int, ...]]:
        ranges = [range(self.cutoff + 1)] * self.modes
        if self.total:
            return [occ for occ in itertools.product(*ranges) if sum(occ) <= self.cutoff]
        return list(itertools.product(*ranges))

    @property
    def dim(self) -> int:
        if self.total:
            from math import comb

            return comb(self.cutoff + self.modes, self.modes)
        return (self.cutoff + 1) ** self.modes


@dataclass(frozen=True)
class SpinFactor:
    """A single spin-1/2; local states are the two sigma_3 eigenvalues (+1, -1)."""

    @property
    def dim(self) -> int:
        return 2

    def states(self) -> list[int]:
        return [SPIN_UP, SPIN_DOWN]


@dataclass(frozen=True)
class BasisSpec:
    """Truncated tensor-product Hilbert space with index <-> quantum-number maps."""

    factors: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise BasisError("basis needs at least one factor")

    @cached_property
    def dim(self) -> int:
        d = 1
        for f in self.factors:
            d *= f.dim
        return d

    @cached_property
    def states(self) -> list[tuple]:
        """All basis states as tuples with one entry per factor."""
        return list(itertools.product(*(f.states() for f in self.factors)))

    @cached_property
    def _index(self) -> dict:
        return {state: i for i, state in enumerate(self.states)}

    def index_of(self, quantum_numbers: tuple) -> int:
        try:
            return self._index[tuple(quantum_numbers)]
        except KeyError:
            raise BasisError(f"state {quantum_numbers!r} not in basis") from None

    def quantum_numbers_of(self, index: int) -> tuple:
        return self.states[index]

    # -- mode/factor bookkeeping -------------------------------------------

    @cached_property
    def fock_factor_indices(self) -> list[int]:
        return [i for i, f in enumerate(self.factors) if isinstance(f, FockFactor)]

    @cached_property
    def spin_factor_indices(self) -> list[int]:
        return [i for i, f in enumerate(self.factors) if isinstance(f, SpinFactor)]

    @cached_property
    def n_modes(self) -> int:
        return sum(f.modes for f in self.factors if isinstance(f, FockFactor))

    def mode_location(self, mode: int) -> tuple[int, int]:
        """Map a global bosonic mode index to (factor index, offset within factor)."""
        if mode < 0:
            raise BasisError(f"mode index {mode} out of range")
        seen = 0
        for fi, f in enumerate(self.factors):
            if isinstance(f, FockFactor):
                if mode < seen + f.modes:
                    return fi, mode - seen
                seen += f.modes
        raise BasisError(f"mode index {mode} out of range (basis has {seen} modes)")

    def spin_factor(self, factor: int) -> SpinFactor:
        if factor < 0 or factor >= len(self.factors):
            raise BasisError(f"factor index {factor} out of range")
        f = self.factors[factor]
        if not isinstance(f, SpinFactor):
            raise BasisError(f"factor {factor} is not a spin factor")
        return f

    # -- occupation tables --------------------------------------------------

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dim, n_modes) integer array of per-mode occupation numbers."""
        occ = np.zeros((self.dim, self.n_modes), dtype=np.int64)
        col = 0
        for fi, f in enumerate(self.factors):
            if not isinstance(f, FockFactor):
                continue
            for i, state in enumerate(self.states):
                occ[i, col : col + f.modes] = state[fi]
            col += f.modes
        return occ

    @cached_property
    def total_quanta(self) -> np.ndarray:
        """Total bosonic quanta of each basis state."""
        if self.n_modes == 0:
            return np.zeros(self.dim, dtype=np.int64)
        return self.occupations.sum(axis=1)

    def safe_mask(self, buffer: int = 2) -> np.ndarray:
        """Mask of states far enough from the Fock truncation edge.

        Ladder-operator identities hold exactly on this subspace; the edge
        rows deviate and must be excluded from algebraic assertions.
        """
        cut = min(
            (f.cutoff for f in self.factors if isinstance(f, FockFactor)),
            default=0,
        )
        return self.total_quanta <= cut - buffer

    def spin_values(self, factor: int) -> np.ndarray:
        """sigma_3 eigenvalue (+1/-1) of each basis state on a spin factor."""
        self.spin_factor(factor)
        return np.array([state[factor] for state in self.states], dtype=np.int64)
