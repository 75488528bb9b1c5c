"""One-dimensional n-particle Dirac oscillator on relative modes.

The kinetic term couples each particle's sigma_1 to its center-of-mass-free
annihilation operator a'_i = a_i - (1/n) sum_j a_j.  Because sum_i a'_i
vanishes identically, every state with all sigma_1 projections aligned is
annihilated by the kinetic operator regardless of its oscillator content,
which produces the unbounded zero-energy degeneracy ("cockroach nest") at any
truncation.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .basis import BasisSpec, FockFactor, SpinFactor, SPIN_DOWN, SPIN_UP
from .errors import BasisError, ResourceError, ValidationError
from .operators import OperatorMatrix, embed_spin, make_ladder
from .spectral import FLOAT_FMT

MAX_DIM = 20_000

B_SIGMA3_PRODUCT = "sigma3-product"
B_NONE = "none"


@dataclass(frozen=True)
class ManyBodyParams:
    n_particles: int
    m: float = 1.0
    omega: float = 1.0
    cutoff: int = 6

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValidationError(
                f"need at least two particles, got {self.n_particles}"
            )
        if self.omega < 0:
            raise ValidationError(f"omega must be non-negative, got {self.omega}")


def manybody_basis(params: ManyBodyParams) -> BasisSpec:
    """One spin-1/2 per particle, then one Fock mode per particle.

    Modes are truncated per particle so the relative-mode combinations stay
    exactly representable.
    """
    n = params.n_particles
    dim = 2**n * (params.cutoff + 1) ** n
    if dim > MAX_DIM:
        raise ResourceError(
            f"basis dimension {dim} exceeds the supported size {MAX_DIM}; "
            f"reduce n_particles or cutoff"
        )
    factors = [SpinFactor() for _ in range(n)]
    factors.append(FockFactor(params.cutoff, modes=n, total=False))
    return BasisSpec(tuple(factors))


def relative_modes(n_particles: int, basis: BasisSpec) -> list[OperatorMatrix]:
    """a'_i = a_i - (1/n) sum_j a_j; the list sums to the zero matrix."""
    if basis.n_modes != n_particles:
        raise BasisError(
            f"basis has {basis.n_modes} modes, expected {n_particles}"
        )
    ladders = [make_ladder(basis, i) for i in range(n_particles)]
    mean = ladders[0]
    for a in ladders[1:]:
        mean = mean + a
    mean = (1.0 / n_particles) * mean
    return [a - mean for a in ladders]


def center_of_mass_mode(n_particles: int, basis: BasisSpec) -> OperatorMatrix:
    """a_cm = (1/sqrt(n)) sum_j a_j; commutes with every relative mode."""
    ladders = [make_ladder(basis, i) for i in range(n_particles)]
    total = ladders[0]
    for a in ladders[1:]:
        total = total + a
    return (1.0 / math.sqrt(n_particles)) * total


def _b_matrix(params: ManyBodyParams, basis: BasisSpec, choice: str) -> np.ndarray:
    if choice == B_NONE:
        return np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    if choice != B_SIGMA3_PRODUCT:
        raise ValidationError(f"unknown B choice {choice!r}")
    prod = embed_spin(basis, 0, "z").entries.copy()
    for i in range(1, params.n_particles):
        prod = prod @ embed_spin(basis, i, "z").entries
    return prod


def kinetic_operator(params: ManyBodyParams, B_choice: str = B_SIGMA3_PRODUCT) -> OperatorMatrix:
    """K = sqrt(w) [(1+B) sum_i sigma_1^i a'_i + h.c.]."""
    basis = manybody_basis(params)
    rel = relative_modes(params.n_particles, basis)
    M = None
    for i in range(params.n_particles):
        term = embed_spin(basis, i, "x") @ rel[i]
        M = term if M is None else M + term
    one_plus_b = np.eye(basis.dim) + _b_matrix(params, basis, B_choice)
    k = one_plus_b @ M.entries
    k = k + k.conj().T
    return OperatorMatrix(basis, math.sqrt(params.omega) * k)


def mass_operator(params: ManyBodyParams) -> OperatorMatrix:
    """m sum_i sigma_3^i, the per-particle rest-mass term."""
    basis = manybody_basis(params)
    total = embed_spin(basis, 0, "z")
    for i in range(1, params.n_particles):
        total = total + embed_spin(basis, i, "z")
    return params.m * total


def build_nbody(params: ManyBodyParams, B_choice: str = B_SIGMA3_PRODUCT) -> OperatorMatrix:
    return kinetic_operator(params, B_choice) + mass_operator(params)


# ---------------------------------------------------------------------------
# aligned-spin zero-kinetic states
# ---------------------------------------------------------------------------


def _sigma1_aligned_vector(basis: BasisSpec, n_particles: int, sign: int) -> np.ndarray:
    """Product state with every sigma_1 projection equal to `sign`, Fock vacuum."""
    vec = np.zeros(basis.dim, dtype=np.complex128)
    amp = 2.0 ** (-n_particles / 2.0)
    for spins in product((SPIN_UP, SPIN_DOWN), repeat=n_particles):
        parity = sum(1 for s in spins if s == SPIN_DOWN)
        state = tuple(spins) + ((0,) * n_particles,)
        vec[basis.index_of(state)] = amp * (sign**parity)
    return vec


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def aligned_zero_kinetic_states(
    params: ManyBodyParams, max_shell: int | None = None
) -> list[np.ndarray]:
    """Candidate kernel states: aligned sigma_1 spins times relative-mode shells.

    For each total relative quanta Q <= max_shell and each of the two aligned
    spin configurations, one state per composition of Q into the n-1
    independent relative modes.
    """
    basis = manybody_basis(params)
    n = params.n_particles
    if max_shell is None:
        max_shell = params.cutoff
    rel = relative_modes(n, basis)
    out = []
    spin_vectors = [
        _sigma1_aligned_vector(basis, n, +1),
        _sigma1_aligned_vector(basis, n, -1),
    ]
    # relative creators act only on the mode block, so the Fock content is
    # replayed directly on each aligned spin state.
    creators = [r.dagger().entries for r in rel[:-1]]
    for sign_vec in spin_vectors:
        for quanta in range(max_shell + 1):
            for comp in _compositions(quanta, n - 1):
                v = sign_vec.copy()
                for op, k in zip(creators, comp):
                    for _ in range(k):
                        v = op @ v
                norm = np.linalg.norm(v)
                if norm > 1e-12:
                    out.append(v / norm)
    return out


@dataclass
class NestCount:
    """Zero-kinetic-state census for one parameter set."""

    cutoff: int
    n_particles: int
    omega: float
    nest_count: int
    predicted_lower_bound: int
    max_kinetic_norm: float

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("cutoff,n_particles,omega,nest_count,predicted_lower_bound\n")
        out.write(
            f"{self.cutoff},{self.n_particles},{FLOAT_FMT % self.omega},"
            f"{self.nest_count},{self.predicted_lower_bound}\n"
        )
        return out.getvalue()


def predicted_nest_lower_bound(n_particles: int, max_shell: int) -> int:
    """Two aligned spin sectors times the compositions of each shell."""
    total = 0
    for quanta in range(max_shell + 1):
        total += math.comb(quanta + n_particles - 2, n_particles - 2)
    return 2 * total


def cockroach_nest_count(
    params: ManyBodyParams,
    energy_window: float = 1e-10,
    B_choice: str = B_SIGMA3_PRODUCT,
) -> NestCount:
    """Count constructed aligned-spin states annihilated by the kinetic term.

    A state counts when ||K psi|| < energy_window; the predicted lower bound
    is the number of constructed candidates, which grows with the cutoff
    because every relative-mode shell contributes.
    """
    K = kinetic_operator(params, B_choice)
    states = aligned_zero_kinetic_states(params)
    worst = 0.0
    count = 0
    for v in states:
        r = float(np.linalg.norm(K.entries @ v))
        worst = max(worst, r)
        if r < energy_window:
            count += 1
    return NestCount(
        cutoff=params.cutoff,
        n_particles=params.n_particles,
        omega=params.omega,
        nest_count=count,
        predicted_lower_bound=predicted_nest_lower_bound(
            params.n_particles, params.cutoff
        ),
        max_kinetic_norm=worst,
    )


def aligned_sector_eigenvalues(
    params: ManyBodyParams, B_choice: str = B_SIGMA3_PRODUCT
) -> np.ndarray:
    """Eigenvalues of the full hamiltonian projected onto the aligned sector.

    The kinetic operator vanishes there, and the mass term only connects the
    sector to states outside it, so the projected spectrum consists of
    mass-term eigenvalues (all zero for two particles).
    """
    H = build_nbody(params, B_choice)
    states = aligned_zero_kinetic_states(params)
    P = np.array(states).T
    sub = P.conj().T @ H.entries @ P
    return np.linalg.eigvalsh(sub)
