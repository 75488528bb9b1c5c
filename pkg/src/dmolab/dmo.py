"""Free Dirac oscillator in 1, 2, 3 dimensions: closed-form spectra and
numerical cross-checks.

Conventions (natural units, hbar = c = 1):

* 1D:  H = sqrt(w) (s+ a + s- a^dag) + m s3, levels E = +-sqrt(m^2 + w(n+1))
  for n >= 0, plus one unpaired level at E = -m (the decoupled bottom state).
* 2D:  same with the normalized right-chiral mode b, coupling g = sqrt(w):
  E = +-sqrt(m^2 + g^2 (n+1)); every level is additionally degenerate in the
  left-chiral quanta, which never enter the energy.
* 3D:  H = sqrt(w) (S+ K + S- K^dag) + m S3 with K = sigma . a on a
  three-mode Cartesian basis times a 4-spinor.  Levels come in two families,
  E^2 = m^2 + 2wn for n >= 0 (independent of j: infinitely degenerate) and
  E^2 = m^2 + 2w(n+j) for n >= 1 (finite degeneracy; the lowest radial member
  carries n = 1 because the pair invariant of the defining quadruplet is
  n_radial + j + 1).  As in 1D, the n = 0 member of the j-independent family
  exists only with E = -m: the raising channel sigma . a^dag has no kernel,
  so +m never occurs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, FockFactor, SpinFactor
from .errors import LabelError, PreconditionError, ValidationError
from .operators import (
    OperatorMatrix,
    embed_spin,
    identity,
    make_chiral_pair,
    make_ladder,
)
from .spectral import SpectrumResult, diagonalize, safe_weight

BRANCH_INFINITE = "infinite"
BRANCH_FINITE = "finite"
BRANCH_TOWER = "tower"
BRANCH_UNPAIRED = "unpaired"


@dataclass(frozen=True)
class DmoParams:
    m: float
    omega: float = 1.0
    dimension: int = 3

    def __post_init__(self):
        if self.m < 0:
            raise ValidationError(f"mass must be non-negative, got {self.m}")
        if self.omega <= 0:
            raise ValidationError(f"omega must be positive, got {self.omega}")
        if self.dimension not in (1, 2, 3):
            raise ValidationError(f"dimension must be 1, 2 or 3, got {self.dimension}")


@dataclass(frozen=True)
class BlockLabel:
    """Conserved-quantity labels of one level: branch family, Fock/radial
    number n, and (3D only) the half-integer total angular momentum j."""

    branch: str
    n: int
    j: float | None = None

    def __post_init__(self):
        if self.n < 0:
            raise LabelError(f"n must be non-negative, got {self.n}")
        if self.j is not None and (self.j < 0.5 or (2 * self.j) % 1 != 0):
            raise LabelError(f"j must be a positive half-integer, got {self.j}")


# ---------------------------------------------------------------------------
# hamiltonian builders
# ---------------------------------------------------------------------------


def dmo_basis(dimension: int, cutoff: int) -> BasisSpec:
    """Standard basis for the numerical free DMO at the given dimension.

    The Fock block is truncated by total quanta, which the couplings conserve
    blockwise, so truncation errors stay confined to the edge shells.
    """
    if dimension == 1:
        return BasisSpec((SpinFactor(), FockFactor(cutoff, modes=1)))
    if dimension == 2:
        return BasisSpec((SpinFactor(), FockFactor(cutoff, modes=2, total=True)))
    return BasisSpec(
        (SpinFactor(), SpinFactor(), FockFactor(cutoff, modes=3, total=True))
    )


def build_hamiltonian(params: DmoParams, cutoff: int) -> OperatorMatrix:
    """Dense DMO hamiltonian on the standard truncated basis."""
    basis = dmo_basis(params.dimension, cutoff)
    g = math.sqrt(params.omega)
    if params.dimension == 1:
        a = make_ladder(basis, 0)
        sp = embed_spin(basis, 0, "+")
        sm = embed_spin(basis, 0, "-")
        s3 = embed_spin(basis, 0, "z")
        return g * (sp @ a + sm @ a.dagger()) + params.m * s3
    if params.dimension == 2:
        b, _ = make_chiral_pair(basis, 0, 1, normalization=0.5)
        sp = embed_spin(basis, 0, "+")
        sm = embed_spin(basis, 0, "-")
        s3 = embed_spin(basis, 0, "z")
        return g * (sp @ b + sm @ b.dagger()) + params.m * s3
    return _build_3d(basis, params.m, params.omega)


def _kinetic_3d(basis: BasisSpec) -> OperatorMatrix:
    """K = sigma . a acting on (real spin) x (3 Cartesian modes)."""
    k = None
    for i, axis in enumerate(("x", "y", "z")):
        term = embed_spin(basis, 1, axis) @ make_ladder(basis, i)
        k = term if k is None else k + term
    return k


def _build_3d(basis: BasisSpec, m: float, omega: float) -> OperatorMatrix:
    K = _kinetic_3d(basis)
    Sp = embed_spin(basis, 0, "+")
    Sm = embed_spin(basis, 0, "-")
    S3 = embed_spin(basis, 0, "z")
    return math.sqrt(omega) * (Sp @ K + Sm @ K.dagger()) + m * S3


# ---------------------------------------------------------------------------
# closed-form spectra
# ---------------------------------------------------------------------------


def block_index_3d(j: float, N_eigenvalue: float, branch: str) -> int:
    """Radial label n of the 2x2 block with the given invariant eigenvalue.

    N_eigenvalue is the eigenvalue of I = a^dag.a + Sigma_3/2 shared by the
    two paired states: 2n + j - 1 on the j-independent branch and 2n + j - 2
    on the finite branch (whose lowest level carries n = 1).
    """
    if (2 * j) % 1 != 0 or j < 0.5:
        raise LabelError(f"j must be a positive half-integer, got {j}")
    if branch == BRANCH_INFINITE:
        n2 = N_eigenvalue - j + 1
        n_min = 0
    elif branch == BRANCH_FINITE:
        n2 = N_eigenvalue - j + 2
        n_min = 1
    else:
        raise LabelError(f"unknown branch {branch!r}")
    n = n2 / 2
    if n < n_min or abs(n - round(n)) > 1e-12:
        raise LabelError(
            f"inconsistent labels: branch={branch}, j={j}, I-eigenvalue={N_eigenvalue}"
        )
    return int(round(n))


def block_matrix_3d(
    params: DmoParams, j: float, N_eigenvalue: float, branch: str
) -> np.ndarray:
    """The 2x2 invariant block at total angular momentum j.

    The j-independent family pairs states differing by one quantum with
    off-diagonal sqrt(2wn); the finite family carries sqrt(2w(n+j)).  At
    n = 0 the off-diagonal vanishes; only the -m member of that block
    corresponds to a physical state (the raising channel has no kernel).
    """
    n = block_index_3d(j, N_eigenvalue, branch)
    q = n if branch == BRANCH_INFINITE else n + j
    off = math.sqrt(2.0 * params.omega * q)
    return np.array([[-params.m, off], [off, params.m]])


def analytic_levels_1d(params: DmoParams, max_quanta: int):
    levels = [(-params.m, BlockLabel(BRANCH_UNPAIRED, 0), 1.0)]
    for n in range(max_quanta):
        e = math.sqrt(params.m**2 + params.omega * (n + 1))
        levels.append((e, BlockLabel(BRANCH_TOWER, n), 1.0))
        levels.append((-e, BlockLabel(BRANCH_TOWER, n), 1.0))
    return levels


def analytic_levels_2d(params: DmoParams, max_quanta: int):
    levels = [(-params.m, BlockLabel(BRANCH_UNPAIRED, 0), math.inf)]
    for n in range(max_quanta):
        e = math.sqrt(params.m**2 + params.omega * (n + 1))
        levels.append((e, BlockLabel(BRANCH_TOWER, n), math.inf))
        levels.append((-e, BlockLabel(BRANCH_TOWER, n), math.inf))
    return levels


def analytic_levels_3d(params: DmoParams, max_quanta: int):
    levels = []
    # j-independent family: the level with 2wn sits in blocks whose lighter
    # member has 2n quanta at the smallest admissible l = 0.
    levels.append((-params.m, BlockLabel(BRANCH_INFINITE, 0, 0.5), math.inf))
    for n in range(1, max_quanta // 2 + 1):
        e = math.sqrt(params.m**2 + 2.0 * params.omega * n)
        levels.append((e, BlockLabel(BRANCH_INFINITE, n, 0.5), math.inf))
        levels.append((-e, BlockLabel(BRANCH_INFINITE, n, 0.5), math.inf))
    # finite family: E^2 = m^2 + 2w(n+j) with n >= 1; the defining pair spans
    # quanta 2n + j - 5/2 and 2n + j - 3/2.
    n = 1
    while 2 * n - 1 <= max_quanta:
        j = 0.5
        while 2 * n + j - 1.5 <= max_quanta:
            e = math.sqrt(params.m**2 + 2.0 * params.omega * (n + j))
            deg = 2 * j + 1
            levels.append((e, BlockLabel(BRANCH_FINITE, n, j), deg))
            levels.append((-e, BlockLabel(BRANCH_FINITE, n, j), deg))
            j += 1.0
        n += 1
    return levels


def analytic_spectrum(params: DmoParams, max_quanta: int) -> SpectrumResult:
    """Closed-form levels with total quanta <= max_quanta, labeled per family."""
    if max_quanta < 0:
        raise PreconditionError("max_quanta must be non-negative")
    table = {1: analytic_levels_1d, 2: analytic_levels_2d, 3: analytic_levels_3d}
    levels = table[params.dimension](params, max_quanta)
    energies = [e for e, _, _ in levels]
    labels = [
        {
            "branch": lab.branch,
            "n": lab.n,
            "j": "" if lab.j is None else lab.j,
            "degeneracy": "inf" if math.isinf(deg) else deg,
        }
        for _, lab, deg in levels
    ]
    return SpectrumResult(np.array(energies), labels=labels)


def analytic_energy_set(params: DmoParams, max_quanta: int) -> np.ndarray:
    """Distinct closed-form energies up to max_quanta, ascending."""
    spec = analytic_spectrum(params, max_quanta)
    return np.unique(spec.eigenvalues)


# ---------------------------------------------------------------------------
# numerical spectrum and safe-zone filtering
# ---------------------------------------------------------------------------

_MIN_LEVELS = 5


def required_cutoff(params: DmoParams) -> int:
    """Smallest cutoff leaving at least a handful of levels below the edge.

    The edge energy is sqrt(m^2 + w * cutoff).  In every dimension the k-th
    positive closed-form level sits at E^2 = m^2 + w*k or below (1D/2D tower
    at w(n+1); 3D families at 2w q with q advancing in half-integer steps), so
    k levels fit once cutoff >= k, plus the truncation buffer.
    """
    return _MIN_LEVELS + 2


def numeric_spectrum(params: DmoParams, cutoff: int, want_vectors: bool = True) -> SpectrumResult:
    """Brute-force spectrum of the truncated hamiltonian."""
    min_cut = required_cutoff(params)
    if cutoff < min_cut:
        raise PreconditionError(
            f"cutoff {cutoff} too small; need at least {min_cut} so that "
            f"{_MIN_LEVELS} closed-form levels sit below the truncation edge"
        )
    H = build_hamiltonian(params, cutoff)
    return diagonalize(H, want_vectors=want_vectors)


def safe_numeric_levels(
    params: DmoParams, cutoff: int, buffer: int = 2, weight_threshold: float = 0.5
) -> np.ndarray:
    """Numeric eigenvalues whose eigenvectors live in the safe subspace.

    Eigenvectors supported on edge shells (total quanta within `buffer` of the
    cutoff) are truncation artifacts and are dropped by weight.
    """
    basis = dmo_basis(params.dimension, cutoff)
    spec = numeric_spectrum(params, cutoff, want_vectors=True)
    w = safe_weight(basis, spec.eigenvectors, buffer)
    return spec.eigenvalues[w > weight_threshold]


# ---------------------------------------------------------------------------
# limits and algebra checks
# ---------------------------------------------------------------------------


def nonrelativistic_limit_check(
    params: DmoParams, j: float, l: float, N: int
) -> tuple[float, float]:
    """Subtracted relativistic energy vs the spin-orbit oscillator eigenvalue.

    Returns (eps_rel, eps_osc) for the level labeled by (N, l, j): eps_rel is
    E - m from the exact square-root spectrum, eps_osc the eigenvalue of the
    oscillator hamiltonian minus rest and zero-point pieces with the strong
    spin-orbit term.  They agree to leading order in omega/m.
    """
    if abs(l - (j - 0.5)) < 1e-9:
        q = (N - j + 0.5) / 2.0  # j-independent family: E^2 = m^2 + 2wq
        eps_osc = params.omega * q / params.m
    elif abs(l - (j + 0.5)) < 1e-9:
        q = (N - j - 0.5) / 2.0 + j  # E^2 = m^2 + 2w(n+j)
        eps_osc = params.omega * q / params.m
    else:
        raise LabelError(f"l must be j +- 1/2, got l={l}, j={j}")
    if q < -1e-12:
        raise LabelError(f"labels give negative radial number: N={N}, l={l}")
    eps_rel = math.sqrt(params.m**2 + 2.0 * params.omega * q) - params.m
    return eps_rel, eps_osc


def susy_anticommutator_check(cutoff: int, buffer: int = 2) -> float:
    """Max residual of {Q_a, Q_b} - delta_ab (H^2 - 1) on the safe subspace.

    The supercharges are built from sigma.a and swap the spinor blocks.  The
    relation holds at unit mass with the oscillator-unit hamiltonian, whose
    kinetic term is sqrt(2) sigma.a (omega = 2 in the spectrum normalization
    E^2 = m^2 + 2 w n); it is exact away from the truncation edge.
    """
    if cutoff < 4:
        raise PreconditionError("cutoff must be at least 4")
    basis = dmo_basis(3, cutoff)
    K0 = _kinetic_3d(basis)  # sigma . a
    Sp = embed_spin(basis, 0, "+")
    Sm = embed_spin(basis, 0, "-")
    Q1 = Sp @ K0 + Sm @ K0.dagger()
    Q2 = (-1j) * (Sp @ K0) + 1j * (Sm @ K0.dagger())
    H = _build_3d(basis, m=1.0, omega=2.0)
    H2m1 = (H @ H) - identity(basis)
    mask = basis.safe_mask(buffer)
    residual = 0.0
    for a, Qa in enumerate((Q1, Q2)):
        for b, Qb in enumerate((Q1, Q2)):
            R = Qa.anticommutator(Qb)
            if a == b:
                R = R - H2m1
            residual = max(residual, R.max_abs(mask))
    return residual


def orbital_angular_momentum(basis: BasisSpec) -> list[OperatorMatrix]:
    """L_k = -i eps_kij a_i^dag a_j on the three Cartesian modes."""
    a = [make_ladder(basis, i) for i in range(3)]
    ad = [x.dagger() for x in a]
    Lx = (-1j) * (ad[1] @ a[2] - ad[2] @ a[1])
    Ly = (-1j) * (ad[2] @ a[0] - ad[0] @ a[2])
    Lz = (-1j) * (ad[0] @ a[1] - ad[1] @ a[0])
    return [Lx, Ly, Lz]


def fw_equivalence_check(params: DmoParams, cutoff: int, buffer: int = 2) -> float:
    """Spectral gap between H^2 and its even (block-diagonal) closed form.

    H^2 equals m^2 + (w/2) [(2N + 3) + (3 + 2 L.sigma) Sigma_3], the square of
    the exactly transformed hamiltonian.  Both sides conserve total quanta, so
    the spectra are compared sector by sector below the truncation edge; the
    return value is the worst multiset distance over safe sectors.
    """
    if params.dimension != 3:
        raise PreconditionError("the equivalence check is a 3D statement")
    basis = dmo_basis(3, cutoff)
    H = _build_3d(basis, params.m, params.omega)
    H2 = H @ H

    L = orbital_angular_momentum(basis)
    LS = None
    for k, axis in enumerate(("x", "y", "z")):
        term = L[k] @ embed_spin(basis, 1, axis)
        LS = term if LS is None else LS + term
    N = OperatorMatrix(basis, np.diag(basis.total_quanta.astype(np.complex128)))
    S3 = embed_spin(basis, 0, "z")
    operand = (
        params.m**2 * identity(basis)
        + 0.5 * params.omega * (2.0 * N + 3.0 * identity(basis))
        + 0.5 * params.omega * ((3.0 * identity(basis) + 2.0 * LS) @ S3)
    )

    quanta = basis.total_quanta
    worst = 0.0
    for sector in range(cutoff - buffer + 1):
        idx = np.flatnonzero(quanta == sector)
        vals_h2 = np.linalg.eigvalsh(H2.entries[np.ix_(idx, idx)])
        vals_op = np.linalg.eigvalsh(operand.entries[np.ix_(idx, idx)])
        worst = max(worst, float(np.abs(vals_h2 - vals_op).max()))
    return worst


def free_fw_check(m: float, momenta) -> float:
    """Free-particle check: the 4x4 hamiltonian at momentum p has eigenvalues
    +-sqrt(p^2 + m^2), each twice.  Returns the worst deviation."""
    sig = [
        np.array([[0, 1], [1, 0]], dtype=np.complex128),
        np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
        np.array([[1, 0], [0, -1]], dtype=np.complex128),
    ]
    worst = 0.0
    for p in momenta:
        p = np.asarray(p, dtype=np.float64)
        sp = sum(p[i] * sig[i] for i in range(3))
        H = np.block(
            [
                [m * np.eye(2), 1j * sp],
                [-1j * sp, -m * np.eye(2)],
            ]
        )
        evals = np.sort(np.linalg.eigvalsh(H))
        e = math.sqrt(float(p @ p) + m * m)
        expected = np.sort(np.array([-e, -e, e, e]))
        worst = max(worst, float(np.abs(evals - expected).max()))
    return worst


# ---------------------------------------------------------------------------
# two-particle closed form
# ---------------------------------------------------------------------------

PARITY_NATURAL = "natural"  # P = (-)^j
PARITY_UNNATURAL = "unnatural"  # P = -(-)^j


def two_particle_spectrum(omega: float, N: int, s: int, parity: str) -> list[float]:
    """Closed-form two-particle energies {-E, 0, +E} for the requested sector.

    The zero eigenvalue is always present: the two single-particle energies
    enter with opposite signs, so they can cancel for any number of quanta.
    """
    if N < 0:
        raise LabelError(f"N must be non-negative, got {N}")
    if s not in (0, 1):
        raise LabelError(f"total spin must be 0 or 1, got {s}")
    if parity not in (PARITY_NATURAL, PARITY_UNNATURAL):
        raise LabelError(f"parity must be 'natural' or 'unnatural', got {parity!r}")
    if s == 0:
        if parity != PARITY_NATURAL:
            raise LabelError("s = 0 exists only with natural parity")
        shift = 0
    elif parity == PARITY_NATURAL:
        shift = 2
    else:
        shift = 1
    e = 2.0 * math.sqrt(1.0 + omega * (N + shift))
    return [-e, 0.0, e]
