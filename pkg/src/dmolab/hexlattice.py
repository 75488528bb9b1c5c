"""Hexagonal (graphene-like) lattice: dispersion, Dirac cones, second-neighbor
anisotropy, and the two-dimensional oscillator deformation.

Conventions: the A sublattice is generated by a1 = (sqrt(3), 0) and
a2 = (-sqrt(3)/2, 3/2); the B sublattice sits at A + b1 with nearest-neighbor
vectors b1 = (0, 1), b2 = (-sqrt(3)/2, -1/2), b3 = (sqrt(3)/2, -1/2), all
scaled by the length lambda.  Bloch phases use phi_i = lambda k . b_i and the
Dirac points are located numerically.

The deformation keeps the b1 couplings at Delta while the b2/b3 couplings
depend on single lattice coordinates, t2(p)^2 = Delta^2 - c2 (p - 1) and
t3(s)^2 = Delta^2 + c3 s with s = p - q and c2 + c3 = omega.  Opposite sides
of every hexagon then carry equal couplings and the right-chiral hopping
operator obeys [a_r, a_r^dag] = omega exactly on interior sites.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import PreconditionError, RangeError, ValidationError
from .lattice import (
    SUBLATTICE_A,
    SUBLATTICE_B,
    LatticeGeometry,
    Site,
    diagonalize_lattice,
)
from .spectral import FLOAT_FMT, SpectrumResult

A_VECTORS = np.array(
    [
        [math.sqrt(3.0), 0.0],
        [-math.sqrt(3.0) / 2.0, 1.5],
        [-math.sqrt(3.0) / 2.0, -1.5],
    ]
)
B_VECTORS = np.array(
    [
        [0.0, 1.0],
        [-math.sqrt(3.0) / 2.0, -0.5],
        [math.sqrt(3.0) / 2.0, -0.5],
    ]
)


@dataclass(frozen=True)
class HexParams:
    Delta: float = 1.0
    Delta_prime: float = 0.0
    Lambda: float = 1.0
    lambda_const: float = 1.0
    M: float = 0.0
    E0: float = 0.0
    omega: float = 0.0
    radius: int = 5
    angle_split: float = 0.5

    def __post_init__(self):
        if self.Delta <= 0:
            raise ValidationError(f"Delta must be positive, got {self.Delta}")
        if self.Delta_prime < 0:
            raise ValidationError(f"Delta_prime must be non-negative, got {self.Delta_prime}")
        if self.omega < 0:
            raise ValidationError(f"omega must be non-negative, got {self.omega}")
        if self.radius < 1:
            raise ValidationError(f"radius must be at least 1, got {self.radius}")
        if not 0.0 <= self.angle_split <= 1.0:
            raise ValidationError(f"angle_split must lie in [0, 1], got {self.angle_split}")

    @property
    def alpha(self) -> float:
        return self.E0 + self.M

    @property
    def beta(self) -> float:
        return self.E0 - self.M


# ---------------------------------------------------------------------------
# dispersion
# ---------------------------------------------------------------------------


def phase_sum(params: HexParams, k) -> np.ndarray:
    """f(k) = sum_i exp(i lambda k . b_i); vanishes at the Dirac points."""
    k = np.atleast_2d(np.asarray(k, dtype=np.float64))
    phases = params.lambda_const * (k @ B_VECTORS.T)
    out = np.exp(1j * phases).sum(axis=1)
    return out[0] if out.shape == (1,) else out


def second_neighbor_sum(params: HexParams, k) -> np.ndarray:
    """g(k) = sum_i 2 cos(lambda k . a_i)."""
    k = np.atleast_2d(np.asarray(k, dtype=np.float64))
    phases = params.lambda_const * (k @ A_VECTORS.T)
    out = 2.0 * np.cos(phases).sum(axis=1)
    return out[0] if out.shape == (1,) else out


def hex_dispersion(params: HexParams, k) -> tuple[np.ndarray, np.ndarray]:
    """First-neighbor two-band dispersion E0 +- sqrt(D^2 |f|^2 + M^2)."""
    if params.omega != 0.0:
        raise PreconditionError("dispersion is defined for the periodic lattice only")
    root = np.sqrt(params.Delta**2 * np.abs(phase_sum(params, k)) ** 2 + params.M**2)
    return params.E0 + root, params.E0 - root


def second_neighbor_dispersion(params: HexParams, k) -> np.ndarray:
    """|Delta f(k) + Delta' g(k)|, the massless band with second neighbors.

    The second-neighbor hops enter the same kinetic channel as the
    first-neighbor ones, which is what breaks the cone isotropy.
    """
    if params.M != 0.0:
        raise PreconditionError("the second-neighbor form is massless")
    return np.abs(
        params.Delta * phase_sum(params, k)
        + params.Delta_prime * second_neighbor_sum(params, k)
    )


def ideal_dirac_point(params: HexParams, sign: int = 1) -> np.ndarray:
    """The first-neighbor degeneracy point (+-4 pi / (3 sqrt(3) lambda), 0)."""
    return np.array([sign * 4.0 * math.pi / (3.0 * math.sqrt(3.0) * params.lambda_const), 0.0])


def find_dirac_point(params: HexParams, guess=None) -> np.ndarray:
    """Numerically locate a zero of Delta f + Delta' g near `guess`."""
    if guess is None:
        guess = ideal_dirac_point(params)

    def residual(k):
        h = params.Delta * phase_sum(params, k) + params.Delta_prime * second_neighbor_sum(params, k)
        return [h.real, h.imag]

    sol = least_squares(residual, np.asarray(guess, dtype=np.float64), xtol=1e-15, ftol=1e-15)
    r = residual(sol.x)
    if math.hypot(r[0], r[1]) > 1e-10:
        raise PreconditionError(
            f"no degeneracy point near {guess}; residual {math.hypot(r[0], r[1]):.3e}"
        )
    return sol.x


@dataclass(frozen=True)
class ConicSection:
    """Linearization data at a degeneracy point: E ~ sqrt((k.u)^2 + (k.v)^2)."""

    u: np.ndarray
    v: np.ndarray
    principal_axes: np.ndarray
    k0: np.ndarray

    @property
    def axis_ratio(self) -> float:
        lo, hi = self.principal_axes
        return math.sqrt(hi / lo)


def conic_analysis(params: HexParams, k0_shifted) -> ConicSection:
    """Gradient vectors and cone principal axes at a located degeneracy point."""
    k0 = np.asarray(k0_shifted, dtype=np.float64)
    lam, D, Dp = params.lambda_const, params.Delta, params.Delta_prime
    phases_b = lam * (B_VECTORS @ k0)
    phases_a = lam * (A_VECTORS @ k0)
    u = lam * D * (np.cos(phases_b)[:, None] * B_VECTORS).sum(axis=0)
    v = lam * D * (np.sin(phases_b)[:, None] * B_VECTORS).sum(axis=0)
    v = v + 2.0 * lam * Dp * (np.sin(phases_a)[:, None] * A_VECTORS).sum(axis=0)
    form = np.outer(u, u) + np.outer(v, v)
    axes = np.linalg.eigvalsh(form)
    return ConicSection(u=u, v=v, principal_axes=axes, k0=k0)


def cone_slope(params: HexParams) -> float:
    """Exact linear-cone slope |dE/dk| at a first-neighbor Dirac point.

    For unit b_i the gradient magnitude is (3/2) Delta lambda in every
    direction.
    """
    return 1.5 * params.Delta * params.lambda_const


# ---------------------------------------------------------------------------
# finite lattices
# ---------------------------------------------------------------------------


def _flake_cells(radius: int) -> list[tuple[int, int]]:
    r = radius - 1
    return [
        (p, q)
        for p in range(-r, r + 1)
        for q in range(-r, r + 1)
        if abs(p + q) <= r
    ]


def _flake_sites(radius: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """A- and B-site lattice coordinates of a hexagon-of-hexagons flake."""
    a_set: set[tuple[int, int]] = set()
    b_set: set[tuple[int, int]] = set()
    for p, q in _flake_cells(radius):
        a_set.update([(p, q), (p + 1, q), (p + 1, q + 1)])
        b_set.update([(p, q), (p + 1, q), (p, q - 1)])
    return sorted(a_set), sorted(b_set)


#: B-site lattice offset reached from an A site along b_i.
_BOND_TARGET = {0: (0, 0), 1: (-1, -1), 2: (0, -1)}


def _site_positions(lam: float, coords, sublattice: str) -> list[tuple[float, float]]:
    out = []
    for p, q in coords:
        pos = lam * (p * A_VECTORS[0] + q * A_VECTORS[1])
        if sublattice == SUBLATTICE_B:
            pos = pos + lam * B_VECTORS[0]
        out.append((float(pos[0]), float(pos[1])))
    return out


def build_hex_lattice(params: HexParams) -> LatticeGeometry:
    """Hexagonal flake of `radius` rings of complete hexagonal cells.

    First-neighbor bonds carry Delta; with Delta_prime > 0 second-neighbor
    bonds are added on both sublattices.  Radius 1 is a single hexagon with
    6 sites and 6 bonds; interior sites have coordination 3.
    """
    a_coords, b_coords = _flake_sites(params.radius)
    a_index = {c: i for i, c in enumerate(a_coords)}
    b_index = {c: len(a_coords) + i for i, c in enumerate(b_coords)}
    sites = [
        Site(a_index[c], SUBLATTICE_A, pos)
        for c, pos in zip(a_coords, _site_positions(params.lambda_const, a_coords, SUBLATTICE_A))
    ] + [
        Site(b_index[c], SUBLATTICE_B, pos)
        for c, pos in zip(b_coords, _site_positions(params.lambda_const, b_coords, SUBLATTICE_B))
    ]
    couplings = []
    for (p, q), i in a_index.items():
        for bi, (dp, dq) in _BOND_TARGET.items():
            target = (p + dp, q + dq)
            j = b_index.get(target)
            if j is not None:
                couplings.append((i, j, params.Delta))
    if params.Delta_prime > 0.0:
        for index_map in (a_index, b_index):
            for (p, q), i in index_map.items():
                for dp, dq in ((1, 0), (0, 1), (1, 1)):
                    j = index_map.get((p + dp, q + dq))
                    if j is not None:
                        couplings.append((i, j, params.Delta_prime))
    return LatticeGeometry(sites, couplings)


def build_hex_torus(params: HexParams, nx: int, ny: int) -> tuple[LatticeGeometry, np.ndarray]:
    """Periodic patch of nx x ny cells plus its commensurate k grid.

    The numeric spectrum of the torus equals the two dispersion branches
    evaluated on the returned k points.
    """
    def a_id(p, q):
        return (p % nx) * ny + (q % ny)

    def b_id(p, q):
        return nx * ny + (p % nx) * ny + (q % ny)

    coords = [(p, q) for p in range(nx) for q in range(ny)]
    sites = [
        Site(a_id(p, q), SUBLATTICE_A, pos)
        for (p, q), pos in zip(coords, _site_positions(params.lambda_const, coords, SUBLATTICE_A))
    ] + [
        Site(b_id(p, q), SUBLATTICE_B, pos)
        for (p, q), pos in zip(coords, _site_positions(params.lambda_const, coords, SUBLATTICE_B))
    ]
    couplings = []
    seen = set()
    for p, q in coords:
        for bi, (dp, dq) in _BOND_TARGET.items():
            i, j = a_id(p, q), b_id(p + dp, q + dq)
            key = (min(i, j), max(i, j), bi)
            if key in seen:
                continue
            seen.add(key)
            couplings.append((i, j, params.Delta))
    geometry = LatticeGeometry(sites, couplings)

    lam = params.lambda_const
    cell = lam * np.array([A_VECTORS[0], A_VECTORS[1]]).T
    recips = 2.0 * math.pi * np.linalg.inv(cell).T
    ks = []
    for i in range(nx):
        for j in range(ny):
            ks.append(i / nx * recips[:, 0] + j / ny * recips[:, 1])
    return geometry, np.array(ks)


# ---------------------------------------------------------------------------
# deformation
# ---------------------------------------------------------------------------


def _deformed_coupling_laws(params: HexParams):
    """Coupling-squared laws (t1, t2(p), t3(s)) seeded at the central hexagon."""
    c2 = params.angle_split * params.omega
    c3 = (1.0 - params.angle_split) * params.omega
    D2 = params.Delta**2

    def t2sq(p: int) -> float:
        return D2 - c2 * (p - 1)

    def t3sq(s: int) -> float:
        return D2 + c3 * s

    return t2sq, t3sq


def max_deformable_radius(params: HexParams) -> int:
    """Largest flake radius keeping every squared coupling positive."""
    best = 0
    for radius in range(1, 100000):
        if not _deformation_feasible(params, radius):
            return best
        best = radius
    return best


def _deformation_feasible(params: HexParams, radius: int) -> bool:
    t2sq, t3sq = _deformed_coupling_laws(params)
    a_coords, _ = _flake_sites(radius)
    ps = [p for p, _ in a_coords]
    ss = [p - q for p, q in a_coords]
    return min(t2sq(max(ps)), t2sq(min(ps)), t3sq(max(ss)), t3sq(min(ss))) > 0.0


def deform_hex_lattice(params: HexParams) -> LatticeGeometry:
    """Flake whose couplings realize the right-chiral ladder algebra.

    Vertical (b1) bonds stay at Delta; b2 bonds depend only on the a1
    coordinate and b3 bonds only on the difference coordinate, stepping so
    each hexagon's opposite sides match and the commutator increment is
    omega.  The seed hexagon at the origin keeps all six couplings at Delta.
    Positions are laid out by walking bonds along their ideal directions with
    the coupling-law lengths (export only).
    """
    if params.omega == 0.0:
        return build_hex_lattice(params)
    if not _deformation_feasible(params, params.radius):
        raise RangeError(
            f"radius {params.radius} infeasible at omega = {params.omega}; "
            f"maximal feasible radius is {max_deformable_radius(params)}"
        )
    t2sq, t3sq = _deformed_coupling_laws(params)
    a_coords, b_coords = _flake_sites(params.radius)
    a_index = {c: i for i, c in enumerate(a_coords)}
    b_index = {c: len(a_coords) + i for i, c in enumerate(b_coords)}

    def bond_coupling(p: int, q: int, bi: int) -> float:
        if bi == 0:
            return params.Delta
        if bi == 1:
            return math.sqrt(t2sq(p))
        return math.sqrt(t3sq(p - q))

    couplings = []
    bond_list = []
    for (p, q), i in a_index.items():
        for bi, (dp, dq) in _BOND_TARGET.items():
            target = (p + dp, q + dq)
            j = b_index.get(target)
            if j is None:
                continue
            w = bond_coupling(p, q, bi)
            couplings.append((i, j, w))
            bond_list.append((i, j, bi, w))

    positions = _walk_positions(
        len(a_coords) + len(b_coords), bond_list, params
    )
    sites = []
    for c, i in a_index.items():
        sites.append(Site(i, SUBLATTICE_A, positions[i]))
    for c, j in b_index.items():
        sites.append(Site(j, SUBLATTICE_B, positions[j]))
    sites.sort(key=lambda s: s.id)
    return LatticeGeometry(sites, couplings)


def _walk_positions(n_sites, bond_list, params: HexParams):
    """Breadth-first embedding: each bond along its ideal direction, its
    length stretched by the separation offset of the coupling law."""
    lam, D, L = params.lambda_const, params.Delta, params.Lambda
    adj: dict[int, list] = {}
    for i, j, bi, w in bond_list:
        adj.setdefault(i, []).append((j, bi, w, +1))
        adj.setdefault(j, []).append((i, bi, w, -1))
    positions = {0: np.zeros(2)}
    queue = [0]
    while queue:
        cur = queue.pop(0)
        for other, bi, w, orient in adj.get(cur, ()):
            if other in positions:
                continue
            # separation offset from the squared-coupling law
            d = L * math.log(D * D / (w * w))
            step = lam * B_VECTORS[bi] * (1.0 + d / lam)
            positions[other] = positions[cur] + orient * step
            queue.append(other)
    return [
        (float(positions[i][0]), float(positions[i][1])) if i in positions else (0.0, 0.0)
        for i in range(n_sites)
    ]


# ---------------------------------------------------------------------------
# right-chiral operator and its commutator
# ---------------------------------------------------------------------------


def _classify_bonds(geometry: LatticeGeometry):
    """Bond direction class (b_i index) for every A-B coupling, from the A side."""
    a_ids = [s.id for s in geometry.sites if s.sublattice == SUBLATTICE_A]
    pos = geometry.positions()
    sub = {s.id: s.sublattice for s in geometry.sites}
    bonds = []
    for i, j, w in geometry.couplings:
        if sub[i] == sub[j]:
            continue  # second-neighbor bond
        a, b = (i, j) if sub[i] == SUBLATTICE_A else (j, i)
        direction = pos[b] - pos[a]
        direction = direction / np.linalg.norm(direction)
        scores = B_VECTORS @ direction
        bonds.append((a, b, int(np.argmax(scores)), w))
    return a_ids, bonds


def right_chiral_operator(geometry: LatticeGeometry) -> tuple[np.ndarray, np.ndarray]:
    """The deformed right-chiral hopping a_r and its interior-site mask.

    a_r is assembled from the geometry's couplings: each A-B bond of class
    b_i contributes |A><A + b_i - b1| on the A copy and |A + b1><A + b_i| on
    the B copy.  Interior sites are those whose three incident term targets
    all exist; [a_r, a_r^dag] equals omega times the identity there.
    """
    n = geometry.n_sites
    a_ids, bonds = _classify_bonds(geometry)
    pos = geometry.positions()
    lam_b1 = None
    # infer the lattice scale from any class-0 bond’s ideal direction
    index_of = {}
    for s in geometry.sites:
        index_of[(round(pos[s.id][0], 6), round(pos[s.id][1], 6), s.sublattice)] = s.id

    b_of_a = {}
    for a, b, bi, w in bonds:
        if bi == 0:
            b_of_a[a] = b
            if lam_b1 is None:
                lam_b1 = np.linalg.norm(pos[b] - pos[a])

    mat = np.zeros((n, n), dtype=np.float64)
    term_count = np.zeros(n, dtype=np.int64)
    a_partner = {b: a for a, b in b_of_a.items()}
    for a, b, bi, w in bonds:
        # |A><A + b_i - b1| : the A site paired (via b1) with this bond's B end
        src_a = a_partner.get(b)
        if src_a is not None:
            mat[a, src_a] += w
            term_count[a] += 1
        # |A + b1><A + b_i| : from the B end toward the b1 partner of the A end
        dst_b = b_of_a.get(a)
        if dst_b is not None:
            mat[dst_b, b] += w
            term_count[dst_b] += 1
    interior = term_count == 3
    return mat, interior


def chiral_commutator_residual(geometry: LatticeGeometry, omega: float) -> float:
    """Max |[a_r, a_r^dag] - omega I| over rows and columns of interior sites."""
    ar, interior = right_chiral_operator(geometry)
    comm = ar @ ar.T - ar.T @ ar
    target = np.where(interior, omega, 0.0)
    resid = comm - np.diag(target)
    keep = np.ix_(interior, interior)
    return float(np.abs(resid[keep]).max())


# ---------------------------------------------------------------------------
# spectra of finite lattices
# ---------------------------------------------------------------------------


def diagonalize_hex(
    geometry: LatticeGeometry, alpha: float, beta: float, want_vectors: bool = False
) -> SpectrumResult:
    return diagonalize_lattice(geometry, alpha, beta, want_vectors)


def bulk_filtered_levels(
    geometry: LatticeGeometry,
    alpha: float,
    beta: float,
    bulk_fraction: float = 0.6,
    weight_threshold: float = 0.5,
) -> np.ndarray:
    """Eigenvalues of states carrying most of their weight away from the rim.

    Rim physics is outside the oscillator analogy, so deformed-spectrum
    comparisons use states with at least `weight_threshold` probability
    inside `bulk_fraction` of the flake radius.
    """
    spec = diagonalize_lattice(geometry, alpha, beta, want_vectors=True)
    pos = geometry.positions()
    center = pos.mean(axis=0)
    r = np.linalg.norm(pos - center, axis=1)
    inside = r <= bulk_fraction * r.max()
    weight = (np.abs(spec.eigenvectors[inside, :]) ** 2).sum(axis=0)
    return spec.eigenvalues[weight >= weight_threshold]


def cluster_levels(values: np.ndarray, gap: float) -> list[float]:
    """Cluster近 near-degenerate eigenvalues; returns cluster means ascending."""
    values = np.sort(np.asarray(values, dtype=np.float64))
    if len(values) == 0:
        return []
    groups = [[values[0]]]
    for v in values[1:]:
        if v - groups[-1][-1] <= gap:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [float(np.mean(g)) for g in groups]


def dispersion_surface_csv(params: HexParams, kx, ky) -> str:
    out = io.StringIO()
    out.write("kx,ky,E_plus,E_minus\n")
    for x in kx:
        pts = np.column_stack([np.full(len(ky), x), ky])
        ep, em = hex_dispersion(params, pts)
        for y, p_, m_ in zip(ky, ep, em):
            out.write(
                f"{FLOAT_FMT % x},{FLOAT_FMT % y},{FLOAT_FMT % p_},{FLOAT_FMT % m_}\n"
            )
    return out.getvalue()
