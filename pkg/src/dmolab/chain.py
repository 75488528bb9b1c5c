"""One-dimensional tight-binding chain and its oscillator deformation.

A periodic A/B chain carries the two-band dispersion
E(k) = E0 +- sqrt(D^2 |1 + e^{i 2 pi lambda k}|^2 + M^2).  Keeping the
intra-cell bond at Delta while the inter-cell bond squared falls by omega per
cell turns the coupling matrix into a bosonic ladder with an exactly uniform
[a, a^dag] = omega on the interior, and the low-lying spectrum into the
square-root tower E = E0 +- sqrt(omega n + M^2), n >= 1, plus one unpaired
level at E0 + M carried by the sublattice with the extra site.  The tower
states live near the strong-coupling end (the oscillator well bottom) with a
zone-edge sign alternation under a smooth nodeless envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, RangeError, ValidationError
from .lattice import (
    SUBLATTICE_A,
    SUBLATTICE_B,
    LatticeGeometry,
    Site,
    diagonalize_lattice,
)
from .spectral import SpectrumResult


@dataclass(frozen=True)
class ChainParams:
    alpha: float = 0.0
    beta: float = 0.0
    Delta: float = 1.0
    Lambda: float = 1.0
    lambda_const: float = 1.0
    n_cells: int = 100
    omega: float = 0.0

    def __post_init__(self):
        if self.Delta <= 0:
            raise ValidationError(f"Delta must be positive, got {self.Delta}")
        if self.Lambda <= 0:
            raise ValidationError(f"Lambda must be positive, got {self.Lambda}")
        if self.n_cells < 1:
            raise ValidationError(f"need at least one cell, got {self.n_cells}")

    @property
    def M(self) -> float:
        return 0.5 * (self.alpha - self.beta)

    @property
    def E0(self) -> float:
        return 0.5 * (self.alpha + self.beta)


def bloch_dispersion(params: ChainParams, k) -> tuple[np.ndarray, np.ndarray]:
    """Two-band dispersion of the periodic chain; period 1/lambda in k."""
    if params.omega != 0.0:
        raise PreconditionError("dispersion is defined for the periodic chain only")
    k = np.asarray(k, dtype=np.float64)
    phase = np.exp(2j * np.pi * params.lambda_const * k)
    root = np.sqrt(params.Delta**2 * np.abs(1.0 + phase) ** 2 + params.M**2)
    return params.E0 + root, params.E0 - root


def coupling_from_distance(Delta: float, Lambda: float, d) -> np.ndarray | float:
    """Exponential overlap decay: Delta e^{-d/Lambda}; d = 0 recovers Delta."""
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0):
        raise ValidationError("separation offsets must be non-negative")
    out = Delta * np.exp(-d / Lambda)
    return float(out) if out.ndim == 0 else out


def max_deformable_cells(Delta: float, omega: float) -> int:
    """Index of the natural edge, where the inter-cell coupling reaches zero."""
    return int(abs(Delta * Delta / omega))


def _deformation_window(params: ChainParams) -> np.ndarray:
    """Deformation indices n of the inter-cell bonds, in site order.

    The squared coupling of bond n is Delta^2 - n omega, anchored at the seed
    (n = 0, coupling Delta).  Short chains start at the seed; chains longer
    than the natural edge n_max extend to negative n (couplings above Delta,
    separations below the rest spacing), which keeps the ladder algebra exact
    around the seed where the oscillator states live.
    """
    if params.omega <= 0:
        raise PreconditionError("deformation needs omega > 0")
    n_max = max_deformable_cells(params.Delta, params.omega)
    if params.n_cells > 2 * n_max:
        raise RangeError(
            f"n_cells {params.n_cells} exceeds the supported range "
            f"2 n_max = {2 * n_max} at omega = {params.omega}"
        )
    hi = min(params.n_cells, n_max) - 1
    lo = hi - params.n_cells + 1
    return np.arange(lo, hi + 1, dtype=np.float64)


def deformed_couplings(params: ChainParams) -> np.ndarray:
    """Inter-cell couplings c_n = Delta sqrt(1 - n w / Delta^2), in site order.

    Squared couplings step down by omega per cell; the coupling-squared law
    matches the exponential distance law through Delta^2 e^{-d_n/Lambda} = c_n^2.
    """
    n = _deformation_window(params)
    return params.Delta * np.sqrt(1.0 - n * params.omega / params.Delta**2)


def distance_law(Delta: float, Lambda: float, omega: float, n) -> np.ndarray | float:
    """d_n = Lambda log(Delta^2 / (Delta^2 - n w)); d_0 = 0 at the seed."""
    n = np.asarray(n, dtype=np.float64)
    out = Lambda * np.log(Delta**2 / (Delta**2 - n * omega))
    return float(out) if out.ndim == 0 else out


def deformation_distances(params: ChainParams) -> np.ndarray:
    """Separation offsets of the inter-cell bonds, in site order."""
    return distance_law(
        params.Delta, params.Lambda, params.omega, _deformation_window(params)
    )


def build_periodic_chain(params: ChainParams, closed: bool = True) -> LatticeGeometry:
    """Uniform A/B chain with n_cells cells; `closed` adds the wrap bond."""
    sites = []
    spacing = 0.5 * params.lambda_const
    for c in range(params.n_cells):
        sites.append(Site(2 * c, SUBLATTICE_A, (2 * c * spacing,)))
        sites.append(Site(2 * c + 1, SUBLATTICE_B, ((2 * c + 1) * spacing,)))
    couplings = [
        (i, i + 1, params.Delta) for i in range(2 * params.n_cells - 1)
    ]
    if closed and params.n_cells > 1:
        couplings.append((2 * params.n_cells - 1, 0, params.Delta))
    return LatticeGeometry(sites, couplings)


def deform_chain(params: ChainParams) -> LatticeGeometry:
    """Open chain of 2 n_cells + 1 sites realizing the ladder algebra.

    Intra-cell bonds stay at Delta; inter-cell bonds carry c_n with
    c_n^2 = Delta^2 - n omega, ordered from the strongest coupling to the
    natural edge.  The A sublattice holds the extra site at both ends and
    carries the unpaired level at E0 + M (localized at the weak-coupling
    end); the square-root tower states concentrate around the seed.  Site
    positions are for export only and may overlap once the margin couplings
    exceed Delta.
    """
    cs = deformed_couplings(params)
    ds = deformation_distances(params)
    n_sites = 2 * params.n_cells + 1
    positions = np.zeros(n_sites)
    rest = 0.5 * params.lambda_const
    for s in range(1, n_sites):
        bond = s - 1
        # odd bonds are the inter-cell ones, stretched by d_n
        extra = ds[bond // 2] if bond % 2 == 1 else 0.0
        positions[s] = positions[s - 1] + rest + extra
    sites = [
        Site(s, SUBLATTICE_A if s % 2 == 0 else SUBLATTICE_B, (positions[s],))
        for s in range(n_sites)
    ]
    couplings = []
    for s in range(n_sites - 1):
        w = params.Delta if s % 2 == 0 else cs[s // 2]
        couplings.append((s, s + 1, float(w)))
    return LatticeGeometry(sites, couplings)


def diagonalize_chain(
    geometry: LatticeGeometry, alpha: float, beta: float, want_vectors: bool = False
) -> SpectrumResult:
    return diagonalize_lattice(geometry, alpha, beta, want_vectors)


def oscillator_levels(
    spectrum: SpectrumResult, E0: float, M: float, count: int
) -> np.ndarray:
    """Lowest `count` positive-branch levels above the unpaired E0 + M line.

    Levels are measured relative to E0; the single zero mode at E0 + M is
    excluded by thresholding just above it.
    """
    rel = spectrum.eigenvalues - E0
    guard = abs(M) + 1e-9
    above = np.sort(rel[rel > guard])
    if len(above) < count:
        raise PreconditionError(
            f"only {len(above)} levels above the zero mode, wanted {count}"
        )
    return above[:count]


def spectral_gap(spectrum: SpectrumResult, E0: float, M: float) -> float:
    """Gap around E0 between the two branches, excluding the unpaired level."""
    rel = spectrum.eigenvalues - E0
    keep = np.abs(rel - M) > 1e-9
    rel = rel[keep]
    above = rel[rel > 0]
    below = rel[rel < 0]
    if len(above) == 0 or len(below) == 0:
        raise PreconditionError("spectrum has no states on one side of E0")
    return float(above.min() - below.max())


def ground_state_envelope(
    geometry: LatticeGeometry,
    alpha: float,
    beta: float,
    omega: float,
    level: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """A-sublattice amplitudes of the lowest positive oscillator level.

    Picks the eigenvector nearest E0 + sqrt(M^2 + omega * level) and returns
    (site ids, normalized signed amplitudes) on the A sublattice.  The signs
    alternate between consecutive entries (zone-edge character) under a
    smooth nodeless envelope with a single plateau-tolerant maximum.
    """
    E0 = 0.5 * (alpha + beta)
    M = 0.5 * (alpha - beta)
    target = E0 + math.sqrt(M * M + omega * level)
    spec = diagonalize_lattice(geometry, alpha, beta, want_vectors=True)
    idx = int(np.argmin(np.abs(spec.eigenvalues - target)))
    vec = spec.eigenvectors[:, idx].real
    mask = geometry.sublattice_mask(SUBLATTICE_A)
    ids = np.flatnonzero(mask)
    amps = vec[ids]
    amps = amps / np.linalg.norm(amps)
    peak = int(np.argmax(np.abs(amps)))
    if amps[peak] < 0:
        amps = -amps
    return ids, amps


def envelope_is_unimodal(amps: np.ndarray, floor: float = 1e-8) -> bool:
    """True when |amps| has a single plateau-tolerant maximum on its support."""
    mod = np.abs(np.asarray(amps, dtype=np.float64))
    support = mod[mod > mod.max() * floor]
    slopes = np.sign(np.diff(support))
    slopes = slopes[slopes != 0]
    # unimodal: slopes are a (possibly empty) run of +1 followed by -1
    switches = int((np.diff(slopes) != 0).sum())
    if switches > 1:
        return False
    if switches == 1:
        first = np.flatnonzero(np.diff(slopes) != 0)[0]
        return slopes[first] > 0
    return True


def envelope_gaussian_r2(amps: np.ndarray, central_fraction: float = 0.6) -> float:
    """R^2 of log|envelope| against squared distance from the peak.

    The fit runs over the central fraction of the support, measured from the
    peak outward, which avoids the numerically empty tail.
    """
    mod = np.abs(amps)
    support = np.flatnonzero(mod > mod.max() * 1e-8)
    center = support[int(np.argmax(mod[support]))]
    # symmetric window around the peak covering the requested fraction
    half = max(2, int(0.5 * central_fraction * len(support)))
    lo = max(support.min(), center - half)
    hi = min(support.max(), center + half)
    window = np.arange(lo, hi + 1)
    x = (window - center).astype(np.float64) ** 2
    y = np.log(mod[window])
    coeffs = np.polyfit(x, y, 1)
    fit = np.polyval(coeffs, x)
    ss_res = float(((y - fit) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0
    return 1.0 - ss_res / ss_tot
