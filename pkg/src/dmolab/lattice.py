"""Site/coupling geometry shared by the chain and hexagonal lattice builders."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .spectral import FLOAT_FMT, SpectrumResult

SUBLATTICE_A = "A"
SUBLATTICE_B = "B"


@dataclass(frozen=True)
class Site:
    id: int
    sublattice: str
    position: tuple[float, ...]


@dataclass
class LatticeGeometry:
    """Sites plus symmetric weighted couplings; positions are for export and
    visualization, the hamiltonian reads only the couplings."""

    sites: list[Site] = field(default_factory=list)
    couplings: list[tuple[int, int, float]] = field(default_factory=list)

    def __post_init__(self):
        ids = [s.id for s in self.sites]
        if ids != list(range(len(self.sites))):
            raise ValidationError("site ids must be consecutive from 0")
        for i, j, w in self.couplings:
            if i == j:
                raise ValidationError(f"self-coupling on site {i}")
            if w <= 0:
                raise ValidationError(f"non-positive coupling {w} on ({i}, {j})")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def sublattice_mask(self, tag: str) -> np.ndarray:
        return np.array([s.sublattice == tag for s in self.sites])

    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.sites], dtype=np.float64)

    def to_json(self) -> str:
        dims = ("x", "y")
        sites = []
        for s in self.sites:
            rec = {"id": s.id, "sublattice": s.sublattice}
            for k, v in zip(dims, s.position):
                rec[k] = v
            sites.append(rec)
        payload = {
            "sites": sites,
            "couplings": [
                {"i": i, "j": j, "delta": w} for i, j, w in self.couplings
            ],
        }
        return json.dumps(payload, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LatticeGeometry":
        payload = json.loads(text)
        sites = []
        for rec in payload["sites"]:
            pos = tuple(rec[k] for k in ("x", "y") if k in rec)
            sites.append(Site(rec["id"], rec["sublattice"], pos))
        couplings = [(c["i"], c["j"], c["delta"]) for c in payload["couplings"]]
        return cls(sites, couplings)


def tight_binding_matrix(
    geometry: LatticeGeometry, alpha: float, beta: float
) -> np.ndarray:
    """Real symmetric hamiltonian: site energies by sublattice, bond couplings."""
    n = geometry.n_sites
    H = np.zeros((n, n), dtype=np.float64)
    for s in geometry.sites:
        H[s.id, s.id] = alpha if s.sublattice == SUBLATTICE_A else beta
    for i, j, w in geometry.couplings:
        H[i, j] += w
        H[j, i] += w
    return H


def diagonalize_lattice(
    geometry: LatticeGeometry, alpha: float, beta: float, want_vectors: bool = False
) -> SpectrumResult:
    H = tight_binding_matrix(geometry, alpha, beta)
    if want_vectors:
        evals, evecs = np.linalg.eigh(H)
        return SpectrumResult(evals, evecs)
    return SpectrumResult(np.linalg.eigvalsh(H))


def dispersion_csv(rows: list[tuple[float, ...]], header: str) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(FLOAT_FMT % v for v in row))
    return "\n".join(lines) + "\n"
