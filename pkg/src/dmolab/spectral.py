"""Eigen-decomposition, exact time evolution, and spectrum serialization."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .operators import OperatorMatrix

HERMITICITY_TOL = 1e-10

#: Round-trip exact formatting for doubles in CSV output.
FLOAT_FMT = "%.17g"


@dataclass
class SpectrumResult:
    """Ascending eigenvalues with optional eigenvectors and per-level labels.

    Eigenvector columns are orthonormal.  `labels`, when present, is a list of
    dicts (one per level) with conserved-quantity values; the label keys
    become extra CSV columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    labels: list[dict] | None = None

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)
        order = np.argsort(self.eigenvalues, kind="stable")
        self.eigenvalues = self.eigenvalues[order]
        if self.eigenvectors is not None:
            self.eigenvectors = np.asarray(self.eigenvectors)[:, order]
        if self.labels is not None:
            self.labels = [self.labels[i] for i in order]

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def label_columns(self) -> list[str]:
        if not self.labels:
            return []
        cols: list[str] = []
        for rec in self.labels:
            for key in rec:
                if key not in cols:
                    cols.append(key)
        return cols

    def to_csv(self) -> str:
        """One eigenvalue per row; label keys become extra columns."""
        cols = self.label_columns()
        out = io.StringIO()
        out.write(",".join(["E"] + cols) + "\n")
        for i, e in enumerate(self.eigenvalues):
            row = [FLOAT_FMT % e]
            if cols:
                rec = self.labels[i] if self.labels else {}
                for c in cols:
                    v = rec.get(c, "")
                    if isinstance(v, float):
                        row.append(FLOAT_FMT % v)
                    else:
                        row.append(str(v))
            out.write(",".join(row) + "\n")
        return out.getvalue()


def diagonalize(H: OperatorMatrix, want_vectors: bool = True) -> SpectrumResult:
    """Full eigen-decomposition of a Hermitian operator.

    Raises ValidationError (carrying the max asymmetry) on non-Hermitian
    input.  Returned pairs satisfy ||Hv - Ev|| < 1e-9.
    """
    defect = H.hermiticity_defect()
    scale = max(1.0, float(np.abs(H.entries).max()))
    if defect > HERMITICITY_TOL * scale:
        raise ValidationError(
            f"matrix is not Hermitian: max |H - H^dagger| = {defect:.3e}"
        )
    if want_vectors:
        evals, evecs = np.linalg.eigh(H.entries)
        return SpectrumResult(evals, evecs)
    evals = np.linalg.eigvalsh(H.entries)
    return SpectrumResult(evals)


def evolve(H: OperatorMatrix, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Exact unitary evolution psi(t) = sum_k e^{-i E_k t} <v_k|psi0> v_k.

    Returns an array of shape (len(times), dim).  Norm is preserved to 1e-10
    at every sample.
    """
    psi0 = np.asarray(psi0, dtype=np.complex128)
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError(f"initial state norm is {norm:.12f}, expected 1")
    spec = diagonalize(H, want_vectors=True)
    coeffs = spec.eigenvectors.conj().T @ psi0
    times = np.asarray(times, dtype=np.float64)
    phases = np.exp(-1j * np.outer(times, spec.eigenvalues))
    return (phases * coeffs) @ spec.eigenvectors.T


def expectation(op: OperatorMatrix, psi: np.ndarray) -> complex:
    psi = np.asarray(psi, dtype=np.complex128)
    return complex(psi.conj() @ (op.entries @ psi))


def safe_weight(basis, vectors: np.ndarray, buffer: int = 2) -> np.ndarray:
    """Per-column probability weight on the safe (non-edge) subspace."""
    mask = basis.safe_mask(buffer)
    return (np.abs(vectors[mask, :]) ** 2).sum(axis=0)


def multiset_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max elementwise gap between two equally sized sorted value multisets."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.shape != b.shape:
        raise ValidationError(f"multiset sizes differ: {a.shape} vs {b.shape}")
    if len(a) == 0:
        return 0.0
    return float(np.abs(a - b).max())


def match_against(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Distance from each value to its nearest reference value."""
    values = np.asarray(values, dtype=np.float64)
    ref = np.sort(np.asarray(reference, dtype=np.float64))
    if len(ref) == 0:
        return np.full(len(values), np.inf)
    if len(ref) == 1:
        return np.abs(values - ref[0])
    idx = np.clip(np.searchsorted(ref, values), 1, len(ref) - 1)
    below = np.abs(values - ref[idx - 1])
    above = np.abs(values - ref[idx])
    return np.minimum(below, above)
