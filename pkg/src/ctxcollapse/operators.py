"""Dense complex linear algebra: observables, spectral projectors, density states
and measurement bases.

Every value here is immutable once built. Numpy arrays held by these objects are
marked read-only so they can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import BasisMismatch, NonHermitianInput, NumericalFailure, UnknownSpectralPoint


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


def fro(x) -> float:
    return float(np.linalg.norm(x, "fro"))


def dagger(x: np.ndarray) -> np.ndarray:
    return x.conj().T


def as_square_matrix(data) -> np.ndarray:
    """Coerce ``data`` to a complex square matrix, raising ValueError otherwise."""
    m = np.asarray(data, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def matrices_equal(x, y, tol: Tolerances = DEFAULT_TOL) -> bool:
    x = np.asarray(x)
    return fro(x - np.asarray(y)) <= tol.eq_tol * x.shape[0]


def commutator(x, y) -> np.ndarray:
    return x @ y - y @ x


def trace_distance(x, y) -> float:
    """Half the trace norm of ``x - y`` for Hermitian arguments."""
    d = np.asarray(x) - np.asarray(y)
    d = (d + dagger(d)) / 2
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(d))))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """An observable: a Hermitian ``n x n`` complex matrix."""

    matrix: np.ndarray
    herm_tol: float = DEFAULT_TOL.herm_tol

    def __post_init__(self):
        try:
            m = as_square_matrix(self.matrix)
        except ValueError as exc:
            raise NonHermitianInput(str(exc)) from None
        n = m.shape[0]
        if not np.all(np.isfinite(m)):
            raise NonHermitianInput("matrix has non-finite entries")
        skew = fro(m - dagger(m))
        if skew > self.herm_tol * n:
            raise NonHermitianInput(f"||A - A^dagger||_F = {skew:.3e} exceeds {self.herm_tol * n:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Projector:
    """An orthogonal projection; ``rank`` is the rounded trace."""

    matrix: np.ndarray
    rank: int

    @classmethod
    def from_matrix(cls, m, tol: Tolerances = DEFAULT_TOL) -> "Projector":
        m = as_square_matrix(m)
        if fro(m @ m - m) > tol.proj_tol * m.shape[0] or fro(m - dagger(m)) > tol.proj_tol * m.shape[0]:
            raise NumericalFailure("matrix is not an orthogonal projection")
        return cls(_frozen(m), int(round(np.trace(m).real)))

    @classmethod
    def zero(cls, n: int) -> "Projector":
        return cls(_frozen(np.zeros((n, n))), 0)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct eigenvalues (ascending) with their spectral projectors.

    ``cluster_radius`` is the absolute distance under which two reals are
    treated as the same spectral point; it is used when snapping user-supplied
    outcomes onto the stored eigenvalues.
    """

    eigenvalues: tuple
    projectors: tuple
    dim: int
    cluster_radius: float = 1e-12

    @property
    def matrix(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for a, p in zip(self.eigenvalues, self.projectors):
            out += a * p.matrix
        return out

    @property
    def ranks(self) -> tuple:
        return tuple(p.rank for p in self.projectors)

    @property
    def is_degenerate(self) -> bool:
        return len(self.eigenvalues) < self.dim

    def index_of(self, value: float) -> int:
        vals = np.asarray(self.eigenvalues)
        i = int(np.argmin(np.abs(vals - value)))
        if abs(vals[i] - value) > max(self.cluster_radius, 1e-12):
            raise UnknownSpectralPoint(f"{value!r} is not an eigenvalue (spectrum {list(self.eigenvalues)})")
        return i

    def snap(self, value: float) -> float:
        return self.eigenvalues[self.index_of(value)]

    def snap_set(self, values: Iterable[float]) -> tuple:
        """Snap every element onto the spectrum; result is sorted and deduplicated."""
        return tuple(sorted({self.snap(v) for v in values}))

    def projector_of(self, value: float) -> Projector:
        return self.projectors[self.index_of(value)]

    def check_invariants(self, tol: Tolerances = DEFAULT_TOL) -> None:
        n = self.dim
        eye = np.eye(n)
        total = sum((p.matrix for p in self.projectors), np.zeros((n, n), dtype=complex))
        if fro(total - eye) > tol.eq_tol * n:
            raise NumericalFailure("spectral projectors do not sum to the identity")
        for i, p in enumerate(self.projectors):
            for j, q in enumerate(self.projectors):
                target = p.matrix if i == j else 0.0
                if fro(p.matrix @ q.matrix - target) > tol.eq_tol * n:
                    raise NumericalFailure(f"projectors {i} and {j} are not orthogonal")
        if list(self.eigenvalues) != sorted(self.eigenvalues) or len(set(self.eigenvalues)) != len(self.eigenvalues):
            raise NumericalFailure("eigenvalues must be strictly ascending")


def _cluster_sorted(values: np.ndarray, radius: float) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] > radius:
            groups.append([i])
        else:
            groups[-1].append(i)
    return groups


def eigendecompose(A, cluster_tol: float | None = None, tol: Tolerances = DEFAULT_TOL) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix with degeneracy clustering.

    Raw eigenvalues closer than ``cluster_tol * max(1, ||A||_F)`` to their
    neighbour are merged into one spectral point whose projector is the sum of
    the corresponding eigenprojectors.
    """
    op = A if isinstance(A, HermitianOperator) else HermitianOperator(A, herm_tol=tol.herm_tol)
    m = op.matrix
    n = op.dim
    ctol = tol.cluster_tol if cluster_tol is None else cluster_tol
    radius = ctol * max(1.0, fro(m))

    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    eigenvalues = []
    projectors = []
    for group in _cluster_sorted(w, radius):
        vecs = v[:, group]
        eigenvalues.append(float(np.mean(w[group])))
        projectors.append(Projector(_frozen(vecs @ dagger(vecs)), len(group)))

    sd = SpectralDecomposition(tuple(eigenvalues), tuple(projectors), n, radius)
    err = fro(sd.matrix - m)
    if err > tol.recon_tol * n:
        raise NumericalFailure(f"reconstruction error {err:.3e} exceeds {tol.recon_tol * n:.3e}")
    return sd


def spectral_projector(sd: SpectralDecomposition, delta: Iterable[float]) -> Projector:
    """Sum of the spectral projectors of the points in ``delta``."""
    idx = sorted({sd.index_of(d) for d in delta})
    if not idx:
        return Projector.zero(sd.dim)
    if len(idx) == len(sd.eigenvalues):
        return Projector(_frozen(np.eye(sd.dim)), sd.dim)
    m = sum(sd.projectors[i].matrix for i in idx)
    return Projector(_frozen(m), sum(sd.projectors[i].rank for i in idx))


@dataclass(frozen=True, eq=False)
class DensityState:
    """A density operator, or the absorbing null state (the zero matrix)."""

    matrix: np.ndarray
    is_null: bool = False
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        m = as_square_matrix(self.matrix)
        n = m.shape[0]
        if self.is_null:
            if np.any(m != 0):
                raise ValueError("null state must be the zero matrix")
        else:
            if fro(m - dagger(m)) > self.tol.herm_tol * n:
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(m).real - 1.0) > self.tol.eq_tol * n:
                raise ValueError(f"density matrix has trace {np.trace(m).real!r}")
            if np.linalg.eigvalsh((m + dagger(m)) / 2)[0] < -self.tol.psd_tol:
                raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def null(cls, n: int) -> "DensityState":
        return cls(np.zeros((n, n)), is_null=True)

    @classmethod
    def pure(cls, psi) -> "DensityState":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValueError("cannot build a pure state from the zero vector")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def from_unnormalized(cls, m, tol: Tolerances = DEFAULT_TOL) -> "DensityState":
        """Re-Hermitize and renormalize ``m``; a zero-trace input becomes the null state."""
        m = as_square_matrix(m)
        m = (m + dagger(m)) / 2
        t = np.trace(m).real
        if t <= 0:
            return cls.null(m.shape[0])
        return cls(m / t, tol=tol)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def is_pure(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        return not self.is_null and abs(self.purity - 1.0) <= tol.eq_tol * self.dim


def random_density(n: int, seed: int) -> DensityState:
    """Full-rank state ``G G^dagger / tr(G G^dagger)`` for a complex Gaussian ``G``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ dagger(g)
    return DensityState(rho / np.trace(rho).real)


def random_pure_state(n: int, seed: int) -> DensityState:
    rng = np.random.default_rng(seed)
    return DensityState.pure(rng.standard_normal(n) + 1j * rng.standard_normal(n))


def maximally_mixed(n: int) -> DensityState:
    if n < 1:
        raise ValueError("n must be >= 1")
    return DensityState(np.eye(n) / n)


def random_hermitian(n: int, seed: int, spectrum: Sequence[float] | None = None) -> HermitianOperator:
    """``U diag(spectrum) U^dagger`` with a Haar-random unitary ``U``.

    Without ``spectrum`` the eigenvalues are drawn from a small integer set so
    that degeneracies show up often.
    """
    rng = np.random.default_rng(seed)
    if spectrum is None:
        spectrum = rng.integers(-2, 3, size=n).astype(float)
    u = random_unitary(n, rng)
    m = u @ np.diag(np.asarray(spectrum, dtype=float)) @ dagger(u)
    return HermitianOperator((m + dagger(m)) / 2)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """A rank-one resolution of the identity with an eigenvalue label per element."""

    projectors: tuple
    labels: tuple

    def __post_init__(self):
        ps = tuple(_frozen(as_square_matrix(p)) for p in self.projectors)
        if len(ps) != len(self.labels):
            raise BasisMismatch("one label per basis projector is required")
        object.__setattr__(self, "projectors", ps)
        object.__setattr__(self, "labels", tuple(float(x) for x in self.labels))

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def check(self, tol: Tolerances = DEFAULT_TOL) -> None:
        n = self.dim
        if len(self.projectors) != n:
            raise BasisMismatch(f"a basis of C^{n} needs {n} projectors, got {len(self.projectors)}")
        total = np.zeros((n, n), dtype=complex)
        for i, p in enumerate(self.projectors):
            if p.shape != (n, n):
                raise BasisMismatch("basis projectors have inconsistent shapes")
            if abs(np.trace(p).real - 1) > tol.proj_tol * n:
                raise BasisMismatch(f"basis element {i} is not rank one")
            for j in range(i, n):
                target = p if i == j else 0.0
                if fro(p @ self.projectors[j] - target) > tol.proj_tol * n:
                    raise BasisMismatch(f"basis elements {i} and {j} are not orthogonal projections")
            total += p
        if fro(total - np.eye(n)) > tol.proj_tol * n:
            raise BasisMismatch("basis projectors do not sum to the identity")

    def check_for(self, sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> None:
        """Raise BasisMismatch unless every ``E_i`` satisfies ``E_i A = alpha_i E_i``."""
        self.check(tol)
        if self.dim != sd.dim:
            raise BasisMismatch(f"basis dimension {self.dim} differs from observable dimension {sd.dim}")
        a = sd.matrix
        for i, (p, label) in enumerate(zip(self.projectors, self.labels)):
            try:
                alpha = sd.snap(label)
            except UnknownSpectralPoint:
                raise BasisMismatch(f"label {label!r} of basis element {i} is not an eigenvalue") from None
            if fro(p @ a - alpha * p) > tol.eq_tol * sd.dim:
                raise BasisMismatch(f"basis element {i} is not an eigenprojector for {alpha!r}")

    def indices_for(self, sd: SpectralDecomposition, delta: Iterable[float]) -> list[int]:
        wanted = {sd.index_of(d) for d in delta}
        return [i for i, label in enumerate(self.labels) if sd.index_of(label) in wanted]


def _eigenspace_vectors(p: np.ndarray, rank: int) -> np.ndarray:
    # Pivoted Gram-Schmidt on the projected standard basis: reproduces e_k for
    # diagonal observables and is deterministic otherwise.
    n = p.shape[0]
    chosen: list[np.ndarray] = []
    residual = p.copy()
    for _ in range(rank):
        norms = np.linalg.norm(residual, axis=0)
        k = int(np.argmax(norms))
        if norms[k] < 1e-8:
            raise NumericalFailure("projector rank exceeds its numerical range")
        v = residual[:, k] / norms[k]
        chosen.append(v)
        residual = residual - np.outer(v, v.conj() @ residual)
    return np.column_stack(chosen) if chosen else np.zeros((n, 0), dtype=complex)


def eigenvectors(sd: SpectralDecomposition) -> list[np.ndarray]:
    """Deterministic orthonormal eigenvectors, one ``n x r`` block per spectral point."""
    return [_eigenspace_vectors(np.array(p.matrix), p.rank) for p in sd.projectors]


def basis_from_vectors(vectors, sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> MeasurementBasis:
    """Build a basis for ``sd`` from orthonormal vectors; labels are inferred."""
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    projectors = []
    for v in vecs:
        v = v / np.linalg.norm(v)
        projectors.append(np.outer(v, v.conj()))
    return relabel_basis(projectors, sd, tol)


def relabel_basis(projectors, sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> MeasurementBasis:
    """Attach to each rank-one projector the eigenvalue of ``sd`` whose eigenspace contains it.

    A basis for ``A`` is also a basis for every ``g(A)``; this is how it is
    transported.
    """
    if isinstance(projectors, MeasurementBasis):
        projectors = projectors.projectors
    labels = []
    for i, p in enumerate(projectors):
        p = np.asarray(p)
        for alpha, e in zip(sd.eigenvalues, sd.projectors):
            if fro(e.matrix @ p - p) <= tol.eq_tol * sd.dim:
                labels.append(alpha)
                break
        else:
            raise BasisMismatch(f"basis element {i} lies in no eigenspace of the observable")
    basis = MeasurementBasis(tuple(projectors), tuple(labels))
    basis.check_for(sd, tol)
    return basis


def canonical_basis(sd: SpectralDecomposition) -> MeasurementBasis:
    projectors, labels = [], []
    for alpha, block in zip(sd.eigenvalues, eigenvectors(sd)):
        for k in range(block.shape[1]):
            v = block[:, k]
            projectors.append(np.outer(v, v.conj()))
            labels.append(alpha)
    return MeasurementBasis(tuple(projectors), tuple(labels))


def random_basis(sd: SpectralDecomposition, seed: int) -> MeasurementBasis:
    """Canonical basis rotated by a seeded random unitary inside each degenerate eigenspace."""
    rng = np.random.default_rng(seed)
    projectors, labels = [], []
    for alpha, block in zip(sd.eigenvalues, eigenvectors(sd)):
        r = block.shape[1]
        if r > 1:
            block = block @ random_unitary(r, rng)
        for k in range(r):
            v = block[:, k]
            projectors.append(np.outer(v, v.conj()))
            labels.append(alpha)
    return MeasurementBasis(tuple(projectors), tuple(labels))
