"""Functional calculus on finite spectra.

A function of an observable is given extensionally, as a table on the
spectrum. Only the restriction to the spectrum matters for ``g(A)``, and tables
serialize cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DomainMismatch, UnknownSpectralPoint
from .operators import (
    HermitianOperator,
    MeasurementBasis,
    Projector,
    SpectralDecomposition,
    _cluster_sorted,
    _frozen,
)


@dataclass(frozen=True)
class SpectrumFunction:
    """A real function on a finite set of eigenvalues, stored as ``((alpha, g(alpha)), ...)``."""

    table: tuple

    def __post_init__(self):
        pairs = tuple(sorted((float(a), float(b)) for a, b in self.table))
        object.__setattr__(self, "table", pairs)

    @classmethod
    def from_callable(cls, fn: Callable[[float], float], sd: SpectralDecomposition) -> "SpectrumFunction":
        return cls(tuple((a, fn(a)) for a in sd.eigenvalues))

    @classmethod
    def from_pairs(cls, pairs) -> "SpectrumFunction":
        return cls(tuple((a, b) for a, b in pairs))

    @property
    def domain(self) -> tuple:
        return tuple(a for a, _ in self.table)

    def to_json(self) -> list:
        return [[a, b] for a, b in self.table]

    def values_on(self, sd: SpectralDecomposition) -> list[float]:
        """g(alpha) for each eigenvalue of ``sd`` in order; the table must cover exactly the spectrum."""
        out: list[float | None] = [None] * len(sd.eigenvalues)
        for a, b in self.table:
            try:
                i = sd.index_of(a)
            except UnknownSpectralPoint:
                raise DomainMismatch(f"table entry {a!r} is not an eigenvalue") from None
            if out[i] is not None and out[i] != b:
                raise DomainMismatch(f"table assigns two values to eigenvalue {sd.eigenvalues[i]!r}")
            out[i] = b
        missing = [sd.eigenvalues[i] for i, v in enumerate(out) if v is None]
        if missing:
            raise DomainMismatch(f"table misses eigenvalues {missing}")
        return out  # type: ignore[return-value]

    def then(self, h: "SpectrumFunction", sd: SpectralDecomposition) -> "SpectrumFunction":
        """The composition ``h o g`` as a table on the spectrum of ``sd``.

        ``h`` must be a table on the spectrum of ``g(A)``.
        """
        gsd = apply_function(self, sd)
        hv = dict(zip(gsd.eigenvalues, h.values_on(gsd)))
        return SpectrumFunction(tuple((a, hv[gsd.snap(b)]) for a, b in zip(sd.eigenvalues, self.values_on(sd))))


def _merge_values(values: list[float], weights: list[int], cluster_tol: float) -> list[list[int]]:
    norm = float(np.sqrt(sum(w * v * v for v, w in zip(values, weights))))
    radius = cluster_tol * max(1.0, norm)
    order = sorted(range(len(values)), key=lambda i: values[i])
    groups = _cluster_sorted(np.array([values[i] for i in order]), radius)
    return [[order[k] for k in g] for g in groups]


def apply_function(g: SpectrumFunction, sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> SpectralDecomposition:
    """Spectral decomposition of ``g(A) = sum_alpha g(alpha) E_alpha``.

    Spectral points with (numerically) equal images are merged; the projector of
    ``beta`` is the sum of ``E_alpha`` over ``g(alpha) = beta``.
    """
    values = g.values_on(sd)
    groups = _merge_values(values, list(sd.ranks), tol.cluster_tol)
    norm = float(np.sqrt(sum(p.rank * v * v for v, p in zip(values, sd.projectors))))
    eigenvalues, projectors = [], []
    for group in groups:
        eigenvalues.append(float(np.mean([values[i] for i in group])))
        m = sum(sd.projectors[i].matrix for i in group)
        projectors.append(Projector(_frozen(m), sum(sd.projectors[i].rank for i in group)))
    return SpectralDecomposition(tuple(eigenvalues), tuple(projectors), sd.dim, tol.cluster_tol * max(1.0, norm))


@dataclass(frozen=True)
class PreimagePartition:
    """Blocks ``beta -> g^{-1}(beta)`` partitioning the spectrum of ``A``."""

    blocks: tuple  # ((beta, (alpha, ...)), ...) sorted by beta

    def as_dict(self) -> dict:
        return dict(self.blocks)

    def preimage(self, beta: float) -> tuple:
        for b, block in self.blocks:
            if b == beta:
                return block
        raise UnknownSpectralPoint(f"{beta!r} is not in the image")


def preimage_partition(g: SpectrumFunction, sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> PreimagePartition:
    values = g.values_on(sd)
    groups = _merge_values(values, list(sd.ranks), tol.cluster_tol)
    blocks = []
    for group in groups:
        beta = float(np.mean([values[i] for i in group]))
        blocks.append((beta, tuple(sorted(sd.eigenvalues[i] for i in group))))
    return PreimagePartition(tuple(blocks))


def preimage_of_set(g: SpectrumFunction, sd: SpectralDecomposition, delta: Iterable[float], tol: Tolerances = DEFAULT_TOL) -> tuple:
    """``g^{-1}(delta)`` as a sorted tuple of eigenvalues of ``A``; ``delta`` is snapped onto ``sigma(g(A))``."""
    gsd = apply_function(g, sd, tol)
    wanted = set(gsd.snap_set(delta))
    part = preimage_partition(g, sd, tol)
    return tuple(sorted(a for beta, block in part.blocks if beta in wanted for a in block))


def is_coarse_graining(g: SpectrumFunction, sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> bool:
    return any(len(block) > 1 for _, block in preimage_partition(g, sd, tol).blocks)


def induced_nondegenerate_family(basis: MeasurementBasis, coefficient_seed: int, tol: Tolerances = DEFAULT_TOL) -> HermitianOperator:
    """A nondegenerate observable ``sum_i c_i E_i`` diagonal in ``basis``.

    Coefficients are redrawn until pairwise distinct beyond the clustering
    radius, so the result is nondegenerate and the basis's own observable is a
    function of it.
    """
    rng = np.random.default_rng(coefficient_seed)
    n = len(basis.projectors)
    while True:
        c = rng.standard_normal(n)
        radius = tol.cluster_tol * max(1.0, float(np.linalg.norm(c)))
        # a generous margin keeps eigendecompose from merging neighbours
        if n == 1 or np.min(np.diff(np.sort(c))) > 1e3 * radius:
            break
    m = sum(ci * p for ci, p in zip(c, basis.projectors))
    return HermitianOperator((m + m.conj().T) / 2)


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items`` (Bell-number many), in a fixed order."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
