"""State-update rules after a measurement event.

Four rules are provided:

* ``standard``      -- ``E_a rho E_a / tr(rho E_a)`` for a single outcome.
* ``subjective``    -- the mixture ``sum_{a in D} E_a rho E_a / tr(rho E_D)``
  for an outcome known only to lie in ``D``.
* ``lueders_block`` -- ``E_D rho E_D / tr(rho E_D)``; kept to exhibit how it
  disagrees with the mixture (it leaves ``rho`` untouched for ``D = sigma(A)``).
* ``contextual``    -- as ``subjective`` but dephasing in a chosen
  measurement basis: ``sum_{i: a_i in D} E_i rho E_i / tr(rho E_D)``.

Every rule maps a zero-probability event (``p <= prob_floor``) and the null
state to the null state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import BasisMismatch, NumericalFailure
from .operators import (
    DensityState,
    MeasurementBasis,
    SpectralDecomposition,
    _frozen,
    dagger,
    fro,
    spectral_projector,
)

KINDS = ("standard", "subjective", "lueders_block", "contextual")


def _finish(unnormalized: np.ndarray, p: float, tol: Tolerances) -> DensityState:
    x = unnormalized / p
    x = (x + dagger(x)) / 2
    return DensityState(x / np.trace(x).real, tol=tol)


def _probability(rho: DensityState, e: np.ndarray) -> float:
    return float(np.trace(rho.matrix @ e).real)


def born_probability(rho: DensityState, delta: Iterable[float], sd: SpectralDecomposition) -> float:
    """``tr(rho E_delta)``, clamped to ``[0, 1]``."""
    e = spectral_projector(sd, delta).matrix
    if rho.is_null:
        return 0.0
    return min(1.0, max(0.0, _probability(rho, e)))


def standard_collapse(rho: DensityState, alpha: float, sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> DensityState:
    e = sd.projector_of(alpha).matrix
    if rho.is_null:
        return DensityState.null(sd.dim)
    p = _probability(rho, e)
    if p <= tol.prob_floor:
        return DensityState.null(sd.dim)
    return _finish(e @ rho.matrix @ e, p, tol)


def subjective_collapse(rho: DensityState, delta: Iterable[float], sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> DensityState:
    """Update after learning only that the outcome lies in ``delta``.

    Equal to the mixture of the standard collapses ``rho_a`` weighted by the
    conditional probabilities ``tr(rho E_a) / tr(rho E_delta)``.
    """
    delta = sd.snap_set(delta)
    if not delta:
        raise ValueError("outcome set must be nonempty")
    if rho.is_null:
        return DensityState.null(sd.dim)
    p = _probability(rho, spectral_projector(sd, delta).matrix)
    if p <= tol.prob_floor:
        return DensityState.null(sd.dim)
    out = np.zeros((sd.dim, sd.dim), dtype=complex)
    for a in delta:
        e = sd.projector_of(a).matrix
        out += e @ rho.matrix @ e
    return _finish(out, p, tol)


def loss_of_outcome(rho: DensityState, sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> DensityState:
    """``sum_a E_a rho E_a``: measuring ``A`` and discarding the result."""
    return subjective_collapse(rho, sd.eigenvalues, sd, tol)


def lueders_block_collapse(rho: DensityState, delta: Iterable[float], sd: SpectralDecomposition, tol: Tolerances = DEFAULT_TOL) -> DensityState:
    delta = sd.snap_set(delta)
    if not delta:
        raise ValueError("outcome set must be nonempty")
    if rho.is_null:
        return DensityState.null(sd.dim)
    e = spectral_projector(sd, delta).matrix
    p = _probability(rho, e)
    if p <= tol.prob_floor:
        return DensityState.null(sd.dim)
    return _finish(e @ rho.matrix @ e, p, tol)


def contextual_subjective_collapse(
    rho: DensityState,
    delta: Iterable[float],
    sd: SpectralDecomposition,
    basis: MeasurementBasis,
    tol: Tolerances = DEFAULT_TOL,
) -> DensityState:
    """Dephase in ``basis`` over the elements whose labels lie in ``delta``, normalized by ``tr(rho E_delta)``."""
    basis.check_for(sd, tol)
    delta = sd.snap_set(delta)
    if not delta:
        raise ValueError("outcome set must be nonempty")
    if rho.is_null:
        return DensityState.null(sd.dim)
    p = _probability(rho, spectral_projector(sd, delta).matrix)
    if p <= tol.prob_floor:
        return DensityState.null(sd.dim)
    out = np.zeros((sd.dim, sd.dim), dtype=complex)
    for i in basis.indices_for(sd, delta):
        e = basis.projectors[i]
        out += e @ rho.matrix @ e
    return _finish(out, p, tol)


def contextual_collapse(rho: DensityState, alpha: float, sd: SpectralDecomposition, basis: MeasurementBasis, tol: Tolerances = DEFAULT_TOL) -> DensityState:
    return contextual_subjective_collapse(rho, (alpha,), sd, basis, tol)


@dataclass(frozen=True, eq=False)
class MeasurementEvent:
    """``(delta, A)`` or, with a basis, ``(delta, A, basis)``.

    ``outcomes`` is snapped onto the spectrum of ``A`` at construction.
    """

    sd: SpectralDecomposition
    outcomes: tuple
    basis: MeasurementBasis | None = None

    def __post_init__(self):
        delta = self.sd.snap_set(self.outcomes)
        if not delta:
            raise ValueError("a measurement event needs at least one outcome")
        object.__setattr__(self, "outcomes", delta)
        if self.basis is not None:
            self.basis.check_for(self.sd)

    @property
    def observable(self) -> np.ndarray:
        return self.sd.matrix

    @property
    def dim(self) -> int:
        return self.sd.dim

    @property
    def projector(self) -> np.ndarray:
        return spectral_projector(self.sd, self.outcomes).matrix

    def describe(self) -> dict:
        return {"outcomes": list(self.outcomes), "spectrum": list(self.sd.eigenvalues), "basis": self.basis is not None}


def kraus_operators(kind: str, event: MeasurementEvent) -> list[np.ndarray]:
    """Kraus operators of the unnormalized linear part of an update rule."""
    sd, delta = event.sd, event.outcomes
    if kind == "standard":
        if len(delta) != 1:
            raise ValueError("the standard rule applies to single-outcome events")
        return [np.array(sd.projector_of(delta[0]).matrix)]
    if kind == "subjective":
        return [np.array(sd.projector_of(a).matrix) for a in delta]
    if kind == "lueders_block":
        return [np.array(spectral_projector(sd, delta).matrix)]
    if kind == "contextual":
        if event.basis is None:
            raise BasisMismatch("the contextual rule needs a measurement basis")
        return [np.array(event.basis.projectors[i]) for i in event.basis.indices_for(sd, delta)]
    raise ValueError(f"unknown update kind {kind!r}; expected one of {KINDS}")


def choi_from_kraus(kraus: list[np.ndarray], n: int) -> np.ndarray:
    """``sum_{kl} |k><l| (x) Phi(|k><l|)`` for ``Phi(X) = sum_j K_j X K_j^dagger``."""
    c = np.zeros((n * n, n * n), dtype=complex)
    for k in kraus:
        v = k.T.reshape(-1)
        c += np.outer(v, v.conj())
    return c


@dataclass(frozen=True, eq=False)
class UpdateMap:
    kind: str
    event: MeasurementEvent
    choi: np.ndarray

    @property
    def dim(self) -> int:
        return self.event.dim

    def unnormalized(self, rho: np.ndarray) -> np.ndarray:
        n = self.dim
        return np.einsum("kl,kalb->ab", np.asarray(rho), self.choi.reshape(n, n, n, n))

    def apply(self, rho: DensityState, tol: Tolerances = DEFAULT_TOL) -> DensityState:
        if rho.is_null:
            return DensityState.null(self.dim)
        out = self.unnormalized(rho.matrix)
        p = np.trace(out).real
        if p <= tol.prob_floor:
            return DensityState.null(self.dim)
        return _finish(out, p, tol)

    def distance(self, other: "UpdateMap") -> float:
        if self.choi.shape != other.choi.shape:
            return float("inf")
        return fro(self.choi - other.choi)

    def equals(self, other: "UpdateMap", tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.distance(other) <= tol.eq_tol * self.dim**2


def to_update_map(kind: str, event: MeasurementEvent, tol: Tolerances = DEFAULT_TOL) -> UpdateMap:
    n = event.dim
    c = choi_from_kraus(kraus_operators(kind, event), n)
    if fro(c - dagger(c)) > tol.eq_tol * n * n or np.linalg.eigvalsh(c)[0] < -tol.psd_tol * n * n:
        raise NumericalFailure("Choi matrix is not positive semidefinite")
    return UpdateMap(kind, event, _frozen(c))


def apply_update(kind: str, event: MeasurementEvent, rho: DensityState, tol: Tolerances = DEFAULT_TOL) -> DensityState:
    """Apply a rule through its direct state formula (not through the Choi matrix)."""
    if kind == "standard":
        if len(event.outcomes) != 1:
            raise ValueError("the standard rule applies to single-outcome events")
        return standard_collapse(rho, event.outcomes[0], event.sd, tol)
    if kind == "subjective":
        return subjective_collapse(rho, event.outcomes, event.sd, tol)
    if kind == "lueders_block":
        return lueders_block_collapse(rho, event.outcomes, event.sd, tol)
    if kind == "contextual":
        if event.basis is None:
            raise BasisMismatch("the contextual rule needs a measurement basis")
        return contextual_subjective_collapse(rho, event.outcomes, event.sd, event.basis, tol)
    raise ValueError(f"unknown update kind {kind!r}; expected one of {KINDS}")
