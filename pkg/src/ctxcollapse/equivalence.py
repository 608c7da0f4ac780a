"""Equivalence of measurement events and post-processing verdicts.

Update maps are compared through the Choi matrices of their unnormalized
linear parts. When two maps differ a witness state is searched for, first the
superposition ``(phi_0 + phi_1) / sqrt(2)`` of eigenvectors from two merged
spectral points, then seeded random pure states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .calculus import SpectrumFunction, apply_function, preimage_partition, set_partitions
from .collapse import (
    MeasurementEvent,
    apply_update,
    contextual_subjective_collapse,
    standard_collapse,
    subjective_collapse,
    to_update_map,
)
from .config import DEFAULT_TOL, Tolerances
from .encoding import encode_matrix, encode_vector
from .errors import BasisMismatch, NotCoarseGraining
from .operators import (
    DensityState,
    MeasurementBasis,
    SpectralDecomposition,
    canonical_basis,
    eigenvectors,
    fro,
    matrices_equal,
    maximally_mixed,
    random_basis,
    random_density,
    random_pure_state,
    relabel_basis,
    trace_distance,
)

SEMANTICS = ("noncontextual", "contextual")


@dataclass(frozen=True, eq=False)
class Witness:
    """An input state on which two updates disagree, with both outputs."""

    state: DensityState
    output_a: DensityState
    output_b: DensityState
    distance: float
    trace_distance: float

    def to_json(self) -> dict:
        return {
            "state": encode_matrix(self.state.matrix),
            "output_a": None if self.output_a.is_null else encode_matrix(self.output_a.matrix),
            "output_b": None if self.output_b.is_null else encode_matrix(self.output_b.matrix),
            "distance": self.distance,
            "trace_distance": self.trace_distance,
        }


@dataclass(frozen=True, eq=False)
class EquivalenceVerdict:
    case: dict
    probability_equal: bool
    update_equal: bool
    expected_update_equal: bool
    choi_distance: float
    witness: Witness | None = None

    @property
    def as_expected(self) -> bool:
        return self.probability_equal and self.update_equal == self.expected_update_equal

    def to_json(self) -> dict:
        out = {
            "case": self.case,
            "probability_equal": self.probability_equal,
            "update_equal": self.update_equal,
            "expected_update_equal": self.expected_update_equal,
            "choi_distance": self.choi_distance,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["distance"] = self.witness.distance
        return out


def events_equivalent_projector(e1: MeasurementEvent, e2: MeasurementEvent, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``(D1, A1) ~ (D2, A2)`` iff ``chi_D1(A1) = chi_D2(A2)``."""
    if e1.dim != e2.dim:
        return False
    return fro(e1.projector - e2.projector) <= tol.eq_tol * e1.dim


def _output_distance(a: DensityState, b: DensityState) -> float:
    return fro(a.matrix - b.matrix)


def find_witness(
    kind_a: str,
    event_a: MeasurementEvent,
    kind_b: str,
    event_b: MeasurementEvent,
    candidates: Sequence[DensityState] = (),
    seed: int = 0,
    attempts: int = 64,
    tol: Tolerances = DEFAULT_TOL,
) -> Witness | None:
    n = event_a.dim
    pool = itertools.chain(candidates, (random_pure_state(n, [seed, k]) for k in range(attempts)))
    for rho in pool:
        out_a = apply_update(kind_a, event_a, rho, tol)
        out_b = apply_update(kind_b, event_b, rho, tol)
        d = _output_distance(out_a, out_b)
        if d > tol.eq_tol * n:
            return Witness(rho, out_a, out_b, d, trace_distance(out_a.matrix, out_b.matrix))
    return None


def updates_agree_by_sampling(
    kind_a: str,
    event_a: MeasurementEvent,
    kind_b: str,
    event_b: MeasurementEvent,
    n_states: int = 20,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> bool:
    """Randomized counterpart of Choi comparison: evaluate both rules on random full-rank states."""
    n = event_a.dim
    for k in range(n_states):
        rho = random_density(n, [seed, k])
        if _output_distance(apply_update(kind_a, event_a, rho, tol), apply_update(kind_b, event_b, rho, tol)) > tol.eq_tol * n:
            return False
    return True


def _superposition_candidate(sd: SpectralDecomposition, alphas: Sequence[float]) -> list[DensityState]:
    if len(alphas) < 2:
        return []
    vecs = eigenvectors(sd)
    phi0 = vecs[sd.index_of(alphas[0])][:, 0]
    phi1 = vecs[sd.index_of(alphas[1])][:, 0]
    return [DensityState.pure((phi0 + phi1) / np.sqrt(2))]


def _nonempty_subsets(values: Sequence[float]) -> Iterator[tuple]:
    for r in range(1, len(values) + 1):
        yield from itertools.combinations(values, r)


def sample_bases(sd: SpectralDecomposition, n_random: int = 8, seed: int = 0) -> list[tuple[str, MeasurementBasis]]:
    """The canonical eigenbasis plus ``n_random`` seeded rotations inside degenerate eigenspaces."""
    out = [("canonical", canonical_basis(sd))]
    out += [(f"random-{k}", random_basis(sd, [seed, k])) for k in range(n_random)]
    return out


def check_post_processing(
    sd: SpectralDecomposition,
    g: SpectrumFunction,
    semantics: str = "noncontextual",
    *,
    subsets: bool = False,
    bases: Sequence[tuple[str, MeasurementBasis]] | None = None,
    n_random_bases: int = 8,
    seed: int = 0,
    with_witness: bool = True,
    tol: Tolerances = DEFAULT_TOL,
) -> list[EquivalenceVerdict]:
    """Compare the update of ``(D, g(A))`` with that of ``(g^{-1}(D), A)``.

    ``noncontextual``: the ``g(A)`` side uses the standard rule (the subjective
    rule when ``D`` has several points) and the ``A`` side the subjective rule.
    Updates agree exactly when every point of ``D`` has a one-point preimage.

    ``contextual``: both sides use the contextual rule with the same basis of
    ``A`` (relabelled for ``g(A)``); updates always agree.

    ``D`` ranges over single points of ``sigma(g(A))``, or over all nonempty
    subsets with ``subsets=True``.
    """
    if semantics not in SEMANTICS:
        raise ValueError(f"unknown semantics {semantics!r}; expected one of {SEMANTICS}")
    gsd = apply_function(g, sd, tol)
    blocks = dict(preimage_partition(g, sd, tol).blocks)
    deltas = list(_nonempty_subsets(gsd.eigenvalues)) if subsets else [(b,) for b in gsd.eigenvalues]

    verdicts = []
    if semantics == "noncontextual":
        for delta in deltas:
            pre = tuple(sorted(a for b in delta for a in blocks[b]))
            ev_g = MeasurementEvent(gsd, delta)
            ev_a = MeasurementEvent(sd, pre)
            kind_g = "standard" if len(delta) == 1 else "subjective"
            verdicts.append(
                _verdict(
                    {"semantics": semantics, "delta": list(delta), "preimage": list(pre)},
                    kind_g, ev_g, "subjective", ev_a,
                    expected=all(len(blocks[b]) == 1 for b in delta),
                    candidates=_superposition_candidate(sd, _first_merged(delta, blocks)),
                    with_witness=with_witness, seed=seed, tol=tol,
                )
            )
        return verdicts

    if bases is None:
        bases = sample_bases(sd, n_random_bases, seed)
    for name, basis in bases:
        gbasis = relabel_basis(basis, gsd, tol)
        for delta in deltas:
            pre = tuple(sorted(a for b in delta for a in blocks[b]))
            ev_g = MeasurementEvent(gsd, delta, gbasis)
            ev_a = MeasurementEvent(sd, pre, basis)
            verdicts.append(
                _verdict(
                    {"semantics": semantics, "basis": name, "delta": list(delta), "preimage": list(pre)},
                    "contextual", ev_g, "contextual", ev_a,
                    expected=True, candidates=(), with_witness=with_witness, seed=seed, tol=tol,
                )
            )
    return verdicts


def _first_merged(delta, blocks) -> tuple:
    for b in delta:
        if len(blocks[b]) > 1:
            return blocks[b]
    return ()


def _verdict(case, kind_a, ev_a, kind_b, ev_b, *, expected, candidates, with_witness, seed, tol) -> EquivalenceVerdict:
    m_a = to_update_map(kind_a, ev_a, tol)
    m_b = to_update_map(kind_b, ev_b, tol)
    equal = m_a.equals(m_b, tol)
    witness = None
    if not equal and with_witness:
        witness = find_witness(kind_a, ev_a, kind_b, ev_b, candidates, seed=seed, tol=tol)
    return EquivalenceVerdict(
        case=case,
        probability_equal=events_equivalent_projector(ev_a, ev_b, tol),
        update_equal=equal,
        expected_update_equal=expected,
        choi_distance=m_a.distance(m_b),
        witness=witness,
    )


@dataclass(frozen=True, eq=False)
class InconsistencyReport:
    """Two different post-measurement states for one physical situation.

    ``standard_state`` comes from the standard rule applied to ``(beta, g(A))``;
    ``subjective_state`` from the subjective rule applied to ``(g^{-1}(beta), A)``,
    which post-processing says must be the same event.
    """

    beta: float
    preimage: tuple
    psi: np.ndarray
    standard_state: DensityState
    subjective_state: DensityState
    trace_distance: float
    frobenius_distance: float

    def to_json(self) -> dict:
        return {
            "beta": self.beta,
            "preimage": list(self.preimage),
            "psi": encode_vector(self.psi),
            "standard_state": encode_matrix(self.standard_state.matrix),
            "subjective_state": encode_matrix(self.subjective_state.matrix),
            "trace_distance": self.trace_distance,
            "frobenius_distance": self.frobenius_distance,
        }


def exhibit_ttt_inconsistency(sd: SpectralDecomposition, g: SpectrumFunction, tol: Tolerances = DEFAULT_TOL) -> InconsistencyReport:
    """Show that standard collapse, subjective collapse and post-processing clash.

    Raises NotCoarseGraining when ``g`` is injective on the spectrum, since then
    no clash exists.
    """
    gsd = apply_function(g, sd, tol)
    for beta, block in preimage_partition(g, sd, tol).blocks:
        if len(block) > 1:
            break
    else:
        raise NotCoarseGraining("g is injective on the spectrum; both updates coincide")
    vecs = eigenvectors(sd)
    psi = (vecs[sd.index_of(block[0])][:, 0] + vecs[sd.index_of(block[1])][:, 0]) / np.sqrt(2)
    rho = DensityState.pure(psi)
    s1 = standard_collapse(rho, beta, gsd, tol)
    s2 = subjective_collapse(rho, block, sd, tol)
    return InconsistencyReport(
        beta=beta,
        preimage=block,
        psi=psi,
        standard_state=s1,
        subjective_state=s2,
        trace_distance=trace_distance(s1.matrix, s2.matrix),
        frobenius_distance=fro(s1.matrix - s2.matrix),
    )


def bases_commute(b1: MeasurementBasis, b2: MeasurementBasis, sd: SpectralDecomposition | None = None, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff every ``E_i`` commutes with every ``F_j``; for bases of one observable, iff they coincide."""
    if b1.dim != b2.dim:
        raise BasisMismatch("bases act on spaces of different dimension")
    if sd is not None:
        b1.check_for(sd, tol)
        b2.check_for(sd, tol)
    n = b1.dim
    return all(fro(e @ f - f @ e) <= tol.eq_tol * n for e in b1.projectors for f in b2.projectors)


def contextual_event_equal_implies_same_projector(e1: MeasurementEvent, e2: MeasurementEvent, tol: Tolerances = DEFAULT_TOL) -> bool:
    """If two contextual events update identically, they share their event projector.

    Evaluates both maps on the maximally mixed state, where the contextual
    update returns ``E_D / tr(E_D)``. Events with different maps pass vacuously.
    """
    if e1.basis is None or e2.basis is None:
        raise BasisMismatch("contextual events must carry a measurement basis")
    if e1.dim != e2.dim:
        return True
    if not to_update_map("contextual", e1, tol).equals(to_update_map("contextual", e2, tol), tol):
        return True
    phi = maximally_mixed(e1.dim)
    s1 = contextual_subjective_collapse(phi, e1.outcomes, e1.sd, e1.basis, tol).matrix
    s2 = contextual_subjective_collapse(phi, e2.outcomes, e2.sd, e2.basis, tol).matrix
    p1 = e1.projector / np.trace(e1.projector).real
    p2 = e2.projector / np.trace(e2.projector).real
    return (
        matrices_equal(s1, p1, tol)
        and matrices_equal(s2, p2, tol)
        and matrices_equal(s1, s2, tol)
        and events_equivalent_projector(e1, e2, tol)
    )


def partition_functions(sd: SpectralDecomposition) -> Iterator[SpectrumFunction]:
    """One function per partition pattern of the spectrum; block ``k`` maps to ``float(k)``."""
    for part in set_partitions(sd.eigenvalues):
        table = [(a, float(k)) for k, block in enumerate(part) for a in block]
        yield SpectrumFunction(tuple(table))
