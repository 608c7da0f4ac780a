import numpy as np
import pytest
from hypothesis import given, strategies as st

from ctxcollapse.calculus import SpectrumFunction, apply_function, preimage_of_set
from ctxcollapse.collapse import MeasurementEvent, to_update_map
from ctxcollapse.equivalence import (
    bases_commute,
    check_post_processing,
    contextual_event_equal_implies_same_projector,
    events_equivalent_projector,
    exhibit_ttt_inconsistency,
    partition_functions,
    updates_agree_by_sampling,
)
from ctxcollapse.errors import BasisMismatch, NotCoarseGraining
from ctxcollapse.operators import canonical_basis, eigendecompose, random_basis, random_hermitian, relabel_basis

seeds = st.integers(0, 2**31 - 1)


def test_square_witness_on_pauli_z():
    sd = eigendecompose(np.diag([1.0, -1.0]))
    g = SpectrumFunction.from_callable(lambda a: a * a, sd)
    (v,) = check_post_processing(sd, g, "noncontextual")
    assert v.probability_equal and not v.update_equal and not v.expected_update_equal
    assert np.isclose(v.witness.trace_distance, 0.5, atol=1e-9)


def test_inconsistency_numbers():
    sd = eigendecompose(np.diag([1.0, -1.0]))
    rep = exhibit_ttt_inconsistency(sd, SpectrumFunction.from_callable(lambda a: a * a, sd))
    assert abs(rep.trace_distance - 0.5) <= 1e-9
    assert abs(rep.frobenius_distance - 1 / np.sqrt(2)) <= 1e-9
    assert rep.standard_state.is_pure()
    assert np.allclose(rep.subjective_state.matrix, np.eye(2) / 2)


def test_inconsistency_needs_coarse_graining():
    sd = eigendecompose(np.diag([1.0, 2.0]))
    with pytest.raises(NotCoarseGraining):
        exhibit_ttt_inconsistency(sd, SpectrumFunction.from_pairs([[1, 3], [2, 4]]))


def test_preimage_events_are_equivalent():
    sd = eigendecompose(np.diag([1.0, -1.0, 0.0]))
    g = SpectrumFunction.from_callable(lambda a: a * a, sd)
    gsd = apply_function(g, sd)
    e1 = MeasurementEvent(gsd, (1.0,))
    e2 = MeasurementEvent(sd, preimage_of_set(g, sd, [1]))
    assert events_equivalent_projector(e1, e2)
    assert not events_equivalent_projector(e1, MeasurementEvent(sd, (1.0,)))


@given(seeds, st.integers(2, 4))
def test_dichotomy_for_every_partition(seed, k):
    sd = eigendecompose(random_hermitian(k + 1, seed, spectrum=list(range(k)) + [0]))
    for g in partition_functions(sd):
        for v in check_post_processing(sd, g, "noncontextual", subsets=True, with_witness=False):
            assert v.as_expected


@given(seeds)
def test_contextual_updates_always_agree(seed):
    sd = eigendecompose(random_hermitian(4, seed, spectrum=[1, 1, -1, 0]))
    g = SpectrumFunction.from_callable(lambda a: a * a, sd)
    for v in check_post_processing(sd, g, "contextual", subsets=True, n_random_bases=3, seed=seed):
        assert v.update_equal and v.probability_equal


@given(seeds, seeds)
def test_choi_verdict_agrees_with_sampling(seed, sseed):
    sd = eigendecompose(random_hermitian(3, seed, spectrum=[-1, 1, 2]))
    g = SpectrumFunction.from_callable(lambda a: a * a, sd)
    gsd = apply_function(g, sd)
    for beta in gsd.eigenvalues:
        ev_g = MeasurementEvent(gsd, (beta,))
        ev_a = MeasurementEvent(sd, preimage_of_set(g, sd, [beta]))
        choi_equal = to_update_map("standard", ev_g).equals(to_update_map("subjective", ev_a))
        sampled = updates_agree_by_sampling("standard", ev_g, "subjective", ev_a, seed=sseed)
        assert choi_equal == sampled


def test_bases_commute_only_when_equal():
    sd = eigendecompose(np.diag([1.0, 1.0, 2.0]))
    b0, b1 = canonical_basis(sd), random_basis(sd, 3)
    assert bases_commute(b0, b0, sd)
    assert bases_commute(b1, random_basis(sd, 3), sd)
    assert not bases_commute(b0, b1, sd)
    with pytest.raises(BasisMismatch):
        bases_commute(b0, canonical_basis(eigendecompose(np.eye(2))))


def test_contextual_equal_updates_share_projector():
    sd = eigendecompose(np.diag([2.0, 0.0, 0.0, -2.0]))
    g = SpectrumFunction.from_callable(lambda a: a * a, sd)
    gsd = apply_function(g, sd)
    basis = random_basis(sd, 1)
    e1 = MeasurementEvent(gsd, (4.0,), relabel_basis(basis, gsd))
    e2 = MeasurementEvent(sd, (-2.0, 2.0), basis)
    assert to_update_map("contextual", e1).equals(to_update_map("contextual", e2))
    assert contextual_event_equal_implies_same_projector(e1, e2)


def test_verdict_json_is_plain():
    import json

    sd = eigendecompose(np.diag([1.0, -1.0]))
    (v,) = check_post_processing(sd, SpectrumFunction.from_callable(abs, sd), "noncontextual")
    json.dumps(v.to_json())
