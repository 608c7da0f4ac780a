import numpy as np
import pytest

from ctxcollapse.calculus import SpectrumFunction
from ctxcollapse.errors import InvalidRelation, SearchSpaceTooLarge
from ctxcollapse.runner import load_scenario, bundled_corpus
from ctxcollapse.valuation import (
    NoValuationCertificate,
    ObservableFamily,
    Valuation,
    discover_functional_relations,
    search_valuation,
)

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1, -1])


def peres_mermin_family():
    data = load_scenario(bundled_corpus() / "valuation-peres-mermin.json")["payload"]["family"]
    return discover_functional_relations(ObservableFamily.from_json(data))


def parity_oracle_exists():
    # +-1 values on the nine squares; rows and the first two columns multiply to +1, the last column to -1.
    import itertools

    contexts = [(0, 1, 2, 1), (3, 4, 5, 1), (6, 7, 8, 1), (0, 3, 6, 1), (1, 4, 7, 1), (2, 5, 8, -1)]
    for v in itertools.product((1, -1), repeat=9):
        if all(v[a] * v[b] * v[c] == s for a, b, c, s in contexts):
            return True
    return False


def test_x_and_z_have_a_valuation():
    family = discover_functional_relations(ObservableFamily.from_matrices([X, Z]))
    assert family.relations == ()
    v = search_valuation(family)
    assert isinstance(v, Valuation) and v.is_valid(family)


def test_peres_mermin_has_no_valuation():
    family = peres_mermin_family()
    assert len(family.members) == 15
    cert = search_valuation(family)
    assert isinstance(cert, NoValuationCertificate)
    assert cert.assignments_tried > 0
    assert not parity_oracle_exists()


def test_peres_mermin_rows_multiply_to_plus_or_minus_identity():
    family = peres_mermin_family()
    m = [x.matrix for x in family.members[:9]]
    for r in range(3):
        assert np.allclose(m[3 * r] @ m[3 * r + 1], m[3 * r + 2])
    assert np.allclose(m[0] @ m[3], m[6])
    assert np.allclose(m[1] @ m[4], m[7])
    assert np.allclose(m[2] @ m[5], -m[8])


def test_dropping_one_context_restores_a_valuation():
    full = peres_mermin_family()
    members = [m.matrix for m in full.members[:14]]
    family = discover_functional_relations(ObservableFamily.from_matrices(members))
    v = search_valuation(family)
    assert isinstance(v, Valuation) and v.is_valid(family)


def test_violations_are_reported():
    a = np.diag([-1.0, 0.0, 1.0])
    family = discover_functional_relations(ObservableFamily.from_matrices([a, a @ a]))
    assert Valuation((1.0, 0.0)).violations(family)
    assert not Valuation((1.0, 1.0)).violations(family)
    assert Valuation((7.0, 1.0)).violations(family)


def test_declared_relation_must_hold():
    a = np.diag([-1.0, 1.0])
    with pytest.raises(InvalidRelation):
        ObservableFamily.from_matrices([a, a], relations=[(0, SpectrumFunction.from_pairs([[-1, 1], [1, 1]]), 1)])


def test_discovery_is_idempotent():
    once = peres_mermin_family()
    twice = discover_functional_relations(once)
    assert len(once.relations) == len(twice.relations)


def test_search_cap():
    family = ObservableFamily.from_matrices([np.diag([0.0, 1.0, 2.0])] * 4)
    with pytest.raises(SearchSpaceTooLarge):
        search_valuation(family, cap=10)


def test_search_is_deterministic():
    family = discover_functional_relations(ObservableFamily.from_matrices([np.diag([-1.0, 0.0, 1.0]), np.diag([1.0, 0.0, 1.0])]))
    assert search_valuation(family) == search_valuation(family)
