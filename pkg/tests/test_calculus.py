import numpy as np
import pytest
from hypothesis import given, strategies as st

from ctxcollapse.calculus import (
    SpectrumFunction,
    apply_function,
    induced_nondegenerate_family,
    is_coarse_graining,
    preimage_of_set,
    preimage_partition,
    set_partitions,
)
from ctxcollapse.errors import DomainMismatch
from ctxcollapse.operators import canonical_basis, eigendecompose, random_basis, random_hermitian

seeds = st.integers(0, 2**31 - 1)


def eig_oracle(matrix, fn):
    # g(A) from a fresh eigh, applying fn pointwise to raw eigenvalues.
    w, v = np.linalg.eigh(matrix)
    return v @ np.diag([fn(round(x, 6)) for x in w]) @ v.conj().T


def test_square_of_pauli_z_is_identity():
    sd = eigendecompose(np.diag([1.0, -1.0]))
    g = SpectrumFunction.from_callable(lambda a: a * a, sd)
    gsd = apply_function(g, sd)
    assert gsd.eigenvalues == (1.0,)
    assert np.allclose(gsd.matrix, np.eye(2))
    assert is_coarse_graining(g, sd)


def test_preimage_partition_of_square():
    sd = eigendecompose(np.diag([-2.0, 0.0, 2.0]))
    g = SpectrumFunction.from_callable(lambda a: a * a, sd)
    assert preimage_partition(g, sd).as_dict() == {0.0: (0.0,), 4.0: (-2.0, 2.0)}
    assert preimage_of_set(g, sd, [4]) == (-2.0, 2.0)
    assert preimage_of_set(g, sd, [0, 4]) == (-2.0, 0.0, 2.0)


def test_table_must_cover_spectrum():
    sd = eigendecompose(np.diag([1.0, 2.0]))
    with pytest.raises(DomainMismatch):
        SpectrumFunction.from_pairs([[1, 0]]).values_on(sd)
    with pytest.raises(DomainMismatch):
        SpectrumFunction.from_pairs([[1, 0], [2, 0], [3, 0]]).values_on(sd)


@given(seeds, st.integers(1, 5))
def test_matches_pointwise_eigh(seed, n):
    a = random_hermitian(n, seed)
    sd = eigendecompose(a)
    fn = lambda x: x**3 - 2 * x  # noqa: E731
    g = SpectrumFunction.from_callable(fn, sd)
    assert np.allclose(apply_function(g, sd).matrix, eig_oracle(a.matrix, fn), atol=1e-8)


@given(seeds, st.integers(1, 5))
def test_composition(seed, n):
    sd = eigendecompose(random_hermitian(n, seed))
    g = SpectrumFunction.from_callable(lambda a: a * a, sd)
    gsd = apply_function(g, sd)
    h = SpectrumFunction.from_callable(lambda b: np.sqrt(b) + 1, gsd)
    direct = apply_function(h, gsd)
    composed = apply_function(g.then(h, sd), sd)
    assert np.allclose(direct.matrix, composed.matrix, atol=1e-9)


@given(seeds, st.integers(1, 5))
def test_functions_of_one_observable_commute(seed, n):
    sd = eigendecompose(random_hermitian(n, seed))
    f = apply_function(SpectrumFunction.from_callable(lambda a: a * a, sd), sd).matrix
    g = apply_function(SpectrumFunction.from_callable(lambda a: abs(a - 1), sd), sd).matrix
    assert np.allclose(f @ g, g @ f, atol=1e-9)
    assert np.allclose(f @ sd.matrix, sd.matrix @ f, atol=1e-9)


@given(seeds, st.integers(1, 5), st.integers(0, 1000))
def test_unitary_transport(seed, n, useed):
    from ctxcollapse.operators import random_unitary

    a = random_hermitian(n, seed)
    u = random_unitary(n, np.random.default_rng(useed))
    sd = eigendecompose(a)
    sd_u = eigendecompose(u @ a.matrix @ u.conj().T)
    fn = lambda x: x * x - x  # noqa: E731
    ga = apply_function(SpectrumFunction.from_callable(fn, sd), sd).matrix
    gua = apply_function(SpectrumFunction.from_callable(fn, sd_u), sd_u).matrix
    assert np.allclose(u @ ga @ u.conj().T, gua, atol=1e-8)


@given(seeds)
def test_induced_family_is_nondegenerate_and_generates(seed):
    sd = eigendecompose(np.diag([1.0, 1.0, -1.0, 0.0]))
    basis = random_basis(sd, seed % 50)
    c = eigendecompose(induced_nondegenerate_family(basis, seed))
    assert len(c.eigenvalues) == 4
    for p in basis.projectors:
        assert any(np.allclose(p, q.matrix, atol=1e-8) for q in c.projectors)


def test_set_partition_counts_are_bell_numbers():
    assert [sum(1 for _ in set_partitions(range(k))) for k in range(7)] == [1, 1, 2, 5, 15, 52, 203]


def test_injective_function_is_not_coarse_graining():
    sd = eigendecompose(np.diag([1.0, 2.0, 3.0]))
    g = SpectrumFunction.from_pairs([[1, 10], [2, 20], [3, 30]])
    assert not is_coarse_graining(g, sd)
    assert len(apply_function(g, sd).eigenvalues) == 3


def test_canonical_basis_relabels_under_coarse_graining():
    sd = eigendecompose(np.diag([1.0, -1.0]))
    gsd = apply_function(SpectrumFunction.from_callable(abs, sd), sd)
    from ctxcollapse.operators import relabel_basis

    moved = relabel_basis(canonical_basis(sd), gsd)
    assert moved.indices_for(gsd, [1.0]) == [0, 1]
