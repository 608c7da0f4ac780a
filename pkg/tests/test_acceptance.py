"""One test per acceptance criterion; each records a PASS/FAIL line shown in the terminal summary."""

import itertools
import subprocess
import sys
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from ctxcollapse.calculus import SpectrumFunction, apply_function, preimage_of_set, preimage_partition, set_partitions
from ctxcollapse.classical import ClassicalSystem, exhaustive_equivalence_sweep, exhaustive_post_processing_sweep
from ctxcollapse.collapse import (
    MeasurementEvent,
    born_probability,
    contextual_subjective_collapse,
    loss_of_outcome,
    lueders_block_collapse,
    standard_collapse,
    subjective_collapse,
    to_update_map,
)
from ctxcollapse.equivalence import check_post_processing, partition_functions
from ctxcollapse.operators import (
    DensityState,
    eigendecompose,
    fro,
    maximally_mixed,
    random_basis,
    random_density,
    random_hermitian,
    spectral_projector,
    trace_distance,
)
from ctxcollapse.runner import bundled_corpus, load_scenario
from ctxcollapse.valuation import NoValuationCertificate, ObservableFamily, Valuation, discover_functional_relations, search_valuation


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"AC {number}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def diagonal_family():
    """Diagonal observables with 2..5 spectral points: nondegenerate, and with the lowest point doubled."""
    for k in range(2, 6):
        yield np.diag(np.arange(k, dtype=float))
        yield np.diag(np.array([0.0] + list(range(k)), dtype=float))


def test_ac1_noncontextual_dichotomy():
    start = time.perf_counter()
    checked, wrong = 0, []
    for a in diagonal_family():
        sd = eigendecompose(a)
        n = sd.dim
        for g in partition_functions(sd):
            blocks = dict(preimage_partition(g, sd).blocks)
            gsd = apply_function(g, sd)
            for beta in gsd.eigenvalues:
                # independent of check_post_processing: rebuild both maps here
                m_g = to_update_map("standard", MeasurementEvent(gsd, (beta,)))
                m_a = to_update_map("subjective", MeasurementEvent(sd, blocks[beta]))
                equal = fro(m_g.choi - m_a.choi) <= 1e-9 * n * n
                checked += 1
                if equal != (len(blocks[beta]) == 1):
                    wrong.append((np.diag(a).tolist(), g.table, beta))
            for v in check_post_processing(sd, g, "noncontextual", with_witness=False):
                if v.update_equal != (len(blocks[v.case["delta"][0]]) == 1):
                    wrong.append(("verdict", v.case))
    elapsed = time.perf_counter() - start
    record(1, "noncontextual update_equal iff singleton preimage", not wrong and elapsed < 10,
           f"{checked} cases, {len(wrong)} wrong, {elapsed:.2f}s")


def test_ac2_counterexample_states():
    sd = eigendecompose(np.diag([1.0, -1.0]))
    phi0, phi1 = np.array([0, 1.0]), np.array([1.0, 0])  # eigenvectors for -1 and 1
    psi = (phi0 + phi1) / np.sqrt(2)
    rho = DensityState.pure(psi)
    g = SpectrumFunction.from_callable(lambda a: a * a, sd)
    gsd = apply_function(g, sd)
    mixed = subjective_collapse(rho, (-1.0, 1.0), sd).matrix
    block = lueders_block_collapse(rho, (-1.0, 1.0), sd).matrix
    std = standard_collapse(rho, 1.0, gsd).matrix
    expected_mixed = (np.outer(phi0, phi0) + np.outer(phi1, phi1)) / 2
    pure = np.outer(psi, psi.conj())
    ok = (
        fro(mixed - expected_mixed) <= 1e-9
        and fro(block - pure) <= 1e-9
        and fro(std - pure) <= 1e-9
        and abs(fro(mixed - std) - 1 / np.sqrt(2)) <= 1e-9
        and abs(trace_distance(mixed, std) - 0.5) <= 1e-9
    )
    record(2, "mixture vs pure post-measurement state", ok,
           f"frobenius {fro(mixed - std):.12f}, trace {trace_distance(mixed, std):.12f}")


def test_ac3_contextual_repair():
    start = time.perf_counter()
    checked, wrong = 0, 0
    for a in diagonal_family():
        sd = eigendecompose(a)
        n_random = 8 if sd.is_degenerate else 0
        for g in partition_functions(sd):
            for v in check_post_processing(sd, g, "contextual", subsets=True, n_random_bases=n_random, seed=0, with_witness=False):
                checked += 1
                if not (v.update_equal and v.choi_distance <= 1e-9 * sd.dim**2):
                    wrong += 1
    elapsed = time.perf_counter() - start
    record(3, "contextual updates agree for every basis and subset", wrong == 0 and elapsed < 30,
           f"{checked} cases, {wrong} wrong, {elapsed:.2f}s")


def test_ac4_probability_clause():
    worst, cases = 0.0, 0
    for a in diagonal_family():
        sd = eigendecompose(a)
        states = [random_density(sd.dim, [sd.dim, len(sd.eigenvalues), s]) for s in range(100)]
        for g in partition_functions(sd):
            gsd = apply_function(g, sd)
            for r in range(1, len(gsd.eigenvalues) + 1):
                for delta in itertools.combinations(gsd.eigenvalues, r):
                    pre = preimage_of_set(g, sd, delta)
                    cases += 1
                    for rho in states:
                        worst = max(worst, abs(born_probability(rho, delta, gsd) - born_probability(rho, pre, sd)))
    record(4, "probabilities of (D, g(A)) and (g^-1(D), A) agree", worst <= 1e-10,
           f"{cases} events x 100 states, max gap {worst:.2e}")


def test_ac5_loss_of_outcome():
    worst_commuting = 0.0
    for seed in range(50):
        n = 1 + seed % 5
        a = random_hermitian(n, seed)
        sd = eigendecompose(a)
        rng = np.random.default_rng(seed)
        weights = rng.random(len(sd.eigenvalues))
        rho = DensityState.from_unnormalized(sum(w * p.matrix for w, p in zip(weights, sd.projectors)))
        assert fro(rho.matrix @ a.matrix - a.matrix @ rho.matrix) <= 1e-12
        worst_commuting = max(worst_commuting, fro(loss_of_outcome(rho, sd).matrix - rho.matrix))
    z = eigendecompose(np.diag([1.0, -1.0]))
    plus = DensityState.pure([1, 1])
    disturbed = fro(loss_of_outcome(plus, z).matrix - plus.matrix)
    worst_identity = 0.0
    for seed in range(50):
        sd = eigendecompose(random_hermitian(1 + seed % 5, seed))
        rho = random_density(sd.dim, seed + 1000)
        worst_identity = max(worst_identity, fro(lueders_block_collapse(rho, sd.eigenvalues, sd).matrix - rho.matrix))
    ok = worst_commuting <= 1e-9 and disturbed > 1e-6 and worst_identity <= 1e-14
    record(5, "loss of outcome fixes commuting states, moves |+>; full-spectrum block update is identity", ok,
           f"commuting {worst_commuting:.1e}, |+> moved {disturbed:.3f}, identity {worst_identity:.1e}")


def test_ac6_contextual_maximally_mixed():
    worst, events = 0.0, 0
    for seed in range(40):
        n = 1 + seed % 6
        sd = eigendecompose(random_hermitian(n, seed))
        basis = random_basis(sd, seed)
        phi = maximally_mixed(n)
        for r in range(1, len(sd.eigenvalues) + 1):
            for delta in itertools.combinations(sd.eigenvalues, r):
                e = spectral_projector(sd, delta).matrix
                out = contextual_subjective_collapse(phi, delta, sd, basis).matrix
                worst = max(worst, fro(out - e / np.trace(e).real))
                events += 1
    record(6, "contextual update of I/n is E_D / tr E_D", worst <= 1e-10, f"{events} events, max error {worst:.1e}")


def test_ac7_valuation_search():
    start = time.perf_counter()
    data = load_scenario(bundled_corpus() / "valuation-peres-mermin.json")["payload"]["family"]
    pm = discover_functional_relations(ObservableFamily.from_json(data))
    squares = [m.matrix for m in pm.members[:9]]
    paulis_ok = all(np.allclose(m @ m, np.eye(4)) for m in squares) and pm.dim == 4
    cert = search_valuation(pm)
    x = np.array([[0, 1], [1, 0]])
    z = np.diag([1, -1])
    xz = discover_functional_relations(ObservableFamily.from_matrices([x, z]))
    val = search_valuation(xz)
    elapsed = time.perf_counter() - start
    val_ok = isinstance(val, Valuation) and not val.violations(xz) and all(
        v in m.eigenvalues for v, m in zip(val.values, xz.members)
    )
    ok = paulis_ok and isinstance(cert, NoValuationCertificate) and val_ok and elapsed < 60
    record(7, "no valuation on the square family, one on {X, Z}", ok,
           f"{len(pm.members)} members, {len(pm.relations)} relations, {elapsed:.2f}s")


def test_ac8_classical_contrast():
    pairs = posts = bad = 0
    systems = 0
    for path in sorted(bundled_corpus().glob("*.json")):
        sc = load_scenario(path)
        if sc["kind"] != "classical":
            continue
        system = ClassicalSystem.from_json(sc["payload"]["system"])
        assert system.size <= 6
        systems += 1
        c1, b1 = exhaustive_equivalence_sweep(system)
        c2, b2 = exhaustive_post_processing_sweep(system)
        pairs, posts, bad = pairs + c1, posts + c2, bad + len(b1) + len(b2)
    record(8, "classical events with equal preimages update identically", bad == 0 and systems > 0,
           f"{systems} systems, {pairs} pairs, {posts} post-processings, {bad} counterexamples")


def test_ac9_functional_calculus():
    worst, cases = 0.0, 0
    for seed in range(200):
        rng = np.random.default_rng(seed)
        n = 1 + seed % 6
        a = random_hermitian(n, seed)
        sd = eigendecompose(a)
        g = SpectrumFunction(tuple((x, float(rng.integers(-2, 3))) for x in sd.eigenvalues))
        gsd = apply_function(g, sd)
        h = SpectrumFunction(tuple((y, float(rng.normal())) for y in gsd.eigenvalues))
        tol = 1e-9 * n
        # spectral mapping: sigma(g(A)) = g(sigma(A))
        mapped = sorted(set(g.values_on(sd)))
        err = max(abs(x - y) for x, y in zip(mapped, gsd.eigenvalues)) if len(mapped) == len(gsd.eigenvalues) else np.inf
        # g(A) from a fresh eigendecomposition, as an independent oracle
        w, v = np.linalg.eigh(a.matrix)
        table = dict(g.table)
        oracle = v @ np.diag([table[sd.snap(x)] for x in w]) @ v.conj().T
        err = max(err, fro(gsd.matrix - oracle))
        # composition
        hg = apply_function(g.then(h, sd), sd).matrix
        err = max(err, fro(hg - apply_function(h, gsd).matrix))
        # commutation
        err = max(err, fro(gsd.matrix @ a.matrix - a.matrix @ gsd.matrix), fro(hg @ gsd.matrix - gsd.matrix @ hg))
        # projector transport
        for r in range(1, len(gsd.eigenvalues) + 1):
            for delta in itertools.combinations(gsd.eigenvalues, r):
                pre = preimage_of_set(g, sd, delta)
                err = max(err, fro(spectral_projector(gsd, delta).matrix - spectral_projector(sd, pre).matrix))
        worst = max(worst, err / tol)
        cases += 1
    record(9, "spectral mapping, composition, commutation, projector transport", worst <= 1.0,
           f"{cases} cases, worst error / tolerance {worst:.1e}")


def test_ac10_deterministic_reports():
    cmd = [sys.executable, "-m", "ctxcollapse.cli", "suite", "--json", "--seed", "0"]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    ok = first.returncode == 0 and first.stdout == second.stdout and len(first.stdout) > 0
    record(10, "bundled suite JSON is byte-identical across runs", ok, f"{len(first.stdout)} bytes")
