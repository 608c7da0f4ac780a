"""Regenerate the bundled scenario corpus in src/ctxcollapse/scenarios/."""

from __future__ import annotations

import itertools
import json
import sys
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "ctxcollapse" / "scenarios"

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}
R2 = 1 / np.sqrt(2)


def mat(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[x.real if x.imag == 0 else [x.real, x.imag] for x in row] for row in m.tolist()]


def diag(*xs) -> list:
    return mat(np.diag(xs))


def peres_mermin() -> dict:
    """The 3x3 two-qubit Pauli square plus one nondegenerate generator per row and column.

    Pairwise functional relations among the nine squares alone are trivial (no
    Pauli is a function of another), so each context is represented by an
    observable with one-dimensional eigenspaces whose functions are the three
    members of that context.
    """
    grid = [["XI", "IX", "XX"], ["IY", "YI", "YY"], ["XY", "YX", "ZZ"]]
    op = {s: np.kron(PAULI[s[0]], PAULI[s[1]]) for row in grid for s in row}
    contexts = [("row", r) for r in grid] + [("col", [grid[i][j] for i in range(3)]) for j in range(3)]
    names, members = [], []
    for row in grid:
        for s in row:
            names.append(s)
            members.append(op[s])
    for k, (tag, ctx) in enumerate(contexts):
        a1, a2 = op[ctx[0]], op[ctx[1]]
        gen = np.zeros((4, 4), dtype=complex)
        for idx, (sa, sb) in enumerate(itertools.product((1, -1), repeat=2)):
            gen += (idx + 1) * (np.eye(4) + sa * a1) @ (np.eye(4) + sb * a2) / 4
        names.append(f"{tag}{k % 3}:" + ",".join(ctx))
        members.append(gen)
    return {"dim": 4, "names": names, "members": [mat(m) for m in members]}


def scenarios() -> list[dict]:
    out = []
    add = out.append
    psi_plus = [R2, R2]

    add({"id": "collapse-subjective-full-spectrum", "kind": "collapse",
         "payload": {"observable": diag(1, 2, 3), "state": {"pure": [1 / 3, 2 / 3, 2 / 3]},
                     "rule": "subjective", "outcomes": "all"},
         "expect": {"state": diag(1 / 9, 4 / 9, 4 / 9)}})
    add({"id": "collapse-subjective-full-spectrum-offdiagonal", "kind": "collapse",
         "payload": {"observable": mat(X), "state": {"pure": [1, 0]}, "rule": "subjective", "outcomes": "all"},
         "expect": {"state": diag(0.5, 0.5)}})
    add({"id": "collapse-subjective-superposition-mixture", "kind": "collapse",
         "payload": {"observable": diag(1, -1), "state": {"pure": psi_plus}, "rule": "subjective", "outcomes": [1, -1]},
         "expect": {"state": diag(0.5, 0.5)}})
    add({"id": "collapse-standard-superposition", "kind": "collapse",
         "payload": {"observable": diag(1, 1, -1), "state": {"pure": [0.6, 0, 0.8]}, "rule": "standard", "outcomes": [1]},
         "expect": {"state": diag(1, 0, 0)}})
    add({"id": "collapse-standard-null", "kind": "collapse",
         "payload": {"observable": diag(1, -1), "state": {"pure": [0, 1]}, "rule": "standard", "outcomes": [1]},
         "expect": {"null": True}})
    add({"id": "collapse-lueders-full-spectrum-identity", "kind": "collapse",
         "payload": {"observable": diag(1, 1, 2),
                     "state": mat([[0.5, 0.1, 0.2j], [0.1, 0.3, 0.05], [-0.2j, 0.05, 0.2]]),
                     "rule": "lueders_block", "outcomes": "all"},
         "expect": {"unchanged": True}})
    add({"id": "collapse-loss-of-outcome-plus", "kind": "collapse",
         "payload": {"observable": diag(1, -1), "state": {"pure": psi_plus}, "rule": "loss_of_outcome"},
         "expect": {"unchanged": False, "state": diag(0.5, 0.5)}})
    add({"id": "collapse-contextual-maximally-mixed", "kind": "collapse",
         "payload": {"observable": diag(2, 0, 0, -2), "state": "maximally_mixed", "rule": "contextual",
                     "outcomes": [0, 2], "basis": {"random_seed": 7}},
         "expect": {"normalized_projector": True}})

    add({"id": "ttt-square-pm1", "kind": "ttt",
         "payload": {"observable": diag(1, -1), "function": "square"},
         "expect": {"trace_distance": 0.5, "frobenius_distance": float(R2)}})
    add({"id": "ttt-injective-rejected", "kind": "ttt",
         "payload": {"observable": diag(1, 2), "function": [[1, 5], [2, 7]]},
         "expect": {"error": "NotCoarseGraining"}})

    add({"id": "post-processing-square-noncontextual", "kind": "post-processing",
         "payload": {"observable": diag(1, -1), "function": "square", "semantics": "noncontextual"},
         "expect": {"coarse_graining": True, "update_equal": False, "witness_trace_distance": 0.5}})
    add({"id": "post-processing-injective-noncontextual", "kind": "post-processing",
         "payload": {"observable": diag(1, 2, 3), "function": [[1, 10], [2, 20], [3, 30]],
                     "semantics": "noncontextual", "subsets": True},
         "expect": {"coarse_graining": False, "update_equal": True}})
    add({"id": "post-processing-all-partitions-noncontextual", "kind": "post-processing",
         "payload": {"observable": diag(-1, 0, 1, 2), "function": "all_partitions",
                     "semantics": "noncontextual", "subsets": True},
         "expect": {"dichotomy": True}})
    add({"id": "post-processing-square-contextual", "kind": "post-processing",
         "payload": {"observable": diag(2, 0, -2), "function": "square", "semantics": "contextual",
                     "subsets": True, "random_bases": 8},
         "expect": {"update_equal": True}})
    add({"id": "post-processing-degenerate-contextual", "kind": "post-processing", "seed": 3,
         "payload": {"observable": diag(1, 1, -1, 0), "function": "abs", "semantics": "contextual",
                     "subsets": True, "random_bases": 8},
         "expect": {"update_equal": True}})

    add({"id": "equivalence-preimage-event", "kind": "equivalence",
         "payload": {"mode": "projector", "events": [
             {"observable": diag(1, -1, 0), "function": "square", "outcomes": [1]},
             {"observable": diag(1, -1, 0), "preimage_of": {"function": "square", "outcomes": [1]}}]},
         "expect": {"equivalent": True}})
    add({"id": "equivalence-different-events", "kind": "equivalence",
         "payload": {"mode": "projector", "events": [
             {"observable": diag(1, -1, 0), "outcomes": [1]},
             {"observable": diag(1, -1, 0), "outcomes": [-1]}]},
         "expect": {"equivalent": False}})
    add({"id": "equivalence-bases-distinct-degenerate", "kind": "equivalence",
         "payload": {"mode": "bases_commute", "observable": diag(1, 1, 2),
                     "bases": ["canonical", {"random_seed": 3}]},
         "expect": {"commute": False}})
    add({"id": "equivalence-bases-same", "kind": "equivalence",
         "payload": {"mode": "bases_commute", "observable": diag(1, 1, 2),
                     "bases": [{"random_seed": 3}, {"random_seed": 3}]},
         "expect": {"commute": True}})
    add({"id": "equivalence-contextual-same-projector", "kind": "equivalence",
         "payload": {"mode": "contextual_projector", "events": [
             {"observable": diag(2, 0, 0, -2), "function": "square", "outcomes": [4], "basis": {"random_seed": 1}},
             {"observable": diag(2, 0, 0, -2), "outcomes": [2, -2], "basis": {"random_seed": 1}}]},
         "expect": {"holds": True}})

    add({"id": "valuation-peres-mermin", "kind": "valuation",
         "payload": {"family": peres_mermin(), "discover": True},
         "expect": {"exists": False}})
    add({"id": "valuation-x-z", "kind": "valuation",
         "payload": {"family": {"dim": 2, "names": ["X", "Z"], "members": [mat(X), mat(Z)]}},
         "expect": {"exists": True}})
    add({"id": "valuation-commuting-chain", "kind": "valuation",
         "payload": {"family": {"dim": 3, "names": ["A", "A^2", "sgn A"],
                                "members": [diag(-1, 0, 1), diag(1, 0, 1), diag(-1, 0, 1)]}},
         "expect": {"exists": True}})

    add({"id": "classical-preimage-equivalence", "kind": "classical",
         "payload": {"system": {"points": ["a", "b", "c", "d", "e", "f"],
                                "observables": {"A": [-2, -1, 0, 1, 2, 2]}},
                     "derived": [{"name": "A^2", "source": "A", "function": [[-2, 4], [-1, 1], [0, 0], [1, 1], [2, 4]]}],
                     "pairs": [[[[1], "A^2"], [[-1, 1], "A"]], [[[4], "A^2"], [[-2, 2], "A"]], [[[1], "A^2"], [[1], "A"]]]},
         "expect": {"counterexamples": 0, "pairs": [{"equivalent": True}, {"equivalent": True}, {"equivalent": False}]}})
    for m in range(1, 7):
        rng = np.random.default_rng(m)
        add({"id": f"classical-sweep-{m}", "kind": "classical",
             "payload": {"system": {"points": list(range(m)),
                                    "observables": {"A": rng.integers(-2, 3, m).tolist(), "B": rng.integers(0, 2, m).tolist(),
                                                    "C": list(range(m))}}},
             "expect": {"counterexamples": 0}})
    return out


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.json"):
        old.unlink()
    for sc in scenarios():
        (OUT / f"{sc['id']}.json").write_text(json.dumps(sc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(scenarios())} scenarios to {OUT}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
