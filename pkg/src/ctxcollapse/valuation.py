"""Value assignments on finite observable families.

A valuation picks one eigenvalue per observable such that every functional
relation ``A_j = g(A_i)`` in the family is respected, ``V(A_j) = g(V(A_i))``.
The search is exhaustive backtracking with arc-consistency propagation over the
relation constraints, so a failed search certifies that no valuation exists for
the given family (and says nothing about larger ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .calculus import SpectrumFunction, apply_function
from .config import DEFAULT_TOL, Tolerances
from .encoding import decode_matrix, encode_matrix
from .errors import DomainMismatch, InvalidRelation, SearchSpaceTooLarge
from .operators import SpectralDecomposition, commutator, eigendecompose, fro

DEFAULT_SEARCH_CAP = 10**8


@dataclass(frozen=True)
class FunctionalRelation:
    """``members[target] == function(members[source])``."""

    source: int
    function: SpectrumFunction
    target: int

    def to_json(self) -> list:
        return [self.source, self.function.to_json(), self.target]


def _as_function(g) -> SpectrumFunction:
    return g if isinstance(g, SpectrumFunction) else SpectrumFunction.from_pairs(g)


@dataclass(frozen=True, eq=False)
class ObservableFamily:
    members: tuple
    relations: tuple = ()
    names: tuple = ()

    def __post_init__(self):
        if not self.members:
            raise ValueError("a family needs at least one observable")
        dims = {m.dim for m in self.members}
        if len(dims) != 1:
            raise ValueError(f"family members act on spaces of different dimensions {sorted(dims)}")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"A{i}" for i in range(len(self.members))))

    @property
    def dim(self) -> int:
        return self.members[0].dim

    @classmethod
    def from_matrices(cls, matrices, relations=(), names=(), tol: Tolerances = DEFAULT_TOL) -> "ObservableFamily":
        members = tuple(eigendecompose(m, tol=tol) for m in matrices)
        rels = tuple(r if isinstance(r, FunctionalRelation) else FunctionalRelation(r[0], _as_function(r[1]), r[2]) for r in relations)
        family = cls(members, rels, tuple(names))
        family.check_relations(tol)
        return family

    @classmethod
    def from_json(cls, data: dict, tol: Tolerances = DEFAULT_TOL) -> "ObservableFamily":
        matrices = [decode_matrix(m) for m in data["members"]]
        if "dim" in data and any(m.shape[0] != data["dim"] for m in matrices):
            raise ValueError("member dimension differs from declared dim")
        return cls.from_matrices(matrices, data.get("relations", ()), data.get("names", ()), tol)

    def check_relations(self, tol: Tolerances = DEFAULT_TOL) -> None:
        n = self.dim
        for r in self.relations:
            if not (0 <= r.source < len(self.members) and 0 <= r.target < len(self.members)):
                raise InvalidRelation(f"relation {r.source}->{r.target} refers to a missing member")
            try:
                image = apply_function(r.function, self.members[r.source], tol).matrix
            except DomainMismatch as exc:
                raise InvalidRelation(f"relation {r.source}->{r.target}: {exc}") from None
            err = fro(image - self.members[r.target].matrix)
            if err > tol.eq_tol * n:
                raise InvalidRelation(f"relation {r.source}->{r.target} does not hold (error {err:.3e})")


def _function_between(src: SpectralDecomposition, dst: SpectralDecomposition, tol: Tolerances) -> SpectrumFunction | None:
    # g exists iff every eigenspace of src sits inside one eigenspace of dst.
    n = src.dim
    table = []
    for alpha, e in zip(src.eigenvalues, src.projectors):
        for beta, f in zip(dst.eigenvalues, dst.projectors):
            if fro(f.matrix @ e.matrix - e.matrix) <= tol.eq_tol * n:
                table.append((alpha, beta))
                break
        else:
            return None
    return SpectrumFunction(tuple(table))


def discover_functional_relations(family: ObservableFamily, tol: Tolerances = DEFAULT_TOL) -> ObservableFamily:
    """Add every relation ``A_j = g(A_i)`` between commuting members that is not yet recorded."""
    n = family.dim
    known = {(r.source, r.target) for r in family.relations}
    found = list(family.relations)
    for i, a in enumerate(family.members):
        for j, b in enumerate(family.members):
            if i == j or (i, j) in known:
                continue
            if fro(commutator(a.matrix, b.matrix)) > tol.eq_tol * n:
                continue
            g = _function_between(a, b, tol)
            if g is not None:
                found.append(FunctionalRelation(i, g, j))
    out = ObservableFamily(family.members, tuple(found), family.names)
    out.check_relations(tol)
    return out


@dataclass(frozen=True)
class Valuation:
    values: tuple  # one eigenvalue per member

    def violations(self, family: ObservableFamily) -> list[str]:
        """Clauses of the definition that fail; empty for a genuine valuation."""
        out = []
        for k, (v, m) in enumerate(zip(self.values, family.members)):
            if v not in m.eigenvalues:
                out.append(f"value rule: {v!r} not in spectrum of member {k}")
        if out:
            return out
        for r in family.relations:
            src, dst = family.members[r.source], family.members[r.target]
            gv = dst.snap(r.function.values_on(src)[src.index_of(self.values[r.source])])
            if gv != self.values[r.target]:
                out.append(f"FUNC: V(A{r.target}) = {self.values[r.target]!r} but g(V(A{r.source})) = {gv!r}")
        return out

    def is_valid(self, family: ObservableFamily) -> bool:
        return not self.violations(family)

    def to_json(self) -> dict:
        return {"values": list(self.values)}


@dataclass(frozen=True)
class NoValuationCertificate:
    constraints: tuple
    assignments_tried: int
    search_space: int

    def to_json(self) -> dict:
        return {
            "constraints": [list(c) for c in self.constraints],
            "assignments_tried": self.assignments_tried,
            "search_space": self.search_space,
        }


@dataclass
class _Search:
    arcs: list  # (source, {src_idx: dst_idx}, target)
    tried: int = 0

    def propagate(self, doms: list[set]) -> bool:
        changed = True
        while changed:
            changed = False
            for i, m, j in self.arcs:
                image = {m[a] for a in doms[i]}
                new_j = doms[j] & image
                new_i = {a for a in doms[i] if m[a] in doms[j]}
                if new_j != doms[j] or new_i != doms[i]:
                    doms[i], doms[j] = new_i, new_j
                    changed = True
                if not new_i or not new_j:
                    return False
        return True

    def run(self, doms: list[set]) -> list[int] | None:
        if not self.propagate(doms):
            return None
        for var, d in enumerate(doms):
            if len(d) > 1:
                break
        else:
            return [next(iter(d)) for d in doms]
        for value in sorted(d):
            self.tried += 1
            trial = [set(x) for x in doms]
            trial[var] = {value}
            found = self.run(trial)
            if found is not None:
                return found
        return None


def search_valuation(family: ObservableFamily, cap: int = DEFAULT_SEARCH_CAP) -> Valuation | NoValuationCertificate:
    """Exhaustive search for a valuation on ``family``; deterministic in member order."""
    sizes = [len(m.eigenvalues) for m in family.members]
    space = math.prod(sizes)
    if space > cap:
        raise SearchSpaceTooLarge(f"search space {space} exceeds cap {cap}")
    arcs = []
    for r in family.relations:
        src, dst = family.members[r.source], family.members[r.target]
        values = r.function.values_on(src)
        arcs.append((r.source, {a: dst.index_of(v) for a, v in enumerate(values)}, r.target))
    search = _Search(arcs)
    found = search.run([set(range(s)) for s in sizes])
    if found is None:
        return NoValuationCertificate(
            constraints=tuple(tuple(r.to_json()) for r in family.relations),
            assignments_tried=search.tried,
            search_space=space,
        )
    return Valuation(tuple(m.eigenvalues[k] for m, k in zip(family.members, found)))


def family_to_json(family: ObservableFamily) -> dict:
    return {
        "dim": family.dim,
        "names": list(family.names),
        "members": [encode_matrix(m.matrix) for m in family.members],
        "relations": [r.to_json() for r in family.relations],
    }
