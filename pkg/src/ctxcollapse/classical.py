"""Classical counterpart on a finite sample space.

Observables are real functions on the points, states are probability vectors
and an event ``(delta, A)`` updates a state by conditioning on ``A^{-1}(delta)``.
Since the update depends only on that preimage, equivalent events always update
identically and every ``g o A`` is a genuine post-processing of ``A``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .calculus import set_partitions
from .errors import DomainMismatch

ATOL = 1e-12


@dataclass(frozen=True)
class ClassicalSystem:
    points: tuple
    observables: tuple  # ((name, (value per point, ...)), ...)

    def __post_init__(self):
        obs = self.observables.items() if isinstance(self.observables, Mapping) else self.observables
        obs = tuple((str(k), tuple(float(x) for x in v)) for k, v in obs)
        for name, values in obs:
            if len(values) != len(self.points):
                raise ValueError(f"observable {name!r} has {len(values)} values for {len(self.points)} points")
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "observables", obs)

    @classmethod
    def from_json(cls, data: dict) -> "ClassicalSystem":
        return cls(tuple(data["points"]), tuple(data["observables"].items()))

    def to_json(self) -> dict:
        return {"points": list(self.points), "observables": {k: list(v) for k, v in self.observables}}

    @property
    def size(self) -> int:
        return len(self.points)

    def values(self, name: str) -> tuple:
        for k, v in self.observables:
            if k == name:
                return v
        raise KeyError(name)

    def with_observable(self, name: str, values: Sequence[float]) -> "ClassicalSystem":
        return ClassicalSystem(self.points, self.observables + ((name, tuple(values)),))

    def events(self) -> list[tuple[tuple, str]]:
        """Every ``(delta, name)`` with ``delta`` a nonempty subset of the observable's range."""
        out = []
        for name, values in self.observables:
            rng = sorted(set(values))
            for r in range(1, len(rng) + 1):
                out += [(delta, name) for delta in itertools.combinations(rng, r)]
        return out


@dataclass(frozen=True)
class ClassicalState:
    weights: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        total = sum(w)
        if total != 0 and abs(total - 1) > 1e-9:
            raise ValueError(f"weights sum to {total}, expected 1 (or 0 for the null state)")
        object.__setattr__(self, "weights", w)

    @property
    def is_null(self) -> bool:
        return all(x == 0 for x in self.weights)

    @classmethod
    def uniform(cls, m: int) -> "ClassicalState":
        return cls((1.0 / m,) * m)

    @classmethod
    def point_mass(cls, m: int, k: int) -> "ClassicalState":
        return cls(tuple(1.0 if i == k else 0.0 for i in range(m)))

    @classmethod
    def null(cls, m: int) -> "ClassicalState":
        return cls((0.0,) * m)

    def close_to(self, other: "ClassicalState", atol: float = ATOL) -> bool:
        return bool(np.allclose(self.weights, other.weights, rtol=0, atol=atol))


def preimage(values: Sequence[float], delta: Iterable[float]) -> frozenset:
    wanted = set(float(d) for d in delta)
    missing = wanted - set(values)
    if missing:
        raise DomainMismatch(f"outcomes {sorted(missing)} are not in the range of the observable")
    return frozenset(i for i, v in enumerate(values) if v in wanted)


def classical_probability(mu: ClassicalState, delta: Iterable[float], values: Sequence[float]) -> float:
    """Push-forward probability ``mu(A^{-1}(delta))``."""
    return float(sum(mu.weights[i] for i in preimage(values, delta)))


def classical_update(mu: ClassicalState, delta: Iterable[float], values: Sequence[float]) -> ClassicalState:
    """Condition ``mu`` on ``A^{-1}(delta)``; the null state if that set has probability 0."""
    pre = preimage(values, delta)
    p = sum(mu.weights[i] for i in pre)
    if p == 0:
        return ClassicalState.null(len(values))
    return ClassicalState(tuple(w / p if i in pre else 0.0 for i, w in enumerate(mu.weights)))


def spanning_states(m: int) -> list[ClassicalState]:
    """Point masses plus the uniform state; they span the state space."""
    return [ClassicalState.point_mass(m, k) for k in range(m)] + [ClassicalState.uniform(m)]


def classical_equivalence_check(system: ClassicalSystem, e1: tuple, e2: tuple) -> bool:
    """If ``e1 = (delta1, A)`` and ``e2 = (delta2, B)`` share their preimage, check they update identically.

    Events with different preimages are not equivalent and pass vacuously.
    """
    (d1, a), (d2, b) = e1, e2
    v1, v2 = system.values(a), system.values(b)
    if preimage(v1, d1) != preimage(v2, d2):
        return True
    return all(classical_update(mu, d1, v1).close_to(classical_update(mu, d2, v2)) for mu in spanning_states(system.size))


def exhaustive_equivalence_sweep(system: ClassicalSystem) -> tuple[int, list]:
    """Check every pair of preimage-equivalent events; returns ``(pairs_checked, counterexamples)``."""
    groups: dict[frozenset, list] = {}
    for delta, name in system.events():
        groups.setdefault(preimage(system.values(name), delta), []).append((delta, name))
    checked, bad = 0, []
    for events in groups.values():
        for e1, e2 in itertools.combinations(events, 2):
            checked += 1
            if not classical_equivalence_check(system, e1, e2):
                bad.append((e1, e2))
    return checked, bad


def post_processing_holds(system: ClassicalSystem, name: str, g: Mapping[float, float]) -> bool:
    """Both clauses for ``B = g o A``: equal probabilities and equal updates for every ``delta``."""
    a = system.values(name)
    b = tuple(float(g[x]) for x in a)
    states = spanning_states(system.size)
    for r in range(1, len(set(b)) + 1):
        for delta in itertools.combinations(sorted(set(b)), r):
            pre = sorted({x for x in a if g[x] in delta})
            for mu in states:
                if abs(classical_probability(mu, delta, b) - classical_probability(mu, pre, a)) > ATOL:
                    return False
                if not classical_update(mu, delta, b).close_to(classical_update(mu, pre, a)):
                    return False
    return True


def exhaustive_post_processing_sweep(system: ClassicalSystem) -> tuple[int, list]:
    """``post_processing_holds`` for every observable and every partition pattern of its range."""
    checked, bad = 0, []
    for name, values in system.observables:
        for part in set_partitions(sorted(set(values))):
            g = {x: float(k) for k, block in enumerate(part) for x in block}
            checked += 1
            if not post_processing_holds(system, name, g):
                bad.append((name, g))
    return checked, bad


def point_valuation(system: ClassicalSystem, k: int) -> dict:
    """``V_lambda(A) = A(lambda)`` for every observable of the system."""
    return {name: values[k] for name, values in system.observables}
