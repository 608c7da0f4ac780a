"""Scenario files: parsing, validation, dispatch and reports.

A scenario is a UTF-8 JSON object::

    {"id": "...", "kind": "collapse", "seed": 0, "tolerances": {...},
     "payload": {...}, "expect": {...}}

``kind`` is one of ``collapse``, ``post-processing``, ``ttt``, ``valuation``,
``classical`` and ``equivalence``. Matrices are row-major arrays whose entries
are reals or ``[re, im]`` pairs. See README.md for each payload.

Reports contain only values derived from the scenario and the configuration,
so two runs on the same inputs serialize to identical bytes; wall-clock timing
is printed in the text output only.
"""

from __future__ import annotations

import dataclasses
import fnmatch
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import classical as cl
from .calculus import SpectrumFunction, apply_function, is_coarse_graining, preimage_of_set
from .collapse import (
    MeasurementEvent,
    contextual_subjective_collapse,
    loss_of_outcome,
    lueders_block_collapse,
    standard_collapse,
    subjective_collapse,
)
from .config import DEFAULT_TOL, Tolerances
from .encoding import decode_matrix, decode_vector, encode_matrix
from .equivalence import (
    bases_commute,
    check_post_processing,
    contextual_event_equal_implies_same_projector,
    events_equivalent_projector,
    exhibit_ttt_inconsistency,
    partition_functions,
)
from .errors import CollapseError, NotCoarseGraining
from .operators import (
    DensityState,
    SpectralDecomposition,
    basis_from_vectors,
    canonical_basis,
    eigendecompose,
    fro,
    maximally_mixed,
    random_basis,
)
from .valuation import NoValuationCertificate, ObservableFamily, discover_functional_relations, search_valuation

KINDS = ("collapse", "post-processing", "ttt", "valuation", "classical", "equivalence")

NAMED_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "identity": lambda a: a,
    "square": lambda a: a * a,
    "abs": abs,
    "constant": lambda a: 0.0,
    "sign": lambda a: float(np.sign(a)),
}


class ScenarioParseError(CollapseError):
    exit_code = 2


class ScenarioValidationError(CollapseError):
    exit_code = 2


@dataclass(frozen=True)
class RunConfig:
    seed: int | None = None
    eq_tol: float | None = None
    max_dim: int = 16
    cases: str | None = None

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class Report:
    scenario_id: str
    kind: str
    cases: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    error: str | None = None
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.error is None and all(c["passed"] for c in self.cases)

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return 2
        return 0 if self.passed else 1

    def to_json(self) -> dict:
        out = {"scenario": self.scenario_id, "kind": self.kind, "passed": self.passed, "cases": self.cases, "config": self.config}
        if self.error is not None:
            out["error"] = self.error
        return out

    def to_text(self) -> str:
        lines = []
        if self.error is not None:
            lines.append(f"ERROR {self.scenario_id}: {self.error}")
        for c in self.cases:
            lines.append(f"{'PASS' if c['passed'] else 'FAIL'}  {self.scenario_id}/{c['label']}")
        n_fail = sum(not c["passed"] for c in self.cases)
        lines.append(f"-- {self.scenario_id}: {len(self.cases) - n_fail}/{len(self.cases)} cases passed ({self.elapsed:.3f}s)")
        return "\n".join(lines)


@dataclass
class SuiteReport:
    reports: list
    config: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def exit_code(self) -> int:
        if any(r.error is not None for r in self.reports):
            return 2
        return 0 if self.passed else 1

    def to_json(self) -> dict:
        cases = [c for r in self.reports for c in r.cases]
        return {
            "passed": self.passed,
            "scenarios": [r.to_json() for r in self.reports],
            "total_cases": len(cases),
            "failed_cases": sum(not c["passed"] for c in cases),
            "config": self.config,
        }

    def to_text(self) -> str:
        body = [r.to_text() for r in self.reports]
        cases = [c for r in self.reports for c in r.cases]
        n_fail = sum(not c["passed"] for c in cases)
        body.append(f"== {len(self.reports)} scenarios, {len(cases)} cases, {n_fail} failed")
        return "\n".join(body)


def dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


# -- parsing helpers -------------------------------------------------------


class _Ctx:
    """Per-scenario context: effective tolerances, seed and the dimension guard."""

    def __init__(self, scenario: dict, cfg: RunConfig):
        overrides = scenario.get("tolerances", {})
        if not isinstance(overrides, dict):
            raise ScenarioValidationError("'tolerances' must be an object")
        known = set(DEFAULT_TOL.as_dict())
        bad = set(overrides) - known
        if bad:
            raise ScenarioValidationError(f"unknown tolerance keys {sorted(bad)}")
        tol = dataclasses.replace(DEFAULT_TOL, **{k: float(v) for k, v in overrides.items()})
        if cfg.eq_tol is not None:
            tol = dataclasses.replace(tol, eq_tol=cfg.eq_tol)
        self.tol: Tolerances = tol
        seed = scenario.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ScenarioValidationError("'seed' must be a non-negative integer")
        self.seed = cfg.seed if cfg.seed is not None else seed
        self.max_dim = cfg.max_dim

    def matrix(self, data, what: str) -> np.ndarray:
        try:
            m = decode_matrix(data)
        except ValueError as exc:
            raise ScenarioValidationError(f"{what}: {exc}") from None
        if m.shape[0] > self.max_dim:
            raise ScenarioValidationError(f"{what}: dimension {m.shape[0]} exceeds --max-dim {self.max_dim}")
        return m

    def observable(self, data, what: str = "observable") -> SpectralDecomposition:
        m = self.matrix(data, what)
        try:
            return eigendecompose(m, tol=self.tol)
        except CollapseError as exc:
            raise ScenarioValidationError(f"{what}: {exc}") from None

    def function(self, data, sd: SpectralDecomposition) -> SpectrumFunction:
        if isinstance(data, str):
            if data not in NAMED_FUNCTIONS:
                raise ScenarioValidationError(f"unknown function {data!r}; named functions are {sorted(NAMED_FUNCTIONS)}")
            return SpectrumFunction.from_callable(NAMED_FUNCTIONS[data], sd)
        if not isinstance(data, list) or not all(isinstance(p, list) and len(p) == 2 for p in data):
            raise ScenarioValidationError("a function is a name or an array of [alpha, g(alpha)] pairs")
        g = SpectrumFunction.from_pairs(data)
        try:
            g.values_on(sd)
        except CollapseError as exc:
            raise ScenarioValidationError(f"function: {exc}") from None
        return g

    def state(self, data, n: int) -> DensityState:
        try:
            if data == "maximally_mixed":
                return maximally_mixed(n)
            if isinstance(data, dict) and "pure" in data:
                psi = decode_vector(data["pure"])
                if psi.shape[0] != n:
                    raise ValueError(f"state vector has length {psi.shape[0]}, expected {n}")
                return DensityState.pure(psi)
            m = self.matrix(data, "state")
            if m.shape[0] != n:
                raise ValueError(f"state has dimension {m.shape[0]}, expected {n}")
            return DensityState(m)
        except (ValueError, TypeError) as exc:
            raise ScenarioValidationError(f"state: {exc}") from None

    def basis(self, data, sd: SpectralDecomposition):
        try:
            if data is None or data == "canonical":
                return canonical_basis(sd)
            if isinstance(data, dict) and "random_seed" in data:
                return random_basis(sd, int(data["random_seed"]))
            if isinstance(data, dict) and "vectors" in data:
                return basis_from_vectors([decode_vector(v) for v in data["vectors"]], sd, self.tol)
        except (CollapseError, ValueError) as exc:
            raise ScenarioValidationError(f"basis: {exc}") from None
        raise ScenarioValidationError("basis must be 'canonical', {'random_seed': k} or {'vectors': [...]}")

    def outcomes(self, data, sd: SpectralDecomposition) -> tuple:
        if data == "all":
            return sd.eigenvalues
        if not isinstance(data, list) or not data:
            raise ScenarioValidationError("outcomes must be a nonempty array or 'all'")
        try:
            return sd.snap_set(float(x) for x in data)
        except (CollapseError, TypeError, ValueError) as exc:
            raise ScenarioValidationError(f"outcomes: {exc}") from None

    def echo(self) -> dict:
        return {"tolerances": self.tol.as_dict(), "seed": self.seed, "max_dim": self.max_dim}


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ScenarioValidationError(f"{where}: missing required key {key!r}")
    return obj[key]


def _case(label: str, passed: bool, **detail) -> dict:
    return {"label": label, "passed": bool(passed), **detail}


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol


# -- per-kind handlers -----------------------------------------------------


def _run_collapse(sc: dict, ctx: _Ctx) -> list[dict]:
    p, expect = sc["payload"], sc.get("expect", {})
    sd = ctx.observable(_require(p, "observable", "payload"))
    rho = ctx.state(_require(p, "state", "payload"), sd.dim)
    rule = _require(p, "rule", "payload")
    tol = ctx.tol
    delta = sd.eigenvalues if rule == "loss_of_outcome" else ctx.outcomes(_require(p, "outcomes", "payload"), sd)
    if rule == "standard":
        if len(delta) != 1:
            raise ScenarioValidationError("the standard rule takes exactly one outcome")
        out = standard_collapse(rho, delta[0], sd, tol)
    elif rule == "subjective":
        out = subjective_collapse(rho, delta, sd, tol)
    elif rule == "loss_of_outcome":
        out = loss_of_outcome(rho, sd, tol)
    elif rule == "lueders_block":
        out = lueders_block_collapse(rho, delta, sd, tol)
    elif rule == "contextual":
        out = contextual_subjective_collapse(rho, delta, sd, ctx.basis(p.get("basis"), sd), tol)
    else:
        raise ScenarioValidationError(f"unknown rule {rule!r}")

    n = sd.dim
    limit = tol.eq_tol * n
    cases = []
    detail = {"rule": rule, "outcomes": list(delta), "output": None if out.is_null else encode_matrix(out.matrix)}
    if "null" in expect:
        cases.append(_case("null", out.is_null == bool(expect["null"]), **detail))
    if "state" in expect:
        target = ctx.matrix(expect["state"], "expect.state")
        d = fro(out.matrix - target)
        cases.append(_case("state", not out.is_null and d <= limit, distance=d, **detail))
    if "unchanged" in expect:
        d = fro(out.matrix - rho.matrix)
        cases.append(_case("unchanged", (d <= limit) == bool(expect["unchanged"]), distance=d, **detail))
    if expect.get("normalized_projector"):
        e = MeasurementEvent(sd, delta).projector
        d = fro(out.matrix - e / np.trace(e).real)
        cases.append(_case("normalized_projector", d <= limit, distance=d, **detail))
    if not cases:
        cases.append(_case("evaluated", True, **detail))
    return cases


def _functions(p: dict, sd: SpectralDecomposition, ctx: _Ctx) -> list[SpectrumFunction]:
    fn_data = _require(p, "function", "payload")
    if fn_data == "all_partitions":
        return list(partition_functions(sd))
    return [ctx.function(fn_data, sd)]


def _run_post_processing(sc: dict, ctx: _Ctx) -> list[dict]:
    p, expect = sc["payload"], sc.get("expect", {})
    sd = ctx.observable(_require(p, "observable", "payload"))
    semantics = p.get("semantics", "noncontextual")
    if semantics not in ("noncontextual", "contextual"):
        raise ScenarioValidationError(f"unknown semantics {semantics!r}")
    subsets = bool(p.get("subsets", False))
    n_bases = int(p.get("random_bases", 8))
    want = expect.get("update_equal")
    cases = []
    for fi, g in enumerate(_functions(p, sd, ctx)):
        verdicts = check_post_processing(
            sd, g, semantics, subsets=subsets, n_random_bases=n_bases, seed=ctx.seed, tol=ctx.tol
        )
        tag = f"g{fi}" if p["function"] == "all_partitions" else "g"
        if "coarse_graining" in expect:
            cg = is_coarse_graining(g, sd, ctx.tol)
            cases.append(_case(f"{tag}/coarse_graining", cg == bool(expect["coarse_graining"]), coarse_graining=cg))
        for k, v in enumerate(verdicts):
            ok = v.as_expected if expect.get("dichotomy", True) else v.probability_equal
            if isinstance(want, bool):
                ok = ok and v.update_equal == want
            elif isinstance(want, list):
                if len(want) != len(verdicts):
                    raise ScenarioValidationError(f"expect.update_equal has {len(want)} entries for {len(verdicts)} verdicts")
                ok = ok and v.update_equal == bool(want[k])
            if "witness_trace_distance" in expect and not v.update_equal:
                ok = ok and v.witness is not None and _close(v.witness.trace_distance, float(expect["witness_trace_distance"]), ctx.tol.eq_tol)
            label = f"{tag}/{v.case.get('basis', 'eigen')}/delta={v.case['delta']}"
            cases.append(_case(label, ok, function=g.to_json(), **v.to_json()))
    return cases


def _run_ttt(sc: dict, ctx: _Ctx) -> list[dict]:
    p, expect = sc["payload"], sc.get("expect", {})
    sd = ctx.observable(_require(p, "observable", "payload"))
    g = ctx.function(_require(p, "function", "payload"), sd)
    try:
        report = exhibit_ttt_inconsistency(sd, g, ctx.tol)
    except NotCoarseGraining as exc:
        return [_case("inconsistency", expect.get("error") == "NotCoarseGraining", error="NotCoarseGraining", message=str(exc))]
    ok = expect.get("error") is None and report.trace_distance > ctx.tol.eq_tol
    if "trace_distance" in expect:
        ok = ok and _close(report.trace_distance, float(expect["trace_distance"]), ctx.tol.eq_tol)
    if "frobenius_distance" in expect:
        ok = ok and _close(report.frobenius_distance, float(expect["frobenius_distance"]), ctx.tol.eq_tol)
    return [_case("inconsistency", ok, **report.to_json())]


def _run_valuation(sc: dict, ctx: _Ctx) -> list[dict]:
    p, expect = sc["payload"], sc.get("expect", {})
    fam_data = _require(p, "family", "payload")
    members = _require(fam_data, "members", "payload.family")
    if not isinstance(members, list) or not members:
        raise ScenarioValidationError("payload.family.members must be a nonempty array")
    for i, m in enumerate(members):
        ctx.matrix(m, f"member {i}")
    try:
        family = ObservableFamily.from_json(fam_data, ctx.tol)
    except (CollapseError, ValueError, KeyError, TypeError) as exc:
        raise ScenarioValidationError(f"family: {exc}") from None
    if p.get("discover", True):
        family = discover_functional_relations(family, ctx.tol)
    result = search_valuation(family, int(p.get("cap", 10**8)))
    exists = not isinstance(result, NoValuationCertificate)
    detail = {"exists": exists, "relations": len(family.relations)}
    if exists:
        detail["valuation"] = dict(zip(family.names, result.values))
        detail["violations"] = result.violations(family)
    else:
        detail["certificate"] = {"assignments_tried": result.assignments_tried, "search_space": result.search_space, "constraints": len(result.constraints)}
    ok = not detail.get("violations")
    if "exists" in expect:
        ok = ok and exists == bool(expect["exists"])
    return [_case("valuation", ok, **detail)]


def _classical_system(p: dict) -> cl.ClassicalSystem:
    try:
        system = cl.ClassicalSystem.from_json(_require(p, "system", "payload"))
        for d in p.get("derived", []):
            source = system.values(d["source"])
            g = {float(a): float(b) for a, b in d["function"]}
            system = system.with_observable(d["name"], [g[x] for x in source])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioValidationError(f"classical system: {exc}") from None
    return system


def _run_classical(sc: dict, ctx: _Ctx) -> list[dict]:
    p, expect = sc["payload"], sc.get("expect", {})
    system = _classical_system(p)
    cases = []
    for check in p.get("checks", ["equivalence_sweep", "post_processing_sweep"]):
        if check == "equivalence_sweep":
            checked, bad = cl.exhaustive_equivalence_sweep(system)
        elif check == "post_processing_sweep":
            checked, bad = cl.exhaustive_post_processing_sweep(system)
        else:
            raise ScenarioValidationError(f"unknown classical check {check!r}")
        cases.append(_case(check, len(bad) == int(expect.get("counterexamples", 0)), checked=checked, counterexamples=len(bad)))
    for k, pair in enumerate(p.get("pairs", [])):
        try:
            e1, e2 = (tuple(x) for x in pair)
            (d1, a), (d2, b) = (tuple(float(v) for v in e1[0]), e1[1]), (tuple(float(v) for v in e2[0]), e2[1])
            equivalent = cl.preimage(system.values(a), d1) == cl.preimage(system.values(b), d2)
            holds = cl.classical_equivalence_check(system, (d1, a), (d2, b))
        except (CollapseError, KeyError, TypeError, ValueError) as exc:
            raise ScenarioValidationError(f"pair {k}: {exc}") from None
        want = expect.get("pairs", [None] * (k + 1))[k] if k < len(expect.get("pairs", [])) else None
        ok = holds and (want is None or equivalent == bool(want.get("equivalent")))
        cases.append(_case(f"pair-{k}", ok, equivalent=equivalent, updates_agree=holds))
    return cases


def _event(data: dict, ctx: _Ctx) -> MeasurementEvent:
    sd = ctx.observable(_require(data, "observable", "event"))
    if "function" in data:
        sd_a = sd
        sd = apply_function(ctx.function(data["function"], sd_a), sd_a, ctx.tol)
        basis_owner = sd_a
    else:
        basis_owner = sd
    if "preimage_of" in data:
        pre_data = data["preimage_of"]
        g = ctx.function(_require(pre_data, "function", "preimage_of"), sd)
        try:
            outcomes = preimage_of_set(g, sd, pre_data["outcomes"], ctx.tol)
        except (CollapseError, KeyError, TypeError) as exc:
            raise ScenarioValidationError(f"preimage_of: {exc}") from None
    else:
        outcomes = ctx.outcomes(_require(data, "outcomes", "event"), sd)
    basis = None
    if "basis" in data:
        from .operators import relabel_basis

        b = ctx.basis(data["basis"], basis_owner)
        basis = relabel_basis(b, sd, ctx.tol) if basis_owner is not sd else b
    return MeasurementEvent(sd, outcomes, basis)


def _run_equivalence(sc: dict, ctx: _Ctx) -> list[dict]:
    p, expect = sc["payload"], sc.get("expect", {})
    mode = p.get("mode", "projector")
    if mode == "bases_commute":
        sd = ctx.observable(_require(p, "observable", "payload"))
        specs = _require(p, "bases", "payload")
        if not isinstance(specs, list) or len(specs) != 2:
            raise ScenarioValidationError("bases_commute needs exactly two bases")
        b1, b2 = (ctx.basis(s, sd) for s in specs)
        res = bases_commute(b1, b2, sd, ctx.tol)
        return [_case("bases_commute", "commute" not in expect or res == bool(expect["commute"]), commute=res)]
    events = _require(p, "events", "payload")
    if not isinstance(events, list) or len(events) != 2:
        raise ScenarioValidationError("equivalence needs exactly two events")
    e1, e2 = (_event(e, ctx) for e in events)
    if mode == "projector":
        res = events_equivalent_projector(e1, e2, ctx.tol)
        return [_case("projector", "equivalent" not in expect or res == bool(expect["equivalent"]), equivalent=res)]
    if mode == "contextual_projector":
        res = contextual_event_equal_implies_same_projector(e1, e2, ctx.tol)
        return [_case("contextual_projector", res == bool(expect.get("holds", True)), holds=res)]
    raise ScenarioValidationError(f"unknown equivalence mode {mode!r}")


HANDLERS = {
    "collapse": _run_collapse,
    "post-processing": _run_post_processing,
    "ttt": _run_ttt,
    "valuation": _run_valuation,
    "classical": _run_classical,
    "equivalence": _run_equivalence,
}


def load_scenario(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ScenarioParseError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ScenarioParseError(f"{path}: top level must be a JSON object")
    return data


def validate_scenario(sc: dict, default_id: str = "scenario") -> None:
    sc.setdefault("id", default_id)
    if not isinstance(sc["id"], str) or not sc["id"]:
        raise ScenarioValidationError("'id' must be a nonempty string")
    if sc.get("kind") not in KINDS:
        raise ScenarioValidationError(f"'kind' must be one of {KINDS}, got {sc.get('kind')!r}")
    if not isinstance(sc.get("payload"), dict):
        raise ScenarioValidationError("'payload' must be an object")
    if not isinstance(sc.get("expect", {}), dict):
        raise ScenarioValidationError("'expect' must be an object")


def run_scenario_data(sc: dict, cfg: RunConfig = RunConfig(), default_id: str = "scenario") -> Report:
    start = time.perf_counter()
    validate_scenario(sc, default_id)
    ctx = _Ctx(sc, cfg)
    try:
        cases = HANDLERS[sc["kind"]](sc, ctx)
    except ScenarioValidationError:
        raise
    except CollapseError as exc:
        raise ScenarioValidationError(f"{type(exc).__name__}: {exc}") from None
    if cfg.cases:
        cases = [c for c in cases if fnmatch.fnmatchcase(f"{sc['id']}/{c['label']}", cfg.cases)]
    config = {**ctx.echo(), "run": cfg.as_dict()}
    for key in ("random_bases", "semantics", "subsets", "cap"):
        if key in sc["payload"]:
            config[key] = sc["payload"][key]
    return Report(sc["id"], sc["kind"], cases, config, elapsed=time.perf_counter() - start)


def run_scenario(path: str | Path, cfg: RunConfig = RunConfig()) -> Report:
    """Run one scenario file; raises ScenarioParseError / ScenarioValidationError on bad input."""
    return run_scenario_data(load_scenario(path), cfg, default_id=Path(path).stem)


def run_suite(directory: str | Path, cfg: RunConfig = RunConfig()) -> SuiteReport:
    """Run every ``*.json`` scenario in ``directory``; reports are sorted by scenario id."""
    reports = []
    for path in sorted(Path(directory).glob("*.json")):
        try:
            reports.append(run_scenario(path, cfg))
        except (ScenarioParseError, ScenarioValidationError) as exc:
            reports.append(Report(path.stem, "invalid", [], {}, error=str(exc)))
    reports.sort(key=lambda r: r.scenario_id)
    return SuiteReport(reports, {"run": cfg.as_dict(), "default_tolerances": DEFAULT_TOL.as_dict()})


def bundled_corpus() -> Path:
    return Path(__file__).parent / "scenarios"
