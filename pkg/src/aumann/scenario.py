"""Scenario files, reports, and the operations behind the CLI.

A scenario is a single JSON document: named worlds, one partition per agent,
a measure (classical weights, quantum DOVM atoms, a GPT cone with SVM atoms,
or a POVM-with-state pair produced by conversion), plus an optional
hypothesis, per-agent targets, and tolerance. Complex numbers serialize as
``[re, im]`` pairs. World names exist only at this boundary; the core works
on indices.
"""

from __future__ import annotations

import json
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import classical as cl
from . import gpt as gp
from . import quantum as qm
from .errors import ScenarioError, ScenarioSyntaxError, ScenarioValidationError
from .generators import (
    LAYERS,
    ScenarioBundle,
    gen_planted_scenario,
    gen_unconstrained_scenario,
)
from .knowledge import (
    Event,
    KnowledgeModel,
    Partition,
    common_knowledge,
    know,
    mutual_knowledge_chain,
)
from .tolerances import MATCH_TOL, NULL_MASS_TOL
from .verdicts import AgreementVerdict, VerdictStatus

__all__ = [
    "SCENARIO_VERSION",
    "AgentSpec",
    "ScenarioFile",
    "parse_scenario",
    "serialize_scenario",
    "scenario_from_bundle",
    "Report",
    "SearchStats",
    "verify_bundle",
    "run_agree",
    "run_analyze",
    "run_convert",
    "run_search",
    "run_gen",
]

SCENARIO_VERSION = 1

MEASURE_KINDS = ("classical", "quantum", "gpt", "povm")


# ---------------------------------------------------------------------------
# parsing helpers

def _expect(raw: Any, kind: type, path: str, what: str) -> Any:
    if not isinstance(raw, kind) or isinstance(raw, bool):
        raise ScenarioValidationError(f"expected {what}, got {type(raw).__name__}", path)
    return raw


def _number(raw: Any, path: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ScenarioValidationError(f"expected a number, got {type(raw).__name__}", path)
    return float(raw)


def _number_list(raw: Any, path: str) -> list[float]:
    items = _expect(raw, list, path, "a list of numbers")
    return [_number(x, f"{path}[{i}]") for i, x in enumerate(items)]


def _complex_from_json(raw: Any, path: str) -> complex:
    pair = _expect(raw, list, path, "an [re, im] pair")
    if len(pair) != 2:
        raise ScenarioValidationError(f"expected an [re, im] pair, got {len(pair)} entries", path)
    return complex(_number(pair[0], f"{path}[0]"), _number(pair[1], f"{path}[1]"))


def _matrix_from_json(raw: Any, dim: int, path: str) -> np.ndarray:
    rows = _expect(raw, list, path, "a matrix (list of rows)")
    if len(rows) != dim:
        raise ScenarioValidationError(f"expected {dim} rows, got {len(rows)}", path)
    out = np.empty((dim, dim), dtype=complex)
    for r, row in enumerate(rows):
        entries = _expect(row, list, f"{path}[{r}]", "a row (list of [re, im] pairs)")
        if len(entries) != dim:
            raise ScenarioValidationError(f"expected {dim} entries, got {len(entries)}", f"{path}[{r}]")
        for c, entry in enumerate(entries):
            out[r, c] = _complex_from_json(entry, f"{path}[{r}][{c}]")
    return out


def _matrix_to_json(m: np.ndarray) -> list:
    a = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


# ---------------------------------------------------------------------------
# scenario document

@dataclass
class AgentSpec:
    name: str
    partition: list[list[str]]  # cells as lists of world names


@dataclass
class ScenarioFile:
    """Validated scenario document; holds plain data, builds core objects."""

    version: int
    worlds: list[str]
    agents: list[AgentSpec]
    measure: dict
    hypothesis: list[str] | None = None
    targets: list | None = None
    tolerance: float | None = None

    @property
    def layer(self) -> str:
        return next(iter(self.measure))

    @property
    def n_worlds(self) -> int:
        return len(self.worlds)

    @property
    def world_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.worlds)}

    def event_from_names(self, names: list[str], path: str = "event") -> Event:
        index = self.world_index
        worlds = []
        for k, name in enumerate(names):
            if name not in index:
                raise ScenarioValidationError(f"unknown world {name!r}", f"{path}[{k}]")
            worlds.append(index[name])
        return Event.from_worlds(worlds, self.n_worlds)

    def event_names(self, e: Event) -> list[str]:
        return [self.worlds[w] for w in e]

    def model(self) -> KnowledgeModel:
        partitions = []
        for a, agent in enumerate(self.agents):
            blocks = [
                [self.world_index[name] for name in cell] for cell in agent.partition
            ]
            try:
                partitions.append(Partition.from_blocks(blocks, self.n_worlds))
            except ValueError as exc:
                raise ScenarioValidationError(str(exc), f"agents[{a}].partition") from exc
        try:
            return KnowledgeModel(self.n_worlds, tuple(partitions))
        except ValueError as exc:
            raise ScenarioValidationError(str(exc), "agents") from exc

    def hypothesis_event(self) -> Event | None:
        if self.hypothesis is None:
            return None
        return self.event_from_names(self.hypothesis, "hypothesis")

    def cone(self) -> gp.ConeSpace:
        payload = self.measure["gpt"]
        spec = payload["cone"]
        kind = spec["kind"]
        try:
            if kind == "simplex":
                return gp.SimplexCone(spec["dim"])
            if kind == "psd":
                return gp.PsdCone(spec["matrix_dim"])
            return gp.PolyhedralCone(np.asarray(spec["generators"], float), np.asarray(payload["unit"], float))
        except ValueError as exc:
            raise ScenarioValidationError(str(exc), "measure.gpt.cone") from exc

    def measure_object(self):
        """The core measure: ProbabilityMeasure, Dovm, Svm, or (Povm, DensityOperator)."""
        layer = self.layer
        payload = self.measure[layer]
        try:
            if layer == "classical":
                return cl.ProbabilityMeasure(np.asarray(payload["weights"], float))
            if layer == "quantum":
                dim = payload["dim"]
                return qm.Dovm(np.stack([
                    _matrix_from_json(m, dim, f"measure.quantum.atoms[{i}]")
                    for i, m in enumerate(payload["atoms"])
                ]))
            if layer == "povm":
                dim = payload["dim"]
                povm = qm.Povm(np.stack([
                    _matrix_from_json(m, dim, f"measure.povm.effects[{i}]")
                    for i, m in enumerate(payload["effects"])
                ]))
                state = qm.DensityOperator(_matrix_from_json(payload["state"], dim, "measure.povm.state"))
                return povm, state
            cone = self.cone()
            return gp.Svm(cone, np.asarray(payload["atoms"], float))
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioValidationError(str(exc), f"measure.{layer}") from exc

    def target_values(self) -> tuple | None:
        """Targets as floats (classical), matrices (quantum/povm), or vectors (gpt)."""
        if self.targets is None:
            return None
        layer = self.layer
        if layer == "classical":
            return tuple(float(t) for t in self.targets)
        if layer in ("quantum", "povm"):
            dim = self.measure[layer]["dim"]
            return tuple(
                _matrix_from_json(t, dim, f"targets[{i}]") for i, t in enumerate(self.targets)
            )
        return tuple(np.asarray(t, float) for t in self.targets)


def parse_scenario(text: str) -> ScenarioFile:
    """Parse and validate a scenario document.

    Raises :class:`ScenarioSyntaxError` for malformed JSON and
    :class:`ScenarioValidationError` (with a field path) for structural
    problems, including core-object invariant violations.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(f"{exc.msg} (line {exc.lineno}, column {exc.colno})") from exc
    doc = _expect(raw, dict, "", "a JSON object")

    version = _expect(doc.get("version"), int, "version", "an integer")
    if version != SCENARIO_VERSION:
        raise ScenarioValidationError(f"unsupported version {version}", "version")

    worlds_raw = _expect(doc.get("worlds"), list, "worlds", "a list of world names")
    if not worlds_raw:
        raise ScenarioValidationError("at least one world is required", "worlds")
    worlds = [_expect(w, str, f"worlds[{i}]", "a string") for i, w in enumerate(worlds_raw)]
    if len(set(worlds)) != len(worlds):
        raise ScenarioValidationError("world names must be unique", "worlds")

    agents_raw = _expect(doc.get("agents"), list, "agents", "a list of agents")
    if not agents_raw:
        raise ScenarioValidationError("at least one agent is required", "agents")
    agents = []
    names_seen = set()
    world_set = set(worlds)
    for a, item in enumerate(agents_raw):
        obj = _expect(item, dict, f"agents[{a}]", "an object")
        name = _expect(obj.get("name"), str, f"agents[{a}].name", "a string")
        if name in names_seen:
            raise ScenarioValidationError(f"duplicate agent name {name!r}", f"agents[{a}].name")
        names_seen.add(name)
        partition_raw = _expect(obj.get("partition"), list, f"agents[{a}].partition", "a list of cells")
        partition = []
        for c, cell in enumerate(partition_raw):
            cell_names = _expect(cell, list, f"agents[{a}].partition[{c}]", "a list of world names")
            for k, w in enumerate(cell_names):
                _expect(w, str, f"agents[{a}].partition[{c}][{k}]", "a string")
                if w not in world_set:
                    raise ScenarioValidationError(f"unknown world {w!r}", f"agents[{a}].partition[{c}][{k}]")
            partition.append(list(cell_names))
        agents.append(AgentSpec(name, partition))

    measure_raw = _expect(doc.get("measure"), dict, "measure", "an object")
    if len(measure_raw) != 1 or next(iter(measure_raw)) not in MEASURE_KINDS:
        raise ScenarioValidationError(f"measure must have exactly one of the keys {MEASURE_KINDS}", "measure")
    layer = next(iter(measure_raw))
    payload = _expect(measure_raw[layer], dict, f"measure.{layer}", "an object")
    measure = {layer: _normalize_measure(layer, payload, len(worlds))}

    hypothesis = None
    if doc.get("hypothesis") is not None:
        hyp_raw = _expect(doc["hypothesis"], list, "hypothesis", "a list of world names")
        hypothesis = [_expect(w, str, f"hypothesis[{i}]", "a string") for i, w in enumerate(hyp_raw)]

    targets = None
    if doc.get("targets") is not None:
        targets_raw = _expect(doc["targets"], list, "targets", "a list")
        if len(targets_raw) != len(agents):
            raise ScenarioValidationError(
                f"expected {len(agents)} targets (one per agent), got {len(targets_raw)}", "targets"
            )
        targets = _normalize_targets(layer, targets_raw, measure[layer])

    tolerance = None
    if doc.get("tolerance") is not None:
        tolerance = _number(doc["tolerance"], "tolerance")
        if tolerance <= 0:
            raise ScenarioValidationError("tolerance must be positive", "tolerance")

    known = {"version", "worlds", "agents", "measure", "hypothesis", "targets", "tolerance"}
    for key in doc:
        if key not in known:
            raise ScenarioValidationError(f"unknown top-level field {key!r}", key)

    sf = ScenarioFile(version, worlds, agents, measure, hypothesis, targets, tolerance)
    # Building the core objects validates every module invariant up front.
    sf.model()
    sf.measure_object()
    sf.hypothesis_event()
    sf.target_values()
    return sf


def _normalize_measure(layer: str, payload: dict, n_worlds: int) -> dict:
    path = f"measure.{layer}"
    if layer == "classical":
        weights = _number_list(payload.get("weights"), f"{path}.weights")
        if len(weights) != n_worlds:
            raise ScenarioValidationError(f"expected {n_worlds} weights, got {len(weights)}", f"{path}.weights")
        _reject_unknown(payload, {"weights"}, path)
        return {"weights": weights}
    if layer in ("quantum", "povm"):
        dim = _expect(payload.get("dim"), int, f"{path}.dim", "an integer")
        if dim < 1:
            raise ScenarioValidationError("dim must be positive", f"{path}.dim")
        key = "atoms" if layer == "quantum" else "effects"
        mats_raw = _expect(payload.get(key), list, f"{path}.{key}", "a list of matrices")
        if len(mats_raw) != n_worlds:
            raise ScenarioValidationError(f"expected {n_worlds} matrices, got {len(mats_raw)}", f"{path}.{key}")
        mats = [
            _matrix_to_json(_matrix_from_json(m, dim, f"{path}.{key}[{i}]"))
            for i, m in enumerate(mats_raw)
        ]
        out = {"dim": dim, key: mats}
        if layer == "povm":
            out["state"] = _matrix_to_json(_matrix_from_json(payload.get("state"), dim, f"{path}.state"))
            _reject_unknown(payload, {"dim", key, "state"}, path)
        else:
            _reject_unknown(payload, {"dim", key}, path)
        return out
    # gpt
    cone_raw = _expect(payload.get("cone"), dict, f"{path}.cone", "an object")
    kind = _expect(cone_raw.get("kind"), str, f"{path}.cone.kind", "a string")
    if kind == "simplex":
        dim = _expect(cone_raw.get("dim"), int, f"{path}.cone.dim", "an integer")
        cone = {"kind": "simplex", "dim": dim}
        expected_unit = np.ones(dim)
    elif kind == "psd":
        k = _expect(cone_raw.get("matrix_dim"), int, f"{path}.cone.matrix_dim", "an integer")
        if k < 1:
            raise ScenarioValidationError("matrix_dim must be positive", f"{path}.cone.matrix_dim")
        dim = k * k
        cone = {"kind": "psd", "matrix_dim": k}
        expected_unit = gp.vectorize(np.eye(k))
    elif kind == "polyhedral":
        dim = _expect(cone_raw.get("dim"), int, f"{path}.cone.dim", "an integer")
        gens_raw = _expect(cone_raw.get("generators"), list, f"{path}.cone.generators", "a list of vectors")
        generators = [
            _vector(g, dim, f"{path}.cone.generators[{i}]") for i, g in enumerate(gens_raw)
        ]
        cone = {"kind": "polyhedral", "dim": dim, "generators": generators}
        expected_unit = None
    else:
        raise ScenarioValidationError(f"unknown cone kind {kind!r}", f"{path}.cone.kind")
    unit = _vector(payload.get("unit"), dim, f"{path}.unit")
    if expected_unit is not None and not np.allclose(unit, expected_unit, atol=1e-12):
        raise ScenarioValidationError(f"unit must be the canonical {kind} unit functional", f"{path}.unit")
    atoms_raw = _expect(payload.get("atoms"), list, f"{path}.atoms", "a list of vectors")
    if len(atoms_raw) != n_worlds:
        raise ScenarioValidationError(f"expected {n_worlds} atoms, got {len(atoms_raw)}", f"{path}.atoms")
    atoms = [_vector(a, dim, f"{path}.atoms[{i}]") for i, a in enumerate(atoms_raw)]
    _reject_unknown(payload, {"cone", "unit", "atoms"}, path)
    return {"cone": cone, "unit": unit, "atoms": atoms}


def _vector(raw: Any, dim: int, path: str) -> list[float]:
    values = _number_list(raw, path)
    if len(values) != dim:
        raise ScenarioValidationError(f"expected {dim} entries, got {len(values)}", path)
    return values


def _reject_unknown(payload: dict, known: set, path: str) -> None:
    for key in payload:
        if key not in known:
            raise ScenarioValidationError(f"unknown field {key!r}", f"{path}.{key}")


def _normalize_targets(layer: str, targets_raw: list, measure_payload: dict) -> list:
    if layer == "classical":
        return [_number(t, f"targets[{i}]") for i, t in enumerate(targets_raw)]
    if layer in ("quantum", "povm"):
        dim = measure_payload["dim"]
        return [
            _matrix_to_json(_matrix_from_json(t, dim, f"targets[{i}]"))
            for i, t in enumerate(targets_raw)
        ]
    dim = len(measure_payload["unit"])
    return [_vector(t, dim, f"targets[{i}]") for i, t in enumerate(targets_raw)]


def serialize_scenario(sf: ScenarioFile) -> str:
    """Render a scenario as canonical JSON; ``parse_scenario`` inverts this."""
    doc: dict[str, Any] = {
        "version": sf.version,
        "worlds": list(sf.worlds),
        "agents": [{"name": a.name, "partition": [list(c) for c in a.partition]} for a in sf.agents],
        "measure": sf.measure,
    }
    if sf.hypothesis is not None:
        doc["hypothesis"] = list(sf.hypothesis)
    if sf.targets is not None:
        doc["targets"] = sf.targets
    if sf.tolerance is not None:
        doc["tolerance"] = sf.tolerance
    return json.dumps(doc, indent=2) + "\n"


def scenario_from_bundle(bundle: ScenarioBundle, tolerance: float | None = None) -> ScenarioFile:
    """Render a generated bundle as a scenario document (worlds ``w0..``)."""
    model = bundle.model
    worlds = [f"w{i}" for i in range(model.n_worlds)]
    agents = [
        AgentSpec(f"a{i + 1}", [[worlds[w] for w in cell] for cell in p.cells])
        for i, p in enumerate(model.partitions)
    ]
    measure = bundle.measure
    if bundle.layer == "classical":
        payload = {"classical": {"weights": [float(x) for x in measure.weights]}}
        targets = [float(t) for t in bundle.targets]
    elif bundle.layer == "quantum":
        payload = {"quantum": {"dim": measure.dim, "atoms": [_matrix_to_json(a) for a in measure.atoms]}}
        targets = [_matrix_to_json(qm._as_matrix(t)) for t in bundle.targets]
    else:
        cone = measure.cone
        if isinstance(cone, gp.SimplexCone):
            cone_doc = {"kind": "simplex", "dim": cone.dim}
        elif isinstance(cone, gp.PsdCone):
            cone_doc = {"kind": "psd", "matrix_dim": cone.matrix_dim}
        else:
            cone_doc = {
                "kind": "polyhedral",
                "dim": cone.dim,
                "generators": [[float(x) for x in g] for g in cone.generators],
            }
        payload = {
            "gpt": {
                "cone": cone_doc,
                "unit": [float(x) for x in cone.unit],
                "atoms": [[float(x) for x in a] for a in measure.atoms],
            }
        }
        targets = [[float(x) for x in gp._as_coords(cone, t)] for t in bundle.targets]
    hypothesis = None if bundle.hypothesis is None else [worlds[w] for w in bundle.hypothesis]
    return ScenarioFile(
        SCENARIO_VERSION, worlds, agents, payload, hypothesis, targets, tolerance
    )


# ---------------------------------------------------------------------------
# reports and runners

@dataclass
class Report:
    """Everything a run computed, plus wall-clock timings per phase."""

    layer: str
    worlds: list[str]
    verdict: AgreementVerdict | None
    event: Event | None = None
    knowledge: tuple[Event, ...] | None = None
    mutual_trace: tuple[Event, ...] | None = None
    common: Event | None = None
    posteriors_by_cell: list | None = None
    agent_names: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def _names(self, e: Event) -> list[str]:
        return [self.worlds[w] for w in e]

    def to_json_dict(self) -> dict:
        out: dict[str, Any] = {"layer": self.layer}
        if self.event is not None:
            out["event"] = self._names(self.event)
        if self.knowledge is not None:
            out["knowledge"] = {
                name: self._names(k) for name, k in zip(self.agent_names, self.knowledge)
            }
        if self.mutual_trace is not None:
            out["mutual_trace"] = [self._names(m) for m in self.mutual_trace]
        if self.common is not None:
            out["common_knowledge"] = self._names(self.common)
        if self.posteriors_by_cell is not None:
            out["posteriors_by_cell"] = {
                name: [
                    {"cell": self._names(cell), "value": _value_to_json(value)}
                    for cell, value in rows
                ]
                for name, rows in zip(self.agent_names, self.posteriors_by_cell)
            }
        if self.verdict is not None:
            out["verdict"] = {
                "status": self.verdict.status.value,
                "common_event": self._names(self.verdict.common_event),
                "posteriors": [_value_to_json(p) for p in self.verdict.posteriors],
                "pooled_posterior": _value_to_json(self.verdict.pooled_posterior),
            }
        out["timings"] = dict(self.timings)
        return out

    def to_text(self) -> str:
        lines = [f"layer: {self.layer}"]
        if self.event is not None:
            lines.append(f"event: {_names_text(self._names(self.event))}")
        if self.knowledge is not None:
            for name, k in zip(self.agent_names, self.knowledge):
                lines.append(f"knowledge[{name}]: {_names_text(self._names(k))}")
        if self.mutual_trace is not None:
            for level, m in enumerate(self.mutual_trace, start=1):
                lines.append(f"mutual[{level}]: {_names_text(self._names(m))}")
        if self.common is not None:
            lines.append(f"common knowledge: {_names_text(self._names(self.common))}")
        if self.posteriors_by_cell is not None:
            for name, rows in zip(self.agent_names, self.posteriors_by_cell):
                for cell, value in rows:
                    lines.append(
                        f"conditional[{name} | {_names_text(self._names(cell))}]: {_value_to_text(value)}"
                    )
        if self.verdict is not None:
            lines.append(f"verdict: {self.verdict.status.value}")
            lines.append(
                f"common event: {_names_text(self._names(self.verdict.common_event))}"
            )
            for name, p in zip(self.agent_names, self.verdict.posteriors):
                lines.append(f"posterior[{name}]: {_value_to_text(p)}")
            if self.verdict.pooled_posterior is not None:
                lines.append(f"pooled posterior: {_value_to_text(self.verdict.pooled_posterior)}")
        lines.append(
            "timings: " + " ".join(f"{k}={v:.3f}s" for k, v in self.timings.items())
        )
        return "\n".join(lines) + "\n"


def _names_text(names: list[str]) -> str:
    return "[" + ", ".join(sorted(names)) + "]"


def _value_to_json(value):
    if value is None:
        return None
    if isinstance(value, qm.DensityOperator):
        return _matrix_to_json(value.matrix)
    if isinstance(value, gp.GptState):
        return [float(x) for x in value.coords]
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return _matrix_to_json(value)
        return [float(x) for x in value]
    return float(value)


def _value_to_text(value) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, qm.DensityOperator):
        value = value.matrix
    if isinstance(value, gp.GptState):
        value = value.coords
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            rows = [
                "[" + ", ".join(f"{z.real:.6f}{z.imag:+.6f}j" for z in row) + "]"
                for row in value
            ]
            return "[" + ", ".join(rows) + "]"
        return "[" + ", ".join(f"{x:.6f}" for x in value) + "]"
    return f"{float(value):.6f}"


def verify_bundle(
    bundle: ScenarioBundle, tol: float = MATCH_TOL, *, max_iters: int | None = None
) -> AgreementVerdict:
    """Dispatch a generated bundle to its layer's verifier."""
    if bundle.layer == "classical":
        return cl.verify_aumann(
            bundle.model, bundle.measure, bundle.hypothesis, bundle.targets, tol, max_iters=max_iters
        )
    if bundle.layer == "quantum":
        return qm.verify_quantum_aumann(
            bundle.model, bundle.measure, bundle.targets, tol, max_iters=max_iters
        )
    return gp.verify_gpt_aumann(
        bundle.model, bundle.measure, bundle.targets, tol, max_iters=max_iters
    )


def _effective_tol(sf: ScenarioFile, tol: float | None) -> float:
    if tol is not None:
        return tol
    if sf.tolerance is not None:
        return sf.tolerance
    return MATCH_TOL


def _agreement_parts(sf: ScenarioFile, tol: float):
    """(model, event, verdict-callable) for a scenario with targets."""
    layer = sf.layer
    if layer == "povm":
        raise ScenarioValidationError("POVM scenarios only support conversion", "measure")
    model = sf.model()
    measure = sf.measure_object()
    targets = sf.target_values()
    if targets is None:
        raise ScenarioValidationError("this command needs per-agent targets", "targets")
    if layer == "classical":
        h = sf.hypothesis_event()
        if h is None:
            raise ScenarioValidationError("classical agreement needs a hypothesis", "hypothesis")
        event = cl.agreement_event(model, measure, h, targets, tol)
        run = lambda max_iters: cl.verify_aumann(model, measure, h, targets, tol, max_iters=max_iters)
    elif layer == "quantum":
        event = qm.quantum_agreement_event(model, measure, targets, tol)
        run = lambda max_iters: qm.verify_quantum_aumann(model, measure, targets, tol, max_iters=max_iters)
    else:
        event = gp.gpt_agreement_event(model, measure, targets, tol)
        run = lambda max_iters: gp.verify_gpt_aumann(model, measure, targets, tol, max_iters=max_iters)
    return model, measure, event, run


def run_agree(
    sf: ScenarioFile, *, tol: float | None = None, max_iters: int | None = None
) -> Report:
    """Verdict-centric run: build the agreement event and verify the theorem."""
    t0 = time.perf_counter()
    tol = _effective_tol(sf, tol)
    model, _, event, run = _agreement_parts(sf, tol)
    t1 = time.perf_counter()
    verdict = run(max_iters)
    t2 = time.perf_counter()
    return Report(
        layer=sf.layer,
        worlds=list(sf.worlds),
        verdict=verdict,
        event=event,
        common=verdict.common_event,
        agent_names=[a.name for a in sf.agents],
        timings={"build": t1 - t0, "verify": t2 - t1, "total": t2 - t0},
    )


def _conditional_table(sf: ScenarioFile, model: KnowledgeModel, measure, h: Event | None):
    """Per agent: (cell, conditional value) rows; None value marks null cells."""
    layer = sf.layer
    table = []
    for p in model.partitions:
        rows = []
        for cell in p.cells:
            value = None
            if layer == "classical":
                if h is not None:
                    p_cell = cl.probability(measure, cell)
                    if p_cell > NULL_MASS_TOL:
                        value = cl.probability(measure, h & cell) / p_cell
            elif layer == "quantum":
                raw = qm.dovm_value(measure, cell)
                tr = float(raw.trace().real)
                if tr > NULL_MASS_TOL:
                    value = raw / tr
            else:
                raw = gp.svm_value(measure, cell)
                u = float(measure.cone.unit @ raw)
                if u > NULL_MASS_TOL:
                    value = raw / u
            rows.append((cell, value))
        table.append(rows)
    return table


def run_analyze(
    sf: ScenarioFile, *, tol: float | None = None, max_iters: int | None = None
) -> Report:
    """Full knowledge analysis of the agreement event (or bare hypothesis).

    With targets present the analyzed event is the agreement event and the
    report carries a verdict; otherwise the hypothesis itself is analyzed.
    """
    t0 = time.perf_counter()
    tol = _effective_tol(sf, tol)
    layer = sf.layer
    if layer == "povm":
        raise ScenarioValidationError("POVM scenarios only support conversion", "measure")
    verdict = None
    if sf.targets is not None:
        model, measure, event, run = _agreement_parts(sf, tol)
        t1 = time.perf_counter()
        verdict = run(max_iters)
        t2 = time.perf_counter()
    else:
        model = sf.model()
        measure = sf.measure_object()
        event = sf.hypothesis_event()
        if event is None:
            raise ScenarioValidationError(
                "analysis needs targets or a hypothesis event", "hypothesis"
            )
        t1 = time.perf_counter()
        t2 = t1
    knowledge = tuple(know(model, i, event) for i in range(model.n_agents))
    trace = tuple(mutual_knowledge_chain(model, event, max_iters=max_iters))
    common = common_knowledge(model, event, max_iters=max_iters)
    table = _conditional_table(sf, model, measure, sf.hypothesis_event())
    t3 = time.perf_counter()
    return Report(
        layer=layer,
        worlds=list(sf.worlds),
        verdict=verdict,
        event=event,
        knowledge=knowledge,
        mutual_trace=trace,
        common=common,
        posteriors_by_cell=table,
        agent_names=[a.name for a in sf.agents],
        timings={"build": t1 - t0, "verify": t2 - t1, "analyze": t3 - t2, "total": t3 - t0},
    )


def run_convert(sf: ScenarioFile, direction: str) -> ScenarioFile:
    """Convert between DOVM atoms and (POVM, state) form of a quantum scenario.

    ``dovm2povm`` stores the effects together with the total state, so
    ``povm2dovm`` can reconstruct the original atoms exactly (up to float
    roundoff) for full-rank totals.
    """
    if direction == "dovm2povm":
        if sf.layer != "quantum":
            raise ScenarioValidationError("dovm2povm needs a quantum scenario", "measure")
        rho = sf.measure_object()
        povm = qm.dovm_to_povm(rho)
        payload = {
            "povm": {
                "dim": rho.dim,
                "effects": [_matrix_to_json(e) for e in povm.effects],
                "state": _matrix_to_json(rho.total),
            }
        }
    elif direction == "povm2dovm":
        if sf.layer != "povm":
            raise ScenarioValidationError("povm2dovm needs a povm scenario", "measure")
        povm, state = sf.measure_object()
        rho = qm.povm_to_dovm(povm, state)
        payload = {"quantum": {"dim": rho.dim, "atoms": [_matrix_to_json(a) for a in rho.atoms]}}
    else:
        raise ScenarioValidationError(f"unknown direction {direction!r}", "direction")
    return ScenarioFile(
        sf.version, list(sf.worlds), list(sf.agents), payload, sf.hypothesis, sf.targets, sf.tolerance
    )


def run_gen(
    layer: str,
    seed: int,
    *,
    n_worlds: int = 6,
    n_agents: int = 2,
    dim: int = 2,
    cone_kind: str = "simplex",
    n_generators: int | None = None,
    planted: bool = True,
) -> ScenarioFile:
    """Generate a scenario document for the given layer and seed."""
    gen = gen_planted_scenario if planted else gen_unconstrained_scenario
    bundle = gen(seed, layer, n_worlds, n_agents, dim, cone_kind, n_generators)
    return scenario_from_bundle(bundle)


@dataclass
class SearchStats:
    """Verdict counts over a seed range; any violation signals a bug."""

    layer: str
    n_scenarios: int
    counts: dict[str, int]
    violation_seeds: tuple[int, ...]
    elapsed_s: float

    @property
    def violations(self) -> int:
        return self.counts.get(VerdictStatus.VIOLATED.value, 0)

    def to_json_dict(self) -> dict:
        return {
            "layer": self.layer,
            "n_scenarios": self.n_scenarios,
            "counts": dict(self.counts),
            "violations": self.violations,
            "violation_seeds": list(self.violation_seeds),
            "elapsed_s": self.elapsed_s,
        }

    def to_text(self) -> str:
        lines = [f"layer: {self.layer}", f"scenarios: {self.n_scenarios}"]
        for status in VerdictStatus:
            lines.append(f"{status.value}: {self.counts.get(status.value, 0)}")
        lines.append(f"violations: {self.violations}")
        lines.append(f"elapsed: {self.elapsed_s:.3f}s")
        return "\n".join(lines) + "\n"


def _search_shard(args) -> tuple[Counter, list[int]]:
    layer, start, stop, params = args
    counts: Counter = Counter()
    bad: list[int] = []
    for i in range(start, stop):
        seed = params["base_seed"] + i
        planted = params["mode"] == "planted" or (params["mode"] == "mix" and i % 2 == 0)
        gen = gen_planted_scenario if planted else gen_unconstrained_scenario
        bundle = gen(
            seed, layer, params["n_worlds"], params["n_agents"], params["dim"],
            params["cone_kind"], params["n_generators"],
        )
        verdict = verify_bundle(bundle, params["tol"])
        counts[verdict.status.value] += 1
        if verdict.status is VerdictStatus.VIOLATED:
            bad.append(seed)
    return counts, bad


def run_search(
    layer: str,
    n_seeds: int,
    *,
    base_seed: int = 0,
    n_worlds: int = 6,
    n_agents: int = 2,
    dim: int = 2,
    cone_kind: str = "simplex",
    n_generators: int | None = None,
    mode: str = "mix",
    tol: float | None = None,
    workers: int = 1,
) -> SearchStats:
    """Run seeded scenarios (planted, random, or an even mix) and tally verdicts.

    Sharding by seed range means results are identical for any worker count.
    """
    if layer not in LAYERS:
        raise ValueError(f"layer must be one of {LAYERS}, got {layer!r}")
    if mode not in ("mix", "planted", "random"):
        raise ValueError(f"mode must be mix, planted, or random, got {mode!r}")
    params = {
        "base_seed": base_seed,
        "n_worlds": n_worlds,
        "n_agents": n_agents,
        "dim": dim,
        "cone_kind": cone_kind,
        "n_generators": n_generators,
        "mode": mode,
        "tol": MATCH_TOL if tol is None else tol,
    }
    t0 = time.perf_counter()
    counts: Counter = Counter()
    bad: list[int] = []
    if workers <= 1:
        counts, bad = _search_shard((layer, 0, n_seeds, params))
    else:
        step = -(-n_seeds // workers)
        shards = [
            (layer, lo, min(lo + step, n_seeds), params) for lo in range(0, n_seeds, step)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for shard_counts, shard_bad in pool.map(_search_shard, shards):
                counts.update(shard_counts)
                bad.extend(shard_bad)
    elapsed = time.perf_counter() - t0
    return SearchStats(layer, n_seeds, dict(counts), tuple(sorted(bad)), elapsed)
