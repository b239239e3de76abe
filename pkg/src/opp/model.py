"""Framework graph, method definitions, validation and linkage derivation.

A framework is a three-layer graph: objectives link to principles, principles
link to practices.  Practices additionally carry indicators, which pair a
practice with an observable property.  A method adopts a subset of the
framework's elements; the linkages it "has" are those whose two endpoints it
adopts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping


class OPPError(Exception):
    """Base class for every error raised by this package."""


class ResolutionError(OPPError):
    """An identifier does not resolve against the framework."""

    def __init__(self, identifier: str, expected: str = "element") -> None:
        super().__init__(f"unknown {expected} id {identifier!r}")
        self.identifier = identifier
        self.expected = expected


class Layer(str, Enum):
    OBJECTIVE_PRINCIPLE = "objective-principle"
    PRINCIPLE_PRACTICE = "principle-practice"


class Category(str, Enum):
    PEOPLE = "people"
    PROCESS = "process"
    PROJECT = "project"
    PROCESS_ARTIFACT = "process-artifact"
    PRODUCT = "product"


class MeasurementKind(str, Enum):
    BOOLEAN = "boolean"
    LIKERT5 = "likert5"
    RATIO = "ratio"
    COUNT_VS_TARGET = "count-vs-target"
    THRESHOLD = "threshold"


LEGAL_WEIGHTS = frozenset({1, 2})


@dataclass(frozen=True)
class Objective:
    id: str
    name: str
    definition: str = ""


@dataclass(frozen=True)
class Principle:
    id: str
    name: str
    definition: str = ""


@dataclass(frozen=True)
class Practice:
    id: str
    name: str


@dataclass(frozen=True)
class PropertyDef:
    id: str
    description: str
    category: Category


@dataclass(frozen=True)
class Linkage:
    source: str
    target: str
    layer: Layer
    weight: int = 1


@dataclass(frozen=True)
class Indicator:
    practice: str
    property: str
    kind: MeasurementKind

    @property
    def key(self) -> tuple[str, str]:
        return (self.practice, self.property)


@dataclass(frozen=True)
class FrameworkModel:
    objectives: tuple[Objective, ...] = ()
    principles: tuple[Principle, ...] = ()
    practices: tuple[Practice, ...] = ()
    properties: tuple[PropertyDef, ...] = ()
    linkages: tuple[Linkage, ...] = ()
    indicators: tuple[Indicator, ...] = ()
    version: str = ""

    def objective(self, element_id: str) -> Objective:
        for obj in self.objectives:
            if obj.id == element_id:
                return obj
        raise ResolutionError(element_id, "objective")

    def principle(self, element_id: str) -> Principle:
        for pr in self.principles:
            if pr.id == element_id:
                return pr
        raise ResolutionError(element_id, "principle")

    def practice(self, element_id: str) -> Practice:
        for pr in self.practices:
            if pr.id == element_id:
                return pr
        raise ResolutionError(element_id, "practice")

    def property_def(self, element_id: str) -> PropertyDef:
        for prop in self.properties:
            if prop.id == element_id:
                return prop
        raise ResolutionError(element_id, "property")

    @property
    def objective_ids(self) -> frozenset[str]:
        return frozenset(o.id for o in self.objectives)

    @property
    def principle_ids(self) -> frozenset[str]:
        return frozenset(p.id for p in self.principles)

    @property
    def practice_ids(self) -> frozenset[str]:
        return frozenset(p.id for p in self.practices)

    def outgoing(self, source: str) -> tuple[Linkage, ...]:
        """Linkages whose source is ``source``, in framework order."""
        return tuple(link for link in self.linkages if link.source == source)

    def indicators_for(self, practice: str) -> tuple[Indicator, ...]:
        return tuple(ind for ind in self.indicators if ind.practice == practice)

    def name_of(self, element_id: str) -> str:
        for group in (self.objectives, self.principles, self.practices):
            for element in group:
                if element.id == element_id:
                    return element.name
        raise ResolutionError(element_id)


@dataclass(frozen=True)
class Override:
    """Asserted numerators for one objective or principle.

    ``weighted`` is optional; when absent the derived weighted numerator is
    kept.
    """

    count: int
    weighted: int | None = None


@dataclass(frozen=True)
class MethodDefinition:
    id: str
    name: str
    objectives: frozenset[str] = frozenset()
    principles: frozenset[str] = frozenset()
    practices: frozenset[str] = frozenset()
    overrides: Mapping[str, Override] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "objectives", frozenset(self.objectives))
        object.__setattr__(self, "principles", frozenset(self.principles))
        object.__setattr__(self, "practices", frozenset(self.practices))
        object.__setattr__(self, "overrides", dict(sorted(self.overrides.items())))

    def __hash__(self) -> int:
        return hash((self.id, self.objectives, self.principles, self.practices,
                     tuple(self.overrides.items())))

    @property
    def adopted(self) -> frozenset[str]:
        return self.objectives | self.principles | self.practices

    def without(self, element_id: str) -> MethodDefinition:
        """Copy of this method with one adopted element dropped."""
        return MethodDefinition(
            self.id,
            self.name,
            self.objectives - {element_id},
            self.principles - {element_id},
            self.practices - {element_id},
            {k: v for k, v in self.overrides.items() if k != element_id},
        )


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    element: str = ""


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[Finding, ...] = ()
    warnings: tuple[Finding, ...] = ()

    @property
    def accepted(self) -> bool:
        return not self.errors

    def error_codes(self) -> list[str]:
        return [f.code for f in self.errors]

    def warning_codes(self) -> list[str]:
        return [f.code for f in self.warnings]


@dataclass(frozen=True)
class Discrepancy:
    element: str
    asserted: int
    derived: int
    asserted_weighted: int | None = None
    derived_weighted: int | None = None


def _duplicates(ids: Iterable[str]) -> list[str]:
    return sorted(k for k, n in Counter(ids).items() if n > 1)


def validate_framework(model: FrameworkModel) -> ValidationReport:
    """Check the structural invariants of ``model``.

    Never raises; every finding is returned.  Orphaned principles and
    practices are warnings, everything else is an error.
    """
    errors: list[Finding] = []
    warnings: list[Finding] = []

    groups = (
        ("objective", [o.id for o in model.objectives]),
        ("principle", [p.id for p in model.principles]),
        ("practice", [p.id for p in model.practices]),
        ("property", [p.id for p in model.properties]),
    )
    for label, ids in groups:
        for dup in _duplicates(ids):
            errors.append(Finding("duplicate-id", f"{label} id {dup!r} is defined more than once", dup))
    for element in (*model.objectives, *model.principles, *model.practices):
        if not element.name.strip():
            errors.append(Finding("empty-name", "element name must not be empty", element.id))
    for prop in model.properties:
        if not isinstance(prop.category, Category):
            errors.append(Finding("invalid-category", f"unknown property category {prop.category!r}", prop.id))

    objectives = model.objective_ids
    principles = model.principle_ids
    practices = model.practice_ids
    layer_of = {}
    for ids, name in ((objectives, "objective"), (principles, "principle"), (practices, "practice")):
        for i in ids:
            layer_of.setdefault(i, name)
    expected_ends = {
        Layer.OBJECTIVE_PRINCIPLE: ("objective", "principle"),
        Layer.PRINCIPLE_PRACTICE: ("principle", "practice"),
    }

    seen: set[tuple[str, str]] = set()
    for link in model.linkages:
        where = f"{link.source}->{link.target}"
        if not isinstance(link.layer, Layer):
            errors.append(Finding("unknown-layer", f"unknown linkage layer {link.layer!r}", where))
            continue
        want_src, want_dst = expected_ends[link.layer]
        for end, want in ((link.source, want_src), (link.target, want_dst)):
            if end not in layer_of:
                errors.append(Finding("dangling-reference", f"linkage endpoint {end!r} does not resolve", where))
            elif layer_of[end] != want:
                errors.append(Finding(
                    "cross-layer-edge",
                    f"{link.layer.value} linkage expects a {want} but {end!r} is a {layer_of[end]}",
                    where,
                ))
        if isinstance(link.weight, bool) or link.weight not in LEGAL_WEIGHTS:
            errors.append(Finding("illegal-weight", f"weight {link.weight!r} is not 1 or 2", where))
        elif link.weight == 2 and link.layer is Layer.PRINCIPLE_PRACTICE:
            errors.append(Finding("illegal-weight", "weight 2 is only allowed on objective-principle linkages", where))
        key = (link.source, link.target)
        if key in seen:
            errors.append(Finding("duplicate-linkage", "linkage is defined more than once", where))
        seen.add(key)

    linked_principles = {l.target for l in model.linkages if l.layer is Layer.OBJECTIVE_PRINCIPLE}
    linked_practices = {l.target for l in model.linkages if l.layer is Layer.PRINCIPLE_PRACTICE}
    for pr in model.principles:
        if pr.id not in linked_principles:
            warnings.append(Finding("orphan-principle", "principle supports no objective", pr.id))
    for pr in model.practices:
        if pr.id not in linked_practices:
            warnings.append(Finding("orphan-practice", "practice reflects no principle", pr.id))

    prop_ids = {p.id for p in model.properties}
    seen_ind: set[tuple[str, str]] = set()
    for ind in model.indicators:
        where = f"{ind.practice}:{ind.property}"
        if ind.practice not in practices:
            errors.append(Finding("dangling-reference", f"indicator practice {ind.practice!r} does not resolve", where))
        if ind.property not in prop_ids:
            errors.append(Finding("dangling-reference", f"indicator property {ind.property!r} does not resolve", where))
        if not isinstance(ind.kind, MeasurementKind):
            errors.append(Finding("invalid-kind", f"unknown measurement kind {ind.kind!r}", where))
        if ind.key in seen_ind:
            errors.append(Finding("duplicate-indicator", "indicator is defined more than once", where))
        seen_ind.add(ind.key)

    return ValidationReport(tuple(errors), tuple(warnings))


def expected_counts(framework: FrameworkModel, element: str) -> tuple[int, int]:
    """(number of outgoing linkages, sum of their weights) for an objective or principle."""
    if element not in framework.objective_ids and element not in framework.principle_ids:
        raise ResolutionError(element, "objective or principle")
    links = framework.outgoing(element)
    return len(links), sum(link.weight for link in links)


def validate_method(framework: FrameworkModel, method: MethodDefinition) -> ValidationReport:
    errors: list[Finding] = []
    for ids, valid, label in (
        (method.objectives, framework.objective_ids, "objective"),
        (method.principles, framework.principle_ids, "principle"),
        (method.practices, framework.practice_ids, "practice"),
    ):
        for unknown in sorted(ids - valid):
            errors.append(Finding("unresolved-id", f"adopted {label} {unknown!r} is not in the framework", unknown))
    for element, override in method.overrides.items():
        try:
            count, weighted = expected_counts(framework, element)
        except ResolutionError:
            errors.append(Finding("unresolved-id", f"override target {element!r} is not an objective or principle", element))
            continue
        if not 0 <= override.count <= count:
            errors.append(Finding("override-range", f"override count {override.count} exceeds expected {count}", element))
        if override.weighted is not None and not 0 <= override.weighted <= weighted:
            errors.append(Finding(
                "override-range", f"override weighted count {override.weighted} exceeds expected {weighted}", element,
            ))
    return ValidationReport(tuple(errors), ())


def _require_resolved(framework: FrameworkModel, method: MethodDefinition) -> None:
    for finding in validate_method(framework, method).errors:
        if finding.code == "unresolved-id":
            raise ResolutionError(finding.element)


def derive_linkages(framework: FrameworkModel, method: MethodDefinition) -> frozenset[Linkage]:
    """Framework linkages whose source and target the method both adopts."""
    _require_resolved(framework, method)
    adopted = method.adopted
    return frozenset(
        link for link in framework.linkages if link.source in adopted and link.target in adopted
    )


def derived_counts(framework: FrameworkModel, method: MethodDefinition, element: str) -> tuple[int, int]:
    expected_counts(framework, element)
    if element not in method.adopted:
        return 0, 0
    adopted = method.adopted
    present = [link for link in framework.outgoing(element) if link.target in adopted]
    return len(present), sum(link.weight for link in present)


def check_consistency(framework: FrameworkModel, method: MethodDefinition) -> list[Discrepancy]:
    """Compare each asserted override with the numerator derived from adoption."""
    _require_resolved(framework, method)
    found = []
    for element, override in method.overrides.items():
        count, weighted = derived_counts(framework, method, element)
        count_off = override.count != count
        weighted_off = override.weighted is not None and override.weighted != weighted
        if count_off or weighted_off:
            found.append(Discrepancy(
                element,
                override.count,
                count,
                override.weighted,
                weighted if override.weighted is not None else None,
            ))
    return found


@dataclass(frozen=True)
class TraceEdge:
    principle: str
    weight: int
    adopted: bool | None
    practices: tuple[tuple[str, int, bool | None], ...]


@dataclass(frozen=True)
class LinkageTrace:
    objective: str
    adopted: bool | None
    edges: tuple[TraceEdge, ...]


def explain_objective(
    framework: FrameworkModel, objective: str, method: MethodDefinition | None = None
) -> LinkageTrace:
    """Objective -> principles -> practices, with weights and adoption marks."""
    framework.objective(objective)
    adopted = method.adopted if method is not None else None

    def mark(element: str) -> bool | None:
        return None if adopted is None else element in adopted

    edges = []
    for link in framework.outgoing(objective):
        practices = tuple((pl.target, pl.weight, mark(pl.target)) for pl in framework.outgoing(link.target))
        edges.append(TraceEdge(link.target, link.weight, mark(link.target), practices))
    return LinkageTrace(objective, mark(objective), tuple(edges))
