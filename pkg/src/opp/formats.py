"""On-disk documents, the embedded reference dataset, and report rendering.

Every document is a JSON envelope ``{"kind": ..., "version": "opp/1",
"payload": {...}}`` checked against the schemas shipped in ``opp/schemas``.
Rationals are written as ``"p/q"`` strings, never floats.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, singledispatch
from importlib import resources
from typing import IO, Any, Union

import jsonschema

from opp.adequacy import RANKING_CAVEAT, AdequacyReport, Coverage, LikertLabel, RankedList
from opp.indicators import (
    Comparison,
    Measurement,
    MeasurementError,
    MeasurementSet,
    ScoreReport,
    Threshold,
)
from opp.model import (
    Category,
    Discrepancy,
    FrameworkModel,
    Indicator,
    Layer,
    LinkageTrace,
    MeasurementKind,
    MethodDefinition,
    Objective,
    OPPError,
    Override,
    Practice,
    Principle,
    PropertyDef,
    ResolutionError,
    ValidationReport,
    Linkage,
    validate_framework,
    validate_method,
)

SCHEMA_VERSION = "opp/1"
FORMATS = ("data", "table", "csv")
BUILTIN_METHODS = ("xp", "fdd", "method-a")

Source = Union[bytes, str, IO[bytes], IO[str]]


class FormatError(OPPError):
    """Base for input document problems."""


class DocumentSyntaxError(FormatError):
    def __init__(self, message: str, line: int, column: int, position: int) -> None:
        super().__init__(f"syntax error at line {line}, column {column} (offset {position}): {message}")
        self.line, self.column, self.position = line, column, position


class SchemaError(FormatError):
    def __init__(self, message: str, path: str) -> None:
        super().__init__(f"schema violation at {path}: {message}")
        self.path = path


class ModelValidationError(FormatError):
    def __init__(self, report: ValidationReport) -> None:
        lines = "; ".join(f"{f.code} ({f.element}): {f.message}" for f in report.errors)
        super().__init__(f"framework rejected: {lines}")
        self.report = report


# -- parsing ---------------------------------------------------------------


def _read(source: Source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        return source.decode("utf-8")
    return source


@lru_cache(maxsize=None)
def _validator(kind: str) -> jsonschema.Draft202012Validator:
    text = resources.files("opp.schemas").joinpath(f"{kind}.schema.json").read_text("utf-8")
    return jsonschema.Draft202012Validator(json.loads(text))


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_document(source: Source, kind: str) -> dict[str, Any]:
    """Parse and schema-check one envelope, returning its payload."""
    text = _read(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, exc.lineno, exc.colno, exc.pos) from None
    if isinstance(doc, dict) and doc.get("kind") not in (None, kind):
        raise SchemaError(f"expected a {kind!r} document, got {doc.get('kind')!r}", "$.kind")
    errors = list(_validator(kind).iter_errors(doc))
    if errors:
        # the deepest error is the most specific one
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise SchemaError(err.message, _json_path(err.absolute_path))
    return doc["payload"]


def _rational(text: str, path: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"{text!r} is not a rational", path) from None


def framework_from_payload(payload: dict[str, Any]) -> FrameworkModel:
    return FrameworkModel(
        objectives=tuple(Objective(o["id"], o["name"], o["definition"]) for o in payload["objectives"]),
        principles=tuple(Principle(p["id"], p["name"], p["definition"]) for p in payload["principles"]),
        practices=tuple(Practice(p["id"], p["name"]) for p in payload["practices"]),
        properties=tuple(
            PropertyDef(p["id"], p["description"], Category(p["category"])) for p in payload["properties"]
        ),
        linkages=tuple(
            Linkage(l["source"], l["target"], Layer(l["layer"]), l["weight"]) for l in payload["linkages"]
        ),
        indicators=tuple(
            Indicator(i["practice"], i["property"], MeasurementKind(i["kind"])) for i in payload["indicators"]
        ),
        version=payload["version"],
    )


def load_framework(source: Source, *, check: bool = True) -> FrameworkModel:
    """Parse a framework document; with ``check`` only accepted models are returned."""
    model = framework_from_payload(parse_document(source, "framework"))
    if check:
        report = validate_framework(model)
        if not report.accepted:
            raise ModelValidationError(report)
    return model


def load_method(source: Source, framework: FrameworkModel | None = None) -> MethodDefinition:
    payload = parse_document(source, "method")
    method = MethodDefinition(
        id=payload["id"],
        name=payload["name"],
        objectives=frozenset(payload["objectives"]),
        principles=frozenset(payload["principles"]),
        practices=frozenset(payload["practices"]),
        overrides={
            k: Override(v["count"], v.get("weighted")) for k, v in payload.get("overrides", {}).items()
        },
    )
    if framework is not None:
        report = validate_method(framework, method)
        for finding in report.errors:
            if finding.code == "unresolved-id":
                raise ResolutionError(finding.element)
        if report.errors:
            raise ModelValidationError(report)
    return method


def _measurement(item: dict[str, Any], path: str) -> Measurement:
    kind = MeasurementKind(item["kind"])
    raw = item["raw"]
    if kind is MeasurementKind.RATIO:
        raw = _rational(raw, path + ".raw")
        if not 0 <= raw <= 1:
            raise MeasurementError(f"{path}.raw: ratio {raw} outside [0, 1]")
    elif kind is MeasurementKind.COUNT_VS_TARGET:
        raw = (raw["observed"], raw["target"])
    elif kind is MeasurementKind.THRESHOLD:
        raw = Threshold(
            _rational(raw["observed"], path + ".raw.observed"),
            _rational(raw["threshold"], path + ".raw.threshold"),
            raw["direction"],
        )
    try:
        return Measurement(item["practice"], item["property"], kind, raw)
    except MeasurementError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def load_measurements(source: Source) -> MeasurementSet:
    payload = parse_document(source, "measurements")
    items = tuple(
        _measurement(m, f"$.payload.measurements[{i}]") for i, m in enumerate(payload["measurements"])
    )
    comparisons = tuple(
        Comparison(
            c["node"],
            tuple(c["children"]),
            tuple(
                tuple(_rational(x, f"$.payload.comparisons[{i}].matrix") for x in row) for row in c["matrix"]
            ),
        )
        for i, c in enumerate(payload.get("comparisons", []))
    )
    return MeasurementSet(items, comparisons)


# -- embedded dataset ------------------------------------------------------


def _data(name: str) -> str:
    return resources.files("opp.data").joinpath(name).read_text("utf-8")


@lru_cache(maxsize=None)
def embedded_framework() -> FrameworkModel:
    return load_framework(_data("framework.json"))


@lru_cache(maxsize=None)
def builtin_method(name: str) -> MethodDefinition:
    if name not in BUILTIN_METHODS:
        raise ResolutionError(name, "built-in method")
    return load_method(_data(f"methods/{name}.json"), embedded_framework())


@dataclass(frozen=True)
class Erratum:
    id: str
    method: str
    element: str
    kind: str
    coverage: str
    published: str
    computed: str
    table: str


@lru_cache(maxsize=None)
def embedded_errata() -> tuple[Erratum, ...]:
    return tuple(Erratum(**e) for e in json.loads(_data("errata.json")))


# -- serialization ---------------------------------------------------------


def _frac(x: Fraction | None) -> str | None:
    return None if x is None else f"{x.numerator}/{x.denominator}"


def percent(value: Fraction) -> str:
    """One-decimal percentage, rounded half up, for display only."""
    tenths = (value * 1000 + Fraction(1, 2)).__floor__()
    return f"{tenths // 10}.{tenths % 10}%"


def coverage_text(cov: Coverage) -> str:
    return f"{cov} ({percent(cov.value)})"


def _envelope(kind: str, payload: dict[str, Any]) -> dict[str, Any]:
    return {"kind": kind, "version": SCHEMA_VERSION, "payload": payload}


def _dump(doc: Any) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def _csv(header: list[str], rows: list[list[Any]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(["" if v is None else v for v in row] for row in rows)
    return buf.getvalue().encode("utf-8")


@singledispatch
def to_data(value: Any) -> Any:
    raise TypeError(f"cannot serialize {type(value).__name__}")


@to_data.register
def _(model: FrameworkModel) -> Any:
    return _envelope("framework", {
        "version": model.version,
        "objectives": [{"id": o.id, "name": o.name, "definition": o.definition} for o in model.objectives],
        "principles": [{"id": p.id, "name": p.name, "definition": p.definition} for p in model.principles],
        "practices": [{"id": p.id, "name": p.name} for p in model.practices],
        "properties": [
            {"id": p.id, "description": p.description, "category": p.category.value} for p in model.properties
        ],
        "linkages": [
            {"source": l.source, "target": l.target, "layer": l.layer.value, "weight": l.weight}
            for l in model.linkages
        ],
        "indicators": [
            {"practice": i.practice, "property": i.property, "kind": i.kind.value} for i in model.indicators
        ],
    })


@to_data.register
def _(method: MethodDefinition) -> Any:
    payload: dict[str, Any] = {
        "id": method.id,
        "name": method.name,
        "objectives": sorted(method.objectives),
        "principles": sorted(method.principles),
        "practices": sorted(method.practices),
    }
    if method.overrides:
        payload["overrides"] = {
            k: ({"count": v.count} if v.weighted is None else {"count": v.count, "weighted": v.weighted})
            for k, v in method.overrides.items()
        }
    return _envelope("method", payload)


def _raw_data(m: Measurement) -> Any:
    if m.kind is MeasurementKind.RATIO:
        return _frac(m.raw)
    if m.kind is MeasurementKind.COUNT_VS_TARGET:
        return {"observed": m.raw[0], "target": m.raw[1]}
    if m.kind is MeasurementKind.THRESHOLD:
        return {"observed": _frac(m.raw.observed), "threshold": _frac(m.raw.threshold), "direction": m.raw.direction}
    return m.raw


@to_data.register
def _(ms: MeasurementSet) -> Any:
    payload: dict[str, Any] = {
        "measurements": [
            {"practice": m.practice, "property": m.property, "kind": m.kind.value, "raw": _raw_data(m)}
            for m in ms.measurements
        ]
    }
    if ms.comparisons:
        payload["comparisons"] = [
            {"node": c.node, "children": list(c.children), "matrix": [[_frac(x) for x in row] for row in c.matrix]}
            for c in ms.comparisons
        ]
    return _envelope("measurements", payload)


def _finding_rows(report: ValidationReport) -> list[dict[str, str]]:
    return [
        {"severity": sev, "code": f.code, "element": f.element, "message": f.message}
        for sev, group in (("error", report.errors), ("warning", report.warnings))
        for f in group
    ]


@to_data.register
def _(report: ValidationReport) -> Any:
    return {"accepted": report.accepted, "findings": _finding_rows(report)}


def _discrepancy_data(d: Discrepancy) -> dict[str, Any]:
    return {
        "element": d.element,
        "asserted": d.asserted,
        "derived": d.derived,
        "asserted_weighted": d.asserted_weighted,
        "derived_weighted": d.derived_weighted,
    }


@to_data.register
def _(report: AdequacyReport) -> Any:
    return {
        "report": "adequacy",
        "method": report.method,
        "mode": report.mode.value,
        "objectives": [
            {"element": r.element, "coverage": str(r.coverage), "weighted": str(r.weighted), "label": r.label.value}
            for r in report.objectives
        ],
        "principles": [
            {"element": r.element, "coverage": str(r.coverage), "label": r.label.value} for r in report.principles
        ],
        "discrepancies": [_discrepancy_data(d) for d in report.discrepancies],
    }


@to_data.register
def _(ranked: RankedList) -> Any:
    return {
        "report": "ranking",
        "note": RANKING_CAVEAT,
        "entries": [
            {"rank": i + 1, "method": e.method, "score": _frac(e.score), "principle_score": _frac(e.principle_score)}
            for i, e in enumerate(ranked.entries)
        ],
    }


@to_data.register
def _(report: ScoreReport) -> Any:
    return {
        "report": report.mode.value,
        "policy": report.policy.value,
        "evidence": _frac(report.evidence),
        "missing": [f"{p}:{q}" for p, q in report.missing],
        "warnings": list(report.warnings),
        "nodes": [
            {"path": "/".join(n.path), "level": n.level, "id": n.id, "score": _frac(n.score), "weight": _frac(n.weight)}
            for n in report.nodes
        ],
    }


@to_data.register
def _(trace: LinkageTrace) -> Any:
    return {
        "report": "explain",
        "objective": trace.objective,
        "adopted": trace.adopted,
        "principles": [
            {
                "principle": e.principle,
                "weight": e.weight,
                "adopted": e.adopted,
                "practices": [{"practice": p, "weight": w, "adopted": a} for p, w, a in e.practices],
            }
            for e in trace.edges
        ],
    }


@to_data.register
def _(discrepancies: list) -> Any:
    return {"report": "consistency", "discrepancies": [_discrepancy_data(d) for d in discrepancies]}


# text tables

def _band_row(label: LikertLabel) -> str:
    cells = []
    for band in reversed(list(LikertLabel)):
        mark = "X" if band is label else " "
        cells.append(f"[{mark}] {band.display}")
    return "  ".join(cells)


def _name(framework: FrameworkModel | None, element: str) -> str:
    if framework is None:
        return element
    try:
        return framework.name_of(element)
    except ResolutionError:
        return element


def _adequacy_table(report: AdequacyReport, framework: FrameworkModel | None) -> str:
    lines = [f"Adequacy of {report.method} (mode: {report.mode.value})", ""]
    lines.append("Objectives (weighted linkage coverage)")
    if not report.objectives:
        lines.append("  (none stated)")
    for r in report.objectives:
        lines.append(f"  {_name(framework, r.element)}: coverage {coverage_text(r.coverage)}, "
                     f"weighted {coverage_text(r.weighted)}")
        lines.append(f"    {_band_row(r.label)}")
    lines.append("")
    lines.append("Principles (linkage coverage)")
    if not report.principles:
        lines.append("  (none stated)")
    for r in report.principles:
        lines.append(f"  {_name(framework, r.element)}: coverage {coverage_text(r.coverage)}")
        lines.append(f"    {_band_row(r.label)}")
    if report.discrepancies:
        lines.append("")
        lines.append("Consistency discrepancies (asserted vs derived)")
        lines.extend(f"  {_discrepancy_text(d)}" for d in report.discrepancies)
    return "\n".join(lines) + "\n"


def _discrepancy_text(d: Discrepancy) -> str:
    text = f"{d.element}: asserted {d.asserted}, derived {d.derived}"
    if d.asserted_weighted is not None:
        text += f"; weighted asserted {d.asserted_weighted}, derived {d.derived_weighted}"
    return text


def _score_table(report: ScoreReport, framework: FrameworkModel | None) -> str:
    lines = [
        f"{report.mode.value.capitalize()} assessment (policy: {report.policy.value})",
        f"Evidence coverage: {_frac(report.evidence)} ({percent(report.evidence)})",
        "",
    ]
    for n in report.nodes:
        depth = len(n.path)
        score = "unscored" if n.score is None else f"{_frac(n.score)} ({percent(n.score)})"
        weight = "" if n.weight is None else f"  [w={_frac(n.weight)}]"
        label = n.id if n.level in ("root", "indicator") else _name(framework, n.id)
        lines.append(f"{'  ' * depth}{n.level} {label}: {score}{weight}")
    if report.missing:
        lines.append("")
        lines.append("Unmeasured indicators (dropped):")
        lines.extend(f"  {p}:{q}" for p, q in report.missing)
    if report.warnings:
        lines.append("")
        lines.append("Warnings:")
        lines.extend(f"  {w}" for w in report.warnings)
    return "\n".join(lines) + "\n"


def _trace_table(trace: LinkageTrace, framework: FrameworkModel | None) -> str:
    def mark(adopted: bool | None) -> str:
        return "" if adopted is None else ("[adopted] " if adopted else "[missing] ")

    lines = [f"{mark(trace.adopted)}{_name(framework, trace.objective)} ({trace.objective})"]
    for e in trace.edges:
        lines.append(f"  -> {mark(e.adopted)}{_name(framework, e.principle)} ({e.principle}) weight {e.weight}")
        for practice, weight, adopted in e.practices:
            lines.append(f"       -> {mark(adopted)}{_name(framework, practice)} ({practice}) weight {weight}")
    return "\n".join(lines) + "\n"


def _framework_table(model: FrameworkModel) -> str:
    lines = [f"Framework {model.version}: {len(model.objectives)} objectives, {len(model.principles)} principles, "
             f"{len(model.practices)} practices, {len(model.linkages)} linkages, {len(model.indicators)} indicators"]
    for link in model.linkages:
        lines.append(f"  {link.layer.value}  {link.source} -> {link.target}  weight {link.weight}")
    return "\n".join(lines) + "\n"


def serialize(value: Any, fmt: str = "data", framework: FrameworkModel | None = None) -> bytes:
    """Render ``value`` as canonical JSON (``data``), a text table, or CSV.

    ``framework`` is only used to show display names in text tables.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if fmt == "data":
        return _dump(to_data(value))
    if fmt == "table":
        return _table(value, framework).encode("utf-8")
    return _csv_of(value)


def _table(value: Any, framework: FrameworkModel | None) -> str:
    if isinstance(value, AdequacyReport):
        return _adequacy_table(value, framework)
    if isinstance(value, ScoreReport):
        return _score_table(value, framework)
    if isinstance(value, LinkageTrace):
        return _trace_table(value, framework)
    if isinstance(value, FrameworkModel):
        return _framework_table(value)
    if isinstance(value, RankedList):
        lines = ["Ranking by adequacy", f"({RANKING_CAVEAT})", ""]
        for i, e in enumerate(value.entries, 1):
            lines.append(f"  {i}. {e.method}  score {_frac(e.score)} ({percent(e.score)})  "
                         f"principles {_frac(e.principle_score)} ({percent(e.principle_score)})")
        return "\n".join(lines) + "\n"
    if isinstance(value, ValidationReport):
        status = "accepted" if value.accepted else "rejected"
        lines = [f"Validation: {status} ({len(value.errors)} errors, {len(value.warnings)} warnings)"]
        lines.extend(f"  {r['severity']}  {r['code']}  {r['element']}  {r['message']}" for r in _finding_rows(value))
        return "\n".join(lines) + "\n"
    if isinstance(value, list):
        if not value:
            return "No consistency discrepancies.\n"
        return "Consistency discrepancies (asserted vs derived)\n" + "".join(
            f"  {_discrepancy_text(d)}\n" for d in value
        )
    if isinstance(value, MethodDefinition):
        return (f"Method {value.id} ({value.name}): {len(value.objectives)} objectives, "
                f"{len(value.principles)} principles, {len(value.practices)} practices\n")
    raise TypeError(f"cannot render {type(value).__name__} as a table")


def _csv_of(value: Any) -> bytes:
    if isinstance(value, AdequacyReport):
        header = ["element-id", "numerator", "denominator", "weighted-numerator", "weighted-denominator", "label"]
        rows = [
            [r.element, r.coverage.numerator, r.coverage.denominator, r.weighted.numerator,
             r.weighted.denominator, r.label.value]
            for r in value.objectives
        ]
        rows += [
            [r.element, r.coverage.numerator, r.coverage.denominator, None, None, r.label.value]
            for r in value.principles
        ]
        return _csv(header, rows)
    if isinstance(value, ScoreReport):
        return _csv(["path", "level", "id", "score", "weight"],
                    [["/".join(n.path), n.level, n.id, _frac(n.score), _frac(n.weight)] for n in value.nodes])
    if isinstance(value, RankedList):
        return _csv(["rank", "method", "score", "principle-score"],
                    [[i, e.method, _frac(e.score), _frac(e.principle_score)] for i, e in enumerate(value.entries, 1)])
    if isinstance(value, ValidationReport):
        return _csv(["severity", "code", "element", "message"], [list(r.values()) for r in _finding_rows(value)])
    if isinstance(value, list):
        return _csv(["element-id", "asserted", "derived", "asserted-weighted", "derived-weighted"],
                    [[d.element, d.asserted, d.derived, d.asserted_weighted, d.derived_weighted] for d in value])
    if isinstance(value, LinkageTrace):
        return _csv(["principle", "principle-weight", "principle-adopted", "practice", "practice-weight", "practice-adopted"],
                    [[e.principle, e.weight, e.adopted, p, w, a] for e in value.edges for p, w, a in e.practices])
    if isinstance(value, FrameworkModel):
        return _csv(["layer", "source", "target", "weight"],
                    [[l.layer.value, l.source, l.target, l.weight] for l in value.linkages])
    raise TypeError(f"cannot render {type(value).__name__} as CSV")
