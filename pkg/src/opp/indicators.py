"""Bottom-up capability and effectiveness scoring.

Leaves of an indicator hierarchy are (practice, property) pairs.  Raw
observations are normalized onto [0, 1] and folded upward through practices,
principles and objectives as weighted means.  All arithmetic is exact; the
only place floats appear is the geometric-mean fallback for inconsistent AHP
matrices, whose result is converted to an exact binary fraction before use.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from opp.model import (
    Category,
    FrameworkModel,
    MeasurementKind,
    MethodDefinition,
    OPPError,
    ResolutionError,
    validate_method,
)

log = logging.getLogger(__name__)


class AssessmentMode(str, Enum):
    CAPABILITY = "capability"
    EFFECTIVENESS = "effectiveness"


class Policy(str, Enum):
    STRICT = "strict"
    RENORMALIZE = "renormalize"


MODE_CATEGORIES: dict[AssessmentMode, frozenset[Category]] = {
    AssessmentMode.CAPABILITY: frozenset({Category.PEOPLE, Category.PROCESS, Category.PROJECT}),
    AssessmentMode.EFFECTIVENESS: frozenset({Category.PROCESS_ARTIFACT, Category.PRODUCT}),
}

# Saaty's random consistency index for n = 1..10
RANDOM_INDEX: dict[int, Fraction] = {
    n: Fraction(v) for n, v in zip(
        range(1, 11), ("0", "0", "0.58", "0.90", "1.12", "1.24", "1.32", "1.41", "1.45", "1.49")
    )
}
CR_LIMIT = Fraction(1, 10)


class MeasurementError(OPPError, ValueError):
    pass


class LikertRangeError(MeasurementError):
    pass


class MissingEvidenceError(OPPError):
    def __init__(self, missing: Sequence[tuple[str, str]]) -> None:
        listed = ", ".join(f"{p}:{q}" for p, q in missing)
        super().__init__(f"no measurement for {len(missing)} indicator(s): {listed}")
        self.missing = tuple(missing)


class UnknownIndicatorError(OPPError):
    def __init__(self, extraneous: Sequence[tuple[str, str]]) -> None:
        listed = ", ".join(f"{p}:{q}" for p, q in extraneous)
        super().__init__(f"measurements for indicators outside the hierarchy: {listed}")
        self.extraneous = tuple(extraneous)


class MatrixError(OPPError, ValueError):
    pass


class UnsupportedSizeError(MatrixError):
    pass


class HierarchyError(OPPError, ValueError):
    pass


# -- hierarchy -------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    """One node of a scoring tree.

    A leaf carries ``indicator`` and ``kind`` and has no children.  Inner nodes
    carry one weight per child; omitted weights default to equal shares.
    """

    level: str
    id: str
    children: tuple[Node, ...] = ()
    weights: tuple[Fraction, ...] = ()
    indicator: tuple[str, str] | None = None
    kind: MeasurementKind | None = None

    def __post_init__(self) -> None:
        if self.indicator is not None:
            if self.children:
                raise HierarchyError(f"leaf {self.id!r} cannot have children")
            return
        if self.children and not self.weights:
            n = len(self.children)
            object.__setattr__(self, "weights", tuple(Fraction(1, n) for _ in range(n)))
        else:
            object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        _check_weights(self.weights, len(self.children), self.id)

    @property
    def is_leaf(self) -> bool:
        return self.indicator is not None

    def leaves(self) -> Iterable[Node]:
        if self.is_leaf:
            yield self
        for child in self.children:
            yield from child.leaves()


def _check_weights(weights: Sequence[Fraction], n: int, where: str) -> None:
    if len(weights) != n:
        raise HierarchyError(f"node {where!r}: {len(weights)} weights for {n} children")
    if n and (any(w < 0 for w in weights) or sum(weights) != 1):
        raise HierarchyError(f"node {where!r}: weights must be non-negative and sum to 1")


@dataclass(frozen=True)
class IndicatorHierarchy:
    mode: AssessmentMode
    root: Node
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        def walk(node: Node, is_root: bool) -> None:
            if not node.is_leaf and not node.children and not is_root:
                raise HierarchyError(f"inner node {node.id!r} has no children")
            for child in node.children:
                walk(child, False)

        walk(self.root, True)

    def leaf_indicators(self) -> list[tuple[str, str]]:
        """Distinct leaf indicators in first-seen order."""
        seen: dict[tuple[str, str], None] = {}
        for leaf in self.root.leaves():
            seen.setdefault(leaf.indicator, None)
        return list(seen)

    def node(self, path: Sequence[str]) -> Node:
        node = self.root
        for part in path:
            for child in node.children:
                if child.id == part:
                    node = child
                    break
            else:
                raise HierarchyError(f"no node at path {'/'.join(path)!r}")
        return node

    def reweighted(self, path: Sequence[str], weights: Sequence[Fraction]) -> IndicatorHierarchy:
        """Copy with the weights of the node at ``path`` replaced."""

        def rebuild(node: Node, rest: Sequence[str]) -> Node:
            if not rest:
                return replace(node, weights=tuple(Fraction(w) for w in weights))
            children = list(node.children)
            for i, child in enumerate(children):
                if child.id == rest[0]:
                    children[i] = rebuild(child, rest[1:])
                    return replace(node, children=tuple(children))
            raise HierarchyError(f"no node at path {'/'.join(path)!r}")

        return replace(self, root=rebuild(self.root, list(path)))


def build_hierarchy(
    framework: FrameworkModel, method: MethodDefinition, mode: AssessmentMode
) -> IndicatorHierarchy:
    """Scoring tree over the method's adopted objectives, principles and practices.

    Only indicators whose property category belongs to ``mode`` become leaves.
    Practices without such indicators are left out with a warning, and so are
    principles and objectives that end up with nothing beneath them.
    """
    mode = AssessmentMode(mode)
    for finding in validate_method(framework, method).errors:
        if finding.code == "unresolved-id":
            raise ResolutionError(finding.element)
    if not framework.indicators:
        raise HierarchyError("framework has an empty indicator catalog")
    categories = MODE_CATEGORIES[mode]
    category_of = {p.id: p.category for p in framework.properties}
    adopted = method.adopted
    warnings: list[str] = []
    warned: set[str] = set()

    def warn(element: str, message: str) -> None:
        if element not in warned:
            warned.add(element)
            warnings.append(message)

    objective_nodes = []
    for obj in framework.objectives:
        if obj.id not in method.objectives:
            continue
        principle_nodes = []
        for olink in framework.outgoing(obj.id):
            if olink.target not in adopted:
                continue
            practice_nodes = []
            for plink in framework.outgoing(olink.target):
                if plink.target not in adopted:
                    continue
                leaves = tuple(
                    Node("indicator", f"{ind.practice}:{ind.property}", indicator=ind.key, kind=ind.kind)
                    for ind in framework.indicators_for(plink.target)
                    if category_of.get(ind.property) in categories
                )
                if not leaves:
                    warn(plink.target, f"practice {plink.target!r} has no {mode.value} indicators; left unscored")
                    continue
                practice_nodes.append(Node("practice", plink.target, leaves))
            if not practice_nodes:
                warn(olink.target, f"principle {olink.target!r} has no scorable practices; left unscored")
                continue
            principle_nodes.append(Node("principle", olink.target, tuple(practice_nodes)))
        if not principle_nodes:
            warn(obj.id, f"objective {obj.id!r} has no scorable principles; left unscored")
            continue
        objective_nodes.append(Node("objective", obj.id, tuple(principle_nodes)))
    return IndicatorHierarchy(mode, Node("root", method.id, tuple(objective_nodes)), tuple(warnings))


# -- measurements ----------------------------------------------------------


@dataclass(frozen=True)
class Threshold:
    observed: Fraction
    threshold: Fraction
    direction: str  # "<=" or ">="


@dataclass(frozen=True)
class Measurement:
    practice: str
    property: str
    kind: MeasurementKind
    raw: object

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", MeasurementKind(self.kind))
        _check_raw(self.kind, self.raw, self.key)

    @property
    def key(self) -> tuple[str, str]:
        return (self.practice, self.property)


def _check_raw(kind: MeasurementKind, raw: object, key: tuple[str, str]) -> None:
    where = f"{key[0]}:{key[1]}"
    if kind is MeasurementKind.BOOLEAN:
        if not isinstance(raw, bool):
            raise MeasurementError(f"{where}: boolean measurement needs true/false, got {raw!r}")
    elif kind is MeasurementKind.LIKERT5:
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise MeasurementError(f"{where}: likert5 measurement needs an integer, got {raw!r}")
        if not 1 <= raw <= 5:
            raise LikertRangeError(f"{where}: likert5 value {raw} outside 1..5")
    elif kind is MeasurementKind.RATIO:
        if not isinstance(raw, Fraction):
            raise MeasurementError(f"{where}: ratio measurement needs a rational, got {raw!r}")
    elif kind is MeasurementKind.COUNT_VS_TARGET:
        if not (isinstance(raw, tuple) and len(raw) == 2 and all(
                isinstance(x, int) and not isinstance(x, bool) for x in raw)):
            raise MeasurementError(f"{where}: count-vs-target needs (observed, target), got {raw!r}")
        if raw[0] < 0 or raw[1] < 0:
            raise MeasurementError(f"{where}: counts must be non-negative")
    elif kind is MeasurementKind.THRESHOLD:
        if not isinstance(raw, Threshold) or raw.direction not in ("<=", ">="):
            raise MeasurementError(f"{where}: threshold measurement needs (observed, threshold, direction)")


@dataclass(frozen=True)
class Comparison:
    """Pairwise comparison matrix for the children of one node.

    ``node`` is a '/'-joined path of ids below the root ('' for the root);
    ``children`` gives the row/column order of ``matrix``.
    """

    node: str
    children: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class MeasurementSet:
    measurements: tuple[Measurement, ...] = ()
    comparisons: tuple[Comparison, ...] = ()


def normalize(measurement: Measurement) -> Fraction:
    """Map a raw observation onto the exact unit interval."""
    kind, raw = measurement.kind, measurement.raw
    _check_raw(kind, raw, measurement.key)
    if kind is MeasurementKind.BOOLEAN:
        return Fraction(1) if raw else Fraction(0)
    if kind is MeasurementKind.LIKERT5:
        return Fraction(raw - 1, 4)
    if kind is MeasurementKind.RATIO:
        return min(max(raw, Fraction(0)), Fraction(1))
    if kind is MeasurementKind.COUNT_VS_TARGET:
        observed, target = raw
        if target == 0:
            raise MeasurementError(f"{measurement.practice}:{measurement.property}: target must be positive")
        return min(Fraction(observed, target), Fraction(1))
    met = raw.observed <= raw.threshold if raw.direction == "<=" else raw.observed >= raw.threshold
    return Fraction(1) if met else Fraction(0)


# -- weighting -------------------------------------------------------------


def _as_matrix(matrix: Sequence[Sequence[object]]) -> list[list[Fraction]]:
    rows = [[Fraction(x) for x in row] for row in matrix]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise MatrixError("pairwise matrix must be square and non-empty")
    for i in range(n):
        if rows[i][i] != 1:
            raise MatrixError(f"diagonal entry ({i}, {i}) must be 1")
        for j in range(n):
            if rows[i][j] <= 0:
                raise MatrixError(f"entry ({i}, {j}) must be positive")
            if rows[j][i] != 1 / rows[i][j]:
                raise MatrixError(f"entries ({i}, {j}) and ({j}, {i}) are not reciprocal")
    return rows


def _iroot(k: int, n: int) -> int | None:
    """Exact integer n-th root of k >= 0, or None."""
    if k < 2:
        return k
    x = 1 << -(-k.bit_length() // n)
    while True:
        y = ((n - 1) * x + k // x ** (n - 1)) // n
        if y >= x:
            break
        x = y
    return x if x ** n == k else None


def _rational_root(q: Fraction, n: int) -> Fraction | None:
    num, den = _iroot(q.numerator, n), _iroot(q.denominator, n)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def ahp_weights(matrix: Sequence[Sequence[object]]) -> tuple[Fraction, ...]:
    """Normalized row geometric means of a reciprocal comparison matrix.

    Geometric means are taken relative to the first row so that consistent
    matrices, and any matrix whose row-product ratios are perfect n-th powers,
    yield exact weights.  Otherwise the means are computed in floating point
    and normalized exactly.
    """
    rows = _as_matrix(matrix)
    n = len(rows)
    products = [math.prod(row, start=Fraction(1)) for row in rows]
    relative = [_rational_root(p / products[0], n) for p in products]
    if all(r is not None for r in relative):
        means = relative
    else:
        means = [Fraction(math.exp(sum(math.log(x) for x in row) / n)) for row in rows]
    total = sum(means)
    return tuple(m / total for m in means)


@dataclass(frozen=True)
class ConsistencyResult:
    ratio: Fraction
    lambda_max: Fraction
    acceptable: bool


def consistency_ratio(matrix: Sequence[Sequence[object]]) -> ConsistencyResult:
    """Saaty consistency ratio using the column-sum estimate of the principal eigenvalue."""
    rows = _as_matrix(matrix)
    n = len(rows)
    if n > 10:
        raise UnsupportedSizeError(f"no random index for n = {n} (max 10)")
    weights = ahp_weights(rows)
    lam = sum(sum(rows[i][j] for i in range(n)) * weights[j] for j in range(n))
    if n <= 2:
        return ConsistencyResult(Fraction(0), lam, True)
    ratio = (lam - n) / ((n - 1) * RANDOM_INDEX[n])
    acceptable = ratio <= CR_LIMIT
    if not acceptable:
        log.warning("pairwise matrix is inconsistent: CR = %s > 1/10", float(ratio))
    return ConsistencyResult(ratio, lam, acceptable)


def aggregate(children: Sequence[Fraction], weights: Sequence[Fraction]) -> Fraction:
    if len(children) != len(weights):
        raise ValueError(f"{len(children)} scores but {len(weights)} weights")
    if any(w < 0 for w in weights) or sum(weights, Fraction(0)) != 1:
        raise ValueError("weights must be non-negative and sum to 1")
    return sum((Fraction(s) * Fraction(w) for s, w in zip(children, weights)), Fraction(0))


def apply_comparisons(
    hierarchy: IndicatorHierarchy, comparisons: Iterable[Comparison]
) -> tuple[IndicatorHierarchy, list[ConsistencyResult]]:
    """Replace equal sibling weights with AHP weights wherever a matrix is given."""
    results = []
    for comp in comparisons:
        path = [p for p in comp.node.split("/") if p]
        node = hierarchy.node(path)
        ids = [c.id for c in node.children]
        if sorted(ids) != sorted(comp.children) or len(set(comp.children)) != len(comp.children):
            raise HierarchyError(
                f"comparison for {comp.node!r} names {list(comp.children)} but the node's children are {ids}"
            )
        weights = dict(zip(comp.children, ahp_weights(comp.matrix)))
        results.append(consistency_ratio(comp.matrix))
        hierarchy = hierarchy.reweighted(path, [weights[i] for i in ids])
    return hierarchy, results


# -- assessment ------------------------------------------------------------


@dataclass(frozen=True)
class NodeScore:
    path: tuple[str, ...]
    level: str
    id: str
    score: Fraction | None
    weight: Fraction | None  # effective share within the parent, after renormalization


@dataclass(frozen=True)
class ScoreReport:
    mode: AssessmentMode
    policy: Policy
    nodes: tuple[NodeScore, ...]
    evidence: Fraction
    missing: tuple[tuple[str, str], ...]
    warnings: tuple[str, ...] = field(default=())

    @property
    def root(self) -> NodeScore:
        return self.nodes[0]

    def score_of(self, *path: str) -> Fraction | None:
        for ns in self.nodes:
            if ns.path == tuple(path):
                return ns.score
        raise KeyError("/".join(path))


def assess(
    hierarchy: IndicatorHierarchy,
    measurements: MeasurementSet | Iterable[Measurement],
    policy: Policy = Policy.RENORMALIZE,
) -> ScoreReport:
    """Score every node of ``hierarchy`` from the given observations.

    Under ``renormalize`` an unmeasured leaf is dropped and its siblings'
    weights rescaled.  An inner node with no scored child is unscored, and so
    is every ancestor of it.  Under ``strict`` any unmeasured leaf is an error.
    """
    policy = Policy(policy)
    items = measurements.measurements if isinstance(measurements, MeasurementSet) else tuple(measurements)
    kinds = {leaf.indicator: leaf.kind for leaf in hierarchy.root.leaves()}

    scores: dict[tuple[str, str], Fraction] = {}
    extraneous = []
    for m in items:
        if m.key not in kinds:
            extraneous.append(m.key)
            continue
        if m.key in scores:
            raise MeasurementError(f"duplicate measurement for {m.practice}:{m.property}")
        if kinds[m.key] is not None and m.kind is not kinds[m.key]:
            raise MeasurementError(
                f"{m.practice}:{m.property} is a {kinds[m.key].value} indicator, got a {m.kind.value} measurement"
            )
        scores[m.key] = normalize(m)
    if extraneous:
        raise UnknownIndicatorError(extraneous)

    missing = tuple(k for k in hierarchy.leaf_indicators() if k not in scores)
    if missing and policy is Policy.STRICT:
        raise MissingEvidenceError(missing)

    out: list[NodeScore] = []

    def visit(node: Node, path: tuple[str, ...], weight: Fraction | None) -> tuple[Fraction | None, bool]:
        index = len(out)
        out.append(NodeScore(path, node.level, node.id, None, weight))
        if node.is_leaf:
            score = scores.get(node.indicator)
            out[index] = replace(out[index], score=score)
            return score, False
        results = []
        # effective weights are only known after the children are scored; fill them in afterwards
        starts = []
        for child in node.children:
            starts.append(len(out))
            results.append(visit(child, path + (child.id,), None))
        poisoned = any(p for _, p in results)
        live = [(w, s) for w, (s, _) in zip(node.weights, results) if s is not None]
        live_weight = sum((w for w, _ in live), Fraction(0))
        score = None
        if not poisoned and live and live_weight > 0:
            score = sum((w / live_weight * s for w, s in live), Fraction(0))
        for start, w, (s, _) in zip(starts, node.weights, results):
            eff = w / live_weight if s is not None and live_weight > 0 else None
            out[start] = replace(out[start], weight=eff)
        out[index] = replace(out[index], score=score)
        return score, poisoned or (score is None and bool(node.children))

    visit(hierarchy.root, (), None)
    leaves = hierarchy.leaf_indicators()
    evidence = Fraction(len(leaves) - len(missing), len(leaves)) if leaves else Fraction(0)
    return ScoreReport(hierarchy.mode, policy, tuple(out), evidence, missing, hierarchy.warnings)
