"""Top-down adequacy assessment: linkage coverage, Likert banding, ranking."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from opp.model import (
    Discrepancy,
    FrameworkModel,
    MethodDefinition,
    OPPError,
    ResolutionError,
    check_consistency,
    derived_counts,
    expected_counts,
    validate_method,
)


class UndefinedCoverageError(OPPError):
    """An element has no expected linkages, so its coverage has no denominator."""

    def __init__(self, element: str) -> None:
        super().__init__(f"{element!r} has no expected linkages; coverage is undefined")
        self.element = element


class UndefinedRankError(OPPError):
    def __init__(self, method: str) -> None:
        super().__init__(f"method {method!r} states no objectives and cannot be ranked")
        self.method = method


class CoverageRangeError(OPPError, ValueError):
    pass


class Mode(str, Enum):
    DERIVED = "derived"
    OVERRIDE = "override"


class LikertLabel(str, Enum):
    """Adequacy bands, weakest first so that enum order is band order."""

    VERY_LITTLE = "VeryLittle"
    SOMEWHAT = "Somewhat"
    SUFFICIENTLY = "Sufficiently"
    VERY_WELL = "VeryWell"
    STRONGLY = "Strongly"

    @property
    def rank(self) -> int:
        return _BAND_ORDER.index(self)

    @property
    def display(self) -> str:
        return _DISPLAY[self]


_BAND_ORDER = list(LikertLabel)
_DISPLAY = {
    LikertLabel.STRONGLY: "Strongly",
    LikertLabel.VERY_WELL: "Very well",
    LikertLabel.SUFFICIENTLY: "Sufficiently",
    LikertLabel.SOMEWHAT: "Somewhat",
    LikertLabel.VERY_LITTLE: "Very little",
}

# inclusive upper bound of each band below Strongly
BAND_UPPER_BOUNDS: tuple[tuple[Fraction, LikertLabel], ...] = (
    (Fraction(1, 5), LikertLabel.VERY_LITTLE),
    (Fraction(2, 5), LikertLabel.SOMEWHAT),
    (Fraction(3, 5), LikertLabel.SUFFICIENTLY),
    (Fraction(4, 5), LikertLabel.VERY_WELL),
)


@dataclass(frozen=True)
class Coverage:
    numerator: int
    denominator: int

    def __post_init__(self) -> None:
        if self.denominator <= 0:
            raise ValueError(f"coverage denominator must be positive, got {self.denominator}")
        if not 0 <= self.numerator <= self.denominator:
            raise CoverageRangeError(f"coverage {self.numerator}/{self.denominator} outside [0, 1]")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def map_likert(coverage: Coverage | Fraction) -> LikertLabel:
    value = coverage.value if isinstance(coverage, Coverage) else Fraction(coverage)
    if not 0 <= value <= 1:
        raise CoverageRangeError(f"coverage {value} outside [0, 1]")
    for bound, label in BAND_UPPER_BOUNDS:
        if value <= bound:
            return label
    return LikertLabel.STRONGLY


def _numerators(
    framework: FrameworkModel, method: MethodDefinition, element: str, mode: Mode
) -> tuple[int, int]:
    count, weighted = derived_counts(framework, method, element)
    if mode is Mode.OVERRIDE and element in method.overrides:
        override = method.overrides[element]
        count = override.count
        if override.weighted is not None:
            weighted = override.weighted
    return count, weighted


def objective_coverage(
    framework: FrameworkModel,
    method: MethodDefinition,
    objective: str,
    mode: Mode = Mode.DERIVED,
) -> tuple[Coverage, Coverage]:
    """Plain and weighted linkage coverage of one objective."""
    framework.objective(objective)
    expected, expected_weighted = expected_counts(framework, objective)
    if expected == 0:
        raise UndefinedCoverageError(objective)
    count, weighted = _numerators(framework, method, objective, Mode(mode))
    return Coverage(count, expected), Coverage(weighted, expected_weighted)


def principle_coverage(
    framework: FrameworkModel,
    method: MethodDefinition,
    principle: str,
    mode: Mode = Mode.DERIVED,
) -> Coverage:
    framework.principle(principle)
    expected, _ = expected_counts(framework, principle)
    if expected == 0:
        raise UndefinedCoverageError(principle)
    count, _ = _numerators(framework, method, principle, Mode(mode))
    return Coverage(count, expected)


@dataclass(frozen=True)
class ObjectiveRow:
    element: str
    coverage: Coverage
    weighted: Coverage
    label: LikertLabel


@dataclass(frozen=True)
class PrincipleRow:
    element: str
    coverage: Coverage
    label: LikertLabel


@dataclass(frozen=True)
class AdequacyReport:
    method: str
    mode: Mode
    objectives: tuple[ObjectiveRow, ...]
    principles: tuple[PrincipleRow, ...]
    discrepancies: tuple[Discrepancy, ...]

    def objective(self, element: str) -> ObjectiveRow:
        return next(row for row in self.objectives if row.element == element)

    def principle(self, element: str) -> PrincipleRow:
        return next(row for row in self.principles if row.element == element)


def assess_adequacy(
    framework: FrameworkModel, method: MethodDefinition, mode: Mode = Mode.DERIVED
) -> AdequacyReport:
    """Coverage and band for every objective and principle the method states.

    Objectives are banded on weighted coverage, principles on plain coverage.
    Rows follow framework order.
    """
    mode = Mode(mode)
    report = validate_method(framework, method)
    if not report.accepted:
        first = report.errors[0]
        if first.code == "unresolved-id":
            raise ResolutionError(first.element)
        raise OPPError(f"method {method.id!r} does not validate: {first.message}")
    objectives = []
    for obj in framework.objectives:
        if obj.id in method.objectives:
            plain, weighted = objective_coverage(framework, method, obj.id, mode)
            objectives.append(ObjectiveRow(obj.id, plain, weighted, map_likert(weighted)))
    principles = []
    for pr in framework.principles:
        if pr.id in method.principles:
            cov = principle_coverage(framework, method, pr.id, mode)
            principles.append(PrincipleRow(pr.id, cov, map_likert(cov)))
    return AdequacyReport(
        method.id, mode, tuple(objectives), tuple(principles),
        tuple(check_consistency(framework, method)),
    )


@dataclass(frozen=True)
class RankEntry:
    method: str
    score: Fraction
    principle_score: Fraction


@dataclass(frozen=True)
class RankedList:
    entries: tuple[RankEntry, ...]

    @property
    def order(self) -> list[str]:
        return [e.method for e in self.entries]


RANKING_CAVEAT = (
    "score = mean weighted objective coverage over each method's own stated "
    "objectives; methods stating different objectives are compared as-is"
)


def _mean(values: Sequence[Fraction]) -> Fraction:
    return sum(values, Fraction(0)) / len(values) if values else Fraction(0)


def rank_methods(
    framework: FrameworkModel,
    methods: Sequence[MethodDefinition],
    mode: Mode | Mapping[str, Mode] = Mode.DERIVED,
) -> RankedList:
    """Order methods by mean weighted objective coverage, best first.

    ``mode`` is either one mode for every method or a per-method-id mapping.
    Ties fall back to mean principle coverage, then method id.
    """
    if not methods:
        raise ValueError("rank_methods needs at least one method")
    entries = []
    for method in methods:
        if not method.objectives:
            raise UndefinedRankError(method.id)
        m = Mode(mode[method.id]) if isinstance(mode, Mapping) else Mode(mode)
        report = assess_adequacy(framework, method, m)
        score = _mean([row.weighted.value for row in report.objectives])
        principle_score = _mean([row.coverage.value for row in report.principles])
        entries.append(RankEntry(method.id, score, principle_score))
    entries.sort(key=lambda e: (-e.score, -e.principle_score, e.method))
    return RankedList(tuple(entries))
