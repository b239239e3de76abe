from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opp.formats import embedded_framework
from opp.model import (
    Category,
    FrameworkModel,
    Indicator,
    Layer,
    Linkage,
    MeasurementKind,
    MethodDefinition,
    Objective,
    Override,
    Practice,
    Principle,
    PropertyDef,
    ResolutionError,
    check_consistency,
    derive_linkages,
    explain_objective,
    validate_framework,
    validate_method,
)

OP, PP = Layer.OBJECTIVE_PRINCIPLE, Layer.PRINCIPLE_PRACTICE


def tiny(**changes):
    base = FrameworkModel(
        objectives=(Objective("o", "O"),),
        principles=(Principle("p", "P"),),
        practices=(Practice("x", "X"),),
        properties=(PropertyDef("prop", "a property", Category.PEOPLE),),
        linkages=(Linkage("o", "p", OP, 2), Linkage("p", "x", PP, 1)),
        indicators=(Indicator("x", "prop", MeasurementKind.BOOLEAN),),
    )
    return replace(base, **changes)


def test_embedded_framework_is_clean(framework):
    report = validate_framework(framework)
    assert report.errors == () and report.warnings == ()


def test_single_objective_framework_is_vacuously_valid():
    report = validate_framework(FrameworkModel(objectives=(Objective("o", "O"),)))
    assert report.errors == () and report.warnings == ()


def test_weight_three_is_one_error():
    report = validate_framework(tiny(linkages=(Linkage("o", "p", OP, 3), Linkage("p", "x", PP))))
    assert report.error_codes() == ["illegal-weight"]


def test_weight_two_rejected_on_practice_layer():
    report = validate_framework(tiny(linkages=(Linkage("o", "p", OP), Linkage("p", "x", PP, 2))))
    assert report.error_codes() == ["illegal-weight"]


@pytest.mark.parametrize(
    "linkages, code",
    [
        ((Linkage("o", "p", OP), Linkage("p", "x", PP), Linkage("p", "x", PP)), "duplicate-linkage"),
        ((Linkage("o", "p", OP), Linkage("p", "x", PP), Linkage("o", "nowhere", OP)), "dangling-reference"),
        ((Linkage("o", "p", OP), Linkage("p", "x", PP), Linkage("o", "x", OP)), "cross-layer-edge"),
    ],
)
def test_structural_errors_have_distinct_codes(linkages, code):
    assert validate_framework(tiny(linkages=linkages)).error_codes() == [code]


def test_duplicate_ids_and_empty_names():
    report = validate_framework(tiny(objectives=(Objective("o", "O"), Objective("o", " "))))
    assert sorted(report.error_codes()) == ["duplicate-id", "empty-name"]


def test_orphans_are_warnings():
    report = validate_framework(tiny(linkages=()))
    assert report.accepted
    assert sorted(report.warning_codes()) == ["orphan-practice", "orphan-principle"]


def test_dangling_indicator():
    report = validate_framework(tiny(indicators=(Indicator("ghost", "prop", MeasurementKind.BOOLEAN),)))
    assert report.error_codes() == ["dangling-reference"]


def test_validation_idempotent(framework):
    assert validate_framework(framework) == validate_framework(framework)


def test_derive_nothing_adopted(framework):
    assert derive_linkages(framework, MethodDefinition("none", "none")) == frozenset()


def test_derive_full_adoption_is_whole_framework(framework):
    everything = MethodDefinition(
        "all", "all", framework.objective_ids, framework.principle_ids, framework.practice_ids
    )
    assert derive_linkages(framework, everything) == frozenset(framework.linkages)


def test_method_a_keeps_four_adaptability_linkages(framework, method_a):
    derived = derive_linkages(framework, method_a)
    assert sum(1 for l in derived if l.source == "maximal-adaptability") == 4


def test_xp_has_all_objective_principle_linkages(framework, xp):
    derived = derive_linkages(framework, xp)
    assert sum(1 for l in derived if l.layer is OP) == 21


def test_unresolved_adoption_names_the_id(framework):
    with pytest.raises(ResolutionError, match="no-such-practice"):
        derive_linkages(framework, MethodDefinition("m", "m", practices={"no-such-practice"}))


def test_fdd_value_driven_discrepancy(framework, fdd):
    found = {d.element: d for d in check_consistency(framework, fdd)}
    assert (found["value-driven"].asserted, found["value-driven"].derived) == (5, 4)


def test_method_a_minimal_waste_discrepancy(framework, method_a):
    [d] = check_consistency(framework, method_a)
    assert (d.element, d.asserted, d.derived) == ("minimal-waste", 4, 3)


def test_no_overrides_no_discrepancies(framework, xp):
    assert check_consistency(framework, xp) == []


def test_override_above_expected_is_rejected(framework):
    method = MethodDefinition("m", "m", objectives={"value-driven"}, overrides={"value-driven": Override(7)})
    assert validate_method(framework, method).error_codes() == ["override-range"]


def test_explain_marks_weights_and_adoption(framework, fdd):
    trace = explain_objective(framework, "maximal-adaptability", fdd)
    weights = {e.principle: e.weight for e in trace.edges}
    assert len(weights) == 5 and weights["accommodating-change"] == 2
    assert {e.principle: e.adopted for e in trace.edges}["accommodating-change"] is False


# -- properties ------------------------------------------------------------

FW = embedded_framework()
ELEMENTS = sorted(FW.objective_ids | FW.principle_ids | FW.practice_ids)


def method_from(adopted):
    return MethodDefinition(
        "h", "h",
        adopted & FW.objective_ids, adopted & FW.principle_ids, adopted & FW.practice_ids,
    )


@settings(max_examples=200, deadline=None)
@given(st.sets(st.sampled_from(ELEMENTS)), st.sampled_from(ELEMENTS))
def test_derivation_is_a_subset_and_antitone(adopted, removed):
    method = method_from(adopted)
    derived = derive_linkages(FW, method)
    assert derived <= frozenset(FW.linkages)
    assert derive_linkages(FW, method.without(removed)) <= derived


@settings(max_examples=100, deadline=None)
@given(st.sets(st.sampled_from(ELEMENTS)), st.sets(st.sampled_from(sorted(FW.objective_ids | FW.principle_ids))))
def test_overrides_equal_to_derived_never_disagree(adopted, overridden):
    from opp.model import derived_counts

    method = method_from(adopted)
    overrides = {}
    for element in overridden:
        count, weighted = derived_counts(FW, method, element)
        overrides[element] = Override(count, weighted)
    assert check_consistency(FW, replace(method, overrides=overrides)) == []
