import pytest

from incidentstats.errors import FormulaError
from incidentstats.model import parse_formula, parse_model_formula, render_formula, term_label


def labels(f):
    return [term_label(t) for t in f.terms]


def test_minimal():
    f = parse_formula("Casualties ~ Targets")
    assert f.response == "Casualties" and labels(f) == ["Targets"]


def test_star_expansion():
    assert labels(parse_formula("Casualties ~ Targets*Weapon_Type")) == [
        "Targets", "Weapon_Type", "Targets:Weapon_Type"]


THREE_WAY = ["Targets", "Weapon_Type", "Shots_Fired", "Targets:Weapon_Type",
             "Targets:Shots_Fired", "Weapon_Type:Shots_Fired", "Targets:Weapon_Type:Shots_Fired"]


def test_three_factor_structure():
    explicit = parse_formula("Casualties ~ " + " + ".join(THREE_WAY))
    assert labels(explicit) == THREE_WAY
    assert labels(parse_formula("Casualties ~ Targets*Weapon_Type*Shots_Fired")) == THREE_WAY


def test_order_preserved():
    assert labels(parse_formula("y ~ b + a + a:b")) == ["b", "a", "a:b"]


def test_intercept_only():
    f = parse_formula("y ~ 1")
    assert f.terms == () and render_formula(f) == "y ~ 1"


def test_case_insensitive_resolution():
    f = parse_model_formula("casualties ~ weapon_type + TARGETS")
    assert f.response == "Casualties" and labels(f) == ["Weapon_Type", "Targets"]


@pytest.mark.parametrize("text", [
    "Casualties ~ Targets +", "Casualties Targets", "Casualties ~ Nope",
    "Casualties ~ Targets + Targets", "Casualties ~ Targets:Targets",
    "Casualties ~ Casualties", "Casualties ~ Targets:Weapon_Type + Weapon_Type:Targets",
])
def test_errors(text):
    with pytest.raises(FormulaError):
        parse_model_formula(text)


def test_error_carries_position():
    with pytest.raises(FormulaError) as exc:
        parse_model_formula("Casualties ~ Targets + Nope")
    assert exc.value.position == 23


@pytest.mark.parametrize("text", [
    "Casualties ~ Targets", "y ~ a + b + a:b", "y ~ 1", "Killed ~ a:b:c + d"])
def test_render_round_trip(text):
    f = parse_formula(text)
    assert render_formula(f) == text
    assert parse_formula(render_formula(f)) == f


def test_without():
    f = parse_formula("y ~ a + b")
    assert render_formula(f.without(("a",))) == "y ~ b"
