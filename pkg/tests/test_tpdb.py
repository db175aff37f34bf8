import pytest

from rcterm import tpdb
from rcterm.terms import App, Var

ALL_SYSTEMS = [
    "arith",
    "bin",
    "commute",
    "compose",
    "countdown",
    "double",
    "exp",
    "insert",
    "isort",
    "list_utils",
    "mult",
    "nonsimple",
    "shuffle",
    "toggle",
]


def test_single_rule_system():
    trs = tpdb.parse_trs("(VAR x y) (RULES app(nil,y) -> y)")
    assert len(trs.rules) == 1
    assert {f.name for f in trs.defined_symbols} == {"app"}
    assert {f.name for f in trs.constructor_symbols} == {"nil"}
    assert trs.rules[0].rhs == Var("y")


def test_list_system_classification():
    trs = tpdb.load_corpus("list_utils")
    assert len(trs.rules) == 7
    assert {f.name for f in trs.defined_symbols} == {
        "isempty",
        "hd",
        "tl",
        "app",
        "ifapp",
    }


def test_undeclared_nullary_identifiers_are_constants():
    trs = tpdb.parse_trs("(RULES f(x) -> g(x,x))")
    x = trs.symbol("x")
    assert x.arity == 0 and x.kind == "constructor"
    assert trs.rules[0].lhs == App(trs.symbol("f"), (App(x),))


def test_declared_variable_used_as_function():
    with pytest.raises(tpdb.ParseError, match="used as function"):
        tpdb.parse_trs("(VAR x) (RULES f(x(y)) -> y)")


def test_arity_clash():
    with pytest.raises(tpdb.ParseError, match="arities"):
        tpdb.parse_trs("(VAR x) (RULES f(x) -> f(x,x))")


def test_lhs_variable_rejected():
    with pytest.raises(tpdb.ParseError, match="left-hand side"):
        tpdb.parse_trs("(VAR x) (RULES x -> x)")


def test_free_rhs_variable_rejected():
    with pytest.raises(tpdb.ParseError, match="free right-hand side"):
        tpdb.parse_trs("(VAR x y) (RULES f(x) -> g(y))")


def test_syntax_error_carries_location():
    with pytest.raises(tpdb.ParseError) as err:
        tpdb.parse_trs("(VAR x)\n(RULES f(x) - g(x))")
    assert err.value.line == 2


def test_reserved_names_rejected():
    for bad in ["f#(x) -> x", "c_1 -> c_2", "f(⊥) -> ⊥"]:
        with pytest.raises(tpdb.ParseError, match="reserved"):
            tpdb.parse_trs(f"(VAR x) (RULES {bad})")


def test_strategy_section_recorded():
    doc = tpdb.parse_document("(STRATEGY INNERMOST) (VAR x) (RULES f(x) -> x)")
    assert doc.strategy == "INNERMOST"
    with pytest.raises(tpdb.ParseError, match="unsupported strategy"):
        tpdb.parse_document("(STRATEGY OUTERMOST) (RULES f(a) -> a)")


def test_comment_section_keeps_text():
    doc = tpdb.parse_document("(COMMENT ends with -> arrows, ok) (RULES f(a) -> a)")
    assert doc.comments == ("ends with -> arrows, ok",)


def test_empty_system_rendering():
    from rcterm.terms import Trs

    assert tpdb.render_trs(Trs()) == "(VAR ) (RULES )"


@pytest.mark.parametrize("name", ALL_SYSTEMS)
def test_corpus_round_trip(name):
    trs = tpdb.load_corpus(name)
    again = tpdb.parse_trs(tpdb.render_trs(trs))
    assert again.rules == trs.rules
    assert again.signature == trs.signature


def test_corpus_listing_is_complete():
    assert tpdb.corpus_names() == ALL_SYSTEMS
    with pytest.raises(KeyError):
        tpdb.load_corpus("no_such_system")
