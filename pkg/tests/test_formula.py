import pickle
import random

import pytest
from hypothesis import given, settings, strategies as st

from ksharp.formula import (FALSE, TRUE, LinExpr, ParseError, and_, box, cnt, count_atoms,
                            dag_size, diamond, dumps_dag, geq, iff, ind, iter_words,
                            loads_dag, modal_depth, nnf, not_, or_, parse, prop,
                            propositions, simplify, subformulas, to_text, tree_size)
from ksharp.generate import random_formula
from ksharp.graph import evaluate
from ksharp.generate import random_corpus

p, q, r = prop("p"), prop("q"), prop("r")

formulas = st.builds(lambda seed, size, md: random_formula(random.Random(seed), size, md),
                     st.integers(0, 10 ** 6), st.integers(1, 20), st.integers(0, 3))


def test_hash_consing_shares_nodes():
    a = geq(cnt(p & q) - 2)
    b = parse("#(p & q) >= 2")
    assert a is b
    assert and_(p, q) is (p & q)
    assert prop("p") is p


def test_linexpr_normalizes_terms():
    e = cnt(p) + cnt(p) - cnt(p) * 2 + 3
    assert e.terms == () and e.const == 3
    assert ((cnt(p) - cnt(q)) >= 0) is parse("#(q) <= #(p)")


def test_constants():
    assert TRUE is geq(0) and FALSE is geq(-1)
    assert parse("true") is TRUE and parse("false") is FALSE


@pytest.mark.parametrize("text", [
    "p", "!p", "p & q | r", "p -> q", "p <-> q", "#(p) >= 2", "#(p) - #(q) >= 0",
    "2*[p] + 3*#(!q) <= 4", "<>^3 q", "[] (p -> q)", "-#(p) >= -1",
    "#(#(p) >= 1) <= 1", "[p & #(q) <= 4] <= #(#(p) >= 2) <= 4",
])
def test_parse_print_roundtrip(text):
    f = parse(text)
    assert parse(to_text(f)) is f


@given(formulas)
@settings(max_examples=200, deadline=None)
def test_roundtrip_random(f):
    assert parse(to_text(f)) is f
    assert loads_dag(dumps_dag(f)) is f
    assert pickle.loads(pickle.dumps(f)) is f


@given(formulas)
@settings(max_examples=100, deadline=None)
def test_nnf_is_equivalent_and_idempotent(f):
    g = nnf(f)
    assert nnf(g) is g
    for node in subformulas(g):
        if node.kind == "not":
            assert node.args[0].kind == "prop"
    for graph in random_corpus(random.Random(f.id), 5):
        assert (evaluate(graph, f) == evaluate(graph, g)).all()


@given(formulas)
@settings(max_examples=100, deadline=None)
def test_simplify_preserves_semantics(f):
    g = simplify(f)
    assert modal_depth(g) <= modal_depth(f)
    for graph in random_corpus(random.Random(f.id + 1), 5):
        assert (evaluate(graph, f) == evaluate(graph, g)).all()


def test_modal_depth_and_levels():
    f = parse("[p & #(q) <= 4] <= #(#(p) >= 2) <= 4")
    assert modal_depth(f) == 2
    assert {to_text(g) for g in count_atoms(f)} == {"q", "#(p) >= 2"}
    assert modal_depth(p) == 0
    assert modal_depth(diamond(diamond(p))) == 2
    assert modal_depth(geq(ind(diamond(p)))) == 1


def test_builders():
    assert diamond(p, 3) is parse("#(p) >= 3")
    assert box(p) is parse("#(!p) <= 0")
    assert iff(p, q) is parse("p <-> q")
    assert propositions(parse("p & #(q | r) >= 1")) == ["p", "q", "r"]


def test_sizes():
    # A chain of shared diamonds: linear DAG, exponential tree.
    f = p
    for _ in range(20):
        f = geq(cnt(f) + cnt(f) * 1 - 1) | f
    assert dag_size(f) < 100
    assert tree_size(f) > 2 ** 20


@pytest.mark.parametrize("bad", ["", "p &", "#p", "(p", "p >= 1", "2 >= 1 >=", "p q", "#(p) >= 1.5"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse(bad)


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse("p & & q")
    assert exc.value.position == 4


def test_iter_words():
    assert list(iter_words(2)) == ["00", "01", "10", "11"]
    assert list(iter_words(0)) == [""]
