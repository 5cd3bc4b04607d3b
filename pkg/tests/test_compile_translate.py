import random
import pytest

from ksharp.compiler import (CompileBudgetExceeded, compile, compile_cnf,
                             eliminate_indicators, to_cnf)
from ksharp.formula import (dag_size, modal_depth, parse, prop, simplify,
                            subformulas, to_text)
from ksharp.generate import random_corpus, random_formula
from ksharp.gnn import accepted, make_gnn
from ksharp.graph import evaluate
from ksharp.translate import NonBooleanStateWarning, size_bound, translate, tune


def agree(net, f, corpus):
    return all((accepted(g, net) == evaluate(g, f)).all() for g in corpus)


def test_compile_shape():
    net = compile(parse("p"))
    # One component for p plus the pinned-one component.
    assert net.dimension == 2 and len(net.layers) == 1
    f = parse("p & #(q) >= 1")
    net = compile(f)
    assert net.dimension == len(subformulas(f)) + 1
    assert len(net.layers) == len(subformulas(f))
    assert net.propositions == ("p", "q")
    assert net.is_integral()


@pytest.mark.parametrize("text", [
    "p", "!p", "p & q", "p | !q", "#(p) >= 2", "2*[p] - #(q) >= 0",
    "#(#(p) >= 1) <= 1 & p", "true", "false", "[p] + [q] + [r] >= 2",
    "#(p) >= #(q)", "p & #(!p) >= 2 & #(#(p) >= 1) <= 1",
])
def test_compile_fixtures(text, rng):
    f = parse(text)
    corpus = random_corpus(rng, 40)
    assert agree(compile(f), f, corpus)
    assert agree(compile_cnf(f), f, corpus)


def test_compile_cnf_layers_follow_modal_depth():
    f = parse("(p | q) & (q | r) & (!p | r) & (p | !r)")
    for _ in range(4):
        f = parse(f"#({to_text(f)}) >= 1 | p")
    net = compile_cnf(f)
    assert len(net.layers) <= 3 * (modal_depth(f) + 1)
    assert len(compile(f).layers) > len(net.layers)


def test_eliminate_indicators(rng):
    f = parse("2*[p] + 3*[#(q) >= 1] - #(r) >= 1")
    g = eliminate_indicators(f)
    assert not any(t[0][0] == "ind" for h in subformulas(g) if h.kind == "geq"
                   for t in h.expr.terms)
    for graph in random_corpus(rng, 30):
        assert (evaluate(graph, f) == evaluate(graph, g)).all()


def test_cnf_budget():
    big = " & ".join(f"(a{i} | b{i})" for i in range(14))
    f = parse(f"!({big})")
    with pytest.raises(CompileBudgetExceeded):
        compile_cnf(f, budget=64)
    assert to_cnf(parse("p | q")) == frozenset([frozenset([(prop("p"), True), (prop("q"), True)])])


def test_random_equivalence(rng):
    for _ in range(40):
        f = random_formula(rng, 15, 3)
        corpus = random_corpus(rng, 10)
        assert agree(compile(f), f, corpus), to_text(f)
        assert agree(compile_cnf(f), f, corpus), to_text(f)


def test_translate_roundtrip(rng):
    for _ in range(40):
        f = random_formula(rng, 15, 3)
        net = compile(f)
        tr = translate(net)
        assert dag_size(tr) <= size_bound(net)
        for g in random_corpus(rng, 10):
            assert (evaluate(g, tr) == evaluate(g, f)).all()


def test_translate_simplifies_back_exactly():
    for text in ["p", "p & #(q) >= 1", "#(p) >= #(q)", "!p | #(!p) >= 2"]:
        f = parse(text)
        assert simplify(translate(compile(f))) is simplify(f)


def test_non_boolean_warning():
    net = make_gnn(["p"], [([["1/2", 0], [0, 0]], [[0, 0], [0, 0]], [0, 0])], [1, 0])
    with pytest.warns(NonBooleanStateWarning):
        translate(net)


def test_tune(rng):
    net = compile(parse("#(q) >= 1"))
    f = parse("p")
    tuned = tune(net, f)
    for g in random_corpus(rng, 30):
        assert (accepted(g, tuned) == (accepted(g, net) & evaluate(g, f))).all()
