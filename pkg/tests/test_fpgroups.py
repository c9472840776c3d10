import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_reduce
from torsorforge.errors import CapacityError, InvariantError
from torsorforge.fpgroups import (Presentation, abelianization, cayley_presentation, concat,
                                  cyclic_presentation, enumerate_homs, enumerate_homs_naive,
                                  evaluate_hom, free_presentation, graph_pi1, klein_four_presentation,
                                  parse_presentation, reduce_word, surface_presentation)
from torsorforge.graphs import Graph
from torsorforge.groups import build_group, cyclic_group, symmetric_group


def test_reduce_examples():
    assert reduce_word([1, -1]) == ()
    assert reduce_word([1, 2, -2, 1]) == (1, 1)
    assert reduce_word([2, -1, 1, -2, 3]) == naive_reduce([2, -1, 1, -2, 3]) == (3,)


def test_reduce_rejects_zero():
    with pytest.raises(InvariantError):
        reduce_word([1, 0])


letters = st.integers(-3, 3).filter(bool)
words = st.lists(letters, max_size=16)


@given(words)
def test_reduce_matches_naive_and_is_idempotent(w):
    r = reduce_word(w)
    assert r == naive_reduce(w)
    assert reduce_word(r) == r
    assert len(r) <= len(w)


def test_surface_presentations():
    T = surface_presentation(1)
    assert T.ngens == 2 and T.relators == ((1, 2, -1, -2),)
    assert str(T) == "<a b | a b a^-1 b^-1>"
    S2 = surface_presentation(2)
    assert S2.ngens == 4 and len(S2.relators[0]) == 8  # two commutators of 4 letters each
    with pytest.raises(InvariantError):
        surface_presentation(0)


def test_abelianization():
    assert abelianization(surface_presentation(1)) == (2, ())
    assert abelianization(surface_presentation(2)) == (4, ())
    assert abelianization(cyclic_presentation(6)) == (0, (6,))
    assert abelianization(klein_four_presentation()) == (0, (2, 2))


def test_presentation_validation():
    with pytest.raises(InvariantError):
        Presentation(1, ((1, -1),))
    with pytest.raises(InvariantError):
        Presentation(1, ((2,),))


def test_parse_presentation():
    P = parse_presentation("gens a b; rel a b a^-1 b^-1; rel a^2;")
    assert P.ngens == 2
    assert P.relators == ((1, 2, -1, -2), (1, 1))
    with pytest.raises(InvariantError):
        parse_presentation("gens a; rel c;")


def test_graph_pi1_examples():
    assert graph_pi1(Graph.bouquet(2)).presentation.ngens == 2
    assert graph_pi1(Graph.path(4)).presentation.ngens == 0
    tri = graph_pi1(Graph.cycle(3))
    assert tri.presentation.ngens == 1 and tri.presentation.relators == ()
    with pytest.raises(InvariantError):
        graph_pi1(Graph(2, ()))


def test_graph_pi1_rank_formula():
    for g in (Graph.theta(), Graph.cycle(5), Graph(3, ((0, 1), (1, 2), (2, 0), (0, 0), (1, 2)))):
        data = graph_pi1(g)
        assert data.presentation.ngens == g.nedges - g.nvertices + 1
        for e in data.generator_edges:
            assert data.path_word(data.tree.loop(e)) == data.edge_words[e]


def test_evaluate_examples():
    S3 = symmetric_group(3)
    x, y = 1, 3
    assert evaluate_hom((x,), S3, ()) == 0
    assert evaluate_hom((x,), S3, (1, 1)) == S3.mul(x, x)
    expected = S3.prod([x, y, S3.inv(x), S3.inv(y)])
    assert evaluate_hom((x, y), S3, (1, 2, -1, -2)) == expected


@settings(max_examples=50)
@given(words, words, st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)))
def test_evaluate_is_multiplicative(u, v, values):
    S3 = symmetric_group(3)
    assert evaluate_hom(values, S3, u + v) == S3.mul(evaluate_hom(values, S3, u),
                                                     evaluate_hom(values, S3, v))


def test_enumerate_homs_examples():
    assert len(enumerate_homs(free_presentation(2), symmetric_group(3))) == 36
    assert len(enumerate_homs(cyclic_presentation(2), cyclic_group(3))) == 1
    assert len(enumerate_homs(surface_presentation(1), cyclic_group(2))) == 4


@pytest.mark.parametrize("P", [surface_presentation(1), cyclic_presentation(3), klein_four_presentation(),
                               parse_presentation("gens a b; rel a a; rel b b b; rel a b a b;")])
@pytest.mark.parametrize("spec", ["symmetric 3", "cyclic 4", "gl 2 2", "product(cyclic 2,cyclic 2)"])
def test_enumerate_homs_matches_grid(P, spec):
    G = build_group(spec)
    assert enumerate_homs(P, G) == enumerate_homs_naive(P, G)


def test_enumerate_homs_workers_equal():
    P, G = surface_presentation(1), symmetric_group(3)
    assert enumerate_homs(P, G, workers=3) == enumerate_homs(P, G)


def test_enumerate_homs_budget():
    with pytest.raises(CapacityError) as info:
        enumerate_homs(free_presentation(3), symmetric_group(3), budget=100)
    assert info.value.required == 216


def test_cayley_presentation_recovers_group():
    for spec in ("symmetric 3", "cyclic 5", "product(cyclic 2,cyclic 2)"):
        G = build_group(spec)
        cay = cayley_presentation(G)
        assert [cay.element_of(w) for w in cay.normal_words] == list(range(G.order))
        homs = enumerate_homs(cay.presentation, G)
        assert tuple(cay.generators) in homs
        for r in cay.presentation.relators:
            assert cay.element_of(r) == 0


def test_concat_reduces():
    assert concat((1, 2), (-2, 3)) == (1, 3)
