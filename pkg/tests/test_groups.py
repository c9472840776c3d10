import itertools

import pytest
from hypothesis import given, settings, strategies as st

from oracles import automorphism_count, conjugacy_partition, isomorphic
from torsorforge.errors import CapacityError, InvariantError
from torsorforge.groups import (GroupMorphism, build_group, conjugacy_classes, cyclic_group,
                                determinant_morphism, direct_product, enumerate_automorphisms,
                                find_isomorphism, general_linear_group, group_from_table,
                                semidirect_product, semidirect_projection, symmetric_group)

# Latin square with identity and inverses, but (1*1)*2 != 1*(1*2)
LOOP5 = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]

SPECS = ["cyclic 1", "cyclic 4", "symmetric 3", "product(cyclic 2,cyclic 2)", "gl 2 2", "sl 2 3",
         "perm [[1,2,0,3],[1,0,2,3]]", "mat 3 [[[1,1],[0,1]]]", "table [[0,1],[1,0]]"]


def test_trivial_group():
    assert build_group("cyclic 1").order == 1


def test_symmetric_three_classes():
    G = build_group("symmetric 3")
    assert G.order == 6
    classes = conjugacy_classes(G)
    assert classes == conjugacy_partition(G.table)
    assert sorted(len(c) for c in classes) == [1, 2, 3]


def test_gl22_is_s3():
    G = build_group("gl 2 2")
    assert G.order == 6
    assert isomorphic(G.table, symmetric_group(3).table)
    assert find_isomorphism(G, symmetric_group(3)) is not None


def test_non_associative_table_names_triple():
    with pytest.raises(InvariantError, match=r"\(1\*1\)\*2"):
        group_from_table(LOOP5)


def test_non_closed_table():
    with pytest.raises(InvariantError):
        group_from_table([[0, 1], [1, 2]])


def test_singular_matrix_generator():
    with pytest.raises(InvariantError, match="singular"):
        build_group("mat 2 [[[1,1],[1,1]]]")


def test_deterministic_order():
    for spec in SPECS:
        assert build_group(spec).table == build_group(spec).table


def test_identity_is_zero():
    for spec in SPECS:
        G = build_group(spec)
        assert all(G.table[0][a] == a == G.table[a][0] for a in range(G.order))


@pytest.mark.parametrize("spec", ["cyclic 3", "product(cyclic 2,cyclic 2)", "cyclic 1", "symmetric 3",
                                  "cyclic 4"])
def test_automorphism_counts_match_brute_force(spec):
    G = build_group(spec)
    auts = enumerate_automorphisms(G)
    assert len(auts) == automorphism_count(G.table)
    assert list(auts.maps) == sorted(auts.maps)


def test_automorphism_examples():
    assert len(enumerate_automorphisms(cyclic_group(3))) == 2
    assert len(enumerate_automorphisms(build_group("product(cyclic 2,cyclic 2)"))) == 6
    assert len(enumerate_automorphisms(cyclic_group(1))) == 1


def test_automorphism_capacity():
    with pytest.raises(CapacityError):
        enumerate_automorphisms(cyclic_group(65))


def test_aut_group_faithful_and_closed():
    G = symmetric_group(3)
    auts = enumerate_automorphisms(G)
    A = auts.as_group
    assert len(set(auts.maps)) == A.order
    for i, j in itertools.product(range(A.order), repeat=2):
        composed = tuple(auts.maps[i][auts.maps[j][x]] for x in range(G.order))
        assert auts.maps[A.table[i][j]] == composed


def test_semidirect_inversion_is_s3():
    Z3, Z2 = cyclic_group(3), cyclic_group(2)
    auts = enumerate_automorphisms(Z3)
    act = GroupMorphism(Z2, auts.as_group, (0, auts.inversion()))
    SD = semidirect_product(Z3, Z2, act)
    assert SD.order == 6
    assert isomorphic(SD.table, symmetric_group(3).table)
    pr = semidirect_projection(SD, Z2)
    assert pr.image == tuple(x % 2 for x in range(6))


def test_semidirect_degenerate_factors():
    N = symmetric_group(3)
    one = cyclic_group(1)
    auts = enumerate_automorphisms(N)
    assert isomorphic(semidirect_product(N, one, GroupMorphism(one, auts.as_group, (0,))).table, N.table)
    trivial_auts = enumerate_automorphisms(one)
    Q = cyclic_group(4)
    act = GroupMorphism(Q, trivial_auts.as_group, (0,) * 4)
    assert isomorphic(semidirect_product(one, Q, act).table, Q.table)


def test_semidirect_trivial_action_is_direct_product():
    N, Q = symmetric_group(3), cyclic_group(2)
    auts = enumerate_automorphisms(N)
    act = GroupMorphism(Q, auts.as_group, (0, 0))
    assert semidirect_product(N, Q, act).table == direct_product(N, Q).table


def test_semidirect_rejects_non_morphism():
    Z3, Z2 = cyclic_group(3), cyclic_group(2)
    auts = enumerate_automorphisms(Z3)
    with pytest.raises(InvariantError):
        semidirect_product(Z3, cyclic_group(3), (0, auts.inversion(), 0))


@pytest.mark.parametrize("n,q,gl,sl,image", [(2, 2, 6, 6, 1), (2, 3, 48, 24, 2), (1, 3, 2, 1, 2)])
def test_determinant(n, q, gl, sl, image):
    det, SL, inc = determinant_morphism(n, q)
    assert det.source.order == gl
    assert SL.order == sl
    assert len(det.image_set()) == image
    assert gl == sl * len(det.image_set())
    assert set(inc.image) == set(det.kernel())


def test_determinant_1x1_identity():
    det, _, _ = determinant_morphism(1, 3)
    assert det.image == (0, 1)


def test_gl_brute_count():
    # invertible 2x2 matrices over F_3 counted directly
    count = sum(1 for a, b, c, d in itertools.product(range(3), repeat=4) if (a * d - b * c) % 3)
    assert general_linear_group(2, 3).order == count == 48


def test_abelian_classes_are_singletons():
    G = build_group("product(cyclic 2,cyclic 3)")
    assert conjugacy_classes(G) == [[a] for a in range(G.order)]
    assert conjugacy_classes(cyclic_group(1)) == [[0]]


group_specs = st.sampled_from(SPECS + ["symmetric 4", "gl 2 3"])


@settings(max_examples=20, deadline=None)
@given(group_specs, st.data())
def test_group_axioms(spec, data):
    G = build_group(spec)
    idx = st.integers(0, G.order - 1)
    a, b, c = data.draw(idx), data.draw(idx), data.draw(idx)
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.mul(a, G.inv(a)) == 0 == G.mul(G.inv(a), a)
    assert [x for x in range(G.order) if G.mul(a, x) == 0] == [G.inv(a)]


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(SPECS))
def test_classes_partition_and_closed(spec):
    G = build_group(spec)
    classes = conjugacy_classes(G)
    flat = sorted(x for c in classes for x in c)
    assert flat == list(range(G.order))
    assert [min(c) for c in classes] == sorted(min(c) for c in classes)
    for c in classes:
        assert {G.conj(g, x) for g in range(G.order) for x in c} == set(c)
