from fractions import Fraction

import pytest

from linkhomotopy.complex import (Partition, build_complex, closure, simplex_volume_ratio, skeleton, star_link,
                                  staircase_product)
from linkhomotopy.errors import DegenerateSimplex, NotSubcomplex, OverlappingInteriors, SimplexNotFound
from linkhomotopy.complex import Subcomplex


def tri():
    return build_complex([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])


def test_empty_complex():
    K = build_complex([], [])
    assert len(K) == 0


def test_one_triangle_closure():
    assert tri().f_vector == (3, 3, 1)


def test_repeated_vertex():
    with pytest.raises(DegenerateSimplex):
        build_complex([(0, 0), (1, 0)], [(0, 0)])


def test_collinear_triangle():
    with pytest.raises(DegenerateSimplex):
        build_complex([(0, 0), (1, 1), (2, 2)], [(0, 1, 2)])


def test_overlap_detected():
    with pytest.raises(OverlappingInteriors):
        build_complex([(0, 0), (2, 0), (0, 2), (1, 1), (-1, 3)], [(0, 1, 2), (0, 3, 4)], check_overlap=True)


def test_staircase_point():
    K = build_complex([(0,)], [(0,)])
    P = staircase_product(K)
    assert P.total.facets == ((0, 1),)


def test_staircase_edge_is_two_lattice_paths():
    K = build_complex([(0,), (1,)], [(0, 1)])
    P = staircase_product(K)
    u0, v0, u1, v1 = P.vertex(0, 0), P.vertex(1, 0), P.vertex(0, 1), P.vertex(1, 1)
    assert set(P.total.facets) == {tuple(sorted(s)) for s in [(u0, v0, v1), (u0, u1, v1)]}




def test_staircase_triangle_count():
    K = tri()
    P = staircase_product(K)
    assert len(P.total.facets) == 3
    # every tetrahedron is a monotone chain and the volumes add up to the prism
    total = sum(simplex_volume_ratio(P.total.points(s), [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
                for s in P.total.facets)
    assert total == 3  # prism volume / unit tetrahedron volume


def test_staircase_levels():
    K = build_complex([(0,), (1,)], [(0, 1)])
    P = staircase_product(K, (0, Fraction(1, 3), 1))
    assert len(P.total.facets) == 4
    assert P.level(P.vertex(1, 1)) == Fraction(1, 3)
    assert {P.level(w) for s in P.bottom for w in s} == {0}


def test_star_link_path_center():
    K = build_complex([(0,), (1,), (2,)], [(0, 1), (1, 2)])
    st, lk = star_link(K, (1,))
    assert st.simplexes == closure([(0, 1), (1, 2)])
    assert lk.simplexes == {(0,), (2,)}


def test_star_link_facet_only():
    K = tri()
    st, lk = star_link(K, (0, 1, 2))
    assert st.simplexes == K.simplexes and not lk.simplexes


def test_star_link_hollow_triangle():
    K = build_complex([(0, 0), (1, 0), (0, 1)], [(0, 1), (1, 2), (0, 2)])
    assert star_link(K, (0,))[1].simplexes == {(1,), (2,)}
    with pytest.raises(SimplexNotFound):
        star_link(K, (0, 1, 2))


def test_skeleta():
    assert skeleton(tri(), 1).simplexes == tri().simplexes - {(0, 1, 2)}
    assert not skeleton(tri(), -1).simplexes
    two = build_complex([(0, 0), (1, 0), (0, 1), (5, 0), (6, 0), (5, 1)], [(0, 1, 2), (3, 4, 5)])
    assert len(skeleton(two, 0)) == 6


def test_subcomplex_must_be_closed():
    with pytest.raises(NotSubcomplex):
        Subcomplex(tri(), [(0, 1)])


def test_locate_and_components():
    K = build_complex([(0, 0), (1, 0), (0, 1), (5, 0), (6, 0)], [(0, 1, 2), (3, 4)])
    s, lam = K.locate((Fraction(1, 2), 0))
    assert s == (0, 1) and list(lam) == [Fraction(1, 2), Fraction(1, 2)]
    assert not K.contains_point((3, 3))
    assert Partition.of_components(K).labels == (1, 1, 1, 2, 2)


def test_partition_rejects_bridging_edge():
    K = build_complex([(0,), (1,)], [(0, 1)])
    with pytest.raises(ValueError):
        Partition.from_labels([1, 2]).check(K)
