import random
from fractions import Fraction

import pytest

from linkhomotopy.complex import build_complex, closure, simplex_volume_ratio
from linkhomotopy.errors import DerivationPointOutsideInterior, NotSubcomplex
from linkhomotopy.exact import combo, lerp
from linkhomotopy.maps import SimplicialMap
from linkhomotopy.subdivide import (Region, barycentric, classify_point, derived, derived_neighborhood,
                                    lagging_second_derived, point_region_direct)


def edge():
    return build_complex([(0,), (1,)], [(0, 1)])


def tri():
    return build_complex([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])


def heights(K, hs):
    return SimplicialMap.from_images(K, [(h,) for h in hs])


def test_barycentric_counts():
    assert len(barycentric(edge()).result.facets) == 2
    assert len(barycentric(tri()).result.facets) == 6
    hollow = build_complex([(0, 0), (1, 0), (0, 1)], [(0, 1), (1, 2), (0, 2)])
    assert barycentric(hollow).result.f_vector == (6, 6)


def test_schedule_of_barycenters_is_barycentric():
    K = tri()
    sched = {s: K.barycenter(s) for s in K.simplexes if len(s) > 1}
    a, b = derived(K, sched).result, barycentric(K).result
    assert a.vertices == b.vertices and a.simplexes == b.simplexes


def test_edge_split_at_one_third():
    D = derived(edge(), {(0, 1): (Fraction(1, 3),)})
    lengths = sorted(abs(D.result.vertices[s[1]][0] - D.result.vertices[s[0]][0]) for s in D.result.facets)
    assert lengths == [Fraction(1, 3), Fraction(2, 3)]


def test_off_center_triangle_areas():
    K = tri()
    sched = {(0, 1): (Fraction(1, 5), 0), (1, 2): (Fraction(2, 3), Fraction(1, 3)), (0, 2): (0, Fraction(3, 4)),
             (0, 1, 2): (Fraction(1, 7), Fraction(2, 7))}
    D = derived(K, sched)
    assert len(D.result.facets) == 6
    assert sum(simplex_volume_ratio(D.result.points(s), K.points((0, 1, 2))) for s in D.result.facets) == 1


def test_point_on_boundary_rejected():
    with pytest.raises(DerivationPointOutsideInterior):
        derived(edge(), {(0, 1): (0,)})


@pytest.mark.parametrize("h, s", [(Fraction(1, 2), Fraction(51, 151)), (0, Fraction(1, 101))])
def test_lagging_derivation_point(h, s):
    K = edge()
    Kpp = lagging_second_derived(K, heights(K, [h, h]))
    a, u = (Fraction(1, 2),), (Fraction(0),)
    assert lerp(a, u, s) in Kpp.result.vertices
    # f_A vanishes there: (1 - s) c - s = 0 with c = h + 1/100
    c = h + Fraction(1, 100)
    assert (1 - s) * c - s == 0


def test_lagging_areas_2d():
    K = tri()
    Kpp = lagging_second_derived(K, heights(K, [0, Fraction(1, 3), 1]))
    A = (0, 1, 2)
    assert sum(simplex_volume_ratio(Kpp.result.points(s), K.points(A)) for s in Kpp.result.facets) == 1
    assert all(Kpp.carrier(s) == A for s in Kpp.result.facets)


def test_neighborhood_trivial_cases():
    K = tri()
    Kpp = lagging_second_derived(K, heights(K, [0, 0, 0]))
    assert derived_neighborhood(Kpp, K.simplexes).simplexes == Kpp.result.simplexes
    assert not derived_neighborhood(Kpp, set()).simplexes
    with pytest.raises(NotSubcomplex):
        derived_neighborhood(Kpp, {(0, 1)})


def test_neighborhood_of_vertex_in_a_path():
    K = build_complex([(0,), (1,), (2,)], [(0, 1), (1, 2)])
    Kpp = lagging_second_derived(K, heights(K, [0, 0, 0]))
    N = derived_neighborhood(Kpp, {(1,)})
    assert len(N.facets()) == 2
    # the endpoint of a segment has a one-edge neighborhood
    assert len(derived_neighborhood(Kpp, {(0,)}).facets()) == 1


def test_classify_examples():
    K = edge()
    Kpp = lagging_second_derived(K, heights(K, [Fraction(1, 2)] * 2))
    L = {(0,)}
    assert classify_point((0,), L, Kpp) is Region.IN_L
    assert classify_point((1,), L, Kpp) is Region.OUTSIDE
    # along the segment from the barycenter 1/2 towards 0 the region flips at 50/151
    d = Fraction(50, 151)
    assert classify_point((d,), L, Kpp) is Region.IN_N_MINUS_L
    assert classify_point((d - Fraction(1, 1000),), L, Kpp) is Region.IN_INT_N_MINUS_L
    assert classify_point((d + Fraction(1, 1000),), L, Kpp) is Region.OUTSIDE


def test_classify_matches_direct_location():
    rng = random.Random(11)
    K = build_complex([(0, 0), (2, 0), (0, 2), (2, 2)], [(0, 1, 2), (1, 2, 3)])
    for _ in range(5):
        F = heights(K, [Fraction(rng.randint(0, 8), 8) for _ in range(4)])
        Kpp = lagging_second_derived(K, F)
        for L in ({(0,)}, closure([(1, 2)]), closure([(0, 1)]) | {(3,)}):
            for s in Kpp.result.facets:
                w = [Fraction(rng.randint(1, 50)) for _ in s]
                x = combo([a / sum(w) for a in w], Kpp.result.points(s))
                assert classify_point(x, L, Kpp) == point_region_direct(x, L, Kpp)
