from fractions import Fraction

import pytest

from linkhomotopy.complex import build_complex, staircase_product
from linkhomotopy.errors import PerturbationFailed
from linkhomotopy.maps import (SimplicialMap, evaluate, gp_report, is_doodle, is_link_map,
                               perturb_general_position, singular_set)

half = Fraction(1, 2)


def _q(m):
    return type("Q", (), {"base": type("B", (), {"dim": m})()})()


def test_identity_evaluate():
    K = build_complex([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    f = SimplicialMap(K, K, [0, 1, 2])
    for v in K.vertices:
        assert evaluate(f, v) == v


def test_edge_midpoint():
    K = build_complex([(0,), (1,)], [(0, 1)])
    f = SimplicialMap.from_images(K, [(2, 2), (4, 0)])
    assert evaluate(f, (half,)) == (3, 1)


def test_degenerate_edge_to_vertex():
    K = build_complex([(0,), (1,)], [(0, 1)])
    f = SimplicialMap.from_images(K, [(7,), (7,)])
    assert evaluate(f, (half,)) == (7,)
    assert singular_set(f).simplexes == K.simplexes


def test_injective_simplex_has_empty_singular_set():
    K = build_complex([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    f = SimplicialMap.from_images(K, [(0, 0, 0), (1, 0, 1), (0, 2, 0)])
    assert not singular_set(f).simplexes


def test_two_edges_onto_one():
    K = build_complex([(0,), (1,), (3,), (4,)], [(0, 1), (2, 3)])
    f = SimplicialMap.from_images(K, [(0, 0), (1, 1), (0, 0), (1, 1)])
    S = singular_set(f).simplexes
    assert S == K.simplexes
    # grid oracle: every sampled point has a partner with the same image
    for k in range(11):
        x = Fraction(k, 10)
        assert evaluate(f, (x,)) == evaluate(f, (3 + x,))


def _two_points(images):
    K = build_complex([(0,), (1,)], [(0,), (1,)])
    return SimplicialMap.from_images(K, images), (1, 2)


def test_link_map_points():
    f, part = _two_points([(0, 0), (1, 0)])
    assert is_link_map(f, part) == (True, None)
    f, part = _two_points([(1, 1), (1, 1)])
    ok, w = is_link_map(f, part)
    assert not ok and w.image == (1, 1)


def test_link_map_disjoint_triangles():
    K = build_complex([(0, 0), (1, 0), (0, 1), (5, 0), (6, 0), (5, 1)],
                      [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    imgs = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 5), (1, 0, 5), (0, 1, 5)]
    f = SimplicialMap.from_images(K, imgs)
    assert is_link_map(f, (1, 1, 1, 2, 2, 2))[0]


def _three_arcs(common):
    K = build_complex([(0,), (1,), (3,), (4,), (6,), (7,)], [(0, 1), (2, 3), (4, 5)])
    if common:
        imgs = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, 1)]
    else:
        imgs = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, 2), (2, -1)]
    return SimplicialMap.from_images(K, imgs), (1, 1, 2, 2, 3, 3)


def test_doodle_three_arcs():
    f, part = _three_arcs(False)
    assert is_doodle(f, part, 3)[0]
    assert not is_link_map(f, part)[0]
    f, part = _three_arcs(True)
    ok, w = is_doodle(f, part, 3)
    assert not ok and w.image == (0, 0)


def _arcs(a, b):
    X = build_complex([(0,), (1,)], [(0,), (1,)])
    Xp = staircase_product(X, (0, half, 1))
    imgs = [None] * 6
    for v, arc in enumerate((a, b)):
        for j in range(3):
            imgs[Xp.vertex(v, j)] = arc[j]
    return SimplicialMap.from_images(Xp.total, imgs), Xp


def test_gp_injective_projection():
    F, Xp = _arcs([(0, 0, 0, 0), (1, 0, 0, half), (2, 0, 0, 1)], [(0, 1, 0, 0), (1, 1, 1, half), (2, 1, 0, 1)])
    r = gp_report(Xp.total, F.images, 0, 3)
    assert not r.singular_set.simplexes and r.codim_ok and r.nondegenerate_ok


def test_gp_overlapping_projections():
    # the two arcs share a segment of their projections: an edge of S facing nothing higher
    F, Xp = _arcs([(0, 0, 0, 0), (1, 0, 0, half), (2, 0, 0, 1)], [(0, 0, 0, 0), (1, 0, 0, half), (2, 1, 0, 1)])
    r = gp_report(Xp.total, F.images, 0, 3)
    assert any(len(s) == 2 for s in r.singular_set.simplexes)
    assert not r.codim_ok


def test_gp_degenerate_edge():
    F, Xp = _arcs([(0, 0, 0, 0), (0, 0, 0, half), (2, 0, 0, 1)], [(0, 1, 0, 0), (1, 1, 1, half), (2, 1, 0, 1)])
    r = gp_report(Xp.total, F.images, 0, 3)
    assert not r.nondegenerate_ok


def test_perturb_fixed_point():
    F, Xp = _arcs([(0, 0, 0, 0), (1, 0, 0, half), (2, 0, 0, 1)], [(0, 1, 0, 0), (1, 1, 1, half), (2, 1, 0, 1)])
    assert perturb_general_position(F, Xp, _q(3), Fraction(1, 10), 0) is F


def test_perturb_identical_arcs():
    arc = [(0, 0, 0, 0), (1, 1, 1, half), (2, 0, 0, 1)]
    F, Xp = _arcs(arc, arc)
    G = perturb_general_position(F, Xp, _q(3), Fraction(1, 10), 5)
    r = gp_report(Xp.total, G.images, 0, 3)
    assert r.ok and not r.singular_set.simplexes
    assert [q[-1] for q in G.images] == [q[-1] for q in F.images]


def test_perturb_zero_magnitude():
    arc = [(0, 0, 0, 0), (1, 1, 1, half), (2, 0, 0, 1)]
    F, Xp = _arcs(arc, arc)
    with pytest.raises(PerturbationFailed):
        perturb_general_position(F, Xp, _q(3), 0, 5)
