from fractions import Fraction

import pytest

from linkhomotopy.complex import build_complex, closure
from linkhomotopy.errors import OvershadowCycle
from linkhomotopy.maps import SimplicialMap
from linkhomotopy.shadow import (LINK, PLAIN, Mode, check_fact_witness, certify_step, interior, overshadow_order,
                                 overshadows)

q = (Fraction(1), Fraction(2))


def points(heights, qs=None):
    K = build_complex([(i, 0) for i in range(len(heights))], [(i,) for i in range(len(heights))])
    qs = qs or [q] * len(heights)
    return SimplicialMap.from_images(K, [p + (h,) for p, h in zip(qs, heights)])


def test_vertices_at_three_quarters_and_one_quarter():
    F = points([Fraction(3, 4), Fraction(1, 4)])
    f = overshadows(F, (0,), (1,), LINK, (1, 2))
    assert f.verdict and check_fact_witness(F, f, (1, 2))
    assert f.witness == ((0, 0), (1, 0))
    assert not overshadows(F, (1,), (0,), LINK, (1, 2)).verdict


def test_same_component_never_link_overshadows():
    F = points([Fraction(3, 4), Fraction(1, 4)])
    assert not overshadows(F, (0,), (1,), LINK, (1, 1)).verdict
    assert overshadows(F, (0,), (1,), PLAIN).verdict


def test_disjoint_images():
    F = points([1, 0], [(0, 0), (5, 5)])
    assert not overshadows(F, (0,), (1,), PLAIN).verdict


def diagonals():
    K = build_complex([(0, 0), (1, 0), (0, 1), (1, 1)], [(0, 1), (2, 3)])
    F = SimplicialMap.from_images(K, [(0, 0), (1, 1), (0, 1), (1, 0)])
    return F, (1, 1, 2, 2)


def test_crossing_diagonals_mutual():
    F, part = diagonals()
    ab = overshadows(F, (0, 1), (2, 3), LINK, part)
    ba = overshadows(F, (2, 3), (0, 1), LINK, part)
    assert ab.verdict and ba.verdict
    assert check_fact_witness(F, ab, part) and check_fact_witness(F, ba, part)
    # grid oracle: over q = t the edges sit at heights t and 1 - t
    ts = [Fraction(k, 8) for k in range(9)]
    assert any(t > 1 - t for t in ts) and any(1 - t > t for t in ts)
    assert ab.witness[0][0] > Fraction(1, 2) > ba.witness[0][0]


def test_crossing_diagonals_cycle():
    F, part = diagonals()
    with pytest.raises(OvershadowCycle) as e:
        overshadow_order(F, [(0, 1), (2, 3)], LINK, part)
    assert sorted(e.value.cycle) == [(0, 1), (2, 3)]


def test_stack_of_three():
    F = points([Fraction(1, 2), Fraction(1, 4), Fraction(3, 4)])
    assert overshadow_order(F, [(0,), (1,), (2,)], PLAIN) == [(2,), (0,), (1,)]


def test_order_is_stable_without_shadows():
    F = points([0, 0, 0], [(0, 0), (1, 1), (2, 2)])
    assert overshadow_order(F, [(2,), (0,), (1,)], PLAIN) == [(2,), (0,), (1,)]


def test_certify_vacuous():
    F = points([Fraction(3, 4), Fraction(1, 4)])
    c = certify_step(F, F.source.simplexes, F.source.simplexes, LINK, part=(1, 2))
    assert c.verdict and not c.checked_pairs


def two_vertical_edges():
    # components 1 and 2, tops over the same Q-point at heights 3/4 and 1/4
    K = build_complex([(0, 0), (0, 1), (1, 0), (1, 1)], [(0, 1), (2, 3)])
    F = SimplicialMap.from_images(K, [(0, 0, 0), (1, 1, Fraction(3, 4)), (2, 0, 0), (1, 1, Fraction(1, 4))])
    return F, (1, 1, 2, 2)


def test_certify_upper_first_passes():
    F, part = two_vertical_edges()
    V = F.source.simplexes
    assert certify_step(F, V, V - {(0, 1), (1,)}, LINK, part=part).verdict


def test_certify_lower_first_fails():
    F, part = two_vertical_edges()
    V = F.source.simplexes
    c = certify_step(F, V, V - {(2, 3), (3,)}, LINK, part=part)
    assert not c.verdict
    assert any(f.A in ((1,), (0, 1)) and f.B == (3,) for f in c.failing)


def test_eps_mode_excludes_nearby_pairs():
    F = points([Fraction(3, 4), Fraction(1, 4)])
    # source points are 1 apart in the max metric
    assert overshadows(F, (0,), (1,), Mode("eps", Fraction(1, 2))).verdict
    assert not overshadows(F, (0,), (1,), Mode("eps", Fraction(2))).verdict


def test_interior():
    K = build_complex([(0,), (1,), (2,)], [(0, 1), (1, 2)])
    W = closure([(0, 1)])
    assert interior(W, K) == {(0,), (0, 1)}


def test_mode_parse():
    assert Mode.parse("eps:1/4") == Mode("eps", Fraction(1, 4))
    assert Mode.parse(Mode("eps", Fraction(1, 4)).to_json()).eps == Fraction(1, 4)
    with pytest.raises(ValueError):
        Mode("eps")
