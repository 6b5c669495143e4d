from fractions import Fraction

import pytest

from linkhomotopy.collapse import CollapseSequence, ElementaryStep
from linkhomotopy.complex import build_complex, staircase_product
from linkhomotopy.errors import (CodimensionTooLow, MeshTooCoarse, ModePreconditionFailed, VerificationFailed)
from linkhomotopy.homotopy import (Curve, RunConfig, collapse_to_deformation, curves_meet, level_shift,
                                   neighborhood_images_meet, pipeline, sample_points, verify_level_map)
from linkhomotopy import fixtures as fx
from linkhomotopy.maps import SimplicialMap

half = Fraction(1, 2)


def seg():
    return build_complex([(0,), (1,)], [(0, 1)])


def test_empty_sequence_is_identity():
    K = seg()
    h = collapse_to_deformation(CollapseSequence(K, K.simplexes))
    assert h.at((Fraction(1, 3),), 1) == (Fraction(1, 3),)


def test_segment_collapse_deformation():
    K = seg()
    seq = CollapseSequence(K, K.simplexes)
    seq.add_group([ElementaryStep((0, 1), (1,))])
    h = collapse_to_deformation(seq)
    assert h.at((1,), 0) == (1,)
    assert h.at((1,), half) == (half,)
    assert h.at((1,), 1) == (0,)
    assert h.at((Fraction(1, 4),), 1) == (0,)


def test_curves_meet_kernel():
    a = Curve([(0, (0, 0)), (1, (2, 2))])
    b = Curve([(0, (2, 0)), (1, (0, 2))])
    assert curves_meet([a, b]) == (half, (1, 1))
    c = Curve([(0, (0, 1)), (1, (2, 3))])
    assert curves_meet([a, c]) is None


@pytest.fixture(scope="module")
def points_run(runs):
    return runs("two-points-3cube", 42)


def test_H_endpoints_and_continuity(points_run):
    c, res = points_run
    H = res.H
    for x in c.X.vertices:
        assert H(x, 0) == x + (1,)
        assert H(x, 1) == x + (0,)
        # both formulas give the bottom point at t = 1/2
        assert H(x, half) == res.deformation.at(x + (1,), 1) == x + (0,)


def test_Phi_is_level_preserving_with_the_right_ends(points_run):
    c, res = points_run
    Phi = res.Phi
    for v, x in enumerate(c.X.vertices):
        assert Phi(x, 0)[:-1] == c.F.images[c.Xp.vertex(v, 0)][:-1]
        assert Phi(x, 1)[:-1] == c.F.images[c.Xp.vertex(v, len(c.Xp.levels) - 1)][:-1]
        for k in range(7):
            assert Phi(x, Fraction(k, 6))[-1] == Fraction(k, 6)
        curve = Phi.curve(x)
        for k in range(7):
            t = Fraction(k, 6)
            assert curve.at(t) == Phi(x, t)[:-1]


def test_components_through_one_point_fail(points_run):
    c, res = points_run
    F = res.stable.F
    # squash every image to one Q-point: the components now meet
    flat = SimplicialMap.from_images(F.source, [(0, 0, 0, q[-1]) for q in F.images])
    Phi = level_shift(flat, res.H, c.Xp, c.part)
    rep = verify_level_map(Phi, "link", strict=False)
    assert not rep.ok and not rep.disjoint_ok and rep.witness["check"] == "disjoint_ok"
    with pytest.raises(VerificationFailed):
        verify_level_map(Phi, "link")


def test_codimension_two_rejected():
    X = build_complex([(0,), (1,)], [(0,), (1,)])
    Xp = staircase_product(X)
    F = SimplicialMap.from_images(Xp.total, [(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1)])
    with pytest.raises(CodimensionTooLow):
        pipeline(F, Xp, None, (1, 2), RunConfig())


def test_mode_precondition():
    c = fx.doodle_3arcs(7)
    with pytest.raises(ModePreconditionFailed) as e:
        pipeline(c.F, c.Xp, None, c.part, RunConfig(mode="link"))
    assert e.value.witness is not None


def test_mesh_too_coarse():
    c = fx.eps_embedding(1)
    with pytest.raises(MeshTooCoarse):
        pipeline(c.F, c.Xp, None, c.part, RunConfig(mode="eps", eps=Fraction(1, 5)))


def test_sample_points_cover_vertices():
    X = seg()
    pts = sample_points(X, 3)
    assert pts[:2] == [(0,), (1,)] and (Fraction(1, 4),) in pts and len(pts) == 5


def test_neighborhood_images():
    # two vertical edges over nearby Q-points; 1/2-neighborhoods reach each other's image only if eps is big
    K = build_complex([(0, 0), (0, 1), (1, 0), (1, 1)], [(0, 1), (2, 3)])
    F = SimplicialMap.from_images(K, [(0, 0), (0, 1), (0, 0), (0, 1)])
    assert neighborhood_images_meet(F, [(0,), (1,)], Fraction(1, 4)) is not None  # same image segment
    G = SimplicialMap.from_images(K, [(0, 0), (0, 1), (5, 0), (5, 1)])
    assert neighborhood_images_meet(G, [(0,), (1,)], Fraction(1, 4)) is None


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(mode="eps")
    with pytest.raises(ValueError):
        RunConfig(mode="other")
    cfg = RunConfig(mode="doodle", l=3, seed=4)
    assert RunConfig.from_json(cfg.to_json()) == cfg
