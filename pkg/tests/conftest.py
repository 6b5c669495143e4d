import json
from fractions import Fraction

import pytest

from linkhomotopy import fixtures as fx
from linkhomotopy.formats import bundle_from_result, dumps
from linkhomotopy.homotopy import RunConfig, pipeline

MODES = {"two-points-3cube": "link", "doodle-3arcs": "doodle", "eps-embedding": "eps",
         "two-circles-4cube": "link"}


def config_for(name, seed):
    mode = MODES[name]
    return RunConfig(mode=mode, l=3 if mode == "doodle" else 2,
                     eps=Fraction(1, 4) if mode == "eps" else None, seed=seed)


def run(name, seed):
    c = fx.generate(name, seed)
    return c, pipeline(c.F, c.Xp, None, c.part, config_for(name, seed))


def bundle_of(c, res):
    # round-trip through text, as the CLI would
    return json.loads(dumps(bundle_from_result(res, c.X, c.part, c.Xp.levels, c.Q)))


@pytest.fixture(scope="session")
def circles():
    return fx.two_circles_4cube(42)


@pytest.fixture(scope="session")
def circles_run():
    return run("two-circles-4cube", 42)


@pytest.fixture(scope="session")
def circles_bundle(circles_run):
    return bundle_of(*circles_run)


@pytest.fixture(scope="session")
def doodle_bundle():
    return bundle_of(*run("doodle-3arcs", 7))


@pytest.fixture(scope="session")
def runs():
    """One pipeline run per shipped fixture (the two-circles one is shared)."""
    cache = {}

    def get(name, seed):
        if (name, seed) not in cache:
            cache[(name, seed)] = run(name, seed)
        return cache[(name, seed)]
    return get
