import json

import pytest

from linkhomotopy import fixtures as fx
from linkhomotopy.cli import main
from linkhomotopy.errors import FormatError
from linkhomotopy.formats import (complex_from_json, complex_to_json, concordance_from_json, concordance_to_json,
                                  dumps)


@pytest.fixture()
def concordance(tmp_path):
    path = tmp_path / "c.json"
    assert main(["gen", "two-points-3cube", "--seed", "5", "--out", str(path)]) == 0
    return path


def test_fixtures_are_deterministic():
    for name in fx.EXAMPLES:
        if name == "eps-embedding":
            continue  # covered by its own acceptance runs
        a, b = fx.generate(name, 3), fx.generate(name, 3)
        assert a.F.images == b.F.images


def test_complex_round_trip():
    c = fx.two_points_3cube(2)
    K, labels = complex_from_json(json.loads(dumps(complex_to_json(c.Xp.total, c.labels))))
    assert K.vertices == c.Xp.total.vertices and K.simplexes == c.Xp.total.simplexes
    assert labels.labels == c.labels


def test_concordance_round_trip():
    c = fx.doodle_3arcs(1)
    inp = concordance_from_json(json.loads(dumps(concordance_to_json(c.X, c.part, c.Xp.levels, c.F, c.Q))))
    assert inp.F.images == c.F.images and inp.part == c.part


def test_concordance_needs_staircase_source():
    c = fx.two_points_3cube(2)
    d = json.loads(dumps(concordance_to_json(c.X, c.part, c.Xp.levels, c.F, c.Q)))
    d["levels"] = ["0", "1"]
    with pytest.raises(FormatError):
        concordance_from_json(d)


def test_check(concordance, capsys):
    assert main(["check", str(concordance)]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True


def test_homotopy_then_verify(concordance, tmp_path):
    b1, b2 = tmp_path / "b1.json", tmp_path / "b2.json"
    assert main(["homotopy", str(concordance), "--out", str(b1)]) == 0
    assert main(["homotopy", str(concordance), "--out", str(b2)]) == 0
    assert b1.read_bytes() == b2.read_bytes()
    assert main(["verify", str(b1)]) == 0
    b = json.loads(b1.read_text())
    b["report"]["disjoint_ok"] = False
    b1.write_text(json.dumps(b))
    assert main(["verify", str(b1)]) == 1


def test_config_file(concordance, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mode": "link", "seed": 3, "samples": 4}))
    out = tmp_path / "b.json"
    assert main(["homotopy", str(concordance), "--config", str(cfg), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["config"]["samples"] == 4


def test_input_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", str(bad)]) == 2
    assert main(["gen", "no-such-example", "--out", str(tmp_path / "x.json")]) == 2
    bad.write_text(json.dumps({"format": "something else"}))
    assert main(["homotopy", str(bad)]) == 2


def test_eps_without_eps_is_an_input_error(concordance):
    assert main(["homotopy", str(concordance), "--mode", "eps"]) == 2
