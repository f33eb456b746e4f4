import os
import re

import pytest

from ctlab import cli, render
from ctlab.ball import build_or_load
from ctlab.blocks import ModelManifold, ThinBlockSpec
from ctlab.config import ConfigError, load_config
from ctlab.ladder import build_ladder


def _write(tmp_path, body, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(body, encoding="utf-8")
    return str(p)


BASE = """
[ball]
radius = 4
margin = 2
cache = "{cache}"

[[stack]]
kind = "thick"
glue = "id"

[[stack]]
kind = "thin"
curve = "a"
n = 2

[output]
dir = "{out}"
"""


def test_config_roundtrip(tmp_path):
    cfg = load_config(_write(tmp_path, BASE.format(cache=tmp_path / "c",
                                                   out=tmp_path / "o")))
    assert cfg.ball.radius == 4
    assert len(cfg.stack) == 2
    assert cfg.stack[1] == ThinBlockSpec("a", 2)


def test_unknown_suite_exits_2(tmp_path):
    body = BASE.format(cache=tmp_path / "c", out=tmp_path / "o") + \
        "\n[suites.nonsense]\nsamples = 5\n"
    path = _write(tmp_path, body)
    assert cli.main(["--config", path, "run-all"]) == cli.EXIT_CONFIG


def test_bad_stack_exits_2(tmp_path):
    body = "[ball]\nradius = 4\n[[stack]]\nkind = 'thin'\ncurve = 'b'\nn = 1\n"
    path = _write(tmp_path, body)
    assert cli.main(["--config", path, "run-all"]) == cli.EXIT_CONFIG


def test_vertex_cap_exits_3(tmp_path):
    body = "[ball]\nradius = 4\nvertex_cap = 50\n[[stack]]\nkind = 'thick'\n"
    path = _write(tmp_path, body)
    assert cli.main(["--config", path, "--out", str(tmp_path / "o"),
                     "run-all"]) == cli.EXIT_RESOURCE


def test_empty_suite_list_writes_summary(tmp_path):
    path = _write(tmp_path, BASE.format(cache=tmp_path / "c",
                                        out=tmp_path / "o"))
    assert cli.main(["--config", path, "run-all"]) == cli.EXIT_OK
    summary = tmp_path / "o" / "summary.csv"
    assert summary.exists()
    assert summary.read_text().splitlines()[0] == "suite,passed,constants,witness"


def test_run_single_suite(tmp_path):
    body = BASE.format(cache=tmp_path / "c", out=tmp_path / "o") + \
        "\n[suites.twist]\nsamples = 30\nseed = 3\n"
    path = _write(tmp_path, body)
    assert cli.main(["--config", path, "twist-sweep"]) == cli.EXIT_OK
    assert (tmp_path / "o" / "twist.csv").exists()


def test_render_edge_count(tmp_path):
    ball = build_or_load(3, 1, cache_dir=str(tmp_path / "c"))
    out = str(tmp_path / "scene.svg")
    render.render_ball(ball, ["ball-edges"], out)
    text = open(out).read()
    n_lines = len(re.findall(r"<line ", text))
    n_edges = int((ball.adj[:, :4] >= 0).sum())
    assert n_lines == n_edges


def test_render_empty_layers_disk_only(tmp_path):
    ball = build_or_load(3, 1, cache_dir=str(tmp_path / "c"))
    out = str(tmp_path / "empty.svg")
    render.render_ball(ball, [], out)
    text = open(out).read()
    assert len(re.findall(r"<circle ", text)) == 1
    assert "<line" not in text and "<polyline" not in text


def test_render_unknown_layer(tmp_path):
    ball = build_or_load(3, 1, cache_dir=str(tmp_path / "c"))
    with pytest.raises(render.RenderError):
        render.render_ball(ball, ["bogus"], str(tmp_path / "x.svg"))


def test_render_ladder_disks(tmp_path, ball4):
    model = ModelManifold(ball4, [ThinBlockSpec("a", 2)])
    from ctlab.words import word_from_str
    lam = ball4.geodesic(ball4.vertex_of_word(word_from_str("A")),
                         ball4.vertex_of_word(word_from_str("c")))
    ladder = build_ladder(model, lam)
    out = str(tmp_path / "ladder.svg")
    render.render_ladder(ladder, out)
    text = open(out).read()
    assert len(re.findall(r"<circle ", text)) == 4  # one disk per sheet


def test_determinism_of_run_all(tmp_path):
    body = BASE.format(cache=tmp_path / "c", out="{OUT}") + \
        "\n[suites.ball]\nsamples = 40\nseed = 3\n" + \
        "\n[suites.twist]\nsamples = 20\nseed = 3\n"
    p1 = _write(tmp_path, body.replace("{OUT}", str(tmp_path / "o1")), "c1.toml")
    p2 = _write(tmp_path, body.replace("{OUT}", str(tmp_path / "o2")), "c2.toml")
    assert cli.main(["--config", p1, "run-all"]) == cli.EXIT_OK
    assert cli.main(["--config", p2, "run-all"]) == cli.EXIT_OK
    for name in os.listdir(tmp_path / "o1"):
        b1 = (tmp_path / "o1" / name).read_bytes()
        b2 = (tmp_path / "o2" / name).read_bytes()
        assert b1 == b2, name
