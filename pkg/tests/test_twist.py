import numpy as np
import pytest

from ctlab import twist as tw_mod
from ctlab.electric import CurveClass
from ctlab.words import word_from_str, word_to_str, words_equal


def test_rule_examples():
    tw = tw_mod.TwistMap(CurveClass("a"), 1)
    assert word_to_str(tw.apply(word_from_str("b"))) == "ba"
    assert tw.apply(word_from_str("a")) == word_from_str("a")
    assert tw.apply(word_from_str("c")) == word_from_str("c")
    twc = tw_mod.TwistMap(CurveClass("c"), 3)
    assert word_to_str(twc.apply(word_from_str("d"))) == "dccc"
    assert twc.apply(word_from_str("b")) == word_from_str("b")


def test_relator_preserved_all_coefficients():
    for curve in ("a", "c"):
        for n in range(-8, 9):
            assert tw_mod.TwistMap(CurveClass(curve), n).preserves_relator()


def test_composition_law():
    t2 = tw_mod.TwistMap(CurveClass("a"), 2)
    t3 = tw_mod.TwistMap(CurveClass("a"), 3)
    t5 = tw_mod.TwistMap(CurveClass("a"), 5)
    rng = np.random.default_rng(1)
    for _ in range(100):
        w = tuple(int(x) for x in rng.integers(0, 8, size=int(rng.integers(0, 8))))
        assert words_equal(t2.apply(t3.apply(w)), t5.apply(w))


def test_inverse_law():
    tw = tw_mod.TwistMap(CurveClass("a"), 4)
    inv = tw.inverse()
    rng = np.random.default_rng(2)
    for _ in range(200):
        w = tuple(int(x) for x in rng.integers(0, 8, size=int(rng.integers(0, 7))))
        assert words_equal(inv.apply(tw.apply(w)), w)


def test_ball_map_identity(ball5):
    imgs = tw_mod.ball_map(tw_mod.TwistMap(CurveClass("a"), 0), ball5)
    assert np.array_equal(imgs, np.arange(ball5.n_vertices, dtype=imgs.dtype))


def test_ball_map_of_b(ball5):
    tw = tw_mod.TwistMap(CurveClass("a"), 1)
    imgs = tw_mod.ball_map(tw, ball5)
    vb = ball5.vertex_of_word(word_from_str("b"))
    vba = ball5.vertex_of_word(word_from_str("ba"))
    assert int(imgs[vb]) == vba
    defined, gaps = tw_mod.domain_stats(imgs)
    assert defined + gaps == ball5.n_vertices
    assert defined > 0


def test_ball_map_matches_word_arithmetic(ball5):
    tw = tw_mod.TwistMap(CurveClass("a"), 2)
    imgs = tw_mod.ball_map(tw, ball5)
    words = ball5.words()
    rng = np.random.default_rng(3)
    for v in rng.choice(ball5.n_vertices, 40, replace=False):
        v = int(v)
        img_word = tw.apply(words[v])
        expect = ball5.vertex_of_word(img_word) if len(img_word) <= 5 else -1
        if expect >= 0 or len(img_word) > 5:
            assert int(imgs[v]) == expect


def test_electric_isometry(es5a):
    for n in (1, 2, 4):
        tw = tw_mod.TwistMap(CurveClass("a"), n)
        worst, used, skipped = tw_mod.electric_distortion(tw, es5a, 80, seed=4)
        assert worst == 0
        assert used > 0


def test_trivial_distortions(es5a):
    tw0 = tw_mod.TwistMap(CurveClass("a"), 0)
    worst, _, _ = tw_mod.electric_distortion(tw0, es5a, 30, seed=5)
    assert worst == 0
    worst_h, _, _ = tw_mod.hyperbolic_distortion(tw0, es5a.ball, 30, seed=5)
    assert worst_h == 0
    # pairs within one coset have both electric distances zero
    q = es5a.qcsets()[0]
    tw = tw_mod.TwistMap(CurveClass("a"), 2)
    imgs = tw_mod.ball_map(tw, es5a.ball)
    m1, m2 = int(q.members[2]), int(q.members[4])
    if imgs[m1] >= 0 and imgs[m2] >= 0:
        assert es5a.electric_dist(int(imgs[m1]), int(imgs[m2])) == 0


def test_hyperbolic_witness():
    for n in (1, 2, 4, 8, 16):
        tw = tw_mod.TwistMap(CurveClass("a"), n)
        assert tw_mod.witness_defect(tw) == n
        twc = tw_mod.TwistMap(CurveClass("c"), n)
        assert tw_mod.witness_defect(twc) == n


def test_witness_in_ball(ball5):
    # d(e, b a^n) = n+1 inside the ball wherever the image exists
    for n in (1, 2, 4):
        v = ball5.vertex_of_word(word_from_str("b" + "a" * n))
        assert ball5.dist(0, v) == n + 1


def test_hyperbolic_distortion_grows(ball5):
    vals = []
    for n in (1, 2, 4):
        tw = tw_mod.TwistMap(CurveClass("a"), n)
        worst, _, _ = tw_mod.hyperbolic_distortion(tw, ball5, 150, seed=6)
        vals.append(worst)
    assert vals == sorted(vals)
    assert vals[-1] >= 2


def test_induced_geodesic_map(ball5, es5a):
    a = ball5.vertex_of_word(word_from_str("AA"))
    b = ball5.vertex_of_word(word_from_str("cc"))
    lam = ball5.geodesic(a, b)
    tw0 = tw_mod.TwistMap(CurveClass("a"), 0)
    same = tw_mod.induced_geodesic_map(tw0, ball5, lam)
    assert same.vertices == lam.vertices
    single = tw_mod.induced_geodesic_map(tw0, ball5, ball5.geodesic(a, a))
    assert single.vertices == [a]
    # electric mode: induced image vs pointwise image stay electrically close
    tw = tw_mod.TwistMap(CurveClass("a"), 2)
    imgs = tw_mod.ball_map(tw, ball5)
    ep = tw_mod.induced_geodesic_map(tw, es5a, lam, mode="electric", images=imgs)
    pointwise = [int(imgs[v]) for v in lam.vertices if imgs[v] >= 0]
    worst = 0
    for x in ep.vertices:
        worst = max(worst, min(es5a.electric_dist(x, y) for y in pointwise))
    assert worst <= 4


def test_induced_map_rejects_outside(ball5):
    tw = tw_mod.TwistMap(CurveClass("a"), 16)
    vb = ball5.vertex_of_word(word_from_str("b"))
    lam = ball5.geodesic(0, vb)
    with pytest.raises(ValueError):
        tw_mod.induced_geodesic_map(tw, ball5, lam)
