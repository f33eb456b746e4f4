import numpy as np

from ctlab import project
from ctlab.ball import GPath
from ctlab.electric import CurveClass, ElectricSpace
from ctlab.twist import TwistMap, ball_map
from ctlab.words import word_from_str


def _paths(es):
    ball = es.ball
    a = ball.vertex_of_word(word_from_str("AA"))
    b = ball.vertex_of_word(word_from_str("cc"))
    lam = ball.geodesic(a, b)
    mu_q = es.electro_ambient(es.electric_geodesic(a, b))
    return lam, mu_q


def test_project_h_idempotent(ball5):
    lam, _ = _paths(ElectricSpace(ball5, CurveClass("a")))
    tbl = project.project_h_table(ball5, lam)
    for v in lam.vertices:
        assert int(tbl.map[v]) == v
        assert project.project_h(ball5, lam, v) == v


def test_project_h_single_vertex_target(ball5):
    target = GPath([17])
    rng = np.random.default_rng(1)
    for y in rng.choice(ball5.n_vertices, 10, replace=False):
        assert project.project_h(ball5, target, int(y)) == 17


def test_project_h_matches_exhaustive_scan(ball5, es5a):
    lam, _ = _paths(es5a)
    tbl = project.project_h_table(ball5, lam)
    rng = np.random.default_rng(2)
    for y in rng.choice(ball5.interior_vertices(), 25, replace=False):
        y = int(y)
        fld = ball5.dist_field(y)
        best = min(fld[v] for v in lam.vertices)
        cands = [v for v in lam.vertices if fld[v] == best]
        assert int(tbl.map[y]) == min(cands)


def test_project_e_idempotent_and_zero_tier(es5a):
    _, mu_q = _paths(es5a)
    tbl = project.project_e_table(es5a, mu_q)
    for v in mu_q.vertices:
        assert int(tbl.map[v]) == v
    # a point in a coset crossed by the target lands on that coset's segment
    crossed = {int(es5a.coset_id[v]) for v in mu_q.vertices}
    rng = np.random.default_rng(3)
    hits = 0
    for y in rng.choice(es5a.ball.interior_vertices(), 200, replace=False):
        y = int(y)
        cid = int(es5a.coset_id[y])
        if cid in crossed:
            p = int(tbl.map[y])
            assert int(es5a.coset_id[p]) == cid
            hits += 1
    assert hits > 0


def test_project_e_matches_lexicographic_scan(es5a):
    _, mu_q = _paths(es5a)
    tbl = project.project_e_table(es5a, mu_q)
    rng = np.random.default_rng(4)
    for y in rng.choice(es5a.ball.interior_vertices(), 20, replace=False):
        y = int(y)
        fld = es5a.ball.dist_field(y)
        de = es5a.electric_dist_field(y)
        best = min((int(de[t]), int(fld[t]), int(t))
                   for t in set(mu_q.vertices))
        assert int(tbl.map[y]) == best[2]
        assert project.project_e(es5a, mu_q, y) == best[2]


def test_lipschitz_edge_cases(ball5, es5a):
    lam, _ = _paths(es5a)
    tbl = project.project_h_table(ball5, lam)
    # both endpoints projecting to the same vertex contribute 0
    y = lam.vertices[0]
    assert project.lipschitz_constant(ball5, tbl, [(y, y)]) == 0
    # x on the target: contribution is exactly d(x, pi(y))
    x = lam.vertices[1]
    nb = [int(w) for w in ball5.adj[x] if w >= 0 and w not in lam.vertices][0]
    got = project.lipschitz_constant(ball5, tbl, [(x, nb)])
    assert got == ball5.dist(x, int(tbl.map[nb]))


def test_lipschitz_sampled(ball5, es5a):
    lam, _ = _paths(es5a)
    tbl = project.project_h_table(ball5, lam)
    edges = project.sample_interior_edges(ball5, 150, seed=5)
    lip = project.lipschitz_constant(ball5, tbl, edges)
    assert 0 <= lip <= 3


def test_almost_commute_identity(ball5, es5a):
    lam, _ = _paths(es5a)
    phi = np.arange(ball5.n_vertices, dtype=np.int32)
    defect, used, skipped = project.almost_commute_defect(
        ball5, phi, lam, 40, seed=6, mode="hyperbolic")
    assert defect == 0
    assert used == 40 and skipped == 0


def test_almost_commute_endpoint(ball5, es5a):
    lam, _ = _paths(es5a)
    imgs = ball_map(TwistMap(CurveClass("a"), 2), ball5)
    a = lam.vertices[0]
    # endpoints map to endpoints of the image geodesic: defect 0 there
    target2 = ball5.geodesic(int(imgs[a]), int(imgs[lam.vertices[-1]]))
    t2 = project.project_h_table(ball5, target2)
    assert int(t2.map[int(imgs[a])]) == int(imgs[a])


def test_almost_commute_twist_electric(es5a):
    _, mu_q = _paths(es5a)
    imgs = ball_map(TwistMap(CurveClass("a"), 4), es5a.ball)
    defect, used, skipped = project.almost_commute_defect(
        es5a, imgs, mu_q, 60, seed=7, mode="electric")
    assert used > 0
    assert defect <= 6


def test_agreement_defect(es5a):
    lam, mu_q = _paths(es5a)
    d = project.agreement_defect(es5a, lam, mu_q, 80, seed=8)
    assert 0 <= d <= 6
    # y on both targets projects to itself both ways
    y = lam.vertices[0]
    th = project.project_h_table(es5a.ball, lam)
    te = project.project_e_table(es5a, mu_q)
    assert int(th.map[y]) == y and int(te.map[y]) == y
