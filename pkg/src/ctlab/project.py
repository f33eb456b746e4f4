"""Nearest-point projections, hyperbolic and electric.

Electric projection minimizes the ordered pair (electric distance, graph
distance) lexicographically over the target's vertices, then breaks the
remaining tie shortlex.  This pins down a single representative of the
coarsely-defined projection; the suites measure how much the choices can
wobble instead of assuming a bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import search
from .ball import CayleyBall, GPath
from .electric import ElectricSpace

_DE_SHIFT = 42
_DG_SHIFT = 21


@dataclass
class ProjectionTable:
    target: GPath
    mode: str              # "hyperbolic" | "electric"
    map: np.ndarray        # vertex -> vertex on target


def project_h_table(ball: CayleyBall, target: GPath) -> ProjectionTable:
    verts = np.array(target.vertices, dtype=np.int64)
    _, label = search.bfs_labeled(ball.adj, verts, verts)
    return ProjectionTable(target=target, mode="hyperbolic", map=label)


def project_h(ball: CayleyBall, target: GPath, y: int) -> int:
    """Target vertex nearest to y in the graph metric, shortlex tie-break."""
    dy = ball.dist_field(int(y))
    verts = np.array(target.vertices, dtype=np.int64)
    dists = dy[verts]
    best = dists.min()
    return int(verts[dists == best].min())


def project_e_table(es: ElectricSpace, target: GPath) -> ProjectionTable:
    """Electric projection of every ball vertex onto an electro-ambient path.

    Builds one graph-distance column and one electric-distance column per
    target vertex, packs (d_e, d, id) into a single integer key and takes
    the per-vertex argmin.  Exact and wholly vectorized.
    """
    ball = es.ball
    verts = [int(v) for v in target.vertices]
    uniq = sorted(set(verts))
    n = ball.n_vertices
    best_key = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    best_id = np.full(n, -1, dtype=np.int64)
    for t in uniq:
        dg = search.bfs_field(ball.adj, [t]).astype(np.int64)
        de = es.comp_dist_field(es.comp_id[t]).astype(np.int64)[es.comp_id]
        key = (de << _DE_SHIFT) | (dg << _DG_SHIFT) | t
        upd = key < best_key
        best_key[upd] = key[upd]
        best_id[upd] = t
    return ProjectionTable(target=target, mode="electric", map=best_id)


def project_e(es: ElectricSpace, target: GPath, y: int) -> int:
    """Electric projection of one point: lexicographic (d_e, d, shortlex)."""
    y = int(y)
    dy = es.ball.dist_field(y)
    de_y = es.electric_dist_field(y)
    best = None
    for t in sorted(set(target.vertices)):
        key = (int(de_y[t]), int(dy[t]), int(t))
        if best is None or key < best:
            best = key
    return best[2]


def target_distance_lookup(ball: CayleyBall, *paths):
    """Pairwise graph distances among the vertices of the given paths.

    Returns (index dict, matrix); used to price projected pairs cheaply.
    """
    verts = sorted({int(v) for p in paths for v in p.vertices})
    idx = {v: i for i, v in enumerate(verts)}
    mat = search.pairwise_distances(ball.adj, verts)
    return idx, mat


def lipschitz_constant(ball: CayleyBall, table: ProjectionTable, edges) -> int:
    """Max over sampled adjacent pairs (x, y) of d(pi(x), pi(y))."""
    idx, mat = target_distance_lookup(ball, table.target)
    worst = 0
    for x, y in edges:
        px, py = int(table.map[x]), int(table.map[y])
        worst = max(worst, int(mat[idx[px], idx[py]]))
    return worst


def sample_interior_edges(ball: CayleyBall, count: int, seed: int):
    """Seeded adjacent interior pairs (both endpoints trusted)."""
    rng = np.random.default_rng(seed)
    interior = ball.interior_vertices()
    mask = ball.interior_mask()
    out = []
    while len(out) < count:
        x = int(rng.choice(interior))
        nbrs = ball.adj[x]
        nbrs = nbrs[(nbrs >= 0)]
        nbrs = nbrs[mask[nbrs]]
        if nbrs.size == 0:
            continue
        y = int(rng.choice(nbrs))
        out.append((x, y))
    return out


def almost_commute_defect(space, phi: np.ndarray, lam: GPath,
                          sample_count: int, seed: int, mode: str = "hyperbolic"):
    """Projection-then-map vs map-then-projection defect along a geodesic.

    ``space`` is a CayleyBall for hyperbolic mode or an ElectricSpace for
    electric mode; ``phi`` is a partial vertex map (-1 undefined).  Samples
    with undefined images are skipped and counted.
    """
    if mode == "electric":
        es, ball = space, space.ball
    else:
        es, ball = None, space
    a, b = lam.vertices[0], lam.vertices[-1]
    pa, pb = int(phi[a]), int(phi[b])
    if pa < 0 or pb < 0:
        raise ValueError("geodesic endpoint image undefined")
    if mode == "electric":
        target1 = es.electro_ambient(es.electric_geodesic(a, b))
        target2 = es.electro_ambient(es.electric_geodesic(pa, pb))
        t1 = project_e_table(es, target1)
        t2 = project_e_table(es, target2)
    else:
        target1 = ball.geodesic(a, b)
        target2 = ball.geodesic(pa, pb)
        t1 = project_h_table(ball, target1)
        t2 = project_h_table(ball, target2)

    rng = np.random.default_rng(seed)
    interior = ball.interior_vertices()
    worst = 0
    used = skipped = 0
    while used + skipped < sample_count:
        y = int(rng.choice(interior))
        fy = int(phi[y])
        q = int(t1.map[y])
        fq = int(phi[q])
        if fy < 0 or fq < 0 or not ball.interior_mask()[fy]:
            skipped += 1
            continue
        r = int(t2.map[fy])
        if mode == "electric":
            d = int(es.electric_dist(r, fq))
        else:
            d = ball.dist(r, fq)
        worst = max(worst, d)
        used += 1
    return worst, used, skipped


def agreement_defect(es: ElectricSpace, lam: GPath, mu_q: GPath,
                     sample_count: int, seed: int):
    """Max graph distance between hyperbolic and electric projections."""
    if (lam.vertices[0] != mu_q.vertices[0]
            or lam.vertices[-1] != mu_q.vertices[-1]):
        raise ValueError("paths must share endpoints")
    ball = es.ball
    th = project_h_table(ball, lam)
    te = project_e_table(es, mu_q)
    idx, mat = target_distance_lookup(ball, lam, mu_q)
    rng = np.random.default_rng(seed)
    interior = ball.interior_vertices()
    worst = 0
    for _ in range(sample_count):
        y = int(rng.choice(interior))
        worst = max(worst, int(mat[idx[int(th.map[y])], idx[int(te.map[y])]]))
    return worst
