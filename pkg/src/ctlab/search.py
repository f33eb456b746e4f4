"""Vectorized breadth-first search kernels over flat (n, 8) adjacency.

All searches are level-synchronous numpy loops.  Tie-breaking is by
vertex id everywhere; ball vertex ids coincide with shortlex order of
canonical words, so "min id" is "shortlex least".
"""

from __future__ import annotations

import numpy as np

UNSEEN = -1
_INF64 = np.iinfo(np.int64).max


def bfs_field(adj: np.ndarray, sources, cap: int | None = None) -> np.ndarray:
    """Graph distance from a source set; -1 where unreached (or beyond cap)."""
    n = adj.shape[0]
    dist = np.full(n, UNSEEN, dtype=np.int32)
    frontier = np.asarray(sources, dtype=np.int64).ravel()
    frontier = np.unique(frontier)
    dist[frontier] = 0
    d = 0
    while frontier.size:
        if cap is not None and d >= cap:
            break
        nb = adj[frontier].reshape(-1)
        cand = nb[nb >= 0]
        tgt = cand[dist[cand] < 0]
        if tgt.size == 0:
            break
        d += 1
        dist[tgt] = d
        frontier = np.unique(tgt)
    return dist


def bfs_labeled(adj: np.ndarray, sources, source_labels,
                cap: int | None = None):
    """Distance to the nearest source plus the min label among nearest sources.

    Labels propagate level-synchronously; a vertex's label is the minimum
    label over all sources realizing its distance.  Returns (dist, label)
    with label = -1 where unreached.
    """
    n = adj.shape[0]
    dist = np.full(n, UNSEEN, dtype=np.int32)
    label = np.full(n, _INF64, dtype=np.int64)
    src = np.asarray(sources, dtype=np.int64).ravel()
    lab = np.asarray(source_labels, dtype=np.int64).ravel()
    dist[src] = 0
    np.minimum.at(label, src, lab)
    frontier = np.unique(src)
    d = 0
    while frontier.size:
        if cap is not None and d >= cap:
            break
        nb = adj[frontier].reshape(-1)
        ok = nb >= 0
        cand = nb[ok]
        lab_in = np.repeat(label[frontier], adj.shape[1])[ok]
        fresh = dist[cand] < 0
        tgt = cand[fresh]
        if tgt.size == 0:
            break
        d += 1
        dist[tgt] = d
        np.minimum.at(label, tgt, lab_in[fresh])
        frontier = np.unique(tgt)
    out_label = np.where(dist >= 0, label, -1)
    return dist, out_label


def distance_columns(adj: np.ndarray, sources) -> np.ndarray:
    """Stacked BFS fields, one row per source; int16 (distances are small)."""
    rows = [bfs_field(adj, [s]).astype(np.int16) for s in sources]
    return np.vstack(rows) if rows else np.zeros((0, adj.shape[0]), dtype=np.int16)


def greedy_geodesic(adj: np.ndarray, u: int, v: int,
                    du: np.ndarray | None = None,
                    dv: np.ndarray | None = None):
    """Shortest path from u to v, deterministic by min-id descent.

    At each step move to the neighbor one step farther from u and one step
    closer to v, choosing the least vertex id among candidates.
    """
    if du is None:
        du = bfs_field(adj, [u])
    if dv is None:
        dv = bfs_field(adj, [v])
    total = int(du[v])
    if total < 0:
        raise ValueError("vertices not connected inside the ball")
    path = [int(u)]
    x = int(u)
    for t in range(total):
        nbrs = adj[x]
        nbrs = nbrs[nbrs >= 0]
        mask = (du[nbrs] == t + 1) & (dv[nbrs] == total - t - 1)
        cands = nbrs[mask]
        x = int(cands.min())
        path.append(x)
    return path


def pairwise_distances(adj: np.ndarray, vertices) -> np.ndarray:
    """Distance matrix among a small vertex list (one BFS per vertex)."""
    verts = list(vertices)
    out = np.zeros((len(verts), len(verts)), dtype=np.int32)
    for i, s in enumerate(verts):
        field = bfs_field(adj, [s])
        out[i] = field[verts]
    return out
