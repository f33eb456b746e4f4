"""Cayley ball of the genus-2 surface group with disk coordinates.

Vertices are group elements enumerated by breadth-first search from the
identity; a vertex is identified by the image of the disk center under
its Fuchsian matrix.  Points are bucketed on a 1e-9 grid and any near
collision is confirmed hyperbolically: distinct elements displace the
center by at least the systole (~3.057), so at desk radii (R <= 7) the
gap between distinct orbit points exceeds the 3x3 bucket neighborhood
while rounding noise stays below 1e-12.

Vertex ids are assigned in (parent id, generator) order level by level,
which makes id order coincide with shortlex order on canonical words.
All tie-breaking in searches is "least vertex id" = "shortlex least".
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import fuchsian, search

HARD_RADIUS_CAP = 7  # coordinate resolution is proven only to this depth
DEFAULT_TOLERANCE = 1e-9
DEFAULT_VERTEX_CAP = 2_000_000

_HYP_CONFIRM = 0.5  # same-point confirmation threshold, hyperbolic units
_KEY_OFF = 1 << 31


class BallSizeError(Exception):
    """Requested ball exceeds the configured resource cap."""


class CacheError(Exception):
    """Cache file missing, corrupted, or keyed differently."""


@dataclass
class GPath:
    """Path in the ball graph; weights are per-edge and default to 1."""
    vertices: list
    weights: list = None

    def __post_init__(self):
        self.vertices = [int(v) for v in self.vertices]
        if self.weights is None:
            self.weights = [1] * max(0, len(self.vertices) - 1)

    @property
    def length(self):
        return sum(self.weights)

    def __len__(self):
        return len(self.vertices)


@dataclass
class HyperbolicityReport:
    delta: int
    sample_count: int
    radius_used: int


@dataclass
class QuasiReport:
    ok: bool
    worst_ratio: float
    worst_subpath: tuple  # (i, j) indices into the path
    k_measured: float


def _pack_keys(z: np.ndarray, tol: float) -> np.ndarray:
    kx = np.round(z.real / tol).astype(np.int64)
    ky = np.round(z.imag / tol).astype(np.int64)
    return ((kx + _KEY_OFF) << 32) | (ky + _KEY_OFF)


def _shifted_keys(z: np.ndarray, tol: float, dx: int, dy: int) -> np.ndarray:
    kx = np.round(z.real / tol).astype(np.int64) + dx
    ky = np.round(z.imag / tol).astype(np.int64) + dy
    return ((kx + _KEY_OFF) << 32) | (ky + _KEY_OFF)


class CayleyBall:
    def __init__(self, radius, margin, tolerance, points, level, parent,
                 parent_gen, adj, matrices):
        self.radius = int(radius)
        self.margin = int(margin)
        self.tolerance = float(tolerance)
        self.points = points
        self.level = level
        self.parent = parent
        self.parent_gen = parent_gen
        self.adj = adj
        self.matrices = matrices
        self.basepoint = 0
        self._dist_cache = {}
        self._words_cache = None
        self._keys_sorted = None
        self._vids_sorted = None

    # ------------------------------------------------------------------ build

    @classmethod
    def build(cls, radius: int, margin: int = 2, tolerance: float = DEFAULT_TOLERANCE,
              vertex_cap: int = DEFAULT_VERTEX_CAP) -> "CayleyBall":
        if radius < 1:
            raise ValueError("radius must be >= 1")
        if not (0 <= margin < radius):
            raise ValueError("need 0 <= margin < radius")
        if radius > HARD_RADIUS_CAP:
            raise BallSizeError(
                f"radius {radius} exceeds the hard cap {HARD_RADIUS_CAP} "
                "(float64 vertex identification is not certified deeper)")

        gens = fuchsian.GENERATOR_MATRICES
        points = [np.array([0j])]
        matrices = [np.eye(2, dtype=complex)[None]]
        levels = [np.zeros(1, dtype=np.int16)]
        parents = [np.full(1, -1, dtype=np.int64)]
        parent_gens = [np.full(1, -1, dtype=np.int8)]
        adj_chunks = [np.full((1, 8), -1, dtype=np.int64)]

        keys_sorted = _pack_keys(points[0], tolerance)
        vids_sorted = np.zeros(1, dtype=np.int64)
        n_total = 1
        level_lo, level_hi = 0, 1

        def lookup(z):
            hits = np.full(z.shape[0], -1, dtype=np.int64)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    key = _shifted_keys(z, tolerance, dx, dy)
                    pos = np.searchsorted(keys_sorted, key)
                    pos_c = np.minimum(pos, len(keys_sorted) - 1)
                    ok = (keys_sorted[pos_c] == key) & (hits < 0)
                    if ok.any():
                        hits[ok] = vids_sorted[pos_c[ok]]
            return hits

        all_points = points[0]
        for depth in range(radius):
            span = level_hi - level_lo
            Ms = np.concatenate(matrices, axis=0)[level_lo:level_hi]
            cand_M = np.einsum("sij,gjk->sgik", Ms, gens)
            cand_M = cand_M.reshape(span * 8, 2, 2)
            cand_M = fuchsian.normalize_det(cand_M)
            cand_z = cand_M[:, 0, 1] / cand_M[:, 1, 1]
            src = np.repeat(np.arange(level_lo, level_hi, dtype=np.int64), 8)
            gen = np.tile(np.arange(8, dtype=np.int64), span)

            hits = lookup(cand_z)
            found = hits >= 0
            if found.any():
                bad = fuchsian.hyperbolic_distance(
                    cand_z[found], all_points[hits[found]]) > _HYP_CONFIRM
                if bad.any():
                    raise AssertionError("vertex identification resolution exceeded")

            adj_all = np.concatenate(adj_chunks, axis=0)
            adj_chunks = [adj_all]
            adj_all[src[found], gen[found]] = hits[found]
            adj_all[hits[found], (gen[found] + 4) % 8] = src[found]

            miss = ~found
            if depth + 1 <= radius and miss.any():
                mz = cand_z[miss]
                mM = cand_M[miss]
                msrc = src[miss]
                mgen = gen[miss]
                keys = _pack_keys(mz, tolerance)
                uniq, first_idx = np.unique(keys, return_index=True)
                order = np.argsort(first_idx, kind="stable")
                rep_idx = first_idx[order]  # representative candidate per key, in shortlex order

                # merge representatives whose points straddle a bucket boundary
                rep_z = mz[rep_idx]
                rep_keys = keys[rep_idx]
                root = np.arange(rep_idx.size, dtype=np.int64)

                def _find(i):
                    while root[i] != i:
                        root[i] = root[root[i]]
                        i = root[i]
                    return i

                srt = np.argsort(rep_keys)
                rk_sorted = rep_keys[srt]
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        if dx == 0 and dy == 0:
                            continue
                        key2 = _shifted_keys(rep_z, tolerance, dx, dy)
                        pos = np.searchsorted(rk_sorted, key2)
                        pos_c = np.minimum(pos, rk_sorted.size - 1)
                        hit = rk_sorted[pos_c] == key2
                        if not hit.any():
                            continue
                        i_idx = np.where(hit)[0]
                        j_idx = srt[pos_c[hit]]
                        near = fuchsian.hyperbolic_distance(
                            rep_z[i_idx], rep_z[j_idx]) < _HYP_CONFIRM
                        for i, j in zip(i_idx[near], j_idx[near]):
                            ri, rj = _find(int(i)), _find(int(j))
                            if ri != rj:
                                root[max(ri, rj)] = min(ri, rj)
                for i in range(root.size):
                    _find(i)
                roots = np.array([_find(i) for i in range(root.size)], dtype=np.int64)
                keep = np.where(roots == np.arange(root.size))[0]

                n_new = keep.size
                if n_total + n_new > vertex_cap:
                    raise BallSizeError(
                        f"vertex cap {vertex_cap} exceeded at radius {depth + 1}")
                new_ids = np.arange(n_total, n_total + n_new, dtype=np.int64)
                sel = rep_idx[keep]
                points.append(mz[sel])
                matrices.append(mM[sel])
                levels.append(np.full(n_new, depth + 1, dtype=np.int16))
                parents.append(msrc[sel])
                parent_gens.append(mgen[sel].astype(np.int8))
                adj_chunks.append(np.full((n_new, 8), -1, dtype=np.int64))
                all_points = np.concatenate([all_points, mz[sel]])

                new_keys = _pack_keys(mz[sel], tolerance)
                keys_sorted = np.concatenate([keys_sorted, new_keys])
                vids_sorted = np.concatenate([vids_sorted, new_ids])
                srt2 = np.argsort(keys_sorted)
                keys_sorted = keys_sorted[srt2]
                vids_sorted = vids_sorted[srt2]

                # resolve all missed candidates against the enlarged store
                hits2 = lookup(mz)
                if (hits2 < 0).any():
                    raise AssertionError("candidate failed to resolve after insertion")
                adj_all = np.concatenate(adj_chunks, axis=0)
                adj_chunks = [adj_all]
                adj_all[msrc, mgen] = hits2
                adj_all[hits2, (mgen + 4) % 8] = msrc

                n_total += n_new
                level_lo, level_hi = level_hi, n_total
            else:
                level_lo, level_hi = level_hi, level_hi

        ball = cls(
            radius=radius, margin=margin, tolerance=tolerance,
            points=all_points,
            level=np.concatenate(levels),
            parent=np.concatenate(parents),
            parent_gen=np.concatenate(parent_gens),
            adj=np.ascontiguousarray(np.concatenate(adj_chunks, axis=0).astype(np.int32)),
            matrices=np.concatenate(matrices, axis=0),
        )
        ball._keys_sorted = keys_sorted
        ball._vids_sorted = vids_sorted
        return ball

    # ------------------------------------------------------------- basic data

    @property
    def n_vertices(self):
        return self.points.shape[0]

    def word(self, v: int) -> tuple:
        out = []
        while v != 0:
            out.append(int(self.parent_gen[v]))
            v = int(self.parent[v])
        return tuple(reversed(out))

    def words(self):
        """Canonical words for all vertices (cached list of tuples)."""
        if self._words_cache is None:
            gens = self.parent_gen
            parents = self.parent
            out = [()] * self.n_vertices
            for v in range(1, self.n_vertices):
                out[v] = out[parents[v]] + (int(gens[v]),)
            self._words_cache = out
        return self._words_cache

    def interior_mask(self) -> np.ndarray:
        return np.asarray(self.level) <= self.radius - self.margin

    def interior_vertices(self) -> np.ndarray:
        return np.where(self.interior_mask())[0]

    def lookup_point(self, z: complex) -> int:
        """Vertex id of an orbit point, or -1 if it is not in the ball."""
        if self._keys_sorted is None:
            self._keys_sorted = _pack_keys(self.points, self.tolerance)
            order = np.argsort(self._keys_sorted)
            self._keys_sorted = self._keys_sorted[order]
            self._vids_sorted = np.arange(self.n_vertices, dtype=np.int64)[order]
        arr = np.array([z])
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                key = _shifted_keys(arr, self.tolerance, dx, dy)
                pos = int(np.searchsorted(self._keys_sorted, key[0]))
                if pos < self._keys_sorted.size and self._keys_sorted[pos] == key[0]:
                    vid = int(self._vids_sorted[pos])
                    if fuchsian.hyperbolic_distance(z, self.points[vid]) < _HYP_CONFIRM:
                        return vid
        return -1

    def lookup_points(self, zs: np.ndarray) -> np.ndarray:
        """Vectorized orbit-point lookup; -1 where the point is not in the ball.

        Probes may lie far outside the ball (twist images, coset power
        scans): their coordinates pile up near the disk boundary where
        buckets collide, so every bucket hit is confirmed hyperbolically
        and unconfirmed hits count as misses.  A false confirm would need
        the probe within 0.5 of a vertex against a systole of 3; boundary
        noise only pushes the measured distance up, never down to that.
        Non-finite inputs (overflowed far-outside images) are absent too.
        """
        if self._keys_sorted is None:
            self.lookup_point(0j)  # builds the sorted key store
        if getattr(self, "_max_radius_euc", None) is None:
            self._max_radius_euc = float(np.abs(self.points).max())
        zs = np.asarray(zs)
        hits = np.full(zs.shape[0], -1, dtype=np.int64)
        with np.errstate(all="ignore"):
            plausible = (np.isfinite(zs.real) & np.isfinite(zs.imag)
                         & (np.abs(zs) <= self._max_radius_euc + 1e-7))
        idx = np.where(plausible)[0]
        if idx.size == 0:
            return hits
        sub = zs[idx]
        sub_hits = np.full(idx.size, -1, dtype=np.int64)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                key = _shifted_keys(sub, self.tolerance, dx, dy)
                pos = np.searchsorted(self._keys_sorted, key)
                pos_c = np.minimum(pos, self._keys_sorted.size - 1)
                ok = (self._keys_sorted[pos_c] == key) & (sub_hits < 0)
                if ok.any():
                    cand = self._vids_sorted[pos_c[ok]]
                    with np.errstate(all="ignore"):
                        near = fuchsian.hyperbolic_distance(
                            sub[ok], self.points[cand]) < _HYP_CONFIRM
                    where = np.where(ok)[0]
                    sub_hits[where[near]] = cand[near]
        hits[idx] = sub_hits
        return hits

    def vertex_of_word(self, w) -> int:
        """Vertex for a letter sequence (any representative), -1 if outside."""
        return self.lookup_point(complex(fuchsian.mobius(fuchsian.matrix_of_word(w), 0j)))

    # -------------------------------------------------------------- distances

    def dist_field(self, u: int) -> np.ndarray:
        u = int(u)
        if u not in self._dist_cache:
            if len(self._dist_cache) > 48:
                self._dist_cache.clear()
            self._dist_cache[u] = search.bfs_field(self.adj, [u])
        return self._dist_cache[u]

    def dist(self, u: int, v: int) -> int:
        return int(self.dist_field(u)[v])

    def geodesic(self, u: int, v: int) -> GPath:
        verts = search.greedy_geodesic(self.adj, int(u), int(v),
                                       self.dist_field(u), self.dist_field(v))
        return GPath(verts)

    def gromov_product(self, x: int, y: int, w: int) -> Fraction:
        dw = self.dist_field(w)
        return Fraction(int(dw[x]) + int(dw[y]) - self.dist(x, y), 2)

    def is_geodesic(self, path: GPath) -> bool:
        return self.dist(path.vertices[0], path.vertices[-1]) == path.length

    def check_path(self, path: GPath):
        for x, y in zip(path.vertices, path.vertices[1:]):
            if y not in self.adj[x]:
                raise ValueError(f"vertices {x},{y} not adjacent")

    # ------------------------------------------------------------ estimators

    def estimate_delta(self, sample_count: int, seed: int) -> HyperbolicityReport:
        """Max thinness defect over seeded random interior triangles."""
        rng = np.random.default_rng(seed)
        interior = self.interior_vertices()
        worst = 0
        for _ in range(sample_count):
            x, y, z = (int(t) for t in rng.choice(interior, 3))
            worst = max(worst, self.triangle_defect(x, y, z))
        return HyperbolicityReport(delta=worst, sample_count=sample_count,
                                   radius_used=self.radius)

    def triangle_defect(self, x: int, y: int, z: int) -> int:
        sides = [self.geodesic(x, y).vertices,
                 self.geodesic(y, z).vertices,
                 self.geodesic(z, x).vertices]
        worst = 0
        for i in range(3):
            others = np.array(sides[(i + 1) % 3] + sides[(i + 2) % 3])
            fld = search.bfs_field(self.adj, others)
            worst = max(worst, int(fld[np.array(sides[i])].max()))
        return worst

    def is_quasigeodesic(self, path: GPath, K: float, eps: float) -> QuasiReport:
        """All-subpath check of the quasi-isometric embedding inequality."""
        verts = path.vertices
        n = len(verts)
        if n <= 1:
            return QuasiReport(True, 0.0, (0, 0), 0.0)
        dmat = search.pairwise_distances(self.adj, verts)
        cum = np.concatenate([[0], np.cumsum(path.weights)])
        ok = True
        worst_ratio = 0.0
        worst = (0, 0)
        k_measured = 1.0
        for i in range(n):
            for j in range(i + 1, n):
                ell = float(cum[j] - cum[i])
                d = float(dmat[i, j])
                if d < ell / K - eps or d > K * ell + eps:
                    ok = False
                if d > 0:
                    r = ell / d
                    if r > worst_ratio:
                        worst_ratio, worst = r, (i, j)
                    k_measured = max(k_measured, (ell - eps) / d)
                elif ell > eps:
                    ok = False
                    worst_ratio, worst = float("inf"), (i, j)
                    k_measured = float("inf")
        return QuasiReport(ok, worst_ratio, worst, k_measured)

    # ------------------------------------------------------------------ cache

    MAGIC = b"CGB1"

    def save(self, path):
        words = self.words()
        buf = bytearray()
        buf += self.MAGIC
        buf += struct.pack("<HHdQ", self.radius, self.margin,
                           self.tolerance, self.n_vertices)
        xs, ys = self.points.real, self.points.imag
        for v in range(self.n_vertices):
            w = bytes(words[v])
            buf.append(len(w))
            buf += w
            buf += struct.pack("<dd", xs[v], ys[v])
        edges = []
        for g in range(4):
            col = self.adj[:, g]
            us = np.where(col >= 0)[0]
            edges.append((us, col[us], g))
        n_edges = sum(e[0].size for e in edges)
        buf += struct.pack("<Q", n_edges)
        rec = np.zeros(n_edges, dtype=[("u", "<u4"), ("v", "<u4"), ("g", "u1")])
        off = 0
        for us, vs, g in edges:
            rec["u"][off:off + us.size] = us
            rec["v"][off:off + us.size] = vs
            rec["g"][off:off + us.size] = g
            off += us.size
        buf += rec.tobytes()
        with open(path, "wb") as f:
            f.write(buf)

    @classmethod
    def load(cls, path, radius=None, margin=None, tolerance=None) -> "CayleyBall":
        try:
            with open(path, "rb") as f:
                raw = f.read()
        except OSError as e:
            raise CacheError(str(e)) from None
        if raw[:4] != cls.MAGIC:
            raise CacheError("bad magic")
        try:
            R, m, tol, n = struct.unpack_from("<HHdQ", raw, 4)
            off = 4 + struct.calcsize("<HHdQ")
            if radius is not None and R != radius:
                raise CacheError("cache keyed to a different radius")
            if tolerance is not None and tol != tolerance:
                raise CacheError("cache keyed to a different tolerance")
            if margin is not None and m != margin:
                raise CacheError("cache keyed to a different margin")
            words = []
            pts = np.zeros(n, dtype=complex)
            for v in range(n):
                ln = raw[off]
                off += 1
                words.append(tuple(raw[off:off + ln]))
                off += ln
                x, y = struct.unpack_from("<dd", raw, off)
                off += 16
                pts[v] = complex(x, y)
            (n_edges,) = struct.unpack_from("<Q", raw, off)
            off += 8
            rec = np.frombuffer(raw, dtype=[("u", "<u4"), ("v", "<u4"), ("g", "u1")],
                                count=n_edges, offset=off)
            off += 9 * n_edges
            adj = np.full((n, 8), -1, dtype=np.int32)
            adj[rec["u"], rec["g"]] = rec["v"]
            adj[rec["v"], (rec["g"] + 4) % 8] = rec["u"]
            if off != len(raw):
                raise CacheError("trailing bytes")
        except (struct.error, IndexError, ValueError) as e:
            raise CacheError(f"truncated cache: {e}") from None

        level = np.array([len(w) for w in words], dtype=np.int16)
        widx = {w: i for i, w in enumerate(words)}
        parent = np.full(n, -1, dtype=np.int64)
        parent_gen = np.full(n, -1, dtype=np.int8)
        for v in range(1, n):
            w = words[v]
            parent[v] = widx[w[:-1]]
            parent_gen[v] = w[-1]
        mats = np.zeros((n, 2, 2), dtype=complex)
        mats[0] = np.eye(2)
        gens = fuchsian.GENERATOR_MATRICES
        for L in range(1, int(level.max(initial=0)) + 1):
            idx = np.where(level == L)[0]
            if idx.size:
                mats[idx] = np.einsum("nij,njk->nik",
                                      mats[parent[idx]], gens[parent_gen[idx]])
        mats = fuchsian.normalize_det(mats)
        ball = cls(R, m, tol, pts, level, parent, parent_gen, adj, mats)
        ball._words_cache = words
        return ball


def build_or_load(radius, margin=2, tolerance=DEFAULT_TOLERANCE,
                  cache_dir=None, vertex_cap=DEFAULT_VERTEX_CAP) -> CayleyBall:
    """Load the ball from cache when valid, else build and cache it."""
    if cache_dir is None:
        return CayleyBall.build(radius, margin, tolerance, vertex_cap)
    import os
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"ball_R{radius}_m{margin}_t{tolerance:g}.cgb")
    if os.path.exists(path):
        try:
            return CayleyBall.load(path, radius=radius, margin=margin, tolerance=tolerance)
        except CacheError:
            pass  # corrupted or mismatched: rebuild below
    b = CayleyBall.build(radius, margin, tolerance, vertex_cap)
    b.save(path)
    return b
