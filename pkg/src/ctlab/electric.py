"""Electric (coned-off) geometry on a Cayley ball.

Electrocuting a simple closed curve sigma collapses every coset g<sigma>
to electric diameter zero: sigma-labeled edges get weight 0, every other
edge keeps weight 1.  Only the generators a and c are supported as
curves (they are the ones with closed-form twist rules).

Cosets partition the vertex set.  The only edges joining two members of
one coset are sigma-edges, so the weight-0 subgraph decomposes into
sigma-chains; collapsing these chains yields a quotient graph whose
unit-weight distance equals the electric distance.  On the trusted
interior each chain is a whole coset; near the ball boundary a coset
may fall apart into several chains, which the quotient keeps separate
(honest truncation, never a shortcut).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from . import search
from .ball import CayleyBall, GPath
from .words import inv

CURVE_LETTERS = {"a": 0, "c": 2}


@dataclass(frozen=True)
class CurveClass:
    sigma: str

    def __post_init__(self):
        if self.sigma not in CURVE_LETTERS:
            raise ValueError(f"unsupported curve {self.sigma!r}; must be one of 'a', 'c'")

    @property
    def letter(self) -> int:
        return CURVE_LETTERS[self.sigma]


@dataclass
class QCSet:
    coset_id: int          # least member vertex id; doubles as the set id
    rep_word: tuple        # canonical word of that vertex
    members: np.ndarray    # vertex ids, ascending
    exponents: np.ndarray  # member = rep * sigma^exponent


@dataclass
class EPath:
    vertices: list
    weights: list          # per-edge, in {0, 1}
    visit_log: list        # ordered (coset_id, entry_vertex, exit_vertex)

    @property
    def electric_length(self):
        return sum(self.weights)

    def __len__(self):
        return len(self.vertices)


@dataclass
class CoboundednessReport:
    D: int
    worst_pair: tuple      # (coset_id, coset_id)
    sets_used: int


@dataclass
class PenetrationRow:
    set_id: int
    entry_discrepancy: int  # -1 when not met by both
    exit_discrepancy: int
    solo_length: int        # -1 when met by both


@dataclass
class PenetrationReport:
    rows: list
    max_discrepancy: int
    max_solo: int


class ElectricSpace:
    """A Cayley ball with one curve's cosets electrocuted."""

    def __init__(self, ball: CayleyBall, curve: CurveClass):
        self.ball = ball
        self.curve = curve
        self._comp_dist_cache = {}
        self._build_components()
        self._canonicalize_cosets()
        self._build_quotient()
        self._qcsets = None

    # ---------------------------------------------------------- construction

    def _build_components(self):
        n = self.ball.n_vertices
        s = self.curve.letter
        succ = self.ball.adj[:, s]
        pred = self.ball.adj[:, inv(s)]
        comp = np.full(n, -1, dtype=np.int64)
        pos = np.zeros(n, dtype=np.int32)
        starts = np.where(pred < 0)[0]
        cid = 0
        comp_start = []
        comp_end = []
        for v0 in starts:
            comp_start.append(int(v0))
            v = int(v0)
            k = 0
            last = v
            while v >= 0 and comp[v] < 0:
                comp[v] = cid
                pos[v] = k
                last = v
                v = int(succ[v])
                k += 1
            comp_end.append(last)
            cid += 1
        if (comp < 0).any():
            raise AssertionError("sigma-chain decomposition missed a vertex")
        self.comp_id = comp
        self.comp_pos = pos
        self.comp_start = np.array(comp_start, dtype=np.int64)
        self.comp_end = np.array(comp_end, dtype=np.int64)
        self.n_comps = cid
        order = np.argsort(comp, kind="stable")
        self.comp_members = order
        self.comp_ptr = np.searchsorted(comp[order], np.arange(cid + 1))

    # A coset's in-ball part can split into several sigma-chains only near
    # the boundary: the word length along the axis is a quasiconvex
    # function of the exponent, so a gap between two in-ball stretches
    # stays within 2*delta of the radius and is at most ~4*delta wide.
    # Probing MERGE_REACH steps past each chain end therefore finds every
    # sibling chain; beyond that the length can never come back down.
    # Short probes also keep the float products well conditioned (the
    # cancellation error e^1.53(|end|+j)/1e16 stays below the bucket size).
    MERGE_REACH = 13

    def _canonicalize_cosets(self):
        """Tie sigma-chains of one coset together and rebase exponents.

        Membership and exponents come from the exact chain walk; floating
        point only decides the identity of short probe points just past
        the chain ends, each confirmed hyperbolically.
        """
        from . import fuchsian
        ball = self.ball
        sig = fuchsian.GENERATOR_MATRICES[self.curve.letter]
        sig_inv = fuchsian.GENERATOR_MATRICES[inv(self.curve.letter)]

        root = np.arange(self.n_comps, dtype=np.int64)
        # shift[c]: exponent of c's chain start relative to the root's start
        shift = np.zeros(self.n_comps, dtype=np.int64)

        def find(c):
            trail = []
            while root[c] != c:
                trail.append(c)
                c = root[c]
            acc = 0
            for t in reversed(trail):
                acc += shift[t]
                root[t] = c
                shift[t] = acc
            return c

        def union(c1, off, c2):
            # chain start of c2 equals (start of c1) * sigma^off
            r1, r2 = find(c1), find(c2)
            if r1 == r2:
                return
            base = shift[c1] + off - shift[c2]
            if r1 < r2:
                root[r2] = r1
                shift[r2] = base
            else:
                root[r1] = r2
                shift[r1] = -base

        for direction, anchors in ((1, self.comp_end), (-1, self.comp_start)):
            Ms = ball.matrices[anchors]
            step = sig if direction == 1 else sig_inv
            P = np.eye(2, dtype=complex)
            for j in range(1, self.MERGE_REACH + 1):
                P = P @ step
                E = np.einsum("nij,jk->nik", Ms, P)
                with np.errstate(all="ignore"):
                    z = E[:, 0, 1] / E[:, 1, 1]
                hits = ball.lookup_points(z)
                for c in np.where(hits >= 0)[0]:
                    t = int(hits[c])
                    c2 = int(self.comp_id[t])
                    # anchor * sigma^(direction*j) = t
                    off = (int(self.comp_pos[anchors[c]]) + direction * j
                           - int(self.comp_pos[t]))
                    union(int(c), off, c2)

        roots = np.array([find(int(c)) for c in range(self.n_comps)],
                         dtype=np.int64)
        shifts = shift.copy()

        # absolute exponent of every vertex relative to its root chain start
        abs_exp = (shifts[self.comp_id] + self.comp_pos).astype(np.int64)
        # canonical member: least vertex id within the merged class; member
        # lists are ascending per component, so the first entry is its min
        comp_min = self.comp_members[self.comp_ptr[:-1]]
        class_min = np.full(self.n_comps, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(class_min, roots, comp_min)
        canon_of_comp = class_min[roots]
        coset_id = canon_of_comp[self.comp_id]
        exponent = (abs_exp - abs_exp[coset_id]).astype(np.int32)
        self.coset_id = coset_id
        self.exponent = exponent

    def _build_quotient(self):
        ball = self.ball
        s = self.curve.letter
        non_sigma = [g for g in range(8) if g not in (s, inv(s))]
        srcs, dsts = [], []
        for g in non_sigma:
            col = ball.adj[:, g]
            ok = col >= 0
            srcs.append(self.comp_id[np.where(ok)[0]])
            dsts.append(self.comp_id[col[ok]])
        src = np.concatenate(srcs)
        dst = np.concatenate(dsts)
        key = src * self.n_comps + dst
        uniq = np.unique(key)
        us = (uniq // self.n_comps).astype(np.int64)
        vs = (uniq % self.n_comps).astype(np.int64)
        data = np.ones(us.size, dtype=np.int8)
        self.quotient = csr_matrix((data, (us, vs)),
                                   shape=(self.n_comps, self.n_comps))

    # ------------------------------------------------------------- distances

    def comp_dist_field(self, comp: int) -> np.ndarray:
        comp = int(comp)
        if comp not in self._comp_dist_cache:
            if len(self._comp_dist_cache) > 64:
                self._comp_dist_cache.clear()
            d = dijkstra(self.quotient, indices=comp, unweighted=True)
            fld = np.where(np.isinf(d), -1, d).astype(np.int32)
            self._comp_dist_cache[comp] = fld
        return self._comp_dist_cache[comp]

    def electric_dist(self, u: int, v: int) -> int:
        return int(self.comp_dist_field(self.comp_id[u])[self.comp_id[v]])

    def electric_dist_field(self, u: int) -> np.ndarray:
        """d_e(u, x) for every ball vertex x."""
        return self.comp_dist_field(self.comp_id[u])[self.comp_id]

    def electric_set_dist_field(self, comps) -> np.ndarray:
        """Min electric distance to a set of components, over all components."""
        d = dijkstra(self.quotient, indices=np.unique(comps), unweighted=True,
                     min_only=True)
        return np.where(np.isinf(d), -1, d).astype(np.int32)

    def edge_weight_is_zero(self, g: int) -> bool:
        return g in (self.curve.letter, inv(self.curve.letter))

    # ---------------------------------------------------------- geodesics

    def electric_geodesic(self, u: int, v: int) -> EPath:
        """Canonical electric geodesic: minimal electric length, then minimal
        hyperbolic length, then shortlex greedy descent.

        Minimality forbids re-entering a coset (leaving costs a unit edge),
        so the result never backtracks, and minimal hyperbolic length keeps
        each within-coset stretch a monotone sigma-run.
        """
        u, v = int(u), int(v)
        ball = self.ball
        adj = ball.adj
        s = self.curve.letter
        w_of_gen = np.ones(8, dtype=np.int32)
        w_of_gen[s] = 0
        w_of_gen[inv(s)] = 0

        deu = self.electric_dist_field(u)
        dev = self.electric_dist_field(v)
        D = int(deu[v])
        if D < 0:
            raise ValueError("vertices not electrically connected in the ball")

        def tight_neighbors(x, de_from, de_to, total):
            nbrs = adj[x]
            gens = np.arange(8)
            ok = nbrs >= 0
            nb = nbrs[ok]
            ws = w_of_gen[gens[ok]]
            mask = de_from[x] + ws + de_to[nb] == total
            return nb[mask], ws[mask]

        # hyperbolic-length BFS from u and to v inside the tight subgraph
        def hyp_field(start, de_from, de_to):
            dist = {start: 0}
            frontier = [start]
            t = 0
            while frontier:
                t += 1
                nxt = []
                for x in frontier:
                    nb, _ = tight_neighbors(x, de_from, de_to, D)
                    for y in nb:
                        y = int(y)
                        if y not in dist:
                            dist[y] = t
                            nxt.append(y)
                frontier = nxt
            return dist

        hu = hyp_field(u, deu, dev)
        hv = hyp_field(v, dev, deu)
        if v not in hu:
            raise AssertionError("tight subgraph disconnected")
        H = hu[v]

        verts = [u]
        weights = []
        x = u
        for t in range(H):
            nb, ws = tight_neighbors(x, deu, dev, D)
            best = None
            for y, w in zip(nb, ws):
                y = int(y)
                if hu.get(y) == t + 1 and hv.get(y) == H - t - 1:
                    if best is None or y < best[0]:
                        best = (y, int(w))
            if best is None:
                raise AssertionError("greedy descent stuck")
            verts.append(best[0])
            weights.append(best[1])
            x = best[0]
        return EPath(verts, weights, self._visit_log(verts))

    def _visit_log(self, verts):
        log = []
        for x in verts:
            cid = int(self.coset_id[x])
            if log and log[-1][0] == cid:
                log[-1] = (cid, log[-1][1], int(x))
            else:
                log.append((cid, int(x), int(x)))
        return log

    def check_no_backtracking(self, ep: EPath) -> bool:
        ids = [row[0] for row in ep.visit_log]
        return len(ids) == len(set(ids))

    def _runs(self, verts):
        """Maximal consecutive same-coset runs as (cid, i, j) index ranges."""
        runs = []
        i = 0
        n = len(verts)
        while i < n:
            cid = int(self.coset_id[verts[i]])
            j = i
            while j + 1 < n and self.coset_id[verts[j + 1]] == cid:
                j += 1
            runs.append((cid, i, j))
            i = j + 1
        return runs

    def electro_ambient(self, ep: EPath) -> GPath:
        """Replace each within-coset run by the graph geodesic between its
        entry and exit points; keep the unit-weight crossing edges.

        Consecutive runs are joined by the crossing edge of the input, so
        concatenating the interpolating segments yields a connected path.
        """
        self._check_visit_log(ep)
        verts = ep.vertices
        out = []
        for _, i, j in self._runs(verts):
            if j > i:
                out.extend(self.ball.geodesic(verts[i], verts[j]).vertices)
            else:
                out.append(verts[i])
        return GPath(out)

    def _check_visit_log(self, ep: EPath):
        rebuilt = self._visit_log(ep.vertices)
        if rebuilt != ep.visit_log:
            raise ValueError("malformed visit-log")

    # ------------------------------------------------------------- QCSets

    def qcsets(self):
        if self._qcsets is None:
            order = np.argsort(self.coset_id, kind="stable")
            cids = self.coset_id[order]
            bounds = np.flatnonzero(np.diff(cids)) + 1
            groups = np.split(order, bounds)
            words = self.ball.words()
            out = {}
            for grp in groups:
                cid = int(self.coset_id[grp[0]])
                members = np.sort(grp)
                out[cid] = QCSet(coset_id=cid, rep_word=words[cid],
                                 members=members,
                                 exponents=self.exponent[members])
            self._qcsets = out
        return self._qcsets

    def lifts(self):
        """All cosets meeting the ball, ordered by set id."""
        return [self.qcsets()[cid] for cid in sorted(self.qcsets())]

    # ----------------------------------------------------------- diagnostics

    def projection_onto_set(self, cid: int):
        """Nearest-member projection onto one coset for every ball vertex.

        Returns (dist, proj) where proj is the least nearest member id.
        """
        members = self.qcsets()[cid].members
        return search.bfs_labeled(self.ball.adj, members, members)

    def coboundedness(self, max_rep_level: int | None = None) -> CoboundednessReport:
        """D = max over ordered pairs of distinct sets (with trusted-interior
        members) of the diameter of the projection of one set onto the other.

        Projection-image diameter is the exponent spread along the target
        coset: members r*s^k1, r*s^k2 are at group distance |k1-k2|.
        """
        if max_rep_level is None:
            max_rep_level = self.ball.radius - self.ball.margin
        level = self.ball.level
        sets = [q for q in self.lifts() if level[q.coset_id] <= max_rep_level]
        if len(sets) < 2:
            raise ValueError("need at least two sets with trusted-interior members")
        exp_of = np.zeros(self.ball.n_vertices, dtype=np.int32)
        for q in self.lifts():
            exp_of[q.members] = q.exponents
        D = -1
        worst = (None, None)
        for qi in sets:
            _, proj = search.bfs_labeled(self.ball.adj, qi.members, qi.members)
            for qj in sets:
                if qj.coset_id == qi.coset_id:
                    continue
                image = proj[qj.members]
                exps = exp_of[image]
                diam = int(exps.max() - exps.min())
                if diam > D:
                    D = diam
                    worst = (qi.coset_id, qj.coset_id)
        return CoboundednessReport(D=D, worst_pair=worst, sets_used=len(sets))

    def _crossings(self, verts):
        """Ordered coset crossings of a vertex path: (cid, first, last)."""
        log = []
        seen = {}
        for x in verts:
            cid = int(self.coset_id[x])
            if cid in seen:
                seen[cid] = (seen[cid][0], int(x))
            else:
                seen[cid] = (int(x), int(x))
            if not log or log[-1] != cid:
                log.append(cid)
        return {cid: seen[cid] for cid in seen}

    def penetration_compare(self, beta: EPath, gamma: GPath) -> PenetrationReport:
        if (beta.vertices[0] != gamma.vertices[0]
                or beta.vertices[-1] != gamma.vertices[-1]):
            raise ValueError("paths must share endpoints")
        cb = self._crossings(beta.vertices)
        cg = self._crossings(gamma.vertices)
        rows = []
        max_disc, max_solo = 0, 0
        for cid in sorted(set(cb) | set(cg)):
            if cid in cb and cid in cg:
                eb, xb = cb[cid]
                eg, xg = cg[cid]
                d_in = self.ball.dist(eb, eg)
                d_out = self.ball.dist(xb, xg)
                rows.append(PenetrationRow(cid, d_in, d_out, -1))
                max_disc = max(max_disc, d_in, d_out)
            else:
                entry, exit_ = (cb if cid in cb else cg)[cid]
                solo = abs(int(self.exponent[entry]) - int(self.exponent[exit_]))
                rows.append(PenetrationRow(cid, -1, -1, solo))
                max_solo = max(max_solo, solo)
        return PenetrationReport(rows, max_disc, max_solo)

    def loop_hyperbolic_length(self, loop: EPath) -> int:
        """Hyperbolic length of a short electric loop after substituting
        interpolating geodesics for its within-coset runs.

        The loop must be closed, must not return to a coset it has left
        (the first and last runs may wrap around through one coset), and
        each within-coset run must be a monotone sigma-run.
        """
        verts = loop.vertices
        if verts[0] != verts[-1]:
            raise ValueError("loop is not closed")
        runs = self._runs(verts)
        ids = [r[0] for r in runs]
        inner = ids[1:] if len(ids) > 1 and ids[0] == ids[-1] else ids
        if len(inner) != len(set(inner)):
            raise ValueError("loop backtracks through a coset")
        for _, i, j in runs:
            exps = self.exponent[np.array(verts[i:j + 1])]
            steps = np.diff(exps)
            if steps.size and not ((steps == 1).all() or (steps == -1).all()):
                raise ValueError("within-coset run is not a sigma-geodesic")
        total = 0
        for _, i, j in runs:
            if j > i:
                total += self.ball.dist(verts[i], verts[j])
        total += len(runs) - 1  # crossing edges between consecutive runs
        return total

    # ------------------------------------------------------------ estimators

    def estimate_delta(self, sample_count: int, seed: int):
        """Thinness of electric triangles, measured in the electric metric."""
        from .ball import HyperbolicityReport
        rng = np.random.default_rng(seed)
        interior = self.ball.interior_vertices()
        worst = 0
        for _ in range(sample_count):
            x, y, z = (int(t) for t in rng.choice(interior, 3))
            sides = [self.electric_geodesic(x, y).vertices,
                     self.electric_geodesic(y, z).vertices,
                     self.electric_geodesic(z, x).vertices]
            for i in range(3):
                others = sides[(i + 1) % 3] + sides[(i + 2) % 3]
                fld = self.electric_set_dist_field(self.comp_id[np.array(others)])
                defect = int(fld[self.comp_id[np.array(sides[i])]].max())
                worst = max(worst, defect)
        return HyperbolicityReport(delta=worst, sample_count=sample_count,
                                   radius_used=self.ball.radius)

    def tracking_constant(self, pairs) -> int:
        """Max electric distance from electric-geodesic vertices to the
        graph geodesic with the same endpoints."""
        worst = 0
        for u, v in pairs:
            ep = self.electric_geodesic(u, v)
            g = self.ball.geodesic(u, v)
            fld = self.electric_set_dist_field(self.comp_id[np.array(g.vertices)])
            worst = max(worst, int(fld[self.comp_id[np.array(ep.vertices)]].max()))
        return worst

    def reverse_tracking_constant(self, pairs) -> int:
        """Max graph distance from graph-geodesic vertices to the union of
        the electro-ambient path and its visited cosets."""
        worst = 0
        for u, v in pairs:
            ep = self.electric_geodesic(u, v)
            ea = self.electro_ambient(ep)
            srcs = set(ea.vertices)
            for cid, _, _ in ep.visit_log:
                srcs.update(int(m) for m in self.qcsets()[cid].members)
            fld = search.bfs_field(self.ball.adj, np.array(sorted(srcs)))
            g = self.ball.geodesic(u, v)
            worst = max(worst, int(fld[np.array(g.vertices)].max()))
        return worst
