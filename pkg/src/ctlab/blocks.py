"""Thick and thin blocks and their assembly into a model manifold.

A block is a stack of horizontal sheets (copies of the Cayley ball) with
weight-1 vertical edges:

  thick:  2 hyperbolic sheets, verticals x -> glue(x);
  thin:   4 sheets with the middle two electrocuted along the block's
          curve, plain verticals between levels 0-1 and 2-3, and twist
          verticals (x,1) -> (tw(x),2).

Consecutive blocks share a sheet (top of one = bottom of the next; both
are hyperbolic).  Three edge weightings coexist on one edge structure:

  model:      the default; sigma-edges on electric sheets weigh 0,
  hyperbolic: every edge weighs 1,
  electric:   model weights with twist edges also zeroed, collapsing
              every Margulis-tube lift (a coset on the middle sheets
              plus its twist edges) to a point.

Under the model weighting each tube lift has diameter exactly 1.
Distances are computed by a frontier 0-1 BFS over per-sheet arrays; no
global sparse matrix is materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ball import CayleyBall
from .electric import CurveClass, ElectricSpace
from .twist import TwistMap, ball_map
from .words import inv

MODES = ("model", "hyperbolic", "electric")

GLUE_MENU = {
    "id": None,
    "tw_a": ("a", 1), "tw_a_inv": ("a", -1),
    "tw_c": ("c", 1), "tw_c_inv": ("c", -1),
}

# distortion cap for the thick-block glue menu, checked at assembly
GLUE_DISTORTION_CAP = 4


@dataclass(frozen=True)
class ThinBlockSpec:
    curve: str
    n: int

    def __post_init__(self):
        CurveClass(self.curve)
        if self.n == 0:
            raise ValueError("twist coefficient must be nonzero (use a thick block)")

    kind = "thin"


@dataclass(frozen=True)
class ThickBlockSpec:
    glue: str = "id"

    def __post_init__(self):
        if self.glue not in GLUE_MENU:
            raise ValueError(f"glue {self.glue!r} not in menu {sorted(GLUE_MENU)}")

    kind = "thick"


@dataclass
class Sheet:
    layer: int
    block: int
    level: int
    mode: str            # "hyp" | "el"
    curve: str | None


@dataclass
class Interface:
    lower: int
    upper: int
    kind: str            # "plain" | "twist" | "glue"
    block: int
    fwd: np.ndarray      # vertex on lower sheet -> vertex on upper, -1 absent
    bwd: np.ndarray


@dataclass
class HeightTable:
    g: list
    h: list


@dataclass
class Tube:
    block: int
    coset_lower: int     # coset id on the level-1 sheet
    coset_upper: int     # coset id of the twist image on the level-2 sheet, -1 unknown
    lower_layer: int
    upper_layer: int


class ModelManifold:
    def __init__(self, ball: CayleyBall, specs):
        if not specs:
            raise ValueError("empty block stack")
        self.ball = ball
        self.blocks = list(specs)
        self.n = ball.n_vertices
        self._electric = {}
        self._assemble()

    # ----------------------------------------------------------- assembly

    def electric_space(self, curve: str) -> ElectricSpace:
        if curve not in self._electric:
            self._electric[curve] = ElectricSpace(self.ball, CurveClass(curve))
        return self._electric[curve]

    def _twist_images(self, curve: str, n: int) -> np.ndarray:
        return ball_map(TwistMap(CurveClass(curve), n), self.ball)

    def _assemble(self):
        self.sheets = [Sheet(layer=0, block=0, level=0, mode="hyp", curve=None)]
        self.interfaces = []
        self._block_base = []
        identity = np.arange(self.n, dtype=np.int32)
        for bi, spec in enumerate(self.blocks):
            base = len(self.sheets) - 1
            self._block_base.append(base)
            if spec.kind == "thick":
                glue = GLUE_MENU[spec.glue]
                if glue is None:
                    fwd = identity
                    bwd = identity
                else:
                    fwd = self._twist_images(glue[0], glue[1])
                    bwd = _invert_partial(fwd, self.n)
                self.sheets.append(Sheet(len(self.sheets), bi, 1, "hyp", None))
                self.interfaces.append(Interface(base, base + 1, "glue", bi, fwd, bwd))
            else:
                es = self.electric_space(spec.curve)
                fwd = self._twist_images(spec.curve, spec.n)
                if (fwd >= 0).sum() == 0:
                    raise ValueError(f"twist domain empty for block {bi}")
                bwd = _invert_partial(fwd, self.n)
                self.sheets.append(Sheet(len(self.sheets), bi, 1, "el", spec.curve))
                self.sheets.append(Sheet(len(self.sheets), bi, 2, "el", spec.curve))
                self.sheets.append(Sheet(len(self.sheets), bi, 3, "hyp", None))
                self.interfaces.append(Interface(base, base + 1, "plain", bi, identity, identity))
                self.interfaces.append(Interface(base + 1, base + 2, "twist", bi, fwd, bwd))
                self.interfaces.append(Interface(base + 2, base + 3, "plain", bi, identity, identity))
                _ = es  # built eagerly; shared by every block on this curve
        self.n_layers = len(self.sheets)
        self._iface_by_lower = {}
        self._iface_by_upper = {}
        for itf in self.interfaces:
            self._iface_by_lower.setdefault(itf.lower, []).append(itf)
            self._iface_by_upper.setdefault(itf.upper, []).append(itf)
        self.basepoint = self.gid(0, 0)
        self._check_glue_distortion()

    def _check_glue_distortion(self):
        """Thick glue maps must distort ball edges by at most the menu cap.

        An edge (u, u*g) maps to (tw(u), tw(u)*tw(g)), so the image pair is
        at group distance |tw(g)|; the max over generators bounds the
        edgewise distortion exactly.
        """
        for bi, spec in enumerate(self.blocks):
            if spec.kind != "thick" or GLUE_MENU[spec.glue] is None:
                continue
            curve, n = GLUE_MENU[spec.glue]
            tw = TwistMap(CurveClass(curve), n)
            worst = max(len(tw.apply((g,))) for g in range(8))
            if worst > GLUE_DISTORTION_CAP:
                raise AssertionError(
                    f"glue distortion {worst} exceeds cap {GLUE_DISTORTION_CAP}")

    # -------------------------------------------------------- global index

    def gid(self, layer: int, v: int) -> int:
        return layer * self.n + v

    def split(self, gids):
        gids = np.asarray(gids)
        return gids // self.n, gids % self.n

    def block_layer(self, block: int, level: int) -> int:
        return self._block_base[block] + level

    def bottom_layer(self, block: int) -> int:
        return self._block_base[block]

    def top_layer(self, block: int) -> int:
        spec = self.blocks[block]
        return self._block_base[block] + (1 if spec.kind == "thick" else 3)

    def tubes(self, block: int):
        """Margulis-tube lifts of one thin block."""
        spec = self.blocks[block]
        if spec.kind != "thin":
            raise ValueError("tubes exist only in thin blocks")
        es = self.electric_space(spec.curve)
        twist_itf = next(i for i in self.interfaces
                         if i.block == block and i.kind == "twist")
        out = []
        for q in es.lifts():
            members = q.members
            imgs = twist_itf.fwd[members]
            good = imgs[imgs >= 0]
            upper = int(es.coset_id[good[0]]) if good.size else -1
            out.append(Tube(block=block, coset_lower=q.coset_id, coset_upper=upper,
                            lower_layer=twist_itf.lower, upper_layer=twist_itf.upper))
        return out

    # ---------------------------------------------------------- weights

    def _sigma_letters(self, layer: int):
        sh = self.sheets[layer]
        if sh.mode != "el":
            return None
        s = CurveClass(sh.curve).letter
        return (s, inv(s))

    def _horizontal_unit_gens(self, layer: int, mode: str):
        """Generator indices whose horizontal edges weigh 1 on this layer."""
        if mode == "hyperbolic":
            return list(range(8))
        sig = self._sigma_letters(layer)
        if sig is None:
            return list(range(8))
        return [g for g in range(8) if g not in sig]

    def _twist_weight(self, mode: str) -> int:
        return 0 if mode == "electric" else 1

    # ------------------------------------------------------------ distance

    def dist_field(self, sources, mode: str = "model", cap=None) -> np.ndarray:
        """0-1 BFS over the stack; returns a flat (n_layers*n,) int32 field."""
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        dist = np.full(self.n_layers * self.n, -1, dtype=np.int32)
        frontier = np.unique(np.asarray(sources, dtype=np.int64))
        dist[frontier] = 0
        d = 0
        while frontier.size:
            frontier = self._zero_close(frontier, dist, d, mode)
            if cap is not None and d >= cap:
                break
            frontier = self._unit_step(frontier, dist, d + 1, mode)
            d += 1
        return dist

    def _spread_components(self, verts_by_layer, dist, d):
        """Spread distance d across sigma-chain components on electric sheets."""
        new = []
        for layer, vs in verts_by_layer.items():
            sh = self.sheets[layer]
            if sh.mode != "el" or vs.size == 0:
                continue
            es = self.electric_space(sh.curve)
            comps = np.unique(es.comp_id[vs])
            starts = es.comp_ptr[comps]
            lens = es.comp_ptr[comps + 1] - starts
            total = int(lens.sum())
            if total == 0:
                continue
            offs = np.repeat(starts, lens) + (np.arange(total)
                                              - np.repeat(np.cumsum(lens) - lens, lens))
            members = es.comp_members[offs]
            g = layer * self.n + members
            fresh = g[dist[g] < 0]
            if fresh.size:
                dist[fresh] = d
                new.append(fresh)
        return new

    def _zero_close(self, frontier, dist, d, mode):
        if mode == "hyperbolic":
            return frontier
        acc = [frontier]
        work = frontier
        while work.size:
            layers, verts = self.split(work)
            by_layer = {int(l): verts[layers == l] for l in np.unique(layers)}
            new = self._spread_components(by_layer, dist, d)
            if mode == "electric":
                for itf in self.interfaces:
                    if itf.kind != "twist":
                        continue
                    lo = by_layer.get(itf.lower)
                    if lo is not None and lo.size:
                        img = itf.fwd[lo]
                        img = img[img >= 0]
                        g = itf.upper * self.n + img
                        fresh = g[dist[g] < 0]
                        if fresh.size:
                            dist[fresh] = d
                            new.append(fresh)
                    hi = by_layer.get(itf.upper)
                    if hi is not None and hi.size:
                        img = itf.bwd[hi]
                        img = img[img >= 0]
                        g = itf.lower * self.n + img
                        fresh = g[dist[g] < 0]
                        if fresh.size:
                            dist[fresh] = d
                            new.append(fresh)
            if not new:
                break
            work = np.concatenate(new)
            acc.append(work)
        return np.unique(np.concatenate(acc))

    def _unit_step(self, frontier, dist, d, mode):
        layers, verts = self.split(frontier)
        adj = self.ball.adj
        new = []
        for layer in np.unique(layers):
            vs = verts[layers == layer]
            gens = self._horizontal_unit_gens(int(layer), mode)
            nb = adj[vs][:, gens].reshape(-1)
            nb = nb[nb >= 0]
            g = int(layer) * self.n + nb
            fresh = g[dist[g] < 0]
            if fresh.size:
                dist[fresh] = d
                new.append(np.unique(fresh))
            for itf in self._iface_by_lower.get(int(layer), []):
                if itf.kind == "twist" and self._twist_weight(mode) == 0:
                    continue
                img = itf.fwd[vs]
                img = img[img >= 0]
                gg = itf.upper * self.n + img
                fresh = gg[dist[gg] < 0]
                if fresh.size:
                    dist[fresh] = d
                    new.append(fresh)
            for itf in self._iface_by_upper.get(int(layer), []):
                if itf.kind == "twist" and self._twist_weight(mode) == 0:
                    continue
                img = itf.bwd[vs]
                img = img[img >= 0]
                gg = itf.lower * self.n + img
                fresh = gg[dist[gg] < 0]
                if fresh.size:
                    dist[fresh] = d
                    new.append(fresh)
        if not new:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate(new))

    def model_dist(self, x: int, y: int, mode: str = "model") -> int:
        return int(self.dist_field([x], mode)[y])

    # ---------------------------------------------------------- neighbors

    def neighbors(self, g: int, mode: str = "model"):
        """(neighbor gid, weight, kind) triples of one global vertex."""
        layer = int(g // self.n)
        v = int(g % self.n)
        out = []
        sig = self._sigma_letters(layer) if mode != "hyperbolic" else None
        for gen in range(8):
            w = self.ball.adj[v, gen]
            if w < 0:
                continue
            weight = 0 if (sig is not None and gen in sig) else 1
            out.append((layer * self.n + int(w), weight, "horizontal"))
        for itf in self._iface_by_lower.get(layer, []):
            img = int(itf.fwd[v])
            if img >= 0:
                w = self._twist_weight(mode) if itf.kind == "twist" else 1
                out.append((itf.upper * self.n + img, w, itf.kind))
        for itf in self._iface_by_upper.get(layer, []):
            img = int(itf.bwd[v])
            if img >= 0:
                w = self._twist_weight(mode) if itf.kind == "twist" else 1
                out.append((itf.lower * self.n + img, w, itf.kind))
        return out

    def model_path(self, x: int, y: int, mode: str = "model"):
        """A distance-realizing path of global vertices, deterministic.

        Walks back from y choosing unit steps to smaller distance (min gid)
        and, when only zero steps remain, hops within the zero cluster to
        its least exit vertex.
        """
        fld = self.dist_field([x], mode)
        if fld[y] < 0:
            raise ValueError("not connected")
        path = [int(y)]
        cur = int(y)
        guard = 0
        while cur != x:
            guard += 1
            if guard > 10 * (fld[y] + 2) * (self.n_layers + 2) + 100:
                raise AssertionError("path reconstruction stuck")
            t = int(fld[cur])
            step = None
            for nb, w, _ in self.neighbors(cur, mode):
                if w == 1 and fld[nb] == t - 1:
                    if step is None or nb < step:
                        step = nb
            if step is not None:
                path.append(int(step))
                cur = int(step)
                continue
            # move within the zero cluster toward its exit (or to x itself)
            cluster = self._zero_cluster(cur, mode)
            target = None
            if x in cluster:
                target = x
            else:
                for m in sorted(cluster):
                    for nb, w, _ in self.neighbors(m, mode):
                        if w == 1 and fld[nb] == t - 1:
                            target = m
                            break
                    if target is not None:
                        break
            if target is None:
                raise AssertionError("zero cluster has no exit")
            seg = self._cluster_path(cur, target, mode)
            path.extend(seg[1:])
            cur = target
        return list(reversed(path))

    def _zero_cluster(self, g: int, mode: str):
        seen = {int(g)}
        stack = [int(g)]
        while stack:
            cur = stack.pop()
            for nb, w, _ in self.neighbors(cur, mode):
                if w == 0 and nb not in seen:
                    seen.add(int(nb))
                    stack.append(int(nb))
        return seen

    def _cluster_path(self, a: int, b: int, mode: str):
        """BFS path from a to b through weight-0 edges (clusters are small)."""
        prev = {int(a): None}
        queue = [int(a)]
        while queue:
            cur = queue.pop(0)
            if cur == b:
                break
            for nb, w, _ in self.neighbors(cur, mode):
                if w == 0 and nb not in prev:
                    prev[int(nb)] = cur
                    queue.append(int(nb))
        if b not in prev:
            raise AssertionError("cluster path missing")
        out = [int(b)]
        while prev[out[-1]] is not None:
            out.append(prev[out[-1]])
        return list(reversed(out))

    def path_length(self, gids, mode: str = "model"):
        total = 0
        for a, b in zip(gids, gids[1:]):
            for nb, w, _ in self.neighbors(a, mode):
                if nb == b:
                    total += w
                    break
            else:
                raise ValueError(f"not an edge: {a}->{b}")
        return total

    # ------------------------------------------------------------- edges

    def iter_edge_arrays(self):
        """All undirected edges as (src gids, dst gids, kind) array batches."""
        for layer in range(self.n_layers):
            for gen in range(4):
                col = self.ball.adj[:, gen]
                us = np.where(col >= 0)[0]
                yield (layer * self.n + us, layer * self.n + col[us],
                       f"horizontal_L{layer}")
        for itf in self.interfaces:
            us = np.where(itf.fwd >= 0)[0]
            yield (itf.lower * self.n + us, itf.upper * self.n + itf.fwd[us],
                   f"{itf.kind}_B{itf.block}")


def _invert_partial(fwd: np.ndarray, n: int) -> np.ndarray:
    bwd = np.full(n, -1, dtype=np.int32)
    ok = np.where(fwd >= 0)[0]
    bwd[fwd[ok]] = ok
    return bwd


def assemble(ball: CayleyBall, specs) -> ModelManifold:
    return ModelManifold(ball, specs)


def height_table(model: ModelManifold, ladder_paths) -> HeightTable:
    """g(i) = max over trusted lower-path vertices of the least hyperbolic
    model distance to the next block's lower path; h = partial sums.

    ``ladder_paths`` maps layer -> list of global vertex ids (the ladder's
    per-sheet paths); only block bottom layers are consulted.
    """
    gs = []
    trusted = model.ball.interior_mask()
    for bi in range(len(model.blocks)):
        lo = model.bottom_layer(bi)
        hi = model.top_layer(bi)
        if lo not in ladder_paths or hi not in ladder_paths:
            break
        lam_lo = np.asarray(ladder_paths[lo])
        lam_hi = np.asarray(ladder_paths[hi])
        fld = model.dist_field(lam_hi, mode="hyperbolic")
        _, verts = model.split(lam_lo)
        keep = trusted[verts]
        vals = fld[lam_lo[keep]] if keep.any() else fld[lam_lo]
        gs.append(int(vals.max()))
    hs = list(np.cumsum(gs))
    return HeightTable(g=gs, h=hs)
