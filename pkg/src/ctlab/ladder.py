"""Ladders over a base geodesic, their retractions, and admissible paths.

A ladder carries one path per sheet: on thin blocks the four levels hold
the base hyperbolic geodesic, the electro-ambient representative of the
electric geodesic with the same endpoints, the electro-ambient electric
geodesic joining the twisted endpoints, and the hyperbolic geodesic
joining the twisted endpoints; thick blocks hold two hyperbolic
geodesics.  Gluing is endpoint-induced: the top path of each block is
the bottom path of the next.

The retraction projects every sheet onto its ladder path in the sheet's
own metric (nearest-point for hyperbolic sheets, ordered-pair electric
projection for electric sheets).  Its quality is measured, never
assumed: the sweep constant is the max over model edges of the model
distance between projected endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import project, search
from .ball import GPath
from .blocks import ModelManifold
from .electric import EPath


class LadderError(Exception):
    pass


@dataclass
class LadderPath:
    layer: int
    mode: str                 # "hyp" | "el"
    gpath: GPath              # realized vertex path (electro-ambient on el sheets)
    epath: EPath | None = None

    @property
    def vertices(self):
        return self.gpath.vertices


@dataclass
class Ladder:
    model: ModelManifold
    base: GPath
    paths: dict               # layer -> LadderPath
    block_endpoints: list     # per block, (a, b) on its bottom sheet
    truncated_at: int | None  # first block index that could not be built
    k_bounds: dict            # thin block index -> measured K(B)

    def layers(self):
        return sorted(self.paths)

    def path_gids(self, layer: int) -> np.ndarray:
        lp = self.paths[layer]
        return layer * self.model.n + np.asarray(lp.vertices, dtype=np.int64)

    def all_gids(self) -> np.ndarray:
        return np.unique(np.concatenate([self.path_gids(l) for l in self.layers()]))

    def ladder_paths_by_layer(self):
        return {l: list(self.path_gids(l)) for l in self.layers()}


def build_ladder(model: ModelManifold, lam0: GPath) -> Ladder:
    ball = model.ball
    a, b = int(lam0.vertices[0]), int(lam0.vertices[-1])
    if not (ball.interior_mask()[a] and ball.interior_mask()[b]):
        raise LadderError("base geodesic endpoints must be trusted interior")
    paths = {model.bottom_layer(0): LadderPath(model.bottom_layer(0), "hyp", lam0)}
    endpoints = []
    k_bounds = {}
    truncated = None
    cur = lam0
    for bi, spec in enumerate(model.blocks):
        base = model.bottom_layer(bi)
        endpoints.append((a, b))
        if spec.kind == "thick":
            itf = next(i for i in model.interfaces if i.block == bi)
            fa, fb = int(itf.fwd[a]), int(itf.fwd[b])
            if fa < 0 or fb < 0:
                truncated = bi
                break
            top = ball.geodesic(fa, fb)
            paths[base + 1] = LadderPath(base + 1, "hyp", top)
            a, b, cur = fa, fb, top
        else:
            es = model.electric_space(spec.curve)
            ep1 = es.electric_geodesic(a, b)
            ea1 = es.electro_ambient(ep1)
            paths[base + 1] = LadderPath(base + 1, "el", ea1, ep1)
            twist_itf = next(i for i in model.interfaces
                             if i.block == bi and i.kind == "twist")
            fa, fb = int(twist_itf.fwd[a]), int(twist_itf.fwd[b])
            if fa < 0 or fb < 0:
                truncated = bi
                break
            ep2 = es.electric_geodesic(fa, fb)
            ea2 = es.electro_ambient(ep2)
            paths[base + 2] = LadderPath(base + 2, "el", ea2, ep2)
            lam3 = ball.geodesic(fa, fb)
            paths[base + 3] = LadderPath(base + 3, "hyp", lam3)
            k_bounds[bi] = _measure_kb(model, twist_itf, ea1, ea2)
            a, b, cur = fa, fb, lam3
    return Ladder(model=model, base=lam0, paths=paths,
                  block_endpoints=endpoints, truncated_at=truncated,
                  k_bounds=k_bounds)


def _measure_kb(model, twist_itf, ea1: GPath, ea2: GPath) -> int:
    """Measured hyperbolic reach from twisted level-1 ladder vertices to the
    level-2 ladder path (the K(B) bound of short connecting segments)."""
    fld = search.bfs_field(model.ball.adj, np.asarray(ea2.vertices))
    imgs = twist_itf.fwd[np.asarray(ea1.vertices)]
    imgs = imgs[imgs >= 0]
    if imgs.size == 0:
        return 0
    return int(fld[imgs].max())


@dataclass
class Retraction:
    ladder: Ladder
    tables: dict              # layer -> (n,) projected ball-vertex array
    wobble: int               # max displacement of ladder vertices (expect 0)
    constant: int | None = None

    def retract_gid(self, g: int):
        model = self.ladder.model
        layer = int(g // model.n)
        if layer not in self.tables:
            return None
        v = int(g % model.n)
        return layer * model.n + int(self.tables[layer][v])


def build_retraction(ladder: Ladder) -> Retraction:
    model = ladder.model
    tables = {}
    wobble = 0
    for layer in ladder.layers():
        lp = ladder.paths[layer]
        if lp.mode == "hyp":
            tables[layer] = project.project_h_table(model.ball, lp.gpath).map
        else:
            es = model.electric_space(model.sheets[layer].curve)
            tables[layer] = project.project_e_table(es, lp.gpath).map
        onpath = np.asarray(lp.vertices)
        moved = tables[layer][onpath] != onpath
        if moved.any():
            worst = max(model.ball.dist(int(x), int(tables[layer][x]))
                        for x in onpath[moved])
            wobble = max(wobble, worst)
    return Retraction(ladder=ladder, tables=tables, wobble=wobble)


def retraction_constant(retr: Retraction, mode: str = "model",
                        trusted_only: bool = True):
    """Exhaustive edge sweep: C = max over model edges of the model distance
    between the projected endpoints; reported per edge kind and overall.

    By default the sweep covers edges whose endpoints are both in the
    trusted interior of the ball, per the margin policy (fringe values
    reflect truncation, not geometry).  Distances are batched per unique
    projected source vertex, one stack BFS each.
    """
    ladder = retr.ladder
    model = ladder.model
    raw = {}
    covered = list(retr.tables)
    trusted = model.ball.interior_mask()
    for us, vs, kind in model.iter_edge_arrays():
        lu = us // model.n
        lv = vs // model.n
        ok = np.isin(lu, covered) & np.isin(lv, covered)
        if trusted_only:
            ok &= trusted[us % model.n] & trusted[vs % model.n]
        us, vs = us[ok], vs[ok]
        if us.size == 0:
            raw.setdefault(kind, [])
            continue
        pu = _batch_retract(retr, us)
        pv = _batch_retract(retr, vs)
        key = np.stack([np.minimum(pu, pv), np.maximum(pu, pv)], axis=1)
        raw.setdefault(kind, []).append(key)
    pair_sets = {}
    for kind, chunks in raw.items():
        if not chunks:
            pair_sets[kind] = np.zeros((0, 2), dtype=np.int64)
            continue
        uniq = np.unique(np.concatenate(chunks, axis=0), axis=0)
        pair_sets[kind] = uniq[uniq[:, 0] != uniq[:, 1]]
    all_pairs = (np.concatenate(list(pair_sets.values()), axis=0)
                 if pair_sets else np.zeros((0, 2), dtype=np.int64))
    if all_pairs.size == 0:
        return 0, {k: 0 for k in pair_sets}
    sources = np.unique(all_pairs[:, 0])
    dist_of = {}
    for s in sources:
        fld = model.dist_field([int(s)], mode=mode)
        dist_of[int(s)] = fld
    per_kind = {}
    overall = 0
    for kind, pairs in pair_sets.items():
        worst = 0
        for s, t in pairs:
            worst = max(worst, int(dist_of[int(s)][int(t)]))
        per_kind[kind] = worst
        overall = max(overall, worst)
    retr.constant = overall
    return overall, per_kind


def sample_retraction_constant(retr: Retraction, count: int, seed: int,
                               mode: str = "model") -> int:
    """Sampled edge sweep (cheap C estimate for bridging budgets)."""
    model = retr.ladder.model
    rng = np.random.default_rng(seed)
    batches = list(model.iter_edge_arrays())
    trusted = model.ball.interior_mask()
    covered = list(retr.tables)
    pairs = set()
    for us, vs, _ in batches:
        ok = (np.isin(us // model.n, covered) & np.isin(vs // model.n, covered)
              & trusted[us % model.n] & trusted[vs % model.n])
        us, vs = us[ok], vs[ok]
        if us.size == 0:
            continue
        take = min(us.size, max(1, count // len(batches)))
        idx = rng.choice(us.size, size=take, replace=False)
        pu = _batch_retract(retr, us[idx])
        pv = _batch_retract(retr, vs[idx])
        for a, b in zip(pu, pv):
            if a != b:
                pairs.add((min(int(a), int(b)), max(int(a), int(b))))
    worst = 0
    by_source = {}
    for a, b in pairs:
        by_source.setdefault(a, []).append(b)
    for a, bs in by_source.items():
        fld = model.dist_field([a], mode=mode)
        worst = max(worst, max(int(fld[b]) for b in bs))
    return worst


def _batch_retract(retr: Retraction, gids: np.ndarray) -> np.ndarray:
    model = retr.ladder.model
    layers = gids // model.n
    verts = gids % model.n
    out = np.empty(gids.size, dtype=np.int64)
    for layer in np.unique(layers):
        m = layers == layer
        out[m] = int(layer) * model.n + retr.tables[int(layer)][verts[m]]
    return out


# ---------------------------------------------------------------- admissible

@dataclass
class Segment:
    kind: str     # ladder | vertical | twist | near | short | tube
    start: int    # path index of first vertex
    end: int      # path index of last vertex
    layer: int = -1


@dataclass
class AdmissiblePath:
    gids: list
    segments: list
    electric_length: int
    hyperbolic_length: int


class AdmissibilityError(Exception):
    pass


class AdmissibilityChecker:
    """Greedy decomposition of a model path into elementary admissible types.

    Elementary types, per block kind:
      ladder    subsegment of a sheet's ladder path,
      vertical  one plain or glue interface edge,
      twist     one twist edge based on the level-1 ladder path,
      near      horizontal geodesic within the measured C-neighborhood
                of the sheet's ladder path,
      short     horizontal segment on an electric sheet with electric
                length <= C and hyperbolic length <= K(B), one endpoint
                on the sheet's ladder path,
      tube      segment inside one Margulis-tube lift with endpoints on
                the middle-sheet ladder paths.
    """

    def __init__(self, ladder: Ladder, retr: Retraction, C: int | None = None):
        self.ladder = ladder
        self.model = ladder.model
        if C is None:
            if retr.constant is None:
                retraction_constant(retr)
            C = max(1, retr.constant)
        self.C = int(C)
        self._pos = {}
        self._near_fields = {}
        for layer in ladder.layers():
            verts = ladder.paths[layer].vertices
            self._pos[layer] = {int(v): i for i, v in enumerate(verts)}

    def _near_field(self, layer):
        if layer not in self._near_fields:
            verts = np.asarray(self.ladder.paths[layer].vertices)
            self._near_fields[layer] = search.bfs_field(self.model.ball.adj, verts)
        return self._near_fields[layer]

    def _on_ladder(self, layer, v):
        return layer in self._pos and int(v) in self._pos[layer]

    def _edge_kind(self, g1, g2):
        for nb, w, kind in self.model.neighbors(g1, mode="model"):
            if nb == g2:
                return kind, w
        return None, None

    def _tube_of(self, g):
        model = self.model
        layer = int(g // model.n)
        v = int(g % model.n)
        sh = model.sheets[layer]
        if sh.mode != "el":
            return None
        es = model.electric_space(sh.curve)
        bi = sh.block
        cid = int(es.coset_id[v])
        if sh.level == 1:
            return (bi, cid)
        twist_itf = next(i for i in model.interfaces
                         if i.block == bi and i.kind == "twist")
        src = twist_itf.bwd[v]
        if src >= 0:
            return (bi, int(es.coset_id[src]))
        return (bi, -cid - 2)  # upper-coset tube with no surviving twist edge

    def decompose(self, gids):
        model = self.model
        n = len(gids)
        if n == 0:
            raise AdmissibilityError("empty path")
        segs = []
        i = 0
        while i < n - 1:
            layer = int(gids[i] // model.n)
            v = int(gids[i] % model.n)
            # 1. ladder run
            if self._on_ladder(layer, v):
                j = i
                while j + 1 < n:
                    l2 = int(gids[j + 1] // model.n)
                    v2 = int(gids[j + 1] % model.n)
                    if l2 != layer or not self._on_ladder(layer, v2):
                        break
                    if abs(self._pos[layer][v2] - self._pos[layer][int(gids[j] % model.n)]) != 1:
                        break
                    j += 1
                if j > i:
                    segs.append(Segment("ladder", i, j, layer))
                    i = j
                    continue
            # 2. interface edge
            kind, w = self._edge_kind(int(gids[i]), int(gids[i + 1]))
            if kind in ("plain", "glue"):
                segs.append(Segment("vertical", i, i + 1, layer))
                i += 1
                continue
            if kind == "twist":
                lo_g, hi_g = ((gids[i], gids[i + 1])
                              if int(gids[i + 1] // model.n) == layer + 1
                              else (gids[i + 1], gids[i]))
                lo_layer = int(lo_g // model.n)
                if self._on_ladder(lo_layer, int(lo_g % model.n)):
                    segs.append(Segment("twist", i, i + 1, lo_layer))
                    i += 1
                    continue
                tube = self._tube_of(int(gids[i]))
                j = self._extend_tube(gids, i, tube)
                if j is not None and j > i:
                    segs.append(Segment("tube", i, j, layer))
                    i = j
                    continue
                raise AdmissibilityError(f"twist edge off the ladder at index {i}")
            # 3. horizontal run
            if kind and kind.startswith("horizontal"):
                j = i
                while j + 1 < n:
                    k2, _ = self._edge_kind(int(gids[j]), int(gids[j + 1]))
                    if not (k2 and k2.startswith("horizontal")):
                        break
                    j += 1
                seg = self._classify_horizontal(gids, i, j, layer)
                if seg is None:
                    raise AdmissibilityError(
                        f"horizontal run at indices {i}..{j} is not admissible")
                segs.append(seg)
                i = j
                continue
            raise AdmissibilityError(f"vertices at {i},{i + 1} are not adjacent")
        return segs

    def _extend_tube(self, gids, i, tube):
        if tube is None:
            return None
        j = i
        while j + 1 < len(gids) and self._tube_of(int(gids[j + 1])) == tube:
            j += 1
        # endpoints must sit on the middle-sheet ladder paths
        for k in (i, j):
            layer = int(gids[k] // self.model.n)
            if not self._on_ladder(layer, int(gids[k] % self.model.n)):
                return None
        return j

    def _classify_horizontal(self, gids, i, j, layer):
        model = self.model
        verts = [int(g % model.n) for g in gids[i:j + 1]]
        sh = model.sheets[layer]
        hyp_len = j - i
        near = self._near_field(layer)
        within = all(int(near[v]) <= self.C for v in verts)
        is_geo = model.ball.dist(verts[0], verts[-1]) == hyp_len
        if within and is_geo:
            return Segment("near", i, j, layer)
        if sh.mode == "el":
            es = model.electric_space(sh.curve)
            el_len = sum(0 if es.comp_id[x] == es.comp_id[y] else 1
                         for x, y in zip(verts, verts[1:]))
            kb = self.ladder.k_bounds.get(sh.block, 0)
            touches = (self._on_ladder(layer, verts[0])
                       or self._on_ladder(layer, verts[-1]))
            if el_len <= self.C and hyp_len <= max(kb, self.C) and touches:
                return Segment("short", i, j, layer)
        return None


def validate_admissible(ladder: Ladder, retr: Retraction, gids, C=None):
    """True with the typed decomposition, or False with the first offender."""
    checker = AdmissibilityChecker(ladder, retr, C)
    try:
        segs = checker.decompose(list(gids))
        return True, segs
    except AdmissibilityError as e:
        return False, str(e)
