"""Measurement suites: seeded, deterministic, CSV-backed.

Each suite returns a SuiteResult plus artifact files.  Thresholds are
pinned here (overridable per config); stability-style checks compare
the configured radius against the next smaller ball.
"""

from __future__ import annotations

import os
import time

import numpy as np

from . import ct as ct_mod
from . import project, twist as twist_mod
from .ball import CayleyBall, build_or_load
from .blocks import ModelManifold, ThickBlockSpec, ThinBlockSpec, height_table
from .electric import CurveClass, ElectricSpace
from .ladder import (build_ladder, build_retraction, retraction_constant,
                     sample_retraction_constant, validate_admissible)
from .reports import SuiteResult, write_csv
from .words import (RELATOR, inv, inv_word, reduce_word, word_to_str)

THRESHOLDS = {
    "delta_max": 6,            # hyperbolic thinness bound, graph units
    "delta_drift": 1,          # |delta(R) - delta(R-1)|
    "track_drift": 1,          # |K_track(R) - K_track(R-1)|
    "ea_k_max": 4.0,           # electro-ambient quasigeodesic K at eps=8
    "ea_eps": 8.0,
    "ea_spread": 0.25,         # K spread across generating twist exponents
    "c_spread": 0.25,          # retraction constant spread across n
    "electric_delta_max": 6,
    "penetration_max": 8,
    "tracking_max": 12,        # admissible path vs model geodesic
    "lipschitz_drift": 1,
    "commute_defect_max": 6,
    "agreement_drift": 1,
}


def _thr(cfg, key):
    return cfg.thresholds.get(key, THRESHOLDS[key]) if cfg else THRESHOLDS[key]


def _smaller_ball(ball: CayleyBall, cache_dir=None) -> CayleyBall:
    return build_or_load(ball.radius - 1, min(ball.margin, ball.radius - 2),
                         ball.tolerance, cache_dir)


# ----------------------------------------------------------------- ball suite

def random_trivial_word(rng, max_conj=5):
    """A product of up to max_conj conjugated relators (trivial by design)."""
    out = ()
    for _ in range(int(rng.integers(1, max_conj + 1))):
        g = tuple(int(x) for x in rng.integers(0, 8, size=int(rng.integers(0, 4))))
        rot = int(rng.integers(0, 8))
        rel = RELATOR[rot:] + RELATOR[:rot]
        if rng.integers(0, 2):
            rel = inv_word(rel)
        out = out + g + rel + inv_word(g)
    return out


def random_short_nontrivial(rng):
    """Freely reduced word of length <= 6 avoiding half-relator subwords."""
    halves = set()
    for base in (RELATOR, inv_word(RELATOR)):
        dd = base + base
        for s in range(8):
            halves.add(dd[s:s + 4])
    while True:
        n = int(rng.integers(1, 7))
        w = []
        for _ in range(n):
            g = int(rng.integers(0, 8))
            while w and g == inv(w[-1]):
                g = int(rng.integers(0, 8))
            w.append(g)
        w = tuple(w)
        if any(w[i:i + 4] in halves for i in range(len(w) - 3)):
            continue
        return w


def suite_ball(ball: CayleyBall, cfg=None, out_dir=None, cache_dir=None) -> SuiteResult:
    t0 = time.time()
    seed = cfg.seed if cfg else 7
    samples = cfg.samples if cfg else 300
    rng = np.random.default_rng(seed)
    rows = []
    ok = True
    witness = ""

    triv_fail = sum(reduce_word(random_trivial_word(rng)) != ()
                    for _ in range(1000))
    nontriv_fail = sum(reduce_word(random_short_nontrivial(rng)) == ()
                       for _ in range(1000))
    rows.append(("word_trivial_failures", triv_fail))
    rows.append(("word_nontrivial_failures", nontriv_fail))
    if triv_fail or nontriv_fail:
        ok, witness = False, "word problem failures"

    sizes = [int((np.asarray(ball.level) <= k).sum())
             for k in range(ball.radius + 1)]
    for k in range(2, ball.radius):
        ratio = sizes[k + 1] / sizes[k]
        rows.append((f"growth_ratio_{k}", round(ratio, 4)))
        if not (4 < ratio < 8):
            ok, witness = False, f"growth ratio at {k}"

    rep = ball.estimate_delta(samples, seed)
    small = _smaller_ball(ball, cache_dir)
    rep_small = small.estimate_delta(samples, seed)
    rows.append(("delta", rep.delta))
    rows.append(("delta_smaller", rep_small.delta))
    if rep.delta > _thr(cfg, "delta_max"):
        ok, witness = False, f"delta {rep.delta} too large"
    if abs(rep.delta - rep_small.delta) > _thr(cfg, "delta_drift"):
        ok, witness = False, "delta unstable across radius"

    interior = ball.interior_vertices()
    for _ in range(50):
        x, y, z = (int(t) for t in rng.choice(interior, 3))
        dxy, dyx = ball.dist(x, y), ball.dist(y, x)
        if dxy != dyx:
            ok, witness = False, f"asymmetry at {x},{y}"
        if ball.dist(x, z) > dxy + ball.dist(y, z):
            ok, witness = False, f"triangle inequality at {x},{y},{z}"
    g1 = ball.geodesic(int(interior[1]), int(interior[-1])).vertices
    g2 = ball.geodesic(int(interior[1]), int(interior[-1])).vertices
    if g1 != g2:
        ok, witness = False, "geodesic nondeterminism"

    artifacts = []
    if out_dir:
        artifacts.append(write_csv(os.path.join(out_dir, "ball.csv"),
                                   ["check", "value"], rows))
    return SuiteResult("ball", ok, dict(rows), time.time() - t0,
                       artifacts, witness)


# -------------------------------------------------------------- electro suite

def _interior_pairs(ball, rng, count):
    interior = ball.interior_vertices()
    out = []
    while len(out) < count:
        u, v = (int(t) for t in rng.choice(interior, 2))
        if u != v:
            out.append((u, v))
    return out


def suite_electro(ball: CayleyBall, cfg=None, out_dir=None,
                  cache_dir=None) -> SuiteResult:
    t0 = time.time()
    seed = cfg.seed if cfg else 7
    samples = cfg.samples if cfg else 200
    rng = np.random.default_rng(seed)
    es = ElectricSpace(ball, CurveClass("a"))
    ok = True
    witness = ""
    consts = {}

    pairs = _interior_pairs(ball, rng, samples)
    sample_rows = []
    worst_k = 1.0
    pen_rows = []
    pen_max = 0
    for u, v in pairs:
        d = ball.dist(u, v)
        de = es.electric_dist(u, v)
        if de > d:
            ok, witness = False, f"domination fails at {u},{v}"
        ep = es.electric_geodesic(u, v)
        if ep.electric_length != de or not es.check_no_backtracking(ep):
            ok, witness = False, f"electric geodesic invalid at {u},{v}"
        ea = es.electro_ambient(ep)
        k_meas = ball.is_quasigeodesic(ea, _thr(cfg, "ea_k_max"),
                                       _thr(cfg, "ea_eps")).k_measured
        worst_k = max(worst_k, k_meas)
        sample_rows.append((seed, u, v, d, de, round(k_meas, 4),
                            len(ep.visit_log)))
        pen = es.penetration_compare(ep, ball.geodesic(u, v))
        pen_max = max(pen_max, pen.max_discrepancy, pen.max_solo)
        for r in pen.rows[:3]:
            pen_rows.append((r.set_id, r.entry_discrepancy,
                             r.exit_discrepancy, r.solo_length))
    consts["ea_k"] = worst_k
    consts["penetration_max"] = pen_max
    if worst_k > _thr(cfg, "ea_k_max"):
        ok, witness = False, f"electro-ambient K {worst_k}"
    if pen_max > _thr(cfg, "penetration_max"):
        ok, witness = False, f"penetration {pen_max}"

    track_pairs = pairs[:max(20, samples // 2)]
    k_track = es.tracking_constant(track_pairs)
    consts["k_track"] = k_track
    small = _smaller_ball(ball, cache_dir)
    es_small = ElectricSpace(small, CurveClass("a"))
    rng_small = np.random.default_rng(seed)
    k_track_small = es_small.tracking_constant(
        _interior_pairs(small, rng_small, len(track_pairs)))
    consts["k_track_smaller"] = k_track_small
    if abs(k_track - k_track_small) > _thr(cfg, "track_drift"):
        ok, witness = False, "tracking constant unstable"
    consts["k_reverse"] = es.reverse_tracking_constant(track_pairs[:40])

    # twist-exponent independence of the electro-ambient constants
    group_k = {}
    for n in (0, 1, 4, 16):
        if n == 0:
            grp_pairs = pairs[:40]
        else:
            imgs = twist_mod.ball_map(twist_mod.TwistMap(CurveClass("a"), n), ball)
            eligible = np.where(ball.interior_mask() & (imgs >= 0))[0]
            rng_n = np.random.default_rng(seed + n)
            grp_pairs = []
            while len(grp_pairs) < 40:
                u, v = (int(t) for t in rng_n.choice(eligible, 2))
                if u != v:
                    grp_pairs.append((int(imgs[u]), int(imgs[v])))
        worst = 1.0
        for u, v in grp_pairs:
            ea = es.electro_ambient(es.electric_geodesic(u, v))
            worst = max(worst, ball.is_quasigeodesic(
                ea, _thr(cfg, "ea_k_max"), _thr(cfg, "ea_eps")).k_measured)
        group_k[n] = worst
    spread = (max(group_k.values()) - min(group_k.values())) / min(group_k.values())
    consts["ea_k_spread"] = round(spread, 4)
    if spread > _thr(cfg, "ea_spread"):
        ok, witness = False, f"EA constants depend on twist exponent: {group_k}"

    # coboundedness, stable against the smaller ball on shared sets
    shared_level = small.radius - small.margin
    cob = es.coboundedness(max_rep_level=shared_level)
    cob_small = es_small.coboundedness(max_rep_level=shared_level)
    consts["cobounded_D"] = cob.D
    consts["cobounded_D_smaller"] = cob_small.D
    if cob.D != cob_small.D:
        ok, witness = False, "coboundedness not stable on shared sets"

    edelta = es.estimate_delta(max(20, samples // 5), seed)
    consts["electric_delta"] = edelta.delta
    if edelta.delta > _thr(cfg, "electric_delta_max"):
        ok, witness = False, f"electric delta {edelta.delta}"

    artifacts = []
    if out_dir:
        artifacts.append(write_csv(
            os.path.join(out_dir, "electro_samples.csv"),
            ["seed", "u", "v", "d", "d_e", "K_measured", "sets_crossed"],
            sample_rows))
        artifacts.append(write_csv(
            os.path.join(out_dir, "electro_penetration.csv"),
            ["set_id", "entry_discrepancy", "exit_discrepancy", "solo_length"],
            pen_rows))
    return SuiteResult("electro", ok, consts, time.time() - t0,
                       artifacts, witness)


# ---------------------------------------------------------- projections suite

def suite_projections(ball: CayleyBall, cfg=None, out_dir=None,
                      cache_dir=None) -> SuiteResult:
    t0 = time.time()
    seed = cfg.seed if cfg else 7
    samples = cfg.samples if cfg else 200
    rng = np.random.default_rng(seed)
    es = ElectricSpace(ball, CurveClass("a"))
    interior = ball.interior_vertices()
    ok = True
    witness = ""
    consts = {}
    rows = []

    a, b = (int(t) for t in rng.choice(interior, 2))
    lam = ball.geodesic(a, b)
    ep = es.electric_geodesic(a, b)
    mu_q = es.electro_ambient(ep)
    th = project.project_h_table(ball, lam)
    te = project.project_e_table(es, mu_q)

    for v in lam.vertices:
        if int(th.map[v]) != v:
            ok, witness = False, "hyperbolic projection not idempotent"
    for v in mu_q.vertices:
        if int(te.map[v]) != v:
            ok, witness = False, "electric projection not idempotent"

    for i in range(min(40, samples)):
        y = int(rng.choice(interior))
        bh = project.project_h(ball, lam, y)
        be = project.project_e(es, mu_q, y)
        rows.append(("scan_h", i, int(bh == int(th.map[y]))))
        rows.append(("scan_e", i, int(be == int(te.map[y]))))
        if bh != int(th.map[y]) or be != int(te.map[y]):
            ok, witness = False, f"table and scan disagree at {y}"

    edges = project.sample_interior_edges(ball, samples, seed)
    lip = project.lipschitz_constant(ball, th, edges)
    consts["lipschitz"] = lip
    small = _smaller_ball(ball, cache_dir)
    rng_s = np.random.default_rng(seed)
    interior_s = small.interior_vertices()
    a2, b2 = (int(t) for t in rng_s.choice(interior_s, 2))
    lam2 = small.geodesic(a2, b2)
    lip_small = project.lipschitz_constant(
        small, project.project_h_table(small, lam2),
        project.sample_interior_edges(small, samples, seed))
    consts["lipschitz_smaller"] = lip_small
    if abs(lip - lip_small) > _thr(cfg, "lipschitz_drift"):
        ok, witness = False, "lipschitz constant unstable"
    rows.append(("lipschitz", 0, lip))

    imgs = twist_mod.ball_map(twist_mod.TwistMap(CurveClass("a"), 4), ball)
    lam_e = es.electro_ambient(es.electric_geodesic(a, b))
    defect, used, skipped = project.almost_commute_defect(
        es, imgs, lam_e, min(samples, 200), seed, mode="electric")
    consts["commute_defect"] = defect
    consts["commute_used"] = used
    rows.append(("almost_commute", 0, defect))
    if defect > _thr(cfg, "commute_defect_max"):
        ok, witness = False, f"almost-commute defect {defect}"

    agree = project.agreement_defect(es, lam, mu_q, min(samples, 200), seed)
    consts["agreement_defect"] = agree
    rows.append(("agreement", 0, agree))

    artifacts = []
    if out_dir:
        artifacts.append(write_csv(os.path.join(out_dir, "projections.csv"),
                                   ["lemma_id", "sample", "defect"], rows))
    return SuiteResult("projections", ok, consts, time.time() - t0,
                       artifacts, witness)


# --------------------------------------------------------------- twist suite

def suite_twist(ball: CayleyBall, cfg=None, out_dir=None,
                cache_dir=None) -> SuiteResult:
    t0 = time.time()
    seed = cfg.seed if cfg else 7
    samples = cfg.samples if cfg else 200
    rng = np.random.default_rng(seed)
    es = ElectricSpace(ball, CurveClass("a"))
    ok = True
    witness = ""
    consts = {}
    rows = []

    for curve in ("a", "c"):
        for n in range(-8, 9):
            if not twist_mod.TwistMap(CurveClass(curve), n).preserves_relator():
                ok, witness = False, f"relator broken by tw_{curve}^{n}"

    tw4 = twist_mod.TwistMap(CurveClass("a"), 4)
    inv4 = tw4.inverse()
    for _ in range(200):
        w = tuple(int(x) for x in rng.integers(0, 8, size=int(rng.integers(0, 7))))
        if reduce_word(inv_word(inv4.apply(tw4.apply(w))) + reduce_word(w)) != ():
            ok, witness = False, "inverse law fails"
            break

    for n in (1, 2, 4, 8, 16):
        tw = twist_mod.TwistMap(CurveClass("a"), n)
        imgs = twist_mod.ball_map(tw, ball)
        e_def, used, skipped = twist_mod.electric_distortion(
            tw, es, samples, seed, images=imgs)
        rows.append((n, "electric", e_def, used, skipped))
        if e_def != 0:
            ok, witness = False, f"electric distortion {e_def} at n={n}"
        wdef = twist_mod.witness_defect(tw)
        rows.append((n, "hyperbolic_witness", wdef, 1, 0))
        if wdef < n:
            ok, witness = False, f"witness defect {wdef} < n={n}"
        if n + 1 <= ball.radius:
            h_def, h_used, h_skip = twist_mod.hyperbolic_distortion(
                tw, ball, samples, seed, images=imgs)
            rows.append((n, "hyperbolic_sampled", h_def, h_used, h_skip))
        consts[f"witness_n{n}"] = wdef
    consts["electric_distortion_max"] = max(r[2] for r in rows if r[1] == "electric")

    artifacts = []
    if out_dir:
        artifacts.append(write_csv(
            os.path.join(out_dir, "twist.csv"),
            ["n", "metric", "max_defect", "samples_used", "samples_skipped"],
            rows))
    return SuiteResult("twist", ok, consts, time.time() - t0,
                       artifacts, witness)


# --------------------------------------------------------------- blocks suite

def suite_blocks(ball: CayleyBall, stack, cfg=None, out_dir=None,
                 cache_dir=None) -> SuiteResult:
    t0 = time.time()
    seed = cfg.seed if cfg else 7
    rng = np.random.default_rng(seed)
    ok = True
    witness = ""
    consts = {}
    rows = []
    model = ModelManifold(ball, stack)

    # assembly determinism
    model2 = ModelManifold(ball, stack)
    for i1, i2 in zip(model.interfaces, model2.interfaces):
        if not np.array_equal(i1.fwd, i2.fwd):
            ok, witness = False, "assembly nondeterministic"

    thin_blocks = [i for i, s in enumerate(model.blocks) if s.kind == "thin"]
    trusted = ball.interior_mask()
    for bi in thin_blocks:
        tubes = model.tubes(bi)
        good = [t for t in tubes if trusted[t.coset_lower]]
        take = min(8, len(good))
        for idx in rng.choice(len(good), size=take, replace=False):
            t = good[int(idx)]
            es = model.electric_space(model.blocks[bi].curve)
            lo = es.qcsets()[t.coset_lower].members
            gids = [t.lower_layer * model.n + int(v) for v in lo[:6]]
            if t.coset_upper >= 0:
                up = es.qcsets()[t.coset_upper].members
                gids += [t.upper_layer * model.n + int(v) for v in up[:6]]
            fld = model.dist_field([gids[0]], mode="model")
            diam = int(fld[np.array(gids)].max())
            rows.append(("tube_diameter", bi, diam))
            if diam > 1:
                ok, witness = False, f"tube diameter {diam} in block {bi}"
        # vertical separation level0 -> level3
        base = model.bottom_layer(bi)
        for v in rng.choice(ball.interior_vertices(), size=5, replace=False):
            d = model.model_dist(model.gid(base, int(v)),
                                 model.gid(base + 3, int(v)))
            rows.append(("vertical_separation", bi, d))
            if d < 3:
                ok, witness = False, f"thin block {bi} crossed in {d}"

    consts["blocks"] = len(model.blocks)
    consts["layers"] = model.n_layers
    artifacts = []
    if out_dir:
        artifacts.append(write_csv(os.path.join(out_dir, "blocks.csv"),
                                   ["check", "block", "value"], rows))
    return SuiteResult("blocks", ok, consts, time.time() - t0,
                       artifacts, witness)


# --------------------------------------------------------------- ladder suite

def _twist_fixed_base(ball: CayleyBall, length: int):
    """Base geodesic with endpoints fixed by both supported twists."""
    from .words import word_from_str
    half = max(1, length // 2)
    a_end = ball.vertex_of_word(word_from_str("A" * half))
    c_end = ball.vertex_of_word(word_from_str("c" * half))
    if a_end < 0 or c_end < 0:
        raise ValueError("ball too small for the requested base geodesic")
    return ball.geodesic(a_end, c_end)


def suite_ladder(ball: CayleyBall, cfg=None, out_dir=None,
                 cache_dir=None, n_sweep=(1, 4, 16, 64)) -> SuiteResult:
    t0 = time.time()
    seed = cfg.seed if cfg else 7
    samples = cfg.samples if cfg else 200
    rng = np.random.default_rng(seed)
    ok = True
    witness = ""
    consts = {}
    sweep_rows = []
    dump_rows = []

    base_len = min(6, 2 * (ball.radius - ball.margin) - 2)
    lam0 = _twist_fixed_base(ball, base_len)

    c_values = {}
    for n in n_sweep:
        stack = [ThickBlockSpec("id"), ThinBlockSpec("a", n),
                 ThickBlockSpec("tw_c"), ThinBlockSpec("c", n)]
        model = ModelManifold(ball, stack)
        ladder = build_ladder(model, lam0)
        if ladder.truncated_at is not None:
            ok, witness = False, f"ladder truncated at n={n}"
            continue
        retr = build_retraction(ladder)
        C, per_kind = retraction_constant(retr)
        c_values[n] = C
        consts[f"C_n{n}"] = C
        consts[f"wobble_n{n}"] = retr.wobble
        for kind, val in sorted(per_kind.items()):
            sweep_rows.append((n, kind, val))
        if n == n_sweep[0]:
            words = ball.words()
            for layer in ladder.layers():
                lp = ladder.paths[layer]
                sh = model.sheets[layer]
                for si, v in enumerate(lp.vertices):
                    dump_rows.append((sh.block, sh.level, si,
                                      word_to_str(words[v])))
            # cross-metric consistency: retract == per-mode projection
            for _ in range(min(50, samples)):
                y = int(rng.choice(ball.interior_vertices()))
                for layer in ladder.layers():
                    lp = ladder.paths[layer]
                    got = int(retr.tables[layer][y])
                    if lp.mode == "hyp":
                        want = project.project_h(ball, lp.gpath, y)
                    else:
                        es = model.electric_space(model.sheets[layer].curve)
                        want = project.project_e(es, lp.gpath, y)
                    if got != want:
                        ok, witness = False, f"retract!=projection layer {layer}"
                        break
            # heights: admissible-path points stay within h(i) of the base
            heights = height_table(model, ladder.ladder_paths_by_layer())
            consts["h_final"] = heights.h[-1] if heights.h else 0
            lam0_gids = ladder.path_gids(model.bottom_layer(0))
            fld0 = model.dist_field(lam0_gids, mode="hyperbolic")
            c_est = sample_retraction_constant(retr, 100, seed)
            a_g = int(lam0_gids[0])
            b_g = int(lam0_gids[-1])
            beta_e = model.model_path(a_g, b_g, mode="electric")
            adm = ct_mod.join_the_dots(model, ladder, retr, beta_e, c_est)
            v_ok, _segs = validate_admissible(ladder, retr, adm.gids,
                                              C=max(c_est, 2))
            if not v_ok:
                ok, witness = False, f"joined path not admissible: {_segs}"
            adm_by_layer = {}
            for g in adm.gids:
                adm_by_layer.setdefault(int(g // model.n), []).append(int(g))
            for bi in range(len(model.blocks)):
                lo, hi = model.bottom_layer(bi), model.top_layer(bi)
                pts = []
                for layer in range(lo, hi + 1):
                    if layer in ladder.paths:
                        pts.extend(int(g) for g in ladder.path_gids(layer))
                    pts.extend(adm_by_layer.get(layer, []))
                pts = np.array(sorted(set(pts)))
                count = min(samples, pts.size)
                sel = rng.choice(pts, size=count, replace=False)
                worst = int(fld0[sel].max())
                bound = heights.h[bi]
                sweep_rows.append((0, f"height_block{bi}", worst))
                if worst > bound:
                    ok, witness = False, f"height {worst} > h({bi}) = {bound}"

    if c_values:
        spread = (max(c_values.values()) - min(c_values.values())) / \
            max(1, min(c_values.values()))
        consts["c_spread"] = round(spread, 4)
        if spread > _thr(cfg, "c_spread"):
            ok, witness = False, f"retraction constant varies with n: {c_values}"

    artifacts = []
    if out_dir:
        artifacts.append(write_csv(os.path.join(out_dir, "ladder_dump.csv"),
                                   ["block", "level", "seq", "vertex_word"],
                                   dump_rows))
        artifacts.append(write_csv(os.path.join(out_dir, "retraction_sweep.csv"),
                                   ["n", "edge_kind", "contribution"],
                                   sweep_rows))
    return SuiteResult("ladder", ok, consts, time.time() - t0,
                       artifacts, witness)


# ------------------------------------------------------------------- ct suite

def suite_ct(ball: CayleyBall, stack, cfg=None, out_dir=None,
             cache_dir=None, Ns=None) -> SuiteResult:
    t0 = time.time()
    seed = cfg.seed if cfg else 7
    ok = True
    witness = ""
    consts = {}
    model = ModelManifold(ball, stack)
    if Ns is None:
        Ns = list(range(1, ball.radius - ball.margin))
    curve = ct_mod.ct_curve(model, Ns, seed)
    rows = [(r.N, r.M_adm, r.M_geo, r.ladder_blocks, r.electric_len,
             r.hyperbolic_len, r.seed) for r in curve.rows]
    m_adm = [r.M_adm for r in curve.rows]
    m_geo = [r.M_geo for r in curve.rows]
    if any(b < a for a, b in zip(m_adm, m_adm[1:])):
        ok, witness = False, f"M_adm not nondecreasing: {m_adm}"
    if any(b < a for a, b in zip(m_geo, m_geo[1:])):
        ok, witness = False, f"M_geo not nondecreasing: {m_geo}"
    if not (m_adm[-1] > m_adm[0] or m_geo[-1] > m_geo[0]):
        ok, witness = False, "no growth across the N range"
    track = max(max(r.track_geo_to_adm, r.track_adm_to_geo) for r in curve.rows)
    consts["tracking"] = track
    if track > _thr(cfg, "tracking_max"):
        ok, witness = False, f"tracking constant {track}"
    consts["M_adm_first"], consts["M_adm_last"] = m_adm[0], m_adm[-1]
    consts["M_geo_first"], consts["M_geo_last"] = m_geo[0], m_geo[-1]

    artifacts = []
    if out_dir:
        artifacts.append(write_csv(
            os.path.join(out_dir, "ct_curve.csv"),
            ["N", "M_adm", "M_geo", "ladder_blocks", "electric_len",
             "hyperbolic_len", "seed"], rows))
    return SuiteResult("ct", ok, consts, time.time() - t0, artifacts, witness)


# ---------------------------------------------------------------- audit suite

def suite_audit(ball: CayleyBall, stack, cfg=None, out_dir=None,
                cache_dir=None) -> SuiteResult:
    t0 = time.time()
    seed = cfg.seed if cfg else 7
    samples = cfg.samples if cfg else 100
    model = ModelManifold(ball, stack)
    rows = ct_mod.six_properties_audit(model, samples, seed)
    ok = len(rows) == 6 and rows[1].constant >= 1
    consts = {f"property_{r.property_id}": r.constant for r in rows}
    artifacts = []
    if out_dir:
        artifacts.append(write_csv(
            os.path.join(out_dir, "audit.csv"),
            ["property_id", "constant", "witness"],
            [(r.property_id, r.constant, r.witness) for r in rows]))
    return SuiteResult("audit", ok, consts, time.time() - t0, artifacts,
                       "" if ok else "audit incomplete")
