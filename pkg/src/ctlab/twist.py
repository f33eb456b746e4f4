"""Dehn twists as group automorphisms acting on the ball.

Supported twists have closed-form rules that fix the relator exactly:
about the curve a the rule is b -> b a^n (a, c, d fixed), about c it is
d -> d c^n (a, b, c fixed).  Either rule conjugates [a,b][c,d] to itself
letter by letter, so it defines an automorphism of the group.

On the electric space of the twisted curve the induced map preserves
electric length edge by edge: a b-edge maps to a b-edge followed by an
a-run of weight zero.  Hyperbolically, the witness pair (identity, b)
is stretched from distance 1 to n+1, which is certified exactly by the
abelianized l1 lower bound (|b a^n| >= n+1 letter changes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fuchsian
from .ball import CayleyBall, GPath
from .electric import CurveClass, ElectricSpace, EPath
from .words import RELATOR, inv, power_word, reduce_word

# letter moved by the twist, per curve: tw_a twists b, tw_c twists d
_MOVED = {"a": 1, "c": 3}


@dataclass(frozen=True)
class TwistMap:
    curve: CurveClass
    n: int

    @property
    def moved_letter(self) -> int:
        return _MOVED[self.curve.sigma]

    def letter_image(self, g: int) -> tuple:
        m = self.moved_letter
        s = self.curve.letter
        if g == m:
            return (m,) + power_word(s, self.n)
        if g == inv(m):
            return power_word(s, -self.n) + (inv(m),)
        return (g,)

    def apply(self, w) -> tuple:
        out = []
        for g in w:
            out.extend(self.letter_image(g))
        return reduce_word(tuple(out))

    def inverse(self) -> "TwistMap":
        return TwistMap(self.curve, -self.n)

    def preserves_relator(self) -> bool:
        return self.apply(RELATOR) == ()

    def letter_matrices(self) -> np.ndarray:
        out = np.zeros((8, 2, 2), dtype=complex)
        for g in range(8):
            out[g] = fuchsian.matrix_of_word(self.letter_image(g))
        return out


def ball_map(tw: TwistMap, ball: CayleyBall):
    """Partial vertex map of the twist: image vertex id or -1 outside.

    The twist is a homomorphism, so image matrices propagate down the
    BFS tree with one matrix product per vertex.
    """
    n = ball.n_vertices
    img_mats = tw.letter_matrices()
    mats = np.zeros((n, 2, 2), dtype=complex)
    mats[0] = np.eye(2)
    level = np.asarray(ball.level)
    # far-outside images may overflow float64; they are reported undefined
    with np.errstate(all="ignore"):
        for L in range(1, ball.radius + 1):
            idx = np.where(level == L)[0]
            if idx.size == 0:
                continue
            mats[idx] = np.einsum("nij,njk->nik",
                                  mats[ball.parent[idx]],
                                  img_mats[ball.parent_gen[idx]])
            mats[idx] = fuchsian.normalize_det(mats[idx])
        pts = mats[:, 0, 1] / mats[:, 1, 1]
    images = ball.lookup_points(pts).astype(np.int32)
    return images


def domain_stats(images: np.ndarray):
    defined = int((images >= 0).sum())
    return defined, images.shape[0] - defined


def electric_distortion(tw: TwistMap, es: ElectricSpace, sample_count: int,
                        seed: int, images: np.ndarray | None = None):
    """Max additive electric-distance defect over trusted sampled pairs.

    Pairs qualify when both images are defined and the electric geodesic
    between the originals stays in the trusted interior.  Returns
    (max defect, used, skipped).
    """
    if es.curve.sigma != tw.curve.sigma:
        raise ValueError("electric space electrocutes a different curve")
    ball = es.ball
    if images is None:
        images = ball_map(tw, ball)
    rng = np.random.default_rng(seed)
    inmask = ball.interior_mask()
    eligible = np.where(inmask & (images >= 0))[0]
    if eligible.size < 2:
        raise ValueError("twist domain has no trusted vertices")
    worst = 0
    used = skipped = 0
    while used + skipped < sample_count:
        u, v = (int(t) for t in rng.choice(eligible, 2))
        ep = es.electric_geodesic(u, v)
        if not inmask[np.array(ep.vertices)].all():
            skipped += 1
            continue
        fu, fv = int(images[u]), int(images[v])
        defect = abs(es.electric_dist(fu, fv) - es.electric_dist(u, v))
        worst = max(worst, defect)
        used += 1
    return worst, used, skipped


def hyperbolic_distortion(tw: TwistMap, ball: CayleyBall, sample_count: int,
                          seed: int, images: np.ndarray | None = None):
    """Max additive graph-distance defect over sampled in-ball pairs."""
    if images is None:
        images = ball_map(tw, ball)
    rng = np.random.default_rng(seed)
    eligible = np.where(ball.interior_mask() & (images >= 0))[0]
    if eligible.size < 2:
        raise ValueError("twist domain has no trusted vertices")
    worst = 0
    for _ in range(sample_count):
        u, v = (int(t) for t in rng.choice(eligible, 2))
        defect = abs(ball.dist(int(images[u]), int(images[v])) - ball.dist(u, v))
        worst = max(worst, defect)
    return worst, sample_count, 0


def witness_defect(tw: TwistMap) -> int:
    """Hyperbolic distortion on the witness pair (identity, moved letter).

    d(e, m) = 1 and d(e, tw(m)) = n+1 exactly: the image word m sigma^n is
    geodesic because its abelianized l1-norm equals its letter count.  This
    is a word-metric computation, valid beyond any finite ball radius.
    """
    from .words import abelian_lower_bound
    m = tw.moved_letter
    img = tw.apply((m,))
    lower = abelian_lower_bound(img)
    if lower != len(img):
        raise AssertionError("witness image is not certified geodesic")
    return len(img) - 1


def induced_geodesic_map(tw: TwistMap, space, lam, mode: str = "hyperbolic",
                         images: np.ndarray | None = None):
    """Canonical geodesic joining the images of the endpoints.

    This is the induced map on geodesics, not the pointwise image.  In
    hyperbolic mode ``space`` is a ball and a GPath is returned; in
    electric mode ``space`` is an ElectricSpace and an EPath is returned.
    """
    ball = space.ball if mode == "electric" else space
    if images is None:
        images = ball_map(tw, ball)
    verts = lam.vertices
    fa, fb = int(images[verts[0]]), int(images[verts[-1]])
    if fa < 0 or fb < 0:
        raise ValueError("endpoint image outside the ball")
    if mode == "electric":
        return space.electric_geodesic(fa, fb)
    return ball.geodesic(fa, fb)
