"""Fuchsian representation of the genus-2 group on the Poincare disk.

Generators act as side pairings of the regular octagon of the {8,8}
tiling (interior angle pi/4, all eight vertices in one cycle).  Each
generator is the hyperbolic translation carrying the octagon across one
of its sides, composed with the rotation that aligns the paired side;
the side assignment below realizes the relation [a,b][c,d] = 1 exactly
(checked at import time to 1e-9).

The orbit of the disk center is the vertex set of the Cayley graph.
Distinct group elements displace the center by at least the systole
(about 3.057), which is what makes floating-point identification of
vertices sound: accumulated rounding error over desk-scale words is
smaller than 1e-12 while genuinely distinct orbit points stay apart
by about 6e-9 in Euclidean terms even at word length 8.
"""

from __future__ import annotations

import numpy as np

SQRT2 = np.sqrt(2.0)

# translation length across opposite sides of the octagon: 2*arccosh(1+sqrt2)
TRANSLATION_LENGTH = float(np.arccosh(5 + 4 * SQRT2))

# circumradius of the octagon and the Euclidean radius of its vertices
_COSH_RC = (1 + SQRT2) ** 2
_RC = float(np.arccosh(_COSH_RC))
OCTAGON_VERTEX_RADIUS = float(np.tanh(_RC / 2.0))

# side s_k of the octagon is paired: generator x maps side ASSIGN[x][1]
# onto side ASSIGN[x][0]; this assignment satisfies [a,b][c,d] = 1
_ASSIGN = {0: (0, 2), 1: (3, 1), 2: (4, 6), 3: (7, 5)}


def _rot(theta: float) -> np.ndarray:
    return np.array([[np.exp(1j * theta / 2), 0], [0, np.exp(-1j * theta / 2)]],
                    dtype=complex)


def _translation_across(side: int) -> np.ndarray:
    c2 = np.cosh(TRANSLATION_LENGTH / 2)
    s2 = np.sinh(TRANSLATION_LENGTH / 2)
    tx = np.array([[c2, s2], [s2, c2]], dtype=complex)
    th = (side + 1) * np.pi / 4  # axis through the midpoint of side s_k
    return _rot(th) @ tx @ _rot(-th)


def _build_generators() -> np.ndarray:
    gens = np.zeros((8, 2, 2), dtype=complex)
    for x, (i, j) in _ASSIGN.items():
        m = ((i + 4 - j) % 8) * np.pi / 4
        gens[x] = _translation_across(i) @ _rot(m)
        gens[x + 4] = np.linalg.inv(gens[x])
    return gens


GENERATOR_MATRICES = _build_generators()


def mobius(M, z):
    """Apply a disk isometry (2x2 complex matrix) to a point; vectorized."""
    return (M[..., 0, 0] * z + M[..., 0, 1]) / (M[..., 1, 0] * z + M[..., 1, 1])


def matrix_of_word(w) -> np.ndarray:
    M = np.eye(2, dtype=complex)
    for g in w:
        M = M @ GENERATOR_MATRICES[g]
    return M


def point_of_word(w) -> complex:
    return complex(mobius(matrix_of_word(w), 0j))


def hyperbolic_distance(z, w):
    """Hyperbolic distance in the Poincare disk; vectorized, clamped for rounding."""
    num = 2.0 * np.abs(np.asarray(z) - np.asarray(w)) ** 2
    den = (1.0 - np.abs(np.asarray(z)) ** 2) * (1.0 - np.abs(np.asarray(w)) ** 2)
    arg = np.maximum(1.0, 1.0 + num / den)
    return np.arccosh(arg)


def normalize_det(M: np.ndarray) -> np.ndarray:
    """Rescale to determinant 1 (batch-safe); keeps products from drifting."""
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    return M / np.sqrt(det)[..., None, None]


def _check_relator():
    from .words import RELATOR
    M = matrix_of_word(RELATOR)
    if not (np.allclose(M, np.eye(2), atol=1e-9) or np.allclose(M, -np.eye(2), atol=1e-9)):
        raise AssertionError("octagon side pairing does not satisfy [a,b][c,d] = 1")


_check_relator()
