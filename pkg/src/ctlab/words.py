"""Words in the genus-2 surface group and Dehn's algorithm.

The group is ``<a, b, c, d | [a,b][c,d]>``.  Letters are encoded as the
integers 0..7 with 0..3 = a, b, c, d and 4..7 their inverses; ``inv``
is the involution ``x -> x+4 mod 8``.  Every letter of the relator
occurs exactly once, so the presentation satisfies the small-cancellation
condition C'(1/6) (pieces have length 1) and Greendlinger's lemma applies:
a nontrivial freely reduced word representing the identity contains more
than half of some cyclic rotation of the relator or its inverse.  Replacing
any such subword of length >= 5 by the shorter complementary side therefore
solves the word problem.
"""

from __future__ import annotations

N_LETTERS = 8
LETTER_CHARS = "abcdABCD"
_CHAR_TO_LETTER = {ch: i for i, ch in enumerate(LETTER_CHARS)}

# [a,b][c,d] = a b a^-1 b^-1 c d c^-1 d^-1
RELATOR = (0, 1, 4, 5, 2, 3, 6, 7)

Word = tuple  # tuple of ints in 0..7


def inv(letter: int) -> int:
    return (letter + 4) % 8


def inv_word(w) -> Word:
    return tuple(inv(x) for x in reversed(w))


def word_from_str(s: str) -> Word:
    try:
        return tuple(_CHAR_TO_LETTER[ch] for ch in s)
    except KeyError as e:
        raise ValueError(f"bad letter {e.args[0]!r}; expected one of {LETTER_CHARS}") from None


def word_to_str(w) -> str:
    return "".join(LETTER_CHARS[x] for x in w)


def free_reduce(w) -> Word:
    out = []
    for g in w:
        if out and out[-1] == inv(g):
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def _dehn_table() -> dict:
    """Map every length->=5 subword of a relator rotation to its shorter side."""
    table = {}
    for base in (RELATOR, inv_word(RELATOR)):
        for s in range(8):
            rho = base[s:] + base[:s]
            doubled = rho + rho
            for length in (8, 7, 6, 5):
                for start in range(8):
                    u = doubled[start:start + length]
                    v = doubled[start + length:start + 8]
                    table[u] = inv_word(v)
    return table


_DEHN = _dehn_table()
_DEHN_LENGTHS = (8, 7, 6, 5)


def reduce_word(w) -> Word:
    """Freely and Dehn-reduce a letter sequence.

    Returns the empty word iff the input represents the identity.  The
    output is some Dehn-reduced representative of the same group element
    (not a canonical form; use ball lookups for canonical words).
    """
    w = free_reduce(w)
    changed = True
    while changed:
        changed = False
        n = len(w)
        for length in _DEHN_LENGTHS:
            if length > n:
                continue
            for s in range(n - length + 1):
                rep = _DEHN.get(w[s:s + length])
                if rep is not None:
                    w = free_reduce(w[:s] + rep + w[s + length:])
                    changed = True
                    break
            if changed:
                break
    return w


def is_trivial(w) -> bool:
    return reduce_word(w) == ()


def words_equal(u, v) -> bool:
    return reduce_word(inv_word(u) + tuple(v)) == ()


def concat(*ws) -> Word:
    out = ()
    for w in ws:
        out = out + tuple(w)
    return reduce_word(out)


def abelianization(w) -> tuple:
    """Exponent sums (n_a, n_b, n_c, n_d); the relator abelianizes to zero."""
    v = [0, 0, 0, 0]
    for g in w:
        v[g % 4] += 1 if g < 4 else -1
    return tuple(v)


def abelian_lower_bound(w) -> int:
    """l1-norm of the abelianized image; a certified lower bound for word length."""
    return sum(abs(x) for x in abelianization(w))


def shortlex_key(w):
    return (len(w), tuple(w))


def power_word(letter: int, k: int) -> Word:
    """sigma^k as a word, k may be negative."""
    if k >= 0:
        return (letter,) * k
    return (inv(letter),) * (-k)
