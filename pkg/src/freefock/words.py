"""Words of the free semigroup on n generators, and graded word bases.

A word is a tuple of generator indices, each in 1..n; the empty tuple is
the semigroup identity.  Words serialize as digit strings ("121" means
g1 g2 g1, "" is the identity), which caps the generator count at 9.
"""

from __future__ import annotations

import itertools

from .errors import InputError

MAX_GENERATORS = 9

Word = tuple  # tuple of ints in 1..n


def word_from_string(s, n=MAX_GENERATORS):
    """Parse a digit string into a word, validating letters against n."""
    try:
        w = tuple(int(c) for c in s)
    except ValueError:
        raise InputError(f"word string {s!r} contains a non-digit") from None
    validate_word(w, n)
    return w


def word_to_string(w):
    return "".join(str(i) for i in w)


def validate_word(w, n):
    for i in w:
        if not 1 <= i <= n:
            raise InputError(f"letter {i} outside 1..{n} in word {word_to_string(w)!r}")


def reverse(w):
    """Reverse the letters of a word; an involution."""
    return w[::-1]


def right_quotient(w, g):
    """Return sigma with w = sigma g and sigma nonempty, else None.

    w == g is not a divisibility (the quotient must be a nonempty word);
    callers that care about equality test it separately.
    """
    k = len(g)
    if len(w) <= k:
        return None
    if k and w[-k:] != g:
        return None
    return w[: len(w) - k]


def left_quotient(w, g):
    """Return sigma with w = g sigma and sigma nonempty, else None."""
    k = len(g)
    if len(w) <= k:
        return None
    if k and w[:k] != g:
        return None
    return w[k:]


class GradedBasis:
    """All words of length <= max_deg over n generators, in graded-lex order.

    Graded-lex (by length, then lexicographic) keeps each degree block
    contiguous, so degree projections are contiguous index ranges.
    """

    def __init__(self, n, max_deg):
        if not 1 <= n <= MAX_GENERATORS:
            raise InputError(f"generator count {n} outside 1..{MAX_GENERATORS}")
        if max_deg < 0:
            raise InputError(f"truncation degree {max_deg} is negative")
        self.n = n
        self.max_deg = max_deg
        words = []
        self.degree_start = []  # index of the first word of each degree
        for k in range(max_deg + 1):
            self.degree_start.append(len(words))
            words.extend(itertools.product(range(1, n + 1), repeat=k))
        self.words = words
        self.index = {w: i for i, w in enumerate(words)}
        self.size = len(words)

    def __len__(self):
        return self.size

    def degree_slice(self, k):
        """Index range of the words of exact length k."""
        lo = self.degree_start[k]
        hi = self.degree_start[k + 1] if k + 1 <= self.max_deg else self.size
        return lo, hi

    def words_of_degree(self, k):
        lo, hi = self.degree_slice(k)
        return self.words[lo:hi]


def enumerate_basis(n, m):
    """Graded basis of all words with length <= m; size sum_{k<=m} n^k."""
    return GradedBasis(n, m)
