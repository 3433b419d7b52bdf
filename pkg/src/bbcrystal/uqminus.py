"""The negative half U_q^-(g) as the free algebra modulo the form radical.

Each weight space is modelled independently: enumerate all words of the
given weight, form the Gram matrix of the bilinear form, and take the
first linearly independent words (in canonical order) as a basis of the
quotient.  An element reduces to zero exactly when it pairs to zero with
every word, so radical membership needs no rewriting theory.

The radical is the same for the Lusztig and Kashiwara forms: on word
pairs they differ by the row scaling Π(1 - q_i^{2l}) over the first
word's letters, which is invertible.  The solver therefore stores the
Kashiwara-form Gram matrix, whose entries are integer Laurent
polynomials and eliminate much faster, while pivot choice, null space,
and the projection itself agree with the Lusztig convention exactly.

The form vanishes unless two words use the same multiset of letters, so
the Gram matrix is block diagonal over multiset classes; all elimination
work happens inside these small blocks, and a block of full rank needs
no elimination at all (projection is the identity there).

Weight-space models are cached per (datum, weight); the cache is the only
mutable state and is guarded by a lock so concurrent builds deduplicate.
"""

from __future__ import annotations

import threading

from . import linalg
from .cartan import GenIndex, RootVector
from .freealg import FreeElement, e_dprime, e_prime, lusztig_form, _kashiwara_words
from .qrat import ScalarQ

_ZERO = ScalarQ.zero()
_ONE = ScalarQ.one()

DEFAULT_WORD_CAP = 5000


class WordCapExceeded(Exception):
    """A weight space has more words than the configured cap."""


def words_at_weight(d, alpha, word_cap=None):
    """All words of weight exactly alpha, lexicographically ordered."""
    cap = DEFAULT_WORD_CAP if word_cap is None else word_cap
    letters = []
    for i in d.vertices:
        c = alpha.coeff(i)
        if not c:
            continue
        if d.is_real(i):
            letters.append(GenIndex(i, 1))
        else:
            letters.extend(GenIndex(i, l) for l in range(1, c + 1))
    letters.sort()
    out = []

    def extend(prefix, remaining):
        if not any(remaining.values()):
            out.append(prefix)
            if len(out) > cap:
                raise WordCapExceeded(
                    "weight %r has more than %d words" % (alpha, cap)
                )
            return
        for g in letters:
            if remaining.get(g.i, 0) >= g.l:
                nxt = dict(remaining)
                nxt[g.i] -= g.l
                extend(prefix + (g,), nxt)

    extend((), dict(alpha.items()))
    return out


class _Block:
    """One multiset class of words with its Gram data and solver."""

    __slots__ = ("indices", "gram", "pivots_local", "inv")

    def __init__(self, indices, gram, pivots_local, inv):
        self.indices = indices
        self.gram = gram
        self.pivots_local = pivots_local
        self.inv = inv


class WeightSpaceModel:
    """Words, Gram blocks, and the pivot basis of one weight space."""

    __slots__ = ("datum", "root", "words", "pivots", "_word_pos", "_blocks", "_block_of")

    def __init__(self, datum, root, word_cap=None):
        self.datum = datum
        self.root = root
        self.words = words_at_weight(datum, root, word_cap)
        self._word_pos = {w: n for n, w in enumerate(self.words)}
        groups = {}
        for n, w in enumerate(self.words):
            groups.setdefault(tuple(sorted(w)), []).append(n)
        self._blocks = []
        self._block_of = {}
        pivots = []
        for key in sorted(groups):
            idx = groups[key]
            gram = [
                [_kashiwara_words(datum, self.words[a], self.words[b]) for b in idx]
                for a in idx
            ]
            pl = linalg.column_rank_profile(gram, _ZERO)
            full = len(pl) == len(idx)
            inv = None
            if pl and not full:
                inv = _invert([[gram[a][b] for b in pl] for a in pl])
            block = _Block(tuple(idx), gram, tuple(pl), inv)
            bid = len(self._blocks)
            self._blocks.append(block)
            for n in idx:
                self._block_of[n] = bid
            pivots.extend(idx[p] for p in pl)
        self.pivots = tuple(sorted(pivots))

    @property
    def dim(self):
        return len(self.pivots)

    def reduce(self, x):
        """Project a FreeElement of this weight onto the pivot basis."""
        coeff_by_pos = {}
        for w, c in x.coeffs.items():
            pos = self._word_pos.get(w)
            if pos is None:
                raise ValueError("word %r is not at weight %r" % (w, self.root))
            coeff_by_pos[pos] = c
        out = {}
        touched = sorted({self._block_of[p] for p in coeff_by_pos})
        for bid in touched:
            block = self._blocks[bid]
            cvec = [coeff_by_pos.get(p, _ZERO) for p in block.indices]
            if not any(cvec):
                continue
            if len(block.pivots_local) == len(block.indices):
                for n, p in enumerate(block.indices):
                    if cvec[n]:
                        out[p] = cvec[n]
                continue
            if not block.pivots_local:
                continue
            v = linalg.matvec(block.gram, cvec, _ZERO)
            vj = [v[p] for p in block.pivots_local]
            sol = linalg.matvec(block.inv, vj, _ZERO)
            pivot_set = set(block.pivots_local)
            for r, target in enumerate(v):
                if r in pivot_set:
                    continue
                acc = _ZERO
                row = block.gram[r]
                for s, p in zip(sol, block.pivots_local):
                    if s:
                        acc = acc + s * row[p]
                if acc != target:
                    raise linalg.InconsistentSystem("Gram projection mismatch")
            for s, p in zip(sol, block.pivots_local):
                if s:
                    out[block.indices[p]] = s
        coords = [_ZERO] * self.dim
        for n, pos in enumerate(self.pivots):
            if pos in out:
                coords[n] = out[pos]
        return UElement(self.datum, self.root, coords)

    def lift(self, u):
        """The canonical pivot-word representative of a UElement."""
        terms = {}
        for c, pos in zip(u.coords, self.pivots):
            if not c.is_zero:
                terms[self.words[pos]] = c
        return FreeElement(self.datum, terms)


def _invert(square):
    return linalg.invert(square, _ZERO, _ONE)


_CACHE = {}
_LOCK = threading.Lock()


def build_weight_space(d, alpha, word_cap=None):
    key = (d, alpha)
    model = _CACHE.get(key)
    if model is None:
        with _LOCK:
            model = _CACHE.get(key)
            if model is None:
                model = WeightSpaceModel(d, alpha, word_cap)
                _CACHE[key] = model
    return model


def dim_at(d, alpha, word_cap=None):
    return build_weight_space(d, alpha, word_cap).dim


# ---------------------------------------------------------------------------
# elements of the quotient
# ---------------------------------------------------------------------------


class UElement:
    """A quotient element: exact coordinates over one weight's pivot words.

    The zero element is normalized to root None with no coordinates, so
    a freshly reduced element is zero iff its support is empty.
    """

    __slots__ = ("datum", "root", "coords")

    def __init__(self, datum, root, coords):
        coords = tuple(c if isinstance(c, ScalarQ) else ScalarQ.of(c) for c in coords)
        if not any(coords):
            root, coords = None, ()
        self.datum = datum
        self.root = root
        self.coords = coords

    @property
    def is_zero(self):
        return self.root is None

    def scale(self, c):
        c = c if isinstance(c, ScalarQ) else ScalarQ.of(c)
        if self.is_zero or c.is_zero:
            return UElement(self.datum, None, ())
        return UElement(self.datum, self.root, [c * x for x in self.coords])

    def __add__(self, other):
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.root != other.root:
            raise ValueError("weights differ under addition")
        return UElement(
            self.datum, self.root, [a + b for a, b in zip(self.coords, other.coords)]
        )

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def bar(self):
        """Bar on the quotient: the pivot words are bar-fixed."""
        return UElement(self.datum, self.root, [c.bar() for c in self.coords])

    def __eq__(self, other):
        return (
            isinstance(other, UElement)
            and self.datum == other.datum
            and self.root == other.root
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.datum, self.root, self.coords))

    def __repr__(self):
        if self.is_zero:
            return "UElement(0)"
        return "UElement(%r, %s)" % (self.root, list(map(str, self.coords)))


def zero_u(d):
    return UElement(d, None, ())


def unit_u(d):
    return build_weight_space(d, RootVector()).reduce(FreeElement.unit(d))


def reduce_element(x, word_cap=None):
    if x.is_zero:
        return zero_u(x.datum)
    return build_weight_space(x.datum, x.weight(), word_cap).reduce(x)


def lift(u):
    if u.is_zero:
        return FreeElement(u.datum)
    return build_weight_space(u.datum, u.root).lift(u)


def is_in_radical(x):
    """True when x pairs to zero with every word of its weight."""
    if x.is_zero:
        return True
    return reduce_element(x).is_zero


def act_mul_b(i, l, u):
    """Left multiplication by b_{il} on the quotient."""
    if u.is_zero:
        return u
    x = FreeElement.generator(u.datum, i, l) * lift(u)
    return reduce_element(x)


def act_mul_word(w, u):
    """Left multiplication by a FreeElement."""
    if u.is_zero or w.is_zero:
        return zero_u(u.datum)
    return reduce_element(w * lift(u))


def act_e_prime(i, l, u):
    if u.is_zero:
        return u
    return reduce_element(e_prime(i, l, lift(u)))


def act_e_dprime(i, l, u):
    if u.is_zero:
        return u
    return reduce_element(e_dprime(i, l, lift(u)))


def form_u(u, v):
    """The Lusztig form on quotient elements via canonical lifts."""
    if u.is_zero or v.is_zero:
        return _ZERO
    return lusztig_form(lift(u), lift(v))


# ---------------------------------------------------------------------------
# divided powers and defining relations
# ---------------------------------------------------------------------------


def divided_power(d, i, n):
    """b_i**n / [n]_i! for a real vertex."""
    if not d.is_real(i):
        raise ValueError("divided powers are for real vertices")
    if n < 0:
        raise ValueError("negative power")
    x = FreeElement.unit(d)
    g = FreeElement.generator(d, i, 1)
    for _ in range(n):
        x = x * g
    return x.scale(d.bracket_factorial(i, n).inverse())


def serre_element(d, i, j, l):
    """Sum over r+s = 1 - l a_ij of (-1)^r b_i^(r) b_{jl} b_i^(s)."""
    if not d.is_real(i):
        raise ValueError("Serre relations start at a real vertex")
    if (j, l) == (i, 1):
        raise ValueError("the pair (i,1) at the same real vertex is excluded")
    n = 1 - l * d.a(i, j)
    g = FreeElement.generator(d, j, l)
    total = FreeElement(d)
    for r in range(n + 1):
        s = n - r
        term = divided_power(d, i, r) * g * divided_power(d, i, s)
        total = total + term.scale((-1) ** r)
    return total


def commutator_element(d, i, l, j, k):
    """b_{il} b_{jk} - b_{jk} b_{il}; meaningful when a_ij = 0."""
    x = FreeElement.generator(d, i, l)
    y = FreeElement.generator(d, j, k)
    return x * y - y * x


def radical_generators_at(d, alpha, word_cap=None):
    """All defining-relation instances supported exactly at weight alpha."""
    out = []
    for i in d.vertices:
        if not d.is_real(i):
            continue
        for j in d.vertices:
            levels = (1,) if d.is_real(j) else range(1, alpha.coeff(j) + 1)
            for l in levels:
                if (j, l) == (i, 1):
                    continue
                wt = RootVector({i: 1 - l * d.a(i, j)}).plus(j, l)
                if wt == alpha:
                    out.append(serre_element(d, i, j, l))
    for i in d.vertices:
        for j in d.vertices:
            if d.a(i, j) != 0 or not (d.is_imaginary(i) and d.is_imaginary(j)):
                continue
            li = (1,) if d.is_real(i) else range(1, alpha.coeff(i) + 1)
            for l in li:
                lj = (1,) if d.is_real(j) else range(1, alpha.coeff(j) + 1)
                for k in lj:
                    if i == j and l >= k:
                        continue
                    if i > j:
                        continue
                    if RootVector({}).plus(i, l).plus(j, k) == alpha:
                        out.append(commutator_element(d, i, l, j, k))
    return [x for x in out if not x.is_zero]


# ---------------------------------------------------------------------------
# the integral spanning set
# ---------------------------------------------------------------------------


def integral_monomials(d, alpha, word_cap=None):
    """Words normalized by [n]_i! over maximal runs of equal real letters.

    These products of divided powers (real) and plain generators
    (imaginary) span the integral form's weight space over Z[q, q^{-1}]
    adjoined to Q, and each is fixed by bar.
    """
    out = []
    for w in words_at_weight(d, alpha, word_cap):
        coeff = _ONE
        run = 0
        prev = None
        for g in w + (None,):
            if g == prev:
                run += 1
                continue
            if prev is not None and d.is_real(prev.i) and run > 1:
                coeff = coeff * d.bracket_factorial(prev.i, run).inverse()
            prev = g
            run = 1
        out.append(FreeElement(d, {w: coeff}))
    return out
