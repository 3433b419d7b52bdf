"""The weight-graded free algebra on the primitive generators b_{il}.

Words are finite sequences of GenIndex letters; a FreeElement is a finite
Q(q)-combination of words of one common weight.  The module provides the
structure maps the quotient construction needs:

* star: the anti-involution reversing words, fixing each b_{il},
* bar_element: coefficient-wise bar (the generators are bar-fixed),
* coproduct: the algebra map into the twisted tensor square determined by
  primitive generators, with multiplication twisted by
  (x1 (x) x2)(y1 (x) y2) = q**(-(|x2|, |y1|)) x1 y1 (x) x2 y2,
* e_prime / e_dprime: the left derivations dual to left and right
  multiplication by b_{il}; on a single letter
      e'_{il} b_{jk}  = delta + q_i**(-kl a_ij) b_{jk} e'_{il},
      e''_{il} b_{jk} = delta + q_i**(+kl a_ij) b_{jk} e''_{il},
  which unfold to signed q-power weights over letter positions,
* lusztig_form: the symmetric form with (b_{il}, b_{il})_L =
  1/(1 - q_i**(2l)) and multiplicativity against the coproduct,
* kashiwara_form: the symmetric form with (1,1)_K = 1 and
  (b_{il} S, T)_K = (S, e'_{il} T)_K.

Both forms are computed by monomial recursions and memoized per datum;
the coproduct route for the Lusztig form is kept alongside as an
independent cross-check.  On word data the b-letters and the f-letters
of the defining presentation share one representation, so the transport
between the two generator families is the identity here and the form
isometry between them is structural rather than computed.
"""

from __future__ import annotations

from .cartan import GenIndex, RootVector, sym_form
from .qrat import ScalarQ

_ZERO = ScalarQ.zero()
_ONE = ScalarQ.one()


def word_weight(d, w):
    out = {}
    for i, l in w:
        out[i] = out.get(i, 0) + l
    return RootVector(out)


def _root_form(d, alpha, beta):
    """The symmetric form (alpha, beta) on root vectors."""
    total = 0
    for i, ci in alpha.items():
        for j, cj in beta.items():
            total += ci * cj * sym_form(d, i, j)
    return total


class FreeElement:
    """A homogeneous element of the free algebra on the b_{il}."""

    __slots__ = ("datum", "coeffs")

    def __init__(self, datum, coeffs=None):
        self.datum = datum
        self.coeffs = {}
        if coeffs:
            wt = None
            for w, c in coeffs.items():
                c = c if isinstance(c, ScalarQ) else ScalarQ.of(c)
                if c.is_zero:
                    continue
                cw = word_weight(datum, w)
                if wt is None:
                    wt = cw
                elif cw != wt:
                    raise ValueError("inhomogeneous element")
                self.coeffs[tuple(w)] = c

    @staticmethod
    def unit(datum):
        return FreeElement(datum, {(): _ONE})

    @staticmethod
    def generator(datum, i, l=1):
        if i not in datum.vertices:
            raise ValueError("unknown vertex %r" % (i,))
        if l < 1:
            raise ValueError("levels are positive")
        if datum.is_real(i) and l != 1:
            raise ValueError("real vertex %r only has level 1" % (i,))
        return FreeElement(datum, {(GenIndex(i, l),): _ONE})

    @property
    def is_zero(self):
        return not self.coeffs

    def weight(self):
        """The common root weight, or None for the zero element."""
        for w in self.coeffs:
            return word_weight(self.datum, w)
        return None

    def items(self):
        return sorted(self.coeffs.items())

    def __add__(self, other):
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.weight() != other.weight():
            raise ValueError("weights differ under addition")
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            s = out.get(w, _ZERO) + c
            if s.is_zero:
                out.pop(w, None)
            else:
                out[w] = s
        return self._wrap(out)

    def __neg__(self):
        return self._wrap({w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = c if isinstance(c, ScalarQ) else ScalarQ.of(c)
        if c.is_zero:
            return self._wrap({})
        return self._wrap({w: c * x for w, x in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, FreeElement):
            out = {}
            for w1, c1 in self.coeffs.items():
                for w2, c2 in other.coeffs.items():
                    w = w1 + w2
                    s = out.get(w, _ZERO) + c1 * c2
                    if s.is_zero:
                        out.pop(w, None)
                    else:
                        out[w] = s
            return self._wrap(out)
        return self.scale(other)

    __rmul__ = scale

    def star(self):
        return self._wrap({tuple(reversed(w)): c for w, c in self.coeffs.items()})

    def bar(self):
        return self._wrap({w: c.bar() for w, c in self.coeffs.items()})

    def _wrap(self, coeffs):
        x = object.__new__(FreeElement)
        x.datum = self.datum
        x.coeffs = coeffs
        return x

    def __eq__(self, other):
        return (
            isinstance(other, FreeElement)
            and self.datum == other.datum
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.datum, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        if not self.coeffs:
            return "FreeElement(0)"
        parts = []
        for w, c in self.items():
            mono = "*".join("b(%s,%s)" % (i, l) for i, l in w) or "1"
            parts.append("(%s)*%s" % (c, mono))
        return "FreeElement(%s)" % " + ".join(parts)


def mul(x, y):
    return x * y


def star(x):
    return x.star()


def bar_element(x):
    return x.bar()


# ---------------------------------------------------------------------------
# the derivations e'_{il} and e''_{il}
# ---------------------------------------------------------------------------


def _letter_removals(d, i, l, w, sign):
    """Pairs (word-without-letter, q-power) for each (i,l) letter of w.

    The q-power is q_i**(sign * l * sum of m_p a_{i j_p}) over the letters
    (j_p, m_p) strictly before the removed position.
    """
    out = []
    si = d.s(i)
    acc = 0
    for k, (j, m) in enumerate(w):
        if j == i and m == l:
            out.append((w[:k] + w[k + 1 :], ScalarQ.q(sign * si * l * acc)))
        acc += m * d.a(i, j)
    return out


def e_prime(i, l, x):
    d = x.datum
    out = {}
    for w, c in x.coeffs.items():
        for rest, power in _letter_removals(d, i, l, w, -1):
            s = out.get(rest, _ZERO) + c * power
            if s.is_zero:
                out.pop(rest, None)
            else:
                out[rest] = s
    return x._wrap(out)


def e_dprime(i, l, x):
    d = x.datum
    out = {}
    for w, c in x.coeffs.items():
        for rest, power in _letter_removals(d, i, l, w, +1):
            s = out.get(rest, _ZERO) + c * power
            if s.is_zero:
                out.pop(rest, None)
            else:
                out[rest] = s
    return x._wrap(out)


# ---------------------------------------------------------------------------
# twisted tensor square and the coproduct
# ---------------------------------------------------------------------------


class TwistedTensor:
    """Finite Q(q)-combination of pairs of words with twisted multiplication."""

    __slots__ = ("datum", "coeffs")

    def __init__(self, datum, coeffs=None):
        self.datum = datum
        self.coeffs = {}
        if coeffs:
            for key, c in coeffs.items():
                c = c if isinstance(c, ScalarQ) else ScalarQ.of(c)
                if not c.is_zero:
                    self.coeffs[key] = c

    @staticmethod
    def unit(datum):
        return TwistedTensor(datum, {((), ()): _ONE})

    def __add__(self, other):
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            s = out.get(key, _ZERO) + c
            if s.is_zero:
                out.pop(key, None)
            else:
                out[key] = s
        return TwistedTensor(self.datum, out)

    def __mul__(self, other):
        d = self.datum
        out = {}
        for (x1, x2), c1 in self.coeffs.items():
            w_x2 = word_weight(d, x2)
            for (y1, y2), c2 in other.coeffs.items():
                twist = ScalarQ.q(-_root_form(d, w_x2, word_weight(d, y1)))
                key = (x1 + y1, x2 + y2)
                s = out.get(key, _ZERO) + c1 * c2 * twist
                if s.is_zero:
                    out.pop(key, None)
                else:
                    out[key] = s
        return TwistedTensor(self.datum, out)

    def __eq__(self, other):
        return (
            isinstance(other, TwistedTensor)
            and self.datum == other.datum
            and self.coeffs == other.coeffs
        )

    def items(self):
        return sorted(self.coeffs.items())

    def __repr__(self):
        parts = [
            "(%s)*[%s (x) %s]" % (c, list(w1), list(w2))
            for (w1, w2), c in self.items()
        ]
        return "TwistedTensor(%s)" % (" + ".join(parts) or "0")


def coproduct(x):
    """The algebra map with every generator primitive."""
    d = x.datum
    total = TwistedTensor(d)
    for w, c in x.coeffs.items():
        acc = TwistedTensor.unit(d)
        for letter in w:
            g = TwistedTensor(
                d, {((letter,), ()): _ONE, ((), (letter,)): _ONE}
            )
            acc = acc * g
        total = total + TwistedTensor(d, {k: c * v for k, v in acc.coeffs.items()})
    return total


# ---------------------------------------------------------------------------
# bilinear forms
# ---------------------------------------------------------------------------


def tau(d, i, l):
    """The generator norm (b_{il}, b_{il})_L = 1/(1 - q_i**(2l))."""
    return (1 - ScalarQ.q(2 * l * d.s(i))).inverse()


_L_CACHE = {}
_K_CACHE = {}


def _weight_key(d, w):
    out = {}
    for i, l in w:
        out[i] = out.get(i, 0) + l
    return tuple(sorted(out.items()))


def _lusztig_words(d, w1, w2):
    if not w1:
        return _ONE if not w2 else _ZERO
    if _weight_key(d, w1) != _weight_key(d, w2):
        return _ZERO
    cache = _L_CACHE.setdefault(d, {})
    hit = cache.get((w1, w2))
    if hit is not None:
        return hit
    i, l = w1[0]
    total = _ZERO
    for rest, power in _letter_removals(d, i, l, w2, -1):
        total = total + power * tau(d, i, l) * _lusztig_words(d, w1[1:], rest)
    cache[(w1, w2)] = total
    cache[(w2, w1)] = total
    return total


def _kashiwara_words(d, w1, w2):
    if not w1:
        return _ONE if not w2 else _ZERO
    if _weight_key(d, w1) != _weight_key(d, w2):
        return _ZERO
    cache = _K_CACHE.setdefault(d, {})
    hit = cache.get((w1, w2))
    if hit is not None:
        return hit
    i, l = w1[0]
    total = _ZERO
    for rest, power in _letter_removals(d, i, l, w2, -1):
        total = total + power * _kashiwara_words(d, w1[1:], rest)
    cache[(w1, w2)] = total
    cache[(w2, w1)] = total
    return total


def lusztig_form(x, y):
    """The twisted-multiplicative symmetric form with generator norms tau."""
    total = _ZERO
    for w1, c1 in x.coeffs.items():
        for w2, c2 in y.coeffs.items():
            v = _lusztig_words(x.datum, w1, w2)
            if not v.is_zero:
                total = total + c1 * c2 * v
    return total


def kashiwara_form(x, y):
    """The symmetric form adjoint to left multiplication via e'_{il}."""
    total = _ZERO
    for w1, c1 in x.coeffs.items():
        for w2, c2 in y.coeffs.items():
            v = _kashiwara_words(x.datum, w1, w2)
            if not v.is_zero:
                total = total + c1 * c2 * v
    return total


def lusztig_form_on_tensor(t, y, z):
    """Pair a TwistedTensor against y (x) z factor-wise in the Lusztig form.

    Used for the cross-check (x, y z)_L = (coproduct(x), y (x) z)_L.
    """
    total = _ZERO
    d = t.datum
    for (w1, w2), c in t.coeffs.items():
        left = lusztig_form(FreeElement(d, {w1: _ONE}), y)
        if left.is_zero:
            continue
        right = lusztig_form(FreeElement(d, {w2: _ONE}), z)
        if right.is_zero:
            continue
        total = total + c * left * right
    return total
