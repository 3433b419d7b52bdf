"""Exact scalars in the field Q(q).

Every computation in this package runs on a single scalar type: ScalarQ,
an element of Q(q), the rational functions in one variable q with rational
coefficients.  A value is kept in the canonical factored form

    x = q**k * N(q) / D(q)

where N and D are polynomials over Q with N(0) != 0, D(0) = 1 and
gcd(N, D) = 1.  Zero is the special value with empty numerator.  The
canonical form makes equality structural and exposes the two quantities
the crystal-basis algorithms read off constantly:

* val0(x) = k, the order of vanishing at q = 0 (negative for a pole).
  The subring A_0 = {x : val0(x) >= 0} of functions regular at q = 0 is
  where all lattice arithmetic happens.
* eval0(x) = x(0), defined when val0(x) >= 0.

The bar involution q -> q**(-1) is a field automorphism; on canonical data
it reverses the coefficient order of N and D and flips the q-power.

Coefficients are arbitrary-precision rationals (fractions.Fraction); no
floating point appears anywhere.
"""

from __future__ import annotations

from fractions import Fraction

_F0 = Fraction(0)
_F1 = Fraction(1)

# ---------------------------------------------------------------------------
# polynomial helpers: tuples of Fraction, index = degree, no trailing zeros
# ---------------------------------------------------------------------------


def _trim(cs):
    n = len(cs)
    while n and not cs[n - 1]:
        n -= 1
    return tuple(cs[:n])


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pneg(a):
    return tuple(-c for c in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [_F0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if not ca:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return _trim(out)


def _pdivmod(a, b):
    """Exact division with remainder in Q[q]; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    deg_b = len(b) - 1
    lead = b[-1]
    quo = [_F0] * max(len(a) - deg_b, 0)
    for i in range(len(rem) - 1, deg_b - 1, -1):
        c = rem[i]
        if not c:
            continue
        f = c / lead
        quo[i - deg_b] = f
        for j, cb in enumerate(b):
            rem[i - deg_b + j] -= f * cb
    return _trim(quo), _trim(rem)


def _pgcd(a, b):
    """Monic gcd in Q[q]."""
    while b:
        a, b = b, _pdivmod(a, b)[1]
    if not a:
        return ()
    lead = a[-1]
    if lead != 1:
        a = tuple(c / lead for c in a)
    return a


def _pseries(num, den, terms):
    """First `terms` Taylor coefficients of num/den at q=0; den[0] must be 1."""
    out = []
    for t in range(terms):
        c = num[t] if t < len(num) else _F0
        for s in range(1, t + 1):
            if s < len(den):
                c -= den[s] * out[t - s]
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# ScalarQ
# ---------------------------------------------------------------------------


class ScalarQ:
    """A rational function of q over Q in canonical factored form.

    Instances are immutable and hashable; arithmetic always returns
    canonical values, so == is both structural equality and equality
    in the field Q(q).
    """

    __slots__ = ("_k", "_num", "_den")

    def __init__(self, value=0):
        k, num, den = _coerce_parts(value)
        self._k = k
        self._num = num
        self._den = den

    # -- construction --------------------------------------------------

    @staticmethod
    def _make(k, num, den):
        num = _trim(num)
        den = _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator in Q(q)")
        x = object.__new__(ScalarQ)
        if not num:
            x._k, x._num, x._den = 0, (), (_F1,)
            return x
        v = 0
        while not num[v]:
            v += 1
        w = 0
        while not den[w]:
            w += 1
        k += v - w
        num = num[v:]
        den = den[w:]
        g = _pgcd(num, den)
        if len(g) > 1:
            num = _pdivmod(num, g)[0]
            den = _pdivmod(den, g)[0]
        c = den[0]
        if c != 1:
            den = tuple(x0 / c for x0 in den)
            num = tuple(x0 / c for x0 in num)
        x._k, x._num, x._den = k, num, den
        return x

    @staticmethod
    def zero():
        return _ZERO

    @staticmethod
    def one():
        return _ONE

    @staticmethod
    def q(k=1):
        """The monomial q**k."""
        return ScalarQ._make(k, (_F1,), (_F1,))

    @staticmethod
    def of(c):
        """Constant scalar from an int or Fraction."""
        return ScalarQ._make(0, (Fraction(c),), (_F1,))

    @staticmethod
    def laurent(coeffs):
        """Laurent polynomial from a map exponent -> rational coefficient."""
        if not coeffs:
            return _ZERO
        lo = min(coeffs)
        hi = max(coeffs)
        cs = [Fraction(coeffs.get(e, 0)) for e in range(lo, hi + 1)]
        return ScalarQ._make(lo, cs, (_F1,))

    # -- structure -----------------------------------------------------

    @property
    def is_zero(self):
        return not self._num

    def __bool__(self):
        return bool(self._num)

    def val0(self):
        """Order of vanishing at q = 0.  Undefined for zero."""
        if not self._num:
            raise ValueError("val0 of the zero function is undefined")
        return self._k

    def eval0(self):
        """Value at q = 0; requires regularity there (val0 >= 0)."""
        if not self._num:
            return _F0
        if self._k < 0:
            raise ValueError("not regular at q = 0 (pole of order %d)" % -self._k)
        if self._k > 0:
            return _F0
        return self._num[0]

    def coeff(self, n):
        """Taylor coefficient of q**n in the expansion at q = 0."""
        if not self._num:
            return _F0
        if n < self._k:
            return _F0
        return _pseries(self._num, self._den, n - self._k + 1)[n - self._k]

    def bar(self):
        """The involution q -> q**(-1)."""
        if not self._num:
            return self
        num = tuple(reversed(self._num))
        den = tuple(reversed(self._den))
        k = -self._k - (len(self._num) - 1) + (len(self._den) - 1)
        return ScalarQ._make(k, num, den)

    def as_fraction(self):
        """The value as a rational number, if constant; None otherwise."""
        if not self._num:
            return _F0
        if self._k == 0 and len(self._num) == 1 and len(self._den) == 1:
            return self._num[0]
        return None

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._num:
            return other
        if not other._num:
            return self
        m = min(self._k, other._k)
        a = _pmul(_shift(self._num, self._k - m), other._den)
        b = _pmul(_shift(other._num, other._k - m), self._den)
        return ScalarQ._make(m, _padd(a, b), _pmul(self._den, other._den))

    __radd__ = __add__

    def __neg__(self):
        if not self._num:
            return self
        return ScalarQ._make(self._k, _pneg(self._num), self._den)

    def __sub__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._num or not other._num:
            return _ZERO
        return ScalarQ._make(
            self._k + other._k,
            _pmul(self._num, other._num),
            _pmul(self._den, other._den),
        )

    __rmul__ = __mul__

    def inverse(self):
        if not self._num:
            raise ZeroDivisionError("inverse of zero in Q(q)")
        return ScalarQ._make(-self._k, self._den, self._num)

    def __truediv__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return _ONE
        base = self if n > 0 else self.inverse()
        out = _ONE
        for _ in range(abs(n)):
            out = out * base
        return out

    # -- comparison and display -------------------------------------------

    def __eq__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return (
            self._k == other._k
            and self._num == other._num
            and self._den == other._den
        )

    def __hash__(self):
        return hash((self._k, self._num, self._den))

    def render(self):
        """Canonical display: expanded ascending-degree numerator/denominator.

        The q-power is folded into the numerator (k >= 0) or the
        denominator (k < 0), so the result is a plain ratio of
        polynomials, suitable for diffable golden files.
        """
        if not self._num:
            return "0"
        if self._k >= 0:
            num = _shift(self._num, self._k)
            den = self._den
        else:
            num = self._num
            den = _shift(self._den, -self._k)
        ns = _poly_str(num)
        if len(den) == 1 and den[0] == 1:
            return ns
        ds = _poly_str(den)
        if _term_count(num) > 1:
            ns = "(" + ns + ")"
        if _term_count(den) > 1:
            ds = "(" + ds + ")"
        return ns + "/" + ds

    def __str__(self):
        return self.render()

    def __repr__(self):
        return "ScalarQ(%s)" % self.render()


def _shift(poly, k):
    """Multiply a polynomial by q**k, k >= 0."""
    if not poly or k == 0:
        return poly
    return (_F0,) * k + tuple(poly)


def _term_count(poly):
    return sum(1 for c in poly if c)


def _poly_str(poly):
    parts = []
    for e, c in enumerate(poly):
        if not c:
            continue
        if e == 0:
            body = str(abs(c))
        elif abs(c) == 1:
            body = "q" if e == 1 else "q^%d" % e
        else:
            body = "%s*q" % abs(c) if e == 1 else "%s*q^%d" % (abs(c), e)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def _coerce_parts(value):
    if isinstance(value, ScalarQ):
        return value._k, value._num, value._den
    if isinstance(value, (int, Fraction)):
        c = Fraction(value)
        if not c:
            return 0, (), (_F1,)
        return 0, (c,), (_F1,)
    raise TypeError("cannot build ScalarQ from %r" % (value,))


def _as_scalar(value):
    if isinstance(value, ScalarQ):
        return value
    if isinstance(value, (int, Fraction)):
        return ScalarQ.of(value)
    return NotImplemented


_ZERO = ScalarQ._make(0, (), (_F1,))
_ONE = ScalarQ._make(0, (_F1,), (_F1,))

QVAR = ScalarQ.q()


# ---------------------------------------------------------------------------
# module-level operation names
# ---------------------------------------------------------------------------


def scalar_arith(x, y, op):
    """Field arithmetic dispatcher: op is one of add, sub, mul, div."""
    x = _as_scalar(x)
    y = _as_scalar(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError("unknown op %r" % (op,))


def bar(x):
    return _as_scalar(x).bar()


def val0(x):
    return _as_scalar(x).val0()


def eval0(x):
    return _as_scalar(x).eval0()


# ---------------------------------------------------------------------------
# q-integers
# ---------------------------------------------------------------------------


def q_int(n, s=1):
    """The balanced q-integer [n] in the variable q**s.

    [n] = (q**(sn) - q**(-sn)) / (q**s - q**(-s)), a symmetric Laurent
    polynomial; [0] = 0 and [-n] = -[n].
    """
    if n < 0:
        return -q_int(-n, s)
    return ScalarQ.laurent({s * (n - 1 - 2 * j): 1 for j in range(n)})


def q_factorial(n, s=1):
    out = _ONE
    for m in range(2, n + 1):
        out = out * q_int(m, s)
    return out


def q_binom(m, n, s=1):
    """Balanced q-binomial coefficient [m choose n]; m may be any integer."""
    if n < 0:
        return _ZERO
    out = _ONE
    for j in range(n):
        out = out * q_int(m - j, s)
    return out / q_factorial(n, s)
