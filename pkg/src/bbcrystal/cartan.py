"""Borcherds-Cartan data, weights, roots, and level combinatorics.

A Borcherds-Cartan datum is an even symmetrizable integer matrix (a_ij)
indexed by a finite vertex set I together with positive symmetrizers s_i:

* a_ii is 2 or a nonpositive even integer, a_ij <= 0 for i != j,
* diag(s) * a is symmetric.

Vertices split into the real ones (a_ii = 2) and the imaginary ones
(a_ii <= 0), with the isotropic subset a_ii = 0.  Real vertices carry a
single generator; imaginary vertices carry one generator per positive
level l, indexed here by GenIndex(i, l).

Weights are stored as an integer combination of fundamental weights minus
an explicit nonnegative root offset, so the pairing <h_i, lambda> is
always computable without fixing a basis of the full weight lattice.
"""

from __future__ import annotations

from typing import NamedTuple

from .qrat import ScalarQ, q_factorial, q_int

MAX_VERTICES = 64


class GenIndex(NamedTuple):
    """A generator label (vertex, level); real vertices only have level 1."""

    i: int
    l: int


# ---------------------------------------------------------------------------
# datum
# ---------------------------------------------------------------------------


class BorcherdsCartanDatum:
    """Immutable Borcherds-Cartan datum over an ordered finite vertex set."""

    __slots__ = ("vertices", "_a", "_s", "_pos")

    def __init__(self, vertices, a, s):
        self.vertices = tuple(vertices)
        self._a = tuple(tuple(int(x) for x in row) for row in a)
        self._s = tuple(int(x) for x in s)
        self._pos = {v: n for n, v in enumerate(self.vertices)}
        if len(self._pos) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        n = len(self.vertices)
        if len(self._a) != n or any(len(r) != n for r in self._a):
            raise ValueError("matrix shape does not match vertex count")
        if len(self._s) != n:
            raise ValueError("symmetrizer length does not match vertex count")

    def a(self, i, j):
        return self._a[self._pos[i]][self._pos[j]]

    def s(self, i):
        return self._s[self._pos[i]]

    def is_real(self, i):
        return self.a(i, i) == 2

    def is_imaginary(self, i):
        return self.a(i, i) <= 0

    def is_isotropic(self, i):
        return self.a(i, i) == 0

    def real_vertices(self):
        return tuple(i for i in self.vertices if self.is_real(i))

    def imaginary_vertices(self):
        return tuple(i for i in self.vertices if self.is_imaginary(i))

    def q_i(self, i):
        """q_i = q**s_i."""
        return ScalarQ.q(self.s(i))

    def q_ii(self, i):
        """q_(i) = q**((alpha_i, alpha_i)/2) = q_i**(a_ii/2)."""
        num = self.s(i) * self.a(i, i)
        if num % 2:
            raise ValueError("odd norm; datum is not even")
        return ScalarQ.q(num // 2)

    def bracket(self, i, n):
        """The q_i-integer [n]_i."""
        return q_int(n, self.s(i))

    def bracket_factorial(self, i, n):
        return q_factorial(n, self.s(i))

    def __eq__(self, other):
        return (
            isinstance(other, BorcherdsCartanDatum)
            and self.vertices == other.vertices
            and self._a == other._a
            and self._s == other._s
        )

    def __hash__(self):
        return hash((self.vertices, self._a, self._s))

    def __repr__(self):
        return "BorcherdsCartanDatum(%r, %r, %r)" % (
            list(self.vertices),
            [list(r) for r in self._a],
            list(self._s),
        )


def validate_datum(d):
    """Check the datum axioms; returns a list of violation messages."""
    report = []
    if len(d.vertices) > MAX_VERTICES:
        report.append("vertex count %d exceeds cap %d" % (len(d.vertices), MAX_VERTICES))
    for i in d.vertices:
        aii = d.a(i, i)
        if aii != 2 and (aii > 0 or aii % 2 != 0):
            report.append(
                "a_%s%s = %d violates: diagonal entries are 2 or nonpositive even"
                % (i, i, aii)
            )
        if d.s(i) <= 0:
            report.append("s_%s = %d violates: symmetrizers are positive" % (i, d.s(i)))
    for i in d.vertices:
        for j in d.vertices:
            if i != j and d.a(i, j) > 0:
                report.append(
                    "a_%s%s = %d violates: off-diagonal entries are <= 0"
                    % (i, j, d.a(i, j))
                )
    for i in d.vertices:
        for j in d.vertices:
            if i < j and d.s(i) * d.a(i, j) != d.s(j) * d.a(j, i):
                report.append(
                    "symmetrizability fails at (%s,%s): s_%s*a_%s%s = %d but s_%s*a_%s%s = %d"
                    % (i, j, i, i, j, d.s(i) * d.a(i, j), j, j, i, d.s(j) * d.a(j, i))
                )
    return report


# ---------------------------------------------------------------------------
# roots and weights
# ---------------------------------------------------------------------------


class RootVector:
    """A nonnegative integer combination of simple roots."""

    __slots__ = ("_items",)

    def __init__(self, coeffs=()):
        if hasattr(coeffs, "items"):
            coeffs = coeffs.items()
        items = []
        for i, c in coeffs:
            c = int(c)
            if c < 0:
                raise ValueError("negative root coefficient")
            if c:
                items.append((i, c))
        items.sort()
        self._items = tuple(items)

    def coeff(self, i):
        for j, c in self._items:
            if j == i:
                return c
        return 0

    def items(self):
        return self._items

    def support(self):
        return tuple(i for i, _ in self._items)

    def height(self):
        return sum(c for _, c in self._items)

    @property
    def is_zero(self):
        return not self._items

    def plus(self, i, l):
        d = dict(self._items)
        d[i] = d.get(i, 0) + l
        return RootVector(d)

    def minus(self, i, l):
        d = dict(self._items)
        d[i] = d.get(i, 0) - l
        return RootVector(d)

    def __add__(self, other):
        d = dict(self._items)
        for i, c in other._items:
            d[i] = d.get(i, 0) + c
        return RootVector(d)

    def __eq__(self, other):
        return isinstance(other, RootVector) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        if not self._items:
            return "RootVector()"
        return "RootVector(%s)" % dict(self._items)


class Weight:
    """An integral weight: fundamental combination minus a root offset."""

    __slots__ = ("_fund", "offset")

    def __init__(self, fund=(), offset=None):
        if hasattr(fund, "items"):
            fund = fund.items()
        items = tuple(sorted((i, int(m)) for i, m in fund if int(m)))
        self._fund = items
        self.offset = offset if offset is not None else RootVector()

    def fund_coeff(self, i):
        for j, m in self._fund:
            if j == i:
                return m
        return 0

    def fund_items(self):
        return self._fund

    def minus(self, i, l):
        return Weight(self._fund, self.offset.plus(i, l))

    def plus(self, i, l):
        return Weight(self._fund, self.offset.minus(i, l))

    def minus_root(self, alpha):
        return Weight(self._fund, self.offset + alpha)

    def __eq__(self, other):
        return (
            isinstance(other, Weight)
            and self._fund == other._fund
            and self.offset == other.offset
        )

    def __hash__(self):
        return hash((self._fund, self.offset))

    def __repr__(self):
        return "Weight(%s, %r)" % (dict(self._fund), self.offset)


def pairing(d, i, lam):
    """The integer <h_i, lambda>."""
    val = lam.fund_coeff(i)
    for j, c in lam.offset.items():
        val -= c * d.a(i, j)
    return val


def sym_form(d, i, j):
    """The symmetric form value (alpha_i, alpha_j) = s_i a_ij."""
    return d.s(i) * d.a(i, j)


def root_pairing(d, i, alpha):
    """<h_i, alpha> for a root vector alpha."""
    return sum(c * d.a(i, j) for j, c in alpha.items())


def dominant_weight(d, mults):
    """The dominant weight sum m_i * Lambda_i; rejects negative entries."""
    for i, m in dict(mults).items():
        if i not in d.vertices:
            raise ValueError("unknown vertex %r" % (i,))
        if m < 0:
            raise ValueError("multiplicity of Lambda_%s is negative" % (i,))
    return Weight(dict(mults))


def is_dominant(d, lam):
    return lam.offset.is_zero and all(pairing(d, i, lam) >= 0 for i in d.vertices)


# ---------------------------------------------------------------------------
# level combinatorics C_{i,l}
# ---------------------------------------------------------------------------


def _partitions(l, maxpart):
    if l == 0:
        yield ()
        return
    for first in range(min(l, maxpart), 0, -1):
        for rest in _partitions(l - first, first):
            yield (first,) + rest


def _compositions(l):
    if l == 0:
        yield ()
        return
    for first in range(1, l + 1):
        for rest in _compositions(l - first):
            yield (first,) + rest


def enumerate_compositions(d, i, l):
    """The indexing set C_{i,l}: partitions of l for isotropic vertices,
    compositions for non-isotropic imaginary ones, and the singleton (l,)
    for real vertices.  Deterministic descending-lexicographic order."""
    if l < 0:
        raise ValueError("negative level")
    if l == 0:
        return [()]
    if d.is_real(i):
        return [(l,)]
    if d.is_isotropic(i):
        return sorted(_partitions(l, l), reverse=True)
    return sorted(_compositions(l), reverse=True)


def part_multiplicity(c, l):
    """Number of parts of c equal to l."""
    return sum(1 for p in c if p == l)


# ---------------------------------------------------------------------------
# ready-made data
# ---------------------------------------------------------------------------


def sl2_datum():
    """Single real vertex."""
    return BorcherdsCartanDatum((1,), ((2,),), (1,))


def isotropic_datum(s1=1):
    """Single isotropic vertex (a_11 = 0)."""
    return BorcherdsCartanDatum((1,), ((0,),), (s1,))


def imaginary_datum(a11=-2, s1=1):
    """Single non-isotropic imaginary vertex."""
    if a11 >= 0 or a11 % 2:
        raise ValueError("need a negative even diagonal")
    return BorcherdsCartanDatum((1,), ((a11,),), (s1,))


def mixed_datum():
    """One real and one isotropic vertex joined by a = -1."""
    return BorcherdsCartanDatum((1, 2), ((2, -1), (-1, 0)), (1, 1))


# ---------------------------------------------------------------------------
# datum files
# ---------------------------------------------------------------------------


class DatumParseError(Exception):
    """A malformed datum file; carries the 1-based offending line."""

    def __init__(self, line, message):
        super().__init__("line %d: %s" % (line, message))
        self.line = line
        self.message = message


def parse_datum(text):
    """Parse the structured-text datum format.

    Records, one per line (blank lines and # comments ignored):

        vertex <id> a=<even int> s=<positive int>
        edge <i> <j> a=<int>

    Returns (datum, lines) where lines maps each record key to its line
    number: ("vertex", i) and ("edge", i, j).  Raises DatumParseError on
    malformed input; datum-axiom violations are left to validate_datum.
    """
    order = []
    diag = {}
    sym = {}
    off = {}
    lines = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        kind = fields[0]
        if kind == "vertex":
            if len(fields) != 4:
                raise DatumParseError(ln, "vertex record needs: vertex <id> a=<int> s=<int>")
            vid = _parse_int(ln, fields[1], "vertex id")
            a = _parse_kv(ln, fields[2], "a")
            s = _parse_kv(ln, fields[3], "s")
            if vid in diag:
                raise DatumParseError(ln, "vertex %d declared twice" % vid)
            order.append(vid)
            diag[vid] = a
            sym[vid] = s
            lines[("vertex", vid)] = ln
        elif kind == "edge":
            if len(fields) != 4:
                raise DatumParseError(ln, "edge record needs: edge <i> <j> a=<int>")
            i = _parse_int(ln, fields[1], "edge endpoint")
            j = _parse_int(ln, fields[2], "edge endpoint")
            a = _parse_kv(ln, fields[3], "a")
            if i == j:
                raise DatumParseError(ln, "diagonal entries belong to vertex records")
            if (i, j) in off:
                raise DatumParseError(ln, "edge (%d,%d) declared twice" % (i, j))
            off[(i, j)] = a
            lines[("edge", i, j)] = ln
        else:
            raise DatumParseError(ln, "unknown record kind %r" % kind)
    for (i, j), _ in off.items():
        for v in (i, j):
            if v not in diag:
                raise DatumParseError(
                    lines[("edge", i, j)], "edge mentions undeclared vertex %d" % v
                )
    if not order:
        raise DatumParseError(1, "no vertex records")
    n = len(order)
    a = [[0] * n for _ in range(n)]
    for p, i in enumerate(order):
        a[p][p] = diag[i]
        for r, j in enumerate(order):
            if i != j:
                a[p][r] = off.get((i, j), 0)
    datum = BorcherdsCartanDatum(order, a, [sym[i] for i in order])
    return datum, lines


def _parse_int(ln, token, what):
    try:
        return int(token)
    except ValueError:
        raise DatumParseError(ln, "%s %r is not an integer" % (what, token)) from None


def _parse_kv(ln, token, key):
    if not token.startswith(key + "="):
        raise DatumParseError(ln, "expected %s=<int>, got %r" % (key, token))
    return _parse_int(ln, token[len(key) + 1 :], key)


def validate_datum_lines(d, lines):
    """Like validate_datum but each message carries a source line number."""
    out = []
    for msg in validate_datum(d):
        line = 0
        for key, ln in lines.items():
            name = "a_%s%s" % (key[1], key[2]) if key[0] == "edge" else None
            if key[0] == "vertex" and ("a_%s%s" % (key[1], key[1]) in msg or "s_%s " % key[1] in msg):
                line = ln
                break
            if name and name in msg:
                line = ln
                break
            if key[0] == "edge" and "(%s,%s)" % (key[1], key[2]) in msg:
                line = ln
                break
        out.append((line, msg))
    return out
