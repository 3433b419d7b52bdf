"""Abstract crystals: axioms, tensor products, models, isomorphism search.

An abstract crystal is a set with a weight map, statistics eps_i and
phi_i valued in the integers extended by minus infinity, and partial
raising and lowering maps e_{il}, f_{il} subject to a short list of
axioms.  Real vertices only admit level l = 1; imaginary vertices admit
every positive level.

Crystals here store a finite generated portion.  Arrows are recorded in
dictionaries, and for each element and vertex we also record up to which
level the arrows are known: a stored None means the operator genuinely
gives zero, while a level beyond the recorded range is simply unknown
(usually because a height bound cut the construction off).  The axiom
checker and the isomorphism search only ever reason about stored arrows,
so truncation never manufactures spurious failures.

phi_i may be minus infinity in general; the sentinel used for it absorbs
addition and compares below every integer.  Every crystal constructed in
this module has finite statistics, but the checker treats the sentinel
correctly regardless.

Element identity is opaque.  Model crystals use level tuples, extracted
crystal graphs use node ids, tensor products use TensorElement pairs.
No operation inspects what is inside an element; everything flows
through the stored statistics and arrows.
"""

from __future__ import annotations

from .cartan import RootVector, Weight, enumerate_compositions, pairing

MINUS_INFINITY = float("-inf")


def _same_datum(d1, d2):
    return d1 is d2 or (
        d1.vertices == d2.vertices
        and all(d1.a(i, j) == d2.a(i, j) for i in d1.vertices for j in d1.vertices)
        and all(d1.s(i) == d2.s(i) for i in d1.vertices)
    )


def add_weights(w1, w2):
    """Sum of two weights, merging fundamental parts and root offsets."""
    fund = {}
    for i, m in w1.fund_items():
        fund[i] = fund.get(i, 0) + m
    for i, m in w2.fund_items():
        fund[i] = fund.get(i, 0) + m
    return Weight(fund, w1.offset + w2.offset)


class TensorElement:
    """An ordered pair of crystal elements."""

    __slots__ = ("b1", "b2")

    def __init__(self, b1, b2):
        self.b1 = b1
        self.b2 = b2

    def __eq__(self, other):
        return (
            isinstance(other, TensorElement)
            and self.b1 == other.b1
            and self.b2 == other.b2
        )

    def __hash__(self):
        return hash((TensorElement, self.b1, self.b2))

    def __repr__(self):
        return "TensorElement(%r, %r)" % (self.b1, self.b2)


class AbstractCrystal:
    """A finite stored portion of an abstract crystal.

    elements   tuple of element keys, in construction order
    source     the designated starting element (highest element in all
               the constructions provided here)
    weights    key -> Weight
    eps_map    (key, i) -> int or MINUS_INFINITY
    phi_map    (key, i) -> int or MINUS_INFINITY
    f_arrows   (key, i, l) -> key or None, stored for 1 <= l <= f_levels
    e_arrows   likewise, stored for 1 <= l <= e_levels
    f_levels   (key, i) -> highest stored lowering level
    e_levels   (key, i) -> highest stored raising level
    """

    __slots__ = (
        "datum",
        "elements",
        "source",
        "weights",
        "eps_map",
        "phi_map",
        "f_arrows",
        "e_arrows",
        "f_levels",
        "e_levels",
    )

    def __init__(
        self,
        datum,
        elements,
        source,
        weights,
        eps_map,
        phi_map,
        f_arrows,
        e_arrows,
        f_levels,
        e_levels,
    ):
        self.datum = datum
        self.elements = tuple(elements)
        self.source = source
        self.weights = weights
        self.eps_map = eps_map
        self.phi_map = phi_map
        self.f_arrows = f_arrows
        self.e_arrows = e_arrows
        self.f_levels = f_levels
        self.e_levels = e_levels

    def weight(self, b):
        return self.weights[b]

    def epsilon(self, b, i):
        return self.eps_map[(b, i)]

    def phi(self, b, i):
        return self.phi_map[(b, i)]

    def f_level(self, b, i):
        return self.f_levels.get((b, i), 0)

    def e_level(self, b, i):
        return self.e_levels.get((b, i), 0)

    def f(self, b, i, l=1):
        if l < 1 or l > self.f_level(b, i):
            raise KeyError("lowering arrow (%r, %r, %d) not stored" % (b, i, l))
        return self.f_arrows.get((b, i, l))

    def e(self, b, i, l=1):
        if l < 1 or l > self.e_level(b, i):
            raise KeyError("raising arrow (%r, %r, %d) not stored" % (b, i, l))
        return self.e_arrows.get((b, i, l))

    def copy(self):
        """A shallow copy whose dictionaries can be mutated independently."""
        return AbstractCrystal(
            self.datum,
            self.elements,
            self.source,
            dict(self.weights),
            dict(self.eps_map),
            dict(self.phi_map),
            dict(self.f_arrows),
            dict(self.e_arrows),
            dict(self.f_levels),
            dict(self.e_levels),
        )


def _crystal_height(crystal, b):
    return crystal.weights[b].offset.height()


def model_crystal(d, m=None, max_height=4):
    """The rank-1 imaginary model crystal on level tuples.

    With a highest multiplicity m the elements model b_{i,c} applied to a
    highest vector of weight m Lambda_i, so wt(c) = m Lambda_i - |c|
    alpha_i, eps_i = 0 and phi_i = m - |c| a_ii.  Without m the same
    tuples model the crystal of the rank-1 negative half, with wt(c) =
    -|c| alpha_i.  Lowering inserts a part (prepends, for a non-isotropic
    vertex) and raising removes one, or gives zero when no part matches.
    """
    if len(d.vertices) != 1:
        raise ValueError("model crystal needs a rank-1 datum")
    i = d.vertices[0]
    if d.is_real(i):
        raise ValueError("real vertex: use sl2_string for the rank-1 string")
    if m is not None and (not isinstance(m, int) or m < 0):
        raise ValueError("highest multiplicity must be a nonnegative integer")
    iso = d.a(i, i) == 0
    top = Weight(() if m is None else ((i, m),))

    elements = []
    for n in range(max_height + 1):
        elements.extend(enumerate_compositions(d, i, n))

    weights = {}
    eps_map = {}
    phi_map = {}
    f_arrows = {}
    e_arrows = {}
    f_levels = {}
    e_levels = {}
    for c in elements:
        n = sum(c)
        wt = top.minus(i, n) if n else top
        weights[c] = wt
        eps_map[(c, i)] = 0
        phi_map[(c, i)] = pairing(d, i, wt)
        f_levels[(c, i)] = max_height - n
        for l in range(1, max_height - n + 1):
            if iso:
                f_arrows[(c, i, l)] = tuple(sorted(c + (l,), reverse=True))
            else:
                f_arrows[(c, i, l)] = (l,) + c
        e_levels[(c, i)] = n
        for l in range(1, n + 1):
            if iso:
                if l in c:
                    parts = list(c)
                    parts.remove(l)
                    e_arrows[(c, i, l)] = tuple(parts)
                else:
                    e_arrows[(c, i, l)] = None
            else:
                e_arrows[(c, i, l)] = c[1:] if c[0] == l else None

    return AbstractCrystal(
        d, elements, (), weights, eps_map, phi_map,
        f_arrows, e_arrows, f_levels, e_levels,
    )


def sl2_string(d, m=None, max_height=None):
    """The rank-1 real string crystal, of highest multiplicity m.

    Elements are 0..m with eps = k and phi = m - k; the string ends with
    a genuine zero arrow.  Without m the string models the rank-1
    crystal of the negative half instead (eps = k, phi = -k) and is
    truncated at max_height with the final arrow left unknown.
    """
    if len(d.vertices) != 1:
        raise ValueError("string crystal needs a rank-1 datum")
    i = d.vertices[0]
    if not d.is_real(i):
        raise ValueError("imaginary vertex: use model_crystal instead")
    if m is None:
        if max_height is None:
            raise ValueError("the full string is infinite: give a height bound")
        last = max_height
        closed = False
    else:
        if not isinstance(m, int) or m < 0:
            raise ValueError("highest multiplicity must be a nonnegative integer")
        last = m if max_height is None else min(m, max_height)
        closed = last == m
    top = Weight(() if m is None else ((i, m),))

    elements = list(range(last + 1))
    weights = {}
    eps_map = {}
    phi_map = {}
    f_arrows = {}
    e_arrows = {}
    f_levels = {}
    e_levels = {}
    for k in elements:
        weights[k] = top.minus(i, k) if k else top
        eps_map[(k, i)] = k
        phi_map[(k, i)] = pairing(d, i, weights[k]) + k
        if k < last:
            f_levels[(k, i)] = 1
            f_arrows[(k, i, 1)] = k + 1
        elif closed:
            f_levels[(k, i)] = 1
            f_arrows[(k, i, 1)] = None
        else:
            f_levels[(k, i)] = 0
        e_levels[(k, i)] = 1
        e_arrows[(k, i, 1)] = k - 1 if k else None

    return AbstractCrystal(
        d, elements, 0, weights, eps_map, phi_map,
        f_arrows, e_arrows, f_levels, e_levels,
    )


def graph_crystal(graph):
    """Wrap a computed crystal graph as an abstract crystal.

    Works for both the B(infinity) graph and a highest-weight module
    graph: either exposes nodes, weight, epsilon, phi, arrow_levels and
    the two edge dictionaries.  Lowering arrows are stored for the
    levels the builder explored, raising arrows for every level that
    stays within the graph.
    """
    d = graph.datum
    elements = [node.id for node in graph.nodes]
    weights = {}
    eps_map = {}
    phi_map = {}
    f_arrows = {}
    e_arrows = {}
    f_levels = {}
    e_levels = {}
    for b in elements:
        h = graph.nodes[b].root.height()
        weights[b] = graph.weight(b)
        for i in d.vertices:
            eps_map[(b, i)] = graph.epsilon(b, i)
            phi_map[(b, i)] = graph.phi(b, i)
            levels = graph.arrow_levels(i, h)
            f_levels[(b, i)] = len(levels)
            for l in levels:
                f_arrows[(b, i, l)] = graph.f_edges.get((b, i, l))
            up = 1 if d.is_real(i) else h
            e_levels[(b, i)] = up
            for l in range(1, up + 1):
                e_arrows[(b, i, l)] = graph.e_edges.get((b, i, l))

    return AbstractCrystal(
        d, elements, 0, weights, eps_map, phi_map,
        f_arrows, e_arrows, f_levels, e_levels,
    )


def tensor(crystal1, crystal2):
    """The tensor product crystal on all pairs of stored elements.

    Statistics follow the tensor formulas: eps is the larger of eps(b1)
    and eps(b2) - <h_i, wt(b1)>, phi the larger of phi(b1) + <h_i,
    wt(b2)> and phi(b2).  At a real vertex the lowering arrow acts on
    the left factor when phi(b1) > eps(b2) and on the right otherwise,
    and raising acts on the left when phi(b1) >= eps(b2).  At an
    imaginary vertex lowering uses the same comparison as the real case,
    while raising acts on the left when phi(b1) > eps(b2) - l a_ii, on
    the right when phi(b1) <= eps(b2), and gives zero in the window in
    between.  An arrow is stored only when the factor it delegates to
    has the arrow stored (the zero window needs nothing).
    """
    if not _same_datum(crystal1.datum, crystal2.datum):
        raise ValueError("tensor factors must share a datum")
    d = crystal1.datum

    elements = []
    weights = {}
    eps_map = {}
    phi_map = {}
    f_arrows = {}
    e_arrows = {}
    f_levels = {}
    e_levels = {}

    for b1 in crystal1.elements:
        for b2 in crystal2.elements:
            pair = TensorElement(b1, b2)
            elements.append(pair)
            wt1 = crystal1.weights[b1]
            wt2 = crystal2.weights[b2]
            weights[pair] = add_weights(wt1, wt2)
            for i in d.vertices:
                eps1 = crystal1.eps_map[(b1, i)]
                eps2 = crystal2.eps_map[(b2, i)]
                phi1 = crystal1.phi_map[(b1, i)]
                phi2 = crystal2.phi_map[(b2, i)]
                m1 = pairing(d, i, wt1)
                m2 = pairing(d, i, wt2)
                eps_map[(pair, i)] = max(eps1, eps2 - m1)
                phi_map[(pair, i)] = max(phi1 + m2, phi2)

                on_left = phi1 > eps2
                if on_left:
                    cap = crystal1.f_level(b1, i)
                else:
                    cap = crystal2.f_level(b2, i)
                f_levels[(pair, i)] = cap
                for l in range(1, cap + 1):
                    if on_left:
                        nxt = crystal1.f_arrows[(b1, i, l)]
                        f_arrows[(pair, i, l)] = (
                            None if nxt is None else TensorElement(nxt, b2)
                        )
                    else:
                        nxt = crystal2.f_arrows[(b2, i, l)]
                        f_arrows[(pair, i, l)] = (
                            None if nxt is None else TensorElement(b1, nxt)
                        )

                aii = d.a(i, i)
                cap = max(crystal1.e_level(b1, i), crystal2.e_level(b2, i))
                stored = 0
                for l in range(1, cap + 1):
                    if d.is_real(i):
                        raise_left = phi1 >= eps2
                        window = False
                    else:
                        raise_left = phi1 > eps2 - l * aii
                        window = eps2 < phi1 <= eps2 - l * aii
                    if window:
                        e_arrows[(pair, i, l)] = None
                    elif raise_left:
                        if l > crystal1.e_level(b1, i):
                            break
                        nxt = crystal1.e_arrows[(b1, i, l)]
                        e_arrows[(pair, i, l)] = (
                            None if nxt is None else TensorElement(nxt, b2)
                        )
                    else:
                        if l > crystal2.e_level(b2, i):
                            break
                        nxt = crystal2.e_arrows[(b2, i, l)]
                        e_arrows[(pair, i, l)] = (
                            None if nxt is None else TensorElement(b1, nxt)
                        )
                    stored = l
                e_levels[(pair, i)] = stored

    return AbstractCrystal(
        d,
        elements,
        TensorElement(crystal1.source, crystal2.source),
        weights,
        eps_map,
        phi_map,
        f_arrows,
        e_arrows,
        f_levels,
        e_levels,
    )


def _stat_violations(crystal, b, i, l, target, lower):
    """Statistic axioms (d) and (e) along one stored arrow."""
    d = crystal.datum
    out = []
    eps0 = crystal.eps_map[(b, i)]
    phi0 = crystal.phi_map[(b, i)]
    eps1 = crystal.eps_map[(target, i)]
    phi1 = crystal.phi_map[(target, i)]
    if d.is_real(i):
        axiom = "d1" if lower else "d2"
        step = 1 if lower else -1
        if eps1 != eps0 + step:
            out.append((axiom, b, "eps across (%r, %d): %r vs %r" % (i, l, eps0, eps1)))
        if phi1 != phi0 - step:
            out.append((axiom, b, "phi across (%r, %d): %r vs %r" % (i, l, phi0, phi1)))
    else:
        axiom = "e1" if lower else "e2"
        shift = -l * d.a(i, i) if lower else l * d.a(i, i)
        if eps1 != eps0:
            out.append((axiom, b, "eps across (%r, %d): %r vs %r" % (i, l, eps0, eps1)))
        if phi1 != phi0 + shift:
            out.append((axiom, b, "phi across (%r, %d): %r vs %r" % (i, l, phi0, phi1)))
    return out


def validate_axioms(crystal, bound=None):
    """Check the crystal axioms on the stored portion.

    Returns a list of (axiom, element, message) triples, one per
    violation, empty when everything stored is consistent.  Axiom labels
    are "a" (weights across arrows), "b" (phi = pairing + eps), "c"
    (raising and lowering mutually inverse), "d1"/"d2" (real statistics
    under lowering/raising), "e1"/"e2" (the imaginary counterparts) and
    "f" (zero maps where phi is minus infinity).  With a bound, only
    elements whose weight lies at most that far below the source weight
    are examined.
    """
    d = crystal.datum
    report = []
    for b in crystal.elements:
        if bound is not None and _crystal_height(crystal, b) > bound:
            continue
        wt = crystal.weights[b]
        for i in d.vertices:
            eps0 = crystal.eps_map[(b, i)]
            phi0 = crystal.phi_map[(b, i)]
            expect = eps0 + pairing(d, i, wt)
            if phi0 != expect:
                report.append(
                    ("b", b, "phi at %r is %r, pairing gives %r" % (i, phi0, expect))
                )
            if phi0 == MINUS_INFINITY:
                for l in range(1, crystal.f_level(b, i) + 1):
                    if crystal.f_arrows[(b, i, l)] is not None:
                        report.append(("f", b, "lowering (%r, %d) not zero" % (i, l)))
                for l in range(1, crystal.e_level(b, i) + 1):
                    if crystal.e_arrows[(b, i, l)] is not None:
                        report.append(("f", b, "raising (%r, %d) not zero" % (i, l)))
            for l in range(1, crystal.f_level(b, i) + 1):
                target = crystal.f_arrows[(b, i, l)]
                if target is None:
                    continue
                if crystal.weights[target] != wt.minus(i, l):
                    report.append(
                        ("a", b, "weight drop across lowering (%r, %d)" % (i, l))
                    )
                back = (
                    crystal.e_arrows.get((target, i, l))
                    if crystal.e_level(target, i) >= l
                    else None
                )
                if back != b:
                    report.append(
                        ("c", b, "raising does not invert lowering (%r, %d)" % (i, l))
                    )
                report.extend(_stat_violations(crystal, b, i, l, target, True))
            for l in range(1, crystal.e_level(b, i) + 1):
                target = crystal.e_arrows[(b, i, l)]
                if target is None:
                    continue
                if crystal.weights[target] != wt.plus(i, l):
                    report.append(
                        ("a", b, "weight gain across raising (%r, %d)" % (i, l))
                    )
                back = (
                    crystal.f_arrows.get((target, i, l))
                    if crystal.f_level(target, i) >= l
                    else None
                )
                if back != b:
                    report.append(
                        ("c", b, "lowering does not invert raising (%r, %d)" % (i, l))
                    )
                report.extend(_stat_violations(crystal, b, i, l, target, False))
    return report


class Mismatch:
    """Why two crystals failed to match, with the offending elements."""

    __slots__ = ("left", "right", "kind", "detail")

    def __init__(self, left, right, kind, detail):
        self.left = left
        self.right = right
        self.kind = kind
        self.detail = detail

    def __repr__(self):
        return "Mismatch(%r, %r, %r, %r)" % (
            self.left, self.right, self.kind, self.detail,
        )


def _match_stats(crystal1, crystal2, x, y):
    if crystal1.weights[x] != crystal2.weights[y]:
        return Mismatch(x, y, "weight", "%r vs %r" % (
            crystal1.weights[x], crystal2.weights[y]))
    for i in crystal1.datum.vertices:
        if crystal1.eps_map[(x, i)] != crystal2.eps_map[(y, i)]:
            return Mismatch(x, y, "eps", "at vertex %r" % (i,))
        if crystal1.phi_map[(x, i)] != crystal2.phi_map[(y, i)]:
            return Mismatch(x, y, "phi", "at vertex %r" % (i,))
    return None


def find_isomorphism(crystal1, crystal2, bound=None, source1=None, source2=None):
    """Match two crystals from their sources, breadth first.

    Arrows force the pairing, so the walk either constructs the unique
    isomorphism between the explored portions (returned as a dict) or
    stops at the first disagreement (returned as a Mismatch).  Arrows
    are compared up to the level both sides have stored; with a bound,
    elements more than that many arrow steps from the source have their
    statistics checked but their outgoing arrows ignored.
    """
    if not _same_datum(crystal1.datum, crystal2.datum):
        raise ValueError("isomorphism needs a common datum")
    d = crystal1.datum
    x0 = crystal1.source if source1 is None else source1
    y0 = crystal2.source if source2 is None else source2

    bad = _match_stats(crystal1, crystal2, x0, y0)
    if bad is not None:
        return bad
    forward = {x0: y0}
    backward = {y0: x0}
    queue = [(x0, y0, 0)]
    while queue:
        x, y, depth = queue.pop(0)
        if bound is not None and depth >= bound:
            continue
        for i in d.vertices:
            for arrows1, arrows2, levels, kind in (
                (crystal1.f_arrows, crystal2.f_arrows,
                 min(crystal1.f_level(x, i), crystal2.f_level(y, i)), "f"),
                (crystal1.e_arrows, crystal2.e_arrows,
                 min(crystal1.e_level(x, i), crystal2.e_level(y, i)), "e"),
            ):
                for l in range(1, levels + 1):
                    nxt1 = arrows1[(x, i, l)]
                    nxt2 = arrows2[(y, i, l)]
                    if (nxt1 is None) != (nxt2 is None):
                        return Mismatch(
                            x, y, "arrow",
                            "%s arrow (%r, %d) is zero on one side only" % (kind, i, l),
                        )
                    if nxt1 is None:
                        continue
                    seen1 = forward.get(nxt1)
                    seen2 = backward.get(nxt2)
                    if seen1 is None and seen2 is None:
                        bad = _match_stats(crystal1, crystal2, nxt1, nxt2)
                        if bad is not None:
                            return bad
                        forward[nxt1] = nxt2
                        backward[nxt2] = nxt1
                        queue.append((nxt1, nxt2, depth + 1))
                    elif seen1 != nxt2:
                        return Mismatch(
                            nxt1, nxt2, "arrow",
                            "%s arrow (%r, %d) conflicts with earlier matching"
                            % (kind, i, l),
                        )
    return forward
