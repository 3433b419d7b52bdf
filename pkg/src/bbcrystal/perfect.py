"""Lower and upper perfect bases over crystal-limit data.

A perfect space is a weight-graded vector space with one lowering (or
raising) endomorphism per generator index.  The theory is q-free, so
all matrices live over plain rationals; data extracted from the q-side
of the package enters through residues at q = 0.

A candidate basis is lower perfect when every lowering operator acts
triangularly with respect to the image filtration f^n V: applying f to
a basis vector of filtration depth d lands, up to one scalar and up to
an error d+2 levels deep, on a single other basis vector.  The checker
verifies exactly that, extracts the induced maps b -> b' together with
their constants, and the induced crystal then forgets everything except
those maps and the depths.

Truncated data is handled by tracking which maps are actually known: a
map out of a weight is stored only when its entire target lies inside
the computed window, and the checker never manufactures a verdict from
an unknown arrow.  Raising data derived from lowering data (and the
whole upper mode reached through dualize) is always complete, because
raising walks toward the highest weight.

The injectivity clause is certified on the stored window: two basis
vectors of equal weight must differ in some known image.  Across
different weights only all-zero image tuples could collide, which the
checker tests when the space is marked closed (no truncation).
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .cartan import Weight, pairing
from .crystal import AbstractCrystal
from .qrat import ScalarQ

ZERO = Fraction(0)
ONE = Fraction(1)


def _to_fraction(entry):
    if isinstance(entry, ScalarQ):
        return entry.eval0()
    return Fraction(entry)


def _raise_weight(mu, i, l):
    """mu + l alpha_i, or None when that leaves the weight cone."""
    try:
        return mu.plus(i, l)
    except ValueError:
        return None


class PerfectSpace:
    """Weight-graded rational vector space with graded (co)lowering maps.

    dims maps each weight to its dimension; maps sends (i, l, mu) to the
    matrix (tuple of row tuples) of the operator out of V_mu, with
    target V_{mu - l alpha_i} in lower mode and V_{mu + l alpha_i} in
    upper mode.  A key missing from maps means the operator out of that
    weight is unknown there, not zero; a weight missing from dims is a
    genuine zero space.
    """

    __slots__ = ("datum", "mode", "dims", "maps", "levels", "closed", "_spans")

    def __init__(self, datum, mode, dims, maps, closed=False):
        if mode not in ("lower", "upper"):
            raise ValueError("mode must be 'lower' or 'upper'")
        self.datum = datum
        self.mode = mode
        self.dims = dict(dims)
        self.maps = {}
        self.closed = closed
        self._spans = {}
        levels = {}
        for (i, l, mu), rows in maps.items():
            rows = tuple(tuple(_to_fraction(x) for x in row) for row in rows)
            target = self.target_weight(mu, i, l)
            want_rows = self.dims.get(target, 0)
            want_cols = self.dims.get(mu, 0)
            if len(rows) != want_rows or any(len(r) != want_cols for r in rows):
                raise ValueError(
                    "matrix at (%r, %d, %r) has shape %dx%d, expected %dx%d"
                    % (i, l, mu, len(rows), len(rows[0]) if rows else 0,
                       want_rows, want_cols)
                )
            self.maps[(i, l, mu)] = rows
            levels[i] = max(levels.get(i, 0), l)
        self.levels = levels

    def target_weight(self, mu, i, l):
        """Weight hit by the (i,l) operator, None when above the support."""
        return mu.minus(i, l) if self.mode == "lower" else _raise_weight(mu, i, l)

    def source_weight(self, mu, i, l):
        """Weight feeding V_mu under the operator, None when above."""
        return _raise_weight(mu, i, l) if self.mode == "lower" else mu.minus(i, l)

    def known(self, i, l, mu):
        return (i, l, mu) in self.maps

    def apply(self, i, l, mu, coords):
        """Image of a weight-mu vector under the (i,l) operator."""
        rows = self.maps[(i, l, mu)]
        return tuple(linalg.matvec(rows, list(coords), ZERO))

    def power_span(self, i, l, mu, n):
        """Rows spanning the image of the n-fold (i,l) operator in V_mu.

        In lower mode this is f_{il}^n V at weight mu; in upper mode the
        image of e_{il}^n.  The composite walks weights on the source
        side, which always stay inside the stored window, so a missing
        source weight genuinely contributes zero.
        """
        key = (i, l, mu, n)
        got = self._spans.get(key)
        if got is not None:
            return got
        dim = self.dims.get(mu, 0)
        if mu is None or not dim:
            span = []
        elif n == 0:
            span = [
                [ONE if j == k else ZERO for j in range(dim)] for k in range(dim)
            ]
        else:
            src = self.source_weight(mu, i, l)
            if src is None or src not in self.dims or not self.known(i, l, src):
                # unknown is impossible here for well-formed data: the
                # source side walks toward the highest weight
                span = []
            else:
                inner = self.power_span(i, l, src, n - 1)
                rows = self.maps[(i, l, src)]
                span = [
                    linalg.matvec(rows, list(v), ZERO) for v in inner
                ] if rows else []
                span = [v for v in span if any(v)]
                if span:
                    red, pivots = linalg.rref(span, ZERO)
                    span = red[: len(pivots)]
        self._spans[key] = span
        return span


def d_lower(space, i, l, v):
    """Depth of a nonzero homogeneous vector in the image filtration.

    v is a (weight, coords) pair.  Returns the largest n with v in the
    image of the n-fold lowering operator.
    """
    if space.mode != "lower":
        raise ValueError("d_lower needs a lower-mode space")
    return _depth(space, i, l, v)


def _depth(space, i, l, v):
    mu, coords = v
    if not any(coords):
        raise ValueError("the zero vector has no filtration depth")
    n = 0
    while True:
        span = space.power_span(i, l, mu, n + 1)
        if not span or linalg.express(span, list(coords), ZERO) is None:
            return n
        n += 1


def _d_upper(space, i, l, v):
    """max { n : the n-fold raising operator does not kill v }."""
    mu, coords = v
    if not any(coords):
        raise ValueError("the zero vector has no filtration depth")
    n = 0
    while space.known(i, l, mu):
        nxt = space.apply(i, l, mu, coords)
        if not any(nxt):
            return n
        mu = space.target_weight(mu, i, l)
        coords = nxt
        n += 1
    return n


class CandidateBasis:
    """A weight-graded family of coordinate vectors with opaque labels."""

    __slots__ = ("labels", "weight_of", "coords", "by_weight")

    def __init__(self, entries):
        self.labels = tuple(label for label, _, _ in entries)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate basis labels")
        self.weight_of = {}
        self.coords = {}
        self.by_weight = {}
        for label, mu, vec in entries:
            self.weight_of[label] = mu
            self.coords[label] = tuple(_to_fraction(x) for x in vec)
            self.by_weight.setdefault(mu, []).append(label)

    def rescaled(self, factors):
        """A copy with each vector multiplied by its (nonzero) factor."""
        entries = []
        for label in self.labels:
            c = _to_fraction(factors[label])
            if not c:
                raise ValueError("rescaling factor must be nonzero")
            entries.append(
                (label, self.weight_of[label],
                 tuple(c * x for x in self.coords[label]))
            )
        return CandidateBasis(entries)


class PerfectReport:
    """Outcome of a perfect-basis verification.

    maps holds the extracted arrows (label, i, l) -> label or None for
    every examined triple; constants the scalars c for the nonzero
    arrows; depths the filtration depth of each basis vector per (i,l).
    violations is a list of (clause, witness, message).
    """

    __slots__ = ("space", "basis", "maps", "constants", "depths", "violations")

    def __init__(self, space, basis, maps, constants, depths, violations):
        self.space = space
        self.basis = basis
        self.maps = maps
        self.constants = constants
        self.depths = depths
        self.violations = violations

    @property
    def ok(self):
        return not self.violations


def _reduce_rows(span):
    """rref rows plus pivot columns, for reducing vectors modulo a span."""
    if not span:
        return [], []
    red, pivots = linalg.rref(span, ZERO)
    return red[: len(pivots)], pivots


def _reduce_mod(red, pivots, vec):
    out = list(vec)
    for row, c in zip(red, pivots):
        if out[c]:
            f = out[c]
            out = [a - f * b for a, b in zip(out, row)]
    return out


def _proportion(target, candidate):
    """The scalar c with target = c * candidate, or None."""
    c = None
    for a, b in zip(target, candidate):
        if b:
            c = a / b
            break
        if a:
            return None
    if c is None:
        return None
    if all(a == c * b for a, b in zip(target, candidate)):
        return c
    return None


def _verify(space, basis):
    violations = []
    maps = {}
    constants = {}
    depths = {}

    # clause (i): per-weight bases must match the graded dimensions
    seen_dims = {mu: len(labels) for mu, labels in basis.by_weight.items()}
    for mu, dim in space.dims.items():
        labels = basis.by_weight.get(mu, [])
        if len(labels) != dim:
            violations.append(
                ("i", mu, "%d vectors at a weight of dimension %d"
                 % (len(labels), dim))
            )
            continue
        span = [list(basis.coords[label]) for label in labels]
        if linalg.rank(span, ZERO) != dim:
            violations.append(("i", mu, "vectors not independent"))
    for mu in seen_dims:
        if mu not in space.dims:
            violations.append(("i", mu, "vectors at a zero weight space"))
    if violations:
        return PerfectReport(space, basis, maps, constants, depths, violations)

    keys_at = {}
    for (i, l, at) in space.maps:
        keys_at.setdefault(at, []).append((i, l))

    lower = space.mode == "lower"
    for label in basis.labels:
        mu = basis.weight_of[label]
        vec = basis.coords[label]
        for (i, l) in sorted(keys_at.get(mu, [])):
            depth = _depth(space, i, l, (mu, vec)) if lower else _d_upper(
                space, i, l, (mu, vec))
            depths[(label, i, l)] = depth
            target_mu = space.target_weight(mu, i, l)
            image = (
                space.apply(i, l, mu, vec)
                if space.dims.get(target_mu, 0)
                else ()
            )
            if lower:
                correction = space.power_span(i, l, target_mu, depth + 2)
            elif depth >= 1:
                kernel_map = _power_matrix(space, i, l, target_mu, depth - 1)
                correction = (
                    linalg.nullspace(kernel_map, ZERO, ONE)
                    if kernel_map is not None
                    else []
                )
            else:
                correction = []
            red, pivots = _reduce_rows(correction)
            image_red = _reduce_mod(red, pivots, image) if image else []
            if not any(image_red):
                maps[(label, i, l)] = None
                if not lower and depth > 0:
                    violations.append(
                        ("ii", label,
                         "depth %d vector raises into the correction space"
                         " at (%r, %d)" % (depth, i, l))
                    )
                continue
            matches = []
            for other in basis.by_weight.get(target_mu, []):
                other_red = _reduce_mod(red, pivots, basis.coords[other])
                c = _proportion(image_red, other_red)
                if c:
                    matches.append((other, c))
            if len(matches) == 1:
                other, c = matches[0]
                maps[(label, i, l)] = other
                constants[(label, i, l)] = c
            elif not matches:
                violations.append(
                    ("ii", label,
                     "image at (%r, %d) is no multiple of a basis vector"
                     " modulo depth %d" % (i, l, depth + 2))
                )
            else:
                violations.append(
                    ("ii", label,
                     "image at (%r, %d) matches %d basis vectors"
                     % (i, l, len(matches)))
                )

    # clause (iii): equal-weight vectors must differ in some known image
    for mu, labels in basis.by_weight.items():
        keys = keys_at.get(mu, [])
        for a in range(len(labels)):
            for b in range(a + 1, len(labels)):
                la, lb = labels[a], labels[b]
                if keys and all(
                    (la, i, l) in maps
                    and (lb, i, l) in maps
                    and maps[(la, i, l)] == maps[(lb, i, l)]
                    for (i, l) in keys
                ):
                    violations.append(
                        ("iii", la, "same images as %r at every known (i,l)"
                         % (lb,))
                    )
    if space.closed:
        dead = [
            label for label in basis.labels
            if all(v is None for (lb, _, _), v in maps.items() if lb == label)
        ]
        if len(dead) > 1:
            violations.append(
                ("iii", dead[0], "several vectors with all images zero: %r"
                 % (dead,))
            )

    return PerfectReport(space, basis, maps, constants, depths, violations)


def _power_matrix(space, i, l, mu, n):
    """Matrix of the n-fold operator out of V_mu, or None if V_mu = 0."""
    dim = space.dims.get(mu, 0)
    if not dim:
        return None
    rows = [[ONE if j == k else ZERO for j in range(dim)] for k in range(dim)]
    at = mu
    for _ in range(n):
        if not space.known(i, l, at):
            break
        step = space.maps[(i, l, at)]
        rows = linalg.matmul([list(r) for r in step], rows, ZERO) if step else []
        at = space.target_weight(at, i, l)
        if not rows:
            break
    if not rows:
        rows = [[ZERO] * dim]
    return rows


def verify_lower_perfect(space, basis):
    """Check the lower perfect basis conditions and extract the maps."""
    if space.mode != "lower":
        raise ValueError("verify_lower_perfect needs a lower-mode space")
    return _verify(space, basis)


def verify_upper_perfect(space, basis):
    """Check the upper perfect basis conditions and extract the maps."""
    if space.mode != "upper":
        raise ValueError("verify_upper_perfect needs an upper-mode space")
    return _verify(space, basis)


# ---------------------------------------------------------------------------
# induced crystal
# ---------------------------------------------------------------------------


def induced_crystal(report):
    """The abstract crystal a passing perfect basis induces.

    In lower mode the extracted maps are the lowering arrows and raising
    inverts them; in upper mode the roles swap.  Real-vertex epsilon is
    the depth at level 1, imaginary epsilon is zero, and phi follows
    from the weight pairing.
    """
    if not report.ok:
        raise ValueError("cannot induce a crystal from a failing report")
    space = report.space
    basis = report.basis
    d = space.datum
    lower = space.mode == "lower"

    elements = list(basis.labels)
    weights = dict(basis.weight_of)
    eps_map = {}
    phi_map = {}
    down = {}
    down_levels = {}
    up = {}
    up_levels = {}

    depth_fn = _depth if lower else _d_upper
    for label in elements:
        mu = weights[label]
        for i in d.vertices:
            if d.is_real(i):
                eps = report.depths.get((label, i, 1))
                if eps is None:
                    eps = depth_fn(space, i, 1, (mu, basis.coords[label]))
            else:
                eps = 0
            eps_map[(label, i)] = eps
            phi_map[(label, i)] = eps + pairing(d, i, mu)
            cap = 0
            while space.known(i, cap + 1, mu):
                cap += 1
            down_levels[(label, i)] = cap
            for l in range(1, cap + 1):
                down[(label, i, l)] = report.maps[(label, i, l)]

    horizon = max((mu.offset.height() for mu in space.dims), default=0)
    for label in elements:
        mu = weights[label]
        for i in d.vertices:
            if lower:
                # inverting a lowering map raises, which stays inside the data
                cap = 1 if d.is_real(i) else mu.offset.coeff(i)
            else:
                # inverting a raising map descends, so only levels whose
                # target height the data still covers are decided
                room = max(horizon - mu.offset.height(), 0)
                cap = min(room, 1) if d.is_real(i) else room
            up_levels[(label, i)] = cap
            for l in range(1, cap + 1):
                up.setdefault((label, i, l), None)
    for (label, i, l), target in down.items():
        if target is not None and up_levels.get((target, i), 0) >= l:
            up[(target, i, l)] = label

    order = sorted(elements, key=lambda x: weights[x].offset.height())
    source = order[0] if order else None
    if lower:
        return AbstractCrystal(
            d, elements, source, weights, eps_map, phi_map,
            down, up, down_levels, up_levels,
        )
    return AbstractCrystal(
        d, elements, source, weights, eps_map, phi_map,
        up, down, up_levels, down_levels,
    )


# ---------------------------------------------------------------------------
# string data over good sequences
# ---------------------------------------------------------------------------


class PrefixTooShort(Exception):
    """The supplied sequence cycled without reaching the highest core."""

    def __init__(self, depths, element):
        super().__init__(
            "sequence stalls at %r with depth record %r" % (element, depths)
        )
        self.depths = depths
        self.element = element


def _core_levels(space, label_weight, i):
    if space.datum.is_real(i):
        return (1,) if label_weight.offset.coeff(i) else ()
    return tuple(range(1, label_weight.offset.coeff(i) + 1))


def in_highest_core(space, basis, label):
    """True when every filtration depth of the vector is zero."""
    mu = basis.weight_of[label]
    vec = (mu, basis.coords[label])
    depth = _depth if space.mode == "lower" else _d_upper
    for i in space.datum.vertices:
        for l in _core_levels(space, mu, i):
            if depth(space, i, l, vec):
                return False
    return True


def string_data(space, report, seq, start, max_cycles=64):
    """Iterated top-raising along a periodic index sequence.

    Walks seq once, recording at each step the depth of the current
    element and replacing it by its top raising (depth-many extracted
    raising steps).  If the walk has not reached the highest core by
    the end, seq is treated as a period and repeated, up to max_cycles.
    Returns (depth tuple, core label).
    """
    basis = report.basis
    raising = {}
    for (label, i, l), target in report.maps.items():
        if target is not None:
            if space.mode == "lower":
                raising[(target, i, l)] = label
            else:
                raising[(label, i, l)] = target

    depth_fn = _depth if space.mode == "lower" else _d_upper
    cur = start
    out = []
    steps = 0
    while True:
        progressed = False
        for (i, l) in seq:
            mu = basis.weight_of[cur]
            depth = depth_fn(space, i, l, (mu, basis.coords[cur]))
            out.append(depth)
            for _ in range(depth):
                cur = raising[(cur, i, l)]
                progressed = True
        steps += 1
        if in_highest_core(space, basis, cur):
            return tuple(out), cur
        if not progressed:
            raise PrefixTooShort(tuple(out), cur)
        if steps >= max_cycles:
            raise PrefixTooShort(tuple(out), cur)


# ---------------------------------------------------------------------------
# uniqueness of the induced crystal
# ---------------------------------------------------------------------------


def _canonical_sequence(space, repeats):
    cycle = []
    for i in space.datum.vertices:
        for l in range(1, space.levels.get(i, 0) + 1):
            cycle.append((i, l))
    return tuple(cycle) * repeats


def word_image_span(space, word, mu):
    """Rows spanning f_{i1 l1}^{a1} ... f_{ir lr}^{ar} V at weight mu."""
    # peel from the left: the outermost operator is applied last
    if not word:
        dim = space.dims.get(mu, 0)
        return [[ONE if j == k else ZERO for j in range(dim)] for k in range(dim)]
    (i, l, a), rest = word[0], word[1:]
    src = mu
    for _ in range(a):
        src = space.source_weight(src, i, l)
        if src is None:
            return []
    inner = word_image_span(space, rest, src)
    vecs = []
    for v in inner:
        at = src
        cur = list(v)
        dead = False
        for _ in range(a):
            if not space.known(i, l, at) or not any(cur):
                dead = True
                break
            cur = linalg.matvec(space.maps[(i, l, at)], cur, ZERO)
            at = space.target_weight(at, i, l)
        if not dead and any(cur):
            vecs.append(cur)
    if not vecs:
        return []
    red, pivots = linalg.rref(vecs, ZERO)
    return red[: len(pivots)]


def deeper_filtration_span(space, seq, depths, mu):
    """Rows spanning the strictly-deeper filtration space V^{> seq, depths}."""
    spans = []
    for k in range(len(seq)):
        word = [
            (seq[j][0], seq[j][1], depths[j] + (1 if j == k else 0))
            for j in range(k + 1)
        ]
        spans.extend(word_image_span(space, tuple(word), mu))
    if not spans:
        return []
    red, pivots = linalg.rref(spans, ZERO)
    return red[: len(pivots)]


def _string_profile(space, report, seq, label):
    depths, _ = string_data(space, report, seq, label, max_cycles=1)
    return depths


def _core_projection(space, mu):
    """Reduction data modulo the sum of all operator images into V_mu."""
    spans = []
    for i in space.datum.vertices:
        for l in range(1, space.levels.get(i, 0) + 1):
            spans.extend(space.power_span(i, l, mu, 1))
    return _reduce_rows(spans)


def highest_core(space, report):
    """Labels of the report's basis with every filtration depth zero."""
    return [
        label for label in report.basis.labels
        if in_highest_core(space, report.basis, label)
    ]


def uniqueness_isomorphism(space, report1, report2):
    """The crystal isomorphism matching two perfect bases of one space.

    Pairs basis elements by their depth profiles along a canonical good
    sequence and by proportionality modulo the strictly-deeper
    filtration subspace, then checks the pairing intertwines the
    extracted maps.  Requires the two highest cores to span the same
    lines in the quotient by all operator images.
    """
    if space.mode != "lower":
        raise ValueError("uniqueness matching works on lower-mode spaces")
    if not (report1.ok and report2.ok):
        raise ValueError("both bases must pass verification")
    basis1, basis2 = report1.basis, report2.basis

    core1 = highest_core(space, report1)
    core2 = highest_core(space, report2)
    core_pairs = {}
    for a in core1:
        mu = basis1.weight_of[a]
        red, pivots = _core_projection(space, mu)
        pa = _reduce_mod(red, pivots, basis1.coords[a])
        found = None
        for b in core2:
            if basis2.weight_of[b] != mu:
                continue
            pb = _reduce_mod(red, pivots, basis2.coords[b])
            if any(pb) and _proportion(pa, pb):
                found = b
                break
        if found is None or found in core_pairs.values():
            raise ValueError("highest cores do not match at %r" % (a,))
        core_pairs[a] = found
    if len(core2) != len(core1):
        raise ValueError("highest cores have different sizes")

    height = max(
        (mu.offset.height() for mu in space.dims), default=0
    )
    seq = _canonical_sequence(space, max(height, 1))

    profiles1 = {}
    for label in basis1.labels:
        key = (basis1.weight_of[label], _string_profile(space, report1, seq, label))
        profiles1.setdefault(key, []).append(label)
    profiles2 = {}
    for label in basis2.labels:
        key = (basis2.weight_of[label], _string_profile(space, report2, seq, label))
        profiles2.setdefault(key, []).append(label)

    if set(profiles1) != set(profiles2):
        raise ValueError("depth profiles do not match between the bases")

    psi = {}
    for key, group1 in profiles1.items():
        group2 = profiles2[key]
        if len(group1) != len(group2):
            raise ValueError("depth profile %r has unequal multiplicity" % (key,))
        mu, depths = key
        span = deeper_filtration_span(space, seq, depths, mu)
        red, pivots = _reduce_rows(span)
        for a in group1:
            pa = _reduce_mod(red, pivots, basis1.coords[a])
            found = None
            for b in group2:
                if b in psi.values():
                    continue
                pb = _reduce_mod(red, pivots, basis2.coords[b])
                if any(pb) and _proportion(pa, pb):
                    found = b
                    break
            if found is None:
                raise ValueError(
                    "no partner for %r modulo the deeper filtration" % (a,)
                )
            psi[a] = found

    for (label, i, l), target in report1.maps.items():
        image = psi[target] if target is not None else None
        other = report2.maps.get((psi[label], i, l))
        if image != other:
            raise ValueError(
                "pairing fails to intertwine the maps at (%r, %r, %d)"
                % (label, i, l)
            )
    return psi


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------


def dualize(space, basis):
    """Transpose a lower space onto its graded dual and verify upward.

    The raising operator on the dual is defined by pairing against the
    lowering operator, so its matrix at a weight is the transpose of
    the lowering matrix entering that weight.  Labels are kept, giving
    the canonical bijection between a basis and its dual basis.
    Returns (upper space, dual basis, verification report).
    """
    if space.mode != "lower":
        raise ValueError("dualize starts from a lower-mode space")

    dual_maps = {}
    for nu in space.dims:
        for i in space.datum.vertices:
            for l in range(1, space.levels.get(i, 0) + 1):
                src = _raise_weight(nu, i, l)
                if src in space.dims:
                    if not space.known(i, l, src):
                        continue
                    rows = space.maps[(i, l, src)]
                    cols = len(rows[0]) if rows else 0
                    transpose = tuple(
                        tuple(rows[r][c] for r in range(len(rows)))
                        for c in range(cols)
                    )
                    dual_maps[(i, l, nu)] = transpose
                else:
                    # raising walks toward the highest weight, so a source
                    # weight absent from dims is a genuine zero space
                    dual_maps[(i, l, nu)] = ()
    upper = PerfectSpace(
        space.datum, "upper", space.dims, dual_maps, closed=space.closed
    )

    entries = []
    for mu, labels in basis.by_weight.items():
        dim = space.dims[mu]
        rows = [
            [basis.coords[label][r] for label in labels] + [
                ONE if k == r else ZERO for k in range(dim)
            ]
            for r in range(dim)
        ]
        red, pivots = linalg.rref(rows, ZERO)
        if list(pivots) != list(range(dim)):
            raise ValueError("basis at %r is singular" % (mu,))
        inverse = [row[dim:] for row in red]
        for j, label in enumerate(labels):
            entries.append((label, mu, tuple(inverse[j])))
    dual_basis = CandidateBasis(entries)

    report = verify_upper_perfect(upper, dual_basis)
    return upper, dual_basis, report


# ---------------------------------------------------------------------------
# residue data from crystal graphs
# ---------------------------------------------------------------------------


def residue_space(graph, closed=False):
    """Crystal-limit data of a computed crystal graph.

    Returns (lower PerfectSpace, CandidateBasis) whose vectors are the
    residue basis in node order: the operator matrices are the crystal
    arrows themselves, and the basis is the family of unit vectors
    labelled by node ids.
    """
    d = graph.datum
    roots = {}
    for node in graph.nodes:
        roots.setdefault(node.root, []).append(node.id)

    dims = {}
    position = {}
    for root, ids in roots.items():
        mu = graph.weight(ids[0])
        dims[mu] = len(ids)
        for k, node_id in enumerate(ids):
            position[node_id] = (mu, k)

    maps = {}
    for root, ids in roots.items():
        mu = graph.weight(ids[0])
        h = root.height()
        for i in d.vertices:
            for l in graph.arrow_levels(i, h):
                target_mu = mu.minus(i, l)
                rows = [
                    [ZERO] * len(ids) for _ in range(dims.get(target_mu, 0))
                ]
                for col, node_id in enumerate(ids):
                    out = graph.f_edges.get((node_id, i, l))
                    if out is not None:
                        rows[position[out][1]][col] = ONE
                maps[(i, l, mu)] = tuple(tuple(r) for r in rows)

    space = PerfectSpace(d, "lower", dims, maps, closed=closed)
    entries = []
    for root, ids in roots.items():
        mu = graph.weight(ids[0])
        for k, node_id in enumerate(ids):
            vec = tuple(ONE if j == k else ZERO for j in range(len(ids)))
            entries.append((node_id, mu, vec))
    basis = CandidateBasis(entries)
    return space, basis
