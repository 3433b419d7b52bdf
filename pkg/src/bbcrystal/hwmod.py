"""Irreducible highest-weight modules V(lambda) over a Borcherds-Cartan datum.

The module with dominant integral highest weight lambda is realized one
weight space at a time: V(lambda)_{lambda-alpha} is the span of the words
of weight alpha modulo the kernel of the contravariant form at lambda.
The form is evaluated by an adjunction recursion that trades the leading
b-letter of the left word for e'/e'' derivatives of the right word; the
kernel of the form contains the defining radical of the algebra, so every
operator can be performed on canonical word representatives and projected
back onto the pivot basis.

The stored Gram matrices carry the form rescaled by prod (1 - q_i^{2l})
over the letters of the block's multiset.  That clears every denominator
from the recursion while multiplying each symmetric block by one scalar,
so pivots, kernels, and projections agree with the true form.

String decompositions follow the same linear-solve pattern as binf, with
two module-side restrictions on the candidate set.  A nonempty component
b_{i,c} u_c at an imaginary vertex can only sit at a weight mu with
<h_i, mu> strictly positive (at pairing zero the b-letters act by zero,
so such candidates are zero columns), and a real component b_i^{(k)} u_k
needs k >= -<h_i, mu> (below that bound the divided power annihilates
every vector of the integrable string).  The empty component is never
restricted.

Lattices, the crystal, and the global basis solver mirror binf, with two
differences worth naming: an f-chain can die, because the operators are
not injective on a module, and a nonzero chain value may fall into
q L(lambda), in which case it still feeds the lattice but names no node.
"""

from __future__ import annotations

import threading
from fractions import Fraction

from . import linalg
from .binf import Lattice, letter_product
from .cartan import (
    RootVector,
    Weight,
    enumerate_compositions,
    is_dominant,
    pairing,
    part_multiplicity,
)
from .freealg import FreeElement, e_dprime, e_prime, word_weight
from .qrat import ScalarQ
from .uqminus import (
    divided_power,
    integral_monomials,
    lift as u_lift,
    words_at_weight,
)

_ZERO = ScalarQ.zero()
_ONE = ScalarQ.one()


# ---------------------------------------------------------------------------
# the contravariant form at lambda
# ---------------------------------------------------------------------------

_FORM_CACHE = {}


def _letters_scale(d, letters):
    """prod (1 - q_i^{2l}) over a letter iterable."""
    out = _ONE
    for i, l in letters:
        out = out * (_ONE - ScalarQ.q(2 * l * d.s(i)))
    return out


def _scaled_form_words(d, lam, w1, w2):
    """prod(1 - q_i^{2l}) over w1, times (w1 v_lambda, w2 v_lambda).

    One leading b-letter of w1 is traded per step: the e' derivative of
    w2 enters plainly and the e'' derivative with the weight-dependent
    twist q_i^{2l<h_i, lambda-alpha> + 2l^2 a_ii}, where -alpha is the
    weight of the right word.
    """
    if not w1:
        return _ONE if not w2 else _ZERO
    key = (d, lam, w1, w2)
    got = _FORM_CACHE.get(key)
    if got is not None:
        return got
    (i, l), rest = w1[0], w1[1:]
    alpha = word_weight(d, w2)
    m = pairing(d, i, Weight(lam.fund_items(), alpha))
    tw = ScalarQ.q(d.s(i) * (2 * l * m + 2 * l * l * d.a(i, i)))
    acc = _ZERO
    one_word = FreeElement(d, {w2: _ONE})
    for w, c in e_prime(i, l, one_word).items():
        acc = acc + c * _scaled_form_words(d, lam, rest, w)
    for w, c in e_dprime(i, l, one_word).items():
        acc = acc - tw * c * _scaled_form_words(d, lam, rest, w)
    _FORM_CACHE[key] = acc
    return acc


def contravariant_form(lam, s, t):
    """(S v_lambda, T v_lambda) for quotient elements of equal weight."""
    if s.is_zero or t.is_zero:
        return _ZERO
    if s.root != t.root:
        raise ValueError("weights differ under the contravariant form")
    d = s.datum
    acc = _ZERO
    for w1, c1 in u_lift(s).items():
        scale = _letters_scale(d, w1).inverse()
        for w2, c2 in u_lift(t).items():
            acc = acc + c1 * c2 * scale * _scaled_form_words(d, lam, w1, w2)
    return acc


# ---------------------------------------------------------------------------
# weight spaces of V(lambda)
# ---------------------------------------------------------------------------


class _Block:
    __slots__ = ("indices", "gram", "pivots_local", "inv")

    def __init__(self, indices, gram, pivots_local, inv):
        self.indices = indices
        self.gram = gram
        self.pivots_local = pivots_local
        self.inv = inv


class VModel:
    """Words, rescaled Gram blocks, and pivots of one weight space."""

    __slots__ = (
        "datum", "lam", "root", "words", "pivots",
        "_word_pos", "_blocks", "_block_of",
    )

    def __init__(self, datum, lam, root, word_cap=None):
        if not is_dominant(datum, lam):
            raise ValueError("lambda is not dominant integral")
        self.datum = datum
        self.lam = lam
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
                [
                    _scaled_form_words(datum, lam, self.words[a], self.words[b])
                    for b in idx
                ]
                for a in idx
            ]
            pl = linalg.column_rank_profile(gram, _ZERO)
            inv = None
            if pl and len(pl) != len(idx):
                inv = linalg.invert(
                    [[gram[a][b] for b in pl] for a in pl], _ZERO, _ONE
                )
            block = _Block(tuple(idx), gram, tuple(pl), inv)
            bid = len(self._blocks)
            self._blocks.append(block)
            for n in idx:
                self._block_of[n] = bid
            pivots.extend(idx[p] for p in pl)
        self.pivots = tuple(sorted(pivots))
        if self.pivots:
            mu = Weight(lam.fund_items(), root)
            for i in datum.imaginary_vertices():
                if pairing(datum, i, mu) < 0:
                    raise RuntimeError(
                        "realized weight %r has negative pairing at %r" % (mu, i)
                    )

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
        return VElement(self.datum, self.lam, self.root, coords)

    def lift(self, x):
        """The canonical pivot-word representative of a VElement."""
        terms = {}
        for c, pos in zip(x.coords, self.pivots):
            if not c.is_zero:
                terms[self.words[pos]] = c
        return FreeElement(self.datum, terms)

    def kernel_vectors(self):
        """FreeElements spanning the kernel of the form at this weight."""
        out = []
        for block in self._blocks:
            if len(block.pivots_local) == len(block.indices):
                continue
            for vec in linalg.nullspace(block.gram, _ZERO, _ONE):
                terms = {}
                for n, p in enumerate(block.indices):
                    if vec[n]:
                        terms[self.words[p]] = vec[n]
                out.append(FreeElement(self.datum, terms))
        return out


_CACHE = {}
_LOCK = threading.Lock()


def build_v_space(d, lam, root, word_cap=None):
    key = (d, lam, root)
    model = _CACHE.get(key)
    if model is None:
        with _LOCK:
            model = _CACHE.get(key)
            if model is None:
                model = VModel(d, lam, root, word_cap)
                _CACHE[key] = model
    return model


def dim_v(d, lam, root, word_cap=None):
    return build_v_space(d, lam, root, word_cap).dim


class HWModule:
    """Handle bundling a datum with a dominant weight.

    Weight spaces build lazily through the shared cache, so two handles
    for the same (datum, lambda) see identical models.
    """

    __slots__ = ("datum", "lam")

    def __init__(self, datum, lam):
        if not is_dominant(datum, lam):
            raise ValueError("lambda is not dominant integral")
        self.datum = datum
        self.lam = lam

    def weight_space(self, root, word_cap=None):
        return build_v_space(self.datum, self.lam, root, word_cap)

    def dim_at(self, root, word_cap=None):
        return self.weight_space(root, word_cap).dim

    def highest_vector(self):
        return highest_vector(self.datum, self.lam)

    def __repr__(self):
        return "HWModule(%r, %r)" % (self.datum, self.lam)


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------


class VElement:
    """A vector of V(lambda): exact coordinates over one weight's pivots.

    Zero is normalized to root None with no coordinates.  The highest
    weight travels with the element so operators never need it spelled
    out again.
    """

    __slots__ = ("datum", "lam", "root", "coords")

    def __init__(self, datum, lam, root, coords):
        coords = tuple(c if isinstance(c, ScalarQ) else ScalarQ.of(c) for c in coords)
        if not any(coords):
            root, coords = None, ()
        self.datum = datum
        self.lam = lam
        self.root = root
        self.coords = coords

    @property
    def is_zero(self):
        return self.root is None

    def weight(self):
        """The module weight lambda - alpha."""
        return Weight(self.lam.fund_items(), self.root or RootVector())

    def scale(self, c):
        c = c if isinstance(c, ScalarQ) else ScalarQ.of(c)
        if self.is_zero or c.is_zero:
            return VElement(self.datum, self.lam, None, ())
        return VElement(self.datum, self.lam, self.root, [c * x for x in self.coords])

    def __add__(self, other):
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.lam != other.lam:
            raise ValueError("highest weights differ under addition")
        if self.root != other.root:
            raise ValueError("weights differ under addition")
        return VElement(
            self.datum,
            self.lam,
            self.root,
            [a + b for a, b in zip(self.coords, other.coords)],
        )

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def bar(self):
        """Bar through P v_lambda -> bar(P) v_lambda; pivot words are fixed."""
        return VElement(self.datum, self.lam, self.root, [c.bar() for c in self.coords])

    def __eq__(self, other):
        return (
            isinstance(other, VElement)
            and self.datum == other.datum
            and self.lam == other.lam
            and self.root == other.root
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.datum, self.lam, self.root, self.coords))

    def __repr__(self):
        if self.is_zero:
            return "VElement(0)"
        return "VElement(%r, %s)" % (self.root, list(map(str, self.coords)))


def zero_v(d, lam):
    return VElement(d, lam, None, ())


def highest_vector(d, lam):
    return build_v_space(d, lam, RootVector()).reduce(FreeElement.unit(d))


def reduce_v(lam, x, word_cap=None):
    """Project a FreeElement onto the pivot basis of its weight space."""
    if x.is_zero:
        return zero_v(x.datum, lam)
    return build_v_space(x.datum, lam, x.weight(), word_cap).reduce(x)


def lift_v(x):
    if x.is_zero:
        return FreeElement(x.datum)
    return build_v_space(x.datum, x.lam, x.root).lift(x)


def pi_lambda(lam, u):
    """The quotient map U^- -> V(lambda), P -> P v_lambda."""
    if u.is_zero:
        return zero_v(u.datum, lam)
    return reduce_v(lam, u_lift(u))


def form_v(x, y):
    """The contravariant form on V(lambda) through canonical lifts."""
    if x.is_zero or y.is_zero:
        return _ZERO
    if x.lam != y.lam:
        raise ValueError("highest weights differ under the form")
    if x.root != y.root:
        return _ZERO
    d = x.datum
    acc = _ZERO
    for w1, c1 in lift_v(x).items():
        scale = _letters_scale(d, w1).inverse()
        for w2, c2 in lift_v(y).items():
            acc = acc + c1 * c2 * scale * _scaled_form_words(d, x.lam, w1, w2)
    return acc


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def act_mul_b_v(i, l, x):
    """Left multiplication by b_{il}."""
    if x.is_zero:
        return x
    y = FreeElement.generator(x.datum, i, l) * lift_v(x)
    return reduce_v(x.lam, y)


def _e_action_free(d, lam, i, l, y):
    """E_{il} on (homogeneous word combination) v_lambda, as a FreeElement."""
    if y.is_zero:
        return FreeElement(d)
    alpha = y.weight()
    m = pairing(d, i, Weight(lam.fund_items(), alpha))
    tw = ScalarQ.q(d.s(i) * (2 * l * m + 2 * l * l * d.a(i, i)))
    den = (_ONE - ScalarQ.q(2 * l * d.s(i))).inverse()
    return (e_prime(i, l, y) - e_dprime(i, l, y).scale(tw)).scale(den)


def e_action(i, l, x):
    """The raising operator E_{il} on V(lambda)."""
    if x.is_zero:
        return x
    y = _e_action_free(x.datum, x.lam, i, l, lift_v(x))
    if y.is_zero:
        return zero_v(x.datum, x.lam)
    return reduce_v(x.lam, y)


_VKERNEL_CACHE = {}
_VKERNEL_LOCK = threading.Lock()


def _basis_element(d, lam, root, dim, n):
    coords = [_ZERO] * dim
    coords[n] = _ONE
    return VElement(d, lam, root, coords)


def _padded_v(x, d, lam, root):
    dim = build_v_space(d, lam, root).dim
    if x.is_zero:
        return [_ZERO] * dim
    return list(x.coords)


def e_kernel_basis(d, lam, i, root):
    """Basis of the joint kernel of E_{ik} (all levels) at one weight."""
    key = (d, lam, i, root)
    got = _VKERNEL_CACHE.get(key)
    if got is not None:
        return got
    model = build_v_space(d, lam, root)
    n = model.dim
    levels = range(1, root.coeff(i) + 1)
    if d.is_real(i):
        levels = range(1, 2) if root.coeff(i) else range(0)
    cols = []
    for p in range(n):
        x = _basis_element(d, lam, root, n, p)
        col = []
        for l in levels:
            col.extend(_padded_v(e_action(i, l, x), d, lam, root.minus(i, l)))
        cols.append(col)
    if cols and cols[0]:
        rows = [[cols[p][r] for p in range(n)] for r in range(len(cols[0]))]
        basis = [
            VElement(d, lam, root, v) for v in linalg.nullspace(rows, _ZERO, _ONE)
        ]
    else:
        basis = [_basis_element(d, lam, root, n, p) for p in range(n)]
    with _VKERNEL_LOCK:
        _VKERNEL_CACHE[key] = basis
    return basis


# ---------------------------------------------------------------------------
# string decompositions and Kashiwara operators
# ---------------------------------------------------------------------------


class IStringDecompositionV:
    """x = sum of b_{i,c}·u_c with each u_c killed by every E_{ik}."""

    __slots__ = ("datum", "lam", "vertex", "root", "parts")

    def __init__(self, datum, lam, vertex, root, parts):
        self.datum = datum
        self.lam = lam
        self.vertex = vertex
        self.root = root
        self.parts = dict(parts)

    def reconstruct(self):
        total = zero_v(self.datum, self.lam)
        for key, u in self.parts.items():
            total = total + _apply_factor_v(self.vertex, key, u)
        return total


_VAPPLY_CACHE = {}


def _apply_factor_v(i, key, u):
    if u.is_zero:
        return u
    d = u.datum
    ck = (i, key, u)
    got = _VAPPLY_CACHE.get(ck)
    if got is None:
        if d.is_real(i):
            factor = divided_power(d, i, key)
        else:
            factor = letter_product(d, i, key)
        got = reduce_v(u.lam, factor * lift_v(u))
        _VAPPLY_CACHE[ck] = got
    return got


class _VStringSolver:
    """Candidate matrix for one (lambda, vertex, weight) triple.

    Module-side candidate ranges: the empty component always, real k
    from max(0, -<h_i, mu>), and nonempty imaginary components only at
    strictly positive pairing.  Everything outside those ranges would be
    a zero column, and the filtered columns are a basis (asserted).
    """

    __slots__ = ("keys", "owners", "rows", "sel", "inv")

    def __init__(self, d, lam, i, root):
        a_i = root.coeff(i)
        real = d.is_real(i)
        base = pairing(d, i, Weight(lam.fund_items(), root))
        cand_keys = []
        if real:
            for k in range(max(0, -base), a_i + 1):
                cand_keys.append((k,))
        else:
            cand_keys.append(())
            for n in range(1, a_i + 1):
                if base + n * d.a(i, i) <= 0:
                    continue
                cand_keys.extend(enumerate_compositions(d, i, n))
        self.keys = []
        self.owners = []
        columns = []
        for c in cand_keys:
            key = c[0] if real else c
            size = sum(c)
            sub = root.minus(i, size) if size else root
            for w in e_kernel_basis(d, lam, i, sub):
                v = _apply_factor_v(i, key, w)
                columns.append(_padded_v(v, d, lam, root))
                self.keys.append(key)
                self.owners.append(w)
        dim = build_v_space(d, lam, root).dim
        self.rows = [[col[r] for col in columns] for r in range(dim)]
        self.sel = linalg.column_rank_profile(linalg.transpose(self.rows), _ZERO)
        if len(self.sel) != len(columns):
            raise RuntimeError(
                "string candidates at weight %r, vertex %r are dependent"
                % (root, i)
            )
        self.inv = linalg.invert([self.rows[r] for r in self.sel], _ZERO, _ONE)

    def solve(self, coords):
        sol = linalg.matvec(self.inv, [coords[r] for r in self.sel], _ZERO)
        if linalg.matvec(self.rows, sol, _ZERO) != list(coords):
            raise RuntimeError("string decomposition has a nonzero residual")
        return sol


_VSOLVER_CACHE = {}
_VSOLVER_LOCK = threading.Lock()
_VDECOMP_CACHE = {}


def _v_string_solver(d, lam, i, root):
    key = (d, lam, i, root)
    got = _VSOLVER_CACHE.get(key)
    if got is None:
        solver = _VStringSolver(d, lam, i, root)
        with _VSOLVER_LOCK:
            got = _VSOLVER_CACHE.setdefault(key, solver)
    return got


def istring_decompose_v(i, x):
    """Exact string decomposition along vertex i in V(lambda)."""
    if x.is_zero:
        return IStringDecompositionV(x.datum, x.lam, i, None, {})
    ck = (i, x)
    got = _VDECOMP_CACHE.get(ck)
    if got is not None:
        return got
    d = x.datum
    solver = _v_string_solver(d, x.lam, i, x.root)
    sol = solver.solve(x.coords)
    parts = {}
    for c, w, t in zip(solver.keys, solver.owners, sol):
        if t.is_zero:
            continue
        parts[c] = parts.get(c, zero_v(d, x.lam)) + w.scale(t)
    parts = {c: u for c, u in parts.items() if not u.is_zero}
    dec = IStringDecompositionV(d, x.lam, i, x.root, parts)
    _VDECOMP_CACHE[ck] = dec
    return dec


def kashiwara_f_v(i, l, x):
    d = x.datum
    if x.is_zero:
        return x
    if d.is_real(i) and l != 1:
        raise ValueError("real vertices use level 1")
    dec = istring_decompose_v(i, x)
    out = zero_v(d, x.lam)
    for key, u in dec.parts.items():
        if d.is_real(i):
            out = out + _apply_factor_v(i, key + 1, u)
        elif d.is_isotropic(i):
            c = tuple(sorted(key + (l,), reverse=True))
            m = part_multiplicity(key, l)
            out = out + _apply_factor_v(i, c, u).scale(Fraction(1, m + 1))
        else:
            out = out + _apply_factor_v(i, (l,) + key, u)
    return out


def kashiwara_e_v(i, l, x):
    d = x.datum
    if x.is_zero:
        return x
    if d.is_real(i) and l != 1:
        raise ValueError("real vertices use level 1")
    dec = istring_decompose_v(i, x)
    out = zero_v(d, x.lam)
    for key, u in dec.parts.items():
        if d.is_real(i):
            if key >= 1:
                out = out + _apply_factor_v(i, key - 1, u)
        elif d.is_isotropic(i):
            m = part_multiplicity(key, l)
            if m:
                rest = list(key)
                rest.remove(l)
                out = out + _apply_factor_v(i, tuple(rest), u).scale(m)
        else:
            if key and key[0] == l:
                out = out + _apply_factor_v(i, key[1:], u)
    return out


def q_op_v(i, l, x):
    """Rescale each b_{i,c} component by (c_l + 1) at an isotropic vertex."""
    d = x.datum
    if x.is_zero or not d.is_isotropic(i):
        return x
    dec = istring_decompose_v(i, x)
    out = zero_v(d, x.lam)
    for key, u in dec.parts.items():
        out = out + _apply_factor_v(i, key, u).scale(part_multiplicity(key, l) + 1)
    return out


# ---------------------------------------------------------------------------
# the crystal B(lambda)
# ---------------------------------------------------------------------------


class VNode:
    __slots__ = ("id", "root", "residue", "rep")

    def __init__(self, node_id, root, residue, rep):
        self.id = node_id
        self.root = root
        self.residue = residue
        self.rep = rep

    def __repr__(self):
        return "VNode(%d, %r)" % (self.id, self.root)


def _root_sort_key(root):
    return (root.height(), root.items())


class VCrystal:
    """The crystal of V(lambda) computed below a height bound."""

    def __init__(self, datum, lam, max_height):
        self.datum = datum
        self.lam = lam
        self.max_height = max_height
        self.nodes = []
        self.lattices = {}
        self.f_edges = {}
        self.e_edges = {}
        self._index = {}
        self._eps = {}
        self._global = {}

    def node_at(self, root, residue):
        return self._index.get((root, residue))

    def nodes_at(self, root):
        return [n for n in self.nodes if n.root == root]

    def weight(self, node_id):
        return Weight(self.lam.fund_items(), self.nodes[node_id].root)

    def arrow_levels(self, i, height):
        if self.datum.is_real(i):
            return (1,) if height < self.max_height else ()
        return tuple(range(1, self.max_height - height + 1))

    def epsilon(self, node_id, i):
        if self.datum.is_imaginary(i):
            return 0
        key = (node_id, i)
        got = self._eps.get(key)
        if got is None:
            nxt = self.e_edges.get((node_id, i, 1))
            got = 0 if nxt is None else 1 + self.epsilon(nxt, i)
            self._eps[key] = got
        return got

    def phi(self, node_id, i):
        return self.epsilon(node_id, i) + pairing(
            self.datum, i, self.weight(node_id)
        )

    def global_basis(self, node_id):
        got = self._global.get(node_id)
        if got is None:
            got = _solve_global_v(self, self.nodes[node_id])
            self._global[node_id] = got
        return got


def build_crystal_lambda(d, lam, max_height, word_cap=None):
    """Breadth-first closure of v_lambda under the f-operators."""
    crystal = VCrystal(d, lam, max_height)
    v0 = highest_vector(d, lam)
    values = {RootVector(): [v0]}
    by_height = [[] for _ in range(max_height + 1)]
    by_height[0].append((RootVector(), v0))
    for h in range(max_height):
        for root, val in by_height[h]:
            for i in d.vertices:
                for l in crystal.arrow_levels(i, h):
                    v = kashiwara_f_v(i, l, val)
                    if v.is_zero:
                        continue
                    r = root.plus(i, l)
                    values.setdefault(r, []).append(v)
                    by_height[h + l].append((r, v))
    for root in sorted(values, key=_root_sort_key):
        lat = Lattice(build_v_space(d, lam, root).dim)
        for v in values[root]:
            lat.insert(_padded_v(v, d, lam, root))
        crystal.lattices[root] = lat
        for v in values[root]:
            res = lat.residue(_padded_v(v, d, lam, root))
            if res is None:
                raise RuntimeError("chain value escaped its lattice")
            if any(res) and (root, res) not in crystal._index:
                node = VNode(len(crystal.nodes), root, res, v)
                crystal.nodes.append(node)
                crystal._index[(root, res)] = node.id
    for node in crystal.nodes:
        h = node.root.height()
        for i in d.vertices:
            for l in crystal.arrow_levels(i, h):
                v = kashiwara_f_v(i, l, node.rep)
                if v.is_zero:
                    crystal.f_edges[(node.id, i, l)] = None
                    continue
                target = node.root.plus(i, l)
                res = crystal.lattices[target].residue(_padded_v(v, d, lam, target))
                if res is None:
                    raise RuntimeError("f-value escaped its lattice")
                crystal.f_edges[(node.id, i, l)] = (
                    crystal._index[(target, res)] if any(res) else None
                )
            coeff = node.root.coeff(i)
            e_levels = (1,) if d.is_real(i) and coeff else range(1, coeff + 1)
            for l in e_levels:
                v = kashiwara_e_v(i, l, node.rep)
                if v.is_zero:
                    crystal.e_edges[(node.id, i, l)] = None
                    continue
                target = node.root.minus(i, l)
                res = crystal.lattices[target].residue(_padded_v(v, d, lam, target))
                if res is None:
                    raise RuntimeError("e-value escaped its lattice")
                crystal.e_edges[(node.id, i, l)] = (
                    crystal._index[(target, res)] if any(res) else None
                )
    return crystal


# ---------------------------------------------------------------------------
# lower global basis of V(lambda)
# ---------------------------------------------------------------------------


def _sym_band(t):
    if t == 0:
        return ScalarQ.one()
    return ScalarQ.q(t) + ScalarQ.q(-t)


def _solve_global_v(crystal, node, band_cap=24):
    d = crystal.datum
    lam = crystal.lam
    root = node.root
    model = build_v_space(d, lam, root)
    lat = crystal.lattices[root]
    if lat.rank != model.dim:
        raise RuntimeError("lattice does not span the weight space")
    monos = [reduce_v(lam, m) for m in integral_monomials(d, root)]
    mono_coeffs = []
    min_val = 0
    for u in monos:
        cs = lat.coefficients(_padded_v(u, d, lam, root))
        if cs is None:
            raise RuntimeError("monomial escaped the lattice span")
        mono_coeffs.append(cs)
        for c in cs:
            if c and c.val0() < min_val:
                min_val = c.val0()
    res = node.residue
    for band in range(band_cap + 1):
        cols = [(m, t) for m in range(len(monos)) for t in range(band + 1)]
        lo = min_val - band
        rows = []
        rhs = []
        for j in range(lat.rank):
            for n in range(lo, 1):
                rows.append(
                    [
                        (_sym_band(t) * mono_coeffs[m][j]).coeff(n)
                        for m, t in cols
                    ]
                )
                rhs.append(res[j] if n == 0 else Fraction(0))
        try:
            sol = linalg.solve(rows, rhs, Fraction(0))
        except linalg.InconsistentSystem:
            continue
        out = zero_v(d, lam)
        for a, (m, t) in zip(sol, cols):
            if a:
                out = out + monos[m].scale(_sym_band(t) * ScalarQ.of(a))
        _check_global_v(crystal, node, out)
        return out
    raise RuntimeError("global basis solve did not close below the band cap")


def _check_global_v(crystal, node, g):
    if g.bar() != g:
        raise RuntimeError("global basis candidate is not bar-invariant")
    lat = crystal.lattices[node.root]
    if lat.residue(_padded_v(g, crystal.datum, crystal.lam, node.root)) != node.residue:
        raise RuntimeError("global basis candidate has the wrong residue")


def global_basis_lambda(crystal, node_id):
    return crystal.global_basis(node_id)
