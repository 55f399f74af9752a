"""Tensor and symmetric coalgebra calculus.

Strong homotopy structures are held as weight-indexed families of Taylor
coefficients; the coderivation/morphism components Q^j_k and F^j_k are
evaluated on demand (the coalgebras T(V), S(V) are never materialized).
Also home to the DG-Lie / DG-associative source types and the decalage
constructors feeding everything downstream.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .graded import (
    GradedMap, GradedSpace, MalformedInput, MultilinearMap, RejectedInput,
    Report, SYMMETRIC, TENSOR, format_vector, koszul_sign, lin_acc, lin_scale,
    lin_single, pmap, sym_normalize, unshuffles,
)

# A TupleCombo is a formal combination of basis tuples: dict[tuple[str,...], Fraction].


def _combo_acc(acc, tup, coeff):
    if not coeff:
        return
    cur = acc.get(tup, 0) + coeff
    if cur:
        acc[tup] = cur
    else:
        del acc[tup]


def _expand_head(vec: dict, rest: tuple, acc: dict, coeff):
    """acc += coeff * (vec tensor rest) expanded to pure basis tuples, head slot first."""
    for n, c in vec.items():
        _combo_acc(acc, (n,) + rest, coeff * c)


def _expand_at(pre: tuple, vec: dict, post: tuple, acc: dict, coeff):
    for n, c in vec.items():
        _combo_acc(acc, pre + (n,) + post, coeff * c)


class OoStructure:
    """An A-infinity[1] (tensor) or L-infinity[1] (symmetric) structure.

    taylor maps every arity k >= 1 to a degree +1 MultilinearMap; anything
    above max_weight is truncated away, which is lossless over a nilpotent
    base of order <= max_weight + 1.
    """

    def __init__(self, space: GradedSpace, flavor: str, taylor: dict,
                 max_weight: int = 6):
        if flavor not in (TENSOR, SYMMETRIC):
            raise MalformedInput("flavor must be tensor or symmetric")
        self.space = space
        self.flavor = flavor
        self.max_weight = int(max_weight)
        self.taylor = {}
        for k, q in taylor.items():
            if q is None or q.is_zero():
                continue
            if k < 1:
                raise MalformedInput("Taylor coefficients start at arity 1 (q_0 = 0)")
            if q.degree != 1:
                raise MalformedInput("structure Taylor coefficients must have degree +1")
            if q.arity != k or q.flavor != flavor or q.source != space or q.target != space:
                raise MalformedInput("taylor coefficient q_%d has wrong shape" % k)
            self.taylor[k] = q
        self._coder_memo = {}

    def q(self, k: int):
        return self.taylor.get(k)

    def q_value(self, names) -> dict:
        q = self.taylor.get(len(names))
        return q.value(names) if q is not None else {}

    def coder_component(self, j: int, k: int, names: tuple) -> dict:
        """Q^j_k on a basis tuple, as a combination of j-tuples (memoized)."""
        key = (j, k, names)
        got = self._coder_memo.get(key)
        if got is None:
            got = coderivation_component_value(self, j, k, names)
            self._coder_memo[key] = got
        return got

    def square_residual(self, names: tuple) -> dict:
        """(p o Q o Q) evaluated on a basis word: sum_j q_j(Q^j_k(word))."""
        k = len(names)
        out: dict = {}
        for j in range(1, k + 1):
            qj = self.taylor.get(j)
            if qj is None:
                continue
            for tup, c in self.coder_component(j, k, names).items():
                lin_acc(out, qj.value(tup), c)
        return out

    def basis_words(self, k: int):
        if self.flavor == TENSOR:
            return itertools.product(self.space.names, repeat=k)
        deg = self.space.degree
        idx = self.space.index
        words = []
        for tup in itertools.combinations_with_replacement(self.space.names, k):
            if sym_normalize(tup, idx, deg) is None:
                continue
            words.append(tup)
        return words

    def __repr__(self):
        return "OoStructure(%s, dim %d, arities %s, max_weight %d)" % (
            self.flavor, self.space.dim, sorted(self.taylor), self.max_weight)


class OoMorphism:
    """Morphism of DG-coalgebras given by its degree-0 Taylor coefficients."""

    def __init__(self, source: OoStructure, target: OoStructure, taylor: dict):
        if source.flavor != target.flavor:
            raise MalformedInput("source and target flavor differ")
        self.source = source
        self.target = target
        self.flavor = source.flavor
        self.max_weight = min(source.max_weight, target.max_weight)
        self.taylor = {}
        for k, f in taylor.items():
            if f is None or f.is_zero():
                continue
            if k < 1 or f.degree != 0 or f.arity != k or f.flavor != self.flavor:
                raise MalformedInput("morphism coefficient f_%d has wrong shape" % k)
            if f.source != source.space or f.target != target.space:
                raise MalformedInput("morphism coefficient f_%d has wrong spaces" % k)
            self.taylor[k] = f
        self._morph_memo = {}

    def f(self, k: int):
        return self.taylor.get(k)

    def f_value(self, names) -> dict:
        f = self.taylor.get(len(names))
        return f.value(names) if f is not None else {}

    @property
    def is_strict(self) -> bool:
        return all(k == 1 for k in self.taylor)

    def morph_component(self, j: int, k: int, names: tuple) -> dict:
        key = (j, k, names)
        got = self._morph_memo.get(key)
        if got is None:
            got = morphism_component_value(self, j, k, names)
            self._morph_memo[key] = got
        return got

    def __repr__(self):
        return "OoMorphism(%s, arities %s)" % (self.flavor, sorted(self.taylor))


# ---------------------------------------------------------------------------
# prolongation components


def coderivation_component_value(struct: OoStructure, j: int, k: int,
                                 names: tuple, coder_degree: int = 1) -> dict:
    """Q^j_k on a basis word, from the Taylor family of `struct`.

    Tensor flavor inserts q_{k-j+1} at every position with the sign
    (-1)^{|Q| * (deg of the symbols jumped over)}; symmetric flavor sums over
    the S(k-j+1, j-1) unshuffles with Koszul signs.
    """
    if len(names) != k:
        raise MalformedInput("word length %d != k=%d" % (len(names), k))
    out: dict = {}
    if j > k + 1 or j < 1 or k == 0:
        return out
    m = k - j + 1  # arity of the inserted coefficient; q_0 = 0 kills j = k+1
    q = struct.taylor.get(m)
    if q is None:
        return out
    deg = struct.space.degree
    if struct.flavor == TENSOR:
        for i in range(j):
            val = q.value(names[i:i + m])
            if not val:
                continue
            sign = 1
            if coder_degree % 2:
                jumped = sum(deg[n] for n in names[:i])
                if jumped % 2:
                    sign = -1
            _expand_at(names[:i], val, names[i + m:], out, sign)
    else:
        degs = [deg[n] for n in names]
        for sigma in unshuffles(m, j - 1):
            eps = koszul_sign(sigma, degs)
            head = tuple(names[s - 1] for s in sigma[:m])
            tail = tuple(names[s - 1] for s in sigma[m:])
            val = q.value(head)
            if val:
                _expand_head(val, tail, out, eps)
    return out


def morphism_component_value(morph: OoMorphism, j: int, k: int, names: tuple) -> dict:
    """F^j_k on a basis word: the ordered-partition sum (with 1/j! unshuffle
    form in the symmetric flavor)."""
    if len(names) != k:
        raise MalformedInput("word length mismatch")
    out: dict = {}
    if j < 1 or j > k:
        return out
    deg = morph.source.space.degree
    if morph.flavor == TENSOR:
        for part in _compositions(k, j):
            pos = 0
            combos = [{(): Fraction(1)}]
            dead = False
            pieces = []
            for size in part:
                f = morph.taylor.get(size)
                if f is None:
                    dead = True
                    break
                val = f.value(names[pos:pos + size])
                if not val:
                    dead = True
                    break
                pieces.append(val)
                pos += size
            if dead:
                continue
            acc = {(): Fraction(1)}
            for val in pieces:
                nxt: dict = {}
                for tup, c in acc.items():
                    for n, cv in val.items():
                        _combo_acc(nxt, tup + (n,), c * cv)
                acc = nxt
            for tup, c in acc.items():
                _combo_acc(out, tup, c)
    else:
        degs = [deg[n] for n in names]
        inv_jfac = Fraction(1, _factorial(j))
        for part in _compositions(k, j):
            if any(morph.taylor.get(size) is None for size in part):
                continue
            for sigma in unshuffles(*part):
                eps = koszul_sign(sigma, degs)
                pos = 0
                pieces = []
                dead = False
                for size in part:
                    block = tuple(names[sigma[pos + t] - 1] for t in range(size))
                    val = morph.taylor[size].value(block)
                    if not val:
                        dead = True
                        break
                    pieces.append(val)
                    pos += size
                if dead:
                    continue
                acc = {(): Fraction(1)}
                for val in pieces:
                    nxt: dict = {}
                    for tup, c in acc.items():
                        for n, cv in val.items():
                            _combo_acc(nxt, tup + (n,), c * cv)
                    acc = nxt
                for tup, c in acc.items():
                    _combo_acc(out, tup, c * eps * inv_jfac)
    return out


def _factorial(n):
    from math import factorial
    return factorial(n)


def _compositions(k: int, j: int):
    """Ordered partitions of k into j parts >= 1, lexicographically."""
    if j == 1:
        yield (k,)
        return
    for first in range(1, k - j + 2):
        for rest in _compositions(k - first, j - 1):
            yield (first,) + rest


class TensorComponent:
    """Materialized prolongation component V^{ox k} -> V^{ox j} for inspection."""

    def __init__(self, space, k, j, evaluator):
        self.space = space
        self.arity_in = k
        self.arity_out = j
        self._eval = evaluator

    def value(self, names) -> dict:
        return self._eval(tuple(names))


def prolong_coderivation(space: GradedSpace, taylor: dict, flavor: str,
                         j: int, k: int, coder_degree: int = 1) -> TensorComponent:
    """Public wrapper: the component Q^j_k of the coderivation with the given
    Taylor coefficients (zero map whenever j > k+1)."""
    struct = OoStructure.__new__(OoStructure)
    struct.space = space
    struct.flavor = flavor
    struct.taylor = dict(taylor)
    struct.max_weight = max(taylor) if taylor else 1
    struct._coder_memo = {}
    return TensorComponent(
        space, k, j,
        lambda names: coderivation_component_value(struct, j, k, names, coder_degree))


def prolong_morphism(source_space: GradedSpace, target_space: GradedSpace,
                     taylor: dict, flavor: str, j: int, k: int) -> TensorComponent:
    """Public wrapper: the component F^j_k of the coalgebra morphism with the
    given Taylor coefficients (zero for j > k)."""
    dummy_src = OoStructure(source_space, flavor, {}, max_weight=max(k, 1))
    dummy_tgt = OoStructure(target_space, flavor, {}, max_weight=max(k, 1))
    morph = OoMorphism(dummy_src, dummy_tgt, taylor)
    return TensorComponent(source_space, k, j,
                           lambda names: morphism_component_value(morph, j, k, names))


# ---------------------------------------------------------------------------
# structure / morphism verification


def check_structure(s: OoStructure, max_weight=None, workers: int = 1) -> Report:
    """Verify [Q,Q] = 0 up to the requested weight; first failing word wins."""
    r = Report("structure equation")
    top = s.max_weight if max_weight is None else min(max_weight, s.max_weight)
    for k in range(1, top + 1):
        words = list(s.basis_words(k))
        residuals = pmap(s.square_residual, words, workers)
        bad = None
        for word, res in zip(words, residuals):
            if res:
                bad = (word, res)
                break
        if bad is None:
            r.add("QQ=0", True, weight=k)
        else:
            r.add("QQ=0", False, weight=k, witness=bad[0],
                  lhs=format_vector(bad[1], s.space), rhs="0")
    return r


def check_morphism(F: OoMorphism, max_weight=None, workers: int = 1) -> Report:
    """Verify p(F Q) = p(R F) componentwise up to the requested weight."""
    r = Report("morphism equation")
    s, t = F.source, F.target
    top = F.max_weight if max_weight is None else min(max_weight, F.max_weight)

    def residual(word):
        k = len(word)
        lhs: dict = {}
        for j in range(1, k + 1):
            fj = F.taylor.get(j)
            if fj is None:
                continue
            for tup, c in s.coder_component(j, k, word).items():
                lin_acc(lhs, fj.value(tup), c)
        rhs: dict = {}
        for i in range(1, k + 1):
            qi = t.taylor.get(i)
            if qi is None:
                continue
            for tup, c in F.morph_component(i, k, word).items():
                lin_acc(rhs, qi.value(tup), c)
        lin_acc(lhs, rhs, -1)
        return lhs

    for k in range(1, top + 1):
        words = list(s.basis_words(k))
        residuals = pmap(residual, words, workers)
        bad = None
        for word, res in zip(words, residuals):
            if res:
                bad = (word, res)
                break
        if bad is None:
            r.add("FQ=RF", True, weight=k)
        else:
            r.add("FQ=RF", False, weight=k, witness=bad[0],
                  lhs=format_vector(bad[1], t.space), rhs="0")
    return r


# ---------------------------------------------------------------------------
# composition, identity, inverse


def identity_morphism(s: OoStructure) -> OoMorphism:
    from .graded import multilinear_from_graded_map
    f1 = multilinear_from_graded_map(GradedMap.identity(s.space), s.flavor)
    return OoMorphism(s, s, {1: f1})


def compose_morphisms(G: OoMorphism, F: OoMorphism, max_weight=None) -> OoMorphism:
    """G o F as coalgebra morphisms: (GF)_k = sum_j g_j F^j_k."""
    if F.target is not G.source and F.target.space != G.source.space:
        raise MalformedInput("composition shape mismatch")
    top = max_weight or min(F.max_weight, G.max_weight)
    taylor = {}
    for k in range(1, top + 1):
        hk = MultilinearMap(F.source.space, G.target.space, 0, k, F.flavor)
        for word in F.source.basis_words(k):
            acc: dict = {}
            for j in range(1, k + 1):
                gj = G.taylor.get(j)
                if gj is None:
                    continue
                for tup, c in F.morph_component(j, k, word).items():
                    lin_acc(acc, gj.value(tup), c)
            if acc:
                hk.add_entry(word, acc)
        taylor[k] = hk
    return OoMorphism(F.source, G.target, taylor)


def invert_morphism(F: OoMorphism, max_weight=None) -> OoMorphism:
    """Coalgebra inverse of F (requires invertible f_1)."""
    from .graded import map_right_inverse, multilinear_from_graded_map
    top = max_weight or F.max_weight
    f1 = F.taylor.get(1)
    if f1 is None:
        raise RejectedInput("f_1 is zero, morphism is not invertible")
    gm1 = GradedMap(F.source.space, F.target.space, 0, dict(
        (n, f1.value((n,))) for n in F.source.space.names))
    inv1 = map_right_inverse(gm1)
    if inv1 is None or F.source.space.dim != F.target.space.dim:
        raise RejectedInput("f_1 is not invertible")
    taylor = {1: multilinear_from_graded_map(inv1, F.flavor)}
    H = OoMorphism(F.target, F.source, dict(taylor))
    for k in range(2, top + 1):
        hk = MultilinearMap(F.target.space, F.source.space, 0, k, F.flavor)
        for word in H.source.basis_words(k):
            acc: dict = {}
            for j in range(2, k + 1):
                fj = F.taylor.get(j)
                if fj is None:
                    continue
                for tup, c in H.morph_component(j, k, word).items():
                    lin_acc(acc, fj.value(tup), c)
            if acc:
                img = inv1.apply(acc)
                hk.add_entry(word, img, -1)
        if not hk.is_zero():
            taylor[k] = hk
        H = OoMorphism(F.target, F.source, dict(taylor))
    return H


def transport_structure(G: OoMorphism, max_weight=None) -> OoStructure:
    """The unique structure on the target space making G an isomorphism from
    G.source: Q~ = G Q G^{-1} (target structure of G is ignored)."""
    top = max_weight or G.max_weight
    H = invert_morphism(G, top)
    s = G.source
    space = G.target.space
    taylor = {}
    for k in range(1, top + 1):
        qk = MultilinearMap(space, space, 1, k, G.flavor)
        for word in G.target.basis_words(k):
            acc: dict = {}
            for b in range(1, k + 1):
                hcomp = H.morph_component(b, k, word)
                if not hcomp:
                    continue
                for tup, c in hcomp.items():
                    for a in range(1, b + 2):
                        ga = G.taylor.get(a)
                        if ga is None:
                            continue
                        for tup2, c2 in s.coder_component(a, b, tup).items():
                            lin_acc(acc, ga.value(tup2), c * c2)
            if acc:
                qk.add_entry(word, acc)
        if not qk.is_zero():
            taylor[k] = qk
    return OoStructure(space, G.flavor, taylor, top)


# ---------------------------------------------------------------------------
# symmetrization


def symmetrize_structure(s: OoStructure) -> OoStructure:
    if s.flavor != TENSOR:
        raise MalformedInput("symmetrization takes an A-infinity[1] input")
    taylor = {k: q.symmetrized() for k, q in s.taylor.items()}
    return OoStructure(s.space, SYMMETRIC, taylor, s.max_weight)


def symmetrize_morphism(F: OoMorphism, sym_source=None, sym_target=None) -> OoMorphism:
    if F.flavor != TENSOR:
        raise MalformedInput("symmetrization takes an A-infinity[1] input")
    src = sym_source or symmetrize_structure(F.source)
    tgt = sym_target or symmetrize_structure(F.target)
    taylor = {k: f.symmetrized() for k, f in F.taylor.items()}
    return OoMorphism(src, tgt, taylor)


# ---------------------------------------------------------------------------
# DG-Lie and DG-associative sources


class DgLieAlgebra:
    """DGLA with named basis: differential (degree +1) and bracket table."""

    def __init__(self, space: GradedSpace, d: GradedMap, bracket: MultilinearMap):
        if d.degree != 1 or d.source != space or d.target != space:
            raise MalformedInput("differential must be a degree +1 endomorphism")
        if bracket.arity != 2 or bracket.degree != 0 or bracket.flavor != TENSOR:
            raise MalformedInput("bracket must be a tensor-flavor arity-2 degree-0 map")
        self.space = space
        self.d = d
        self.bracket = bracket

    def bracket_vec(self, u: dict, v: dict) -> dict:
        return self.bracket.apply_vectors([u, v])

    def check(self) -> Report:
        r = Report("dgla")
        sp = self.space
        dd = self.d.compose(self.d)
        r.add("d^2=0", dd.is_zero(), witness=_first_nonzero(dd))
        ok = True
        wit = None
        for x in sp.names:
            for y in sp.names:
                lhs = self.bracket.value((x, y))
                sign = -1 if (sp.degree[x] % 2 and sp.degree[y] % 2) else 1
                rhs = lin_scale(self.bracket.value((y, x)), -sign)
                if not _eq(lhs, rhs):
                    ok, wit = False, (x, y)
                    break
            if not ok:
                break
        r.add("antisymmetry", ok, witness=wit)
        ok = True
        wit = None
        for x in sp.names:
            for y in sp.names:
                lhs = self.d.apply(self.bracket.value((x, y)))
                rhs = self.bracket.apply_vectors([self.d.value(x), lin_single(y)])
                sgn = -1 if sp.degree[x] % 2 else 1
                lin_acc(rhs, self.bracket.apply_vectors([lin_single(x), self.d.value(y)]), sgn)
                if not _eq(lhs, rhs):
                    ok, wit = False, (x, y)
                    break
            if not ok:
                break
        r.add("leibniz", ok, witness=wit)
        ok = True
        wit = None
        for x in sp.names:
            for y in sp.names:
                for z in sp.names:
                    lhs = self.bracket.apply_vectors(
                        [lin_single(x), self.bracket.value((y, z))])
                    rhs = self.bracket.apply_vectors(
                        [self.bracket.value((x, y)), lin_single(z)])
                    sgn = -1 if (sp.degree[x] % 2 and sp.degree[y] % 2) else 1
                    lin_acc(rhs, self.bracket.apply_vectors(
                        [lin_single(y), self.bracket.value((x, z))]), sgn)
                    if not _eq(lhs, rhs):
                        ok, wit = False, (x, y, z)
                        break
                if not ok:
                    break
            if not ok:
                break
        r.add("jacobi", ok, witness=wit)
        return r


class DgAlgebra:
    """DG associative algebra with named basis (not required to be unital)."""

    def __init__(self, space: GradedSpace, d: GradedMap, product: MultilinearMap):
        if d.degree != 1 or d.source != space or d.target != space:
            raise MalformedInput("differential must be a degree +1 endomorphism")
        if product.arity != 2 or product.degree != 0 or product.flavor != TENSOR:
            raise MalformedInput("product must be a tensor-flavor arity-2 degree-0 map")
        self.space = space
        self.d = d
        self.product = product

    def mul(self, u: dict, v: dict) -> dict:
        return self.product.apply_vectors([u, v])

    def check(self) -> Report:
        r = Report("dg algebra")
        sp = self.space
        dd = self.d.compose(self.d)
        r.add("d^2=0", dd.is_zero(), witness=_first_nonzero(dd))
        ok, wit = True, None
        for x in sp.names:
            for y in sp.names:
                for z in sp.names:
                    lhs = self.mul(self.product.value((x, y)), lin_single(z))
                    rhs = self.mul(lin_single(x), self.product.value((y, z)))
                    if not _eq(lhs, rhs):
                        ok, wit = False, (x, y, z)
                        break
                if not ok:
                    break
            if not ok:
                break
        r.add("associativity", ok, witness=wit)
        ok, wit = True, None
        for x in sp.names:
            for y in sp.names:
                lhs = self.d.apply(self.product.value((x, y)))
                rhs = self.mul(self.d.value(x), lin_single(y))
                sgn = -1 if sp.degree[x] % 2 else 1
                lin_acc(rhs, self.mul(lin_single(x), self.d.value(y)), sgn)
                if not _eq(lhs, rhs):
                    ok, wit = False, (x, y)
                    break
            if not ok:
                break
        r.add("leibniz", ok, witness=wit)
        return r

    def commutator_dgla(self) -> DgLieAlgebra:
        br = MultilinearMap(self.space, self.space, 0, 2, TENSOR)
        for x in self.space.names:
            for y in self.space.names:
                val = dict(self.product.value((x, y)))
                sgn = -1 if (self.space.degree[x] % 2 and self.space.degree[y] % 2) else 1
                lin_acc(val, self.product.value((y, x)), -sgn)
                if val:
                    br.set_entry((x, y), val)
        return DgLieAlgebra(self.space, self.d, br)


class DglaMorphism:
    """DGLA morphism; `is_injective`/`is_surjective` computed over Q."""

    def __init__(self, source: DgLieAlgebra, target: DgLieAlgebra, gmap: GradedMap):
        if gmap.degree != 0 or gmap.source != source.space or gmap.target != target.space:
            raise MalformedInput("morphism must be a degree-0 map with matching spaces")
        self.source = source
        self.target = target
        self.map = gmap

    @property
    def is_injective(self) -> bool:
        from .graded import map_kernel_basis
        return not map_kernel_basis(self.map)

    @property
    def is_surjective(self) -> bool:
        from .graded import map_is_surjective
        return map_is_surjective(self.map)

    def check(self) -> Report:
        r = Report("dgla morphism")
        chain = self.target.d.compose(self.map) == self.map.compose(self.source.d)
        r.add("chain_map", chain)
        ok, wit = True, None
        for x in self.source.space.names:
            for y in self.source.space.names:
                lhs = self.map.apply(self.source.bracket.value((x, y)))
                rhs = self.target.bracket.apply_vectors(
                    [self.map.value(x), self.map.value(y)])
                if not _eq(lhs, rhs):
                    ok, wit = False, (x, y)
                    break
            if not ok:
                break
        r.add("bracket_compatible", ok, witness=wit)
        return r


class DgaMorphism:
    """Morphism of DG associative algebras."""

    def __init__(self, source: DgAlgebra, target: DgAlgebra, gmap: GradedMap):
        if gmap.degree != 0 or gmap.source != source.space or gmap.target != target.space:
            raise MalformedInput("morphism must be a degree-0 map with matching spaces")
        self.source = source
        self.target = target
        self.map = gmap

    def check(self) -> Report:
        r = Report("dga morphism")
        r.add("chain_map",
              self.target.d.compose(self.map) == self.map.compose(self.source.d))
        ok, wit = True, None
        for x in self.source.space.names:
            for y in self.source.space.names:
                lhs = self.map.apply(self.source.product.value((x, y)))
                rhs = self.target.product.apply_vectors(
                    [self.map.value(x), self.map.value(y)])
                if not _eq(lhs, rhs):
                    ok, wit = False, (x, y)
                    break
            if not ok:
                break
        r.add("multiplicative", ok, witness=wit)
        return r

    def commutator_dgla_morphism(self) -> DglaMorphism:
        return DglaMorphism(self.source.commutator_dgla(),
                            self.target.commutator_dgla(), self.map)


def _eq(a, b):
    return {n: c for n, c in a.items() if c} == {n: c for n, c in b.items() if c}


def _first_nonzero(gm: GradedMap):
    for n in gm.source.names:
        if gm.value(n):
            return n
    return None


# ---------------------------------------------------------------------------
# decalage


def decalage_dgla(L: DgLieAlgebra, max_weight: int = 6, validate: bool = True) -> OoStructure:
    """L-infinity[1] structure on L[1]: q1 = -s^{-1} d s, q2 the shifted bracket.

    q1(x) = -dx and q2(x (.) y) = (-1)^{|x|} [x, y] read through the degree
    shift (names are preserved; only degrees move).
    """
    if validate:
        rep = L.check()
        if not rep.ok:
            raise RejectedInput("input is not a DGLA: %s" % rep.first_failure())
    sh = L.space.shifted(1)
    q1 = MultilinearMap(sh, sh, 1, 1, SYMMETRIC)
    for n in L.space.names:
        val = L.d.value(n)
        if val:
            q1.set_entry((n,), lin_scale(val, -1))
    q2 = MultilinearMap(sh, sh, 1, 2, SYMMETRIC)
    for i, x in enumerate(L.space.names):
        for y in L.space.names[i:]:
            if x == y and sh.degree[x] % 2:
                continue
            val = L.bracket.value((x, y))
            if val:
                sgn = -1 if L.space.degree[x] % 2 else 1
                q2.add_entry((x, y), val, sgn)
    taylor = {1: q1, 2: q2}
    return OoStructure(sh, SYMMETRIC, taylor, max_weight)


def decalage_dgla_morphism(f: DglaMorphism, source: OoStructure = None,
                           target: OoStructure = None, max_weight: int = 6) -> OoMorphism:
    src = source or decalage_dgla(f.source, max_weight)
    tgt = target or decalage_dgla(f.target, max_weight)
    f1 = MultilinearMap(src.space, tgt.space, 0, 1, SYMMETRIC)
    for n in f.source.space.names:
        val = f.map.value(n)
        if val:
            f1.set_entry((n,), val)
    return OoMorphism(src, tgt, {1: f1})


def decalage_dga(A: DgAlgebra, max_weight: int = 6, validate: bool = True) -> OoStructure:
    """A-infinity[1] structure on A[1] induced by a DG associative algebra."""
    if validate:
        rep = A.check()
        if not rep.ok:
            raise RejectedInput("input is not a DG algebra: %s" % rep.first_failure())
    sh = A.space.shifted(1)
    q1 = MultilinearMap(sh, sh, 1, 1, TENSOR)
    for n in A.space.names:
        val = A.d.value(n)
        if val:
            q1.set_entry((n,), lin_scale(val, -1))
    q2 = MultilinearMap(sh, sh, 1, 2, TENSOR)
    for x in A.space.names:
        for y in A.space.names:
            val = A.product.value((x, y))
            if val:
                sgn = -1 if A.space.degree[x] % 2 else 1
                q2.set_entry((x, y), lin_scale(val, sgn))
    return OoStructure(sh, TENSOR, {1: q1, 2: q2}, max_weight)


# ---------------------------------------------------------------------------
# endomorphism DGLAs with named bases


def end_dgla(space: GradedSpace, d: GradedMap) -> DgLieAlgebra:
    """End(V) as a DGLA on elementary matrices `t<-s`, differential [d, -]."""
    from .graded import hom_space
    E = hom_space(space.names, space.names, space)
    dE = GradedMap(E, E, 1)
    for s in space.names:
        for t in space.names:
            name = "%s<-%s" % (t, s)
            val: dict = {}
            for u, c in d.value(t).items():
                lin_acc(val, lin_single("%s<-%s" % (u, s)), c)
            edeg = space.degree[t] - space.degree[s]
            sgn = -1 if edeg % 2 else 1
            for v in space.names:
                c = d.value(v).get(s)
                if c:
                    lin_acc(val, lin_single("%s<-%s" % (t, v)), -sgn * c)
            if val:
                dE.set(name, val)
    br = MultilinearMap(E, E, 0, 2, TENSOR)
    for n1 in E.names:
        t1, s1 = n1.split("<-")
        for n2 in E.names:
            t2, s2 = n2.split("<-")
            val: dict = {}
            if s1 == t2:
                val["%s<-%s" % (t1, s2)] = Fraction(1)
            if s2 == t1:
                sgn = -1 if (E.degree[n1] % 2 and E.degree[n2] % 2) else 1
                lin_acc(val, lin_single("%s<-%s" % (t2, s1)), -sgn)
            if val:
                br.set_entry((n1, n2), val)
    return DgLieAlgebra(E, dE, br)


def end_preserving_sub_dgla(space: GradedSpace, d: GradedMap, preserved):
    """End(V; W) for a basis-aligned subspace W, with its inclusion into End(V).

    Returns (sub_dgla, ambient_dgla, inclusion DglaMorphism).
    """
    preserved = set(preserved)
    if not preserved <= set(space.names):
        raise MalformedInput("preserved names must be basis names")
    for w in preserved:
        if any(t not in preserved for t in d.value(w)):
            raise RejectedInput("differential does not preserve the subspace")
    amb = end_dgla(space, d)
    keep = [n for n in amb.space.names
            if not (n.split("<-")[1] in preserved and n.split("<-")[0] not in preserved)]
    sub_space = amb.space.subspace(keep)
    dS = GradedMap(sub_space, sub_space, 1)
    for n in keep:
        val = amb.d.value(n)
        if any(m not in sub_space.degree for m in val):
            raise RejectedInput("End(V;W) is not closed under [d,-]")
        if val:
            dS.set(n, val)
    brS = MultilinearMap(sub_space, sub_space, 0, 2, TENSOR)
    for n1 in keep:
        for n2 in keep:
            val = amb.bracket.value((n1, n2))
            if val:
                brS.set_entry((n1, n2), val)
    sub = DgLieAlgebra(sub_space, dS, brS)
    inc = GradedMap(sub_space, amb.space, 0)
    for n in keep:
        inc.set(n, lin_single(n))
    return sub, amb, DglaMorphism(sub, amb, inc)


__all__ = [
    "OoStructure", "OoMorphism", "TensorComponent",
    "coderivation_component_value", "morphism_component_value",
    "prolong_coderivation", "prolong_morphism",
    "check_structure", "check_morphism",
    "identity_morphism", "compose_morphisms", "invert_morphism", "transport_structure",
    "symmetrize_structure", "symmetrize_morphism",
    "DgLieAlgebra", "DgAlgebra", "DglaMorphism", "DgaMorphism",
    "decalage_dgla", "decalage_dgla_morphism", "decalage_dga",
    "end_dgla", "end_preserving_sub_dgla",
]
