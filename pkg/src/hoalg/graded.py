"""Exact graded linear algebra over the rationals.

Sparse vectors and maps indexed by named basis elements, Koszul sign
bookkeeping, unshuffles, Bernoulli numbers, contractions of complexes and
deterministic rational row reduction.  All arithmetic is exact
(`fractions.Fraction`); no floats anywhere.  Objects are treated as
immutable once built, so sharing between threads is safe.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial


class MalformedInput(ValueError):
    """Input violates a shape/typing precondition."""


class RejectedInput(ValueError):
    """Input is well-formed but fails a mathematical precondition."""


class UnsupportedOperation(RuntimeError):
    """Operation is deliberately out of scope for the given flavor."""


# ---------------------------------------------------------------------------
# combinatorics


def sign_pow(exponent: int) -> int:
    """(-1)^n as an exact int for any integer n (negative exponents included)."""
    return -1 if exponent % 2 else 1


def koszul_sign(perm, degrees) -> int:
    """Sign picked up by reordering graded symbols v_1..v_k into v_perm(1)..v_perm(k).

    `perm` is a bijection of {1..k} in one-line notation; `degrees` are the
    degrees of v_1..v_k.  Each transposed pair of odd symbols contributes -1.
    """
    perm = tuple(perm)
    k = len(perm)
    if sorted(perm) != list(range(1, k + 1)):
        raise MalformedInput("permutation must be a bijection of {1..%d}: %r" % (k, perm))
    if len(degrees) != k:
        raise MalformedInput("need one degree per symbol")
    sign = 1
    for i in range(k):
        di = degrees[perm[i] - 1]
        if di % 2 == 0:
            continue
        for j in range(i + 1, k):
            if perm[i] > perm[j] and degrees[perm[j] - 1] % 2:
                sign = -sign
    return sign


def unshuffles(*sizes: int):
    """All (p_1,..,p_r)-unshuffles of {1..sum}, lexicographically.

    A permutation sigma is returned as the tuple (sigma(1),..,sigma(k)); it is
    increasing on each of the consecutive blocks.  len == multinomial(sizes).
    """
    if any(s < 0 for s in sizes):
        raise MalformedInput("block sizes must be >= 0")
    k = sum(sizes)

    def rec(remaining, blocks):
        if not blocks:
            yield ()
            return
        first, rest = blocks[0], blocks[1:]
        for combo in itertools.combinations(remaining, first):
            left = tuple(x for x in remaining if x not in combo)
            for tail in rec(left, rest):
                yield combo + tail

    return list(rec(tuple(range(1, k + 1)), tuple(sizes)))


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """k-th Bernoulli number in the convention t/(e^t-1) = sum B_k t^k/k!  (B_1 = -1/2)."""
    if k < 0:
        raise MalformedInput("Bernoulli index must be >= 0")
    if k == 0:
        return Fraction(1)
    # sum_{j=0}^{k} C(k+1,j) B_j = 0 for k >= 1
    acc = Fraction(0)
    for j in range(k):
        acc += comb(k + 1, j) * bernoulli(j)
    return -acc / (k + 1)


# ---------------------------------------------------------------------------
# sparse linear combinations: plain dicts name -> Fraction, zero-free


def lin_acc(acc: dict, vec: dict, coeff=1) -> dict:
    """acc += coeff * vec, in place; drops zero entries."""
    if not coeff:
        return acc
    for n, v in vec.items():
        nv = acc.get(n, 0) + coeff * v
        if nv:
            acc[n] = nv
        else:
            del acc[n]
    return acc


def lin_scale(vec: dict, coeff) -> dict:
    if not coeff:
        return {}
    return {n: coeff * v for n, v in vec.items()}


def lin_single(name, coeff=1) -> dict:
    return {name: Fraction(coeff)} if coeff else {}


def lin_eq(a: dict, b: dict) -> bool:
    return {n: v for n, v in a.items() if v} == {n: v for n, v in b.items() if v}


def format_coeff(c) -> str:
    c = Fraction(c)
    return str(c)


def format_vector(vec: dict, space=None) -> str:
    if not vec:
        return "0"
    if space is not None:
        names = sorted(vec, key=lambda n: space.index[n])
    else:
        names = sorted(vec)
    parts = []
    for n in names:
        c = vec[n]
        if not c:
            continue
        parts.append("%s*%s" % (format_coeff(c), n))
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# graded spaces


class GradedSpace:
    """Finite-dimensional Z-graded (optionally Z^2-bigraded) space with named basis.

    The basis order is the declaration order and is the single source of
    determinism for every computation downstream.
    """

    def __init__(self, basis):
        names = []
        degree = {}
        bidegree = {}
        for item in basis:
            if len(item) == 2:
                name, deg = item
                bid = None
            else:
                name, deg, bid = item
            if name in degree:
                raise MalformedInput("duplicate basis name %r" % name)
            if bid is not None:
                p, q = bid
                if p + q != deg:
                    raise MalformedInput(
                        "bidegree %r of %r does not sum to degree %d" % (bid, name, deg))
                bid = (p, q)
            names.append(name)
            degree[name] = int(deg)
            bidegree[name] = bid
        self.names = tuple(names)
        self.degree = degree
        self.bidegree = bidegree
        self.index = {n: i for i, n in enumerate(self.names)}

    @property
    def dim(self) -> int:
        return len(self.names)

    def basis_of_degree(self, d: int):
        return [n for n in self.names if self.degree[n] == d]

    def degrees_present(self):
        return sorted(set(self.degree.values()))

    def shifted(self, n: int) -> "GradedSpace":
        """V[n]: same names, degree d becomes d - n.  Bidegrees are dropped."""
        return GradedSpace([(name, self.degree[name] - n) for name in self.names])

    def subspace(self, names) -> "GradedSpace":
        names = list(names)
        missing = [n for n in names if n not in self.degree]
        if missing:
            raise MalformedInput("unknown basis names %r" % missing)
        return GradedSpace(
            [(n, self.degree[n], self.bidegree[n]) if self.bidegree[n] is not None
             else (n, self.degree[n]) for n in names])

    def vector_degree(self, vec: dict):
        """Common degree of a homogeneous combination, None for 0, error if mixed."""
        degs = {self.degree[n] for n, c in vec.items() if c}
        if not degs:
            return None
        if len(degs) > 1:
            raise MalformedInput("inhomogeneous combination: degrees %r" % sorted(degs))
        return degs.pop()

    def data(self):
        return tuple((n, self.degree[n], self.bidegree[n]) for n in self.names)

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.data() == other.data()

    def __hash__(self):
        return hash(self.data())

    def __repr__(self):
        return "GradedSpace(%d elements)" % self.dim


def pair_space(a: GradedSpace, b: GradedSpace, prefix_a="a:", prefix_b="b:") -> GradedSpace:
    """Direct sum with uniform name prefixes ('a:' first block, 'b:' second)."""
    basis = []
    for src, pre in ((a, prefix_a), (b, prefix_b)):
        for n in src.names:
            bid = src.bidegree[n]
            if bid is None:
                basis.append((pre + n, src.degree[n]))
            else:
                basis.append((pre + n, src.degree[n], bid))
    return GradedSpace(basis)


def split_pair_vector(vec: dict, prefix_a="a:", prefix_b="b:"):
    """Split a combination on a pair space into the two unprefixed components."""
    va, vb = {}, {}
    for n, c in vec.items():
        if n.startswith(prefix_a):
            va[n[len(prefix_a):]] = c
        elif n.startswith(prefix_b):
            vb[n[len(prefix_b):]] = c
        else:
            raise MalformedInput("name %r carries no pair prefix" % n)
    return va, vb


def prefix_vector(vec: dict, prefix: str) -> dict:
    return {prefix + n: c for n, c in vec.items()}


def hom_space(target_names, source_names, big: GradedSpace) -> GradedSpace:
    """Space of elementary maps `t<-s` (s in source_names, t in target_names).

    The element named `t<-s` is the map sending s to t and every other basis
    element of `big` to zero; its degree is deg(t) - deg(s).
    """
    basis = []
    for s in source_names:
        for t in target_names:
            basis.append(("%s<-%s" % (t, s), big.degree[t] - big.degree[s]))
    return GradedSpace(basis)


def sym_normalize(names, index: dict, degree: dict):
    """Canonical (sorted by basis index) form of a symmetric-word tuple.

    Returns (canonical_tuple, koszul_sign) or None when the word is zero in
    the symmetric algebra (a repeated odd symbol).
    """
    names = list(names)
    idx = [index[n] for n in names]
    sign = 1
    for i in range(1, len(names)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            if degree[names[j - 1]] % 2 and degree[names[j]] % 2:
                sign = -sign
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            names[j - 1], names[j] = names[j], names[j - 1]
            j -= 1
    for a, b in zip(names, names[1:]):
        if a == b and degree[a] % 2:
            return None
    return tuple(names), sign


# ---------------------------------------------------------------------------
# graded maps


class GradedMap:
    """Degree-homogeneous linear map, stored sparsely on basis elements."""

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 entries=None, bidegree=None):
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.bidegree = tuple(bidegree) if bidegree is not None else None
        self.entries = {}
        if entries:
            for name, vec in entries.items():
                self.set(name, vec)

    def set(self, name, vec: dict):
        if name not in self.source.degree:
            raise MalformedInput("unknown source basis element %r" % name)
        if any(isinstance(c, float) for c in vec.values()):
            raise MalformedInput("float coefficient rejected (exact arithmetic only)")
        vec = {n: Fraction(c) for n, c in vec.items() if c}
        want = self.source.degree[name] + self.degree
        for out, c in vec.items():
            if out not in self.target.degree:
                raise MalformedInput("unknown target basis element %r" % out)
            if self.target.degree[out] != want:
                raise MalformedInput(
                    "map of degree %d sends %r (deg %d) to %r (deg %d)"
                    % (self.degree, name, self.source.degree[name], out,
                       self.target.degree[out]))
            if self.bidegree is not None:
                bs = self.source.bidegree[name]
                bt = self.target.bidegree[out]
                if bs is not None and bt is not None:
                    if (bs[0] + self.bidegree[0], bs[1] + self.bidegree[1]) != bt:
                        raise MalformedInput(
                            "bidegree violation at %r -> %r" % (name, out))
        if vec:
            self.entries[name] = vec
        else:
            self.entries.pop(name, None)

    def value(self, name) -> dict:
        return self.entries.get(name, {})

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for n, c in vec.items():
            lin_acc(out, self.entries.get(n, {}), c)
        return out

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self o other."""
        if other.target != self.source:
            raise MalformedInput("composition shape mismatch")
        out = GradedMap(other.source, self.target, self.degree + other.degree)
        for name, vec in other.entries.items():
            img = self.apply(vec)
            if img:
                out.set(name, img)
        return out

    def add(self, other: "GradedMap", coeff=1) -> "GradedMap":
        if (other.source, other.target, other.degree) != (self.source, self.target, self.degree):
            raise MalformedInput("sum shape mismatch")
        out = GradedMap(self.source, self.target, self.degree)
        for name in set(self.entries) | set(other.entries):
            vec = dict(self.entries.get(name, {}))
            lin_acc(vec, other.entries.get(name, {}), coeff)
            if vec:
                out.set(name, vec)
        return out

    def scale(self, coeff) -> "GradedMap":
        out = GradedMap(self.source, self.target, self.degree)
        for name, vec in self.entries.items():
            out.set(name, lin_scale(vec, coeff))
        return out

    def commutator(self, other: "GradedMap") -> "GradedMap":
        """Graded commutator self o other - (-1)^{|self||other|} other o self."""
        ab = self.compose(other)
        ba = other.compose(self)
        sign = -1 if (self.degree % 2 and other.degree % 2) else 1
        return ab.add(ba, -sign)

    def is_zero(self) -> bool:
        return all(not any(vec.values()) for vec in self.entries.values())

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        if (self.source, self.target, self.degree) != (other.source, other.target, other.degree):
            return False
        names = set(self.entries) | set(other.entries)
        return all(lin_eq(self.entries.get(n, {}), other.entries.get(n, {})) for n in names)

    def __hash__(self):
        return id(self)

    @staticmethod
    def identity(space: GradedSpace) -> "GradedMap":
        out = GradedMap(space, space, 0)
        for n in space.names:
            out.set(n, lin_single(n))
        return out

    @staticmethod
    def zero(source: GradedSpace, target: GradedSpace, degree: int) -> "GradedMap":
        return GradedMap(source, target, degree)

    def __repr__(self):
        return "GradedMap(degree %d, %d entries)" % (self.degree, len(self.entries))


def elementary_to_graded_map(vec: dict, hom: GradedSpace, source: GradedSpace,
                             target: GradedSpace, degree=None) -> GradedMap:
    """Realize a combination of elementary `t<-s` symbols as an actual GradedMap."""
    deg = hom.vector_degree(vec) if degree is None else degree
    out = GradedMap(source, target, 0 if deg is None else deg)
    acc = {}
    for name, c in vec.items():
        t, s = name.split("<-")
        acc.setdefault(s, {})
        lin_acc(acc[s], lin_single(t), c)
    for s, v in acc.items():
        out.set(s, v)
    return out


def graded_map_to_elementary(gm: GradedMap, hom: GradedSpace) -> dict:
    """Decompose a GradedMap in the elementary basis of a hom space."""
    vec = {}
    for s, img in gm.entries.items():
        for t, c in img.items():
            name = "%s<-%s" % (t, s)
            if name not in hom.degree:
                raise MalformedInput("map does not live in the given hom space (%s)" % name)
            lin_acc(vec, lin_single(name), c)
    return vec


# ---------------------------------------------------------------------------
# multilinear maps


TENSOR = "tensor"
SYMMETRIC = "symmetric"


class MultilinearMap:
    """Arity-k map V^{ox k} -> W (tensor flavor) or S^k V -> W (symmetric flavor).

    Symmetric entries are stored on the canonical (basis-ordered) tuple only;
    reading any other order applies the Koszul sign on the fly, and words with
    a repeated odd symbol read as zero.
    """

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 arity: int, flavor: str):
        if arity < 1:
            raise MalformedInput("arity must be >= 1")
        if flavor not in (TENSOR, SYMMETRIC):
            raise MalformedInput("flavor must be tensor or symmetric")
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.arity = int(arity)
        self.flavor = flavor
        self.entries = {}

    def normalize(self, names):
        if len(names) != self.arity:
            raise MalformedInput("expected %d arguments, got %d" % (self.arity, len(names)))
        if self.flavor == TENSOR:
            return tuple(names), 1
        return sym_normalize(names, self.source.index, self.source.degree) or (None, 0)

    def set_entry(self, names, vec: dict):
        key, sign = self.normalize(names)
        if any(isinstance(c, float) for c in vec.values()):
            raise MalformedInput("float coefficient rejected (exact arithmetic only)")
        vec = {n: Fraction(c) for n, c in vec.items() if c}
        if key is None:
            if vec:
                raise MalformedInput("word %r is zero in the symmetric algebra" % (names,))
            return
        vec = lin_scale(vec, sign)
        want = sum(self.source.degree[n] for n in key) + self.degree
        for out, c in vec.items():
            if self.target.degree[out] != want:
                raise MalformedInput(
                    "arity-%d map of degree %d sends %r to %r: degree mismatch"
                    % (self.arity, self.degree, names, out))
        if vec:
            self.entries[key] = vec
        else:
            self.entries.pop(key, None)

    def add_entry(self, names, vec: dict, coeff=1):
        key, sign = self.normalize(names)
        if key is None:
            return
        cur = dict(self.entries.get(key, {}))
        lin_acc(cur, vec, coeff * sign)
        self.set_entry(key, cur)

    def value(self, names) -> dict:
        key, sign = self.normalize(names)
        if key is None:
            return {}
        vec = self.entries.get(key)
        if not vec:
            return {}
        return vec if sign == 1 else lin_scale(vec, sign)

    def apply_vectors(self, vectors) -> dict:
        """Full multilinear expansion on a list of combinations."""
        if len(vectors) != self.arity:
            raise MalformedInput("expected %d arguments" % self.arity)
        out: dict = {}
        for combo in itertools.product(*[list(v.items()) for v in vectors]):
            coeff = 1
            names = []
            for n, c in combo:
                coeff *= c
                names.append(n)
            if coeff:
                lin_acc(out, self.value(tuple(names)), coeff)
        return out

    def symmetrized(self) -> "MultilinearMap":
        """Sum over all permutations with Koszul signs (tensor -> symmetric)."""
        if self.flavor != TENSOR:
            raise MalformedInput("can only symmetrize a tensor-flavor map")
        out = MultilinearMap(self.source, self.target, self.degree, self.arity, SYMMETRIC)
        deg = self.source.degree
        for key in itertools.combinations_with_replacement(self.source.names, self.arity):
            canon = sym_normalize(key, self.source.index, deg)
            if canon is None:
                continue
            tup = canon[0]
            degs = [deg[n] for n in tup]
            acc: dict = {}
            for perm in itertools.permutations(range(1, self.arity + 1)):
                sign = koszul_sign(perm, degs)
                lin_acc(acc, self.entries.get(tuple(tup[p - 1] for p in perm), {}), sign)
            if acc:
                out.set_entry(tup, acc)
        return out

    def is_zero(self) -> bool:
        return all(not any(v.values()) for v in self.entries.values())

    def __eq__(self, other):
        if not isinstance(other, MultilinearMap):
            return NotImplemented
        if (self.source, self.target, self.degree, self.arity, self.flavor) != \
           (other.source, other.target, other.degree, other.arity, other.flavor):
            return False
        keys = set(self.entries) | set(other.entries)
        return all(lin_eq(self.entries.get(k, {}), other.entries.get(k, {})) for k in keys)

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return "MultilinearMap(%s, arity %d, degree %d, %d entries)" % (
            self.flavor, self.arity, self.degree, len(self.entries))


def multilinear_from_graded_map(gm: GradedMap, flavor: str) -> MultilinearMap:
    out = MultilinearMap(gm.source, gm.target, gm.degree, 1, flavor)
    for name, vec in gm.entries.items():
        out.set_entry((name,), vec)
    return out


# ---------------------------------------------------------------------------
# verification reports


class Report:
    """List of named pass/fail checks with optional witness data."""

    def __init__(self, title: str):
        self.title = title
        self.checks = []

    def add(self, label: str, ok: bool, weight=None, witness=None, lhs=None, rhs=None):
        self.checks.append({
            "label": label, "ok": bool(ok), "weight": weight,
            "witness": witness, "lhs": lhs, "rhs": rhs,
        })

    def merge(self, other: "Report", prefix=""):
        for c in other.checks:
            c = dict(c)
            c["label"] = prefix + c["label"]
            self.checks.append(c)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def first_failure(self):
        for c in self.checks:
            if not c["ok"]:
                return c
        return None

    def lines(self):
        out = []
        for c in self.checks:
            weight = "-" if c["weight"] is None else str(c["weight"])
            if c["witness"] is None:
                tup = "-"
            elif isinstance(c["witness"], (tuple, list)):
                tup = "(%s)" % ",".join(str(x) for x in c["witness"])
            else:
                tup = "(%s)" % c["witness"]
            lhs = "-" if c["lhs"] is None else str(c["lhs"])
            rhs = "-" if c["rhs"] is None else str(c["rhs"])
            out.append("RELATION %s weight=%s tuple=%s lhs=%s rhs=%s status=%s"
                       % (c["label"], weight, tup, lhs, rhs,
                          "PASS" if c["ok"] else "FAIL"))
        return out

    def __str__(self):
        head = "%s: %s" % (self.title, "PASS" if self.ok else "FAIL")
        return "\n".join([head] + self.lines())


# ---------------------------------------------------------------------------
# contractions


class Contraction:
    """Deformation retract data between a small and a big complex.

    inject: small -> big and project: big -> small are chain maps with
    project o inject = Id; homotopy K satisfies dK + Kd = inject o project - Id.
    """

    def __init__(self, small: GradedSpace, d_small: GradedMap,
                 big: GradedSpace, d_big: GradedMap,
                 inject: GradedMap, project: GradedMap, homotopy: GradedMap,
                 side_conditions: bool = True):
        self.small = small
        self.d_small = d_small
        self.big = big
        self.d_big = d_big
        self.inject = inject
        self.project = project
        self.homotopy = homotopy
        self.side_conditions = side_conditions


def _map_identity_check(report, label, lhs: GradedMap, rhs: GradedMap):
    names = set(lhs.entries) | set(rhs.entries)
    for n in sorted(names, key=lambda x: lhs.source.index[x]):
        a, b = lhs.value(n), rhs.value(n)
        if not lin_eq(a, b):
            report.add(label, False, witness=n,
                       lhs=format_vector(a, lhs.target), rhs=format_vector(b, rhs.target))
            return
    report.add(label, True)


def check_contraction(c: Contraction) -> Report:
    """Verify all contraction identities, with a witness basis element on failure."""
    r = Report("contraction")
    shapes_ok = (c.inject.source == c.small and c.inject.target == c.big
                 and c.project.source == c.big and c.project.target == c.small
                 and c.homotopy.source == c.big and c.homotopy.target == c.big
                 and c.d_small.degree == 1 and c.d_big.degree == 1
                 and c.inject.degree == 0 and c.project.degree == 0
                 and c.homotopy.degree == -1)
    if not shapes_ok:
        raise MalformedInput("contraction shapes are inconsistent")
    _map_identity_check(r, "d_small^2=0", c.d_small.compose(c.d_small),
                        GradedMap.zero(c.small, c.small, 2))
    _map_identity_check(r, "d_big^2=0", c.d_big.compose(c.d_big),
                        GradedMap.zero(c.big, c.big, 2))
    _map_identity_check(r, "inject_chain", c.d_big.compose(c.inject),
                        c.inject.compose(c.d_small))
    _map_identity_check(r, "project_chain", c.d_small.compose(c.project),
                        c.project.compose(c.d_big))
    _map_identity_check(r, "project.inject=id", c.project.compose(c.inject),
                        GradedMap.identity(c.small))
    homot = c.d_big.compose(c.homotopy).add(c.homotopy.compose(c.d_big))
    _map_identity_check(r, "dK+Kd=fg-id", homot,
                        c.inject.compose(c.project).add(GradedMap.identity(c.big), -1))
    if c.side_conditions:
        _map_identity_check(r, "project.K=0", c.project.compose(c.homotopy),
                            GradedMap.zero(c.big, c.small, -1))
        _map_identity_check(r, "K.inject=0", c.homotopy.compose(c.inject),
                            GradedMap.zero(c.small, c.big, -1))
        _map_identity_check(r, "K^2=0", c.homotopy.compose(c.homotopy),
                            GradedMap.zero(c.big, c.big, -2))
    return r


# ---------------------------------------------------------------------------
# deterministic rational row reduction


def rref(rows, ncols):
    """In-place reduced row echelon form; returns the pivot column list.

    Pivots are chosen in declared column order, first nonzero row wins; this
    makes every solve in the repo reproducible.
    """
    pivots = []
    prow = 0
    for col in range(ncols):
        sel = None
        for r in range(prow, len(rows)):
            if rows[r][col]:
                sel = r
                break
        if sel is None:
            continue
        rows[prow], rows[sel] = rows[sel], rows[prow]
        pv = rows[prow][col]
        rows[prow] = [x / pv for x in rows[prow]]
        for r in range(len(rows)):
            if r != prow and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[prow])]
        pivots.append(col)
        prow += 1
        if prow == len(rows):
            break
    return pivots


def solve_matrix(columns, rhs):
    """Solve sum_j x_j columns[j] = rhs exactly; minimal-pivot particular solution.

    columns: list of dicts (row_name -> coeff); rhs: dict.  Returns list of
    Fractions or None when inconsistent.  Free variables are set to zero.
    """
    row_names = sorted({r for col in columns for r in col} | set(rhs))
    ridx = {r: i for i, r in enumerate(row_names)}
    n = len(columns)
    rows = [[Fraction(0)] * (n + 1) for _ in row_names]
    for j, col in enumerate(columns):
        for r, c in col.items():
            rows[ridx[r]][j] = Fraction(c)
    for r, c in rhs.items():
        rows[ridx[r]][n] = Fraction(c)
    pivots = rref(rows, n)
    rank = len(pivots)
    for row in rows[rank:]:
        if row[n]:
            return None
    sol = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        sol[col] = rows[i][n]
    return sol


def map_solve(gm: GradedMap, rhs: dict):
    """Solve gm(x) = rhs for a homogeneous rhs; returns a combination or None."""
    if not rhs:
        return {}
    deg = gm.target.vector_degree(rhs)
    src_names = [n for n in gm.source.names if gm.source.degree[n] == deg - gm.degree]
    cols = [gm.value(n) for n in src_names]
    sol = solve_matrix(cols, rhs)
    if sol is None:
        return None
    return {n: c for n, c in zip(src_names, sol) if c}


def map_right_inverse(gm: GradedMap):
    """Deterministic right inverse (None when gm is not surjective)."""
    inv = GradedMap(gm.target, gm.source, -gm.degree)
    for t in gm.target.names:
        sol = map_solve(gm, lin_single(t))
        if sol is None:
            return None
        inv.set(t, sol)
    return inv


def map_kernel_basis(gm: GradedMap):
    """Deterministic basis of ker(gm), one echelon pass per source degree."""
    out = []
    for deg in gm.source.degrees_present():
        src_names = [n for n in gm.source.names if gm.source.degree[n] == deg]
        row_names = sorted({r for n in src_names for r in gm.value(n)})
        ridx = {r: i for i, r in enumerate(row_names)}
        rows = [[Fraction(0)] * len(src_names) for _ in row_names]
        for j, n in enumerate(src_names):
            for r, c in gm.value(n).items():
                rows[ridx[r]][j] = Fraction(c)
        pivots = rref(rows, len(src_names))
        pivset = set(pivots)
        for free in range(len(src_names)):
            if free in pivset:
                continue
            vec = {src_names[free]: Fraction(1)}
            for i, col in enumerate(pivots):
                if rows[i][free]:
                    vec[src_names[col]] = -rows[i][free]
            out.append(vec)
    return out


def map_is_surjective(gm: GradedMap) -> bool:
    for t in gm.target.names:
        if map_solve(gm, lin_single(t)) is None:
            return False
    return True


# ---------------------------------------------------------------------------
# deterministic map with optional thread workers


def pmap(fn, items, workers: int = 1):
    """Order-preserving map; results are identical for any worker count."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


__all__ = [
    "Fraction", "MalformedInput", "RejectedInput", "UnsupportedOperation",
    "koszul_sign", "unshuffles", "bernoulli", "factorial", "sign_pow",
    "lin_acc", "lin_scale", "lin_single", "lin_eq", "format_vector", "format_coeff",
    "GradedSpace", "pair_space", "split_pair_vector", "prefix_vector", "hom_space",
    "sym_normalize", "GradedMap", "elementary_to_graded_map", "graded_map_to_elementary",
    "TENSOR", "SYMMETRIC", "MultilinearMap", "multilinear_from_graded_map",
    "Report", "Contraction", "check_contraction",
    "rref", "solve_matrix", "map_solve", "map_right_inverse", "map_kernel_basis",
    "map_is_surjective", "pmap",
]
