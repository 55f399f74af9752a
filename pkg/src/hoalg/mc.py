"""Maurer-Cartan theory over local Artin rings Q[t_1..t_g]/m^N.

Exact truncated polynomial coefficients; Maurer-Cartan residuals, the DGLA
gauge action, the two-sided Maurer-Cartan sets of a DGLA morphism and the
mapping-cocone correspondence, plus order-by-order obstruction lifting.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from .coalg import DgLieAlgebra, DglaMorphism, OoMorphism, OoStructure
from .cocone import A_PRE, B_PRE, fm_cocone_lie
from .graded import (
    GradedMap, MalformedInput, Report, format_coeff, lin_acc, map_solve,
)


class ArtinRing:
    """Q[t_1..t_g] / m^N with m the maximal ideal (t_1..t_g)."""

    def __init__(self, generators: int, order: int):
        if generators < 0 or order < 1:
            raise MalformedInput("need generators >= 0 and nilpotency order >= 1")
        self.generators = int(generators)
        self.order = int(order)

    def monomials(self, min_total: int = 0):
        """All exponent tuples with min_total <= total < order, graded-lex."""
        out = []
        for total in range(min_total, self.order):
            for combo in itertools.combinations_with_replacement(
                    range(self.generators), total):
                expo = [0] * self.generators
                for c in combo:
                    expo[c] += 1
                out.append(tuple(expo))
        seen = sorted(set(out), key=lambda m: (sum(m), m))
        return seen

    @property
    def one(self):
        return (0,) * self.generators

    def mul(self, m1, m2):
        out = tuple(a + b for a, b in zip(m1, m2))
        if sum(out) >= self.order:
            return None
        return out

    def mono_str(self, mono) -> str:
        if sum(mono) == 0:
            return "1"
        parts = []
        for i, e in enumerate(mono):
            if e == 1:
                parts.append("t%d" % (i + 1))
            elif e > 1:
                parts.append("t%d^%d" % (i + 1, e))
        return "*".join(parts)

    def parse_mono(self, text: str):
        text = text.strip()
        if text == "1":
            return self.one
        expo = [0] * self.generators
        for part in text.split("*"):
            part = part.strip()
            if "^" in part:
                var, pw = part.split("^")
            else:
                var, pw = part, "1"
            if not var.startswith("t"):
                raise MalformedInput("bad monomial %r" % text)
            idx = int(var[1:]) - 1
            if idx < 0 or idx >= self.generators:
                raise MalformedInput("generator %r out of range" % var)
            expo[idx] += int(pw)
        if sum(expo) >= self.order:
            raise MalformedInput("monomial %r is zero in the ring" % text)
        return tuple(expo)

    def __eq__(self, other):
        return isinstance(other, ArtinRing) and \
            (self.generators, self.order) == (other.generators, other.order)

    def __repr__(self):
        return "ArtinRing(Q[t1..t%d]/m^%d)" % (self.generators, self.order)


class ArtinElement:
    """Element of V (x) m_B (or V (x) B when `allow_constant`)."""

    def __init__(self, ring: ArtinRing, space, terms=None, allow_constant=False):
        self.ring = ring
        self.space = space
        self.allow_constant = allow_constant
        self.terms = {}
        if terms:
            for (name, mono), c in terms.items():
                self.add(name, mono, c)

    def add(self, name, mono, coeff):
        if name not in self.space.degree:
            raise MalformedInput("unknown basis element %r" % name)
        if isinstance(coeff, float):
            raise MalformedInput("float coefficient rejected (exact arithmetic only)")
        mono = tuple(mono)
        if sum(mono) >= self.ring.order:
            return
        if sum(mono) == 0 and not self.allow_constant:
            raise MalformedInput("element must lie in V (x) m_B")
        key = (name, mono)
        cur = self.terms.get(key, 0) + Fraction(coeff)
        if cur:
            self.terms[key] = cur
        else:
            self.terms.pop(key, None)

    def scaled(self, coeff) -> "ArtinElement":
        out = ArtinElement(self.ring, self.space, allow_constant=self.allow_constant)
        for (n, m), c in self.terms.items():
            out.add(n, m, c * coeff)
        return out

    def plus(self, other: "ArtinElement") -> "ArtinElement":
        out = ArtinElement(self.ring, self.space,
                           allow_constant=self.allow_constant or other.allow_constant)
        for (n, m), c in self.terms.items():
            out.add(n, m, c)
        for (n, m), c in other.terms.items():
            out.add(n, m, c)
        return out

    def is_zero(self) -> bool:
        return not any(self.terms.values())

    def degrees(self):
        return sorted({self.space.degree[n] for (n, _), c in self.terms.items() if c})

    def is_homogeneous(self, degree) -> bool:
        return all(self.space.degree[n] == degree
                   for (n, _), c in self.terms.items() if c)

    def component(self, total_degree: int) -> "ArtinElement":
        """Restrict to monomials of the given total degree."""
        out = ArtinElement(self.ring, self.space, allow_constant=True)
        for (n, m), c in self.terms.items():
            if sum(m) == total_degree:
                out.add(n, m, c)
        return out

    def truncated(self, ring: ArtinRing) -> "ArtinElement":
        """Push forward along the surjection onto a smaller quotient."""
        if ring.generators != self.ring.generators or ring.order > self.ring.order:
            raise MalformedInput("not a quotient ring")
        out = ArtinElement(ring, self.space, allow_constant=self.allow_constant)
        for (n, m), c in self.terms.items():
            if sum(m) < ring.order:
                out.add(n, m, c)
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda kv: (sum(kv[0][1]), kv[0][1],
                                      self.space.index[kv[0][0]]))

    def lines(self):
        return ["%s %s -> %s" % (n, self.ring.mono_str(m), format_coeff(c))
                for (n, m), c in self.sorted_terms()]

    def __eq__(self, other):
        return isinstance(other, ArtinElement) and self.ring == other.ring and \
            {k: v for k, v in self.terms.items() if v} == \
            {k: v for k, v in other.terms.items() if v}

    def __repr__(self):
        return "ArtinElement(%d terms)" % len(self.terms)


class ArtinMap:
    """B-linear map V (x) B -> W (x) B, stored on basis elements of V.

    Unlike ArtinElement, constant-monomial coefficients are allowed (the
    identity is an ArtinMap).  Operator composition carries no Koszul signs
    because the ring sits in even degree.
    """

    def __init__(self, ring: ArtinRing, source, target, entries=None):
        self.ring = ring
        self.source = source
        self.target = target
        self.entries = {}
        if entries:
            for name, table in entries.items():
                for (out, mono), c in table.items():
                    self.add(name, out, mono, c)

    def add(self, name, out, mono, coeff):
        if isinstance(coeff, float):
            raise MalformedInput("float coefficient rejected (exact arithmetic only)")
        mono = tuple(mono)
        if sum(mono) >= self.ring.order or not coeff:
            return
        table = self.entries.setdefault(name, {})
        key = (out, mono)
        cur = table.get(key, 0) + Fraction(coeff)
        if cur:
            table[key] = cur
        else:
            del table[key]
            if not table:
                del self.entries[name]

    @staticmethod
    def from_graded(ring: ArtinRing, gm: GradedMap) -> "ArtinMap":
        out = ArtinMap(ring, gm.source, gm.target)
        for n, vec in gm.entries.items():
            for t, c in vec.items():
                out.add(n, t, ring.one, c)
        return out

    @staticmethod
    def identity(ring: ArtinRing, space) -> "ArtinMap":
        return ArtinMap.from_graded(ring, GradedMap.identity(space))

    def value(self, name, mono) -> dict:
        """Image of (name (x) mono) as a dict (out, mono) -> coeff."""
        out = {}
        for (t, m), c in self.entries.get(name, {}).items():
            mm = self.ring.mul(mono, m)
            if mm is not None:
                key = (t, mm)
                cur = out.get(key, 0) + c
                if cur:
                    out[key] = cur
                else:
                    del out[key]
        return out

    def apply(self, x: ArtinElement) -> ArtinElement:
        res = ArtinElement(x.ring, self.target, allow_constant=True)
        for (n, mono), c in x.terms.items():
            for (t, m), cv in self.value(n, mono).items():
                res.add(t, m, c * cv)
        return res

    def compose(self, other: "ArtinMap") -> "ArtinMap":
        out = ArtinMap(self.ring, other.source, self.target)
        for n, table in other.entries.items():
            for (mid, mono), c in table.items():
                for (t, m), cv in self.value(mid, mono).items():
                    out.add(n, t, m, c * cv)
        return out

    def plus(self, other: "ArtinMap", coeff=1) -> "ArtinMap":
        out = ArtinMap(self.ring, self.source, self.target, dict(
            (n, dict(t)) for n, t in self.entries.items()))
        for n, table in other.entries.items():
            for (t, m), c in table.items():
                out.add(n, t, m, c * coeff)
        return out

    def scaled(self, coeff) -> "ArtinMap":
        out = ArtinMap(self.ring, self.source, self.target)
        for n, table in self.entries.items():
            for (t, m), c in table.items():
                out.add(n, t, m, c * coeff)
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def min_ideal_order(self) -> int:
        """Smallest total monomial degree present (ring order if zero)."""
        best = self.ring.order
        for table in self.entries.values():
            for (t, m), c in table.items():
                if c:
                    best = min(best, sum(m))
        return best

    def geometric_series(self) -> "ArtinMap":
        """sum_{k>=0} self^k (requires strictly positive monomial degrees)."""
        if self.min_ideal_order() < 1:
            raise MalformedInput("geometric series needs coefficients in m_B")
        total = ArtinMap.identity(self.ring, self.source)
        cur = ArtinMap.identity(self.ring, self.source)
        while True:
            cur = self.compose(cur)
            if cur.is_zero():
                return total
            total = total.plus(cur)

    def exp(self) -> "ArtinMap":
        """sum self^k / k! (requires strictly positive monomial degrees)."""
        if self.min_ideal_order() < 1:
            raise MalformedInput("exponential needs coefficients in m_B")
        total = ArtinMap.identity(self.ring, self.source)
        cur = ArtinMap.identity(self.ring, self.source)
        k = 0
        while True:
            cur = self.compose(cur)
            k += 1
            if cur.is_zero():
                return total
            total = total.plus(cur, Fraction(1, factorial(k)))

    def __eq__(self, other):
        if not isinstance(other, ArtinMap):
            return NotImplemented
        names = set(self.entries) | set(other.entries)
        for n in names:
            a = {k: v for k, v in self.entries.get(n, {}).items() if v}
            b = {k: v for k, v in other.entries.get(n, {}).items() if v}
            if a != b:
                return False
        return True

    def __repr__(self):
        return "ArtinMap(%d basis entries)" % len(self.entries)


def artin_apply(gm: GradedMap, x: ArtinElement) -> ArtinElement:
    out = ArtinElement(x.ring, gm.target, allow_constant=True)
    for (n, m), c in x.terms.items():
        for t, cv in gm.value(n).items():
            out.add(t, m, c * cv)
    return out


def artin_bilinear(binary, x: ArtinElement, y: ArtinElement, space) -> ArtinElement:
    """Extend a bilinear basis-level map over the (even) ring coefficients."""
    out = ArtinElement(x.ring, space, allow_constant=True)
    for (n1, m1), c1 in x.terms.items():
        for (n2, m2), c2 in y.terms.items():
            mono = x.ring.mul(m1, m2)
            if mono is None:
                continue
            for t, cv in binary(n1, n2).items():
                out.add(t, mono, c1 * c2 * cv)
    return out


def artin_bracket(L: DgLieAlgebra, x: ArtinElement, y: ArtinElement) -> ArtinElement:
    return artin_bilinear(lambda a, b: L.bracket.value((a, b)), x, y, L.space)


def eval_taylor(q, args) -> ArtinElement:
    """Multilinear evaluation of a Taylor coefficient on Artin elements."""
    ring = args[0].ring
    out = ArtinElement(ring, q.target, allow_constant=True)
    for combo in itertools.product(*[list(a.terms.items()) for a in args]):
        coeff = Fraction(1)
        names = []
        mono = ring.one
        for (n, m), c in combo:
            coeff *= c
            names.append(n)
            mono = ring.mul(mono, m)
            if mono is None:
                break
        if mono is None or not coeff:
            continue
        val = q.value(tuple(names))
        for t, cv in val.items():
            out.add(t, mono, coeff * cv)
    return out


# ---------------------------------------------------------------------------
# Maurer-Cartan residuals


def mc_check(s: OoStructure, x: ArtinElement) -> ArtinElement:
    """Residual sum_{n>=1} (1/n!) q_n(x^{(.)n}); zero iff x is Maurer-Cartan.

    The sum is finite by nilpotency; the structure must carry Taylor
    coefficients up to arity (ring order - 1) for the truncation to be exact.
    """
    if x.space != s.space:
        raise MalformedInput("element lives on the wrong space")
    if not x.is_homogeneous(0):
        raise MalformedInput("Maurer-Cartan elements are degree-0 in the shifted grading")
    out = ArtinElement(x.ring, s.space, allow_constant=True)
    for n in range(1, x.ring.order):
        q = s.taylor.get(n)
        if q is None:
            continue
        term = eval_taylor(q, [x] * n)
        out = out.plus(term.scaled(Fraction(1, factorial(n))))
    return out


def mc_pushforward(F: OoMorphism, x: ArtinElement) -> ArtinElement:
    """sum_{n>=1} (1/n!) f_n(x^{(.)n}) in the target space."""
    out = ArtinElement(x.ring, F.target.space, allow_constant=True)
    for n in range(1, x.ring.order):
        f = F.taylor.get(n)
        if f is None:
            continue
        out = out.plus(eval_taylor(f, [x] * n).scaled(Fraction(1, factorial(n))))
    return out


# ---------------------------------------------------------------------------
# gauge action


def gauge_act(L: DgLieAlgebra, a: ArtinElement, x: ArtinElement) -> ArtinElement:
    """e^a * x = x + sum_{n>=0} (ad_a^n/(n+1)!) ([a,x] - da)."""
    if not a.is_homogeneous(0) or (not x.is_zero() and not x.is_homogeneous(1)):
        raise MalformedInput("gauge needs deg(a) = 0 and deg(x) = 1")
    w = artin_bracket(L, a, x).plus(artin_apply(L.d, a).scaled(-1))
    out = x
    n = 0
    while not w.is_zero():
        out = out.plus(w.scaled(Fraction(1, factorial(n + 1))))
        w = artin_bracket(L, a, w)
        n += 1
        if n > x.ring.order + 2:
            break
    return out


def dgla_mc_residual(L: DgLieAlgebra, x: ArtinElement) -> ArtinElement:
    """dx + [x,x]/2 for a degree-1 element of L (x) m_B."""
    return artin_apply(L.d, x).plus(artin_bracket(L, x, x).scaled(Fraction(1, 2)))


# ---------------------------------------------------------------------------
# Maurer-Cartan sets of a morphism and the cocone correspondence


def mc_f_check(f: DglaMorphism, l: ArtinElement, m: ArtinElement) -> Report:
    """Membership of (l, e^m) in the two-equation Maurer-Cartan set of f:
    dl + [l,l]/2 = 0 and e^m * f(l) = 0."""
    r = Report("mc_f")
    res1 = dgla_mc_residual(f.source, l)
    r.add("dl+[l,l]/2=0", res1.is_zero(),
          lhs="0" if res1.is_zero() else ";".join(res1.lines()))
    fl = artin_apply(f.map, l)
    res2 = gauge_act(f.target, m, fl)
    r.add("e^m*f(l)=0", res2.is_zero(),
          lhs="0" if res2.is_zero() else ";".join(res2.lines()))
    return r


def cocone_element(cocone_space, x: ArtinElement, m: ArtinElement) -> ArtinElement:
    out = ArtinElement(x.ring, cocone_space)
    for (n, mono), c in x.terms.items():
        out.add(A_PRE + n, mono, c)
    for (n, mono), c in m.terms.items():
        out.add(B_PRE + n, mono, c)
    return out


def cocone_mc_correspondence(f: DglaMorphism, x: ArtinElement, m: ArtinElement,
                             max_weight=None) -> Report:
    """(x, m) Maurer-Cartan in the mapping cocone iff (x, e^m) is in the
    two-equation set; both residuals computed independently and compared."""
    mw = max_weight or max(x.ring.order - 1, 2)
    s = fm_cocone_lie(f, max_weight=mw)
    pair = cocone_element(s.space, x, m)
    res_cocone = mc_check(s, pair)
    direct = mc_f_check(f, x, m)
    r = Report("cocone_mc_correspondence")
    r.add("cocone residual zero", res_cocone.is_zero(),
          lhs="0" if res_cocone.is_zero() else ";".join(res_cocone.lines()))
    r.merge(direct, prefix="direct ")
    agree = res_cocone.is_zero() == direct.ok
    r.add("memberships agree", agree)
    return r


# ---------------------------------------------------------------------------
# order-by-order extension


def mc_extend(s: OoStructure, x: ArtinElement, order: int):
    """Given x Maurer-Cartan mod m^order, the order-th obstruction and, when
    it is killed by q_1, the deterministic minimal-pivot lift mod m^{order+1}.

    Returns (report, obstruction: ArtinElement, lift: ArtinElement | None).
    """
    r = Report("mc_extend")
    if any(sum(mono) >= order for (n, mono), c in x.terms.items() if c):
        raise MalformedInput("element has terms beyond m^%d" % order)
    res = mc_check(s, x)
    low_ok = all(sum(mono) >= order for (n, mono), c in res.terms.items() if c)
    r.add("MC mod m^%d" % order, low_ok)
    obstruction = res.component(order)
    if not low_ok:
        return r, obstruction, None
    if obstruction.is_zero():
        r.add("lift exists", True)
        return r, obstruction, x
    q1 = s.taylor.get(1)
    gm = GradedMap(s.space, s.space, 1)
    if q1 is not None:
        for (n,), vec in q1.entries.items():
            gm.set(n, vec)
    lift = x
    by_mono = {}
    for (n, mono), c in obstruction.terms.items():
        by_mono.setdefault(mono, {})[n] = c
    for mono in sorted(by_mono, key=lambda m: (sum(m), m)):
        rhs = {n: -c for n, c in by_mono[mono].items()}
        sol = map_solve(gm, rhs)
        if sol is None:
            r.add("lift exists", False, witness=s.taylor and None,
                  lhs=";".join(obstruction.lines()))
            return r, obstruction, None
        bump = ArtinElement(x.ring, s.space)
        for n, c in sol.items():
            bump.add(n, mono, c)
        lift = lift.plus(bump)
    r.add("lift exists", True)
    return r, obstruction, lift


__all__ = [
    "ArtinRing", "ArtinElement", "ArtinMap", "artin_apply", "artin_bracket",
    "artin_bilinear", "eval_taylor", "mc_check", "mc_pushforward", "gauge_act",
    "dgla_mc_residual", "mc_f_check", "cocone_element",
    "cocone_mc_correspondence", "mc_extend",
]
