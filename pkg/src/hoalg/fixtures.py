"""Seeded, deterministic fixture builders used by tests and the CLI.

Every builder takes an integer seed and returns data that provably satisfies
its axioms (validated at construction): random complexes, endomorphism DG
algebras, classical Lie algebras, mapping-cone contractions and (later in the
file) the synthetic Hodge fixtures.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .coalg import (
    DgAlgebra, DgLieAlgebra, DglaMorphism, DgaMorphism, MultilinearMap,
    end_dgla, end_preserving_sub_dgla,
)
from .graded import (
    Contraction, GradedMap, GradedSpace, RejectedInput, TENSOR, lin_acc,
    lin_single, map_kernel_basis,
)


def _rand_coeff(rng, zero_bias=0.35):
    if rng.random() < zero_bias:
        return Fraction(0)
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2]))


def random_complex(seed: int, dim: int = 3, degree_span=(-1, 2)):
    """Random complex (V, d): tower pattern keeps d^2 = 0 exactly.

    Basis elements are ordered; d of each element only hits *earlier* elements
    that are themselves closed, so d^2 = 0 by construction.
    """
    rng = random.Random("complex:%d" % seed)
    lo, hi = degree_span
    basis = [("v%d" % i, rng.randint(lo, hi)) for i in range(dim)]
    V = GradedSpace(basis)
    d = GradedMap(V, V, 1)
    closed = []
    for name in V.names:
        want = V.degree[name] + 1
        candidates = [c for c in closed if V.degree[c] == want]
        img = {}
        for c in candidates:
            co = _rand_coeff(rng)
            if co:
                img[c] = co
        if img and rng.random() < 0.7:
            d.set(name, img)
        else:
            closed.append(name)
    return V, d


def end_dga(space: GradedSpace, d: GradedMap) -> DgAlgebra:
    """End(V) as a DG associative algebra (composition product, [d,-])."""
    lie = end_dgla(space, d)
    prod = MultilinearMap(lie.space, lie.space, 0, 2, TENSOR)
    for n1 in lie.space.names:
        t1, s1 = n1.split("<-")
        for n2 in lie.space.names:
            t2, s2 = n2.split("<-")
            if s1 == t2:
                prod.set_entry((n1, n2), lin_single("%s<-%s" % (t1, s2)))
    return DgAlgebra(lie.space, lie.d, prod)


def random_end_dga(seed: int, dim: int = 2) -> DgAlgebra:
    V, d = random_complex(seed, dim)
    return end_dga(V, d)


def random_end_dgla(seed: int, dim: int = 2) -> DgLieAlgebra:
    V, d = random_complex(seed, dim)
    return end_dgla(V, d)


def sl2_dgla() -> DgLieAlgebra:
    """sl2 over Q in degree 0, zero differential: [h,e]=2e, [h,f]=-2f, [e,f]=h."""
    sp = GradedSpace([("e", 0), ("h", 0), ("f", 0)])
    d = GradedMap(sp, sp, 1)
    br = MultilinearMap(sp, sp, 0, 2, TENSOR)
    table = {("h", "e"): {"e": Fraction(2)}, ("e", "h"): {"e": Fraction(-2)},
             ("h", "f"): {"f": Fraction(-2)}, ("f", "h"): {"f": Fraction(2)},
             ("e", "f"): {"h": Fraction(1)}, ("f", "e"): {"h": Fraction(-1)}}
    for k, v in table.items():
        br.set_entry(k, v)
    return DgLieAlgebra(sp, d, br)


def heisenberg_dgla(degrees=(0, 0, 0)) -> DgLieAlgebra:
    """Heisenberg algebra [x,y] = z, z central; graded version when degrees allow."""
    dx, dy, dz = degrees
    if dx + dy != dz:
        raise ValueError("need deg x + deg y = deg z")
    sp = GradedSpace([("x", dx), ("y", dy), ("z", dz)])
    d = GradedMap(sp, sp, 1)
    br = MultilinearMap(sp, sp, 0, 2, TENSOR)
    br.set_entry(("x", "y"), lin_single("z"))
    sgn = -1 if (dx % 2 and dy % 2) else 1
    br.set_entry(("y", "x"), {"z": Fraction(-sgn)})
    return DgLieAlgebra(sp, d, br)


def random_filtered_inclusion(seed: int, dim: int = 2):
    """Inclusion End(V;F) -> End(V) for a random complex with a d-stable
    basis-aligned subspace F (always exists in the tower pattern)."""
    rng = random.Random("filtered:%d" % seed)
    V, d = random_complex(seed, dim)
    stable = []
    for n in V.names:
        if all(t in stable for t in d.value(n)) and rng.random() < 0.6:
            stable.append(n)
    if not stable:
        for n in V.names:
            if not d.value(n):
                stable.append(n)
                break
    sub, amb, inc = end_preserving_sub_dgla(V, d, stable)
    return sub, amb, inc


def abelian_dgla(space: GradedSpace, d: GradedMap) -> DgLieAlgebra:
    return DgLieAlgebra(space, d, MultilinearMap(space, space, 0, 2, TENSOR))


def zero_dgla() -> DgLieAlgebra:
    sp = GradedSpace([])
    return abelian_dgla(sp, GradedMap(sp, sp, 1))


def random_dgla_morphism(seed: int, dim: int = 2) -> DglaMorphism:
    """A rotating family of honest DGLA morphisms (inclusions, identities)."""
    rng = random.Random("dglamor:%d" % seed)
    kind = rng.randrange(3)
    if kind == 0:
        _, _, inc = random_filtered_inclusion(seed, dim)
        return inc
    if kind == 1:
        L = random_end_dgla(seed, dim)
        return DglaMorphism(L, L, GradedMap.identity(L.space))
    L = random_end_dgla(seed, dim)
    zero = zero_dgla()
    return DglaMorphism(zero, L, GradedMap(zero.space, L.space, 0))


def random_dga_morphism(seed: int, dim: int = 2) -> DgaMorphism:
    rng = random.Random("dgamor:%d" % seed)
    if rng.random() < 0.5:
        A = random_end_dga(seed, dim)
        return DgaMorphism(A, A, GradedMap.identity(A.space))
    V, d = random_complex(seed, dim)
    rng2 = random.Random("filtered:%d" % seed)
    stable = []
    for n in V.names:
        if all(t in stable for t in d.value(n)) and rng2.random() < 0.6:
            stable.append(n)
    if not stable:
        for n in V.names:
            if not d.value(n):
                stable.append(n)
                break
    big = end_dga(V, d)
    keep = [n for n in big.space.names
            if not (n.split("<-")[1] in stable and n.split("<-")[0] not in stable)]
    sub_space = big.space.subspace(keep)
    dS = GradedMap(sub_space, sub_space, 1)
    for n in keep:
        dS.set(n, big.d.value(n))
    prodS = MultilinearMap(sub_space, sub_space, 0, 2, TENSOR)
    for n1 in keep:
        for n2 in keep:
            val = big.product.value((n1, n2))
            if val:
                prodS.set_entry((n1, n2), val)
    sub = DgAlgebra(sub_space, dS, prodS)
    inc = GradedMap(sub_space, big.space, 0)
    for n in keep:
        inc.set(n, lin_single(n))
    return DgaMorphism(sub, big, inc)


# ---------------------------------------------------------------------------
# harmonic contractions of complexes (deterministic Gaussian splitting)


class _DegreeSplit:
    """Echelon decomposition V_deg = B + H + C (B = im d, H harmonic reps)."""

    def __init__(self, names, b_rows, h_rows):
        self.names = names          # ambient basis names of this degree
        self.b_rows = b_rows        # list of (coords, preimage_combination, pivot)
        self.h_rows = h_rows        # list of (coords, pivot)

    def coords(self, vec: dict):
        return [Fraction(vec.get(n, 0)) for n in self.names]

    def decompose(self, vec: dict):
        """Return (b_coeffs, h_coeffs, c_remainder_coords)."""
        v = self.coords(vec)
        bc, hc = [], []
        for row, _, piv in self.b_rows:
            f = v[piv]
            bc.append(f)
            if f:
                v = [x - f * y for x, y in zip(v, row)]
        for row, piv in self.h_rows:
            f = v[piv]
            hc.append(f)
            if f:
                v = [x - f * y for x, y in zip(v, row)]
        return bc, hc, v


def _degree_split(space, d, deg, ker_vecs):
    names = [n for n in space.names if space.degree[n] == deg]
    b_rows = []
    for pre_name in [n for n in space.names if space.degree[n] == deg - 1]:
        img = d.value(pre_name)
        if not img:
            continue
        vec = [Fraction(img.get(n, 0)) for n in names]
        prevec = lin_single(pre_name)
        for row, rpre, piv in b_rows:
            if vec[piv]:
                f = vec[piv]
                vec = [x - f * y for x, y in zip(vec, row)]
                prevec = dict(prevec)
                lin_acc(prevec, rpre, -f)
        piv = next((i for i, x in enumerate(vec) if x), None)
        if piv is None:
            continue
        lead = vec[piv]
        vec = [x / lead for x in vec]
        prevec = {k: v / lead for k, v in prevec.items()}
        b_rows.append((vec, prevec, piv))
    h_rows = []
    for kv in ker_vecs:
        if space.vector_degree(kv) != deg:
            continue
        vec = [Fraction(kv.get(n, 0)) for n in names]
        for row, _, piv in b_rows:
            if vec[piv]:
                f = vec[piv]
                vec = [x - f * y for x, y in zip(vec, row)]
        for row, piv in h_rows:
            if vec[piv]:
                f = vec[piv]
                vec = [x - f * y for x, y in zip(vec, row)]
        piv = next((i for i, x in enumerate(vec) if x), None)
        if piv is None:
            continue
        vec = [x / vec[piv] for x in vec]
        h_rows.append((vec, piv))
    return _DegreeSplit(names, b_rows, h_rows)


def harmonic_contraction(space: GradedSpace, d: GradedMap) -> Contraction:
    """Split (V,d) = H + acyclic part; contraction onto H with zero differential.

    Per degree V = B + H + C with B = im d and d: C -> B iso; the homotopy is
    K(v) = -(d|_C)^{-1}(B-component of v).  Echelon pivots in declared basis
    order keep everything reproducible.
    """
    ker_vecs = map_kernel_basis(d)
    splits = {deg: _degree_split(space, d, deg, ker_vecs)
              for deg in space.degrees_present()}

    small_basis = []
    inj_vectors = []
    for deg in space.degrees_present():
        sp = splits[deg]
        for i, (vec, _) in enumerate(sp.h_rows):
            small_basis.append(("h%d_%d" % (deg, i), deg))
            inj_vectors.append({sp.names[j]: c for j, c in enumerate(vec) if c})
    small = GradedSpace(small_basis)
    d_small = GradedMap(small, small, 1)
    inject = GradedMap(small, space, 0)
    for (name, _), vec in zip(small_basis, inj_vectors):
        inject.set(name, vec)

    project = GradedMap(space, small, 0)
    K = GradedMap(space, space, -1)
    for deg in space.degrees_present():
        sp = splits[deg]
        below = splits.get(deg - 1)
        small_names = [n for n, dg in small_basis if dg == deg]
        for n in sp.names:
            bc, hc, _ = sp.decompose(lin_single(n))
            img = {sn: c for sn, c in zip(small_names, hc) if c}
            if img:
                project.set(n, img)
            if below is not None and any(bc):
                # -(preimage of B-part), then keep only its C-component below
                pre: dict = {}
                for f, (_, rpre, _) in zip(bc, sp.b_rows):
                    if f:
                        lin_acc(pre, rpre, -f)
                _, _, c_coords = below.decompose(pre)
                img_k = {below.names[i]: c for i, c in enumerate(c_coords) if c}
                if img_k:
                    K.set(n, img_k)
    return Contraction(small, d_small, space, d, inject, project, K)


def lambda_cartan_fixture(seed: int, holo: int = 2, anti: int = 1, p: int = None):
    """Generic non-abelian Cartan data on an exterior model.

    V = Lambda(phi_1..phi_holo; psi_1..psi_anti) with seeded tower
    differentials; L is spanned by the derivations phi_j -> psi-monomial,
    with differential read off from -[delbar, i] and bracket from [i, l]
    (the higher derived brackets vanish because [i, i] = 0).  Returns
    (CartanHomotopy, FormalPeriodData with W = A^{>=p}, ExteriorModel).
    """
    from .hodge import CartanHomotopy, ExteriorModel, FormalPeriodData, check_cartan
    rng = random.Random("lambda:%d" % seed)
    p = holo if p is None else p
    gens = [("ph%d" % i, (1, 0)) for i in range(1, holo + 1)] + \
           [("ps%d" % i, (0, 1)) for i in range(1, anti + 1)]
    model = ExteriorModel(gens)
    V = model.space
    gen_names = [g for g, _ in gens]

    def bidegree_pairs(p_, q_, closed):
        """Wedge monomials of the given bidegree in closed generators."""
        out = []
        for a in closed:
            for b in closed:
                if model.gen_index[a] >= model.gen_index[b]:
                    continue
                bp = model.gens[model.gen_index[a]][1][0] + \
                    model.gens[model.gen_index[b]][1][0]
                bq = 2 - bp
                if (bp, bq) == (p_, q_):
                    combo = (model.gen_index[a], model.gen_index[b])
                    out.append(model._subset_name[tuple(sorted(combo))])
        return out

    closed = []
    del_img, delbar_img = {}, {}
    # antiholomorphic generators first, so that (1,1)- and (0,2)-monomials in
    # closed generators exist when the tower reaches the holomorphic ones
    tower_order = [g for g in gen_names if g.startswith("ps")] + \
                  [g for g in gen_names if g.startswith("ph")]
    for g in tower_order:
        is_holo = g.startswith("ph")
        dv, bv = {}, {}
        for nm in bidegree_pairs(2 if is_holo else 1, 0 if is_holo else 1, closed):
            c = _rand_coeff(rng)
            if c:
                lin_acc(dv, lin_single(nm), c)
        for nm in bidegree_pairs(1 if is_holo else 0, 1 if is_holo else 2, closed):
            c = _rand_coeff(rng)
            if c:
                lin_acc(bv, lin_single(nm), c)
        if (dv or bv) and rng.random() < 0.75:
            del_img[g] = dv
            delbar_img[g] = bv
        else:
            closed.append(g)
    dell = model.derivation(del_img, 1)
    delbar = model.derivation(delbar_img, 1)
    d = dell.add(delbar)

    psi_monomials = [model._subset_name[c] for c in model._subset_name
                     if all(model.gens[i][1] == (0, 1) for i in c)]
    lbasis = []
    for j in range(1, holo + 1):
        for nm in psi_monomials:
            lname = "v%d|%s" % (j, nm)
            q = sum(1 for ch in nm.split("^") if ch != "one")
            lbasis.append((lname, q))
    from .graded import GradedSpace as _GS
    Lsp = _GS(lbasis)
    imaps = {}
    for lname, _ in lbasis:
        j, nm = lname.split("|")
        imaps[lname] = model.derivation({"ph" + j[1:]: lin_single(nm)},
                                        Lsp.degree[lname] - 1)

    def decompose(D):
        """Express a derivation killing the psi-generators in the L basis."""
        vec = {}
        for j in range(1, holo + 1):
            img = D.value("ph%d" % j)
            for nm, c in img.items():
                lname = "v%d|%s" % (j, nm)
                if lname not in Lsp.degree:
                    raise RejectedInput("derivation leaves the contraction span")
                lin_acc(vec, lin_single(lname), c)
        for i in range(1, anti + 1):
            if D.value("ps%d" % i):
                raise RejectedInput("derivation does not kill the psi part")
        return vec

    dL = GradedMap(Lsp, Lsp, 1)
    for lname, _ in lbasis:
        comm = delbar.commutator(imaps[lname]).scale(-1)
        vec = decompose(comm)
        if vec:
            dL.set(lname, vec)
    lmaps = {lname: dell.commutator(imaps[lname]) for lname, _ in lbasis}
    from .graded import MultilinearMap as _MM, TENSOR as _T
    br = _MM(Lsp, Lsp, 0, 2, _T)
    for n1, _ in lbasis:
        for n2, _ in lbasis:
            vec = decompose(imaps[n1].commutator(lmaps[n2]))
            if vec:
                br.set_entry((n1, n2), vec)
    from .coalg import DgLieAlgebra as _DG
    L = _DG(Lsp, dL, br)
    rep = L.check()
    if not rep.ok:
        raise RejectedInput("lambda fixture failed DGLA axioms: %s" % rep.first_failure())
    cartan = CartanHomotopy(L, V, d, imaps)
    rep = check_cartan(cartan)
    if not rep.ok:
        raise RejectedInput("lambda fixture failed Cartan identities: %s"
                            % rep.first_failure())
    w_names = [x for x in V.names if V.bidegree[x][0] >= p]
    return cartan, FormalPeriodData(cartan, w_names), model


def random_artin_element(seed: int, ring, space, degree: int, density=0.5):
    """Random homogeneous element of the given degree in V (x) m_B."""
    from .mc import ArtinElement
    rng = random.Random("artin:%d" % seed)
    out = ArtinElement(ring, space)
    for name in space.names:
        if space.degree[name] != degree:
            continue
        for mono in ring.monomials(min_total=1):
            if rng.random() < density:
                c = _rand_coeff(rng, zero_bias=0.0)
                out.add(name, mono, c)
    return out


__all__ = [
    "random_complex", "end_dga", "random_end_dga", "random_end_dgla",
    "sl2_dgla", "heisenberg_dgla", "random_filtered_inclusion", "abelian_dgla",
    "zero_dgla", "random_dgla_morphism", "random_dga_morphism",
    "harmonic_contraction", "random_artin_element", "lambda_cartan_fixture",
]
