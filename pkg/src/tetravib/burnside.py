"""Burnside ring of the spatio-temporal symmetry group S4 x O(2).

Closed subgroups of S4 x O(2) up to conjugacy are Goursat amalgams
H ^Z x_L K: a subgroup H of S4, a normal subgroup Z of H, and an epimorphism
phi of H onto L = K/ker(psi) for a closed subgroup K of O(2).  Classes whose
Weyl group is finite generate the ring A(G) used by the bifurcation
invariants; multiplication follows the standard recursion over the
subconjugacy partial order.

All O(2) data is kept exact.  Every subgroup handled here either contains a
reflection (dihedral projection to O(2)) or is handled analytically
(cyclic projection, SO(2), O(2)); for the dihedral ones all rotation angles
and reflection-axis parameters live on a rational grid (multiples of 1/N
turns), and conjugations that matter shift axis parameters by multiples of
1/N as well, so conjugacy, normalizers and containment counts over the full
group reduce to finite exact computations on the grid.

Element encoding inside a grid universe: code = perm_index * 2N + kind * N + k
with kind 0 a rotation by k/N turns and kind 1 the reflection with axis
parameter k/N (the conjugate of the base reflection by a rotation of k/2N
turns).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .grouprep import (S4, IDENTITY, pmul, pinv, cycle_type,
                       conjugacy_class_index, CHARACTER_TABLE)

__all__ = [
    "InternalError", "S4SubgroupClass", "enumerate_s4_subgroups",
    "s4_subgroup_label", "AmalgamClass", "Universe", "BurnsideElement",
    "universe_for_modes", "basic_degree", "pi0",
]


class InternalError(RuntimeError):
    """A consistency check inside the ring arithmetic failed."""


# ---------------------------------------------------------------------------
# the permutation factor

P_INDEX = {p: i for i, p in enumerate(S4)}
MUL = [[P_INDEX[pmul(p, q)] for q in S4] for p in S4]
INV = [P_INDEX[pinv(p)] for p in S4]
# CONJ[g][p] = g p g^{-1}
CONJ = [[MUL[g][MUL[p][INV[g]]] for p in range(24)] for g in range(24)]
PERM_CLASS = [conjugacy_class_index(p) for p in S4]
ID_PERM = P_INDEX[IDENTITY]


def _perm_closure(seed):
    """Subgroup of S4 generated by the given permutation indices."""
    elems = {ID_PERM}
    frontier = set(seed)
    while frontier:
        new = set()
        for a in frontier | elems:
            for b in seed:
                c = MUL[a][b]
                if c not in elems and c not in frontier:
                    new.add(c)
        elems |= frontier
        frontier = new
    return frozenset(elems)


@lru_cache(maxsize=1)
def _all_s4_subgroups():
    subs = {frozenset([ID_PERM])}
    for p in range(24):
        subs.add(_perm_closure([p]))
    while True:
        new = set()
        for a in subs:
            for b in subs:
                u = a | b
                if u not in subs:
                    c = _perm_closure(list(u))
                    if c not in subs:
                        new.add(c)
        if not new:
            return frozenset(subs)
        subs |= new


def s4_subgroup_label(h) -> str:
    """Conjugacy-class label of a subgroup of S4 (Z1..S4 naming)."""
    n = len(h)
    if n == 1:
        return "Z1"
    if n == 2:
        has_transposition = any(cycle_type(S4[p]) == (2, 1, 1) for p in h)
        return "D1" if has_transposition else "Z2"
    if n == 3:
        return "Z3"
    if n == 4:
        if any(cycle_type(S4[p]) == (4,) for p in h):
            return "Z4"
        if all(cycle_type(S4[p]) in ((1, 1, 1, 1), (2, 2)) for p in h):
            return "V4"
        return "D2"
    if n == 6:
        return "D3"
    if n == 8:
        return "D4"
    if n == 12:
        return "A4"
    if n == 24:
        return "S4"
    raise InternalError("impossible subgroup order %d" % n)


@dataclass(frozen=True)
class S4SubgroupClass:
    label: str
    members: tuple          # all conjugate subgroups, as frozensets of indices

    @property
    def representative(self):
        return self.members[0]


@lru_cache(maxsize=1)
def enumerate_s4_subgroups():
    """All subgroups of S4 grouped into conjugacy classes, labeled."""
    subs = sorted(_all_s4_subgroups(), key=lambda s: (len(s), sorted(s)))
    seen = set()
    classes = []
    for h in subs:
        if h in seen:
            continue
        orbit = {frozenset(CONJ[g][p] for p in h) for g in range(24)}
        seen |= orbit
        members = tuple(sorted(orbit, key=sorted))
        classes.append(S4SubgroupClass(label=s4_subgroup_label(h),
                                       members=members))
    return tuple(classes)


def _s4_class_rep(label):
    for c in enumerate_s4_subgroups():
        if c.label == label:
            return c.representative
    raise KeyError(label)


def _normal_subgroups_of(h):
    """Normal subgroups of the subgroup h (as frozensets of indices)."""
    out = []
    for z in _all_s4_subgroups():
        if z <= h and all(frozenset(CONJ[g][p] for p in z) == z for g in h):
            out.append(z)
    return out


def _s4_normalizer(h):
    return frozenset(g for g in range(24)
                     if frozenset(CONJ[g][p] for p in h) == h)


def _s4_conjugates(h):
    return {frozenset(CONJ[g][p] for p in h) for g in range(24)}


# ---------------------------------------------------------------------------
# small-group helpers for the Goursat construction


class _CosetGroup:
    """Finite quotient group given by coset partition and a product rule."""

    def __init__(self, cosets, product):
        # cosets: tuple of frozensets; product(a, b) -> element
        self.cosets = tuple(cosets)
        self._where = {e: i for i, c in enumerate(cosets) for e in c}
        self._product = product
        n = len(cosets)
        self.table = [[0] * n for _ in range(n)]
        for i, ci in enumerate(cosets):
            a = next(iter(ci))
            for j, cj in enumerate(cosets):
                b = next(iter(cj))
                self.table[i][j] = self._where[product(a, b)]
        self.identity = self._where_identity()

    def _where_identity(self):
        n = len(self.cosets)
        for i in range(n):
            if all(self.table[i][j] == j for j in range(n)):
                return i
        raise InternalError("coset group has no identity")

    def coset_of(self, e):
        return self._where[e]

    def __len__(self):
        return len(self.cosets)

    def element_order(self, i):
        n, x = 1, i
        while x != self.identity:
            x = self.table[x][i]
            n += 1
        return n

    def generating_words(self):
        """A small generating tuple and words expressing every element.

        Returns (gens, words) with words[x] a tuple of generator indices
        whose product is x (empty word = identity).
        """
        n = len(self.cosets)
        order = sorted(range(n), key=self.element_order, reverse=True)
        for r in (1, 2):
            for gens in itertools.combinations(order, r):
                words = {self.identity: ()}
                frontier = [self.identity]
                while frontier:
                    nxt = []
                    for x in frontier:
                        for gi, g in enumerate(gens):
                            y = self.table[x][g]
                            if y not in words:
                                words[y] = words[x] + (gi,)
                                nxt.append(y)
                    frontier = nxt
                if len(words) == n:
                    return gens, words
        raise InternalError("quotient group is not 2-generated")


def _isomorphisms(q1: _CosetGroup, q2: _CosetGroup):
    """All isomorphisms q1 -> q2 as index maps."""
    if len(q1) != len(q2):
        return []
    gens, words = q1.generating_words()
    orders = [q1.element_order(g) for g in gens]
    n = len(q1)
    candidates = [[y for y in range(n) if q2.element_order(y) == o]
                  for o in orders]
    isos = []
    for images in itertools.product(*candidates):
        phi = [None] * n
        ok = True
        for x in range(n):
            y = q2.identity
            for gi in words[x]:
                y = q2.table[y][images[gi]]
            phi[x] = y
        if len(set(phi)) != n:
            continue
        for a in range(n):
            for b in range(n):
                if phi[q1.table[a][b]] != q2.table[phi[a]][phi[b]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            isos.append(tuple(phi))
    return isos


# ---------------------------------------------------------------------------
# amalgam classes


@dataclass
class AmalgamClass:
    """Conjugacy class of a closed subgroup of S4 x O(2).

    kind is one of 'dihedral' (finite, reflection-containing projection to
    O(2)), 'cyclic' (finite, rotations only), 'so2', 'o2', 'o2z2' (the three
    continuous-K shapes H x SO(2), H x O(2), H ^Z x_{Z2} O(2)).
    """

    universe: "Universe" = field(repr=False)
    index: int
    kind: str
    codes: frozenset = field(repr=False)          # None for continuous kinds
    H_set: frozenset = field(repr=False)
    Z_set: frozenset = field(repr=False)
    R_set: frozenset = field(repr=False)
    H_label: str
    Z_label: str
    R_label: str
    L_label: str
    K_kind: str                                    # 'D', 'Z', 'SO2', 'O2'
    K_order: int                                   # d or n; 0 for SO2/O2
    order: int                                     # |H|; 0 means infinite
    gens: tuple = field(repr=False, default=())

    def __hash__(self):
        return hash((id(self.universe), self.index))

    def __eq__(self, other):
        return (isinstance(other, AmalgamClass)
                and self.universe is other.universe
                and self.index == other.index)

    # -- naming ------------------------------------------------------------

    def _k_name(self):
        if self.K_kind == "D":
            return "D%d" % self.K_order
        if self.K_kind == "Z":
            return "Z%d" % self.K_order
        return self.K_kind

    def canonical_form(self) -> str:
        """Fully explicit name (H^Z_R x_L K); see README for the grammar."""
        return "(%s^%s_%s x_%s %s)" % (
            self.H_label, self.Z_label, self.R_label, self.L_label,
            self._k_name())

    def printed_form(self) -> str:
        """Abbreviated name: direct products print as (H x K); Z is shown
        whenever the epimorphism is nontrivial, and R only when needed to
        separate classes sharing the same (H, Z, L, K)."""
        if self.L_label == "Z1":
            return "(%s x %s)" % (self.H_label, self._k_name())
        if self.universe._needs_r(self):
            return "(%s^%s_%s x_%s %s)" % (
                self.H_label, self.Z_label, self.R_label, self.L_label,
                self._k_name())
        return "(%s^%s x_%s %s)" % (
            self.H_label, self.Z_label, self.L_label, self._k_name())

    def __str__(self):
        return self.printed_form()

    def sort_key(self):
        k_rank = {"O2": 10 ** 9, "SO2": 10 ** 9 - 1}.get(
            self.K_kind, self.K_order)
        return (-len(self.H_set), -k_rank, self.canonical_form())

    # -- structure ---------------------------------------------------------

    @property
    def is_finite(self):
        return self.kind in ("dihedral", "cyclic")

    @property
    def in_phi0(self):
        return self.universe.weyl(self)[0]

    def elements(self):
        """Concrete members as (permutation tuple, 'rot'|'refl', Fraction).

        The Fraction is the rotation angle or the reflection-axis parameter
        in turns.  Only available for finite classes."""
        if not self.is_finite:
            raise ValueError("continuous class has no finite element list")
        n = self.universe.N
        out = []
        for e in sorted(self.codes):
            p, kind, k = self.universe.split(e)
            out.append((S4[p], "refl" if kind else "rot", Fraction(k, n)))
        return out

    def contains_time_reflection(self):
        """True if some element is (identity permutation, reflection)."""
        if not self.is_finite:
            raise ValueError("continuous class")
        return any(p == IDENTITY and kind == "refl"
                   for p, kind, _ in self.elements())


# ---------------------------------------------------------------------------
# the grid universe


def _divisor_closure(orders):
    out = set()
    for n in orders:
        for d in range(1, n + 1):
            if n % d == 0:
                out.add(d)
    return tuple(sorted(out))


class Universe:
    """All conjugacy classes of closed subgroups of S4 x O(2) whose O(2)
    projection is dihedral of an order in `orders` (plus cyclic projections
    of those orders and the continuous-projection shapes)."""

    _cache = {}

    def __init__(self, orders):
        self.orders = _divisor_closure(orders)
        self.N = math.lcm(*self.orders)
        self.classes = []
        self._lookup = {}          # bucket key -> list of class indices
        self._nbar = {}            # class index -> normalizer triples
        self._conjugates = {}      # class index -> list of frozensets
        self._ncount_memo = {}
        self._product_memo = {}
        self._name_index = {}
        self._enumerate()
        self._classes_sorted = sorted(self.classes,
                                      key=AmalgamClass.sort_key)
        self._finalize_names()

    @classmethod
    def for_orders(cls, orders):
        key = _divisor_closure(orders)
        if key not in cls._cache:
            cls._cache[key] = cls(key)
        return cls._cache[key]

    # -- element arithmetic --------------------------------------------------

    def split(self, e):
        n = self.N
        p, rem = divmod(e, 2 * n)
        kind, k = divmod(rem, n)
        return p, kind, k

    def join(self, p, kind, k):
        n = self.N
        return p * 2 * n + kind * n + (k % n)

    def mul(self, e1, e2):
        n = self.N
        p1, f1, k1 = self.split(e1)
        p2, f2, k2 = self.split(e2)
        p = MUL[p1][p2]
        if f1 == 0 and f2 == 0:
            return self.join(p, 0, k1 + k2)
        if f1 == 0:
            return self.join(p, 1, k2 + k1)
        if f2 == 0:
            return self.join(p, 1, k1 - k2)
        return self.join(p, 0, k1 - k2)

    def inv(self, e):
        p, f, k = self.split(e)
        if f:
            return self.join(INV[p], 1, k)
        return self.join(INV[p], 0, -k)

    def closure(self, seed):
        elems = {self.join(ID_PERM, 0, 0)}
        frontier = set(seed)
        while frontier:
            new = set()
            for a in frontier | elems:
                for b in seed:
                    c = self.mul(a, b)
                    if c not in elems and c not in frontier:
                        new.add(c)
            elems |= frontier
            frontier = new
        return frozenset(elems)

    def _generators(self, codes):
        gens = []
        have = {self.join(ID_PERM, 0, 0)}
        for e in sorted(codes):
            if e not in have:
                gens.append(e)
                have = self.closure(gens)
                if len(have) == len(codes):
                    break
        return tuple(gens)

    # -- conjugation by (gamma, rotation a) or (gamma, reflection b) ---------
    # A conjugator triple (g, f, j) acts with 2a = j/N (f=0) or 2b = j/N
    # (f=1); each triple corresponds to exactly two group elements.

    def conj_apply(self, trip, e):
        g, f, j = trip
        p, kind, k = self.split(e)
        q = CONJ[g][p]
        if f == 0:
            return self.join(q, kind, k + j if kind else k)
        return self.join(q, kind, j - k if kind else -k)

    def conj_compose(self, c1, c2):
        g1, f1, j1 = c1
        g2, f2, j2 = c2
        return (MUL[g1][g2], f1 ^ f2, (j1 + (j2 if f1 == 0 else -j2)) % self.N)

    def conj_inverse(self, c):
        g, f, j = c
        return (INV[g], f, (-j) % self.N if f == 0 else j)

    def _conj_candidates(self, codes1, codes2):
        """Conjugator triples possibly mapping codes1 onto codes2."""
        refl1 = [(p, k) for p, kind, k in map(self.split, codes1) if kind]
        out = []
        if refl1:
            p0, k0 = refl1[0]
            refl2 = {}
            for e in codes2:
                p, kind, k = self.split(e)
                if kind:
                    refl2.setdefault(p, []).append(k)
            for g in range(24):
                q0 = CONJ[g][p0]
                for k2 in refl2.get(q0, ()):
                    out.append((g, 0, (k2 - k0) % self.N))
                    out.append((g, 1, (k2 + k0) % self.N))
        else:
            for g in range(24):
                out.append((g, 0, 0))
                out.append((g, 1, 0))
        return out

    def _maps_into(self, trip, gens, target):
        return all(self.conj_apply(trip, e) in target for e in gens)

    def _bucket_key(self, codes):
        prof = sorted((PERM_CLASS[p], kind, min(k, (self.N - k) % self.N)
                       if kind == 0 else -1)
                      for p, kind, k in map(self.split, codes))
        return (len(codes), tuple(prof))

    def classify(self, codes, register=False, **info):
        """Find the class of a concrete subgroup; optionally register new."""
        key = self._bucket_key(codes)
        gens = self._generators(codes)
        for idx in self._lookup.get(key, ()):
            kl = self.classes[idx]
            for trip in self._conj_candidates(codes, kl.codes):
                if self._maps_into(trip, gens, kl.codes):
                    return kl
        if not register:
            raise InternalError("subgroup does not match any class")
        kl = self._register(codes, gens, key, **info)
        return kl

    def _register(self, codes, gens, key, kind):
        h_set = frozenset(self.split(e)[0] for e in codes)
        z_set = frozenset(p for p, kk, k in map(self.split, codes)
                          if kk == 0 and k == 0)
        r_set = frozenset(p for p, kk, _ in map(self.split, codes) if kk == 0)
        rot_ks = sorted({k for p, kk, k in map(self.split, codes) if kk == 0})
        refl = [k for p, kk, k in map(self.split, codes) if kk == 1]
        d = len(rot_ks)
        if refl:
            k_kind = "D"
            ker_psi_refl = [k for p, kk, k in map(self.split, codes)
                            if kk == 1 and p == ID_PERM]
            ker_psi_rot = [k for p, kk, k in map(self.split, codes)
                           if kk == 0 and p == ID_PERM]
            if ker_psi_refl:
                if len(ker_psi_rot) == d:
                    l_label = "Z1"
                else:
                    l_label = "Z2"
            else:
                c = len(ker_psi_rot)
                if d % c:
                    raise InternalError("kernel size does not divide")
                l_label = "D%d" % (d // c)
        else:
            k_kind = "Z"
            ker_psi_rot = [k for p, kk, k in map(self.split, codes)
                           if kk == 0 and p == ID_PERM]
            c = len(ker_psi_rot)
            l_label = "Z%d" % (d // c)
        kl = AmalgamClass(
            universe=self, index=len(self.classes), kind=kind, codes=codes,
            H_set=h_set, Z_set=z_set, R_set=r_set,
            H_label=s4_subgroup_label(h_set),
            Z_label=s4_subgroup_label(z_set),
            R_label=s4_subgroup_label(r_set),
            L_label=l_label, K_kind=k_kind, K_order=d,
            order=len(codes), gens=gens)
        self.classes.append(kl)
        self._lookup.setdefault(key, []).append(kl.index)
        return kl

    def _register_continuous(self, kind, h_set, z_set):
        for kl in self.classes:
            if kl.kind == kind and kl.H_set in _s4_conjugates(h_set):
                if kind != "o2z2":
                    return kl
                # the pair (H, Z) must match up to simultaneous conjugation
                for g in range(24):
                    if (frozenset(CONJ[g][p] for p in h_set) == kl.H_set and
                            frozenset(CONJ[g][p] for p in z_set) == kl.Z_set):
                        return kl
        if kind == "o2":
            l_label, k_kind = "Z1", "O2"
            z_set = h_set
        elif kind == "so2":
            l_label, k_kind = "Z1", "SO2"
            z_set = h_set
        else:
            l_label, k_kind = "Z2", "O2"
        kl = AmalgamClass(
            universe=self, index=len(self.classes), kind=kind, codes=None,
            H_set=h_set, Z_set=z_set, R_set=h_set,
            H_label=s4_subgroup_label(h_set),
            Z_label=s4_subgroup_label(z_set),
            R_label=s4_subgroup_label(h_set),
            L_label=l_label, K_kind=k_kind, K_order=0, order=0, gens=())
        self.classes.append(kl)
        return kl

    # -- enumeration ---------------------------------------------------------

    def _k_group(self, d):
        """Codes of the base dihedral subgroup D_d (axis parameter 0)."""
        step = self.N // d
        rot = [self.join(ID_PERM, 0, i * step) for i in range(d)]
        refl = [self.join(ID_PERM, 1, i * step) for i in range(d)]
        return rot, refl

    def _kernels_dihedral(self, d):
        """Normal subgroups of D_d with cyclic or dihedral quotient."""
        step = self.N // d
        rot, refl = self._k_group(d)
        kers = []
        for c in [c for c in range(1, d + 1) if d % c == 0]:
            ker = frozenset(self.join(ID_PERM, 0, i * (self.N // c))
                            for i in range(c))
            kers.append(("rot%d" % c, ker))
        if d % 2 == 0:
            ker = frozenset(
                [self.join(ID_PERM, 0, i * 2 * step) for i in range(d // 2)]
                + [self.join(ID_PERM, 1, i * 2 * step) for i in range(d // 2)])
            kers.append(("dih", ker))
        kers.append(("full", frozenset(rot + refl)))
        return kers

    def _quotient(self, k_codes, kernel):
        k_codes = sorted(k_codes)
        cosets = []
        seen = set()
        for e in k_codes:
            if e in seen:
                continue
            coset = frozenset(self.mul(e, z) for z in kernel)
            seen |= coset
            cosets.append(coset)
        return _CosetGroup(cosets, self.mul)

    def _h_quotient(self, h, z):
        members = sorted(h)
        cosets = []
        seen = set()
        for p in members:
            if p in seen:
                continue
            coset = frozenset(MUL[p][q] for q in z)
            seen |= coset
            cosets.append(coset)
        return _CosetGroup(cosets, lambda a, b: MUL[a][b])

    def _enumerate(self):
        s4_classes = enumerate_s4_subgroups()
        for s4c in s4_classes:
            h = s4c.representative
            normals = _normal_subgroups_of(h)
            # dihedral K
            for d in self.orders:
                rot, refl = self._k_group(d)
                k_codes = rot + refl
                for name, ker in self._kernels_dihedral(d):
                    qk = self._quotient(k_codes, ker)
                    for z in normals:
                        if len(h) != len(z) * len(qk):
                            continue
                        qh = self._h_quotient(h, z)
                        for iso in _isomorphisms(qh, qk):
                            codes = frozenset(
                                self.join(p, *self.split(e)[1:])
                                for p in h for e in k_codes
                                if iso[qh.coset_of(p)] == qk.coset_of(e))
                            self.classify(codes, register=True,
                                          kind="dihedral")
            # cyclic K
            for n in self.orders:
                rot = [self.join(ID_PERM, 0, i * (self.N // n))
                       for i in range(n)]
                for c in [c for c in range(1, n + 1) if n % c == 0]:
                    ker = frozenset(self.join(ID_PERM, 0, i * (self.N // c))
                                    for i in range(c))
                    qk = self._quotient(rot, ker)
                    for z in normals:
                        if len(h) != len(z) * len(qk):
                            continue
                        qh = self._h_quotient(h, z)
                        for iso in _isomorphisms(qh, qk):
                            codes = frozenset(
                                self.join(p, 0, self.split(e)[2])
                                for p in h for e in rot
                                if iso[qh.coset_of(p)] == qk.coset_of(e))
                            self.classify(codes, register=True, kind="cyclic")
            # continuous K
            self._register_continuous("o2", h, h)
            self._register_continuous("so2", h, h)
            for z in normals:
                if len(h) == 2 * len(z):
                    self._register_continuous("o2z2", h, z)

    def _finalize_names(self):
        sig = {}
        for kl in self.classes:
            key = (kl.H_label, kl.Z_label, kl.L_label, kl.K_kind, kl.K_order,
                   kl.kind)
            sig.setdefault(key, []).append(kl.index)
        self._ambiguous = {
            idx for members in sig.values() if len(members) > 1
            for idx in members}
        for kl in self.classes:
            self._name_index[kl.canonical_form()] = kl
            self._name_index.setdefault(kl.printed_form(), kl)

    def _needs_r(self, kl):
        return kl.index in getattr(self, "_ambiguous", frozenset())

    # -- lookups ---------------------------------------------------------

    @property
    def unit(self):
        return self.find_class("S4", kind="o2")

    def all_classes(self):
        return tuple(self._classes_sorted)

    def phi0_classes(self):
        return tuple(kl for kl in self._classes_sorted if kl.in_phi0)

    def find_class(self, h_label, z_label=None, r_label=None, l_label=None,
                   k_order=None, kind="dihedral"):
        """The unique class matching the given name fragments."""
        hits = []
        for kl in self.classes:
            if kl.kind != kind or kl.H_label != h_label:
                continue
            if z_label is not None and kl.Z_label != z_label:
                continue
            if r_label is not None and kl.R_label != r_label:
                continue
            if l_label is not None and kl.L_label != l_label:
                continue
            if k_order is not None and kl.K_order != k_order:
                continue
            hits.append(kl)
        if len(hits) != 1:
            raise KeyError("class lookup matched %d candidates" % len(hits))
        return hits[0]

    def parse_class(self, text) -> AmalgamClass:
        """Inverse of canonical_form / printed_form."""
        kl = self._name_index.get(text.strip())
        if kl is None:
            raise KeyError("unknown class string %r" % text)
        return kl

    # -- normalizers, Weyl groups, conjugates ------------------------------

    def _normalizer_triples(self, kl):
        if kl.index not in self._nbar:
            trips = [t for t in self._conj_candidates(kl.codes, kl.codes)
                     if self._maps_into(t, kl.gens, kl.codes)]
            self._nbar[kl.index] = trips
        return self._nbar[kl.index]

    def weyl(self, kl):
        """(finite flag, order of the Weyl group when finite)."""
        if kl.kind == "cyclic":
            return (False, None)
        if kl.kind == "o2":
            return (True, len(_s4_normalizer(kl.H_set)) // len(kl.H_set))
        if kl.kind == "so2":
            return (True, 2 * len(_s4_normalizer(kl.H_set)) // len(kl.H_set))
        if kl.kind == "o2z2":
            # normalizer is P x O(2) with P stabilizing the pair (H, Z),
            # while the subgroup fills only half of each O(2) fiber
            n = sum(1 for g in _s4_normalizer(kl.H_set)
                    if frozenset(CONJ[g][p] for p in kl.Z_set) == kl.Z_set)
            return (True, 2 * n // len(kl.H_set))
        trips = self._normalizer_triples(kl)
        if (2 * len(trips)) % kl.order:
            raise InternalError("normalizer order not divisible by |H|")
        return (True, 2 * len(trips) // kl.order)

    def conjugates_of(self, kl):
        """All distinct conjugate subgroups of a finite class representative."""
        if kl.index in self._conjugates:
            return self._conjugates[kl.index]
        nbar = self._normalizer_triples(kl) if kl.kind == "dihedral" else None
        out = []
        if kl.kind == "dihedral":
            seen = set()
            for g in range(24):
                for f in (0, 1):
                    for j in range(self.N):
                        c = (g, f, j)
                        if c in seen:
                            continue
                        out.append(frozenset(self.conj_apply(c, e)
                                             for e in kl.codes))
                        for nb in nbar:
                            seen.add(self.conj_compose(c, nb))
        else:       # cyclic: rotation conjugators act trivially
            seen = set()
            for g in range(24):
                for f in (0, 1):
                    img = frozenset(self.conj_apply((g, f, 0), e)
                                    for e in kl.codes)
                    if img not in seen:
                        seen.add(img)
                        out.append(img)
        self._conjugates[kl.index] = out
        return out

    # -- containment counting ----------------------------------------------

    def n_count(self, low, high):
        """Number of conjugates of `high` containing a representative of
        `low` (the coefficient n(L, K) of the recursion formula)."""
        key = (low.index, high.index)
        if key in self._ncount_memo:
            return self._ncount_memo[key]
        val = self._n_count_raw(low, high)
        self._ncount_memo[key] = val
        return val

    def _n_count_raw(self, low, high):
        if low is high:
            return 1
        if high.kind in ("o2", "so2", "o2z2"):
            return self._n_count_continuous(low, high)
        if not low.is_finite:
            return 0                      # infinite cannot sit inside finite
        if low.order > high.order or high.order % low.order:
            return 0
        return sum(1 for conj in self.conjugates_of(high)
                   if low.codes <= conj)

    def _n_count_continuous(self, low, high):
        # distinct conjugates of `high` are indexed by the S4-conjugates of
        # H (and of the pair (H, Z) for the o2z2 shape)
        pairs = set()
        for g in range(24):
            hs = frozenset(CONJ[g][p] for p in high.H_set)
            zs = frozenset(CONJ[g][p] for p in high.Z_set)
            pairs.add((hs, zs))
        if low.is_finite:
            rot_perms = frozenset(p for p, kk, _ in map(self.split, low.codes)
                                  if kk == 0)
            all_perms = low.H_set
        elif low.kind in ("o2", "so2"):
            rot_perms = low.H_set
            all_perms = low.H_set
        else:
            rot_perms = low.Z_set if low.kind == "o2z2" else low.H_set
            all_perms = low.H_set
        count = 0
        for hs, zs in pairs:
            if high.kind == "o2":
                ok = all_perms <= hs
            elif high.kind == "so2":
                has_refl = (low.is_finite and any(
                    kk for _, kk, _ in map(self.split, low.codes)))
                has_refl = has_refl or low.kind in ("o2", "o2z2")
                ok = (not has_refl) and all_perms <= hs
            else:       # o2z2: rotations over zs, reflections over hs \ zs
                if low.is_finite:
                    refl_perms = frozenset(
                        p for p, kk, _ in map(self.split, low.codes) if kk)
                elif low.kind == "o2z2":
                    refl_perms = low.H_set - low.Z_set
                elif low.kind == "o2":
                    refl_perms = low.H_set
                else:
                    refl_perms = frozenset()
                ok = rot_perms <= zs and refl_perms <= (hs - zs)
            count += ok
        return count

    def leq(self, low, high):
        """Subconjugacy partial order on classes."""
        if low is high:
            return True
        return self.n_count(low, high) >= 1

    def _order_rank(self, kl):
        """Strictly monotone along the partial order (for topdown recursion).

        For the continuous shapes the rank is the size of the S4 content
        weighted by the density of the O(2) part inside O(2)."""
        if kl.is_finite:
            return kl.order
        return 2 * len(kl.H_set) if kl.kind == "o2" else len(kl.H_set)

    # -- ring arithmetic -----------------------------------------------------

    def _class_product(self, c1, c2):
        key = (min(c1.index, c2.index), max(c1.index, c2.index))
        if key in self._product_memo:
            return self._product_memo[key]
        unit = self.unit
        if c1 is unit:
            result = {c2.index: 1}
        elif c2 is unit:
            result = {c1.index: 1}
        else:
            cands = [kl for kl in self._classes_sorted
                     if kl.in_phi0 and self.leq(kl, c1) and self.leq(kl, c2)]
            cands.sort(key=lambda kl: (kl.order == 0, self._order_rank(kl)),
                       reverse=True)
            coeffs = {}
            w1 = self.weyl(c1)[1]
            w2 = self.weyl(c2)[1]
            for kl in cands:
                total = (self.n_count(kl, c1) * w1
                         * self.n_count(kl, c2) * w2)
                for other in cands:
                    if coeffs.get(other.index) and other is not kl \
                            and self.leq(kl, other):
                        total -= (self.n_count(kl, other)
                                  * coeffs[other.index]
                                  * self.weyl(other)[1])
                wl = self.weyl(kl)[1]
                if total % wl:
                    raise InternalError(
                        "non-exact division in product recursion")
                if total:
                    coeffs[kl.index] = total // wl
            result = coeffs
        self._product_memo[key] = result
        return result

    def multiply(self, a: dict, b: dict) -> dict:
        out = {}
        for i, ca in a.items():
            for j, cb in b.items():
                for k, ck in self._class_product(
                        self.classes[i], self.classes[j]).items():
                    out[k] = out.get(k, 0) + ca * cb * ck
        return {k: v for k, v in out.items() if v}

    # -- fixed point dimensions and basic degrees ----------------------------

    def fixed_point_dim(self, j, l, kl):
        """dim of the fixed space of the class inside the (j, l) loop mode."""
        if not 0 <= j <= 4:
            raise ValueError("isotypic index out of range")
        if l < 1:
            raise ValueError("Fourier mode must be >= 1")
        if not kl.is_finite:
            return 0        # a full circle of rotations averages to zero
        total = 0.0
        for e in kl.codes:
            p, kind, k = self.split(e)
            if kind == 0:
                total += (CHARACTER_TABLE[j, PERM_CLASS[p]]
                          * 2.0 * math.cos(2.0 * math.pi * l * k / self.N))
        dim = total / kl.order
        r = round(dim)
        if abs(dim - r) > 1e-9:
            raise InternalError("non-integer fixed-point dimension")
        return int(r)

    def basic_degree(self, j, l) -> "BurnsideElement":
        """Gradient degree of -Id on the (j, l) isotypic loop component."""
        key = ("deg", j, l)
        if key in self._product_memo:
            return BurnsideElement(self, dict(self._product_memo[key]))
        unit = self.unit
        cands = [kl for kl in self.phi0_classes()
                 if kl is unit or (kl.is_finite
                                   and self.fixed_point_dim(j, l, kl) >= 1)]
        cands.sort(key=lambda kl: (kl.order == 0, self._order_rank(kl)),
                   reverse=True)
        coeffs = {}
        for kl in cands:
            fd = 0 if kl is unit else self.fixed_point_dim(j, l, kl)
            total = (-1) ** fd
            for other in cands:
                if coeffs.get(other.index) and other is not kl \
                        and self.leq(kl, other):
                    total -= (self.n_count(kl, other) * coeffs[other.index]
                              * self.weyl(other)[1])
            wl = self.weyl(kl)[1]
            if total % wl:
                raise InternalError("non-exact division in degree recursion")
            if total:
                coeffs[kl.index] = total // wl
        self._product_memo[key] = dict(coeffs)
        return BurnsideElement(self, coeffs)

    def fold_cover(self, kl: AmalgamClass, k: int) -> AmalgamClass:
        """Class of the preimage under the k-fold cover of O(2).

        Rotations by t pull back to rotations by (t + m)/k; the resulting
        class has K-order multiplied by k (used by the mode-doubling
        independence check)."""
        if not kl.is_finite:
            raise ValueError("continuous class")
        codes = frozenset(
            e for e in (self.join(p, kind, kk)
                        for p in range(24) for kind in (0, 1)
                        for kk in range(self.N))
            if self.join(self.split(e)[0], self.split(e)[1],
                         (self.split(e)[2] * k) % self.N) in kl.codes)
        if len(codes) != k * kl.order:
            raise InternalError("fold cover has wrong order (resolution?)")
        return self.classify(codes)


def universe_for_modes(modes):
    """Universe able to host isotropy groups of the loop modes in `modes`."""
    orders = set()
    for l in modes:
        for m in (1, 2, 3, 4):
            orders.add(m * l)
    return Universe.for_orders(tuple(sorted(orders)))


# ---------------------------------------------------------------------------
# ring elements


class BurnsideElement:
    """Integer combination of finite-Weyl conjugacy classes."""

    def __init__(self, universe: Universe, coeffs=None):
        self.universe = universe
        self.coeffs = {}
        for idx, c in (coeffs or {}).items():
            if c:
                kl = universe.classes[idx]
                if not kl.in_phi0:
                    raise ValueError("class with infinite Weyl group: %s" % kl)
                self.coeffs[idx] = int(c)

    @classmethod
    def from_classes(cls, universe, terms):
        coeffs = {}
        for kl, c in terms:
            coeffs[kl.index] = coeffs.get(kl.index, 0) + c
        return cls(universe, coeffs)

    @classmethod
    def unit(cls, universe):
        return cls(universe, {universe.unit.index: 1})

    def terms(self):
        """(class, coefficient) pairs in canonical order."""
        return [(self.universe.classes[i], c) for i, c in
                sorted(self.coeffs.items(),
                       key=lambda ic: self.universe.classes[ic[0]].sort_key())]

    def coefficient(self, kl: AmalgamClass) -> int:
        return self.coeffs.get(kl.index, 0)

    def _check(self, other):
        if not isinstance(other, BurnsideElement):
            raise TypeError("expected a ring element")
        if other.universe is not self.universe:
            raise ValueError("elements from different universes")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return BurnsideElement(self.universe, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return BurnsideElement(self.universe,
                               {i: -c for i, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return BurnsideElement(
                self.universe, {i: c * other for i, c in self.coeffs.items()})
        self._check(other)
        return BurnsideElement(
            self.universe, self.universe.multiply(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, BurnsideElement)
                and self.universe is other.universe
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((id(self.universe), tuple(sorted(self.coeffs.items()))))

    def __bool__(self):
        return bool(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for kl, c in self.terms():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            coeff = "" if mag == 1 else "%d" % mag
            parts.append("%s %s%s" % (sign, coeff, kl.printed_form()))
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    __repr__ = __str__


def basic_degree(j, l, universe=None) -> BurnsideElement:
    u = universe or universe_for_modes([l])
    return u.basic_degree(j, l)


def pi0(universe, terms) -> BurnsideElement:
    """Truncation onto finite-Weyl classes: drops the others."""
    coeffs = {}
    for kl, c in terms:
        if kl.in_phi0:
            coeffs[kl.index] = coeffs.get(kl.index, 0) + c
    return BurnsideElement(universe, coeffs)
