"""Bifurcation invariants for the periodic problem near the equilibrium.

Rescaling time by the unknown period turns periodic solutions of the Newton
system into 2*pi-periodic zeros of u'' + lambda^2 grad V(u).  Linearizing at
the equilibrium, the (j, l) loop component (S4-isotypic index j, Fourier mode
l) becomes negative definite exactly when lambda exceeds the critical number

    lambda_{j,l} = l / sqrt(mu_j).

Crossing one critical number changes the product of basic gradient degrees;
the change is the Burnside-ring bifurcation invariant whose nonzero terms
certify bifurcating branches and whose maximal classes prescribe their
spatio-temporal symmetries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .burnside import (AmalgamClass, BurnsideElement, Universe,
                       universe_for_modes)

__all__ = [
    "UsageError", "CriticalNumber", "InvariantReport", "Family",
    "Predicate", "SymmetryDescription", "critical_set", "degree_below",
    "invariant", "independent_families", "describe_symmetry",
]


class UsageError(ValueError):
    """A precondition on user-facing input was violated."""


@dataclass(frozen=True)
class CriticalNumber:
    """One element of the critical set, with every (j, l) that lands on it.

    key is an exact rational proportional to lambda^2 when the eigenvalue
    ratios are recognized as rational (the generic tetrahedral case has
    mu_0 : mu_1 : mu_2 = 4 : 2 : 1); resonant critical numbers are then
    merged exactly rather than by floating-point coincidence.
    """

    value: float
    contributors: tuple
    key: object = field(compare=False, default=None)

    @property
    def resonant(self):
        return len(self.contributors) > 1


def _ratio_keys(mu, tol=1e-9):
    """Exact rationals r_j with mu_j = r_j * mu_2, or None when unrecognized."""
    keys = []
    for m in mu:
        r = m / mu[2]
        frac = Fraction(r).limit_denominator(64)
        if abs(float(frac) - r) < tol * max(1.0, r):
            keys.append(frac)
        else:
            return None
    return keys


def critical_set(mu, l_max: int = 4):
    """Sorted critical numbers l/sqrt(mu_j) for j = 0, 1, 2 and l <= l_max."""
    if not (0.0 < mu[2] < mu[1] < mu[0]):
        raise UsageError("slice eigenvalues must satisfy 0 < mu_2 < mu_1 < mu_0")
    if l_max < 1:
        raise UsageError("l_max must be at least 1")
    ratios = _ratio_keys(mu)
    crits = {}
    for j in range(3):
        for l in range(1, l_max + 1):
            value = l / math.sqrt(mu[j])
            if ratios is not None:
                key = Fraction(l * l, 1) / ratios[j]    # lambda^2 * mu_2
            else:
                key = None
            hit = None
            for k in crits:
                same = (key is not None and crits[k][1] == key) or (
                    key is None and abs(k - value) < 1e-12 * value)
                if same:
                    hit = k
                    break
            if hit is None:
                crits[value] = ([(j, l)], key)
            else:
                crits[hit][0].append((j, l))
    out = [CriticalNumber(value=v, contributors=tuple(sorted(c)), key=k)
           for v, (c, k) in crits.items()]
    out.sort(key=lambda c: c.value)
    return out


def _universe(l_max) -> Universe:
    return universe_for_modes(range(1, l_max + 1))


def degree_below(lam: float, mu, l_max: int = 4,
                 universe: Universe = None) -> BurnsideElement:
    """Product of the basic degrees of all loop components that are negative
    at lambda: the (j, l) with lambda_{j,l} < lambda and l <= l_max."""
    crits = critical_set(mu, l_max)
    for c in crits:
        if abs(lam - c.value) < 1e-9 * c.value:
            raise UsageError("lambda coincides with the critical number %g"
                             % c.value)
    u = universe or _universe(l_max)
    out = BurnsideElement.unit(u)
    for c in crits:
        if c.value < lam:
            for j, l in c.contributors:
                out = out * u.basic_degree(j, l)
    return out


@dataclass(frozen=True)
class Predicate:
    """One machine-checkable symmetry relation for a periodic orbit.

    kind 'shift':   u(t) = rho(perm) u(t + 2*pi*angle)
    kind 'reflect': u(t) = rho(perm) u(-t - 2*pi*angle)
    (rho acts by particle permutation and the realized spatial matrix;
    angle is in turns).
    """

    perm: tuple
    kind: str
    angle: Fraction
    text: str


@dataclass(frozen=True)
class SymmetryDescription:
    klass: AmalgamClass
    title: str
    brake: bool
    predicates: tuple
    text: str


@dataclass(frozen=True)
class InvariantReport:
    critical: CriticalNumber
    lam_minus: float
    lam_plus: float
    omega: BurnsideElement
    maximal: tuple              # (AmalgamClass, coefficient) pairs
    descriptions: tuple         # SymmetryDescription per maximal class

    def family_classes(self):
        return tuple(kl for kl, _ in self.maximal)


@dataclass(frozen=True)
class Family:
    """One independent branch family: its symmetry class and starting mode."""

    klass: AmalgamClass
    coefficient: int
    critical: CriticalNumber
    j: int
    l: int

    @property
    def value(self):
        return self.critical.value


def invariant(critical: CriticalNumber, mu, l_max: int = 4,
              universe: Universe = None) -> InvariantReport:
    """Bifurcation invariant at one critical number.

    The invariant is the jump of degree_below across the critical value,
    evaluated at geometric midpoints of the neighbouring gaps; its sign
    convention follows the printed invariant lists (degree above minus
    degree below)."""
    crits = critical_set(mu, l_max)
    values = [c.value for c in crits]
    try:
        pos = next(i for i, c in enumerate(crits)
                   if abs(c.value - critical.value) < 1e-12 * c.value)
    except StopIteration:
        raise UsageError("not a critical number for these eigenvalues")
    lam_minus = (math.sqrt(values[pos - 1] * values[pos]) if pos > 0
                 else 0.5 * values[pos])
    if pos + 1 < len(values):
        lam_plus = math.sqrt(values[pos] * values[pos + 1])
    else:
        raise UsageError("critical number is the largest below the mode "
                         "cutoff; raise l_max to isolate it")
    # modes beyond l_max must not sneak into the straddling window
    unseen = (l_max + 1) / math.sqrt(mu[0])
    if lam_plus >= unseen:
        raise UsageError("l_max too small to isolate this critical number")
    u = universe or _universe(l_max)
    omega = (degree_below(lam_plus, mu, l_max, u)
             - degree_below(lam_minus, mu, l_max, u))
    terms = omega.terms()
    maximal = tuple(
        (kl, c) for kl, c in terms
        if not any(other is not kl and c2 and u.leq(kl, other)
                   for other, c2 in terms))
    descriptions = tuple(describe_symmetry(kl) for kl, _ in maximal)
    return InvariantReport(critical=crits[pos], lam_minus=lam_minus,
                           lam_plus=lam_plus, omega=omega, maximal=maximal,
                           descriptions=descriptions)


def _integer_ratio(later: CriticalNumber, earlier: CriticalNumber):
    """k >= 2 with later = k * earlier (exact when keys present), else None."""
    if later.key is not None and earlier.key is not None:
        q = later.key / earlier.key
        if q.denominator == 1:
            root = math.isqrt(q.numerator)
            if root * root == q.numerator and root >= 2:
                return root
        return None
    ratio = later.value / earlier.value
    k = round(ratio)
    if k >= 2 and abs(ratio - k) < 1e-9:
        return k
    return None


def independent_families(reports) -> tuple:
    """Keep one family per genuinely new branch.

    A maximal class at a higher critical number is dropped when it is the
    k-fold frequency cover of a family already reported at value/k: such a
    branch retraces the earlier one with a non-minimal period.
    """
    reports = sorted(reports, key=lambda r: r.critical.value)
    families = []
    for rep in reports:
        u = rep.omega.universe
        for kl, coeff in rep.maximal:
            doubled = False
            for earlier in families:
                k = _integer_ratio(rep.critical, earlier.critical)
                if k is not None and earlier.klass.universe is u:
                    try:
                        cover = u.fold_cover(earlier.klass, k)
                    except Exception:
                        continue
                    if cover is kl:
                        doubled = True
                        break
            if doubled:
                continue
            j, l = _mode_of(u, kl, rep.critical)
            families.append(Family(klass=kl, coefficient=coeff,
                                   critical=rep.critical, j=j, l=l))
    return tuple(families)


def _mode_of(u, kl, critical):
    for j, l in critical.contributors:
        if u.fixed_point_dim(j, l, kl) >= 1:
            return j, l
    raise UsageError("class has no fixed directions on the critical modes")


# ---------------------------------------------------------------------------
# symmetry descriptions

_FAMILY_PROSE = {
    ("S4", "S4", "Z1", 1): (
        "tetrahedral breathing mode",
        "Brake orbit keeping the full particle-exchange symmetry: the "
        "configuration is a regular tetrahedron at every instant, expanding "
        "and contracting radially, and all velocities vanish simultaneously "
        "twice per period."),
    ("D4", "D2", "Z2", 2): (
        "paired inversion mode",
        "Brake orbit in which particles 1 and 2 mirror each other (u_1 is "
        "the spatial inversion image of u_2, likewise 3 and 4), while "
        "swapping the two pairs combines with a half-period phase shift."),
    ("D2", "D1", "Z2", 2): (
        "single-pair exchange mode",
        "Brake orbit fixed by exchanging particles 1 and 2; exchanging 3 "
        "and 4 instead shifts time by half a period."),
    ("D4", "Z1", "D4", 4): (
        "rotoreflection wave",
        "Travelling wave (not a brake orbit): a quarter-turn rotoreflection "
        "of space combined with a quarter-period phase shift reproduces the "
        "orbit, so the motion circulates through the four particles."),
    ("D3", "D3", "Z1", 1): (
        "axial pulse mode",
        "Brake orbit keeping the full triangle symmetry of particles "
        "1, 2, 3: particle 4 oscillates along the fixed axis while the "
        "other three breathe in the transverse plane."),
    ("D3", "Z1", "D3", 3): (
        "discrete rotating wave",
        "Rotating wave: a third-turn spatial rotation equals a third-period "
        "time shift, so the orbits of particles 1, 2, 3 trace one curve "
        "visited with mutual delay T/3 (up to the realized rotation "
        "matrix), while particle 4 rides the symmetry axis."),
    ("S4", "V4", "D3", 3): (
        "twisted tetrahedral wave",
        "The Klein four-subgroup acts purely spatially while three-cycles "
        "advance time by a third of a period and odd permutations reverse "
        "it: a rotating wave through all four particles."),
}


def describe_symmetry(kl: AmalgamClass) -> SymmetryDescription:
    """Generator list and machine-checkable predicates for an orbit class."""
    if not kl.is_finite:
        raise UsageError("continuous classes do not describe single orbits")
    preds = []
    brake = False
    for perm, kind, angle in kl.elements():
        if perm == tuple(range(4)) and kind == "rot" and angle == 0:
            continue
        if kind == "rot":
            text = ("configuration is reproduced by permuting/rotating with "
                    "%s after a time shift of %s turns" % (_cycles(perm), angle))
            preds.append(Predicate(perm=perm, kind="shift", angle=angle,
                                   text=text))
        else:
            if perm == tuple(range(4)):
                brake = True
            text = ("configuration is reproduced by permuting/rotating with "
                    "%s after reflecting time about -%s turns" %
                    (_cycles(perm), angle))
            preds.append(Predicate(perm=perm, kind="reflect", angle=angle,
                                   text=text))
    key = (kl.H_label, kl.Z_label, kl.L_label, kl.K_order)
    if key in _FAMILY_PROSE:
        title, prose = _FAMILY_PROSE[key]
    else:
        title = "symmetric periodic orbit"
        prose = "Orbit fixed by the group generated by the listed relations."
        if brake:
            prose += " It is a brake orbit."
    return SymmetryDescription(klass=kl, title=title, brake=brake,
                               predicates=tuple(preds), text=prose)


def _cycles(perm):
    """Cycle notation on particles 1..4 for readable predicate text."""
    seen, parts = set(), []
    for i in range(4):
        if i in seen or perm[i] == i:
            seen.add(i)
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = perm[j]
        parts.append("(" + " ".join(cyc) + ")")
    return "".join(parts) if parts else "identity"
