"""Frozen reference data for the degree tables and invariants.

Each term is (coeff, H, Z, R, L, k) with R set only where required to
disambiguate; in the degree tables k is a multiplier (K = D_{k*l}), in the
invariant lists it is the absolute K-order.  The unit class (S4 x O2) always
carries coefficient +1 in a basic degree and is listed separately.
"""

# non-unit terms of the five basic degrees, one list per isotypic index
DEGREE_TABLES = {
    0: [(-1, "S4", "S4", None, "Z1", 1)],
    1: [(-1, "D4", "Z1", None, "D4", 4),
        (-1, "D4", "D2", None, "Z2", 2),
        (-1, "D3", "Z1", None, "D3", 3),
        (-1, "D3", "D3", None, "Z1", 1),
        (-1, "D2", "D1", None, "Z2", 2),
        (+1, "D2", "Z1", "Z2", "D2", 2),
        (+1, "V4", "Z1", None, "D2", 2),
        (+1, "D2", "D1", None, "D1", 1),
        (+1, "Z2", "Z1", None, "Z2", 2),
        (+2, "D1", "D1", None, "Z1", 1),
        (-1, "Z2", "Z1", None, "D1", 1),
        (-1, "Z1", "Z1", None, "Z1", 1)],
    2: [(-1, "S4", "V4", None, "D3", 3),
        (-1, "D4", "V4", None, "Z2", 2),
        (-1, "D4", "D4", None, "Z1", 1),
        (+2, "D4", "V4", None, "D1", 1),
        (+1, "V4", "V4", None, "Z1", 1)],
    3: [(-1, "D4", "Z1", None, "D4", 4),
        (-1, "D4", "Z4", None, "Z2", 2),
        (-1, "D3", "Z1", None, "D3", 3),
        (-1, "D3", "Z3", None, "Z2", 2),
        (-1, "D2", "D1", None, "Z2", 2),
        (+1, "D2", "Z1", "D1", "D2", 2),
        (+1, "D2", "Z1", "Z2", "D2", 2),
        (+1, "V4", "Z1", None, "D2", 2),
        (+2, "D1", "Z1", None, "Z2", 2),
        (+1, "Z2", "Z1", None, "Z2", 2),
        (-1, "Z2", "Z1", None, "D1", 1),
        (-1, "Z1", "Z1", None, "Z1", 1)],
    4: [(-1, "S4", "A4", None, "Z2", 2)],
}

# bifurcation invariants at the first three critical numbers (k absolute)
OMEGA_01 = [(-1, "S4", "S4", None, "Z1", 1)]

OMEGA_11 = [(-1, "D4", "Z1", None, "D4", 4),
            (-1, "D4", "D2", None, "Z2", 2),
            (+1, "D4", "D2", None, "D1", 1),
            (-1, "D3", "Z1", None, "D3", 3),
            (+1, "D3", "D3", None, "Z1", 1),
            (-1, "D2", "D1", None, "Z2", 2),
            (+1, "D2", "Z1", "Z2", "D2", 2),
            (+1, "V4", "Z1", None, "D2", 2),
            (+1, "D2", "D2", None, "Z1", 1),
            (+1, "Z2", "Z1", None, "Z2", 2),
            (-1, "D1", "D1", None, "Z1", 1),
            (+1, "D1", "Z1", None, "D1", 1),
            (-1, "Z2", "Z1", None, "D1", 1)]

OMEGA_21 = [(-1, "S4", "V4", None, "D3", 3),
            (-1, "S4", "S4", None, "Z1", 2),
            (+2, "S4", "S4", None, "Z1", 1),
            (+2, "D4", "D2", None, "Z2", 2),
            (+1, "D4", "V4", None, "Z2", 2),
            (-1, "D4", "Z2", "Z4", "D2", 2),
            (-1, "D4", "D2", None, "D1", 1),
            (-1, "D4", "D4", None, "Z1", 1),
            (+1, "D4", "V4", None, "D1", 1),
            (+2, "D3", "Z1", None, "D3", 3),
            (-2, "D3", "D3", None, "Z1", 1),
            (+2, "D2", "D1", None, "Z2", 2),
            (-1, "D2", "Z1", "D1", "D2", 2),
            (-1, "D2", "Z1", "Z2", "D2", 2),
            (-1, "V4", "Z1", None, "D2", 2),
            (-1, "Z4", "Z2", None, "Z2", 2),
            (-1, "D2", "D1", None, "D1", 1),
            (-1, "D2", "D2", None, "Z1", 1),
            (-1, "D1", "Z1", None, "Z2", 2),
            (-2, "Z2", "Z1", None, "Z2", 2),
            (+1, "D1", "D1", None, "Z1", 1),
            (+3, "Z2", "Z1", None, "D1", 1),
            (+1, "Z1", "Z1", None, "Z1", 1)]

# maximal classes of the invariants, and the independent families
MAXIMAL_01 = [("S4", "S4", None, "Z1", 1)]
MAXIMAL_11 = [("D4", "Z1", None, "D4", 4),
              ("D4", "D2", None, "Z2", 2),
              ("D3", "Z1", None, "D3", 3),
              ("D3", "D3", None, "Z1", 1),
              ("D2", "D1", None, "Z2", 2)]
MAXIMAL_21 = [("S4", "V4", None, "D3", 3),
              ("S4", "S4", None, "Z1", 2)]

# (j, l, H, Z, R, L, k): the seven independent branch families
FAMILIES = [(0, 1, "S4", "S4", None, "Z1", 1),
            (1, 1, "D4", "Z1", None, "D4", 4),
            (1, 1, "D4", "D2", None, "Z2", 2),
            (1, 1, "D3", "Z1", None, "D3", 3),
            (1, 1, "D3", "D3", None, "Z1", 1),
            (1, 1, "D2", "D1", None, "Z2", 2),
            (2, 1, "S4", "V4", None, "D3", 3)]


def lookup(universe, h, z, r, l_label, k_order):
    """Resolve one golden tuple to the universe's class object."""
    return universe.find_class(h, z_label=z, r_label=r, l_label=l_label,
                               k_order=k_order)


def as_class_set(universe, entries, scale=1):
    """{class: coeff} for a golden term list, K-orders scaled by `scale`."""
    out = {}
    for coeff, h, z, r, l_label, k in entries:
        out[lookup(universe, h, z, r, l_label, k * scale)] = coeff
    return out
