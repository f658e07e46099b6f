"""
Builtin groups and actions: the diagonal sign groups on R^6 and R^15, Heisenberg and
elementary abelian groups in regular representations, small permutation groups,
lens rotation groups and the 5-dimensional flat pair built from a 4-dimensional lattice pair.
"""
import logging
import re
from itertools import product
from typing import Callable, Dict, List, Sequence, Tuple

from core.errors import InputParseError
from core.exactnum import ExactMatrix
from core.finite_group import FiniteMatrixGroup, SignedPerm, cyclic_group, direct_product, generate_group, \
    klein_four_group
from core.flat_orbifold import CrystalGroup, Lattice, TorusElement
from core.orthogonal_action import SphereAction, StiefelAction
from core.sphere_spectrum import lens_rotation_group

logger = logging.getLogger("Catalog")


# ==========================================
# ➖ Diagonal sign groups
# ==========================================

def sign_matrix(n: int, negated: Sequence[int]) -> SignedPerm:
    """a_{i1 i2 ...}: the diagonal matrix with -1 in the listed 1-based positions."""
    if any(not 1 <= i <= n for i in negated):
        raise InputParseError(f"positions {list(negated)} out of range 1..{n}")
    return SignedPerm.diagonal([-1 if i + 1 in negated else 1 for i in range(n)])


# K1 = {I, -I, a12, a13, a23, a1456, a2456, a3456}, K2 = {I, -I, a12, a34, a56, a1234, a1256, a3456}
K1_GENERATORS = ((1, 2), (1, 3), (1, 4, 5, 6))
K2_GENERATORS = ((1, 2), (3, 4), (5, 6))


def k_group(which: int) -> FiniteMatrixGroup:
    gens = {1: K1_GENERATORS, 2: K2_GENERATORS}.get(which)
    if gens is None:
        raise InputParseError(f"K{which} is not defined (use 1 or 2)")
    return generate_group([sign_matrix(6, g) for g in gens], cap=8, name=f"K{which}")


def g15_group(which: int) -> FiniteMatrixGroup:
    """<a12, a23> on the first three coordinates times the doubled K_i on coordinates 4..15."""
    gens = {1: K1_GENERATORS, 2: K2_GENERATORS}.get(which)
    if gens is None:
        raise InputParseError(f"G{which} is not defined (use 1 or 2)")
    doubled = [sign_matrix(15, [3 + i for i in g] + [9 + i for i in g]) for g in gens]
    return generate_group([sign_matrix(15, (1, 2)), sign_matrix(15, (2, 3))] + doubled, cap=32, name=f"G{which}")


# ==========================================
# 🔺 Heisenberg groups mod p
# ==========================================

Triple = Tuple[int, int, int]


def _heisenberg_moves(p: int) -> List[Callable[[Triple], Triple]]:
    # left multiplication by x = (1,0,0) and y = (0,1,0) with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')
    return [lambda t: ((t[0] + 1) % p, t[1], (t[2] + t[1]) % p),
            lambda t: (t[0], (t[1] + 1) % p, t[2])]


def _elementary_moves(p: int) -> List[Callable[[Triple], Triple]]:
    return [lambda t: ((t[0] + 1) % p, t[1], t[2]),
            lambda t: (t[0], (t[1] + 1) % p, t[2]),
            lambda t: (t[0], t[1], (t[2] + 1) % p)]


def _check_prime(p: int):
    if p < 3 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise InputParseError(f"p must be an odd prime, got {p}")


def regular_product(p: int, factors: Sequence[str], name: str = "") -> FiniteMatrixGroup:
    """A product of copies of H ("H") and E ("E") in its regular representation on p^(3m) points."""
    _check_prime(p)
    points = list(product(*[list(product(range(p), repeat=3)) for _ in factors]))
    where = {pt: i for i, pt in enumerate(points)}
    gens = []
    for slot, kind in enumerate(factors):
        moves = _heisenberg_moves(p) if kind == "H" else _elementary_moves(p)
        for move in moves:
            images = [where[pt[:slot] + (move(pt[slot]),) + pt[slot + 1:]] for pt in points]
            gens.append(SignedPerm(images))
    order = p ** (3 * len(factors))
    return generate_group(gens, cap=order, name=name or "x".join(factors))


def heisenberg_group(p: int) -> FiniteMatrixGroup:
    return regular_product(p, ["H"], name=f"H{p}")


def elementary_group(p: int) -> FiniteMatrixGroup:
    return regular_product(p, ["E"], name=f"E{p}")


def ssw_group(p: int, m: int, i: int) -> FiniteMatrixGroup:
    """H_i = H^i x E^(m-i)."""
    if m < 1 or not 0 <= i <= m:
        raise InputParseError(f"need m >= 1 and 0 <= i <= m, got m={m}, i={i}")
    return regular_product(p, ["H"] * i + ["E"] * (m - i), name=f"H_{i}(p={p},m={m})")


# ==========================================
# 🔷 Small permutation groups
# ==========================================

def dihedral_group(k: int) -> FiniteMatrixGroup:
    """D_2k as symmetries of a k-gon, permuting its vertices."""
    if k < 3:
        raise InputParseError(f"dihedral groups here need k >= 3, got {k}")
    rot = SignedPerm([(j + 1) % k for j in range(k)])
    ref = SignedPerm([(-j) % k for j in range(k)])
    return generate_group([rot, ref], cap=2 * k, name=f"D{2 * k}")


_NAMED_GROUPS: Dict[str, Callable[[], FiniteMatrixGroup]] = {
    "K1": lambda: k_group(1),
    "K2": lambda: k_group(2),
    "G1": lambda: g15_group(1),
    "G2": lambda: g15_group(2),
    "V4": klein_four_group,
    "Z2xZ2": klein_four_group,
}


def named_group(text: str) -> FiniteMatrixGroup:
    """K1, K2, G1, G2, Z<k>, D<2k>, H<p>, E<p>, V4."""
    text = text.strip()
    if text in _NAMED_GROUPS:
        return _NAMED_GROUPS[text]()
    m = re.fullmatch(r"Z_?(\d+)", text)
    if m:
        return cyclic_group(int(m.group(1)), name=f"Z{m.group(1)}")
    m = re.fullmatch(r"D(\d+)", text)
    if m:
        order = int(m.group(1))
        if order % 2:
            raise InputParseError(f"dihedral order must be even, got {order}")
        return dihedral_group(order // 2)
    m = re.fullmatch(r"([HE])(\d+)", text)
    if m:
        p = int(m.group(2))
        return heisenberg_group(p) if m.group(1) == "H" else elementary_group(p)
    raise InputParseError(f"unknown builtin group {text!r}")


# ==========================================
# 🌐 Actions
# ==========================================

def trivial_action(group: FiniteMatrixGroup, n: int = 3) -> SphereAction:
    """G acting trivially on S^(n-1): every element is represented by the identity."""
    ident = SignedPerm.identity(n)
    return SphereAction(group, [ident] * group.order, name=f"{group.name} (trivial on S^{n - 1})")


def lens_action(q: int, weights: Sequence[int]) -> SphereAction:
    group = lens_rotation_group(q, weights)
    return SphereAction(group, name=group.name)


def rsw_sphere_pair() -> Tuple[SphereAction, SphereAction]:
    return SphereAction(k_group(1), name="O1"), SphereAction(k_group(2), name="O2")


def rsw_stiefel_pair() -> Tuple[StiefelAction, StiefelAction]:
    return StiefelAction(k_group(1), 3, name="O1"), StiefelAction(k_group(2), 3, name="O2")


def sunada15_pair() -> Tuple[StiefelAction, StiefelAction]:
    return StiefelAction(g15_group(1), 12, name="O1"), StiefelAction(g15_group(2), 12, name="O2")


def ssw_actions(p: int, m: int) -> List[SphereAction]:
    return [SphereAction(ssw_group(p, m, i), name=f"O{i}") for i in range(m + 1)]


# ==========================================
# 🧊 Flat 5-dimensional pair
# ==========================================

def mirror_extension(lattice: Lattice, extension_norm, name: str) -> CrystalGroup:
    """Extend L orthogonally by a vector of the given norm and divide by the reflection fixing L."""
    line = Lattice(ExactMatrix([[extension_norm]]), name="e")
    big = lattice.orthogonal_sum(line, name=f"{lattice.name}+e")
    n = big.rank
    reflection = TorusElement(ExactMatrix.diagonal([1] * (n - 1) + [-1]), [0] * n)
    return CrystalGroup(big, [reflection], name=name)


def torus5_pair(first: Lattice, second: Lattice, extension_norm=1) -> Tuple[CrystalGroup, CrystalGroup]:
    if first.rank != second.rank:
        raise InputParseError(f"lattice ranks differ: {first.rank} vs {second.rank}")
    return mirror_extension(first, extension_norm, "O1"), mirror_extension(second, extension_norm, "O2")


def product_trivial_action(factors: Sequence[FiniteMatrixGroup], n: int = 3) -> SphereAction:
    """Trivial action of a direct product; the product is built on disjoint point sets."""
    group = factors[0]
    for f in factors[1:]:
        group = direct_product(group, f)
    return trivial_action(group, n)
