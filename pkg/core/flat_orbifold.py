"""
Flat orbifolds as finite quotients of flat tori.

A crystallographic group G is handled through the finite group G/Λ acting on the torus
R^n/Λ. Points and translations are written in lattice coordinates (so the torus is
R^n/Z^n), linear parts are integer matrices preserving the Gram matrix, and dual vectors
are integer coordinate vectors η with ||v||^2 = η^T G^-1 η.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor, isqrt, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Expr, Integer, Rational, pi, sqrt, sympify

from core.config import settings
from core.errors import BudgetExceeded, InputParseError, InternalConsistencyError
from core.exactnum import Cyclotomic, ExactMatrix, is_rational_scalar, normalize_scalar, parse_rational, \
    smith_normal_form, to_fraction
from core.finite_group import FiniteMatrixGroup, SignedPerm, cyclic_group, generate_group, klein_four_group
from core.gamma_hom import GroupPresentation, HomClass, Homomorphism, hom_classes, is_cyclic_subgroup, \
    subgroup_closure
from core.orthogonal_action import FixedSetDescriptor, SectorDescriptor, centralizer_indices
from core.sphere_spectrum import SpectrumSegment, zero_only

logger = logging.getLogger("FlatOrbifold")


def _rational(x) -> Rational:
    f = Fraction(x)
    return Rational(f.numerator, f.denominator)


def _frac(x) -> Fraction:
    x = Fraction(x)
    return x - floor(x)


# ==========================================
# 🔷 Lattices
# ==========================================

@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice given by its Gram matrix, optionally with a basis (columns)."""
    gram: ExactMatrix
    basis: Optional[ExactMatrix] = None
    name: str = ""

    def __post_init__(self):
        g = self.gram
        if not g.is_square():
            raise InputParseError(f"Gram matrix of {self.name or 'lattice'} is not square")
        if any(not is_rational_scalar(x) for r in g.rows for x in r):
            raise InputParseError("Gram entries must be rational")
        if g != g.transpose():
            raise InputParseError(f"Gram matrix of {self.name or 'lattice'} is not symmetric")
        for k in range(1, g.nrows + 1):
            if not to_fraction(g.submatrix(range(k), range(k)).determinant()) > 0:
                raise InputParseError(f"Gram matrix of {self.name or 'lattice'} is not positive definite")
        if self.basis is not None:
            if self.basis.nrows != self.basis.ncols or self.basis.nrows != g.nrows:
                raise InputParseError("basis shape does not match the Gram matrix")
            if self.basis.transpose() @ self.basis != g:
                raise InputParseError("Gram matrix differs from basis^T basis")

    @classmethod
    def from_basis(cls, basis, name: str = "") -> "Lattice":
        b = basis if isinstance(basis, ExactMatrix) else ExactMatrix(basis)
        if b.is_square() and b.nrows and b.determinant() == 0:
            raise InputParseError(f"basis of {name or 'lattice'} is singular")
        return cls(b.transpose() @ b, b, name)

    @classmethod
    def integer(cls, n: int) -> "Lattice":
        ident = ExactMatrix.identity(n)
        return cls(ident, ident, f"Z^{n}")

    @property
    def rank(self) -> int:
        return self.gram.nrows

    def determinant(self) -> Fraction:
        return to_fraction(self.gram.determinant())

    def covolume(self) -> Expr:
        return sqrt(_rational(self.determinant()))

    def inner(self, u: Sequence[int], v: Sequence[int]) -> Fraction:
        return to_fraction(sum((a * x * y for row, x in zip(self.gram.rows, u) for a, y in zip(row, v)), 0))

    def norm(self, coords: Sequence[int]) -> Fraction:
        return self.inner(coords, coords)

    def orthogonal_sum(self, other: "Lattice", name: str = "") -> "Lattice":
        n, m = self.rank, other.rank
        gram = [list(r) + [0] * m for r in self.gram.rows] + [[0] * n + list(r) for r in other.gram.rows]
        basis = None
        if self.basis is not None and other.basis is not None:
            basis = ExactMatrix([list(r) + [0] * m for r in self.basis.rows]
                                + [[0] * n + list(r) for r in other.basis.rows], n + m)
        return Lattice(ExactMatrix(gram, n + m), basis, name or f"{self.name}+{other.name}")

    def is_integral(self) -> bool:
        return self.gram.is_integral()


def dual_lattice(lattice: Lattice) -> Lattice:
    """Gram matrix G^-1; basis (B^T)^-1 when a basis is known."""
    if lattice.rank == 0:
        return lattice
    basis = lattice.basis.transpose().inverse() if lattice.basis is not None else None
    return Lattice(lattice.gram.inverse(), basis, f"{lattice.name}*")


# ==========================================
# 🎯 Short vectors
# ==========================================

def _form_decomposition(gram: ExactMatrix) -> List[List[Fraction]]:
    """q with Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2, exact."""
    n = gram.nrows
    q = [[to_fraction(x) for x in row] for row in gram.rows]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def vectors_of_norm(lattice: Lattice, mu_max, budget: Optional[int] = None) -> Dict[Fraction, List[Tuple[int, ...]]]:
    """Every lattice vector (in basis coordinates) with norm^2 <= mu_max, grouped by exact norm.

    Bounded backtracking over the decomposed form. Coordinate ranges use integer square
    roots rounded outwards; each candidate is accepted only after an exact comparison.
    """
    budget = settings.VECTOR_BUDGET if budget is None else budget
    bound = parse_rational(mu_max)
    if bound < 0:
        raise InputParseError(f"norm bound must be >= 0, got {mu_max}")
    n = lattice.rank
    if n == 0:
        return {Fraction(0): [()]}
    q = _form_decomposition(lattice.gram)
    x = [0] * n
    found: Dict[Fraction, List[Tuple[int, ...]]] = {}
    count = 0

    def walk(i: int, used: Fraction):
        nonlocal count
        remaining = bound - used
        c = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        r = remaining / q[i][i]
        s = isqrt(r.numerator // r.denominator) + 1
        for xi in range(ceil(c - s), floor(c + s) + 1):
            part = q[i][i] * (xi - c) ** 2
            if part > remaining:
                continue
            x[i] = xi
            if i == 0:
                count += 1
                if count > budget:
                    raise BudgetExceeded(f"more than {budget} vectors of norm <= {bound} in {lattice.name or 'lattice'}",
                                         explored=count)
                found.setdefault(used + part, []).append(tuple(x))
            else:
                walk(i - 1, used + part)
        x[i] = 0

    walk(n - 1, Fraction(0))
    logger.debug(f"🔧 {count} vectors of norm <= {bound} in {lattice.name or 'lattice'}")
    return {mu: sorted(found[mu]) for mu in sorted(found)}


def theta_series(lattice: Lattice, mu_max, budget: Optional[int] = None) -> Dict[Fraction, int]:
    return {mu: len(v) for mu, v in vectors_of_norm(lattice, mu_max, budget).items()}


# ==========================================
# 🪞 Lattice isometries
# ==========================================

def find_isometry(first: Lattice, second: Lattice, max_dim: Optional[int] = None,
                  budget: Optional[int] = None) -> Optional[ExactMatrix]:
    """Integer T with T^T G2 T = G1, or None when the lattices are not isometric.

    Column i of T is the image of the i-th basis vector of `first`, picked among the vectors
    of `second` with the same norm and matching inner products with the earlier images.
    """
    max_dim = settings.ISOMETRY_SEARCH_MAX_DIM if max_dim is None else max_dim
    n = first.rank
    if n != second.rank or first.determinant() != second.determinant():
        return None
    if n > max_dim:
        raise BudgetExceeded(f"isometry search is limited to rank {max_dim}, got {n}")
    if n == 0:
        return ExactMatrix.identity(0)
    g1 = [[to_fraction(x) for x in row] for row in first.gram.rows]
    vectors = vectors_of_norm(second, max(g1[i][i] for i in range(n)), budget)
    candidates = [vectors.get(g1[i][i], []) for i in range(n)]
    images: List[Tuple[int, ...]] = []
    tried = 0

    def extend(i: int) -> bool:
        nonlocal tried
        if i == n:
            return True
        for w in candidates[i]:
            tried += 1
            if all(second.inner(images[j], w) == g1[i][j] for j in range(i)):
                images.append(w)
                if extend(i + 1):
                    return True
                images.pop()
        return False

    if not extend(0):
        logger.debug(f"🔧 {first.name} and {second.name} are not isometric ({tried} candidate images tried)")
        return None
    t = ExactMatrix([[images[j][i] for j in range(n)] for i in range(n)])
    if t.transpose() @ second.gram @ t != first.gram:
        raise InternalConsistencyError(f"isometry {first.name} -> {second.name} failed its check")
    return t


# ==========================================
# 🔁 Isometries of the torus
# ==========================================

class TorusElement:
    """x -> Bx + β on R^n/Z^n in lattice coordinates; B integral, β reduced modulo 1."""

    __slots__ = ("linear", "translation", "_hash")

    def __init__(self, linear: ExactMatrix, translation: Sequence, check: bool = True):
        if check:
            if not linear.is_square() or not linear.is_integral():
                raise InputParseError(f"linear part must be a square integer matrix, got {linear}")
            if linear.nrows and linear.determinant() not in (1, -1):
                raise InputParseError(f"linear part is not unimodular: {linear}")
            if len(translation) != linear.nrows:
                raise InputParseError("translation length does not match the linear part")
        self.linear = linear
        self.translation = tuple(_frac(parse_rational(t)) for t in translation)
        self._hash = hash((linear, self.translation))

    @classmethod
    def identity(cls, n: int) -> "TorusElement":
        return cls(ExactMatrix.identity(n), (0,) * n, check=False)

    @classmethod
    def translation_by(cls, vec: Sequence) -> "TorusElement":
        return cls(ExactMatrix.identity(len(vec)), vec, check=False)

    @property
    def dim(self) -> int:
        return self.linear.nrows

    def identity_like(self) -> "TorusElement":
        return TorusElement.identity(self.dim)

    def is_identity(self) -> bool:
        return self.linear == ExactMatrix.identity(self.dim) and all(t == 0 for t in self.translation)

    def is_translation(self) -> bool:
        return self.linear == ExactMatrix.identity(self.dim)

    def compose(self, other: "TorusElement") -> "TorusElement":
        moved = self.linear.apply(other.translation)
        return TorusElement(self.linear @ other.linear, [a + b for a, b in zip(self.translation, moved)], check=False)

    def inverse(self) -> "TorusElement":
        inv = self.linear.inverse()
        return TorusElement(inv, [-t for t in inv.apply(self.translation)], check=False)

    def apply(self, point: Sequence) -> Tuple[Fraction, ...]:
        """Image of a point, not reduced modulo 1."""
        return tuple(to_fraction(a) + t for a, t in zip(self.linear.apply(point), self.translation))

    def det_one_minus_t(self):
        return self.linear.det_one_minus_t()

    def __eq__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self.linear == other.linear and self.translation == other.translation

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"TorusElement({[list(map(str, r)) for r in self.linear.rows]}, {[str(t) for t in self.translation]})"


@dataclass(frozen=True)
class AffineIsometry:
    """x -> Bx + b in cartesian coordinates; (B, b)(B', b') = (BB', b + Bb')."""
    linear: ExactMatrix
    translation: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.linear.is_orthogonal():
            raise InputParseError(f"linear part is not orthogonal: {self.linear}")
        if len(self.translation) != self.linear.nrows:
            raise InputParseError("translation length does not match the linear part")

    def compose(self, other: "AffineIsometry") -> "AffineIsometry":
        moved = self.linear.apply(other.translation)
        return AffineIsometry(self.linear @ other.linear,
                              tuple(to_fraction(a) + to_fraction(b) for a, b in zip(self.translation, moved)))

    def to_torus(self, lattice: Lattice) -> TorusElement:
        if lattice.basis is None:
            raise InputParseError(f"cartesian isometries need a lattice basis ({lattice.name or 'lattice'})")
        p, p_inv = lattice.basis, lattice.basis.inverse()
        linear = p_inv @ self.linear @ p
        if not linear.is_integral():
            raise InputParseError(f"isometry does not preserve {lattice.name or 'the lattice'}")
        return TorusElement(linear, p_inv.apply(self.translation))


class CrystalGroup:
    """The finite group G/Λ acting on the torus of `lattice`."""

    def __init__(self, lattice: Lattice, generators: Sequence[TorusElement] = (), name: str = "",
                 cap: Optional[int] = None):
        n = lattice.rank
        gens = list(generators) or [TorusElement.identity(n)]
        for g in gens:
            if g.dim != n:
                raise InputParseError(f"element acts in dimension {g.dim}, lattice has rank {n}")
            if g.linear.transpose() @ lattice.gram @ g.linear != lattice.gram:
                raise InputParseError(f"linear part {g.linear} is not an isometry of {lattice.name or 'the lattice'}")
        self.lattice = lattice
        self.name = name or lattice.name
        self.group = generate_group(gens, cap=cap, n=n, name=self.name)

    @classmethod
    def from_cartesian(cls, lattice: Lattice, isometries: Sequence[AffineIsometry], name: str = "") -> "CrystalGroup":
        return cls(lattice, [g.to_torus(lattice) for g in isometries], name)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def n(self) -> int:
        return self.lattice.rank

    def point_group(self) -> List[ExactMatrix]:
        return list(dict.fromkeys(e.linear for e in self.group.elements))

    def translation_denominator(self) -> int:
        return lcm(1, *(t.denominator for e in self.group.elements for t in e.translation))

    def __repr__(self):
        return f"CrystalGroup({self.name}, |G/L| = {self.order}, n={self.n})"


# ==========================================
# 🎼 Eigenvalue multiplicities
# ==========================================

@lru_cache(maxsize=32)
def _dual_vectors(gram: ExactMatrix, mu_max: Fraction, name: str = "") -> Dict[Fraction, List[Tuple[int, ...]]]:
    # shared by the crystal spectrum and every sector quotient on the same lattice; callers only read
    return vectors_of_norm(dual_lattice(Lattice(gram, name=name)), mu_max)


def _multiplicities(crystal: CrystalGroup, mu_max) -> Dict[Fraction, int]:
    """d_mu for every realizable mu <= mu_max: the group average of twisted theta sums."""
    vectors = _dual_vectors(crystal.lattice.gram, parse_rational(mu_max), crystal.lattice.name)
    order = crystal.translation_denominator()
    phases: Dict[Fraction, Counter] = {mu: Counter() for mu in vectors}
    for element in crystal.group.elements:
        shift = [t * order for t in element.translation]
        fixes_all = element.is_translation()
        bt = element.linear.transpose()
        for mu, vecs in vectors.items():
            acc = phases[mu]
            for eta in vecs:
                if fixes_all or bt.apply(eta) == eta:
                    acc[int(sum(e * s for e, s in zip(eta, shift))) % order] += 1
    out: Dict[Fraction, int] = {}
    for mu, acc in phases.items():
        total = normalize_scalar(Cyclotomic.from_exponents(order, acc))
        if not isinstance(total, int) or total % crystal.order or total < 0:
            raise InternalConsistencyError(
                f"multiplicity of {mu} in {crystal.name} is {total}/{crystal.order}; is the group input valid?")
        if total:
            out[mu] = total // crystal.order
    return out


def eigenvalue_multiplicities(crystal: CrystalGroup, mus: Sequence) -> Dict[Fraction, int]:
    """d_mu for each requested mu from one enumeration of the dual lattice up to the largest."""
    wanted = [parse_rational(mu) for mu in mus]
    if not wanted:
        return {}
    table = _multiplicities(crystal, max(wanted))
    return {mu: table.get(mu, 0) for mu in wanted}


def eigenvalue_multiplicity(crystal: CrystalGroup, mu) -> int:
    mu = parse_rational(mu)
    return eigenvalue_multiplicities(crystal, [mu])[mu]


def flat_spectrum(crystal: CrystalGroup, mu_max=None) -> SpectrumSegment:
    """Eigenvalues in mu units (||v||^2 with v in the dual lattice); multiply by 4 pi^2 for Laplace units."""
    mu_max = parse_rational(settings.DEFAULT_CUTOFF_MU if mu_max is None else mu_max)
    mult = _multiplicities(crystal, mu_max)
    logger.info(f"✅ {crystal.name}: {len(mult)} eigenvalues with mu <= {mu_max}")
    return SpectrumSegment.from_pairs(((_rational(mu), m) for mu, m in mult.items()), _rational(mu_max), "mu")


def physical_units(segment: SpectrumSegment) -> SpectrumSegment:
    if segment.units != "mu":
        return segment
    return segment.scaled(4 * pi ** 2, "laplace")


# ==========================================
# 📍 Fixed sets on the torus
# ==========================================

@dataclass(frozen=True)
class FlatFixedSet:
    """Common fixed set of torus isometries: `components` parallel subtori of one dimension.

    In the coordinates y = V^-1 x the subtori are {y_i = const, i < rank} and the free
    coordinates y_rank.. span them; `points` are the constant parts, one per component.
    """
    dimension: Optional[int]
    components: int
    component_volume: Optional[Expr]
    rank: int = 0
    points: Tuple[Tuple[Fraction, ...], ...] = ()
    change: Optional[ExactMatrix] = field(default=None, repr=False)
    change_inverse: Optional[ExactMatrix] = field(default=None, repr=False)
    gram: Optional[ExactMatrix] = field(default=None, repr=False)

    @property
    def is_empty(self) -> bool:
        return self.components == 0

    def base_point(self, component: int) -> Tuple[Fraction, ...]:
        """A point of the component in lattice coordinates (free coordinates zero)."""
        y = list(self.points[component]) + [Fraction(0)] * (self.change.nrows - self.rank)
        return tuple(to_fraction(v) for v in self.change.apply(y))

    def component_of(self, point: Sequence) -> int:
        y = self.change_inverse.apply(point)
        key = tuple(_frac(v) for v in y[:self.rank])
        try:
            return self.points.index(key)
        except ValueError:
            raise InternalConsistencyError(f"point {point} is not on the fixed set") from None


EMPTY_FLAT = FlatFixedSet(None, 0, None)


def affine_fixed_set(elements, lattice: Lattice) -> FlatFixedSet:
    """Solve (B - I)x = -β mod Z^n for all given elements at once, via Smith normal form."""
    elements = [elements] if isinstance(elements, TorusElement) else list(elements)
    n = lattice.rank
    if any(e.dim != n for e in elements):
        raise InputParseError(f"elements do not act on a rank-{n} torus")
    elements = [e for e in elements if not e.is_identity()] or [TorusElement.identity(n)]
    ident = ExactMatrix.identity(n)
    a = ExactMatrix.vstack([e.linear - ident for e in elements], n)
    rhs = [-t for e in elements for t in e.translation]
    u, d, v = smith_normal_form(a)
    c = [to_fraction(x) for x in u.apply(rhs)]
    diag = [d.rows[i][i] for i in range(min(d.nrows, d.ncols))]
    rank = sum(1 for x in diag if x)
    if any(_frac(ci) != 0 for ci in c[rank:]):
        return EMPTY_FLAT
    # d_i y_i = c_i mod 1 has d_i solutions modulo 1
    points: List[Tuple[Fraction, ...]] = [()]
    for i in range(rank):
        points = [p + (_frac((c[i] + k) / diag[i]),) for p in points for k in range(diag[i])]
    v_inv = v.inverse()
    directions = v.submatrix(range(n), range(rank, n))
    gram = directions.transpose() @ lattice.gram @ directions if rank < n else ExactMatrix((), 0)
    volume = sqrt(_rational(to_fraction(gram.determinant()))) if rank < n else Integer(1)
    fixed = FlatFixedSet(n - rank, len(points), volume, rank, tuple(sorted(points)), v, v_inv, gram)
    for k in range(fixed.components):
        x = fixed.base_point(k)
        for e in elements:
            if any(_frac(a - b) for a, b in zip(e.apply(x), x)):
                raise InternalConsistencyError(f"computed fixed point {x} is moved by {e}")
    return fixed


def restrict_to_component(element: TorusElement, fixed: FlatFixedSet, component: int) -> TorusElement:
    """The induced isometry of one fixed subtorus, in its own lattice coordinates."""
    r, n = fixed.rank, fixed.change.nrows
    x0 = fixed.base_point(component)
    y = fixed.change_inverse.apply(element.apply(x0))
    if tuple(_frac(v) for v in y[:r]) != fixed.points[component]:
        raise InputParseError(f"{element} does not preserve component {component}")
    block = (fixed.change_inverse @ element.linear @ fixed.change).submatrix(range(r, n), range(r, n))
    return TorusElement(block, y[r:], check=False)


# ==========================================
# 🧩 Flat sectors
# ==========================================

@dataclass(frozen=True)
class ComponentOrbit:
    components: Tuple[int, ...]
    # the stabilizer's induced action on one subtorus; None for points
    quotient: Optional[CrystalGroup] = field(default=None, repr=False)
    stabilizer_order: int = 1


@dataclass(frozen=True)
class FlatSectorGeometry:
    fixed: FlatFixedSet
    orbits: Tuple[ComponentOrbit, ...]


def _component_orbits(group: FiniteMatrixGroup, c_idx: Sequence[int], fixed: FlatFixedSet) -> List[List[int]]:
    moves = {(h, k): fixed.component_of(group.elements[h].apply(fixed.base_point(k)))
             for h in c_idx for k in range(fixed.components)}
    seen, orbits = set(), []
    for k in range(fixed.components):
        if k in seen:
            continue
        orbit = sorted({moves[(h, k)] for h in c_idx})
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def _acts_trivially(element: TorusElement, fixed: FlatFixedSet) -> bool:
    for k in range(fixed.components):
        if fixed.component_of(element.apply(fixed.base_point(k))) != k:
            return False
        if fixed.dimension and not restrict_to_component(element, fixed, k).is_identity():
            return False
    return True


def _flat_sector(crystal: CrystalGroup, hc: HomClass) -> Optional[SectorDescriptor]:
    group = crystal.group
    images = hc.representative.images
    fixed = affine_fixed_set([group.elements[i] for i in images], crystal.lattice)
    if fixed.is_empty:
        return None
    c_idx = centralizer_indices(group, images)
    c_group = group.subgroup(c_idx, name=f"C{hc.label()}")
    sub_lattice = Lattice(fixed.gram, name=f"{crystal.lattice.name}|fix") if fixed.dimension else None
    orbits = []
    for orbit in _component_orbits(group, c_idx, fixed):
        rep = orbit[0]
        stab = [h for h in c_idx if fixed.component_of(group.elements[h].apply(fixed.base_point(rep))) == rep]
        quotient = None
        if sub_lattice is not None:
            restricted = [restrict_to_component(group.elements[h], fixed, rep) for h in stab]
            quotient = CrystalGroup(sub_lattice, list(dict.fromkeys(restricted)), name=f"{crystal.name}{hc.label()}")
        orbits.append(ComponentOrbit(tuple(orbit), quotient, len(stab)))
    kernel = [h for h in c_idx if _acts_trivially(group.elements[h], fixed)]
    eff_orders = [o.quotient.order if o.quotient is not None else 1 for o in orbits]
    heat = sum((fixed.component_volume / q for q in eff_orders), Integer(0))
    volume = fixed.component_volume * fixed.components / c_group.order
    descriptor = FixedSetDescriptor("flat", fixed.dimension, len(orbits), subspace_dim=fixed.dimension,
                                    note=f"{fixed.components} parallel subtori in the torus")
    return SectorDescriptor(
        hom_class=hc, fixed_set=descriptor, centralizer=c_group,
        effective_kernel=group.subgroup(kernel, name=f"K{hc.label()}"), is_nontwisted=hc.is_trivial(),
        m=len(orbits), centralizer_indices=tuple(c_idx), geometry=FlatSectorGeometry(fixed, tuple(orbits)),
        volume=volume, heat_coefficient=heat,
    )


def flat_sector_list(crystal: CrystalGroup, gamma: GroupPresentation,
                     budget: Optional[int] = None) -> List[SectorDescriptor]:
    sectors = [s for hc in hom_classes(gamma, crystal.group, budget) if (s := _flat_sector(crystal, hc))]
    sectors.sort(key=lambda s: (not s.is_nontwisted, s.hom_class.representative.images))
    if sum(1 for s in sectors if s.is_nontwisted) != 1:
        raise InternalConsistencyError("expected exactly one nontwisted flat sector")
    logger.info(f"✅ {crystal.name} / {gamma.name}: {len(sectors)} sectors, {sum(s.m for s in sectors)} components")
    return sectors


def flat_sector_spectrum(sector: SectorDescriptor, mu_max=None) -> SpectrumSegment:
    mu_max = parse_rational(settings.DEFAULT_CUTOFF_MU if mu_max is None else mu_max)
    geometry: FlatSectorGeometry = sector.geometry
    pairs = []
    for orbit in geometry.orbits:
        if orbit.quotient is None:
            pairs.append((0, 1))
        else:
            pairs.extend(flat_spectrum(orbit.quotient, mu_max).entries)
    return SpectrumSegment.from_pairs(pairs, _rational(mu_max), "mu")


# ==========================================
# 🧵 Singular-set fixtures
# ==========================================

def isotropy_group(tag: str) -> FiniteMatrixGroup:
    """"Z_k" (cyclic of order k) or "Z2xZ2"."""
    tag = tag.strip()
    if tag in ("Z2xZ2", "Z2^2", "V4"):
        return klein_four_group()
    if tag.startswith("Z_") and tag[2:].isdigit():
        return cyclic_group(int(tag[2:]), name=tag)
    raise InputParseError(f"unknown isotropy tag {tag!r} (expected Z_<k> or Z2xZ2)")


@dataclass(frozen=True)
class StratumRecord:
    """One family of singular strata: `count` copies, each a circle/interval (dimension 1) or a point."""
    dimension: int
    count: int
    isotropy: str
    length: Expr = Integer(1)
    action: str = "trivial"  # trivial: circle; reflection: mirrored interval of the given length
    absorb_cyclic: bool = False  # homs with cyclic image already appear as sectors of a neighbouring stratum
    label: str = ""

    def __post_init__(self):
        if self.dimension not in (0, 1):
            raise InputParseError(f"fixture strata must have dimension 0 or 1, got {self.dimension}")
        if self.count < 1:
            raise InputParseError("stratum count must be >= 1")
        if self.action not in ("trivial", "reflection"):
            raise InputParseError(f"unknown effective action {self.action!r}")
        if self.dimension == 1 and not sympify(self.length).is_positive:
            raise InputParseError(f"stratum length must be positive, got {self.length}")


@dataclass(frozen=True)
class SingularSetFixture:
    name: str
    dimension: int
    strata: Tuple[StratumRecord, ...]
    volume: Optional[Expr] = None
    note: str = ""


def circle_spectrum(length, action: str = "trivial", k_max: Optional[int] = None) -> SpectrumSegment:
    """Laplace spectrum of a circle of the given length, or of the interval it covers twice.

    trivial: (2 pi k / length)^2 with multiplicity 2 for k >= 1; reflection: the mirrored
    interval of half the length, cosine modes only.
    """
    k_max = settings.DEFAULT_CUTOFF_DEGREE if k_max is None else k_max
    length = sympify(length)
    if not length.is_positive:
        raise InputParseError(f"circle length must be positive, got {length}")
    if action not in ("trivial", "reflection"):
        raise InputParseError(f"unknown effective action {action!r}")
    mult = 2 if action == "trivial" else 1
    pairs = [(0, 1)] + [((2 * pi * k / length) ** 2, mult) for k in range(1, k_max + 1)]
    return SpectrumSegment.from_pairs(pairs, (2 * pi * k_max / length) ** 2, "laplace")


@dataclass(frozen=True)
class FixtureSectorGeometry:
    kind: str  # orbifold | circle | interval | point
    length: Optional[Expr] = None


def _trivial_class(dimension: int, generator_count: int) -> HomClass:
    group = FiniteMatrixGroup([SignedPerm.identity(dimension)], name="1")
    images = (0,) * generator_count
    return HomClass(Homomorphism(images, group), (images,), 1)


def fixture_sector_list(fixture: SingularSetFixture, gamma: GroupPresentation,
                        budget: Optional[int] = None) -> List[SectorDescriptor]:
    """Sectors read off the singular set: one per stratum copy and nontrivial class HOM(Γ, isotropy)."""
    trivial = _trivial_class(fixture.dimension, gamma.generator_count)
    one = trivial.representative.group
    sectors = [SectorDescriptor(
        hom_class=trivial, fixed_set=FixedSetDescriptor("flat", fixture.dimension, 1, subspace_dim=fixture.dimension,
                                                        note="nontwisted sector; no generators supplied"),
        centralizer=one, effective_kernel=one, is_nontwisted=True, m=1,
        geometry=FixtureSectorGeometry("orbifold"), volume=fixture.volume, heat_coefficient=fixture.volume,
        tag="(1)",
    )]
    for record in fixture.strata:
        iso = isotropy_group(record.isotropy)
        classes = [hc for hc in hom_classes(gamma, iso, budget) if not hc.is_trivial()]
        if record.absorb_cyclic:
            classes = [hc for hc in classes if not is_cyclic_subgroup(iso, subgroup_closure(iso, hc.representative.images))]
        if record.dimension == 0:
            kind = "point"
        else:
            kind = "circle" if record.action == "trivial" else "interval"
        length = Integer(0) if kind == "point" else sympify(record.length)
        for copy in range(record.count):
            for hc in classes:
                c_idx = centralizer_indices(iso, hc.representative.images)
                c_group = iso.subgroup(c_idx, name=f"C({record.isotropy})")
                heat = Integer(1) if kind == "point" else length
                sectors.append(SectorDescriptor(
                    hom_class=hc, fixed_set=FixedSetDescriptor(kind, record.dimension, 1, subspace_dim=record.dimension),
                    centralizer=c_group, effective_kernel=c_group,
                    is_nontwisted=False, m=1, centralizer_indices=tuple(c_idx),
                    geometry=FixtureSectorGeometry(kind, None if kind == "point" else length),
                    volume=heat / c_group.order, heat_coefficient=heat,
                    tag=f"{record.label or record.isotropy}[{copy + 1}] {hc.label()}",
                ))
    logger.info(f"✅ {fixture.name} / {gamma.name}: {len(sectors)} sectors")
    return sectors


def fixture_sector_spectrum(sector: SectorDescriptor, k_max: Optional[int] = None) -> SpectrumSegment:
    geometry: FixtureSectorGeometry = sector.geometry
    if geometry.kind == "orbifold":
        # nothing is known beyond connectedness
        return zero_only(1, cutoff=0)
    if geometry.kind == "point":
        return zero_only(1)
    if geometry.kind == "interval":
        return circle_spectrum(2 * geometry.length, "reflection", k_max)
    return circle_spectrum(geometry.length, "trivial", k_max)
