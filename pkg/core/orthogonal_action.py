"""
Linear actions on round spheres and on frame spaces, and their Γ-sectors.

A sector of the class (φ) is C_G(φ) acting on the fixed set M^<φ>. For the sphere S^(n-1)
the fixed set is the unit sphere of the common +1 eigenspace; for the frame space V(n, k)
of a diagonal +-1 group it is V(n', k) on the coordinates every image fixes.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Expr, Rational, gamma as gamma_fn, pi

from core.config import settings
from core.errors import InputParseError, InternalConsistencyError
from core.exactnum import ExactMatrix, Scalar, normalize_scalar
from core.finite_group import FiniteMatrixGroup, MatrixElement, SignedPerm
from core.gamma_hom import GroupPresentation, HomClass, builtin_gamma, hom_classes, subgroup_closure

logger = logging.getLogger("OrthogonalAction")


# ==========================================
# 🌐 Actions
# ==========================================

class _LinearAction:
    """A finite group together with the linear maps its elements act by."""

    def __init__(self, group: FiniteMatrixGroup, representation: Optional[Sequence] = None, name: str = ""):
        self.group = group
        self.name = name or group.name
        if representation is None:
            self._rep = None
        else:
            rep = list(representation)
            if len(rep) != group.order:
                raise InputParseError(f"representation has {len(rep)} images for a group of order {group.order}")
            if len({r.dim for r in rep}) != 1:
                raise InputParseError("representation images act in different dimensions")
            for a in group.generator_indices():
                for b in range(group.order):
                    if rep[a].compose(rep[b]) != rep[group.mul(a, b)]:
                        raise InputParseError("representation is not a homomorphism")
            self._rep = rep

    @property
    def n(self) -> int:
        return self.act(self.group.identity_index).dim

    def act(self, i: int):
        return self.group.elements[i] if self._rep is None else self._rep[i]

    def acting_elements(self, indices: Sequence[int]) -> list:
        return [self.act(i) for i in indices]

    def kernel(self) -> Tuple[int, ...]:
        """Elements acting as the identity."""
        return tuple(i for i in range(self.group.order) if self.act(i).is_identity())

    def is_effective(self) -> bool:
        return len(self.kernel()) == 1


class SphereAction(_LinearAction):
    """G acting linearly on the unit sphere S^(n-1) of R^n."""

    def __init__(self, group: FiniteMatrixGroup, representation: Optional[Sequence] = None, name: str = ""):
        super().__init__(group, representation, name)
        if self.n < 1:
            raise InputParseError("sphere actions need n >= 1")

    @property
    def sphere_dimension(self) -> int:
        return self.n - 1

    def __repr__(self):
        return f"SphereAction({self.name}, order={self.group.order}, S^{self.n - 1})"


class StiefelAction(_LinearAction):
    """A group of diagonal +-1 matrices acting on orthonormal k-frames in R^n."""

    def __init__(self, group: FiniteMatrixGroup, k: int, representation: Optional[Sequence] = None, name: str = ""):
        super().__init__(group, representation, name)
        if not 1 <= k <= self.n:
            raise InputParseError(f"frame size k={k} must satisfy 1 <= k <= n={self.n}")
        self.k = k
        self._diag = [diagonal_signs(self.act(i)) for i in range(group.order)]

    def signs(self, i: int) -> Tuple[int, ...]:
        return self._diag[i]

    @property
    def manifold_dimension(self) -> int:
        return self.n * self.k - self.k * (self.k + 1) // 2

    def __repr__(self):
        return f"StiefelAction({self.name}, order={self.group.order}, V({self.n},{self.k}))"


def diagonal_signs(element) -> Tuple[int, ...]:
    if isinstance(element, SignedPerm) and element.is_diagonal():
        return element.signs
    if isinstance(element, MatrixElement) and element.is_diagonal():
        diag = tuple(element.matrix.rows[i][i] for i in range(element.dim))
        if all(d in (1, -1) for d in diag):
            return diag
    raise InputParseError(f"frame-space actions need diagonal +-1 elements, got {element!r}")


# ==========================================
# 📐 Fixed subspaces
# ==========================================

@dataclass(frozen=True)
class FixedSpace:
    """Basis of a common +1 eigenspace. `signed` bases have disjoint supports with +-1 entries."""
    n: int
    basis: Tuple[Tuple[Scalar, ...], ...]
    signed: bool

    @property
    def dim(self) -> int:
        return len(self.basis)


def _signed_fixed_space(n: int, elements: Sequence[SignedPerm]) -> FixedSpace:
    # x is fixed iff x[images[j]] = signs[j] * x[j]; walk each orbit and propagate the signs
    value: List[Optional[int]] = [None] * n
    basis = []
    for start in range(n):
        if value[start] is not None:
            continue
        value[start] = 1
        orbit, stack, consistent = [start], [start], True
        while stack:
            j = stack.pop()
            for g in elements:
                dst, want = g.images[j], g.signs[j] * value[j]
                if value[dst] is None:
                    value[dst] = want
                    orbit.append(dst)
                    stack.append(dst)
                elif value[dst] != want:
                    consistent = False
        if consistent:
            vec = [0] * n
            for j in orbit:
                vec[j] = value[j]
            basis.append(tuple(vec))
    return FixedSpace(n, tuple(basis), True)


def fixed_space(elements: Sequence, n: Optional[int] = None) -> FixedSpace:
    elements = list(elements)
    if not elements:
        if n is None:
            raise InputParseError("fixed_space of no elements needs the dimension")
        return FixedSpace(n, tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n)), True)
    dims = {e.dim for e in elements}
    if len(dims) > 1 or (n is not None and dims != {n}):
        raise InputParseError(f"dimension mismatch: {sorted(dims)}")
    size = dims.pop()
    if all(isinstance(e, SignedPerm) for e in elements):
        return _signed_fixed_space(size, elements)
    ident = ExactMatrix.identity(size)
    stacked = ExactMatrix.vstack([e.to_matrix() - ident for e in elements], size)
    return FixedSpace(size, tuple(stacked.nullspace()), False)


def _move(element: SignedPerm, vec: Sequence[int]) -> Tuple[int, ...]:
    out = [0] * len(vec)
    for j, x in enumerate(vec):
        if x:
            out[element.images[j]] = element.signs[j] * x
    return tuple(out)


def restrict(element, space: FixedSpace):
    """The map an element induces on an invariant subspace, in the subspace basis."""
    d = space.dim
    if space.signed and isinstance(element, SignedPerm):
        where = {}
        for k, vec in enumerate(space.basis):
            for j, x in enumerate(vec):
                if x:
                    where[j] = k
        images, signs = [0] * d, [1] * d
        for k, vec in enumerate(space.basis):
            moved = _move(element, vec)
            j = next(j for j, x in enumerate(moved) if x)
            l = where.get(j)
            if l is None:
                raise InputParseError("subspace is not invariant under the restricted element")
            s = moved[j] * space.basis[l][j]
            if moved != tuple(s * x for x in space.basis[l]):
                raise InputParseError("subspace is not invariant under the restricted element")
            images[k], signs[k] = l, s
        return SignedPerm(images, signs)
    if d == 0:
        return MatrixElement(ExactMatrix((), 0), check=False)
    b = ExactMatrix(space.basis).transpose()
    mb = element.to_matrix() @ b
    bstar = b.conjugate_transpose()
    r = (bstar @ b).inverse() @ (bstar @ mb)
    if b @ r != mb:
        raise InputParseError("subspace is not invariant under the restricted element")
    return MatrixElement(r, check=False)


def restricted_group(elements: Sequence, space: FixedSpace, name: str = "") -> Tuple[FiniteMatrixGroup, List[int]]:
    """Distinct restrictions as a group, plus the position of each input element's image."""
    images = [restrict(e, space) for e in elements]
    distinct: Dict[object, int] = {}
    for r in images:
        distinct.setdefault(r, len(distinct))
    group = FiniteMatrixGroup(list(distinct), name=name)
    return group, [group.index[r] for r in images]


def effective_kernel(centralizer_group: FiniteMatrixGroup, basis: FixedSpace,
                     acting: Optional[Sequence] = None) -> FiniteMatrixGroup:
    """Centralizer elements restricting to the identity on the span of `basis`."""
    acting = list(centralizer_group.elements) if acting is None else list(acting)
    keep = [i for i, e in enumerate(acting) if restrict(e, basis).is_identity()]
    return centralizer_group.subgroup(keep, name=f"K({centralizer_group.name})")


# ==========================================
# 🧾 Descriptors
# ==========================================

@dataclass(frozen=True)
class FixedSetDescriptor:
    kind: str  # empty | sphere | stiefel | flat | circle | interval | point
    manifold_dimension: Optional[int]
    component_count: int
    subspace_dim: int = 0
    frame_size: Optional[int] = None
    flagged: bool = False
    note: str = ""

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    def invariant(self) -> tuple:
        return self.kind, self.manifold_dimension, self.subspace_dim, self.component_count

    def describe(self) -> str:
        if self.kind == "empty":
            return "empty"
        if self.kind == "sphere":
            return f"S^{self.manifold_dimension}"
        if self.kind == "stiefel":
            return f"V({self.subspace_dim},{self.frame_size})"
        if self.kind in ("circle", "interval", "point"):
            return self.kind
        return f"T^{self.manifold_dimension}" if self.manifold_dimension else "point"


EMPTY = FixedSetDescriptor("empty", None, 0)


@dataclass(frozen=True)
class SectorDescriptor:
    hom_class: HomClass
    fixed_set: FixedSetDescriptor
    centralizer: FiniteMatrixGroup
    effective_kernel: FiniteMatrixGroup
    is_nontwisted: bool
    m: int
    centralizer_indices: Tuple[int, ...] = ()
    # the centralizer's induced action on the fixed set, as a faithful group
    restricted: Optional[FiniteMatrixGroup] = field(default=None, repr=False)
    space: Optional[FixedSpace] = field(default=None, repr=False)
    geometry: object = field(default=None, repr=False)
    volume: Optional[Expr] = None
    heat_coefficient: Optional[Expr] = None
    tag: str = ""

    @property
    def label(self) -> str:
        return self.tag or self.hom_class.label()

    @property
    def dimension(self) -> Optional[int]:
        return self.fixed_set.manifold_dimension


def sphere_volume(d: int) -> Expr:
    """Volume of the unit sphere S^(d-1) in R^d; S^0 counts its two points."""
    if d < 1:
        raise InputParseError(f"no unit sphere in R^{d}")
    return 2 * pi ** Rational(d, 2) / gamma_fn(Rational(d, 2))


# ==========================================
# 🎯 Sphere sectors
# ==========================================

def _sphere_sector(action: SphereAction, hc: HomClass) -> Optional[SectorDescriptor]:
    group = action.group
    images = hc.representative.images
    space = fixed_space(action.acting_elements(images), action.n)
    d = space.dim
    if d == 0:
        return None
    c_idx = centralizer_indices(group, images)
    c_group = group.subgroup(c_idx, name=f"C{hc.label()}")
    acting = action.acting_elements(c_idx)
    eff, where = restricted_group(acting, space, name=f"eff{hc.label()}")
    kernel = c_group.subgroup([i for i, w in enumerate(where) if w == eff.identity_index],
                              name=f"K{hc.label()}")
    if d == 1:
        flips = any(not r.is_identity() for r in eff.elements)
        m = 1 if flips else 2
        fixed = FixedSetDescriptor("sphere", 0, m, subspace_dim=1)
    else:
        m = 1
        fixed = FixedSetDescriptor("sphere", d - 1, 1, subspace_dim=d)
    vol = sphere_volume(d)
    return SectorDescriptor(
        hom_class=hc, fixed_set=fixed, centralizer=c_group, effective_kernel=kernel,
        is_nontwisted=hc.is_trivial(), m=m, centralizer_indices=tuple(c_idx), restricted=eff, space=space,
        volume=vol / c_group.order, heat_coefficient=vol / eff.order,
    )


def centralizer_indices(group: FiniteMatrixGroup, images: Sequence[int]) -> List[int]:
    return [g for g in range(group.order) if all(group.mul(g, s) == group.mul(s, g) for s in images)]


def sphere_fixed_set(action: SphereAction, hom) -> FixedSetDescriptor:
    images = hom.images
    space = fixed_space(action.acting_elements(images), action.n)
    if space.dim == 0:
        return EMPTY
    if space.dim >= 2:
        return FixedSetDescriptor("sphere", space.dim - 1, 1, subspace_dim=space.dim)
    c_idx = centralizer_indices(action.group, images)
    flips = any(not restrict(action.act(g), space).is_identity() for g in c_idx)
    return FixedSetDescriptor("sphere", 0, 1 if flips else 2, subspace_dim=1)


# ==========================================
# 🧭 Frame-space sectors
# ==========================================

def _stiefel_fixed(action: StiefelAction, images: Sequence[int]) -> Tuple[FixedSetDescriptor, Tuple[int, ...], List[int]]:
    coords = tuple(j for j in range(action.n) if all(action.signs(i)[j] == 1 for i in images))
    n1, k = len(coords), action.k
    if n1 < k:
        return EMPTY, coords, []
    c_idx = centralizer_indices(action.group, images)
    dim = n1 * k - k * (k + 1) // 2
    if n1 > k:
        return FixedSetDescriptor("stiefel", dim, 1, subspace_dim=n1, frame_size=k), coords, c_idx
    # V(k, k) = O(k) has two components; a determinant -1 restriction swaps them
    swaps = any(_restricted_det(action.signs(g), coords) == -1 for g in c_idx)
    fixed = FixedSetDescriptor("stiefel", dim, 1 if swaps else 2, subspace_dim=n1, frame_size=k, flagged=True,
                               note="frames spanning the fixed subspace: components counted by orientation")
    return fixed, coords, c_idx


def _restricted_det(signs: Sequence[int], coords: Sequence[int]) -> int:
    det = 1
    for j in coords:
        det *= signs[j]
    return det


def stiefel_fixed_set(action: StiefelAction, hom) -> FixedSetDescriptor:
    return _stiefel_fixed(action, hom.images)[0]


def _stiefel_sector(action: StiefelAction, hc: HomClass) -> Optional[SectorDescriptor]:
    group = action.group
    fixed, coords, c_idx = _stiefel_fixed(action, hc.representative.images)
    if fixed.is_empty:
        return None
    c_group = group.subgroup(c_idx, name=f"C{hc.label()}")
    restricted = [SignedPerm.diagonal([action.signs(g)[j] for j in coords]) for g in c_idx]
    eff = FiniteMatrixGroup(list(dict.fromkeys(restricted)), name=f"eff{hc.label()}")
    kernel = c_group.subgroup([i for i, r in enumerate(restricted) if r.is_identity()], name=f"K{hc.label()}")
    return SectorDescriptor(
        hom_class=hc, fixed_set=fixed, centralizer=c_group, effective_kernel=kernel,
        is_nontwisted=hc.is_trivial(), m=fixed.component_count, centralizer_indices=tuple(c_idx),
        restricted=eff, geometry=coords,
    )


# ==========================================
# 📋 Sector lists
# ==========================================

def sector_list(action, gamma: GroupPresentation, budget: Optional[int] = None) -> List[SectorDescriptor]:
    """One descriptor per hom class with nonempty fixed set; the nontwisted sector comes first."""
    if isinstance(action, StiefelAction):
        build = _stiefel_sector
    elif isinstance(action, SphereAction):
        build = _sphere_sector
    else:
        raise InputParseError(f"sector_list expects a sphere or frame-space action, got {type(action).__name__}")
    sectors = []
    for hc in hom_classes(gamma, action.group, budget):
        s = build(action, hc)
        if s is not None:
            sectors.append(s)
    sectors.sort(key=lambda s: (not s.is_nontwisted, s.hom_class.representative.images))
    nontwisted = [s for s in sectors if s.is_nontwisted]
    if len(nontwisted) != 1:
        raise InternalConsistencyError(f"expected exactly one nontwisted sector, found {len(nontwisted)}")
    total = sum(s.m for s in sectors)
    logger.info(f"✅ {action.name} / {gamma.name}: {len(sectors)} sectors, {total} components")
    return sectors


def total_components(sectors: Sequence[SectorDescriptor]) -> int:
    return sum(s.m for s in sectors)


def is_manifold(action) -> bool:
    """True iff the Z-sectors reduce to the nontwisted one."""
    return len(sector_list(action, builtin_gamma("Z"))) == 1


# ==========================================
# 🪞 Isometric copies
# ==========================================

def _normalizing_permutations(action, max_dim: int) -> List[SignedPerm]:
    n = action.n
    acting = {action.act(i) for i in range(action.group.order)}
    if n > max_dim or not all(isinstance(e, SignedPerm) for e in acting):
        return []
    gens = [action.act(i) for i in action.group.generator_indices()]
    found = []
    for perm in itertools.permutations(range(n)):
        p = SignedPerm(perm)
        p_inv = p.inverse()
        if all(p.compose(g).compose(p_inv) in acting for g in gens):
            found.append(p)
    return found


def group_isometric_sectors(action, sectors: Sequence[SectorDescriptor],
                            max_dim: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Partition sector positions into isometric copies.

    Sectors with the same image subgroup are copies of one another; distinct image subgroups are
    identified by a coordinate permutation normalizing the group (searched only in small dimension).
    """
    max_dim = settings.ISOMETRY_SEARCH_MAX_DIM if max_dim is None else max_dim
    group = action.group
    by_image: Dict[Tuple[int, ...], List[int]] = {}
    for pos, s in enumerate(sectors):
        key = subgroup_closure(group, s.hom_class.representative.images)
        by_image.setdefault(key, []).append(pos)
    keys = list(by_image)
    parent = list(range(len(keys)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    perms = _normalizing_permutations(action, max_dim) if len(keys) > 1 else []
    acting_sets = [frozenset(action.act(i) for i in key) for key in keys]
    invariants = [sectors[by_image[key][0]].fixed_set.invariant() for key in keys]
    for a, b in itertools.combinations(range(len(keys)), 2):
        if find(a) == find(b) or invariants[a] != invariants[b] or len(acting_sets[a]) != len(acting_sets[b]):
            continue
        for p in perms:
            p_inv = p.inverse()
            if frozenset(p.compose(x).compose(p_inv) for x in acting_sets[a]) == acting_sets[b]:
                parent[find(b)] = find(a)
                break
    groups: Dict[int, List[int]] = {}
    for k, key in enumerate(keys):
        groups.setdefault(find(k), []).extend(by_image[key])
    return sorted(tuple(sorted(g)) for g in groups.values())


# ==========================================
# 🧱 Singular strata of sphere actions
# ==========================================

@dataclass(frozen=True)
class Stratum:
    dimension: int
    isotropy_order: int
    count: int = 1
    label: str = ""


def sphere_strata(action: SphereAction) -> List[Stratum]:
    """Strata of the singular set in S^(n-1)/G: one per isotropy subgroup larger than the kernel."""
    group = action.group
    n = action.n
    kernel = frozenset(action.kernel())

    def stabilizer(space: FixedSpace) -> frozenset:
        out = []
        for g in range(group.order):
            e = action.act(g)
            if all(_apply(e, v) == v for v in space.basis):
                out.append(g)
        return frozenset(out)

    found: Dict[frozenset, int] = {}
    queue = []
    for g in range(group.order):
        if g in kernel:
            continue
        space = fixed_space([action.act(g)], n)
        if space.dim:
            s = stabilizer(space)
            if s not in found:
                found[s] = space.dim
                queue.append(s)
    while queue:
        s = queue.pop()
        for g in range(group.order):
            if g in s:
                continue
            space = fixed_space(action.acting_elements(sorted(s | {g})), n)
            if space.dim:
                t = stabilizer(space)
                if t not in found:
                    found[t] = space.dim
                    queue.append(t)
    strata = [Stratum(d - 1, len(s), label=f"|G_x| = {len(s)}") for s, d in found.items() if s != kernel]
    return sorted(strata, key=lambda x: (x.dimension, x.isotropy_order))


def _apply(element, vec: Sequence[Scalar]) -> Tuple[Scalar, ...]:
    if isinstance(element, SignedPerm):
        out: List[Scalar] = [0] * len(vec)
        for j, (i, s) in enumerate(zip(element.images, element.signs)):
            out[i] = normalize_scalar(s * vec[j])
        return tuple(out)
    return element.to_matrix().apply(vec)


