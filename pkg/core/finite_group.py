"""
Finite groups of exact orthogonal transformations.

Elements come in two flavours that share one small protocol
(compose / inverse / identity_like / is_identity / dim / det_one_minus_t):

* SignedPerm    - e_j -> sign_j * e_{images_j}; covers permutations and diagonal +-1 matrices
* MatrixElement - any exact orthogonal (or unitary cyclotomic) matrix

Groups are enumerated completely; elements are addressed by their index in generation order.
"""
import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from core.config import settings
from core.errors import GroupTooLarge, InputParseError
from core.exactnum import ExactMatrix, Scalar, normalize_scalar

logger = logging.getLogger("FiniteGroup")


# ==========================================
# 🧩 Elements
# ==========================================

class SignedPerm:
    __slots__ = ("images", "signs", "_hash")

    def __init__(self, images: Sequence[int], signs: Optional[Sequence[int]] = None):
        images = tuple(images)
        signs = tuple(signs) if signs is not None else (1,) * len(images)
        if sorted(images) != list(range(len(images))):
            raise InputParseError(f"permutation images are not a bijection: {images}")
        if len(signs) != len(images) or any(s not in (1, -1) for s in signs):
            raise InputParseError(f"signs must be +1/-1, one per point: {signs}")
        self.images = images
        self.signs = signs
        self._hash = hash((images, signs))

    @classmethod
    def _trusted(cls, images: Tuple[int, ...], signs: Tuple[int, ...]) -> "SignedPerm":
        # products and inverses of valid elements skip re-validation
        obj = object.__new__(cls)
        obj.images = images
        obj.signs = signs
        obj._hash = hash((images, signs))
        return obj

    @classmethod
    def identity(cls, n: int) -> "SignedPerm":
        return cls(range(n))

    @classmethod
    def diagonal(cls, signs: Sequence[int]) -> "SignedPerm":
        return cls(range(len(signs)), signs)

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "SignedPerm":
        """Cycles on points 1..n, e.g. [(1, 2, 3), (4, 5)]."""
        images = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
                if not (1 <= a <= n and 1 <= b <= n):
                    raise InputParseError(f"cycle point out of range 1..{n}: {cyc}")
                images[a - 1] = b - 1
        return cls(images)

    @property
    def dim(self) -> int:
        return len(self.images)

    def identity_like(self) -> "SignedPerm":
        return SignedPerm.identity(self.dim)

    def is_identity(self) -> bool:
        return all(i == j for j, i in enumerate(self.images)) and all(s == 1 for s in self.signs)

    def is_diagonal(self) -> bool:
        return all(i == j for j, i in enumerate(self.images))

    def compose(self, other: "SignedPerm") -> "SignedPerm":
        """Matrix product self @ other."""
        if not isinstance(other, SignedPerm):
            return MatrixElement(self.to_matrix(), check=False).compose(other)
        mi, ms = self.images, self.signs
        return SignedPerm._trusted(tuple(mi[k] for k in other.images),
                                   tuple(s * ms[k] for k, s in zip(other.images, other.signs)))

    def inverse(self) -> "SignedPerm":
        inv_images = [0] * self.dim
        inv_signs = [1] * self.dim
        for j, (i, s) in enumerate(zip(self.images, self.signs)):
            inv_images[i] = j
            inv_signs[i] = s
        return SignedPerm._trusted(tuple(inv_images), tuple(inv_signs))

    def to_matrix(self) -> ExactMatrix:
        rows = [[0] * self.dim for _ in range(self.dim)]
        for j, (i, s) in enumerate(zip(self.images, self.signs)):
            rows[i][j] = s
        return ExactMatrix(rows, self.dim)

    def cycles(self) -> List[Tuple[int, int]]:
        """(length, product of signs) for every cycle of the underlying permutation."""
        seen = [False] * self.dim
        out = []
        for start in range(self.dim):
            if seen[start]:
                continue
            length, sign, j = 0, 1, start
            while not seen[j]:
                seen[j] = True
                sign *= self.signs[j]
                j = self.images[j]
                length += 1
            out.append((length, sign))
        return out

    def det_one_minus_t(self) -> Tuple[int, ...]:
        # each cycle of length L with sign product s contributes (1 - s t^L)
        poly = [1]
        for length, sign in self.cycles():
            nxt = poly + [0] * length
            for k, c in enumerate(poly):
                nxt[k + length] -= sign * c
            poly = nxt
        return tuple(poly)

    def __eq__(self, other):
        if isinstance(other, SignedPerm):
            return self.images == other.images and self.signs == other.signs
        if isinstance(other, MatrixElement):
            return self.to_matrix() == other.matrix
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __repr__(self):
        words = [("-" if s < 0 else "") + str(i + 1) for i, s in zip(self.images, self.signs)]
        return f"SignedPerm([{', '.join(words)}])"


class MatrixElement:
    __slots__ = ("matrix", "_hash")

    def __init__(self, matrix: ExactMatrix, check: bool = True):
        if not matrix.is_square():
            raise InputParseError(f"group elements must be square, got {matrix.nrows}x{matrix.ncols}")
        if check and not matrix.is_orthogonal():
            raise InputParseError(f"matrix is not orthogonal: {matrix}")
        self.matrix = matrix
        self._hash = None

    @property
    def dim(self) -> int:
        return self.matrix.nrows

    def identity_like(self) -> "MatrixElement":
        return MatrixElement(ExactMatrix.identity(self.dim), check=False)

    def is_identity(self) -> bool:
        return self.matrix == ExactMatrix.identity(self.dim)

    def is_diagonal(self) -> bool:
        return self.matrix.is_diagonal()

    def compose(self, other) -> "MatrixElement":
        other_m = other.matrix if isinstance(other, MatrixElement) else other.to_matrix()
        return MatrixElement(self.matrix @ other_m, check=False)

    def inverse(self) -> "MatrixElement":
        return MatrixElement(self.matrix.conjugate_transpose(), check=False)

    def to_matrix(self) -> ExactMatrix:
        return self.matrix

    def det_one_minus_t(self) -> Tuple[Scalar, ...]:
        return self.matrix.det_one_minus_t()

    def __eq__(self, other):
        if isinstance(other, MatrixElement):
            return self.matrix == other.matrix
        if isinstance(other, SignedPerm):
            return self.matrix == other.to_matrix()
        return NotImplemented

    def __hash__(self):
        # equal SignedPerms must land in the same bucket
        if self._hash is None:
            form = _signed_form(self.matrix)
            self._hash = hash(form) if form is not None else hash(self.matrix)
        return self._hash

    def __repr__(self):
        return f"MatrixElement({self.matrix!r})"


def _signed_form(m: ExactMatrix) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """(images, signs) when m is a signed permutation matrix."""
    if not m.is_square() or not m.is_integral():
        return None
    images, signs = [0] * m.nrows, [1] * m.nrows
    for j in range(m.ncols):
        col = [(i, x) for i, x in enumerate(m.column(j)) if x != 0]
        if len(col) != 1 or col[0][1] not in (1, -1):
            return None
        images[j], signs[j] = col[0]
    if sorted(images) != list(range(m.nrows)):
        return None
    return tuple(images), tuple(signs)


def element_from_matrix(rows) -> "SignedPerm | MatrixElement":
    """Prefer the signed-permutation form whenever the matrix has one."""
    m = rows if isinstance(rows, ExactMatrix) else ExactMatrix(rows)
    form = _signed_form(m)
    return SignedPerm(*form) if form is not None else MatrixElement(m)


# ==========================================
# 👥 Groups
# ==========================================

class FiniteMatrixGroup:
    """Fully enumerated finite group; elements in generation order."""

    def __init__(self, elements: Sequence, generators: Sequence = (), name: str = ""):
        self.elements = tuple(elements)
        self.index: Dict[object, int] = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise InputParseError("group element list has duplicates")
        self.generators = tuple(generators)
        self.name = name
        ident = [i for i, e in enumerate(self.elements) if e.is_identity()]
        if len(ident) != 1:
            raise InputParseError("element list must contain the identity exactly once")
        self.identity_index = ident[0]
        self._mul: Dict[Tuple[int, int], int] = {}
        self._inv: Dict[int, int] = {}
        self._class_of: Optional[List[int]] = None

    # --- basics ---
    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def n(self) -> int:
        return self.elements[0].dim

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, element) -> bool:
        return element in self.index

    def __repr__(self):
        return f"FiniteMatrixGroup({self.name or '?'}, order={self.order}, n={self.n})"

    def locate(self, element) -> int:
        try:
            return self.index[element]
        except KeyError:
            raise InputParseError(f"{element!r} is not an element of {self.name or 'the group'}") from None

    def mul(self, i: int, j: int) -> int:
        key = (i, j)
        r = self._mul.get(key)
        if r is None:
            r = self.index[self.elements[i].compose(self.elements[j])]
            self._mul[key] = r
        return r

    def inv(self, i: int) -> int:
        r = self._inv.get(i)
        if r is None:
            r = self.index[self.elements[i].inverse()]
            self._inv[i] = r
        return r

    def conj(self, g: int, x: int) -> int:
        """Index of g x g^-1."""
        return self.mul(self.mul(g, x), self.inv(g))

    def generator_indices(self) -> List[int]:
        gens = [self.index[g] for g in self.generators if g in self.index]
        # subgroups built from index sets carry no generators; every element generates then
        return gens or list(range(self.order))

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity_index:
            x = self.mul(x, i)
            k += 1
        return k

    def is_abelian(self) -> bool:
        gens = self.generator_indices()
        return all(self.mul(a, b) == self.mul(b, a) for a in gens for b in gens)

    def subgroup(self, indices: Iterable[int], name: str = "") -> "FiniteMatrixGroup":
        keep = sorted(set(indices))
        return FiniteMatrixGroup([self.elements[i] for i in keep], name=name or f"sub({self.name})")

    def class_map(self) -> List[int]:
        """class_map()[i] = position of the conjugacy class of element i in conjugacy_classes(self)."""
        if self._class_of is None:
            self._class_of = [0] * self.order
            for k, cls in enumerate(conjugacy_classes(self)):
                for i in cls.members:
                    self._class_of[i] = k
        return self._class_of


def generate_group(generators: Sequence, cap: Optional[int] = None, n: int = 0,
                   name: str = "") -> FiniteMatrixGroup:
    """Breadth-first closure under right multiplication by the generators."""
    cap = settings.GROUP_ORDER_CAP if cap is None else cap
    gens = list(generators)
    dims = {g.dim for g in gens}
    if len(dims) > 1:
        raise InputParseError(f"generators act in different dimensions: {sorted(dims)}")
    ident = gens[0].identity_like() if gens else SignedPerm.identity(n)
    elements = [ident]
    seen = {ident}
    i = 0
    while i < len(elements):
        x = elements[i]
        for g in gens:
            y = x.compose(g)
            if y not in seen:
                seen.add(y)
                elements.append(y)
                if len(elements) > cap:
                    raise GroupTooLarge(f"group {name or ''} exceeds the order cap {cap}", explored=len(elements))
        i += 1
    logger.debug(f"🔧 generated {name or 'group'} of order {len(elements)}")
    return FiniteMatrixGroup(elements, gens, name=name)


# ==========================================
# 🔁 Conjugacy
# ==========================================

@dataclass(frozen=True)
class ConjugacyClass:
    representative: int
    members: Tuple[int, ...]
    # conjugator[k] sends the representative to members[k]
    conjugators: Tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __len__(self):
        return len(self.members)


def conjugacy_classes(group: FiniteMatrixGroup) -> List[ConjugacyClass]:
    """Orbit partition under conjugation, found by walking generator conjugations."""
    gens = group.generator_indices()
    assigned = [False] * group.order
    classes = []
    for start in range(group.order):
        if assigned[start]:
            continue
        witness = {start: group.identity_index}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = group.conj(g, x)
                if y not in witness:
                    witness[y] = group.mul(g, witness[x])
                    queue.append(y)
        members = tuple(sorted(witness))
        for m in members:
            assigned[m] = True
        classes.append(ConjugacyClass(start, members, tuple(witness[m] for m in members)))
    return classes


def centralizer(group: FiniteMatrixGroup, subset: Iterable[int], name: str = "") -> FiniteMatrixGroup:
    """Subgroup commuting with every element of `subset` (given as indices)."""
    subset = list(subset)
    bad = [s for s in subset if not (0 <= s < group.order)]
    if bad:
        raise InputParseError(f"indices {bad} are not elements of {group.name or 'the group'}")
    keep = [g for g in range(group.order) if all(group.mul(g, s) == group.mul(s, g) for s in subset)]
    return group.subgroup(keep, name=name or f"C({group.name})")


def centralizer_of_elements(group: FiniteMatrixGroup, elements: Iterable) -> FiniteMatrixGroup:
    return centralizer(group, [group.locate(e) for e in elements])


def find_conjugator(ambient: FiniteMatrixGroup, h1: FiniteMatrixGroup, h2: FiniteMatrixGroup) -> Optional[int]:
    """Some g in the ambient group with g H1 g^-1 = H2, or None."""
    if h1.order != h2.order:
        return None
    idx1 = [ambient.locate(e) for e in h1.elements]
    target = {ambient.locate(e) for e in h2.elements}
    for g in range(ambient.order):
        if {ambient.conj(g, x) for x in idx1} == target:
            return g
    return None


# ==========================================
# 🧪 Almost conjugacy
# ==========================================

def poly_label(coeffs: Sequence[Scalar]) -> str:
    """det(I - tM) coefficients rendered as the characteristic polynomial in x."""
    n = len(coeffs) - 1
    terms = []
    for j, c in enumerate(coeffs):
        c = normalize_scalar(c)
        if c == 0:
            continue
        power = n - j
        mono = "" if power == 0 else ("x" if power == 1 else f"x^{power}")
        if hasattr(c, "to_sympy"):
            coef = f"({c.to_sympy()})"
        else:
            coef = str(c)
        if mono and coef in ("1", "-1"):
            coef = coef[:-1]
        terms.append(f"{coef}{mono}" if mono else coef)
    return " + ".join(terms).replace("+ -", "- ") or "0"


@dataclass(frozen=True)
class AmbientClassInvariant:
    """finite_ambient: conjugacy class in a finite ambient group; orthogonal_ambient: characteristic polynomial."""
    mode: str
    ambient: Optional[FiniteMatrixGroup] = None

    def __post_init__(self):
        if self.mode not in ("finite_ambient", "orthogonal_ambient"):
            raise InputParseError(f"unknown ambient mode {self.mode!r}")
        if self.mode == "finite_ambient" and self.ambient is None:
            raise InputParseError("finite_ambient mode needs an ambient group")

    @classmethod
    def orthogonal(cls) -> "AmbientClassInvariant":
        return cls("orthogonal_ambient")

    @classmethod
    def finite(cls, ambient: FiniteMatrixGroup) -> "AmbientClassInvariant":
        return cls("finite_ambient", ambient)

    def of(self, element):
        if self.mode == "orthogonal_ambient":
            return tuple(normalize_scalar(c) for c in element.det_one_minus_t())
        return self.ambient.class_map()[self.ambient.locate(element)]

    def label(self, value) -> str:
        if self.mode == "orthogonal_ambient":
            return poly_label(value)
        rep = conjugacy_classes(self.ambient)[value].representative
        return f"class {value} (rep #{rep})"


@dataclass(frozen=True)
class AlmostConjugacyVerdict:
    result: bool
    mode: str
    # (invariant label, count in H1, count in H2), sorted by label
    table: Tuple[Tuple[str, int, int], ...]

    def __bool__(self):
        return self.result


def invariant_counts(inv: AmbientClassInvariant, elements: Iterable) -> Counter:
    return Counter(inv.of(e) for e in elements)


def compare_invariant_counts(inv: AmbientClassInvariant, c1: Counter, c2: Counter) -> AlmostConjugacyVerdict:
    keys = set(c1) | set(c2)
    table = tuple(sorted((inv.label(k), c1.get(k, 0), c2.get(k, 0)) for k in keys))
    return AlmostConjugacyVerdict(all(a == b for _, a, b in table), inv.mode, table)


def is_almost_conjugate(inv: AmbientClassInvariant, h1: FiniteMatrixGroup,
                        h2: FiniteMatrixGroup) -> AlmostConjugacyVerdict:
    if h1.n != h2.n:
        raise InputParseError(f"subgroups act in different dimensions: {h1.n} vs {h2.n}")
    return compare_invariant_counts(inv, invariant_counts(inv, h1.elements), invariant_counts(inv, h2.elements))


# ==========================================
# ✖️ Direct products
# ==========================================

def direct_product(a: FiniteMatrixGroup, b: FiniteMatrixGroup, name: str = "") -> FiniteMatrixGroup:
    """A x B acting on the disjoint union of the two point sets (signed permutations only)."""
    if not all(isinstance(e, SignedPerm) for e in a.elements + b.elements):
        raise InputParseError("direct products are built for signed-permutation groups only")
    na, nb = a.n, b.n

    def pair(x: SignedPerm, y: SignedPerm) -> SignedPerm:
        return SignedPerm(x.images + tuple(na + k for k in y.images), x.signs + y.signs)

    ida, idb = a.elements[a.identity_index], b.elements[b.identity_index]
    gens = [pair(g, idb) for g in a.generators] + [pair(ida, g) for g in b.generators]
    if not a.generators or not b.generators:
        gens = [pair(g, idb) for g in a.elements] + [pair(ida, g) for g in b.elements]
    return generate_group(gens, cap=a.order * b.order, n=na + nb, name=name or f"{a.name}x{b.name}")


# ==========================================
# 📦 Small standard groups
# ==========================================

def cyclic_group(k: int, name: str = "") -> FiniteMatrixGroup:
    """Z_k in its regular permutation representation."""
    if k < 1:
        raise InputParseError(f"cyclic order must be >= 1, got {k}")
    return generate_group([SignedPerm([(j + 1) % k for j in range(k)])], cap=k, n=k, name=name or f"Z{k}")


def klein_four_group(name: str = "Z2xZ2") -> FiniteMatrixGroup:
    """Rotations by pi about two orthogonal axes of R^3."""
    gens = [SignedPerm.diagonal((1, -1, -1)), SignedPerm.diagonal((-1, 1, -1))]
    return generate_group(gens, cap=4, name=name)
