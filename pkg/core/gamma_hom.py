"""
Finitely presented Γ and the index set HOM(Γ, G)/G of the sector decomposition.

Words are tuples of signed generator numbers: (1, 2, -1, -2) is the commutator a b a^-1 b^-1.
Homomorphisms are stored as tuples of element indices of the target group.
"""
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from core.config import settings
from core.errors import BudgetExceeded, InputParseError, InternalConsistencyError
from core.finite_group import FiniteMatrixGroup, SignedPerm, conjugacy_classes, direct_product, generate_group

logger = logging.getLogger("GammaHom")

Word = Tuple[int, ...]

GAMMA_KINDS = ("trivial", "Z", "Z^l", "F_l", "Z_p", "dihedral", "custom")


# ==========================================
# 📜 Presentations
# ==========================================

@dataclass(frozen=True)
class GroupPresentation:
    generator_count: int
    relators: Tuple[Word, ...] = ()
    kind: str = "custom"
    label: str = ""

    def __post_init__(self):
        if self.kind not in GAMMA_KINDS:
            raise InputParseError(f"unknown presentation kind {self.kind!r}")
        if self.generator_count < 0:
            raise InputParseError("generator count must be >= 0")
        for word in self.relators:
            if not word:
                raise InputParseError("empty relator: every relator needs at least one generator")
            bad = [x for x in word if x == 0 or abs(x) > self.generator_count]
            if bad:
                raise InputParseError(f"relator {word} uses generators outside 1..{self.generator_count}")

    @property
    def name(self) -> str:
        return self.label or f"<{self.generator_count} | {len(self.relators)} relators>"


def commutator(i: int, j: int) -> Word:
    return (i, j, -i, -j)


def builtin_gamma(kind: str, parameter: Optional[int] = None) -> GroupPresentation:
    """trivial, Z, Z^l, F_l, Z_p and dihedral(2k) = <a, b | a^k, b^2, (ab)^2>."""
    if kind == "trivial":
        return GroupPresentation(0, (), "trivial", "1")
    if kind == "Z":
        return GroupPresentation(1, (), "Z", "Z")
    if parameter is None:
        raise InputParseError(f"presentation kind {kind!r} needs a parameter")
    if kind == "Z^l":
        if parameter < 1:
            raise InputParseError(f"rank of Z^l must be >= 1, got {parameter}")
        rels = tuple(commutator(i, j) for i in range(1, parameter + 1) for j in range(i + 1, parameter + 1))
        return GroupPresentation(parameter, rels, "Z^l", f"Z^{parameter}")
    if kind == "F_l":
        if parameter < 1:
            raise InputParseError(f"rank of F_l must be >= 1, got {parameter}")
        return GroupPresentation(parameter, (), "F_l", f"F{parameter}")
    if kind == "Z_p":
        if parameter < 2:
            raise InputParseError(f"cyclic order must be >= 2, got {parameter}")
        return GroupPresentation(1, ((1,) * parameter,), "Z_p", f"Z_{parameter}")
    if kind == "dihedral":
        if parameter < 2:
            raise InputParseError(f"dihedral parameter k must be >= 2, got {parameter}")
        rels = ((1,) * parameter, (2, 2), (1, 2, 1, 2))
        return GroupPresentation(2, rels, "dihedral", f"D{2 * parameter}")
    raise InputParseError(f"unknown presentation kind {kind!r}")


_GAMMA_PATTERNS = [
    (re.compile(r"^(1|trivial)$"), lambda m: builtin_gamma("trivial")),
    (re.compile(r"^Z$"), lambda m: builtin_gamma("Z")),
    (re.compile(r"^Z\^(\d+)$"), lambda m: builtin_gamma("Z^l", int(m.group(1)))),
    (re.compile(r"^F_?(\d+)$"), lambda m: builtin_gamma("F_l", int(m.group(1)))),
    (re.compile(r"^Z_?p:(\d+)$"), lambda m: builtin_gamma("Z_p", int(m.group(1)))),
    (re.compile(r"^Z_(\d+)$"), lambda m: builtin_gamma("Z_p", int(m.group(1)))),
    (re.compile(r"^D:?(\d+)$"), lambda m: builtin_gamma("dihedral", int(m.group(1)))),
]


def parse_gamma(text: str) -> GroupPresentation:
    """Short names used on the command line: Z, Z^2, F2, Zp:5, D:3 (dihedral of order 6)."""
    text = text.strip()
    for pattern, build in _GAMMA_PATTERNS:
        m = pattern.match(text)
        if m:
            return build(m)
    raise InputParseError(f"cannot parse Γ spec {text!r} (expected Z, Z^<l>, F<l>, Zp:<p>, D:<k> or file:<path>)")


# ==========================================
# 🔗 Homomorphisms
# ==========================================

@dataclass(frozen=True)
class Homomorphism:
    images: Tuple[int, ...]
    group: FiniteMatrixGroup = field(compare=False, repr=False, hash=False)

    def elements(self) -> list:
        return [self.group.elements[i] for i in self.images]

    def is_trivial(self) -> bool:
        return all(i == self.group.identity_index for i in self.images)

    def image_subgroup(self) -> Tuple[int, ...]:
        return subgroup_closure(self.group, self.images)


def evaluate_word(group: FiniteMatrixGroup, images: Sequence[int], word: Word) -> int:
    x = group.identity_index
    for letter in word:
        g = images[abs(letter) - 1]
        x = group.mul(x, g if letter > 0 else group.inv(g))
    return x


def satisfies_relators(presentation: GroupPresentation, group: FiniteMatrixGroup, images: Sequence[int]) -> bool:
    return all(evaluate_word(group, images, w) == group.identity_index for w in presentation.relators)


def subgroup_closure(group: FiniteMatrixGroup, indices: Sequence[int]) -> Tuple[int, ...]:
    """Sorted indices of the subgroup generated by `indices`."""
    seen = {group.identity_index}
    queue = deque([group.identity_index])
    gens = sorted(set(indices))
    while queue:
        x = queue.popleft()
        for g in gens:
            y = group.mul(x, g)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return tuple(sorted(seen))


def is_cyclic_subgroup(group: FiniteMatrixGroup, members: Sequence[int]) -> bool:
    return any(group.element_order(x) == len(members) for x in members)


def enumerate_homs(presentation: GroupPresentation, group: FiniteMatrixGroup,
                   budget: Optional[int] = None) -> List[Homomorphism]:
    """All image tuples satisfying the relators, in lexicographic index order.

    Relators are checked as soon as every generator they mention is assigned.
    For Z^l the candidates for generator i+1 are drawn from the centralizer of images 1..i.
    """
    budget = settings.HOM_BUDGET if budget is None else budget
    r = presentation.generator_count
    if r == 0:
        return [Homomorphism((), group)]

    due: Dict[int, List[Word]] = {}
    for w in presentation.relators:
        due.setdefault(max(abs(x) for x in w) - 1, []).append(w)
    commuting = presentation.kind == "Z^l"
    explored = 0
    out: List[Homomorphism] = []
    images = [0] * r

    def extend(depth: int, candidates: Sequence[int]):
        nonlocal explored
        for g in candidates:
            explored += 1
            if explored > budget:
                raise BudgetExceeded(f"HOM({presentation.name}, {group.name}) exceeds the budget of {budget} candidates",
                                     explored=explored)
            images[depth] = g
            if not commuting and any(evaluate_word(group, images, w) != group.identity_index
                                     for w in due.get(depth, ())):
                continue
            if depth + 1 == r:
                out.append(Homomorphism(tuple(images), group))
            elif commuting:
                extend(depth + 1, [x for x in candidates if group.mul(x, g) == group.mul(g, x)])
            else:
                extend(depth + 1, range(group.order))

    extend(0, range(group.order))
    logger.debug(f"🔧 |HOM({presentation.name}, {group.name})| = {len(out)} ({explored} candidates)")
    return out


# ==========================================
# 🔁 Classes under simultaneous conjugation
# ==========================================

@dataclass(frozen=True)
class HomClass:
    representative: Homomorphism
    orbit: Tuple[Tuple[int, ...], ...]
    stabilizer_order: int

    @property
    def size(self) -> int:
        return len(self.orbit)

    def is_trivial(self) -> bool:
        return self.representative.is_trivial()

    def label(self) -> str:
        group = self.representative.group
        if self.is_trivial():
            return "(1)"
        return "(" + ", ".join(f"#{i}" for i in self.representative.images) + f") in {group.name or 'G'}"


def hom_classes(presentation: GroupPresentation, group: FiniteMatrixGroup,
                budget: Optional[int] = None) -> List[HomClass]:
    homs = enumerate_homs(presentation, group, budget)
    gens = group.generator_indices()
    assigned = set()
    classes = []
    for h in homs:
        if h.images in assigned:
            continue
        orbit = {h.images}
        queue = deque([h.images])
        while queue:
            t = queue.popleft()
            for g in gens:
                u = tuple(group.conj(g, x) for x in t)
                if u not in orbit:
                    orbit.add(u)
                    queue.append(u)
        assigned |= orbit
        members = tuple(sorted(orbit))
        if group.order % len(members):
            raise InternalConsistencyError(f"orbit of size {len(members)} does not divide |G| = {group.order}")
        # homs arrive in lexicographic order, so h is the least tuple of its orbit
        classes.append(HomClass(h, members, group.order // len(members)))
    logger.debug(f"🔧 {len(classes)} classes in HOM({presentation.name}, {group.name})/G")
    return classes


# ==========================================
# ✖️ Products and quotients
# ==========================================

@dataclass(frozen=True)
class ProductClassCount:
    count: int
    factor_counts: Tuple[int, ...]
    cross_checked: bool


def product_class_count(presentation: GroupPresentation, factors: Sequence[FiniteMatrixGroup],
                        cross_check_limit: Optional[int] = None, budget: Optional[int] = None) -> ProductClassCount:
    """|HOM(Γ, A x B)/(A x B)| as the product of the factor counts."""
    limit = settings.PRODUCT_CROSS_CHECK_LIMIT if cross_check_limit is None else cross_check_limit
    if len(factors) < 2:
        raise InputParseError("product_class_count needs an explicit list of at least two factors")
    counts = tuple(
        len(conjugacy_classes(f)) if presentation.kind == "Z" else len(hom_classes(presentation, f, budget))
        for f in factors
    )
    total = 1
    order = 1
    for c, f in zip(counts, factors):
        total *= c
        order *= f.order
    checked = False
    if order <= limit:
        product = factors[0]
        for f in factors[1:]:
            product = direct_product(product, f)
        direct = len(hom_classes(presentation, product, budget))
        if direct != total:
            raise InternalConsistencyError(f"factorwise class count {total} != direct count {direct}")
        checked = True
    logger.info(f"✅ product class count {' x '.join(map(str, counts))} = {total} (cross-checked: {checked})")
    return ProductClassCount(total, counts, checked)


def quotient_group(group: FiniteMatrixGroup, kernel: Sequence[int],
                   name: str = "") -> Tuple[FiniteMatrixGroup, List[int]]:
    """G/K as the regular permutation action on cosets, plus the index map rho: G -> G/K."""
    kset = set(kernel)
    for k in kset:
        for g in group.generator_indices():
            if group.conj(g, k) not in kset:
                raise InputParseError("kernel subgroup is not normal")
    coset_of: Dict[int, int] = {}
    cosets: List[Tuple[int, ...]] = []
    for g in range(group.order):
        if g in coset_of:
            continue
        members = tuple(sorted(group.mul(g, k) for k in kset))
        for x in members:
            coset_of[x] = len(cosets)
        cosets.append(members)

    def image(g: int) -> SignedPerm:
        return SignedPerm([coset_of[group.mul(g, c[0])] for c in cosets])

    gens = [image(g) for g in group.generator_indices()]
    q = generate_group(gens, n=len(cosets), name=name or f"{group.name}/K")
    rho = [q.index[image(g)] for g in range(group.order)]
    return q, rho


@dataclass(frozen=True)
class QuotientClassMap:
    mapping: Tuple[int, ...]  # class index in G -> class index in G/K
    source_count: int
    target_count: int

    @property
    def surjective(self) -> bool:
        return set(self.mapping) == set(range(self.target_count))


def quotient_class_map(presentation: GroupPresentation, group: FiniteMatrixGroup, kernel: Sequence[int],
                       budget: Optional[int] = None) -> QuotientClassMap:
    """Composition with G -> G/K on hom classes."""
    q, rho = quotient_group(group, kernel)
    target = hom_classes(presentation, q, budget)
    where = {t: k for k, cls in enumerate(target) for t in cls.orbit}
    source = hom_classes(presentation, group, budget)
    mapping = []
    for cls in source:
        pushed = tuple(rho[i] for i in cls.representative.images)
        if pushed not in where:
            raise InternalConsistencyError(f"pushed-forward tuple {pushed} is not a homomorphism into G/K")
        mapping.append(where[pushed])
    return QuotientClassMap(tuple(mapping), len(source), len(target))
