"""
Sunada-type checks: almost conjugacy of subgroups, and certificates that two quotients of the
same space are Γ-isospectral because their sectors pair off into Sunada pairs.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from core.errors import InputParseError
from core.exactnum import normalize_scalar
from core.finite_group import AlmostConjugacyVerdict, AmbientClassInvariant, FiniteMatrixGroup, SignedPerm, \
    compare_invariant_counts, find_conjugator, generate_group, is_almost_conjugate
from core.flat_orbifold import CrystalGroup, flat_sector_list
from core.gamma_hom import GroupPresentation
from core.orthogonal_action import SectorDescriptor, SphereAction, StiefelAction, restrict, sector_list

logger = logging.getLogger("Sunada")

CERTIFIED = "certified"
FAILED = "failed"
INCONCLUSIVE = "inconclusive"

NOT_CONVERSE = "a failed certificate does not imply that the quotients are not Γ-isospectral"
SPHERE_PROXY = "centralizers compared inside the orthogonal group of the fixed subspace (characteristic polynomials)"
FLAT_PROXY = "flat centralizers compared by the linear parts of their induced subtorus isometries only"


# ==========================================
# 🧪 Sunada triples
# ==========================================

@dataclass(frozen=True)
class SunadaTriple:
    invariant: AmbientClassInvariant
    h1: FiniteMatrixGroup
    h2: FiniteMatrixGroup

    def __post_init__(self):
        if self.h1.n != self.h2.n:
            raise InputParseError(f"subgroups act in different dimensions: {self.h1.n} vs {self.h2.n}")


@dataclass(frozen=True)
class SunadaVerdict:
    almost_conjugate: AlmostConjugacyVerdict
    # None when the ambient group is only known through characteristic polynomials
    conjugate: Optional[bool] = None
    conjugator: Optional[int] = None

    def __bool__(self):
        return bool(self.almost_conjugate)

    def describe(self) -> str:
        if not self.almost_conjugate:
            return "not almost conjugate"
        if self.conjugate is None:
            return "almost conjugate"
        return "conjugate (the quotients are isometric)" if self.conjugate else "almost conjugate but not conjugate"


def check_sunada(triple: SunadaTriple) -> SunadaVerdict:
    verdict = is_almost_conjugate(triple.invariant, triple.h1, triple.h2)
    conjugate, witness = None, None
    if triple.invariant.mode == "finite_ambient" and verdict:
        witness = find_conjugator(triple.invariant.ambient, triple.h1, triple.h2)
        conjugate = witness is not None
    result = SunadaVerdict(verdict, conjugate, witness)
    logger.info(f"🔧 {triple.h1.name} vs {triple.h2.name}: {result.describe()}")
    return result


# ==========================================
# 📜 Γ-isospectrality certificates
# ==========================================

@dataclass(frozen=True)
class SectorPairing:
    label_1: str
    label_2: Optional[str]
    fixed_set: str
    centralizers: Optional[AlmostConjugacyVerdict] = None
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.label_2 is not None and bool(self.centralizers)


@dataclass(frozen=True)
class GammaCertificate:
    gamma: str
    pairings: Tuple[SectorPairing, ...]
    status: str
    reason: str = ""
    metadata: Dict[str, str] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def describe(self) -> str:
        if self.certified:
            return f"certified: {len(self.pairings)} sector pairs"
        return f"{self.status}: {self.reason}"


def _model(action) -> tuple:
    if isinstance(action, StiefelAction):
        return "stiefel", action.n, action.k
    if isinstance(action, SphereAction):
        return "sphere", action.n
    if isinstance(action, CrystalGroup):
        return "flat", action.lattice.rank
    raise InputParseError(f"no certificate support for {type(action).__name__}")


def _linear_counts(action, sector: SectorDescriptor) -> Counter:
    """Characteristic polynomials of the centralizer acting on the fixed subspace, with multiplicity."""
    if isinstance(action, StiefelAction):
        coords = sector.geometry
        restricted = [SignedPerm.diagonal([action.signs(g)[j] for j in coords]) for g in sector.centralizer_indices]
    else:
        restricted = [restrict(action.act(g), sector.space) for g in sector.centralizer_indices]
    return Counter(tuple(normalize_scalar(c) for c in r.det_one_minus_t()) for r in restricted)


def _flat_counts(sector: SectorDescriptor) -> Counter:
    counts: Counter = Counter()
    for orbit in sector.geometry.orbits:
        linear = Counter(tuple(e.det_one_minus_t()) for e in orbit.quotient.group.elements) if orbit.quotient else Counter()
        counts[(len(orbit.components), orbit.stabilizer_order, tuple(sorted(linear.items())))] += 1
    return counts


def _sectors(action, gamma: GroupPresentation, budget: Optional[int]) -> List[SectorDescriptor]:
    if isinstance(action, CrystalGroup):
        return flat_sector_list(action, gamma, budget)
    return sector_list(action, gamma, budget)


def certify_gamma_isospectral(action_1, action_2, gamma: GroupPresentation,
                              budget: Optional[int] = None) -> GammaCertificate:
    """Pair the sectors of two quotients of one model space and test each pair for almost conjugacy.

    Sectors are bucketed by fixed-set type (kind, dimension, component count) and matched greedily
    inside each bucket; a pair passes when the centralizers restricted to the fixed subspaces are
    almost conjugate there.
    """
    model = _model(action_1)
    if model != _model(action_2):
        raise InputParseError(f"actions live on different model spaces: {model} vs {_model(action_2)}")
    flat = model[0] == "flat"
    sectors_1 = _sectors(action_1, gamma, budget)
    sectors_2 = _sectors(action_2, gamma, budget)
    invariant = AmbientClassInvariant.orthogonal()

    def counts(action, s):
        return _flat_counts(s) if flat else _linear_counts(action, s)

    buckets: Dict[tuple, List[SectorDescriptor]] = {}
    for s in sectors_2:
        buckets.setdefault(s.fixed_set.invariant(), []).append(s)
    pairings: List[SectorPairing] = []
    for s1 in sectors_1:
        candidates = buckets.get(s1.fixed_set.invariant(), [])
        shape = s1.fixed_set.describe()
        if not candidates:
            pairings.append(SectorPairing(s1.label, None, shape, reason="no sector with the same fixed-set type"))
            continue
        c1 = counts(action_1, s1)
        chosen, verdict = None, None
        for s2 in candidates:
            if flat:
                c2 = counts(action_2, s2)
                trial = AlmostConjugacyVerdict(c1 == c2, "flat_linear", ())
            else:
                trial = compare_invariant_counts(invariant, c1, counts(action_2, s2))
            if trial or verdict is None:
                chosen, verdict = s2, trial
            if trial:
                break
        candidates.remove(chosen)
        reason = "" if verdict else "centralizer actions on the fixed sets are not almost conjugate"
        pairings.append(SectorPairing(s1.label, chosen.label, shape, verdict, reason))
    leftovers = [s for rest in buckets.values() for s in rest]
    for s2 in leftovers:
        pairings.append(SectorPairing(s2.label, None, s2.fixed_set.describe(),
                                      reason=f"sector {s2.label} of the second quotient is unmatched"))

    failures = [p for p in pairings if not p.passed]
    metadata = {"proxy": FLAT_PROXY if flat else SPHERE_PROXY}
    if failures:
        first = failures[0]
        reason = f"{first.label_1}: {first.reason}; {NOT_CONVERSE}"
        status = FAILED
    elif flat:
        status, reason = INCONCLUSIVE, f"all sector pairs agree; {FLAT_PROXY}"
    else:
        status, reason = CERTIFIED, ""
    certificate = GammaCertificate(gamma.name, tuple(pairings), status, reason, metadata)
    icon = "✅" if certificate.certified else "⚠️"
    logger.info(f"{icon} Γ = {gamma.name} certificate: {certificate.describe()}")
    return certificate


def conjugate_action(action: SphereAction, conjugator: SignedPerm, name: str = "") -> SphereAction:
    """The action of g H g^-1 for a coordinate change g."""
    inv = conjugator.inverse()
    images = [conjugator.compose(action.act(i)).compose(inv) for i in range(action.group.order)]
    gens = [images[i] for i in action.group.generator_indices()]
    group = generate_group(gens, cap=action.group.order, name=name or f"g{action.group.name}g^-1")
    return SphereAction(group, name=group.name)
