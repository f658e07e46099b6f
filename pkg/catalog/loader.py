"""
Read JSON input files, validate them with the pydantic schemas and build math-layer objects.
"""
import json
import logging
import os
import re
from fractions import Fraction
from typing import List, Tuple, Type, TypeVar

from pydantic import BaseModel, ValidationError
from sympy import sympify

from core.config import settings
from core.errors import BudgetExceeded, InputParseError
from core.exactnum import ExactMatrix, parse_rational
from core.finite_group import FiniteMatrixGroup, SignedPerm, element_from_matrix, generate_group
from core.flat_orbifold import CrystalGroup, Lattice, SingularSetFixture, StratumRecord, TorusElement, \
    find_isometry, isotropy_group, theta_series
from core.gamma_hom import GroupPresentation, parse_gamma
from core.orthogonal_action import Stratum
from catalog.models import CrystalModel, ElementModel, FixtureModel, FixturePairModel, GroupModel, \
    LatticeModel, LatticePairModel, PresentationModel, ScenarioModel, StrataPairModel

logger = logging.getLogger("Catalog")

M = TypeVar("M", bound=BaseModel)


# ==========================================
# 📂 Files
# ==========================================

def resolve_path(path: str) -> str:
    """Absolute paths and paths relative to the working directory win; otherwise look in the data dir."""
    if os.path.exists(path):
        return path
    for base in (settings.DATA_DIR, settings.SCENARIO_DIR):
        for candidate in (os.path.join(base, path), os.path.join(base, f"{path}.json")):
            if os.path.exists(candidate):
                return candidate
    raise InputParseError(f"file not found: {path}")


def load_model(path: str, model: Type[M]) -> M:
    path = resolve_path(path)
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise InputParseError(f"{path}: invalid JSON ({e})") from e
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        raise InputParseError(f"{path}: {e.error_count()} schema errors\n{e}") from e


# ==========================================
# 🧮 Groups and presentations
# ==========================================

def presentation_from_model(data: PresentationModel) -> GroupPresentation:
    return GroupPresentation(data.generators, tuple(tuple(w) for w in data.relators), "custom",
                             data.label or f"file({data.generators} gens)")


def load_gamma(text: str) -> GroupPresentation:
    """Short Γ names, or file:<path> for a presentation file."""
    if text.startswith("file:"):
        return presentation_from_model(load_model(text[len("file:"):], PresentationModel))
    return parse_gamma(text)


def element_from_model(data: ElementModel):
    if data.diagonal is not None:
        return SignedPerm.diagonal(data.diagonal)
    if data.images is not None:
        return SignedPerm(data.images, data.signs)
    if data.signed is not None:
        return SignedPerm([abs(x) - 1 for x in data.signed], [1 if x > 0 else -1 for x in data.signed])
    if data.cycles is not None:
        words = re.findall(r"\(([^)]*)\)", data.cycles)
        return SignedPerm.from_cycles(data.n, [tuple(int(x) for x in w.split()) for w in words])
    return element_from_matrix([[parse_rational(x) for x in row] for row in data.matrix])


def group_from_model(data: GroupModel) -> FiniteMatrixGroup:
    gens = [element_from_model(g) for g in data.generators]
    return generate_group(gens, cap=data.order_cap, name=data.name)


def load_group(path: str) -> FiniteMatrixGroup:
    return group_from_model(load_model(path, GroupModel))


# ==========================================
# 🔷 Lattices
# ==========================================

def lattice_from_model(data: LatticeModel) -> Lattice:
    gram = ExactMatrix([[parse_rational(x) for x in row] for row in data.gram])
    return Lattice(gram, name=data.name)


def validate_isospectral(first: Lattice, second: Lattice, mu_max=None) -> int:
    """Theta series agree up to mu_max; returns how many norms were compared."""
    mu_max = parse_rational(settings.THETA_CHECK_MU if mu_max is None else mu_max)
    a, b = theta_series(first, mu_max), theta_series(second, mu_max)
    if a != b:
        diff = min(mu for mu in set(a) | set(b) if a.get(mu, 0) != b.get(mu, 0))
        raise InputParseError(f"{first.name} and {second.name} are not isospectral: "
                              f"{a.get(diff, 0)} vs {b.get(diff, 0)} vectors of norm {diff}")
    logger.info(f"✅ theta series of {first.name} and {second.name} agree up to {mu_max}")
    return len(a)


def validate_not_isometric(first: Lattice, second: Lattice):
    """An isometric pair is isospectral for a trivial reason and is refused."""
    try:
        t = find_isometry(first, second)
    except BudgetExceeded as e:
        logger.warning(f"⚠️ could not decide whether {first.name} and {second.name} are isometric: {e}")
        return
    if t is not None:
        images = [list(map(str, col)) for col in zip(*t.rows)]
        raise InputParseError(f"{first.name} and {second.name} are isometric (basis images {images}); "
                              f"a non-isometric isospectral pair is needed")
    logger.info(f"✅ {first.name} and {second.name} are not isometric")


def load_lattice_pair(path: str, mu_max=None) -> Tuple[Lattice, Lattice, Fraction, str]:
    """Both lattices, the extension norm and the provenance note. The pair is validated at load."""
    data = load_model(path, LatticePairModel)
    first, second = lattice_from_model(data.first), lattice_from_model(data.second)
    if first.rank != second.rank:
        raise InputParseError(f"{data.name}: lattice ranks differ")
    validate_isospectral(first, second, mu_max)
    validate_not_isometric(first, second)
    return first, second, parse_rational(data.extension_norm), data.provenance


def crystal_from_model(data: CrystalModel) -> CrystalGroup:
    lattice = lattice_from_model(data.lattice)
    elements = [TorusElement(ExactMatrix(e.linear), [parse_rational(t) for t in e.translation])
                for e in data.elements]
    return CrystalGroup(lattice, elements, name=data.name)


def load_crystal(path: str) -> CrystalGroup:
    return crystal_from_model(load_model(path, CrystalModel))


# ==========================================
# 🧵 Fixtures and strata
# ==========================================

def fixture_from_model(data: FixtureModel) -> SingularSetFixture:
    strata = tuple(StratumRecord(s.dimension, s.count, s.isotropy, sympify(s.length), s.action,
                                 s.absorb_cyclic, s.label) for s in data.strata)
    volume = sympify(data.volume) if data.volume is not None else None
    return SingularSetFixture(data.name, data.dimension, strata, volume, data.note)


def load_fixture_pair(path: str) -> Tuple[SingularSetFixture, SingularSetFixture, str]:
    data = load_model(path, FixturePairModel)
    return fixture_from_model(data.first), fixture_from_model(data.second), data.source


def fixture_strata(fixture: SingularSetFixture) -> List[Stratum]:
    """Singular strata of a fixture in the form the stratum comparator reads."""
    out = []
    for record in fixture.strata:
        order = isotropy_group(record.isotropy).order
        out.append(Stratum(record.dimension, order, record.count, record.label or record.isotropy))
    return out


def load_scenario(path: str) -> ScenarioModel:
    return load_model(path, ScenarioModel)


def load_strata_pair(path: str) -> Tuple[List[Stratum], List[Stratum], str]:
    data = load_model(path, StrataPairModel)

    def build(records):
        return [Stratum(r.dimension, r.isotropy_order, r.count, r.label) for r in records]

    return build(data.first), build(data.second), data.source
