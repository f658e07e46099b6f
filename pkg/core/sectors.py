"""
Γ-spectra: the union, with multiplicity, of the spectra of all Γ-sectors.

Sector lists come from the model-specific modules (spheres, frame spaces, tori, singular-set
fixtures); this module merges their spectra under a common certified cutoff, compares them,
and evaluates heat traces and their leading small-time coefficients.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
from sympy import Expr, Integer, oo, pi, sympify

from core.errors import InputParseError, InternalConsistencyError, UnsupportedSector
from core.flat_orbifold import CrystalGroup, SingularSetFixture, fixture_sector_list, fixture_sector_spectrum, \
    flat_sector_list, flat_sector_spectrum
from core.gamma_hom import GroupPresentation
from core.orthogonal_action import SectorDescriptor, SphereAction, StiefelAction, Stratum, sector_list, \
    total_components
from core.sphere_spectrum import SpectrumSegment, eigen_key, sector_spectrum, zero_only

logger = logging.getLogger("Sectors")

MANIFOLD = "manifold"


# ==========================================
# 🗂️ Dispatch
# ==========================================

def decompose(orbifold, gamma: GroupPresentation, budget: Optional[int] = None) -> List[SectorDescriptor]:
    """Γ-sectors of any supported model: sphere, frame space, crystal group or singular-set fixture."""
    if isinstance(orbifold, (SphereAction, StiefelAction)):
        return sector_list(orbifold, gamma, budget)
    if isinstance(orbifold, CrystalGroup):
        return flat_sector_list(orbifold, gamma, budget)
    if isinstance(orbifold, SingularSetFixture):
        return fixture_sector_list(orbifold, gamma, budget)
    raise InputParseError(f"cannot decompose {type(orbifold).__name__} into sectors")


def _sector_segment(orbifold, sector: SectorDescriptor, k_max: Optional[int], mu_max) -> SpectrumSegment:
    if isinstance(orbifold, SphereAction):
        return sector_spectrum(sector, k_max)
    if isinstance(orbifold, CrystalGroup):
        return flat_sector_spectrum(sector, mu_max)
    if isinstance(orbifold, SingularSetFixture):
        segment = fixture_sector_spectrum(sector, k_max)
        if sector.is_nontwisted:
            raise UnsupportedSector(f"{orbifold.name}: the nontwisted sector has no generators to compute from")
        return segment
    raise UnsupportedSector(f"no spectrum support for {sector.fixed_set.describe()} sectors")


# ==========================================
# 📊 Γ-spectra
# ==========================================

@dataclass(frozen=True)
class SectorContribution:
    label: str
    m: int
    dimension: Optional[int]
    is_nontwisted: bool
    segment: SpectrumSegment
    supported: bool = True
    note: str = ""


def _merge(segments: Sequence[SpectrumSegment]) -> SpectrumSegment:
    units = {s.units for s in segments if s.units is not None}
    if len(units) > 1:
        raise InputParseError(f"cannot merge spectra in different units: {sorted(units)}")
    cutoff = min((s.cutoff for s in segments), key=eigen_key, default=oo)
    pairs = [pair for s in segments for pair in s.truncate(cutoff).entries]
    return SpectrumSegment.from_pairs(pairs, cutoff, units.pop() if units else None)


@dataclass(frozen=True)
class GammaSpectrum:
    """Per-sector segments and their union below the smallest sector cutoff."""
    orbifold: str
    gamma: str
    contributions: Tuple[SectorContribution, ...]
    merged: SpectrumSegment

    @property
    def cutoff(self) -> Expr:
        return self.merged.cutoff

    @property
    def degraded(self) -> bool:
        return any(not c.supported for c in self.contributions)

    def component_count(self) -> int:
        return sum(c.m for c in self.contributions)

    def twisted(self) -> SpectrumSegment:
        return _merge([c.segment for c in self.contributions if not c.is_nontwisted] or [zero_only(0)])

    def nontwisted(self) -> SpectrumSegment:
        return next(c.segment for c in self.contributions if c.is_nontwisted)

    def provenance(self, ev) -> List[Tuple[str, int]]:
        ev = sympify(ev)
        out = []
        for c in self.contributions:
            m = next((m for e, m in c.segment.entries if e == ev), 0)
            if m:
                out.append((c.label, m))
        return out

    def verify(self):
        """Union consistency and the zero-multiplicity count; raises on violation."""
        for ev, mult in self.merged.entries:
            if sum(m for _, m in self.provenance(ev)) != mult:
                raise InternalConsistencyError(f"merged multiplicity of {ev} differs from the sector sum")
        if self.merged.multiplicity(0) != self.component_count():
            raise InternalConsistencyError(
                f"multiplicity of 0 is {self.merged.multiplicity(0)}, sectors have {self.component_count()} components")


def gamma_spectrum(orbifold, gamma: GroupPresentation, k_max: Optional[int] = None, mu_max=None,
                   budget: Optional[int] = None, sectors: Optional[Sequence[SectorDescriptor]] = None,
                   name: str = "") -> GammaSpectrum:
    """Union of the sector spectra. Unsupported sectors contribute (0, m) certified only at 0."""
    sectors = decompose(orbifold, gamma, budget) if sectors is None else list(sectors)
    contributions = []
    for s in sectors:
        try:
            segment, supported, note = _sector_segment(orbifold, s, k_max, mu_max), True, ""
        except UnsupportedSector as e:
            segment, supported, note = zero_only(s.m, cutoff=0), False, str(e)
            logger.warning(f"⚠️ {s.label}: {e}")
        contributions.append(SectorContribution(s.label, s.m, s.dimension, s.is_nontwisted, segment, supported, note))
    merged = _merge([c.segment for c in contributions])
    label = name or getattr(orbifold, "name", type(orbifold).__name__)
    result = GammaSpectrum(label, gamma.name, tuple(contributions), merged)
    if merged.multiplicity(0) != total_components(sectors):
        raise InternalConsistencyError(f"{label}: zero multiplicity does not match the sector components")
    logger.info(f"✅ Spec_{gamma.name}({label}) up to {merged.cutoff}: {len(merged.entries)} distinct eigenvalues")
    return result


def zero_multiplicity(spectrum: GammaSpectrum) -> int:
    return spectrum.merged.multiplicity(0)


# ==========================================
# ⚖️ Comparison
# ==========================================

@dataclass(frozen=True)
class SpectrumComparison:
    equal: bool
    cutoff: Expr
    eigenvalue: Optional[Expr] = None
    multiplicity_a: int = 0
    multiplicity_b: int = 0

    def describe(self) -> str:
        if self.equal:
            return f"equal up to {self.cutoff}"
        return f"first disagreement at eigenvalue {self.eigenvalue} ({self.multiplicity_a} vs {self.multiplicity_b})"


def compare_segments(a: SpectrumSegment, b: SpectrumSegment) -> SpectrumComparison:
    if a.units and b.units and a.units != b.units:
        raise InputParseError(f"spectra in different units ({a.units} vs {b.units}) are not comparable")
    cutoff = min(a.cutoff, b.cutoff, key=eigen_key)
    ma = dict(a.truncate(cutoff).entries)
    mb = dict(b.truncate(cutoff).entries)
    for ev in sorted(set(ma) | set(mb), key=eigen_key):
        if ma.get(ev, 0) != mb.get(ev, 0):
            return SpectrumComparison(False, cutoff, ev, ma.get(ev, 0), mb.get(ev, 0))
    return SpectrumComparison(True, cutoff)


def compare_gamma_spectra(a: GammaSpectrum, b: GammaSpectrum) -> SpectrumComparison:
    """Equality below the common cutoff, or the first eigenvalue whose multiplicities differ."""
    verdict = compare_segments(a.merged, b.merged)
    logger.info(f"🔧 {a.orbifold} vs {b.orbifold} ({a.gamma}): {verdict.describe()}")
    return verdict


# ==========================================
# 🔥 Heat traces
# ==========================================

@dataclass(frozen=True)
class HeatTraceValue:
    value: mpmath.mpf
    terms: int
    truncated: bool
    last_term: mpmath.mpf


def _physical(ev: Expr, units: Optional[str]) -> Expr:
    return ev * 4 * pi ** 2 if units == "mu" else ev


def _mpf(x) -> mpmath.mpf:
    return mpmath.mpf(str(sympify(x).evalf(mpmath.mp.dps + 5)))


def heat_trace(spectrum: Union[GammaSpectrum, SpectrumSegment], t) -> HeatTraceValue:
    """Partial sum of m exp(-lambda t) over the known segment (Laplace units)."""
    segment = spectrum.merged if isinstance(spectrum, GammaSpectrum) else spectrum
    t = _mpf(t)
    if t <= 0:
        raise InputParseError(f"heat trace needs t > 0, got {t}")
    total, last = mpmath.mpf(0), mpmath.mpf(0)
    for ev, m in segment.entries:
        last = m * mpmath.exp(-_mpf(_physical(ev, segment.units)) * t)
        total += last
    return HeatTraceValue(total, segment.total_multiplicity(), not segment.is_complete, last)


@dataclass(frozen=True)
class HeatTraceExpansion:
    """Leading small-time terms: sum over d of c_d (4 pi t)^(-d/2), grouped by sector dimension."""
    terms: Tuple[Tuple[int, Expr], ...]  # (dimension, heat coefficient), highest dimension first
    volumes: Tuple[Tuple[int, Expr], ...]  # same grouping, orbifold volumes (vol(O_eff)/|K|)
    unknown: Tuple[str, ...] = ()

    def coefficient(self, dimension: int) -> Expr:
        return next((c for d, c in self.terms if d == dimension), Integer(0))

    def volume(self, dimension: int) -> Expr:
        return next((v for d, v in self.volumes if d == dimension), Integer(0))

    def top(self) -> Tuple[int, Expr]:
        if not self.terms:
            raise InputParseError("no sector with known volume")
        return self.terms[0]

    def evaluate(self, t) -> mpmath.mpf:
        t = _mpf(t)
        return sum((_mpf(c) * (4 * mpmath.pi * t) ** (-mpmath.mpf(d) / 2) for d, c in self.terms), mpmath.mpf(0))


def leading_asymptotics(sectors: Sequence[SectorDescriptor], twisted_only: bool = False) -> HeatTraceExpansion:
    heat: Dict[int, Expr] = {}
    vols: Dict[int, Expr] = {}
    unknown = []
    for s in sectors:
        if twisted_only and s.is_nontwisted:
            continue
        if s.heat_coefficient is None or s.dimension is None:
            unknown.append(s.label)
            continue
        d = s.dimension
        heat[d] = heat.get(d, Integer(0)) + s.heat_coefficient
        vols[d] = vols.get(d, Integer(0)) + s.volume
    if unknown:
        logger.warning(f"⚠️ {len(unknown)} sectors without a known volume")
    order = sorted(heat, reverse=True)
    return HeatTraceExpansion(
        tuple((d, heat[d].simplify()) for d in order),
        tuple((d, vols[d].simplify()) for d in order),
        tuple(unknown),
    )


# ==========================================
# 🧱 Singular strata
# ==========================================

def lowest_stratum_dimension(strata: Sequence[Stratum]) -> Union[int, str]:
    """Smallest dimension among singular strata, or MANIFOLD when there are none."""
    if not strata:
        return MANIFOLD
    return min(s.dimension for s in strata)


@dataclass(frozen=True)
class StratumVerdict:
    lowest_a: Union[int, str]
    lowest_b: Union[int, str]

    @property
    def distinguishes(self) -> bool:
        return self.lowest_a != self.lowest_b

    def describe(self) -> str:
        if self.distinguishes:
            return f"lowest singular strata differ: {self.lowest_a} vs {self.lowest_b}"
        return f"lowest singular strata agree: {self.lowest_a}"


def compare_lowest_strata(a: Sequence[Stratum], b: Sequence[Stratum]) -> StratumVerdict:
    """Isospectral orbifolds with a common cover have equal lowest strata; a difference rules that out."""
    return StratumVerdict(lowest_stratum_dimension(a), lowest_stratum_dimension(b))
