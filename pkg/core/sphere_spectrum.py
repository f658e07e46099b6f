"""
Laplace spectra of round spheres divided by finite orthogonal groups.

Degree-k harmonic polynomials restrict to eigenfunctions with eigenvalue k(k+n-2) on
S^(n-1); the invariant ones are counted with the Molien series of each element.
Cyclic rotation groups have a lattice-point count that avoids cyclotomic arithmetic.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Expr, Integer, oo, sympify

from core.config import settings
from core.errors import InputParseError, InternalConsistencyError, UnsupportedSector
from core.exactnum import Cyclotomic, ExactMatrix, normalize_scalar, series_inverse
from core.finite_group import FiniteMatrixGroup, MatrixElement, generate_group

logger = logging.getLogger("SphereSpectrum")

UNITS = ("laplace", "mu")


# ==========================================
# 📊 Spectrum segments
# ==========================================

def eigen_key(ev: Expr):
    return ev.evalf(40)


@dataclass(frozen=True)
class SpectrumSegment:
    """Eigenvalues up to `cutoff`, each listed with its exact multiplicity.

    `cutoff` is a sympy value; `oo` marks a complete spectrum. Units are "laplace"
    (Laplace eigenvalues), "mu" (squared dual-lattice norms) or None for zero-only segments.
    """
    entries: Tuple[Tuple[Expr, int], ...]
    cutoff: Expr
    units: Optional[str] = None

    def __post_init__(self):
        if self.units is not None and self.units not in UNITS:
            raise InputParseError(f"unknown spectrum units {self.units!r}")
        prev = None
        for ev, mult in self.entries:
            if not isinstance(mult, int) or mult < 1:
                raise InternalConsistencyError(f"multiplicity {mult!r} at {ev} is not a positive integer")
            if ev.is_negative:
                raise InternalConsistencyError(f"negative eigenvalue {ev}")
            if prev is not None and not eigen_key(prev) < eigen_key(ev):
                raise InternalConsistencyError("eigenvalues must be strictly increasing")
            prev = ev
        if prev is not None and self.cutoff != oo and eigen_key(prev) > eigen_key(self.cutoff):
            raise InternalConsistencyError(f"eigenvalue {prev} lies beyond the cutoff {self.cutoff}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[object, int]], cutoff, units: Optional[str] = None) -> "SpectrumSegment":
        """Merge repeated eigenvalues, drop zero multiplicities and sort."""
        acc: Dict[Expr, int] = {}
        for ev, mult in pairs:
            ev = sympify(ev)
            acc[ev] = acc.get(ev, 0) + int(mult)
        entries = tuple(sorted(((ev, m) for ev, m in acc.items() if m), key=lambda p: eigen_key(p[0])))
        if any(ev != 0 for ev, _ in entries) and units is None:
            raise InputParseError("nonzero eigenvalues need units")
        return cls(entries, sympify(cutoff), units)

    @property
    def is_complete(self) -> bool:
        return self.cutoff == oo

    def eigenvalues(self) -> List[Expr]:
        return [ev for ev, _ in self.entries]

    def multiplicity(self, ev) -> int:
        ev = sympify(ev)
        if not self.is_complete and eigen_key(ev) > eigen_key(self.cutoff):
            raise InputParseError(f"eigenvalue {ev} lies beyond the certified cutoff {self.cutoff}")
        return next((m for e, m in self.entries if e == ev), 0)

    def truncate(self, cutoff) -> "SpectrumSegment":
        cutoff = sympify(cutoff)
        if not self.is_complete and cutoff != oo and eigen_key(cutoff) > eigen_key(self.cutoff):
            raise InputParseError(f"cannot extend a segment certified up to {self.cutoff} to {cutoff}")
        if cutoff == oo:
            return self
        keep = tuple((e, m) for e, m in self.entries if eigen_key(e) <= eigen_key(cutoff))
        return SpectrumSegment(keep, cutoff, self.units)

    def scaled(self, factor, units: str) -> "SpectrumSegment":
        factor = sympify(factor)
        cutoff = oo if self.is_complete else self.cutoff * factor
        return SpectrumSegment(tuple((e * factor, m) for e, m in self.entries), cutoff, units)

    def first_nonzero(self) -> Optional[Tuple[Expr, int]]:
        return next(((e, m) for e, m in self.entries if e != 0), None)

    def between(self, low, high) -> List[Tuple[Expr, int]]:
        """Entries strictly inside (low, high)."""
        lo, hi = eigen_key(sympify(low)), eigen_key(sympify(high))
        return [(e, m) for e, m in self.entries if lo < eigen_key(e) < hi]

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)


def zero_only(count: int, cutoff=oo) -> SpectrumSegment:
    return SpectrumSegment(((Integer(0), count),) if count else (), sympify(cutoff), None)


# ==========================================
# 🎼 Invariant harmonic polynomials
# ==========================================

@dataclass(frozen=True)
class HarmonicMultiplicityTable:
    n: int
    dims: Tuple[int, ...]  # dims[k] = invariant harmonic polynomials of degree k

    def __post_init__(self):
        if any(d < 0 for d in self.dims):
            raise InternalConsistencyError(f"negative invariant dimension in {self.dims}")
        if self.dims and self.dims[0] != 1:
            raise InternalConsistencyError(f"degree-0 invariant dimension is {self.dims[0]}, expected 1")

    @property
    def k_max(self) -> int:
        return len(self.dims) - 1

    def eigenvalue(self, k: int) -> int:
        return k * (k + self.n - 2)


def _acting_elements(source) -> Tuple[list, int]:
    if hasattr(source, "act") and hasattr(source, "group"):
        elements = list(dict.fromkeys(source.act(i) for i in range(source.group.order)))
        return elements, source.n
    if isinstance(source, FiniteMatrixGroup):
        return list(source.elements), source.n
    elements = list(source)
    if not elements:
        raise InputParseError("empty element list")
    return elements, elements[0].dim


def harmonic_table(source, k_max: int) -> HarmonicMultiplicityTable:
    """Invariant harmonic dimensions for degrees 0..k_max, averaged over the whole group.

    `source` is a FiniteMatrixGroup, a sphere action, or a list of group elements.
    """
    if k_max < 0:
        raise InputParseError(f"k_max must be >= 0, got {k_max}")
    elements, n = _acting_elements(source)
    # elements with the same det(I - tM) share their whole Molien series
    polys = Counter(tuple(e.det_one_minus_t()) for e in elements)
    totals = [0] * (k_max + 1)
    for poly, count in polys.items():
        series = series_inverse(poly, k_max)
        for k in range(k_max + 1):
            totals[k] = totals[k] + count * (series[k] - series[k - 2])
    order = len(elements)
    dims = []
    for k, total in enumerate(totals):
        total = normalize_scalar(total)
        if not isinstance(total, int) or total % order:
            raise InternalConsistencyError(f"Molien average at degree {k} is {total}/{order}, not an integer")
        dims.append(total // order)
    return HarmonicMultiplicityTable(n, tuple(dims))


def harmonic_invariant_dim(source, k: int) -> int:
    if k < 0:
        raise InputParseError(f"degree must be >= 0, got {k}")
    return harmonic_table(source, k).dims[k]


def quotient_sphere_spectrum(source, k_max: Optional[int] = None) -> SpectrumSegment:
    k_max = settings.DEFAULT_CUTOFF_DEGREE if k_max is None else k_max
    table = harmonic_table(source, k_max)
    if table.n < 2:
        raise InputParseError("quotient_sphere_spectrum needs n >= 2; S^0 is handled by sector_spectrum")
    pairs = [(table.eigenvalue(k), d) for k, d in enumerate(table.dims)]
    logger.debug(f"🔧 Molien spectrum on S^{table.n - 1} up to degree {k_max}")
    return SpectrumSegment.from_pairs(pairs, table.eigenvalue(k_max), "laplace")


# ==========================================
# 🔄 Lens spaces
# ==========================================

def _check_lens(q: int, weights: Sequence[int]):
    if q <= 0:
        raise InputParseError(f"lens order must be positive, got {q}")
    if not weights:
        raise InputParseError("lens spaces need at least one weight")


def lens_lattice_counts(q: int, weights: Sequence[int], k_max: int) -> List[int]:
    """c_k = #{(a, b) : sum(a_j + b_j) = k, sum s_j (a_j - b_j) = 0 mod q} for k <= k_max."""
    _check_lens(q, weights)
    # table[k][r]: monomials of degree k with weight residue r
    table = [[0] * q for _ in range(k_max + 1)]
    table[0][0] = 1
    for s in weights:
        step = [[0] * q for _ in range(k_max + 1)]
        for d in range(k_max + 1):
            # one complex coordinate: z^a zbar^b with a + b = d has residue s(a - b)
            shifts = Counter((s * (2 * a - d)) % q for a in range(d + 1))
            for k in range(k_max + 1 - d):
                row = table[k]
                for r, c in enumerate(row):
                    if c:
                        for shift, mult in shifts.items():
                            step[k + d][(r + shift) % q] += c * mult
        table = step
    return [row[0] for row in table]


def lens_space_spectrum(q: int, weights: Sequence[int], k_max: Optional[int] = None) -> SpectrumSegment:
    """Spectrum of S^(2m-1)/Z_q, the generator acting by zeta_q^(s_j) on the j-th complex coordinate."""
    k_max = settings.DEFAULT_CUTOFF_DEGREE if k_max is None else k_max
    counts = lens_lattice_counts(q, weights, k_max)
    n = 2 * len(weights)
    pairs = [(k * (k + n - 2), counts[k] - (counts[k - 2] if k >= 2 else 0)) for k in range(k_max + 1)]
    return SpectrumSegment.from_pairs(pairs, k_max * (k_max + n - 2), "laplace")


def lens_rotation_group(q: int, weights: Sequence[int]) -> FiniteMatrixGroup:
    """Z_q as diag(zeta^s_1, zeta^-s_1, ...) in complexified coordinates; unitary, same Molien series."""
    _check_lens(q, weights)
    diag = []
    for s in weights:
        diag += [Cyclotomic.root_of_unity(q, s), Cyclotomic.root_of_unity(q, -s)]
    gen = MatrixElement(ExactMatrix.diagonal(diag))
    return generate_group([gen], cap=q, name=f"L({q}; {', '.join(map(str, weights))})")


def lens_isotropy_profile(q: int, weights: Sequence[int]) -> Counter:
    """(order of g, real dimension fixed by g) over the nontrivial g with fixed vectors."""
    _check_lens(q, weights)
    profile: Counter = Counter()
    for j in range(1, q):
        fixed = 2 * sum(1 for s in weights if (s * j) % q == 0)
        if fixed:
            profile[(q // gcd(j, q), fixed)] += 1
    return profile


# ==========================================
# 🎯 Sector spectra
# ==========================================

def sector_spectrum(sector, k_max: Optional[int] = None) -> SpectrumSegment:
    """Spectrum of one sphere-type sector: its centralizer's effective action on the fixed sphere."""
    fixed = sector.fixed_set
    if fixed.kind != "sphere":
        raise UnsupportedSector(f"no spectrum support for {fixed.describe()} sectors here ({sector.label})")
    if fixed.subspace_dim == 1:
        # S^0 modulo its centralizer: one or two points
        return zero_only(sector.m)
    if sector.restricted is None:
        raise InternalConsistencyError(f"sector {sector.label} carries no restricted action")
    return quotient_sphere_spectrum(sector.restricted, k_max)
