"""
The report every subcommand produces. Table and JSON renderings are two views of one `Report`.
"""
from typing import Dict, List, Optional

import mpmath
from pydantic import BaseModel, Field
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from core.config import settings
from core.flat_orbifold import physical_units
from core.sectors import GammaSpectrum, HeatTraceExpansion, HeatTraceValue, SpectrumComparison
from core.sphere_spectrum import SpectrumSegment
from core.sunada import GammaCertificate


class SectorRow(BaseModel):
    orbifold: str
    label: str
    fixed_set: str
    dimension: Optional[int] = None
    components: int
    centralizer_order: int
    kernel_order: int
    volume: Optional[str] = None
    copy_group: Optional[int] = None


class SpectrumRow(BaseModel):
    eigenvalue: str
    multiplicity: int
    sectors: List[str] = []


class SpectrumTable(BaseModel):
    orbifold: str
    gamma: str
    part: str = "all"
    units: Optional[str] = None
    cutoff: str
    degraded: bool = False
    rows: List[SpectrumRow] = []


class Verdict(BaseModel):
    kind: str
    subject: str
    outcome: str
    detail: str = ""


class PairingRow(BaseModel):
    label_1: str
    label_2: Optional[str] = None
    fixed_set: str
    passed: bool
    reason: str = ""


class CertificateReport(BaseModel):
    gamma: str
    status: str
    reason: str = ""
    metadata: Dict[str, str] = {}
    pairings: List[PairingRow] = []


class HeatRow(BaseModel):
    orbifold: str
    t: str
    value: str
    terms: int
    truncated: bool


class AsymptoticRow(BaseModel):
    orbifold: str
    dimension: int
    coefficient: str
    volume: str


class ExpectedRow(BaseModel):
    quantity: str
    value: str
    provenance: str


class Report(BaseModel):
    schema_version: int = Field(default_factory=lambda: settings.REPORT_SCHEMA_VERSION)
    command: str
    scenario: str
    gamma: str
    sectors: List[SectorRow] = []
    spectra: List[SpectrumTable] = []
    verdicts: List[Verdict] = []
    certificates: List[CertificateReport] = []
    heat: List[HeatRow] = []
    asymptotics: List[AsymptoticRow] = []
    expected: List[ExpectedRow] = []
    notes: List[str] = []
    degraded: bool = False


# ==========================================
# 🔁 Conversions from library results
# ==========================================

def spectrum_table(orbifold: str, gamma: str, segment: SpectrumSegment, part: str = "all",
                   spectrum: Optional[GammaSpectrum] = None, degraded: bool = False,
                   physical: bool = False) -> SpectrumTable:
    """Rows with per-sector provenance; `physical` shows mu-unit eigenvalues as 4 pi^2 mu."""
    shown = physical_units(segment) if physical else segment
    rows = []
    for (ev, m), (shown_ev, _) in zip(segment.entries, shown.entries):
        origin = [f"{label} x{mult}" for label, mult in spectrum.provenance(ev)] if spectrum is not None else []
        rows.append(SpectrumRow(eigenvalue=str(shown_ev), multiplicity=m, sectors=origin))
    return SpectrumTable(orbifold=orbifold, gamma=gamma, part=part, units=shown.units, cutoff=str(shown.cutoff),
                         degraded=degraded, rows=rows)


def comparison_verdict(subject: str, comparison: SpectrumComparison) -> Verdict:
    if comparison.equal:
        return Verdict(kind="compare", subject=subject, outcome="Γ-isospectral up to cutoff",
                       detail=comparison.describe())
    return Verdict(kind="compare", subject=subject, outcome="NOT Γ-isospectral", detail=comparison.describe())


def certificate_report(certificate: GammaCertificate) -> CertificateReport:
    pairings = [PairingRow(label_1=p.label_1, label_2=p.label_2, fixed_set=p.fixed_set, passed=p.passed,
                           reason=p.reason) for p in certificate.pairings]
    return CertificateReport(gamma=certificate.gamma, status=certificate.status, reason=certificate.reason,
                             metadata=dict(certificate.metadata), pairings=pairings)


def heat_row(orbifold: str, t: str, value: HeatTraceValue) -> HeatRow:
    return HeatRow(orbifold=orbifold, t=t, value=mpmath.nstr(value.value, 15), terms=value.terms,
                   truncated=value.truncated)


def asymptotic_rows(orbifold: str, expansion: HeatTraceExpansion) -> List[AsymptoticRow]:
    return [AsymptoticRow(orbifold=orbifold, dimension=d, coefficient=str(c), volume=str(expansion.volume(d)))
            for d, c in expansion.terms]


# ==========================================
# 🖨️ Rendering
# ==========================================

def _table(title: str, columns: List[str], rows) -> Table:
    table = Table(title=escape(title), show_lines=False)
    for c in columns:
        table.add_column(c)
    for row in rows:
        table.add_row(*[escape("" if x is None else str(x)) for x in row])
    return table


def render_table(report: Report, console: Console):
    console.print(f"{report.command} {report.scenario} (Γ = {report.gamma})", markup=False, soft_wrap=True)
    if report.sectors:
        console.print(_table("Γ-sectors", ["orbifold", "sector", "fixed set", "dim", "m", "|C|", "|K|", "volume", "copy"],
                             [(r.orbifold, r.label, r.fixed_set, r.dimension, r.components, r.centralizer_order,
                               r.kernel_order, r.volume, r.copy_group) for r in report.sectors]))
    for s in report.spectra:
        title = f"{s.orbifold} {s.part} spectrum up to {s.cutoff} ({s.units or 'zero only'})"
        if s.degraded:
            title += " [degraded]"
        console.print(_table(title, ["eigenvalue", "mult", "sectors"],
                             [(r.eigenvalue, r.multiplicity, ", ".join(r.sectors)) for r in s.rows]))
    for c in report.certificates:
        console.print(_table(f"certificate Γ = {c.gamma}: {c.status}", ["sector 1", "sector 2", "fixed set", "ok", "reason"],
                             [(p.label_1, p.label_2, p.fixed_set, "yes" if p.passed else "no", p.reason)
                              for p in c.pairings]))
        for key, value in c.metadata.items():
            console.print(f"  {key}: {value}", markup=False, soft_wrap=True)
    if report.heat:
        console.print(_table("heat trace partial sums", ["orbifold", "t", "value", "terms", "truncated"],
                             [(h.orbifold, h.t, h.value, h.terms, h.truncated) for h in report.heat]))
    if report.asymptotics:
        console.print(_table("leading heat coefficients", ["orbifold", "dim", "coefficient", "volume"],
                             [(a.orbifold, a.dimension, a.coefficient, a.volume) for a in report.asymptotics]))
    if report.expected:
        console.print(_table("expected values", ["quantity", "value", "provenance"],
                             [(e.quantity, e.value, e.provenance) for e in report.expected]))
    for v in report.verdicts:
        line = f"{v.kind} {v.subject}: {v.outcome}"
        console.print(f"{line}; {v.detail}" if v.detail else line, markup=False, soft_wrap=True)
    for note in report.notes:
        console.print(f"note: {note}", markup=False, soft_wrap=True)
    if report.degraded:
        console.print("⚠️ degraded result: some sectors have no spectral support", markup=False, soft_wrap=True)


def render_json(report: Report) -> str:
    return report.model_dump_json(indent=2)
