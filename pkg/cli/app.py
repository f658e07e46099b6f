"""
Command line: sectors, spectrum, compare, heat, sunada and certify, each on a scenario.

Exit codes: 0 ok, 2 input error, 3 budget exceeded, 4 internal consistency, 5 degraded result.
"""
import logging
import time
from enum import Enum
from typing import Callable, List, Optional

import typer
from rich.console import Console

from core.errors import InputParseError, InternalConsistencyError, OrbifoldError, UnsupportedSector
from core.finite_group import AmbientClassInvariant
from core.flat_orbifold import CrystalGroup
from core.gamma_hom import GroupPresentation, enumerate_homs, hom_classes, satisfies_relators
from core.orthogonal_action import SectorDescriptor, SphereAction, StiefelAction, group_isometric_sectors, \
    total_components
from core.sectors import compare_gamma_spectra, compare_lowest_strata, compare_segments, decompose, gamma_spectrum, \
    heat_trace, leading_asymptotics
from core.sunada import SunadaTriple, certify_gamma_isospectral, check_sunada
from catalog.builtin import named_group
from catalog.loader import load_gamma, load_group
from catalog.scenarios import Scenario, resolve_scenario
from cli.report import ExpectedRow, Report, SectorRow, Verdict, asymptotic_rows, certificate_report, \
    comparison_verdict, heat_row, render_json, render_table, spectrum_table

logger = logging.getLogger("Orbifold")

app = typer.Typer(add_completion=False, no_args_is_help=True,
                  help="Γ-sector decompositions and Γ-spectra of quotient orbifolds.")


class OutputFormat(str, Enum):
    table = "table"
    json = "json"


# --- ⚙️ Shared options ---
ScenarioArg = typer.Argument(..., help="builtin scenario (rsw29, ssw:3,1, lens:5:1,2/1,3, ...) or a scenario file")
GammaOpt = typer.Option(None, "--gamma", help="Z, Z^<l>, F<l>, Zp:<p>, D:<k> or file:<presentation>")
DegreeOpt = typer.Option(None, "--cutoff-degree", min=0, help="harmonic degree cutoff for sphere-type sectors")
MuOpt = typer.Option(None, "--cutoff-mu", help="mu cutoff for flat sectors (rational)")
FormatOpt = typer.Option(OutputFormat.table, "--format", help="table or json")
BudgetOpt = typer.Option(None, "--budget", min=1, help="cap on homomorphism candidates")
SeedCheckOpt = typer.Option(False, "--seed-check", help="re-verify invariants on the produced data")
PhysicalOpt = typer.Option(False, "--physical", help="show flat eigenvalues as 4 pi^2 mu")


# ==========================================
# 🧰 Helpers
# ==========================================

def _run(command: str, fmt: OutputFormat, build: Callable[[], Report]):
    started = time.perf_counter()
    try:
        report = build()
    except OrbifoldError as e:
        Console(stderr=True).print(f"❌ {type(e).__name__}: {e}", markup=False, soft_wrap=True)
        raise typer.Exit(code=e.exit_code)
    logger.info(f"✅ {command} finished in {time.perf_counter() - started:.2f}s")
    if fmt == OutputFormat.json:
        typer.echo(render_json(report))
    else:
        render_table(report, Console())
    if report.degraded:
        raise typer.Exit(code=UnsupportedSector.exit_code)


def _setup(command: str, scenario: str, gamma: Optional[str]):
    sc = resolve_scenario(scenario)
    presentation = load_gamma(gamma or sc.gamma)
    report = Report(command=command, scenario=sc.name, gamma=presentation.name,
                    expected=[ExpectedRow(quantity=e.quantity, value=e.value, provenance=e.provenance)
                              for e in sc.expected],
                    notes=list(sc.notes))
    return sc, presentation, report


def _cutoffs(sc: Scenario, cutoff_degree: Optional[int], cutoff_mu: Optional[str]):
    k_max = cutoff_degree if cutoff_degree is not None else sc.cutoff_degree
    mu_max = cutoff_mu if cutoff_mu is not None else sc.cutoff_mu
    return k_max, mu_max


def _copy_groups(orbifold, sectors: List[SectorDescriptor]) -> List[Optional[int]]:
    if not isinstance(orbifold, (SphereAction, StiefelAction)):
        return [None] * len(sectors)
    out: List[Optional[int]] = [None] * len(sectors)
    for index, members in enumerate(group_isometric_sectors(orbifold, sectors)):
        for pos in members:
            out[pos] = index
    return out


def verify_sectors(orbifold, presentation: GroupPresentation, sectors: List[SectorDescriptor],
                   budget: Optional[int] = None):
    """Orbit-stabilizer and relators for every listed class; class partition of HOM(Γ, G) for group models."""
    for s in sectors:
        hc = s.hom_class
        group = hc.representative.group
        if hc.size * hc.stabilizer_order != group.order:
            raise InternalConsistencyError(f"{s.label}: orbit size x stabilizer != |G|")
        if not satisfies_relators(presentation, group, hc.representative.images):
            raise InternalConsistencyError(f"{s.label}: representative violates a relator")
    if isinstance(orbifold, (SphereAction, StiefelAction, CrystalGroup)):
        group = orbifold.group
        classes = hom_classes(presentation, group, budget)
        covered = set()
        for hc in classes:
            if covered & set(hc.orbit):
                raise InternalConsistencyError(f"class {hc.label()} overlaps an earlier class")
            covered |= set(hc.orbit)
        if len(covered) != len(enumerate_homs(presentation, group, budget)):
            raise InternalConsistencyError("hom classes do not cover HOM(Γ, G)")
    logger.info(f"✅ seed check passed for {len(sectors)} sectors")


def _resolve_ambient(text: str):
    try:
        return named_group(text)
    except InputParseError:
        return load_group(text)


# ==========================================
# 🖥️ Commands
# ==========================================

@app.command()
def sectors(scenario: str = ScenarioArg, gamma: Optional[str] = GammaOpt, budget: Optional[int] = BudgetOpt,
            fmt: OutputFormat = FormatOpt, seed_check: bool = SeedCheckOpt):
    """Γ-sector table: fixed sets, component counts, centralizer and effective-kernel orders."""
    def build() -> Report:
        sc, presentation, report = _setup("sectors", scenario, gamma)
        for label, orbifold in sc.models:
            found = decompose(orbifold, presentation, budget)
            for s, copy in zip(found, _copy_groups(orbifold, found)):
                report.sectors.append(SectorRow(
                    orbifold=label, label=s.label, fixed_set=s.fixed_set.describe(), dimension=s.dimension,
                    components=s.m, centralizer_order=s.centralizer.order, kernel_order=s.effective_kernel.order,
                    volume=None if s.volume is None else str(s.volume), copy_group=copy))
            report.verdicts.append(Verdict(kind="components", subject=label, outcome=str(total_components(found)),
                                           detail=f"{len(found)} sectors"))
            if seed_check:
                verify_sectors(orbifold, presentation, found, budget)
        return report

    _run("sectors", fmt, build)


@app.command()
def spectrum(scenario: str = ScenarioArg, gamma: Optional[str] = GammaOpt, cutoff_degree: Optional[int] = DegreeOpt,
             cutoff_mu: Optional[str] = MuOpt, budget: Optional[int] = BudgetOpt, fmt: OutputFormat = FormatOpt,
             seed_check: bool = SeedCheckOpt, physical: bool = PhysicalOpt,
             twisted: bool = typer.Option(False, "--twisted", help="also list the twisted part on its own")):
    """Γ-spectrum of every orbifold in the scenario, with the sectors each eigenvalue comes from."""
    def build() -> Report:
        sc, presentation, report = _setup("spectrum", scenario, gamma)
        k_max, mu_max = _cutoffs(sc, cutoff_degree, cutoff_mu)
        for label, orbifold in sc.models:
            found = decompose(orbifold, presentation, budget)
            gs = gamma_spectrum(orbifold, presentation, k_max, mu_max, budget, sectors=found, name=label)
            report.spectra.append(spectrum_table(label, presentation.name, gs.merged, spectrum=gs,
                                                 degraded=gs.degraded, physical=physical))
            if twisted:
                report.spectra.append(spectrum_table(label, presentation.name, gs.twisted(), part="twisted",
                                                     spectrum=gs, physical=physical))
            report.degraded = report.degraded or gs.degraded
            if seed_check:
                verify_sectors(orbifold, presentation, found, budget)
                gs.verify()
        return report

    _run("spectrum", fmt, build)


@app.command()
def compare(scenario: str = ScenarioArg, gamma: Optional[str] = GammaOpt, cutoff_degree: Optional[int] = DegreeOpt,
            cutoff_mu: Optional[str] = MuOpt, budget: Optional[int] = BudgetOpt, fmt: OutputFormat = FormatOpt,
            seed_check: bool = SeedCheckOpt, physical: bool = PhysicalOpt):
    """Compare the Γ-spectra of the first two orbifolds below their common cutoff."""
    def build() -> Report:
        sc, presentation, report = _setup("compare", scenario, gamma)
        k_max, mu_max = _cutoffs(sc, cutoff_degree, cutoff_mu)
        sc.pair()
        spectra = []
        for label, orbifold in sc.models[:2]:
            gs = gamma_spectrum(orbifold, presentation, k_max, mu_max, budget, name=label)
            if seed_check:
                gs.verify()
            spectra.append(gs)
            report.spectra.append(spectrum_table(label, presentation.name, gs.merged, spectrum=gs,
                                                 degraded=gs.degraded, physical=physical))
        a, b = spectra
        subject = f"{a.orbifold} vs {b.orbifold}"
        report.verdicts.append(comparison_verdict(subject, compare_gamma_spectra(a, b)))
        twisted = comparison_verdict(subject, compare_segments(a.twisted(), b.twisted()))
        report.verdicts.append(twisted.model_copy(update={"kind": "compare-twisted"}))
        strata_a, strata_b = sc.strata_of(0), sc.strata_of(1)
        if strata_a is not None and strata_b is not None:
            verdict = compare_lowest_strata(strata_a, strata_b)
            report.verdicts.append(Verdict(kind="strata", subject=subject,
                                           outcome="distinguished" if verdict.distinguishes else "not distinguished",
                                           detail=verdict.describe()))
        report.degraded = a.degraded or b.degraded
        return report

    _run("compare", fmt, build)


@app.command()
def heat(scenario: str = ScenarioArg, t: List[str] = typer.Option(["0.1"], "--t", help="time(s) t > 0"),
         gamma: Optional[str] = GammaOpt, cutoff_degree: Optional[int] = DegreeOpt, cutoff_mu: Optional[str] = MuOpt,
         budget: Optional[int] = BudgetOpt, fmt: OutputFormat = FormatOpt,
         twisted_only: bool = typer.Option(False, "--twisted-only", help="leading terms of the twisted sectors only")):
    """Heat-trace partial sums and the leading small-time coefficients per sector dimension."""
    def build() -> Report:
        sc, presentation, report = _setup("heat", scenario, gamma)
        k_max, mu_max = _cutoffs(sc, cutoff_degree, cutoff_mu)
        for label, orbifold in sc.models:
            found = decompose(orbifold, presentation, budget)
            gs = gamma_spectrum(orbifold, presentation, k_max, mu_max, budget, sectors=found, name=label)
            for value in t:
                report.heat.append(heat_row(label, value, heat_trace(gs, value)))
            report.asymptotics.extend(asymptotic_rows(label, leading_asymptotics(found, twisted_only)))
            report.degraded = report.degraded or gs.degraded
        return report

    _run("heat", fmt, build)


@app.command()
def sunada(scenario: str = ScenarioArg, fmt: OutputFormat = FormatOpt,
           ambient: Optional[str] = typer.Option(None, "--ambient",
                                                 help="finite ambient group (builtin name or group file)")):
    """Almost conjugacy of the two acting groups, in O(n) or inside a finite ambient group."""
    def build() -> Report:
        sc = resolve_scenario(scenario)
        a, b = sc.pair()
        if not all(isinstance(x, (SphereAction, StiefelAction)) for x in (a, b)):
            raise InputParseError(f"scenario {sc.name} has no linear group pair")
        invariant = AmbientClassInvariant.finite(_resolve_ambient(ambient)) if ambient else \
            AmbientClassInvariant.orthogonal()
        verdict = check_sunada(SunadaTriple(invariant, a.group, b.group))
        report = Report(command="sunada", scenario=sc.name, gamma="-", notes=list(sc.notes),
                        expected=[ExpectedRow(quantity=e.quantity, value=e.value, provenance=e.provenance)
                                  for e in sc.expected])
        report.verdicts.append(Verdict(kind="sunada", subject=f"{a.group.name} vs {b.group.name}",
                                       outcome=verdict.describe(), detail=f"mode {invariant.mode}"))
        return report

    _run("sunada", fmt, build)


@app.command()
def certify(scenario: str = ScenarioArg, gamma: Optional[str] = GammaOpt, budget: Optional[int] = BudgetOpt,
            fmt: OutputFormat = FormatOpt):
    """Try to certify Γ-isospectrality by pairing sectors into Sunada pairs."""
    def build() -> Report:
        sc, presentation, report = _setup("certify", scenario, gamma)
        a, b = sc.pair()
        certificate = certify_gamma_isospectral(a, b, presentation, budget)
        report.certificates.append(certificate_report(certificate))
        report.verdicts.append(Verdict(kind="certificate", subject=f"{sc.labels[0]} vs {sc.labels[1]}",
                                       outcome=certificate.status, detail=certificate.reason))
        return report

    _run("certify", fmt, build)


def main():
    app()
