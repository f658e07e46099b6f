"""
Scenario resolution: a short name or a scenario file becomes a list of labelled orbifolds,
a default Γ, cutoffs and (optionally) golden values with their provenance.

Builtin names:
  rsw27                Stiefel pair V(6,3) / K1, K2
  rsw29                sphere pair S^5 / K1, K2
  ssw[:p,m]            H^i x E^(m-i) on S^(p^(3m)-1), i = 0..m
  mtriv:<group>        trivial action on S^2 (factors joined by '*' give a direct product)
  lens:q:w1,w2[/v1,v2] one or two lens quotients
  flat-fixture:<name>  singular-set fixture pair (rsw33, rsw35, rsw37 or a file)
  torus5[:<file>]      5-dim flat pair built from a 4-dim isospectral lattice pair
  sunada15             G1, G2 on V(15,12)
"""
import logging
import os
import re
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

from core.config import settings
from core.errors import InputParseError
from core.orthogonal_action import SphereAction, Stratum, sphere_strata
from catalog import builtin
from catalog.loader import fixture_strata, load_fixture_pair, load_lattice_pair, load_model, load_strata_pair
from catalog.models import ExpectedValue, ScenarioModel

logger = logging.getLogger("Catalog")

DEFAULT_LATTICE_PAIR = "tetralattice_1729"
SUNADA15_STRATA = "sunada15_strata"


@dataclass(frozen=True)
class Scenario:
    name: str
    models: Tuple[Tuple[str, object], ...]
    gamma: str = "Z"
    cutoff_degree: Optional[int] = None
    cutoff_mu: Optional[str] = None
    # None: compute from the action when possible
    strata: Tuple[Optional[Tuple[Stratum, ...]], ...] = ()
    expected: Tuple[ExpectedValue, ...] = ()
    description: str = ""
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def labels(self) -> List[str]:
        return [label for label, _ in self.models]

    def model(self, index: int):
        return self.models[index][1]

    def pair(self) -> Tuple[object, object]:
        if len(self.models) < 2:
            raise InputParseError(f"scenario {self.name} has a single orbifold; compare needs two")
        return self.models[0][1], self.models[1][1]

    def strata_of(self, index: int) -> Optional[List[Stratum]]:
        known = self.strata[index] if index < len(self.strata) else None
        if known is not None:
            return list(known)
        orbifold = self.model(index)
        if isinstance(orbifold, SphereAction):
            return sphere_strata(orbifold)
        return None

    def expected_value(self, quantity: str) -> Optional[ExpectedValue]:
        return next((e for e in self.expected if e.quantity == quantity), None)


# ==========================================
# 🏗️ Builtin scenarios
# ==========================================

def _labelled(orbifolds) -> Tuple[Tuple[str, object], ...]:
    return tuple((o.name, o) for o in orbifolds)


def _ints(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise InputParseError(f"expected comma separated integers, got {text!r}") from e


def _ssw(arg: str) -> Scenario:
    p, m = 3, 1
    if arg:
        values = _ints(arg)
        if len(values) != 2:
            raise InputParseError(f"ssw takes p,m (got {arg!r})")
        p, m = values
    actions = builtin.ssw_actions(p, m)
    return Scenario(f"ssw:{p},{m}", _labelled(actions), cutoff_degree=4,
                    description=f"H^i x E^({m}-i) in the regular representation on S^{p ** (3 * m) - 1}")


def _mtriv(arg: str) -> Scenario:
    if not arg:
        raise InputParseError("mtriv needs a group, e.g. mtriv:D6")
    factors = [builtin.named_group(f) for f in arg.split("*")]
    action = builtin.trivial_action(factors[0]) if len(factors) == 1 else builtin.product_trivial_action(factors)
    return Scenario(f"mtriv:{arg}", ((action.name, action),), gamma="Z^2",
                    description=f"{arg} acting trivially on S^2")


def _lens(arg: str) -> Scenario:
    m = re.fullmatch(r"(\d+):([\d,]+)(?:/([\d,]+))?", arg)
    if not m:
        raise InputParseError(f"lens scenario must look like lens:q:w1,w2[/v1,v2], got lens:{arg}")
    q = int(m.group(1))
    actions = [builtin.lens_action(q, _ints(m.group(2)))]
    if m.group(3):
        actions.append(builtin.lens_action(q, _ints(m.group(3))))
    return Scenario(f"lens:{arg}", _labelled(actions), description=f"lens quotients of order {q}")


def _flat_fixture(arg: str) -> Scenario:
    if not arg:
        raise InputParseError("flat-fixture needs a fixture name or file")
    first, second, source = load_fixture_pair(arg)
    name = os.path.splitext(os.path.basename(arg))[0]
    strata = (tuple(fixture_strata(first)), tuple(fixture_strata(second)))
    notes = tuple(n for n in (first.note, second.note) if n)
    return Scenario(name, ((first.name, first), (second.name, second)), strata=strata, description=source,
                    notes=notes)


def _torus5(arg: str) -> Scenario:
    first, second, norm, provenance = load_lattice_pair(arg or DEFAULT_LATTICE_PAIR)
    o1, o2 = builtin.torus5_pair(first, second, norm)
    return Scenario("torus5", _labelled([o1, o2]), cutoff_mu=settings.DEFAULT_CUTOFF_MU,
                    description="mirror extensions of a 4-dim isospectral lattice pair", notes=(provenance,))


def _sunada15(arg: str) -> Scenario:
    o1, o2 = builtin.sunada15_pair()
    s1, s2, source = load_strata_pair(SUNADA15_STRATA)
    return Scenario("sunada15", ((o1.name, o1), (o2.name, o2)), gamma="Z^2", strata=(tuple(s1), tuple(s2)),
                    description="G1, G2 acting on V(15,12)", notes=(source,) if source else ())


_BUILTINS = {
    "rsw27": lambda arg: Scenario("rsw27", _labelled(builtin.rsw_stiefel_pair()), gamma="Z^2",
                                  description="K1, K2 acting on V(6,3)"),
    "rsw29": lambda arg: Scenario("rsw29", _labelled(builtin.rsw_sphere_pair()), cutoff_degree=6,
                                  description="K1, K2 acting on S^5"),
    "ssw": _ssw,
    "mtriv": _mtriv,
    "lens": _lens,
    "flat-fixture": _flat_fixture,
    "torus5": _torus5,
    "sunada15": _sunada15,
}


# ==========================================
# 🎬 Resolution
# ==========================================

def _apply_model(scenario: Scenario, data: ScenarioModel) -> Scenario:
    return replace(
        scenario,
        gamma=data.gamma or scenario.gamma,
        cutoff_degree=data.cutoff_degree if data.cutoff_degree is not None else scenario.cutoff_degree,
        cutoff_mu=str(data.cutoff_mu) if data.cutoff_mu is not None else scenario.cutoff_mu,
        expected=tuple(data.expected) or scenario.expected,
        description=data.description or scenario.description,
    )


def _golden(name: str) -> Optional[ScenarioModel]:
    path = os.path.join(settings.SCENARIO_DIR, f"{name}.json")
    if not os.path.exists(path):
        return None
    return load_model(path, ScenarioModel)


def _builtin(text: str) -> Scenario:
    head, _, arg = text.partition(":")
    build = _BUILTINS.get(head)
    if build is None:
        raise InputParseError(f"unknown scenario {text!r} (builtins: {', '.join(sorted(_BUILTINS))})")
    scenario = build(arg)
    golden = _golden(text.replace(":", "_").replace(",", "_")) or (None if arg else _golden(head))
    if golden is not None:
        scenario = _apply_model(scenario, golden)
    return scenario


def resolve_scenario(text: str, _depth: int = 0) -> Scenario:
    """A builtin name, file:<path>, or a path to a scenario JSON file."""
    text = text.strip()
    if _depth > 4:
        raise InputParseError(f"scenario {text!r} refers to itself")
    if text.startswith("file:") or text.endswith(".json"):
        data = load_model(text[len("file:"):] if text.startswith("file:") else text, ScenarioModel)
        inner = resolve_scenario(data.target, _depth + 1)
        scenario = replace(_apply_model(inner, data), name=data.name)
    else:
        scenario = _builtin(text)
    logger.info(f"🔧 scenario {scenario.name}: {', '.join(scenario.labels)} (Γ = {scenario.gamma})")
    return scenario


def builtin_names() -> List[str]:
    return sorted(_BUILTINS)
