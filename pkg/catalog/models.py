"""
Pydantic schemas for every structured input file (see SCHEMA.md).

Rationals are ints or "p/q" strings; lengths and volumes are exact sympy expressions
written as strings ("sqrt(2)", "1/sqrt(2)").
"""
import re
from fractions import Fraction
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy import SympifyError, sympify

Rational = Union[int, str]


def _check_rational(value: Rational) -> Rational:
    try:
        Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {value!r}") from e
    return value


def _check_expression(value: str) -> str:
    try:
        expr = sympify(str(value))
    except SympifyError as e:
        raise ValueError(f"not an exact expression: {value!r}") from e
    if not expr.is_positive:
        raise ValueError(f"expected a positive exact value, got {value!r}")
    return str(value)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# ==========================================
# 🧮 Groups and presentations
# ==========================================

class PresentationModel(_Strict):
    """<x_1..x_g | relators>; a relator is a list of signed 1-based generator numbers."""
    generators: int = Field(ge=0)
    relators: List[List[int]] = []
    label: str = ""

    @model_validator(mode="after")
    def _relators_in_range(self):
        for word in self.relators:
            if not word:
                raise ValueError("empty relator")
            if any(x == 0 or abs(x) > self.generators for x in word):
                raise ValueError(f"relator {word} uses generators outside 1..{self.generators}")
        return self


class ElementModel(_Strict):
    """Exactly one form per element.

    matrix: exact rows. images (+ signs): 0-based signed permutation. diagonal: +-1 entries.
    signed: 1-based one-line form where -3 sends the position to 3 with a sign flip.
    cycles: a permutation word such as "(1 2 3)(4 5)" on the points 1..n.
    """
    matrix: Optional[List[List[Rational]]] = None
    images: Optional[List[int]] = None
    signs: Optional[List[int]] = None
    diagonal: Optional[List[int]] = None
    signed: Optional[List[int]] = None
    cycles: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _one_form(self):
        forms = [self.matrix, self.images, self.diagonal, self.signed, self.cycles]
        if sum(f is not None for f in forms) != 1:
            raise ValueError("give exactly one of matrix, images, diagonal, signed or cycles")
        if (self.n is None) != (self.cycles is None):
            raise ValueError("a cycle word needs n, and n belongs to a cycle word")
        if self.cycles is not None and not re.fullmatch(r"(\(\s*\d+(\s+\d+)*\s*\)\s*)*", self.cycles.strip()):
            raise ValueError(f"not a permutation word: {self.cycles!r}")
        if self.signed is not None and sorted(abs(x) for x in self.signed) != list(range(1, len(self.signed) + 1)):
            raise ValueError(f"signed one-line form must use each of 1..{len(self.signed)} once")
        if self.signs is not None and self.images is None:
            raise ValueError("signs belong to a signed permutation (images)")
        if self.diagonal is not None and any(d not in (1, -1) for d in self.diagonal):
            raise ValueError("diagonal entries must be +1 or -1")
        if self.matrix is not None:
            for row in self.matrix:
                for x in row:
                    _check_rational(x)
        return self


class GroupModel(_Strict):
    name: str
    generators: List[ElementModel] = Field(min_length=1)
    order_cap: Optional[int] = Field(default=None, ge=1)


# ==========================================
# 🔷 Lattices and crystal groups
# ==========================================

class LatticeModel(_Strict):
    name: str = ""
    gram: List[List[Rational]]

    @field_validator("gram")
    @classmethod
    def _square(cls, gram):
        if any(len(row) != len(gram) for row in gram):
            raise ValueError("Gram matrix must be square")
        for row in gram:
            for x in row:
                _check_rational(x)
        return gram


class LatticePairModel(_Strict):
    """Two lattices claimed isospectral, plus the norm of the orthogonal extension vector."""
    name: str
    first: LatticeModel
    second: LatticeModel
    extension_norm: Rational = 1
    provenance: str = ""

    @field_validator("extension_norm")
    @classmethod
    def _positive(cls, value):
        if Fraction(str(value)) <= 0:
            raise ValueError("extension norm must be positive")
        return value


class TorusElementModel(_Strict):
    """x -> Bx + b in lattice coordinates; b is read modulo 1."""
    linear: List[List[int]]
    translation: List[Rational]

    @model_validator(mode="after")
    def _shapes(self):
        n = len(self.linear)
        if any(len(r) != n for r in self.linear) or len(self.translation) != n:
            raise ValueError("linear part must be square and match the translation length")
        for t in self.translation:
            _check_rational(t)
        return self


class CrystalModel(_Strict):
    name: str
    lattice: LatticeModel
    elements: List[TorusElementModel] = []


# ==========================================
# 🧵 Singular-set fixtures
# ==========================================

class StratumModel(_Strict):
    dimension: Literal[0, 1]
    count: int = Field(ge=1)
    isotropy: str
    length: str = "1"
    action: Literal["trivial", "reflection"] = "trivial"
    absorb_cyclic: bool = False
    label: str = ""

    @field_validator("length")
    @classmethod
    def _length(cls, value):
        return _check_expression(value)


class FixtureModel(_Strict):
    name: str
    dimension: int = Field(ge=1)
    volume: Optional[str] = None
    note: str = ""
    strata: List[StratumModel] = []

    @field_validator("volume")
    @classmethod
    def _volume(cls, value):
        return None if value is None else _check_expression(value)


class FixturePairModel(_Strict):
    name: str
    source: str = ""
    first: FixtureModel
    second: FixtureModel


# ==========================================
# 🎬 Scenario files
# ==========================================

class ExpectedValue(_Strict):
    quantity: str
    value: str
    provenance: Literal["PUBLISHED", "DERIVED", "TRIVIAL"] = "DERIVED"


class ScenarioModel(_Strict):
    """A named run: a builtin target (or a data file reference) plus defaults and golden values."""
    name: str
    target: str
    description: str = ""
    gamma: str = "Z"
    cutoff_degree: Optional[int] = Field(default=None, ge=0)
    cutoff_mu: Optional[Rational] = None
    expected: List[ExpectedValue] = []


# ==========================================
# 🧱 Stratum data
# ==========================================

class StratumDataModel(_Strict):
    dimension: int = Field(ge=0)
    isotropy_order: int = Field(ge=2)
    count: int = Field(default=1, ge=1)
    label: str = ""


class StrataPairModel(_Strict):
    """Singular strata of two orbifolds, for the lowest-stratum comparison."""
    name: str
    source: str = ""
    first: List[StratumDataModel] = []
    second: List[StratumDataModel] = []
