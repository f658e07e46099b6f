"""
Exact arithmetic substrate: rationals, cyclotomic numbers, small dense matrices.

Everything here is immutable once built. Integers and `fractions.Fraction` carry the
rational case; `Cyclotomic` carries elements of Q(zeta_N) in the power basis
1, zeta, ..., zeta^(phi(N)-1) reduced modulo the N-th cyclotomic polynomial.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy import Poly, Rational, Symbol, cyclotomic_poly, exp, I, pi
from sympy.functions.combinatorial.numbers import mobius, totient

from core.errors import InputParseError, InternalConsistencyError

logger = logging.getLogger("ExactNum")

_X = Symbol("x")


# ==========================================
# 🔢 Scalars
# ==========================================

@lru_cache(maxsize=None)
def _phi_coeffs(order: int) -> Tuple[int, ...]:
    """Coefficients of the order-th cyclotomic polynomial, constant term first."""
    poly = Poly(cyclotomic_poly(order, _X), _X)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _reduce(vec: List[Fraction], order: int) -> Tuple[Fraction, ...]:
    phi = _phi_coeffs(order)
    deg = len(phi) - 1
    for d in range(len(vec) - 1, deg - 1, -1):
        c = vec[d]
        if c:
            vec[d] = Fraction(0)
            shift = d - deg
            for i in range(deg):
                if phi[i]:
                    vec[shift + i] -= c * phi[i]
    out = vec[:deg] + [Fraction(0)] * max(0, deg - len(vec))
    return tuple(out)


class Cyclotomic:
    """An element of Q(zeta_order), canonical in the reduced power basis."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence):
        if order < 1:
            raise InputParseError(f"cyclotomic order must be positive, got {order}")
        self.order = order
        self.coeffs = _reduce([Fraction(c) for c in coeffs], order)

    # --- constructors ---
    @classmethod
    def root_of_unity(cls, order: int, k: int = 1) -> "Cyclotomic":
        return cls.from_exponents(order, {k % order: 1})

    @classmethod
    def from_exponents(cls, order: int, terms) -> "Cyclotomic":
        """Sum of c * zeta_order**e over the (exponent, coefficient) pairs in `terms`."""
        vec = [Fraction(0)] * order
        for e, c in dict(terms).items():
            vec[e % order] += Fraction(c)
        return cls(order, vec)

    # --- structure ---
    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_part(self) -> Fraction:
        if not self.is_rational():
            raise InternalConsistencyError(f"expected a rational value, got {self.to_sympy()}")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def lift(self, order: int) -> "Cyclotomic":
        if order == self.order:
            return self
        if order % self.order:
            raise InputParseError(f"cannot lift Q(zeta_{self.order}) into Q(zeta_{order})")
        step = order // self.order
        return Cyclotomic.from_exponents(order, {j * step: c for j, c in enumerate(self.coeffs) if c})

    def galois(self, k: int) -> "Cyclotomic":
        """Image under zeta -> zeta**k (k coprime to the order)."""
        if gcd(k, self.order) != 1:
            raise InputParseError(f"{k} is not a unit modulo {self.order}")
        vec = [Fraction(0)] * self.order
        for j, c in enumerate(self.coeffs):
            if c:
                vec[(j * k) % self.order] += c
        return Cyclotomic(self.order, vec)

    def conjugate(self) -> "Cyclotomic":
        # Q(zeta_1) = Q(zeta_2) = Q
        return self.galois(self.order - 1) if self.order > 2 else self

    def normalized_trace(self) -> Fraction:
        """Tr(alpha)/[Q(zeta):Q]; independent of the ambient order."""
        total = Fraction(0)
        for j, c in enumerate(self.coeffs):
            if c:
                m = self.order // gcd(j, self.order)
                total += c * Fraction(int(mobius(m)), int(totient(m)))
        return total

    def inverse(self) -> "Cyclotomic":
        if all(c == 0 for c in self.coeffs):
            raise ZeroDivisionError("inverse of zero cyclotomic")
        others = Cyclotomic(self.order, [1])
        for k in range(2, self.order):
            if gcd(k, self.order) == 1:
                others = others * self.galois(k)
        norm = (self * others).rational_part()
        return others * Fraction(1) / norm

    def to_sympy(self):
        return sum((Rational(c.numerator, c.denominator) * exp(2 * pi * I * j / self.order)
                    for j, c in enumerate(self.coeffs) if c), Rational(0))

    # --- arithmetic ---
    def _common(self, other) -> Tuple["Cyclotomic", "Cyclotomic"]:
        if isinstance(other, Cyclotomic):
            if other.order == self.order:
                return self, other
            n = self.order * other.order // gcd(self.order, other.order)
            return self.lift(n), other.lift(n)
        if isinstance(other, (int, Fraction)):
            return self, Cyclotomic(self.order, [other])
        return NotImplemented, NotImplemented

    def __add__(self, other):
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        return Cyclotomic(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, (Cyclotomic, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [c * other for c in self.coeffs])
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        vec = [Fraction(0)] * max(1, 2 * len(a.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        vec[i + j] += x * y
        return Cyclotomic(a.order, vec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [c / other for c in self.coeffs])
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.rational_part() == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational_part())
        return hash(("cyclotomic", self.normalized_trace()))

    def __repr__(self):
        return f"Cyclotomic({self.order}, {[str(c) for c in self.coeffs]})"


Scalar = Union[int, Fraction, Cyclotomic]


def normalize_scalar(x) -> Scalar:
    """Canonical scalar: ints stay ints, integral fractions become ints, rational cyclotomics collapse."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Cyclotomic):
        return normalize_scalar(x.rational_part()) if x.is_rational() else x
    if isinstance(x, str):
        return normalize_scalar(parse_rational(x))
    raise InputParseError(f"not an exact scalar: {x!r}")


def parse_rational(text) -> Fraction:
    """Accept ints, Fractions and strings of the form "p/q"."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputParseError(f"not a rational number: {text!r} ({e})") from e


def is_rational_scalar(x: Scalar) -> bool:
    return isinstance(x, (int, Fraction)) or (isinstance(x, Cyclotomic) and x.is_rational())


def to_fraction(x: Scalar) -> Fraction:
    if isinstance(x, Cyclotomic):
        return x.rational_part()
    return Fraction(x)


def _exact_div(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        return q if r == 0 else Fraction(a, b)
    if isinstance(b, Cyclotomic):
        return normalize_scalar(b.inverse() * a)
    return normalize_scalar(a / b)


def _conj(x: Scalar) -> Scalar:
    return x.conjugate() if isinstance(x, Cyclotomic) else x


# ==========================================
# 🧱 Matrices
# ==========================================

class ExactMatrix:
    """Dense matrix of exact scalars. Rectangular shapes are allowed for stacking."""

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: Optional[int] = None):
        self.rows = tuple(tuple(normalize_scalar(x) for x in row) for row in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else (ncols or 0)
        if any(len(r) != self.ncols for r in self.rows):
            raise InputParseError("ragged matrix rows")
        self._hash = None

    # --- constructors ---
    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(((1 if i == j else 0) for j in range(n)) for i in range(n)) if n else cls((), 0)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ExactMatrix":
        return cls(((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def diagonal(cls, entries: Sequence) -> "ExactMatrix":
        n = len(entries)
        return cls(((entries[i] if i == j else 0) for j in range(n)) for i in range(n)) if n else cls((), 0)

    @classmethod
    def vstack(cls, mats: Sequence["ExactMatrix"], ncols: Optional[int] = None) -> "ExactMatrix":
        widths = {m.ncols for m in mats}
        if len(widths) > 1:
            raise InputParseError(f"dimension mismatch while stacking: {sorted(widths)}")
        width = widths.pop() if widths else (ncols or 0)
        return cls((row for m in mats for row in m.rows), width)

    # --- shape ---
    @property
    def n(self) -> int:
        if self.nrows != self.ncols:
            raise InputParseError(f"matrix is not square ({self.nrows}x{self.ncols})")
        return self.nrows

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def column(self, j: int) -> Tuple[Scalar, ...]:
        return tuple(r[j] for r in self.rows)

    # --- arithmetic ---
    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise InputParseError(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        return ExactMatrix(
            (sum((a * b for a, b in zip(row, col) if a and b), 0) for col in cols) for row in self.rows
        ) if self.rows else ExactMatrix.zeros(0, other.ncols)

    def apply(self, vec: Sequence[Scalar]) -> Tuple[Scalar, ...]:
        return tuple(normalize_scalar(sum((a * b for a, b in zip(row, vec) if a and b), 0)) for row in self.rows)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix(((a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix(((a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ncols)

    def scale(self, c: Scalar) -> "ExactMatrix":
        return ExactMatrix(((c * a for a in r) for r in self.rows), self.ncols)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(zip(*self.rows), self.nrows) if self.rows else ExactMatrix.zeros(self.ncols, 0)

    def conjugate_transpose(self) -> "ExactMatrix":
        return ExactMatrix(((_conj(x) for x in col) for col in zip(*self.rows)), self.nrows) \
            if self.rows else ExactMatrix.zeros(self.ncols, 0)

    def trace(self) -> Scalar:
        return normalize_scalar(sum((self.rows[i][i] for i in range(self.n)), 0))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(((self.rows[i][j] for j in cols) for i in rows), len(cols))

    # --- predicates ---
    def is_orthogonal(self) -> bool:
        """M* M = I (transpose for real entries, conjugate transpose for cyclotomic ones)."""
        return self.is_square() and self.conjugate_transpose() @ self == ExactMatrix.identity(self.nrows)

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self.rows for x in r)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols, self.rows))
        return self._hash

    def __repr__(self):
        return f"ExactMatrix({[[str(x) for x in r] for r in self.rows]})"

    # --- elimination ---
    def rank(self) -> int:
        """Fraction-free (Bareiss) elimination; exact over Z, Q and Q(zeta)."""
        m = [list(r) for r in self.rows]
        nr, nc = self.nrows, self.ncols
        rank, prev = 0, 1
        for c in range(nc):
            if rank == nr:
                break
            piv = next((i for i in range(rank, nr) if m[i][c] != 0), None)
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            p = m[rank][c]
            for i in range(rank + 1, nr):
                a = m[i][c]
                for j in range(c + 1, nc):
                    m[i][j] = _exact_div(m[i][j] * p - a * m[rank][j], prev)
                m[i][c] = 0
            prev = p
            rank += 1
        return rank

    def determinant(self) -> Scalar:
        n = self.n
        if n == 0:
            return 1
        m = [list(r) for r in self.rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            piv = next((i for i in range(k, n) if m[i][k] != 0), None)
            if piv is None:
                return 0
            if piv != k:
                m[k], m[piv] = m[piv], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = _exact_div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
            prev = m[k][k]
        return normalize_scalar(sign * m[n - 1][n - 1])

    def _rref(self, rhs: Optional[List[List[Scalar]]] = None):
        m = [list(r) for r in self.rows]
        pivots: List[int] = []
        r = 0
        for c in range(self.ncols):
            piv = next((i for i in range(r, self.nrows) if m[i][c] != 0), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            if rhs is not None:
                rhs[r], rhs[piv] = rhs[piv], rhs[r]
            p = m[r][c]
            m[r] = [_exact_div(x, p) for x in m[r]]
            if rhs is not None:
                rhs[r] = [_exact_div(x, p) for x in rhs[r]]
            for i in range(self.nrows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [normalize_scalar(a - f * b) for a, b in zip(m[i], m[r])]
                    if rhs is not None:
                        rhs[i] = [normalize_scalar(a - f * b) for a, b in zip(rhs[i], rhs[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return m, pivots, rhs

    def nullspace(self) -> List[Tuple[Scalar, ...]]:
        """Basis of {x : Mx = 0}, one vector per free column (free entry 1, other free entries 0)."""
        m, pivots, _ = self._rref()
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for f in free:
            vec: List[Scalar] = [0] * self.ncols
            vec[f] = 1
            for row, pc in enumerate(pivots):
                vec[pc] = normalize_scalar(-m[row][f])
            basis.append(tuple(vec))
        return basis

    def inverse(self) -> "ExactMatrix":
        n = self.n
        ident = [list(r) for r in ExactMatrix.identity(n).rows]
        m, pivots, rhs = self._rref(ident)
        if len(pivots) != n:
            raise InputParseError("matrix is singular")
        return ExactMatrix(rhs, n)

    def solve(self, rhs: "ExactMatrix") -> "ExactMatrix":
        """X with self @ X = rhs for square nonsingular self."""
        return self.inverse() @ rhs

    # --- characteristic data ---
    def det_one_minus_t(self) -> Tuple[Scalar, ...]:
        """Coefficients d_0..d_n of det(I - tM) (Faddeev-LeVerrier)."""
        n = self.n
        c: List[Scalar] = [0] * (n + 1)
        c[n] = 1
        mk = ExactMatrix.zeros(n, n)
        ident = ExactMatrix.identity(n)
        for k in range(1, n + 1):
            mk = self @ mk + ident.scale(c[n - k + 1])
            c[n - k] = _exact_div(-(self @ mk).trace(), k)
        return tuple(c[n - j] for j in range(n + 1))


# ==========================================
# 📈 Series
# ==========================================

@dataclass(frozen=True)
class IntegerSeries:
    """Truncated power series; coefficients are algebraic integers (ints for integer matrices)."""
    coefficients: Tuple[Scalar, ...]
    k_max: int

    def __post_init__(self):
        if self.k_max < 0:
            raise InputParseError(f"truncation degree must be >= 0, got {self.k_max}")
        if len(self.coefficients) != self.k_max + 1:
            raise InternalConsistencyError("series length does not match its truncation degree")

    def __getitem__(self, k: int) -> Scalar:
        if k < 0:
            return 0
        if k > self.k_max:
            raise IndexError(f"degree {k} beyond truncation {self.k_max}")
        return self.coefficients[k]


def series_inverse(denominator: Sequence[Scalar], k_max: int) -> IntegerSeries:
    """Series of 1/d(t) for d(0) = 1, up to t**k_max."""
    if k_max < 0:
        raise InputParseError(f"k_max must be >= 0, got {k_max}")
    if not denominator or denominator[0] != 1:
        raise InternalConsistencyError("series inverse needs constant term 1")
    out: List[Scalar] = [1]
    for k in range(1, k_max + 1):
        acc: Scalar = 0
        for j in range(1, min(k, len(denominator) - 1) + 1):
            dj = denominator[j]
            if dj != 0:
                acc = acc - dj * out[k - j]
        out.append(normalize_scalar(acc))
    return IntegerSeries(tuple(out), k_max)


def sym_power_trace_series(m: ExactMatrix, k_max: int) -> IntegerSeries:
    """Traces of M on degree-k polynomials, k <= k_max: the series inverse of det(I - tM)."""
    if not m.is_square():
        raise InputParseError(f"matrix is not square ({m.nrows}x{m.ncols})")
    return series_inverse(m.det_one_minus_t(), k_max)


def fixed_subspace_dim(mats: Sequence[ExactMatrix], n: Optional[int] = None) -> int:
    """Dimension of the common +1 eigenspace."""
    dims = {m.nrows for m in mats} | {m.ncols for m in mats}
    if n is not None:
        dims.add(n)
    if len(dims) > 1:
        raise InputParseError(f"dimension mismatch: {sorted(dims)}")
    if not mats:
        return n or 0
    size = dims.pop()
    ident = ExactMatrix.identity(size)
    return size - ExactMatrix.vstack([m - ident for m in mats], size).rank()


# ==========================================
# 🧮 Smith normal form
# ==========================================

def smith_normal_form(a) -> Tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """(U, D, V) with U A V = D, U and V unimodular, D diagonal with d1 | d2 | ... and d_i >= 0."""
    rows = a.rows if isinstance(a, ExactMatrix) else tuple(tuple(r) for r in a)
    nr = len(rows)
    nc = (a.ncols if isinstance(a, ExactMatrix) else (len(rows[0]) if rows else 0))
    if any(not isinstance(x, int) for r in rows for x in r):
        raise InputParseError("Smith normal form needs an integer matrix")
    d = [list(r) for r in rows]
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        d[dst] = [x + q * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in d:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    t = 0
    while t < min(nr, nc):
        entries = [(abs(d[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if d[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            p = d[t][t]
            for i in range(t + 1, nr):
                if d[i][t]:
                    add_row(i, t, -(d[i][t] // p))
            for j in range(t + 1, nc):
                if d[t][j]:
                    add_col(j, t, -(d[t][j] // p))
            rest = [(abs(d[i][t]), i, t) for i in range(t + 1, nr) if d[i][t]] + \
                   [(abs(d[t][j]), t, j) for j in range(t + 1, nc) if d[t][j]]
            if rest:
                _, i1, j1 = min(rest)
                swap_rows(t, i1)
                swap_cols(t, j1)
                continue
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if d[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return ExactMatrix(u, nr), ExactMatrix(d, nc), ExactMatrix(v, nc)
