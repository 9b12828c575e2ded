"""Exact algebra substrate: polynomials over big rationals, canonical
rational functions, matrices over the rational-function field, power
series in 1/z, and certified real-root isolation.

All symbolic computation is exact (``fractions.Fraction``); floats only
appear when a caller evaluates at a float point.  Matrix inversion
clears denominators and runs fraction-free (Bareiss) elimination over
the polynomial ring, so ``M @ M.inverse()`` is the identity exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NumericError, PoleError, RootBracketError, SingularMatrixError

Rational = Fraction | int


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Poly:
    """Univariate polynomial with exact rational coefficients, ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational] = ()):
        cs = [_fr(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def one(cls) -> "Poly":
        return cls((1,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: Rational) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c: Rational = 1) -> "Poly":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs])
        if self.is_zero or other.is_zero:
            return Poly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        out, base = Poly.one(), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "Poly":
        """Multiply by z**k."""
        if self.is_zero:
            return self
        return Poly([Fraction(0)] * k + list(self.coeffs))

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Horner evaluation; exact for Fraction/int input, float for float."""
        if isinstance(x, float):
            acc = 0.0
            for c in reversed(self.coeffs):
                acc = acc * x + float(c)
            return acc
        x = _fr(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(0, self.degree - other.degree + 1)
        rem = list(self.coeffs)
        d, lead = other.degree, other.leading
        while len(rem) - 1 >= d and any(rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            k = len(rem) - 1 - d
            f = rem[-1] / lead
            q[k] = f
            for i, c in enumerate(other.coeffs):
                rem[k + i] -= f * c
            rem.pop()
        return Poly(q), Poly(rem)

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise NumericError("exact polynomial division left a remainder")
        return q

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        return self * (1 / self.leading)

    @staticmethod
    def gcd(a: "Poly", b: "Poly") -> "Poly":
        while not b.is_zero:
            a, b = b, a.divmod(b)[1]
            # keep coefficients tame; monic rescale is harmless for a gcd
            if not b.is_zero:
                b = b.monic()
        return a.monic() if not a.is_zero else a

    @staticmethod
    def lcm(a: "Poly", b: "Poly") -> "Poly":
        if a.is_zero or b.is_zero:
            return Poly.zero()
        return (a * b).exact_div(Poly.gcd(a, b)).monic()

    def deflate(self, root: Rational) -> "Poly":
        """Exact division by (z - root); the root must be exact."""
        r = _fr(root)
        out: list[Fraction] = [Fraction(0)] * self.degree
        acc = Fraction(0)
        for k in range(self.degree, 0, -1):
            acc = self.coeff(k) + acc * r
            out[k - 1] = acc
        if self.coeff(0) + acc * r != 0:
            raise NumericError(f"{root} is not a root; cannot deflate")
        return Poly(out)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if c == 0:
                continue
            if i == 0:
                parts.append(f"{c}")
            elif i == 1:
                parts.append(f"{c}*z" if c != 1 else "z")
            else:
                parts.append(f"{c}*z^{i}" if c != 1 else f"z^{i}")
        return " + ".join(parts).replace("+ -", "- ")


class RatFun:
    """Rational function in canonical form: coprime parts, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly.constant(num) if isinstance(num, (int, Fraction)) else Poly(num)
        if den is None:
            den = Poly.one()
        else:
            den = den if isinstance(den, Poly) else Poly.constant(den) if isinstance(den, (int, Fraction)) else Poly(den)
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            self.num, self.den = Poly.zero(), Poly.one()
            return
        g = Poly.gcd(num, den)
        if g.degree > 0:
            num, den = num.exact_div(g), den.exact_div(g)
        lead = den.leading
        self.num = num * (1 / lead)
        self.den = den * (1 / lead)

    @classmethod
    def zero(cls) -> "RatFun":
        return cls(Poly.zero())

    @classmethod
    def one(cls) -> "RatFun":
        return cls(Poly.one())

    @classmethod
    def x(cls) -> "RatFun":
        return cls(Poly.x())

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RatFun(other)
        return isinstance(other, RatFun) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den)

    @staticmethod
    def _coerce(x) -> "RatFun":
        return x if isinstance(x, RatFun) else RatFun(x)

    def __add__(self, other) -> "RatFun":
        other = self._coerce(other)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RatFun":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RatFun":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RatFun":
        other = self._coerce(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFun":
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RatFun":
        return self._coerce(other) / self

    def derivative(self) -> "RatFun":
        return RatFun(self.num.derivative() * self.den - self.num * self.den.derivative(),
                      self.den * self.den)

    def __call__(self, x):
        """Evaluate; exact with an exact pole check for Fraction input."""
        if isinstance(x, float):
            return self.num(x) / self.den(x)
        d = self.den(x)
        if d == 0:
            raise PoleError(f"evaluation at pole z={x}")
        return self.num(x) / d

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    def __repr__(self) -> str:
        if self.den == Poly.one():
            return repr(self.num)
        return f"({self.num!r}) / ({self.den!r})"


@dataclass(frozen=True)
class RatMat:
    """Rectangular matrix of rational functions with optional index labels."""

    entries: tuple[tuple[RatFun, ...], ...]
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], row_labels=(), col_labels=()) -> "RatMat":
        ent = tuple(tuple(RatFun._coerce(e) for e in row) for row in rows)
        widths = {len(r) for r in ent}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        return cls(ent, tuple(row_labels), tuple(col_labels))

    @classmethod
    def identity(cls, n: int) -> "RatMat":
        return cls.from_rows([[RatFun.one() if i == j else RatFun.zero() for j in range(n)]
                              for i in range(n)])

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, ij: tuple[int, int]) -> RatFun:
        return self.entries[ij[0]][ij[1]]

    def __matmul__(self, other: "RatMat") -> "RatMat":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        rows = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = RatFun.zero()
                for k in range(self.ncols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(row)
        return RatMat.from_rows(rows, self.row_labels, other.col_labels)

    def transpose(self) -> "RatMat":
        return RatMat(tuple(zip(*self.entries)), self.col_labels, self.row_labels)

    def row_sums(self) -> list[RatFun]:
        out = []
        for row in self.entries:
            acc = RatFun.zero()
            for e in row:
                acc = acc + e
            out.append(acc)
        return out

    def _cleared_rows(self, extra: Sequence[Sequence[RatFun]]) -> tuple[list[list[Poly]], list[list[Poly]]]:
        """Scale each row (and its right-hand entries) by the row's
        denominator lcm; returns polynomial rows for fraction-free work."""
        left, right = [], []
        for i in range(self.nrows):
            row = list(self.entries[i])
            ext = list(extra[i])
            d = Poly.one()
            for e in row + ext:
                d = Poly.lcm(d, e.den)
            left.append([e.num * d.exact_div(e.den) for e in row])
            right.append([e.num * d.exact_div(e.den) for e in ext])
        return left, right

    def inverse(self) -> "RatMat":
        """Exact inverse via fraction-free elimination over the polynomial ring."""
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        if n == 0:
            return self
        ident = RatMat.identity(n)
        left, right = self._cleared_rows(ident.entries)
        sol = _bareiss_solve(left, right)
        return RatMat.from_rows(sol, self.col_labels, self.row_labels)

    def solve(self, rhs: Sequence[RatFun]) -> list[RatFun]:
        """Solve self * x = rhs exactly."""
        if self.nrows != self.ncols or len(rhs) != self.nrows:
            raise ValueError("shape mismatch in solve")
        extra = [[RatFun._coerce(rhs[i])] for i in range(self.nrows)]
        left, right = self._cleared_rows(extra)
        sol = _bareiss_solve(left, right)
        return [row[0] for row in sol]

    def evaluate(self, x) -> list[list]:
        """Entrywise evaluation at a scalar (Fraction exact, float numeric)."""
        return [[e(x) for e in row] for row in self.entries]

    def to_json(self) -> dict:
        return {
            "rows": list(self.row_labels),
            "cols": list(self.col_labels),
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }


def _bareiss_solve(a: list[list[Poly]], rhs: list[list[Poly]]) -> list[list[RatFun]]:
    """Fraction-free forward elimination, then back substitution in the field.

    ``a`` is square with polynomial entries; ``rhs`` holds one or more
    right-hand columns per row.  Rows are consumed destructively.
    """
    n = len(a)
    m = len(rhs[0]) if rhs else 0
    aug = [list(a[i]) + list(rhs[i]) for i in range(n)]
    width = n + m
    prev = Poly.one()
    for k in range(n):
        piv = next((i for i in range(k, n) if not aug[i][k].is_zero), None)
        if piv is None:
            raise SingularMatrixError("singular matrix in exact elimination")
        if piv != k:
            aug[k], aug[piv] = aug[piv], aug[k]
        pivot = aug[k][k]
        for i in range(k + 1, n):
            head = aug[i][k]
            for j in range(k + 1, width):
                aug[i][j] = (pivot * aug[i][j] - head * aug[k][j]).exact_div(prev)
            aug[i][k] = Poly.zero()
        prev = pivot
    out: list[list[RatFun]] = [[RatFun.zero()] * m for _ in range(n)]
    for i in range(n - 1, -1, -1):
        diag = RatFun(aug[i][i])
        for col in range(m):
            acc = RatFun(aug[i][n + col])
            for j in range(i + 1, n):
                acc = acc - RatFun(aug[i][j]) * out[j][col]
            out[i][col] = acc / diag
    return out


def solve_numeric(matrix: Sequence[Sequence], rhs: Sequence) -> list:
    """Gaussian elimination generic over exact rationals or floats.

    Used for evaluated (scalar) systems; keeps exactness when all the
    inputs are Fractions.  Raises SingularMatrixError on pivot failure.
    """
    n = len(matrix)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0:
            raise SingularMatrixError("singular scalar system")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n + 1):
                    a[i][j] -= f * a[k][j]
    out = [None] * n
    for i in range(n - 1, -1, -1):
        acc = a[i][n]
        for j in range(i + 1, n):
            acc -= a[i][j] * out[j]
        out[i] = acc / a[i][i]
    return out


def series_coeffs(f: RatFun, n_max: int) -> list[Fraction]:
    """Coefficients of z**-n, n = 0..n_max, of the expansion at infinity.

    Requires deg(num) <= deg(den); this is exact long division in the
    variable w = 1/z.
    """
    if f.is_zero:
        return [Fraction(0)] * (n_max + 1)
    dn, dd = f.num.degree, f.den.degree
    if dn > dd:
        raise NumericError("series in 1/z needs numerator degree <= denominator degree")
    num_r = [f.num.coeff(dd - k) for k in range(dd + 1)]
    den_r = [f.den.coeff(dd - k) for k in range(dd + 1)]
    lead = den_r[0]
    out: list[Fraction] = []
    for k in range(n_max + 1):
        acc = num_r[k] if k < len(num_r) else Fraction(0)
        for j in range(1, min(k, dd) + 1):
            acc -= den_r[j] * out[k - j]
        out.append(acc / lead)
    return out


@dataclass(frozen=True)
class RootCertificate:
    """Isolating interval for a real root, with the exact value when known."""

    value: float
    low: Fraction
    high: Fraction
    exact: Fraction | None = None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def scalar(self):
        """Preferred evaluation point: exact Fraction when certified, else float."""
        return self.exact if self.exact is not None else self.value

    def to_json(self) -> dict:
        return {
            "value": format(self.value, ".15g"),
            "low": str(self.low),
            "high": str(self.high),
            "exact": None if self.exact is None else str(self.exact),
        }


def _squarefree(p: Poly) -> Poly:
    g = Poly.gcd(p, p.derivative())
    return p.exact_div(g) if g.degree > 0 else p


def _sturm_chain(p: Poly) -> list[Poly]:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero and chain[-1].degree > 0:
        rem = chain[-2].divmod(chain[-1])[1]
        if rem.is_zero:
            break
        # positive rescale keeps the sign sequence intact
        chain.append(-rem * (1 / abs(rem.leading)))
    if chain[-1].is_zero:
        chain.pop()
    return chain


def _variations(chain: list[Poly], x: Fraction) -> int:
    signs = []
    for s in chain:
        v = s(x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def largest_real_zero(f: RatFun | Poly, lo, hi,
                      width: Fraction = Fraction(1, 10 ** 12)) -> RootCertificate:
    """Largest real root of the reduced numerator of ``f`` in [lo, hi].

    Sturm counting isolates the root; bisection shrinks the bracket to
    ``width``.  Exact rational hits (including integer roots) are
    detected and certified in the result.
    """
    g = f.num if isinstance(f, RatFun) else f
    if g.is_zero or g.degree < 1:
        raise RootBracketError("numerator has no roots")
    g = _squarefree(g)
    a, b = _fr(lo), _fr(hi)
    if a >= b:
        raise ValueError("empty bracket")
    exact: Fraction | None = None
    if g(a) == 0:
        exact = a
        g = g.deflate(a)
    if g.degree < 1:
        if exact is not None:
            return RootCertificate(float(exact), exact, exact, exact)
        raise RootBracketError("no real root in bracket")
    chain = _sturm_chain(g)
    if _variations(chain, a) - _variations(chain, b) == 0:
        if exact is not None:
            return RootCertificate(float(exact), exact, exact, exact)
        raise RootBracketError(f"no real root in ({a}, {b}]")
    while b - a > width:
        mid = (a + b) / 2
        if g(mid) == 0:
            # exact hit: keep it unless a larger root remains to the right
            quot = g.deflate(mid)
            if quot.degree >= 1:
                chain2 = _sturm_chain(quot)
                if _variations(chain2, mid) - _variations(chain2, b) > 0:
                    g, chain, a = quot, chain2, mid
                    continue
            return RootCertificate(float(mid), mid, mid, mid)
        if _variations(chain, mid) - _variations(chain, b) > 0:
            a = mid
        else:
            b = mid
    # integer (or bracket-endpoint) exactness inside the final interval
    k = Fraction(math.floor(b))
    if a < k <= b and g(k) == 0:
        return RootCertificate(float(k), k, k, k)
    mid = (a + b) / 2
    return RootCertificate(float(mid), a, b, None)
