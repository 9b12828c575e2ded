"""Linear systems for the weighted counting series and their solutions.

For a validated spec this module assembles the coefficient matrix tying
together F (all allowed words), one G per repeated word (words ending
with it) and one Fa per forbidden word (words whose only forbidden
occurrence is terminal).  A reduced union uses plain correlation
polynomials; a non-reduced union switches to tail correlations plus the
embedded-occurrence corrections.  The reduced case also carries two
closed forms for F via row sums of inverses, asserted to agree with the
direct solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import words as W
from .errors import NumericError, SpecError
from .langmodel import ShiftSpec
from .ratfield import Poly, RatFun, RatMat
from .words import Word


def corr(u, v) -> Poly:
    """Correlation polynomial as an exact Poly."""
    return Poly(W.correlation_poly(u, v))


def tail_corr(u, v, alpha: int) -> Poly:
    """Tail correlation polynomial as an exact Poly (alpha = 0 gives 0)."""
    return Poly(W.tail_correlation_poly(u, v, alpha))


def _require_reduced(spec: ShiftSpec, what: str) -> None:
    if not spec.union_reduced:
        raise SpecError(f"{what} requires a reduced union of forbidden and repeated words")


def _labels(spec: ShiftSpec) -> tuple[str, ...]:
    return tuple(f"G[{''.join(r)}]" for r in spec.repeated_words) + \
        tuple(f"Fa[{''.join(a)}]" for a in spec.forbidden)


def correlation_matrix(spec: ShiftSpec) -> RatMat:
    """The core (l+s)-square matrix of the reduced counting system.

    Entry regimes: repeated-vs-repeated rows carry z(1 - 1/m_j)(r_j,
    r_i)_z minus z^|r_j| on the diagonal, forbidden columns carry
    -z(a_j, r_i)_z, and the forbidden rows repeat the pattern with the
    correlations taken against a_i.
    """
    _require_reduced(spec, "the reduced counting system")
    z = Poly.x()
    reps, fws = spec.repeated, spec.forbidden
    ell, s = len(reps), len(fws)
    targets = [r for r, _ in reps] + list(fws)
    rows = []
    for i in range(ell + s):
        t_i = targets[i]
        row = []
        for j, (r_j, m_j) in enumerate(reps):
            e = z * Fraction(m_j - 1, m_j) * corr(r_j, t_i)
            if i == j:
                e = e - Poly.monomial(len(r_j))
            row.append(RatFun(e))
        for a_j in fws:
            row.append(RatFun(-(z * corr(a_j, t_i))))
        rows.append(row)
    labels = _labels(spec)
    return RatMat.from_rows(rows, labels, labels)


def scaling_diagonal(spec: ShiftSpec) -> RatMat:
    """Diagonal z(1 - 1/m_i) over repeated rows, -z over forbidden rows."""
    z = Poly.x()
    entries = [z * Fraction(m - 1, m) for _, m in spec.repeated] + \
              [-z for _ in spec.forbidden]
    n = len(entries)
    rows = [[RatFun(entries[i]) if i == j else RatFun.zero() for j in range(n)]
            for i in range(n)]
    labels = _labels(spec)
    return RatMat.from_rows(rows, labels, labels)


def conjugate_correlation_matrix(spec: ShiftSpec) -> RatMat:
    """D^-1 P^T D, computed entrywise from the diagonal scaling."""
    _require_reduced(spec, "the conjugate counting system")
    p = correlation_matrix(spec)
    d = scaling_diagonal(spec)
    n = p.nrows
    rows = [[p[(j, i)] * d[(j, j)] / d[(i, i)] for j in range(n)] for i in range(n)]
    labels = _labels(spec)
    return RatMat.from_rows(rows, labels, labels)


def system_matrix(spec: ShiftSpec) -> RatMat:
    """Bordered (1+l+s) matrix of the reduced system, corner z - q."""
    _require_reduced(spec, "the reduced counting system")
    z = Poly.x()
    core = correlation_matrix(spec)
    top = [RatFun(z - Poly.constant(spec.q))]
    for _, m in spec.repeated:
        top.append(RatFun(-(z * Fraction(m - 1, m))))
    for _ in spec.forbidden:
        top.append(RatFun(z))
    rows = [top]
    for i in range(core.nrows):
        rows.append([RatFun.one()] + list(core.entries[i]))
    labels = ("F",) + _labels(spec)
    return RatMat.from_rows(rows, labels, labels)


@dataclass(frozen=True)
class GenFunSystem:
    """Coefficient matrix, right-hand side (z, 0, ..., 0) and unknown labels."""

    matrix: RatMat
    rhs: tuple[RatFun, ...]
    labels: tuple[str, ...]
    mode: str  # "reduced" | "non_reduced"

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "labels": list(self.labels),
            "matrix": self.matrix.to_json(),
            "rhs": [e.to_json() for e in self.rhs],
        }


def embedded_weight(spec: ShiftSpec, a: Word, threshold: int = 0) -> int:
    """Product of multiplicities over repeated words embedded in a.

    One factor m_j per occurrence of r_j inside a beyond the cut-off
    (``threshold`` as in :func:`words.non_terminal_occurrences`).  This
    is the weight a forbidden-tail word sheds relative to the plain
    product weight, so it multiplies; the worked systems, where no
    forbidden word embeds more than one occurrence, cannot tell the
    product from the first-order sum 1 + sum (m_j - 1) gamma.
    """
    out = 1
    for r, m in spec.repeated:
        out *= m ** W.non_terminal_occurrences(a, r, threshold)
    return out


def _non_reduced_matrix(spec: ShiftSpec) -> RatMat:
    """Full bordered matrix when some repeated word sits inside a
    forbidden one: tail correlations plus embedded-occurrence weights."""
    z = Poly.x()
    reps, fws = spec.repeated, spec.forbidden

    top = [RatFun(z - Poly.constant(spec.q))]
    for _, m in reps:
        top.append(RatFun(-(z * Fraction(m - 1, m))))
    for a in fws:
        top.append(RatFun(z * embedded_weight(spec, a)))
    rows = [top]

    for k, (r_k, _) in enumerate(reps):
        row = [RatFun.one()]
        for j, (r_j, m_j) in enumerate(reps):
            e = z * Fraction(m_j - 1, m_j) * corr(r_j, r_k)
            if j == k:
                e = e - Poly.monomial(len(r_j))
            row.append(RatFun(e))
        for a in fws:
            # overhangs past |r_k| would put the whole appended word
            # inside a, impossible for a reduced repeated collection
            e = Poly.zero()
            for t in W.correlation_shifts(a, r_k):
                if t <= len(r_k):
                    e = e + Poly.monomial(t, embedded_weight(spec, a))
            row.append(RatFun(-e))
        rows.append(row)

    for a_k in fws:
        row = [RatFun.one()]
        for r_j, m_j in reps:
            e = z * Fraction(m_j - 1, m_j) * tail_corr(r_j, a_k, len(r_j) - 1)
            row.append(RatFun(e))
        for a_i in fws:
            e = Poly.zero()
            for t in W.correlation_shifts(a_i, a_k):
                e = e + Poly.monomial(t, embedded_weight(spec, a_i, threshold=t))
            row.append(RatFun(-e))
        rows.append(row)

    labels = ("F",) + _labels(spec)
    return RatMat.from_rows(rows, labels, labels)


def build_system(spec: ShiftSpec) -> GenFunSystem:
    """Assemble the counting system in the mode the spec calls for."""
    if spec.union_reduced:
        matrix, mode = system_matrix(spec), "reduced"
    else:
        matrix, mode = _non_reduced_matrix(spec), "non_reduced"
    rhs = (RatFun.x(),) + tuple(RatFun.zero() for _ in range(matrix.nrows - 1))
    return GenFunSystem(matrix, rhs, matrix.row_labels, mode)


@dataclass(frozen=True)
class GenFunSolution:
    """All counting series of a spec, as canonical rational functions."""

    all_words: RatFun                       # F
    ending_with: tuple[tuple[Word, RatFun], ...]   # G per repeated word
    forbidden_tail: tuple[tuple[Word, RatFun], ...]  # Fa per forbidden word
    mode: str

    def series_for(self, name: str) -> RatFun:
        if name == "F":
            return self.all_words
        for w, f in self.ending_with:
            if f"G[{''.join(w)}]" == name:
                return f
        for w, f in self.forbidden_tail:
            if f"Fa[{''.join(w)}]" == name:
                return f
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "F": self.all_words.to_json(),
            "G": {"".join(w): f.to_json() for w, f in self.ending_with},
            "Fa": {"".join(w): f.to_json() for w, f in self.forbidden_tail},
        }


def _row_sum_form(spec: ShiftSpec, core: RatMat) -> RatFun:
    """z over (z - q + weighted row sums of the inverse), the closed form."""
    z = RatFun.x()
    denom = z - RatFun(spec.q)
    if core.nrows:
        sums = core.inverse().row_sums()
        ell = len(spec.repeated)
        for i, (_, m) in enumerate(spec.repeated):
            denom = denom + z * RatFun(Fraction(m - 1, m)) * sums[i]
        for j in range(len(spec.forbidden)):
            denom = denom - z * sums[ell + j]
    return z / denom


def solve_generating_functions(spec: ShiftSpec) -> GenFunSolution:
    """Solve the counting system exactly.

    In the reduced mode the two closed forms (row sums of the inverted
    core matrix and of its conjugate) must reproduce the solved F; a
    mismatch is an internal error, not a tolerance matter.
    """
    system = build_system(spec)
    sol = system.matrix.solve(list(system.rhs))
    f = sol[0]
    ell = len(spec.repeated)
    gs = tuple((r, sol[1 + i]) for i, (r, _) in enumerate(spec.repeated))
    fas = tuple((a, sol[1 + ell + j]) for j, a in enumerate(spec.forbidden))
    if system.mode == "reduced":
        via_rows = _row_sum_form(spec, correlation_matrix(spec))
        via_conj = _row_sum_form(spec, conjugate_correlation_matrix(spec))
        if not (f == via_rows == via_conj):
            raise NumericError("closed forms disagree with the solved system")
    return GenFunSolution(f, gs, fas, system.mode)


def constraint_correction(spec: ShiftSpec) -> RatFun:
    """The rational correction R with F = z / (z - q + R), reduced case.

    Weighted sum of the row sums of the inverted core matrix; zero for
    empty collections.
    """
    _require_reduced(spec, "the constraint correction")
    z = RatFun.x()
    core = correlation_matrix(spec)
    out = RatFun.zero()
    if core.nrows:
        sums = core.inverse().row_sums()
        ell = len(spec.repeated)
        for i, (_, m) in enumerate(spec.repeated):
            out = out + z * RatFun(Fraction(m - 1, m)) * sums[i]
        for j in range(len(spec.forbidden)):
            out = out - z * sums[ell + j]
    return out
