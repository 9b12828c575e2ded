"""Adjacency matrices of a spec, Perron data, entropy, and the
normalization identity.

The Perron root always travels two independent routes: the largest real
zero of the exact correction function (or the largest real pole of the
solved counting series in the non-reduced mode), and a certified
power-iteration enclosure on the integer matrix.  The routes must agree
to 1e-9 or the computation refuses to answer.

Eigenvectors come from the correlation formulas; when the root is
certified exact the whole pipeline stays in big rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import genfun, words as W
from .errors import NumericError, RouteMismatchError, SpecError
from .langmodel import (DEFAULT_BUDGET, ShiftSpec, allowed_words,
                        extend_repeated_to_full_length, leading_multiplicity,
                        multiplicity, weighted_count)
from .ratfield import Poly, RatFun, RootCertificate, largest_real_zero, solve_numeric
from .words import Word

THETA_TOL = 1e-9
POWER_TOL = 1e-12
POWER_CAP = 10 ** 5


@dataclass(frozen=True)
class AdjMatrix:
    """Non-negative integer matrix indexed by labeled words."""

    labels: tuple[Word, ...]
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if any(len(row) != len(self.labels) for row in self.entries):
            raise ValueError("entries do not match the label count")

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: Sequence[str]) -> int:
        return self.labels.index(W.word(label))

    def __getitem__(self, xy: tuple[Sequence[str], Sequence[str]]) -> int:
        return self.entries[self.index(xy[0])][self.index(xy[1])]

    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.entries)

    @property
    def max_row_sum(self) -> int:
        return max(self.row_sums(), default=0)

    def binary(self) -> "AdjMatrix":
        """The compatible 0/1 matrix (same zero pattern)."""
        return AdjMatrix(self.labels,
                         tuple(tuple(1 if e else 0 for e in row) for row in self.entries))

    def power_sum(self, k: int) -> int:
        """Sum of all entries of the k-th power, exact."""
        n = self.size
        mat = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        base = [list(row) for row in self.entries]
        e = k
        while e:
            if e & 1:
                mat = _intmul(mat, base)
            base = _intmul(base, base)
            e >>= 1
        return sum(sum(row) for row in mat)

    def scaled(self, factor: int) -> "AdjMatrix":
        return AdjMatrix(self.labels,
                         tuple(tuple(e * factor for e in row) for row in self.entries))

    def to_json(self) -> dict:
        return {"labels": ["".join(x) for x in self.labels],
                "entries": [list(row) for row in self.entries]}


def _intmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    n = len(a)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            aik = a[i][k]
            if aik:
                row = b[k]
                oro = out[i]
                for j in range(n):
                    oro[j] += aik * row[j]
    return out


def adjacency_matrix(spec: ShiftSpec) -> AdjMatrix:
    """The edge-count matrix: labels are allowed words of length p-1 and
    the (X, Y) entry is the leading multiplicity of the splice X*Y when
    it is allowed, else 0."""
    labels = sorted(allowed_words(spec.p - 1, spec), key=spec.sort_key)
    if not labels:
        raise SpecError("no allowed words of length p-1; spec is over-constrained")
    rows = []
    for x in labels:
        row = []
        for y in labels:
            xy = W.star(x, y)
            if xy is None or not spec.is_allowed(xy):
                row.append(0)
            else:
                row.append(leading_multiplicity(xy, spec))
        rows.append(tuple(row))
    return AdjMatrix(tuple(labels), tuple(rows))


def multiplicity_matrix(spec: ShiftSpec) -> AdjMatrix:
    """The naive variant weighting each splice by its full multiplicity.

    Coincides with :func:`adjacency_matrix` exactly when all repeated
    words have length p; otherwise it overcounts paths.
    """
    labels = sorted(allowed_words(spec.p - 1, spec), key=spec.sort_key)
    if not labels:
        raise SpecError("no allowed words of length p-1; spec is over-constrained")
    rows = []
    for x in labels:
        row = []
        for y in labels:
            xy = W.star(x, y)
            row.append(0 if xy is None else multiplicity(xy, spec))
        rows.append(tuple(row))
    return AdjMatrix(tuple(labels), tuple(rows))


def is_irreducible(mat: AdjMatrix) -> bool:
    """Strong connectivity of the positive-entry digraph."""
    n = mat.size
    if n == 0:
        return False
    if n == 1:
        return mat.entries[0][0] > 0

    def reach(transpose: bool) -> set[int]:
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in range(n):
                e = mat.entries[j][i] if transpose else mat.entries[i][j]
                if e and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    return len(reach(False)) == n and len(reach(True)) == n


@dataclass(frozen=True)
class PowerResult:
    theta: float
    lower: float
    upper: float
    vector: tuple[float, ...]
    iterations: int


def power_iteration(mat: AdjMatrix, tol: float = POWER_TOL,
                    max_iter: int = POWER_CAP) -> PowerResult:
    """Certified enclosure of the Perron root of an irreducible matrix.

    Iterates on A + I (primitive, so no period trouble) and stops when
    the min/max Rayleigh-type ratios pinch to relative ``tol``; those
    ratios bracket the true eigenvalue at every step.
    """
    n = mat.size
    b = np.array(mat.entries, dtype=float) + np.eye(n)
    v = np.ones(n)
    lower, upper = 0.0, math.inf
    for it in range(1, max_iter + 1):
        w = b @ v
        ratios = w / v
        lower, upper = float(ratios.min()), float(ratios.max())
        if upper - lower <= tol * lower:
            v = w / w.sum()
            return PowerResult((lower + upper) / 2 - 1.0, lower - 1.0, upper - 1.0,
                               tuple(v), it)
        v = w / w.sum()
    raise NumericError(f"power iteration did not converge in {max_iter} steps "
                       f"(enclosure [{lower - 1}, {upper - 1}])")


def _spectral_radius_float(mat: AdjMatrix) -> float:
    """Dense eigenvalue fallback for reducible matrices (override path)."""
    return float(max(abs(np.linalg.eigvals(np.array(mat.entries, dtype=float)))))


@dataclass(frozen=True)
class PerronResult:
    """Perron root with its exact certificate and the iterative cross-check."""

    theta: float
    certificate: RootCertificate
    theta_iterative: float
    route_gap: float
    irreducible: bool

    @property
    def exact(self) -> Fraction | None:
        return self.certificate.exact

    def scalar(self):
        """Fraction when exactly certified, float otherwise."""
        return self.certificate.scalar()

    def to_json(self) -> dict:
        return {
            "theta": format(self.theta, ".15g"),
            "certificate": self.certificate.to_json(),
            "theta_iterative": format(self.theta_iterative, ".15g"),
            "route_gap": format(self.route_gap, ".3g"),
            "irreducible": self.irreducible,
        }


def _combinatorial_root(spec: ShiftSpec, mat: AdjMatrix,
                        bracket: tuple | None) -> RootCertificate:
    # the root never exceeds the maximal row sum of a non-negative matrix
    lo, hi = bracket if bracket else (Fraction(1), Fraction(mat.max_row_sum + 1))
    if spec.union_reduced:
        target = RatFun.x() - RatFun(spec.q) + genfun.constraint_correction(spec)
        return largest_real_zero(target, lo, hi)
    f = genfun.solve_generating_functions(spec).all_words
    if f.den.degree < 1:
        raise NumericError("counting series has no pole; nothing to certify")
    return largest_real_zero(RatFun(f.den), lo, hi)


def perron_root(source: ShiftSpec | AdjMatrix,
                allow_reducible: bool = False,
                bracket: tuple | None = None) -> PerronResult:
    """Perron root by the combinatorial route, cross-checked iteratively.

    Accepts either a validated spec or a raw integer matrix (which is
    rephrased through its length-2 collections).  Reducible inputs are
    an error unless explicitly allowed, in which case the iterative
    cross-check falls back to a dense eigenvalue computation.
    """
    if isinstance(source, AdjMatrix):
        from .langmodel import spec_from_matrix
        mat = source
        if mat.size == 1:
            k = mat.entries[0][0]
            cert = RootCertificate(float(k), Fraction(k), Fraction(k), Fraction(k))
            return PerronResult(float(k), cert, float(k), 0.0, k > 0)
        spec = spec_from_matrix(source.entries)
    else:
        spec = source
        mat = adjacency_matrix(spec)
    irreducible = is_irreducible(mat)
    if not irreducible and not allow_reducible:
        raise SpecError("adjacency matrix is reducible; pass allow_reducible to proceed")
    cert = _combinatorial_root(spec, mat, bracket)
    if irreducible:
        theta_iter = power_iteration(mat).theta
    else:
        theta_iter = _spectral_radius_float(mat)
    gap = abs(cert.value - theta_iter)
    if gap > THETA_TOL:
        raise RouteMismatchError(
            f"combinatorial root {cert.value} vs iterative {theta_iter}: gap {gap:.3g}")
    return PerronResult(cert.value, cert, theta_iter, gap, irreducible)


@dataclass(frozen=True)
class EigenData:
    """Perron eigen data from the correlation formulas.

    U and V are the raw formula values (the printable ones); the
    normalized pair rescales U so that the dot product is one.  Entries
    are Fractions when the root is exactly certified, floats otherwise.
    """

    labels: tuple[Word, ...]
    left: tuple
    right: tuple
    left_normalized: tuple
    right_normalized: tuple
    dot: object
    root: PerronResult
    exact: bool

    def left_of(self, label) -> object:
        return self.left[self.labels.index(W.word(label))]

    def right_of(self, label) -> object:
        return self.right[self.labels.index(W.word(label))]

    def to_json(self) -> dict:
        def fmt(xs):
            return [format(float(x), ".15g") for x in xs]
        out = {
            "labels": ["".join(x) for x in self.labels],
            "U": fmt(self.left),
            "V": fmt(self.right),
            "U_normalized": fmt(self.left_normalized),
            "V_normalized": fmt(self.right_normalized),
            "UtV": format(float(self.dot), ".15g"),
            "exact": self.exact,
        }
        if self.exact:
            out["U_exact"] = [str(x) for x in self.left]
            out["V_exact"] = [str(x) for x in self.right]
            out["UtV_exact"] = str(Fraction(self.dot))
        return out


def _inverse_row_sums_at(core, theta) -> list:
    """Row sums of the inverse of an evaluated matrix: solve M x = 1."""
    n = core.nrows
    if n == 0:
        return []
    m = core.evaluate(theta)
    one = Fraction(1) if isinstance(theta, Fraction) else 1.0
    return solve_numeric(m, [one] * n)


def perron_vectors(spec: ShiftSpec, allow_reducible: bool = False) -> EigenData:
    """Left and right Perron eigenvectors from the correlation formulas.

    Repeated words are first extended to full length p (the matrix is
    unchanged by that), which is the setting where the formulas hold.
    """
    ext = extend_repeated_to_full_length(spec)
    root = perron_root(spec, allow_reducible)
    theta = root.scalar()
    exact = root.exact is not None
    labels = tuple(sorted(allowed_words(ext.p - 1, ext), key=ext.sort_key))
    rsums = _inverse_row_sums_at(genfun.correlation_matrix(ext), theta)
    ssums = _inverse_row_sums_at(genfun.conjugate_correlation_matrix(ext), theta)
    ell = len(ext.repeated)
    one = Fraction(1) if exact else 1.0

    left, right = [], []
    for x in labels:
        u = one
        v = one
        for i, (r, m) in enumerate(ext.repeated):
            c = Fraction(m - 1, m)
            u = u - theta * c * rsums[i] * Poly(W.correlation_poly(r[1:], x))(theta)
            v = v - theta * c * ssums[i] * Poly(W.correlation_poly(x, r))(theta)
        for j, a in enumerate(ext.forbidden):
            u = u + theta * rsums[ell + j] * Poly(W.correlation_poly(a[1:], x))(theta)
            v = v + theta * ssums[ell + j] * Poly(W.correlation_poly(x, a))(theta)
        left.append(u)
        right.append(v)

    dot = sum(u * v for u, v in zip(left, right))
    if dot == 0:
        raise NumericError("degenerate eigenvector normalization")
    left_n = tuple(u / dot for u in left)
    data = EigenData(labels, tuple(left), tuple(right), left_n, tuple(right),
                     dot, root, exact)
    _check_residuals(adjacency_matrix(ext), data)
    return data


def eigen_residuals(mat: AdjMatrix, theta: float, left: Sequence, right: Sequence) -> tuple[float, float]:
    """Scaled infinity-norm residuals of the two eigen equations."""
    a = np.array(mat.entries, dtype=float)
    u = np.array([float(x) for x in left])
    v = np.array([float(x) for x in right])
    res_r = float(np.max(np.abs(a @ v - theta * v))) / max(1.0, float(np.max(np.abs(v))))
    res_l = float(np.max(np.abs(u @ a - theta * u))) / max(1.0, float(np.max(np.abs(u))))
    return res_l, res_r


def _check_residuals(mat: AdjMatrix, data: EigenData) -> None:
    res_l, res_r = eigen_residuals(mat, data.root.theta, data.left, data.right)
    if max(res_l, res_r) > THETA_TOL:
        raise NumericError(f"eigenvector residuals too large: left {res_l:.3g}, right {res_r:.3g}")


@dataclass(frozen=True)
class Witness:
    """Multiplicity-one connector and cycle words behind the normalization."""

    start: Word
    anchor: Word
    connector: Word
    cycle: Word

    def to_json(self) -> dict:
        return {"X": "".join(self.start), "Y": "".join(self.anchor),
                "Z": "".join(self.connector), "W": "".join(self.cycle)}


def multiplicity_one_witness(spec: ShiftSpec,
                             length_bound: int | None = None) -> Witness | None:
    """Bounded search for the normalization witness.

    Looks for labels X, Y plus multiplicity-one words Z (X to Y) and W
    (a proper cycle at Y) of length at most the bound (default 3p); a
    miss returns None and means "unknown", never "impossible".
    """
    ext = extend_repeated_to_full_length(spec)
    bound = length_bound if length_bound is not None else 3 * ext.p
    mat = adjacency_matrix(ext)
    labels = mat.labels
    n = len(labels)
    max_edges = max(1, bound - (ext.p - 1))
    # edges whose spliced word carries weight one in the extended spec;
    # labels themselves always have weight one (shorter than p)
    plain = [[bool(mat.entries[i][j])
              and multiplicity(W.star(labels[i], labels[j]), ext) == 1
              for j in range(n)] for i in range(n)]

    def shortest_from(src: int) -> tuple[dict[int, int | None], dict[int, int]]:
        parent: dict[int, int | None] = {src: None}
        depth = {src: 0}
        queue = [src]
        while queue:
            nxt = []
            for i in queue:
                if depth[i] == max_edges:
                    continue
                for j in range(n):
                    if plain[i][j] and j not in parent:
                        parent[j] = i
                        depth[j] = depth[i] + 1
                        nxt.append(j)
            queue = nxt
        return parent, depth

    def rebuild(parent: dict[int, int | None], dst: int) -> list[int]:
        path = [dst]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return path[::-1]

    def path_word(path: list[int]) -> Word:
        w = labels[path[0]]
        for idx in path[1:]:
            w = w + labels[idx][-1:]
        return w

    search: dict[int, tuple[dict, dict]] = {}

    def paths_from(src: int):
        if src not in search:
            search[src] = shortest_from(src)
        return search[src]

    for y in range(n):
        cycle: list[int] | None = None
        for j in range(n):
            if not plain[y][j]:
                continue
            if j == y:
                cycle = [y, y]
                break
            parent, depth = paths_from(j)
            if y in depth and 1 + depth[y] <= max_edges:
                cand = [y] + rebuild(parent, y)
                if cycle is None or len(cand) < len(cycle):
                    cycle = cand
        if cycle is None:
            continue
        for x in range(n):
            parent, depth = paths_from(x)
            if y in depth:
                return Witness(labels[x], labels[y],
                               path_word(rebuild(parent, y)), path_word(cycle))
    return None


@dataclass(frozen=True)
class NormalizationReport:
    """Dot product of the formula eigenvectors against the derivative identity."""

    dot: object
    identity_value: object
    agree: bool
    witness: Witness | None
    exact: bool

    def to_json(self) -> dict:
        out = {
            "UtV": format(float(self.dot), ".15g"),
            "identity": format(float(self.identity_value), ".15g"),
            "agree": self.agree,
            "property_witness": self.witness.to_json() if self.witness else "unknown",
        }
        if self.exact:
            out["UtV_exact"] = str(Fraction(self.dot))
            out["identity_exact"] = str(Fraction(self.identity_value))
        return out


def correction_derivative_at(spec: ShiftSpec, theta):
    """Derivative of the constraint correction at theta, evaluated
    through linear solves (no symbolic inversion of the big matrix).

    With R(z) the weighted row-sum vector of the inverted core matrix,
    r'(theta) comes from r' = -P^{-1} P' r and the product rule on the
    diagonal weights.
    """
    core = genfun.correlation_matrix(spec)
    n = core.nrows
    if n == 0:
        return Fraction(0) if isinstance(theta, Fraction) else 0.0
    m = core.evaluate(theta)
    md = [[e.derivative()(theta) for e in row] for row in core.entries]
    one = Fraction(1) if isinstance(theta, Fraction) else 1.0
    r = solve_numeric(m, [one] * n)
    rhs = [sum(md[i][j] * r[j] for j in range(n)) for i in range(n)]
    rprime = [-x for x in solve_numeric(m, rhs)]
    ell = len(spec.repeated)
    weights = [Fraction(mm - 1, mm) for _, mm in spec.repeated] + \
              [Fraction(-1)] * len(spec.forbidden)
    total = sum(w * (r[i] + theta * rprime[i]) for i, w in enumerate(weights[:ell]))
    total += sum(w * (r[ell + j] + theta * rprime[ell + j])
                 for j, w in enumerate(weights[ell:]))
    return total


def eigenvector_normalization(spec: ShiftSpec,
                              allow_reducible: bool = False) -> NormalizationReport:
    """Compare U^T V with theta^(p-1) (1 + R'(theta)) on the extended spec.

    The identity is guaranteed under the witness condition; without a
    witness the comparison is still reported (it is conjectured to hold)
    but a disagreement is only an error when the witness was found.
    """
    ext = extend_repeated_to_full_length(spec)
    vec = perron_vectors(spec, allow_reducible)
    theta = vec.root.scalar()
    rprime = correction_derivative_at(ext, theta)
    identity = theta ** (ext.p - 1) * (1 + rprime)
    if vec.exact:
        agree = vec.dot == identity
    else:
        agree = abs(float(vec.dot) - float(identity)) <= THETA_TOL * max(1.0, abs(float(vec.dot)))
    witness = multiplicity_one_witness(ext)
    if witness is not None and not agree:
        raise NumericError("normalization identity failed despite a witness")
    return NormalizationReport(vec.dot, identity, agree, witness, vec.exact)


@dataclass(frozen=True)
class EntropyReport:
    ln_theta: float
    estimate: float
    estimate_n: int

    def to_json(self) -> dict:
        return {"entropy": format(self.ln_theta, ".15g"),
                "finite_n_estimate": format(self.estimate, ".15g"),
                "estimate_n": self.estimate_n}


def entropy(spec: ShiftSpec, estimate_n: int | None = None,
            budget: int = DEFAULT_BUDGET, allow_reducible: bool = False) -> EntropyReport:
    """ln(theta), with a finite-size (1/n) ln |slice| sanity estimate."""
    root = perron_root(spec, allow_reducible)
    if estimate_n is None:
        cap = max(2, int(math.log(1 << 20) / math.log(spec.q)))
        estimate_n = max(spec.p, min(12, cap))
    count = weighted_count(estimate_n, spec, budget)
    est = math.log(count) / estimate_n if count else float("-inf")
    return EntropyReport(math.log(root.theta), est, estimate_n)


def spectral_report(spec: ShiftSpec, allow_reducible: bool = False) -> dict:
    """Bundle of everything the perron subcommand prints."""
    mat = adjacency_matrix(spec)
    root = perron_root(spec, allow_reducible)
    vec = perron_vectors(spec, allow_reducible)
    norm = eigenvector_normalization(spec, allow_reducible)
    ent = entropy(spec, allow_reducible=allow_reducible)
    res_l, res_r = eigen_residuals(adjacency_matrix(extend_repeated_to_full_length(spec)),
                                   root.theta, vec.left, vec.right)
    return {
        "adjacency": mat.to_json(),
        "irreducible": is_irreducible(mat),
        "perron": root.to_json(),
        "eigenvectors": vec.to_json(),
        "normalization": norm.to_json(),
        "entropy": ent.to_json(),
        "residuals": {"left": format(res_l, ".3g"), "right": format(res_r, ".3g")},
    }
