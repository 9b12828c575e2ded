"""Maximal-entropy measures on the edge shift, cylinder arithmetic, the
branch-erasing projection, push-forwards, and escape-rate estimates.

A :class:`MeasureContext` bundles everything derived from one spec: the
adjacency matrix, certified root, formula eigenvectors, and the
row-stochastic matrix of the Shannon-Parry measure.  Cylinder measures
can then be evaluated along independent routes (eigenvector formula,
derivative normalization, Markov-chain products) which must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import words as W
from .errors import NumericError, SpecError
from .langmodel import (DEFAULT_BUDGET, ShiftSpec, extend_repeated_to_full_length,
                        multiplicity, spec_from_matrix, validate_spec, weighted_count)
from .spectral import (AdjMatrix, EigenData, NormalizationReport, PerronResult,
                       adjacency_matrix, eigenvector_normalization, is_irreducible,
                       perron_root, perron_vectors)
from .words import Word

MEASURE_TOL = 1e-9
ROW_TOL = 1e-12


@dataclass(frozen=True)
class StochMat:
    """Row-stochastic matrix with its stationary distribution."""

    labels: tuple[Word, ...]
    rows: tuple[tuple, ...]
    stationary: tuple
    exact: bool

    def index(self, label) -> int:
        return self.labels.index(W.word(label))

    def __getitem__(self, xy) -> object:
        return self.rows[self.index(xy[0])][self.index(xy[1])]

    def to_json(self) -> dict:
        out = {"labels": ["".join(x) for x in self.labels],
               "rows": [[format(float(e), ".15g") for e in row] for row in self.rows],
               "stationary": [format(float(e), ".15g") for e in self.stationary]}
        if self.exact:
            out["rows_exact"] = [[str(e) for e in row] for row in self.rows]
            out["stationary_exact"] = [str(e) for e in self.stationary]
        return out


def _validate_stochastic(sm: StochMat) -> StochMat:
    n = len(sm.labels)
    for i in range(n):
        s = sum(sm.rows[i])
        if sm.exact:
            if s != 1:
                raise NumericError(f"row {i} sums to {s}, not 1")
        elif abs(float(s) - 1.0) > ROW_TOL:
            raise NumericError(f"row {i} sums to {float(s)}, off by {abs(float(s)-1)}")
    for j in range(n):
        s = sum(sm.stationary[i] * sm.rows[i][j] for i in range(n))
        if sm.exact:
            if s != sm.stationary[j]:
                raise NumericError("stationary vector is not stationary")
        elif abs(float(s) - float(sm.stationary[j])) > MEASURE_TOL:
            raise NumericError("stationary vector is not stationary")
    total = sum(sm.stationary)
    if sm.exact and total != 1:
        raise NumericError("stationary vector does not sum to 1")
    if not sm.exact and abs(float(total) - 1.0) > ROW_TOL:
        raise NumericError("stationary vector does not sum to 1")
    return sm


def shannon_parry_matrix(mat: AdjMatrix, theta, left_normalized: Sequence,
                         right: Sequence) -> StochMat:
    """Stochastic matrix A_XY V_Y / (theta V_X) with stationary U o V.

    Expects the normalized eigenvector pair (dot product one).  Exact
    rationals stay exact; floats get their rows renormalized to kill
    residual round-off before validation.
    """
    n = mat.size
    exact = isinstance(theta, Fraction) and all(isinstance(v, Fraction) for v in right)
    dot = sum(u * v for u, v in zip(left_normalized, right))
    if exact:
        if dot != 1:
            raise NumericError("eigenvector pair is not normalized")
    elif abs(float(dot) - 1.0) > MEASURE_TOL:
        raise NumericError("eigenvector pair is not normalized")
    rows = []
    for i in range(n):
        if right[i] == 0:
            raise NumericError("zero eigenvector entry; matrix not irreducible?")
        row = [mat.entries[i][j] * right[j] / (theta * right[i]) for j in range(n)]
        if not exact:
            s = sum(row)
            if abs(s - 1.0) > MEASURE_TOL:
                raise NumericError(f"row {i} of the stochastic matrix sums to {s}")
            row = [e / s for e in row]
        rows.append(tuple(row))
    stationary = [u * v for u, v in zip(left_normalized, right)]
    if not exact:
        t = sum(stationary)
        stationary = [x / t for x in stationary]
    return _validate_stochastic(StochMat(mat.labels, tuple(rows), tuple(stationary), exact))


def lift_rational_stochastic(sm: StochMat) -> AdjMatrix:
    """Integer matrix L * P for the least common denominator L.

    The Shannon-Parry matrix of the result is P again (root L, constant
    right eigenvector), so this inverts the construction on rational
    stochastic matrices.
    """
    if not sm.exact:
        raise NumericError("lift needs exact rational entries")
    denoms = [Fraction(e).denominator for row in sm.rows for e in row if e > 0]
    lcm = 1
    for d in denoms:
        lcm = lcm * d // math.gcd(lcm, d)
    entries = []
    for row in sm.rows:
        out = []
        for e in row:
            v = Fraction(e) * lcm
            if v.denominator != 1:
                raise NumericError("least common denominator failed; non-rational entry?")
            out.append(int(v))
        entries.append(tuple(out))
    mat = AdjMatrix(sm.labels, tuple(entries))
    if not is_irreducible(mat):
        raise SpecError("lift of a reducible stochastic matrix")
    return mat


@dataclass(frozen=True)
class Cylinder:
    """A cylinder set: a vertex path, with branch indices in edge form.

    ``vertices`` lists the p-1 blocks along the path; ``branches`` (one
    index per step, or None) distinguishes parallel edges.  A cylinder
    without branches lives in the projected block shift.
    """

    vertices: tuple[Word, ...]
    branches: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("empty cylinder")
        if self.branches is not None and len(self.branches) != self.n_edges:
            raise ValueError("one branch index per edge required")

    @property
    def n_edges(self) -> int:
        return len(self.vertices) - 1

    @property
    def is_edge_form(self) -> bool:
        return self.branches is not None

    @classmethod
    def from_vertex_word(cls, text: Sequence[str], p: int) -> "Cylinder":
        w = W.word(text)
        if len(w) < p - 1:
            raise SpecError(f"vertex word shorter than {p - 1} symbols")
        verts = tuple(w[i:i + p - 1] for i in range(len(w) - p + 2))
        return cls(verts, None)

    @classmethod
    def from_edges(cls, edges: Sequence[tuple[Sequence[str], Sequence[str], int]]) -> "Cylinder":
        verts = [W.word(edges[0][0])]
        branches = []
        for x, y, j in edges:
            x, y = W.word(x), W.word(y)
            if verts[-1] != x:
                raise SpecError("edge chain is broken (tail does not match previous head)")
            verts.append(y)
            branches.append(int(j))
        return cls(tuple(verts), tuple(branches))

    def word(self) -> Word:
        """The underlying symbol word of the vertex path."""
        w = self.vertices[0]
        for v in self.vertices[1:]:
            w = w + v[-1:]
        return w

    def to_json(self) -> dict:
        return {"vertices": ["".join(v) for v in self.vertices],
                "branches": list(self.branches) if self.branches else None}


def project_edges(cyl: Cylinder) -> Cylinder:
    """Erase branch indices: the factor map onto the block shift."""
    return Cylinder(cyl.vertices, None)


class MeasureContext:
    """Everything cylinder measures need, derived once from a spec."""

    def __init__(self, spec: ShiftSpec, allow_reducible: bool = False):
        self.spec = spec
        self.ext = extend_repeated_to_full_length(spec)
        self.mat = adjacency_matrix(self.ext)
        self.vectors: EigenData = perron_vectors(spec, allow_reducible)
        self.root: PerronResult = self.vectors.root
        self.norm: NormalizationReport = eigenvector_normalization(spec, allow_reducible)
        self.sp: StochMat = shannon_parry_matrix(
            self.mat, self.root.scalar(), self.vectors.left_normalized, self.vectors.right)
        self._hat = None

    @property
    def p(self) -> int:
        return self.ext.p

    @property
    def exact(self) -> bool:
        return self.vectors.exact

    @property
    def theta(self):
        return self.root.scalar()

    def _hat_data(self):
        """Parry data of the compatible binary matrix, via the same
        correlation pipeline on the derived length-2 collections.

        The derived spec renames labels to single symbols, but its block
        order matches ours, so everything is used positionally.
        """
        if self._hat is None:
            binary = self.mat.binary()
            derived = spec_from_matrix(binary.entries)
            vec = perron_vectors(derived)
            sp = shannon_parry_matrix(binary, vec.root.scalar(),
                                      vec.left_normalized, vec.right)
            self._hat = (vec, sp)
        return self._hat

    def check_cylinder(self, cyl: Cylinder) -> None:
        idx = []
        for v in cyl.vertices:
            if v not in self.mat.labels:
                raise SpecError(f"{''.join(v)} is not an allowed block of length {self.p - 1}")
            idx.append(self.mat.labels.index(v))
        for k in range(cyl.n_edges):
            e = self.mat.entries[idx[k]][idx[k + 1]]
            if e == 0:
                raise SpecError("cylinder path uses a missing edge")
            if cyl.branches is not None and not 1 <= cyl.branches[k] <= e:
                raise SpecError(f"branch index {cyl.branches[k]} outside 1..{e}")


@dataclass(frozen=True)
class MeasureReport:
    value: float
    route: str
    exact: Fraction | None = None

    def to_json(self) -> dict:
        out = {"value": format(self.value, ".15g"), "route": self.route}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out


EDGE_ROUTES = ("shannon_parry", "combinatorial", "markov")
VERTEX_ROUTES = ("markov", "parry")


def cylinder_measure(ctx: MeasureContext, cyl: Cylinder,
                     route: str = "shannon_parry") -> MeasureReport:
    """Measure of a cylinder along the requested route.

    Edge cylinders: ``shannon_parry`` uses the normalized eigenvector
    formula, ``combinatorial`` the unscaled vectors over the derivative
    normalization, ``markov`` the chain product with equal branch
    splitting.  Vertex cylinders: ``markov`` is the push-forward chain
    product, ``parry`` the classical measure of the compatible binary
    matrix.  Branch indices never influence the value.
    """
    ctx.check_cylinder(cyl)
    labels = ctx.mat.labels
    i_first = labels.index(cyl.vertices[0])
    i_last = labels.index(cyl.vertices[-1])
    n = cyl.n_edges
    theta = ctx.theta

    if cyl.is_edge_form:
        if route == "shannon_parry":
            val = ctx.vectors.left_normalized[i_first] * ctx.vectors.right[i_last] / theta ** n
        elif route == "combinatorial":
            val = (ctx.vectors.left[i_first] * ctx.vectors.right[i_last]
                   / (theta ** n * ctx.norm.identity_value))
        elif route == "markov":
            val = ctx.sp.stationary[i_first]
            for k in range(n):
                a, b = labels.index(cyl.vertices[k]), labels.index(cyl.vertices[k + 1])
                val = val * ctx.sp.rows[a][b] / ctx.mat.entries[a][b]
        else:
            raise ValueError(f"route {route!r} not valid for an edge cylinder")
    else:
        if route == "markov":
            val = ctx.sp.stationary[i_first]
            for k in range(n):
                a, b = labels.index(cyl.vertices[k]), labels.index(cyl.vertices[k + 1])
                val = val * ctx.sp.rows[a][b]
        elif route == "parry":
            vec, _ = ctx._hat_data()
            val = vec.left_normalized[i_first] * vec.right[i_last] / vec.root.scalar() ** n
        else:
            raise ValueError(f"route {route!r} not valid for a vertex cylinder")
    exact = Fraction(val) if isinstance(val, Fraction) else None
    return MeasureReport(float(val), route, exact)


def preimage_count(ctx: MeasureContext, cyl: Cylinder) -> int:
    """Number of edge cylinders projecting onto the given vertex cylinder."""
    ctx.check_cylinder(cyl)
    labels = ctx.mat.labels
    out = 1
    for k in range(cyl.n_edges):
        a, b = labels.index(cyl.vertices[k]), labels.index(cyl.vertices[k + 1])
        out *= ctx.mat.entries[a][b]
    return out


def _vertex_paths(mat: AdjMatrix, n_edges: int):
    """All vertex paths with exactly n_edges steps."""
    idx = range(mat.size)

    def extend(path):
        if len(path) == n_edges + 1:
            yield tuple(path)
            return
        for j in idx:
            if mat.entries[path[-1]][j]:
                yield from extend(path + [j])

    for start in idx:
        yield from extend([start])


def pushforward_report(ctx: MeasureContext, n_max: int) -> dict:
    """Check the push-forward identity on every vertex word up to n_max edges.

    The Markov product for the projected cylinder must equal the total
    eigenvector-formula measure of its branch preimage; since branch
    indices never change the measure (checked independently) the total
    is the preimage count times one representative.  Exact equality in
    the exact pipeline, 1e-9 otherwise.
    """
    labels = ctx.mat.labels
    checked, violations = 0, []
    for length in range(1, n_max + 1):
        for path in _vertex_paths(ctx.mat, length):
            verts = tuple(labels[i] for i in path)
            vertex_cyl = Cylinder(verts, None)
            lhs = cylinder_measure(ctx, vertex_cyl, "markov")
            rep = cylinder_measure(ctx, Cylinder(verts, (1,) * length), "shannon_parry")
            count = preimage_count(ctx, vertex_cyl)
            total = count * (rep.exact if ctx.exact else rep.value)
            checked += 1
            if ctx.exact:
                ok = total == lhs.exact
            else:
                ok = abs(float(total) - lhs.value) <= MEASURE_TOL
            if not ok:
                violations.append({"word": "".join(vertex_cyl.word()),
                                   "pushforward": float(lhs.value),
                                   "preimage_sum": float(total)})
    return {"checked": checked, "violations": violations}


def kolmogorov_report(ctx: MeasureContext, n_max: int) -> dict:
    """Additivity of the edge-cylinder measure under one-edge extension."""
    labels = ctx.mat.labels
    checked, worst = 0, 0.0
    violations = []
    for length in range(1, n_max + 1):
        for path in _vertex_paths(ctx.mat, length):
            verts = tuple(labels[i] for i in path)
            base = cylinder_measure(ctx, Cylinder(verts, (1,) * length), "shannon_parry")
            last = path[-1]
            total = Fraction(0) if ctx.exact else 0.0
            for j in range(ctx.mat.size):
                e = ctx.mat.entries[last][j]
                if not e:
                    continue
                ext = cylinder_measure(
                    ctx, Cylinder(verts + (labels[j],), (1,) * (length + 1)), "shannon_parry")
                total += e * (ext.exact if ctx.exact else ext.value)
            checked += 1
            if ctx.exact:
                ok = total == base.exact
                defect = 0.0 if ok else abs(float(total - base.exact))
            else:
                defect = abs(float(total) - base.value)
                ok = defect <= MEASURE_TOL
            worst = max(worst, defect)
            if not ok:
                violations.append("".join(Cylinder(verts, None).word()))
    return {"checked": checked, "max_defect": worst, "violations": violations}


@dataclass(frozen=True)
class EscapeReport:
    """Avoidance counts for a hole cylinder and the derived rate estimates."""

    hole: Cylinder
    counts: tuple[int, ...]          # h[0..n_max] paths avoiding the hole
    survivor_rate: float | None      # ln lambda estimate from the last ratio
    escape_rate: float | None        # ln(theta / lambda)
    theta: float
    word_weight: int | None          # multiplicity of the underlying word
    tau: tuple[int, ...] | None      # weighted counts with the word forbidden
    tau_rate: float | None
    counts_match_tau: bool | None

    def to_json(self) -> dict:
        return {
            "hole": self.hole.to_json(),
            "h": list(self.counts),
            "ln_lambda": None if self.survivor_rate is None else format(self.survivor_rate, ".15g"),
            "escape_rate": None if self.escape_rate is None else format(self.escape_rate, ".15g"),
            "theta": format(self.theta, ".15g"),
            "word_weight": self.word_weight,
            "tau": None if self.tau is None else list(self.tau),
            "ln_theta_word": None if self.tau_rate is None else format(self.tau_rate, ".15g"),
            "counts_match_tau": self.counts_match_tau,
        }


def _hole_automaton(edges: list, hole_seq: list) -> list[dict]:
    """KMP transition table over edge symbols for the hole word."""
    k = len(hole_seq)
    fail = [0] * k
    for i in range(1, k):
        j = fail[i - 1]
        while j and hole_seq[i] != hole_seq[j]:
            j = fail[j - 1]
        fail[i] = j + 1 if hole_seq[i] == hole_seq[j] else 0
    table = []
    for state in range(k):
        trans = {}
        for e in edges:
            j = state
            while j and hole_seq[j] != e:
                j = fail[j - 1]
            trans[e] = j + 1 if hole_seq[j] == e else 0
        table.append(trans)
    return table


def escape_report(source: ShiftSpec | AdjMatrix, hole: Cylinder, n_max: int = 12,
                  budget: int = DEFAULT_BUDGET,
                  allow_reducible: bool = False) -> EscapeReport:
    """Count paths avoiding the hole cylinder and estimate the escape rate.

    ``h[n]`` counts length-n edge paths with no contiguous copy of the
    hole word, via a transfer construction on (vertex, matched-prefix)
    states.  When the underlying symbol word has weight one, the counts
    must reproduce the weighted counts of the spec with that word
    forbidden, and the check is enforced.
    """
    if isinstance(source, AdjMatrix):
        mat = source
        spec = spec_from_matrix(mat.entries) if mat.size >= 2 else None
    else:
        spec = extend_repeated_to_full_length(source)
        mat = adjacency_matrix(spec)
    if hole.branches is None:
        raise SpecError("the hole must be a specific edge cylinder (branch indices)")
    labels = mat.labels
    idx = {v: i for i, v in enumerate(labels)}
    for v in hole.vertices:
        if v not in idx:
            raise SpecError(f"{''.join(v)} is not a block label")
    hole_seq = []
    for k in range(hole.n_edges):
        a, b = idx[hole.vertices[k]], idx[hole.vertices[k + 1]]
        e = mat.entries[a][b]
        if not 1 <= hole.branches[k] <= e:
            raise SpecError("hole uses a missing edge or branch")
        hole_seq.append((a, b, hole.branches[k]))
    if not hole_seq:
        raise SpecError("the hole needs at least one edge")

    edges = [(i, j, b) for i in range(mat.size) for j in range(mat.size)
             for b in range(1, mat.entries[i][j] + 1)]
    table = _hole_automaton(edges, hole_seq)
    k = len(hole_seq)

    counts = [1]
    state_counts: dict[tuple[int, int], int] = {}
    if n_max >= 1:
        for i, j, b in edges:
            s = table[0][(i, j, b)]
            if s < k:
                state_counts[(j, s)] = state_counts.get((j, s), 0) + 1
        counts.append(sum(state_counts.values()))
    for _ in range(2, n_max + 1):
        nxt: dict[tuple[int, int], int] = {}
        for (v, s), c in state_counts.items():
            for i, j, b in edges:
                if i != v:
                    continue
                s2 = table[s][(i, j, b)]
                if s2 < k:
                    key = (j, s2)
                    nxt[key] = nxt.get(key, 0) + c
        state_counts = nxt
        counts.append(sum(state_counts.values()))

    survivor = None
    if n_max >= 2 and counts[-2] > 0 and counts[-1] > 0:
        survivor = math.log(counts[-1] / counts[-2])

    if isinstance(source, AdjMatrix):
        theta = perron_root(mat, allow_reducible=True).theta
    else:
        theta = perron_root(spec, allow_reducible).theta
    rate = None if survivor is None else math.log(theta) - survivor

    tau = tau_rate = weight = match = None
    if spec is not None:
        if isinstance(source, AdjMatrix):
            # derived spec renames blocks to single symbols
            wword = tuple(spec.alphabet[idx[v]] for v in hole.vertices)
        else:
            wword = hole.word()
        weight = multiplicity(wword, spec)
        keep = [(r, m) for r, m in spec.repeated if r != wword]
        tau_spec = validate_spec(spec.alphabet, list(spec.forbidden) + [wword], keep)
        p = spec.p
        tau = tuple(weighted_count(n, tau_spec, budget)
                    for n in range(p, p + n_max))
        if len(tau) >= 2 and tau[-2] > 0 and tau[-1] > 0:
            tau_rate = math.log(tau[-1] / tau[-2])
        if weight == 1:
            match = all(counts[i + 1] == tau[i] for i in range(len(tau)))
            if not match:
                raise NumericError("avoidance counts disagree with the weighted oracle "
                                   "for a weight-one hole word")
    return EscapeReport(hole, tuple(counts), survivor, rate, theta,
                        weight, tau, tau_rate, match)
