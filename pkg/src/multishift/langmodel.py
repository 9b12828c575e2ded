"""Shift specifications and the generalized language they generate.

A :class:`ShiftSpec` fixes an ordered alphabet, a reduced collection of
forbidden words, and a reduced collection of repeated words with
integer multiplicities >= 2.  Every other module consumes validated
specs.  This module also hosts the brute-force weighted counters
(depth-first enumeration with multiplicities) that serve as the
independent oracle for all generating-function output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from . import words as W
from .errors import BudgetError, SpecError
from .words import Word

DEFAULT_BUDGET = 1 << 24


@dataclass(frozen=True)
class ShiftSpec:
    """Validated shift data; build instances through :func:`validate_spec`."""

    alphabet: tuple[str, ...]
    forbidden: tuple[Word, ...]
    repeated: tuple[tuple[Word, int], ...]
    p: int
    union_reduced: bool
    _index: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.alphabet)})

    @property
    def q(self) -> int:
        return len(self.alphabet)

    @property
    def repeated_words(self) -> tuple[Word, ...]:
        return tuple(r for r, _ in self.repeated)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.repeated)

    def sort_key(self, w: Sequence[str]):
        """Lexicographic key in declared alphabet order."""
        return tuple(self._index[s] for s in w)

    def is_allowed(self, w: Sequence[str]) -> bool:
        return not any(W.contains(w, a) for a in self.forbidden)

    def word(self, text: Sequence[str] | str) -> Word:
        """Coerce and check a word against the alphabet."""
        w = W.word(text)
        bad = [s for s in w if s not in self._index]
        if bad:
            raise SpecError(f"symbols {bad} not in alphabet {list(self.alphabet)}")
        return w

    def to_json(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "forbidden": ["".join(a) for a in self.forbidden],
            "repeated": [{"word": "".join(r), "multiplicity": m} for r, m in self.repeated],
        }


def validate_spec(alphabet: Sequence[str],
                  forbidden: Sequence[Sequence[str]] = (),
                  repeated: Sequence[tuple[Sequence[str], int]] = ()) -> ShiftSpec:
    """Check every spec invariant and derive p and the union-reduced flag.

    p is the length of the longest declared word, clamped to at least 2
    so that the block presentation is indexed by words of length >= 1
    even for degenerate collections (empty, or length-1 repeats only).
    """
    alpha = tuple(alphabet)
    if len(alpha) < 2:
        raise SpecError("alphabet needs at least two symbols")
    if len(set(alpha)) != len(alpha):
        raise SpecError("alphabet has duplicate symbols")
    fwords = [W.word(a) for a in forbidden]
    rlist = [(W.word(r), int(m)) for r, m in repeated]

    for w in fwords + [r for r, _ in rlist]:
        if not w:
            raise SpecError("empty word in spec")
        missing = [s for s in w if s not in alpha]
        if missing:
            raise SpecError(f"word {''.join(w)} uses symbols {missing} outside the alphabet")
    for a in fwords:
        if len(a) < 2:
            raise SpecError(f"forbidden word {''.join(a)} is a bare symbol; drop it from the alphabet instead")
    if len(set(fwords)) != len(fwords):
        raise SpecError("duplicate forbidden words")
    if len(set(r for r, _ in rlist)) != len(rlist):
        raise SpecError("duplicate repeated words")
    if fwords and not W.is_reduced(fwords):
        raise SpecError("forbidden collection is not reduced")
    if rlist and not W.is_reduced([r for r, _ in rlist]):
        raise SpecError("repeated collection is not reduced")
    for r, m in rlist:
        if m < 2:
            raise SpecError(f"repeated word {''.join(r)} has multiplicity {m} < 2")
        if any(W.contains(r, a) for a in fwords):
            raise SpecError(f"repeated word {''.join(r)} contains a forbidden word")

    lengths = [len(w) for w in fwords] + [len(r) for r, _ in rlist]
    p = max(lengths + [2])
    union = fwords + [r for r, _ in rlist]
    union_reduced = W.is_reduced(union) if union else True
    # declaration order is part of the contract (system rows, reports)
    return ShiftSpec(alpha, tuple(fwords), tuple(rlist), p, union_reduced)


def multiplicity(w: Sequence[str], spec: ShiftSpec) -> int:
    """Weight of w: 0 when forbidden, else the product of m_i over all
    occurrences of each repeated word inside w."""
    w = W.word(w)
    if not spec.is_allowed(w):
        return 0
    out = 1
    for r, m in spec.repeated:
        out *= m ** W.subword_count(w, r)
    return out


def forbidden_suffix_multiplicity(w: Sequence[str], a: Sequence[str], spec: ShiftSpec) -> int:
    """Weight of a word whose single forbidden occurrence is the suffix a.

    Counts repeated words in all of w, discounting the ones lying inside
    the terminal copy of a; always a positive integer.
    """
    w, a = W.word(w), W.word(a)
    if a not in spec.forbidden:
        raise SpecError(f"{''.join(a)} is not a forbidden word")
    if w[len(w) - len(a):] != a:
        raise SpecError("word does not end with the given forbidden word")
    if not spec.is_allowed(w[:-1]):
        raise SpecError("word has a forbidden occurrence before the terminal one")
    out = 1
    for r, m in spec.repeated:
        out *= m ** (W.subword_count(w, r) - W.subword_count(a, r))
    return out


def leading_multiplicity(v: Sequence[str], spec: ShiftSpec) -> int:
    """m(v)/m(v minus first symbol); the parallel-edge count generator.

    Exceeds 1 exactly when v begins with a repeated word, in which case
    it equals that word's multiplicity.
    """
    v = W.word(v)
    if len(v) < 2:
        return 1
    m_full = multiplicity(v, spec)
    if m_full == 0:
        raise SpecError(f"{''.join(v)} is forbidden; leading multiplicity undefined")
    m_tail = multiplicity(v[1:], spec)
    quot, rem = divmod(m_full, m_tail)
    if rem:
        raise SpecError("leading multiplicity is not integral; repeated collection not reduced?")
    return quot


def _check_budget(n: int, spec: ShiftSpec, budget: int) -> None:
    if spec.q ** n > budget:
        raise BudgetError(f"{spec.q}^{n} strings exceed the budget {budget}")


def allowed_words(n: int, spec: ShiftSpec, budget: int = DEFAULT_BUDGET) -> Iterator[Word]:
    """All allowed words of length n, depth-first in lexicographic order.

    A freshly completed forbidden word can only appear as a suffix of
    the growing prefix, so one suffix scan per extension suffices.
    """
    if n < 0:
        raise ValueError("negative length")
    _check_budget(n, spec, budget)
    fwords = spec.forbidden

    def extend(prefix: Word) -> Iterator[Word]:
        if len(prefix) == n:
            yield prefix
            return
        for sym in spec.alphabet:
            w = prefix + (sym,)
            if not any(len(a) <= len(w) and w[len(w) - len(a):] == a for a in fwords):
                yield from extend(w)

    yield from extend(())


@dataclass(frozen=True)
class LanguageSlice:
    """All allowed words of one length, with multiplicities."""

    n: int
    entries: tuple[tuple[Word, int], ...]
    cardinality: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [["".join(w), m] for w, m in self.entries],
            "cardinality": self.cardinality,
        }


def enumerate_slice(n: int, spec: ShiftSpec, budget: int = DEFAULT_BUDGET) -> LanguageSlice:
    """Materialize the weighted language slice of length n."""
    if n < 1:
        raise ValueError("slice length must be >= 1")
    entries = []
    total = 0
    for w in allowed_words(n, spec, budget):
        m = 1
        for r, mult in spec.repeated:
            m *= mult ** W.subword_count(w, r)
        entries.append((w, m))
        total += m
    return LanguageSlice(n, tuple(entries), total)


def weighted_count(n: int, spec: ShiftSpec, budget: int = DEFAULT_BUDGET) -> int:
    """Oracle f(n): total weight of allowed words of length n; f(0) = 1.

    Depth-first sum with an incrementally maintained weight: appending a
    symbol multiplies the weight by m_j for every repeated word that the
    new symbol completes as a suffix.
    """
    if n < 0:
        raise ValueError("negative length")
    if n == 0:
        return 1
    _check_budget(n, spec, budget)
    fwords = spec.forbidden
    reps = spec.repeated
    alphabet = spec.alphabet

    def walk(prefix: Word, weight: int) -> int:
        if len(prefix) == n:
            return weight
        total = 0
        for sym in alphabet:
            w = prefix + (sym,)
            if any(len(a) <= len(w) and w[len(w) - len(a):] == a for a in fwords):
                continue
            wt = weight
            for r, m in reps:
                if len(r) <= len(w) and w[len(w) - len(r):] == r:
                    wt *= m
            total += walk(w, wt)
        return total

    return walk((), 1)


def weighted_count_ending_with(r: Sequence[str], n: int, spec: ShiftSpec,
                               budget: int = DEFAULT_BUDGET) -> int:
    """Oracle g_r(n): total weight of allowed length-n words with suffix r.

    Includes the word r itself at n = |r|; zero for n < |r| and for n = 0.
    """
    r = W.word(r)
    if n <= 0 or n < len(r):
        return 0
    _check_budget(n, spec, budget)
    total = 0
    for w in allowed_words(n, spec, budget):
        if w[len(w) - len(r):] == r:
            total += multiplicity(w, spec)
    return total


def weighted_count_forbidden_suffix(a: Sequence[str], n: int, spec: ShiftSpec,
                                    budget: int = DEFAULT_BUDGET) -> int:
    """Oracle f_a(n): weight of length-n words whose unique forbidden
    occurrence is a terminal copy of a, weighted per the suffix rule.

    Such a word is an allowed length n-1 prefix plus the last symbol of
    a; any other forbidden occurrence would either sit in the prefix or
    be a second suffix, impossible for a reduced collection.
    """
    a = W.word(a)
    if a not in spec.forbidden:
        raise SpecError(f"{''.join(a)} is not a forbidden word")
    if n <= 0 or n < len(a):
        return 0
    _check_budget(n, spec, budget)
    discount = 1
    for r, m in spec.repeated:
        discount *= m ** W.subword_count(a, r)
    total = 0
    last = a[-1:]
    for u in allowed_words(n - 1, spec, budget):
        w = u + last
        if w[len(w) - len(a):] != a:
            continue
        weight = 1
        for r, m in spec.repeated:
            weight *= m ** W.subword_count(w, r)
        # the terminal copy of a contributes exactly the discounted
        # occurrences, so the quotient is an integer
        total += weight // discount
    return total


def oracle_tables(spec: ShiftSpec, max_n: int, budget: int = DEFAULT_BUDGET
                  ) -> tuple[list[int], dict[Word, list[int]], dict[Word, list[int]]]:
    """All three count tables for n = 0..max_n in one walk of the prefix tree.

    Same semantics as the individual counters (cross-checked in tests):
    at each allowed prefix the weight is accumulated into the
    total/suffix tables, and each one-symbol extension that completes a
    terminal forbidden word feeds the forbidden-tail table.
    """
    if max_n < 0:
        raise ValueError("negative length")
    _check_budget(max_n, spec, budget)
    f = [0] * (max_n + 1)
    f[0] = 1
    g = {r: [0] * (max_n + 1) for r in spec.repeated_words}
    fa = {a: [0] * (max_n + 1) for a in spec.forbidden}
    discount = {a: 1 for a in spec.forbidden}
    for a in spec.forbidden:
        for r, m in spec.repeated:
            discount[a] *= m ** W.subword_count(a, r)

    def walk(prefix: Word, weight: int) -> None:
        n = len(prefix)
        if n:
            f[n] += weight
            for r in spec.repeated_words:
                if len(r) <= n and prefix[n - len(r):] == r:
                    g[r][n] += weight
        if n == max_n:
            return
        for sym in spec.alphabet:
            w = prefix + (sym,)
            suffix_a = next((a for a in spec.forbidden
                             if len(a) <= n + 1 and w[n + 1 - len(a):] == a), None)
            wt = weight
            for r, m in spec.repeated:
                if len(r) <= n + 1 and w[n + 1 - len(r):] == r:
                    wt *= m
            if suffix_a is None:
                walk(w, wt)
            else:
                fa[suffix_a][n + 1] += wt // discount[suffix_a]

    walk((), 1)
    return f, g, fa


def extend_repeated_to_full_length(spec: ShiftSpec) -> ShiftSpec:
    """Replace the repeated words by all their length-p completions.

    Every allowed length-p word beginning with a repeated word joins the
    new collection, weighted by its leading multiplicity.  The adjacency
    matrix is unchanged, the new union is always reduced, and specs
    whose repeated words already have length p come back untouched.
    """
    if all(len(r) == spec.p for r in spec.repeated_words):
        return spec
    new = []
    for w in allowed_words(spec.p, spec):
        if any(w[:len(r)] == r for r in spec.repeated_words):
            new.append((w, leading_multiplicity(w, spec)))
    return validate_spec(spec.alphabet, spec.forbidden, new)


def spec_from_matrix(entries: Sequence[Sequence[int]],
                     alphabet: Sequence[str] | None = None) -> ShiftSpec:
    """Length-2 collections of a non-negative integer matrix.

    Zero entries become forbidden two-symbol words, entries above one
    become repeated words with that multiplicity; the union is reduced
    by construction and the associated adjacency matrix is the input.
    """
    n = len(entries)
    if any(len(row) != n for row in entries):
        raise SpecError("matrix must be square")
    if n < 2:
        raise SpecError("matrix order must be at least 2 to name symbols")
    if alphabet is None:
        digits = "0123456789abcdefghijklmnopqrstuvwxyz"
        if n > len(digits):
            raise SpecError("matrix too large for the default symbol pool")
        alphabet = tuple(digits[:n])
    fw, rp = [], []
    for i, row in enumerate(entries):
        for j, e in enumerate(row):
            if e < 0:
                raise SpecError("negative matrix entry")
            pair = (alphabet[i], alphabet[j])
            if e == 0:
                fw.append(pair)
            elif e > 1:
                rp.append((pair, e))
    return validate_spec(alphabet, fw, rp)
