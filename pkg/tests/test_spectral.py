import math
from fractions import Fraction

import pytest

from conftest import random_spec
from multishift.errors import SpecError
from multishift.langmodel import (extend_repeated_to_full_length, multiplicity,
                                  oracle_tables, validate_spec)
from multishift.spectral import (AdjMatrix, adjacency_matrix, eigen_residuals,
                                 eigenvector_normalization, entropy, is_irreducible,
                                 multiplicity_matrix, multiplicity_one_witness,
                                 perron_root, perron_vectors, power_iteration)


def eigen_spec():
    return validate_spec("01", ["010"], [("100", 3)])


def split_spec():
    return validate_spec("01", ["00"], [("110", 2), ("01", 3)])


def test_adjacency_published_matrices():
    a = adjacency_matrix(eigen_spec())
    assert ["".join(x) for x in a.labels] == ["00", "01", "10", "11"]
    assert a.entries == ((1, 1, 0, 0), (0, 0, 0, 1), (3, 1, 0, 0), (0, 0, 1, 1))

    b = adjacency_matrix(split_spec())
    assert ["".join(x) for x in b.labels] == ["01", "10", "11"]
    assert b.entries == ((0, 3, 3), (1, 0, 0), (0, 2, 1))

    c = adjacency_matrix(validate_spec("01", ["11"], [("00", 2)]))
    assert c.entries == ((2, 1), (1, 0))


def test_multiplicity_matrix_published():
    t = multiplicity_matrix(split_spec())
    assert t.entries == ((0, 3, 3), (3, 0, 0), (0, 2, 1))
    # equal-length collections: both constructions coincide
    s = validate_spec("01", ["010"], [("000", 2)])
    assert multiplicity_matrix(s).entries == adjacency_matrix(s).entries


def test_repeated_row_entries_equal():
    # rows labeled by a repeated block have all non-zero entries equal
    s = split_spec()
    a = adjacency_matrix(s)
    for i, x in enumerate(a.labels):
        if multiplicity(x, s) > 1:
            nz = {e for e in a.entries[i] if e}
            assert len(nz) == 1


def test_irreducibility():
    assert is_irreducible(adjacency_matrix(eigen_spec()))
    assert not is_irreducible(AdjMatrix((("a",), ("b",)), ((1, 0), (0, 1))))
    assert is_irreducible(AdjMatrix((("a",), ("b",)), ((1, 1), (1, 1))))
    # the non-reduced worked example has a reducible matrix
    assert not is_irreducible(adjacency_matrix(validate_spec("01", ["001"], [("00", 2)])))


def test_perron_root_exact_and_routes():
    pr = perron_root(eigen_spec())
    assert pr.exact == 2
    assert pr.route_gap <= 1e-9
    full = perron_root(validate_spec("01", [], []))
    assert full.exact == 2


def test_perron_root_sparse_family():
    for mults, alpha in (((2, 3, 3), 8), ((5, 5, 5), 15)):
        s = validate_spec("0123", [], [("10", mults[0]), ("20", mults[1]), ("30", mults[2])])
        pr = perron_root(s)
        assert abs(pr.theta - (2 + math.sqrt(1 + alpha))) <= 1e-9


def test_perron_root_entropy_split():
    s = split_spec()
    assert 2.55 <= perron_root(s).theta <= 2.65
    t = multiplicity_matrix(s)
    assert 3.85 <= perron_root(t, allow_reducible=True).theta <= 3.95


def test_perron_root_matrix_input_and_reducible():
    with pytest.raises(SpecError):
        perron_root(validate_spec("01", ["001"], [("00", 2)]))
    pr = perron_root(validate_spec("01", ["001"], [("00", 2)]), allow_reducible=True)
    assert pr.exact == 2
    one = perron_root(AdjMatrix((("x",),), ((4,),)))
    assert one.exact == 4


def test_power_iteration_enclosure():
    mat = adjacency_matrix(eigen_spec())
    res = power_iteration(mat)
    assert res.lower <= 2 <= res.upper
    assert res.upper - res.lower <= 1e-10


def test_eigenvectors_published_exact():
    vec = perron_vectors(eigen_spec())
    assert vec.exact
    assert vec.left == (Fraction(3, 2), Fraction(1), Fraction(1, 2), Fraction(1))
    assert vec.right == (Fraction(2, 3), Fraction(2, 3), Fraction(4, 3), Fraction(4, 3))
    assert vec.dot == Fraction(11, 3)


def test_eigenvectors_published_irrational():
    s = validate_spec("01", ["00"], [("01", 2), ("10", 3), ("11", 2)])
    vec = perron_vectors(s)
    r7 = math.sqrt(7)
    assert abs(vec.root.theta - (1 + r7)) <= 1e-9
    assert abs(vec.left[0] - (r7 - 1)) <= 1e-9
    assert abs(vec.left[1] - 2) <= 1e-9
    assert abs(vec.right[0] - 2 * (r7 - 2)) <= 1e-9
    assert abs(vec.right[1] - (5 - r7)) <= 1e-9


def test_eigenvectors_full_shift_constant():
    vec = perron_vectors(validate_spec("01", [], []))
    assert vec.left == (Fraction(1), Fraction(1))
    assert vec.right == (Fraction(1), Fraction(1))


def test_eigen_residuals_random(rng):
    for want_nonreduced in (False, True):
        for _ in range(3):
            s = random_spec(rng, want_nonreduced)
            vec = perron_vectors(s)
            mat = adjacency_matrix(extend_repeated_to_full_length(s))
            res_l, res_r = eigen_residuals(mat, vec.root.theta, vec.left, vec.right)
            assert max(res_l, res_r) <= 1e-9


def test_direction_reversal_swaps_vectors():
    # building the spec from reversed words transposes the matrix and
    # swaps the roles of the two eigenvectors
    s = eigen_spec()
    rev = validate_spec(s.alphabet,
                        [a[::-1] for a in s.forbidden],
                        [(r[::-1], m) for r, m in s.repeated])
    vec = perron_vectors(s)
    vec_rev = perron_vectors(rev)
    a = adjacency_matrix(s)
    b = adjacency_matrix(rev)
    for i, x in enumerate(a.labels):
        j = b.labels.index(x[::-1])
        for k, y in enumerate(a.labels):
            el = b.labels.index(y[::-1])
            assert a.entries[i][k] == b.entries[el][j]
        assert vec.left[i] == vec_rev.right[j]
        assert vec.right[i] == vec_rev.left[j]


def test_normalization_published():
    n = eigenvector_normalization(eigen_spec())
    assert n.dot == Fraction(11, 3)
    assert n.identity_value == Fraction(11, 3)
    assert n.agree and n.witness is not None

    s2 = validate_spec("01", ["00"], [("01", 2), ("10", 3), ("11", 2)])
    n2 = eigenvector_normalization(s2)
    assert n2.witness is None
    assert abs(float(n2.dot) - (28 - 8 * math.sqrt(7))) <= 1e-9
    assert n2.agree  # the identity holds empirically even without a witness


def test_normalization_sparse_family():
    for mults, alpha in (((2, 3, 3), 8), ((5, 5, 5), 15)):
        s = validate_spec("0123", [], [(w, m) for w, m in
                                       zip(("10", "20", "30"), mults)])
        n = eigenvector_normalization(s)
        assert abs(float(n.dot) - 2 * math.sqrt(1 + alpha)) <= 1e-9
        assert n.agree


def test_witness_search():
    # diagonal entry one: the loop word itself is the witness
    w = multiplicity_one_witness(eigen_spec())
    assert w is not None
    assert multiplicity(w.connector, extend_repeated_to_full_length(eigen_spec())) == 1
    assert multiplicity(w.cycle, extend_repeated_to_full_length(eigen_spec())) == 1
    s2 = validate_spec("01", ["00"], [("01", 2), ("10", 3), ("11", 2)])
    assert multiplicity_one_witness(s2) is None
    # the weight-one two-step cycle 0 -> 1 -> 0 qualifies here
    s3 = validate_spec("01", ["11"], [("00", 2)])
    w3 = multiplicity_one_witness(s3)
    assert w3 is not None and w3.cycle == ("0", "1", "0")


def test_power_sums_equal_counts_when_full_length():
    for s in (validate_spec("01", ["010"], [("000", 2)]),
              validate_spec("01", ["11"], [("00", 3)])):
        mat = adjacency_matrix(s)
        f, _, _ = oracle_tables(s, s.p + 6)
        for n in range(s.p, s.p + 7):
            assert mat.power_sum(n - s.p + 1) == f[n]


def test_entropy_values():
    assert abs(entropy(validate_spec("01", [], [])).ln_theta - math.log(2)) <= 1e-12
    assert abs(entropy(eigen_spec()).ln_theta - math.log(2)) <= 1e-12
    e = entropy(split_spec())
    assert abs(e.ln_theta - math.log(2.5986745)) <= 1e-6
    assert abs(e.estimate - e.ln_theta) <= 0.2  # finite-size display value


def test_extension_route_used_for_short_words():
    s = validate_spec("01", ["0000"], [("01", 2)])
    vec = perron_vectors(s)
    mat = adjacency_matrix(s)
    res_l, res_r = eigen_residuals(mat, vec.root.theta, vec.left, vec.right)
    assert max(res_l, res_r) <= 1e-9
