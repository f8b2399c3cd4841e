import pytest

from bigtor.errors import InputError
from bigtor.intlinalg import IntMatrix, ZModule
from bigtor.koszul_tor import (
    KoszulComplex,
    depth_estimate,
    euler_discrepancies,
    expected_euler_characteristic,
    rational_tor_ranks,
    regular_sequence_check,
    tor1_witness,
    tor_piece,
    tor_presentation,
    tor_table,
    verdicts,
)
from bigtor.simplicial import SubgroupData, build_complex
from bigtor.stanley_reisner import LinearForm, quotient_piece

import oracles


def forms_of(S):
    return [LinearForm(S.row_coefficients(i)) for i in range(S.n)]


def koszul_of(problem):
    return KoszulComplex(problem.complex, forms_of(problem.B))


def test_differential_squares_to_zero(corpus_problem):
    _, problem = corpus_problem
    kc = koszul_of(problem)
    n = problem.B.n
    for p in range(n + 1):
        for j in (4, 8):
            assert kc.differential(p, j).mul(kc.differential(p + 1, j)).is_zero()


def test_chain_dims_count_subset_blocks(corpus_problem):
    _, problem = corpus_problem
    kc = koszul_of(problem)
    n = problem.B.n
    for p in range(n + 2):
        for j in (0, 2, 6):
            dim = kc.chain_dim(p, j)
            if p > n or j - 2 * p < 0:
                assert dim == 0
            else:
                assert dim == len(kc.subsets(p)) * len(kc.coefficient_basis(p, j))


def test_homology_matches_naive_oracle(corpus_problem):
    _, problem = corpus_problem
    kc = koszul_of(problem)
    K, S = problem.complex, problem.B
    for p in range(S.n + 1):
        for j in range(0, 10, 2):
            got = tor_piece(K, S, p, j)
            rank, torsion = oracles.homology_structure(
                kc.differential(p, j).to_lists(),
                kc.differential(p + 1, j).to_lists(),
                kc.chain_dim(p, j),
            )
            assert (got.rank, list(got.torsion)) == (rank, torsion), (p, j)


def test_weighted_12_head_of_table(corpus):
    problem = corpus["wps12"]
    K, S = problem.complex, problem.B
    assert tor_piece(K, S, 0, 0) == ZModule(1)
    assert tor_piece(K, S, 0, 2) == ZModule(1)
    assert tor_piece(K, S, 0, 4) == ZModule(0, (2,))
    assert tor_piece(K, S, 1, 4) == ZModule(0)


def test_prod1212_pinned_values(corpus):
    problem = corpus["prod1212"]
    K, S = problem.complex, problem.B
    assert tor_piece(K, S, 1, 8) == ZModule(0, (2,))
    assert tor_piece(K, S, 1, 10) == ZModule(0, (2, 2))
    assert tor_piece(K, S, 0, 4).torsion == (2, 2)
    witness = tor1_witness(K, S, 10)
    assert witness is not None
    assert witness.index.p == 1
    assert witness.index.j == 8
    parts = {i: poly.render() for i, poly in witness.components}
    assert parts == {1: "x2^2*x3", 2: "x2*x3^2"}
    assert "(x1 - 2x3)*(x2^2*x3) + (2x2 - x4)*(x2*x3^2) = 0" in witness.explanation


def test_tor1_witness_none_on_regular_input(corpus):
    problem = corpus["wps12"]
    assert tor1_witness(problem.complex, problem.B, 12) is None


def test_row_permutation_leaves_table_unchanged(corpus):
    problem = corpus["prod1212"]
    K = problem.complex
    swapped = SubgroupData(IntMatrix([[0, 2, 0, -1], [1, 0, -2, 0]]))
    original = tor_table(K, problem.B, 10)
    permuted = tor_table(K, swapped, 10)
    assert original.table == permuted.table


def test_verdict_rendering(corpus):
    table = tor_table(corpus["wps12"].complex, corpus["wps12"].B, 8)
    report = verdicts(table)
    assert str(report.bigcm) == "HOLDS_UP_TO(8)"
    assert str(report.tor0_torsion_free) == "FAILS(j=4, torsion=[2])"
    assert not report.free_over_R.holds()
    assert report.odd_vanishing.holds()


def test_verdicts_fail_case(corpus):
    table = tor_table(corpus["prod1212"].complex, corpus["prod1212"].B, 10)
    report = verdicts(table)
    assert not report.bigcm.holds()
    assert dict(report.bigcm.witness)["j"] == 8
    assert not report.odd_vanishing.holds()
    assert not report.free_over_R.holds()


def test_depth_estimates(corpus):
    wps = corpus["wps12"]
    est = depth_estimate(tor_table(wps.complex, wps.B, 12))
    assert (est.value, est.qualifier) == (1, "conditional")
    assert str(est) == "1 (conditional on the bound 12)"

    prod = corpus["prod1212"]
    est = depth_estimate(tor_table(prod.complex, prod.B, 10))
    assert est.qualifier == "at_most"
    assert str(est).startswith("<=")

    empty = SubgroupData(IntMatrix.zeros(0, 2))
    K = build_complex(2, [(1,), (2,)])
    est = depth_estimate(tor_table(K, empty, 4))
    assert (est.value, est.qualifier) == (0, "exact")


def test_regular_sequence_agreement(corpus_problem):
    _, problem = corpus_problem
    K, S = problem.complex, problem.B
    table = tor_table(K, S, 10)
    direct = regular_sequence_check(K, S, 10)
    assert direct.regular == verdicts(table).bigcm.holds()


def test_regular_sequence_witness_prod1212(corpus):
    problem = corpus["prod1212"]
    report = regular_sequence_check(problem.complex, problem.B, 10)
    assert not report.regular
    w = report.witness
    assert (w.stage, w.j, w.class_text, w.form_text) == (2, 6, "x2*x3^2", "2x2 - x4")
    assert str(w) == (
        "u2 = 2x2 - x4 kills the nonzero class x2*x3^2 in degree 6 "
        "of the stage-2 quotient"
    )


def test_euler_characteristic_oracle(corpus_problem):
    _, problem = corpus_problem
    K, S = problem.complex, problem.B
    table = tor_table(K, S, 10)
    assert euler_discrepancies(K, S, table) == []
    maximal = K.face_vertices()
    for j in range(0, 12, 2):
        assert expected_euler_characteristic(K, S.n, j) == oracles.euler_characteristic(
            maximal, S.n, j
        )


def test_tor0_matches_quotient_piece(corpus_problem):
    _, problem = corpus_problem
    K, S = problem.complex, problem.B
    for j in range(0, 12, 2):
        assert tor_piece(K, S, 0, j) == quotient_piece(K, forms_of(S), j)


def test_rational_ranks_match_integral(corpus_problem):
    _, problem = corpus_problem
    K, S = problem.complex, problem.B
    table = tor_table(K, S, 10)
    ranks = rational_tor_ranks(K, S, 10)
    for (p, j), rank in ranks.items():
        assert rank == table.piece(p, j).rank, (p, j)


def test_tor1_vanishing_forces_all_higher(corpus_problem):
    _, problem = corpus_problem
    K, S = problem.complex, problem.B
    table = tor_table(K, S, 10)
    tor1_zero = all(table.piece(1, j).is_zero() for j in range(0, 11, 2))
    if tor1_zero:
        for p in range(1, S.n + 1):
            for j in range(0, 11, 2):
                assert table.piece(p, j).is_zero()


def test_input_validation(corpus):
    problem = corpus["wps12"]
    K, S = problem.complex, problem.B
    with pytest.raises(InputError):
        tor_presentation(K, S, -1, 4)
    with pytest.raises(InputError):
        tor_presentation(K, S, S.n + 1, 4)
    with pytest.raises(InputError):
        tor_presentation(K, S, 0, 3)
    with pytest.raises(InputError):
        tor_table(K, S, 7)
    with pytest.raises(InputError):
        tor_piece(build_complex(3, [(1,)]), S, 0, 0)
