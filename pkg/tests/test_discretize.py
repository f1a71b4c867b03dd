"""Core solver tests: Gram data, rule verification, weight solving with
prefix witnesses, strict-positivity certificates, exhaustive minimality,
grid exploration, structural lower bounds, and support reduction."""

import json
from fractions import Fraction

import pytest

import oracles
import props
from exactdisc.corpus import build_f1, build_f2, build_X2, build_X8, Example1Params, golden_rules
from exactdisc.discretize import (
    Infeasible,
    NoPositive,
    NotApplicable,
    PositiveWitness,
    PreconditionError,
    Rule,
    Subspace,
    WeightSolution,
    caratheodory_reduce,
    decide_min,
    forced_region_contradiction,
    gram,
    index_pairs,
    measure_rule,
    min_certificate_to_doc,
    moment_vector,
    pair_index,
    positive_feasible,
    search_grid,
    solve_weights,
    support_lower_bound,
    verify_rule,
)
from exactdisc.exactnum import Radical
from exactdisc.piecewise import DomainError, constant_fn, pw_support

X2 = build_X2()
X8 = build_X8()
GOLDEN = golden_rules()
NEG_RULE = GOLDEN["ex1-negative"][1]
POS_RULE = GOLDEN["ex1-positive"][1]
NINE_RULE = GOLDEN["ex2-nine"][1]
MIDS = (Fraction(-1, 2), Fraction(1, 8), Fraction(3, 8), Fraction(5, 8), Fraction(7, 8))


def rational_columns(groups, subset):
    return [[v.as_fraction() for v in groups[g].moments] for g in subset]


def rational_rhs(s):
    g, _ = gram(s)
    return [g[i][sx].as_fraction() for i, sx in index_pairs(s.dimension)]


# ---------------------------------------------------------------------------
# pair indexing and Gram data


def test_pair_index_is_a_bijection():
    for n in range(1, 9):
        pairs = index_pairs(n)
        assert len(pairs) == n * (n + 1) // 2
        assert [pair_index(i, s, n) for i, s in pairs] == list(range(len(pairs)))
    with pytest.raises(IndexError):
        pair_index(1, 0, 2)
    with pytest.raises(IndexError):
        pair_index(0, 2, 2)


def test_gram_of_pair():
    g, rank = gram(X2)
    assert rank == 2
    assert g[0][0] == Radical(1)
    assert g[0][1] == g[1][0] == Radical(0)
    assert g[1][1] == Radical(Fraction(15, 2))


def test_gram_of_hierarchy():
    g, rank = gram(X8)
    assert rank == 8
    diag = [1, Fraction(3, 4), Fraction(1, 2), Fraction(1, 2)] + [Fraction(1, 4)] * 4
    for i in range(8):
        assert g[i][i] == Radical(diag[i])
    cross = Radical(Fraction(-43, 240)) + Radical.single(6, Fraction(3, 40))
    for i in range(8):
        for s in range(i + 1, 8):
            assert g[i][s] == (cross if (i, s) == (0, 1) else Radical(0))


def test_moment_vector_entries():
    mv = moment_vector(X2, Fraction(1, 8))
    assert mv.entries == (Radical(1), Radical(3), Radical(9))
    assert mv.entry(0, 1) == Radical(3)
    assert mv.entry(1, 1) == Radical(9)


# ---------------------------------------------------------------------------
# subspaces and rules


def test_subspace_validation():
    with pytest.raises(ValueError, match="distinct"):
        Subspace(("f", "f"), (build_f1(), build_f1()))
    with pytest.raises(ValueError, match="different domains"):
        Subspace(("a", "b"), (constant_fn(0, 1, 1), build_f1()))
    with pytest.raises(ValueError, match="one name per"):
        Subspace(("a",), ())
    assert X2.index_of("f2") == 1
    with pytest.raises(KeyError):
        X2.index_of("f9")


def test_rule_validation_and_merging():
    with pytest.raises(ValueError, match="one weight per node"):
        Rule([0, 1], [1])
    with pytest.raises(ValueError, match="at least one node"):
        Rule([], [])
    with pytest.warns(UserWarning, match="duplicate rule nodes merged"):
        r = Rule([Fraction(1, 8), Fraction(1, 8), Fraction(3, 8)], [1, 2, 5])
    assert r.nodes == (Fraction(1, 8), Fraction(3, 8))
    assert r.weights == (Radical(3), Radical(5))
    assert len(r) == 2
    assert r == Rule([Fraction(1, 8), Fraction(3, 8)], [3, 5])


# ---------------------------------------------------------------------------
# verification


def test_verify_golden_rules():
    assert verify_rule(X2, NEG_RULE).passed
    assert verify_rule(X2, POS_RULE).passed
    report = verify_rule(X2, NEG_RULE)
    assert report.pairs == ((0, 0), (0, 1), (1, 1))
    assert all(r == Radical(0) for r in report.residuals)
    assert report.failing == ()


def test_verify_catches_tampering():
    # bump the negative weight: only the (f2, f2) condition sees the node
    bad = Rule(NEG_RULE.nodes, [Fraction(-1, 2), Fraction(1, 2), Fraction(1, 2)])
    report = verify_rule(X2, bad)
    assert not report.passed
    assert report.failing == ((1, 1),)
    assert report.residual(1, 1) == Radical(1)
    assert report.residual(0, 0) == Radical(0)


def test_verify_rejects_nodes_outside_domain():
    with pytest.raises(DomainError, match="outside domain"):
        verify_rule(X2, Rule([Fraction(3, 2)], [1]))


# ---------------------------------------------------------------------------
# weight solving


def test_solve_weights_unique():
    sol = solve_weights(X2, NEG_RULE.nodes)
    assert isinstance(sol, WeightSolution)
    assert sol.unique
    assert sol.particular == (Radical(Fraction(-3, 2)), Radical(Fraction(1, 2)), Radical(Fraction(1, 2)))


def assert_prefix_witness(s, nodes, expected_pair):
    """The witness marks the exact prefix boundary of solvability."""
    sol = solve_weights(s, nodes)
    assert isinstance(sol, Infeasible)
    assert sol.witness_pair == expected_pair
    allp = index_pairs(s.dimension)
    k = allp.index(expected_pair)
    if k:
        before = solve_weights(s, nodes, pairs=allp[:k])
        assert isinstance(before, WeightSolution)
    through = solve_weights(s, nodes, pairs=allp[: k + 1])
    assert isinstance(through, Infeasible)
    assert through.witness_pair == expected_pair


def test_solve_weights_infeasibility_witnesses():
    assert_prefix_witness(X2, [Fraction(1, 8)], (0, 1))
    assert_prefix_witness(X2, [Fraction(1, 8), Fraction(3, 8)], (1, 1))
    assert_prefix_witness(X8, NINE_RULE.nodes, (2, 2))


def test_solve_weights_underdetermined():
    nodes = [Fraction(-1, 2), Fraction(1, 8), Fraction(3, 8), Fraction(5, 8)]
    sol = solve_weights(X2, nodes)
    assert isinstance(sol, WeightSolution) and not sol.unique
    assert sol.particular == (
        Radical(Fraction(-3, 2)), Radical(Fraction(1, 2)), Radical(Fraction(1, 2)), Radical(0),
    )
    assert len(sol.null_basis) == 1
    (nu,) = sol.null_basis
    # null direction is killed by every moment column
    cols = [moment_vector(X2, x).entries for x in nodes]
    for k in range(3):
        acc = Radical(0)
        for v, col in zip(nu, cols):
            acc = acc + v * col[k]
        assert acc == Radical(0)
    assert verify_rule(X2, Rule(nodes, sol.particular)).passed
    shifted = [p + v for p, v in zip(sol.particular, nu)]
    assert verify_rule(X2, Rule(nodes, shifted)).passed


def test_solve_weights_with_pair_restriction():
    pairs = [p for p in index_pairs(8) if p != (0, 1)]
    sol = solve_weights(X8, NINE_RULE.nodes, pairs=pairs)
    assert isinstance(sol, WeightSolution)
    assert sol.unique
    assert sol.particular == (Radical(-4),) + (Radical(Fraction(1, 8)),) * 8
    with pytest.raises(ValueError, match="pairs outside the basis"):
        solve_weights(X2, [Fraction(1, 8)], pairs=[(0, 5)])


def test_solve_weights_rejects_bad_nodes():
    with pytest.raises(DomainError):
        solve_weights(X2, [Fraction(5, 4)])
    with pytest.raises(ValueError, match="pairwise distinct"):
        solve_weights(X2, [Fraction(1, 8), Fraction(1, 8)])


# ---------------------------------------------------------------------------
# strict positivity


def recheck_no_positive(sol, cert):
    """Replay the refutation: nonnegative multipliers, zero on the null
    space, summing the particular weights to a nonpositive constant."""
    assert all(m.sign() >= 0 for m in cert.multipliers)
    acc = Radical(0)
    for m, p in zip(cert.multipliers, sol.particular):
        acc = acc + m * p
    assert acc == cert.constant
    assert cert.constant.sign() <= 0
    for nu in sol.null_basis:
        combo = Radical(0)
        for m, v in zip(cert.multipliers, nu):
            combo = combo + m * v
        assert combo == Radical(0)


def test_positive_feasible_unique_negative():
    sol = solve_weights(X2, NEG_RULE.nodes)
    cert = positive_feasible(sol)
    assert isinstance(cert, NoPositive)
    assert cert.constant == Radical(Fraction(-3, 2))
    recheck_no_positive(sol, cert)


def test_positive_feasible_unique_positive():
    sol = solve_weights(X2, POS_RULE.nodes)
    wit = positive_feasible(sol)
    assert isinstance(wit, PositiveWitness)
    assert wit.assignment == ()
    assert wit.weights == sol.particular
    assert all(w.sign() > 0 for w in wit.weights)


def test_positive_feasible_underdetermined_interior_point():
    nodes = [Fraction(-1, 2), Fraction(1, 8), Fraction(3, 8), Fraction(7, 8)]
    sol = solve_weights(X2, nodes)
    assert not sol.unique
    wit = positive_feasible(sol)
    assert isinstance(wit, PositiveWitness)
    assert all(w.sign() > 0 for w in wit.weights)
    # assignment reconstructs the weights from the affine solution set
    rebuilt = list(sol.particular)
    for t, nu in zip(wit.assignment, sol.null_basis):
        rebuilt = [w + t * v for w, v in zip(rebuilt, nu)]
    assert tuple(rebuilt) == wit.weights
    assert verify_rule(X2, Rule(nodes, wit.weights)).passed


def test_positive_feasible_underdetermined_refutation():
    # two nodes share the moment vector (0, 0, 1); the pair conditions pin
    # the right-hand weights and force the left pair to sum to -3/2
    nodes = [Fraction(-1, 2), Fraction(-1, 4), Fraction(1, 8), Fraction(3, 8)]
    sol = solve_weights(X2, nodes)
    assert not sol.unique
    cert = positive_feasible(sol)
    assert isinstance(cert, NoPositive)
    recheck_no_positive(sol, cert)


def test_positive_feasible_trivial_subspace():
    s = Subspace(("f1",), (build_f1(),))
    sol = solve_weights(s, [Fraction(1, 2)])
    wit = positive_feasible(sol)
    assert isinstance(wit, PositiveWitness)
    assert wit.weights == (Radical(1),)


# ---------------------------------------------------------------------------
# minimal node counts


def test_decide_min_signed():
    cert = decide_min(X2)
    assert cert.mode == "signed" and cert.m_min == 3
    assert cert.witness == NEG_RULE
    assert verify_rule(X2, cert.witness).passed
    assert [(lvl.m, lvl.count) for lvl in cert.exhaustion] == [(1, 5), (2, 15)]
    assert len(cert.groups) == 5
    assert cert.flags == ()
    assert verify_rule(X2, cert.fallback).passed
    assert cert.justification  # merge argument travels with the certificate


def test_decide_min_positive():
    cert = decide_min(X2, "positive")
    assert cert.m_min == 3
    assert cert.witness == Rule(
        [Fraction(-1, 2), Fraction(1, 8), Fraction(7, 8)],
        [Fraction(3, 2), Fraction(2, 5), Fraction(3, 5)],
    )
    assert all(w.sign() > 0 for w in cert.witness.weights)
    assert [(lvl.m, lvl.count) for lvl in cert.exhaustion] == [(1, 5), (2, 15)]


def test_decide_min_exhaustion_reasons_recheck():
    rhs = rational_rhs(X2)
    for cert in (decide_min(X2), decide_min(X2, "positive")):
        reasons = {}
        for lvl in cert.exhaustion:
            assert len(lvl.cases) == lvl.count
            for case in lvl.cases:
                reasons.setdefault((lvl.m, case.reason), 0)
                reasons[(lvl.m, case.reason)] += 1
                cols = rational_columns(cert.groups, case.subset)
                assert oracles.check_case_reason(cols, rhs, case.reason), case
        # level 1: every single vector misses; level 2: the five repeated
        # vectors are rank-deficient, the ten genuine pairs inconsistent
        assert reasons == {
            (1, "inconsistent"): 5,
            (2, "rank-deficient"): 5,
            (2, "inconsistent"): 10,
        }


def test_decide_min_trivial_subspace():
    s = Subspace(("f1",), (build_f1(),))
    for mode in ("signed", "positive"):
        cert = decide_min(s, mode)
        assert cert.m_min == 1
        assert cert.exhaustion == ()
        assert verify_rule(s, cert.witness).passed


def test_decide_min_rejects_non_constant_basis():
    with pytest.raises(PreconditionError, match="not piecewise constant"):
        decide_min(X8)
    with pytest.raises(ValueError, match="unknown mode"):
        decide_min(X2, "best")


def test_decide_min_agrees_with_brute_enumeration():
    import random

    from exactdisc.discretize import subspace_to_doc

    rng = random.Random(21)
    for _ in range(8):
        s = props.random_pwc_subspace(rng)
        doc = subspace_to_doc(s)
        for mode in ("signed", "positive"):
            assert decide_min(s, mode).m_min == oracles.brute_min(doc, mode), doc


def test_decide_min_deterministic_across_jobs():
    for mode in ("signed", "positive"):
        one = min_certificate_to_doc(X2, decide_min(X2, mode, jobs=1))
        four = min_certificate_to_doc(X2, decide_min(X2, mode, jobs=4))
        assert json.dumps(one, sort_keys=True) == json.dumps(four, sort_keys=True)


def test_measure_rule_is_exact_and_positive():
    r = measure_rule(X2)
    assert r.nodes == MIDS
    assert r.weights == (Radical(1),) + (Radical(Fraction(1, 4)),) * 4
    assert verify_rule(X2, r).passed


def test_minimum_is_sandwiched_by_the_known_rule():
    # exhaustion gives the lower bound, the verified golden rule the upper
    assert decide_min(X2).m_min == len(NEG_RULE)


# ---------------------------------------------------------------------------
# grid exploration


def test_search_grid_small_sizes_find_nothing():
    assert search_grid(X2, MIDS, 1) == []
    assert search_grid(X2, MIDS, 2) == []


def test_search_grid_finds_all_three_node_rules():
    signed = search_grid(X2, MIDS, 3)
    positive = search_grid(X2, MIDS, 3, "positive")
    assert len(signed) == 10 and len(positive) == 5
    for r in signed:
        assert verify_rule(X2, r).passed
    for r in positive:
        assert all(w.sign() > 0 for w in r.weights)
    assert NEG_RULE in signed and NEG_RULE not in positive
    assert POS_RULE in positive
    assert Rule(
        [Fraction(-1, 2), Fraction(5, 8), Fraction(7, 8)],
        [Fraction(7, 2), Fraction(1, 2), Fraction(1, 2)],
    ) in positive


def test_search_grid_max_subsets_cap():
    # lexicographically the third subset is the first positive-feasible one
    capped = search_grid(X2, MIDS, 3, "positive", max_subsets=3)
    assert capped == [
        Rule(
            [Fraction(-1, 2), Fraction(1, 8), Fraction(7, 8)],
            [Fraction(3, 2), Fraction(2, 5), Fraction(3, 5)],
        )
    ]
    assert search_grid(X2, MIDS, 3, "positive", max_subsets=2) == []


def test_search_grid_recovers_nine_node_rule_under_restriction():
    pairs = [p for p in index_pairs(8) if p != (0, 1)]
    found = search_grid(X8, NINE_RULE.nodes, 9, "signed", pairs=pairs)
    assert found == [NINE_RULE]
    assert search_grid(X8, NINE_RULE.nodes, 9, "positive", pairs=pairs) == []
    # with the full pair list nothing survives
    assert search_grid(X8, NINE_RULE.nodes, 9, "signed") == []


def test_search_grid_argument_validation():
    with pytest.raises(ValueError, match="out of range"):
        search_grid(X2, MIDS, 0)
    with pytest.raises(ValueError, match="out of range"):
        search_grid(X2, MIDS, 6)
    with pytest.raises(DomainError):
        search_grid(X2, [Fraction(3, 2)], 1)
    with pytest.raises(ValueError, match="pairwise distinct"):
        search_grid(X2, [Fraction(1, 8), Fraction(1, 8)], 1)


def test_search_grid_deterministic_across_jobs():
    a = search_grid(X2, MIDS, 3, "positive", jobs=1)
    b = search_grid(X2, MIDS, 3, "positive", jobs=3)
    assert a == b


# ---------------------------------------------------------------------------
# structural lower bounds


def test_support_lower_bound_counts_eight():
    cert = support_lower_bound(X8, 0, (4, 5, 6, 7))
    assert cert.bound == 8
    assert cert.regions == (
        (Fraction(9, 64), Fraction(11, 64)),
        (Fraction(13, 64), Fraction(15, 64)),
        (Fraction(41, 64), Fraction(43, 64)),
        (Fraction(45, 64), Fraction(47, 64)),
    )
    for clause in cert.clauses:
        assert clause.count == 2
        assert clause.norm_sq == Radical(Fraction(1, 4))
        assert clause.inner == Radical(0)
        assert clause.nonvanishing


def test_support_lower_bound_single_target():
    cert = support_lower_bound(X8, 0, (2,))
    assert cert.bound == 2
    # numeric spot check of the clause premise via the independent
    # evaluator: the witness stays near 1 on the whole forced hull, so a
    # single node xi there cannot satisfy both lambda*h0(xi)*h2(xi) = 0
    # and lambda*h2(xi)^2 = ||h2||^2 != 0
    from exactdisc.discretize import subspace_to_doc

    doc = subspace_to_doc(X8)
    ev0 = oracles.fn_evaluator(doc["functions"][0])
    (lo, hi) = cert.clauses[0].support_hull[0]
    for k in range(11):
        x = float(lo) + k * (float(hi) - float(lo)) / 10
        assert abs(float(ev0(x))) > 0.9


def test_support_lower_bound_without_orthogonality_premise():
    cert = support_lower_bound(X2, 0, (1,))
    assert cert.bound == 1
    (clause,) = cert.clauses
    assert clause.count == 1
    assert not clause.nonvanishing  # the indicator dies on [-1, 0)


def test_support_lower_bound_rejects_overlapping_targets():
    with pytest.raises(PreconditionError, match="not provably disjoint"):
        support_lower_bound(X8, 0, (2, 4))


def test_forced_region_contradiction_upgrades_to_nine():
    base = support_lower_bound(X8, 0, (4, 5, 6, 7))
    improved = forced_region_contradiction(X8, base, 0, 1)
    assert improved.bound == 9
    assert improved.constants == (Radical(1), Radical(1))
    assert improved.sums == (Radical(1), Radical(Fraction(3, 4)))


def test_forced_region_contradiction_refusals():
    base = support_lower_bound(X8, 0, (4, 5, 6, 7))
    same = forced_region_contradiction(X8, base, 0, 0)
    assert isinstance(same, NotApplicable) and "same weight sum" in same.reason

    not_const = forced_region_contradiction(X8, base, 2, 1)
    assert isinstance(not_const, NotApplicable)
    assert "not exactly constant" in not_const.reason

    base2 = support_lower_bound(X2, 0, (1,))
    res2 = forced_region_contradiction(X2, base2, 0, 1)
    assert isinstance(res2, NotApplicable) and "not exactly constant" in res2.reason

    zero = constant_fn(-1, 1, 0)
    s3 = Subspace(("z", "f1", "f2"), (zero, build_f1(), build_f2(Example1Params())))
    cert3 = support_lower_bound(s3, 1, (2,))
    assert cert3.bound == 1
    res3 = forced_region_contradiction(s3, cert3, 0, 1)
    assert isinstance(res3, NotApplicable) and "not strictly positive" in res3.reason

    s0 = Subspace(("z", "f1"), (zero, build_f1()))
    empty = support_lower_bound(s0, 1, (0,))
    assert empty.bound == 0 and empty.regions == ()
    res0 = forced_region_contradiction(s0, empty, 0, 1)
    assert isinstance(res0, NotApplicable) and "forces no nodes" in res0.reason


def test_zero_norm_target_contributes_nothing():
    zero = constant_fn(-1, 1, 0)
    s = Subspace(("z", "f1"), (zero, build_f1()))
    cert = support_lower_bound(s, 1, (0,))
    (clause,) = cert.clauses
    assert clause.count == 0 and clause.norm_sq == Radical(0)


# ---------------------------------------------------------------------------
# support reduction


def test_caratheodory_reduce_positive():
    res = caratheodory_reduce(X2, measure_rule(X2), "positive")
    assert res.rule == Rule(
        [Fraction(1, 8), Fraction(3, 8), Fraction(5, 8)],
        [Fraction(1, 4), Fraction(9, 20), Fraction(3, 10)],
    )
    assert len(res.steps) == 2
    assert verify_rule(X2, res.rule).passed
    assert all(w.sign() > 0 for w in res.rule.weights)
    dropped = [x for step in res.steps for x in step.dropped]
    assert set(dropped) | set(res.rule.nodes) == set(MIDS)


def test_caratheodory_reduce_signed():
    res = caratheodory_reduce(X2, measure_rule(X2), "signed")
    assert len(res.rule) <= 3  # at most pair-count many nodes survive
    assert verify_rule(X2, res.rule).passed


def test_caratheodory_reduce_fixpoint():
    res = caratheodory_reduce(X2, NEG_RULE)
    assert res.rule == NEG_RULE and res.steps == ()


def test_caratheodory_reduce_preconditions():
    with pytest.raises(PreconditionError, match="does not verify"):
        caratheodory_reduce(X2, Rule([Fraction(1, 2)], [1]))
    with pytest.raises(PreconditionError, match="strictly positive"):
        caratheodory_reduce(X2, NEG_RULE, "positive")
    with pytest.raises(ValueError, match="unknown mode"):
        caratheodory_reduce(X2, NEG_RULE, "fewest")


# ---------------------------------------------------------------------------
# the defect identity ties everything together


def test_polarization_defect_identity():
    # verified rule: zero defect on every random combination
    assert props.run_polarization(X2, NEG_RULE, 20) == 0
    assert props.run_polarization(X2, POS_RULE, 20) == 0
    # the nine-node rule misses exactly one pair condition, and the defect
    # identity pins every nonzero defect to that residual
    assert props.run_polarization(X8, NINE_RULE, 5) == 5
