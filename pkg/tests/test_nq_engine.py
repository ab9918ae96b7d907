import numpy as np
import pytest

import nq_engine
from analysis import compare_canonical, lower_central_data
from exceptions import BudgetExceeded, NqError, VerificationError
from helpers import group_input, witt
from nq_engine import (REACHED_MAX_CLASS, STABILIZED, Target, abelian_quotient,
                       evaluate_law, evaluate_word, image_quotient, instance_set,
                       nilpotent_quotient, random_element, torsion_free_quotient, verify_laws,
                       weighted_words)
from pcpres import Definition, invert, multiply, word_of
from utils import BudgetGuard
from words import Word, engel_word, parse_word, substitute


def layer_ranks(result):
    return [free for _, free, _ in lower_central_data(result.presentation).rows()]


@pytest.mark.parametrize("rank, max_class", [
    (2, 5), (3, 3), (4, 2),
    pytest.param(2, 6, marks=pytest.mark.slow),
    pytest.param(3, 4, marks=pytest.mark.slow),
    pytest.param(4, 3, marks=pytest.mark.slow),
])
def test_free_nilpotent_ranks_follow_witt(rank, max_class):
    names = " ".join("abcdefg"[:rank])
    result = nilpotent_quotient(group_input(names), max_class=max_class)
    assert result.class_achieved == max_class
    assert result.termination == REACHED_MAX_CLASS
    assert layer_ranks(result) == [witt(rank, k) for k in range(1, max_class + 1)]
    assert all(not t for _, _, t in lower_central_data(result.presentation).rows())


@pytest.mark.slow
def test_free_rank_two_to_class_eight():
    result = nilpotent_quotient(group_input("a b"), max_class=8)
    assert layer_ranks(result) == [2, 1, 2, 3, 6, 9, 18, 30]


def test_abelianization():
    result = nilpotent_quotient(group_input("a b", relators=["[a,b]"]))
    assert result.class_achieved == 1
    assert result.termination == STABILIZED
    assert result.presentation.rel_orders == (0, 0)


def test_cyclic_group():
    result = nilpotent_quotient(group_input("a", relators=["a^6"]))
    P = result.presentation
    assert result.termination == STABILIZED
    assert P.rel_orders == (6,)
    assert result.images == ((1,),)


def test_relator_eliminates_a_generator():
    result = nilpotent_quotient(group_input("a b", relators=["a b^-2"]))
    assert result.presentation.n == 1
    assert result.epimorphism == {"a": (2,), "b": (1,)}
    assert result.termination == STABILIZED


def test_non_unit_pivot_is_absorbed_by_the_layer_basis():
    # Z^2 / <b a^-2> is infinite cyclic: one generator, no power relation
    result = nilpotent_quotient(group_input("a b", relators=["b a^-2"]))
    P = result.presentation
    assert P.n == 1
    assert P.rel_orders == (0,)
    assert result.epimorphism == {"a": (1,), "b": (2,)}
    assert P.definitions == (Definition("image", (0,)),)


def test_mixed_layer_relations_give_a_smith_basis():
    # Z^2 / <a^2 b^2, b^4> = Z/2 + Z/4 needs a generator that is not a single image
    result = nilpotent_quotient(group_input("a b", relators=["a^2 b^2", "b^4", "[a,b]"]))
    P = result.presentation
    assert sorted(P.rel_orders) == [2, 4]
    assert P.powers == {}
    assert any(d.kind == "combination" for d in P.definitions)
    assert lower_central_data(P).layers[0].torsion == (2, 4)
    assert verify_laws(result, group_input("a b", relators=["a^2 b^2", "b^4", "[a,b]"])).passed


def test_combination_generators_stay_defined_at_higher_classes():
    gi = group_input("a b", relators=["a^2 b^2", "b^4"])
    result = nilpotent_quotient(gi, max_class=4)
    P = result.presentation
    assert result.class_achieved == 4
    assert all(w not in {P.weights[g] for g, _ in P.power_word(i)}
               for i, w in enumerate(P.weights) if P.rel_orders[i])
    assert verify_laws(result, gi).passed
    data = lower_central_data(P)
    assert data.layers[0].torsion == (2, 4)
    rebuilt = image_quotient(Target(P, result.images), ("a", "b"))
    assert compare_canonical(rebuilt.presentation, P).equal


def test_trivial_group():
    result = nilpotent_quotient(group_input(""))
    assert result.class_achieved == 0
    assert result.presentation.n == 0
    assert result.termination == STABILIZED
    result = nilpotent_quotient(group_input("a", relators=["a"]))
    assert result.class_achieved == 0


def test_heisenberg_from_relators():
    result = nilpotent_quotient(group_input("a b", relators=["[a,b,a]", "[a,b,b]"]))
    assert result.class_achieved == 2
    assert result.termination == STABILIZED
    assert layer_ranks(result) == [2, 1]


def test_abelian_law():
    gi = group_input("a b", laws=["[x,y]"], variables=("x", "y"))
    result = nilpotent_quotient(gi)
    assert result.class_achieved == 1
    assert result.termination == STABILIZED
    assert result.verification.passed


def test_two_engel_two_generator_group_has_class_two():
    gi = group_input("a b", laws=["[x,y,y]"], variables=("x", "y"))
    result = nilpotent_quotient(gi, max_class=5)
    assert result.termination == STABILIZED
    assert layer_ranks(result) == [2, 1]
    assert result.verification.passed


def test_instance_set_prunes_by_weight():
    gi = group_input("a b", laws=["[a,x,x]"], variables=("x",))
    law = gi.laws[0]
    Q1 = abelian_quotient(gi)
    assert instance_set(Q1, law) == []
    free2 = nilpotent_quotient(group_input("a b"), max_class=2)
    assignments = instance_set(free2, law, "generators")
    assert len(assignments) == 2
    assert all(free2.presentation.weights[list(a["x"]).index(1)] == 1 for a in assignments)
    richer = instance_set(free2, law)
    assert len(richer) > len(assignments)
    with pytest.raises(ValueError):
        instance_set(free2, law, "everything")


def count_exponent_vectors(weights, budget):
    ways = [1] + [0] * budget
    for w in weights:
        for s in range(w, budget + 1):
            ways[s] += ways[s - w]
    return sum(ways)


def test_weighted_words_count_bounded_exponent_vectors():
    weights = [1] * 3 + [2] * 3 + [3] * 8 + [4] * 18 + [5] * 48
    words = weighted_words(weights, 5)
    assert len(words) == count_exponent_vectors(weights, 5)
    assert len({word for word, _ in words}) == len(words)
    assert words[0] == ((), 0)
    assert all(degree == sum(weights[g] * e for g, e in word) <= 5 for word, degree in words)


def test_polynomial_instances_respect_the_joint_degree():
    free3 = nilpotent_quotient(group_input("a b"), max_class=3)
    P = free3.presentation
    law = group_input("a b", laws=["[x,y,y]"], variables=("x", "y")).laws[0]
    assignments = instance_set(free3, law, "polynomial")
    assert assignments
    for assignment in assignments:
        degrees = [sum(P.weights[i] * e for i, e in enumerate(x)) for x in assignment.values()]
        assert all(e >= 0 for x in assignment.values() for e in x)
        assert sum(degrees) <= 4
    pairs = nq_engine._candidates(P, "generators_plus_pairs", 3)
    assert len({x for x, _ in pairs}) == len(pairs)


def test_unenforced_law_fails_at_its_class(monkeypatch):
    monkeypatch.setattr(nq_engine, "instance_set", lambda Q, law, strategy="polynomial": [])
    gi = group_input("a b", laws=["[x,y]"], variables=("x", "y"))
    with pytest.raises(VerificationError) as info:
        nilpotent_quotient(gi, max_class=2, auto_escalate=False, verify_samples=50)
    failed = info.value.partial
    assert failed.class_achieved == 2
    assert not failed.verification.passed
    assert info.value.counterexample.kind == "law"
    # every rung of the ladder is emptied as well
    with pytest.raises(VerificationError):
        nilpotent_quotient(gi, max_class=2, strategy="generators", verify_samples=50)


def test_counterexample_escalates_at_the_failing_class(monkeypatch):
    real = nq_engine.instance_set
    calls = []

    def weak(Q, law, strategy="polynomial"):
        calls.append((Q.class_achieved, strategy))
        return [] if strategy == "generators" else real(Q, law, strategy)

    monkeypatch.setattr(nq_engine, "instance_set", weak)
    gi = group_input("a b", laws=["[x,y,y]"], variables=("x", "y"))
    result = nilpotent_quotient(gi, max_class=5, strategy="generators", verify_samples=50)
    assert result.termination == STABILIZED
    assert layer_ranks(result) == [2, 1]
    assert result.strategy == "generators_plus_pairs"
    assert result.verification.passed
    assert calls == [(1, "generators"), (2, "generators"), (2, "generators_plus_pairs")]


@pytest.mark.parametrize("strategy", ["generators", "generators_plus_pairs", "polynomial"])
def test_every_strategy_that_finishes_satisfies_the_law(strategy):
    gi = group_input("a b", laws=["[x,y,y]"], variables=("x", "y"))
    try:
        result = nilpotent_quotient(gi, max_class=4, strategy=strategy, auto_escalate=False,
                                    verify_samples=50)
    except VerificationError:
        assert strategy != "polynomial"
        return
    assert verify_laws(result, gi, samples=200, seed=3).passed


def test_evaluate_law_shape_matches_body():
    free = nilpotent_quotient(group_input("a b"), max_class=4)
    P = free.presentation
    gi = group_input("a b", laws=["[a,x,x]^2 * [x,b^-1,x]", "(x b)^3 [x,a]"], variables=("x",))
    rng = np.random.default_rng(2)
    gens = dict(zip(gi.generators, free.images))
    for law in gi.laws:
        for _ in range(20):
            x = random_element(P, rng)
            values = dict(gens, x=x)
            assert evaluate_law(P, law, gens, {"x": x}) == evaluate_word(P, law.body, values)


def test_runs_are_deterministic():
    gi = group_input("a b", laws=["[x,y,y,y]"], variables=("x", "y"))
    first = nilpotent_quotient(gi, max_class=4)
    second = nilpotent_quotient(gi, max_class=4)
    P, R = first.presentation, second.presentation
    assert (P.weights, P.rel_orders, P.powers, P.commutators) == \
           (R.weights, R.rel_orders, R.powers, R.commutators)
    assert first.images == second.images
    assert first.stats[-1]["Rows"] == second.stats[-1]["Rows"]


def test_resume_continues_to_the_same_result():
    gi = group_input("a b")
    partial = nilpotent_quotient(gi, max_class=2)
    resumed = nilpotent_quotient(gi, max_class=4, resume=partial)
    fresh = nilpotent_quotient(gi, max_class=4)
    assert compare_canonical(resumed.presentation, fresh.presentation).equal
    assert resumed.class_achieved == 4


def test_budget_exceeded_carries_partial_result():
    with pytest.raises(BudgetExceeded) as info:
        nilpotent_quotient(group_input("a b"), max_class=6,
                           guard=BudgetGuard(time_budget=1e-9, memory_budget=1e9))
    assert info.value.partial is not None
    assert info.value.partial.class_achieved == 1


def test_image_quotient_rebuilds_the_same_presentation():
    free = nilpotent_quotient(group_input("a b"), max_class=3)
    rebuilt = image_quotient(Target(free.presentation, free.images), ("a", "b"))
    assert compare_canonical(rebuilt.presentation, free.presentation).equal
    assert rebuilt.images == free.images


def test_image_quotient_of_a_proper_image():
    # a -> g1, b -> g1 in the free class-3 group: the image is infinite cyclic
    free = nilpotent_quotient(group_input("a b"), max_class=3)
    P = free.presentation
    image = image_quotient(Target(P, (P.unit(0), P.unit(0))), ("a", "b"))
    assert image.presentation.n == 1
    assert image.presentation.rel_orders == (0,)
    assert image.termination == STABILIZED


def test_torsion_free_quotient_drops_layer_torsion():
    gi = group_input("a b", relators=["a^4", "[a,b]"])
    assert nilpotent_quotient(gi).presentation.rel_orders == (4, 0)
    tf = torsion_free_quotient(gi)
    assert tf.presentation.rel_orders == (0,)
    assert tf.images == ((0,), (1,))
    with pytest.raises(NqError):
        torsion_free_quotient(group_input("a", laws=["[a,x]"], variables=("x",)))


@pytest.fixture(scope="module")
def computed_quotients():
    return [
        nilpotent_quotient(group_input("a b"), max_class=4),
        nilpotent_quotient(group_input("a b", relators=["a^2", "b^2"]), max_class=4),
        nilpotent_quotient(group_input("a b", relators=["a^2 b^2", "b^4"]), max_class=4),
        nilpotent_quotient(group_input("a b", laws=["[x,y,y]"], variables=("x", "y"))),
    ]


def test_multiplication_is_associative_in_computed_quotients(computed_quotients):
    rng = np.random.default_rng(21)
    for result in computed_quotients:
        P = result.presentation
        for _ in range(30):
            x, y, z = (random_element(P, rng) for _ in range(3))
            assert multiply(P, multiply(P, x, y), z) == multiply(P, x, multiply(P, y, z))
            assert multiply(P, x, invert(P, x)) == P.zero()


def random_normal_form(P, rng):
    return tuple(int(rng.integers(0, m)) if m else int(rng.integers(-3, 4))
                 for m in P.rel_orders)


def test_normal_forms_are_unique(computed_quotients):
    rng = np.random.default_rng(33)
    for result in computed_quotients[1:3]:
        P = result.presentation
        for _ in range(500):
            u, v = random_normal_form(P, rng), random_normal_form(P, rng)
            assert P.collect(word_of(u)) == u
            assert (multiply(P, u, invert(P, v)) == P.zero()) == (u == v)


def test_substitution_commutes_with_evaluation():
    free = nilpotent_quotient(group_input("a b"), max_class=5)
    P = free.presentation
    gi = group_input("a b", laws=["[a,x,x,x,x]", "[x,y,x]^2 y^-1"], variables=("x", "y"))
    gens = dict(zip(gi.generators, free.images))
    table = {"a": "generator", "b": "generator"}
    u, v = parse_word("b a^-1 b", table), parse_word("[a,b] a^2", table)
    assignment = {"x": evaluate_word(P, u, gens), "y": evaluate_word(P, v, gens)}
    for law in gi.laws:
        words = {name: word for name, word in (("x", u), ("y", v)) if name in law.variables}
        expected = evaluate_law(P, law, gens, {k: assignment[k] for k in words})
        assert evaluate_word(P, substitute(law, words), gens) == expected
    engel = evaluate_word(P, engel_word(Word.letter("a"), u, 4), gens)
    assert engel == evaluate_law(P, gi.laws[0], gens, {"x": assignment["x"]})
    assert any(engel)


@pytest.mark.slow
def test_single_three_engel_element_layers():
    gi = group_input("a c", laws=["[a,x,x,x]"], variables=("x",))
    result = nilpotent_quotient(gi)
    assert result.termination == STABILIZED
    assert lower_central_data(result.presentation).rows() == [
        (1, 2, ()), (2, 1, ()), (3, 2, ()), (4, 0, (4,)), (5, 0, (2, 2))]
    assert result.verification.passed
