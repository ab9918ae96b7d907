import itertools

import numpy as np
import pytest

from analysis import (canonical_form, central_section_exponent, certify_isomorphism,
                      compare_canonical, hirsch_length, is_in_gamma, is_lower_central,
                      lower_central_data, order, project, relators_of, torsion_decomposition)
from exceptions import TorsionDecompositionError, UngradedPresentationError
from helpers import group_input
from nq_engine import nilpotent_quotient, random_element
from pcpres import INFINITE, PcPresentation, commutator


@pytest.fixture(scope="module")
def free3():
    return nilpotent_quotient(group_input("a b"), max_class=3)


@pytest.fixture(scope="module")
def free4():
    return nilpotent_quotient(group_input("a b"), max_class=4)


def test_lower_central_data(free3):
    data = lower_central_data(free3.presentation)
    assert data.nilpotency_class == 3
    assert data.rows() == [(1, 2, ()), (2, 1, ()), (3, 2, ())]
    assert not any(layer.is_trivial for layer in data.layers)
    assert data.layers[2].exponent == INFINITE
    assert list(data.gamma(2)) == [2, 3, 4]
    assert list(data.gamma(4)) == []
    with pytest.raises(ValueError):
        data.gamma(0)


def test_commutators_climb_the_series(free4):
    P = free4.presentation
    rng = np.random.default_rng(9)
    for _ in range(25):
        x, y, z = (random_element(P, rng) for _ in range(3))
        assert is_in_gamma(P, x, 1)
        xy = commutator(P, x, y)
        assert is_in_gamma(P, xy, 2)
        assert is_in_gamma(P, commutator(P, xy, z), 3)
        assert is_in_gamma(P, commutator(P, xy, commutator(P, y, z)), 4)
    assert not is_in_gamma(P, P.unit(0), 2)


def test_central_section_exponent(free3, quaternion):
    P = free3.presentation
    assert central_section_exponent(P, 1) == INFINITE
    assert central_section_exponent(P, 4) == 1
    with pytest.raises(ValueError):
        central_section_exponent(P, 5)
    with pytest.raises(ValueError):
        central_section_exponent(P, 0)
    assert central_section_exponent(quaternion, 1) == 2
    assert central_section_exponent(quaternion, 2) == 2


def test_hirsch_length_and_orders(free3):
    free2 = nilpotent_quotient(group_input("a b"), max_class=2)
    assert hirsch_length(free2.presentation) == 3
    assert hirsch_length(free3.presentation) == 5
    assert order(free3.presentation, free3.presentation.unit(4)) == INFINITE


def test_is_lower_central(free3, quaternion, semidihedral16):
    assert is_lower_central(free3.presentation)
    assert is_lower_central(quaternion)
    assert is_lower_central(semidihedral16)
    # an abelian group with a generator labelled weight 2
    assert not is_lower_central(PcPresentation([1, 2], [0, 0]))


def test_ungraded_presentations_are_rejected():
    P = PcPresentation([1, 1, 2], [0, 0, 0], {}, {(1, 0): ((2, 1),)}, graded=False)
    with pytest.raises(UngradedPresentationError):
        lower_central_data(P)
    with pytest.raises(UngradedPresentationError):
        central_section_exponent(P, 1)
    with pytest.raises(UngradedPresentationError):
        torsion_decomposition(P)


def test_torsion_of_z_times_c6():
    result = nilpotent_quotient(group_input("a b", relators=["[a,b]", "b^6"]))
    P = result.presentation
    assert P.rel_orders == (0, 6)
    decomposition = torsion_decomposition(P)
    assert decomposition.primes == [2, 3]
    assert decomposition.order == 6
    assert decomposition.quotient.n == 1
    assert hirsch_length(decomposition.quotient) == 1
    assert project(decomposition, (3, 5)) == (3,)
    assert project(decomposition, (0, 1)) == (0,)


def test_torsion_free_group_is_its_own_quotient(free3):
    decomposition = torsion_decomposition(free3.presentation)
    assert decomposition.primes == []
    assert decomposition.order == 1
    assert decomposition.quotient is free3.presentation


def test_finite_quotient_of_infinite_dihedral_group():
    result = nilpotent_quotient(group_input("a b", relators=["a^2", "b^2"]), max_class=3)
    P = result.presentation
    assert result.class_achieved == 3
    assert [t for _, _, t in lower_central_data(P).rows()] == [(2, 2), (2,), (2,)]
    decomposition = torsion_decomposition(P)
    assert decomposition.primes == [2]
    assert decomposition.order == 16
    assert decomposition.quotient.n == 0


def test_torsion_hidden_in_a_torsion_free_group_is_reported():
    # x^2 = [a,b] with x central: layer 1 has torsion, the group has none
    gi = group_input("a b x", relators=["x^-2 [a,b]", "[a,x]", "[b,x]"])
    result = nilpotent_quotient(gi)
    P = result.presentation
    assert lower_central_data(P).layers[0].torsion == (2,)
    assert hirsch_length(P) == 3
    with pytest.raises(TorsionDecompositionError):
        torsion_decomposition(P)


def test_relators_of_rebuild_the_group(quaternion):
    gi = group_input("g1 g2 g3", relators=[str(r) for r in relators_of(quaternion)])
    result = nilpotent_quotient(gi)
    P = result.presentation
    assert [m for m in P.rel_orders] == [2, 2, 2]
    assert [t for _, _, t in lower_central_data(P).rows()] == [(2, 2), (2,)]


def test_canonical_form_and_comparison(free3):
    P = free3.presentation
    assert compare_canonical(canonical_form(P, free3.images, ("a", "b")), P).equal
    heisenberg = nilpotent_quotient(group_input("a b", relators=["[a,b,a]", "[a,b,b]"]))
    free2 = nilpotent_quotient(group_input("a b"), max_class=2)
    assert compare_canonical(heisenberg.presentation, free2.presentation)
    outcome = compare_canonical(free2.presentation, P)
    assert not outcome
    assert outcome.witness == "generator count 3 vs 5"


def test_certify_isomorphism():
    free2 = nilpotent_quotient(group_input("a b"), max_class=2)
    assert certify_isomorphism(free2, free2).holds
    heisenberg = nilpotent_quotient(group_input("a b", relators=["[a,b,a]", "[a,b,b]"]))
    assert certify_isomorphism(free2, heisenberg)
    abelian = nilpotent_quotient(group_input("a b", relators=["[a,b]"]))
    certificate = certify_isomorphism(free2, abelian)
    assert not certificate.holds
    assert any("Hirsch" in reason for reason in certificate.reasons)


def test_lower_central_series_is_monotone(free4):
    P = free4.presentation
    data = lower_central_data(P)
    for k in range(1, data.nilpotency_class + 1):
        assert set(data.gamma(k + 1)) < set(data.gamma(k))
    rng = np.random.default_rng(4)
    for _ in range(25):
        x = commutator(P, random_element(P, rng), random_element(P, rng))
        for k in range(1, data.nilpotency_class + 1):
            if is_in_gamma(P, x, k + 1):
                assert is_in_gamma(P, x, k)


def test_torsion_decomposition_agrees_with_layer_torsion():
    # a of order 4 and a central [a,b] of order 2 next to b of infinite order
    gi = group_input("a b", relators=["a^4", "[a,b]^2", "[a,b,a]", "[a,b,b]"])
    P = nilpotent_quotient(gi).presentation
    layers = lower_central_data(P).layers
    decomposition = torsion_decomposition(P)
    assert decomposition.layer_divisors == {L.weight: list(L.torsion)
                                            for L in layers if L.torsion}
    assert decomposition.layer_divisors == {1: [4], 2: [2]}
    assert decomposition.primes == [2]
    assert hirsch_length(decomposition.quotient) == 1

    box = [range(m) if m else range(-3, 4) for m in P.rel_orders]
    finite = [x for x in itertools.product(*box) if order(P, x) != INFINITE]
    assert len(finite) == decomposition.order == 8
    Q = decomposition.quotient
    assert all(project(decomposition, x) == Q.zero() for x in finite)
