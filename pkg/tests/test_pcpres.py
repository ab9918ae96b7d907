import numpy as np
import pytest

from exceptions import CollectionLimitError, InconsistencyError
from pcpres import (INFINITE, PcPresentation, commutator, consistency_check, conjugate,
                    element_order, invert, layer_relation_rows, left_normed_comm_elems,
                    multiply, power, word_of)

X = np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]], dtype=object)
Y = np.array([[1, 0, 0], [0, 1, 1], [0, 0, 1]], dtype=object)
I3 = np.identity(3, dtype=object)


def uni_inverse(M):
    N = M - I3
    return I3 - N + N @ N


def uni_power(M, k):
    base = M if k >= 0 else uni_inverse(M)
    out = I3.copy()
    for _ in range(abs(k)):
        out = out @ base
    return out


Z = uni_inverse(Y) @ uni_inverse(X) @ Y @ X      # [g2, g1]
MATRICES = (X, Y, Z)


def matrix_of(vec):
    out = I3.copy()
    for i, e in enumerate(vec):
        out = out @ uni_power(MATRICES[i], e)
    return out


def random_word(rng, length=8, n=3):
    return tuple((int(rng.integers(0, n)), int(rng.integers(-4, 5))) for _ in range(length))


def test_collection_matches_unitriangular_matrices(heisenberg):
    rng = np.random.default_rng(11)
    for _ in range(300):
        word = random_word(rng)
        expected = I3.copy()
        for g, e in word:
            expected = expected @ uni_power(MATRICES[g], e)
        assert (matrix_of(heisenberg.collect(word)) == expected).all()


def test_group_operations(heisenberg):
    P = heisenberg
    rng = np.random.default_rng(5)
    for _ in range(50):
        u = P.collect(random_word(rng))
        v = P.collect(random_word(rng))
        assert multiply(P, u, invert(P, u)) == P.zero()
        assert (matrix_of(multiply(P, u, v)) == matrix_of(u) @ matrix_of(v)).all()
        assert power(P, u, 3) == multiply(P, u, multiply(P, u, u))
        assert power(P, u, -2) == invert(P, power(P, u, 2))
        c = commutator(P, u, v)
        assert (matrix_of(c) == uni_inverse(matrix_of(u)) @ uni_inverse(matrix_of(v))
                @ matrix_of(u) @ matrix_of(v)).all()
        assert conjugate(P, u, v) == P.collect(word_of(invert(P, v)) + word_of(u) + word_of(v))
    assert commutator(P, P.unit(1), P.unit(0)) == P.unit(2)
    assert left_normed_comm_elems(P, [P.unit(1), P.unit(0), P.unit(0)]) == P.zero()


def all_elements(P):
    ranges = [range(m) for m in P.rel_orders]
    out = [()]
    for r in ranges:
        out = [x + (e,) for x in out for e in r]
    return out


def brute_order(P, x):
    k, y = 1, tuple(x)
    while any(y):
        y = multiply(P, y, x)
        k += 1
    return k


@pytest.mark.parametrize("fixture, size", [("quaternion", 8), ("semidihedral16", 16)])
def test_finite_groups_close_and_orders_match(request, fixture, size):
    P = request.getfixturevalue(fixture)
    elements = all_elements(P)
    assert len(elements) == size
    closure = set(elements)
    for x in elements:
        for g in range(P.n):
            assert multiply(P, x, P.unit(g)) in closure
        assert element_order(P, x) == brute_order(P, x)


def test_quaternion_orders(quaternion):
    assert element_order(quaternion, quaternion.unit(0)) == 4
    assert element_order(quaternion, quaternion.unit(2)) == 2
    assert element_order(quaternion, quaternion.zero()) == 1


def test_direct_product_orders():
    # C6 x C10 as a class-1 presentation with generators of orders 2, 3, 2, 5
    P = PcPresentation([1, 1, 1, 1], [2, 3, 2, 5])
    assert element_order(P, (1, 1, 0, 0)) == 6
    assert element_order(P, (1, 1, 1, 1)) == 30
    for x in all_elements(P)[:60]:
        assert element_order(P, x) == brute_order(P, x)


def test_infinite_order(heisenberg):
    assert element_order(heisenberg, heisenberg.unit(2)) == INFINITE
    assert element_order(heisenberg, (0, 0, 0)) == 1


def test_consistency(heisenberg, quaternion, semidihedral16):
    for P in (heisenberg, quaternion, semidihedral16):
        assert consistency_check(P) == []
        assert P.freeze().frozen


def test_inconsistent_presentation_is_rejected():
    # g1^2 = 1 forces [g2, g1]^2 = 1, but g3 has infinite order
    P = PcPresentation([1, 1, 2], [2, 0, 0], {}, {(1, 0): ((2, 1),)})
    violations = consistency_check(P)
    assert violations
    with pytest.raises(InconsistencyError) as info:
        P.freeze()
    assert info.value.violations
    assert not P.frozen


def test_validation_errors():
    with pytest.raises(ValueError):
        PcPresentation([2, 1], [0, 0])
    with pytest.raises(ValueError):
        PcPresentation([1, 1], [1, 0])
    with pytest.raises(ValueError):
        PcPresentation([1, 2], [2, 0], {0: ((0, 1),)})
    with pytest.raises(ValueError):
        PcPresentation([1, 1, 2], [0, 0, 0], {}, {(1, 0): ((1, 1),)})
    with pytest.raises(IndexError):
        PcPresentation([1], [0]).collect(((3, 1),))


def test_graded_presentations_keep_tails_above_the_layer():
    # g1^2 = g2 inside layer 1
    with pytest.raises(ValueError):
        PcPresentation([1, 1], [2, 0], {0: ((1, 1),)})
    assert PcPresentation([1, 1], [2, 0], {0: ((1, 1),)}, graded=False).n == 2
    # [g2,g1] = g3 with g3 of weight 1
    with pytest.raises(ValueError):
        PcPresentation([1, 1, 1], [0, 0, 0], {}, {(1, 0): ((2, 1),)})
    assert PcPresentation([1, 1, 2], [2, 0, 0], {0: ((2, 1),)}, {(1, 0): ((2, 1),)}).n == 3


@pytest.mark.parametrize("fixture", ["heisenberg", "quaternion", "semidihedral16"])
def test_commutator_inverse_swaps_arguments(request, fixture):
    P = request.getfixturevalue(fixture)
    rng = np.random.default_rng(8)
    for _ in range(40):
        u = P.collect(random_word(rng, n=P.n))
        v = P.collect(random_word(rng, n=P.n))
        assert invert(P, commutator(P, u, v)) == commutator(P, v, u)


def test_collection_limit(monkeypatch, heisenberg):
    import pcpres
    monkeypatch.setattr(pcpres, "COLLECTION_STEP_LIMIT", 5)
    with pytest.raises(CollectionLimitError):
        heisenberg.collect(((1, 5), (0, 5)) * 3)


def test_layer_relation_rows(semidihedral16):
    idx, rows = layer_relation_rows(semidihedral16, 1)
    assert idx == [0, 1]
    assert rows == [[2, 0], [0, 2]]
    idx, rows = layer_relation_rows(semidihedral16, 2)
    assert idx == [2] and rows == [[2]]
