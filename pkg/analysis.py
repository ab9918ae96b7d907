"""
analysis.py
Structural invariants of computed quotients: lower central layers, section
exponents, torsion, Hirsch length and canonical comparison.

Everything here reads gamma_k off the generator weights, which is valid only
for presentations built by the engine's lower-central filtration (the
``graded`` flag).
"""

import logging
from dataclasses import dataclass, field

from sympy import primefactors

from exceptions import NqError, TorsionDecompositionError, UngradedPresentationError
from nq_engine import Target, definition_values, image_quotient, torsion_free_quotient
from pcpres import (INFINITE, commutator, element_order, layer_relation_rows, multiply,
                    power)
from words import GroupInput, Word
from words import commutator as word_commutator
from zlinalg import IntMatrix, abelian_invariants, hnf_rows


@dataclass(frozen=True)
class Layer:
    weight: int
    start: int          # first generator of gamma_weight
    stop: int           # first generator of gamma_(weight+1)
    free_rank: int
    torsion: tuple      # elementary divisors > 1

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    @property
    def exponent(self):
        """Exponent of the layer; 0 when it has a free part."""
        if self.free_rank:
            return INFINITE
        return max(self.torsion, default=1)


@dataclass(frozen=True)
class LcsData:
    n: int
    layers: tuple

    @property
    def nilpotency_class(self):
        return len(self.layers)

    def gamma(self, k):
        """Indices of the pc generators spanning gamma_k."""
        if k < 1:
            raise ValueError(f"gamma_{k} is not defined")
        if k > len(self.layers):
            return range(self.n, self.n)
        return range(self.layers[k - 1].start, self.n)

    def rows(self):
        return [(L.weight, L.free_rank, L.torsion) for L in self.layers]


@dataclass
class TorsionDecomposition:
    primes: list
    layer_divisors: dict            # weight -> elementary divisors of the killed part
    quotient: object                # PcPresentation of G/T
    projection: tuple               # image in G/T of every pc generator of G

    @property
    def order(self):
        result = 1
        for divisors in self.layer_divisors.values():
            for d in divisors:
                result *= d
        return result


@dataclass
class Comparison:
    equal: bool
    witness: str = ""

    def __bool__(self):
        return self.equal


@dataclass
class Certificate:
    holds: bool
    reasons: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


def _require_graded(P):
    if not getattr(P, "graded", False):
        raise UngradedPresentationError(
            "presentation is not lower-central graded; gamma_k cannot be read off weights")


def layer_invariants(P, k):
    """(free rank, torsion divisors) of gamma_k / gamma_(k+1)."""
    idx, rows = layer_relation_rows(P, k)
    torsion, free = abelian_invariants(IntMatrix.from_rows(rows, len(idx)), len(idx))
    return free, tuple(torsion)


def lower_central_data(P):
    _require_graded(P)
    layers = []
    for k in range(1, P.nilpotency_class() + 1):
        free, torsion = layer_invariants(P, k)
        layers.append(Layer(k, P.first_index_of_weight(k), P.first_index_of_weight(k + 1),
                            free, torsion))
    return LcsData(P.n, tuple(layers))


def is_lower_central(P):
    """
    True when every weight-k layer (k >= 2) is spanned, modulo higher weights,
    by the commutators of weight-(k-1) with weight-1 generators; the weights
    then give the lower central series.
    """
    ones = P.indices_of_weight(1)
    for k in range(2, P.nilpotency_class() + 1):
        idx, rows = layer_relation_rows(P, k)
        pos = {g: p for p, g in enumerate(idx)}
        for j in P.indices_of_weight(k - 1):
            for i in ones:
                if i >= j:
                    continue
                row = [0] * len(idx)
                for g, e in P.commutator_word(j, i):
                    if g in pos:
                        row[pos[g]] += e
                rows.append(row)
        basis = hnf_rows(rows, len(idx))
        if len(basis) != len(idx) or any(basis[r][r] != 1 for r in range(len(idx))):
            return False
    return True


def is_in_gamma(P, x, k):
    return all(P.weights[i] >= k for i, e in enumerate(x) if e)


def central_section_exponent(P, k):
    """
    Exponent of gamma_k / gamma_(k+1): the largest elementary divisor when the
    layer is finite, 0 when it has free rank, 1 when it is trivial.
    """
    _require_graded(P)
    c = P.nilpotency_class()
    if not 1 <= k <= c + 1:
        raise ValueError(f"section {k} is outside 1..{c + 1} for a class-{c} presentation")
    if k == c + 1:
        return 1
    free, torsion = layer_invariants(P, k)
    if free:
        return INFINITE
    return max(torsion, default=1)


def hirsch_length(P):
    return sum(1 for m in P.rel_orders if m == INFINITE)


def order(P, x):
    return element_order(P, x)


# torsion

def pc_generator_names(P):
    return tuple(f"g{i + 1}" for i in range(P.n))


def _pc_word(names, word):
    return Word((names[g], e) for g, e in word)


def relators_of(P, names=None):
    """The pc relations of P as relators over its generator names."""
    names = names or pc_generator_names(P)
    relators = []
    for i in range(P.n):
        m = P.rel_orders[i]
        if m:
            relators.append(Word.letter(names[i], m) * _pc_word(names, P.power_word(i)).inverse())
    for j in range(P.n):
        for i in range(j):
            lhs = word_commutator(Word.letter(names[j]), Word.letter(names[i]))
            relators.append(lhs * _pc_word(names, P.commutator_word(j, i)).inverse())
    return tuple(r for r in relators if not r.is_identity)


def torsion_decomposition(P, guard=None):
    """
    G/T for the group G of P. The largest quotient of G with torsion-free
    lower central layers is computed from P's own relations; equal Hirsch
    length certifies that the killed subgroup is finite, hence exactly T.
    """
    _require_graded(P)
    data = lower_central_data(P)
    divisors = {L.weight: list(L.torsion) for L in data.layers if L.torsion}
    if not divisors:
        return TorsionDecomposition([], {}, P, tuple(P.unit(i) for i in range(P.n)))

    names = pc_generator_names(P)
    W = torsion_free_quotient(GroupInput(names, relators=relators_of(P, names)),
                              max_class=P.nilpotency_class(), guard=guard)
    Q = W.presentation
    if hirsch_length(Q) != hirsch_length(P):
        raise TorsionDecompositionError(
            f"torsion-free layered quotient has Hirsch length {hirsch_length(Q)}, "
            f"expected {hirsch_length(P)}; torsion is not confined to a finite subgroup "
            f"of the layers")
    for L in lower_central_data(Q).layers:
        if L.torsion:
            raise TorsionDecompositionError(f"layer {L.weight} of G/T keeps torsion {list(L.torsion)}")
    if not is_lower_central(Q):
        raise TorsionDecompositionError(
            "G/T has torsion in its lower central layers; no quotient with torsion-free "
            "layers has the same Hirsch length")
    primes = sorted({p for ds in divisors.values() for d in ds for p in primefactors(d)})
    logging.info(f"🧮 torsion primes {primes}, G/T has {Q.n} generators and class "
                 f"{Q.nilpotency_class()}")
    return TorsionDecomposition(primes, divisors, Q, tuple(W.images))


def project(decomposition, x):
    """Image of an element of G (exponent vector) in G/T."""
    Q = decomposition.quotient
    result = Q.zero()
    for i, e in enumerate(x):
        if e:
            result = multiply(Q, result, power(Q, decomposition.projection[i], e))
    return result


# canonical forms

def canonical_form(P, images, generator_names):
    """
    The engine's own presentation of the group P, marked by ``images`` (one
    vector per input generator). Isomorphic marked groups give identical
    presentations.
    """
    _require_graded(P)
    result = image_quotient(Target(P, tuple(images)), generator_names)
    return result.presentation


def compare_canonical(P1, P2):
    _require_graded(P1)
    _require_graded(P2)
    if P1.n != P2.n:
        return Comparison(False, f"generator count {P1.n} vs {P2.n}")
    for i in range(P1.n):
        if P1.weights[i] != P2.weights[i]:
            return Comparison(False, f"weight of g{i + 1}: {P1.weights[i]} vs {P2.weights[i]}")
        if P1.rel_orders[i] != P2.rel_orders[i]:
            return Comparison(False, f"relative order of g{i + 1}: "
                                     f"{P1.rel_orders[i]} vs {P2.rel_orders[i]}")
    for i in range(P1.n):
        if P1.power_word(i) != P2.power_word(i):
            return Comparison(False, f"power tail of g{i + 1}")
    for j in range(P1.n):
        for i in range(j):
            if P1.commutator_word(j, i) != P2.commutator_word(j, i):
                return Comparison(False, f"commutator tail of [g{j + 1},g{i + 1}]")
    return Comparison(True)


def _value(Q, values, word):
    result = Q.zero()
    for h, e in word:
        result = multiply(Q, result, power(Q, values[h], e))
    return result


def certify_isomorphism(E, Q):
    """
    E and Q are NqResults on the same input generators. Holds when E's
    relations are satisfied in Q under the generator correspondence (so Q is
    a quotient of E), the Hirsch lengths agree and E is torsion-free: the
    kernel is then finite inside a torsion-free group, hence trivial.
    """
    reasons = []
    if len(E.images) != len(Q.images):
        return Certificate(False, ["different numbers of input generators"])
    P, R = E.presentation, Q.presentation
    try:
        values = definition_values(P, E.images, Target(R, Q.images))
    except NqError as exc:
        return Certificate(False, [f"no generator correspondence: {exc}"])

    for a, img in enumerate(E.images):
        if _value(R, values, [(i, e) for i, e in enumerate(img) if e]) != tuple(Q.images[a]):
            reasons.append(f"input generator {E.generator_names[a]} maps to a different element")
    for i in range(P.n):
        m = P.rel_orders[i]
        if m and power(R, values[i], m) != _value(R, values, P.power_word(i)):
            reasons.append(f"power relation of g{i + 1} fails")
    for j in range(P.n):
        for i in range(j):
            if commutator(R, values[j], values[i]) != _value(R, values, P.commutator_word(j, i)):
                reasons.append(f"commutator relation [g{j + 1},g{i + 1}] fails")
    if hirsch_length(P) != hirsch_length(R):
        reasons.append(f"Hirsch length {hirsch_length(P)} vs {hirsch_length(R)}")
    if any(L.torsion for L in lower_central_data(P).layers):
        reasons.append("source has torsion in its lower central layers")
    return Certificate(not reasons, reasons)
