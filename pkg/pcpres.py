"""
pcpres.py
Weighted nilpotent polycyclic presentations and collection from the left.

Generators are 0-based internally (documents print them 1-based). An exponent
vector is a tuple of ints, one entry per generator; a pc word is a sequence of
(generator, exponent) syllables.

Relations:
    g_i^m_i       = powers[i]          (finite relative order m_i, support > i)
    [g_j, g_i]    = commutators[j, i]  (j > i, support > j)
so g_j g_i = g_i g_j [g_j, g_i].
"""

import logging
from dataclasses import dataclass
from math import gcd
from typing import NamedTuple

from config import COLLECTION_STEP_LIMIT
from exceptions import CollectionLimitError, InconsistencyError

INFINITE = 0        # relative order / element order "infinite"


@dataclass(frozen=True)
class Definition:
    """
    Provenance of a pc generator:
      image       -> source = (input generator index,)
      commutator  -> source = (j, i): the generator is the tail of [g_j, g_i]
      power       -> source = (i,):   the tail of g_i^m_i
      combination -> terms = ((relation, coefficient), ...): the product of
                     relation tails, where the tail of a relation is its left
                     side divided by the part of its right side below the
                     generator's weight
    """
    kind: str
    source: tuple = ()
    terms: tuple = ()

    def __str__(self):
        if self.kind == "image":
            return f"image({self.source[0] + 1})"
        if self.kind == "commutator":
            j, i = self.source
            return f"[g{j + 1},g{i + 1}]"
        if self.kind == "combination":
            return " ".join(f"({d})^{c}" for d, c in self.terms)
        return f"g{self.source[0] + 1}^p"


def word_of(vec):
    """Exponent vector -> pc word in normal order."""
    return tuple((i, e) for i, e in enumerate(vec) if e)


def inverse_word(word):
    return tuple((g, -e) for g, e in reversed(word))


def unit(n, i, e=1):
    vec = [0] * n
    vec[i] = e
    return tuple(vec)


class Violation(NamedTuple):
    test: str
    lhs: tuple
    rhs: tuple


class PcPresentation:
    """
    A weighted nilpotent pc presentation. Relation right-hand sides are stored
    as normal-form pc words; trivial commutator relations are omitted.
    """

    def __init__(self, weights, rel_orders, powers=None, commutators=None,
                 definitions=None, graded=True):
        self.n = len(weights)
        self.weights = tuple(int(w) for w in weights)
        self.rel_orders = tuple(int(m) for m in rel_orders)
        self.powers = {int(i): tuple(w) for i, w in (powers or {}).items() if self.rel_orders[i]}
        self.commutators = {(int(j), int(i)): tuple(w) for (j, i), w in (commutators or {}).items() if w}
        self.definitions = tuple(definitions) if definitions is not None else (None,) * self.n
        self.graded = graded
        self.frozen = False
        self._inverse_conj = {}
        self._validate()

    def _validate(self):
        n = self.n
        if len(self.rel_orders) != n or len(self.definitions) != n:
            raise ValueError("weights, rel_orders and definitions differ in length")
        for i, (w, m) in enumerate(zip(self.weights, self.rel_orders)):
            if w < 1:
                raise ValueError(f"generator {i + 1} has weight {w}")
            if m < 0 or m == 1:
                raise ValueError(f"generator {i + 1} has relative order {m}")
            if i and w < self.weights[i - 1]:
                raise ValueError("weights must be non-decreasing")
        for i, word in self.powers.items():
            if any(g <= i or g >= n for g, _ in word):
                raise ValueError(f"power relation of g{i + 1} leaves the tail range")
        for (j, i), word in self.commutators.items():
            if not 0 <= i < j < n or any(g <= j or g >= n for g, _ in word):
                raise ValueError(f"commutator relation [g{j + 1},g{i + 1}] leaves the tail range")
        if self.graded:
            self._validate_grading()

    def _validate_grading(self):
        w = self.weights
        for i, word in self.powers.items():
            if any(w[g] <= w[i] for g, _ in word):
                raise ValueError(f"power relation of g{i + 1} has a tail of weight <= {w[i]}")
        for (j, i), word in self.commutators.items():
            if any(w[g] < w[i] + w[j] for g, _ in word):
                raise ValueError(f"commutator relation [g{j + 1},g{i + 1}] has a tail "
                                 f"of weight < {w[i] + w[j]}")

    # relations

    def power_word(self, i):
        return self.powers.get(i, ())

    def commutator_word(self, j, i):
        return self.commutators.get((j, i), ())

    def zero(self):
        return (0,) * self.n

    def unit(self, i, e=1):
        return unit(self.n, i, e)

    def nilpotency_class(self):
        return max(self.weights, default=0)

    def indices_of_weight(self, k):
        return [i for i, w in enumerate(self.weights) if w == k]

    def first_index_of_weight(self, k):
        """Index of the first generator with weight >= k (n if none)."""
        for i, w in enumerate(self.weights):
            if w >= k:
                return i
        return self.n

    # collection

    def _conjugate_word(self, j, g, sign):
        """Normal word of g_j^(g_g^sign) for j > g; sign = -1 only for infinite g."""
        if sign > 0:
            return ((j, 1),) + self.commutator_word(j, g)
        cached = self._inverse_conj.get((j, g))
        if cached is None:
            c = self.commutator_word(j, g)
            if not c:
                cached = ((j, 1),)
            else:
                z = self.collect(((g, 1),) + inverse_word(c) + ((g, -1),))
                cached = ((j, 1),) + word_of(z)
            self._inverse_conj[(j, g)] = cached
        return cached

    def collect(self, word, start=None):
        """
        Collection from the left: returns the normalized exponent vector of
        start * word (start defaults to the identity).
        """
        n = self.n
        rel = self.rel_orders
        e = list(start) if start is not None else [0] * n
        stack = []
        for g, k in reversed(tuple(word)):
            if not 0 <= g < n:
                raise IndexError(f"generator index {g + 1} out of range 1..{n}")
            if k:
                stack.append((g, k))
        steps = 0
        while stack:
            steps += 1
            if steps > COLLECTION_STEP_LIMIT:
                raise CollectionLimitError(f"collection exceeded {COLLECTION_STEP_LIMIT} steps")
            g, k = stack.pop()
            if not any(e[g + 1:]):
                self._absorb(e, stack, g, k)
                continue
            if k > 0:
                if k > 1:
                    stack.append((g, k - 1))
                self._step(e, stack, g, 1)
            elif rel[g]:
                # g^-1 = g^(m-1) * t^-1 where g^m = t
                if k < -1:
                    stack.append((g, k + 1))
                for h, a in self.power_word(g):
                    stack.append((h, -a))
                stack.append((g, rel[g] - 1))
            else:
                if k < -1:
                    stack.append((g, k + 1))
                self._step(e, stack, g, -1)
        return tuple(e)

    def _absorb(self, e, stack, g, k):
        # nothing to the right of g: add the run directly
        e[g] += k
        m = self.rel_orders[g]
        if m and not 0 <= e[g] < m:
            q, e[g] = divmod(e[g], m)
            tail = self.power_word(g)
            if tail:
                if q > 0:
                    for _ in range(q):
                        stack.extend(reversed(tail))
                else:
                    for _ in range(-q):
                        for h, a in tail:
                            stack.append((h, -a))

    def _step(self, e, stack, g, sign):
        n = self.n
        suffix = [(j, e[j]) for j in range(g + 1, n) if e[j]]
        for j, _ in suffix:
            e[j] = 0
        for j, ej in reversed(suffix):
            cw = self._conjugate_word(j, g, sign)
            if len(cw) == 1:
                stack.append((j, ej))
                continue
            piece = cw if ej > 0 else inverse_word(cw)
            for _ in range(abs(ej)):
                stack.extend(reversed(piece))
        e[g] += sign
        m = self.rel_orders[g]
        if m and e[g] == m:
            e[g] = 0
            stack.extend(reversed(self.power_word(g)))

    def freeze(self, max_weight=None):
        violations = consistency_check(self, max_weight=max_weight)
        if violations:
            raise InconsistencyError(
                f"presentation on {self.n} generators is inconsistent "
                f"({len(violations)} failing test words)", violations)
        self.frozen = True
        return self

    def __repr__(self):
        return (f"PcPresentation(n={self.n}, class={self.nilpotency_class()}, "
                f"rel_orders={list(self.rel_orders)})")


# group operations on exponent vectors

def collect(P, word):
    return P.collect(word)


def multiply(P, u, v):
    return P.collect(word_of(v), start=u)


def invert(P, u):
    return P.collect(inverse_word(word_of(u)))


def power(P, u, k):
    if k < 0:
        u, k = invert(P, u), -k
    result = P.zero()
    base = tuple(u)
    while k:
        if k & 1:
            result = multiply(P, result, base)
        k >>= 1
        if k:
            base = multiply(P, base, base)
    return result


def conjugate(P, u, v):
    """u^v = v^-1 u v"""
    wv = word_of(v)
    return P.collect(inverse_word(wv) + word_of(u) + wv)


def commutator(P, u, v):
    """[u, v] = u^-1 v^-1 u v"""
    wu, wv = word_of(u), word_of(v)
    return P.collect(inverse_word(wu) + inverse_word(wv) + wu + wv)


def left_normed_comm_elems(P, xs):
    xs = list(xs)
    if not xs:
        raise ValueError("left_normed_comm_elems needs at least one element")
    result = tuple(xs[0])
    for x in xs[1:]:
        result = commutator(P, result, x)
    return result


def leading_index(x):
    for i, e in enumerate(x):
        if e:
            return i
    return None


def element_order(P, x):
    """Order of x; INFINITE (0) when some leading exponent sits on an infinite generator."""
    order = 1
    x = tuple(x)
    while True:
        i = leading_index(x)
        if i is None:
            return order
        m = P.rel_orders[i]
        if not m:
            return INFINITE
        o = m // gcd(x[i], m)
        order *= o
        x = power(P, x, o)


def consistency_pairs(P, max_weight=None):
    """
    Yields (label, lhs, rhs) for the standard test words. With max_weight,
    associativity tests whose weights sum above it are skipped.
    """
    n, w, rel = P.n, P.weights, P.rel_orders

    def fits(total):
        return max_weight is None or total <= max_weight

    for i in range(n):
        for j in range(i + 1, n):
            if not fits(w[i] + w[j] + w[j]):
                break
            ji = P.collect(((j, 1), (i, 1)))
            for k in range(j + 1, n):
                if not fits(w[i] + w[j] + w[k]):
                    break
                lhs = P.collect(((k, 1),) + word_of(ji))
                rhs = P.collect(((i, 1),), start=P.collect(((k, 1), (j, 1))))
                yield f"g{k + 1}(g{j + 1}g{i + 1})", lhs, rhs

    for j in range(n):
        m = rel[j]
        if not m:
            continue
        jm = P.collect(((j, m),))
        for i in range(j):
            lhs = P.collect(((i, 1),), start=jm)
            rhs = P.collect(((j, m - 1),) + word_of(P.collect(((j, 1), (i, 1)))))
            yield f"(g{j + 1}^{m})g{i + 1}", lhs, rhs
        lhs = P.collect(((j, 1),) + word_of(jm))
        rhs = P.collect(((j, 1),), start=jm)
        yield f"g{j + 1}(g{j + 1}^{m})", lhs, rhs
        for k in range(j + 1, n):
            lhs = P.collect(((k, 1),) + word_of(jm))
            rhs = P.collect(((j, m - 1),), start=P.collect(((k, 1), (j, 1))))
            yield f"g{k + 1}(g{j + 1}^{m})", lhs, rhs

    for i in range(n):
        for j in range(i + 1, n):
            if not fits(w[i] + w[j]):
                break
            if not rel[i]:
                lhs = P.collect(((i, 1),), start=P.collect(((j, 1), (i, -1))))
                yield f"(g{j + 1}g{i + 1}^-1)g{i + 1}", lhs, P.unit(j)
            if not rel[j]:
                lhs = P.collect(((j, -1),) + word_of(P.collect(((j, 1), (i, 1)))))
                yield f"g{j + 1}^-1(g{j + 1}g{i + 1})", lhs, P.unit(i)


def consistency_check(P, max_weight=None):
    """All failing test words; an empty list means the presentation is consistent."""
    violations = [Violation(label, lhs, rhs)
                  for label, lhs, rhs in consistency_pairs(P, max_weight)
                  if lhs != rhs]
    if violations:
        logging.warning(f"⚠️ {len(violations)} consistency violations, first: {violations[0].test}")
    return violations


def layer_relation_rows(P, k):
    """
    Generators of weight k and the relation rows of the abelian layer they
    span modulo higher weights (power relations restricted to weight k).
    """
    idx = P.indices_of_weight(k)
    pos = {g: p for p, g in enumerate(idx)}
    rows = []
    for g in idx:
        m = P.rel_orders[g]
        if m:
            row = [0] * len(idx)
            row[pos[g]] = m
            for h, a in P.power_word(g):
                if h in pos:
                    row[pos[h]] -= a
            rows.append(row)
    return idx, rows
