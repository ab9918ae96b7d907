"""
nq_engine.py
The nilpotent quotient algorithm with identical relations.

The class-c quotient is extended by one lower-central layer at a time:
    (i)   append a central tail to every non-defining relation
    (ii)  collect the consistency test words -> relation rows over the tails
    (iii) evaluate relators, definitions and law instances -> more rows
    (iv)  Hermite-reduce the rows, eliminate tails with pivot 1 and bring the
          rest to a basis of the new layer (LayerBasis)
    (v)   rebuild and consistency-check the class-(c+1) presentation
The process stops when a new layer is trivial (stabilized) or at max_class.
With laws, every new class is checked on random elements before the next one
is built.

Instead of relators and laws, the rows can also come from a target nilpotent
group (the kernel of the tail map into the target's layer); this rebuilds the
engine's own presentation of any graded quotient, see image_quotient().
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from config import (AUTO_ESCALATE, DEFAULT_SEED, HNF_BATCH_ROWS, INSTANCE_STRATEGIES,
                    INSTANCE_STRATEGY, SAMPLE_EXPONENT_RANGE, VERIFY_SAMPLES)
from exceptions import InconsistencyError, NqError, VerificationError
from pcpres import (Definition, PcPresentation, commutator, consistency_pairs, invert,
                    layer_relation_rows, multiply, power, word_of)
from words import GroupInput
from zlinalg import HermiteLattice, IntMatrix, hnf, kernel_lattice, saturation, snf

STABILIZED = "stabilized"
REACHED_MAX_CLASS = "reached_max_class"


@dataclass
class NqResult:
    presentation: PcPresentation
    images: tuple                   # one exponent vector per input generator
    generator_names: tuple
    class_achieved: int
    termination: str = REACHED_MAX_CLASS
    strategy: str = INSTANCE_STRATEGY
    stats: list = field(default_factory=list)
    verification: Optional["Verdict"] = None
    values: Optional[tuple] = None  # target runs: the pc generators as target elements

    @property
    def epimorphism(self):
        return dict(zip(self.generator_names, self.images))


@dataclass
class Counterexample:
    kind: str                       # "relator" | "law"
    word: str
    assignment: dict
    value: tuple

    def __str__(self):
        where = ", ".join(f"{v} -> {list(x)}" for v, x in sorted(self.assignment.items()))
        return f"{self.kind} {self.word} is {list(self.value)} at {where or 'generators'}"


@dataclass
class Verdict:
    passed: bool
    samples: int
    seed: int
    counterexample: Optional[Counterexample] = None


@dataclass
class Target:
    """A graded nilpotent group and the images of the input generators in it."""
    presentation: PcPresentation
    images: tuple


# evaluation of words and laws

def evaluate_word(P, word, values):
    """Value of a free-group Word in P; ``values`` maps symbol names to vectors."""
    result = P.zero()
    for name, exp in word.letters:
        result = multiply(P, result, power(P, values[name], exp))
    return result


def evaluate_shape(P, shape, values):
    kind = shape[0]
    if kind == "sym":
        return tuple(values[shape[1]])
    if kind == "one":
        return P.zero()
    if kind == "pow":
        return power(P, evaluate_shape(P, shape[1], values), shape[2])
    if kind == "prod":
        result = P.zero()
        for child in shape[1]:
            result = multiply(P, result, evaluate_shape(P, child, values))
        return result
    if kind == "comm":
        parts = [evaluate_shape(P, child, values) for child in shape[1]]
        result = parts[0]
        for x in parts[1:]:
            result = commutator(P, result, x)
        return result
    raise ValueError(f"unknown shape node {kind!r}")


def evaluate_law(P, law, generator_values, assignment):
    values = dict(generator_values)
    values.update(assignment)
    if law.shape is not None:
        return evaluate_shape(P, law.shape, values)
    return evaluate_word(P, law.body, values)


def _pad(vec, n):
    return tuple(vec) + (0,) * (n - len(vec))


def _unit_row(n, k):
    return [int(i == k) for i in range(n)]


# law instances

def _element_weight(P, vec):
    return min((P.weights[i] for i, e in enumerate(vec) if e), default=float("inf"))


def weighted_words(weights, budget):
    """
    (pc word, weighted degree) for every g_i1^e1 ... g_ik^ek with i1 < ... < ik,
    positive exponents and sum(e * weight) <= budget, the empty word first.
    ``weights`` must be non-decreasing.
    """
    out = []

    def extend(start, left, prefix):
        out.append((prefix, budget - left))
        for i in range(start, len(weights)):
            w = weights[i]
            if w > left:
                break
            for e in range(1, left // w + 1):
                extend(i + 1, left - e * w, prefix + ((i, e),))

    extend(0, budget, ())
    return out


def _candidates(P, strategy, c):
    """Distinct (element, weighted degree) pairs, each with its smallest degree."""
    if strategy not in INSTANCE_STRATEGIES:
        raise ValueError(f"unknown instance strategy {strategy!r}")
    w = P.weights
    if strategy == "polynomial":
        raw = [(P.collect(word), degree) for word, degree in weighted_words(w, c + 1)]
    else:
        raw = [(P.unit(i), w[i]) for i in range(P.n)]
        if strategy == "generators_plus_pairs":
            raw += [(P.collect(((i, 1), (j, 1))), w[i] + w[j])
                    for i in range(P.n) for j in range(i + 1, P.n)]
    degree = {}
    for x, d in raw:
        if x not in degree or d < degree[x]:
            degree[x] = d
    return list(degree.items())


def instance_set(Q, law, strategy=INSTANCE_STRATEGY):
    """
    Variable assignments (variable -> exponent vector of Q's presentation) used
    to enforce ``law`` while extending Q to class c+1. Assignments whose
    minimum instance weight exceeds c+1 are skipped.

    "polynomial" assigns the elements g_1^e_1 ... g_n^e_n (e_i >= 0) whose
    weighted degrees sum to at most c+1 over all variables. The new-layer part
    of a law value is a polynomial of that degree in the exponents, so these
    points span all of its values and the law holds exactly in the result.
    "generators" and "generators_plus_pairs" are cheaper subsets.
    """
    P = Q.presentation
    c = Q.class_achieved
    variables = sorted(law.variables)
    cands = sorted(((x, d, _element_weight(P, x)) for x, d in _candidates(P, strategy, c)),
                   key=lambda item: item[1])
    out = []

    def extend(k, left, chosen):
        if k == len(variables):
            weights = {v: wt for v, (_, wt) in zip(variables, chosen)}
            if law.min_weight(weights) <= c + 1:
                out.append({v: x for v, (x, _) in zip(variables, chosen)})
            return
        for x, d, wt in cands:
            if left is not None and d > left:
                break
            extend(k + 1, None if left is None else left - d, chosen + ((x, wt),))

    extend(0, c + 1 if strategy == "polynomial" else None, ())
    return out


# basis of a new layer

class LayerBasis:
    """
    Generators of a new layer Z^T / lattice, T being the tails.

    Tails with pivot 1 are eliminated and the others become generators,
    except where a relation row ties several of them together: that block is
    brought to Smith normal form, so no generator has a power relation inside
    its own layer. ``terms[k]`` writes generator k as a product of tail powers
    (exactly, before reduction); ``definitions[k]`` is a single relation where
    possible and a combination of relation tails otherwise.
    """

    def __init__(self, lattice, relations, offset):
        self.lattice = lattice
        self.offset = offset
        H = lattice.matrix()
        rows = _pivots(H)
        pivots = {col: H[i, col] for i, col in rows}
        self.survivors = [t for t in range(lattice.ncols) if pivots.get(t, 0) != 1]
        at = {t: j for j, t in enumerate(self.survivors)}
        relation_rows = [{at[t]: H[i, t] for t in self.survivors if H[i, t]}
                         for i, col in rows if H[i, col] != 1]
        tangled = set()
        for row in relation_rows:
            if len(row) > 1:
                tangled.update(row)
        diagonal = {j: d for row in relation_rows if len(row) == 1 for j, d in row.items()}

        self.orders, self.definitions, self.terms = [], [], []
        self._direct = {}
        for j, t in enumerate(self.survivors):
            if j in tangled:
                continue
            self._direct[j] = len(self.orders)
            self.orders.append(diagonal.get(j, 0))
            self.definitions.append(Definition(*relations[t]))
            self.terms.append(((t, 1),))
        self.block = sorted(tangled)
        self._first = len(self.orders)
        self._kept = []
        if self.block:
            self._smith_block([row for row in relation_rows if tangled.intersection(row)],
                              relations)

    def _smith_block(self, block_rows, relations):
        block = self.block
        size = len(block)
        S, _, V = snf(IntMatrix.from_rows([[row.get(j, 0) for j in block] for row in block_rows],
                                          size))
        _, V_inv = hnf(V)
        self._V = V
        divisors = [S[b, b] if b < S.rows else 0 for b in range(size)]
        self._kept = [(b, d) for b, d in enumerate(divisors) if d != 1]
        self.orders.extend(d for _, d in self._kept)
        tails = [self.survivors[j] for j in block]
        for p, (b, _) in enumerate(self._kept):
            coefficients = [V_inv[b, j] for j in range(size)]
            terms = tuple((tails[j], x) for j, x in enumerate(coefficients) if x)
            self.terms.append(terms)
            # where the reduced relation words of these tails land
            reached = [0] * len(self._kept)
            for j, x in enumerate(coefficients):
                if x:
                    for q, e in enumerate(self._block_exponents(_unit_row(size, j))):
                        reached[q] += x * e
            parts = [(Definition(*relations[t]), x) for t, x in terms]
            for q, (_, d) in enumerate(self._kept):
                gap = int(q == p) - reached[q]
                if gap:
                    parts.append((Definition("power", (self.offset + self._first + q,)),
                                  gap // d))
            if len(parts) == 1 and parts[0][1] == 1:
                self.definitions.append(parts[0][0])
            else:
                self.definitions.append(Definition("combination", terms=tuple(parts)))

    def _block_exponents(self, x):
        V, size = self._V, len(self.block)
        out = []
        for b, d in self._kept:
            y = sum(x[j] * V[j, b] for j in range(size) if x[j])
            out.append(y % d if d else y)
        return out

    def exponents(self, vec):
        """Exponents over the new generators of a vector over the tails."""
        red = self.lattice.reduce(vec)
        out = [0] * len(self.orders)
        for j, k in self._direct.items():
            out[k] = red[self.survivors[j]]
        if self.block:
            x = [red[self.survivors[j]] for j in self.block]
            for q, e in enumerate(self._block_exponents(x)):
                out[self._first + q] = e
        return out

    def word(self, vec):
        return tuple((self.offset + k, e) for k, e in enumerate(self.exponents(vec)) if e)

    def target_values(self, T, tail_values):
        """The new generators as target elements, given every tail as one."""
        out = []
        for terms in self.terms:
            value = T.zero()
            for t, x in terms:
                value = multiply(T, value, power(T, tail_values[t], x))
            out.append(value)
        return out


# class 1

def _abelian_rows(group_input, target):
    gens = list(group_input.generators)
    r = len(gens)
    pos = {g: k for k, g in enumerate(gens)}
    rows = []
    if target is not None:
        T = target.presentation
        idx, layer = layer_relation_rows(T, 1)
        images = [[img[i] for i in idx] for img in target.images]
        rows.extend(kernel_lattice(images, layer, len(idx)))
        return rows
    for rel in group_input.relators:
        row = [0] * r
        for name, exp in rel.letters:
            row[pos[name]] += exp
        rows.append(row)
    for law in group_input.laws:
        constant = [0] * r
        degree = {v: 0 for v in law.variables}
        for name, exp in law.body.letters:
            if name in degree:
                degree[name] += exp
            else:
                constant[pos[name]] += exp
        rows.append(constant)
        for v in sorted(degree):
            if degree[v]:
                for k in range(r):
                    row = [0] * r
                    row[k] = degree[v]
                    rows.append(row)
    return rows


def abelian_quotient(group_input, target=None, torsion_free=False):
    """Class-1 quotient: the abelianization with class-1 law consequences."""
    started = time.monotonic()
    r = len(group_input.generators)
    lattice = HermiteLattice(r, HNF_BATCH_ROWS)
    for row in _abelian_rows(group_input, target):
        lattice.add(row)
    if torsion_free:
        lattice = _saturated(lattice)
    basis = LayerBasis(lattice, [("image", (a,)) for a in range(r)], 0)
    n = len(basis.orders)
    P = PcPresentation([1] * n, basis.orders, {}, {}, basis.definitions)
    P.freeze(max_weight=1)
    images = tuple(tuple(basis.exponents(_unit_row(r, a))) for a in range(r))
    values = None
    if target is not None:
        values = tuple(basis.target_values(target.presentation, target.images))
    torsion = [d for d in basis.orders if d]
    stats = [{"Class": 1, "Tails": r, "Rows": lattice.rows_seen,
              "New Generators": n, "Torsion": torsion,
              "Seconds": round(time.monotonic() - started, 3)}]
    logging.info(f"📊 class 1: {n} generators, torsion {torsion or '-'}")
    return NqResult(P, images, tuple(group_input.generators), 1 if n else 0,
                    REACHED_MAX_CLASS if n else STABILIZED, stats=stats, values=values)


def _saturated(lattice):
    sat = HermiteLattice(lattice.ncols, lattice.batch_rows)
    for row in saturation(lattice.matrix().to_rows(), lattice.ncols):
        sat.add(row)
    sat.rows_seen = lattice.rows_seen
    return sat


def _pivots(H):
    out = []
    for i in range(H.rows):
        row = H.row(i)
        for c, x in enumerate(row):
            if x:
                out.append((i, c))
                break
    return out


# one extension step

def _tail_relations(P, images, c):
    """The relations that receive a tail, in column order."""
    defined = {d for d in P.definitions if d is not None}
    tails = []
    for a in range(len(images)):
        if Definition("image", (a,)) not in defined:
            tails.append(("image", (a,)))
    for i in range(P.n):
        if P.rel_orders[i] and Definition("power", (i,)) not in defined:
            tails.append(("power", (i,)))
    comm = []
    w = P.weights
    for i in range(P.n):
        for j in range(i + 1, P.n):
            if w[i] + w[j] > c + 1:
                break
            if Definition("commutator", (j, i)) not in defined:
                comm.append((j, i))
    # commutators [g_j, g_i] with g_i of weight 1 and g_j of weight c go last,
    # so they are the tails that survive elimination
    comm.sort(key=lambda ji: (w[ji[1]] == 1 and w[ji[0]] == c, w[ji[1]] == 1, ji[1], ji[0]))
    tails.extend(("commutator", ji) for ji in comm)
    return tails


def _draft(P, images, tails, c):
    n, T = P.n, len(tails)
    powers = {i: P.power_word(i) for i in range(n) if P.rel_orders[i]}
    commutators = dict(P.commutators)
    extended = [_pad(img, n + T) for img in images]
    for t, (kind, src) in enumerate(tails):
        syl = ((n + t, 1),)
        if kind == "image":
            vec = list(extended[src[0]])
            vec[n + t] = 1
            extended[src[0]] = tuple(vec)
        elif kind == "power":
            powers[src[0]] = powers[src[0]] + syl
        else:
            commutators[src] = commutators.get(src, ()) + syl
    draft = PcPresentation(list(P.weights) + [c + 1] * T, list(P.rel_orders) + [0] * T,
                           powers, commutators,
                           list(P.definitions) + [Definition(k, s) for k, s in tails])
    return draft, extended


def _combination_value(P, images, draft, ext_images, d, weight):
    """The product of relation tails that defines a combination generator, in the draft."""
    value = draft.zero()
    for relation, coefficient in d.terms:
        if relation.kind == "image":
            a = relation.source[0]
            lhs, rhs = ext_images[a], word_of(images[a])
        elif relation.kind == "power":
            i = relation.source[0]
            lhs, rhs = draft.collect(((i, P.rel_orders[i]),)), P.power_word(i)
        else:
            j, i = relation.source
            lhs, rhs = commutator(draft, draft.unit(j), draft.unit(i)), P.commutator_word(j, i)
        below = tuple((g, e) for g, e in rhs if P.weights[g] < weight)
        tail = multiply(draft, invert(draft, draft.collect(below)), lhs)
        value = multiply(draft, value, power(draft, tail, coefficient))
    return value


def definition_values(P, images, target):
    """
    Images in the target of P's pc generators, following their definitions.
    A combination that uses a power relation of its own layer does not
    determine its generator from lower weights and is refused.
    """
    T = target.presentation
    values = []

    def value_of(word):
        result = T.zero()
        for h, e in word:
            result = multiply(T, result, power(T, values[h], e))
        return result

    for k, d in enumerate(P.definitions):
        if d is None:
            raise NqError(f"generator g{k + 1} has no definition")
        if d.kind == "combination":
            value = T.zero()
            for relation, coefficient in d.terms:
                if relation.kind == "power" and P.weights[relation.source[0]] == P.weights[k]:
                    raise NqError(f"generator g{k + 1} is defined through its own layer")
                lhs, rhs = _relation_sides(P, images, target, values, relation)
                below = [(g, e) for g, e in rhs if P.weights[g] < P.weights[k]]
                tail = multiply(T, power(T, value_of(below), -1), lhs)
                value = multiply(T, value, power(T, tail, coefficient))
            values.append(value)
            continue
        lhs, rhs = _relation_sides(P, images, target, values, d)
        if not rhs or rhs[-1] != (k, 1):
            raise NqError(f"generator g{k + 1} is not the tail of its defining relation")
        values.append(multiply(T, power(T, value_of(rhs[:-1]), -1), lhs))
    return values


def _relation_sides(P, images, target, values, d):
    """(value of the left side in the target, right-side pc word in P)."""
    T = target.presentation
    if d.kind == "image":
        return tuple(target.images[d.source[0]]), word_of(images[d.source[0]])
    if d.kind == "power":
        i = d.source[0]
        return power(T, values[i], P.rel_orders[i]), P.power_word(i)
    j, i = d.source
    return commutator(T, values[j], values[i]), P.commutator_word(j, i)


def _tail_values(P, images, tails, target, values, c):
    """Every tail as a target element, from the target images of P's generators."""
    T = target.presentation
    below = T.first_index_of_weight(c + 1)
    out = []
    for kind, src in tails:
        lhs, rhs = _relation_sides(P, images, target, values, Definition(kind, src))
        w_value = T.zero()
        for h, e in rhs:
            w_value = multiply(T, w_value, power(T, values[h], e))
        tail = multiply(T, power(T, w_value, -1), lhs)
        if any(tail[:below]):
            raise NqError("target is not a quotient of the current class; its weights are not lower-central")
        out.append(tail)
    return out


def _target_rows(tail_values, target, c):
    idx, layer = layer_relation_rows(target.presentation, c + 1)
    return kernel_lattice([[tail[i] for i in idx] for tail in tail_values], layer, len(idx))


def extend_one_class(Q, group_input, strategy=INSTANCE_STRATEGY, target=None,
                     torsion_free=False):
    """
    Extend the class-c quotient Q by one layer. Returns the class-(c+1)
    NqResult, or None when the new layer is trivial. With torsion_free the
    torsion of the new layer is factored out as well.

    Law variables range over zero-tail lifts of Q's elements. Changing a lift
    by a central tail leaves a commutator law's value unchanged, so for
    commutator laws this enforces the law on the whole extension.
    """
    started = time.monotonic()
    P, images, c = Q.presentation, Q.images, Q.class_achieved
    n = P.n
    tails = _tail_relations(P, images, c)
    T = len(tails)
    if T == 0:
        return None
    draft, ext_images = _draft(P, images, tails, c)
    lattice = HermiteLattice(T, HNF_BATCH_ROWS)

    for label, lhs, rhs in consistency_pairs(draft, max_weight=c + 1):
        diff = [x - y for x, y in zip(lhs, rhs)]
        if any(diff[:n]):
            raise InconsistencyError(f"class-{c} presentation fails test word {label}",
                                     [(label, lhs, rhs)])
        lattice.add(diff[n:])

    tail_values = None
    if target is not None:
        tail_values = _tail_values(P, images, tails, target, Q.values, c)
        for row in _target_rows(tail_values, target, c):
            lattice.add(row)
    else:
        for k, d in enumerate(P.definitions):
            if d is None or d.kind != "combination":
                continue
            value = _combination_value(P, images, draft, ext_images, d, P.weights[k])
            diff = multiply(draft, invert(draft, draft.unit(k)), value)
            if any(diff[:n]):
                raise InconsistencyError(f"g{k + 1} differs from its definition {d}")
            lattice.add(list(diff[n:]))
        gen_values = dict(zip(group_input.generators, ext_images))
        for rel in group_input.relators:
            value = evaluate_word(draft, rel, gen_values)
            if any(value[:n]):
                raise InconsistencyError(f"relator {rel} does not hold in the class-{c} quotient")
            lattice.add(list(value[n:]))
        for law in group_input.laws:
            for assignment in instance_set(Q, law, strategy):
                padded = {v: _pad(x, n + T) for v, x in assignment.items()}
                value = evaluate_law(draft, law, gen_values, padded)
                if any(value[:n]):
                    raise VerificationError(
                        f"law {law} fails in the class-{c} quotient",
                        Counterexample("law", str(law), assignment, value[:n]))
                lattice.add(list(value[n:]))

    if torsion_free:
        lattice = _saturated(lattice)
    basis = LayerBasis(lattice, tails, n)
    size = len(basis.orders)
    logging.info(f"🔄 class {c + 1}: {T} tails, {lattice.rows_seen} rows, "
                 f"{size} new generators")
    if not size:
        return None

    powers = {i: P.power_word(i) for i in range(n) if P.rel_orders[i]}
    commutators = dict(P.commutators)
    new_images = [_pad(img, n + size) for img in images]
    for t, (kind, src) in enumerate(tails):
        extra = basis.word(_unit_row(T, t))
        if not extra:
            continue
        if kind == "image":
            vec = list(new_images[src[0]])
            for g, e in extra:
                vec[g] += e
            new_images[src[0]] = tuple(vec)
        elif kind == "power":
            powers[src[0]] = powers[src[0]] + extra
        else:
            commutators[src] = commutators.get(src, ()) + extra

    new_P = PcPresentation(list(P.weights) + [c + 1] * size,
                           list(P.rel_orders) + basis.orders, powers, commutators,
                           list(P.definitions) + basis.definitions)
    new_P.freeze(max_weight=c + 1)
    values = None
    if tail_values is not None:
        values = tuple(Q.values) + tuple(basis.target_values(target.presentation, tail_values))
    torsion = [d for d in basis.orders if d]
    stats = list(Q.stats) + [{
        "Class": c + 1, "Tails": T, "Rows": lattice.rows_seen,
        "New Generators": size, "Torsion": torsion,
        "Seconds": round(time.monotonic() - started, 3)}]
    return NqResult(new_P, tuple(new_images), Q.generator_names, c + 1,
                    REACHED_MAX_CLASS, strategy, stats, values=values)


# driver

def _next_class(Q, group_input, ladder, verify, target, torsion_free):
    """
    Extend Q by one class with ladder[0]. With ``verify`` = (samples, seed) the
    new class goes through verify_laws first; a counterexample drops ladder[0]
    (the list is shared with the caller) and the class is rebuilt.
    """
    while True:
        strategy = ladder[0]
        nxt = extend_one_class(Q, group_input, strategy, target, torsion_free)
        if nxt is None or verify is None:
            return nxt
        verdict = verify_laws(nxt, group_input, *verify)
        nxt.verification = verdict
        if verdict.passed:
            return nxt
        if len(ladder) == 1:
            raise VerificationError(
                f"class {nxt.class_achieved} fails verification under {strategy}: "
                f"{verdict.counterexample}", verdict.counterexample, partial=nxt)
        logging.warning(f"⚠️ class {nxt.class_achieved}: counterexample under {strategy} "
                        f"({verdict.counterexample}); escalating to {ladder[1]}")
        del ladder[0]


def _run(group_input, max_class, ladder, guard, resume, on_class, target=None,
         torsion_free=False, verify=None):
    if resume is not None:
        Q = resume
        logging.info(f"♻️ resuming from class {Q.class_achieved}")
    else:
        Q = abelian_quotient(group_input, target, torsion_free)
        Q.strategy = ladder[0]
        if on_class is not None and Q.class_achieved:
            on_class(Q)
    if Q.class_achieved == 0:
        Q.termination = STABILIZED
        return Q
    while max_class is None or Q.class_achieved < max_class:
        if guard is not None:
            guard.check(partial=Q)
        nxt = _next_class(Q, group_input, ladder, verify, target, torsion_free)
        if nxt is None:
            Q.termination = STABILIZED
            logging.info(f"✅ stabilized at class {Q.class_achieved}")
            return Q
        Q = nxt
        if on_class is not None:
            on_class(Q)
    Q.termination = REACHED_MAX_CLASS
    return Q


def nilpotent_quotient(group_input, max_class=None, strategy=INSTANCE_STRATEGY,
                       auto_escalate=AUTO_ESCALATE, verify_samples=VERIFY_SAMPLES,
                       seed=DEFAULT_SEED, guard=None, resume=None, on_class=None):
    """
    Largest nilpotent quotient of the input (up to max_class). With laws,
    every class is checked by verify_laws as soon as it is built; with
    auto_escalate a counterexample rebuilds that class with the next instance
    strategy. A counterexample with no strategy left raises VerificationError
    whose ``partial`` is the failed class.
    """
    if max_class is None:
        max_class = group_input.max_class
    first = INSTANCE_STRATEGIES.index(strategy)
    if resume is not None:
        first = max(first, INSTANCE_STRATEGIES.index(resume.strategy))
    ladder = list(INSTANCE_STRATEGIES[first:]) if auto_escalate else [INSTANCE_STRATEGIES[first]]
    verify = (verify_samples, seed) if group_input.laws and verify_samples else None
    while True:
        try:
            result = _run(group_input, max_class, ladder, guard, resume, on_class, verify=verify)
            break
        except VerificationError as exc:
            if exc.partial is not None or len(ladder) == 1:
                raise
            # a law failed below the new layer, so an earlier class is already wrong
            logging.warning(f"⚠️ {exc}; restarting with {ladder[1]}")
            del ladder[0]
            resume = None
    result.strategy = ladder[0]
    if verify is not None and result.verification is None:
        verdict = verify_laws(result, group_input, *verify)
        result.verification = verdict
        if not verdict.passed:
            raise VerificationError(f"class {result.class_achieved} fails verification: "
                                    f"{verdict.counterexample}", verdict.counterexample,
                                    partial=result)
    return result


def image_quotient(target, generator_names, max_class=None):
    """
    Rebuild the graded quotient generated by ``target.images`` with this
    engine's deterministic pipeline, taking relation rows from the target.
    """
    group_input = GroupInput(tuple(generator_names))
    return _run(group_input, max_class, [INSTANCE_STRATEGY], None, None, None, target)


def torsion_free_quotient(group_input, max_class=None, guard=None):
    """
    Largest nilpotent quotient whose lower central layers are torsion-free.
    Only relators are used; laws are not enforced here.
    """
    if group_input.laws:
        raise NqError("torsion_free_quotient takes relators only")
    result = _run(group_input, max_class, [INSTANCE_STRATEGY], guard, None, None,
                  torsion_free=True)
    logging.info(f"📊 torsion-free quotient: class {result.class_achieved}, "
                 f"{result.presentation.n} generators")
    return result


# verification

def random_element(P, rng, bound=SAMPLE_EXPONENT_RANGE):
    exps = rng.integers(-bound, bound + 1, size=P.n)
    return P.collect(tuple((i, int(e)) for i, e in enumerate(exps) if e))


def verify_laws(R, group_input, samples=VERIFY_SAMPLES, seed=DEFAULT_SEED):
    """
    Relator images must collect to the identity, and every law must vanish on
    ``samples`` pseudo-random elements drawn from ``seed``.
    """
    P = R.presentation
    gen_values = dict(zip(group_input.generators, R.images))
    for rel in group_input.relators:
        value = evaluate_word(P, rel, gen_values)
        if any(value):
            return Verdict(False, samples, seed, Counterexample("relator", str(rel), {}, value))
    rng = np.random.default_rng(seed)
    for law in group_input.laws:
        variables = sorted(law.variables)
        for _ in range(samples):
            assignment = {v: random_element(P, rng) for v in variables}
            value = evaluate_law(P, law, gen_values, assignment)
            if any(value):
                return Verdict(False, samples, seed,
                               Counterexample("law", str(law), assignment, value))
    logging.info(f"✅ laws verified on {samples} samples (seed {seed})")
    return Verdict(True, samples, seed)
