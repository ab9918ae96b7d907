"""
acceptance.py
Acceptance suite: recomputes the Engel quotients and compares the invariants
with the reference values. Each quotient is computed through results.run, so
its document (and checkpoint) lands in the output directory.
"""

import logging
import os
import time

import pandas as pd
from sympy import primefactors

from analysis import (canonical_form, central_section_exponent, certify_isomorphism,
                      compare_canonical, is_in_gamma, order, project, torsion_decomposition)
from config import ACCEPTANCE_OUTPUT_DIR
from exceptions import NqError
from nq_engine import STABILIZED, NqResult
from pcpres import power
from queries import element_of
from results import EXIT_OK, JobConfig, run
from utils import atomic_write_text, frame_to_text

INPUTS = {
    # right 3-Engel elements a, b next to a free generator c
    "H": "generators: a b c\nvariables: x\nlaws: [a,x,x,x], [b,x,x,x]\n",
    "AC": "generators: a c\nvariables: x\nlaws: [a,x,x,x]\n",
    # one right 4-Engel generator
    "M": "generators: u v\nvariables: x\nlaws: [u,x,x,x,x]\n",
    "S": "generators: s t g\nvariables: x\nlaws: [s,x,x,x,x], [t,x,x,x,x]\nmax_class: 7\n",
    "K": "generators: s t g\nvariables: x\nlaws: [s,x,x,x,x], [t,x,x,x,x]\nmax_class: 8\n",
    # the 2-generator 4-Engel group
    "E24": "generators: a b\nvariables: y1 y2\nlaws: [y1,y2,y2,y2,y2]\n",
}

LONG = {"K"}


class RowFailure(Exception):
    pass


class QuotientRunner:
    """Computes each quotient once and keeps the document."""

    def __init__(self, output_dir=ACCEPTANCE_OUTPUT_DIR, **overrides):
        self.output_dir = output_dir
        self.overrides = overrides
        self.documents = {}

    def document(self, name):
        if name not in self.documents:
            path = os.path.join(self.output_dir, "inputs", f"{name}.nq")
            atomic_write_text(path, INPUTS[name])
            config = JobConfig(path, output=os.path.join(self.output_dir, f"{name}.json"),
                               **self.overrides)
            started = time.monotonic()
            doc, code = run(config)
            logging.info(f"📐 {name}: exit {code} after {time.monotonic() - started:.1f}s")
            if code != EXIT_OK or doc is None:
                self.documents[name] = RowFailure(f"run of {name} ended with exit code {code}")
            else:
                self.documents[name] = doc
        doc = self.documents[name]
        if isinstance(doc, RowFailure):
            raise doc
        return doc

    def element(self, name, word):
        doc = self.document(name)
        return element_of(doc, doc.presentation(), word)


# rows: (group, check, expected, function returning the computed value)

def _class_row(runner, name):
    doc = runner.document(name)
    return f"{doc.class_achieved} ({doc.termination})"


def _order(runner, name, word):
    doc = runner.document(name)
    return order(doc.presentation(), runner.element(name, word))


def _in_gamma(runner, name, word, k):
    doc = runner.document(name)
    return is_in_gamma(doc.presentation(), runner.element(name, word), k)


def _exponent(runner, name, k):
    return central_section_exponent(runner.document(name).presentation(), k)


def _square_in_gamma(runner, name, word, k):
    P = runner.document(name).presentation()
    return is_in_gamma(P, power(P, runner.element(name, word), 2), k)


def _class_at_most(runner, name, bound):
    doc = runner.document(name)
    return doc.termination == STABILIZED and doc.class_achieved <= bound


def _coprime_class_bound(runner, name, primes):
    """
    Smallest k such that every layer above k is finite of order built from
    ``primes``: a quotient without elements of those orders has class <= k.
    """
    bound = 0
    for weight, free, torsion in runner.document(name).layers:
        if free or any(set(primefactors(d)) - set(primes) for d in torsion):
            bound = weight
    return bound


class TorsionComparison:
    """M/T against E(2,4): torsion primes, class, canonical forms, certificate."""

    def __init__(self, runner):
        self.runner = runner
        self._cache = None

    def compute(self):
        if self._cache is None:
            M = self.runner.document("M")
            E = self.runner.document("E24")
            decomp = torsion_decomposition(M.presentation())
            images = [project(decomp, img) for img in M.images]
            quotient_form = canonical_form(decomp.quotient, images, ("a", "b"))
            engel_form = canonical_form(E.presentation(), E.images, ("a", "b"))
            W = NqResult(decomp.quotient, tuple(images), ("a", "b"),
                         decomp.quotient.nilpotency_class())
            certificate = certify_isomorphism(E.to_result(), W)
            self._cache = (decomp, quotient_form, engel_form, certificate)
        return self._cache

    def primes(self):
        return set(self.compute()[0].primes) <= {2, 3, 5}

    def classes(self):
        _, quotient_form, engel_form, _ = self.compute()
        return (engel_form.nilpotency_class(), quotient_form.nilpotency_class())

    def canonical(self):
        _, quotient_form, engel_form, _ = self.compute()
        verdict = compare_canonical(quotient_form, engel_form)
        return "equal" if verdict.equal else f"different: {verdict.witness}"

    def certificate(self):
        cert = self.compute()[3]
        return True if cert.holds else "; ".join(cert.reasons)


def acceptance_rows(runner):
    torsion = TorsionComparison(runner)
    return [
        ("H", "class", "6 (stabilized)", lambda: _class_row(runner, "H")),
        ("H", "order [a^-1,c,c,c]", 2, lambda: _order(runner, "H", "[a^-1,c,c,c]")),
        ("H", "order [a*b,c,c,c]", 4, lambda: _order(runner, "H", "[a*b,c,c,c]")),
        ("H", "[a^-1,c,c,c] in gamma_5", True, lambda: _in_gamma(runner, "H", "[a^-1,c,c,c]", 5)),
        ("H", "[a*b,c,c,c] in gamma_5", True, lambda: _in_gamma(runner, "H", "[a*b,c,c,c]", 5)),
        ("H", "exponent gamma_5/gamma_6", 10, lambda: _exponent(runner, "H", 5)),
        ("H", "exponent gamma_6", 2, lambda: _exponent(runner, "H", 6)),
        ("H", "[a,c,b,c,c]^2 in gamma_6", True,
         lambda: _square_in_gamma(runner, "H", "[a,c,b,c,c]", 6)),
        ("<a,c>", "stabilizes at class <= 5", True, lambda: _class_at_most(runner, "AC", 5)),
        ("<a,c>", "exponent gamma_5", 2, lambda: _exponent(runner, "AC", 5)),
        ("M", "class", "8 (stabilized)", lambda: _class_row(runner, "M")),
        ("M", "order [u^-1,v,v,v,v]", 375, lambda: _order(runner, "M", "[u^-1,v,v,v,v]")),
        ("S", "order [s*t,g,g,g,g]", 300, lambda: _order(runner, "S", "[s*t,g,g,g,g]")),
        ("K", "exponent gamma_8", 60, lambda: _exponent(runner, "K", 8)),
        ("K", "class of the {2,3,5}'-quotient <= 7", True,
         lambda: _coprime_class_bound(runner, "K", (2, 3, 5)) <= 7),
        ("E(2,4)", "stabilizes at class <= 6", True, lambda: _class_at_most(runner, "E24", 6)),
        ("E(2,4)", "class (recorded)", None, lambda: runner.document("E24").class_achieved),
        ("M", "torsion primes in {2,3,5}", True, torsion.primes),
        ("E(2,4)", "class equals class of M/T", True,
         lambda: len(set(torsion.classes())) == 1),
        ("M/T", "canonical form vs E(2,4)", "equal", torsion.canonical),
        ("M/T", "isomorphism certificate", True, torsion.certificate),
        ("M", "class of the {2,3,5}'-quotient <= 6", True,
         lambda: _coprime_class_bound(runner, "M", (2, 3, 5)) <= 6),
    ]


def verify_acceptance(include_long=False, output_dir=ACCEPTANCE_OUTPUT_DIR, **overrides):
    """
    Runs every row and returns (DataFrame, all executed rows passed). Rows on
    long quotients are skipped unless include_long is set.
    """
    runner = QuotientRunner(output_dir, **overrides)
    records = []
    for group, check, expected, compute in acceptance_rows(runner):
        if group in LONG and not include_long:
            records.append({"Group": group, "Check": check, "Expected": expected,
                            "Computed": "-", "Status": "SKIP"})
            continue
        try:
            computed = compute()
            if expected is None:
                status = "INFO"
            else:
                status = "PASS" if computed == expected else "FAIL"
        except (RowFailure, NqError, ValueError) as exc:
            computed, status = f"error: {exc}", "FAIL"
        records.append({"Group": group, "Check": check, "Expected": expected,
                        "Computed": computed, "Status": status})
        logging.info(f"{'✅' if status == 'PASS' else '❌'} {group}: {check} -> {computed}")

    table = pd.DataFrame(records, columns=["Group", "Check", "Expected", "Computed", "Status"])
    atomic_write_text(os.path.join(output_dir, "acceptance.txt"), frame_to_text(table) + "\n")
    passed = not (table["Status"] == "FAIL").any()
    logging.info(f"📊 {int((table['Status'] == 'PASS').sum())} passed, "
                 f"{int((table['Status'] == 'FAIL').sum())} failed, "
                 f"{int((table['Status'] == 'SKIP').sum())} skipped")
    return table, passed
