"""
queries.py
Read-only questions about a stored result document.
"""

import logging

import pandas as pd

from analysis import (canonical_form, central_section_exponent, compare_canonical,
                      hirsch_length, is_in_gamma, order, torsion_decomposition)
from nq_engine import evaluate_word
from pcpres import INFINITE
from results import load_document
from utils import frame_to_text
from words import GENERATOR, Symbol, parse_word

COMMANDS = ("order", "in-gamma", "exponent-gamma", "torsion", "compare")


def element_of(document, P, text):
    """Image in the stored quotient of a word over the input generators."""
    table = {g: Symbol(g, GENERATOR) for g in document.generator_names}
    word = parse_word(text, table)
    return evaluate_word(P, word, dict(zip(document.generator_names, document.images)))


def _weight(text, P):
    try:
        k = int(text)
    except ValueError:
        raise ValueError(f"weight must be an integer, got {text!r}")
    if not 1 <= k <= P.nilpotency_class() + 1:
        raise ValueError(f"weight {k} is outside 1..{P.nilpotency_class() + 1}")
    return k


def _format_order(value):
    return "infinite" if value == INFINITE else str(value)


def query(document, command, args):
    """Answer one query; returns the report text."""
    P = document.presentation()
    if command == "order":
        _arity(command, args, 1)
        x = element_of(document, P, args[0])
        return f"order({args[0]}) = {_format_order(order(P, x))}"
    if command == "in-gamma":
        _arity(command, args, 2)
        k = _weight(args[1], P)
        x = element_of(document, P, args[0])
        answer = "true" if is_in_gamma(P, x, k) else "false"
        return f"{args[0]} in gamma_{k}: {answer}"
    if command == "exponent-gamma":
        _arity(command, args, 1)
        k = _weight(args[0], P)
        return f"exponent(gamma_{k}/gamma_{k + 1}) = {_format_order(central_section_exponent(P, k))}"
    if command == "torsion":
        _arity(command, args, 0)
        decomp = torsion_decomposition(P)
        rows = [{"Weight": w, "Killed": " ".join(str(d) for d in ds)}
                for w, ds in sorted(decomp.layer_divisors.items())]
        lines = [
            f"torsion primes: {{{', '.join(str(p) for p in decomp.primes)}}}",
            f"torsion order: {decomp.order}",
            f"G/T: {decomp.quotient.n} generators, class {decomp.quotient.nilpotency_class()}, "
            f"Hirsch length {hirsch_length(decomp.quotient)}",
        ]
        if rows:
            lines.append(frame_to_text(pd.DataFrame(rows, columns=["Weight", "Killed"])))
        return "\n".join(lines)
    if command == "compare":
        _arity(command, args, 1)
        other = load_document(args[0])
        mine = canonical_form(P, document.images, document.generator_names)
        theirs = canonical_form(other.presentation(), other.images, other.generator_names)
        verdict = compare_canonical(mine, theirs)
        logging.info(f"🔍 compared with {args[0]}")
        return "equal" if verdict.equal else f"different: {verdict.witness}"
    raise ValueError(f"unknown query {command!r}; expected one of {', '.join(COMMANDS)}")


def _arity(command, args, count):
    if len(args) != count:
        raise ValueError(f"{command} takes {count} argument(s), got {len(args)}")
