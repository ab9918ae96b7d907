"""
results.py
Job configuration, the persisted result document and the `run` pipeline.

Documents are JSON with sorted keys. Every integer is written as a decimal
string, vectors and pc words as sparse "index:exponent" lists with 1-based
generator indices. Files are replaced atomically; a run writes a checkpoint
after every completed class and resumes from it when rerun on the same input.
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Optional

from analysis import lower_central_data
from config import (AUTO_ESCALATE, DEFAULT_OUTPUT, DEFAULT_SEED, ENGINE_VERSION,
                    INSTANCE_STRATEGIES, INSTANCE_STRATEGY, MEMORY_BUDGET_MB,
                    TIME_BUDGET_SECONDS, VERIFY_SAMPLES)
from exceptions import BudgetExceeded, LawError, NqError, VerificationError, WordSyntaxError
from input_parser import parse_input
from nq_engine import REACHED_MAX_CLASS, NqResult, nilpotent_quotient, verify_laws
from pcpres import Definition, PcPresentation
from utils import BudgetGuard, atomic_write_text, layer_table, frame_to_text

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_PARSE_ERROR = 2
EXIT_BUDGET = 3


@dataclass
class JobConfig:
    input_path: str
    max_class: Optional[int] = None
    strategy: str = INSTANCE_STRATEGY
    verify_samples: int = VERIFY_SAMPLES
    seed: int = DEFAULT_SEED
    time_budget: float = TIME_BUDGET_SECONDS
    memory_budget: float = MEMORY_BUDGET_MB
    output: str = DEFAULT_OUTPUT
    auto_escalate: bool = AUTO_ESCALATE
    timings: bool = False           # per-class seconds make the bytes run-dependent

    def __post_init__(self):
        if self.time_budget <= 0 or self.memory_budget <= 0:
            raise ValueError("budgets must be positive")
        if self.strategy not in INSTANCE_STRATEGIES:
            raise ValueError(f"unknown instance strategy {self.strategy!r}")
        if self.verify_samples < 0:
            raise ValueError("verify_samples must be non-negative")
        if self.max_class is not None and self.max_class < 1:
            raise ValueError("max_class must be positive")

    def echo(self):
        return {
            "auto_escalate": self.auto_escalate,
            "input": self.input_path,
            "max_class": None if self.max_class is None else str(self.max_class),
            "memory_budget": repr(float(self.memory_budget)),
            "samples": str(self.verify_samples),
            "seed": str(self.seed),
            "strategy": self.strategy,
            "time_budget": repr(float(self.time_budget)),
        }


# sparse encodings

def _sparse(vec):
    return [f"{i + 1}:{e}" for i, e in enumerate(vec) if e]


def _sparse_word(word):
    return [f"{g + 1}:{e}" for g, e in word]


def _pairs(items):
    out = []
    for item in items:
        i, e = item.split(":")
        out.append((int(i) - 1, int(e)))
    return out


def _dense(items, n):
    vec = [0] * n
    for i, e in _pairs(items):
        vec[i] += e
    return tuple(vec)


def _definition_doc(d):
    if d is None:
        return None
    doc = {"kind": d.kind, "source": [str(s + 1) for s in d.source]}
    if d.kind == "combination":
        doc["terms"] = [{"definition": _definition_doc(part), "coefficient": str(x)}
                        for part, x in d.terms]
    return doc


def _definition_from(doc):
    if doc is None:
        return None
    terms = tuple((_definition_from(t["definition"]), int(t["coefficient"]))
                  for t in doc.get("terms", []))
    return Definition(doc["kind"], tuple(int(s) - 1 for s in doc["source"]), terms)


_STAT_INTS = ("Class", "Tails", "Rows", "New Generators")


@dataclass
class ResultDocument:
    engine_version: str
    config: dict
    input_digest: str
    input_text: str
    generator_names: tuple
    weights: tuple
    rel_orders: tuple
    powers: dict                    # generator -> pc word
    commutators: dict               # (j, i) -> pc word
    definitions: tuple
    images: tuple
    class_achieved: int
    termination: str
    strategy: str
    complete: bool
    layers: tuple                   # (weight, free rank, torsion divisors)
    stats: list
    seed: int
    verification: Optional[dict] = None
    timings: list = field(default_factory=list)

    @classmethod
    def from_result(cls, result, config, input_text, complete=True):
        P = result.presentation
        layers = tuple(lower_central_data(P).rows())
        verification = None
        if result.verification is not None:
            v = result.verification
            verification = {"passed": v.passed, "samples": v.samples, "seed": v.seed,
                            "counterexample": None if v.counterexample is None
                            else str(v.counterexample)}
        stats = [{k: s[k] for k in s if k != "Seconds"} for s in result.stats]
        timings = [s.get("Seconds", 0.0) for s in result.stats] if config.timings else []
        return cls(ENGINE_VERSION, config.echo(), input_digest(input_text), input_text,
                   tuple(result.generator_names), P.weights, P.rel_orders,
                   dict(P.powers), dict(P.commutators), tuple(P.definitions),
                   tuple(tuple(x) for x in result.images), result.class_achieved,
                   result.termination, result.strategy, complete, layers, stats,
                   config.seed, verification, timings)

    def presentation(self):
        return PcPresentation(self.weights, self.rel_orders, self.powers, self.commutators,
                              self.definitions, graded=True)

    def to_result(self):
        return NqResult(self.presentation(), self.images, self.generator_names,
                        self.class_achieved, self.termination, self.strategy,
                        [dict(s) for s in self.stats])

    @property
    def n(self):
        return len(self.weights)

    def to_dict(self):
        gens = [{"index": str(i + 1), "weight": str(w), "rel_order": str(m),
                 "definition": _definition_doc(d)}
                for i, (w, m, d) in enumerate(zip(self.weights, self.rel_orders,
                                                  self.definitions))]
        verification = None
        if self.verification is not None:
            v = self.verification
            verification = {"passed": v["passed"], "samples": str(v["samples"]),
                            "seed": str(v["seed"]), "counterexample": v["counterexample"]}
        stats = []
        for s in self.stats:
            row = {k: str(s[k]) for k in _STAT_INTS if k in s}
            row["Torsion"] = [str(d) for d in s.get("Torsion", [])]
            stats.append(row)
        doc = {
            "engine_version": self.engine_version,
            "config": self.config,
            "input_digest": self.input_digest,
            "input": self.input_text,
            "input_generators": list(self.generator_names),
            "presentation": {
                "generators": gens,
                "powers": {str(i + 1): _sparse_word(w) for i, w in self.powers.items()},
                "commutators": {f"{j + 1},{i + 1}": _sparse_word(w)
                                for (j, i), w in self.commutators.items()},
            },
            "epimorphism": {name: _sparse(img)
                            for name, img in zip(self.generator_names, self.images)},
            "class_achieved": str(self.class_achieved),
            "termination": self.termination,
            "strategy": self.strategy,
            "complete": self.complete,
            "layers": [{"weight": str(w), "free_rank": str(f), "torsion": [str(d) for d in t]}
                       for w, f, t in self.layers],
            "stats": stats,
            "seed": str(self.seed),
            "verification": verification,
        }
        if self.timings:
            doc["timings"] = [repr(float(t)) for t in self.timings]
        return doc

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc):
        pres = doc["presentation"]
        gens = sorted(pres["generators"], key=lambda g: int(g["index"]))
        n = len(gens)
        names = tuple(doc["input_generators"])
        verification = doc.get("verification")
        if verification is not None:
            verification = {"passed": verification["passed"],
                            "samples": int(verification["samples"]),
                            "seed": int(verification["seed"]),
                            "counterexample": verification["counterexample"]}
        stats = []
        for s in doc.get("stats", []):
            row = {k: int(s[k]) for k in _STAT_INTS if k in s}
            row["Torsion"] = [int(d) for d in s.get("Torsion", [])]
            stats.append(row)
        commutators = {}
        for key, items in pres["commutators"].items():
            j, i = (int(x) - 1 for x in key.split(","))
            commutators[(j, i)] = tuple(_pairs(items))
        return cls(
            doc["engine_version"], dict(doc["config"]), doc["input_digest"], doc["input"],
            names,
            tuple(int(g["weight"]) for g in gens),
            tuple(int(g["rel_order"]) for g in gens),
            {int(i) - 1: tuple(_pairs(items)) for i, items in pres["powers"].items()},
            commutators,
            tuple(_definition_from(g.get("definition")) for g in gens),
            tuple(_dense(doc["epimorphism"][name], n) for name in names),
            int(doc["class_achieved"]), doc["termination"], doc["strategy"],
            bool(doc["complete"]),
            tuple((int(l["weight"]), int(l["free_rank"]), tuple(int(d) for d in l["torsion"]))
                  for l in doc["layers"]),
            stats, int(doc["seed"]), verification,
            [float(t) for t in doc.get("timings", [])])

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def layer_report(self):
        return frame_to_text(layer_table(self.layers))


def input_digest(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def save_document(document, path):
    atomic_write_text(path, document.to_json())


def load_document(path):
    with open(path, encoding="utf-8") as handle:
        return ResultDocument.from_json(handle.read())


def _load_checkpoint(config, text):
    if not os.path.exists(config.output):
        return None
    try:
        doc = load_document(config.output)
    except (OSError, ValueError, KeyError) as exc:
        logging.warning(f"⚠️ ignoring unreadable checkpoint {config.output}: {exc}")
        return None
    if doc.complete or doc.input_digest != input_digest(text):
        return None
    if doc.strategy not in INSTANCE_STRATEGIES or (
            INSTANCE_STRATEGIES.index(doc.strategy) < INSTANCE_STRATEGIES.index(config.strategy)):
        return None
    if doc.engine_version != ENGINE_VERSION:
        return None
    logging.info(f"♻️ checkpoint found at class {doc.class_achieved}")
    return doc.to_result()


def run(config):
    """
    Compute, verify and persist. Returns (document or None, exit code):
    0 success, 1 law or relator counterexample, 2 input error, 3 budget
    exceeded (the last completed class is persisted).
    """
    try:
        with open(config.input_path, encoding="utf-8") as handle:
            text = handle.read()
        group_input = parse_input(text)
    except (WordSyntaxError, LawError, ValueError) as exc:
        logging.error(f"❌ {config.input_path}: {exc}")
        return None, EXIT_PARSE_ERROR
    except OSError as exc:
        logging.error(f"❌ cannot read {config.input_path}: {exc}")
        return None, EXIT_PARSE_ERROR

    max_class = config.max_class if config.max_class is not None else group_input.max_class
    guard = BudgetGuard(config.time_budget, config.memory_budget)
    resume = _load_checkpoint(config, text)

    def checkpoint(partial):
        doc = ResultDocument.from_result(partial, config, text, complete=False)
        doc.termination = REACHED_MAX_CLASS
        save_document(doc, config.output)
        logging.info(f"💾 checkpoint: class {partial.class_achieved} -> {config.output}")

    logging.info(f"🚀 {len(group_input.generators)} generators, {len(group_input.relators)} "
                 f"relators, {len(group_input.laws)} laws, max class {max_class or '-'}")
    try:
        result = nilpotent_quotient(group_input, max_class, config.strategy,
                                    config.auto_escalate, config.verify_samples, config.seed,
                                    guard=guard, resume=resume, on_class=checkpoint)
    except BudgetExceeded as exc:
        logging.error(f"⏱️ {exc}")
        if exc.partial is None:
            return None, EXIT_BUDGET
        doc = ResultDocument.from_result(exc.partial, config, text, complete=False)
        doc.termination = REACHED_MAX_CLASS
        save_document(doc, config.output)
        return doc, EXIT_BUDGET
    except VerificationError as exc:
        logging.error(f"❌ {exc}")
        if exc.partial is None:
            return None, EXIT_COUNTEREXAMPLE
        doc = ResultDocument.from_result(exc.partial, config, text, complete=True)
        save_document(doc, config.output)
        logging.info(f"💾 failed class {doc.class_achieved} written to {config.output}")
        return doc, EXIT_COUNTEREXAMPLE
    except NqError as exc:
        logging.error(f"❌ {exc}")
        raise

    if result.verification is None:
        result.verification = verify_laws(result, group_input, config.verify_samples, config.seed)
    doc = ResultDocument.from_result(result, config, text, complete=True)
    save_document(doc, config.output)
    logging.info(f"✅ class {doc.class_achieved} ({doc.termination}) written to {config.output}")
    if not result.verification.passed:
        logging.error(f"❌ counterexample: {result.verification.counterexample}")
        return doc, EXIT_COUNTEREXAMPLE
    return doc, EXIT_OK
