"""
words.py
Symbols, free-group words, laws (identical relations) and commutator words.

Commutators follow [u, v] = u^-1 v^-1 u v and brackets are left-normed:
[u, v, w] = [[u, v], w].
"""

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from exceptions import LawError, UndeclaredSymbolError, WordSyntaxError

GENERATOR = "generator"
VARIABLE = "variable"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str = GENERATOR

    def __post_init__(self):
        if self.kind not in (GENERATOR, VARIABLE):
            raise ValueError(f"unknown symbol kind {self.kind!r}")


def free_reduce(letters):
    """Merge adjacent letters on the same symbol and drop zero exponents."""
    out = []
    for name, exp in letters:
        if exp == 0:
            continue
        if out and out[-1][0] == name:
            merged = out[-1][1] + exp
            if merged:
                out[-1] = (name, merged)
            else:
                out.pop()
        else:
            out.append((name, exp))
    return tuple(out)


class Word:
    """
    A freely reduced word in run-length form: a tuple of (symbol name, exponent)
    with nonzero exponents and no two neighbours on the same symbol.
    """

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        object.__setattr__(self, "letters", free_reduce(letters))

    def __setattr__(self, key, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def identity(cls):
        return cls(())

    @classmethod
    def letter(cls, name, exp=1):
        return cls(((name, exp),))

    @property
    def is_identity(self):
        return not self.letters

    def inverse(self):
        return Word((name, -exp) for name, exp in reversed(self.letters))

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.letters + other.letters)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0 or self.is_identity:
            return Word()
        if len(self.letters) == 1:
            name, exp = self.letters[0]
            return Word(((name, exp * n),))
        return Word(self.letters * n)

    def symbols(self):
        return {name for name, _ in self.letters}

    def length(self):
        return sum(abs(exp) for _, exp in self.letters)

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return f"Word({self})"

    def __str__(self):
        if not self.letters:
            return "1"
        return "*".join(name if exp == 1 else f"{name}^{exp}" for name, exp in self.letters)


def commutator(u, v):
    return u.inverse() * v.inverse() * u * v


def left_normed_commutator(ws):
    ws = list(ws)
    if not ws:
        raise ValueError("left_normed_commutator needs at least one word")
    result = ws[0]
    for w in ws[1:]:
        result = commutator(result, w)
    return result


def engel_word(a, b, n):
    """[a, b, ..., b] with n copies of b; n = 0 gives a."""
    if n < 0:
        raise ValueError("Engel length must be non-negative")
    return left_normed_commutator([a] + [b] * n)


# Weight shapes keep the bracket structure of a law so the engine can bound
# the weight of an instance without expanding it:
#   ("sym", name) | ("one",) | ("pow", child, exp) | ("prod", children) |
#   ("comm", children)

def shape_min_weight(shape, weight_of):
    kind = shape[0]
    if kind == "sym":
        return weight_of.get(shape[1], 1)
    if kind == "one":
        return float("inf")
    if kind == "prod":
        return min(shape_min_weight(s, weight_of) for s in shape[1])
    if kind == "pow":
        return shape_min_weight(shape[1], weight_of)
    if kind == "comm":
        return sum(shape_min_weight(s, weight_of) for s in shape[1])
    raise ValueError(f"unknown shape node {kind!r}")


@dataclass(frozen=True)
class Law:
    body: Word
    variables: frozenset
    shape: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        present = frozenset(self.variables) & self.body.symbols()
        if not present:
            raise LawError(f"law {self.body} contains no variable")
        object.__setattr__(self, "variables", present)

    def min_weight(self, weight_of):
        """
        Lowest lower-central weight an instance can have when every symbol s is
        mapped to an element of weight weight_of[s] (unlisted symbols: 1).
        """
        if self.shape is None:
            return 1
        return shape_min_weight(self.shape, weight_of)

    def __str__(self):
        return str(self.body)


def engel_law(target, variable, n, variables=None):
    """
    Law [target, variable, ..., variable] (n copies). ``target`` may itself be
    a variable when listed in ``variables``.
    """
    variables = frozenset(variables or ()) | {variable}
    body = engel_word(Word.letter(target), Word.letter(variable), n)
    shape = ("comm", (("sym", target),) + (("sym", variable),) * n)
    return Law(body, variables, shape)


def substitute(law, assignment):
    """Replace every variable of the law by its image word; generators stay fixed."""
    missing = sorted(v for v in law.variables if v not in assignment)
    if missing:
        raise LawError(f"assignment misses variable(s) {', '.join(missing)}")
    letters = []
    for name, exp in law.body.letters:
        if name in law.variables:
            letters.extend((assignment[name] ** exp).letters)
        else:
            letters.append((name, exp))
    return Word(letters)


@dataclass(frozen=True)
class GroupInput:
    generators: tuple
    variables: tuple = ()
    relators: tuple = ()
    laws: tuple = ()
    max_class: Optional[int] = None

    def __post_init__(self):
        names = list(self.generators) + list(self.variables)
        if len(set(names)) != len(names):
            raise WordSyntaxError("symbol declared twice")
        gens, variables = set(self.generators), set(self.variables)
        for rel in self.relators:
            stray = rel.symbols() & variables
            if stray:
                raise WordSyntaxError(f"relator {rel} uses variable(s) {', '.join(sorted(stray))}")
            unknown = rel.symbols() - gens
            if unknown:
                raise UndeclaredSymbolError(f"undeclared symbol(s) {', '.join(sorted(unknown))}")
        for law in self.laws:
            unknown = law.body.symbols() - gens - variables
            if unknown:
                raise UndeclaredSymbolError(f"undeclared symbol(s) {', '.join(sorted(unknown))}")
        if self.max_class is not None and self.max_class < 1:
            raise ValueError("max_class must be positive")

    def symbol_table(self):
        table = {g: Symbol(g, GENERATOR) for g in self.generators}
        table.update({v: Symbol(v, VARIABLE) for v in self.variables})
        return table


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(\d+)|(.))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.end() == pos:
            break
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            tokens.append(("name", m.group(1), col))
        elif m.group(2) is not None:
            tokens.append(("int", m.group(2), col))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "^*()[],-+":
                raise WordSyntaxError(f"unexpected character {ch!r}", column=col)
            tokens.append((ch, ch, col))
        pos = m.end()
    return tokens


class _WordParser:
    """Recursive-descent parser producing (Word, weight shape)."""

    def __init__(self, text, declared):
        self.text = text
        self.declared = declared
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, kind=None):
        tok = self.peek()
        if tok is None:
            raise WordSyntaxError("unexpected end of word", column=len(self.text) + 1)
        if kind is not None and tok[0] != kind:
            raise WordSyntaxError(f"expected {kind!r}, found {tok[1]!r}", column=tok[2])
        self.i += 1
        return tok

    def parse(self):
        word, shape = self.word()
        tok = self.peek()
        if tok is not None:
            raise WordSyntaxError(f"unexpected {tok[1]!r}", column=tok[2])
        return word, shape

    def starts_atom(self, tok):
        return tok is not None and (tok[0] in ("name", "(", "[") or tok == ("int", "1", tok[2]))

    def word(self):
        factors = [self.term()]
        while True:
            tok = self.peek()
            if tok is not None and tok[0] == "*":
                self.take("*")
                factors.append(self.term())
            elif self.starts_atom(tok):
                factors.append(self.term())
            else:
                break
        word = Word()
        for w, _ in factors:
            word = word * w
        shape = factors[0][1] if len(factors) == 1 else ("prod", tuple(s for _, s in factors))
        return word, shape

    def term(self):
        word, shape = self.atom()
        tok = self.peek()
        if tok is not None and tok[0] == "^":
            self.take("^")
            sign = 1
            nxt = self.peek()
            if nxt is not None and nxt[0] in ("-", "+"):
                self.take()
                sign = -1 if nxt[0] == "-" else 1
            num = self.take("int")
            exp = sign * int(num[1])
            if exp == 0:
                raise WordSyntaxError("zero exponent", column=num[2])
            word = word ** exp
            shape = ("pow", shape, exp)
        return word, shape

    def atom(self):
        tok = self.take()
        kind, value, col = tok
        if kind == "name":
            if value not in self.declared:
                raise UndeclaredSymbolError(f"undeclared symbol {value!r}", column=col)
            return Word.letter(value), ("sym", value)
        if kind == "int":
            if value != "1":
                raise WordSyntaxError(f"unexpected number {value!r}", column=col)
            return Word(), ("one",)
        if kind == "(":
            inner = self.word()
            self.take(")")
            return inner
        if kind == "[":
            parts = [self.word()]
            while self.peek() is not None and self.peek()[0] == ",":
                self.take(",")
                parts.append(self.word())
            if len(parts) < 2:
                raise WordSyntaxError("commutator needs at least two entries", column=col)
            self.take("]")
            return (left_normed_commutator([w for w, _ in parts]),
                    ("comm", tuple(s for _, s in parts)))
        raise WordSyntaxError(f"unexpected {value!r}", column=col)


def parse_word_with_shape(text, declared: Mapping):
    if not text.strip():
        raise WordSyntaxError("empty word", column=1)
    return _WordParser(text, declared).parse()


def parse_word(text, declared: Mapping):
    """
    Parse a word such as "a*b^-2", "[a,b,c]" or "(a b)^3" over the declared
    symbols (a mapping or set of names). Returns the freely reduced Word.
    """
    return parse_word_with_shape(text, declared)[0]


def parse_law(text, declared: Mapping):
    word, shape = parse_word_with_shape(text, declared)
    variables = {name for name, sym in _as_table(declared).items() if sym.kind == VARIABLE}
    return Law(word, frozenset(variables), shape)


def _as_table(declared):
    if isinstance(declared, Mapping):
        return {k: v if isinstance(v, Symbol) else Symbol(k, v) for k, v in declared.items()}
    return {name: Symbol(name) for name in declared}
