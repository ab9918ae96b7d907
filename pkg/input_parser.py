"""
input_parser.py
Parses the line-oriented input format into a GroupInput.

    # comment
    generators: a b c
    variables: x
    relators: a^2, [a,b]
    laws: [a,x,x,x], [b,x,x,x]
    max_class: 6

Several words on one line are separated by top-level commas or semicolons;
clauses may repeat and accumulate. Errors carry 1-based line and column.
"""

import re

from exceptions import WordSyntaxError
from words import VARIABLE, GroupInput, Symbol, GENERATOR, parse_law, parse_word

KEYWORDS = ("generators", "variables", "relators", "laws", "max_class")

_CLAUSE = re.compile(r"^(\s*)([A-Za-z_]+)\s*:")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def _split_words(text, offset):
    """Top-level comma/semicolon split -> [(word text, column offset)]."""
    parts = []
    depth = 0
    start = 0
    for k, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch in ",;" and depth == 0:
            parts.append((text[start:k], offset + start))
            start = k + 1
    parts.append((text[start:], offset + start))
    out = []
    for piece, col in parts:
        if piece.strip():
            lead = len(piece) - len(piece.lstrip())
            out.append((piece.strip(), col + lead))
        elif len(parts) > 1:
            raise WordSyntaxError("empty word in list", column=col + 1)
    return out


def _names(text, offset, line):
    out = []
    for m in re.finditer(r"[^\s,]+", text):
        name = m.group(0)
        if not _NAME.match(name):
            raise WordSyntaxError(f"invalid name {name!r}", line=line, column=offset + m.start() + 1)
        out.append((name, offset + m.start() + 1))
    return out


def _relocate(exc, line, offset):
    column = offset + exc.column if exc.column is not None else None
    return type(exc)(exc.message, line=line, column=column)


def parse_input(text):
    generators, variables = [], []
    relator_texts, law_texts = [], []
    max_class = None
    seen = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _CLAUSE.match(line)
        if m is None:
            col = len(line) - len(line.lstrip()) + 1
            raise WordSyntaxError("expected 'keyword:'", line=line_no, column=col)
        keyword = m.group(2)
        if keyword not in KEYWORDS:
            raise WordSyntaxError(f"unknown keyword {keyword!r}", line=line_no,
                                  column=len(m.group(1)) + 1)
        body, offset = line[m.end():], m.end()

        if keyword in ("generators", "variables"):
            for name, col in _names(body, offset, line_no):
                if name in seen:
                    raise WordSyntaxError(f"symbol {name!r} declared twice (first on line "
                                          f"{seen[name]})", line=line_no, column=col)
                seen[name] = line_no
                (generators if keyword == "generators" else variables).append(name)
        elif keyword == "max_class":
            value = body.strip()
            if not value.isdigit() or int(value) < 1:
                col = offset + len(body) - len(body.lstrip()) + 1
                raise WordSyntaxError(f"max_class must be a positive integer, got {value!r}",
                                      line=line_no, column=col)
            max_class = int(value)
        else:
            try:
                words = _split_words(body, offset)
            except WordSyntaxError as exc:
                raise exc.at_line(line_no)
            target = relator_texts if keyword == "relators" else law_texts
            target.extend((w, line_no, col) for w, col in words)

    table = {g: Symbol(g, GENERATOR) for g in generators}
    table.update({v: Symbol(v, VARIABLE) for v in variables})

    relators = []
    for word_text, line_no, col in relator_texts:
        try:
            word = parse_word(word_text, table)
        except WordSyntaxError as exc:
            raise _relocate(exc, line_no, col)
        stray = sorted(word.symbols() & set(variables))
        if stray:
            raise WordSyntaxError(f"variable(s) {', '.join(stray)} used in a relator",
                                  line=line_no, column=col + 1)
        relators.append(word)

    laws = []
    for word_text, line_no, col in law_texts:
        try:
            laws.append(parse_law(word_text, table))
        except WordSyntaxError as exc:
            raise _relocate(exc, line_no, col)

    return GroupInput(tuple(generators), tuple(variables), tuple(relators), tuple(laws),
                      max_class)