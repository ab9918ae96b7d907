from words import GroupInput, parse_law, parse_word


def group_input(generators, relators=(), laws=(), variables=(), max_class=None):
    gens = tuple(generators.split())
    table = {g: "generator" for g in gens}
    table.update({v: "variable" for v in variables})
    return GroupInput(gens, tuple(variables),
                      tuple(parse_word(r, table) for r in relators),
                      tuple(parse_law(l, table) for l in laws), max_class)


def witt(r, n):
    from sympy import divisors, mobius
    return int(sum(mobius(d) * r ** (n // d) for d in divisors(n))) // n
