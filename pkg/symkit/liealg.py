"""Lie-algebra structure of a set of generators: commutators, commutation
tables, structure constants, derived series and solvability."""
import logging
from collections import OrderedDict

import sympy

from .exceptions import NotClosedError
from .expr import collect_terms, normalize
from .prolong import Generator


logger = logging.getLogger(__name__)


class AlgebraBasis(object):
    """Ordered generators labelled ``G1``, ``G2``, ... in input order."""

    def __init__(self, gens, vars=None):
        self.gens = list(gens)
        if vars is None and self.gens:
            vars = self.gens[0].vars
        self.vars = list(vars or [])

    @property
    def labels(self):
        return ["G{0}".format(i + 1) for i in range(len(self.gens))]

    def __len__(self):
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def __getitem__(self, index):
        return self.gens[index]

    def __repr__(self):
        return "AlgebraBasis([{0}])".format(
            ", ".join(g.to_dsl() for g in self.gens))


def _basis(gens):
    if isinstance(gens, AlgebraBasis):
        return gens
    return AlgebraBasis(gens)


def commutator(g1, g2):
    """[G1, G2] = G1 G2 - G2 G1, again a first-order operator."""
    coefficients = OrderedDict()
    for var, c2 in g2.coefficients().items():
        c1 = g1.coefficient(var)
        coefficients[var] = normalize(g1.apply(c2) - g2.apply(c1))
    return Generator.from_coefficients(g1.space, coefficients)


def _vector(generator, vars):
    entries = OrderedDict()
    for var, coeff in generator.coefficients().items():
        for mono, c in collect_terms(coeff, vars, strict=False).items():
            entries[(str(var), sympy.srepr(mono))] = c
    return entries


def decompose(generator, basis):
    """Rational coefficients a_k with generator = sum a_k G_k, or ``None``
    when the generator is not in the span of ``basis``."""
    basis = _basis(basis)
    if generator.is_zero():
        return [sympy.Integer(0)] * len(basis)
    if not len(basis):
        return None
    unknowns = sympy.symbols("a0:{0}".format(len(basis)))
    combination = generator
    for a, g in zip(unknowns, basis):
        combination = combination - g.scale(a)
    eqs = []
    for coeff in combination.thetas + combination.etas:
        eqs.extend(collect_terms(coeff, basis.vars, strict=False).values())
    if not eqs:
        return [sympy.Integer(0)] * len(basis)
    solutions = sympy.linsolve(eqs, unknowns)
    if not solutions:
        return None
    solution = list(solutions)[0]
    free = set(unknowns)
    return [normalize(value.xreplace(dict((a, 0) for a in free)))
            for value in solution]


def independent(gens):
    """Greedy maximal subset of ``gens`` linearly independent over the
    rational constants."""
    gens = list(gens)
    if not gens:
        return []
    vars = gens[0].vars
    vectors = [_vector(g, vars) for g in gens]
    keys = []
    for vector in vectors:
        for key in vector:
            if key not in keys:
                keys.append(key)
    chosen, rows, rank = [], [], 0
    for g, vector in zip(gens, vectors):
        candidate = rows + [[vector.get(k, 0) for k in keys]]
        if keys and sympy.Matrix(candidate).rank() > rank:
            rows = candidate
            rank += 1
            chosen.append(g)
    return chosen


class CommutationTable(object):
    """Antisymmetric table of commutators with their decompositions in the
    basis; ``decompositions[a][b]`` is ``None`` when the entry is not a
    rational combination of the basis."""

    def __init__(self, basis, entries, decompositions):
        self.basis = basis
        self.entries = entries
        self.decompositions = decompositions

    @property
    def labels(self):
        return self.basis.labels

    @property
    def not_closed(self):
        return any(d is None for row in self.decompositions for d in row)

    def label(self, a, b):
        """Entry (a, b) written in the basis labels when possible."""
        decomposition = self.decompositions[a][b]
        if decomposition is None:
            return self.entries[a][b].to_dsl()
        terms = sympy.Integer(0)
        for coeff, label in zip(decomposition, self.labels):
            terms += coeff * sympy.Symbol(label)
        return str(terms).replace("**", "^")

    def rows(self):
        return [[self.label(a, b) for b in range(len(self.basis))]
                for a in range(len(self.basis))]

    def to_text(self):
        rows = [[""] + self.labels]
        for label, row in zip(self.labels, self.rows()):
            rows.append([label] + row)
        widths = [max(len(row[i]) for row in rows)
                  for i in range(len(rows[0]))]
        return "\n".join(
            "  ".join(cell.ljust(width) for cell, width in zip(row, widths))
            .rstrip() for row in rows)

    def to_dict(self):
        return {
            "labels": self.labels,
            "generators": [g.to_dsl() for g in self.basis],
            "table": self.rows(),
            "not_closed": self.not_closed,
        }


def commutation_table(basis):
    basis = _basis(basis)
    size = len(basis)
    entries = [[None] * size for _ in range(size)]
    decompositions = [[None] * size for _ in range(size)]
    for a in range(size):
        for b in range(size):
            if b < a:
                entries[a][b] = -entries[b][a]
                lower = decompositions[b][a]
                decompositions[a][b] = (
                    None if lower is None else [-c for c in lower])
                continue
            entries[a][b] = commutator(basis[a], basis[b])
            decompositions[a][b] = decompose(entries[a][b], basis)
    table = CommutationTable(basis, entries, decompositions)
    if table.not_closed:
        logger.warning("commutation table does not close in the basis")
    return table


class StructureConstants(object):
    """c[a][b][k] with [G_a, G_b] = sum_k c[a][b][k] G_k."""

    def __init__(self, c):
        self.c = c

    @property
    def dimension(self):
        return len(self.c)

    def __getitem__(self, index):
        return self.c[index]

    def is_antisymmetric(self):
        n = self.dimension
        return all(self.c[a][b][k] == -self.c[b][a][k]
                   for a in range(n) for b in range(n) for k in range(n))

    def jacobi_residual(self):
        n, c = self.dimension, self.c
        violations = []
        for a in range(n):
            for b in range(n):
                for d in range(n):
                    for k in range(n):
                        total = sum(
                            c[a][b][m] * c[m][d][k] + c[b][d][m] * c[m][a][k] +
                            c[d][a][m] * c[m][b][k] for m in range(n))
                        if normalize(total) != 0:
                            violations.append(((a, b, d, k), total))
        return violations

    def to_dict(self):
        return {"c": [[[str(v) for v in row] for row in plane]
                      for plane in self.c]}


def structure_constants(basis):
    table = commutation_table(basis)
    if table.not_closed:
        raise NotClosedError([
            (table.labels[a], table.labels[b], table.entries[a][b].to_dsl())
            for a in range(len(table.basis))
            for b in range(len(table.basis))
            if table.decompositions[a][b] is None])
    return StructureConstants(table.decompositions)


def derived_subalgebra(basis):
    """Linearly independent spanning set of all [G_a, G_b]."""
    basis = _basis(basis)
    commutators = []
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            entry = commutator(basis[a], basis[b])
            if decompose(entry, basis) is None:
                raise NotClosedError([(basis.labels[a], basis.labels[b],
                                       entry.to_dsl())])
            if not entry.is_zero():
                commutators.append(entry)
    return AlgebraBasis(independent(commutators), basis.vars)


def derived_series(basis):
    series = [_basis(basis)]
    while len(series[-1]):
        following = derived_subalgebra(series[-1])
        if len(following) == len(series[-1]):
            break
        series.append(following)
    return series


def is_solvable(basis):
    series = derived_series(basis)
    solvable = not len(series[-1])
    logger.debug("derived series dimensions %s, solvable: %s",
                 [len(b) for b in series], solvable)
    return solvable


def format_generator_list(basis):
    return ["{0} = {1}".format(label, g.to_dsl())
            for label, g in zip(basis.labels, basis.gens)]
