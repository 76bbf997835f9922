"""Point-symmetry generators, their prolongations and the determining
system of a differential system."""
import logging
import re
from collections import OrderedDict

import sympy

from .exceptions import DSLSyntaxError, InsufficientOrderError
from .expr import (
    jets, normalize, parse, split_coefficients, substitute, to_dsl,
    unknown_atoms)
from .jet import orthonomic, reduce_modulo, total_derivative


logger = logging.getLogger(__name__)

_D_TOKEN = re.compile(r"D\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]")


class Generator(object):
    """G = sum_i theta_i D[x_i] + sum_j eta_j D[u_j].

    ``thetas`` follow the order of ``space.indep`` and ``etas`` the order
    of ``space.dep``.
    """

    def __init__(self, space, thetas=None, etas=None):
        thetas = list(thetas if thetas is not None else
                      [0] * len(space.indep))
        etas = list(etas if etas is not None else [0] * len(space.dep))
        if len(thetas) != len(space.indep) or len(etas) != len(space.dep):
            raise ValueError("generator needs {0} thetas and {1} etas".format(
                len(space.indep), len(space.dep)))
        self.space = space
        self.thetas = [normalize(c) for c in thetas]
        self.etas = [normalize(c) for c in etas]

    @classmethod
    def from_coefficients(cls, space, coefficients):
        """Build from a mapping base variable (or its name) -> coefficient."""
        coefficients = dict((str(k), v) for k, v in coefficients.items())
        thetas = [coefficients.pop(str(x), 0) for x in space.indep]
        etas = [coefficients.pop(str(u), 0) for u in space.dep]
        if coefficients:
            raise ValueError("unknown variables {0}".format(
                sorted(coefficients)))
        return cls(space, thetas, etas)

    @property
    def vars(self):
        return self.space.base

    def coefficients(self):
        return OrderedDict(zip(self.vars, self.thetas + self.etas))

    def coefficient(self, var):
        return self.coefficients()[self.space.symbol(str(var))]

    def is_zero(self):
        return all(c == 0 for c in self.thetas + self.etas)

    def apply(self, e):
        """Action of G as a first-order operator on a function of the base
        variables."""
        result = 0
        for var, coeff in self.coefficients().items():
            if coeff != 0:
                result += coeff * sympy.diff(e, var)
        return normalize(result)

    def map(self, func):
        return Generator(self.space, [func(c) for c in self.thetas],
                         [func(c) for c in self.etas])

    def scale(self, factor):
        return self.map(lambda c: factor * c)

    def __add__(self, other):
        return Generator(self.space,
                         [a + b for a, b in zip(self.thetas, other.thetas)],
                         [a + b for a, b in zip(self.etas, other.etas)])

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, Generator):
            return NotImplemented
        return (self - other).is_zero()

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    __hash__ = None

    def free_symbols(self):
        symbols = set()
        for c in self.thetas + self.etas:
            symbols |= c.free_symbols
        return symbols

    def to_dsl(self):
        pieces = []
        for var, coeff in self.coefficients().items():
            if coeff == 0:
                continue
            negative = coeff.could_extract_minus_sign()
            if negative:
                coeff = normalize(-coeff)
            if coeff == 1:
                body = "D[{0}]".format(var)
            elif isinstance(coeff, sympy.Add):
                body = "({0})*D[{1}]".format(to_dsl(coeff), var)
            else:
                body = "{0}*D[{1}]".format(to_dsl(coeff), var)
            if not pieces:
                pieces.append("-" + body if negative else body)
            else:
                pieces.append(("- " if negative else "+ ") + body)
        return " ".join(pieces) if pieces else "0"

    def __str__(self):
        return self.to_dsl()

    def __repr__(self):
        return "Generator({0})".format(self.to_dsl())


def parse_generator(text, space):
    """Read a generator written as a sum of ``coefficient*D[var]`` terms."""
    placeholders = OrderedDict()

    def _placeholder(match):
        name = match.group(1)
        symbol = space.symbol(name)
        token = "_D_{0}".format(name)
        placeholders[token] = (symbol, sympy.Dummy(token))
        return token

    source = _D_TOKEN.sub(_placeholder, text)
    if not placeholders:
        raise DSLSyntaxError("generator {0!r} has no D[...] term".format(
            text))
    dummies = dict((token, dummy)
                   for token, (_, dummy) in placeholders.items())
    e = parse(source, space, extra_names=dummies)
    coefficients = {}
    rest = e
    for symbol, dummy in placeholders.values():
        coeff = normalize(sympy.diff(e, dummy))
        if coeff.has(*dummies.values()):
            raise DSLSyntaxError(
                "D[{0}] occurs nonlinearly in {1!r}".format(symbol, text))
        coefficients[symbol] = coeff
        rest = rest - coeff * dummy
    if normalize(rest) != 0:
        raise DSLSyntaxError(
            "term without D[...] in generator {0!r}".format(text))
    return Generator.from_coefficients(space, coefficients)


class ProlongedGenerator(object):
    """Prolongation of ``base`` up to ``order`` (``None`` for unbounded).

    Coefficients of jet coordinates are derived on demand and memoized.
    """

    def __init__(self, base, order=None):
        self.base = base
        self.space = base.space
        self.order = order
        self._coeffs = OrderedDict()

    @property
    def coeffs(self):
        return self._coeffs

    def coefficient(self, jet):
        if self.order is not None and jet.order > self.order:
            raise InsufficientOrderError(
                "prolongation of order {0} cannot act on {1}".format(
                    self.order, to_dsl(jet)))
        if jet.order == 0:
            return self.base.etas[self.space.dep_names.index(jet.dep)]
        if jet not in self._coeffs:
            var = jet.idx[-1]
            lower = self.space.jet(jet.dep, jet.idx[:-1])
            value = total_derivative(self.coefficient(lower), var, self.space)
            for theta, x in zip(self.base.thetas, self.space.indep):
                if theta == 0:
                    continue
                value -= (self.space.raise_jet(lower, x) *
                          total_derivative(theta, var, self.space))
            self._coeffs[jet] = normalize(value)
        return self._coeffs[jet]

    def apply(self, e):
        e = sympy.sympify(e)
        result = 0
        for theta, x in zip(self.base.thetas, self.space.indep):
            if theta != 0:
                result += theta * sympy.diff(e, x)
        for jet in sorted(jets(e), key=self.space.rank_key):
            result += self.coefficient(jet) * sympy.diff(e, jet)
        return normalize(result)


def prolong(generator, order):
    if order < 1:
        raise ValueError("prolongation order must be positive")
    return ProlongedGenerator(generator, order)


def apply_prolonged(prolonged, e):
    return prolonged.apply(e)


def evolutionary(generator):
    """Characteristics Q_j = eta_j - sum_i u_{j,i} theta_i."""
    space = generator.space
    result = []
    for eta, u in zip(generator.etas, space.dep):
        q = eta
        for theta, x in zip(generator.thetas, space.indep):
            q -= space.raise_jet(u, x) * theta
        result.append(normalize(q))
    return result


def ansatz_names(space):
    return (["theta_{0}".format(x) for x in space.indep_names] +
            ["eta_{0}".format(u) for u in space.dep_names])


def generic_generator(space):
    """Generator whose coefficients are unknown functions of every base
    variable."""
    unknowns = [sympy.Function(name)(*space.base)
                for name in ansatz_names(space)]
    m = len(space.indep)
    return Generator(space, unknowns[:m], unknowns[m:])


class DeterminingSystem(object):
    """Linear homogeneous equations for the unknown coefficients of
    ``ansatz``."""

    def __init__(self, space, unknowns, eqs, ansatz=None):
        self.space = space
        self.unknowns = list(unknowns)
        self.eqs = list(eqs)
        self.ansatz = ansatz

    @property
    def unknown_names(self):
        return [fn.func.__name__ for fn in self.unknowns]

    @property
    def vars(self):
        return list(self.space.base)

    def __len__(self):
        return len(self.eqs)

    def to_dict(self):
        return {
            "unknowns": [to_dsl(fn) for fn in self.unknowns],
            "vars": [str(v) for v in self.vars],
            "equations": [to_dsl(eq) for eq in self.eqs],
        }


def _add_unique(eqs, eq):
    for known in eqs:
        if normalize(known - eq) == 0 or normalize(known + eq) == 0:
            return
    eqs.append(eq)


def split_invariance_condition(e, unknown_names, space):
    """Coefficient equations of ``e`` with respect to the jet monomials of
    positive order."""
    variables = set(j for j in jets(e) if j.order > 0)
    for fn in unknown_atoms(e, unknown_names):
        variables -= fn.free_symbols
    return [coeff for _, coeff in split_coefficients(
        e, unknown_names, variables=variables, parameters=space.params)]


def determining_system(system, form=None):
    space = system.space
    form = form or orthonomic(system)
    ansatz = generic_generator(space)
    prolonged = prolong(ansatz, max(system.order, 1))
    names = set(ansatz_names(space))
    eqs = []
    for lead, rhs in form.rules.items():
        condition = reduce_modulo(prolonged.apply(lead - rhs), form)
        for eq in split_invariance_condition(condition, names, space):
            _add_unique(eqs, eq)
    logger.info("determining system has %s equations", len(eqs))
    return DeterminingSystem(space, ansatz.thetas + ansatz.etas, eqs, ansatz)


def check_symmetry(system, generator, form=None):
    """Residuals of the invariance condition; all zero iff ``generator`` is
    a Lie point symmetry of ``system``."""
    form = form or orthonomic(system)
    prolonged = prolong(generator, max(system.order, 1))
    residuals = [reduce_modulo(prolonged.apply(eq), form)
                 for eq in system.eqs]
    logger.debug("residuals of %s: %s", generator, residuals)
    return residuals


def substitute_generator(generator, rules):
    return generator.map(lambda c: substitute(c, rules))
