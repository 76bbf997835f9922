"""Noether machinery for first-order Lagrangians: Euler-Lagrange equations,
the variational symmetry condition and the conserved currents."""
import logging
from collections import OrderedDict

import sympy
from sympy.polys.monomials import itermonomials

from .exceptions import (
    HigherOrderLagrangianError, NotOrthonomicError,
    NotVariationalSymmetryError)
from .expr import collect_terms, max_order, normalize, substitute, to_dsl
from .jet import DESystem, orthonomic, reduce_modulo, total_derivative
from .linsolve import LinearSolver
from .prolong import (
    DeterminingSystem, Generator, ansatz_names, generic_generator, prolong,
    split_invariance_condition)


logger = logging.getLogger(__name__)


class Lagrangian(object):
    """First-order Lagrangian density on the jet space of ``space``."""

    def __init__(self, space, expression):
        expression = normalize(expression)
        if max_order(expression) > 1:
            raise HigherOrderLagrangianError(
                "{0} depends on derivatives of order {1}, only first-order "
                "Lagrangians are supported".format(
                    to_dsl(expression), max_order(expression)))
        self.space = space
        self.expression = expression

    def momentum(self, dep, var):
        """dL/du_{dep,var}"""
        return normalize(sympy.diff(self.expression,
                                    self.space.jet(str(dep), (str(var),))))

    def __repr__(self):
        return "Lagrangian({0})".format(to_dsl(self.expression))


def euler_lagrange(lagrangian):
    L = lagrangian.expression
    space = lagrangian.space
    eqs = []
    for u in space.dep:
        eq = sympy.diff(L, u)
        for x in space.indep:
            eq -= total_derivative(lagrangian.momentum(u, x), x, space)
        eqs.append(normalize(eq))
    return DESystem(space, eqs)


def flux_names(space):
    return ["f_{0}".format(x) for x in space.indep_names]


def variational_residual(lagrangian, generator, fluxes):
    """pr G(L) + L Div(theta) - Div(f); zero iff ``generator`` is a
    variational symmetry with flux ``fluxes``."""
    space = lagrangian.space
    L = lagrangian.expression
    prolonged = prolong(generator, 1)
    result = prolonged.apply(L)
    for theta, f, x in zip(generator.thetas, fluxes, space.indep):
        result += L * total_derivative(theta, x, space)
        result -= total_derivative(f, x, space)
    return normalize(result)


class NoetherSystem(DeterminingSystem):
    """Determining system of the variational symmetries together with the
    flux unknowns."""

    def __init__(self, space, unknowns, eqs, ansatz, fluxes):
        super(NoetherSystem, self).__init__(space, unknowns, eqs, ansatz)
        self.fluxes = list(fluxes)


def noether_condition(lagrangian):
    space = lagrangian.space
    ansatz = generic_generator(space)
    fluxes = [sympy.Function(name)(*space.base) for name in flux_names(space)]
    names = set(ansatz_names(space)) | set(flux_names(space))
    condition = variational_residual(lagrangian, ansatz, fluxes)
    eqs = []
    for eq in split_invariance_condition(condition, names, space):
        if all(normalize(eq - known) != 0 and normalize(eq + known) != 0
               for known in eqs):
            eqs.append(eq)
    logger.info("variational condition has %s equations", len(eqs))
    return NoetherSystem(space, ansatz.thetas + ansatz.etas + fluxes, eqs,
                         ansatz, fluxes)


class ConservedCurrent(object):
    """Components I_i ordered like the independent variables."""

    def __init__(self, space, components, generator=None, fluxes=None):
        self.space = space
        self.components = [normalize(c) for c in components]
        self.generator = generator
        self.fluxes = fluxes

    def divergence(self):
        return normalize(sum(total_derivative(c, x, self.space)
                             for c, x in zip(self.components,
                                             self.space.indep)))

    @property
    def ordering(self):
        return list(self.space.indep_names)

    def to_dict(self):
        return OrderedDict([
            ("generator", None if self.generator is None else
             self.generator.to_dsl()),
            ("current", [to_dsl(c) for c in self.components]),
            ("ordering", self.ordering),
        ])

    def __repr__(self):
        return "ConservedCurrent([{0}])".format(
            ", ".join(to_dsl(c) for c in self.components))


def _term_count(components):
    return sum(len(sympy.Add.make_args(c)) for c in components if c != 0)


def _curls(space, degree):
    """Identically divergence-free vectors ``D_j(g) e_i - D_i(g) e_j`` for
    the monomials ``g`` in the base variables up to ``degree``."""
    monomials = sorted((g for g in itermonomials(list(space.base), degree)
                        if g != 1), key=sympy.default_sort_key)
    m = len(space.indep)
    for i in range(m):
        for j in range(i + 1, m):
            for g in monomials:
                vector = [sympy.Integer(0)] * m
                vector[i] = total_derivative(g, space.indep[j], space)
                vector[j] = -total_derivative(g, space.indep[i], space)
                if vector[i] != 0 or vector[j] != 0:
                    yield vector


def remove_curls(components, space, degree=2):
    """Greedily subtract trivial curl parts while that lowers the number of
    terms of the current."""
    components = [normalize(c) for c in components]
    candidates = list(_curls(space, degree))
    improved = True
    while improved:
        improved = False
        for vector in candidates:
            k = [c != 0 for c in vector].index(True)
            lead = sympy.Add.make_args(vector[k])[0]
            for term in sympy.Add.make_args(components[k]):
                ratio = normalize(term / lead)
                if ratio == 0 or not ratio.is_number:
                    continue
                trial = [normalize(c - ratio * v)
                         for c, v in zip(components, vector)]
                if _term_count(trial) < _term_count(components):
                    logger.debug("removed curl part %s", [to_dsl(v * ratio)
                                                         for v in vector])
                    components = trial
                    improved = True
                    break
    return components


def noether_current(lagrangian, generator, fluxes, form=None, curl_degree=2):
    """Conserved current of a variational symmetry with flux ``fluxes``,
    reduced modulo the Euler-Lagrange equations and cleared of trivial curl
    parts built from monomials up to ``curl_degree``."""
    space = lagrangian.space
    L = lagrangian.expression
    characteristics = []
    for eta, u in zip(generator.etas, space.dep):
        q = eta
        for theta, x in zip(generator.thetas, space.indep):
            q -= space.raise_jet(u, x) * theta
        characteristics.append(q)
    components = []
    for theta, f, x in zip(generator.thetas, fluxes, space.indep):
        component = L * theta - f
        for q, u in zip(characteristics, space.dep):
            component += lagrangian.momentum(u, x) * q
        components.append(normalize(component))
    form = form or orthonomic(euler_lagrange(lagrangian))
    components = [reduce_modulo(c, form) for c in components]
    current = ConservedCurrent(space, components, generator, fluxes)
    residual = reduce_modulo(current.divergence(), form)
    if residual != 0:
        raise NotVariationalSymmetryError(to_dsl(residual))
    current.components = remove_curls(current.components, space, curl_degree)
    return current


def _polynomial(args, degree, prefix):
    monomials = sorted(itermonomials(list(args), degree),
                       key=sympy.default_sort_key)
    coefficients = [sympy.Dummy("{0}{1}".format(prefix, i))
                    for i in range(len(monomials))]
    return (sum(c * m for c, m in zip(coefficients, monomials)),
            coefficients)


def instantiate(state, unknowns, degree, variables):
    """Replace every function still free in ``state`` by a polynomial of
    ``degree`` in its arguments and solve what is left exactly.

    Returns one list of values for ``unknowns`` per free parameter of the
    solution.
    """
    values = [state.value(u) for u in unknowns]
    equations = state.remaining + state.constraints
    rules = {}
    coefficients = list(state.constants)
    for name, fn in state.functions.items():
        if not any(v.has(fn) for v in values + equations):
            continue
        rules[fn], cs = _polynomial(fn.args, degree, "k_{0}_".format(name))
        coefficients.extend(cs)
    values = [substitute(v, rules) for v in values]
    linear = []
    for eq in equations:
        linear.extend(collect_terms(substitute(eq, rules), variables,
                                    strict=False).values())
    if linear:
        solutions = sympy.linsolve(linear, coefficients)
        if not solutions:
            return []
        solution = dict(zip(coefficients, list(solutions)[0]))
    else:
        solution = dict((c, c) for c in coefficients)
    free = [c for c in coefficients
            if any(v.has(c) for v in solution.values())]
    values = [normalize(v.xreplace(solution)) for v in values]
    results = []
    for parameter in free:
        choice = dict((c, 0) for c in free)
        choice[parameter] = 1
        results.append([normalize(v.xreplace(choice)) for v in values])
    return results


def noether_solve(lagrangian, degree=1, params=None):
    """Variational symmetries with polynomial coefficients of degree at most
    ``degree`` and their conserved currents."""
    space = lagrangian.space
    try:
        form = orthonomic(euler_lagrange(lagrangian))
    except NotOrthonomicError as e:
        logger.warning("Euler-Lagrange equations of %s have no solved form, "
                       "no currents: %s", lagrangian, e)
        return []
    system = noether_condition(lagrangian)
    state = LinearSolver(params).solve(
        system.unknowns, system.eqs, system.vars,
        reserved=set(space.local_names()) | set(system.unknown_names))
    m, n = len(space.indep), len(space.dep)
    results = []
    for values in instantiate(state, system.unknowns, degree, space.base):
        generator = Generator(space, values[:m], values[m:m + n])
        if generator.is_zero():
            logger.debug("skipping divergence-free flux %s",
                         [to_dsl(v) for v in values[m + n:]])
            continue
        if any(generator == known for known, _ in results):
            continue
        try:
            current = noether_current(lagrangian, generator,
                                      values[m + n:], form, degree + 1)
        except NotVariationalSymmetryError as e:
            logger.info("dropping %s: %s", generator.to_dsl(), e)
            continue
        results.append((generator, current))
    logger.info("found %s conserved currents", len(results))
    return results
