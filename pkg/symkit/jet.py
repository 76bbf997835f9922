"""Jet-space bookkeeping: differential systems, total derivatives, the
solved (orthonomic) form of a system and reduction modulo that form."""
import logging
from collections import OrderedDict

import sympy

from .exceptions import InsufficientOrderError, NotOrthonomicError
from .expr import JetSymbol, jets, max_order, normalize, to_dsl


logger = logging.getLogger(__name__)


class DESystem(object):
    """A system of differential equations F_mu = 0 on the jet space of
    ``space``."""

    def __init__(self, space, eqs):
        eqs = [normalize(e) for e in eqs]
        if not eqs:
            raise ValueError("a differential system needs at least one "
                             "equation")
        for eq in eqs:
            for jet in jets(eq):
                if jet.dep not in space.dep_names or \
                        any(i not in space.indep_names for i in jet.idx):
                    raise ValueError(
                        "{0} is not a coordinate of this jet space".format(
                            jet))
        self.space = space
        self.eqs = eqs

    @property
    def indep(self):
        return self.space.indep

    @property
    def dep(self):
        return self.space.dep

    @property
    def order(self):
        return max(max_order(eq) for eq in self.eqs)

    def __repr__(self):
        return "DESystem({0})".format(", ".join(to_dsl(e) for e in self.eqs))


def total_derivative(e, var, space, max_order=None):
    """D_var e = de/dvar + sum over jet coordinates J of u_{J,var} de/dJ."""
    var = space.symbol(str(var))
    if var not in space.indep:
        raise ValueError("{0} is not an independent variable".format(var))
    e = sympy.sympify(e)
    result = sympy.diff(e, var)
    for jet in sorted(jets(e), key=space.rank_key):
        raised = space.raise_jet(jet, var)
        if max_order is not None and raised.order > max_order:
            raise InsufficientOrderError(
                "{0} exceeds order {1}".format(raised, max_order))
        result += raised * sympy.diff(e, jet)
    return normalize(result)


def total_derivatives(e, variables, space):
    for var in variables:
        e = total_derivative(e, var, space)
    return e


def leading_jet(e, space):
    candidates = jets(e)
    if not candidates:
        return None
    return max(candidates, key=space.rank_key)


def solve_for_leader(e, space):
    """Return (leader, rhs) with e = 0 equivalent to leader = rhs."""
    lead = leading_jet(e, space)
    if lead is None:
        raise NotOrthonomicError(
            "equation {0} contains no derivative".format(to_dsl(e)))
    coeff = normalize(sympy.diff(e, lead))
    rest = normalize(e - coeff * lead)
    if lead in coeff.free_symbols or lead in rest.free_symbols:
        raise NotOrthonomicError(
            "leading derivative {0} does not occur linearly in {1}".format(
                to_dsl(lead), to_dsl(e)))
    if coeff == 0:
        raise NotOrthonomicError(
            "cannot isolate {0} in {1}".format(to_dsl(lead), to_dsl(e)))
    return lead, normalize(sympy.cancel(-rest / coeff))


class OrthonomicForm(object):
    """Inter-reduced rules ``leader -> rhs``; ``rhs`` only holds jet
    coordinates of lower rank that no leader divides.

    Differential consequences of a rule are derived the first time a
    reducible coordinate needs them and kept in ``_consequences``.
    """

    def __init__(self, rules, space):
        self.rules = OrderedDict(rules)
        self.space = space
        self._consequences = {}

    @property
    def leaders(self):
        return list(self.rules)

    def ranking(self, jet):
        return self.space.rank_key(jet)

    def reducer(self, jet):
        for lead in self.rules:
            if lead.divides(jet):
                return lead
        return None

    def consequence(self, lead, jet):
        key = (lead, jet)
        if key not in self._consequences:
            self._consequences[key] = total_derivatives(
                self.rules[lead], lead.quotient(jet), self.space)
        return self._consequences[key]

    def reduce(self, e):
        e = normalize(e)
        while True:
            reducible = [j for j in jets(e) if self.reducer(j) is not None]
            if not reducible:
                return e
            jet = max(reducible, key=self.space.rank_key)
            lead = self.reducer(jet)
            e = normalize(e.xreplace({jet: self.consequence(lead, jet)}))

    def equations(self):
        return [normalize(lead - rhs) for lead, rhs in self.rules.items()]

    def __repr__(self):
        return "OrthonomicForm({0})".format(", ".join(
            "{0} -> {1}".format(to_dsl(k), to_dsl(v))
            for k, v in self.rules.items()))


def reduce_modulo(e, form):
    return form.reduce(e)


def _interreduce(rules, pending, space):
    # a rule whose leader another leader divides goes back to ``pending``
    changed = True
    while changed:
        changed = False
        for lead in list(rules):
            others = OrthonomicForm(OrderedDict(
                (k, v) for k, v in rules.items() if k != lead), space)
            if others.reducer(lead) is not None:
                pending.append(normalize(lead - rules.pop(lead)))
                changed = True
                continue
            rhs = others.reduce(rules[lead])
            if rhs != rules[lead]:
                rules[lead] = rhs
                changed = True


def orthonomic(system):
    """Bring ``system`` to inter-reduced solved form.

    Each equation is solved for its highest ranked jet coordinate, which
    must occur linearly with a coefficient free of it.
    """
    space = system.space
    pending = list(system.eqs)
    rules = OrderedDict()
    while pending:
        eq = pending.pop(0)
        eq = OrthonomicForm(rules, space).reduce(eq)
        if eq == 0:
            continue
        lead, rhs = solve_for_leader(eq, space)
        logger.debug("solved for %s", lead)
        rules[lead] = rhs
        _interreduce(rules, pending, space)
    ordered = OrderedDict(sorted(
        rules.items(), key=lambda item: space.rank_key(item[0]),
        reverse=True))
    logger.debug("orthonomic form has %s rules", len(ordered))
    return OrthonomicForm(ordered, space)
