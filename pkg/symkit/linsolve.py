"""Heuristic solver for linear overdetermined systems of PDEs.

The solver works on a :class:`SolutionState` and applies a fixed sequence
of simplification steps (algebraic elimination, integration of null
derivatives, splitting on linearly independent functions, single ODE
integration, partial and full completion to involutive form, separation
of mixed arguments) until the system is solved or no step applies.
"""
import logging
import os
import re
from collections import OrderedDict

import sympy
from sympy.core.function import AppliedUndef

from .exceptions import (
    BudgetExceededError, InvalidConfigurationError, NonPolynomialError,
    NotApplicableError)
from .expr import atom_key, collect_terms, normalize, substitute, to_dsl


logger = logging.getLogger(__name__)

BUDGET_ENV_VAR = "SYMKIT_BUDGET"

_INTEGRATION_CONSTANT = re.compile(r"^C\d+$")


class SolverParams(object):
    """Limits steering the solver: ``n1`` bounds the size of equations
    reduced to involutive form before anything else is tried, ``n2`` the
    size of equations integrated as ODEs, escalated by 3 up to ``n3``, and
    ``budget`` the reductions allowed per completion."""

    n1 = 5
    n2 = 5
    n3 = 8
    budget = 2000

    def __init__(self, n1=None, n2=None, n3=None, budget=None):
        if n1 is not None:
            self.n1 = n1
        if n2 is not None:
            self.n2 = n2
        if n3 is not None:
            self.n3 = n3
        if budget is not None:
            self.budget = budget
        self._validate()

    def _validate(self):
        for name in ("n1", "n2", "n3", "budget"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or \
                    value < 1:
                raise InvalidConfigurationError(
                    "{0} must be a positive integer, got {1!r}".format(
                        name, value))
        if self.n2 > self.n3:
            raise InvalidConfigurationError(
                "n2 ({0}) must not exceed n3 ({1})".format(self.n2, self.n3))

    @classmethod
    def from_env(cls, environ=None, **kwargs):
        environ = os.environ if environ is None else environ
        raw = environ.get(BUDGET_ENV_VAR)
        if raw is not None and kwargs.get("budget") is None:
            try:
                kwargs["budget"] = int(raw)
            except ValueError:
                raise InvalidConfigurationError(
                    "{0} must be an integer, got {1!r}".format(
                        BUDGET_ENV_VAR, raw))
        return cls(**kwargs)

    def to_dict(self):
        return {"n1": self.n1, "n2": self.n2, "n3": self.n3,
                "budget": self.budget}

    def __repr__(self):
        return "SolverParams(n1={0}, n2={1}, n3={2}, budget={3})".format(
            self.n1, self.n2, self.n3, self.budget)


class SolutionState(object):
    """Partial solution of a linear system.

    ``found`` maps each solved unknown of the original system to its value
    in terms of arbitrary constants ``c<k>`` and arbitrary functions
    ``F<k>``; ``remaining`` holds the equations still to solve.
    """

    def __init__(self, unknowns, eqs, variables, reserved=()):
        self.original = list(unknowns)
        self.variables = list(variables)
        self.found = OrderedDict()
        self.remaining = []
        self.constraints = []
        self.functions = OrderedDict(
            (fn.func.__name__, fn) for fn in unknowns)
        self.constants = []
        self.counters = {"c": 0, "F": 0}
        self.reserved = set(reserved) | set(self.functions)
        self.budget_exceeded = False
        self.set_equations(eqs)

    # bookkeeping --------------------------------------------------------

    def _fresh_name(self, prefix):
        while True:
            self.counters[prefix] += 1
            name = "{0}{1}".format(prefix, self.counters[prefix])
            if name not in self.reserved:
                self.reserved.add(name)
                return name

    def fresh_constant(self):
        symbol = sympy.Symbol(self._fresh_name("c"))
        self.constants.append(symbol)
        return symbol

    def fresh_function(self, args):
        """Arbitrary function of ``args``, or a constant without args."""
        args = [v for v in self.variables if v in set(args)]
        if not args:
            return self.fresh_constant()
        fn = sympy.Function(self._fresh_name("F"))(*args)
        self.functions[fn.func.__name__] = fn
        return fn

    def is_unknown(self, atom):
        if isinstance(atom, AppliedUndef):
            return atom.func.__name__ in self.functions
        return atom in self.constants

    def unknowns_of(self, e):
        result = set(a for a in e.atoms(AppliedUndef) if self.is_unknown(a))
        result.update(s for s in e.free_symbols if s in self.constants)
        return result

    def set_equations(self, eqs):
        cleaned = []
        for eq in eqs:
            eq = clean_equation(eq)
            if eq == 0:
                continue
            if any(normalize(eq - known) == 0 or normalize(eq + known) == 0
                   for known in cleaned):
                continue
            cleaned.append(eq)
        self.remaining = cleaned

    def assign(self, target, value):
        """Substitute ``target`` (a live unknown) by ``value`` everywhere."""
        value = normalize(value)
        logger.debug("%s = %s", target, to_dsl(value))
        rule = {target: value}
        for key in list(self.found):
            self.found[key] = substitute(self.found[key], rule)
        if isinstance(target, AppliedUndef):
            if target in self.original:
                self.found[target] = value
            self.functions.pop(target.func.__name__, None)
        else:
            self.constants.remove(target)
        self.set_equations([substitute(eq, rule) for eq in self.remaining])
        self.constraints = [clean_equation(substitute(eq, rule))
                            for eq in self.constraints]
        self.constraints = [eq for eq in self.constraints if eq != 0]

    # reporting ----------------------------------------------------------

    @property
    def complete(self):
        return not self.remaining

    def value(self, unknown):
        return self.found.get(unknown, unknown)

    def metric(self):
        """Progress measure, compared lexicographically: original unknowns
        without a value, remaining equations, total terms."""
        unsolved = sum(1 for fn in self.original if fn not in self.found)
        return (unsolved, len(self.remaining),
                sum(_terms(eq) for eq in self.remaining))

    def fingerprint(self):
        return (tuple(sorted(sympy.srepr(eq) for eq in self.remaining)),
                tuple(sympy.srepr(v) for v in self.found.values()))

    def finish(self):
        """Once every original unknown has a value, move the remaining
        partial differential equations on introduced functions into
        ``constraints``. Anything else stays in ``remaining``."""
        if all(fn in self.found for fn in self.original):
            moved = [eq for eq in self.remaining
                     if is_family_constraint(eq, self)]
            self.constraints.extend(moved)
            self.remaining = [eq for eq in self.remaining if eq not in moved]
        return self

    def to_dict(self):
        return {
            "found": OrderedDict(
                (to_dsl(k), to_dsl(v)) for k, v in self.found.items()),
            "remaining": [to_dsl(eq) for eq in self.remaining],
            "constraints": [to_dsl(eq) for eq in self.constraints],
            "complete": self.complete,
        }


def _terms(e):
    return len(sympy.Add.make_args(e))


def is_family_constraint(eq, state):
    """True for an equation on introduced functions that differentiates one
    of them along two or more variables; its solutions form an infinite
    family. Ordinary differential and algebraic relations are not."""
    unknowns = state.unknowns_of(eq)
    if not unknowns or any(u in state.original for u in unknowns):
        return False
    for atom in eq.atoms(sympy.Derivative):
        if not _is_derivative_of_unknown(atom, state):
            continue
        along = set()
        for other in eq.atoms(sympy.Derivative):
            if other.expr == atom.expr:
                along.update(v for v, _ in other.variable_count)
        if len(along) > 1:
            return True
    return False


def clean_equation(eq):
    """Canonical form of ``eq = 0`` with variable denominators cleared."""
    eq = normalize(eq)
    if any(sympy.denom(term).free_symbols for term in sympy.Add.make_args(eq)):
        eq = normalize(sympy.numer(sympy.together(eq)))
    return eq


def _is_derivative_of_unknown(atom, state):
    return isinstance(atom, sympy.Derivative) and \
        state.is_unknown(atom.expr)


def unknown_of(atom):
    if isinstance(atom, sympy.Derivative):
        return atom.expr
    return atom


def linear_parts(eq, state):
    """Split a linear equation into (atom -> coefficient, rest), where the
    atoms are live unknowns and their derivatives."""
    derivatives = set(a for a in eq.atoms(sympy.Derivative)
                      if _is_derivative_of_unknown(a, state))
    bare = set(a for a in eq.atoms(AppliedUndef) if state.is_unknown(a))
    constants = set(s for s in eq.free_symbols if s in state.constants)
    atoms = sorted(derivatives | bare | constants, key=atom_key)
    placeholders = OrderedDict((a, sympy.Dummy("a")) for a in atoms)
    frozen = eq.xreplace(placeholders)
    parts = OrderedDict()
    rest = frozen
    for atom, dummy in placeholders.items():
        coeff = normalize(sympy.diff(frozen, dummy))
        if coeff.has(*placeholders.values()):
            raise NonPolynomialError(
                "equation {0} is not linear in {1}".format(to_dsl(eq), atom))
        if coeff != 0:
            parts[atom] = coeff
        rest = rest - coeff * dummy
    return parts, normalize(rest)


def derivative_counts(atom, variables):
    if not isinstance(atom, sympy.Derivative):
        return tuple(0 for _ in variables)
    counts = dict((v, int(n)) for v, n in atom.variable_count)
    return tuple(counts.get(v, 0) for v in variables)


def derivative_order(atom):
    if not isinstance(atom, sympy.Derivative):
        return 0
    return sum(int(n) for _, n in atom.variable_count)


def equation_order(eq, state):
    try:
        parts, _ = linear_parts(eq, state)
    except NonPolynomialError:
        return 0
    return max([derivative_order(a) for a in parts] or [0])


def _selection_key(eq, state):
    return (_terms(eq), equation_order(eq, state), sympy.default_sort_key(eq))


def _ordered(eqs, state):
    return sorted(eqs, key=lambda eq: _selection_key(eq, state))


def _name(unknown):
    if isinstance(unknown, AppliedUndef):
        return unknown.func.__name__
    return str(unknown)


# Step operations ----------------------------------------------------------


def solve_algebraic(eq, state):
    """Isolate one unknown of a derivative-free equation.

    Returns ``(unknown, value)``. The value may only depend on the
    arguments of the isolated unknown; among the admissible unknowns the
    one with a numeric coefficient and the fewest occurrences in the
    system is taken.
    """
    parts, rest = linear_parts(eq, state)
    if not parts or any(isinstance(a, sympy.Derivative) for a in parts):
        raise NotApplicableError("not an algebraic equation")
    candidates = []
    for atom, coeff in parts.items():
        value = normalize(sympy.cancel(-(eq - coeff * atom) / coeff))
        if not _depends_only_on(value, atom, state):
            continue
        occurrences = sum(1 for other in state.remaining if other.has(atom))
        candidates.append(((not coeff.is_number, occurrences), atom, value))
    if not candidates:
        raise NotApplicableError(
            "no unknown of {0} can be isolated".format(to_dsl(eq)))
    # ties go to the unknown sorting last
    candidates.sort(key=lambda item: atom_key(item[1]), reverse=True)
    _, atom, value = min(candidates, key=lambda item: item[0])
    return atom, value


def _depends_only_on(value, unknown, state):
    allowed = set(unknown.args) if isinstance(unknown, AppliedUndef) \
        else set()
    variables = set(state.variables)
    if (value.free_symbols & variables) - allowed:
        return False
    for other in state.unknowns_of(value):
        if other == unknown:
            return False
        if isinstance(other, AppliedUndef) and not set(other.args) <= allowed:
            return False
    return True


def solve_null_derivative(eq, state):
    """``d^k f / dx_I = 0`` integrated to polynomials in the differentiation
    variables with arbitrary functions of the remaining arguments."""
    parts, rest = linear_parts(eq, state)
    if len(parts) != 1 or rest != 0:
        raise NotApplicableError("not a single derivative")
    atom = list(parts)[0]
    if not isinstance(atom, sympy.Derivative):
        raise NotApplicableError("not a derivative")
    unknown = atom.expr
    args = list(unknown.args)
    value = 0
    for var, count in atom.variable_count:
        others = [a for a in args if a != var]
        for power in range(int(count)):
            value += var ** power * state.fresh_function(others)
    return unknown, normalize(value)


def _linear_in(expr, symbols):
    for s in symbols:
        if sympy.diff(expr, s).has(*symbols):
            return False
    return True


def integrate_single_ode(eq, state, max_terms=None):
    """Integrate an equation holding derivatives of one unknown along a
    single variable. Other unknowns may occur when they do not depend on
    that variable; they enter the solution as source terms."""
    if max_terms is not None and _terms(eq) > max_terms:
        raise NotApplicableError("too many terms")
    parts, rest = linear_parts(eq, state)
    by_unknown = OrderedDict()
    for atom in parts:
        by_unknown.setdefault(unknown_of(atom), []).append(atom)
    for unknown in sorted(by_unknown, key=atom_key):
        if not isinstance(unknown, AppliedUndef):
            continue
        variables = set()
        for atom in by_unknown[unknown]:
            variables.update(v for v, _ in derivative_counts_items(atom))
        if len(variables) != 1:
            continue
        var = variables.pop()
        try:
            return unknown, _dsolve(eq, unknown, var, by_unknown, state)
        except NotApplicableError as e:
            logger.debug("cannot integrate %s for %s: %s",
                         to_dsl(eq), unknown, e)
    raise NotApplicableError("no single ODE in {0}".format(to_dsl(eq)))


def derivative_counts_items(atom):
    if not isinstance(atom, sympy.Derivative):
        return []
    return [(v, int(n)) for v, n in atom.variable_count]


def _dsolve(eq, unknown, var, by_unknown, state):
    args = list(unknown.args)
    variables = set(state.variables)
    mapping = {}
    for other, atoms in by_unknown.items():
        if other == unknown:
            continue
        other_vars = other.free_symbols & variables
        if var in other_vars or not other_vars <= set(args):
            raise NotApplicableError("{0} is not a source term".format(other))
        for atom in atoms:
            mapping[atom] = sympy.Dummy("k")
    X = sympy.Dummy("x")
    phi = sympy.Function("phi")
    for atom in by_unknown[unknown]:
        order = derivative_order(atom)
        mapping[atom] = phi(X).diff(X, order) if order else phi(X)
    frozen = eq.xreplace(mapping)
    outside = (frozen.free_symbols & variables) - set(args)
    if outside:
        raise NotApplicableError("coefficients depend on {0}".format(
            sorted(str(s) for s in outside)))
    # sympy's ODE machinery only sees plain symbols
    plain = dict((v, sympy.Dummy(str(v)))
                 for v in frozen.free_symbols & variables if v != var)
    plain[var] = X
    ode = frozen.xreplace(plain)
    orders = sorted(set(derivative_order(a) for a in by_unknown[unknown]))
    ys = [sympy.Dummy("y") for _ in orders]
    trial = ode.xreplace(dict(
        (phi(X).diff(X, o) if o else phi(X), y) for o, y in zip(orders, ys)))
    if not _linear_in(trial, ys):
        raise NotApplicableError("ODE is not linear")
    try:
        solution = sympy.dsolve(ode, phi(X))
    except (NotImplementedError, ValueError, TypeError) as e:
        raise NotApplicableError("dsolve failed: {0}".format(e))
    if isinstance(solution, (list, tuple)) or solution.lhs != phi(X):
        raise NotApplicableError("no explicit solution")
    value = solution.rhs
    if value.has(phi) or value.has(sympy.Integral) or \
            value.has(sympy.Piecewise):
        raise NotApplicableError("solution is not in closed form")
    rest_args = [a for a in args if a != var]
    integration_constants = sorted(
        (s for s in value.free_symbols
         if _INTEGRATION_CONSTANT.match(s.name) and s not in eq.free_symbols),
        key=lambda s: int(s.name[1:]))
    replacements = dict((c, state.fresh_function(rest_args))
                        for c in integration_constants)
    back = dict((dummy, atom) for atom, dummy in mapping.items()
                if isinstance(dummy, sympy.Dummy))
    back.update((dummy, v) for v, dummy in plain.items())
    back.update(replacements)
    return normalize(value.xreplace(back))


def li_split(eq, state):
    """Coefficients of ``eq`` with respect to the variables that no unknown
    of the equation depends on."""
    args = set()
    for unknown in state.unknowns_of(eq):
        if isinstance(unknown, AppliedUndef):
            args.update(unknown.args)
    variables = [v for v in state.variables
                 if v in eq.free_symbols and v not in args]
    if not variables:
        raise NotApplicableError("no splitting variable")
    try:
        groups = collect_terms(clean_equation(eq), variables)
    except NonPolynomialError as e:
        raise NotApplicableError(str(e))
    if list(groups) == [sympy.Integer(1)]:
        raise NotApplicableError("nothing to split")
    return list(groups.values())


def separate_mixed_args(eq, state):
    """``a f(x,y) + b g(x,z) = 0`` becomes ``f = h(x)``, ``g = -a/b h(x)``.

    Returns the substitutions as a list of ``(unknown, value)`` pairs.
    """
    parts, rest = linear_parts(eq, state)
    if len(parts) != 2 or rest != 0:
        raise NotApplicableError("not an equation between two unknowns")
    (f, a), (g, b) = parts.items()
    if not (isinstance(f, AppliedUndef) and isinstance(g, AppliedUndef)):
        raise NotApplicableError("derivatives involved")
    if not (a.is_number and b.is_number) and \
            (a.free_symbols | b.free_symbols) & set(state.variables):
        raise NotApplicableError("coefficients are not constant")
    if set(f.args) == set(g.args):
        raise NotApplicableError("identical argument lists")
    common = [v for v in f.args if v in set(g.args)]
    shared = state.fresh_function(common)
    return [(f, shared), (g, normalize(-a * shared / b))]


def involutive_reduce(eqs, state, max_terms=None, budget=None):
    """Complete ``eqs`` (restricted to at most ``max_terms`` terms when
    given) by cross-differentiation of solved-form leaders.

    Returns ``(equations, completed)``; when the reduction budget runs out
    the input comes back unchanged with ``completed`` False.
    """
    budget = budget or SolverParams.budget
    selected = [eq for eq in eqs
                if max_terms is None or _terms(eq) <= max_terms]
    untouched = [eq for eq in eqs if eq not in selected]
    completion = _Completion(state, budget)
    try:
        result = completion.run(selected)
    except BudgetExceededError as e:
        logger.warning("%s", e)
        return list(eqs), False
    return result + untouched, True


class _Completion(object):
    """Kolchin-Ritt style completion of a linear system under an orderly
    ranking of the derivatives of the unknowns."""

    def __init__(self, state, budget):
        self.state = state
        self.budget = budget
        self.steps = 0
        self.rules = OrderedDict()

    def rank(self, atom):
        return (derivative_order(atom),
                derivative_counts(atom, self.state.variables),
                _name(unknown_of(atom)))

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceededError(self.budget)

    def reducer(self, atom):
        for lead in self.rules:
            if unknown_of(lead) != unknown_of(atom):
                continue
            lead_counts = derivative_counts(lead, self.state.variables)
            counts = derivative_counts(atom, self.state.variables)
            if all(a >= b for a, b in zip(counts, lead_counts)):
                return lead
        return None

    def _raise(self, lead, atom, rhs):
        lead_counts = derivative_counts(lead, self.state.variables)
        counts = derivative_counts(atom, self.state.variables)
        variables = []
        for var, a, b in zip(self.state.variables, counts, lead_counts):
            variables.extend([var] * (a - b))
        if not variables:
            return rhs
        return sympy.diff(rhs, *variables)

    def reduce(self, eq, scale=True):
        """Reduce ``eq`` by the rules. ``scale`` treats ``eq`` as an equation
        whose denominators may be cleared; rule right-hand sides are reduced
        with ``scale`` off."""
        tidy = clean_equation if scale else normalize
        eq = tidy(eq)
        while True:
            parts, _ = linear_parts(eq, self.state)
            reducible = [a for a in parts if self.reducer(a) is not None]
            if not reducible:
                return eq
            atom = max(reducible, key=self.rank)
            lead = self.reducer(atom)
            self._tick()
            eq = tidy(substitute(
                eq, {atom: self._raise(lead, atom, self.rules[lead])}))

    def add(self, eq):
        """Insert ``eq`` into the rule set, re-inserting rules whose leader
        becomes reducible."""
        pending = [eq]
        while pending:
            eq = self.reduce(pending.pop(0))
            if eq == 0:
                continue
            parts, _ = linear_parts(eq, self.state)
            if not parts:
                logger.warning("inconsistent equation %s", to_dsl(eq))
                continue
            lead = max(parts, key=self.rank)
            coeff = parts[lead]
            self.rules[lead] = normalize(
                sympy.cancel(-(eq - coeff * lead) / coeff))
            for other in list(self.rules):
                if other == lead:
                    continue
                if self.reducer_excluding(other, other) is not None:
                    pending.append(normalize(other - self.rules.pop(other)))
            for other in list(self.rules):
                self.rules[other] = self._reduce_rhs(other)

    def reducer_excluding(self, atom, excluded):
        saved = self.rules.pop(excluded)
        try:
            return self.reducer(atom)
        finally:
            self.rules[excluded] = saved

    def _reduce_rhs(self, lead):
        rhs = self.rules.pop(lead)
        try:
            rhs = self.reduce(rhs, scale=False)
        finally:
            self.rules[lead] = rhs
        return rhs

    def run(self, eqs):
        for eq in sorted(eqs, key=lambda e: _selection_key(e, self.state)):
            self.add(eq)
        done = set()
        while True:
            pair = self._next_pair(done)
            if pair is None:
                break
            done.add(pair)
            first, second = pair
            lcm = _lcm(first, second, self.state.variables)
            condition = (self._raise(first, lcm, self.rules[first]) -
                         self._raise(second, lcm, self.rules[second]))
            condition = self.reduce(condition)
            if condition != 0:
                logger.debug("integrability condition %s", to_dsl(condition))
                self.add(condition)
        return [clean_equation(lead - rhs) for lead, rhs in
                sorted(self.rules.items(), key=lambda item: self.rank(item[0]))]

    def _next_pair(self, done):
        leads = sorted(self.rules, key=self.rank)
        for i, first in enumerate(leads):
            for second in leads[i + 1:]:
                if unknown_of(first) != unknown_of(second):
                    continue
                if not isinstance(unknown_of(first), AppliedUndef):
                    continue
                pair = (first, second)
                if pair not in done and (second, first) not in done:
                    return pair
        return None


def _lcm(first, second, variables):
    a = derivative_counts(first, variables)
    b = derivative_counts(second, variables)
    derivs = []
    for var, i, j in zip(variables, a, b):
        derivs.extend([var] * max(i, j))
    return sympy.Derivative(unknown_of(first), *derivs)


# The solver loop ----------------------------------------------------------


class LinearSolver(object):
    """Runs the staged heuristic on a :class:`SolutionState`."""

    max_steps = 2000

    def __init__(self, params=None):
        self.params = params or SolverParams()

    def solve(self, unknowns, eqs, variables, reserved=()):
        state = SolutionState(unknowns, eqs, variables, reserved)
        return self.run(state)

    def run(self, state):
        self.state = state
        seen = set([state.fingerprint()])
        step, executed = 1, 0
        pass_metric = state.metric()
        while state.remaining and executed < self.max_steps:
            executed += 1
            logger.debug("step %s: %s equations, metric %s", step,
                         len(state.remaining), state.metric())
            step = self._dispatch(step)
            if step is None:
                fingerprint = state.fingerprint()
                if not state.metric() < pass_metric or fingerprint in seen:
                    break
                seen.add(fingerprint)
                pass_metric = state.metric()
                step = 1
        if executed >= self.max_steps:
            logger.warning("solver stopped after %s steps", executed)
        state.finish()
        if state.remaining:
            logger.warning("system not completely solved, %s equations "
                           "remain", len(state.remaining))
        logger.info("solver finished: %s unknowns solved, %s constraints",
                    len(state.found), len(state.constraints))
        return state

    def _dispatch(self, step):
        p = self.params
        if step == 1:
            self.algebraic(2)
            return 2
        if step == 2:
            self.null_derivatives()
            return 3
        if step == 3:
            self.algebraic(None)
            return 4
        if step == 4:
            self.involutive(p.n1)
            return 5
        if step == 5:
            self.split()
            return 6
        if step == 6:
            return 10 if self.null_derivatives() else 7
        if step == 7:
            return 10 if self.involutive(None) else 8
        if step == 8:
            return 10 if self.odes() else 9
        if step == 9:
            return 1 if self.one_ode() else 10
        if step == 10:
            self.algebraic(2)
            return 11
        if step == 11:
            self.split()
            return 12
        if step == 12:
            self.algebraic(2)
            return 13
        if step == 13:
            self.null_derivatives()
            return 14
        if step == 14:
            self.odes()
            return 15
        if step == 15:
            return 10 if self.algebraic(None) else 16
        if step == 16:
            return 10 if self.involutive(None) else 17
        if step == 17:
            return 10 if self.separate() else 18
        if step == 18:
            self.odes()
            return None
        raise ValueError("unknown step {0}".format(step))

    def _progress(self, before):
        """A step succeeds only when it strictly lowers the metric."""
        return self.state.metric() < before

    def _apply_first(self, operation, eqs=None):
        for eq in _ordered(eqs if eqs is not None else
                           self.state.remaining, self.state):
            try:
                substitutions = operation(eq)
            except (NotApplicableError, NonPolynomialError):
                continue
            for unknown, value in substitutions:
                self.state.assign(unknown, value)
            return True
        return False

    def _repeat(self, operation):
        before = current = self.state.metric()
        while self.state.remaining and self._apply_first(operation):
            if not self.state.metric() < current:
                break
            current = self.state.metric()
        return self._progress(before)

    def algebraic(self, max_terms):
        state = self.state

        def operation(eq):
            if max_terms is not None and _terms(eq) > max_terms:
                raise NotApplicableError("too many terms")
            return [solve_algebraic(eq, state)]
        return self._repeat(operation)

    def null_derivatives(self):
        return self._repeat(
            lambda eq: [solve_null_derivative(eq, self.state)])

    def odes(self):
        limit = self.params.n2
        while limit <= self.params.n3:
            if self._repeat(lambda eq: [
                    integrate_single_ode(eq, self.state, limit)]):
                return True
            limit += 3
        return False

    def one_ode(self):
        before = self.state.metric()
        self._apply_first(lambda eq: [integrate_single_ode(eq, self.state)])
        return self._progress(before)

    def split(self):
        state = self.state
        before = state.metric()
        changed = False
        while True:
            for eq in _ordered(state.remaining, state):
                try:
                    pieces = li_split(eq, state)
                except NotApplicableError:
                    continue
                others = [e for e in state.remaining if e is not eq]
                state.set_equations(others + pieces)
                changed = True
                break
            else:
                break
        return changed and self._progress(before)

    def separate(self):
        before = self.state.metric()
        self._apply_first(lambda eq: separate_mixed_args(eq, self.state))
        return self._progress(before)

    def involutive(self, max_terms):
        state = self.state
        before = state.metric()
        eqs, completed = involutive_reduce(
            state.remaining, state, max_terms, self.params.budget)
        if not completed:
            state.budget_exceeded = True
            return False
        state.set_equations(eqs)
        return self._progress(before)


def solve_linear(system, params=None):
    """Solve a :class:`~symkit.prolong.DeterminingSystem`."""
    solver = LinearSolver(params)
    reserved = set(system.space.local_names())
    return solver.solve(system.unknowns, system.eqs, system.vars, reserved)


# Assembly -----------------------------------------------------------------


class GeneratorFamily(object):
    """Generator depending on arbitrary functions subject to
    ``constraints``."""

    def __init__(self, generator, functions, constraints):
        self.generator = generator
        self.functions = list(functions)
        self.constraints = list(constraints)

    def to_dict(self):
        return {
            "generator": self.generator.to_dsl(),
            "functions": [to_dsl(fn) for fn in self.functions],
            "constraints": [to_dsl(eq) for eq in self.constraints],
        }

    def __repr__(self):
        return "GeneratorFamily({0}, constraints={1})".format(
            self.generator, [to_dsl(eq) for eq in self.constraints])


def assemble_generators(state, ansatz):
    """Basis generators, one per arbitrary constant, and the generator
    families carried by arbitrary functions.

    Returns ``(generators, families)``.
    """
    values = [state.value(c) for c in ansatz.thetas + ansatz.etas]
    m = len(ansatz.thetas)
    generators = []
    zero_constants = dict((c, 0) for c in state.constants)
    for constant in state.constants:
        coefficients = [normalize(sympy.diff(v, constant)) for v in values]
        generator = ansatz.__class__(ansatz.space, coefficients[:m],
                                     coefficients[m:])
        if not generator.is_zero():
            generators.append(generator)
    families = []
    functions = [fn for fn in state.functions.values()
                 if any(v.has(fn) for v in values)]
    for fn in functions:
        others = dict((g, 0) for g in functions if g != fn)
        others.update(zero_constants)
        coefficients = [substitute(v, others) for v in values]
        generator = ansatz.__class__(ansatz.space, coefficients[:m],
                                     coefficients[m:])
        if generator.is_zero():
            continue
        constraints = [eq for eq in state.constraints + state.remaining
                       if eq.has(fn)]
        families.append(GeneratorFamily(generator, [fn], constraints))
    logger.info("assembled %s generators and %s families",
                len(generators), len(families))
    return generators, families
