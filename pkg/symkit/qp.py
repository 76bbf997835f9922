"""Quasi-polynomial ODE systems.

A quasi-polynomial system x_i' = x_i sum_j A_ij prod_k x_k^B_jk is embedded
by the quasi-monomial transformation y_j = prod_k x_k^B_jk into the
Lotka-Volterra form y_i' = y_i sum_j M_ij y_j with M = B A. On that form
the module searches Darboux polynomials (semi-invariants), first
integrals built from them, logarithmic first integrals and polynomial
semi-invariant vector fields.
"""
import json
import logging
from collections import OrderedDict

import sympy
from sympy.polys.monomials import itermonomials
from sympy.polys.orderings import monomial_key as polys_monomial_key

from .exceptions import (
    DSLSyntaxError, NoDecompositionError, ParameterBearingError,
    SingularExponentMatrixError)
from .expr import Space, collect_terms, normalize, parse, to_dsl
from .liealg import commutator
from .prolong import Generator


logger = logging.getLogger(__name__)

TIME = "t"


def _rational_matrix(rows, names):
    def convert(entry):
        if isinstance(entry, float):
            raise DSLSyntaxError(
                "matrix entry {0!r} must be exact, write it as a "
                "string".format(entry))
        value = sympy.sympify(entry, locals=names, rational=True)
        if value.free_symbols - set(names.values()):
            raise DSLSyntaxError("undeclared symbol in {0!r}".format(entry))
        return value
    return sympy.Matrix([[convert(e) for e in row] for row in rows])


class QPSystem(object):
    """Quasi-polynomial system given by its coefficient matrix ``A``
    (n x m) and exponent matrix ``B`` (m x n)."""

    def __init__(self, A, B, vars, params=()):
        A = sympy.Matrix(A)
        B = sympy.Matrix(B)
        self.space = Space([TIME], vars, params)
        self.n = len(self.space.dep)
        if A.rows != self.n or B.cols != self.n or A.cols != B.rows:
            raise ValueError(
                "A must be {0} x m and B m x {0}, got {1} and {2}".format(
                    self.n, A.shape, B.shape))
        self.A = A
        self.B = B
        self.m = A.cols

    @property
    def vars(self):
        return list(self.space.dep)

    @property
    def params(self):
        return list(self.space.params)

    @property
    def time(self):
        return self.space.indep[0]

    def monomial(self, j, B=None):
        B = self.B if B is None else B
        result = sympy.Integer(1)
        for k, x in enumerate(self.vars):
            result *= x ** B[j, k]
        return result

    @property
    def monomials(self):
        return [self.monomial(j) for j in range(self.m)]

    @property
    def constant_index(self):
        for j in range(self.m):
            if all(self.B[j, k] == 0 for k in range(self.n)):
                return j
        return None

    def rhs(self):
        """Right-hand sides x_i' of the system."""
        q = self.monomials
        return [normalize(x * sum(self.A[i, j] * q[j] for j in range(self.m)))
                for i, x in enumerate(self.vars)]

    def flow(self):
        return Generator(self.space, [0], self.rhs())

    def time_derivative(self, e):
        """Total time derivative of ``e`` along the flow."""
        result = sympy.diff(e, self.time)
        for x, dx in zip(self.vars, self.rhs()):
            result += dx * sympy.diff(e, x)
        return result

    @classmethod
    def from_rhs(cls, vars, rhs, params=()):
        """Read off ``A`` and ``B`` from the right-hand sides."""
        space = Space([TIME], vars, params)
        xs = list(space.dep)
        exponents = []
        rows = []
        for x, text in zip(xs, rhs):
            e = parse(text, space) if not isinstance(text, sympy.Basic) \
                else sympy.sympify(text)
            if e.has(space.indep[0]):
                raise DSLSyntaxError("{0}' depends on time".format(x))
            quotient = normalize(sympy.expand(e / x))
            row = OrderedDict()
            for term in sympy.Add.make_args(quotient):
                if term == 0:
                    continue
                coeff, mono = term.as_independent(*xs, as_Add=False)
                powers = mono.as_powers_dict()
                vector = tuple(sympy.nsimplify(powers.get(y, 0), rational=True)
                               for y in xs)
                if any(not v.is_Rational for v in vector):
                    raise DSLSyntaxError(
                        "{0} is not a quasi-monomial".format(mono))
                if vector not in exponents:
                    exponents.append(vector)
                row[vector] = row.get(vector, 0) + coeff
            rows.append(row)
        if not exponents:
            exponents.append(tuple(sympy.Integer(0) for _ in xs))
        A = [[row.get(v, 0) for v in exponents] for row in rows]
        B = [list(v) for v in exponents]
        return cls(A, B, vars, params)

    @classmethod
    def from_dict(cls, data):
        vars = list(data["vars"])
        params = list(data.get("params", []))
        if "rhs" in data:
            return cls.from_rhs(vars, data["rhs"], params)
        names = dict((name, sympy.Symbol(name)) for name in params)
        A = _rational_matrix(data["A"], names)
        B = _rational_matrix(data["B"], {})
        return cls(A, B, vars, params)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {
            "vars": [str(x) for x in self.vars],
            "params": [str(p) for p in self.params],
            "A": [[str(v) for v in self.A.row(i)] for i in range(self.n)],
            "B": [[str(v) for v in self.B.row(j)] for j in range(self.m)],
        }


def _complete_columns(B):
    """Append identity columns to ``B`` (m x r, rank r) until square and
    invertible."""
    m = B.rows
    completed = B
    for j in range(m):
        if completed.cols == m:
            break
        column = sympy.zeros(m, 1)
        column[j] = 1
        candidate = completed.row_join(column)
        if candidate.rank() == candidate.cols:
            completed = candidate
    return completed


class LVForm(object):
    """Lotka-Volterra form y_i' = y_i sum_j M_ij y_j of a QP system.

    ``monomials[j]`` expresses y_j in the original variables; when the
    exponent matrix had to be padded with coordinate monomials, the padded
    ones have zero rows in ``A``.
    """

    def __init__(self, system, A, B, B_tilde, inverse):
        self.system = system
        self.A = A
        self.B = B
        self.M = B * A
        self.B_tilde = B_tilde
        self.inverse = inverse
        self.m = self.M.rows
        self.space = Space([TIME], ["y{0}".format(j + 1)
                                    for j in range(self.m)],
                           [str(p) for p in system.params])
        self.monomials = [system.monomial(j, B) for j in range(self.m)]

    @property
    def symbols(self):
        return list(self.space.dep)

    @property
    def constant_index(self):
        for j in range(self.m):
            if all(self.B[j, k] == 0 for k in range(self.B.cols)):
                return j
        return None

    @property
    def active(self):
        return [j for j in range(self.m) if j != self.constant_index]

    def flow_components(self):
        ys = self.symbols
        return [normalize(ys[i] * sum(self.M[i, j] * ys[j]
                                      for j in range(self.m)))
                for i in range(self.m)]

    def flow(self):
        return Generator(self.space, [0], self.flow_components())

    def derivative(self, e):
        """Time derivative of a function of y along the LV flow."""
        return normalize(sum(dy * sympy.diff(e, y) for y, dy in
                             zip(self.symbols, self.flow_components())))

    def to_x(self, e):
        """Express a function of y in the original variables."""
        rules = dict(zip(self.symbols, self.monomials))
        return normalize(sympy.powsimp(sympy.sympify(e).xreplace(rules),
                                       force=True))

    def x_in_y(self):
        """The original variables as quasi-monomials in y."""
        if self.inverse is None:
            raise SingularExponentMatrixError(
                "exponent matrix is not invertible, y cannot be mapped back")
        ys = self.symbols
        result = []
        for k in range(self.system.n):
            value = sympy.Integer(1)
            for j, y in enumerate(ys):
                value *= y ** self.inverse[k, j]
            result.append(value)
        return result

    def field_to_x(self, components):
        """Push a vector field on y forward to the original variables."""
        xs = self.x_in_y()
        result = []
        for x_of_y in xs:
            value = sum(c * sympy.diff(x_of_y, y)
                        for c, y in zip(components, self.symbols))
            result.append(sympy.cancel(self.to_x(value)))
        return Generator(self.system.space, [0],
                         [normalize(v) for v in result])

    def to_dict(self):
        return {
            "M": [[str(v) for v in self.M.row(i)] for i in range(self.m)],
            "y": OrderedDict((str(y), to_dsl(q)) for y, q in
                             zip(self.symbols, self.monomials)),
            "B_tilde": None if self.B_tilde is None else
            [[str(v) for v in self.B_tilde.row(i)] for i in range(self.m)],
            "invertible": self.inverse is not None,
        }


def to_lv(system, complete=True):
    """Quasi-monomial transformation of ``system`` to Lotka-Volterra form.

    When ``B`` has rank below n the monomial set is padded with coordinate
    monomials x_k; with ``complete`` the exponent matrix is then extended
    by identity columns to a square invertible matrix.
    """
    A, B = system.A, system.B
    n = system.n
    if B.rank() < n:
        for k in range(n):
            if B.rank() == n:
                break
            row = sympy.zeros(1, n)
            row[k] = 1
            candidate = B.col_join(row)
            if candidate.rank() > B.rank():
                B = candidate
                A = A.row_join(sympy.zeros(n, 1))
                logger.debug("padded monomials with %s", system.vars[k])
    B_tilde, inverse = None, None
    if complete:
        B_tilde = _complete_columns(B)
    elif B.rows == B.cols:
        B_tilde = B
    if B_tilde is not None and B_tilde.rows == B_tilde.cols and \
            B_tilde.det() != 0:
        inverse = B_tilde.inv()
    else:
        logger.warning("exponent matrix is singular, only the forward map "
                       "is available")
    return LVForm(system, A, B, B_tilde, inverse)


# Darboux polynomials ------------------------------------------------------


class SemiInvariant(object):
    """Darboux polynomial ``f`` of the LV form with cofactor
    ``sum_j lambdas[j] y_j``; the component on the constant monomial is the
    constant part of the cofactor."""

    def __init__(self, lv, f, lambdas):
        self.lv = lv
        self.f = normalize(f)
        self.lambdas = [normalize(l) for l in lambdas]

    @property
    def cofactor(self):
        return normalize(sum(l * y for l, y in
                             zip(self.lambdas, self.lv.symbols)))

    @property
    def constant_part(self):
        index = self.lv.constant_index
        return self.lambdas[index] if index is not None else sympy.Integer(0)

    def residual(self):
        return normalize(self.lv.derivative(self.f) - self.cofactor * self.f)

    def in_x(self):
        return self.lv.to_x(self.f)

    def cofactor_in_x(self):
        return self.lv.to_x(self.cofactor)

    def to_dict(self):
        return {"f": to_dsl(self.in_x()),
                "lambda": to_dsl(self.cofactor_in_x()),
                "f_lv": to_dsl(self.f)}

    def __repr__(self):
        return "SemiInvariant({0}, lambda={1})".format(
            to_dsl(self.in_x()), to_dsl(self.cofactor_in_x()))


def _homogeneous_monomials(symbols, degree):
    monomials = [mono for mono in itermonomials(symbols, degree, degree)]
    return sorted(monomials, key=polys_monomial_key("grevlex",
                                                    list(reversed(symbols))),
                  reverse=True)


def _check_numeric(lv):
    if lv.M.free_symbols:
        raise ParameterBearingError(
            "M depends on {0}; the search needs numeric entries".format(
                sorted(str(s) for s in lv.M.free_symbols)))


def _solve_normalized(eqs, coefficients, extra):
    """Solutions of the bilinear system ``eqs`` in ``coefficients`` and
    ``extra`` with the first nonzero coefficient fixed to 1, one branch per
    position of that coefficient."""
    for i, lead in enumerate(coefficients):
        fixed = dict((c, 0) for c in coefficients[:i])
        fixed[lead] = 1
        system = [normalize(e.xreplace(fixed)) for e in eqs]
        system = [e for e in system if e != 0]
        if any(e.is_number for e in system):
            continue
        unknowns = list(coefficients[i + 1:]) + list(extra)
        if system:
            try:
                solutions = sympy.solve(system, unknowns, dict=True)
            except NotImplementedError as e:
                logger.warning("bilinear system not solved: %s", e)
                continue
        else:
            solutions = [{}]
        for solution in solutions:
            for instance in _instances(solution, unknowns):
                values = dict(fixed)
                values.update(instance)
                yield values


def _instances(solution, unknowns):
    """Particular solution and one basis member per free parameter."""
    values = dict((u, solution.get(u, u)) for u in unknowns)
    free = set()
    for value in values.values():
        free |= value.free_symbols & set(unknowns)
    free = sorted(free, key=str)
    if not free:
        yield values
        return
    choices = [dict((s, 0) for s in free)]
    for s in free:
        choice = dict((other, 0) for other in free)
        choice[s] = 1
        choices.append(choice)
    for choice in choices:
        yield dict((u, normalize(v.xreplace(choice)))
                   for u, v in values.items())


def _monic(e, symbols):
    e = normalize(e)
    poly = sympy.Poly(e, *symbols)
    if poly.is_zero:
        return e
    return normalize(e / poly.LC(order="grevlex"))


def _irreducible(f, lv):
    ys = lv.symbols
    _, factors = sympy.factor_list(f, *ys)
    if len(factors) != 1 or factors[0][1] != 1:
        return False
    active = [ys[j] for j in lv.active]
    return bool(f.free_symbols & set(active))


def darboux(lv, degree):
    """Irreducible semi-invariants of ``lv`` with homogeneous degree up to
    ``degree`` (the constant monomial homogenizes affine parts)."""
    if degree < 1:
        raise ValueError("degree must be at least 1")
    _check_numeric(lv)
    ys = lv.symbols
    lambdas = list(sympy.symbols("l0:{0}".format(lv.m)))
    results = []
    seen = set()
    for d in range(1, degree + 1):
        monomials = _homogeneous_monomials(ys, d)
        cs = list(sympy.symbols("c0:{0}".format(len(monomials))))
        f = sum(c * mono for c, mono in zip(cs, monomials))
        cofactor = sum(l * y for l, y in zip(lambdas, ys))
        condition = sympy.expand(lv.derivative(f) - cofactor * f)
        eqs = sympy.Poly(condition, *ys).coeffs() if condition != 0 else []
        for values in _solve_normalized(eqs, cs, lambdas):
            candidate = SemiInvariant(
                lv, normalize(f.xreplace(values)),
                [normalize(l.xreplace(values)) for l in lambdas])
            if candidate.f.free_symbols & (set(cs) | set(lambdas)) or \
                    any(l.free_symbols & set(lambdas)
                        for l in candidate.lambdas):
                continue
            if candidate.residual() != 0 or not _irreducible(candidate.f, lv):
                continue
            key = sympy.srepr(_monic(candidate.f, ys))
            if key in seen:
                continue
            seen.add(key)
            results.append(candidate)
    logger.info("found %s semi-invariants up to degree %s",
                len(results), degree)
    return results


# First integrals ----------------------------------------------------------


class FirstIntegral(object):
    KINDS = ("qp-ratio", "exp-weighted", "log", "decomposition")

    def __init__(self, expression, kind):
        if kind not in self.KINDS:
            raise ValueError("unknown first integral kind {0}".format(kind))
        self.expression = expression
        self.kind = kind

    def to_dict(self):
        return {"kind": self.kind, "I": to_dsl(self.expression)}

    def __repr__(self):
        return "FirstIntegral({0}, {1})".format(self.kind,
                                                to_dsl(self.expression))


def _vanishes(e):
    e = sympy.powsimp(sympy.expand(e), force=True)
    if normalize(e) == 0:
        return True
    return sympy.cancel(sympy.together(e)) == 0


def is_first_integral(system, I):
    return _vanishes(system.time_derivative(I))


def _exponent_solutions(lv, lambdas, include_particular=True):
    """Rational xi with (xi M)_k = -lambda_k on the non-constant columns,
    xi vanishing on the constant monomial."""
    active = lv.active
    xi = list(sympy.symbols("xi0:{0}".format(len(active))))
    eqs = []
    for k in active:
        eqs.append(sum(x * lv.M[j, k] for x, j in zip(xi, active)) +
                   lambdas[k])
    solutions = sympy.linsolve(eqs, xi)
    if not solutions:
        return [], []
    solution = list(solutions)[0]
    free = sorted(set().union(*[v.free_symbols for v in solution]) &
                  set(xi), key=str)
    zero = dict((s, 0) for s in free)
    particular = [normalize(v.xreplace(zero)) for v in solution]
    basis = []
    for s in free:
        choice = dict(zero)
        choice[s] = 1
        basis.append([normalize(v.xreplace(choice) - p)
                      for v, p in zip(solution, particular)])

    def full(vector):
        result = [sympy.Integer(0)] * lv.m
        for value, j in zip(vector, active):
            result[j] = value
        return result
    return ([full(particular)] if include_particular else [],
            [full(b) for b in basis])


def _prefactor(lv, xi, lambdas):
    ys = lv.symbols
    factor = sympy.Integer(1)
    for x, y in zip(xi, ys):
        factor *= y ** x
    rho = sympy.Integer(0)
    index = lv.constant_index
    if index is not None:
        rho = -normalize(sum(x * lv.M[j, index] for j, x in enumerate(xi)) +
                         lambdas[index])
    return factor, rho


def qp_first_integrals(system, degree, lv=None):
    lv = lv or to_lv(system)
    semi_invariants = darboux(lv, degree)
    t = system.time
    candidates = []
    for si in semi_invariants:
        if all(l == 0 for l in si.lambdas):
            candidates.append((si.f, "qp-ratio"))
    for i, first in enumerate(semi_invariants):
        for second in semi_invariants[i + 1:]:
            total = [normalize(a + b) for a, b in
                     zip(first.lambdas, second.lambdas)]
            difference = [normalize(a - b) for a, b in
                          zip(first.lambdas, second.lambdas)]
            if all(v == 0 for v in total):
                candidates.append((first.f * second.f, "qp-ratio"))
            if all(v == 0 for v in difference):
                candidates.append((first.f / second.f, "qp-ratio"))
    zero = [sympy.Integer(0)] * lv.m
    pairs = [(sympy.Integer(1), zero, False)] + \
        [(si.f, si.lambdas, True) for si in semi_invariants]
    for f, lambdas, particular in pairs:
        particulars, basis = _exponent_solutions(lv, lambdas)
        vectors = particulars if particular else basis
        for xi in vectors:
            factor, rho = _prefactor(lv, xi, lambdas)
            kind = "qp-ratio" if rho == 0 else "exp-weighted"
            candidates.append((factor * f * sympy.exp(rho * t), kind))
    results = []
    seen = set()
    for expression, kind in candidates:
        I = lv.to_x(expression)
        if not (I.free_symbols & (set(system.vars) | set([t]))):
            continue
        key = sympy.srepr(I)
        if key in seen:
            continue
        seen.add(key)
        if not is_first_integral(system, I):
            logger.warning("discarding %s, not conserved", to_dsl(I))
            continue
        results.append(FirstIntegral(I, kind))
    logger.info("found %s quasi-polynomial first integrals", len(results))
    return results


def log_integrals(system, degree, mixed=False):
    """First integrals P(x) + sum_k xi_k ln x_k, or with ``mixed`` a
    polynomial in x and the logarithms of degree at most one in each
    logarithm."""
    xs = system.vars
    logs = [sympy.Dummy("L{0}".format(k)) for k in range(system.n)]
    monomials = [m for m in _sorted_monomials(xs, degree) if m != 1]
    basis = []
    if mixed:
        log_products = [sympy.Integer(1)]
        for L in logs:
            log_products += [p * L for p in log_products]
        for mono in [sympy.Integer(1)] + monomials:
            for product in log_products:
                if mono == 1 and product == 1:
                    continue
                basis.append(mono * product)
    else:
        basis = monomials + logs
    coefficients = list(sympy.symbols("p0:{0}".format(len(basis))))
    ansatz = sum(c * b for c, b in zip(coefficients, basis))
    rates = [normalize(dx / x) for x, dx in zip(xs, system.rhs())]
    derivative = sum(dx * sympy.diff(ansatz, x)
                     for x, dx in zip(xs, system.rhs()))
    derivative += sum(rate * sympy.diff(ansatz, L)
                      for rate, L in zip(rates, logs))
    groups = collect_terms(sympy.expand(derivative), list(xs) + logs,
                           strict=False)
    solutions = sympy.linsolve(list(groups.values()), coefficients) \
        if groups else sympy.FiniteSet(tuple(coefficients))
    results = []
    if not solutions:
        return results
    solution = list(solutions)[0]
    free = sorted(set().union(*[v.free_symbols for v in solution]) &
                  set(coefficients), key=str)
    back = dict((L, sympy.log(x)) for L, x in zip(logs, xs))
    for s in free:
        choice = dict((other, 0) for other in free)
        choice[s] = 1
        I = normalize(sum(v.xreplace(choice) * b
                          for v, b in zip(solution, basis)).xreplace(back))
        if I == 0:
            continue
        if not is_first_integral(system, I):
            logger.warning("discarding %s, not conserved", to_dsl(I))
            continue
        results.append(FirstIntegral(I, "log"))
    logger.info("found %s logarithmic first integrals", len(results))
    return results


def _sorted_monomials(symbols, degree):
    return sorted(itermonomials(symbols, degree),
                  key=polys_monomial_key("grlex", list(reversed(symbols))))


# Symmetries ---------------------------------------------------------------


class QPSymmetry(object):
    """Semi-invariant vector field ``field`` with [F, field] = eigenvalue *
    field and, when the exponent equation is solvable, the commuting
    generator y^xi * field."""

    def __init__(self, lv, field, lambdas, xi=None, generator=None):
        self.lv = lv
        self.field = field
        self.lambdas = lambdas
        self.xi = xi
        self.generator = generator

    @property
    def eigenvalue(self):
        return normalize(sum(l * y for l, y in
                             zip(self.lambdas, self.lv.symbols)))

    def in_x(self):
        if self.generator is None:
            return None
        return self.lv.field_to_x(self.generator.etas)

    def to_dict(self):
        result = OrderedDict([
            ("field", self.field.to_dsl()),
            ("lambda", to_dsl(self.eigenvalue)),
            ("generator", None if self.generator is None else
             self.generator.to_dsl()),
        ])
        if self.generator is not None and self.lv.inverse is not None:
            result["generator_x"] = self.in_x().to_dsl()
        return result


def qp_symmetries(system, degree, lv=None):
    """Polynomial vector fields T on the LV form with [F, T] = lambda T."""
    lv = lv or to_lv(system)
    _check_numeric(lv)
    ys = lv.symbols
    flow = lv.flow()
    lambdas = list(sympy.symbols("l0:{0}".format(lv.m)))
    eigenvalue = sum(l * y for l, y in zip(lambdas, ys))
    results = []
    seen = set()
    for d in range(1, degree + 1):
        monomials = _homogeneous_monomials(ys, d)
        cs = []
        components = []
        for j in range(lv.m):
            if j not in lv.active:
                components.append(sympy.Integer(0))
                continue
            block = list(sympy.symbols("c{0}_0:{1}".format(j, len(monomials))))
            cs.extend(block)
            components.append(sum(c * mono for c, mono in
                                  zip(block, monomials)))
        field = Generator(lv.space, [0], components)
        bracket = commutator(flow, field)
        eqs = []
        for b, c in zip(bracket.etas, components):
            condition = sympy.expand(b - eigenvalue * c)
            if condition != 0:
                eqs.extend(sympy.Poly(condition, *ys).coeffs())
        for values in _solve_normalized(eqs, cs, lambdas):
            candidate = field.map(lambda c: normalize(c.xreplace(values)))
            found = [normalize(l.xreplace(values)) for l in lambdas]
            if candidate.free_symbols() & (set(cs) | set(lambdas)) or \
                    any(l.free_symbols & set(lambdas) for l in found):
                continue
            check = commutator(flow, candidate) - candidate.scale(
                sum(l * y for l, y in zip(found, ys)))
            if not check.is_zero():
                continue
            key = _field_key(candidate, lv)
            if key in seen:
                continue
            seen.add(key)
            results.append(_with_prefactor(lv, flow, candidate, found))
    logger.info("found %s semi-invariant vector fields", len(results))
    return results


def _field_key(field, lv):
    index = lv.constant_index
    rules = {} if index is None else {lv.symbols[index]: 1}
    components = [normalize(c.xreplace(rules)) for c in field.etas]
    for c in components:
        if c != 0:
            lead = sympy.Poly(c, *lv.symbols).LC(order="grevlex")
            components = [normalize(v / lead) for v in components]
            break
    return tuple(sympy.srepr(c) for c in components)


def _with_prefactor(lv, flow, field, lambdas):
    particulars, _ = _exponent_solutions(lv, lambdas)
    for xi in particulars:
        factor, rho = _prefactor(lv, xi, lambdas)
        if rho != 0:
            continue
        generator = field.map(lambda c: normalize(
            sympy.powsimp(factor * c, force=True)))
        bracket = commutator(flow, generator)
        if all(_vanishes(c) for c in bracket.etas):
            return QPSymmetry(lv, field, lambdas, xi, generator)
    return QPSymmetry(lv, field, lambdas)


def flow_decomposition_integrals(gens, flow):
    """Coefficients a_k of flow = sum_k a_k G_k that are conserved along
    the flow."""
    if not gens:
        raise NoDecompositionError("no generators to decompose into")
    columns = [g.thetas + g.etas for g in gens]
    matrix = sympy.Matrix(columns).T
    target = sympy.Matrix(flow.thetas + flow.etas)
    try:
        solution, params = matrix.gauss_jordan_solve(target)
    except ValueError:
        raise NoDecompositionError(
            "{0} is not a combination of the generators".format(flow))
    solution = solution.xreplace(dict((p, 0) for p in params))
    results = []
    for value in solution:
        value = sympy.cancel(value)
        if _vanishes(flow.apply(value)):
            results.append(FirstIntegral(value, "decomposition"))
    logger.info("flow decomposition gives %s conserved coefficients",
                len(results))
    return results
