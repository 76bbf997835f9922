"""Symbolic expression kernel.

Expressions are plain sympy trees. Independent variables and parameters are
``sympy.Symbol`` instances, jet coordinates (a dependent variable together
with a sorted derivative multi-index) are :class:`JetSymbol` instances,
unknown coefficient functions are sympy undefined-function applications and
their partial derivatives are ``sympy.Derivative`` nodes. All arithmetic is
exact: decimal literals are turned into rationals while parsing and no
floating point value is ever created.
"""
import ast
import logging
import re
from collections import OrderedDict

import sympy
from sympy.core.function import AppliedUndef, UndefinedFunction
from sympy.parsing.sympy_parser import (
    auto_number, convert_xor, parse_expr, rationalize)
from sympy.printing.str import StrPrinter

from .exceptions import (
    DSLSyntaxError, NonPolynomialError, UndeclaredSymbolError)


logger = logging.getLogger(__name__)


ELEMENTARY_FUNCTIONS = OrderedDict([
    ("exp", sympy.exp),
    ("ln", sympy.log),
    ("log", sympy.log),
    ("sin", sympy.sin),
    ("cos", sympy.cos),
    ("tan", sympy.tan),
    ("sinh", sympy.sinh),
    ("cosh", sympy.cosh),
    ("tanh", sympy.tanh),
    ("sqrt", sympy.sqrt),
])

ELEMENTARY_TAGS = {
    sympy.exp: "exp", sympy.log: "ln", sympy.sin: "sin", sympy.cos: "cos",
    sympy.tan: "tan", sympy.sinh: "sinh", sympy.cosh: "cosh",
    sympy.tanh: "tanh",
}

TRANSFORMATIONS = (auto_number, rationalize, convert_xor)

STATEMENT_KEYWORDS = ("indep", "dep", "param", "fn", "eq", "gen",
                      "lagrangian")

_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_DECLARATION = re.compile(
    r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^()]*)\))?\s*$")


class JetSymbol(sympy.Symbol):
    """Jet coordinate u_{jI}: dependent variable ``dep`` differentiated
    along the multi-index ``idx`` (empty for u_j itself).

    ``idx`` must already be sorted in the order of the independent
    variables; use :meth:`Space.jet` to build jets from unsorted indices.
    """

    def __new__(cls, dep, idx=()):
        idx = tuple(str(i) for i in idx)
        if idx:
            name = "{0}[{1}]".format(dep, ",".join(idx))
        else:
            name = dep
        obj = super(JetSymbol, cls).__new__(cls, name)
        obj.dep = dep
        obj.idx = idx
        return obj

    def __getnewargs_ex__(self):
        return (self.dep, self.idx), {}

    @property
    def order(self):
        return len(self.idx)

    def counts(self, indep_names):
        return tuple(self.idx.count(name) for name in indep_names)

    def divides(self, other):
        """True when ``other`` is this coordinate differentiated further."""
        if not isinstance(other, JetSymbol) or other.dep != self.dep:
            return False
        rest = list(other.idx)
        for name in self.idx:
            if name not in rest:
                return False
            rest.remove(name)
        return True

    def quotient(self, other):
        """Differentiation variables leading from ``self`` to ``other``."""
        rest = list(other.idx)
        for name in self.idx:
            rest.remove(name)
        return tuple(rest)


class Space(object):
    """Declared names of a problem: independent variables, dependent
    variables, parameters and unknown coefficient functions."""

    def __init__(self, indep, dep, params=(), functions=None):
        if not indep:
            raise ValueError("at least one independent variable is required")
        if not dep:
            raise ValueError("at least one dependent variable is required")
        self.indep_names = tuple(indep)
        self.dep_names = tuple(dep)
        self.indep = tuple(sympy.Symbol(name) for name in self.indep_names)
        self.dep = tuple(JetSymbol(name) for name in self.dep_names)
        self.params = tuple(sympy.Symbol(name) for name in params)
        self.functions = OrderedDict()
        for name, args in (functions or {}).items():
            self.add_function(name, args)
        self._check_unique()

    def _check_unique(self):
        names = (list(self.indep_names) + list(self.dep_names) +
                 [str(p) for p in self.params] + list(self.functions))
        seen = set()
        for name in names:
            if name in seen:
                raise ValueError("name {0} declared twice".format(name))
            seen.add(name)

    def add_function(self, name, args):
        args = tuple(str(a) for a in args)
        for arg in args:
            if arg not in self.indep_names and arg not in self.dep_names:
                raise UndeclaredSymbolError(arg)
        self.functions[name] = args

    @property
    def base(self):
        """Independent variables followed by the dependent variables."""
        return self.indep + self.dep

    def symbol(self, name):
        for sym in self.base + self.params:
            if str(sym) == name:
                return sym
        raise UndeclaredSymbolError(name)

    def jet(self, dep, idx=()):
        if dep not in self.dep_names:
            raise UndeclaredSymbolError(dep)
        for name in idx:
            if name not in self.indep_names:
                raise UndeclaredSymbolError(name)
        ordered = sorted(idx, key=self.indep_names.index)
        return JetSymbol(dep, ordered)

    def raise_jet(self, jet, var):
        return self.jet(jet.dep, jet.idx + (str(var),))

    def unknown(self, name):
        args = [self.symbol(a) for a in self.functions[name]]
        return sympy.Function(name)(*args)

    def unknowns(self):
        return [self.unknown(name) for name in self.functions]

    def rank_key(self, jet):
        """Orderly ranking: total order, then the differentiation counts
        compared lexicographically in declaration order of the independent
        variables, then the earlier dependent variable ranks higher."""
        return (jet.order, jet.counts(self.indep_names),
                -self.dep_names.index(jet.dep))

    def local_names(self):
        names = OrderedDict()
        for sym in self.indep + self.params:
            names[str(sym)] = sym
        for sym in self.dep:
            names[str(sym)] = sym
        for name in self.functions:
            names[name] = self.unknown(name)
        return names

    def __repr__(self):
        return "Space(indep={0}, dep={1}, params={2}, functions={3})".format(
            list(self.indep_names), list(self.dep_names),
            [str(p) for p in self.params], dict(self.functions))


class Document(object):
    """A parsed DSL file."""

    def __init__(self, space, equations=None, generators=None,
                 lagrangian=None):
        self.space = space
        self.equations = list(equations or [])
        self.generators = list(generators or [])
        self.lagrangian = lagrangian


def is_unknown(e, unknowns=None):
    if not isinstance(e, AppliedUndef):
        return False
    return unknowns is None or e.func.__name__ in unknowns


def unknown_atoms(e, unknowns=None):
    """Applied unknown functions occurring in ``e`` (derivatives included)."""
    return set(a for a in e.atoms(AppliedUndef) if is_unknown(a, unknowns))


def jets(e):
    return set(a for a in e.free_symbols if isinstance(a, JetSymbol))


def max_order(e):
    return max([j.order for j in jets(e)] or [0])


def atom_key(a):
    """Deterministic (kind, name, multi-index) ordering of atoms."""
    if isinstance(a, JetSymbol):
        return (1, a.dep, a.order, a.idx)
    if isinstance(a, sympy.Symbol):
        return (0, a.name, 0, ())
    if isinstance(a, sympy.Derivative):
        return (3, str(a.expr.func), len(a.variables),
                tuple(str(v) for v in a.variables))
    if isinstance(a, AppliedUndef):
        return (2, a.func.__name__, 0, tuple(str(v) for v in a.args))
    return (4, sympy.srepr(a), 0, ())


def normalize(e):
    """Canonical form: products expanded over sums, rational coefficients of
    equal monomials collected. Transcendental applications are kept as
    opaque atoms (no exp(a)exp(b) -> exp(a+b) rewriting requested)."""
    e = sympy.sympify(e)
    return sympy.expand(e, power_exp=False, power_base=False, log=False)


def pdiff(e, v):
    return normalize(sympy.diff(e, v))


def _evaluate_derivatives(e):
    return e.replace(lambda a: isinstance(a, sympy.Derivative),
                     lambda a: a.doit())


def substitute(e, rules):
    """Simultaneous substitution of atoms followed by normalization.

    Derivatives of a substituted unknown are evaluated on the replacement.
    Jet coordinates of a replaced dependent variable are left alone.
    """
    if not rules:
        return normalize(e)
    rules = dict((sympy.sympify(k), sympy.sympify(v))
                 for k, v in dict(rules).items())
    e = sympy.sympify(sympy.sympify(e).xreplace(rules))
    if e.has(sympy.Derivative):
        e = _evaluate_derivatives(e)
    return normalize(e)


def default_split_variables(e, unknowns=None, parameters=()):
    """Jet coordinates of positive order together with the base variables
    that are not an argument of any unknown function of ``e``."""
    args = set()
    for fn in unknown_atoms(e, unknowns):
        args.update(fn.args)
    parameters = set(parameters)
    split = set()
    for sym in e.free_symbols:
        if sym in parameters:
            continue
        if isinstance(sym, JetSymbol) and sym.order > 0:
            split.add(sym)
        elif sym not in args:
            split.add(sym)
    return split


def _check_monomial(mono, gens):
    for factor in sympy.Mul.make_args(mono):
        if isinstance(factor, tuple(ELEMENTARY_TAGS)):
            continue
        base, exp = factor.as_base_exp()
        if not (exp.is_Integer and exp > 0):
            raise NonPolynomialError(
                "{0} occurs with exponent {1}".format(base, exp))
        if base in gens:
            continue
        if isinstance(base, (AppliedUndef, sympy.Derivative)):
            raise NonPolynomialError(
                "unknown {0} depends on a splitting variable".format(base))
        if not isinstance(base, tuple(ELEMENTARY_TAGS)):
            raise NonPolynomialError(
                "{0} is not polynomial in {1}".format(
                    factor, sorted(gens, key=atom_key)))


def monomial_key(mono):
    factors = sorted(sympy.Mul.make_args(mono),
                     key=lambda f: atom_key(f.as_base_exp()[0]))
    degree = sum(int(f.as_base_exp()[1]) for f in factors
                 if f.as_base_exp()[1].is_Integer)
    if mono == 1:
        degree = 0
    return (degree, [(atom_key(f.as_base_exp()[0]), str(f.as_base_exp()[1]))
                     for f in factors])


def collect_terms(e, gens, strict=True):
    """Group the summands of ``e`` by their monomial in ``gens``.

    Returns an ordered mapping monomial -> coefficient. With ``strict`` the
    monomials must be polynomial in ``gens`` (transcendental applications
    count as opaque atoms); otherwise any power is accepted, which is what
    quasi-polynomial expressions with rational exponents need.
    """
    gens = set(gens)
    grouped = {}
    for term in sympy.Add.make_args(normalize(e)):
        if term == 0:
            continue
        if gens:
            coeff, mono = term.as_independent(*gens, as_Add=False)
        else:
            coeff, mono = term, sympy.Integer(1)
        if strict and mono != 1:
            _check_monomial(mono, gens)
        grouped[mono] = grouped.get(mono, 0) + coeff
    result = OrderedDict()
    for mono in sorted(grouped, key=monomial_key):
        coeff = normalize(grouped[mono])
        if coeff != 0:
            result[mono] = coeff
    return result


def split_coefficients(e, unknowns=None, variables=None, parameters=()):
    """Split ``e`` into (monomial, coefficient) pairs over the splitting
    variables, ordered graded-lexicographically.

    ``unknowns`` is a set of unknown function names (``None`` means every
    undefined function). ``variables`` overrides the default splitting set
    (see :func:`default_split_variables`).
    """
    e = normalize(e)
    if e == 0:
        return []
    if variables is None:
        variables = default_split_variables(e, unknowns, parameters)
    return list(collect_terms(e, variables).items())


# Parsing ------------------------------------------------------------------


def _line_col(text, offset):
    line = text.count("\n", 0, offset) + 1
    start = text.rfind("\n", 0, offset) + 1
    return line, offset - start + 1


def _relocate(error, text, offset):
    """Move an error raised on ``text[offset:]`` to its position in ``text``."""
    line, column = _line_col(text, offset)
    if error.line is None:
        return DSLSyntaxError(error.message, line, column)
    if error.line == 1:
        return DSLSyntaxError(error.message, line, column + error.column - 1)
    return DSLSyntaxError(error.message, line + error.line - 1, error.column)


def _check_syntax(text):
    """Python-level syntax check giving an exact error column."""
    try:
        ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as e:
        raise DSLSyntaxError(e.msg or "invalid syntax", e.lineno or 1,
                             e.offset or 1)


def _make_diff(space):
    def diff(target, *variables):
        if not variables:
            raise DSLSyntaxError("diff needs at least one variable")
        for var in variables:
            if var not in space.indep and var not in space.dep:
                raise DSLSyntaxError(
                    "cannot differentiate with respect to {0}".format(var))
        if isinstance(target, JetSymbol):
            if any(var in space.dep for var in variables):
                raise DSLSyntaxError(
                    "jet coordinates are differentiated by independent "
                    "variables only")
            return space.jet(target.dep,
                             target.idx + tuple(str(v) for v in variables))
        if isinstance(target, (AppliedUndef, sympy.Derivative)):
            return sympy.Derivative(target, *variables)
        if jets(sympy.sympify(target)):
            raise DSLSyntaxError(
                "diff of a compound expression in jet coordinates; write "
                "the derivatives out")
        return sympy.diff(target, *variables)
    return diff


def parse(text, space, extra_names=None):
    """Parse a single DSL expression (or ``lhs = rhs`` equation, returned as
    ``lhs - rhs``) into its canonical form."""
    if text.count("=") > 1:
        raise DSLSyntaxError("more than one '=' in equation")
    if "=" in text:
        lhs, rhs = text.split("=")
        left = parse(lhs, space, extra_names)
        try:
            right = parse(rhs, space, extra_names)
        except DSLSyntaxError as e:
            if e.line is None:
                raise
            raise _relocate(e, text, len(lhs) + 1)
        return normalize(left - right)
    if not text.strip():
        raise DSLSyntaxError("empty expression", 1, 1)
    lead = len(text) - len(text.lstrip())
    if lead:
        try:
            return parse(text[lead:], space, extra_names)
        except DSLSyntaxError as e:
            if e.line is None:
                raise
            raise _relocate(e, text, lead)
    _check_syntax(text)
    names = {}
    names.update(ELEMENTARY_FUNCTIONS)
    names.update(space.local_names())
    names["diff"] = _make_diff(space)
    names.update(extra_names or {})
    try:
        result = parse_expr(text, local_dict=names, global_dict={
            "Integer": sympy.Integer, "Rational": sympy.Rational,
            "Float": sympy.Float, "Symbol": sympy.Symbol,
        }, transformations=TRANSFORMATIONS)
    except NameError as e:
        match = re.search(r"name '(\w+)' is not defined", str(e))
        raise UndeclaredSymbolError(match.group(1) if match else str(e))
    except (SyntaxError, TypeError, sympy.SympifyError) as e:
        raise DSLSyntaxError(str(e))
    result = sympy.sympify(result)
    if isinstance(result, UndefinedFunction) or result.has(sympy.Float):
        raise DSLSyntaxError("could not parse {0!r}".format(text))
    return normalize(result)


def _split_statements(text):
    """Yield (statement, start offset) pairs with comments blanked out."""
    cleaned = re.sub(r"#[^\n]*", lambda m: " " * len(m.group(0)), text)
    start = 0
    for index, char in enumerate(cleaned):
        if char == ";":
            yield cleaned[start:index], start
            start = index + 1
    if cleaned[start:].strip():
        raise DSLSyntaxError("missing ';' after last statement",
                             *_line_col(text, len(text.rstrip())))


def _declared_names(body, text, offset):
    items = []
    for part in re.split(r",(?![^()]*\))", body):
        match = _DECLARATION.match(part)
        if not match:
            raise DSLSyntaxError(
                "malformed declaration {0!r}".format(part.strip()),
                *_line_col(text, offset))
        args = [a.strip() for a in (match.group(2) or "").split(",")
                if a.strip()]
        items.append((match.group(1), args))
    return items


def parse_document(text):
    """Parse a ``.deq`` document into a :class:`Document`."""
    indep, dep, params, functions = [], [], [], OrderedDict()
    bodies = []
    for statement, offset in _split_statements(text):
        stripped = statement.strip()
        if not stripped:
            continue
        lead = len(statement) - len(statement.lstrip())
        match = re.match(r"(\w+)\s*(.*)", stripped, re.S)
        keyword = match.group(1) if match else stripped
        if not match or keyword not in STATEMENT_KEYWORDS:
            raise DSLSyntaxError(
                "unknown statement {0!r}".format(keyword),
                *_line_col(text, offset + lead))
        body = match.group(2)
        position = offset + lead + match.start(2)
        if keyword == "indep":
            indep.extend(n for n, _ in _declared_names(body, text, position))
        elif keyword == "dep":
            for name, args in _declared_names(body, text, position):
                if args and list(args) != indep:
                    logger.debug("dependent variable %s declared with "
                                 "arguments %s", name, args)
                dep.append(name)
        elif keyword == "param":
            params.extend(n for n, _ in _declared_names(body, text, position))
        elif keyword == "fn":
            for name, args in _declared_names(body, text, position):
                functions[name] = args
        else:
            bodies.append((keyword, body, position))

    try:
        space = Space(indep, dep, params, functions)
    except ValueError as e:
        raise DSLSyntaxError(str(e))
    document = Document(space)
    for keyword, body, position in bodies:
        line, column = _line_col(text, position)
        if keyword == "gen":
            document.generators.append(body.strip())
            continue
        try:
            value = parse(body, space)
        except DSLSyntaxError as e:
            raise _relocate(e, text, position)
        except UndeclaredSymbolError as e:
            raise UndeclaredSymbolError(e.name, line)
        if keyword == "eq":
            document.equations.append(value)
        else:
            document.lagrangian = value
    logger.debug("parsed document with %s equations over %r",
                 len(document.equations), space)
    return document


# Printing -----------------------------------------------------------------


class DSLPrinter(StrPrinter):
    """Prints canonical trees back in the input language."""

    def __init__(self, bare_functions=(), settings=None):
        super(DSLPrinter, self).__init__(settings or {})
        self.bare_functions = set(bare_functions)

    def _print_JetSymbol(self, expr):
        if not expr.idx:
            return expr.dep
        return "diff({0},{1})".format(expr.dep, ",".join(expr.idx))

    def _print_Derivative(self, expr):
        variables = []
        for var, count in expr.variable_count:
            variables.extend([self._print(var)] * int(count))
        return "diff({0},{1})".format(self._print(expr.expr),
                                      ",".join(variables))

    def _print_Function(self, expr):
        if isinstance(expr, AppliedUndef):
            name = expr.func.__name__
            if name in self.bare_functions:
                return name
            return "{0}({1})".format(
                name, ",".join(self._print(a) for a in expr.args))
        if expr.func is sympy.log:
            return "ln({0})".format(self._print(expr.args[0]))
        return super(DSLPrinter, self)._print_Function(expr)

    def _print_log(self, expr):
        return "ln({0})".format(self._print(expr.args[0]))

    def _print_Pow(self, expr, rational=False):
        return super(DSLPrinter, self)._print_Pow(
            expr, rational).replace("**", "^")


def to_dsl(e, space=None):
    bare = space.functions if space is not None else ()
    return DSLPrinter(bare).doprint(sympy.sympify(e))


def to_json_tree(e, space=None):
    """Nested ``[tag, child, ...]`` arrays describing the canonical tree."""
    e = sympy.sympify(e)
    if isinstance(e, sympy.Rational):
        return ["RationalConstant", str(e)]
    if isinstance(e, JetSymbol):
        if not e.idx:
            return ["DepVar", e.dep]
        return ["JetCoord", e.dep, list(e.idx)]
    if isinstance(e, sympy.Symbol):
        if space is not None and e in space.params:
            return ["NamedParameter", e.name]
        return ["IndepVar", e.name]
    if isinstance(e, sympy.Derivative):
        variables = []
        for var, count in e.variable_count:
            variables.extend([str(var)] * int(count))
        return ["PartialDeriv", to_json_tree(e.expr, space), variables]
    if isinstance(e, AppliedUndef):
        return ["UnknownFn", e.func.__name__, [str(a) for a in e.args]]
    if isinstance(e, sympy.Add):
        children = sorted(e.args, key=sympy.default_sort_key)
        return ["Sum"] + [to_json_tree(a, space) for a in children]
    if isinstance(e, sympy.Mul):
        children = sorted(e.args, key=sympy.default_sort_key)
        return ["Product"] + [to_json_tree(a, space) for a in children]
    if isinstance(e, sympy.Pow):
        return ["Power", to_json_tree(e.base, space), str(e.exp)]
    if e.func in ELEMENTARY_TAGS:
        return ["ElemFn", ELEMENTARY_TAGS[e.func],
                to_json_tree(e.args[0], space)]
    if e is sympy.E:
        return ["ElemFn", "exp", ["RationalConstant", "1"]]
    raise NonPolynomialError("cannot serialize {0}".format(e))
