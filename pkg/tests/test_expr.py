import unittest

import sympy
from hypothesis import given, settings, strategies as st

from symkit import exceptions
from symkit.expr import (
    Space, collect_terms, normalize, parse, parse_document, pdiff,
    split_coefficients, substitute, to_dsl, to_json_tree)


class ParseTestCase(unittest.TestCase):
    def setUp(self):
        self.space = Space(["x", "t"], ["u"], ["a"])
        self.u = self.space.dep[0]
        self.u_x = self.space.jet("u", ("x",))
        self.u_t = self.space.jet("u", ("t",))
        self.u_xx = self.space.jet("u", ("x", "x"))

    def test_jet_coordinates(self):
        e = parse("diff(u,x,x) - diff(u,t)", self.space)
        self.assertEqual(e, self.u_xx - self.u_t)

    def test_equation_is_lhs_minus_rhs(self):
        self.assertEqual(parse("diff(u,t) = diff(u,x,x)", self.space),
                         self.u_t - self.u_xx)

    def test_mixed_derivative_index_is_sorted(self):
        self.assertEqual(parse("diff(u,t,x)", self.space),
                         parse("diff(u,x,t)", self.space))

    def test_decimals_become_rationals(self):
        e = parse("0.5*u", self.space)
        self.assertEqual(e, sympy.Rational(1, 2) * self.u)
        self.assertFalse(e.has(sympy.Float))

    def test_caret_and_double_star_are_powers(self):
        self.assertEqual(parse("u^3", self.space), parse("u**3", self.space))

    def test_ln_and_log_agree(self):
        self.assertEqual(parse("ln(x)", self.space),
                         parse("log(x)", self.space))

    def test_parameters(self):
        e = parse("a*u", self.space)
        self.assertIn(sympy.Symbol("a"), e.free_symbols)

    def test_undeclared_symbol(self):
        with self.assertRaises(exceptions.UndeclaredSymbolError) as ctx:
            parse("u + w", self.space)
        self.assertEqual(ctx.exception.name, "w")

    def test_two_equals_signs(self):
        with self.assertRaises(exceptions.DSLSyntaxError):
            parse("u = x = t", self.space)

    def test_empty_expression(self):
        with self.assertRaises(exceptions.DSLSyntaxError):
            parse("  ", self.space)

    def test_compound_diff_is_rejected(self):
        with self.assertRaises(exceptions.DSLSyntaxError):
            parse("diff(u*u,x)", self.space)

    def test_leading_whitespace(self):
        self.assertEqual(parse(" u", self.space), self.u)
        self.assertEqual(parse("diff(u,t) = diff(u,x,x)", self.space),
                         parse("diff(u,t)=diff(u,x,x)", self.space))

    def test_error_column_counts_from_start_of_equation(self):
        with self.assertRaises(exceptions.DSLSyntaxError) as ctx:
            parse("u = (u +", self.space)
        self.assertEqual(ctx.exception.line, 1)
        self.assertGreaterEqual(ctx.exception.column, 5)


class ParseDocumentTestCase(unittest.TestCase):
    def test_declarations_and_equation(self):
        doc = parse_document(
            "# heat\nindep x, t;\ndep u;\nparam a;\n"
            "eq diff(u,t) = a*diff(u,x,x);\n")
        self.assertEqual(doc.space.indep_names, ("x", "t"))
        self.assertEqual(doc.space.dep_names, ("u",))
        self.assertEqual(len(doc.equations), 1)

    def test_function_declaration_gives_partial_derivatives(self):
        doc = parse_document("indep x, t; dep u; fn f(x,t); "
                             "eq diff(f,x) = 0;")
        self.assertIsInstance(doc.equations[0], sympy.Derivative)

    def test_generators_are_kept_as_text(self):
        doc = parse_document("indep x; dep u; eq diff(u,x) = 0; "
                             "gen u*D[u];")
        self.assertEqual(doc.generators, ["u*D[u]"])

    def test_spaced_equation(self):
        doc = parse_document("indep x, t; dep u(x,t); param a; "
                             "eq diff(u,t) = diff(u,x,x);")
        self.assertEqual(len(doc.equations), 1)

    def test_lagrangian(self):
        doc = parse_document("indep x; dep u; lagrangian diff(u,x)^2/2;")
        self.assertIsNotNone(doc.lagrangian)
        self.assertEqual(doc.equations, [])

    def test_syntax_error_position(self):
        text = "indep x;\ndep u;\neq diff(u,x) = (u +;\n"
        with self.assertRaises(exceptions.DSLSyntaxError) as ctx:
            parse_document(text)
        self.assertEqual(ctx.exception.line, 3)

    def test_unknown_statement(self):
        with self.assertRaises(exceptions.DSLSyntaxError) as ctx:
            parse_document("indep x;\nvar u;\n")
        self.assertEqual(ctx.exception.line, 2)

    def test_missing_semicolon(self):
        with self.assertRaises(exceptions.DSLSyntaxError):
            parse_document("indep x; dep u; eq diff(u,x) = 0")

    def test_undeclared_symbol_reports_line(self):
        with self.assertRaises(exceptions.UndeclaredSymbolError) as ctx:
            parse_document("indep x;\ndep u;\neq diff(u,x) = w;\n")
        self.assertEqual(ctx.exception.line, 3)


class PrintingTestCase(unittest.TestCase):
    def setUp(self):
        self.space = Space(["x", "t"], ["u"], ["a"])

    def test_dsl_round_trip(self):
        for text in ("u*diff(u,x)^2 + 3/2*x",
                     "a*diff(u,x,t) - exp(t)*u",
                     "ln(x)*diff(u,t,t)/7"):
            e = parse(text, self.space)
            self.assertEqual(parse(to_dsl(e), self.space), e)

    def test_json_tree_tags(self):
        self.assertEqual(to_json_tree(self.space.jet("u", ("x",))),
                         ["JetCoord", "u", ["x"]])
        self.assertEqual(to_json_tree(self.space.dep[0]), ["DepVar", "u"])
        self.assertEqual(to_json_tree(sympy.Symbol("a"), self.space),
                         ["NamedParameter", "a"])
        self.assertEqual(to_json_tree(sympy.Rational(3, 2)),
                         ["RationalConstant", "3/2"])


class CollectTermsTestCase(unittest.TestCase):
    def setUp(self):
        self.space = Space(["x"], ["u"])
        self.u_x = self.space.jet("u", ("x",))

    def test_groups_by_monomial(self):
        x = self.space.indep[0]
        groups = collect_terms(x * self.u_x ** 2 + 3 * self.u_x ** 2 + x,
                               [self.u_x])
        self.assertEqual(groups[self.u_x ** 2], x + 3)
        self.assertEqual(groups[sympy.Integer(1)], x)

    def test_negative_power_is_not_polynomial(self):
        with self.assertRaises(exceptions.NonPolynomialError):
            collect_terms(1 / self.u_x + 1, [self.u_x])

    def test_non_strict_accepts_rational_exponents(self):
        groups = collect_terms(self.u_x ** sympy.Rational(1, 2), [self.u_x],
                               strict=False)
        self.assertEqual(list(groups.values()), [1])


class SubstituteTestCase(unittest.TestCase):
    def test_derivatives_of_replaced_unknown_are_evaluated(self):
        x = sympy.Symbol("x")
        f = sympy.Function("f")(x)
        result = substitute(sympy.Derivative(f, x) + f, {f: x ** 2})
        self.assertEqual(result, x ** 2 + 2 * x)

    def test_unknown_replaced_by_zero(self):
        x = sympy.Symbol("x")
        f = sympy.Function("F1")(x)
        self.assertEqual(substitute(f, {f: 0}), 0)
        self.assertEqual(substitute(f + x, {f: 0}), x)


_SPACE = Space(["x"], ["u"])
_LEAVES = st.sampled_from([
    _SPACE.indep[0], _SPACE.dep[0], _SPACE.jet("u", ("x",)),
    sympy.Integer(-2), sympy.Integer(3), sympy.Rational(1, 2)])
_trees = st.recursive(
    _LEAVES,
    lambda children: st.one_of(
        st.tuples(children, children).map(lambda p: sympy.Add(*p)),
        st.tuples(children, children).map(lambda p: sympy.Mul(*p)),
        children.map(lambda c: sympy.Pow(c, 2))),
    max_leaves=8)


class NormalizeTestCase(unittest.TestCase):
    @settings(derandomize=True, max_examples=100, deadline=None)
    @given(_trees)
    def test_idempotent(self, e):
        once = normalize(e)
        self.assertEqual(normalize(once), once)

    def test_collects_equal_monomials(self):
        x = sympy.Symbol("x")
        self.assertEqual(normalize((x + 1) * (x - 1) + 1), x ** 2)

    def test_partial_derivative(self):
        space = Space(["x"], ["u"])
        x, u = space.indep[0], space.dep[0]
        self.assertEqual(pdiff(x * u ** 2 + x, u), 2 * x * u)

    @settings(derandomize=True, max_examples=50, deadline=None)
    @given(_trees, _trees)
    def test_product_rule(self, a, b):
        u = _SPACE.dep[0]
        self.assertEqual(pdiff(a * b, u),
                         normalize(pdiff(a, u) * b + a * pdiff(b, u)))


class SplitCoefficientsTestCase(unittest.TestCase):
    def setUp(self):
        self.space = Space(["x"], ["u"])
        self.x, self.u = self.space.indep[0], self.space.dep[0]
        self.u_x = self.space.jet("u", ("x",))

    def test_splits_on_jets(self):
        xi = sympy.Function("xi")(self.x, self.u)
        pairs = split_coefficients(xi * self.u_x ** 2 + self.x * self.u_x,
                                   unknowns={"xi"})
        self.assertEqual(dict(pairs), {self.u_x ** 2: xi,
                                       self.u_x: self.x})

    def test_zero(self):
        self.assertEqual(split_coefficients(self.u_x - self.u_x), [])

    def test_pairs_reassemble_the_expression(self):
        xi = sympy.Function("xi")(self.x, self.u)
        e = (xi * self.u_x ** 3 - 2 * self.x * self.u_x * xi
             + self.u_x * self.x ** 2 + xi)
        pairs = split_coefficients(e, unknowns={"xi"})
        self.assertEqual(normalize(sum(m * c for m, c in pairs)),
                         normalize(e))
