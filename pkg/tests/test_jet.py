import unittest

import sympy

from symkit import exceptions
from symkit.expr import Space, parse
from symkit.jet import (
    DESystem, leading_jet, orthonomic, reduce_modulo, total_derivative)

from . import utils


class TotalDerivativeTestCase(unittest.TestCase):
    def setUp(self):
        self.space = Space(["x", "t"], ["u"])

    def jet(self, *idx):
        return self.space.jet("u", idx)

    def test_product_rule_on_jets(self):
        u, u_x, u_xx = self.jet(), self.jet("x"), self.jet("x", "x")
        self.assertEqual(total_derivative(u * u_x, "x", self.space),
                         u_x ** 2 + u * u_xx)

    def test_explicit_dependence(self):
        x = self.space.indep[0]
        self.assertEqual(total_derivative(x ** 2 * self.jet(), "x",
                                          self.space),
                         2 * x * self.jet() + x ** 2 * self.jet("x"))

    def test_order_bound(self):
        with self.assertRaises(exceptions.InsufficientOrderError):
            total_derivative(self.jet("x"), "x", self.space, max_order=1)

    def test_dependent_variable_is_not_a_direction(self):
        with self.assertRaises(ValueError):
            total_derivative(self.jet(), "u", self.space)

    def test_total_derivatives_commute(self):
        x = self.space.indep[0]
        e = self.jet() * self.jet("x") + x * self.jet("t") ** 2
        xt = total_derivative(total_derivative(e, "x", self.space), "t",
                              self.space)
        tx = total_derivative(total_derivative(e, "t", self.space), "x",
                              self.space)
        self.assertEqual(sympy.expand(xt - tx), 0)


class OrthonomicTestCase(unittest.TestCase):
    def test_heat_leader(self):
        doc = utils.load_corpus_document("heat.deq")
        form = orthonomic(DESystem(doc.space, doc.equations))
        u_xx = doc.space.jet("u", ("x", "x"))
        self.assertEqual(form.leaders, [u_xx])
        self.assertEqual(form.rules[u_xx], doc.space.jet("u", ("t",)))

    def test_reduction_uses_differential_consequences(self):
        doc = utils.load_corpus_document("heat.deq")
        space = doc.space
        form = orthonomic(DESystem(space, doc.equations))
        self.assertEqual(
            reduce_modulo(space.jet("u", ("x", "x", "x")), form),
            space.jet("u", ("x", "t")))
        self.assertEqual(
            reduce_modulo(space.jet("u", ("x", "x", "x", "x")), form),
            space.jet("u", ("t", "t")))

    def test_reduction_is_idempotent(self):
        doc = utils.load_corpus_document("heat.deq")
        space = doc.space
        form = orthonomic(DESystem(space, doc.equations))
        e = (space.jet("u", ("x", "x", "x", "x")) * space.dep[0]
             + space.jet("u", ("x", "x", "t")))
        once = reduce_modulo(e, form)
        self.assertEqual(reduce_modulo(once, form), once)

    def test_burgers_pair(self):
        doc = utils.load_corpus_document("burgers.deq")
        space = doc.space
        form = orthonomic(DESystem(space, doc.equations))
        u, v = space.dep
        u_x, v_x = space.jet("u", ("x",)), space.jet("v", ("x",))
        self.assertEqual(set(form.leaders), set([u_x, v_x]))
        self.assertEqual(form.rules[u_x], v)
        self.assertEqual(form.rules[v_x], space.jet("u", ("t",)) + u * v)

    def test_leaders_are_reduced_in_the_other_equations(self):
        space = Space(["x", "t"], ["u"])
        system = DESystem(space, [
            parse("diff(u,x) - u", space),
            parse("diff(u,x,x) - diff(u,t)", space)])
        form = orthonomic(system)
        u_x = space.jet("u", ("x",))
        self.assertEqual(form.rules[u_x], space.dep[0])
        self.assertEqual(reduce_modulo(space.jet("u", ("t",)), form),
                         space.dep[0])

    def test_nonlinear_leader(self):
        space = Space(["x"], ["u"])
        system = DESystem(space, [parse("diff(u,x)^2 - u", space)])
        with self.assertRaises(exceptions.NotOrthonomicError):
            orthonomic(system)

    def test_leading_jet_follows_declaration_order(self):
        space = Space(["t", "x"], ["u"])
        e = parse("diff(u,t) + diff(u,x)", space)
        self.assertEqual(leading_jet(e, space), space.jet("u", ("t",)))
        space = Space(["x", "t"], ["u"])
        e = parse("diff(u,t) + diff(u,x)", space)
        self.assertEqual(leading_jet(e, space), space.jet("u", ("x",)))

    def test_empty_system(self):
        with self.assertRaises(ValueError):
            DESystem(Space(["x"], ["u"]), [])

    def test_zero_order_equation(self):
        space = Space(["x"], ["u"])
        form = orthonomic(DESystem(space, [2 * space.dep[0]]))
        self.assertEqual(form.rules[space.dep[0]], sympy.Integer(0))
