import io
import json
import unittest

import sympy

from symkit import exceptions
from symkit.prolong import Generator
from symkit.qp import (
    FirstIntegral, QPSystem, SemiInvariant, darboux,
    flow_decomposition_integrals, is_first_integral, log_integrals,
    qp_first_integrals, qp_symmetries, to_lv)

from . import utils


def load_system(name):
    with io.open(utils.corpus_path("qp", name), encoding="utf-8") as fd:
        return QPSystem.from_json(fd.read())


class QPSystemTestCase(unittest.TestCase):
    def test_matrices_from_right_hand_sides(self):
        system = load_system("predator_prey.json")
        x, y = system.vars
        self.assertEqual(system.A, sympy.Matrix([[2, -1, 0], [-1, 0, 1]]))
        self.assertEqual(system.B, sympy.Matrix([[0, 0], [0, 1], [1, 0]]))
        self.assertEqual(system.constant_index, 0)
        self.assertEqual(system.rhs(), [2 * x - x * y, x * y - y])

    def test_matrices_from_dict(self):
        system = load_system("predator_prey_symbolic.json")
        a, b, c, d = system.params
        x, y = system.vars
        self.assertEqual(system.rhs(), [a * x - b * x * y, d * x * y - c * y])

    def test_to_dict(self):
        payload = load_system("exchange.json").to_dict()
        self.assertEqual(payload["A"], [["0", "1"], ["-1", "0"]])
        self.assertEqual(payload["vars"], ["y1", "y2"])

    def test_shape_mismatch(self):
        with self.assertRaises(ValueError):
            QPSystem([[1, 2]], [[1, 0]], ["x"])

    def test_floats_are_rejected(self):
        with self.assertRaises(exceptions.DSLSyntaxError):
            QPSystem.from_dict({"vars": ["x"], "A": [[0.5]], "B": [[1]]})

    def test_time_dependence_is_rejected(self):
        with self.assertRaises(exceptions.DSLSyntaxError):
            QPSystem.from_rhs(["x"], ["t*x"])

    def test_missing_matrices(self):
        with self.assertRaises(KeyError):
            QPSystem.from_json(json.dumps({"vars": ["x"], "A": [[1]]}))


class LVFormTestCase(unittest.TestCase):
    def test_predator_prey(self):
        lv = to_lv(load_system("predator_prey.json"))
        self.assertEqual(lv.M, sympy.Matrix([[0, 0, 0], [-1, 0, 1],
                                             [2, -1, 0]]))
        self.assertEqual(lv.constant_index, 0)
        self.assertEqual(lv.active, [1, 2])
        self.assertIsNotNone(lv.inverse)

    def test_padding_with_coordinate_monomial(self):
        system = load_system("decay.json")
        lv = to_lv(system)
        self.assertEqual(lv.M, sympy.Matrix([[0, 0], [2, 0]]))
        self.assertEqual(lv.monomials, [1, system.vars[0]])
        y1, y2 = lv.symbols
        self.assertEqual(lv.flow_components(), [0, 2 * y1 * y2])

    def test_back_substitution(self):
        system = load_system("predator_prey.json")
        lv = to_lv(system)
        x, y = system.vars
        self.assertEqual(lv.x_in_y(), [lv.symbols[2], lv.symbols[1]])
        y1, y2, y3 = lv.symbols
        self.assertEqual(lv.to_x(y2 * y3), x * y)

    def test_singular_without_completion(self):
        lv = to_lv(load_system("predator_prey.json"), complete=False)
        self.assertIsNone(lv.inverse)
        with self.assertRaises(exceptions.SingularExponentMatrixError):
            lv.x_in_y()
        self.assertFalse(lv.to_dict()["invertible"])


class DarbouxTestCase(unittest.TestCase):
    def test_predator_prey_coordinates(self):
        system = load_system("predator_prey.json")
        x, y = system.vars
        found = darboux(to_lv(system), 1)
        cofactors = dict((si.in_x(), si.cofactor_in_x()) for si in found)
        self.assertEqual(cofactors, {x: 2 - y, y: x - 1})
        for si in found:
            self.assertEqual(si.residual(), 0)

    def test_exchange(self):
        system = load_system("exchange.json")
        y1, y2 = system.vars
        found = darboux(to_lv(system), 1)
        cofactors = dict((si.in_x(), si.cofactor_in_x()) for si in found)
        self.assertEqual(cofactors, {y1: y2, y2: -y1, y1 + y2: 0})

    def test_exchange_up_to_degree_two(self):
        system = load_system("exchange.json")
        y1, y2 = system.vars
        found = darboux(to_lv(system), 2)
        self.assertIn(y1 + y2, [si.in_x() for si in found])
        for si in found:
            self.assertEqual(si.residual(), 0)

    def test_products_are_semi_invariants(self):
        lv = to_lv(load_system("exchange.json"))
        found = darboux(lv, 1)
        for a in found:
            for b in found:
                product = SemiInvariant(
                    lv, a.f * b.f,
                    [p + q for p, q in zip(a.lambdas, b.lambdas)])
                self.assertEqual(product.residual(), 0, (a, b))

    def test_homogeneous_components_are_semi_invariants(self):
        lv = to_lv(load_system("exchange.json"))
        s = sum(lv.symbols)
        whole = SemiInvariant(lv, s + s ** 2, [0] * lv.m)
        self.assertEqual(whole.residual(), 0)
        for part in (s, s ** 2):
            self.assertEqual(
                SemiInvariant(lv, part, [0] * lv.m).residual(), 0)

    def test_parameters_are_rejected(self):
        lv = to_lv(load_system("predator_prey_symbolic.json"))
        with self.assertRaises(exceptions.ParameterBearingError):
            darboux(lv, 1)

    def test_degree(self):
        with self.assertRaises(ValueError):
            darboux(to_lv(load_system("exchange.json")), 0)


class FirstIntegralTestCase(unittest.TestCase):
    def test_exchange_total(self):
        system = load_system("exchange.json")
        y1, y2 = system.vars
        integrals = qp_first_integrals(system, 1)
        self.assertEqual([(i.expression, i.kind) for i in integrals],
                         [(y1 + y2, "qp-ratio")])

    def test_decay_needs_time_weight(self):
        system = load_system("decay.json")
        x = system.vars[0]
        integrals = qp_first_integrals(system, 1)
        self.assertEqual(len(integrals), 1)
        self.assertEqual(integrals[0].kind, "exp-weighted")
        self.assertEqual(integrals[0].expression,
                         x * sympy.exp(-2 * system.time))

    def test_predator_prey_logarithmic(self):
        system = load_system("predator_prey.json")
        x, y = system.vars
        integrals = log_integrals(system, 1)
        self.assertEqual(len(integrals), 1)
        expected = x + y - sympy.log(x) - 2 * sympy.log(y)
        ratio = sympy.cancel(integrals[0].expression / expected)
        self.assertTrue(ratio.is_number)
        self.assertEqual(integrals[0].to_dict()["kind"], "log")

    def test_stationary_logarithms(self):
        system = QPSystem.from_rhs(["x"], ["0"])
        x = system.vars[0]
        integrals = log_integrals(system, 1)
        self.assertEqual([i.expression for i in integrals],
                         [x, sympy.log(x)])
        self.assertEqual(len(log_integrals(system, 1, mixed=True)), 3)

    def test_growth_has_no_logarithmic_integral(self):
        self.assertEqual(log_integrals(QPSystem.from_rhs(["x"], ["x"]), 1),
                         [])

    def test_is_first_integral(self):
        system = load_system("exchange.json")
        y1, y2 = system.vars
        self.assertTrue(is_first_integral(system, y1 + y2))
        self.assertFalse(is_first_integral(system, y1))

    def test_unknown_kind(self):
        with self.assertRaises(ValueError):
            FirstIntegral(sympy.Integer(1), "numeric")


class SymmetryTestCase(unittest.TestCase):
    def setUp(self):
        self.system = QPSystem.from_rhs(["y"], ["y^2"])

    def test_eigen_field_with_prefactor(self):
        found = qp_symmetries(self.system, 1)
        self.assertEqual(len(found), 1)
        symmetry = found[0]
        y1 = symmetry.lv.symbols[0]
        self.assertEqual(symmetry.eigenvalue, -y1)
        self.assertEqual(symmetry.generator.etas, [y1 ** 2])
        self.assertEqual(symmetry.in_x().to_dsl(), "y^2*D[y]")
        self.assertEqual(symmetry.to_dict()["generator_x"], "y^2*D[y]")

    def test_commuting_field(self):
        found = qp_symmetries(self.system, 2)
        self.assertEqual(set(s.eigenvalue for s in found),
                         set([-found[0].lv.symbols[0], 0]))


class FlowDecompositionTestCase(unittest.TestCase):
    def setUp(self):
        self.system = load_system("exchange.json")
        self.space = self.system.space
        self.y1, self.y2 = self.system.vars

    def test_conserved_coefficient(self):
        y1, y2 = self.y1, self.y2
        g = Generator(self.space, [0], [y1 * y2 / (y1 + y2),
                                        -y1 * y2 / (y1 + y2)])
        integrals = flow_decomposition_integrals([g], self.system.flow())
        self.assertEqual([i.expression for i in integrals], [y1 + y2])
        self.assertEqual(integrals[0].kind, "decomposition")

    def test_constant_coefficient(self):
        g = Generator(self.space, [0], [1, 0])
        flow = Generator(self.space, [0], [3, 0])
        integrals = flow_decomposition_integrals([g], flow)
        self.assertEqual([i.expression for i in integrals], [3])

    def test_not_a_combination(self):
        g = Generator(self.space, [0], [1, 0])
        flow = Generator(self.space, [0], [0, 1])
        with self.assertRaises(exceptions.NoDecompositionError):
            flow_decomposition_integrals([g], flow)

    def test_no_generators(self):
        with self.assertRaises(exceptions.NoDecompositionError):
            flow_decomposition_integrals([], self.system.flow())
