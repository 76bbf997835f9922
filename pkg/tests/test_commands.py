import argparse
import inspect
import unittest

import mock
import six

from symkit import exceptions
from symkit.cli import Runner, RunnerMetaClass
from symkit.commands import Command

from . import utils


class TestRunner(six.with_metaclass(RunnerMetaClass)):
    lie_command = Command("lie", "{input}", ("format",))
    qp_command = Command("qp", "{action} {input}", ("degree",),
                         choices={"action": ("lv", "darboux")})
    bench_command = Command("bench", "{corpus}", method_name="run_all")


class CommandTestCase(unittest.TestCase):
    def test_required_args(self):
        command = Command("qp", "{action} {input}")
        self.assertEqual(command.required_args, ["action", "input"])

    def test_command_without_arguments(self):
        with self.assertRaises(ValueError):
            Command("lie", "input")

    def test_unknown_option(self):
        with self.assertRaises(ValueError):
            Command("lie", "{input}", ("speed",))

    def test_get_job(self):
        command = Command("lie", "{input}", ("budget", "format"))
        job = command.get_job(input=utils.corpus_path("heat.deq"),
                              budget=40, format="json")
        self.assertEqual(job.command, "lie")
        self.assertEqual(job.params.budget, 40)
        self.assertEqual(job.format, "json")

    def test_unset_options_keep_defaults(self):
        command = Command("lie", "{input}", ("n1", "budget"))
        job = command.get_job(input=utils.corpus_path("heat.deq"),
                              n1=None, budget=None)
        self.assertEqual(job.params.n1, 5)

    def test_missing_argument(self):
        command = Command("lie", "{input}")
        with self.assertRaises(ValueError):
            command.get_job()

    def test_option_of_another_command(self):
        command = Command("lie", "{input}", ("format",))
        with self.assertRaises(ValueError):
            command.get_job(input=utils.corpus_path("heat.deq"), degree=2)

    def test_generators_use_their_destination(self):
        command = Command("check", "{input}", ("gen",))
        job = command.get_job(input=utils.corpus_path("heat.deq"),
                              generators=["D[x]"])
        self.assertEqual(job.generators, ["D[x]"])

    def test_parser(self):
        parser = argparse.ArgumentParser()
        subparsers = parser.add_subparsers()
        TestRunner.qp_command.add_to_parser(subparsers)
        args = parser.parse_args(["qp", "lv", "file.json", "--degree", "2"])
        self.assertEqual(args.action, "lv")
        self.assertEqual(args.degree, 2)
        self.assertEqual(args.method_name, "qp")
        with self.assertRaises(SystemExit):
            parser.parse_args(["qp", "nothing", "file.json"])

    def test_solver_limits_are_described(self):
        subparsers = argparse.ArgumentParser().add_subparsers()
        parser = Command("lie", "{input}", ("n1", "n2")).add_to_parser(
            subparsers)
        helps = dict((action.dest, action.help) for action in parser._actions)
        self.assertIn("involutive", helps["n1"])
        self.assertIn("ODE", helps["n2"])


class MetaclassMethodCreationTestCase(unittest.TestCase):
    def setUp(self):
        self.runner = TestRunner()

    def test_single_argument(self):
        spec = inspect.getfullargspec(self.runner.lie)
        self.assertEqual(spec.args, ["self", "input"])
        self.assertEqual(spec.varkw, "options")

    def test_positional_arguments_in_usage_order(self):
        spec = inspect.getfullargspec(self.runner.qp)
        self.assertEqual(spec.args, ["self", "action", "input"])

    def test_custom_method_name(self):
        self.assertTrue(hasattr(self.runner, "run_all"))
        self.assertFalse(hasattr(self.runner, "bench"))

    def test_commands_are_registered(self):
        self.assertEqual(list(TestRunner._commands),
                         ["lie", "qp", "bench"])

    def test_generated_method_builds_job(self):
        path = utils.corpus_path("heat.deq")
        with mock.patch.object(TestRunner, "_execute_job",
                               create=True) as execute:
            self.runner.lie(path, format="json")
        job = execute.call_args[0][0]
        self.assertEqual(job.command, "lie")
        self.assertEqual(job.path, path)
        self.assertEqual(job.format, "json")


class RunnerMethodsTestCase(unittest.TestCase):
    def test_all_commands_have_methods(self):
        runner = Runner()
        for name in ("lie", "detsys", "check", "algebra", "qp", "noether",
                     "bench"):
            self.assertTrue(callable(getattr(runner, name)))

    def test_qp_signature(self):
        spec = inspect.getfullargspec(Runner.qp)
        self.assertEqual(spec.args, ["self", "action", "input"])

    def test_invalid_job(self):
        with self.assertRaises(exceptions.InvalidJobError):
            Runner().lie(utils.corpus_path("missing.deq"))
