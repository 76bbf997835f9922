import argparse
import io
import json
import logging
import sys
import time
from collections import OrderedDict

import six

from .commands import SOLVER_OPTIONS, Command
from .exceptions import (
    BudgetExceededError, InvalidJobError, NoDecompositionError,
    NotApplicableError, NotClosedError, NotOrthonomicError,
    NotVariationalSymmetryError, SingularExponentMatrixError)
from .expr import parse_document, to_dsl, to_json_tree
from .jet import DESystem, orthonomic
from .jobs import BenchReport, BenchRow, JobSpec
from .liealg import (
    AlgebraBasis, commutation_table, derived_series, format_generator_list,
    structure_constants)
from .linsolve import assemble_generators, solve_linear
from .noether import Lagrangian, noether_solve
from .prolong import check_symmetry, determining_system, parse_generator
from .qp import (
    darboux, log_integrals, qp_first_integrals, qp_symmetries, to_lv)


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_ORTHONOMIC = 2
EXIT_INCOMPLETE = 3
EXIT_BUDGET_EXCEEDED = 4

# checked in order, first match wins
EXIT_CODES = (
    (NotOrthonomicError, EXIT_NOT_ORTHONOMIC),
    (BudgetExceededError, EXIT_BUDGET_EXCEEDED),
    (ValueError, EXIT_INPUT_ERROR),
    (NotClosedError, EXIT_INPUT_ERROR),
    (NoDecompositionError, EXIT_INPUT_ERROR),
    (NotApplicableError, EXIT_INPUT_ERROR),
    (NotVariationalSymmetryError, EXIT_INPUT_ERROR),
    (SingularExponentMatrixError, EXIT_INPUT_ERROR),
    (IOError, EXIT_INPUT_ERROR),
)

HANDLED_ERRORS = tuple(error for error, _ in EXIT_CODES)


def exit_code(error):
    for error_class, code in EXIT_CODES:
        if isinstance(error, error_class):
            return code
    raise error


class Outcome(object):
    """Result of one job: a JSON-ready payload, its text rendering and the
    exit status."""

    def __init__(self, payload, text, status=EXIT_OK, format="text"):
        self.payload = payload
        self.text = text
        self.status = status
        self.format = format

    def render(self, format=None):
        if (format or self.format) == "json":
            return json.dumps(self.payload, indent=2)
        return self.text


def find_symmetries(document, params):
    system = DESystem(document.space, document.equations)
    form = orthonomic(system)
    detsys = determining_system(system, form)
    state = solve_linear(detsys, params)
    generators, families = assemble_generators(state, detsys.ansatz)
    return detsys, state, generators, families


def _solve_status(state):
    if not state.remaining:
        return EXIT_OK
    if state.budget_exceeded:
        return EXIT_BUDGET_EXCEEDED
    return EXIT_INCOMPLETE


def _generator_trees(generator):
    return OrderedDict((str(var), to_json_tree(c, generator.space))
                       for var, c in generator.coefficients().items()
                       if c != 0)


def _indent(lines):
    return ["  " + line for line in lines]


class RunnerMetaClass(type):
    def __init__(cls, name, bases, dct):
        super(RunnerMetaClass, cls).__init__(name, bases, dct)
        commands = OrderedDict(getattr(cls, "_commands", {}))
        for key, value in dct.items():
            if hasattr(value, "required_args") and hasattr(value, "get_job"):
                cls._add_command_method(key, value)
                commands[value.name] = key
        cls._commands = commands

    def _add_command_method(cls, command_field_name, command):
        func = cls._generate_command_func(
            command.method_name, command_field_name, command.required_args)
        setattr(cls, command.method_name, func)

    @staticmethod
    def _generate_command_func(func_name, command_field_name, required_args):
        # Builds e.g. ``def qp(self, action, input, **options)`` so the
        # positional arguments of a command show up in its signature.
        required_args_str = ",".join(required_args)
        get_job_args = ",".join(["{0}={0}".format(argname)
                                 for argname in required_args])
        func_definition = (
            "def {0}(self, {1}, **options): "
            "return self._execute_job(self.{2}.get_job({3}, **options))"
            .format(func_name, required_args_str, command_field_name,
                    get_job_args))
        func = compile(func_definition, __file__, "exec")
        d = {}
        exec(func, d)
        return d[func_name]


class Runner(six.with_metaclass(RunnerMetaClass)):
    """Runs symkit jobs.

    Each declared :class:`~symkit.commands.Command` becomes a method taking
    the command's positional arguments and its options as keywords, and
    returning an :class:`Outcome`::

        >>>runner = Runner()
        >>>outcome = runner.lie("corpus/heat.deq")
        >>>print(outcome.text)
        >>>runner.qp("integrals", "corpus/predator_prey.json", degree=2)

    The same commands make up the ``symkit`` command line.
    """

    _lie_command = Command(
        "lie", "{input}", SOLVER_OPTIONS + ("format",),
        help="Lie point symmetries of a differential system")

    _detsys_command = Command(
        "detsys", "{input}", ("count_only", "format"),
        help="determining system of a differential system")

    _check_command = Command(
        "check", "{input}", ("gen", "format"),
        help="check candidate generators against a system")

    _algebra_command = Command(
        "algebra", "{input}", SOLVER_OPTIONS + ("gen", "format"),
        help="commutation table, structure constants and solvability")

    _qp_command = Command(
        "qp", "{action} {input}", ("degree", "mixed", "format"),
        choices={"action": JobSpec.qp_actions},
        help="quasi-polynomial analysis of an ODE system")

    _noether_command = Command(
        "noether", "{input}", SOLVER_OPTIONS + ("degree", "format"),
        help="Noether currents of a first-order Lagrangian")

    _bench_command = Command(
        "bench", "{corpus}", SOLVER_OPTIONS + ("format", "no_timing"),
        help="run the symmetry pipeline on every .deq file of a corpus")

    def _execute_job(self, job):
        logger.info("running %s on %s", job.command, job.path)
        handler = getattr(self, "_run_{0}".format(job.command))
        outcome = handler(job)
        outcome.format = job.format
        return outcome

    # handlers -----------------------------------------------------------

    def _run_lie(self, job):
        document = job.load_document()
        _, state, generators, families = find_symmetries(document,
                                                         job.params)
        payload = OrderedDict([
            ("generators", [g.to_dsl() for g in generators]),
            ("coefficients", [_generator_trees(g) for g in generators]),
            ("families", [f.to_dict() for f in families]),
            ("remaining", [to_dsl(eq) for eq in state.remaining]),
            ("complete", state.complete),
        ])
        lines = ["generators:"]
        lines += _indent(format_generator_list(AlgebraBasis(generators)))
        if families:
            lines.append("families:")
            for family in families:
                lines.append("  " + family.generator.to_dsl())
                lines += _indent(_indent(
                    ["{0} = 0".format(to_dsl(eq))
                     for eq in family.constraints]))
        if state.remaining:
            lines.append("unsolved:")
            lines += _indent(["{0} = 0".format(to_dsl(eq))
                              for eq in state.remaining])
        return Outcome(payload, "\n".join(lines), _solve_status(state))

    def _run_detsys(self, job):
        document = job.load_document()
        detsys = determining_system(DESystem(document.space,
                                             document.equations))
        if job.count_only:
            return Outcome({"count": len(detsys)}, str(len(detsys)))
        payload = detsys.to_dict()
        payload["count"] = len(detsys)
        text = "\n".join("{0} = 0".format(to_dsl(eq)) for eq in detsys.eqs)
        return Outcome(payload, text)

    def _generators(self, job, document):
        texts = job.generators + document.generators
        return [parse_generator(text, document.space) for text in texts]

    def _run_check(self, job):
        document = job.load_document()
        generators = self._generators(job, document)
        if not generators:
            raise InvalidJobError("no generator to check, pass --gen")
        system = DESystem(document.space, document.equations)
        form = orthonomic(system)
        payload, lines = [], []
        for generator in generators:
            residuals = check_symmetry(system, generator, form)
            symmetry = all(r == 0 for r in residuals)
            payload.append(OrderedDict([
                ("generator", generator.to_dsl()),
                ("residuals", [to_dsl(r) for r in residuals]),
                ("symmetry", symmetry),
            ]))
            lines.append("{0}: {1}".format(
                generator.to_dsl(),
                "0" if symmetry else ", ".join(to_dsl(r) for r in residuals)))
        return Outcome(payload, "\n".join(lines))

    def _run_algebra(self, job):
        document = job.load_document()
        generators = self._generators(job, document)
        if not generators:
            _, _, generators, _ = find_symmetries(document, job.params)
        basis = AlgebraBasis(generators)
        table = commutation_table(basis)
        payload = table.to_dict()
        lines = format_generator_list(basis) + ["", table.to_text()]
        if table.not_closed:
            lines.append("not closed")
            payload["solvable"] = None
        else:
            payload["structure_constants"] = \
                structure_constants(basis).to_dict()["c"]
            series = derived_series(basis)
            solvable = not len(series[-1])
            payload["derived_series"] = [len(b) for b in series]
            payload["solvable"] = solvable
            lines.append("derived series: {0}".format(
                " > ".join(str(len(b)) for b in series)))
            lines.append("solvable: {0}".format("yes" if solvable else "no"))
        return Outcome(payload, "\n".join(lines))

    def _run_qp(self, job):
        system = job.load_qp_system()
        lv = to_lv(system)
        if job.action == "lv":
            payload = lv.to_dict()
            lines = ["{0} = {1}".format(y, q)
                     for y, q in payload["y"].items()]
            lines += ["M = {0}".format(payload["M"])]
            return Outcome(payload, "\n".join(lines))
        if job.action == "darboux":
            found = darboux(lv, job.degree)
            return Outcome(
                [si.to_dict() for si in found],
                "\n".join("f = {0}, lambda = {1}".format(
                    to_dsl(si.in_x()), to_dsl(si.cofactor_in_x()))
                    for si in found))
        if job.action == "integrals":
            found = qp_first_integrals(system, job.degree, lv)
            found += log_integrals(system, job.degree, job.mixed)
            return Outcome([i.to_dict() for i in found],
                           "\n".join("{0}: {1}".format(i.kind,
                                                       to_dsl(i.expression))
                                     for i in found))
        found = qp_symmetries(system, job.degree, lv)
        payload = [s.to_dict() for s in found]
        lines = []
        for entry in payload:
            lines.append("{0}  lambda = {1}".format(entry["field"],
                                                    entry["lambda"]))
            if entry["generator"] is not None:
                lines.append("  commuting: " + entry.get(
                    "generator_x", entry["generator"]))
        return Outcome(payload, "\n".join(lines))

    def _run_noether(self, job):
        document = job.load_document()
        if document.lagrangian is None:
            raise InvalidJobError(
                "{0} has no lagrangian statement".format(job.path))
        lagrangian = Lagrangian(document.space, document.lagrangian)
        results = noether_solve(lagrangian, job.degree, job.params)
        payload = [current.to_dict() for _, current in results]
        lines = ["{0}: [{1}] [{2}]".format(
            entry["generator"], ", ".join(entry["current"]),
            ",".join(entry["ordering"])) for entry in payload]
        return Outcome(payload, "\n".join(lines))

    def _bench_entry(self, path, params):
        name = path.replace("\\", "/").rsplit("/", 1)[-1]
        start = time.time()
        try:
            with io.open(path, encoding="utf-8") as fd:
                document = parse_document(fd.read())
            detsys, state, generators, families = find_symmetries(
                document, params)
        except HANDLED_ERRORS as e:
            logger.warning("bench entry %s failed: %s", name, e)
            return BenchRow(name, status="failed", error=str(e),
                            seconds=time.time() - start)
        status = {EXIT_OK: "solved", EXIT_INCOMPLETE: "incomplete",
                  EXIT_BUDGET_EXCEEDED: "budget exceeded"}[
                      _solve_status(state)]
        return BenchRow(name, len(detsys), status, len(generators),
                        len(families), time.time() - start)

    def _run_bench(self, job):
        report = BenchReport()
        for path in job.corpus_files():
            report.add(self._bench_entry(path, job.params))
        return Outcome(report.to_dict(job.timing), report.to_text(job.timing))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="symkit",
        description="Lie symmetries, quasi-polynomial first integrals and "
                    "Noether currents of differential systems")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for solver traces")
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True
    for field_name in Runner._commands.values():
        getattr(Runner, field_name).add_to_parser(subparsers)
    return parser


def configure_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    options = dict(vars(args))
    for key in ("verbose", "command", "method_name"):
        options.pop(key, None)
    runner = Runner()
    try:
        outcome = getattr(runner, args.method_name)(**options)
    except HANDLED_ERRORS as e:
        logger.error("%s failed: %s", args.command, e)
        return exit_code(e)
    stdout.write(outcome.render())
    stdout.write("\n")
    if outcome.status != EXIT_OK:
        logger.warning("%s finished with status %s", args.command,
                       outcome.status)
    return outcome.status
