import io
import json
import logging
import os.path
from collections import OrderedDict

from .exceptions import InvalidConfigurationError, InvalidJobError
from .expr import parse_document
from .linsolve import SolverParams
from .qp import QPSystem


logger = logging.getLogger(__name__)


class JobSpec(object):
    commands = ("lie", "detsys", "check", "algebra", "qp", "noether",
                "bench")
    formats = ("text", "json")
    qp_actions = ("lv", "darboux", "integrals", "symmetries")

    def __init__(self, command, path, params=None, format="text", degree=1,
                 generators=None, count_only=False, mixed=False,
                 no_timing=False, action=None):
        """A validated request to run one command on one input file (or on
        a corpus directory for ``bench``)."""
        if command not in self.commands:
            raise InvalidJobError("unknown command {0}".format(command))
        if format not in self.formats:
            raise InvalidJobError("unknown format {0}".format(format))
        if command == "qp" and action not in self.qp_actions:
            raise InvalidJobError(
                "qp needs one of {0}".format(", ".join(self.qp_actions)))
        if degree < 1:
            raise InvalidJobError("degree must be at least 1")
        self.command = command
        self.path = path
        self._check_path()
        try:
            self.params = SolverParams.from_env(**(params or {}))
        except (InvalidConfigurationError, ValueError) as e:
            raise InvalidJobError(str(e))
        self.format = format
        self.degree = degree
        self.generators = list(generators or [])
        self.count_only = count_only
        self.mixed = mixed
        self.timing = not no_timing
        self.action = action

    def _check_path(self):
        if self.path is None:
            raise InvalidJobError("{0} needs an input".format(self.command))
        if self.command == "bench":
            if not os.path.isdir(self.path):
                raise InvalidJobError(
                    "corpus {0} is not a directory".format(self.path))
        elif not os.path.isfile(self.path):
            raise InvalidJobError("no such file {0}".format(self.path))

    def read(self):
        with io.open(self.path, encoding="utf-8") as fd:
            return fd.read()

    def load_document(self):
        return parse_document(self.read())

    def load_qp_system(self):
        try:
            return QPSystem.from_json(self.read())
        except (KeyError, ValueError) as e:
            raise InvalidJobError("bad QP system {0}: {1}".format(
                self.path, e))

    def corpus_files(self):
        return sorted(os.path.join(self.path, name)
                      for name in os.listdir(self.path)
                      if name.endswith(".deq"))

    def __repr__(self):
        return "JobSpec({0}, {1})".format(self.command, self.path)


class BenchRow(object):
    def __init__(self, name, equations=None, status="solved", generators=0,
                 families=0, seconds=None, error=None):
        self.name = name
        self.equations = equations
        self.status = status
        self.generators = generators
        self.families = families
        self.seconds = seconds
        self.error = error

    def to_dict(self, timing=True):
        result = OrderedDict([
            ("name", self.name),
            ("equations", self.equations),
            ("status", self.status),
            ("generators", self.generators),
            ("families", self.families),
        ])
        if timing:
            result["seconds"] = self.seconds
        if self.error is not None:
            result["error"] = self.error
        return result


class BenchReport(object):
    """Rows ordered by file name."""

    def __init__(self, rows=None):
        self.rows = list(rows or [])

    def add(self, row):
        self.rows.append(row)
        self.rows.sort(key=lambda r: r.name)

    @property
    def failed(self):
        return [row for row in self.rows if row.error is not None]

    def to_dict(self, timing=True):
        return {"systems": [row.to_dict(timing) for row in self.rows]}

    def to_json(self, timing=True):
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=False)

    def to_text(self, timing=True):
        lines = []
        for row in self.rows:
            line = ("{0}: {1} equations, {2}, {3} generators, "
                    "{4} families").format(row.name, row.equations,
                                           row.status, row.generators,
                                           row.families)
            if timing and row.seconds is not None:
                line += ", {0:.2f}s".format(row.seconds)
            if row.error is not None:
                line += " ({0})".format(row.error)
            lines.append(line)
        return "\n".join(lines)
