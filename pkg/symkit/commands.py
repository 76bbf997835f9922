import re
from collections import OrderedDict

from .jobs import JobSpec


SOLVER_OPTIONS = ("n1", "n2", "n3", "budget")

# argparse keyword arguments per option name
OPTIONS = OrderedDict([
    ("n1", {"type": int, "help": "term limit for equations completed to "
                                 "involutive form first (default 5)"}),
    ("n2", {"type": int, "help": "term limit for ODE integration, raised "
                                 "in steps of 3 up to --n3 (default 5)"}),
    ("n3", {"type": int, "help": "upper term limit (default 8)"}),
    ("budget", {"type": int, "help": "reductions allowed per completion, "
                                     "overrides SYMKIT_BUDGET"}),
    ("degree", {"type": int, "default": 1,
                "help": "polynomial degree of the ansatz"}),
    ("format", {"choices": JobSpec.formats, "default": "text",
                "help": "output format"}),
    ("count_only", {"action": "store_true",
                    "help": "only print the number of equations"}),
    ("gen", {"action": "append", "dest": "generators", "default": None,
             "help": "generator in D-notation, may be repeated"}),
    ("mixed", {"action": "store_true",
               "help": "search P(x, ln x) integrals"}),
    ("no_timing", {"action": "store_true",
                   "help": "leave wall times out of the report"}),
])


class Command(object):
    """Declaration of one sub-command.

    ``usage`` names the positional arguments in braces, e.g.
    ``"{action} {input}"``; ``options`` picks entries of :data:`OPTIONS`.
    """

    def __init__(self, name, usage, options=(), help=None, choices=None,
                 method_name=None):
        self._param_regex = re.compile("{([a-zA-Z0-9_]+)}")
        self.name = name
        self.help = help
        self._check_at_least_one_argument(usage)
        self.required_args = self._get_params(usage)
        self.choices = dict(choices or {})
        for option in options:
            if option not in OPTIONS:
                raise ValueError("unknown option {0}".format(option))
        self.options = list(options)
        self.method_name = method_name or name

    def _check_at_least_one_argument(self, usage):
        if not self._get_params(usage):
            raise ValueError("Commands need at least one argument")

    def _get_params(self, usage):
        return self._param_regex.findall(usage)

    def add_to_parser(self, subparsers):
        parser = subparsers.add_parser(self.name, help=self.help)
        for arg in self.required_args:
            if arg in self.choices:
                parser.add_argument(arg, choices=self.choices[arg])
            else:
                parser.add_argument(arg)
        for option in self.options:
            kwargs = dict(OPTIONS[option])
            parser.add_argument("--" + option.replace("_", "-"), **kwargs)
        parser.set_defaults(method_name=self.method_name)
        return parser

    def get_job(self, **kwargs):
        """Build the :class:`JobSpec` for one invocation."""
        for arg in self.required_args:
            if arg not in kwargs:
                raise ValueError(
                    "keyword argument {0} is required".format(arg))
        unknown = set(kwargs) - set(self.required_args) - \
            set(OPTIONS[o].get("dest", o) for o in self.options)
        if unknown:
            raise ValueError("{0} does not take {1}".format(
                self.name, sorted(unknown)))
        kwargs = dict((k, v) for k, v in kwargs.items() if v is not None)
        path = kwargs.pop("input", None) or kwargs.pop("corpus", None)
        params = dict((k, kwargs.pop(k)) for k in SOLVER_OPTIONS
                      if k in kwargs)
        return JobSpec(self.name, path, params=params, **kwargs)
