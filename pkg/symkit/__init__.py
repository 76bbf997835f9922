import logging

from .cli import Runner
from .expr import Space, parse, parse_document, to_dsl
from .jet import DESystem, orthonomic
from .linsolve import SolverParams, assemble_generators, solve_linear
from .noether import Lagrangian, noether_solve
from .prolong import (
    Generator, check_symmetry, determining_system, parse_generator)
from .qp import QPSystem, to_lv


VERSION = '0.1.0'


logger = logging.getLogger(__name__)
