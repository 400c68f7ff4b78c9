"""Implicit discrete-time homogeneous differentiator with counted polynomial kernels."""

from .complexity import CostRow, complexity_table, cost
from .counting import Counted, OpCounter
from .differentiator import State, StepTrace, UpdateForm, run, step
from .errors import HIDDError
from .methods import Method, simulate
from .params import Params, Tables, default_gains, gains_for, load_params, make_params, precompute
from .polyeval import EvalStrategy, PolySpec, evaluate
from .rootfind import Case, RootCase, RootResult, classify, compute_bk, halley_solve, initial_guess
from .signals import SignalSpec, gen_signal

__all__ = [
    "Case",
    "CostRow",
    "Counted",
    "EvalStrategy",
    "HIDDError",
    "Method",
    "OpCounter",
    "Params",
    "PolySpec",
    "RootCase",
    "RootResult",
    "SignalSpec",
    "State",
    "StepTrace",
    "Tables",
    "UpdateForm",
    "classify",
    "complexity_table",
    "compute_bk",
    "cost",
    "default_gains",
    "evaluate",
    "gains_for",
    "gen_signal",
    "halley_solve",
    "initial_guess",
    "load_params",
    "make_params",
    "precompute",
    "run",
    "simulate",
    "step",
]
