"""Estimator-style wrappers so planners compose like familiar fit objects.

Each solver declares its knobs in ``__init__``, exposes them through
``get_params``/``set_params``, and computes its plan in ``fit(instance)``,
leaving results on trailing-underscore attributes.
"""

from __future__ import annotations

import inspect
from typing import Optional

from swapsched.allocation import Allocation
from swapsched.baselines import asap_monte_carlo, linear_plan, nesting_plan
from swapsched.flto import flto_solve
from swapsched.fnpr import fnpr_solve, solve_fractional
from swapsched.instance import Instance, substream
from swapsched.validation import check_instance

__all__ = [
    "BaseSolver",
    "FnprSolver",
    "FltoSolver",
    "NestingSolver",
    "LinearSolver",
    "AsapSolver",
    "UpperBoundSolver",
    "make_solver",
    "SOLVER_NAMES",
]


class BaseSolver:
    """Parameter handling and the fit contract shared by all planners."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseSolver":
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"unknown parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self

    def fit(self, instance: Instance) -> "BaseSolver":
        check_instance(instance)
        self._fit(instance)
        return self

    def _fit(self, instance: Instance):
        raise NotImplementedError

    def _finish(self, allocation: Allocation):
        self.allocation_ = allocation
        self.expected_fidelity_sum_ = allocation.expected_fidelity_sum
        self.accepted_requests_ = allocation.accepted_count


class FnprSolver(BaseSolver):
    def __init__(self, mode: Optional[str] = None, epsilon: Optional[float] = None, seed: Optional[int] = None):
        self.mode = mode
        self.epsilon = epsilon
        self.seed = seed

    def _fit(self, instance):
        self._finish(fnpr_solve(instance, mode=self.mode, epsilon=self.epsilon, seed=self.seed))
        self.pre_repair_overload_ = self.allocation_.diagnostics["pre_repair_overload"]


class FltoSolver(BaseSolver):
    def __init__(self, rei_on_original: bool = False):
        self.rei_on_original = rei_on_original

    def _fit(self, instance):
        self._finish(flto_solve(instance, rei_on_original=self.rei_on_original))


class NestingSolver(BaseSolver):
    def __init__(self):
        pass

    def _fit(self, instance):
        self._finish(nesting_plan(instance))


class LinearSolver(BaseSolver):
    def __init__(self):
        pass

    def _fit(self, instance):
        self._finish(linear_plan(instance))


class AsapSolver(BaseSolver):
    def __init__(self, trials: Optional[int] = None, seed: Optional[int] = None, swap_failure: str = "destroy"):
        self.trials = trials
        self.seed = seed
        self.swap_failure = swap_failure

    def _fit(self, instance):
        cfg = instance.config
        trials = self.trials if self.trials is not None else (cfg.mc_trials if cfg else 1000)
        seed = self.seed if self.seed is not None else (cfg.seed if cfg else 0)
        out = asap_monte_carlo(instance, trials, substream(seed, "monte_carlo"), self.swap_failure)
        self.outcome_ = out
        self.allocation_ = None
        self.expected_fidelity_sum_ = out.mean_fidelity_sum
        self.accepted_requests_ = out.acceptance_rate * len(instance.requests)


class UpperBoundSolver(BaseSolver):
    def __init__(self, epsilon: Optional[float] = None):
        self.epsilon = epsilon

    def _fit(self, instance):
        cfg = instance.config
        eps = self.epsilon if self.epsilon is not None else (cfg.epsilon if cfg else 0.1)
        frac = solve_fractional(instance, eps)
        self.fractional_ = frac
        self.allocation_ = None
        self.expected_fidelity_sum_ = frac.objective
        self.accepted_requests_ = sum(c.value for c in frac.columns)


SOLVER_NAMES = ("fnpr", "flto", "nesting", "linear", "asap", "ub")


def make_solver(name: str, config=None) -> BaseSolver:
    """Solver registry keyed by the CLI algorithm names."""
    if name == "fnpr":
        return FnprSolver(
            mode=config.mode if config else None,
            epsilon=config.epsilon if config else None,
            seed=config.seed if config else None,
        )
    if name == "flto":
        return FltoSolver()
    if name == "nesting":
        return NestingSolver()
    if name == "linear":
        return LinearSolver()
    if name == "asap":
        return AsapSolver(
            trials=config.mc_trials if config else None, seed=config.seed if config else None
        )
    if name == "ub":
        return UpperBoundSolver(epsilon=config.epsilon if config else None)
    raise ValueError(f"unknown algorithm {name!r}")
