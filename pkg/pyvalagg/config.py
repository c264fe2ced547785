# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Run configuration assembled from command-line flags."""

import argparse
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from .constants import (
    BOUND_LEVELS, BOUNDS_FROM_FILE, DEFAULT_ALPHA0, DEFAULT_BOUND_LEVEL, DEFAULT_CONSENSUS_TOL,
    DEFAULT_DECAY, DEFAULT_MAX_ITERS, DEFAULT_STABLE_WINDOW, DEFAULT_TOL_OMEGA, DEFAULT_TOL_X,
    DISCOVERY_FULL, DISCOVERY_NONE, EPSILON_AUTO,
)
from .core import Population
from .network import DiscoveryStrategy, EpsilonMode, FullAccess, NoDiscovery
from .solver import StepsizeSchedule, StoppingConfig

logger = logging.getLogger(__name__)

DISCOVERY_STRATEGIES = {
    DISCOVERY_FULL: FullAccess,
    DISCOVERY_NONE: NoDiscovery,
}


def parse_epsilon(text: str) -> EpsilonMode:
    """'auto' or a float in (0, 1)."""
    if text == EPSILON_AUTO:
        return EPSILON_AUTO
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"epsilon must be 'auto' or a number, got {text!r}")
    if not 0.0 < value < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {value}")
    return value


def resolve_bounds(requested: Optional[str], pop: Population) -> str:
    """The bound mode to run with.

    An explicit level wins. Without one, per-agent bounds from the file are
    used when every agent has them, and DEFAULT_BOUND_LEVEL otherwise.
    """
    if requested is not None:
        return requested
    if pop.has_bounds:
        return BOUNDS_FROM_FILE
    logger.info(f"No --bounds given and the population has no per-agent bounds; "
                f"using level {DEFAULT_BOUND_LEVEL!r}")
    return DEFAULT_BOUND_LEVEL


@dataclass(frozen=True)
class RunConfig:
    bounds: str = DEFAULT_BOUND_LEVEL
    discovery: str = DISCOVERY_FULL
    epsilon: EpsilonMode = EPSILON_AUTO
    alpha0: float = DEFAULT_ALPHA0
    decay: float = DEFAULT_DECAY
    tol_x: float = DEFAULT_TOL_X
    tol_omega: float = DEFAULT_TOL_OMEGA
    consensus_tol: float = DEFAULT_CONSENSUS_TOL
    stable_window: int = DEFAULT_STABLE_WINDOW
    max_iters: int = DEFAULT_MAX_ITERS
    seed: int = 0
    trace: Optional[str] = None

    def __post_init__(self):
        if self.bounds not in BOUND_LEVELS and self.bounds != BOUNDS_FROM_FILE:
            raise ValueError(f"bounds must be one of {sorted(BOUND_LEVELS)} or "
                             f"{BOUNDS_FROM_FILE!r}, got {self.bounds!r}")
        if self.discovery not in DISCOVERY_STRATEGIES:
            raise ValueError(f"unknown discovery strategy {self.discovery!r}")
        if isinstance(self.epsilon, str):
            object.__setattr__(self, "epsilon", parse_epsilon(self.epsilon))
        else:
            object.__setattr__(self, "epsilon", parse_epsilon(repr(float(self.epsilon))))
        # both raise ValueError on bad values
        self.schedule()
        self.stopping()

    @classmethod
    def from_args(cls, args: argparse.Namespace, bounds: Optional[str] = None) -> "RunConfig":
        """``bounds`` overrides ``args.bounds`` (e.g. after resolve_bounds)."""
        return cls(
            bounds=bounds if bounds is not None else args.bounds,
            discovery=args.discovery,
            epsilon=args.epsilon,
            alpha0=args.alpha0,
            decay=args.decay,
            tol_x=args.tol_x,
            tol_omega=args.tol_omega,
            consensus_tol=args.consensus_tol,
            stable_window=args.stable_window,
            max_iters=args.max_iters,
            seed=args.seed,
            trace=getattr(args, "trace", None),
        )

    def schedule(self) -> StepsizeSchedule:
        return StepsizeSchedule(alpha0=self.alpha0, decay=self.decay)

    def stopping(self) -> StoppingConfig:
        return StoppingConfig(tol_x=self.tol_x, tol_omega=self.tol_omega,
                              stable_window=self.stable_window, max_iters=self.max_iters,
                              consensus_tol=self.consensus_tol)

    def discovery_strategy(self) -> DiscoveryStrategy:
        return DISCOVERY_STRATEGIES[self.discovery]()

    def to_dict(self) -> Dict[str, Any]:
        """Echo for result files; the trace path is left out so outputs do not depend on it."""
        d = asdict(self)
        d.pop("trace")
        return d
