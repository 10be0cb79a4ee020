"""Union bound on the symbol error rate from enumerated pairwise events.

The enumeration walks every transmitted tuple, every wrong hypothesis for
the target user, and every realizable SIC decision for the users detected
first, so imperfect cancellation is represented by explicit events rather
than a separate model.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .config import SystemConfig
from .pep import ErrorEvent, build_event, pep_clt, pep_general, pep_m1


@dataclass(frozen=True)
class EventEnumeration:
    user: int
    events: tuple           # ErrorEvent per combination
    weights: tuple          # multiplicity weights, parallel to events
    tau: int                # total combination count

    def __post_init__(self):
        if abs(sum(self.weights) - self.tau) > 1e-9:
            raise ValueError("weights must sum to tau")


def enumerate_events(config: SystemConfig, user: int,
                     sic_errors: bool = True,
                     weighting: str = "uniform") -> EventEnumeration:
    """All pairwise error events for one user.

    `sic_errors=False` keeps only perfect-cancellation events (every
    earlier user detected correctly); the full set can only be larger.
    `weighting` is reserved; only the uniform convention is implemented.
    """
    if weighting != "uniform":
        raise NotImplementedError("only uniform weighting is implemented")
    config._check_user(user)
    own = config.constellation[user - 1]
    if len(own) < 2:
        raise ValueError("user needs at least two symbols for error events")

    events = []
    for x in itertools.product(*config.constellation):
        for xbar in own:
            if abs(xbar - x[user - 1]) <= 1e-12:
                continue
            if sic_errors:
                detected_space = itertools.product(
                    *config.constellation[:user - 1])
            else:
                detected_space = [tuple(x[:user - 1])]
            for det in detected_space:
                deltas = tuple(xi - di for xi, di in zip(x, det))
                events.append(build_event(config, user, x, xbar, deltas))
    tau = len(events)
    return EventEnumeration(user=user, events=tuple(events),
                            weights=(1.0,) * tau, tau=tau)


_METHODS: dict = {}


def _method(config: SystemConfig, name: Union[str, Callable]) -> Callable:
    if callable(name):
        return name
    if name == "general":
        return pep_general
    if name == "m1":
        return pep_m1
    if name == "clt":
        return pep_clt
    if name == "auto":
        return pep_m1 if config.M == 1 else pep_general
    raise ValueError("pep_method must be general, m1, clt, or a callable")


@dataclass(frozen=True)
class UnionBoundValue:
    value: float            # clipped to <= 1 for reporting
    raw: float
    tau: int
    flagged_events: int     # events with vartheta <= 0 in the sum

    def __float__(self) -> float:
        return self.value


def union_bound(config: SystemConfig, user: int, snr_db: float,
                pep_method: Union[str, Callable] = "auto",
                enumeration: Optional[EventEnumeration] = None
                ) -> UnionBoundValue:
    """Weighted PEP sum over all enumerated events at one SNR point."""
    if enumeration is None:
        enumeration = enumerate_events(config, user)
    fn = _method(config, pep_method)
    total = 0.0
    flagged = 0
    for ev, w in zip(enumeration.events, enumeration.weights):
        v = fn(config, user, ev, snr_db=snr_db)
        total += w * v.raw
        if ev.flagged:
            flagged += 1
    raw = total / enumeration.tau
    return UnionBoundValue(value=min(1.0, raw), raw=raw,
                           tau=enumeration.tau, flagged_events=flagged)


@dataclass(frozen=True)
class BoundCurve:
    user: int
    snr_db: tuple
    value: tuple
    raw: tuple
    tau: int
    method: str


def union_bound_curve(config: SystemConfig, user: int,
                      snr_db: Sequence[float],
                      pep_method: Union[str, Callable] = "auto"
                      ) -> BoundCurve:
    enumeration = enumerate_events(config, user)
    vals = [union_bound(config, user, s, pep_method, enumeration)
            for s in snr_db]
    name = pep_method if isinstance(pep_method, str) else getattr(
        pep_method, "__name__", "custom")
    return BoundCurve(user=user, snr_db=tuple(float(s) for s in snr_db),
                      value=tuple(v.value for v in vals),
                      raw=tuple(v.raw for v in vals),
                      tau=enumeration.tau, method=name)
