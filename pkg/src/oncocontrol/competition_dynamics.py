"""Two-population healthy/cancer dynamics and an adaptive ODE integrator.

Three right-hand sides are provided:

  coexistence    joint crowding measured against per-population capacities,
                 no direct interaction term
  competition    shared carrying capacity plus a bilinear competition loss
                 on the healthy population
  controlled     competition dynamics with a therapy intensity u that
                 removes healthy cells at healthy_kill_coeff*u per day and
                 cancer cells at cancer_kill_coeff*u per day

States are cell counts and must stay nonnegative.  The integrator is an
embedded Dormand-Prince 5(4) pair with proportional step control.  A state
component that steps slightly below zero (within 1e3*atol) is clipped to
exactly zero; a larger undershoot aborts with NumericalError, since that
signals a tolerance problem rather than roundoff at extinction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NumericalError


@dataclass(frozen=True)
class State:
    """Point in the (healthy, cancer) plane, cells."""

    healthy: float
    cancer: float

    def __post_init__(self) -> None:
        if self.healthy < 0.0 or self.cancer < 0.0:
            raise ConfigError("cell counts must be nonnegative")

    def as_tuple(self) -> tuple[float, float]:
        return (self.healthy, self.cancer)


@dataclass(frozen=True)
class CompetitionParams:
    """Growth and interaction rates for the two-population models.

    healthy_capacity / cancer_capacity feed the coexistence (independent
    niche) variant; shared_capacity feeds the competition and controlled
    variants.  competition_coeff is the bilinear loss rate on healthy
    cells, per cell of cancer per day.
    """

    healthy_rate: float                 # 1/day
    cancer_rate: float                  # 1/day
    shared_capacity: float              # cells
    healthy_capacity: float | None = None   # cells, coexistence only
    cancer_capacity: float | None = None    # cells, coexistence only
    competition_coeff: float = 0.0      # 1/(cell*day)

    def __post_init__(self) -> None:
        if not (self.healthy_rate > 0.0 and self.cancer_rate > 0.0):
            raise ConfigError("growth rates must be positive")
        if not (self.shared_capacity > 0.0):
            raise ConfigError("shared_capacity must be positive")
        for name in ("healthy_capacity", "cancer_capacity"):
            value = getattr(self, name)
            if value is not None and not (value > 0.0):
                raise ConfigError(f"{name} must be positive when given")
        if self.competition_coeff < 0.0:
            raise ConfigError("competition_coeff must be nonnegative")


@dataclass(frozen=True)
class ControlParams:
    """Therapy response coefficients.

    The invariant 0 <= healthy_kill_coeff < cancer_kill_coeff <= 1 encodes
    that treatment must hit cancer cells harder than healthy tissue.
    """

    healthy_kill_coeff: float   # 1/day per unit intensity
    cancer_kill_coeff: float    # 1/day per unit intensity
    max_intensity: float = 1.0  # dimensionless upper bound on u

    def __post_init__(self) -> None:
        if not (0.0 <= self.healthy_kill_coeff < self.cancer_kill_coeff <= 1.0):
            raise ConfigError(
                "requires healthy_kill_coeff < cancer_kill_coeff, both in [0, 1]"
            )
        if not (0.0 < self.max_intensity <= 1.0):
            raise ConfigError("max_intensity must lie in (0, 1]")


@dataclass
class Trajectory:
    """Sampled solution of one of the dynamical systems.

    times has shape (n,), states shape (n, 2) with columns
    (healthy, cancer).  controls, regimes and in_session are filled only
    by the producers that have them (optimal control, fractionated
    radiotherapy) and stay None otherwise.
    """

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray | None = None
    regimes: list[str] | None = None
    in_session: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.times.ndim != 1 or self.states.shape != (self.times.shape[0], 2):
            raise ConfigError("times (n,) and states (n, 2) must line up")
        if np.any(np.diff(self.times) <= 0.0):
            raise ConfigError("times must be strictly increasing")

    @property
    def healthy(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def cancer(self) -> np.ndarray:
        return self.states[:, 1]

    def final_state(self) -> State:
        return State(float(self.states[-1, 0]), float(self.states[-1, 1]))


# ---------------------------------------------------------------------------
# right-hand sides
#
# The *_field factories return plain float closures f(t, h, c) -> (dh, dc)
# so the integrator's inner loop never touches numpy.  The rhs_* wrappers
# are the one-shot variants for callers holding State objects.
# ---------------------------------------------------------------------------

Field = Callable[[float, float, float], tuple[float, float]]


def coexistence_field(params: CompetitionParams) -> Field:
    """Joint crowding against per-population capacities.

    Both populations feel the total occupancy h + c, but each measures it
    against its own capacity.  With equal capacities every point of the
    line h + c = capacity is an equilibrium.
    """
    if params.healthy_capacity is None or params.cancer_capacity is None:
        raise ConfigError("coexistence dynamics need healthy_capacity and cancer_capacity")
    rh, rc = params.healthy_rate, params.cancer_rate
    kh, kc = params.healthy_capacity, params.cancer_capacity

    def field(t: float, h: float, c: float) -> tuple[float, float]:
        total = h + c
        return (rh * (1.0 - total / kh) * h, rc * (1.0 - total / kc) * c)

    return field


def competition_field(params: CompetitionParams) -> Field:
    """Shared capacity with a bilinear competition loss on healthy cells."""
    rh, rc = params.healthy_rate, params.cancer_rate
    k = params.shared_capacity
    gamma = params.competition_coeff

    def field(t: float, h: float, c: float) -> tuple[float, float]:
        crowd = 1.0 - (h + c) / k
        return (rh * crowd * h - gamma * h * c, rc * crowd * c)

    return field


def controlled_field(
    params: CompetitionParams,
    control: ControlParams,
    intensity: float | Callable[[float], float],
) -> Field:
    """Competition dynamics under a therapy schedule.

    intensity is either a constant in [0, max_intensity] or a callable
    u(t); callables are trusted to respect the bound (the solvers clamp).
    """
    rh, rc = params.healthy_rate, params.cancer_rate
    k = params.shared_capacity
    gamma = params.competition_coeff
    lam = control.healthy_kill_coeff
    mu = control.cancer_kill_coeff

    if callable(intensity):
        u_of_t = intensity
    else:
        u_const = float(intensity)
        if not (0.0 <= u_const <= control.max_intensity):
            raise ConfigError(
                f"intensity {u_const:g} outside [0, {control.max_intensity:g}]"
            )

        def u_of_t(t: float, _u: float = u_const) -> float:
            return _u

    def field(t: float, h: float, c: float) -> tuple[float, float]:
        u = u_of_t(t)
        crowd = 1.0 - (h + c) / k
        return (
            rh * crowd * h - gamma * h * c - lam * u * h,
            rc * crowd * c - mu * u * c,
        )

    return field


def rhs_coexistence(params: CompetitionParams, state: State) -> tuple[float, float]:
    return coexistence_field(params)(0.0, state.healthy, state.cancer)


def rhs_competition(params: CompetitionParams, state: State) -> tuple[float, float]:
    return competition_field(params)(0.0, state.healthy, state.cancer)


def rhs_controlled(
    params: CompetitionParams,
    control: ControlParams,
    state: State,
    intensity: float,
) -> tuple[float, float]:
    return controlled_field(params, control, intensity)(0.0, state.healthy, state.cancer)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) integrator
# ---------------------------------------------------------------------------

# classical DP tableau; the 5th-order weights propagate the solution and the
# difference against the embedded 4th-order weights drives step control
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# b - b_hat, including the FSAL stage
_E1, _E3, _E4, _E5, _E6, _E7 = (
    35.0 / 384.0 - 5179.0 / 57600.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
)

_MAX_STEPS = 1_000_000
_SHRINK_FLOOR = 0.2
_GROW_CAP = 5.0
_SAFETY = 0.9


def _clip_or_fail(y: np.ndarray, clip_floor: float) -> None:
    """Zero out roundoff-negative components in place; fail on real ones."""
    for i in range(y.shape[0]):
        if y[i] < 0.0:
            if y[i] >= clip_floor:
                y[i] = 0.0
            else:
                raise NumericalError(
                    f"state component {i} reached {y[i]:.6g}, below clip floor {clip_floor:.6g}"
                )


def solve_ode(
    field: Callable[[float, np.ndarray], np.ndarray],
    y0: Sequence[float],
    t_span: tuple[float, float],
    rtol: float = 1e-8,
    atol: float = 1e-6,
    t_eval: Sequence[float] | None = None,
    nonnegative: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate y' = field(t, y) over t_span, returning (times, states).

    With t_eval given, the step size is capped so the solver lands exactly
    on every requested time and only those samples are returned; otherwise
    every accepted step is recorded.  t_eval must be strictly increasing
    and contained in t_span.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ConfigError("t_span must satisfy t1 > t0")
    y = np.asarray(y0, dtype=float).copy()
    if y.ndim != 1:
        raise ConfigError("y0 must be one-dimensional")

    targets: list[float] | None = None
    if t_eval is not None:
        targets = [float(t) for t in t_eval]
        if any(b <= a for a, b in zip(targets, targets[1:])):
            raise ConfigError("t_eval must be strictly increasing")
        if targets and (targets[0] < t0 - 1e-12 or targets[-1] > t1 + 1e-12):
            raise ConfigError("t_eval must lie within t_span")

    span = t1 - t0
    min_step = 1e-12 * span
    clip_floor = -1e3 * atol

    times: list[float] = []
    states: list[np.ndarray] = []
    next_target = 0

    def record(t: float, yv: np.ndarray) -> None:
        times.append(t)
        states.append(yv.copy())

    t = t0
    if targets is None:
        record(t, y)
    elif targets and abs(targets[0] - t0) <= 1e-12:
        record(t0, y)
        next_target = 1

    k1 = np.asarray(field(t, y), dtype=float)
    if not np.all(np.isfinite(k1)):
        raise NumericalError("right-hand side not finite at initial state")
    h = span / 100.0

    steps = 0
    while t < t1 - 1e-14 * max(1.0, abs(t1)):
        steps += 1
        if steps > _MAX_STEPS:
            raise NumericalError(f"step limit {_MAX_STEPS} exceeded")

        # cap the step at the horizon and at the next requested sample
        boundary = t1
        if targets is not None and next_target < len(targets):
            boundary = min(boundary, targets[next_target])
        h = min(h, boundary - t)
        if h < min_step:
            raise NumericalError(f"step size underflow near t = {t:.6g}")

        k2 = np.asarray(field(t + _C2 * h, y + h * (_A21 * k1)), dtype=float)
        k3 = np.asarray(field(t + _C3 * h, y + h * (_A31 * k1 + _A32 * k2)), dtype=float)
        k4 = np.asarray(field(t + _C4 * h, y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3)), dtype=float)
        k5 = np.asarray(
            field(t + _C5 * h, y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4)),
            dtype=float,
        )
        k6 = np.asarray(
            field(t + h, y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5)),
            dtype=float,
        )
        y_new = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = np.asarray(field(t + h, y_new), dtype=float)

        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(k7))):
            raise NumericalError(f"non-finite state near t = {t:.6g}")

        err = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        norm = math.sqrt(float(np.mean((err / scale) ** 2)))

        if norm <= 1.0:
            t_new = t + h
            if nonnegative:
                _clip_or_fail(y_new, clip_floor)
            t, y, k1 = t_new, y_new, k7
            if targets is None:
                record(t, y)
            else:
                while next_target < len(targets) and targets[next_target] <= t + 1e-12:
                    record(targets[next_target], y)
                    next_target += 1

        factor = _GROW_CAP if norm == 0.0 else min(
            _GROW_CAP, max(_SHRINK_FLOOR, _SAFETY * norm ** -0.2)
        )
        h = h * factor

    return np.asarray(times), np.asarray(states)


def integrate(
    field: Field,
    initial: State,
    t_span: tuple[float, float],
    rtol: float = 1e-8,
    atol: float = 1e-6,
    t_eval: Sequence[float] | None = None,
) -> Trajectory:
    """Adaptive integration of a two-population field into a Trajectory."""

    def vec_field(t: float, y: np.ndarray) -> np.ndarray:
        dh, dc = field(t, y[0], y[1])
        return np.array((dh, dc))

    times, states = solve_ode(
        vec_field,
        initial.as_tuple(),
        t_span,
        rtol=rtol,
        atol=atol,
        t_eval=t_eval,
    )
    return Trajectory(times=times, states=states)
