"""Finite-horizon therapy scheduling for the competition model.

The planning problem: choose an intensity profile u(t) on [0, horizon],
piecewise constant on a uniform grid, minimising

    integral of ((healthy - capacity)/healthy_scale)^2
              + (cancer/cancer_scale)^2
              + control_weight * u^2   dt

subject to the controlled competition dynamics and 0 <= u <= max_intensity.
The running cost penalises healthy-tissue deficit, residual tumour burden
and treatment aggressiveness; the scale divisors put the three terms on
comparable footing, since raw cell counts would let the healthy term drown
everything else.

Two independent solvers are provided and are meant to cross-validate each
other:

  solve_fbsm    forward-backward sweeps derived from the first-order
                optimality system: integrate the state forward, the
                adjoint backward, then relax the control toward the
                pointwise minimiser of the Hamiltonian.
  solve_direct  transcribe the rollout with fixed-step RK4 and hand the
                objective to L-BFGS-B with an exact discrete adjoint
                gradient (reverse sweep through every RK4 stage, no
                finite differences).

Both share the same rollout grid: n_intervals control intervals, each cut
into `refine` RK4 substeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .competition_dynamics import CompetitionParams, ControlParams, State, Trajectory
from .errors import ConfigError

SOLVER_INDIRECT = "indirect-FBSM"
SOLVER_DIRECT = "direct-transcription"


@dataclass(frozen=True)
class CostModel:
    """Scales and weight of the running cost terms."""

    healthy_scale: float    # cells; divisor of the healthy deficit
    cancer_scale: float     # cells; divisor of the tumour burden
    control_weight: float = 1.0

    def __post_init__(self) -> None:
        if not (
            self.healthy_scale > 0.0
            and self.cancer_scale > 0.0
            and self.control_weight > 0.0
        ):
            raise ConfigError("cost scales and weight must be positive")

    @staticmethod
    def for_dynamics(params: CompetitionParams) -> "CostModel":
        # deficit measured relative to full capacity; tumour measured on a
        # much finer scale so that late-time residuals of a few cells per
        # ten thousand of capacity still register in the objective
        k = params.shared_capacity
        return CostModel(healthy_scale=k, cancer_scale=1e-4 * k, control_weight=1.0)


@dataclass
class OCPSetup:
    """Problem statement plus discretisation choices."""

    dynamics: CompetitionParams
    control: ControlParams
    initial: State
    horizon: float = 100.0      # days
    n_intervals: int = 200      # control grid
    refine: int = 4             # RK4 substeps per interval, must be even
    cost: CostModel | None = None

    def __post_init__(self) -> None:
        if not (self.horizon > 0.0):
            raise ConfigError("horizon must be positive")
        if self.n_intervals < 1:
            raise ConfigError("n_intervals must be at least 1")
        if self.refine < 2 or self.refine % 2 != 0:
            # control updates sample the interval midpoint, which must be
            # an exact rollout node
            raise ConfigError("refine must be an even integer >= 2")
        if self.cost is None:
            self.cost = CostModel.for_dynamics(self.dynamics)

    @property
    def n_nodes(self) -> int:
        return self.n_intervals * self.refine + 1

    @property
    def step(self) -> float:
        return self.horizon / (self.n_intervals * self.refine)

    def node_times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_nodes)

    def interval_edges(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_intervals + 1)


@dataclass
class OCPSolution:
    """Output of either solver on the shared rollout grid.

    control holds one intensity per interval; adjoints are present only
    for the indirect solver.  objective_history records the objective at
    each accepted iterate of the direct solver.
    """

    times: np.ndarray
    states: np.ndarray
    control: np.ndarray
    objective: float
    total_dose: float
    solver: str
    converged: bool
    iterations: int
    final_update_norm: float
    message: str = ""
    adjoints: np.ndarray | None = None
    objective_history: np.ndarray | None = None

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def trajectory(self) -> Trajectory:
        refine = (len(self.times) - 1) // len(self.control)
        idx = np.minimum(np.arange(len(self.times)) // refine, len(self.control) - 1)
        return Trajectory(
            times=self.times, states=self.states, controls=self.control[idx]
        )


# ---------------------------------------------------------------------------
# cost and optimality pointwise pieces
# ---------------------------------------------------------------------------

def _trapezoid(values: np.ndarray, times: np.ndarray) -> float:
    dt = np.diff(times)
    return float(np.sum(0.5 * dt * (values[1:] + values[:-1])))


def controls_at_times(times: np.ndarray, controls: np.ndarray) -> np.ndarray:
    """Sample a piecewise-constant control at arbitrary times.

    The control grid is the uniform split of [times[0], times[-1]] into
    len(controls) intervals; the profile is right-continuous, and the
    final instant takes the last interval's value.
    """
    controls = np.asarray(controls, dtype=float)
    n = len(controls)
    t0, t1 = float(times[0]), float(times[-1])
    idx = np.clip(
        np.floor((np.asarray(times) - t0) / (t1 - t0) * n).astype(int), 0, n - 1
    )
    return controls[idx]


def cost(
    traj: Trajectory,
    controls,
    dynamics: CompetitionParams,
    model: CostModel | None = None,
) -> float:
    """Trapezoid quadrature of the running cost along a trajectory.

    controls may be per-sample (same length as traj.times) or
    per-interval on the uniform grid implied by its length.
    """
    if model is None:
        model = CostModel.for_dynamics(dynamics)
    controls = np.asarray(controls, dtype=float)
    if controls.ndim == 0:
        u_nodes = np.full(len(traj.times), float(controls))
    elif len(controls) == len(traj.times):
        u_nodes = controls
    else:
        u_nodes = controls_at_times(traj.times, controls)
    k = dynamics.shared_capacity
    dens = (
        ((traj.healthy - k) / model.healthy_scale) ** 2
        + (traj.cancer / model.cancer_scale) ** 2
        + model.control_weight * u_nodes**2
    )
    return _trapezoid(dens, traj.times)


def hamiltonian_control(
    adjoint: tuple[float, float],
    control: ControlParams,
    state,
    model: CostModel,
) -> float:
    """Pointwise minimiser of the Hamiltonian over the intensity box.

    The Hamiltonian is quadratic in u with positive curvature, so the
    minimiser is the clamped stationary point.
    """
    if isinstance(state, State):
        h, c = state.healthy, state.cancer
    else:
        h, c = state
    p_h, p_c = adjoint
    raw = (
        p_h * control.healthy_kill_coeff * h + p_c * control.cancer_kill_coeff * c
    ) / (2.0 * model.control_weight)
    return float(min(max(raw, 0.0), control.max_intensity))


def adjoint_rhs(
    dynamics: CompetitionParams,
    control: ControlParams,
    model: CostModel,
    state,
    adjoint: tuple[float, float],
    intensity: float,
) -> tuple[float, float]:
    """Time derivative of the adjoint pair along a state trajectory."""
    if isinstance(state, State):
        h, c = state.healthy, state.cancer
    else:
        h, c = state
    p_h, p_c = adjoint
    rh, rc = dynamics.healthy_rate, dynamics.cancer_rate
    k = dynamics.shared_capacity
    gamma = dynamics.competition_coeff
    lam = control.healthy_kill_coeff
    mu = control.cancer_kill_coeff
    u = intensity
    a00 = rh * (1.0 - (2.0 * h + c) / k) - gamma * c - lam * u
    a01 = -h * (rh / k + gamma)
    a10 = -rc * c / k
    a11 = rc * (1.0 - (h + 2.0 * c) / k) - mu * u
    dl_dh = 2.0 * (h - k) / model.healthy_scale**2
    dl_dc = 2.0 * c / model.cancer_scale**2
    return (
        -(dl_dh + a00 * p_h + a10 * p_c),
        -(dl_dc + a01 * p_h + a11 * p_c),
    )


# ---------------------------------------------------------------------------
# rollouts on the fixed grid
# ---------------------------------------------------------------------------

def _unpack(setup: OCPSetup):
    d, c = setup.dynamics, setup.control
    return (
        d.healthy_rate,
        d.cancer_rate,
        d.shared_capacity,
        d.competition_coeff,
        c.healthy_kill_coeff,
        c.cancer_kill_coeff,
    )


def forward_rollout(setup: OCPSetup, controls: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 rollout of the controlled dynamics.

    Returns (times, states) on the refined node grid; controls has one
    value per interval and is held constant across each interval's
    substeps.
    """
    rh, rc, k, gamma, lam, mu = _unpack(setup)
    refine = setup.refine
    n_steps = setup.n_intervals * refine
    h_step = setup.step
    states = np.empty((n_steps + 1, 2))
    hv, cv = setup.initial.healthy, setup.initial.cancer
    states[0] = (hv, cv)

    def f(h: float, c: float, u: float) -> tuple[float, float]:
        crowd = 1.0 - (h + c) / k
        return (
            rh * crowd * h - gamma * h * c - lam * u * h,
            rc * crowd * c - mu * u * c,
        )

    for j in range(n_steps):
        u = controls[j // refine]
        k1h, k1c = f(hv, cv, u)
        k2h, k2c = f(hv + 0.5 * h_step * k1h, cv + 0.5 * h_step * k1c, u)
        k3h, k3c = f(hv + 0.5 * h_step * k2h, cv + 0.5 * h_step * k2c, u)
        k4h, k4c = f(hv + h_step * k3h, cv + h_step * k3c, u)
        hv += (h_step / 6.0) * (k1h + 2.0 * k2h + 2.0 * k3h + k4h)
        cv += (h_step / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        states[j + 1] = (hv, cv)

    return setup.node_times(), states


def backward_rollout(
    setup: OCPSetup,
    states: np.ndarray,
    controls: np.ndarray,
) -> np.ndarray:
    """RK4 integration of the adjoint system backward from zero.

    Stage states at half steps are linear interpolants of the stored
    forward solution.
    """
    assert setup.cost is not None
    rh, rc, k, gamma, lam, mu = _unpack(setup)
    sh2 = setup.cost.healthy_scale**2
    sc2 = setup.cost.cancer_scale**2
    refine = setup.refine
    n_steps = setup.n_intervals * refine
    h_step = setup.step
    adjoints = np.zeros((n_steps + 1, 2))

    def g(h: float, c: float, ph: float, pc: float, u: float) -> tuple[float, float]:
        a00 = rh * (1.0 - (2.0 * h + c) / k) - gamma * c - lam * u
        a01 = -h * (rh / k + gamma)
        a10 = -rc * c / k
        a11 = rc * (1.0 - (h + 2.0 * c) / k) - mu * u
        return (
            -(2.0 * (h - k) / sh2 + a00 * ph + a10 * pc),
            -(2.0 * c / sc2 + a01 * ph + a11 * pc),
        )

    ph, pc = 0.0, 0.0
    for j in range(n_steps - 1, -1, -1):
        u = controls[j // refine]
        h1, c1 = states[j + 1]
        h0, c0 = states[j]
        hm, cm = 0.5 * (h0 + h1), 0.5 * (c0 + c1)
        k1h, k1c = g(h1, c1, ph, pc, u)
        k2h, k2c = g(hm, cm, ph - 0.5 * h_step * k1h, pc - 0.5 * h_step * k1c, u)
        k3h, k3c = g(hm, cm, ph - 0.5 * h_step * k2h, pc - 0.5 * h_step * k2c, u)
        k4h, k4c = g(h0, c0, ph - h_step * k3h, pc - h_step * k3c, u)
        ph -= (h_step / 6.0) * (k1h + 2.0 * k2h + 2.0 * k3h + k4h)
        pc -= (h_step / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        adjoints[j] = (ph, pc)

    return adjoints


def _node_controls(setup: OCPSetup, controls: np.ndarray) -> np.ndarray:
    idx = np.minimum(np.arange(setup.n_nodes) // setup.refine, setup.n_intervals - 1)
    return np.asarray(controls)[idx]


def _quadrature_objective(setup: OCPSetup, states: np.ndarray, controls: np.ndarray) -> float:
    assert setup.cost is not None
    model = setup.cost
    k = setup.dynamics.shared_capacity
    u_nodes = _node_controls(setup, controls)
    dens = (
        ((states[:, 0] - k) / model.healthy_scale) ** 2
        + (states[:, 1] / model.cancer_scale) ** 2
        + model.control_weight * u_nodes**2
    )
    w = np.full(len(dens), setup.step)
    w[0] = w[-1] = 0.5 * setup.step
    return float(np.dot(w, dens))


def objective_and_gradient(
    setup: OCPSetup, controls: np.ndarray
) -> tuple[float, np.ndarray]:
    """Objective of the RK4 transcription and its exact gradient.

    The gradient is the discrete adjoint of the rollout itself: the
    reverse sweep walks back through the four RK4 stages of every step,
    so it matches finite differences of the transcribed objective to
    roundoff rather than to discretisation error.
    """
    assert setup.cost is not None
    rh, rc, k, gamma, lam, mu = _unpack(setup)
    model = setup.cost
    sh2 = model.healthy_scale**2
    sc2 = model.cancer_scale**2
    refine = setup.refine
    n = setup.n_intervals
    n_steps = n * refine
    h_step = setup.step

    def f(h: float, c: float, u: float) -> tuple[float, float]:
        crowd = 1.0 - (h + c) / k
        return (
            rh * crowd * h - gamma * h * c - lam * u * h,
            rc * crowd * c - mu * u * c,
        )

    # forward pass, keeping every stage state for the reverse sweep
    s1 = np.empty((n_steps + 1, 2))
    s2 = np.empty((n_steps, 2))
    s3 = np.empty((n_steps, 2))
    s4 = np.empty((n_steps, 2))
    hv, cv = setup.initial.healthy, setup.initial.cancer
    s1[0] = (hv, cv)
    for j in range(n_steps):
        u = controls[j // refine]
        k1h, k1c = f(hv, cv, u)
        h2, c2 = hv + 0.5 * h_step * k1h, cv + 0.5 * h_step * k1c
        k2h, k2c = f(h2, c2, u)
        h3, c3 = hv + 0.5 * h_step * k2h, cv + 0.5 * h_step * k2c
        k3h, k3c = f(h3, c3, u)
        h4, c4 = hv + h_step * k3h, cv + h_step * k3c
        k4h, k4c = f(h4, c4, u)
        s2[j] = (h2, c2)
        s3[j] = (h3, c3)
        s4[j] = (h4, c4)
        hv += (h_step / 6.0) * (k1h + 2.0 * k2h + 2.0 * k3h + k4h)
        cv += (h_step / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        s1[j + 1] = (hv, cv)

    objective = _quadrature_objective(setup, s1, controls)

    grad = np.zeros(n)
    # direct dependence of the quadrature on u
    u_nodes = _node_controls(setup, controls)
    w_quad = np.full(n_steps + 1, h_step)
    w_quad[0] = w_quad[-1] = 0.5 * h_step
    node_interval = np.minimum(np.arange(n_steps + 1) // refine, n - 1)
    np.add.at(grad, node_interval, w_quad * 2.0 * model.control_weight * u_nodes)

    def jac(h: float, c: float, u: float) -> tuple[float, float, float, float]:
        return (
            rh * (1.0 - (2.0 * h + c) / k) - gamma * c - lam * u,
            -h * (rh / k + gamma),
            -rc * c / k,
            rc * (1.0 - (h + 2.0 * c) / k) - mu * u,
        )

    # reverse sweep; w accumulates d(objective)/d(node state)
    hN, cN = s1[n_steps]
    wh = 0.5 * h_step * 2.0 * (hN - k) / sh2
    wc = 0.5 * h_step * 2.0 * cN / sc2
    for j in range(n_steps - 1, -1, -1):
        i = j // refine
        u = controls[i]
        h1, c1 = s1[j]
        h2, c2 = s2[j]
        h3, c3 = s3[j]
        h4, c4 = s4[j]

        kb4h, kb4c = (h_step / 6.0) * wh, (h_step / 6.0) * wc
        a00, a01, a10, a11 = jac(h4, c4, u)
        sb4h = a00 * kb4h + a10 * kb4c
        sb4c = a01 * kb4h + a11 * kb4c

        kb3h = (h_step / 3.0) * wh + h_step * sb4h
        kb3c = (h_step / 3.0) * wc + h_step * sb4c
        a00, a01, a10, a11 = jac(h3, c3, u)
        sb3h = a00 * kb3h + a10 * kb3c
        sb3c = a01 * kb3h + a11 * kb3c

        kb2h = (h_step / 3.0) * wh + 0.5 * h_step * sb3h
        kb2c = (h_step / 3.0) * wc + 0.5 * h_step * sb3c
        a00, a01, a10, a11 = jac(h2, c2, u)
        sb2h = a00 * kb2h + a10 * kb2c
        sb2c = a01 * kb2h + a11 * kb2c

        kb1h = (h_step / 6.0) * wh + 0.5 * h_step * sb2h
        kb1c = (h_step / 6.0) * wc + 0.5 * h_step * sb2c
        a00, a01, a10, a11 = jac(h1, c1, u)
        sb1h = a00 * kb1h + a10 * kb1c
        sb1c = a01 * kb1h + a11 * kb1c

        # control enters every stage through the kill terms
        grad[i] += (
            kb1h * (-lam * h1) + kb1c * (-mu * c1)
            + kb2h * (-lam * h2) + kb2c * (-mu * c2)
            + kb3h * (-lam * h3) + kb3c * (-mu * c3)
            + kb4h * (-lam * h4) + kb4c * (-mu * c4)
        )

        wh = wh + sb1h + sb2h + sb3h + sb4h
        wc = wc + sb1c + sb2c + sb3c + sb4c
        # quadrature weight of node j
        wq = h_step if j > 0 else 0.5 * h_step
        wh += wq * 2.0 * (h1 - k) / sh2
        wc += wq * 2.0 * c1 / sc2

    return objective, grad


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------

def solve_fbsm(
    setup: OCPSetup,
    relaxation: float = 0.5,
    tol: float = 1e-6,
    max_iter: int = 500,
) -> OCPSolution:
    """Forward-backward sweep iteration on the optimality system.

    Starts from zero intensity.  Each sweep relaxes the control toward
    the Hamiltonian minimiser sampled at interval midpoints; when the
    update norm rises for three sweeps in a row the relaxation factor is
    halved.  Non-convergence is reported on the solution, not raised.
    """
    assert setup.cost is not None
    if not (0.0 < relaxation <= 1.0):
        raise ConfigError("relaxation must lie in (0, 1]")
    lam = setup.control.healthy_kill_coeff
    mu = setup.control.cancer_kill_coeff
    u_max = setup.control.max_intensity
    two_w = 2.0 * setup.cost.control_weight
    refine = setup.refine
    mids = np.arange(setup.n_intervals) * refine + refine // 2

    u = np.zeros(setup.n_intervals)
    relax = relaxation
    prev_delta = np.inf
    rise_streak = 0
    delta = np.inf
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        _, states = forward_rollout(setup, u)
        adjoints = backward_rollout(setup, states, u)
        sigma = (
            adjoints[mids, 0] * lam * states[mids, 0]
            + adjoints[mids, 1] * mu * states[mids, 1]
        ) / two_w
        proposal = np.clip(sigma, 0.0, u_max)
        u_new = (1.0 - relax) * u + relax * proposal
        delta = float(np.max(np.abs(u_new - u)))
        u = u_new
        if delta < tol:
            converged = True
            break
        if delta > prev_delta:
            rise_streak += 1
            if rise_streak >= 3:
                relax = max(0.5 * relax, 1.0 / 64.0)
                rise_streak = 0
        else:
            rise_streak = 0
        prev_delta = delta

    times, states = forward_rollout(setup, u)
    adjoints = backward_rollout(setup, states, u)
    objective = _quadrature_objective(setup, states, u)
    message = "" if converged else (
        f"no convergence in {max_iter} sweeps, last update {delta:.3e}"
    )
    return OCPSolution(
        times=times,
        states=states,
        control=u,
        objective=objective,
        total_dose=float(np.sum(u) * setup.horizon / setup.n_intervals),
        solver=SOLVER_INDIRECT,
        converged=converged,
        iterations=iterations,
        final_update_norm=delta,
        message=message,
        adjoints=adjoints,
    )


def solve_direct(
    setup: OCPSetup,
    ftol: float = 1e-11,
    max_iter: int = 500,
) -> OCPSolution:
    """Bound-constrained quasi-Newton descent on the transcription."""
    u_max = setup.control.max_intensity
    x0 = np.full(setup.n_intervals, 0.5 * u_max)
    history: list[float] = []

    def fun(x: np.ndarray) -> tuple[float, np.ndarray]:
        return objective_and_gradient(setup, x)

    def record(xk: np.ndarray) -> None:
        _, states = forward_rollout(setup, xk)
        history.append(_quadrature_objective(setup, states, xk))

    result = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=[(0.0, u_max)] * setup.n_intervals,
        callback=record,
        options={"maxiter": max_iter, "ftol": ftol},
    )

    u = np.clip(result.x, 0.0, u_max)
    times, states = forward_rollout(setup, u)
    objective = _quadrature_objective(setup, states, u)
    grad_norm = float(np.max(np.abs(result.jac))) if result.jac is not None else np.nan
    return OCPSolution(
        times=times,
        states=states,
        control=u,
        objective=objective,
        total_dose=float(np.sum(u) * setup.horizon / setup.n_intervals),
        solver=SOLVER_DIRECT,
        converged=bool(result.success),
        iterations=int(result.nit),
        final_update_norm=grad_norm,
        message=str(result.message),
        objective_history=np.asarray(history),
    )


def pontryagin_residual(setup: OCPSetup, solution: OCPSolution) -> float:
    """Largest gap between the control and the Hamiltonian minimiser.

    Evaluated at interval midpoints from the solution's own adjoints;
    meaningful for the indirect solver.
    """
    assert setup.cost is not None
    if solution.adjoints is None:
        raise ConfigError("solution carries no adjoints")
    refine = setup.refine
    mids = np.arange(setup.n_intervals) * refine + refine // 2
    worst = 0.0
    for i, m in enumerate(mids):
        u_star = hamiltonian_control(
            (solution.adjoints[m, 0], solution.adjoints[m, 1]),
            setup.control,
            (solution.states[m, 0], solution.states[m, 1]),
            setup.cost,
        )
        worst = max(worst, abs(u_star - solution.control[i]))
    return worst


# ---------------------------------------------------------------------------
# dose accounting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DoseRow:
    """One interval of one protocol in a dose comparison table."""

    scenario: str
    protocol: str
    start: float       # days
    end: float         # days
    intensity: float
    interval_dose: float   # intensity-days
    total_dose: float      # intensity-days, whole protocol


def dose_report(
    solutions: list[OCPSolution],
    labels: list[str] | None = None,
    constant_intensity: float | None = None,
) -> list[DoseRow]:
    """Interval-by-interval dose table for solved schedules.

    Optionally adds a constant-intensity reference protocol per scenario.
    All solutions must share one horizon.
    """
    if not solutions:
        raise ConfigError("dose_report needs at least one solution")
    if labels is None:
        labels = [f"scenario_{i + 1}" for i in range(len(solutions))]
    if len(labels) != len(solutions):
        raise ConfigError("labels and solutions differ in length")
    horizon = solutions[0].horizon
    for sol in solutions[1:]:
        if abs(sol.horizon - horizon) > 1e-9:
            raise ConfigError("solutions disagree on the horizon")

    rows: list[DoseRow] = []
    for label, sol in zip(labels, solutions):
        n = len(sol.control)
        width = horizon / n
        total = float(np.sum(sol.control) * width)
        for i, ui in enumerate(sol.control):
            rows.append(
                DoseRow(
                    scenario=label,
                    protocol=sol.solver,
                    start=i * width,
                    end=(i + 1) * width,
                    intensity=float(ui),
                    interval_dose=float(ui) * width,
                    total_dose=total,
                )
            )
        if constant_intensity is not None:
            rows.append(
                DoseRow(
                    scenario=label,
                    protocol="constant",
                    start=0.0,
                    end=horizon,
                    intensity=float(constant_intensity),
                    interval_dose=float(constant_intensity) * horizon,
                    total_dose=float(constant_intensity) * horizon,
                )
            )
    return rows
