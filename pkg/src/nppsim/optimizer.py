"""Multi-start bounded derivative-free minimization with exact call counting.

Every variational loop in the package funnels through multistart_minimize:
seeded uniform starts inside the box, a budget-capped local method per
start, then an optional chained refinement of the best few candidates.  The
objective wrapper counts every call (including probes inside line searches
and simplex moves) and enforces the per-start budget exactly, so the
reported evaluation totals are trustworthy inputs to efficiency ratios.

Local methods: bounded Nelder-Mead (simplex projected into the box) and
bounded Powell line search.  Nelder-Mead is the least-assumption default
for the raw API; the experiment problems built by default_problem_for use
Powell plus refinement because measured basin statistics on deep adaptive
circuits show the simplex stalling far from the optima the headline
results require.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.optimize

from .hamiltonians import DriveSpec, ScheduleSpec, build_hp
from .instances import NppInstance
from .qa import QaConfig, evolve_amplitudes
from .qaoa import GAMMA_MAX, GAMMA_MAX_ADAPTIVE, AnsatzEvaluator, QaoaParams

logger = logging.getLogger(__name__)

ALGORITHMS = ("qa-path", "qa-fields", "qaoa", "qaoa-adaptive")

H_FIELD_FLOOR = 1e-6  # realizes the open bound h_i > 0 inside a closed box


class _BudgetExhausted(Exception):
    pass


class _NonFiniteObjective(Exception):
    pass


@dataclass
class OptProblem:
    """A bounded minimization task plus its multistart budget.

    custom_starts entries override the seeded uniform draws positionally;
    NaN coordinates keep the random draw (used to pin only part of a start,
    e.g. the ansatz weights while leaving durations random).

    pin_start_coords fixes (index, value) coordinates of every random
    start before custom-start overrides apply.  It redistributes start
    density, not the search region: local runs still move freely inside
    the box.  Used where a continuous symmetry of the objective makes a
    coordinate's uniform draw redundant (each adaptive-circuit start drawn
    at gamma < ceiling duplicates a start at the ceiling with shrunken
    alpha, so uniform gamma sampling wastes most starts on low-coupling
    copies of the same circuit family).
    """

    dim: int
    lower: np.ndarray
    upper: np.ndarray
    objective: Callable[[np.ndarray], float]
    restarts: int = 50
    max_eval_per_start: int = 2000
    seed: int = 0
    method: str = "nelder-mead"
    custom_starts: tuple = ()
    polish_top: int = 0
    polish_max_eval: int = 20000
    polish_rounds: int = 6
    pin_start_coords: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=np.float64)
        self.upper = np.asarray(self.upper, dtype=np.float64)
        if self.lower.shape != (self.dim,) or self.upper.shape != (self.dim,):
            raise ValueError("bounds must match dim")
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValueError("bounds must be finite")
        if np.any(self.lower >= self.upper):
            raise ValueError("need lower < upper in every coordinate")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.method not in ("nelder-mead", "powell"):
            raise ValueError(f"unknown local method '{self.method}'")
        for i, v in self.pin_start_coords:
            if not 0 <= i < self.dim:
                raise ValueError(f"pinned start coordinate {i} outside dim {self.dim}")
            if not self.lower[i] <= v <= self.upper[i]:
                raise ValueError(f"pinned start value {v} at coordinate {i} violates bounds")


@dataclass(frozen=True)
class RestartTrace:
    """One local run: where it started, where it ended, what it cost."""

    start: np.ndarray
    value: float
    n_eval: int
    status: str  # "ok" | "budget" | "aborted"
    phase: str  # "start" | "polish"


@dataclass(frozen=True)
class OptOutcome:
    best_params: np.ndarray
    best_value: float
    n_eval_total: int
    traces: tuple[RestartTrace, ...] = field(repr=False, default=())


class _CountingObjective:
    """Counts calls, tracks the best point seen, enforces the budget."""

    def __init__(self, fn, limit: int):
        self.fn = fn
        self.limit = limit
        self.count = 0
        self.best_f = np.inf
        self.best_x: np.ndarray | None = None

    def __call__(self, x):
        if self.count >= self.limit:
            raise _BudgetExhausted
        self.count += 1
        f = float(self.fn(np.asarray(x, dtype=np.float64)))
        if not np.isfinite(f):
            raise _NonFiniteObjective
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x, dtype=np.float64)
        return f


_TIGHT = {"nelder-mead": {"xatol": 1e-10, "fatol": 1e-14},
          "powell": {"xtol": 1e-10, "ftol": 1e-14}}
_LOOSE = {"nelder-mead": {"xatol": 1e-6, "fatol": 1e-9},
          "powell": {"xtol": 1e-6, "ftol": 1e-9}}


def _local_run(prob: OptProblem, x0: np.ndarray, limit: int,
               tight: bool) -> tuple[float, np.ndarray | None, int, str]:
    """One budget-capped local run: (best value, best point, evals, status)."""
    scipy_method = "Nelder-Mead" if prob.method == "nelder-mead" else "Powell"
    options = dict(_TIGHT[prob.method] if tight else _LOOSE[prob.method])
    options["maxfev"] = limit
    wrapper = _CountingObjective(prob.objective, limit)
    status = "ok"
    try:
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", category=scipy.optimize.OptimizeWarning)
            warnings.filterwarnings("ignore", category=RuntimeWarning,
                                    message=".*[Mm]aximum number of function evaluations.*")
            scipy.optimize.minimize(
                wrapper, x0, method=scipy_method,
                bounds=list(zip(prob.lower, prob.upper)), options=options,
            )
    except _BudgetExhausted:
        status = "budget"
    except _NonFiniteObjective:
        status = "aborted"
        logger.warning("restart at %s aborted: objective returned a non-finite value", x0)
    point = wrapper.best_x
    if point is not None:
        point = np.clip(point, prob.lower, prob.upper)
    return wrapper.best_f, point, wrapper.count, status


def multistart_minimize(prob: OptProblem) -> OptOutcome:
    """Seeded multistart local search; deterministic for a fixed problem.

    Phase one runs every start under max_eval_per_start.  When polish_top
    is positive, phase two re-launches the best candidates with tightened
    tolerances and a polish_max_eval budget, chaining up to polish_rounds
    runs each while the value keeps improving.  Calls from both phases are
    counted in n_eval_total and itemized in traces; best_value equals the
    minimum over all trace values.
    """
    rng = np.random.Generator(np.random.Philox(key=prob.seed))
    starts = rng.uniform(prob.lower, prob.upper, size=(prob.restarts, prob.dim))
    for i, v in prob.pin_start_coords:
        starts[:, i] = v
    for i, custom in enumerate(prob.custom_starts[: prob.restarts]):
        custom = np.asarray(custom, dtype=np.float64)
        mask = np.isfinite(custom)
        starts[i][mask] = custom[mask]
        if np.any(starts[i] < prob.lower) or np.any(starts[i] > prob.upper):
            raise ValueError(f"custom start {i} violates bounds")

    traces: list[RestartTrace] = []
    endpoints: list[np.ndarray | None] = []  # aligned with traces
    n_eval_total = 0
    for x0 in starts:
        value, point, count, status = _local_run(prob, x0, prob.max_eval_per_start, tight=False)
        n_eval_total += count
        traces.append(RestartTrace(np.array(x0), value, count, status, "start"))
        endpoints.append(point)

    if prob.polish_top > 0:
        order = np.argsort([t.value for t in traces], kind="stable")
        for idx in order[: prob.polish_top]:
            x = endpoints[idx]
            prev = traces[idx].value
            if x is None:
                continue
            for _ in range(prob.polish_rounds):
                value, point, count, status = _local_run(prob, x, prob.polish_max_eval, tight=True)
                n_eval_total += count
                traces.append(RestartTrace(np.array(x), value, count, status, "polish"))
                endpoints.append(point)
                improved = point is not None and value < prev - max(1e-16, 1e-12 * abs(prev))
                if point is not None and value < prev:
                    x, prev = point, value
                if not improved:
                    break

    best_i = None
    for i, t in enumerate(traces):
        if endpoints[i] is not None and (best_i is None or t.value < traces[best_i].value):
            best_i = i
    if best_i is None:
        raise RuntimeError("every restart aborted; no finite objective value seen")
    return OptOutcome(
        best_params=endpoints[best_i],
        best_value=traces[best_i].value,
        n_eval_total=n_eval_total,
        traces=tuple(traces),
    )


def default_problem_for(
    algorithm: str,
    inst: NppInstance,
    p: int | None = None,
    C: int = 6,
    T: float = 50.0,
    seed: int = 0,
    restarts: int | None = None,
    max_eval_per_start: int | None = None,
    opt_dt: float | None = None,
    method: str = "powell",
    polish_top: int | None = None,
) -> OptProblem:
    """The experiment search space and budget for one algorithm variant.

    Bounds and restart counts follow the study settings: sine-path
    coefficients b in [-1, 1]^C with 50 starts; per-qubit fields h in
    (0, 1]^n (floor 1e-6) with 50 starts; circuit durations beta in
    [0, pi/2]^p and gamma in [0, pi]^p with 200 starts; adaptive weights
    alpha in [-0.5, 0.5]^n appended to the duration box, with the gamma
    ceiling widened to 4 pi (the gamma-alpha scale coupling makes that
    the smallest box containing every standard circuit).  Adaptive gamma
    starts are pinned at the ceiling, where the alpha box covers the
    widest set of distinct circuits, and one start seeds alpha at the
    instance weights rescaled into the box; betas stay random.

    opt_dt coarsens the integration step used inside the annealing
    objectives; final metrics should be re-evaluated at the reporting step.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm '{algorithm}', expected one of {ALGORITHMS}")
    n = inst.n
    hp = build_hp(inst)
    pins: tuple[tuple[int, float], ...] = ()

    if algorithm == "qa-path":
        dim = C
        lower, upper = np.full(dim, -1.0), np.full(dim, 1.0)
        restarts = 50 if restarts is None else restarts
        max_eval = 800 if max_eval_per_start is None else max_eval_per_start
        polish = 3 if polish_top is None else polish_top
        polish_max_eval = 4000
        drive = DriveSpec.uniform(n)

        def objective(x: np.ndarray) -> float:
            # line searches can overshoot the box by an ulp; specs validate hard
            x = np.clip(x, -1.0, 1.0)
            cfg = QaConfig(total_time=T, dt=opt_dt,
                           schedule=ScheduleSpec(T, tuple(x)), drive=drive)
            amps = evolve_amplitudes(hp, cfg)
            return float(hp.diag.diag @ (amps.real ** 2 + amps.imag ** 2))

        custom_starts: tuple = ()

    elif algorithm == "qa-fields":
        dim = n
        lower, upper = np.full(dim, H_FIELD_FLOOR), np.full(dim, 1.0)
        restarts = 50 if restarts is None else restarts
        max_eval = 800 if max_eval_per_start is None else max_eval_per_start
        polish = 3 if polish_top is None else polish_top
        polish_max_eval = 4000
        schedule = ScheduleSpec.linear(T)

        def objective(x: np.ndarray) -> float:
            x = np.clip(x, H_FIELD_FLOOR, 1.0)
            cfg = QaConfig(total_time=T, dt=opt_dt,
                           schedule=schedule, drive=DriveSpec(tuple(x)))
            amps = evolve_amplitudes(hp, cfg)
            return float(hp.diag.diag @ (amps.real ** 2 + amps.imag ** 2))

        custom_starts = ()

    else:
        if p is None or p < 1:
            raise ValueError("circuit optimization needs a layer count p >= 1")
        adaptive = algorithm == "qaoa-adaptive"
        dim = 2 * p + (n if adaptive else 0)
        gamma_max = GAMMA_MAX_ADAPTIVE if adaptive else GAMMA_MAX
        lower = np.concatenate([np.zeros(2 * p), np.full(n, -0.5)])[:dim]
        upper = np.concatenate([np.full(p, np.pi / 2), np.full(p, gamma_max),
                                np.full(n, 0.5)])[:dim]
        restarts = 200 if restarts is None else restarts
        max_eval = 2000 if max_eval_per_start is None else max_eval_per_start
        polish = 5 if polish_top is None else polish_top
        polish_max_eval = 20000
        evaluator = AnsatzEvaluator(inst, hp)

        def objective(x: np.ndarray) -> float:
            params = QaoaParams(
                beta=tuple(x[:p]),
                gamma=tuple(x[p:2 * p]),
                alpha=tuple(x[2 * p:]) if adaptive else None,
            )
            return evaluator.cost(params, enforce_bounds=False)

        custom_starts = ()
        if adaptive:
            w = np.asarray(inst.weights)
            scale = min(1.0, 0.5 / w.max())
            seed_start = np.full(dim, np.nan)
            seed_start[2 * p:] = w * scale
            custom_starts = (seed_start,)
            # A draw at gamma < ceiling generates the same circuit as a
            # ceiling draw with alpha shrunk by the coupling scale, so
            # uniform gamma sampling would spend most starts on duplicates.
            pins = tuple((p + k, gamma_max) for k in range(p))

    return OptProblem(
        dim=dim,
        lower=lower,
        upper=upper,
        objective=objective,
        restarts=restarts,
        max_eval_per_start=max_eval,
        seed=seed,
        method=method,
        custom_starts=custom_starts,
        pin_start_coords=pins,
        polish_top=polish,
        polish_max_eval=polish_max_eval,
    )
