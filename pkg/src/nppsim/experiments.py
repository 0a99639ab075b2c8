"""Experiment orchestration: banks, sweeps, records, aggregates, CSV output.

One cell is (algorithm, instance, depth).  Cells are independent and run in
a process pool when jobs > 1; rows are sorted by key before writing so the
output is byte-identical regardless of scheduling.  Every row carries the
seeds and budgets needed to regenerate it.
"""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import optimizer, qaoa, spectra
from .hamiltonians import DriveSpec, ScheduleSpec, schedule_lambda
from .instances import NppInstance, generate_instance, load_instances
from .qa import QaConfig, evolve
from .qaoa import AnsatzEvaluator, QaoaParams

try:
    from importlib.metadata import version as _pkg_version

    CODE_VERSION = _pkg_version("nppsim")
except Exception:  # pragma: no cover - metadata missing in odd installs
    CODE_VERSION = "unknown"

ALGORITHMS = ("qa",) + optimizer.ALGORITHMS
RESTART_DEFAULTS = {"qa-path": 50, "qa-fields": 50, "qaoa": 200, "qaoa-adaptive": 200}
P_MIN_TARGET = 0.99

RUN_HEADER = [
    "algorithm", "n", "instance_seed", "p", "epsilon", "p_success",
    "duration", "n_eval", "i_eff", "wall_time", "code_version", "best_params",
]
AGG_HEADER = [
    "algorithm", "n", "p", "count", "mean_epsilon", "mean_p_success",
    "mean_duration", "mean_n_eval", "mean_i_eff",
]
SPECTRA_HEADER = [
    "n", "instance_seed", "drive_setting", "relevant_gap", "argmin_lambda",
    "degeneracy", "n_quasi", "n_quasi_levels", "delta", "lam_min", "lam_max",
]
REFF_HEADER = [
    "n", "p", "instance_seed", "i_eff_standard", "i_eff_adaptive", "r_eff", "baseline",
]
PMIN_HEADER = ["n", "p_min", "mean_p_success", "mean_t_qaoa"]
FAIL_HEADER = ["algorithm", "n", "instance_seed", "p", "error"]


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: an algorithm over sizes x instances (x depths for circuits)."""

    algorithm: str
    sizes: tuple[int, ...] = (6, 7, 8, 9, 10)
    instances_per_size: int = 10
    seed: int = 1
    T: float = 50.0
    C: int = 6
    p_max: int = 10
    delta: float = 0.1
    restarts: int | None = None
    budget: float = 1.0
    jobs: int = 1
    dt_divisor: int = 1000
    opt_dt_divisor: int = 250
    method: str = "powell"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm '{self.algorithm}'")
        if not self.budget > 0:
            raise ValueError("budget must be positive")
        if self.p_max < 1:
            raise ValueError("p_max must be >= 1")

    def effective_restarts(self) -> int:
        base = self.restarts
        if base is None:
            base = RESTART_DEFAULTS.get(self.algorithm, 50)
        return max(1, round(base * self.budget))


@dataclass(frozen=True)
class RunRecord:
    """One (algorithm, instance, depth) result row."""

    algorithm: str
    n: int
    instance_seed: int
    p: int | None
    epsilon: float
    p_success: float
    duration: float
    n_eval: int
    wall_time: float
    best_params: dict = field(default_factory=dict)
    code_version: str = CODE_VERSION

    @property
    def i_eff(self) -> float:
        return self.p_success / self.n_eval if self.n_eval > 0 else float("nan")

    def to_row(self) -> list:
        return [
            self.algorithm, self.n, self.instance_seed,
            "" if self.p is None else self.p,
            repr(self.epsilon), repr(self.p_success), repr(self.duration),
            self.n_eval, repr(self.i_eff), f"{self.wall_time:.3f}",
            self.code_version, json.dumps(self.best_params, sort_keys=True),
        ]


def derive_seed(*parts: int) -> int:
    """Stable child seed from integer coordinates (master, n, index, ...)."""
    return int(np.random.SeedSequence(tuple(int(v) for v in parts)).generate_state(1, np.uint64)[0])


def generate_bank(sizes, count: int, master_seed: int) -> list[NppInstance]:
    """count instances per size, seeds derived from (master, n, index)."""
    bank = []
    for n in sizes:
        for i in range(count):
            bank.append(generate_instance(n, derive_seed(master_seed, n, i)))
    return bank


_ALGO_INDEX = {name: i for i, name in enumerate(ALGORITHMS)}


def _cell_seed(cfg: ExperimentConfig, inst: NppInstance, p: int | None) -> int:
    return derive_seed(cfg.seed, _ALGO_INDEX[cfg.algorithm], inst.n, inst.seed, p or 0)


def run_cell(inst: NppInstance, cfg: ExperimentConfig, p: int | None = None) -> RunRecord:
    """Execute one cell: anneal or optimize, then report fine-grained metrics."""
    t0 = time.perf_counter()
    algo = cfg.algorithm
    dt = cfg.T / cfg.dt_divisor
    if algo == "qa":
        res = evolve(inst, QaConfig(total_time=cfg.T, dt=dt))
        return RunRecord(algo, inst.n, inst.seed, None, res.epsilon, res.p_success,
                         cfg.T, 1, time.perf_counter() - t0, {})

    seed = _cell_seed(cfg, inst, p)
    if algo in ("qa-path", "qa-fields"):
        # optimize on a coarser integrator step, then re-evaluate the winner
        # at the reporting step; the landscape shift is O(opt_dt^2)
        prob = optimizer.default_problem_for(
            algo, inst, C=cfg.C, T=cfg.T, seed=seed,
            restarts=cfg.effective_restarts(),
            opt_dt=cfg.T / cfg.opt_dt_divisor, method=cfg.method,
        )
        prob.polish_top = min(prob.polish_top, prob.restarts)
        outcome = optimizer.multistart_minimize(prob)
        x = outcome.best_params
        if algo == "qa-path":
            run_cfg = QaConfig(total_time=cfg.T, dt=dt,
                               schedule=ScheduleSpec(cfg.T, tuple(x)))
            best = {"b": [float(v) for v in x]}
        else:
            run_cfg = QaConfig(total_time=cfg.T, dt=dt, drive=DriveSpec(tuple(x)))
            best = {"h": [float(v) for v in x]}
        res = evolve(inst, run_cfg)
        return RunRecord(algo, inst.n, inst.seed, None, res.epsilon, res.p_success,
                         cfg.T, outcome.n_eval_total, time.perf_counter() - t0, best)

    if p is None:
        raise ValueError(f"algorithm '{algo}' needs a depth p")
    prob = optimizer.default_problem_for(
        algo, inst, p=p, T=cfg.T, seed=seed,
        restarts=cfg.effective_restarts(), method=cfg.method,
    )
    prob.polish_top = min(prob.polish_top, prob.restarts)
    outcome = optimizer.multistart_minimize(prob)
    x = outcome.best_params
    params = QaoaParams(
        beta=tuple(x[:p]), gamma=tuple(x[p:2 * p]),
        alpha=tuple(x[2 * p:]) if algo == "qaoa-adaptive" else None,
    )
    result = AnsatzEvaluator(inst).evaluate(params, n_eval=outcome.n_eval_total)
    best = {"beta": list(params.beta), "gamma": list(params.gamma)}
    if params.alpha is not None:
        best["alpha"] = list(params.alpha)
    return RunRecord(algo, inst.n, inst.seed, p, result.epsilon, result.p_success,
                     result.t_total, outcome.n_eval_total,
                     time.perf_counter() - t0, best)


def _cell_task(args) -> tuple[tuple, RunRecord | None, str | None]:
    inst, cfg, p = args
    key = (cfg.algorithm, inst.n, inst.seed, -1 if p is None else p)
    try:
        return key, run_cell(inst, cfg, p), None
    except Exception as exc:  # cell failures must not kill the sweep
        return key, None, f"{type(exc).__name__}: {exc}"


def run_experiment(cfg: ExperimentConfig, bank: list[NppInstance], out_dir) -> int:
    """Run all cells, write runs/aggregates (plus adaptive extras); returns
    the number of failed cells."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    insts = [i for i in bank if i.n in set(cfg.sizes)]
    if cfg.algorithm in ("qaoa", "qaoa-adaptive"):
        depths: list[int | None] = list(range(1, cfg.p_max + 1))
    else:
        depths = [None]
    cells = [(inst, cfg, p) for inst in insts for p in depths]

    results: list[tuple[tuple, RunRecord | None, str | None]] = []
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_cell_task, cells))
    else:
        results = [_cell_task(c) for c in cells]
    results.sort(key=lambda r: r[0])

    records = [r for _, r, err in results if err is None and r is not None]
    failures = [(key, err) for key, _, err in results if err is not None]

    _write_csv(out / f"runs_{cfg.algorithm}.csv", RUN_HEADER,
               [r.to_row() for r in records])
    _write_csv(out / f"aggregates_{cfg.algorithm}.csv", AGG_HEADER,
               _aggregate_rows(records))
    if cfg.algorithm == "qaoa-adaptive":
        _write_csv(out / "p_min.csv", PMIN_HEADER, _p_min_rows(records))
    if failures:
        _write_csv(out / f"failures_{cfg.algorithm}.csv", FAIL_HEADER,
                   [[key[0], key[1], key[2], "" if key[3] < 0 else key[3], err]
                    for key, err in failures])
    _write_config(out / f"config_{cfg.algorithm}.json", cfg, len(insts))
    _maybe_write_reff(out)
    return len(failures)


def _aggregate_rows(records: list[RunRecord]) -> list[list]:
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.algorithm, r.n, -1 if r.p is None else r.p), []).append(r)
    rows = []
    for (algo, n, p), members in sorted(groups.items()):
        rows.append([
            algo, n, "" if p < 0 else p, len(members),
            repr(float(np.mean([m.epsilon for m in members]))),
            repr(float(np.mean([m.p_success for m in members]))),
            repr(float(np.mean([m.duration for m in members]))),
            repr(float(np.mean([m.n_eval for m in members]))),
            repr(float(np.mean([m.i_eff for m in members]))),
        ])
    return rows


def _p_min_rows(records: list[RunRecord]) -> list[list]:
    """Smallest depth whose ensemble-mean success reaches the 0.99 target."""
    by_np: dict[tuple[int, int], list[RunRecord]] = {}
    for r in records:
        if r.p is not None:
            by_np.setdefault((r.n, r.p), []).append(r)
    rows = []
    for n in sorted({k[0] for k in by_np}):
        found = None
        for p in sorted(p for (nn, p) in by_np if nn == n):
            members = by_np[(n, p)]
            mean_ps = float(np.mean([m.p_success for m in members]))
            if mean_ps >= P_MIN_TARGET:
                found = (p, mean_ps, float(np.mean([m.duration for m in members])))
                break
        if found:
            rows.append([n, found[0], repr(found[1]), repr(found[2])])
        else:
            rows.append([n, "", "", ""])
    return rows


def _maybe_write_reff(out: Path) -> None:
    """Pair adaptive vs standard circuit runs on identical (instance, p) cells."""
    std, ada = out / "runs_qaoa.csv", out / "runs_qaoa-adaptive.csv"
    if not (std.exists() and ada.exists()):
        return
    std_rows = {(r["n"], r["instance_seed"], r["p"]): r for r in _read_csv(std)}
    rows = []
    cells: dict[tuple[int, int], list[tuple[float, float]]] = {}
    for r in _read_csv(ada):
        key = (r["n"], r["instance_seed"], r["p"])
        if key not in std_rows:
            continue
        i_std = float(std_rows[key]["i_eff"])
        i_ada = float(r["i_eff"])
        ratio = i_ada / i_std if i_std > 0 else float("inf")
        rows.append([key[0], key[2], key[1], repr(i_std), repr(i_ada), repr(ratio), 1.0])
        cells.setdefault((int(key[0]), int(key[2])), []).append((i_std, i_ada))
    for (n, p), pairs in sorted(cells.items()):
        mean_std = float(np.mean([a for a, _ in pairs]))
        mean_ada = float(np.mean([b for _, b in pairs]))
        ratio = mean_ada / mean_std if mean_std > 0 else float("inf")
        rows.append([n, p, "mean", repr(mean_std), repr(mean_ada), repr(ratio), 1.0])
    rows.sort(key=lambda row: (int(row[0]), int(row[1]), str(row[2])))
    _write_csv(out / "r_eff.csv", REFF_HEADER, rows)


def run_spectra(
    bank: list[NppInstance],
    out_dir,
    delta: float = 0.1,
    grid_points: int = 201,
    params_from=None,
    sizes: tuple[int, ...] | None = None,
    jobs: int = 1,
) -> int:
    """Relevant-gap and quasi-optimal-count table, one row per drive setting.

    params_from names a directory holding runs_qa-path.csv and/or
    runs_qa-fields.csv; their optimized parameters define the extra drive
    settings (the sine path widens the scanned interpolation range, the
    field optimum replaces the uniform drive).  Without it only the
    standard rows are emitted.  If runs_qa.csv is present, scatter rows
    linking annealing success to the diagnostics are written as well.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    insts = [i for i in bank if sizes is None or i.n in set(sizes)]
    path_params: dict[tuple[int, int], list[float]] = {}
    field_params: dict[tuple[int, int], list[float]] = {}
    qa_success: dict[tuple[int, int], float] = {}
    if params_from is not None:
        base = Path(params_from)
        for row in _read_csv_optional(base / "runs_qa-path.csv"):
            path_params[(int(row["n"]), int(row["instance_seed"]))] = \
                json.loads(row["best_params"]).get("b", [])
        for row in _read_csv_optional(base / "runs_qa-fields.csv"):
            field_params[(int(row["n"]), int(row["instance_seed"]))] = \
                json.loads(row["best_params"]).get("h", [])
        for row in _read_csv_optional(base / "runs_qa.csv"):
            qa_success[(int(row["n"]), int(row["instance_seed"]))] = float(row["p_success"])

    tasks = []
    for inst in insts:
        key = (inst.n, inst.seed)
        tasks.append((inst, "standard", None, delta, grid_points))
        if key in path_params:
            tasks.append((inst, "path-optimized", path_params[key], delta, grid_points))
        if key in field_params:
            tasks.append((inst, "fields-optimized", field_params[key], delta, grid_points))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_spectra_task, tasks))
    else:
        rows = [_spectra_task(t) for t in tasks]
    rows.sort(key=lambda r: (int(r[0]), int(r[1]), str(r[2])))
    _write_csv(out / "spectra.csv", SPECTRA_HEADER, rows)

    if qa_success:
        scatter = []
        for row in rows:
            key = (int(row[0]), int(row[1]))
            if row[2] == "standard" and key in qa_success:
                scatter.append([row[0], row[1], repr(qa_success[key]), row[3], row[6]])
        _write_csv(out / "scatter.csv",
                   ["n", "instance_seed", "p_success_qa", "relevant_gap", "n_quasi"],
                   scatter)
    return 0


def _spectra_task(args) -> list:
    inst, setting, params, delta, grid_points = args
    drive = DriveSpec.uniform(inst.n)
    lam_lo, lam_hi = 0.0, 1.0
    if setting == "path-optimized" and params:
        sched = ScheduleSpec(1.0, tuple(params))
        lams = schedule_lambda(sched, np.linspace(0.0, 1.0, 2001))
        lam_lo, lam_hi = float(np.min(lams)), float(np.max(lams))
    elif setting == "fields-optimized" and params:
        drive = DriveSpec(tuple(params))
    scan = spectra.scan_gap(inst, drive, grid_points=grid_points, delta=delta,
                            lam_min=lam_lo, lam_max=lam_hi)
    n_levels = spectra.count_quasi_optimal(inst, delta, distinct_levels=True)
    return [inst.n, inst.seed, setting, repr(scan.relevant_gap),
            repr(scan.argmin_lambda), scan.d, scan.n_quasi, n_levels,
            repr(delta), repr(float(scan.lambda_grid[0])), repr(float(scan.lambda_grid[-1]))]


def load_bank(path) -> list[NppInstance]:
    return load_instances(path)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _read_csv(path: Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _read_csv_optional(path: Path) -> list[dict]:
    return _read_csv(path) if path.exists() else []


def _write_config(path: Path, cfg: ExperimentConfig, n_instances: int) -> None:
    payload = asdict(cfg)
    payload["sizes"] = list(cfg.sizes)
    payload["effective_restarts"] = cfg.effective_restarts()
    payload["n_instances"] = n_instances
    payload["code_version"] = CODE_VERSION
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
