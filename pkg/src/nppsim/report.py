"""Render summary tables and figures from experiment output directories.

Reads the CSVs written by the run/spectra drivers and produces PNG figures
next to a merged summary table.  Only products whose inputs are present are
rendered; the function reports what it wrote.
"""
from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

QA_ALGOS = ("qa", "qa-path", "qa-fields")
ALGO_LABELS = {
    "qa": "standard anneal",
    "qa-path": "optimized path",
    "qa-fields": "optimized fields",
    "qaoa": "standard circuit",
    "qaoa-adaptive": "adaptive circuit",
}
ALGO_STYLES = {
    "qa": dict(color="tab:blue", marker="o"),
    "qa-path": dict(color="tab:orange", marker="s"),
    "qa-fields": dict(color="tab:green", marker="^"),
    "qaoa": dict(color="tab:red", marker="o"),
    "qaoa-adaptive": dict(color="tab:purple", marker="s"),
}


def _read(path: Path) -> list[dict]:
    if not path.exists():
        return []
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _aggregates(results_dir: Path) -> dict[str, list[dict]]:
    out = {}
    for path in sorted(results_dir.glob("aggregates_*.csv")):
        algo = path.stem.removeprefix("aggregates_")
        rows = _read(path)
        if rows:
            out[algo] = rows
    return out


def render_report(results_dir, out_dir=None) -> list[str]:
    """Write summary.csv and every renderable figure; returns written names."""
    results = Path(results_dir)
    out = Path(out_dir) if out_dir is not None else results
    out.mkdir(parents=True, exist_ok=True)
    agg = _aggregates(results)
    spectra_rows = _read(results / "spectra.csv")
    scatter_rows = _read(results / "scatter.csv")
    reff_rows = _read(results / "r_eff.csv")
    pmin_rows = _read(results / "p_min.csv")
    if not agg and not spectra_rows:
        raise ValueError(f"no experiment tables found under {results}")

    written: list[str] = []
    written.append(_write_summary(out, agg))
    if any(a in agg for a in QA_ALGOS):
        written.append(_fig_qa_vs_size(out, agg))
    if spectra_rows:
        written.append(_fig_gap_diagnostics(out, spectra_rows, scatter_rows))
    if "qaoa" in agg:
        written.append(_fig_depth_sweep(out, agg, "qaoa", "circuit_standard_depth.png"))
    if "qaoa-adaptive" in agg:
        written.append(_fig_depth_sweep(out, agg, "qaoa-adaptive", "circuit_adaptive_depth.png",
                                        overlay="qaoa"))
    if pmin_rows:
        written.append(_fig_depth_requirement(out, pmin_rows))
    if reff_rows:
        written.append(_fig_efficiency(out, reff_rows))
    return [w for w in written if w]


def _write_summary(out: Path, agg: dict[str, list[dict]]) -> str:
    rows = []
    for algo in sorted(agg):
        rows.extend(agg[algo])
    if not rows:
        return ""
    path = out / "summary.csv"
    header = list(rows[0].keys())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=header)
        writer.writeheader()
        writer.writerows(rows)
    return path.name


def _series_by_n(rows: list[dict], value_key: str) -> tuple[np.ndarray, np.ndarray]:
    ns = np.array([int(r["n"]) for r in rows])
    vals = np.array([float(r[value_key]) for r in rows])
    order = np.argsort(ns)
    return ns[order], vals[order]


def _fig_qa_vs_size(out: Path, agg: dict[str, list[dict]]) -> str:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    for algo in QA_ALGOS:
        if algo not in agg:
            continue
        style = ALGO_STYLES[algo]
        ns, eps = _series_by_n(agg[algo], "mean_epsilon")
        axes[0].semilogy(ns, np.maximum(eps, 1e-18), label=ALGO_LABELS[algo], **style)
        ns, ps = _series_by_n(agg[algo], "mean_p_success")
        axes[1].semilogy(ns, np.maximum(ps, 1e-18), label=ALGO_LABELS[algo], **style)
    axes[0].set_xlabel("problem size n")
    axes[0].set_ylabel("mean approximation error")
    axes[1].set_xlabel("problem size n")
    axes[1].set_ylabel("mean success probability")
    axes[1].legend(fontsize=8)
    fig.tight_layout()
    name = "anneal_vs_size.png"
    fig.savefig(out / name, dpi=150)
    plt.close(fig)
    return name


def _fig_gap_diagnostics(out: Path, spectra_rows: list[dict], scatter_rows: list[dict]) -> str:
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    settings = sorted({r["drive_setting"] for r in spectra_rows})
    markers = {"standard": "o", "path-optimized": "s", "fields-optimized": "^"}
    for setting in settings:
        rows = [r for r in spectra_rows if r["drive_setting"] == setting]
        by_n = defaultdict(list)
        for r in rows:
            by_n[int(r["n"])].append(float(r["relevant_gap"]))
        ns = sorted(by_n)
        axes[0, 0].semilogy(ns, [np.mean(by_n[n]) for n in ns],
                            marker=markers.get(setting, "o"), label=setting)
    axes[0, 0].set_xlabel("problem size n")
    axes[0, 0].set_ylabel("mean relevant gap")
    axes[0, 0].legend(fontsize=8)

    std = [r for r in spectra_rows if r["drive_setting"] == "standard"]
    by_n = defaultdict(list)
    for r in std:
        by_n[int(r["n"])].append(float(r["n_quasi"]))
    ns = sorted(by_n)
    axes[0, 1].plot(ns, [np.mean(by_n[n]) for n in ns], marker="o", color="tab:gray")
    axes[0, 1].set_xlabel("problem size n")
    axes[0, 1].set_ylabel("mean quasi-optimal count")

    if scatter_rows:
        gaps = [float(r["relevant_gap"]) for r in scatter_rows]
        ps = [float(r["p_success_qa"]) for r in scatter_rows]
        nq = [float(r["n_quasi"]) for r in scatter_rows]
        axes[1, 0].loglog(gaps, ps, "o", ms=4, color="tab:blue")
        axes[1, 0].set_xlabel("relevant gap")
        axes[1, 0].set_ylabel("anneal success probability")
        axes[1, 1].semilogy(nq, ps, "o", ms=4, color="tab:green")
        axes[1, 1].set_xlabel("quasi-optimal count")
        axes[1, 1].set_ylabel("anneal success probability")
    else:
        for ax in (axes[1, 0], axes[1, 1]):
            ax.set_axis_off()
    fig.tight_layout()
    name = "hardness_diagnostics.png"
    fig.savefig(out / name, dpi=150)
    plt.close(fig)
    return name


def _fig_depth_sweep(out: Path, agg: dict[str, list[dict]], algo: str, name: str,
                     overlay: str | None = None) -> str:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    for which, ls in ((algo, "-"), (overlay, "--")):
        if which is None or which not in agg:
            continue
        rows = [r for r in agg[which] if r["p"]]
        sizes = sorted({int(r["n"]) for r in rows})
        cmap = plt.get_cmap("viridis")
        for i, n in enumerate(sizes):
            sub = sorted((r for r in rows if int(r["n"]) == n), key=lambda r: int(r["p"]))
            ps = [int(r["p"]) for r in sub]
            color = cmap(i / max(1, len(sizes) - 1))
            axes[0].semilogy(ps, [max(float(r["mean_epsilon"]), 1e-18) for r in sub],
                             ls, color=color, marker="o", ms=3,
                             label=f"n={n}" if ls == "-" else None)
            axes[1].plot(ps, [float(r["mean_p_success"]) for r in sub],
                         ls, color=color, marker="o", ms=3)
    axes[0].set_xlabel("depth p")
    axes[0].set_ylabel("mean approximation error")
    axes[0].legend(fontsize=8)
    axes[1].set_xlabel("depth p")
    axes[1].set_ylabel("mean success probability")
    if overlay:
        axes[1].set_title("solid: adaptive, dashed: standard", fontsize=9)
    fig.tight_layout()
    fig.savefig(out / name, dpi=150)
    plt.close(fig)
    return name


def _fig_depth_requirement(out: Path, pmin_rows: list[dict]) -> str:
    rows = [r for r in pmin_rows if r["p_min"]]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.4))
    ns = [int(r["n"]) for r in rows]
    axes[0].plot(ns, [int(r["p_min"]) for r in rows], "o-", color="tab:purple")
    axes[0].set_xlabel("problem size n")
    axes[0].set_ylabel("depth reaching 0.99 success")
    axes[1].plot(ns, [float(r["mean_t_qaoa"]) for r in rows], "s-", color="tab:brown")
    axes[1].set_xlabel("problem size n")
    axes[1].set_ylabel("total duration at that depth")
    fig.tight_layout()
    name = "adaptive_depth_requirement.png"
    fig.savefig(out / name, dpi=150)
    plt.close(fig)
    return name


def _fig_efficiency(out: Path, reff_rows: list[dict]) -> str:
    rows = [r for r in reff_rows if r["instance_seed"] == "mean"]
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    sizes = sorted({int(r["n"]) for r in rows})
    cmap = plt.get_cmap("viridis")
    for i, n in enumerate(sizes):
        sub = sorted((r for r in rows if int(r["n"]) == n), key=lambda r: int(r["p"]))
        ax.semilogy([int(r["p"]) for r in sub], [float(r["r_eff"]) for r in sub],
                    "o-", color=cmap(i / max(1, len(sizes) - 1)), label=f"n={n}")
    ax.axhline(1.0, ls="--", color="k", lw=1, label="baseline")
    ax.set_xlabel("depth p")
    ax.set_ylabel("efficiency ratio")
    ax.legend(fontsize=8)
    fig.tight_layout()
    name = "efficiency_ratio.png"
    fig.savefig(out / name, dpi=150)
    plt.close(fig)
    return name
