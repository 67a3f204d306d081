"""Figure rendering for experiment output directories.

Consumes the delimited files an experiment writes (metrics.jsonl,
comparator.jsonl) and renders trajectory plots next to them; nothing
here feeds back into a run.  The Agg backend is forced so rendering
works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .engine import discover_runs, load_jsonl

RUN_STYLE = {"alpha": 0.35, "linewidth": 1.0}
MEAN_STYLE = {"linewidth": 2.0}


def _series(runs: list[list[dict]], field: str) -> tuple[list[int], list[list[float | None]]]:
    iters = [r["iteration"] for r in runs[0]]
    return iters, [[rec.get(field) for rec in run] for run in runs]


def _mean_series(per_run: list[list[float | None]]) -> list[float | None]:
    out = []
    for vals in zip(*per_run):
        have = [v for v in vals if v is not None]
        out.append(sum(have) / len(have) if have else None)
    return out


def _plot_field(ax, runs: list[list[dict]], field: str, label: str, color: str) -> None:
    iters, per_run = _series(runs, field)
    for vals in per_run:
        ax.plot(iters, vals, color=color, **RUN_STYLE)
    ax.plot(iters, _mean_series(per_run), color=color, label=label, **MEAN_STYLE)


def _finish(fig, ax, path: Path, xlabel: str = "iteration") -> None:
    ax.set_xlabel(xlabel)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report(root: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Render the standard figure set for one experiment directory.

    Returns the written paths; figures land in ``<root>/figures`` unless
    ``out_dir`` says otherwise.
    """
    root = Path(root)
    out = Path(out_dir) if out_dir is not None else root / "figures"
    out.mkdir(parents=True, exist_ok=True)
    run_dirs = discover_runs(root)
    runs = [load_jsonl(d / "metrics.jsonl") for d in run_dirs]
    comps = [
        load_jsonl(d / "comparator.jsonl")
        for d in run_dirs
        if (d / "comparator.jsonl").exists()
    ]
    comps = [c for c in comps if c]
    written: list[Path] = []

    fig, ax = plt.subplots(figsize=(6, 4))
    _plot_field(ax, runs, "normalized_cost", "edge cost / total target length", "tab:blue")
    ax.set_ylabel("normalized cost")
    ax.set_title("Design cost")
    _finish(fig, ax, out / "cost.png")
    written.append(out / "cost.png")

    fig, ax = plt.subplots(figsize=(6, 4))
    _plot_field(ax, runs, "h", "hourglass score", "tab:purple")
    ax.set_ylabel("hourglass score")
    ax.set_ylim(-0.05, 1.05)
    ax2 = ax.twinx()
    iters, per_run = _series(runs, "core_size")
    ax2.plot(iters, _mean_series(per_run), color="tab:gray", linestyle="--",
             label="core size (mean)")
    ax2.set_ylabel("core size")
    ax2.legend(loc="lower right", fontsize=8)
    ax.set_title("Architecture")
    _finish(fig, ax, out / "architecture.png")
    written.append(out / "architecture.png")

    fig, ax = plt.subplots(figsize=(6, 4))
    _plot_field(ax, runs, "avg_depth", "mean path depth", "tab:green")
    _plot_field(ax, runs, "avg_node_length", "mean intermediate length", "tab:orange")
    ax.set_ylabel("depth / length")
    ax.set_title("Hierarchy shape")
    _finish(fig, ax, out / "depth.png")
    written.append(out / "depth.png")

    fig, ax = plt.subplots(figsize=(6, 4))
    _plot_field(ax, runs, "diversity", "target diversity", "tab:red")
    ax.set_ylabel("mean distance from medoid")
    ax.set_title("Population diversity")
    _finish(fig, ax, out / "diversity.png")
    written.append(out / "diversity.png")

    fig, ax = plt.subplots(figsize=(6, 4))
    _plot_field(ax, runs, "core_stability", "core stability", "tab:cyan")
    any_acc = any(rec.get("acceptance") is not None for run in runs for rec in run)
    if any_acc:
        _plot_field(ax, runs, "acceptance", "acceptance likelihood", "tab:brown")
    ax.set_ylabel("similarity / likelihood")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("Stability and selection")
    _finish(fig, ax, out / "stability.png")
    written.append(out / "stability.png")

    if comps:
        fig, ax = plt.subplots(figsize=(6, 4))
        for c in comps:
            ax.plot([e["iteration"] for e in c], [e["pid"] for e in c],
                    color="tab:blue", **RUN_STYLE)
        iters = [e["iteration"] for e in comps[0]]
        per_run = [[e["pid"] for e in c] for c in comps]
        ax.plot(iters, _mean_series(per_run), color="tab:blue",
                label="incremental / clean-slate cost", **MEAN_STYLE)
        ax.axhline(1.0, color="black", linewidth=0.8, linestyle=":")
        ax.set_ylabel("cost ratio")
        ax.set_title("Price of incremental design")
        _finish(fig, ax, out / "comparator.png")
        written.append(out / "comparator.png")

    return written
