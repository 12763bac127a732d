"""Figure renderers for reports and operator output.

Opt-in from the CLI via --plot: each renderer writes PNG files next to the
delimited output and returns the written paths.  Data files stay the
source of truth; figures are a reading aid.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path: str) -> str:
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return str(path)


def render_report_figures(report, out_prefix: str) -> list:
    """Dispatch on the experiment id; returns the list of written files."""
    name = report.experiment
    if name in ("thm1", "thm2"):
        return [_ratio_scatter(report, f"{out_prefix}_ratios.png")]
    if name in ("thm3", "pointwise_regularization"):
        return [_running_max(report, f"{out_prefix}_running_max.png")]
    if name == "scaling":
        return [_scaling_fit(report, f"{out_prefix}_scaling.png")]
    if name == "mollification_convergence":
        return [_convergence_rows(report, f"{out_prefix}_convergence.png")]
    if name.endswith("_suite"):
        return [_ratio_scatter(report, f"{out_prefix}_ratios.png")]
    return []


def _ratio_scatter(report, path: str) -> str:
    fig, ax = plt.subplots(figsize=(7, 4))
    betas = sorted({t.params.get("beta", 0.0) for t in report.trials})
    cmap = plt.get_cmap("viridis")
    for i, b in enumerate(betas):
        pts = [(t.index, t.ratio) for t in report.trials if t.params.get("beta", 0.0) == b and not t.degenerate]
        if not pts:
            continue
        xs, ys = zip(*pts)
        color = cmap(i / max(len(betas) - 1, 1))
        ax.scatter(xs, ys, s=6, color=color, label=f"beta={b:g}")
        bound = next((t.bound for t in report.trials if t.params.get("beta", 0.0) == b and np.isfinite(t.bound)), None)
        if bound is not None:
            ax.axhline(bound, color=color, lw=0.8, ls="--")
    ax.set_xlabel("trial")
    ax.set_ylabel("ratio")
    ax.set_title(f"{report.experiment}: per-trial ratios against bounds")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def _running_max(report, path: str) -> str:
    fig, ax = plt.subplots(figsize=(7, 4))
    kinds = sorted({t.descriptor for t in report.trials})
    for kind in kinds:
        rs = [t.ratio for t in report.trials if t.descriptor == kind and not t.degenerate]
        if not rs:
            continue
        ax.plot(np.maximum.accumulate(rs), label=kind)
    ax.set_xlabel("trial")
    ax.set_ylabel("running max ratio")
    ax.set_title(f"{report.experiment}: empirical constant stability")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def _scaling_fit(report, path: str) -> str:
    f = report.fitted
    ks = np.asarray(f["k_list"], dtype=float)
    x = 2 * ks + 1
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for key, slope_key in (
        ("l1_norms", "l1_slope"),
        ("grad_l1_norms", "grad_l1_slope"),
        ("grad_maximal_q_norms", "maximal_slope"),
    ):
        ax.loglog(x, f[key], "o-", ms=3, label=f"{key} (slope {f[slope_key]:.3f})")
    ax.set_xlabel("2k+1")
    ax.set_ylabel("norm")
    ax.set_title(f"dilation scaling, predicted maximal slope {f['predicted_maximal_slope']:.3f}")
    ax.legend(fontsize=8)
    return _save(fig, path)


def _convergence_rows(report, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    eps = report.params["eps_schedule"]
    for t in report.trials:
        ax.loglog(eps, t.params["sups"], "o-", ms=3, label=f"{t.descriptor} beta={t.params['beta']:g}")
    ax.axhline(0.02, color="k", lw=0.8, ls=":")
    ax.set_xlabel("eps")
    ax.set_ylabel("sup discrepancy")
    ax.set_title("mollification convergence")
    ax.legend(fontsize=7)
    return _save(fig, path)


def render_maxfun_figure(result, f, path: str) -> str:
    """Input function and its maximal function, 1-D line plot or 2-D panels."""
    win = result.window()
    if result.values.dim == 1:
        xs = np.arange(win.lo[0], win.hi[0] + 1)
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.step(xs, f.materialize(win), where="mid", label="|f|", lw=1)
        ax.plot(xs, result.values.values, label=f"M f (beta={result.beta:g}, {result.mode})", lw=1.4)
        ax.set_xlabel("n")
        ax.legend()
        return _save(fig, path)
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    im0 = axes[0].imshow(np.abs(f.materialize(win)).T, origin="lower",
                         extent=(win.lo[0], win.hi[0], win.lo[1], win.hi[1]))
    axes[0].set_title("|f|")
    fig.colorbar(im0, ax=axes[0], shrink=0.8)
    im1 = axes[1].imshow(result.values.values.T, origin="lower",
                         extent=(win.lo[0], win.hi[0], win.lo[1], win.hi[1]))
    axes[1].set_title(f"M f (beta={result.beta:g}, {result.mode})")
    fig.colorbar(im1, ax=axes[1], shrink=0.8)
    return _save(fig, path)


def render_convergence_figure(table, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(table.eps, table.sup_discrepancy, "o-")
    ax.set_xlabel("eps")
    ax.set_ylabel("sup |M f_eps - M f|")
    ax.set_title(f"mollification convergence (beta={table.beta:g})")
    return _save(fig, path)


def render_search_figure(result, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(result.restart_ratios)), result.restart_ratios)
    ax.axhline(result.best_ratio, color="k", lw=0.8, ls="--")
    ax.set_xlabel("restart")
    ax.set_ylabel("best ratio")
    ax.set_title(f"extremal search {result.mode}, beta={result.beta:g}")
    return _save(fig, path)
