"""Evaluation report rendering: delimited records plus figures on disk.

The evaluate path of the CLI lands three artifacts in the output directory:
a line-delimited report file, a predicted-vs-actual scatter, and a residual
histogram. Figures are rendered headless (Agg) so this works on servers.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..forecast import WITHIN_BAND, EvaluationReport

FIGURE_DPI = 120


def render_report(report: EvaluationReport, y_true, y_pred, out_dir: str | Path,
                  spec_low: float | None = None,
                  spec_high: float | None = None) -> dict[str, str]:
    """Write report.jsonl plus the two standard figures; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must have matching shapes")

    report_path = out / "report.jsonl"
    with report_path.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(report.to_dict(), sort_keys=True,
                            separators=(",", ":")) + "\n")

    scatter_path = out / f"{report.parameter}_pred_vs_actual.png"
    _scatter(report, y_true, y_pred, scatter_path, spec_low, spec_high)

    hist_path = out / f"{report.parameter}_residuals.png"
    _residuals(report, y_true, y_pred, hist_path)

    return {"report": str(report_path), "scatter": str(scatter_path),
            "residuals": str(hist_path)}


def _scatter(report: EvaluationReport, y_true, y_pred, path: Path,
             spec_low, spec_high) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.scatter(y_true, y_pred, s=18, alpha=0.6, edgecolors="none")
    lo = float(min(y_true.min(), y_pred.min()))
    hi = float(max(y_true.max(), y_pred.max()))
    pad = 0.05 * (hi - lo) if hi > lo else 1.0
    lo, hi = lo - pad, hi + pad
    line = np.linspace(lo, hi, 2)
    ax.plot(line, line, color="black", linewidth=1)
    ax.fill_between(line, line * (1 - WITHIN_BAND), line * (1 + WITHIN_BAND),
                    alpha=0.15, color="tab:green",
                    label=f"within {WITHIN_BAND:.0%}")
    if spec_low is not None and spec_high is not None:
        ax.axvline(spec_low, color="tab:red", linestyle="--", linewidth=1)
        ax.axvline(spec_high, color="tab:red", linestyle="--", linewidth=1)
    ax.set_xlim(lo, hi)
    ax.set_ylim(lo, hi)
    ax.set_xlabel("measured")
    ax.set_ylabel("predicted")
    ax.set_title(f"{report.parameter}: holdout n={report.n_holdout}, "
                 f"within={report.within_rate:.3f}")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)


def _residuals(report: EvaluationReport, y_true, y_pred, path: Path) -> None:
    residuals = y_pred - y_true
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = min(40, max(10, residuals.size // 5))
    ax.hist(residuals, bins=bins, alpha=0.8)
    ax.axvline(0.0, color="black", linewidth=1)
    ax.set_xlabel("predicted - measured")
    ax.set_ylabel("count")
    ax.set_title(f"{report.parameter} residuals, mape={report.mape:.4f}")
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)
