"""Evaluation reports: a delimited metrics file plus rendered figures.

Written for headless use; the Agg backend is forced before pyplot loads
so report generation never needs a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from mathnlp.classify import EvaluationMetrics

METRICS_FILE = "metrics.tsv"
SUMMARY_FIGURE = "summary.png"
PER_CLASS_FIGURE = "per_class.png"


def metrics_rows(metrics: EvaluationMetrics, method: str) -> list[tuple[str, str]]:
    return [
        ("method", method),
        ("documents", str(metrics.n_documents)),
        ("k", str(metrics.k)),
        ("top1_accuracy", f"{metrics.top1_accuracy:.6f}"),
        (f"precision_at_{metrics.k}", f"{metrics.precision_at_k:.6f}"),
        (f"recall_at_{metrics.k}", f"{metrics.recall_at_k:.6f}"),
    ]


def write_metrics_file(metrics: EvaluationMetrics, method: str, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for key, value in metrics_rows(metrics, method):
            handle.write(f"{key}\t{value}\n")
        handle.write("class\tgold\tpredicted_top1\tcorrect_top1\n")
        for code in sorted(metrics.per_class):
            row = metrics.per_class[code]
            handle.write(
                f"{code}\t{row['gold']}\t{row['predicted_top1']}\t{row['correct_top1']}\n"
            )


def _summary_figure(metrics: EvaluationMetrics, method: str, path: Path) -> None:
    labels = ["top-1", f"precision@{metrics.k}", f"recall@{metrics.k}"]
    values = [metrics.top1_accuracy, metrics.precision_at_k, metrics.recall_at_k]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    bars = ax.bar(labels, values, color=["#4878a8", "#6aa84f", "#b45f06"])
    ax.bar_label(bars, fmt="%.3f")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.set_title(f"{method} on {metrics.n_documents} documents")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _per_class_figure(metrics: EvaluationMetrics, method: str, path: Path) -> None:
    codes = sorted(code for code, row in metrics.per_class.items() if any(row.values()))
    if not codes:
        codes = sorted(metrics.per_class)
    gold = [metrics.per_class[c]["gold"] for c in codes]
    predicted = [metrics.per_class[c]["predicted_top1"] for c in codes]
    correct = [metrics.per_class[c]["correct_top1"] for c in codes]
    positions = range(len(codes))
    width = 0.28
    fig, ax = plt.subplots(figsize=(max(5.0, 0.45 * len(codes) + 2), 3.5))
    ax.bar([p - width for p in positions], gold, width, label="gold")
    ax.bar(list(positions), predicted, width, label="predicted top-1")
    ax.bar([p + width for p in positions], correct, width, label="correct top-1")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(codes, rotation=90 if len(codes) > 12 else 0)
    ax.set_xlabel("class")
    ax.set_ylabel("documents")
    ax.set_title(f"per-class counts ({method})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(metrics: EvaluationMetrics, method: str, out_dir: str | Path) -> list[Path]:
    """Write metrics.tsv and the two figures into ``out_dir``; return the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / METRICS_FILE
    summary_path = out_dir / SUMMARY_FIGURE
    per_class_path = out_dir / PER_CLASS_FIGURE
    write_metrics_file(metrics, method, metrics_path)
    _summary_figure(metrics, method, summary_path)
    _per_class_figure(metrics, method, per_class_path)
    return [metrics_path, summary_path, per_class_path]
