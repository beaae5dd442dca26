"""Plain-text and tabular renderings of benchmark / test-set results."""

import csv

from .evaluate import SUMMARY_FIELDS

_HEADERS = ("Min.", "1st Qu.", "Median", "Mean", "3rd Qu.", "Max.", "NA's")


def _fmt(value, metric):
    if value is None:
        return "NA"
    if metric == "rmse":
        return f"{value:,.0f}"
    return f"{value:.4f}"


def render_benchmark_text(reports):
    """Aligned summary table, one block per metric, algorithms as rows."""
    lines = []
    for metric, label in (("rmse", "RMSE"), ("r_squared", "Rsquared")):
        rows = [[label, *_HEADERS]]
        for report in reports:
            s = report.summary(metric)
            rows.append(
                [report.algorithm]
                + [_fmt(s[f], metric) for f in SUMMARY_FIELDS]
                + [str(s["na"])]
            )
        widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
        for r in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        lines.append("")
    return "\n".join(lines)


def write_benchmark_csv(reports, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "metric", *SUMMARY_FIELDS, "na"])
        for report in reports:
            for metric in ("rmse", "r_squared"):
                s = report.summary(metric)
                writer.writerow(
                    [report.algorithm, metric]
                    + [s[f] if s[f] is not None else "NA" for f in SUMMARY_FIELDS]
                    + [s["na"]]
                )


def render_test_text(names, pairs):
    rows = [["Algorithm", "RMSE", "R2"]]
    for name, pair in zip(names, pairs):
        rows.append([
            name,
            _fmt(pair.rmse, "rmse"),
            _fmt(pair.r_squared, "r_squared"),
        ])
    widths = [max(len(r[c]) for r in rows) for c in range(3)]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows
    )


def write_test_csv(names, pairs, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "rmse", "r_squared"])
        for name, pair in zip(names, pairs):
            writer.writerow([
                name,
                pair.rmse,
                pair.r_squared if pair.r_squared is not None else "NA",
            ])


def write_dotplot_data(reports, path, metric):
    """Per-fold observations, one row per (algorithm, fold) dot."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "fold", metric])
        for report in reports:
            for i, value in enumerate(report.metric_values(metric)):
                writer.writerow([report.algorithm, i, value if value is not None else "NA"])
