"""Figure rendering for experiment output.

Renders the two standard report views next to the CSV files: mean
objective versus the swept parameter (one line per scheme) and the
per-iteration convergence curves. Uses the Agg backend so rendering works
headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SCHEME_STYLE = {
    "proposed": dict(color="tab:blue", marker="o", label="proposed"),
    "rsu_only": dict(color="tab:orange", marker="s", label="RSU only"),
    "saps_only": dict(color="tab:green", marker="^", label="SAPs only"),
    "random": dict(color="tab:red", marker="d", label="random split"),
}

_PARAM_LABEL = {
    "num_vts": "number of VTs",
    "num_saps": "number of SAPs",
    "task_bits": "mean task size (bits)",
    "max_precoder_power_w": "precoder power cap (W)",
}


def render_sweep_figure(summary_rows, path: str) -> str:
    """Mean objective vs. sweep value, one line per scheme."""
    if not summary_rows:
        raise ValueError("no rows to plot")
    param = summary_rows[0]["sweep_param"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    schemes = []
    for row in summary_rows:
        if row["scheme"] not in schemes:
            schemes.append(row["scheme"])
    for scheme in schemes:
        points = {}
        for row in summary_rows:
            if row["scheme"] != scheme or not _finite(row["objective"]):
                continue
            points.setdefault(row["sweep_value"], []).append(row["objective"])
        if not points:
            continue
        xs = sorted(points)
        ys = [sum(points[x]) / len(points[x]) for x in xs]
        ax.plot(xs, ys, **_SCHEME_STYLE.get(scheme, dict(label=scheme)))
    ax.set_xlabel(_PARAM_LABEL.get(param, param))
    ax.set_ylabel("mean weighted cost")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_trace_figure(trace_rows, path: str) -> str:
    """Objective vs. iteration, one curve per (sweep value, trial)."""
    if not trace_rows:
        raise ValueError("no trace rows to plot")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    curves = {}
    for row in trace_rows:
        key = (row["sweep_value"], row["scheme"], row["trial"])
        curves.setdefault(key, []).append((row["iteration"], row["objective"]))
    for (value, scheme, trial), points in sorted(curves.items()):
        points.sort()
        ax.plot(
            [p[0] for p in points],
            [p[1] for p in points],
            alpha=0.6,
            label=f"{scheme} v={value:g} t={trial}",
        )
    ax.set_xlabel("iteration")
    ax.set_ylabel("weighted cost")
    ax.grid(True, alpha=0.3)
    if len(curves) <= 8:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _finite(x) -> bool:
    return x == x and abs(x) != float("inf")
