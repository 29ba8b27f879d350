"""CSV and SVG output for sweep rows."""

from __future__ import annotations

import math

HEADER = ("policy", "axis", "value", "epsilon", "epsilon_ci", "capacity", "no_outage_capacity", "trials", "seed")
METADATA_MARKER = "# mtcrelay config"


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.8e}"


def emit_csv(rows, path, config_yaml=None):
    """Write sweep rows with 9 significant digits.

    When ``config_yaml`` is given it is embedded as ``# ``-prefixed lines
    ahead of the header; stripping the prefix yields a loadable config.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    lines = []
    if config_yaml:
        lines.append(METADATA_MARKER)
        lines.extend("# " + ln for ln in config_yaml.rstrip("\n").split("\n"))
    lines.append(",".join(HEADER))
    for r in rows:
        lines.append(",".join([
            r.policy, r.axis, _fmt(r.value), _fmt(r.epsilon_hat), _fmt(r.epsilon_ci),
            _fmt(r.capacity_hat), _fmt(r.no_outage_capacity), str(r.n_trials), str(r.seed),
        ]))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    """Parse a file written by :func:`emit_csv`.

    Returns
    -------
    (list of dict, str)
        Data rows and the embedded config YAML (empty when absent).
    """
    meta, body = [], []
    with open(path) as fh:
        for ln in fh.read().splitlines():
            if ln.startswith("#"):
                if ln != METADATA_MARKER:
                    meta.append(ln[2:])
            else:
                body.append(ln)
    header = body[0].split(",")
    rows = []
    for ln in body[1:]:
        vals = ln.split(",")
        rec = dict(zip(header, vals))
        for k in ("value", "epsilon", "epsilon_ci", "capacity", "no_outage_capacity"):
            rec[k] = float(rec[k])
        rec["trials"] = int(rec["trials"])
        rec["seed"] = int(rec["seed"])
        rows.append(rec)
    return rows, "\n".join(meta) + ("\n" if meta else "")


def extract_config(path, dest):
    """Write the config embedded in a CSV to ``dest``."""
    _, text = read_csv(path)
    with open(dest, "w") as fh:
        fh.write(text)


_AXIS_LABEL = {"lambda_d": r"MTCD density $\lambda_D$", "lambda_g": r"MTCG density $\lambda_G$"}


def emit_plot(rows, path, metric="capacity", log_y=False):
    """Chart one sweep: one series per policy, CI whiskers, no-outage reference for capacity."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    axes = {r.axis for r in rows}
    if len(axes) != 1:
        raise ValueError(f"rows mix sweep axes {sorted(axes)}; plot one sweep at a time")
    axis = axes.pop()
    if metric not in ("capacity", "outage"):
        raise ValueError("metric must be 'capacity' or 'outage'")

    plt.rcParams["svg.hashsalt"] = "mtcrelay"
    fig, ax = plt.subplots(figsize=(6, 4.2))
    styles = {"lbra": ("tab:red", "o", "LBRA"), "npra": ("tab:blue", "s", "NPRA")}
    for pol in sorted({r.policy for r in rows}):
        rs = sorted((r for r in rows if r.policy == pol), key=lambda r: r.value)
        x = [r.value for r in rs]
        if metric == "capacity":
            y = [r.capacity_hat for r in rs]
            err = [r.lambda_d * r.epsilon_ci if math.isfinite(r.epsilon_ci) else 0.0 for r in rs]
        else:
            y = [r.epsilon_hat for r in rs]
            err = [r.epsilon_ci if math.isfinite(r.epsilon_ci) else 0.0 for r in rs]
        color, marker, label = styles.get(pol, (None, "^", pol.upper()))
        ax.errorbar(x, y, yerr=err, color=color, marker=marker, label=label, capsize=3)
    if metric == "capacity":
        ref = sorted({(r.value, r.no_outage_capacity) for r in rows})
        ax.plot([v for v, _ in ref], [c for _, c in ref], "k--", label="no outage")
        ax.set_ylabel("transmission capacity $C$")
    else:
        ax.set_ylabel(r"outage probability $\varepsilon$")
        if not log_y:
            ax.set_ylim(0.0, 1.0)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(_AXIS_LABEL.get(axis, axis))
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return fig
