"""CSV/JSON result files with a reproducible metadata header.

Every file starts with ``#``-prefixed header lines carrying the artifact
version, the seed and the full resolved configuration; re-running a config
with the same seed reproduces the file byte-identically except for the
``generated_at`` line.
"""

import json
import time

from . import __version__

FIGURE_SCHEMAS = {
    "fig2d": ("v_over_omega0", "feasible", "tau", "t_r_01", "t_r_10",
              "t_r_11", "t_bar_r"),
    "fig3": ("width", "feasible", "tau", "t_r_01", "t_r_10", "t_r_11",
             "t_bar_r"),
    "fig4": ("kappa", "t_r_01", "t_r_10", "t_r_11", "t_bar_r"),
    "fig5a": ("gamma_per_s", "gamma_times_50us", "numeric_infidelity",
              "analytic_infidelity"),
    "fig5b": ("omega_z_over_2pi_hz", "temperature_uk", "numeric_infidelity",
              "analytic_infidelity", "converged"),
    "fig5c": ("omega_x_over_2pi_hz", "temperature_uk", "numeric_infidelity",
              "analytic_infidelity", "converged"),
}

BUDGET_COLUMNS = ("row", "metric", "temperature_uk", "infidelity", "converged")


class SchemaError(ValueError):
    """Result set does not match the requested figure schema."""


def _format(value):
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def header_lines(config_items, seed=None, extra=None):
    lines = [f"# rydgate_version = {__version__}",
             f"# generated_at = {time.strftime('%Y-%m-%dT%H:%M:%S')}"]
    if seed is not None:
        lines.append(f"# seed = {seed}")
    for key, value in extra or ():
        lines.append(f"# {key} = {_format(value)}")
    for key, value in config_items:
        if isinstance(value, list):
            value = ", ".join(str(v) for v in value)
        lines.append(f"# config: {key} = {value}")
    return lines


def write_csv(path, columns, rows, config_items=(), seed=None, extra=None):
    lines = header_lines(config_items, seed=seed, extra=extra)
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise SchemaError(f"row of width {len(row)} does not match "
                              f"{len(columns)} columns")
        lines.append(",".join(_format(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_json(path, columns, rows, config_items=(), seed=None, extra=None):
    """JSON mirror of a CSV table."""
    doc = {
        "rydgate_version": __version__,
        "seed": seed,
        "meta": {k: v for k, v in (extra or ())},
        "config": {k: v for k, v in config_items},
        "columns": list(columns),
        "rows": [[None if v is None else v for v in row] for row in rows],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, default=str)
    return path


def emit_figure_data(rows, figure_id, path, config_items=(), seed=None,
                     json_mirror=False):
    """Write plot-ready figure data; rejects unknown figure ids, empty
    result sets and rows that do not match the figure's schema."""
    if figure_id not in FIGURE_SCHEMAS:
        raise SchemaError(f"unknown figure id {figure_id!r}")
    rows = list(rows)
    if not rows:
        raise SchemaError(f"empty result set for {figure_id}; no file written")
    columns = FIGURE_SCHEMAS[figure_id]
    write_csv(path, columns, rows, config_items, seed=seed)
    if json_mirror:
        write_json(str(path) + ".json", columns, rows, config_items, seed=seed)
    return path
