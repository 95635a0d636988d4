"""CSV ingestion, random-walk forecast construction, and serialization of
test results and confidence-set grids to JSON, CSV and SVG.

Output is deterministic: no timestamps, fixed key order, data CSV floats at
17 significant digits (lossless round trip) and SVG coordinates at 6.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .central_tendency import ConfidenceSetGrid
from .errors import MissingColumnError
from .identification import ForecastDataset
from .rationality import TestResult

SCHEMA_VERSION = 1

REALIZATION_COLUMN = "y"
FORECAST_COLUMN = "x"
CONST_COLUMN = "const"

# Figure shading: member of the tightest (largest-alpha) set, member of some
# set only, outside every set.
_SVG_SHADES = ("#000000", "#808080", "#d3d3d3")


def _fmt_data(x: float) -> str:
    return f"{x:.17g}"


def _fmt_svg(x: float) -> str:
    return f"{x:.6g}"


def load_csv(
    path,
    instrument_columns,
    cluster_column: str | None = None,
    with_const: bool = False,
) -> ForecastDataset:
    """Read a forecast dataset from a headered CSV.

    The file must contain numeric columns ``y`` (realizations) and ``x``
    (forecasts) plus the named instrument columns; ``with_const`` synthesizes
    a constant instrument named ``const`` in front of them. Parse failures
    report the offending row and column.
    """
    path = Path(path)
    instrument_columns = list(instrument_columns)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path} is empty") from None
        header = [name.strip() for name in header]
        needed = [REALIZATION_COLUMN, FORECAST_COLUMN, *instrument_columns]
        if cluster_column is not None:
            needed.append(cluster_column)
        for name in needed:
            if name not in header:
                raise MissingColumnError(name)
        rows = list(reader)
    if len(rows) < 2:
        raise ValueError(f"{path} has {len(rows)} data rows; need at least 2")

    column_index = {name: header.index(name) for name in needed}
    parsed = {name: np.empty(len(rows)) for name in needed}
    for r, row in enumerate(rows):
        for name in needed:
            cell = row[column_index[name]].strip()
            try:
                parsed[name][r] = float(cell)
            except ValueError:
                raise ValueError(
                    f"non-numeric value {cell!r} at row {r + 2}, column {name!r}"
                ) from None

    instruments = [parsed[name] for name in instrument_columns]
    if with_const:
        instruments.insert(0, np.ones(len(rows)))
    if not instruments:
        raise ValueError(
            "no instruments selected; pass instrument columns or with_const"
        )
    clusters = None
    if cluster_column is not None:
        clusters = parsed[cluster_column].astype(np.int64)
    return ForecastDataset(
        realizations=parsed[REALIZATION_COLUMN],
        forecasts=parsed[FORECAST_COLUMN],
        instruments=np.column_stack(instruments),
        cluster_labels=clusters,
    )


def write_dataset_csv(dataset: ForecastDataset, path, instrument_names=None) -> None:
    """Write a dataset back out in the format load_csv reads."""
    path = Path(path)
    k = dataset.n_instruments
    if instrument_names is None:
        instrument_names = [f"h{i + 1}" for i in range(k)]
    if len(instrument_names) != k:
        raise ValueError(f"need {k} instrument names, got {len(instrument_names)}")
    header = [REALIZATION_COLUMN, FORECAST_COLUMN, *instrument_names]
    if dataset.cluster_labels is not None:
        header.append("cluster")
    lines = [",".join(header)]
    for t in range(dataset.n_obs):
        cells = [
            _fmt_data(dataset.realizations[t]),
            _fmt_data(dataset.forecasts[t]),
            *(_fmt_data(v) for v in dataset.instruments[t]),
        ]
        if dataset.cluster_labels is not None:
            cells.append(str(int(dataset.cluster_labels[t])))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def random_walk_forecasts(prices) -> ForecastDataset:
    """Dataset testing the lagged level as a forecast of the next level.

    Prices p_1..p_n become T = n-1 pairs X_t = p_t, Y_{t+1} = p_{t+1} with
    default instruments (1, X_t).
    """
    p = np.asarray(prices, dtype=float)
    if p.size < 3:
        raise ValueError(f"need at least 3 prices, got {p.size}")
    x = p[:-1]
    y = p[1:]
    return ForecastDataset(
        realizations=y,
        forecasts=x,
        instruments=np.column_stack([np.ones(x.size), x]),
    )


def test_result_to_dict(result: TestResult, alpha_levels=(0.05, 0.10)) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "rationality_test",
        "functional": result.functional.value,
        "statistic": result.statistic,
        "df": result.df,
        "p_value": result.p_value,
        "bandwidth": result.bandwidth,
        "reject_at": {f"{a:g}": bool(result.p_value < a) for a in alpha_levels},
    }


def grid_to_dict(grid: ConfidenceSetGrid) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "confidence_set",
        "resolution": grid.resolution,
        "alpha_levels": list(grid.alpha_levels),
        "bandwidth": grid.bandwidth,
        "df": grid.df,
        "n_obs": grid.n_obs,
        "points": [
            {
                "index": list(p.index),
                "theta": [p.weights.mean, p.weights.median, p.weights.mode],
                "objective": None if np.isnan(p.objective) else p.objective,
                "p_value": None if np.isnan(p.p_value) else p.p_value,
                "member": {f"{a:g}": bool(v) for a, v in p.memberships.items()},
                "note": p.note,
            }
            for p in grid.points
        ],
    }


def grid_from_dict(payload: dict) -> ConfidenceSetGrid:
    """Inverse of grid_to_dict, for re-plotting stored scans."""
    from .central_tendency import GridPoint, SimplexWeights

    if payload.get("kind") != "confidence_set":
        raise ValueError("payload is not a confidence_set document")
    alpha_levels = tuple(float(a) for a in payload["alpha_levels"])
    points = []
    for entry in payload["points"]:
        theta = entry["theta"]
        memberships = {
            a: bool(entry["member"][f"{a:g}"]) for a in alpha_levels
        }
        points.append(
            GridPoint(
                index=tuple(entry["index"]),
                weights=SimplexWeights(theta[0], theta[1], theta[2]),
                objective=float("nan") if entry["objective"] is None else entry["objective"],
                p_value=float("nan") if entry["p_value"] is None else entry["p_value"],
                memberships=memberships,
                note=entry.get("note"),
            )
        )
    return ConfidenceSetGrid(
        resolution=payload["resolution"],
        points=points,
        alpha_levels=alpha_levels,
        bandwidth=payload["bandwidth"],
        df=payload["df"],
        n_obs=payload["n_obs"],
    )


def report_to_dict(report) -> dict:
    """JSON form of a SimulationReport."""
    config = report.config
    return {
        "schema": SCHEMA_VERSION,
        "kind": f"{report.kind}_experiment",
        "config": {
            "dgp": config.dgp.value,
            "skewness": config.skewness,
            "n_obs": config.n_obs,
            "seed": config.seed,
            "burn_in": config.burn_in,
        },
        "instrument_set": int(report.instrument_set),
        "replications": report.replications,
        "successes": report.successes,
        "rate": report.rate,
        "mc_standard_error": report.mc_standard_error,
        "nominal_level": report.nominal_level,
        "failures": dict(report.failures),
        "details": report.details,
    }


def _member_header(alpha: float) -> str:
    return f"member_{round((1.0 - alpha) * 100):d}"


def grid_to_csv(grid: ConfidenceSetGrid) -> str:
    header = [
        "theta_mean", "theta_median", "theta_mode", "objective", "p_value",
        *(_member_header(a) for a in grid.alpha_levels),
        "note",
    ]
    lines = [",".join(header)]
    for p in grid.points:
        cells = [
            _fmt_data(p.weights.mean),
            _fmt_data(p.weights.median),
            _fmt_data(p.weights.mode),
            _fmt_data(p.objective),
            _fmt_data(p.p_value),
            *(str(int(p.memberships[a])) for a in grid.alpha_levels),
            p.note or "",
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _triangle_vertices() -> dict[str, tuple[float, float]]:
    # Mean lower-left, Median apex, Mode lower-right; side 500 px.
    side = 500.0
    x0, y0 = 70.0, 540.0
    return {
        "mean": (x0, y0),
        "median": (x0 + side / 2.0, y0 - side * np.sqrt(3.0) / 2.0),
        "mode": (x0 + side, y0),
    }


def grid_to_svg(grid: ConfidenceSetGrid) -> str:
    """Ternary diagram: black inside the tightest set, grey inside a looser
    one, light grey outside all of them."""
    verts = _triangle_vertices()
    by_threshold = sorted(grid.alpha_levels, reverse=True)  # tightest first
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'width="640" height="600" viewBox="0 0 640 600">',
        '<rect width="640" height="600" fill="#ffffff"/>',
        '<polygon points="{} {},{} {},{} {}" fill="none" stroke="#000000" '
        'stroke-width="1"/>'.format(
            _fmt_svg(verts["mean"][0]), _fmt_svg(verts["mean"][1]),
            _fmt_svg(verts["median"][0]), _fmt_svg(verts["median"][1]),
            _fmt_svg(verts["mode"][0]), _fmt_svg(verts["mode"][1]),
        ),
        f'<text x="{_fmt_svg(verts["mean"][0] - 20)}" '
        f'y="{_fmt_svg(verts["mean"][1] + 25)}" font-family="sans-serif" '
        'font-size="16">Mean</text>',
        f'<text x="{_fmt_svg(verts["median"][0] - 28)}" '
        f'y="{_fmt_svg(verts["median"][1] - 12)}" font-family="sans-serif" '
        'font-size="16">Median</text>',
        f'<text x="{_fmt_svg(verts["mode"][0] - 20)}" '
        f'y="{_fmt_svg(verts["mode"][1] + 25)}" font-family="sans-serif" '
        'font-size="16">Mode</text>',
    ]
    for p in grid.points:
        w = p.weights
        px = (
            w.mean * verts["mean"][0]
            + w.median * verts["median"][0]
            + w.mode * verts["mode"][0]
        )
        py = (
            w.mean * verts["mean"][1]
            + w.median * verts["median"][1]
            + w.mode * verts["mode"][1]
        )
        if p.memberships[by_threshold[0]]:
            shade = _SVG_SHADES[0]
        elif any(p.memberships[a] for a in by_threshold[1:]):
            shade = _SVG_SHADES[1]
        else:
            shade = _SVG_SHADES[2]
        parts.append(
            f'<circle cx="{_fmt_svg(px)}" cy="{_fmt_svg(py)}" r="3" fill="{shade}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_confidence_set(
    grid: ConfidenceSetGrid,
    json_path=None,
    csv_path=None,
    svg_path=None,
) -> None:
    """Write the requested serializations of a scanned grid."""
    if json_path is not None:
        Path(json_path).write_text(
            json.dumps(grid_to_dict(grid), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    if csv_path is not None:
        Path(csv_path).write_text(grid_to_csv(grid), encoding="utf-8")
    if svg_path is not None:
        Path(svg_path).write_text(grid_to_svg(grid), encoding="utf-8")


def write_json(payload: dict, path) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
