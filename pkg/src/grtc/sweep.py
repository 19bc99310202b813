"""Design-space sweeps: the cartesian product of strategy axes, one
simulated run per combination, one CSV row per run.

Rows are emitted in deterministic axis order no matter how many worker
processes execute the runs, so a sweep's CSV is byte-stable across
repetitions and parallelism degrees.  A failing combination becomes an
error row; the sweep continues.
"""

from __future__ import annotations

import csv
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import RunSetup, parse_horizon
from .errors import ConfigError
from .generator import run_rotation
from .metrics import CSV_COLUMNS, summarize_run
from .traces import TraceConfig, generate_trace

AXIS_ORDER = ("choose", "find_order", "horizon", "d", "max_multiplier", "seeds")

DEFAULT_AXES = {
    "choose": ["balanced"],
    "find_order": ["pred-first"],
    "horizon": ["unlimited"],
    "d": [2],
    "max_multiplier": [2],
    "seeds": [0],
}


def expand(spec: dict) -> list[dict]:
    """All run configs for a sweep spec, in axis order."""
    axes = []
    for name in AXIS_ORDER:
        values = spec.get(name, DEFAULT_AXES[name])
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep axis {name!r} must be a non-empty list")
        axes.append(values)
    if "trace" not in spec:
        raise ConfigError("sweep spec needs a 'trace' section")
    if "schedule" not in spec:
        raise ConfigError("sweep spec needs a 'schedule' section")

    combos = []
    for choose, order, horizon, d, mult, seed in itertools.product(*axes):
        parse_horizon(horizon)  # fail fast on bad axis values
        combos.append({
            "d": d,
            "max_multiplier": mult,
            "choose": choose,
            "find": {"order": order, "horizon": horizon},
            "weights": spec.get("weights", {}),
            "seed": seed,
            "schedule": spec["schedule"],
            "trace": spec["trace"],
        })
    return combos


def run_combo(config: dict) -> tuple[dict, dict]:
    """Execute one combination; returns (csv row, full report dict)."""
    setup = RunSetup(config)
    trace_spec = config["trace"]
    trace_config = TraceConfig(
        seed=setup.seed,
        duration=float(trace_spec["duration"]),
        arrival_rate=float(trace_spec["arrival_rate"]),
        departure_rate=float(trace_spec["departure_rate"]),
        initial_workers=int(trace_spec["initial_workers"]),
    )
    roster, events = generate_trace(trace_config)
    initial = setup.initial_state(roster)
    record = run_rotation(initial, setup.policy, setup.strategies,
                          setup.schedule, events, config=setup.echo())
    report = summarize_run(record, setup.weights)
    return report.csv_row("", config), report.to_dict()


def _run_indexed(args: tuple[int, dict]) -> tuple[int, dict, dict | None, str]:
    index, config = args
    run_id = f"run-{index:04d}"
    try:
        row, report = run_combo(config)
        row["run_id"] = run_id
        return index, row, report, ""
    except Exception as e:  # noqa: BLE001 - a bad combination is a row, not an abort
        row = {c: "" for c in CSV_COLUMNS}
        row.update(run_id=run_id, choose=config.get("choose", ""),
                   find_order=config.get("find", {}).get("order", ""),
                   horizon=config.get("find", {}).get("horizon", ""),
                   d=config.get("d", ""), max_multiplier=config.get("max_multiplier", ""),
                   seed=config.get("seed", ""), error=str(e))
        return index, row, None, str(e)


def execute(spec: dict, out_dir, jobs: int = 1) -> Path:
    """Run the whole sweep; write sweep.csv plus one report JSON per run.

    Returns the CSV path.
    """
    combos = expand(spec)
    out_dir = Path(out_dir)
    reports_dir = out_dir / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)

    tasks = list(enumerate(combos))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_indexed, tasks, chunksize=1))
    else:
        results = [_run_indexed(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    csv_path = out_dir / "sweep.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for index, row, report, _error in results:
            writer.writerow(row)
            if report is not None:
                with open(reports_dir / f"run-{index:04d}.json", "w",
                          encoding="utf-8") as rf:
                    json.dump(report, rf, indent=1, sort_keys=True)
                    rf.write("\n")
    return csv_path


__all__ = ["expand", "run_combo", "execute"]
