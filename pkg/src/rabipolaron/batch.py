"""Batch sweeps over (R, g/g_c) grids with reproducible file output."""

from __future__ import annotations

import configparser
import hashlib
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError
from .exact_diag import solve_exact
from .model import from_ratio
from .observables import (
    classify,
    entanglement_entropy,
    mean_photon_m,
    photon_statistics,
    spin_probabilities,
)
from .variational import ANSATZE, _ansatz, minimize_ground, sweep
from .wigner import analytic_field, default_grid, field_negativities, write_grid_csv

__all__ = [
    "OUTPUTS",
    "SCHEMA_VERSION",
    "SweepConfig",
    "parse_grid",
    "load_config",
    "run_point",
    "run_sweep",
]

SCHEMA_VERSION = 1
OUTPUTS = (
    "energy",
    "error",
    "xi",
    "weights",
    "displacements",
    "m",
    "p_up",
    "entropy",
    "negativity",
    "fock",
    "wigner-grids",
    "classify",
)
# scalar outputs expand into these CSV columns
_SCALAR_FILES = {
    "energy": ("energy",),
    "error": ("error",),
    "xi": ("xi",),
    "weights": ("alpha", "beta"),
    "displacements": ("d_alpha", "d_beta"),
    "m": ("m",),
    "p_up": ("p_up",),
    "entropy": ("entropy",),
    "negativity": ("negativity_total", "negativity_even", "negativity_odd"),
    "classify": ("region",),
}
_SEED_POLICIES = ("continuation", "multi-start")


@dataclass
class SweepConfig:
    ratios: list = field(default_factory=lambda: [100.0])
    g_over_gc: list = field(default_factory=lambda: [1.0])
    ansatz: str = "full4"
    outputs: list | None = None
    wigner_points: list = field(default_factory=list)
    output_dir: str = "rabi-out"
    seed_policy: str = "continuation"
    entropy_base: str = "e"
    jobs: int = 1

    def validate(self):
        if self.outputs is None:
            # unspecified: grids if points were named, else the energy pair
            self.outputs = ["wigner-grids"] if self.wigner_points else ["energy", "error"]
        if not self.ratios or any(not (r > 0) for r in self.ratios):
            raise ConfigurationError("ratios must be a non-empty list of positive numbers")
        if not self.g_over_gc or any(not (x >= 0) for x in self.g_over_gc):
            raise ConfigurationError("g/g_c grid must be non-empty and non-negative")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise ConfigurationError(f"unknown outputs {sorted(unknown)}; choose from {OUTPUTS}")
        if self.ansatz not in ANSATZE:
            try:
                self.ansatz = _ansatz(self.ansatz)
            except ValueError as exc:
                raise ConfigurationError(str(exc)) from None
        if self.seed_policy not in _SEED_POLICIES:
            raise ConfigurationError(f"seed_policy must be one of {_SEED_POLICIES}")
        if str(self.entropy_base) not in ("e", "2"):
            raise ConfigurationError("entropy_base must be 'e' or '2'")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be at least 1")
        for r, x in self.wigner_points:
            if not (r > 0 and x >= 0):
                raise ConfigurationError(f"invalid wigner point {(r, x)}")
        return self


def parse_grid(spec: str) -> list:
    """``"min:max:count"`` into an evenly spaced list."""
    try:
        lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise ConfigurationError(f"grid must look like min:max:count, got {spec!r}") from None
    if count < 1 or hi < lo:
        raise ConfigurationError(f"invalid grid {spec!r}")
    if count == 1:
        return [lo]
    return [float(v) for v in np.linspace(lo, hi, count)]


def _floats(text):
    return [float(v) for v in text.replace(",", " ").split()]


def _points(text):
    out = []
    for item in text.replace(",", " ").split():
        try:
            r, x = item.split(":")
            out.append((float(r), float(x)))
        except ValueError:
            raise ConfigurationError(f"wigner point must look like R:g_over_gc, got {item!r}") from None
    return out


def _outputs(text):
    return [v for v in text.replace(",", " ").split() if v]


def load_config(path) -> dict:
    """Read a ``[sweep]`` key-value file into SweepConfig keyword overrides."""
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    if not parser.has_section("sweep"):
        raise ConfigurationError(f"{path} has no [sweep] section")
    sec = parser["sweep"]
    out = {}
    if "ratios" in sec:
        out["ratios"] = _floats(sec["ratios"])
    if "grid" in sec:
        out["g_over_gc"] = parse_grid(sec["grid"].strip())
    if "g_over_gc" in sec:
        out["g_over_gc"] = _floats(sec["g_over_gc"])
    if "outputs" in sec:
        out["outputs"] = _outputs(sec["outputs"])
    if "wigner_points" in sec:
        out["wigner_points"] = _points(sec["wigner_points"])
    for key in ("ansatz", "seed_policy", "entropy_base"):
        if key in sec:
            out[key] = sec[key].strip()
    for key in ("output_dir", "out"):
        if key in sec:
            out["output_dir"] = sec[key].strip()
    if "jobs" in sec:
        out["jobs"] = sec.getint("jobs")
    return out


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if value is None:
        return "nan"
    return repr(float(value))


def _point_values(model, solution, outputs, entropy_base, ed=None):
    vp = solution.params
    values = {}
    want = set(outputs)
    if "energy" in want:
        values["energy"] = solution.energy
    if "error" in want:
        if solution.energy_error is None:
            ed = ed or solve_exact(model)
            solution.ed_energy = ed.energy
            solution.energy_error = abs((solution.energy - ed.energy) / ed.energy)
        values["error"] = solution.energy_error
    if "xi" in want:
        values["xi"] = vp.xi
    if "weights" in want:
        values["alpha"], values["beta"] = vp.alpha, vp.beta
    if "displacements" in want:
        values["d_alpha"], values["d_beta"] = vp.d_alpha, vp.d_beta
    if "m" in want:
        values["m"] = mean_photon_m(vp)
    if "p_up" in want or "entropy" in want:
        p_up, _ = spin_probabilities(vp)
        if "p_up" in want:
            values["p_up"] = p_up
        if "entropy" in want:
            values["entropy"] = entanglement_entropy(p_up, entropy_base)
    if "negativity" in want:
        neg = field_negativities(vp)
        values["negativity_total"] = neg["W_T"]
        values["negativity_even"] = neg["W_E"]
        values["negativity_odd"] = neg["W_O"]
    if "classify" in want:
        values["region"] = classify(model, solution).region
    return values


def _diagnostics(solution):
    return {
        "status": solution.status,
        "energy": solution.energy,
        "ed_energy": solution.ed_energy,
        "energy_error": solution.energy_error,
        "params": asdict(solution.params),
        "optimizer": solution.optimizer_trace,
    }


def run_point(ratio: float, g_over_gc: float, outputs=("energy",), *, ansatz="full4", entropy_base="e") -> dict:
    """Solve one point and return a JSON-serialisable record."""
    outputs = list(OUTPUTS) if "all" in outputs else list(outputs)
    model = from_ratio(ratio, g_over_gc)
    solution = minimize_ground(model, ansatz, compute_error="error" in outputs)
    record = {
        "schema": SCHEMA_VERSION,
        "R": float(ratio),
        "g_over_gc": float(g_over_gc),
        "g_abs": model.g,
        "ansatz": solution.ansatz,
        "status": solution.status,
    }
    scalar = [o for o in outputs if o in _SCALAR_FILES]
    record.update(_point_values(model, solution, scalar, entropy_base))
    if "classify" in outputs:
        c = classify(model, solution)
        record["classification"] = {
            "region": c.region,
            "heuristic": c.heuristic,
            "boundaries": list(c.boundaries),
            "xi": c.xi,
            "m": c.m,
        }
    if "fock" in outputs:
        record["fock"] = photon_statistics(solution).records()
    return record


def _solve_ratio(task):
    """Worker: every grid point for one R (continuation) or a single point."""
    ratio, grid, cfg = task
    models = [from_ratio(ratio, x) for x in grid]
    sols = None
    if cfg.seed_policy == "continuation" and len(models) > 1:
        try:
            sols = sweep(models, cfg.ansatz, compute_error=False)
        except Exception:  # noqa: BLE001  fall back to isolated points
            sols = None
    rows = []
    for i, (x, model) in enumerate(zip(grid, models)):
        entry = {"R": ratio, "g_over_gc": x, "g_abs": model.g}
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                sol = sols[i] if sols is not None else minimize_ground(model, cfg.ansatz, compute_error=False)
                entry["values"] = _point_values(model, sol, cfg.outputs, cfg.entropy_base)
                if "fock" in cfg.outputs:
                    entry["fock"] = photon_statistics(sol).records()
            entry["status"] = sol.status
            entry["diagnostics"] = _diagnostics(sol)
        except Exception as exc:  # noqa: BLE001  one bad point must not abort the sweep
            entry["status"] = f"error: {type(exc).__name__}: {exc}"
            entry["values"] = {}
            entry["diagnostics"] = {"status": entry["status"]}
        rows.append(entry)
    return rows


def _wigner_task(task):
    ratio, x, cfg = task
    model = from_ratio(ratio, x)
    sol = minimize_ground(model, cfg.ansatz, compute_error=False)
    grid = default_grid(sol.params)
    return ratio, x, grid, analytic_field(sol, grid)["W_T"], sol.status


def _slug(value: float) -> str:
    return repr(float(value)).replace("-", "m")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _map(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def run_sweep(config: SweepConfig) -> dict:
    """Run a sweep and write CSV files plus ``manifest.json``.

    Returns the manifest.  Results do not depend on ``config.jobs``.
    """
    config.validate()
    out = Path(config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigurationError(f"output directory {out} is not writable: {exc}") from None

    scalar_outputs = [o for o in config.outputs if o in _SCALAR_FILES]
    need_points = bool(scalar_outputs) or "fock" in config.outputs
    if config.seed_policy == "continuation":
        tasks = [(r, list(config.g_over_gc), config) for r in config.ratios]
    else:
        tasks = [(r, [x], config) for r in config.ratios for x in config.g_over_gc]
    rows = [row for chunk in _map(_solve_ratio, tasks, config.jobs) for row in chunk] if need_points else []

    files = []
    for output in scalar_outputs:
        for column in _SCALAR_FILES[output]:
            path = out / f"{column}.csv"
            lines = ["R,g_over_gc,g_abs,value,status"]
            for row in rows:
                v = row["values"].get(column, math.nan)
                lines.append(
                    f"{_fmt(row['R'])},{_fmt(row['g_over_gc'])},{_fmt(row['g_abs'])},{_fmt(v)},{row['status']}"
                )
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            files.append(path)
    if "fock" in config.outputs:
        for row in rows:
            if "fock" not in row:
                continue
            path = out / f"fock_R{_slug(row['R'])}_g{_slug(row['g_over_gc'])}.csv"
            lines = ["n,population,parity"] + [f"{n},{_fmt(p)},{s}" for n, p, s in row["fock"]]
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            files.append(path)
    wigner_rows = []
    if config.wigner_points and "wigner-grids" in config.outputs:
        for ratio, x, grid, values, status in _map(
            _wigner_task, [(r, x, config) for r, x in config.wigner_points], config.jobs
        ):
            path = out / f"wigner_R{_slug(ratio)}_g{_slug(x)}.csv"
            write_grid_csv(path, grid, values)
            files.append(path)
            wigner_rows.append({"R": ratio, "g_over_gc": x, "status": status, "file": path.name})

    manifest = {
        "tool": "rabipolaron",
        "version": __version__,
        "schema": SCHEMA_VERSION,
        "config": {
            "ratios": list(config.ratios),
            "g_over_gc": list(config.g_over_gc),
            "ansatz": config.ansatz,
            "outputs": list(config.outputs),
            "wigner_points": [list(p) for p in config.wigner_points],
            "seed_policy": config.seed_policy,
            "entropy_base": str(config.entropy_base),
        },
        "points": [
            {"R": r["R"], "g_over_gc": r["g_over_gc"], "status": r["status"], "diagnostics": r["diagnostics"]}
            for r in rows
        ],
        "wigner": wigner_rows,
        "files": [{"path": p.name, "sha256": _sha256(p)} for p in files],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
