"""Command-line front end.

    gaborstab spectrogram --config C --out D [--svg]
    gaborstab admissible WINDOW A B [--out D]
    gaborstab poincare    --config C --out D [--jobs N]
    gaborstab stability   --config C --out D [--jobs N] [--seed S] [--tol-scale X]
    gaborstab verify      SUITE [--out D] [--seed S] [--tol-scale X]

Exit codes: 0 success, 1 assertion or admissibility failure, 2 configuration error.
Configs are INI files: one section per case, shared keys in [DEFAULT].
"""

from __future__ import annotations

import argparse
import configparser
import itertools
import json
import math
import os
import re
import sys
import tempfile
import time
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .norms import ChiWeight
from .poincare import (
    EigenSolverError,
    WeightPair,
    cauchy_pair,
    estimate_cheeger,
    estimate_poincare,
    weight_from_spectrogram,
)
from .stabilitylab import (
    RECIPES,
    ExperimentConfig,
    make_instability_pair,
    run_stability_experiment,
    time_axis,
)
from .suites import SUITES, run_suite
from .tfcore import Field2D, Grid2D, WindowSpec, ambiguity_modulus, make_window, stft
from .weights import GammaWeight, NotAdmissibleError, check_admissibility

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
TOOL = f"gaborstab {__version__}"


class ConfigError(Exception):
    """Bad configuration; the message names the file, line, section and key."""


# ---------------------------------------------------------------------------
# config parsing


@dataclass
class Section:
    name: str
    items: dict
    path: str
    lines: dict = field(default_factory=dict)

    def where(self, key: str) -> str:
        line = self.lines.get(key) or self.lines.get("__section__")
        loc = f"{self.path}:{line}" if line else self.path
        return f"{loc}: [{self.name}] {key}"

    def has(self, key: str) -> bool:
        return key in self.items

    def raw(self, key: str, default=None):
        if key in self.items:
            return self.items[key]
        if default is None:
            raise ConfigError(f"{self.where(key)}: missing required key")
        return default

    def get_float(self, key, default=None) -> float:
        val = self.raw(key, None if default is None else str(default))
        try:
            out = float(val)
        except ValueError:
            raise ConfigError(f"{self.where(key)}: expected a number, got {val!r}") from None
        if not math.isfinite(out):
            raise ConfigError(f"{self.where(key)}: value must be finite")
        return out

    def get_int(self, key, default=None) -> int:
        val = self.raw(key, None if default is None else str(default))
        try:
            return int(val)
        except ValueError:
            raise ConfigError(f"{self.where(key)}: expected an integer, got {val!r}") from None

    def get_bool(self, key, default=False) -> bool:
        val = str(self.raw(key, str(default))).strip().lower()
        if val in ("1", "true", "yes", "on"):
            return True
        if val in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{self.where(key)}: expected true/false, got {val!r}")

    def get_params(self, key) -> dict:
        """Parse ``k=v, k=v``; values with ``|`` become sweep lists."""
        text = self.items.get(key, "")
        out = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            if "=" not in part:
                raise ConfigError(f"{self.where(key)}: expected key=value, got {part!r}")
            k, v = (s.strip() for s in part.split("=", 1))
            vals = [_coerce(x.strip()) for x in v.split("|")]
            out[k] = vals if len(vals) > 1 else vals[0]
        return out

    def get_list(self, key, cast=float) -> list:
        text = self.raw(key)
        try:
            return [cast(x) for x in re.split(r"[,\s]+", text.strip()) if x]
        except ValueError:
            raise ConfigError(f"{self.where(key)}: expected a list of numbers, got {text!r}") from None


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _line_index(path: str) -> dict:
    """{section: {key or '__section__': line number}} from a raw scan of the file."""
    index, current = {}, "DEFAULT"
    for no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        m = re.match(r"\[(.+)\]$", s)
        if m:
            current = m.group(1).strip()
            index.setdefault(current, {})["__section__"] = no
            continue
        m = re.match(r"([^=:]+)[=:]", s)
        if m:
            index.setdefault(current, {})[m.group(1).strip().lower()] = no
    return index


def load_config(path: str) -> list[Section]:
    if not Path(path).is_file():
        raise ConfigError(f"{path}: config file not found")
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    lines = _line_index(path)
    default_lines = lines.get("DEFAULT", {})
    sections = []
    for name in cp.sections():
        own = lines.get(name, {})
        merged = {**default_lines, **own}
        sections.append(Section(name, dict(cp[name]), path, merged))
    if not sections:
        raise ConfigError(f"{path}: no case sections found")
    return sections


def parse_window(sec: Section) -> WindowSpec:
    kind = sec.raw("window.kind")
    params = sec.get_params("window.params")
    try:
        return WindowSpec(kind, {k: float(v) for k, v in params.items()})
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{sec.where('window.kind')}: {exc}") from None


def parse_gamma(sec: Section) -> GammaWeight:
    try:
        return GammaWeight(sec.get_float("gamma.a"), sec.get_float("gamma.b"))
    except ValueError as exc:
        raise ConfigError(f"{sec.where('gamma.a')}: {exc}") from None


def parse_chi(sec: Section) -> ChiWeight:
    kind = sec.raw("chi.kind", "unit")
    try:
        if str(kind).strip().lower() in ("compact", "compactindicator", "indicator"):
            p = sec.get_params("chi.params")
            return ChiWeight.compact((p["x0"], p["x1"], p["xi0"], p["xi1"]))
        return ChiWeight(kind)
    except KeyError as exc:
        raise ConfigError(f"{sec.where('chi.params')}: missing rectangle bound {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{sec.where('chi.kind')}: {exc}") from None


def parse_grid(sec: Section) -> Grid2D:
    try:
        return Grid2D(sec.get_float("grid.x_min"), sec.get_float("grid.x_max"), sec.get_int("grid.nx"),
                      sec.get_float("grid.xi_min"), sec.get_float("grid.xi_max"), sec.get_int("grid.nxi"))
    except ValueError as exc:
        raise ConfigError(f"{sec.where('grid.nx')}: {exc}") from None


def expand_sweep(params: dict) -> list[dict]:
    keys = sorted(k for k, v in params.items() if isinstance(v, list))
    if not keys:
        return [dict(params)]
    out = []
    for combo in itertools.product(*(params[k] for k in keys)):
        p = dict(params)
        p.update(zip(keys, combo))
        out.append(p)
    return out


def _case_label(base: str, params: dict, swept: list) -> str:
    if not swept:
        return base
    return base + "[" + ",".join(f"{k}={params[k]:g}" if isinstance(params[k], float)
                                 else f"{k}={params[k]}" for k in swept) + "]"


# ---------------------------------------------------------------------------
# output helpers


class OutputDir:
    """Writes files atomically (temp file + rename) and records them for the manifest."""

    def __init__(self, root: str | None):
        self.root = Path(root) if root else None
        self.files: list[str] = []
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)
            if not os.access(self.root, os.W_OK):
                raise ConfigError(f"{self.root}: output directory is not writable")

    def write_text(self, name: str, text: str) -> Path | None:
        if self.root is None:
            return None
        target = self.root / name
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.files.append(name)
        return target

    def write_csv(self, name: str, header, rows):
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        return self.write_text(name, "\n".join(lines) + "\n")

    def write_json(self, name: str, obj):
        return self.write_text(name, json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")

    def manifest(self, command: str, config: str | None, started: float, meta: dict):
        if self.root is None:
            return
        info = {
            "command": command,
            "config": config,
            "output_dir": str(self.root),
            "tool": TOOL,
            "started_unix": started,
            "wall_seconds": time.time() - started,
            "metadata": meta,
            "files": sorted(set(self.files)),
        }
        self.write_json("manifest.json", info)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if v is None:
        return ""
    return str(v)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def heatmap_svg(values: np.ndarray, grid: Grid2D, title: str, max_cells: int = 128) -> str:
    """Grayscale heatmap, x to the right and xi upward; deterministic output."""
    v = np.asarray(values, float)
    sx = max(1, math.ceil(v.shape[0] / max_cells))
    sq = max(1, math.ceil(v.shape[1] / max_cells))
    v = v[::sx, ::sq]
    top = float(v.max()) if v.size and v.max() > 0 else 1.0
    cell = 4
    w, h = v.shape[0] * cell, v.shape[1] * cell
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h + 20}" '
             f'viewBox="0 0 {w} {h + 20}">',
             f'<text x="2" y="14" font-size="12" font-family="monospace">{_xml_escape(title)}</text>']
    for i in range(v.shape[0]):
        for j in range(v.shape[1]):
            level = int(round(255 * (1.0 - v[i, j] / top)))
            y = 20 + (v.shape[1] - 1 - j) * cell
            parts.append(f'<rect x="{i * cell}" y="{y}" width="{cell}" height="{cell}" '
                         f'fill="rgb({level},{level},{level})"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _xml_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _map_jobs(fn, items, jobs: int):
    """Run ``fn`` over ``items``; results come back in input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# signal recipes for the spectrogram command


def _signal_for(sec: Section, window: WindowSpec, grid: Grid2D, params: dict, seed: int):
    name = str(sec.raw("recipe.name", "window")).lower()
    spc = sec.get_int("signal.samples_per_cell", 4)
    half_width = sec.get_float("signal.half_width", max(abs(grid.x_min), abs(grid.x_max)) + 40.0)
    axis = time_axis(grid, spc, half_width)
    if name == "window":
        return make_window(window, *axis)
    if name == "zero":
        return make_window(window, *axis).scaled(0.0)
    if name == "instability":
        return make_instability_pair(window, float(params.get("s", 4.0)), params.get("kind", "time"),
                                     grid=grid, axis=axis)[0]
    if name in RECIPES:
        cfg = ExperimentConfig(window, GammaWeight(1.0, 1.0), ChiWeight.unit(), grid, name,
                               {"seed": seed, **params}, samples_per_cell=spc, half_width=half_width,
                               negative_control=True)
        return RECIPES[name](cfg)[0]
    raise ConfigError(f"{sec.where('recipe.name')}: unknown recipe {name!r}")


# ---------------------------------------------------------------------------
# commands


def cmd_spectrogram(args) -> int:
    started = time.time()
    sections = load_config(args.config)
    out = OutputDir(args.out)
    jobs = []
    for sec in sections:
        window, grid = parse_window(sec), parse_grid(sec)
        params = sec.get_params("recipe.params")
        jobs.append((sec, window, grid, params))

    def work(job):
        sec, window, grid, params = job
        f = _signal_for(sec, window, grid, params, args.seed)
        return stft(f, window, grid).abs()

    fields = _map_jobs(work, jobs, args.jobs)
    summary = {}
    for (sec, window, grid, _), F in zip(jobs, fields):
        X, Q = grid.mesh()
        rows = zip(X.ravel(), Q.ravel(), F.values.ravel())
        out.write_csv(f"spectrogram_{sec.name}.csv", ("x", "xi", "abs_stft"), rows)
        if args.svg:
            out.write_text(f"spectrogram_{sec.name}.svg", heatmap_svg(F.values, grid, sec.name))
        i, j = grid.nearest_index(0.0, 0.0)
        summary[sec.name] = {"value_at_origin": float(F.values[i, j]), "max": float(F.values.max()),
                             "grid": list(grid.shape)}
        print(f"{sec.name}: |V_g f| at origin {F.values[i, j]:.6g}, max {F.values.max():.6g}")
    out.manifest("spectrogram", args.config, started, summary)
    return EXIT_OK


def cmd_admissible(args) -> int:
    started = time.time()
    try:
        window = WindowSpec(args.window)
        gam = GammaWeight(args.a, args.b)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        rep = check_admissibility(window, gam)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = rep.to_dict()
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default)
    print(text)
    out = OutputDir(args.out)
    out.write_text("admissibility.json", text + "\n")
    out.manifest("admissible", None, started, {"window": window.kind.value, "a": args.a, "b": args.b})
    return EXIT_OK if rep.admissible else EXIT_FAIL


def _poincare_builder(sec: Section):
    """Return (build(level) -> WeightPair, level list, label of the level)."""
    kind = str(sec.raw("weight.kind")).lower()
    p = sec.get_params("weight.params")
    levels = sec.get_list("poincare.levels", float)
    if kind in ("uniform", "gaussian", "twobump", "cauchy"):
        def build(n):
            n = int(n)
            if kind == "uniform":
                lo, hi = float(p.get("lo", 0.0)), float(p.get("hi", 1.0))
                return WeightPair.on_interval(np.ones_like, np.ones_like, lo, hi, n)
            if kind == "gaussian":
                L = float(p.get("L", 10.0))
                g = lambda x: np.exp(-x * x / 2)  # noqa: E731
                return WeightPair.on_interval(g, g, -L, L, n)
            if kind == "twobump":
                s = float(p.get("s", 4.0))
                L = float(p.get("L", s + 8.0))
                g = lambda x: np.exp(-(x - s / 2) ** 2 / 2) + np.exp(-(x + s / 2) ** 2 / 2)  # noqa: E731
                return WeightPair.on_interval(g, g, -L / 2, L / 2, n)
            beta, L = float(p.get("beta", 2.0)), float(p.get("L", 50.0))
            return cauchy_pair(beta, -L, L, n)
        return build, levels, "n"
    if kind == "spectrogram":
        window, gam, chi, grid = parse_window(sec), parse_gamma(sec), parse_chi(sec), parse_grid(sec)
        mode = str(sec.raw("poincare.mode", "refine")).lower()
        if mode not in ("refine", "domain", "both", "frequency"):
            raise ConfigError(f"{sec.where('poincare.mode')}: expected refine, domain, both or frequency")
        source = str(sec.raw("weight.source", "closed_form")).lower()

        def build(level):
            if mode == "refine":
                g = grid.scaled(1.0, int(level))
            elif mode == "domain":
                g = grid.scaled(level, 1)
            elif mode == "both":
                g = grid.scaled(level, int(level))
            else:
                # widen the frequency range only, keeping the frequency step
                g = Grid2D(grid.x_min, grid.x_max, grid.nx, grid.xi_min * level, grid.xi_max * level,
                           int(round((grid.nxi - 1) * level)) + 1)
            if source == "closed_form":
                X, Q = g.mesh()
                F = Field2D(g, ambiguity_modulus(window, X, Q).astype(complex))
            else:
                F = stft(make_window(window, *time_axis(g)), window, g)
            w = weight_from_spectrogram(F, gam).values
            return WeightPair(w * chi.on(g), w, (g.hx, g.hxi), (g.x_min, g.xi_min))
        return build, levels, "level"
    raise ConfigError(f"{sec.where('weight.kind')}: unknown weight kind {kind!r}")


def cmd_poincare(args) -> int:
    started = time.time()
    sections = load_config(args.config)
    out = OutputDir(args.out)
    plans = [(sec, *_poincare_builder(sec)) for sec in sections]

    def work(plan):
        sec, build, levels, _ = plan
        rows, prev = [], None
        growth = []
        for lev in levels:
            pair = build(lev)
            est = estimate_poincare(pair)
            che = estimate_cheeger(pair) if sec.get_bool("poincare.cheeger", True) else None
            rel = abs(est.c_p - prev) / abs(prev) if prev else math.nan
            if prev:
                growth.append(est.c_p / prev)
            prev = est.c_p
            rows.append((sec.name, lev, pair.shape[0], pair.shape[1] if len(pair.shape) > 1 else 1,
                         est.c_p, est.eigenvalue, rel,
                         che.h if che else math.nan, che.cheeger_bound if che else math.nan,
                         int(che.inequality_holds) if che else 1))
        divergent = len(growth) >= 3 and all(g >= 2.0 for g in growth[-3:])
        return rows, divergent

    results = _map_jobs(work, plans, args.jobs)
    header = ("case_id", "level", "n0", "n1", "c_p", "eigenvalue", "rel_change", "cheeger_h",
              "cheeger_bound", "cheeger_ok")
    all_rows, status, summary = [], EXIT_OK, {}
    for (sec, *_), (rows, divergent) in zip(plans, results):
        all_rows += rows
        ok = all(r[-1] for r in rows)
        summary[sec.name] = {"c_p": rows[-1][4], "cheeger_h": rows[-1][7], "divergent": divergent,
                             "cheeger_ok": ok}
        if not ok:
            status = EXIT_FAIL
        print(f"{sec.name}: C_P={rows[-1][4]:.6g} h={rows[-1][7]:.6g} divergent={divergent}")
    out.write_csv("poincare.csv", header, all_rows)
    out.write_json("poincare_summary.json", summary)
    out.manifest("poincare", args.config, started, summary)
    return status


def _stability_cases(sections, seed: int) -> list[ExperimentConfig]:
    cases = []
    for sec in sections:
        window, gam, chi, grid = parse_window(sec), parse_gamma(sec), parse_chi(sec), parse_grid(sec)
        recipe = str(sec.raw("recipe.name", "perturbation")).lower()
        if recipe not in RECIPES:
            raise ConfigError(f"{sec.where('recipe.name')}: unknown recipe {recipe!r}; "
                              f"known: {sorted(RECIPES)}")
        params = sec.get_params("recipe.params")
        swept = sorted(k for k, v in params.items() if isinstance(v, list))
        for p in expand_sweep(params):
            p.setdefault("seed", seed)
            cases.append(ExperimentConfig(
                window, gam, chi, grid, recipe, p,
                samples_per_cell=sec.get_int("signal.samples_per_cell", 4),
                half_width=sec.get_float("signal.half_width", max(abs(grid.x_min), abs(grid.x_max)) + 40.0),
                tol={k[4:]: float(v) for k, v in sec.items.items() if k.startswith("tol.")},
                case_id=_case_label(sec.name, p, swept),
                negative_control=sec.get_bool("negative_control", False)))
    return cases


def cmd_stability(args) -> int:
    started = time.time()
    sections = load_config(args.config)
    cases = _stability_cases(sections, args.seed)
    for c in cases:
        try:
            c.validate()
        except NotAdmissibleError as exc:
            raise ConfigError(f"{c.case_id}: {exc}") from None
    out = OutputDir(args.out)
    reports = _map_jobs(run_stability_experiment, cases, args.jobs)
    rows = [r.row() for r in reports]
    ratios = [r.ratio for r in reports if r.ratio > 0 and math.isfinite(r.ratio)]
    c_emp = max(ratios) if ratios else 0.0
    spread = (max(ratios) / min(ratios)) if ratios else 0.0
    summary_row = ("summary", math.nan, math.nan, math.nan, c_emp, spread, int(any(r.alarm for r in reports)))
    out.write_csv("stability.csv", reports[0].COLUMNS if reports else ("case_id",), rows + [summary_row])
    out.write_csv("summary.csv", ("n_cases", "ratio_min", "ratio_max", "ratio_spread", "alarms"),
                  [(len(reports), min(ratios) if ratios else 0.0, c_emp, spread,
                    sum(r.alarm for r in reports))])
    status = EXIT_OK
    for c, r in zip(cases, reports):
        print(f"{r.case_id}: lhs={r.lhs:.6g} d={r.d_val:.6g} C_P={r.c_p:.6g} ratio={r.ratio:.6g}"
              + ("  UNIQUENESS ALARM" if r.alarm else ""))
        if r.alarm:
            status = EXIT_FAIL
        limit = c.tol.get("max_ratio")
        if limit is not None and r.ratio > limit * args.tol_scale:
            status = EXIT_FAIL
    max_spread = max((c.tol.get("max_spread", math.inf) for c in cases), default=math.inf)
    if spread > max_spread * args.tol_scale:
        print(f"ratio spread {spread:.4g} exceeds tol.max_spread {max_spread:g}")
        status = EXIT_FAIL
    out.manifest("stability", args.config, started,
                 {"cases": [c.case_id for c in cases], "c_emp": c_emp, "spread": spread,
                  "grids": {c.case_id: list(c.grid.shape) for c in cases}})
    return status


def junit_xml(suite: str, results) -> str:
    root = ET.Element("testsuite", name=suite, tests=str(len(results)),
                      failures=str(sum(not r.passed for r in results)),
                      time="%.3f" % sum(r.seconds for r in results))
    for r in results:
        case = ET.SubElement(root, "testcase", classname=f"gaborstab.verify.{suite}", name=r.name,
                             time="%.3f" % r.seconds)
        if not r.passed:
            fail = ET.SubElement(case, "failure", message=r.message or "assertion failed")
            fail.text = json.dumps(r.detail, sort_keys=True, default=_json_default)
    return ET.tostring(root, encoding="unicode") + "\n"


def cmd_verify(args) -> int:
    started = time.time()
    if args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; known: {', '.join(sorted(SUITES))}")
    results = run_suite(args.suite, seed=args.seed, tol_scale=args.tol_scale)
    out = OutputDir(args.out)
    out.write_text(f"verify_{args.suite}.xml", junit_xml(args.suite, results))
    out.write_json(f"verify_{args.suite}.json",
                   [{"name": r.name, "passed": r.passed, "detail": r.detail, "message": r.message}
                    for r in results])
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} {r.message}")
    out.manifest("verify", None, started, {"suite": args.suite, "tol_scale": args.tol_scale})
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaborstab", description="STFT phase retrieval stability lab")
    ap.add_argument("--version", action="version", version=TOOL)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="INI experiment definition")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="concurrent jobs")
        p.add_argument("--seed", type=int, default=0, help="default seed for random recipes")
        p.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance")
        p.add_argument("--svg", action="store_true", help="also write SVG heatmaps")

    p = sub.add_parser("spectrogram", help="|V_g f| on a grid as CSV")
    common(p)
    p.set_defaults(func=cmd_spectrogram)
    p = sub.add_parser("admissible", help="admissibility of (window, gamma)")
    p.add_argument("window")
    p.add_argument("a", type=float)
    p.add_argument("b", type=float)
    common(p, config=False)
    p.set_defaults(func=cmd_admissible)
    p = sub.add_parser("poincare", help="Poincare and Cheeger constants")
    common(p)
    p.set_defaults(func=cmd_poincare)
    p = sub.add_parser("stability", help="stability ratio experiments")
    common(p)
    p.set_defaults(func=cmd_stability)
    p = sub.add_parser("verify", help="run a lemma-check suite")
    p.add_argument("suite", help=", ".join(sorted(SUITES)))
    common(p, config=False)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EigenSolverError, NotAdmissibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
