"""Scenario files, built-in figure scenarios and curve computation.

A scenario is a YAML document.  Every section except ``observations`` and
``time_grid`` is optional; unknown keys are rejected with their line number.
The canonical form written by :func:`emit_config` fills in every default,
so ``parse_config(emit_config(cfg)) == cfg``.

.. code-block:: yaml

    scenario_id: example
    groups:                  # dimensionless input (or a dimensional `system:`)
      C_wD: 100.0
      R_Kr: 0.01
      R_Kz: 0.01
    observations:
      - {r_D: 0.5, z_D: 0.25}
      - {r_D: 0.5, z_D: [0.2, 0.4], t_Bs: 10.0}
    time_grid: {log10_start: -1, log10_end: 5, points_per_decade: 5}
    variants: {key: R_Kz, values: [0.0, 0.001, 0.01]}
    reference_no_leak: true
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from .drawdown import PointResult, SolverControls, delayed_drawdown, drawdown_D
from .errors import ConfigError, DomainError
from .laplace import medium_of
from .params import (GROUP_NAMES, Aquifer, Aquitard, DimensionlessGroups, PhysicalSystem,
                     SeriesControls, Vadose, Well, to_dimensionless)
from .transforms import LaplaceConfig, OscillatoryQuadConfig

THREADS_ENV = "LEAKYAQ_THREADS"
MEDIA = ("aquifer", "aquitard", "vadose")
CSV_COLUMNS = ("scenario_id", "variant_key", "variant_value", "r_D", "z_D_lo", "z_D_hi",
               "t_s", "s_D", "s_mD", "flag", "panels", "terms")


@dataclass(frozen=True)
class Observation:
    """Observation point (``z_lo == z_hi``) or screened interval."""

    r_D: float
    z_lo: float
    z_hi: float
    medium: str = None
    t_Bs: float = 0.0
    span_media: bool = False
    # dimensional (r, z) as written, so emission round-trips exactly
    raw: tuple = field(default=None, compare=False, repr=False)

    @property
    def is_point(self):
        return self.z_lo == self.z_hi

    @property
    def z_D(self):
        return self.z_lo if self.is_point else (self.z_lo, self.z_hi)

    def describe(self):
        z = f"z_D={self.z_lo:g}" if self.is_point else f"z_D=[{self.z_lo:g}, {self.z_hi:g}]"
        return f"r_D={self.r_D:g}, {z}"


@dataclass(frozen=True)
class TimeGrid:
    log10_start: float
    log10_end: float
    points_per_decade: int = 5

    def values(self):
        n = int(round((self.log10_end - self.log10_start) * self.points_per_decade)) + 1
        return np.logspace(self.log10_start, self.log10_end, n)


@dataclass(frozen=True)
class Sweep:
    """One swept parameter (or several linked ones sharing the values)."""

    keys: tuple
    values: tuple

    @property
    def label(self):
        return "+".join(self.keys)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: str
    groups: DimensionlessGroups
    observations: tuple
    time_grid: TimeGrid
    numerics: SolverControls = field(default_factory=SolverControls)
    variants: Sweep = None
    reference_no_leak: bool = False
    system: PhysicalSystem = None


# --------------------------------------------------------------------------
# YAML with line numbers
# --------------------------------------------------------------------------

def _load_with_lines(text):
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
        data = loader.construct_document(node) if node is not None else None
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ConfigError(f"syntax error: {exc.problem}", line=mark.line + 1 if mark else None)
    finally:
        loader.dispose()
    lines = {}

    def walk(n, path):
        lines[path] = n.start_mark.line + 1
        if isinstance(n, yaml.MappingNode):
            for k, v in n.value:
                lines[path + (k.value,)] = k.start_mark.line + 1
                walk(v, path + (k.value,))
        elif isinstance(n, yaml.SequenceNode):
            for i, v in enumerate(n.value):
                walk(v, path + (i,))

    if node is not None:
        walk(node, ())
    return data, lines


class _Reader:
    def __init__(self, lines):
        self.lines = lines

    def fail(self, path, message):
        line = None
        for k in range(len(path), -1, -1):
            if path[:k] in self.lines:
                line = self.lines[path[:k]]
                break
        name = ".".join(str(p) for p in path) or "<document>"
        raise ConfigError(f"{name}: {message}", line=line, field=name)

    def mapping(self, value, path, allowed, required=()):
        if not isinstance(value, dict):
            self.fail(path, "expected a mapping")
        for key in value:
            if key not in allowed:
                self.fail(path + (key,), f"unknown key (allowed: {', '.join(allowed)})")
        for key in required:
            if key not in value:
                self.fail(path, f"missing required key '{key}'")
        return value

    def number(self, value, path, integer=False):
        if isinstance(value, str):
            # YAML 1.1 reads 1e-3 and inf as strings
            try:
                value = float(value)
            except ValueError:
                self.fail(path, f"expected a number, got {value!r}")
            if math.isnan(value):
                self.fail(path, "NaN is not allowed")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"expected a number, got {value!r}")
        if integer:
            if int(value) != value:
                self.fail(path, f"expected an integer, got {value!r}")
            return int(value)
        return float(value)

    def flag(self, value, path):
        if not isinstance(value, bool):
            self.fail(path, f"expected true or false, got {value!r}")
        return value

    def build(self, cls, value, path, converters=None):
        """Instantiate a flat dataclass from a mapping of numbers."""
        names = [f.name for f in fields(cls)]
        self.mapping(value, path, names)
        kwargs = {}
        for key, raw in value.items():
            conv = (converters or {}).get(key)
            kwargs[key] = conv(raw, path + (key,)) if conv else self.number(raw, path + (key,))
        try:
            return cls(**kwargs)
        except (DomainError, TypeError) as exc:
            self.fail(path, str(exc))


def _int_fields(cls):
    return {f.name for f in fields(cls) if f.type in (int, "int")}


def _numerics(rd, value, path):
    allowed = ("laplace", "quad", "series", "stehfest_terms", "average_nodes")
    rd.mapping(value, path, allowed)
    kw = {}
    for key, cls in (("laplace", LaplaceConfig), ("quad", OscillatoryQuadConfig),
                     ("series", SeriesControls)):
        if key in value:
            ints = _int_fields(cls)
            conv = {n: (lambda v, p: rd.number(v, p, integer=True)) for n in ints}
            conv.update({f.name: rd.flag for f in fields(cls) if f.type in (bool, "bool")})
            kw[key] = rd.build(cls, value[key], path + (key,), conv)
    for key in ("stehfest_terms", "average_nodes"):
        if key in value:
            kw[key] = rd.number(value[key], path + (key,), integer=True)
    try:
        return SolverControls(**kw)
    except DomainError as exc:
        rd.fail(path, str(exc))


def _system(rd, value, path):
    parts = {"aquifer": Aquifer, "aquitard": Aquitard, "vadose": Vadose, "well": Well}
    rd.mapping(value, path, tuple(parts), required=("aquifer", "aquitard", "vadose", "well"))
    built = {k: rd.build(cls, value[k], path + (k,)) for k, cls in parts.items()}
    try:
        return PhysicalSystem(**built)
    except DomainError as exc:
        rd.fail(path, str(exc))


def _observation(rd, value, path, groups, b):
    allowed = ("r_D", "z_D", "r", "z", "medium", "t_Bs", "span_media")
    rd.mapping(value, path, allowed)
    dimensional = b is not None
    rkey, zkey = ("r", "z") if dimensional else ("r_D", "z_D")
    for key in (rkey, zkey):
        if key not in value:
            rd.fail(path, f"missing required key '{key}'")
    other = {"r_D", "z_D"} if dimensional else {"r", "z"}
    for key in other & set(value):
        rd.fail(path + (key,), f"'{key}' not allowed with a {'system' if dimensional else 'groups'} block")
    scale = b if dimensional else 1.0
    r_D = rd.number(value[rkey], path + (rkey,)) / scale
    zraw = value[zkey]
    if isinstance(zraw, list):
        if len(zraw) != 2:
            rd.fail(path + (zkey,), "an interval needs exactly two heights")
        z1, z2 = (rd.number(v, path + (zkey, i)) / scale for i, v in enumerate(zraw))
        z_lo, z_hi = min(z1, z2), max(z1, z2)
    else:
        z_lo = z_hi = rd.number(zraw, path + (zkey,)) / scale
    medium = value.get("medium")
    if medium is not None and medium not in MEDIA:
        rd.fail(path + ("medium",), f"medium must be one of {', '.join(MEDIA)}")
    t_Bs = rd.number(value.get("t_Bs", 0.0), path + ("t_Bs",))
    if t_Bs < 0:
        rd.fail(path + ("t_Bs",), "lag must be non-negative")
    span = value.get("span_media", False)
    if not isinstance(span, bool):
        rd.fail(path + ("span_media",), "expected true or false")
    if r_D < groups.r_w_over_b:
        rd.fail(path + (rkey,), "observation radius is inside the pumping well")
    try:
        if z_lo == z_hi:
            medium_of(groups, z_lo, medium)
        else:
            medium_of(groups, z_lo)
            medium_of(groups, z_hi)
    except DomainError as exc:
        rd.fail(path + (zkey,), str(exc))
    if z_lo != z_hi:
        if any(z_lo < c < z_hi for c in (0.0, 1.0)) and not span:
            rd.fail(path + (zkey,), "interval spans more than one medium; set span_media: true")
        if medium is not None:
            rd.fail(path + ("medium",), "medium only selects the side of an interface for a point")
    raw = (value[rkey], zraw) if dimensional else None
    return Observation(r_D, z_lo, z_hi, medium, t_Bs, span, raw)


def parse_config(source):
    """Parse a scenario from a path or YAML text."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and source.endswith((".yaml", ".yml"))):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {source}: {exc.strerror}")
    else:
        text = source
    data, lines = _load_with_lines(text)
    rd = _Reader(lines)
    top = ("scenario_id", "groups", "system", "observations", "time_grid", "numerics",
           "variants", "reference_no_leak")
    rd.mapping(data, (), top, required=("observations", "time_grid"))
    sid = data.get("scenario_id", "scenario")
    if not isinstance(sid, str) or not sid or any(c in sid for c in "/\\ \t"):
        rd.fail(("scenario_id",), "must be a non-empty name without spaces or slashes")

    if "groups" in data and "system" in data:
        rd.fail(("system",), "give either 'groups' or 'system', not both")
    system, b = None, None
    if "system" in data:
        system = _system(rd, data["system"], ("system",))
        groups = to_dimensionless(system, system.aquifer.b)[0]
        b = system.aquifer.b
    else:
        groups = rd.build(DimensionlessGroups, data.get("groups") or {}, ("groups",))

    obs_raw = data["observations"]
    if not isinstance(obs_raw, list) or not obs_raw:
        rd.fail(("observations",), "expected a non-empty list")
    observations = tuple(_observation(rd, o, ("observations", i), groups, b)
                         for i, o in enumerate(obs_raw))

    grid = rd.build(TimeGrid, data["time_grid"], ("time_grid",),
                    {"points_per_decade": lambda v, p: rd.number(v, p, integer=True)})
    if not grid.log10_end > grid.log10_start:
        rd.fail(("time_grid",), "time grid must be strictly increasing (log10_end > log10_start)")
    if grid.points_per_decade < 1:
        rd.fail(("time_grid", "points_per_decade"), "must be >= 1")

    numerics = _numerics(rd, data["numerics"], ("numerics",)) if "numerics" in data \
        else SolverControls()

    variants = None
    if data.get("variants") is not None:
        variants = _sweep(rd, data["variants"], ("variants",), groups)
    ref = data.get("reference_no_leak", False)
    if not isinstance(ref, bool):
        rd.fail(("reference_no_leak",), "expected true or false")
    return ScenarioConfig(sid, groups, observations, grid, numerics, variants, ref, system)


def _sweep(rd, value, path, groups):
    rd.mapping(value, path, ("key", "values"), required=("key", "values"))
    keys = value["key"]
    keys = tuple(keys) if isinstance(keys, list) else (keys,)
    for k in keys:
        if k != "coupling" and k not in GROUP_NAMES:
            rd.fail(path + ("key",), f"'{k}' is not a dimensionless group or 'coupling'")
    if "coupling" in keys and len(keys) > 1:
        rd.fail(path + ("key",), "'coupling' cannot be linked with other keys")
    vals = value["values"]
    if not isinstance(vals, list):
        rd.fail(path + ("values",), "expected a list")
    out = []
    for i, v in enumerate(vals):
        if keys == ("coupling",):
            if v not in ("general", "no_leak"):
                rd.fail(path + ("values", i), "coupling must be 'general' or 'no_leak'")
            out.append(v)
            continue
        v = rd.number(v, path + ("values", i))
        try:
            groups.with_(**{k: v for k in keys})
        except DomainError as exc:
            rd.fail(path + ("values", i), str(exc))
        out.append(v)
    return Sweep(keys, tuple(out))


# --------------------------------------------------------------------------
# Canonical emission
# --------------------------------------------------------------------------

def _plain(obj):
    # unset optional fields are omitted; the parser restores their default
    return {f.name: getattr(obj, f.name) for f in fields(obj) if getattr(obj, f.name) is not None}


def emit_config(cfg):
    """Canonical YAML text for ``cfg`` (every default written out)."""
    doc = {"scenario_id": cfg.scenario_id}
    if cfg.system is not None:
        doc["system"] = {k: _plain(getattr(cfg.system, k))
                         for k in ("aquifer", "aquitard", "vadose", "well")}
        b = cfg.system.aquifer.b
    else:
        doc["groups"] = cfg.groups.as_dict()
        b = None
    obs = []
    for o in cfg.observations:
        if b:
            if o.raw is not None:
                r, z = o.raw
                z = [float(v) for v in z] if isinstance(z, list) else float(z)
            else:
                r, z = o.r_D * b, (o.z_lo * b if o.is_point else [o.z_lo * b, o.z_hi * b])
            entry = {"r": float(r), "z": z}
        else:
            entry = {"r_D": o.r_D, "z_D": o.z_lo if o.is_point else [o.z_lo, o.z_hi]}
        entry.update(medium=o.medium, t_Bs=o.t_Bs, span_media=o.span_media)
        obs.append(entry)
    doc["observations"] = obs
    doc["time_grid"] = _plain(cfg.time_grid)
    n = cfg.numerics
    doc["numerics"] = {"laplace": _plain(n.laplace), "quad": _plain(n.quad),
                       "series": _plain(n.series), "stehfest_terms": n.stehfest_terms,
                       "average_nodes": n.average_nodes}
    if cfg.variants is not None:
        key = cfg.variants.keys[0] if len(cfg.variants.keys) == 1 else list(cfg.variants.keys)
        doc["variants"] = {"key": key, "values": list(cfg.variants.values)}
    doc["reference_no_leak"] = cfg.reference_no_leak
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


# --------------------------------------------------------------------------
# Built-in scenarios (figure parameter sets)
# --------------------------------------------------------------------------

_FIGURE_GROUPS = DimensionlessGroups(
    K_D=1.0, S_D=1e3, a_kD=10.0, a_cD=10.0, psi_aD=0.0, psi_kD=0.0, d_D=0.0, l_D=0.6,
    r_w_over_b=0.02, C_wD=1e2, R_Kr=1e-2, R_Kz=1e-2, R_Ss=1e-2)
_AQUIFER_GRID = TimeGrid(-1.0, 5.0, 5)
_AQUITARD_GRID = TimeGrid(3.0, 8.0, 5)


def _aquifer(sid, z_D=0.25, **changes):
    sweep = changes.pop("sweep", None)
    return ScenarioConfig(
        scenario_id=sid, groups=_FIGURE_GROUPS.with_(**changes),
        observations=(Observation(0.5, z_D, z_D),), time_grid=_AQUIFER_GRID,
        variants=sweep, reference_no_leak=True)


def _aquitard(sid, sweep, **changes):
    base = dict(R_Ss=1e2)
    base.update(changes)
    return ScenarioConfig(
        scenario_id=sid, groups=_FIGURE_GROUPS.with_(**base),
        observations=(Observation(0.2, -0.25, -0.25),), time_grid=_AQUITARD_GRID,
        variants=sweep)


BUILTINS = {
    "fig2a": lambda: _aquifer("fig2a", z_D=0.75),
    "fig2b": lambda: _aquifer("fig2b", z_D=0.25),
    "fig3a": lambda: _aquifer("fig3a", R_Kr=1e-6,
                              sweep=Sweep(("R_Kz",), (0.0, 1e-3, 1e-2, 1e-1))),
    "fig3b": lambda: _aquifer("fig3b", R_Kr=1.0,
                              sweep=Sweep(("R_Kz",), (0.0, 1e-3, 1e-2, 1e-1))),
    "fig4": lambda: _aquifer("fig4", R_Kz=0.1,
                             sweep=Sweep(("R_Kr",), (1e-4, 1e-3, 1e-2, 1e-1, 1.0))),
    "fig5": lambda: _aquifer("fig5", R_Ss=1.0,
                             sweep=Sweep(("R_Kr", "R_Kz"), (1e-3, 1e-2, 1e-1, 1.0, 2.0))),
    "fig6": lambda: _aquifer("fig6", R_Ss=1e2,
                             sweep=Sweep(("R_b",), (0.5, 1.0, 2.0, 4.0, 8.0, 16.0))),
    "fig7": lambda: _aquitard("fig7", Sweep(("C_wD",), (1.0, 10.0, 1e2, 1e3))),
    "fig8": lambda: _aquitard("fig8", Sweep(("a_kD",), (1.0, 10.0, 1e2, 1e3)), a_cD=1.0),
    "fig9": lambda: _aquitard("fig9", Sweep(("a_cD",), (1.0, 10.0, 1e2, 1e3)), a_kD=1e3),
}


def list_builtins():
    return sorted(BUILTINS, key=lambda s: (len(s), s))


def builtin(name):
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ConfigError(f"unknown built-in scenario {name!r} "
                          f"(available: {', '.join(list_builtins())})") from None


# --------------------------------------------------------------------------
# Running
# --------------------------------------------------------------------------

@dataclass
class CurveResult:
    """One time-drawdown curve with per-point diagnostics.

    ``t`` and ``s``/``s_m`` are dimensional and only present when the
    scenario was given as a physical system.
    """

    scenario_id: str
    variant_key: str
    variant_value: object
    coupling: str
    observation: Observation
    t_s: np.ndarray
    s_D: np.ndarray
    s_mD: np.ndarray
    flags: tuple
    panels: np.ndarray
    terms: np.ndarray
    s_D_stehfest: np.ndarray = None
    t: np.ndarray = None
    s: np.ndarray = None
    s_m: np.ndarray = None

    @property
    def label(self):
        parts = [self.observation.describe()]
        if self.variant_key:
            v = self.variant_value
            parts.append(f"{self.variant_key}={v if isinstance(v, str) else format(v, 'g')}")
        return ", ".join(parts)

    @property
    def max_discrepancy(self):
        """Largest relative de Hoog/Stehfest difference over converged points."""
        if self.s_D_stehfest is None:
            return None
        ok = np.array([f == "converged" for f in self.flags]) & np.isfinite(self.s_D_stehfest)
        if not ok.any():
            return math.nan
        a, b = self.s_D[ok], self.s_D_stehfest[ok]
        return float(np.max(np.abs(a - b) / np.abs(a)))


def _fmt_value(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return "%.12e" % v


def default_threads():
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        if n < 1:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        return n
    return os.cpu_count() or 1


def _curve_specs(cfg):
    specs = []
    for obs in cfg.observations:
        if cfg.variants is None:
            specs.append((obs, "", None, cfg.groups, "general"))
        else:
            for v in cfg.variants.values:
                if cfg.variants.keys == ("coupling",):
                    specs.append((obs, "coupling", v, cfg.groups, v))
                else:
                    g = cfg.groups.with_(**{k: v for k in cfg.variants.keys})
                    specs.append((obs, cfg.variants.label, v, g, "general"))
        if cfg.reference_no_leak:
            specs.append((obs, "coupling", "no_leak", cfg.groups, "no_leak"))
    return specs


def _point_task(args):
    groups, obs, t_s, controls, coupling, method = args
    try:
        return drawdown_D(groups, obs.r_D, obs.z_D, t_s, controls, coupling, method,
                          obs.medium if obs.is_point else None)
    except DomainError:
        return PointResult(math.nan, "failed", 0, 0)


def run_scenario(cfg, threads=None, cross_check=False):
    """Compute every curve of ``cfg``; parallel over (curve, time) points.

    Output order is fixed by the configuration, never by completion order.
    """
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    ts = cfg.time_grid.values()
    specs = _curve_specs(cfg)
    methods = ("dehoog", "stehfest") if cross_check else ("dehoog",)
    tasks = [(g, obs, t, cfg.numerics, coupling, m)
             for (obs, _, _, g, coupling) in specs for m in methods for t in ts]
    if threads == 1 or len(tasks) < 2:
        out = [_point_task(a) for a in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(_point_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))

    results = []
    n = len(ts)
    per_curve = n * len(methods)
    for i, (obs, key, value, g, coupling) in enumerate(specs):
        block = out[i * per_curve:(i + 1) * per_curve]
        main = block[:n]
        s_D = np.array([r.s_D for r in main])
        s_mD = np.array([delayed_drawdown(s, t, obs.t_Bs) for s, t in zip(s_D, ts)])
        res = CurveResult(
            scenario_id=cfg.scenario_id, variant_key=key, variant_value=value,
            coupling=coupling, observation=obs, t_s=ts.copy(), s_D=s_D, s_mD=s_mD,
            flags=tuple(r.flag for r in main), panels=np.array([r.panels for r in main]),
            terms=np.array([r.terms for r in main]))
        if cross_check:
            res.s_D_stehfest = np.array([r.s_D for r in block[n:]])
        if cfg.system is not None:
            sysm = cfg.system
            r = obs.r_D * sysm.aquifer.b
            res.t = ts * r * r / sysm.alpha_s
            res.s = sysm.s_ref * s_D
            res.s_m = sysm.s_ref * s_mD
        results.append(res)
    return results


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

def _num(x):
    return "%.12e" % x


def emit_csv(results, path):
    """Write curves as CSV (one row per time point, fixed column order)."""
    if not results:
        raise ValueError("no results to write")
    rows = [",".join(CSV_COLUMNS)]
    for res in results:
        o = res.observation
        for k in range(len(res.t_s)):
            rows.append(",".join([
                res.scenario_id, res.variant_key, _fmt_value(res.variant_value),
                _num(o.r_D), _num(o.z_lo), _num(o.z_hi), _num(res.t_s[k]),
                _num(res.s_D[k]), _num(res.s_mD[k]), res.flags[k],
                str(int(res.panels[k])), str(int(res.terms[k]))]))
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")
    return Path(path)


_PLOT_TEMPLATE = '''"""Log-log time-drawdown plot for scenario {sid} (generated).

Reads {csv_name} from this directory and writes {png_name}.  One line per
(observation, variant); points that failed or are non-positive are skipped.
"""
import csv
from collections import OrderedDict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
curves = OrderedDict()
with open(HERE / "{csv_name}", newline="", encoding="utf-8") as fh:
    for row in csv.DictReader(fh):
        key = (row["r_D"], row["z_D_lo"], row["z_D_hi"], row["variant_key"], row["variant_value"])
        t, s = float(row["t_s"]), float(row["s_D"])
        if row["flag"] != "failed" and s > 0:
            curves.setdefault(key, ([], []))
            curves[key][0].append(t)
            curves[key][1].append(s)

fig, ax = plt.subplots(figsize=(6, 4.5))
for (r, zlo, zhi, vkey, vval), (t, s) in curves.items():
    z = "%g" % float(zlo) if zlo == zhi else "[%g, %g]" % (float(zlo), float(zhi))
    label = "r_D=%g, z_D=%s" % (float(r), z)
    if vkey:
        val = vval if vkey == "coupling" else "%g" % float(vval)
        label += ", %s=%s" % (vkey, val)
    ax.loglog(t, s, label=label)
ax.set_xlabel("t_s")
ax.set_ylabel("s_D")
ax.set_title("{sid}")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(HERE / "{png_name}", dpi=150)
'''


def emit_plot_script(results, path, csv_name=None):
    """Write a stand-alone matplotlib script plotting the CSV of ``results``."""
    if not results:
        raise ValueError("no results to plot")
    sid = results[0].scenario_id
    csv_name = csv_name or f"{sid}.csv"
    text = _PLOT_TEMPLATE.format(sid=sid, csv_name=csv_name, png_name=f"{sid}.png")
    Path(path).write_text(text, encoding="utf-8")
    return Path(path)


def convergence_report(results):
    """Plain-text convergence summary, one block per curve."""
    lines = []
    total_bad = 0
    for res in results:
        bad = [t for t, f in zip(res.t_s, res.flags) if f != "converged"]
        failed = sum(f == "failed" for f in res.flags)
        total_bad += len(bad)
        lines.append(f"[{res.scenario_id}] {res.label}")
        lines.append(f"  points: {len(res.t_s)}  max panels: {int(res.panels.max(initial=0))}  "
                     f"max series terms: {int(res.terms.max(initial=0))}")
        lines.append(f"  non-converged: {len(bad)} (failed: {failed})")
        if bad:
            shown = ", ".join("%.3g" % t for t in bad[:8]) + (" ..." if len(bad) > 8 else "")
            lines.append(f"  offending observation {res.observation.describe()} at t_s = {shown}")
        if res.s_D_stehfest is not None:
            lines.append(f"  de Hoog / Stehfest max relative discrepancy: {res.max_discrepancy:.3e}")
    lines.append(f"total non-converged points: {total_bad}")
    return "\n".join(lines) + "\n"


def override_tolerance(controls, tol):
    """Tighten or loosen every tolerance at once (``--tol-override``)."""
    if not tol > 0:
        raise ConfigError("tolerance override must be positive")
    lap = replace(controls.laplace, rel_tol=min(tol, 1e-4))
    quad = replace(controls.quad, tail_rel_tol=tol)
    series = replace(controls.series, series_rel_tol=tol)
    return replace(controls, laplace=lap, quad=quad, series=series)
