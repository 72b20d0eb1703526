"""Command-line front end.

Subcommands: ``solve`` (two-stage throughput optimum as JSON), ``mc`` (raw
Monte-Carlo estimate), ``experiment`` (figure-style sweeps to CSV/JSON/SVG)
and ``list-experiments``.
"""

from __future__ import annotations

import argparse
import csv
import functools
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .connectivity import CasLink, DasLink, conn_prob_cas_approx, conn_prob_das_approx, das_w_const
from .covertness import OutageQuery, covert_outage, max_power
from .detection import DetectionContext, avg_detection_exact4, avg_detection_general, worst_case_threshold
from .errors import CovertGeoError
from .model import NetworkConfig, PolarPoint, System, dbm_to_watts, make_layout, watts_to_dbm
from .montecarlo import (
    DEFAULT_SEED,
    MonteCarloEstimate,
    TrialConfig,
    default_seed,
    estimate_avg_detection,
    estimate_connectivity,
    estimate_outage,
)
from .throughput import Method, connectivity_at, solve_throughput

log = logging.getLogger("covertgeo")

EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_FAILURE = 1

CONFIG_KEYS = tuple(f.name for f in fields(NetworkConfig))
INT_KEYS = {"n_wardens", "approx_terms", "m"}
POWER_KEYS = {"p_j", "p_a"}

BASE_PARAMS: dict = {
    "alpha": 4.0,
    "lambda_j": 0.1,
    "p_j": 1.0,
    "d_radius": 2.0,
    "n_wardens": 2,
    "epsilon": 0.3,
    "approx_terms": 5,
    "system": "cas",
    "m": 4,
    "p_a": 1.0,
    "xi": 0.4,
    "beta": 1.0,
    "rate": 1.0,
    "warden_r": 2.0,
    "warden_theta": 0.0,
    "L": "exact",
    "method": "exact",
}
SWEEPABLE = tuple(k for k in BASE_PARAMS if k not in ("system", "L", "method"))

ESTIMANDS = (
    "pbar_w",
    "pbar_w_max",
    "xi_opt",
    "outage",
    "p_star",
    "connectivity",
    "connectivity_approx",
    "throughput_rate",
    "t_star",
)
EMITS = ("csv", "json", "svg")
CSV_COLUMNS = ("sweep_value", "estimand", "analytic_value", "mc_value", "mc_stderr")


class UsageError(CovertGeoError):
    pass


def parse_power(text) -> float:
    """Watts, or dBm when the value carries a ``dbm`` suffix."""
    s = str(text).strip().lower()
    try:
        value = dbm_to_watts(float(s[:-3])) if s.endswith("dbm") else float(s)
    except ValueError:
        raise UsageError(f"cannot parse power {text!r}") from None
    if not value > 0:
        raise UsageError(f"power must be positive, got {text!r}")
    return value


def _coerce(key: str, value):
    if key in POWER_KEYS:
        return parse_power(value)
    if key in INT_KEYS:
        return int(value)
    if key == "system":
        return System(str(value).lower()).value
    if key == "method":
        return Method(value).value
    if key == "L":
        return "exact" if str(value) == "exact" else int(value)
    return float(value)


def normalize_params(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        key = "p_a" if key == "total_power" else key
        if key not in BASE_PARAMS:
            raise UsageError(f"unknown parameter {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {exc}") from None
    return out


def fmt(x) -> str:
    return "" if x is None else format(float(x), ".12g")


# ---------------------------------------------------------------------------
# experiments

@dataclass
class ExperimentSpec:
    name: str
    description: str
    sweep: str
    grid: tuple
    outputs: tuple
    series: tuple = (("", {}),)
    base: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    trials: int = 0
    emit: tuple = ("csv",)

    def validate(self):
        if self.sweep not in SWEEPABLE:
            raise UsageError(f"sweep parameter {self.sweep!r} is not one of {', '.join(SWEEPABLE)}")
        if len(self.grid) == 0:
            raise UsageError("sweep grid is empty")
        bad = [o for o in self.outputs if o not in ESTIMANDS]
        if bad or not self.outputs:
            raise UsageError(f"unknown estimand(s) {bad}; choose from {', '.join(ESTIMANDS)}")
        bad = [e for e in self.emit if e not in EMITS]
        if bad:
            raise UsageError(f"unknown output format(s) {bad}")
        if self.trials < 0:
            raise UsageError("trials must be non-negative")
        normalize_params(self.base)
        for _, overrides in self.series:
            normalize_params(overrides)


def _grid(values) -> tuple:
    return tuple(float(format(v, ".12g")) for v in values)


def _product(*groups):
    """Cartesian product of labelled override groups."""
    out = [("", {})]
    for group in groups:
        out = [
            (",".join(x for x in (la, lb) if x), {**da, **db})
            for la, da in out
            for lb, db in group
        ]
    return tuple(out)


SYSTEMS = (("cas", {"system": "cas"}), ("das", {"system": "das"}))


def _registry() -> dict[str, ExperimentSpec]:
    specs = [
        ExperimentSpec(
            "fig2",
            "average detection probability vs threshold for several approximation orders",
            "xi",
            _grid(np.geomspace(0.02, 5.0, 15)),
            ("pbar_w",),
            series=tuple((f"L={L}", {"L": L}) for L in (2, 3, 5, "exact")),
            base={"system": "cas", "m": 1, "p_a": 1.0, "warden_r": 2.0},
            trials=100_000,
        ),
        ExperimentSpec(
            "fig3",
            "worst-case detection probability vs interferer density for several transmit powers",
            "lambda_j",
            _grid(np.geomspace(0.01, 1.0, 10)),
            ("pbar_w_max",),
            series=tuple((f"P_A={d}dBm", {"p_a": f"{d}dbm"}) for d in (20, 30, 40)),
            base={"system": "cas", "m": 1, "warden_r": 2.0},
            trials=10_000,
        ),
        ExperimentSpec(
            "fig4",
            "worst-case detection probability vs warden bearing, CAS and DAS with M=4",
            "warden_theta",
            _grid(np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False)),
            ("pbar_w_max",),
            series=_product(SYSTEMS, tuple((f"r_w={r}", {"warden_r": r}) for r in (0.5, 1.5))),
            base={"m": 4, "p_a": 1.0},
            trials=10_000,
        ),
        ExperimentSpec(
            "fig5",
            "covert outage vs detection radius for several transmit powers, M=4, N=2",
            "d_radius",
            _grid(np.linspace(0.5, 4.0, 8)),
            ("outage",),
            series=_product(SYSTEMS, tuple((f"P_A={d}dBm", {"p_a": f"{d}dbm"}) for d in (20, 30))),
            base={"m": 4, "n_wardens": 2},
            trials=20_000,
        ),
        ExperimentSpec(
            "fig6",
            "covert outage at 20 dBm and maximal covert power vs number of antennas",
            "m",
            (1, 2, 3, 4, 6, 8),
            ("outage", "p_star"),
            series=_product(SYSTEMS, tuple((f"lambda_J={l}", {"lambda_j": l}) for l in (0.1, 0.2))),
            base={"p_a": "20dbm", "d_radius": 2.0, "n_wardens": 2, "epsilon": 0.3},
            trials=20_000,
        ),
        ExperimentSpec(
            "fig7",
            "connectivity probability vs interferer density, exact and high-reliability forms",
            "lambda_j",
            _grid(np.geomspace(0.01, 0.5, 8)),
            ("connectivity", "connectivity_approx"),
            series=_product(SYSTEMS, tuple((f"M={m}", {"m": m}) for m in (1, 2, 4))),
            base={"p_a": 1.0},
            trials=10_000,
        ),
        ExperimentSpec(
            "fig8",
            "covert throughput vs rate at the maximal covert power",
            "rate",
            _grid(np.linspace(0.1, 4.0, 14)),
            ("throughput_rate",),
            series=_product(
                SYSTEMS,
                tuple((f"eps={e}", {"epsilon": e}) for e in (0.1, 0.3)),
                tuple((f"M={m}", {"m": m}) for m in (2, 4)),
            ),
            base={"lambda_j": 0.1, "d_radius": 2.0, "n_wardens": 2},
        ),
        ExperimentSpec(
            "fig9",
            "maximal covert throughput vs number of antennas, exact and closed-form rate",
            "m",
            (1, 2, 4, 6, 8),
            ("t_star",),
            series=_product(
                SYSTEMS,
                tuple((f"lambda_J={l}", {"lambda_j": l}) for l in (0.1, 0.2)),
                (("exact", {"method": "exact"}), ("closed-form", {"method": "closed-form"})),
            ),
            base={"d_radius": 2.0, "n_wardens": 2, "epsilon": 0.3},
        ),
    ]
    return {s.name: s for s in specs}


REGISTRY = _registry()


def _point_params(spec: ExperimentSpec, overrides: dict, value) -> dict:
    p = dict(BASE_PARAMS)
    p.update(normalize_params(spec.base))
    p.update(normalize_params(overrides))
    p[spec.sweep] = _coerce(spec.sweep, value)
    return p


def _config(p: dict) -> NetworkConfig:
    return NetworkConfig(**{k: p[k] for k in CONFIG_KEYS})


def _layout(p: dict, total_power: float | None = None):
    return make_layout(p["system"], p["m"], p["p_a"] if total_power is None else total_power)


@functools.lru_cache(maxsize=256)
def _p_star(cfg: NetworkConfig, system: str, m: int) -> float:
    return max_power(OutageQuery(cfg, make_layout(system, m, 1.0)), cfg.epsilon)


@functools.lru_cache(maxsize=256)
def _t_star(cfg: NetworkConfig, system: str, m: int, method: str) -> float:
    return solve_throughput(cfg, make_layout(system, m, 1.0), method=method).t_star


def evaluate_point(estimand: str, p: dict, tc: TrialConfig | None) -> tuple[float, MonteCarloEstimate | None]:
    """Analytic value of ``estimand`` at parameters ``p`` plus an optional simulation."""
    cfg = _config(p)
    lay = _layout(p)
    warden = PolarPoint(p["warden_r"], p["warden_theta"])
    if estimand in ("pbar_w", "pbar_w_max", "xi_opt"):
        ctx = DetectionContext.for_warden(cfg, lay, warden)
        if estimand == "pbar_w":
            if p["L"] == "exact":
                value = avg_detection_exact4(ctx, p["xi"])
                mc = estimate_avg_detection(cfg, lay, warden, p["xi"], tc) if tc else None
                return value, mc
            return avg_detection_general(ctx, p["xi"], p["L"]), None
        sol = worst_case_threshold(ctx, cfg.approx_terms)
        if estimand == "xi_opt":
            return sol.xi_opt, None
        return sol.p_max, estimate_avg_detection(cfg, lay, warden, sol.xi_opt, tc) if tc else None
    if estimand == "outage":
        return covert_outage(OutageQuery(cfg, lay)), estimate_outage(cfg, lay, tc) if tc else None
    if estimand == "p_star":
        return _p_star(cfg, p["system"], p["m"]), None
    if estimand == "connectivity":
        return connectivity_at(cfg, lay, p["beta"]), estimate_connectivity(cfg, lay, p["beta"], tc) if tc else None
    if estimand == "connectivity_approx":
        if System(p["system"]) is System.CAS:
            return conn_prob_cas_approx(CasLink.from_config(cfg, lay), p["beta"]), None
        w = das_w_const(DasLink.from_config(cfg, lay)).value
        return conn_prob_das_approx(w, p["beta"], 2.0 / cfg.alpha), None
    if estimand == "throughput_rate":
        lay_star = _layout(p, _p_star(cfg, p["system"], p["m"]))
        return connectivity_at(cfg, lay_star, math.expm1(p["rate"])) * p["rate"], None
    if estimand == "t_star":
        return _t_star(cfg, p["system"], p["m"], p["method"]), None
    raise UsageError(f"unknown estimand {estimand!r}")


def run_rows(spec: ExperimentSpec) -> list[dict]:
    """One row per grid point, series and estimand, in a fixed order."""
    spec.validate()
    rows = []
    for estimand in spec.outputs:
        for label, overrides in spec.series:
            name = f"{estimand}[{label}]" if label else estimand
            for value in spec.grid:
                tc = TrialConfig(trials=spec.trials, master_seed=spec.seed) if spec.trials else None
                row = {"sweep_value": fmt(value), "estimand": name, "analytic_value": "", "mc_value": "", "mc_stderr": ""}
                try:
                    analytic, mc = evaluate_point(estimand, _point_params(spec, overrides, value), tc)
                    row["analytic_value"] = fmt(analytic)
                    if mc is not None:
                        row["mc_value"] = fmt(mc.value)
                        row["mc_stderr"] = fmt(mc.std_error)
                except (CovertGeoError, ValueError, ArithmeticError) as exc:
                    log.warning("%s at %s=%s failed: %s", name, spec.sweep, value, exc)
                    row["analytic_value"] = f"error:{type(exc).__name__}"
                rows.append(row)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# SVG

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def svg_line_chart(series: dict[str, tuple[list[float], list[float]]], xlabel: str, ylabel: str, title: str = "") -> str:
    """Plain SVG line chart; one polyline per series with a legend."""
    w, h = 720, 460
    left, right, top, bottom = 70, 200, 40, 60
    pw, ph = w - left - right, h - top - bottom
    xs = [x for sx, _ in series.values() for x in sx]
    ys = [y for _, sy in series.values() for y in sy if math.isfinite(y)]
    if not xs or not ys:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{_esc(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.1f}" y1="{top + ph}" x2="{sx(t):.1f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.1f}" y="{top + ph + 18}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(t):.1f}" x2="{left}" y2="{sy(t):.1f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{sy(t) + 4:.1f}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{h - 15}" text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" transform="rotate(-90 18 {top + ph / 2:.1f})">{_esc(ylabel)}</text>'
    )
    for k, (label, (px, py)) in enumerate(series.items()):
        colour = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(px, py) if math.isfinite(y))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.8" points="{pts}"/>')
        ly = top + 14 + 18 * k
        out.append(f'<line x1="{left + pw + 12}" y1="{ly}" x2="{left + pw + 36}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 42}" y="{ly + 4}">{_esc(label or "value")}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def rows_to_svgs(spec: ExperimentSpec, rows: list[dict]) -> dict[str, str]:
    charts = {}
    for estimand in spec.outputs:
        series: dict[str, tuple[list[float], list[float]]] = {}
        for row in rows:
            name = row["estimand"]
            base, _, label = name.partition("[")
            if base != estimand or row["analytic_value"].startswith("error"):
                continue
            xs, ys = series.setdefault(label.rstrip("]"), ([], []))
            xs.append(float(row["sweep_value"]))
            ys.append(float(row["analytic_value"]))
        charts[estimand] = svg_line_chart(series, spec.sweep, estimand, f"{spec.name}: {estimand} vs {spec.sweep}")
    return charts


def run_experiment(spec: ExperimentSpec, out_dir: Path | None = None, stream=None) -> int:
    """Run ``spec`` and write its outputs; returns a process exit status."""
    stream = sys.stdout if stream is None else stream
    spec.validate()
    if "svg" in spec.emit and out_dir is None:
        raise UsageError("svg output needs --out DIR")
    rows = run_rows(spec)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    for emit in spec.emit:
        if emit == "csv":
            text = rows_to_csv(rows)
            if out_dir is None:
                stream.write(text)
            else:
                (out_dir / f"{spec.name}.csv").write_text(text, encoding="utf-8")
        elif emit == "json":
            text = json.dumps({"experiment": spec.name, "sweep": spec.sweep, "rows": rows}, indent=2) + "\n"
            if out_dir is None:
                stream.write(text)
            else:
                (out_dir / f"{spec.name}.json").write_text(text, encoding="utf-8")
        else:
            for estimand, svg in rows_to_svgs(spec, rows).items():
                (out_dir / f"{spec.name}_{estimand}.svg").write_text(svg, encoding="utf-8")
    return 0


# ---------------------------------------------------------------------------
# argument handling

def _add_network_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("network")
    g.add_argument("--config", type=Path, help="JSON file with parameter values; flags override it")
    g.add_argument("--alpha", type=float)
    g.add_argument("--lambda-j", dest="lambda_j", type=float, help="interferer density")
    g.add_argument("--p-j", dest="p_j", help="interferer power, watts or e.g. 30dbm")
    g.add_argument("--d-radius", dest="d_radius", type=float, help="warden disk radius")
    g.add_argument("--n-wardens", dest="n_wardens", type=int)
    g.add_argument("--epsilon", type=float, help="covert outage threshold")
    g.add_argument("--approx-terms", dest="approx_terms", type=int)
    g.add_argument("--system", choices=[s.value for s in System])
    g.add_argument("--m", type=int, help="number of transmit antennas")
    g.add_argument("--p-a", dest="p_a", help="total transmit power, watts or e.g. 20dbm")


def _params_from_args(args) -> dict:
    raw = {}
    if getattr(args, "config", None):
        try:
            raw.update(json.loads(args.config.read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
    for key in BASE_PARAMS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    return normalize_params(raw)


def _seed(args) -> int:
    return args.seed if args.seed is not None else default_seed()


def cmd_solve(args) -> int:
    p = dict(BASE_PARAMS)
    p.update(_params_from_args(args))
    cfg = _config(p)
    sol = solve_throughput(cfg, _layout(p), method=args.method, samples=args.samples)
    if not sol.feasible:
        print(f"covertgeo: {sol.diagnostic}", file=sys.stderr)
        return EXIT_INFEASIBLE
    scale = 1.0 / math.log(2.0) if args.bits else 1.0
    out = {
        "p_star_w": sol.p_star,
        "p_star_dbm": watts_to_dbm(sol.p_star),
        "beta_star": sol.beta_star,
        "r_star": sol.r_star * scale,
        "t_star": sol.t_star * scale,
        "c_at_opt": sol.c_at_opt,
        "o_at_opt": sol.o_at_opt,
        "method": sol.method.value,
        "rate_unit": "bits/s/Hz" if args.bits else "nats/s/Hz",
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_mc(args) -> int:
    p = dict(BASE_PARAMS)
    p.update(_params_from_args(args))
    for key in ("xi", "beta", "warden_r", "warden_theta"):
        if getattr(args, key) is not None:
            p[key] = float(getattr(args, key))
    cfg, lay = _config(p), _layout(p)
    tc = TrialConfig(trials=args.trials, master_seed=_seed(args))
    if args.estimand == "pbar_w":
        est = estimate_avg_detection(cfg, lay, PolarPoint(p["warden_r"], p["warden_theta"]), p["xi"], tc)
    elif args.estimand == "outage":
        est = estimate_outage(cfg, lay, tc)
    else:
        est = estimate_connectivity(cfg, lay, p["beta"], tc)
    print(json.dumps({"estimand": args.estimand, "value": est.value, "std_error": est.std_error,
                      "trials": est.trials, "seed": tc.master_seed}, indent=2))
    return 0


def cmd_experiment(args) -> int:
    if args.name not in REGISTRY:
        raise UsageError(f"unknown experiment {args.name!r}; see list-experiments")
    spec = REGISTRY[args.name]
    spec = ExperimentSpec(**{f.name: getattr(spec, f.name) for f in fields(ExperimentSpec)})
    spec.base = {**spec.base, **_params_from_args(args)}
    if args.grid is not None:
        try:
            spec.grid = tuple(float(v) for v in args.grid.split(",") if v.strip())
        except ValueError:
            raise UsageError(f"cannot parse grid {args.grid!r}") from None
    if args.trials is not None:
        spec.trials = args.trials
    spec.seed = _seed(args)
    if args.emit:
        spec.emit = tuple(args.emit)
    return run_experiment(spec, args.out)


def cmd_list(args) -> int:
    for name, spec in REGISTRY.items():
        print(f"{name}\t{spec.sweep}\t{spec.description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="covertgeo", description="Covert throughput of multi-antenna links in random networks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="maximal covert throughput for one configuration")
    _add_network_flags(p)
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.EXHAUSTIVE_EXACT.value)
    p.add_argument("--samples", type=int, default=100_000, help="QMC points for DAS integrals")
    p.add_argument("--bits", action="store_true", help="report rates in bits instead of nats")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mc", help="raw Monte-Carlo estimate")
    p.add_argument("estimand", choices=("pbar_w", "outage", "connectivity"))
    _add_network_flags(p)
    p.add_argument("--xi", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--warden-r", dest="warden_r", type=float)
    p.add_argument("--warden-theta", dest="warden_theta", type=float)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("experiment", help="run a built-in parameter sweep")
    p.add_argument("name")
    _add_network_flags(p)
    p.add_argument("--grid", help="comma-separated sweep values replacing the built-in grid")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials per point, 0 to skip simulation")
    p.add_argument("--seed", type=int)
    p.add_argument("--emit", action="append", choices=EMITS)
    p.add_argument("--out", type=Path, help="output directory (default: CSV to stdout)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("list-experiments", help="list built-in experiments")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"covertgeo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CovertGeoError as exc:
        print(f"covertgeo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
