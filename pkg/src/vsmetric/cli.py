"""Scenario-driven command line harness.

Scenario files are INI documents (``configparser`` syntax)::

    [scenario]
    id = example_4_2
    mode = solve_integral        ; see MODES
    seed = 0

    [lattice]                    ; target lattice of the metric
    kind = scalar                ; scalar | vector | grid
    size = 1
    weights = 1, 2               ; optional, vector/grid only

    [carrier]
    kind = interval              ; interval | finite
    lo = 0
    hi = 1
    points = 0, 0.5, 1           ; finite only

    [metric]
    name = sum_abs               ; sum_abs | max_of(sum_abs)

    [maps]
    preset = example_4_2         ; sets p, q, k; individual keys override
    p = affine(1/12, 0)          ; identity | one_minus | affine(a, b)
    q = affine(1/12, 0)
    k = affine(1/3, 0)
    continuous = k               ; integral mode: map spot-checked for continuity

    [coefficients]
    h = 1/3, 0, 0, 0, 0

    [run]
    x0 = 1
    starts = 0, 0.5, 1
    tol = 1e-9
    max_iter = 10000
    tau_eq = 1e-12
    sample_budget = 10000
    gauge = one                  ; one | linear | exp_decay
    n_q = 10000

Exit codes: 0 pass/converged, 2 hypothesis violation, 3 input error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import catalog
from .contraction import ContractionCoefficients, check_inequality
from .errors import VSMetricError
from .integral import GAUGE_CATALOG, continuity_probe, gauge_from_name, iterate_integral
from .lattice import TAU_EQ, LatticeSpace
from .smetric import Carrier, max_construction, metric_from_name, scaled_sum_abs, symmetry_check, verify_axioms
from .solver import (
    MapSystem,
    iterate,
    iterate_two_map,
    point_of_coincidence,
    uniqueness_probe,
    weak_compatibility_check,
)

MODES = (
    "verify_axioms",
    "check_contraction",
    "solve_three_map",
    "solve_two_map",
    "solve_integral",
    "weak_compat",
    "uniqueness",
)

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_INPUT = 3

OUT_DIR_ENV = "VSMETRIC_OUT_DIR"
DEFAULT_OUT_DIR = "vsmetric-out"


class ScenarioError(VSMetricError):
    """Scenario document is malformed or inconsistent."""


@dataclass
class Scenario:
    id: str
    mode: str
    seed: int
    lattice: LatticeSpace
    lattice_weights: tuple[float, ...] | None
    carrier: Carrier
    metric: str
    p: catalog.AffineMap | None
    q: catalog.AffineMap | None
    k: catalog.AffineMap | None
    coefficients: ContractionCoefficients | None
    x0: float
    starts: tuple[float, ...]
    tol: float = 1e-9
    max_iter: int = 10_000
    tau_eq: float = TAU_EQ
    sample_budget: int = 10_000
    gauge: str = "one"
    n_q: int = 10_000
    continuous: str | None = None

    def build_metric(self):
        if self.lattice.kind == "scalar":
            return metric_from_name(self.metric, self.carrier)
        base = scaled_sum_abs(self.lattice, self.lattice_weights, self.carrier)
        return max_construction(base) if self.metric.startswith("max_of(") else base

    def map_system(self) -> MapSystem:
        return MapSystem(self.p, self.q, self.k, self.carrier, self.k.inverse, tau=self.tau_eq, name=self.id)


def _get(cp, section, key, default=None, required=False):
    if cp.has_option(section, key):
        return cp.get(section, key).strip()
    if required:
        raise ScenarioError(f"missing field: {key if section == 'scenario' else section + '.' + key}")
    return default


def _numbers(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(catalog.parse_number(t)) for t in text.split(",") if t.strip())
    except VSMetricError:
        raise ScenarioError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _number(text: str, what: str) -> float:
    vals = _numbers(text, what)
    if len(vals) != 1:
        raise ScenarioError(f"{what}: expected one number, got {text!r}")
    return vals[0]


def parse_scenario(text: str, default_id: str = "scenario") -> Scenario:
    """Validate a scenario document.  Raises :class:`ScenarioError` naming the first bad field."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from None

    mode = _get(cp, "scenario", "mode", required=True)
    if mode not in MODES:
        raise ScenarioError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    sid = _get(cp, "scenario", "id", default_id)
    seed = int(_number(_get(cp, "scenario", "seed", "0"), "scenario.seed"))

    try:
        kind = _get(cp, "lattice", "kind", "scalar")
        size = int(_number(_get(cp, "lattice", "size", "1"), "lattice.size"))
        lattice = LatticeSpace(kind, size)
        weights = _get(cp, "lattice", "weights")
        weights = _numbers(weights, "lattice.weights") if weights else None

        ckind = _get(cp, "carrier", "kind", "interval")
        if ckind == "interval":
            carrier = Carrier.interval(_number(_get(cp, "carrier", "lo", "0"), "carrier.lo"),
                                       _number(_get(cp, "carrier", "hi", "1"), "carrier.hi"))
        elif ckind == "finite":
            carrier = Carrier.finite(_numbers(_get(cp, "carrier", "points", required=True), "carrier.points"))
        else:
            raise ScenarioError(f"carrier.kind must be interval or finite, got {ckind!r}")

        metric = _get(cp, "metric", "name", "sum_abs")
        metric_from_name(metric, carrier)

        maps = {"p": None, "q": None, "k": None}
        preset = _get(cp, "maps", "preset")
        if preset:
            if preset not in catalog.SYSTEM_PRESETS:
                raise ScenarioError(f"unresolvable map preset {preset!r}; known: {', '.join(catalog.SYSTEM_PRESETS)}")
            maps.update(zip("pqk", catalog.SYSTEM_PRESETS[preset]))
        for name in "pqk":
            spec = _get(cp, "maps", name)
            if spec:
                maps[name] = catalog.map_from_spec(spec)
        if maps["q"] is None:
            maps["q"] = maps["p"]
        if mode != "verify_axioms":
            for name in ("p", "k"):
                if maps[name] is None:
                    raise ScenarioError(f"missing field: maps.{name}")
            for name, f in maps.items():
                lo, hi = f.image(carrier)
                if carrier.points is None:
                    escaped = lo < carrier.lo or hi > carrier.hi
                else:
                    escaped = not all(carrier.contains(f(x)) for x in carrier.points)
                if escaped:
                    raise ScenarioError(f"map {name} = {f} carries {carrier} outside itself")
        continuous = _get(cp, "maps", "continuous")
        if continuous not in (None, "p", "k"):
            raise ScenarioError(f"maps.continuous must be p or k, got {continuous!r}")

        coeffs = None
        h = _get(cp, "coefficients", "h")
        if h is not None:
            coeffs = ContractionCoefficients.of(_numbers(h, "coefficients.h"))
            if not coeffs.feasible:
                raise ScenarioError(
                    f"infeasible coefficients {coeffs.as_tuple()}: weighted sum {coeffs.weighted_sum!r} >= 1"
                )
        elif mode not in ("verify_axioms", "weak_compat"):
            raise ScenarioError("missing field: coefficients.h")

        starts = _get(cp, "run", "starts")
        gauge = _get(cp, "run", "gauge", "one")
        if gauge not in GAUGE_CATALOG:
            raise ScenarioError(f"unknown gauge {gauge!r}; known: {', '.join(GAUGE_CATALOG)}")
        return Scenario(
            id=sid,
            mode=mode,
            seed=seed,
            lattice=lattice,
            lattice_weights=weights,
            carrier=carrier,
            metric=metric,
            p=maps["p"],
            q=maps["q"],
            k=maps["k"],
            coefficients=coeffs,
            x0=_number(_get(cp, "run", "x0", str(carrier.hi)), "run.x0"),
            starts=_numbers(starts, "run.starts") if starts else (carrier.lo, carrier.midpoint, carrier.hi),
            tol=_number(_get(cp, "run", "tol", "1e-9"), "run.tol"),
            max_iter=int(_number(_get(cp, "run", "max_iter", "10000"), "run.max_iter")),
            tau_eq=_number(_get(cp, "run", "tau_eq", str(TAU_EQ)), "run.tau_eq"),
            sample_budget=int(_number(_get(cp, "run", "sample_budget", "10000"), "run.sample_budget")),
            gauge=gauge,
            n_q=int(_number(_get(cp, "run", "n_q", "10000"), "run.n_q")),
            continuous=continuous,
        )
    except ScenarioError:
        raise
    except VSMetricError as exc:
        raise ScenarioError(str(exc)) from None


@dataclass
class RunResult:
    scenario_id: str
    mode: str
    verdict: str
    exit_code: int
    limit: float | None = None
    counterexample: list[float] | None = None
    trace_path: str | None = None
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)

    def payload(self) -> dict:
        """Deterministic part of the result (everything except wall time)."""
        return {
            "scenario_id": self.scenario_id,
            "mode": self.mode,
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "limit": self.limit,
            "counterexample": self.counterexample,
            "trace": self.trace_path,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.payload(), indent=2, sort_keys=True) + "\n"


def _dispatch(s: Scenario, out_dir: Path | None) -> RunResult:
    S = s.build_metric()
    res = RunResult(s.id, s.mode, "pass", EXIT_OK)
    trace = None

    if s.mode == "verify_axioms":
        report = verify_axioms(S, s.sample_budget, s.seed, s.tau_eq)
        symmetric = symmetry_check(S, s.sample_budget, s.seed, s.tau_eq)
        res.details = {"axioms": report.passed, "symmetric": symmetric,
                       "counterexamples": {k: list(v) for k, v in report.counterexamples.items()}}
        if not (report.ok and symmetric):
            res.verdict, res.exit_code = "fail", EXIT_VIOLATION
            if report.counterexamples:
                res.counterexample = list(next(iter(report.counterexamples.values())))

    elif s.mode == "check_contraction":
        report = check_inequality(S, s.p, s.q, s.k, s.coefficients, s.sample_budget, s.seed, s.tau_eq)
        res.details = {"max_violation": report.max_violation, "n_samples": report.n_samples}
        if not report.passed:
            res.verdict, res.exit_code = "fail", EXIT_VIOLATION
            res.counterexample = list(report.witness)

    elif s.mode == "solve_three_map":
        m = s.map_system()
        trace = iterate(S, m, s.coefficients, s.x0, max_iter=s.max_iter, tol=s.tol, tau=s.tau_eq)
        if trace.converged:
            pc = point_of_coincidence(S, m, trace, s.tol)
            res.details["coincidence"] = {"omega": pc.omega, "p_gap": pc.p_gap, "q_gap": pc.q_gap,
                                          "confirmed": pc.confirmed}

    elif s.mode == "solve_two_map":
        trace = iterate_two_map(S, s.p, s.k, s.coefficients, s.x0, max_iter=s.max_iter, tol=s.tol,
                                tau=s.tau_eq, k_preimage=s.k.inverse)

    elif s.mode == "solve_integral":
        g = gauge_from_name(s.gauge, s.n_q)
        if s.continuous:
            ok = continuity_probe(getattr(s, s.continuous), s.carrier, seed=s.seed)
            res.details["continuity_probe"] = ok
            if not ok:
                res.verdict, res.exit_code = "continuity_failed", EXIT_VIOLATION
                return res
        trace = iterate_integral(S, s.p, s.k, s.coefficients, g, s.x0, s.max_iter, s.tol, s.tau_eq,
                                 k_preimage=s.k.inverse)
        res.details["gauge"] = s.gauge

    elif s.mode == "weak_compat":
        m = s.map_system()
        reports = {pair: weak_compatibility_check(m, pair, seed=s.seed, tol=s.tol) for pair in ("p", "q")}
        res.details = {f"{pair}k": {"compatible": r.compatible, "coincidences": list(r.coincidences)}
                       for pair, r in reports.items()}
        bad = [r for r in reports.values() if not r.compatible]
        if bad:
            res.verdict, res.exit_code = "fail", EXIT_VIOLATION
            res.counterexample = list(bad[0].witness)

    elif s.mode == "uniqueness":
        report = uniqueness_probe(S, s.map_system(), s.coefficients, s.starts, max_iter=s.max_iter, tol=s.tol)
        res.verdict = report.verdict
        res.limit = report.limit
        res.details = {"limits": report.limits, "starts": list(s.starts)}
        if report.verdict != "unique":
            res.exit_code = EXIT_VIOLATION
            if report.divergent_pair:
                res.counterexample = list(report.divergent_pair)

    if trace is not None:
        res.verdict = trace.verdict
        res.limit = trace.limit
        res.exit_code = EXIT_OK if trace.converged else EXIT_VIOLATION
        res.details.update({"iterations": trace.n_iter, "rate": trace.rate,
                            "dominated": trace.dominated(s.tau_eq),
                            "max_ratio": float(trace.ratios.max()) if trace.ratios.size else None})
        if "coincidence" in res.details and not res.details["coincidence"]["confirmed"]:
            res.verdict, res.exit_code = "coincidence_failed", EXIT_VIOLATION
        if out_dir is not None:
            name = f"{s.id}.trace.csv"
            trace.to_csv(out_dir / name)
            res.trace_path = name
    return res


def run(s: Scenario, out_dir=None) -> RunResult:
    """Execute a parsed scenario; writes ``<id>.trace.csv`` and ``<id>.json`` into ``out_dir``."""
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        res = _dispatch(s, out)
    except VSMetricError as exc:
        res = RunResult(s.id, s.mode, "error", EXIT_INPUT, details={"error": str(exc)})
    res.wall_time = time.perf_counter() - t0
    if out is not None:
        (out / f"{s.id}.json").write_text(res.to_json())
    return res


def shipped_scenarios() -> dict[str, str]:
    root = resources.files("vsmetric") / "scenarios"
    return {p.name[:-4]: p.read_text() for p in root.iterdir() if p.name.endswith(".ini")}


def load_scenario_text(ref: str) -> tuple[str, str]:
    """Text and default id for a file path or the name of a shipped scenario."""
    path = Path(ref)
    if path.is_file():
        return path.read_text(), path.stem
    shipped = shipped_scenarios()
    if ref in shipped:
        return shipped[ref], ref
    raise ScenarioError(f"no such scenario file: {ref}")


def _cmd_run(args) -> int:
    out_dir = Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR)
    worst = EXIT_OK
    for ref in args.scenarios:
        try:
            text, sid = load_scenario_text(ref)
            scenario = parse_scenario(text, sid)
        except VSMetricError as exc:
            print(f"{ref}: error: {exc}", file=sys.stderr)
            worst = max(worst, EXIT_INPUT)
            continue
        if args.seed is not None:
            scenario.seed = args.seed
        res = run(scenario, out_dir)
        line = f"{res.scenario_id}: mode={res.mode} verdict={res.verdict} exit={res.exit_code}"
        if res.limit is not None:
            line += f" limit={res.limit:.3g}"
        if res.counterexample is not None:
            line += f" counterexample={res.counterexample}"
        if res.verdict == "error":
            line += f" cause={res.details['error']}"
        print(f"{line} time={res.wall_time:.3f}s")
        worst = max(worst, res.exit_code)
    return worst


def _cmd_list(args) -> int:
    print("metrics: sum_abs, max_of(<metric>)")
    print("maps: " + ", ".join(catalog.MAP_CATALOG) + ", affine(a, b)")
    print("presets: " + ", ".join(catalog.SYSTEM_PRESETS))
    print("gauges: " + ", ".join(GAUGE_CATALOG))
    print("modes: " + ", ".join(MODES))
    print("scenarios: " + ", ".join(sorted(shipped_scenarios())))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def main(argv=None) -> int:
    parser = _Parser(prog="vsmetric", description="Run vector S-metric fixed point scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one or more scenario files")
    p_run.add_argument("scenarios", nargs="+", help="scenario file paths or shipped scenario names")
    p_run.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or ./{DEFAULT_OUT_DIR})")
    p_run.add_argument("--seed", type=int, help="override the scenario seed")
    p_run.set_defaults(func=_cmd_run)
    p_list = sub.add_parser("list-catalog", help="print metric, map, gauge and mode names")
    p_list.set_defaults(func=_cmd_list)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
