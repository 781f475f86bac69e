"""
Command-line entry point for the graph PME verifier.

    python -m scripts.cli_runner <command> [options]

Every run writes `<out>/<command>.csv` and `<out>/summary.txt`; generated
graphs are archived as `<out>/graph.g`. Exit code 0 when no check failed,
1 when a non-vacuous check failed, 2 on invalid input or a numerical
breakdown.
"""
import argparse
import csv
import logging
import sys
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

import numpy as np
import yaml
from pydantic import BaseModel, ValidationError, model_validator

from scripts.config import NUMERICS_CONFIG
from scripts.documents import dump_graph, load_field_file, load_graph_file, load_problem_file
from scripts.errors import DocumentError, GraphGenerationError, IntegrationError
from scripts.estimate_verifier import (
    EstimateReport,
    check_t1,
    check_t2,
    harnack_bound,
    harnack_bounded_psi,
    random_pairs,
)
from scripts.generators import generate_graph
from scripts.graph_calculus import (
    chain_rule_counterexample,
    divergence_sum,
    gamma,
    gamma_via_product,
    verify_identity,
)
from scripts.graph_core import WeightedGraph
from scripts.integral_lemma import sweep as lemma_sweep
from scripts.kernel_estimator import check_bounds, heat_kernel_oracle, heat_kernel_series, mass_check
from scripts.pme_dynamics import PMEProblem, Trajectory, equation_residual, hypothesis_check, integrate

logger = logging.getLogger(__name__)

Command = Literal[
    "verify-identity",
    "simulate",
    "verify-gradient-estimate",
    "verify-harnack",
    "verify-lemma",
    "kernel",
    "sweep",
]

ESTIMATE_COLUMNS = ["check", "sample", "x", "y", "T1", "T2", "lhs", "rhs", "margin", "status"]


# ========== Configuration models ==========

class GraphSource(BaseModel):
    """A graph document or a generator spec."""

    file: Optional[str] = None
    generate: Optional[str] = None
    theta: Optional[Literal["one", "deg"]] = None
    weights: Literal["unit", "uniform"] = "uniform"

    @model_validator(mode="after")
    def _one_source(self) -> "GraphSource":
        if (self.file is None) == (self.generate is None):
            raise ValueError("give exactly one of a graph file or a generator spec")
        return self


class ExperimentConfig(BaseModel):
    """One CLI run. Built from argparse or from a sweep entry."""

    command: Command
    name: Optional[str] = None
    graph: Optional[GraphSource] = None
    problem: Optional[str] = None
    seed: int = 0
    out: str = "results"
    tol: Optional[float] = None
    # field document: the state for verify-identity, u0 for problem-based commands
    field_file: Optional[str] = None
    # verify-identity
    random_fields: int = 10
    ms: List[float] = [1.5, 2.0, 3.0, -1.0]
    # simulate and trajectory-based checks
    scheme: Literal["explicit-rk4", "adaptive"] = "adaptive"
    output_points: int = 100
    substeps: int = 1
    integration_tol: Optional[float] = None
    m: float = 2.0
    # verify-harnack
    x: Optional[str] = None
    y: Optional[str] = None
    t1: Optional[float] = None
    t2: Optional[float] = None
    pairs: Optional[str] = None
    path_cap: Optional[int] = None
    c0: Optional[float] = None
    # verify-lemma
    random: int = 100
    grid: int = 64
    weight_anchor: Literal["start", "end"] = "start"
    # kernel
    times: List[float] = [1.0]
    eps: Optional[float] = None
    check_bounds: bool = False
    oracle: bool = False
    # sweep
    config: Optional[str] = None

    @model_validator(mode="after")
    def _counts(self) -> "ExperimentConfig":
        if self.random_fields < 1 or self.random < 1 or self.output_points < 1 or self.substeps < 1:
            raise ValueError("sample counts, output points and substeps must be >= 1")
        return self


@dataclass
class Outcome:
    """Rows and summary material produced by one command."""

    columns: List[str]
    rows: List[Dict[str, Any]]
    notes: List[str] = field(default_factory=list)
    lines: List[str] = field(default_factory=list)
    failures: int = 0

    @property
    def counts(self) -> Dict[str, int]:
        counts = {"pass": 0, "fail": 0, "vacuous": 0}
        for row in self.rows:
            status = row.get("status")
            if status in counts:
                counts[status] += 1
        return counts

    @property
    def failed(self) -> bool:
        return self.failures > 0 or self.counts["fail"] > 0


@dataclass
class RunResult:
    command: str
    exit_code: int
    out_dir: Path
    csv_path: Optional[Path]
    summary_path: Path
    counts: Dict[str, int]


# ========== Output helpers ==========

def format_value(value: Any) -> str:
    """CSV cell text; floats use repr so values survive a round trip."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(column)) for column in columns])
    return path


def estimate_rows(report: EstimateReport, sample: int = 0) -> List[Dict[str, Any]]:
    return [
        {
            "check": report.check,
            "sample": sample,
            "x": row.x,
            "y": row.y,
            "T1": row.t1,
            "T2": row.t2,
            "lhs": row.lhs,
            "rhs": row.rhs,
            "margin": row.margin,
            "status": row.status,
        }
        for row in report.rows
    ]


def _sort_key(row: Dict[str, Any]):
    return tuple(
        (0, value, "") if isinstance(value, (int, float)) and not isinstance(value, bool) else (1, 0, str(value))
        for value in row.values()
    )


# ========== Inputs ==========

def resolve_graph(source: Optional[GraphSource], rng: np.random.Generator) -> Optional[WeightedGraph]:
    if source is None:
        return None
    if source.file is not None:
        g = load_graph_file(source.file)
        return g.with_theta(source.theta) if source.theta else g
    return generate_graph(source.generate, theta=source.theta or "one", weights=source.weights, rng=rng)


def resolve_problem(config: ExperimentConfig, g: Optional[WeightedGraph]) -> Optional[PMEProblem]:
    if config.problem is None:
        return None
    problem = load_problem_file(config.problem, graph=g)
    if config.field_file is not None:
        problem = dataclasses.replace(problem, u0=load_field_file(config.field_file, problem.graph))
    return problem


def _integrate(config: ExperimentConfig, problem: PMEProblem) -> Trajectory:
    return integrate(
        problem,
        scheme=config.scheme,
        output_points=config.output_points,
        substeps=config.substeps,
        tol=config.integration_tol,
    )


def _require(value, message: str):
    if value is None:
        raise ValueError(message)
    return value


# ========== Commands ==========

def cmd_identity(config: ExperimentConfig, g: WeightedGraph, rng: np.random.Generator) -> Outcome:
    """Power identity, gradient-form cross-check and divergence sum on random positive fields."""
    tol = config.tol if config.tol is not None else NUMERICS_CONFIG["identity_tol"]
    given = load_field_file(config.field_file, g) if config.field_file is not None else None
    rows = []
    for sample in range(1 if given is not None else config.random_fields):
        u = given if given is not None else rng.uniform(0.1, 10.0, size=g.n)
        v = rng.uniform(0.1, 10.0, size=g.n)
        results = verify_identity(g, u, config.ms, tol)
        worst = max(results, key=lambda r: r.max_rel_residual)
        gap = float(np.max(np.abs(gamma(g, u, v) - gamma_via_product(g, u, v)), initial=0.0))
        gap /= max(1.0, float(np.max(np.abs(u * v))))
        total, scale = divergence_sum(g, u)
        divergence = abs(total) / max(1.0, scale)
        ok = all(r.holds for r in results) and gap <= tol and divergence <= tol
        rows.append({
            "sample": sample,
            "worst_m": worst.m,
            "max_abs_residual": worst.max_abs_residual,
            "max_rel_residual": worst.max_rel_residual,
            "gamma_gap": gap,
            "divergence": divergence,
            "status": "pass" if ok else "fail",
        })

    lines = [f"field: {Path(config.field_file).name}"] if given is not None else []
    notes = []
    witness = chain_rule_counterexample(g, 2.0, rng=rng) if g.edges else None
    if witness is not None:
        notes.append(
            f"continuum chain rule fails for p=2 at {witness.vertex}: "
            f"lhs={witness.lhs:.6g} rhs={witness.rhs:.6g}"
        )
    return Outcome(
        columns=["sample", "worst_m", "max_abs_residual", "max_rel_residual", "gamma_gap", "divergence", "status"],
        rows=rows,
        lines=lines,
        notes=notes,
    )


def cmd_simulate(config: ExperimentConfig, problem: PMEProblem) -> Outcome:
    """Integrate a problem and tabulate the states."""
    traj = _integrate(config, problem)
    residuals, scales = equation_residual(problem, traj)
    hypotheses = hypothesis_check(problem, traj)
    labels = list(problem.graph.labels)
    rows = []
    for i, t in enumerate(traj.times):
        row: Dict[str, Any] = {"t": float(t)}
        row.update({label: float(traj.states[i, k]) for k, label in enumerate(labels)})
        row.update({
            "error": float(traj.errors[i]),
            "residual": float(residuals[i] / max(1.0, scales[i])),
            "hypotheses": hypotheses.rows[i].holds,
        })
        rows.append(row)
    lines = [
        f"span: [{traj.span[0]!r}, {traj.span[1]!r}]",
        f"steps: {traj.accepted_steps} accepted, {traj.rejected_steps} rejected",
        f"max relative residual: {float(np.max(residuals / np.maximum(1.0, scales))):.3e}",
        f"hypotheses hold on whole trajectory: {hypotheses.all_hold}",
    ]
    return Outcome(columns=["t", *labels, "error", "residual", "hypotheses"], rows=rows, lines=lines)


def cmd_gradient(config: ExperimentConfig, g: Optional[WeightedGraph],
                 problem: Optional[PMEProblem], rng: np.random.Generator) -> Outcome:
    """Both gradient estimates, on a trajectory or on random positive states."""
    rows: List[Dict[str, Any]] = []
    gaps = []
    if problem is not None:
        g = problem.graph
        traj = _integrate(config, problem)
        start = traj.span[0] if config.t1 is None else config.t1
        end = traj.span[1] if config.t2 is None else config.t2
        states = [(int(i), float(traj.times[i]), traj.states[i], problem.psi(traj.times[i]))
                  for i in traj.window(start, end)]
        delta, m = problem.delta, problem.m
    else:
        g = _require(g, "verify-gradient-estimate needs --graph or --problem")
        m = config.m
        delta = rng.uniform(-2.0, -0.5, size=g.n)
        states = [(sample, 0.0, rng.uniform(0.1, 10.0, size=g.n), rng.uniform(-2.0, 2.0, size=g.n))
                  for sample in range(config.random_fields)]

    for sample, t, u, psi in states:
        t1_report = check_t1(g, u, psi, delta, m, t=t, tol=config.tol)
        gaps.append(t1_report.extras["reduced_gap"])
        rows += estimate_rows(t1_report, sample)
        rows += estimate_rows(check_t2(g, u, psi, delta, m, t=t, tol=config.tol), sample)

    worst_gap = max(gaps, default=0.0)
    outcome = Outcome(columns=ESTIMATE_COLUMNS, rows=rows, lines=[f"max reduced-form gap: {worst_gap:.3e}"])
    if worst_gap > NUMERICS_CONFIG["identity_tol"]:
        outcome.notes.append("reduced form of the first estimate disagrees with the full form")
        outcome.failures += 1
    return outcome


def _parse_pairs(spec: str) -> int:
    kind, _, count = spec.partition(":")
    if kind != "random" or not count.isdigit() or int(count) < 1:
        raise ValueError(f"Invalid pairs spec: {spec}. Expected random:<n>")
    return int(count)


def cmd_harnack(config: ExperimentConfig, problem: Optional[PMEProblem], rng: np.random.Generator) -> Outcome:
    """Harnack bound with the path functional, and with C0 when given."""
    problem = _require(problem, "verify-harnack needs --problem")
    g = problem.graph
    traj = _integrate(config, problem)
    if config.x is not None:
        pairs = [(
            config.x,
            config.y or config.x,
            traj.span[0] if config.t1 is None else config.t1,
            traj.span[1] if config.t2 is None else config.t2,
        )]
    else:
        pairs = random_pairs(g, traj, _parse_pairs(config.pairs or "random:10"), rng)

    rows: List[Dict[str, Any]] = []
    notes = set()
    for sample, (x, y, t1, t2) in enumerate(pairs):
        report = harnack_bound(g, traj, problem, x, y, t1, t2, config.path_cap, config.tol)
        notes.update(report.notes)
        extra = {key: report.extras[key] for key in ("path", "n_paths", "truncated", "c7_margin")}
        rows += [dict(row, **extra) for row in estimate_rows(report, sample)]
        if config.c0 is not None:
            bounded = harnack_bounded_psi(g, traj, problem, x, y, t1, t2, config.c0, config.path_cap, config.tol)
            notes.update(bounded.notes)
            rows += [dict(row, path=extra["path"]) for row in estimate_rows(bounded, sample)]
    columns = ESTIMATE_COLUMNS + ["path", "n_paths", "truncated", "c7_margin"]
    return Outcome(columns=columns, rows=rows, notes=sorted(notes))


def cmd_lemma(config: ExperimentConfig) -> Outcome:
    """Random instances of the calculus inequality."""
    rows = []
    for index, (inst, result) in enumerate(
        lemma_sweep(config.random, config.seed, config.grid, config.weight_anchor, config.tol)
    ):
        rows.append({
            "instance": index,
            "c": inst.c,
            "alpha": inst.alpha,
            "T1": inst.t1,
            "T2": inst.t2,
            "lhs": result.lhs,
            "rhs": result.rhs,
            "rhs_end": result.rhs_end,
            "margin": result.margin,
            "holds_end": result.holds_end,
            "points": result.points,
            "status": "pass" if result.holds else "fail",
        })
    columns = ["instance", "c", "alpha", "T1", "T2", "lhs", "rhs", "rhs_end", "margin", "holds_end", "points", "status"]
    held_end = sum(row["holds_end"] for row in rows)
    return Outcome(columns=columns, rows=rows, lines=[f"end-anchored form holds on {held_end}/{len(rows)}"])


def cmd_kernel(config: ExperimentConfig, g: Optional[WeightedGraph]) -> Outcome:
    """Series kernel entries, mass, optional oracle comparison and bounds."""
    g = _require(g, "kernel needs --graph or --generate")
    rows: List[Dict[str, Any]] = []
    outcome = Outcome(columns=["x", "y", "t", "p", "upper_bound", "lower_bound", "status"], rows=rows)
    for t in config.times:
        kern = heat_kernel_series(g, t, config.eps)
        mass = mass_check(kern, g, config.tol)
        outcome.lines.append(f"t={t!r}: K={kern.order}, mass deviation {mass.extras['max_deviation']:.3e}")
        if not mass.passed or not mass.extras["conserved"]:
            outcome.notes.append(f"mass not conserved at t={t!r}")
            outcome.failures += 1
        if config.oracle:
            diff = kern.max_abs_diff(heat_kernel_oracle(g, t))
            outcome.lines.append(f"t={t!r}: series vs oracle max difference {diff:.3e}")
            if diff > kern.eps + 1e-10:
                outcome.notes.append(f"series and oracle disagree at t={t!r}")
                outcome.failures += 1
        if config.check_bounds:
            report = check_bounds(kern, g, config.m, config.c0 or 0.0, config.tol)
            outcome.notes += [note for note in report.notes if note not in outcome.notes]
            rows += [row.model_dump() for row in report.rows]
        else:
            for i, x in enumerate(g.labels):
                for j, y in enumerate(g.labels):
                    p = float(kern.values[i, j])
                    rows.append({"x": x, "y": y, "t": kern.t, "p": p,
                                 "status": "pass" if p >= -kern.eps else "fail"})
    return outcome


# ========== Orchestration ==========

def _summary_text(config: ExperimentConfig, g: Optional[WeightedGraph], outcome: Outcome, exit_code: int) -> str:
    counts = outcome.counts
    lines = [f"command: {config.command}"]
    if g is not None:
        lines.append(f"graph: {g.name} (n={g.n}, edges={len(g.edges)})")
    lines.append(f"seed: {config.seed}")
    lines.append(f"rows: {len(outcome.rows)}")
    lines.append(f"pass: {counts['pass']}  fail: {counts['fail']}  vacuous: {counts['vacuous']}")
    margins = [row["margin"] for row in outcome.rows
               if row.get("status") != "vacuous" and isinstance(row.get("margin"), float)]
    if margins:
        lines.append(f"worst margin: {min(margins)!r}")
    lines += outcome.lines
    lines += [f"note: {note}" for note in outcome.notes]
    lines.append(f"exit: {exit_code}")
    return "\n".join(lines) + "\n"


def run_experiment(config: ExperimentConfig) -> RunResult:
    """
    Execute one configured command and write its CSV and summary.

    Raises:
        DocumentError, ValueError, IntegrationError, GraphGenerationError:
            Propagated from the modules; the CLI turns them into exit code 2
    """
    if config.command == "sweep":
        return run_sweep(config)

    out_dir = Path(config.out)
    rng = np.random.default_rng(config.seed)
    g = resolve_graph(config.graph, rng)
    problem = resolve_problem(config, g)
    if g is None and problem is not None:
        g = problem.graph

    if config.command == "verify-identity":
        outcome = cmd_identity(config, _require(g, "verify-identity needs --graph or --generate"), rng)
    elif config.command == "simulate":
        outcome = cmd_simulate(config, _require(problem, "simulate needs --problem"))
    elif config.command == "verify-gradient-estimate":
        outcome = cmd_gradient(config, g, problem, rng)
    elif config.command == "verify-harnack":
        outcome = cmd_harnack(config, problem, rng)
    elif config.command == "verify-lemma":
        outcome = cmd_lemma(config)
    else:
        outcome = cmd_kernel(config, g)

    out_dir.mkdir(parents=True, exist_ok=True)
    if config.graph is not None and config.graph.generate is not None and g is not None:
        (out_dir / "graph.g").write_text(dump_graph(g), encoding="utf-8")
    rows = sorted(outcome.rows, key=_sort_key)
    csv_path = write_csv(out_dir / f"{config.command}.csv", outcome.columns, rows)
    exit_code = 1 if outcome.failed else 0
    summary_path = out_dir / "summary.txt"
    summary_path.write_text(_summary_text(config, g, outcome, exit_code), encoding="utf-8")
    logger.info("%s: %d rows written to %s", config.command, len(rows), csv_path)
    return RunResult(config.command, exit_code, out_dir, csv_path, summary_path, outcome.counts)


def _resolve_paths(entry: Dict[str, Any], base: Path) -> Dict[str, Any]:
    entry = dict(entry)
    for key in ("problem", "field_file"):
        if entry.get(key):
            entry[key] = str(base / entry[key])
    graph = entry.get("graph")
    if isinstance(graph, dict) and graph.get("file"):
        entry["graph"] = dict(graph, file=str(base / graph["file"]))
    return entry


def run_sweep(config: ExperimentConfig) -> RunResult:
    """
    Run every experiment listed in a YAML sweep file.

    Each entry is an ExperimentConfig mapping with a `name`; its results go to
    `<out>/<name>/`. Paths inside the file are relative to the file.
    """
    path = Path(_require(config.config, "sweep needs --config"))
    if not path.is_file():
        raise DocumentError(f"sweep config not found: {path}")
    try:
        document = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise DocumentError(f"invalid YAML: {exc}", source=path.name) from exc
    entries = document.get("experiments") if isinstance(document, dict) else None
    if not entries:
        raise DocumentError("sweep config has no 'experiments' list", source=path.name)

    out_dir = Path(config.out)
    seed = document.get("seed", config.seed)
    lines = [f"sweep: {path.name}", f"seed: {seed}"]
    exit_code = 0
    totals = {"pass": 0, "fail": 0, "vacuous": 0}
    for index, raw in enumerate(entries):
        if not isinstance(raw, dict):
            raise DocumentError(f"experiment {index} is not a mapping", source=path.name)
        name = raw.get("name") or f"{index:02d}-{raw.get('command', 'unknown')}"
        entry = _resolve_paths(raw, path.parent)
        entry.setdefault("seed", seed)
        entry["out"] = str(out_dir / name)
        try:
            child = ExperimentConfig(**entry)
            if child.command == "sweep":
                raise ValueError("sweeps cannot be nested")
            result = run_experiment(child)
        except (ValidationError, ValueError, KeyError, OSError, IntegrationError, GraphGenerationError) as exc:
            print(f"❌ {name}: {exc}")
            lines.append(f"{name}: error: {exc}")
            exit_code = 2
            continue
        for status, count in result.counts.items():
            totals[status] += count
        exit_code = max(exit_code, result.exit_code)
        lines.append(
            f"{name}: {result.command} pass={result.counts['pass']} fail={result.counts['fail']} "
            f"vacuous={result.counts['vacuous']} exit={result.exit_code}"
        )
        print(f"{'✅' if result.exit_code == 0 else '⚠️ '} {name}: exit {result.exit_code}")

    lines.append(f"total: pass={totals['pass']} fail={totals['fail']} vacuous={totals['vacuous']}")
    lines.append(f"exit: {exit_code}")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / "summary.txt"
    summary_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("sweep of %d experiments finished with exit %d", len(entries), exit_code)
    return RunResult("sweep", exit_code, out_dir, None, summary_path, totals)


# ========== Argument parsing ==========

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed of the run's random generator")
    common.add_argument("--out", default="results", help="output directory")
    common.add_argument("--tol", type=float, default=None, help="pass tolerance override")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    graph = argparse.ArgumentParser(add_help=False)
    source = graph.add_mutually_exclusive_group()
    source.add_argument("--graph", help="graph document")
    source.add_argument("--generate", help="path_N, cycle_N, complete_N, star_N or random_gnp_N_P")
    graph.add_argument("--theta", choices=["one", "deg"], default=None, help="vertex measure")
    graph.add_argument("--weights", choices=["unit", "uniform"], default="uniform",
                       help="edge weights of generated graphs")

    dynamics = argparse.ArgumentParser(add_help=False)
    dynamics.add_argument("--problem", help="problem document")
    dynamics.add_argument("--scheme", choices=["explicit-rk4", "adaptive"], default="adaptive")
    dynamics.add_argument("--output-points", type=int, default=100)
    dynamics.add_argument("--substeps", type=int, default=1)
    dynamics.add_argument("--integration-tol", type=float, default=None)

    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--t1", type=float, default=None)
    window.add_argument("--t2", type=float, default=None)

    parser = argparse.ArgumentParser(
        prog="gpme",
        description="Discrete calculus, porous medium dynamics and estimate checks on weighted graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-identity", parents=[common, graph], help="power identity on random fields")
    p.add_argument("--random-fields", type=int, default=10)
    p.add_argument("--ms", type=float, nargs="+", default=[1.5, 2.0, 3.0, -1.0])
    p.add_argument("--field", dest="field_file", help="field document checked instead of random fields")

    p = sub.add_parser("simulate", parents=[common, graph, dynamics], help="integrate a problem")
    p.add_argument("--field", dest="field_file", help="field document replacing the problem's u0")

    p = sub.add_parser("verify-gradient-estimate", parents=[common, graph, dynamics, window],
                       help="both gradient estimates")
    p.add_argument("--random-fields", type=int, default=10)
    p.add_argument("--m", type=float, default=2.0)

    p = sub.add_parser("verify-harnack", parents=[common, graph, dynamics, window], help="Harnack inequality")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--pairs", help="random:<n>")
    p.add_argument("--path-cap", type=int, default=None)
    p.add_argument("--c0", type=float, default=None, help="also check the bound with |psi| <= C0")

    p = sub.add_parser("verify-lemma", parents=[common], help="calculus inequality on random instances")
    p.add_argument("--random", type=int, default=100)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--weight-anchor", choices=["start", "end"], default="start")

    p = sub.add_parser("kernel", parents=[common, graph], help="heat kernel and its bounds")
    p.add_argument("--t", dest="times", type=float, nargs="+", default=[1.0])
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--check-bounds", action="store_true")
    p.add_argument("--m", type=float, default=2.0)
    p.add_argument("--c0", type=float, default=0.0)
    p.add_argument("--oracle", action="store_true", help="compare against the dense exponential")

    p = sub.add_parser("sweep", parents=[common], help="run the experiments of a YAML file")
    p.add_argument("--config", required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = {key: value for key, value in vars(args).items() if value is not None}
    values.pop("verbose", None)
    graph_file = values.pop("graph", None)
    generate = values.pop("generate", None)
    theta = values.pop("theta", None)
    weights = values.pop("weights", "uniform")
    if graph_file is not None or generate is not None:
        values["graph"] = GraphSource(file=graph_file, generate=generate, theta=theta, weights=weights)
    return ExperimentConfig(**values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run, and map the outcome to an exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    print("=" * 50)
    print(f"gpme {args.command}")
    print("=" * 50)
    try:
        config = config_from_args(args)
        result = run_experiment(config)
    except ValidationError as exc:
        print(f"❌ invalid configuration: {exc}")
        return 2
    except DocumentError as exc:
        print(f"❌ {exc}")
        return 2
    except (ValueError, KeyError, IntegrationError, GraphGenerationError, OSError) as exc:
        print(f"❌ {exc}")
        return 2

    counts = result.counts
    print(f"pass: {counts['pass']}  fail: {counts['fail']}  vacuous: {counts['vacuous']}")
    if result.csv_path is not None:
        print(f"results: {result.csv_path}")
    print(f"summary: {result.summary_path}")
    print("✅ all checks passed" if result.exit_code == 0 else "⚠️  some checks failed")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
