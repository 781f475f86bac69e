"""
PME problem documents.

    graph <path to graph document>
    m=<float>
    delta <label|all> <float>
    psi <label|all> <c0> [c1 c2 c3]
    u0 <label|all> <float>
    tspan <T1> <T2>

Per-label lines override an `all` line for that vertex, whatever the order.
ψ defaults to 0 when no `psi` line is given.
"""
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from scripts.documents.graph_document import load_graph_file
from scripts.errors import DocumentError, FieldError
from scripts.graph_core import WeightedGraph
from scripts.pme_dynamics import PMEProblem
from scripts.time_field import MAX_DEGREE, TimeField

FIELD_DIRECTIVES = ("delta", "psi", "u0")


def _number(token: str, lineno: int, source: Optional[str]) -> float:
    try:
        return float(token)
    except ValueError:
        raise DocumentError(f"invalid number '{token}'", lineno, source) from None


def load_problem(
    text: str,
    base_dir=None,
    source: Optional[str] = None,
    graph: Optional[WeightedGraph] = None,
    theorem_mode: bool = True,
) -> PMEProblem:
    """
    Parse a problem document.

    Args:
        text: Document contents
        base_dir: Directory the `graph` path is resolved against
        source: File name used in error messages
        graph: Graph to use instead of the one the document references
        theorem_mode: Build the problem in theorem-check mode (m > 1)

    Returns:
        Validated PMEProblem

    Raises:
        DocumentError: On syntax errors, missing directives or invalid values
    """
    graph_line = None
    graph_path = None
    m = None
    tspan = None
    values: Dict[str, Dict[str, List[float]]] = {name: {} for name in FIELD_DIRECTIVES}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        directive = tokens[0]

        if directive.startswith("m="):
            if len(tokens) != 1 or m is not None:
                raise DocumentError("expected a single 'm=<float>' line", lineno, source)
            m = _number(directive[2:], lineno, source)
        elif directive == "graph":
            if len(tokens) != 2 or graph_path is not None:
                raise DocumentError("expected a single 'graph <path>' line", lineno, source)
            graph_path, graph_line = tokens[1], lineno
        elif directive == "tspan":
            if len(tokens) != 3 or tspan is not None:
                raise DocumentError("expected a single 'tspan <T1> <T2>' line", lineno, source)
            tspan = (_number(tokens[1], lineno, source), _number(tokens[2], lineno, source))
            if not tspan[0] < tspan[1]:
                raise DocumentError(f"tspan needs T1 < T2, got {tokens[1]} {tokens[2]}", lineno, source)
        elif directive in FIELD_DIRECTIVES:
            most = 2 + MAX_DEGREE if directive == "psi" else 3
            if not 3 <= len(tokens) <= most:
                shape = "<c0> [c1 c2 c3]" if directive == "psi" else "<float>"
                raise DocumentError(f"expected '{directive} <label|all> {shape}'", lineno, source)
            target = tokens[1]
            if target in values[directive]:
                raise DocumentError(f"duplicate {directive} value for '{target}'", lineno, source)
            values[directive][target] = [_number(tok, lineno, source) for tok in tokens[2:]]
        else:
            raise DocumentError(f"unknown directive '{directive}'", lineno, source)

    if graph is None:
        if graph_path is None:
            raise DocumentError("missing 'graph <path>' line", None, source)
        path = Path(base_dir or ".") / graph_path
        if not path.is_file():
            raise DocumentError(f"graph file not found: {path}", graph_line, source)
        graph = load_graph_file(path)
    if m is None:
        raise DocumentError("missing 'm=<float>' line", None, source)
    if tspan is None:
        raise DocumentError("missing 'tspan <T1> <T2>' line", None, source)
    for name in ("delta", "u0"):
        if not values[name]:
            raise DocumentError(f"missing '{name}' lines", None, source)

    def aligned(name: str, default=None) -> np.ndarray:
        entries = values[name]
        for label in entries:
            if label != "all" and label not in graph.labels:
                raise DocumentError(f"{name} value for unknown vertex '{label}'", None, source)
        fallback = entries.get("all", default)
        rows = []
        for label in graph.labels:
            row = entries.get(label, fallback)
            if row is None:
                raise DocumentError(f"no {name} value for vertex '{label}'", None, source)
            rows.append(list(row) + [0.0] * (MAX_DEGREE + 1 - len(row)))
        return np.array(rows)

    delta = aligned("delta")[:, 0]
    u0 = aligned("u0")[:, 0]
    psi = TimeField(aligned("psi", default=[0.0]))
    try:
        return PMEProblem(graph, m, delta, psi, u0, tspan, theorem_mode=theorem_mode)
    except (FieldError, ValueError) as exc:
        raise DocumentError(str(exc), None, source) from exc


def load_problem_file(path, graph: Optional[WeightedGraph] = None, theorem_mode: bool = True) -> PMEProblem:
    path = Path(path)
    return load_problem(
        path.read_text(encoding="utf-8"),
        base_dir=path.parent,
        source=path.name,
        graph=graph,
        theorem_mode=theorem_mode,
    )
