"""
Graph document parser.

Line-oriented format::

    graph <name>
    v <label> theta=<float>
    e <label> <label> w=<float>

`#` starts a comment; blank lines are ignored. Duplicate edges are an error.
"""
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from scripts.errors import DocumentError, GraphValidationError
from scripts.graph_core import WeightedGraph


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_keyed_float(token: str, key: str, line: int, source: Optional[str] = None) -> float:
    """Parse `key=<float>`."""
    prefix = f"{key}="
    if not token.startswith(prefix):
        raise DocumentError(f"expected '{prefix}<float>', got '{token}'", line, source)
    try:
        return float(token[len(prefix):])
    except ValueError:
        raise DocumentError(f"invalid number in '{token}'", line, source) from None


def load_graph(text: str, source: Optional[str] = None) -> WeightedGraph:
    """
    Parse a graph document.

    Args:
        text: Document contents
        source: File name used in error messages

    Returns:
        Validated WeightedGraph

    Raises:
        DocumentError: On any syntax or invariant violation, with line number
    """
    name = None
    theta: Dict[str, float] = {}
    edges: Dict[Tuple[str, str], Tuple[float, int]] = {}
    edge_order: List[Tuple[str, str, float]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        tokens = line.split()
        directive = tokens[0]

        if name is None:
            if directive != "graph" or len(tokens) != 2:
                raise DocumentError("document must start with 'graph <name>'", lineno, source)
            name = tokens[1]
            continue

        if directive == "v":
            if len(tokens) != 3:
                raise DocumentError("expected 'v <label> theta=<float>'", lineno, source)
            label = tokens[1]
            if label in theta:
                raise DocumentError(f"duplicate vertex '{label}'", lineno, source)
            value = parse_keyed_float(tokens[2], "theta", lineno, source)
            if not value > 0:
                raise DocumentError(f"non-positive vertex measure {value} at '{label}'", lineno, source)
            theta[label] = value

        elif directive == "e":
            if len(tokens) != 4:
                raise DocumentError("expected 'e <label> <label> w=<float>'", lineno, source)
            a, b = tokens[1], tokens[2]
            w = parse_keyed_float(tokens[3], "w", lineno, source)
            for label in (a, b):
                if label not in theta:
                    raise DocumentError(f"edge references undeclared vertex '{label}'", lineno, source)
            if a == b:
                raise DocumentError(f"self-loop at '{a}'", lineno, source)
            if not w > 0:
                raise DocumentError(f"non-positive edge weight {w} on {a}-{b}", lineno, source)
            key = (min(a, b), max(a, b))
            if key in edges:
                previous, first_line = edges[key]
                kind = "asymmetric duplicate edge" if previous != w else "duplicate edge"
                raise DocumentError(
                    f"{kind} {a}-{b} (first declared on line {first_line} with w={previous})",
                    lineno, source,
                )
            edges[key] = (w, lineno)
            edge_order.append((a, b, w))

        elif directive == "graph":
            raise DocumentError("second 'graph' header", lineno, source)
        else:
            raise DocumentError(f"unknown directive '{directive}'", lineno, source)

    if name is None:
        raise DocumentError("empty graph document", None, source)
    if not theta:
        raise DocumentError("graph document declares no vertices", None, source)

    try:
        return WeightedGraph.from_labels(name, theta, edge_order)
    except GraphValidationError as exc:
        raise DocumentError(str(exc), None, source) from exc


def load_graph_file(path) -> WeightedGraph:
    path = Path(path)
    return load_graph(path.read_text(encoding="utf-8"), source=path.name)


def dump_graph(g: WeightedGraph) -> str:
    """Serialize a graph to the document format, with repr-exact floats."""
    lines = [f"graph {g.name}"]
    for label, value in zip(g.labels, g.theta):
        lines.append(f"v {label} theta={float(value)!r}")
    for i, j, w in g.edges:
        lines.append(f"e {g.labels[i]} {g.labels[j]} w={float(w)!r}")
    return "\n".join(lines) + "\n"
