"""
Vertex field documents: one `f <label> <float>` line per vertex.
"""
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from scripts.errors import DocumentError, FieldError
from scripts.graph_core import WeightedGraph


def load_field(text: str, g: WeightedGraph, source: Optional[str] = None) -> np.ndarray:
    """
    Parse a field document and align it to the graph's vertex order.

    Raises:
        DocumentError: On malformed lines, unknown or repeated vertices, or
            missing values
    """
    values: Dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] != "f" or len(tokens) != 3:
            raise DocumentError("expected 'f <label> <float>'", lineno, source)
        label = tokens[1]
        if label in values:
            raise DocumentError(f"duplicate value for '{label}'", lineno, source)
        try:
            g.vertex_index(label)
        except KeyError:
            raise DocumentError(f"unknown vertex '{label}'", lineno, source) from None
        try:
            values[label] = float(tokens[2])
        except ValueError:
            raise DocumentError(f"invalid number '{tokens[2]}'", lineno, source) from None

    try:
        return g.field_from_labels(values)
    except FieldError as exc:
        raise DocumentError(str(exc), None, source) from exc


def load_field_file(path, g: WeightedGraph) -> np.ndarray:
    path = Path(path)
    return load_field(path.read_text(encoding="utf-8"), g, source=path.name)


def dump_field(g: WeightedGraph, u: np.ndarray) -> str:
    return "".join(f"f {label} {float(v)!r}\n" for label, v in zip(g.labels, g.field(u)))
