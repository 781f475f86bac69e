"""Document parsers for graphs, vertex fields and PME problems."""
from scripts.documents.graph_document import dump_graph, load_graph, load_graph_file
from scripts.documents.field_document import dump_field, load_field, load_field_file
from scripts.documents.problem_document import load_problem, load_problem_file

__all__ = [
    "dump_field",
    "dump_graph",
    "load_field",
    "load_field_file",
    "load_graph",
    "load_graph_file",
    "load_problem",
    "load_problem_file",
]
