"""Python bindings for the kgbench library."""

from ._core import (
    Error,
    Graph,
    InvalidArgument,
    NotFound,
    ParseError,
    StorageError,
    classify_arity,
    evaluate,
    fleiss_kappa,
    load_graph,
    match,
    max_error,
    normalize_label,
    parse_alignment,
    run_cli,
    sample,
    wilson_interval,
)

__all__ = [
    "Error",
    "Graph",
    "InvalidArgument",
    "NotFound",
    "ParseError",
    "StorageError",
    "classify_arity",
    "evaluate",
    "fleiss_kappa",
    "load_graph",
    "match",
    "max_error",
    "normalize_label",
    "parse_alignment",
    "run_cli",
    "sample",
    "wilson_interval",
]
