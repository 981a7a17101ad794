"""Graph, seed and report files.

Graphs are JSON (dense ``weights`` or an ``edges`` list of ``[i, j, w]``
with 0-based indices) or Matrix Market files read through scipy. Seeds are
JSON, either ``{"matrix": [[...]]}`` or ``{"indicators": [i, ...]}``.
"""
import json
import logging
import math
import numbers
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import scipy.io
import scipy.sparse
from pydantic import BaseModel, ConfigDict, TypeAdapter

from relaxmatch.schemas.graph import Graph
from relaxmatch.services.certification import indicator_seeds
from relaxmatch.utils.errors import GraphFormatError, InvalidInputError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
MATRIX_MARKET_PRECISION = 17

_payload_adapter: TypeAdapter[Any] = TypeAdapter(Any, config=ConfigDict(ser_json_inf_nan="constants"))


def _load_json(path: Path) -> Any:
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise InvalidInputError(f"file not found: {path}")
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"{path} is not valid JSON: {e}")


def _dump_json(payload: Any, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def _vertex(value: Any, n: int, what: str) -> int:
    """0-based vertex index; floats are accepted only when integral."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise GraphFormatError(f"{what} {value!r} is not an integer vertex index")
    if not math.isfinite(value) or float(value) != int(value):
        raise GraphFormatError(f"{what} {value!r} is not an integer vertex index")
    index = int(value)
    if not 0 <= index < n:
        raise GraphFormatError(f"{what} {index} out of range 0..{n - 1}")
    return index


def graph_from_payload(payload: Dict[str, Any], name: Optional[str] = None) -> Graph:
    if not isinstance(payload, dict):
        raise GraphFormatError("graph JSON must be an object with 'weights' or 'edges'")
    if "weights" in payload:
        graph = Graph(weights=payload["weights"], name=name)
        if "n" in payload and payload["n"] != graph.n:
            raise GraphFormatError(f"declared n={payload['n']} but weights are {graph.n} x {graph.n}")
        return graph
    if "edges" in payload:
        if "n" not in payload:
            raise GraphFormatError("edge-list graphs must declare n")
        n = payload["n"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise GraphFormatError(f"n must be a positive integer, got {n!r}")
        if not isinstance(payload["edges"], list):
            raise GraphFormatError("'edges' must be a list of [i, j, w] triples")
        W = np.zeros((n, n))
        for edge in payload["edges"]:
            if not isinstance(edge, list) or len(edge) != 3:
                raise GraphFormatError(f"edges are [i, j, w] triples, got {edge!r}")
            i = _vertex(edge[0], n, "edge endpoint")
            j = _vertex(edge[1], n, "edge endpoint")
            if isinstance(edge[2], bool) or not isinstance(edge[2], numbers.Real):
                raise GraphFormatError(f"edge weight {edge[2]!r} is not a number")
            W[i, j] = float(edge[2])
            W[j, i] = float(edge[2])
        return Graph(weights=W, name=name)
    raise GraphFormatError("graph JSON needs a 'weights' matrix or an 'edges' list")


def _read_matrix_market(path: Path) -> Graph:
    """Coordinate or array Matrix Market file; indices in the file are 1..n."""
    if not path.is_file():
        raise InvalidInputError(f"file not found: {path}")
    try:
        matrix = scipy.io.mmread(str(path))
    except (ValueError, IndexError, TypeError, OverflowError, RuntimeError, EOFError) as e:
        raise GraphFormatError(f"{path} is not a valid Matrix Market file: {e}")
    W = matrix.toarray() if scipy.sparse.issparse(matrix) else np.asarray(matrix)
    if np.iscomplexobj(W):
        raise GraphFormatError(f"{path} holds a complex matrix; weights must be real")
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise GraphFormatError(f"adjacency matrix must be square, got {' x '.join(map(str, W.shape))}")
    return Graph(weights=W, name=path.stem)


def read_graph(path: PathLike) -> Graph:
    path = Path(path)
    logger.debug(f"reading graph from {path}")
    if path.suffix == ".mtx":
        graph = _read_matrix_market(path)
    else:
        graph = graph_from_payload(_load_json(path), name=path.stem)
    logger.info(f"loaded graph {graph.name} with n={graph.n}")
    return graph


def write_graph_json(graph: Graph, path: PathLike, edges: bool = False) -> None:
    """Dense form round-trips bit-exactly (json writes floats with repr)."""
    path = Path(path)
    W = graph.weights
    if edges:
        rows, cols = np.nonzero(np.triu(W))
        payload: Dict[str, Any] = {
            "n": graph.n,
            "edges": [[int(i), int(j), float(W[i, j])] for i, j in zip(rows, cols)],
        }
    else:
        payload = {"n": graph.n, "weights": W.tolist()}
    _dump_json(payload, path)


def write_matrix_market(graph: Graph, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lower = scipy.sparse.coo_matrix(np.tril(graph.weights))
    scipy.io.mmwrite(str(path), lower, symmetry="symmetric", precision=MATRIX_MARKET_PRECISION)


def write_graph(graph: Graph, path: PathLike) -> None:
    path = Path(path)
    if path.suffix == ".mtx":
        write_matrix_market(graph, path)
    else:
        write_graph_json(graph, path)
    logger.info(f"wrote graph with n={graph.n} to {path}")


def read_seeds(path: PathLike, n: int) -> np.ndarray:
    """Seed matrix (n x q) from a dense matrix or a list of indicator vertices."""
    path = Path(path)
    payload = _load_json(path)
    if isinstance(payload, dict) and "matrix" in payload:
        try:
            D = np.array(payload["matrix"], dtype=float)
        except (TypeError, ValueError) as e:
            raise GraphFormatError(f"seed matrix in {path} is not numeric: {e}")
        if D.ndim == 1:
            D = D[:, None]
        if D.ndim != 2 or D.shape[0] != n:
            raise GraphFormatError(f"seed matrix in {path} must have {n} rows, got shape {D.shape}")
        return D
    if isinstance(payload, dict) and "indicators" in payload:
        if not isinstance(payload["indicators"], list):
            raise GraphFormatError(f"'indicators' in {path} must be a list of vertices")
        return indicator_seeds(n, [_vertex(x, n, "seed vertex") for x in payload["indicators"]])
    raise GraphFormatError(f"{path} needs a 'matrix' or an 'indicators' entry")


def write_seeds(D: np.ndarray, path: PathLike) -> None:
    _dump_json({"matrix": np.asarray(D, dtype=float).tolist()}, Path(path))
    logger.info(f"wrote {np.shape(D)[1] if np.ndim(D) == 2 else 1} seed columns to {path}")


def report_json(report: Any) -> str:
    """JSON text of a report model or of a dict that may nest report models."""
    if isinstance(report, BaseModel):
        return report.model_dump_json(indent=2)
    return _payload_adapter.dump_json(report, indent=2).decode()


def write_report(report: Any, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_json(report) + "\n")
    logger.info(f"wrote report to {path}")


def load_config(path: PathLike, model: type) -> BaseModel:
    """Experiment configuration validated against a pydantic model."""
    return model.model_validate(_load_json(Path(path)))
