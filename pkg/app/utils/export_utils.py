"""
CSV and JSON export for trajectories, samples, tree dumps and reports.

Every CSV has a header row and is written as UTF-8 with LF line endings.
"""
import csv
import io
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Optional, Sequence, TextIO, Union

import numpy as np

from ..config import OUTPUT_FOLDER

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def get_output_path(filename: str, folder: Optional[PathLike] = None) -> Path:
    """
    Path under the export folder, creating the folder on first use.

    Args:
        filename: Bare file name.
        folder: Target folder; defaults to OUTPUT_FOLDER.
    """
    target = Path(folder) if folder is not None else OUTPUT_FOLDER
    target.mkdir(parents=True, exist_ok=True)
    return target / filename


@contextmanager
def open_output(path: Optional[PathLike]) -> Iterator[TextIO]:
    """Open a UTF-8/LF text sink; None or "-" means stdout."""
    if path is None or str(path) == "-":
        yield sys.stdout
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        yield handle
    logger.info("Wrote %s", target)


def write_csv(sink: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def write_json(sink: TextIO, payload: Any) -> None:
    json.dump(payload, sink, indent=2, sort_keys=False)
    sink.write("\n")


def _components(prefix: str, d: int) -> List[str]:
    return [prefix] if d == 1 else [f"{prefix}_{j + 1}" for j in range(d)]


def trajectory_table(positions: np.ndarray, steps: Optional[Sequence[int]] = None) -> tuple:
    """
    (header, rows) for trajectories: replica, k, S_k components.

    Args:
        positions: Array (replicas, m, d) or (replicas, m).
        steps: The time k of each of the m columns; defaults to 0..m-1.
    """
    pos = np.asarray(positions, dtype=float)
    if pos.ndim == 2:
        pos = pos[..., None]
    ks = list(range(pos.shape[1])) if steps is None else [int(k) for k in steps]
    header = ["replica", "k"] + _components("S", pos.shape[2])
    rows = (
        [r, k] + [repr(float(v)) for v in pos[r, j]]
        for r in range(pos.shape[0])
        for j, k in enumerate(ks)
    )
    return header, rows


def sample_table(values: np.ndarray, name: str = "value") -> tuple:
    """(header, rows) for per-replica samples of shape (replicas,) or (replicas, d)."""
    vals = np.asarray(values, dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    header = ["replica"] + _components(name, vals.shape[1])
    rows = ([r] + [repr(float(v)) for v in vals[r]] for r in range(vals.shape[0]))
    return header, rows


def tree_table(rows: Iterable[Sequence[int]]) -> tuple:
    """(header, rows) for a percolated tree dump."""
    return ["node", "parent", "cut", "cluster"], rows


def cluster_table(forest) -> tuple:
    """(header, rows) with one row per cluster of a percolated tree."""
    ys = forest.y_values()
    rows = (
        [c + 1, int(forest.roots[c]), int(forest.sizes[c]), int(forest.half_edges[c]), repr(float(ys[c]))]
        for c in range(forest.n_clusters)
    )
    return ["cluster", "root", "size", "half_edges", "y"], rows


def urn_table(masses: np.ndarray) -> tuple:
    """(header, rows) for urn mass paths of shape (replicas, n, 3), k = 1..n."""
    m = np.asarray(masses, dtype=float)
    rows = (
        [r, k + 1] + [repr(float(v)) for v in m[r, k]]
        for r in range(m.shape[0])
        for k in range(m.shape[1])
    )
    return ["replica", "k", "black", "green", "red"], rows


def to_jsonable(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> List[dict]:
    """Rows as a list of records keyed by the header."""
    out = []
    for row in rows:
        record = {}
        for key, value in zip(header, row):
            record[key] = float(value) if isinstance(value, str) else value
        out.append(record)
    return out


def export_table(
    path: Optional[PathLike], header: Sequence[str], rows: Iterable[Sequence[Any]], fmt: str = "csv"
) -> None:
    """Write a table as CSV or as a JSON array of records."""
    with open_output(path) as sink:
        if fmt == "json":
            write_json(sink, to_jsonable(header, rows))
        else:
            write_csv(sink, header, rows)


def reports_to_json(reports: Sequence[Any]) -> str:
    """Serialize MCReports as a JSON array string."""
    buffer = io.StringIO()
    write_json(buffer, [r.to_json_dict() for r in reports])
    return buffer.getvalue()
