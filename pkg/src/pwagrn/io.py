"""Network spec files and artifact writers (CSV, PGM) with atomic replacement."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import tempfile
import warnings
from pathlib import Path

from .errors import InvalidNetworkError
from .network import WEIGHT_SUM_TOL, Edge, RegulatoryNetwork, circuit, normalize, row_sums


class ThresholdRangeWarning(UserWarning):
    """A circuit threshold lies outside the unit interval."""


def _edge_line(text: str, k: int) -> int | None:
    """1-based line of the ``k``-th edge object (located by its ``"target"`` key)."""
    hits = [m.start() for m in re.finditer(r'"target"', text)]
    if k < len(hits):
        return text.count("\n", 0, hits[k]) + 1
    return None


def _fail(msg: str, text: str | None = None, edge: int | None = None, line: int | None = None):
    if line is None and text is not None and edge is not None:
        line = _edge_line(text, edge)
    where = f"line {line}: " if line else ""
    raise InvalidNetworkError(where + msg)


def network_from_dict(data: dict, text: str | None = None, allow_normalize: bool = False) -> RegulatoryNetwork:
    """Build a network from the decoded JSON structure.

    Accepts either ``{"genes", "a", "edges": [...]}`` with 0-based gene
    indices or the circuit shorthand ``{"circuit": {"signs", "thresholds", "a"}}``.
    """
    if not isinstance(data, dict):
        _fail("top-level value must be an object")
    if "circuit" in data:
        c = data["circuit"]
        if not isinstance(c, dict):
            _fail("'circuit' must be an object")
        try:
            signs = [int(s) for s in c["signs"]]
            thresholds = [float(t) for t in c["thresholds"]]
            a = float(c.get("a", data.get("a")))
        except (KeyError, TypeError, ValueError) as exc:
            _fail(f"circuit shorthand needs signs, thresholds and a ({exc})")
        for i, t in enumerate(thresholds):
            if not (0.0 <= t <= 1.0):
                warnings.warn(
                    f"threshold T_{i + 1}={t} lies outside [0, 1]: the attractor reduces to a "
                    "unique fixed point",
                    ThresholdRangeWarning,
                    stacklevel=2,
                )
        return circuit(signs, thresholds, a)
    for key in ("genes", "a", "edges"):
        if key not in data:
            _fail(f"missing field {key!r}")
    try:
        n = int(data["genes"])
        a = float(data["a"])
    except (TypeError, ValueError):
        _fail("'genes' must be an integer and 'a' a number")
    raw = data["edges"]
    if not isinstance(raw, list) or not raw:
        _fail("'edges' must be a nonempty list")
    edges = []
    for k, e in enumerate(raw):
        if not isinstance(e, dict):
            _fail(f"edge {k} must be an object", text, k)
        missing = [f for f in ("target", "source", "sign", "threshold") if f not in e]
        if missing:
            _fail(f"edge {k} misses {', '.join(missing)}", text, k)
        try:
            edge = Edge(
                int(e["target"]), int(e["source"]), int(e["sign"]),
                float(e.get("weight", 1.0)), float(e["threshold"]),
            )
        except (TypeError, ValueError):
            _fail(f"edge {k} has a malformed field", text, k)
        if not (0 <= edge.target < n and 0 <= edge.source < n):
            _fail(f"edge {k}: gene index out of range [0, {n})", text, k)
        if edge.sign not in (-1, 1):
            _fail(f"edge {k}: sign must be +1 or -1", text, k)
        if not edge.weight > 0:
            _fail(f"edge {k}: weight must be positive", text, k)
        edges.append(edge)
    targets = {e.target for e in edges}
    for i in range(n):
        if i not in targets:
            _fail(f"gene {i} has no incoming edge")
    sums = row_sums(n, edges)
    for i, s in enumerate(sums):
        if abs(s - 1.0) > WEIGHT_SUM_TOL and not allow_normalize:
            k = next(k for k, e in enumerate(edges) if e.target == i)
            _fail(f"gene {i}: weight row sum ≠ 1 (got {s!r}); pass --normalize to rescale", text, k)
    try:
        if allow_normalize:
            return normalize(n, a, edges)[0]
        return RegulatoryNetwork(n, a, tuple(edges))
    except InvalidNetworkError as exc:
        _fail(str(exc))


def parse_network_text(text: str, allow_normalize: bool = False) -> RegulatoryNetwork:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(f"malformed JSON: {exc.msg}", line=exc.lineno)
    return network_from_dict(data, text, allow_normalize)


def parse_network(path, allow_normalize: bool = False) -> RegulatoryNetwork:
    text = Path(path).read_text(encoding="utf-8")
    return parse_network_text(text, allow_normalize)


def serialize_network(net: RegulatoryNetwork) -> str:
    """JSON text in the explicit edge-list form; floats are written with full precision."""
    data = {
        "genes": net.n_genes,
        "a": net.a,
        "edges": [
            {
                "target": e.target,
                "source": e.source,
                "sign": e.sign,
                "weight": e.weight,
                "threshold": e.threshold,
            }
            for e in net.edges
        ],
    }
    return json.dumps(data, indent=2) + "\n"


# -- artifacts ---------------------------------------------------------------------


def atomic_write(path, content: str) -> None:
    """Write ``content`` to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(x) -> str:
    """Shortest round-tripping representation for floats; ``str`` otherwise."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    atomic_write(path, csv_text(header, rows))


def pgm_text(labels) -> str:
    """Plain (P2) PGM of a label matrix whose row 0 is the bottom of the picture."""
    rows = [list(map(int, r)) for r in labels][::-1]
    height = len(rows)
    width = len(rows[0]) if rows else 0
    maxval = max(1, max((max(r) for r in rows), default=1))
    lines = ["P2", f"{width} {height}", str(maxval)]
    lines += [" ".join(str(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def read_pgm(text: str):
    tokens = [t for line in text.splitlines() if not line.startswith("#") for t in line.split()]
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, h, _ = int(tokens[1]), int(tokens[2]), int(tokens[3])
    vals = list(map(int, tokens[4 : 4 + w * h]))
    rows = [vals[r * w : (r + 1) * w] for r in range(h)]
    return rows[::-1]


def write_raster(grid, path) -> tuple:
    """Write ``<path>`` (PGM) and ``<stem>.legend.csv``; returns both paths."""
    path = Path(path)
    atomic_write(path, pgm_text(grid.labels))
    legend_path = path.with_suffix(".legend.csv")
    write_csv(
        legend_path,
        ["label", "description", "period", "code"],
        [(e.label, e.description, e.period, e.code) for e in grid.legend],
    )
    return path, legend_path
