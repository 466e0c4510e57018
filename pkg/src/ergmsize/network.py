"""Undirected binary networks and exogenous node attributes."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateNetworkError, InputError, InvalidDyadError


class Network:
    """Undirected simple graph on nodes ``0 .. n-1``.

    Edges are held twice: as a set of canonical ``(min, max)`` pairs for
    O(1) membership tests and as per-node neighbour sets for O(degree)
    iteration.  The two are kept in step by :meth:`toggle`.
    """

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise InputError(f"node count must be non-negative, got {n}")
        self.n = int(n)
        self.edges: set[tuple[int, int]] = set()
        self.neighbors: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in edges:
            if not self.has_edge(i, j):
                self.toggle(i, j)

    def _canon(self, i, j) -> tuple[int, int]:
        i, j = int(i), int(j)
        if i == j:
            raise InvalidDyadError(f"self-loop ({i}, {i}) is not a dyad")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise InvalidDyadError(f"dyad ({i}, {j}) out of range for n={self.n}")
        return (i, j) if i < j else (j, i)

    def has_edge(self, i, j) -> bool:
        return self._canon(i, j) in self.edges

    def toggle(self, i, j) -> "Network":
        """Flip the state of dyad ``{i, j}`` in place and return ``self``."""
        e = self._canon(i, j)
        a, b = e
        if e in self.edges:
            self.edges.remove(e)
            self.neighbors[a].discard(b)
            self.neighbors[b].discard(a)
        else:
            self.edges.add(e)
            self.neighbors[a].add(b)
            self.neighbors[b].add(a)
        return self

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(s) for s in self.neighbors), dtype=np.int64, count=self.n)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def dyad_count(self) -> int:
        return self.n * (self.n - 1) // 2

    def density(self) -> float:
        if self.n < 2:
            raise DegenerateNetworkError("density needs at least two nodes")
        return self.n_edges / self.dyad_count

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def edge_array(self) -> np.ndarray:
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(self.edge_list(), dtype=np.int64)

    def copy(self) -> "Network":
        return Network(self.n, self.edges)

    def __eq__(self, other):
        return isinstance(other, Network) and self.n == other.n and self.edges == other.edges

    def __repr__(self):
        return f"Network(n={self.n}, edges={self.n_edges})"


def toggle(net: Network, i: int, j: int) -> Network:
    return net.toggle(i, j)


def dyad_count(net: Network) -> int:
    return net.dyad_count


def density(net: Network) -> float:
    return net.density()


@dataclass
class AttributeTable:
    """Per-node exogenous covariates.

    Categorical columns hold dense integer codes ``0 .. K-1`` with the
    labels in ``levels[name]``; numeric columns hold floats.
    """

    n: int
    categorical: dict[str, np.ndarray] = field(default_factory=dict)
    levels: dict[str, list[str]] = field(default_factory=dict)
    numeric: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for name, codes in self.categorical.items():
            codes = np.asarray(codes, dtype=np.int64)
            self.categorical[name] = codes
            if codes.shape != (self.n,):
                raise InputError(f"column {name!r} has {codes.size} entries, expected {self.n}")
            k = len(self.levels.get(name, ()))
            if codes.size and (codes.min() < 0 or codes.max() >= k):
                raise InputError(f"codes of {name!r} must lie in 0..{k - 1}")
        for name, vals in self.numeric.items():
            vals = np.asarray(vals, dtype=np.float64)
            self.numeric[name] = vals
            if vals.shape != (self.n,):
                raise InputError(f"column {name!r} has {vals.size} entries, expected {self.n}")

    @classmethod
    def from_labels(cls, categorical=None, numeric=None, levels=None) -> "AttributeTable":
        """Build from per-node label lists; level order defaults to sorted labels."""
        categorical = categorical or {}
        numeric = numeric or {}
        levels = dict(levels or {})
        sizes = {len(v) for v in categorical.values()} | {len(v) for v in numeric.values()}
        if len(sizes) > 1:
            raise InputError("attribute columns differ in length")
        n = sizes.pop() if sizes else 0
        codes = {}
        for name, labels in categorical.items():
            labels = [str(x) for x in labels]
            lv = [str(x) for x in levels.get(name, sorted(set(labels)))]
            index = {lab: k for k, lab in enumerate(lv)}
            try:
                codes[name] = np.array([index[x] for x in labels], dtype=np.int64)
            except KeyError as err:
                raise InputError(f"unknown level {err.args[0]!r} in column {name!r}") from None
            levels[name] = lv
        return cls(n, codes, {k: levels[k] for k in codes}, {k: np.asarray(v, float) for k, v in numeric.items()})

    @property
    def columns(self) -> list[str]:
        return list(self.categorical) + list(self.numeric)

    def code(self, attr: str, level) -> int:
        """Code of ``level`` (a label, or an int code) in categorical column ``attr``."""
        lv = self.levels[attr]
        if isinstance(level, (int, np.integer)) and str(level) not in lv:
            if not 0 <= level < len(lv):
                raise InputError(f"level code {level} out of range for {attr!r}")
            return int(level)
        try:
            return lv.index(str(level))
        except ValueError:
            raise InputError(f"{attr!r} has no level {level!r}; levels are {lv}") from None

    def subset(self, idx) -> "AttributeTable":
        idx = np.asarray(idx, dtype=np.int64)
        return AttributeTable(
            len(idx),
            {k: v[idx] for k, v in self.categorical.items()},
            dict(self.levels),
            {k: v[idx] for k, v in self.numeric.items()},
        )

    def labels(self, attr: str) -> list[str]:
        lv = self.levels[attr]
        return [lv[c] for c in self.categorical[attr]]


# --------------------------------------------------------------------------
# File formats
# --------------------------------------------------------------------------

def read_edgelist(path, n: int | None = None) -> Network:
    """Read a CSV edge list with header ``i,j``.

    ``n`` defaults to one more than the largest node index present.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"i", "j"} <= set(reader.fieldnames):
            raise InputError(f"{path}: edge list needs header 'i,j'")
        for row in reader:
            try:
                rows.append((int(row["i"]), int(row["j"])))
            except ValueError:
                raise InputError(f"{path}: non-integer node in row {row}") from None
    if n is None:
        n = 1 + max((max(e) for e in rows), default=-1)
    return Network(n, rows)


def write_edgelist(net: Network, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j"])
        w.writerows(net.edge_list())


def read_attributes(path, categorical=(), levels=None) -> AttributeTable:
    """Read a CSV with header ``node,<col1>,...``.

    Columns named in ``categorical`` are coded as categories (level order
    from ``levels`` if given, else sorted); the rest are parsed as floats.
    Rows may be in any order but must cover nodes ``0 .. n-1`` exactly.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or reader.fieldnames[0] != "node":
            raise InputError(f"{path}: attribute file needs a leading 'node' column")
        cols = reader.fieldnames[1:]
        data = {c: {} for c in cols}
        for row in reader:
            node = int(row["node"])
            for c in cols:
                data[c][node] = row[c]
    n = len(next(iter(data.values()))) if data else 0
    for c, vals in data.items():
        if sorted(vals) != list(range(n)):
            raise InputError(f"{path}: column {c!r} does not cover nodes 0..{n - 1}")
    categorical = set(categorical)
    missing = categorical - set(cols)
    if missing:
        raise InputError(f"{path}: declared categorical columns missing: {sorted(missing)}")
    cat = {c: [data[c][i] for i in range(n)] for c in cols if c in categorical}
    try:
        num = {c: [float(data[c][i]) for i in range(n)] for c in cols if c not in categorical}
    except ValueError as err:
        raise InputError(f"{path}: {err}") from None
    table = AttributeTable.from_labels(cat, num, levels)
    if table.n == 0 and n:
        table.n = n
    return table


def write_attributes(attrs: AttributeTable, path) -> None:
    cols = attrs.columns
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", *cols])
        for i in range(attrs.n):
            row = [i]
            for c in cols:
                if c in attrs.categorical:
                    row.append(attrs.levels[c][attrs.categorical[c][i]])
                else:
                    row.append(repr(float(attrs.numeric[c][i])))
            w.writerow(row)


def relabel(edges, ids=None) -> tuple[Network, dict]:
    """Map arbitrary hashable node IDs to dense integers.

    Returns the network and the sidecar ``{external_id: node}`` map.
    """
    mapping: dict = {}
    if ids is not None:
        for x in ids:
            mapping.setdefault(x, len(mapping))
    pairs = []
    for a, b in edges:
        pairs.append((mapping.setdefault(a, len(mapping)), mapping.setdefault(b, len(mapping))))
    return Network(len(mapping), pairs), mapping


def ensure_path(p) -> Path:
    p = Path(p)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p
