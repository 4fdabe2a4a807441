"""Target topologies for cluster states and their graph-state stabilizers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0 .. vertex_count - 1``.

    Edges are stored as ordered pairs ``(u, v)`` with ``u < v``.
    """

    vertex_count: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be non-negative")
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u}, {v}) out of range")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        edges = list(edges)
        keys = {(min(u, v), max(u, v)) for u, v in edges}
        if len(keys) != len(edges):
            raise ValueError("duplicate edge")
        return cls(vertex_count, frozenset(keys))

    def neighbors(self, v: int) -> list[int]:
        out = [b if a == v else a for a, b in self.edges if v in (a, b)]
        return sorted(out)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.vertex_count, self.vertex_count), dtype=np.uint8)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    def to_dot(self, name: str = "G") -> str:
        """Render as Graphviz DOT text, vertices labeled by index."""
        lines = [f"graph {name} {{"]
        lines += [f"  {v};" for v in range(self.vertex_count)]
        lines += [f"  {u} -- {v};" for u, v in self.sorted_edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"


def grid_graph(rows: int, cols: int) -> Graph:
    """Rectangular lattice with 4-neighbour bonds, row-major vertex numbering."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    edges = set()
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.add((v, v + 1))
            if i + 1 < rows:
                edges.add((v, v + cols))
    return Graph(rows * cols, frozenset(edges))


def string_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("string length must be positive")
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def star_graph(k: int) -> Graph:
    """Hub vertex 0 joined to leaves ``1 .. k``."""
    if k < 1:
        raise ValueError("star needs at least one leaf")
    return Graph(k + 1, frozenset((0, i) for i in range(1, k + 1)))


def box_graph() -> Graph:
    """The 4-cycle 0-1-2-3-0."""
    return Graph(4, frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}))


@dataclass(frozen=True)
class PauliString:
    """Signed Pauli operator such as ``+XZIZ``; qubit 0 is the leftmost letter."""

    sign: int
    letters: str

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if set(self.letters) - set("IXYZ"):
            raise ValueError(f"bad Pauli letters {self.letters!r}")

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        text = text.strip()
        sign = 1
        if text[:1] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        return cls(sign, text.replace("_", "I"))

    @classmethod
    def from_bits(cls, x, z, sign: int = 1) -> "PauliString":
        table = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        return cls(sign, "".join(table[int(a), int(b)] for a, b in zip(x, z)))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return ("+" if self.sign > 0 else "-") + self.letters

    def __neg__(self):
        return PauliString(-self.sign, self.letters)

    @property
    def x(self) -> np.ndarray:
        return np.array([c in "XY" for c in self.letters], dtype=bool)

    @property
    def z(self) -> np.ndarray:
        return np.array([c in "ZY" for c in self.letters], dtype=bool)

    def commutes_with(self, other: "PauliString") -> bool:
        if len(self) != len(other):
            raise ValueError("length mismatch")
        return not (np.count_nonzero(self.x & other.z) + np.count_nonzero(self.z & other.x)) % 2


def graph_stabilizers(g: Graph) -> list[PauliString]:
    """One generator per vertex: X on the vertex, Z on each neighbour."""
    letters = [["I"] * g.vertex_count for _ in range(g.vertex_count)]
    for v in range(g.vertex_count):
        letters[v][v] = "X"
    for u, v in g.edges:
        letters[u][v] = "Z"
        letters[v][u] = "Z"
    return [PauliString(1, "".join(row)) for row in letters]
