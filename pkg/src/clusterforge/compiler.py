"""Schedule synthesis for string, star, box and lattice cluster states.

Every builder is composed from four graph-level moves, each a short run of
primitive ops:

* ``leaf(p, q)``: NEW q, E(p, q), H(q). Adds vertex ``q`` adjacent to ``p``.
* ``twin(v, w)``: H(v), NEW w, E(v, w), H(v), H(w). Adds ``w`` with the same
  neighbourhood as ``v``; one entangler makes ``deg(v)`` bonds. Applied to a
  degree-2 corner this closes a square (the Type-I box).
* ``bridge(p, q, r, s)``: leaf(p, q), leaf(q, r), H(q), CZ(q, s), H(q). The
  conjugated CZ toggles the bonds between ``s`` and every neighbour of ``q``,
  giving the square p-q-r-s (the Type-II box).
* ``cz(a, b)``: toggles bond a-b.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable

from .graphs import Graph, grid_graph

KINDS = ("NEW_PLUS", "E", "H", "CZ", "X", "Z")
_ARITY = {"NEW_PLUS": 1, "E": 2, "H": 1, "CZ": 2, "X": 1, "Z": 1}
_RANK = {k: i for i, k in enumerate(KINDS)}
SCHEDULE_VERSION = 1

# step labels used by build_lattice
STRING, DIAGONAL_BOXES, TYPE1_BOXES, TYPE2_BOXES, LEAVES, LINKS = range(1, 7)


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class PrimOp:
    kind: str
    operands: tuple
    step: int = 0
    note: str = ""

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ScheduleError(f"unknown op kind {self.kind!r}")
        ops = tuple(int(q) for q in self.operands)
        object.__setattr__(self, "operands", ops)
        if len(ops) != _ARITY[self.kind]:
            raise ScheduleError(f"{self.kind} takes {_ARITY[self.kind]} operand(s), got {len(ops)}")
        if len(ops) == 2 and ops[0] == ops[1]:
            raise ScheduleError(f"{self.kind} needs distinct operands")
        if any(q < 0 for q in ops):
            raise ScheduleError("negative qubit index")

    def __str__(self):
        return f"{self.kind}({', '.join(map(str, self.operands))})"


@dataclass(frozen=True)
class Schedule:
    ops: tuple
    target: Graph
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    @property
    def qubit_count(self) -> int:
        return self.target.vertex_count

    def validate(self) -> "Schedule":
        """Raise ScheduleError unless every qubit is introduced once, before use."""
        alive = set()
        for i, op in enumerate(self.ops):
            for q in op.operands:
                if q >= self.qubit_count:
                    raise ScheduleError(f"op {i} {op}: qubit {q} outside target graph")
            if op.kind == "NEW_PLUS":
                (q,) = op.operands
                if q in alive:
                    raise ScheduleError(f"op {i}: qubit {q} introduced twice")
                alive.add(q)
            elif not alive.issuperset(op.operands):
                raise ScheduleError(f"op {i} {op}: operand used before NEW_PLUS")
        if alive != set(range(self.qubit_count)):
            raise ScheduleError("qubit indices are not dense from 0")
        return self


@dataclass(frozen=True)
class ResourceCount:
    entanglers: int = 0
    cz_gates: int = 0
    entangler_equiv: int = 0
    ancilla_photons: int = 0
    photons: int = 0

    def as_dict(self) -> dict:
        return {
            "entanglers": self.entanglers,
            "cz_gates": self.cz_gates,
            "entangler_equiv": self.entangler_equiv,
            "ancilla_photons": self.ancilla_photons,
            "photons": self.photons,
        }


@dataclass
class TimedSchedule:
    steps: list
    target: Graph
    name: str = ""

    @property
    def makespan(self) -> int:
        return len(self.steps)

    @property
    def max_concurrent_entanglers(self) -> int:
        return max((sum(op.kind == "E" for op in step) for step in self.steps), default=0)

    @property
    def max_concurrent_cz(self) -> int:
        return max((sum(op.kind == "CZ" for op in step) for step in self.steps), default=0)

    def flatten(self) -> Schedule:
        return Schedule(tuple(op for step in self.steps for op in step), self.target, self.name)


class _Builder:
    """Accumulates ops and tracks the graph they produce."""

    def __init__(self, qubit_count: int = 0, ops: Iterable[PrimOp] = (), edges=()):
        self.ops = list(ops)
        self.qubit_count = qubit_count
        self.edges = set(edges)
        self.step = 0

    @classmethod
    def extend(cls, s: Schedule) -> "_Builder":
        return cls(s.qubit_count, s.ops, s.target.edges)

    def _emit(self, kind, *operands):
        self.ops.append(PrimOp(kind, operands, self.step))

    def _toggle(self, a, b):
        self.edges ^= {(min(a, b), max(a, b))}

    def neighbors(self, v):
        return {b if a == v else a for a, b in self.edges if v in (a, b)}

    def new(self, q):
        self._emit("NEW_PLUS", q)
        self.qubit_count = max(self.qubit_count, q + 1)

    def leaf(self, p, q):
        self.new(q)
        self._emit("E", p, q)
        self._emit("H", q)
        self._toggle(p, q)

    def twin(self, v, w):
        nbrs = self.neighbors(v)
        self._emit("H", v)
        self.new(w)
        self._emit("E", v, w)
        self._emit("H", v)
        self._emit("H", w)
        for u in nbrs:
            self._toggle(u, w)

    def cz(self, a, b):
        self._emit("CZ", a, b)
        self._toggle(a, b)

    def bridge(self, p, q, r, s):
        self.leaf(p, q)
        self.leaf(q, r)
        self._emit("H", q)
        self._emit("CZ", q, s)
        self._emit("H", q)
        for u in self.neighbors(q):
            self._toggle(s, u)

    def schedule(self, name: str = "") -> Schedule:
        g = Graph(self.qubit_count, frozenset(self.edges))
        return Schedule(tuple(self.ops), g, name)


def _require(s: Schedule, *qubits: int) -> None:
    for q in qubits:
        if not 0 <= q < s.qubit_count:
            raise ValueError(f"qubit {q} does not exist in schedule")


def build_string(n: int) -> Schedule:
    if n < 1:
        raise ValueError("string length must be positive")
    b = _Builder()
    b.new(0)
    for i in range(1, n):
        b.leaf(i - 1, i)
    return b.schedule(f"string:{n}")


def build_star(k: int) -> Schedule:
    """Hub 0 with leaves ``1 .. k``."""
    if k < 1:
        raise ValueError("star needs at least one leaf")
    b = _Builder()
    b.new(0)
    for i in range(1, k + 1):
        b.leaf(0, i)
    return b.schedule(f"star:{k}")


def add_photon(s: Schedule, p: int) -> Schedule:
    _require(s, p)
    b = _Builder.extend(s)
    b.leaf(p, s.qubit_count)
    return b.schedule(s.name)


def build_box_type1(base: Schedule | None = None, attach: int | None = None) -> Schedule:
    """Square from three entanglers.

    Standalone: qubits 0-1-2 as a string, then qubit 3 as the twin of 1,
    giving the cycle 0-1-2-3-0. Attached: new qubits q, r, s hang off
    ``attach`` to form the cycle attach-q-r-s.
    """
    if base is None:
        if attach is not None:
            raise ValueError("attach requires a base schedule")
        b = _Builder()
        b.new(0)
        b.leaf(0, 1)
        b.leaf(1, 2)
        b.twin(1, 3)
        return b.schedule("box1")
    if attach is None:
        raise ValueError("attached box needs an attach qubit")
    _require(base, attach)
    q = base.qubit_count
    b = _Builder.extend(base)
    b.leaf(attach, q)
    b.leaf(q, q + 1)
    b.twin(q, q + 2)
    return b.schedule(base.name)


def build_box_type2(base: Schedule, p: int, s: int) -> Schedule:
    """Square p-q-r-s from two new qubits, two entanglers and one CZ."""
    _require(base, p, s)
    if p == s:
        raise ValueError("Type-II box needs two distinct qubits")
    if (min(p, s), max(p, s)) in base.target.edges:
        raise ValueError(f"qubits {p} and {s} are already bonded")
    q = base.qubit_count
    b = _Builder.extend(base)
    b.bridge(p, q, q + 1, s)
    return b.schedule(base.name)


def merge(*schedules: Schedule, name: str = "") -> Schedule:
    """Disjoint union; later schedules are relabeled after earlier ones."""
    ops, edges, offset = [], set(), 0
    for s in schedules:
        ops += [replace(op, operands=tuple(q + offset for q in op.operands)) for op in s.ops]
        edges |= {(u + offset, v + offset) for u, v in s.target.edges}
        offset += s.qubit_count
    return Schedule(tuple(ops), Graph(offset, frozenset(edges)), name)


def build_lattice(n: int) -> Schedule:
    """n x n cluster state, row-major vertex numbering.

    The unit squares ``(i, j)`` with ``i + j`` even (a checkerboard) are each
    closed by one double-bond move; everything else is a single-bond move.

    1. staircase string (0,0),(0,1),(1,1),(1,2),...,(n-1,n-1);
    2. twin every (k,k+1) into (k+1,k), closing the diagonal squares;
    3./4. walk the remaining checkerboard diagonals outward. The first square
       of each diagonal hangs a Type-I box off the previous diagonal, the
       rest are Type-II boxes bridging the two previous squares;
    5. odd n leaves the two off-diagonal corners uncovered: add them as leaves;
    6. CZ every missing bond.
    """
    if n < 2:
        raise ValueError("lattice size must be at least 2")

    def v(i, j):
        return i * n + j

    def mirrored(i, j):
        return v(j, i)

    b = _Builder()
    b.step = STRING
    path = [(0, 0)]
    for k in range(n - 1):
        path += [(k, k + 1), (k + 1, k + 1)]
    b.new(v(*path[0]))
    for a, c in zip(path, path[1:]):
        b.leaf(v(*a), v(*c))

    b.step = DIAGONAL_BOXES
    for k in range(n - 1):
        b.twin(v(k, k + 1), v(k + 1, k))

    for d in range(1, n):
        if 2 * d > n - 2:
            break
        b.step = TYPE1_BOXES
        for w in (v, mirrored):
            b.leaf(w(1, 2 * d), w(0, 2 * d))
            b.leaf(w(0, 2 * d), w(0, 2 * d + 1))
            b.twin(w(0, 2 * d), w(1, 2 * d + 1))
        b.step = TYPE2_BOXES
        for i in range(1, n - 1 - 2 * d):
            j = i + 2 * d
            for w in (v, mirrored):
                b.bridge(w(i, j), w(i, j + 1), w(i + 1, j + 1), w(i + 1, j))

    b.step = LEAVES
    if n % 2:
        b.leaf(v(0, n - 2), v(0, n - 1))
        b.leaf(v(n - 2, 0), v(n - 1, 0))

    target = grid_graph(n, n)
    assert b.edges <= target.edges, "lattice recipe produced a non-grid bond"
    b.step = LINKS
    for a, c in sorted(target.edges - b.edges):
        b.cz(a, c)
    s = b.schedule(f"lattice:{n}")
    assert s.target == target
    return s


def count_resources(s: Schedule) -> ResourceCount:
    e = sum(op.kind == "E" for op in s.ops)
    cz = sum(op.kind == "CZ" for op in s.ops)
    return ResourceCount(
        entanglers=e,
        cz_gates=cz,
        entangler_equiv=e + 2 * cz,
        ancilla_photons=1 if cz else 0,
        photons=sum(op.kind == "NEW_PLUS" for op in s.ops),
    )


CZ_NOTE = "2E+ancilla"


def cz_expansion(s: Schedule) -> Schedule:
    """Mark each CZ as two entanglers sharing the recyclable ancilla photon."""
    ops = tuple(replace(op, note=CZ_NOTE) if op.kind == "CZ" else op for op in s.ops)
    return Schedule(ops, s.target, s.name)


def expanded_entangler_count(s: Schedule) -> int:
    return sum(2 if op.note == CZ_NOTE else 1 for op in s.ops if op.kind in ("E", "CZ"))


def parallelize(s: Schedule) -> TimedSchedule:
    """Greedy as-soon-as-possible layering; ops sharing a qubit stay ordered."""
    ready_at: dict[int, int] = {}
    steps: list[list[PrimOp]] = []
    for op in s.ops:
        t = max((ready_at.get(q, 0) for q in op.operands), default=0)
        if t == len(steps):
            steps.append([])
        steps[t].append(op)
        for q in op.operands:
            ready_at[q] = t + 1
    ordered = [tuple(sorted(step, key=lambda op: (_RANK[op.kind], min(op.operands)))) for step in steps]
    return TimedSchedule(ordered, s.target, s.name)


# -- serialization -------------------------------------------------------------


def _op_dict(op: PrimOp) -> dict:
    d = {"kind": op.kind, "operands": list(op.operands)}
    if op.step:
        d["step"] = op.step
    if op.note:
        d["note"] = op.note
    return d


def to_json(s: Schedule) -> str:
    """Stable JSON text: fixed key order, one op per line."""
    graph = {"vertex_count": s.qubit_count, "edges": [list(e) for e in s.target.sorted_edges()]}
    lines = [
        "{",
        f'  "version": {SCHEDULE_VERSION},',
        f'  "name": {json.dumps(s.name)},',
        f'  "target_graph": {json.dumps(graph)},',
        '  "ops": [',
    ]
    body = [f"    {json.dumps(_op_dict(op))}" for op in s.ops]
    if body:
        lines.append(",\n".join(body))
    lines += [
        "  ],",
        f'  "resources": {json.dumps(count_resources(s).as_dict())}',
        "}",
    ]
    return "\n".join(lines) + "\n"


def from_json(text: str) -> Schedule:
    try:
        doc = json.loads(text)
        if doc.get("version") != SCHEDULE_VERSION:
            raise ScheduleError(f"unsupported schedule version {doc.get('version')!r}")
        g = doc["target_graph"]
        target = Graph.from_edges(g["vertex_count"], [tuple(e) for e in g["edges"]])
        ops = tuple(
            PrimOp(o["kind"], tuple(o["operands"]), o.get("step", 0), o.get("note", ""))
            for o in doc["ops"]
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ScheduleError(f"malformed schedule: {exc}") from exc
    except ValueError as exc:
        raise ScheduleError(str(exc)) from exc
    return Schedule(ops, target, doc.get("name", "")).validate()
