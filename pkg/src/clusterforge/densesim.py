"""Exact state-vector simulator used as an oracle for small instances.

Qubit 0 is the most significant bit of the basis index, so ``|01>`` is
index 1.
"""

from __future__ import annotations

import os
import re
from typing import Sequence

import numpy as np

from .graphs import Graph, PauliString

DEFAULT_CAP = 14
NORM_TOL = 1e-12

_KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
}


def dense_cap() -> int:
    return int(os.environ.get("CLUSTERFORGE_DENSE_CAP", DEFAULT_CAP))


class CapExceeded(ValueError):
    pass


class StateVector:
    def __init__(self, amplitudes, cap: int | None = None):
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        n = int(round(np.log2(len(amps)))) if len(amps) else -1
        if n < 0 or 2**n != len(amps):
            raise ValueError("amplitude count must be a power of two")
        cap = dense_cap() if cap is None else cap
        if n > cap:
            raise CapExceeded(f"{n} qubits exceeds dense cap {cap}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state not normalized (norm {norm})")
        self.qubit_count = n
        self.amplitudes = amps

    def __repr__(self):
        return f"StateVector({self.qubit_count} qubits)"

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.qubit_count)

    def _check(self, *qubits: int) -> None:
        for q in qubits:
            if not 0 <= q < self.qubit_count:
                raise IndexError(f"qubit {q} out of range")
        if len(qubits) == 2 and qubits[0] == qubits[1]:
            raise ValueError("two-qubit operation needs distinct operands")


def prepare(spec: Sequence, cap: int | None = None) -> StateVector:
    """Tensor product of single-qubit kets: '0', '1', '+', '-' or ``(alpha, beta)``."""
    cap = dense_cap() if cap is None else cap
    if len(spec) > cap:
        raise CapExceeded(f"{len(spec)} qubits exceeds dense cap {cap}")
    vec = np.ones(1, dtype=complex)
    for item in spec:
        if isinstance(item, str):
            single = _KETS[item.strip("|>⟩")]
        else:
            a, b = item
            if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > NORM_TOL:
                raise ValueError("|alpha|^2 + |beta|^2 must equal 1")
            single = np.array([a, b], dtype=complex)
        vec = np.kron(vec, single)
    return StateVector(vec, cap)


def ket_amplitudes(expr: str) -> np.ndarray:
    """Unnormalized amplitudes of a sum such as ``'|0+0+> - |1-0->'``.

    Each term is a product of single-qubit kets; adjacent ``|a>|b>`` and
    ``|ab>`` are equivalent.
    """
    expr = expr.replace("⟩", ">").replace(" ", "")
    terms = re.findall(r"([+-]?)((?:\|[01+\-]+>)+)", expr)
    if not terms or "".join(s + k for s, k in terms) != expr:
        raise ValueError(f"cannot parse ket expression {expr!r}")
    total = None
    for sign, body in terms:
        vec = np.ones(1, dtype=complex)
        for ch in body.replace("|", "").replace(">", ""):
            vec = np.kron(vec, _KETS[ch])
        vec = -vec if sign == "-" else vec
        total = vec if total is None else total + vec
    return total


def ket(expr: str) -> StateVector:
    amps = ket_amplitudes(expr)
    return StateVector(amps / np.linalg.norm(amps))


def apply_gate(s: StateVector, gate: str, *operands: int) -> StateVector:
    s._check(*operands)
    t = s._tensor().copy()
    if gate == "H":
        (q,) = operands
        a0, a1 = np.take(t, 0, axis=q), np.take(t, 1, axis=q)
        t = np.stack([(a0 + a1), (a0 - a1)], axis=q) / np.sqrt(2)
    elif gate == "X":
        (q,) = operands
        t = np.flip(t, axis=q)
    elif gate == "Z":
        (q,) = operands
        idx = [slice(None)] * s.qubit_count
        idx[q] = 1
        t[tuple(idx)] *= -1
    elif gate == "CZ":
        p, q = operands
        idx = [slice(None)] * s.qubit_count
        idx[p] = idx[q] = 1
        t[tuple(idx)] *= -1
    else:
        raise ValueError(f"unknown gate {gate!r}")
    return StateVector(t.ravel(), cap=s.qubit_count)


def _parity_mask(n: int, p: int, q: int) -> np.ndarray:
    idx = np.arange(2**n)
    return ((idx >> (n - 1 - p)) ^ (idx >> (n - 1 - q))) & 1


def entangler_dense(s: StateVector, p: int, q: int, forced_outcome: int | None = None,
                    rng: np.random.Generator | None = None) -> tuple[StateVector, int]:
    """Project onto even/odd ``Z_p Z_q`` parity, then flip ``q`` on odd parity."""
    s._check(p, q)
    odd = _parity_mask(s.qubit_count, p, q).astype(bool)
    probs = {1: float(np.sum(np.abs(s.amplitudes[~odd]) ** 2)),
             -1: float(np.sum(np.abs(s.amplitudes[odd]) ** 2))}
    if forced_outcome is None:
        rng = rng or np.random.default_rng()
        outcome = 1 if rng.random() < probs[1] else -1
    else:
        outcome = forced_outcome
        if outcome not in (1, -1):
            raise ValueError("forced outcome must be +1 or -1")
        if probs[outcome] < 1e-12:
            raise ValueError(f"forced outcome {outcome} has zero probability")
    amps = np.where(odd if outcome == 1 else ~odd, 0, s.amplitudes)
    amps = amps / np.sqrt(probs[outcome])
    out = StateVector(amps, cap=s.qubit_count)
    if outcome == -1:
        out = apply_gate(out, "X", q)
    return out, outcome


def fidelity(s1: StateVector, s2: StateVector) -> float:
    if s1.qubit_count != s2.qubit_count:
        raise ValueError("qubit count mismatch")
    return float(abs(np.vdot(s1.amplitudes, s2.amplitudes)) ** 2)


def expectation(s: StateVector, pauli: PauliString) -> float:
    if len(pauli) != s.qubit_count:
        raise ValueError("Pauli length mismatch")
    t = s._tensor().copy()
    n = s.qubit_count
    phase = pauli.sign
    for q, c in enumerate(pauli.letters):
        if c in "ZY":
            idx = [slice(None)] * n
            idx[q] = 1
            t[tuple(idx)] *= -1
        if c in "XY":
            t = np.flip(t, axis=q)
        if c == "Y":
            phase *= 1j
    return float(np.real(phase * np.vdot(s.amplitudes, t.ravel())))


def graph_state(g: Graph) -> StateVector:
    """``prod CZ |+>^n`` built directly from the edge list."""
    n = g.vertex_count
    idx = np.arange(2**n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    phase = np.zeros(2**n, dtype=np.int64)
    for u, v in g.edges:
        phase += bits[:, u] & bits[:, v]
    amps = np.where(phase % 2, -1.0, 1.0) / np.sqrt(2**n)
    return StateVector(amps, cap=n)


def simulate(schedule, forced: Sequence[int] | None = None, rng: np.random.Generator | None = None,
             cap: int | None = None, initial: StateVector | None = None) -> tuple[StateVector, list[int]]:
    """Run a schedule from ``initial`` (default ``|0...0>``).

    NEW_PLUS assumes its qubit is still ``|0>`` and unentangled in ``initial``.

    ``forced`` gives one outcome per E op in order (e.g. replayed from the
    tableau run); otherwise outcomes are sampled from ``rng``.
    """
    n = schedule.qubit_count
    cap = dense_cap() if cap is None else cap
    if n > cap:
        raise CapExceeded(f"{n} qubits exceeds dense cap {cap}")
    if initial is None:
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = 1
        s = StateVector(amps, cap)
    elif initial.qubit_count != n:
        raise ValueError("initial state has the wrong qubit count")
    else:
        s = initial
    outcomes = []
    forced = list(forced) if forced is not None else None
    for op in schedule.ops:
        if op.kind == "NEW_PLUS":
            s = apply_gate(s, "H", *op.operands)
        elif op.kind == "E":
            f = forced[len(outcomes)] if forced is not None else None
            s, m = entangler_dense(s, *op.operands, forced_outcome=f, rng=rng)
            outcomes.append(m)
        else:
            s = apply_gate(s, op.kind, *op.operands)
    return s, outcomes
