"""Bit-packed stabilizer tableau simulator.

Rows are stored as ``uint64`` words (64 qubits per word). Rows ``0 .. n-1``
are destabilizers, rows ``n .. 2n-1`` stabilizers. Pauli products are
tracked in X^x Z^z form where the phase of a row product is ``i^k`` with
``k = k1 + k2 + 2 * |z1 & x2|``; Hermitian signs are recovered by removing
the ``i^|x & z|`` carried by Y letters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .graphs import PauliString

_ONE = np.uint64(1)

OutcomeSource = Union[None, int, np.random.Generator, Callable[[], int]]


@dataclass(frozen=True)
class MeasurementOutcome:
    value: int
    was_random: bool


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).sum(axis=-1, dtype=np.int64)


def _draw(source: OutcomeSource) -> int:
    if source is None:
        source = np.random.default_rng()
    if isinstance(source, np.random.Generator):
        return 1 if source.integers(2) == 0 else -1
    if callable(source):
        value = int(source())
    else:
        value = int(source)
    if value not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {value}")
    return value


class Tableau:
    """Stabilizer state of ``qubit_count`` qubits, initialised to ``|0...0>``."""

    def __init__(self, qubit_count: int):
        if qubit_count < 0:
            raise ValueError("qubit_count must be non-negative")
        n = qubit_count
        self.n = n
        self.words = max(1, (n + 63) // 64)
        self.xs = np.zeros((2 * n, self.words), dtype=np.uint64)
        self.zs = np.zeros((2 * n, self.words), dtype=np.uint64)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        for q in range(n):
            w, b = q >> 6, np.uint64(q & 63)
            self.xs[q, w] |= _ONE << b
            self.zs[n + q, w] |= _ONE << b

    @property
    def qubit_count(self) -> int:
        return self.n

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n, t.words = self.n, self.words
        t.xs, t.zs, t.r = self.xs.copy(), self.zs.copy(), self.r.copy()
        return t

    def __eq__(self, other):
        if not isinstance(other, Tableau):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.zs, other.zs)
            and np.array_equal(self.r, other.r)
        )

    def __repr__(self):
        return f"Tableau({', '.join(str(s) for s in self.stabilizers())})"

    # -- row access -------------------------------------------------------

    def _row(self, i: int) -> PauliString:
        x = [(int(self.xs[i, q >> 6]) >> (q & 63)) & 1 for q in range(self.n)]
        z = [(int(self.zs[i, q >> 6]) >> (q & 63)) & 1 for q in range(self.n)]
        return PauliString.from_bits(x, z, -1 if self.r[i] else 1)

    def stabilizers(self) -> list[PauliString]:
        return [self._row(self.n + i) for i in range(self.n)]

    def destabilizers(self) -> list[PauliString]:
        return [self._row(i) for i in range(self.n)]

    def _pack(self, p: PauliString) -> tuple[np.ndarray, np.ndarray]:
        if len(p) != self.n:
            raise ValueError(f"Pauli length {len(p)} != qubit count {self.n}")
        x = np.zeros(self.words, dtype=np.uint64)
        z = np.zeros(self.words, dtype=np.uint64)
        for q, c in enumerate(p.letters):
            bit = _ONE << np.uint64(q & 63)
            if c in "XY":
                x[q >> 6] |= bit
            if c in "ZY":
                z[q >> 6] |= bit
        return x, z

    def _mul_rows(self, rows: np.ndarray, src: int) -> None:
        """Right-multiply each row in ``rows`` by row ``src``."""
        if len(rows) == 0:
            return
        x1, z1 = self.xs[rows], self.zs[rows]
        x2, z2 = self.xs[src], self.zs[src]
        k = (
            2 * self.r[rows].astype(np.int64)
            + _popcount(x1 & z1)
            + 2 * int(self.r[src])
            + int(_popcount(x2 & z2))
            + 2 * _popcount(z1 & x2)
        )
        xn, zn = x1 ^ x2, z1 ^ z2
        self.xs[rows], self.zs[rows] = xn, zn
        self.r[rows] = (((k - _popcount(xn & zn)) % 4) >> 1).astype(np.uint8)

    def _anticommuting(self, px: np.ndarray, pz: np.ndarray) -> np.ndarray:
        return (_popcount(self.xs & pz) + _popcount(self.zs & px)) % 2 == 1

    def _check(self, *qubits: int) -> None:
        for q in qubits:
            if not 0 <= q < self.n:
                raise IndexError(f"qubit {q} out of range for {self.n} qubits")
        if len(qubits) == 2 and qubits[0] == qubits[1]:
            raise ValueError("two-qubit operation needs distinct operands")

    def _col(self, q: int):
        w, b = q >> 6, np.uint64(q & 63)
        return w, b, (self.xs[:, w] >> b) & _ONE, (self.zs[:, w] >> b) & _ONE

    # -- gates (in place) --------------------------------------------------

    def h(self, q: int) -> "Tableau":
        self._check(q)
        w, b, x, z = self._col(q)
        self.r ^= (x & z).astype(np.uint8)
        flip = (x ^ z) << b
        self.xs[:, w] ^= flip
        self.zs[:, w] ^= flip
        return self

    def x(self, q: int) -> "Tableau":
        self._check(q)
        _, _, _, z = self._col(q)
        self.r ^= z.astype(np.uint8)
        return self

    def z(self, q: int) -> "Tableau":
        self._check(q)
        _, _, x, _ = self._col(q)
        self.r ^= x.astype(np.uint8)
        return self

    def cz(self, p: int, q: int) -> "Tableau":
        self._check(p, q)
        wp, bp, xp, zp = self._col(p)
        wq, bq, xq, zq = self._col(q)
        self.r ^= (xp & xq & (zp ^ zq)).astype(np.uint8)
        self.zs[:, wp] ^= xq << bp
        self.zs[:, wq] ^= xp << bq
        return self

    def reset_plus(self, q: int) -> "Tableau":
        """Prepare ``q`` in |+>; valid only when ``q`` is unentangled ``|0>``."""
        return self.h(q)

    # -- measurement -------------------------------------------------------

    def measure_pauli(self, p: PauliString, outcome_source: OutcomeSource = None) -> MeasurementOutcome:
        """Project onto an eigenspace of the (unsigned) Pauli ``p``."""
        px, pz = self._pack(p)
        n = self.n
        anti = self._anticommuting(px, pz)
        stab_anti = np.flatnonzero(anti[n:])
        if len(stab_anti):
            piv = n + int(stab_anti[0])
            others = np.flatnonzero(anti)
            others = others[(others != piv) & (others != piv - n)]
            self._mul_rows(others, piv)
            d = piv - n
            self.xs[d], self.zs[d], self.r[d] = self.xs[piv], self.zs[piv], self.r[piv]
            value = _draw(outcome_source)
            # stored sign is the Hermitian sign of +i^{|x&z|} X^x Z^z
            self.xs[piv], self.zs[piv] = px, pz
            self.r[piv] = 0 if value == 1 else 1
            return MeasurementOutcome(value, True)
        return MeasurementOutcome(self._product_sign(px, pz, anti[:n]), False)

    def _product_sign(self, px, pz, destab_anti) -> int:
        """Sign of the stabilizer-group element equal (up to sign) to ``p``."""
        n = self.n
        rows = n + np.flatnonzero(destab_anti)
        x = np.zeros(self.words, dtype=np.uint64)
        z = np.zeros(self.words, dtype=np.uint64)
        k = 0
        for i in rows:
            k += 2 * int(self.r[i]) + int(_popcount(self.xs[i] & self.zs[i]))
            k += 2 * int(_popcount(z & self.xs[i]))
            x ^= self.xs[i]
            z ^= self.zs[i]
        k -= int(_popcount(x & z))
        assert np.array_equal(x, px) and np.array_equal(z, pz)
        return -1 if (k % 4) == 2 else 1

    def measure_zz(self, p: int, q: int, outcome_source: OutcomeSource = None) -> MeasurementOutcome:
        self._check(p, q)
        letters = ["I"] * self.n
        letters[p] = letters[q] = "Z"
        return self.measure_pauli(PauliString(1, "".join(letters)), outcome_source)

    def entangler(self, p: int, q: int, outcome_source: OutcomeSource = None) -> MeasurementOutcome:
        """Parity projection on ``Z_p Z_q`` with ``X_q`` feedforward on odd parity."""
        m = self.measure_zz(p, q, outcome_source)
        if m.value == -1:
            self.x(q)
        return m

    # -- queries -------------------------------------------------------------

    def is_stabilized_by(self, p: PauliString) -> bool:
        px, pz = self._pack(p)
        anti = self._anticommuting(px, pz)
        if anti[self.n:].any():
            return False
        return self._product_sign(px, pz, anti[: self.n]) == p.sign

    def symplectic_products(self) -> np.ndarray:
        xs, zs = self.xs, self.zs
        m = np.bitwise_count(xs[:, None, :] & zs[None, :, :]).sum(-1)
        m = m + np.bitwise_count(zs[:, None, :] & xs[None, :, :]).sum(-1)
        return (m % 2).astype(np.uint8)

    def is_valid(self) -> bool:
        n = self.n
        expected = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        expected[:n, n:] = np.eye(n, dtype=np.uint8)
        expected[n:, :n] = np.eye(n, dtype=np.uint8)
        return bool(np.array_equal(self.symplectic_products(), expected))

    def canonical_form(self) -> "Tableau":
        return canonical_form(self)


def canonical_form(t: Tableau) -> Tableau:
    """Unique representative of the state held by ``t``.

    Stabilizers are fully row-reduced over the column order
    ``x_0 .. x_{n-1}, z_0 .. z_{n-1}``; destabilizers are then derived from the
    pivots and made mutually commuting, so equal states give equal tableaus.
    """
    n = t.n
    c = t.copy()
    pivots = []
    rank = 0
    for col in range(2 * n):
        q = col % n
        w, b = q >> 6, np.uint64(q & 63)
        block = c.xs if col < n else c.zs
        bits = ((block[n + rank:, w] >> b) & _ONE).astype(bool)
        hits = np.flatnonzero(bits)
        if not len(hits):
            continue
        piv = n + rank + int(hits[0])
        top = n + rank
        if piv != top:
            for arr in (c.xs, c.zs, c.r):
                arr[[top, piv]] = arr[[piv, top]]
        col_bits = ((block[n:, w] >> b) & _ONE).astype(bool)
        rows = n + np.flatnonzero(col_bits)
        c._mul_rows(rows[rows != top], top)
        pivots.append(col)
        rank += 1
        if rank == n:
            break
    assert rank == n, "stabilizer rows are not independent"

    c.xs[:n] = 0
    c.zs[:n] = 0
    c.r[:n] = 0
    for i, col in enumerate(pivots):
        q = col % n
        bit = _ONE << np.uint64(q & 63)
        if col < n:
            c.zs[i, q >> 6] |= bit
        else:
            c.xs[i, q >> 6] |= bit
    for i in range(n):
        for j in range(i):
            anti = (_popcount(c.xs[i] & c.zs[j]) + _popcount(c.zs[i] & c.xs[j])) % 2
            if anti:
                c._mul_rows(np.array([i]), n + j)
        c.r[i] = 0
    return c


# -- value-semantics wrappers ------------------------------------------------


def new_plus_state(n: int) -> Tableau:
    t = Tableau(n)
    for q in range(n):
        t.h(q)
    return t


def apply_h(t: Tableau, q: int) -> Tableau:
    return t.copy().h(q)


def apply_x(t: Tableau, q: int) -> Tableau:
    return t.copy().x(q)


def apply_z(t: Tableau, q: int) -> Tableau:
    return t.copy().z(q)


def apply_cz(t: Tableau, p: int, q: int) -> Tableau:
    return t.copy().cz(p, q)


def measure_zz(t: Tableau, p: int, q: int, outcome_source: OutcomeSource = None):
    out = t.copy()
    m = out.measure_zz(p, q, outcome_source)
    return out, m


def entangler(t: Tableau, p: int, q: int, outcome_source: OutcomeSource = None) -> Tableau:
    out = t.copy()
    out.entangler(p, q, outcome_source)
    return out


def is_stabilized_by(t: Tableau, s: PauliString) -> bool:
    return t.is_stabilized_by(s)


def simulate(schedule, outcome_source: OutcomeSource = None, *, check: bool = False):
    """Run a schedule from ``|0...0>``; returns the final tableau and E outcomes."""
    t = Tableau(schedule.qubit_count)
    outcomes = []
    for op in schedule.ops:
        kind, args = op.kind, op.operands
        if kind == "NEW_PLUS":
            t.reset_plus(*args)
        elif kind == "E":
            outcomes.append(t.entangler(*args, outcome_source))
        elif kind == "H":
            t.h(*args)
        elif kind == "CZ":
            t.cz(*args)
        elif kind == "X":
            t.x(*args)
        elif kind == "Z":
            t.z(*args)
        else:
            raise ValueError(f"unknown op kind {kind!r}")
        if check and not t.is_valid():
            raise AssertionError(f"tableau lost symplectic validity after {op}")
    return t, outcomes
