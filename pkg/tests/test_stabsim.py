import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clusterforge import densesim, stabsim
from clusterforge.compiler import PrimOp, Schedule
from clusterforge.graphs import Graph, PauliString, box_graph, graph_stabilizers, string_graph
from clusterforge.stabsim import (
    Tableau,
    apply_cz,
    apply_h,
    apply_x,
    apply_z,
    canonical_form,
    entangler,
    is_stabilized_by,
    measure_zz,
    new_plus_state,
)


def P(text):
    return PauliString.from_str(text)


def stabs(t):
    return [str(p) for p in canonical_form(t).stabilizers()]


def from_ops(n, ops, seed=0):
    rng = np.random.default_rng(seed)
    t = Tableau(n)
    for kind, *args in ops:
        if kind == "E":
            t.entangler(*args, rng)
        else:
            getattr(t, kind.lower())(*args)
    return t


def random_ops(rng, n, length, with_e=True):
    kinds = ["H", "X", "Z", "CZ"] + (["E"] if with_e else [])
    ops = []
    for _ in range(length):
        k = kinds[rng.integers(len(kinds))]
        if k in ("CZ", "E"):
            if n < 2:
                continue
            p, q = rng.choice(n, 2, replace=False)
            ops.append((k, int(p), int(q)))
        else:
            ops.append((k, int(rng.integers(n))))
    return ops


def test_new_plus_state():
    assert stabs(new_plus_state(1)) == ["+X"]
    assert new_plus_state(0).qubit_count == 0
    t = new_plus_state(3)
    for q in range(3):
        m = t.copy().measure_pauli(P("".join("X" if i == q else "I" for i in range(3))))
        assert (m.value, m.was_random) == (1, False)


def test_new_plus_state_dense_oracle():
    dense = densesim.prepare(["+", "+", "+"])
    for letters in ("XII", "IXI", "IIX"):
        assert densesim.expectation(dense, P(letters)) == pytest.approx(1.0, abs=1e-12)


def test_h_x_z_single_qubit():
    plus = new_plus_state(1)
    assert stabs(apply_h(plus, 0)) == ["+Z"]
    zero = Tableau(1)
    assert stabs(apply_x(zero, 0)) == ["-Z"]
    assert stabs(apply_z(zero, 0)) == ["+Z"]
    with pytest.raises(IndexError):
        apply_h(zero, 1)


def test_h_on_bell_state():
    bell = from_ops(2, [("H", 0), ("H", 1), ("CZ", 0, 1), ("H", 1)])  # +XX, +ZZ
    assert is_stabilized_by(bell, P("XX")) and is_stabilized_by(bell, P("ZZ"))
    out = apply_h(bell, 1)
    assert is_stabilized_by(out, P("XZ")) and is_stabilized_by(out, P("ZX"))
    # dense oracle: H_1 applied to (|00>+|11>)/sqrt2
    dense = densesim.apply_gate(densesim.ket("|00>+|11>"), "H", 1)
    assert densesim.expectation(dense, P("XZ")) == pytest.approx(1)
    assert densesim.expectation(dense, P("ZX")) == pytest.approx(1)


def test_cz_on_plus_plus_gives_two_qubit_cluster():
    t = apply_cz(new_plus_state(2), 0, 1)
    assert all(t.is_stabilized_by(g) for g in graph_stabilizers(string_graph(2)))
    with pytest.raises(ValueError):
        apply_cz(t, 1, 1)
    with pytest.raises(IndexError):
        apply_cz(t, 0, 2)


def test_cz_commutes_with_z(rng):
    for _ in range(20):
        t = from_ops(4, random_ops(rng, 4, 15), seed=1)
        a = t.copy().cz(0, 2).z(2)
        b = t.copy().z(2).cz(0, 2)
        assert canonical_form(a) == canonical_form(b)


def test_measure_zz_eigenstates():
    t, m = measure_zz(Tableau(2), 0, 1)
    assert (m.value, m.was_random) == (1, False)
    assert canonical_form(t) == canonical_form(Tableau(2))
    t01 = Tableau(2).x(1)
    _, m = measure_zz(t01, 0, 1)
    assert (m.value, m.was_random) == (-1, False)


def test_measure_zz_random_forced_minus():
    t, m = measure_zz(new_plus_state(2), 0, 1, outcome_source=-1)
    assert m.was_random and m.value == -1
    assert t.is_stabilized_by(P("-ZZ")) and t.is_stabilized_by(P("+XX"))
    # dense oracle: project |++> with (I - ZZ)/2 and renormalize
    amps = densesim.prepare(["+", "+"]).amplitudes * np.array([0, 1, 1, 0])
    dense = densesim.StateVector(amps / np.linalg.norm(amps))
    assert densesim.expectation(dense, P("-ZZ")) == pytest.approx(1)
    assert densesim.expectation(dense, P("XX")) == pytest.approx(1)


def test_measure_zz_bad_operands():
    with pytest.raises(ValueError):
        measure_zz(Tableau(2), 0, 0)
    with pytest.raises(IndexError):
        measure_zz(Tableau(2), 0, 5)


def test_entangler_eigen_inputs():
    t = Tableau(2).h(1)  # |0>|+>
    out = entangler(t, 0, 1, np.random.default_rng(0))
    assert canonical_form(out) == canonical_form(Tableau(2))


@pytest.mark.parametrize("preamble_seed", range(10))
def test_entangler_branches_converge(preamble_seed):
    rng = np.random.default_rng(preamble_seed)
    t = from_ops(5, random_ops(rng, 4, 20), seed=preamble_seed)
    t.h(4)  # fresh |+> on qubit 4
    plus = entangler(t, 1, 4, outcome_source=1)
    minus = entangler(t, 1, 4, outcome_source=-1)
    assert canonical_form(plus) == canonical_form(minus)


def test_entangler_on_generic_cluster_rest():
    # (|Phi1>|0>_p + |Phi2>|1>_p)|+>_q  ->  |Phi1>|00> + |Phi2>|11>, i.e. CNOT(p -> q) on |0>_q
    rest = [("H", 0), ("H", 1), ("CZ", 0, 1), ("H", 2), ("CZ", 1, 2)]
    t = from_ops(4, rest + [("H", 3)])
    expected = from_ops(4, rest + [("H", 3), ("CZ", 2, 3), ("H", 3)])
    for outcome in (1, -1):
        assert canonical_form(entangler(t, 2, 3, outcome_source=outcome)) == canonical_form(expected)


def test_is_stabilized_by():
    t = new_plus_state(2)
    assert is_stabilized_by(t, P("+XI"))
    assert not is_stabilized_by(t, P("-XI"))
    assert not is_stabilized_by(t, P("ZI"))
    with pytest.raises(ValueError):
        is_stabilized_by(t, P("X"))


def test_box_state_stabilized_by_cycle_generators():
    # Type-I box decoding: string 0-1-2, twin of 1 onto 3
    t = from_ops(4, [("H", 0), ("H", 1), ("E", 0, 1), ("H", 1), ("H", 2), ("E", 1, 2), ("H", 2),
                     ("H", 1), ("H", 3), ("E", 1, 3), ("H", 1), ("H", 3)])
    assert all(t.is_stabilized_by(g) for g in graph_stabilizers(box_graph()))


def test_canonical_form_basics(rng):
    assert stabs(new_plus_state(1)) == ["+X"]
    for _ in range(20):
        t = from_ops(6, random_ops(rng, 6, 40), seed=3)
        c = canonical_form(t)
        assert c.is_valid()
        assert canonical_form(c) == c
        assert all(c.is_stabilized_by(s) for s in t.stabilizers())


def test_canonical_form_ignores_generator_order():
    a = from_ops(2, [("H", 0), ("H", 1), ("CZ", 0, 1), ("H", 1)])
    b = Tableau(2)
    b.h(0).h(1).cz(0, 1).h(1).x(0).x(1).z(0).z(1)  # XX and ZZ leave the Bell state alone
    assert canonical_form(a) == canonical_form(b)
    assert canonical_form(a) != canonical_form(new_plus_state(2))


@pytest.mark.parametrize("gate", ["h", "x", "z", "cz"])
def test_involutions(gate, rng):
    for _ in range(10):
        t = from_ops(5, random_ops(rng, 5, 25), seed=4)
        args = (1, 3) if gate == "cz" else (2,)
        twice = getattr(getattr(t.copy(), gate)(*args), gate)(*args)
        assert canonical_form(twice) == canonical_form(t)


def test_e_then_h_equals_cz_on_fresh_qubit(rng):
    for _ in range(200):
        n = int(rng.integers(2, 11))
        t = from_ops(n, random_ops(rng, n - 1, 3 * n), seed=int(rng.integers(1 << 30)))
        q = n - 1
        t.h(q)
        p = int(rng.integers(n - 1))
        via_e = t.copy()
        via_e.entangler(p, q, rng)
        via_e.h(q)
        via_cz = t.copy().cz(p, q)
        assert canonical_form(via_e) == canonical_form(via_cz)


def test_validity_preserved(rng):
    t = Tableau(7)
    for op in random_ops(rng, 7, 200):
        kind, *args = op
        if kind == "E":
            t.entangler(*args, rng)
        else:
            getattr(t, kind.lower())(*args)
        assert t.is_valid()


def test_wide_tableau_crosses_word_boundary(rng):
    n = 130
    t = new_plus_state(n)
    for q in range(n - 1):
        t.cz(q, q + 1)
    g = Graph(n, frozenset((q, q + 1) for q in range(n - 1)))
    gens = graph_stabilizers(g)
    assert all(t.is_stabilized_by(s) for s in gens)
    t.entangler(63, 64, rng)
    assert t.is_valid()


def _random_schedule(rng, n, length):
    ops = [PrimOp("NEW_PLUS", (q,)) for q in range(n)]
    ops += [PrimOp(kind, tuple(args)) for kind, *args in random_ops(rng, n, length)]
    return Schedule(tuple(ops), Graph(n))


def test_oracle_agreement_500_schedules():
    rng = np.random.default_rng(500)
    for _ in range(500):
        n = int(rng.integers(1, 11))
        s = _random_schedule(rng, n, int(rng.integers(0, 30))).validate()
        t, outcomes = stabsim.simulate(s, rng)
        dense, _ = densesim.simulate(s, forced=[m.value for m in outcomes])
        for row in canonical_form(t).stabilizers():
            assert densesim.expectation(dense, row) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_is_stabilized_by_agrees_with_dense_expectation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    s = _random_schedule(rng, n, 15).validate()
    t, outcomes = stabsim.simulate(s, rng)
    dense, _ = densesim.simulate(s, forced=[m.value for m in outcomes])
    candidates = [PauliString(int(rng.choice([1, -1])), "".join(rng.choice(list("IXYZ"), n)))
                  for _ in range(10)]
    candidates += t.stabilizers() + [-p for p in t.stabilizers()]
    for p in candidates:
        stabilized = t.is_stabilized_by(p)
        assert stabilized == (abs(densesim.expectation(dense, p) - 1) < 1e-10)
