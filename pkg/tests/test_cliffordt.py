import numpy as np
import pytest

from revfp.blocks import build_rlzc, emit_rhs1, emit_rhs2
from revfp.cliffordt import (TEMPLATES, PhysicalCircuit, _seq, asap_depth, circuit_permutation,
                             controlled_v_circuits, equivalent_up_to_phase, from_template,
                             lower, lower_gates, permutation_deviation, permutation_matrix,
                             phase_deviation, t_depth, unitary)
from revfp.core import ARITY, KINDS, Circuit, CircuitError, Gate, invert, truth_table


def lowered(kind, inverse=False):
    return lower_gates([Gate(kind, tuple(range(ARITY[kind])), inverse)], ARITY[kind])


@pytest.mark.parametrize("kind,count,depth", [
    ("TOFFOLI", 7, 3), ("PERES", 7, 3), ("TR", 7, 4), ("FREDKIN", 7, 4),
    ("RFA", 8, 2), ("RFS1", 12, 6), ("RFS2", 12, 6)])
def test_t_counts_and_depths(kind, count, depth):
    pc = lowered(kind)
    assert pc.t_count == count
    assert t_depth(pc) == depth


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("inverse", [False, True])
def test_lowering_matches_permutation(kind, inverse):
    pc = lowered(kind, inverse)
    target = permutation_matrix(truth_table(kind, inverse))
    assert equivalent_up_to_phase(unitary(pc), target, 1e-10)
    assert pc.t_count == lowered(kind).t_count
    assert t_depth(pc) <= pc.t_count


def test_rhs_lowerings_have_depth_4():
    c = Circuit()
    c.add_register("x", 4)
    emit_rhs1(c, 0, 1, 2)
    assert t_depth(lower(c)) == 4
    c2 = Circuit()
    c2.add_register("x", 4)
    emit_rhs2(c2, 0, 1, 2, 3)
    assert t_depth(lower(c2)) == 4


def test_rlzc_depth_11_and_permutation():
    cell = build_rlzc().circuit
    pc = lower(cell)
    assert t_depth(pc) == 11
    # interleaving decompositions wire by wire shaves one layer
    assert t_depth(pc, "wire") == 10
    assert permutation_deviation(pc, circuit_permutation(cell.gates, cell.width)) <= 1e-10


def test_published_peres_drawing_is_not_a_permutation():
    # middle T-dagger on row B, as drawn
    drawn = _seq("H(2) T(0) T(1) T(2) CX(0,1) CX(2,0) CX(1,2) Tdg(1) CX(1,0) "
                 "Tdg(0) Tdg(1) T(2) CX(2,0) CX(1,2) H(2)")
    u = unitary(from_template(drawn, 3))
    assert not equivalent_up_to_phase(u, permutation_matrix(truth_table("PERES")))
    fixed = unitary(from_template(TEMPLATES["PERES"], 3))
    assert equivalent_up_to_phase(fixed, permutation_matrix(truth_table("PERES")))


def test_rfa_p_gate_is_s_not_t():
    target = permutation_matrix(truth_table("RFA"))
    with_t = [("T", ops) if k == "P" else (k, ops) for k, ops in TEMPLATES["RFA"]]
    assert not equivalent_up_to_phase(unitary(from_template(with_t, 4)), target)
    assert equivalent_up_to_phase(unitary(lowered("RFA")), target)


def test_controlled_v():
    cv, cvd = controlled_v_circuits()
    u, ud = unitary(cv), unitary(cvd)
    x = np.array([[0, 1], [1, 0]])
    assert np.allclose((u @ u)[2:, 2:], x, atol=1e-10)
    assert np.allclose((ud @ ud)[2:, 2:], x, atol=1e-10)
    assert np.allclose(u @ ud, np.eye(4), atol=1e-10)
    assert np.allclose(u[:2, :2], np.eye(2), atol=1e-10)
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-10)


def test_unitary_edges():
    assert np.allclose(unitary(PhysicalCircuit(2)), np.eye(4))
    with pytest.raises(CircuitError, match="refusing"):
        unitary(PhysicalCircuit(6))


def test_equivalent_up_to_phase_examples():
    i8 = np.eye(8)
    assert equivalent_up_to_phase(i8, np.exp(1j * np.pi / 4) * i8, 1e-10)
    x_i = np.kron(np.array([[0, 1], [1, 0]]), np.eye(4))
    assert not equivalent_up_to_phase(i8, x_i, 1e-10)
    with pytest.raises(CircuitError):
        phase_deviation(np.eye(2), np.eye(4))


def test_inverse_lowering_mirrors():
    c = Circuit()
    c.add_register("x", 4)
    c.add("RFA", 0, 1, 2, 3).add("TR", 1, 2, 3).add("PERES", 3, 0, 1)
    fwd, back = lower(c), lower(invert(c))
    assert fwd.t_count == back.t_count
    assert equivalent_up_to_phase(unitary(fwd) @ unitary(back), np.eye(16))


def test_provenance_and_depth_bounds():
    c = Circuit()
    c.add_register("x", 3)
    c.add("TOFFOLI", 0, 1, 2).add("TOFFOLI", 0, 1, 2)
    pc = lower(c)
    assert set(pc.provenance) == {0, 1}
    assert t_depth(pc) == 6
    assert asap_depth(pc) >= t_depth(pc)
    assert t_depth(PhysicalCircuit(3)) == 0
