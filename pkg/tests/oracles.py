"""Independent stabilizer-tableau checks shared by the unit and acceptance tests."""
import itertools

from nnthreshold import expander as ex
from nnthreshold.circuit_ir import Site
from nnthreshold.steane_code import STEANE
from nnthreshold.tableau import Tableau, run_circuit, site_index

PAULIS_2Q = [(x, z) for x in range(4) for z in range(4) if x or z]


def lift_masks(x, z, qubits):
    """Move 7-bit (or narrower) masks onto the given tableau qubits."""
    return (
        sum(((x >> j) & 1) << q for j, q in enumerate(qubits)),
        sum(((z >> j) & 1) << q for j, q in enumerate(qubits)),
    )


def lift(p, qubits):
    return lift_masks(p.x_mask, p.z_mask, qubits)


def signature(t, qubits):
    """Expectations of all 15 non-identity Paulis on two qubits; identifies the state."""
    return tuple(t.expectation(*lift_masks(x, z, qubits)) for x, z in PAULIS_2Q)


def two_qubit_stabilizer_states():
    """Breadth-first search over H, S, CNOT from |00>; returns preparation sequences."""
    gates = [("h", 0), ("h", 1), ("s", 0), ("s", 1), ("cnot", 0, 1), ("cnot", 1, 0)]
    seen = {signature(Tableau(2), (0, 1)): ()}
    frontier = [()]
    while frontier:
        nxt = []
        for seq in frontier:
            for g in gates:
                t = Tableau(2)
                prepare(t, seq + (g,), (0, 1))
                key = signature(t, (0, 1))
                if key not in seen:
                    seen[key] = seq + (g,)
                    nxt.append(seq + (g,))
        frontier = nxt
    return list(seen.values())


def prepare(t, seq, qubits):
    for op in seq:
        getattr(t, op[0])(*(qubits[i] for i in op[1:]))


def remote_cnot_mismatches(outcomes=tuple(itertools.product((0, 1), repeat=2))):
    """Inputs (and forced outcomes) where the gadget differs from a direct CNOT."""
    c = ex.expand_remote_cnot_gadget()
    idx = site_index([ex.RECNOT_CONTROL, ex.RECNOT_EPR1, ex.RECNOT_EPR2, ex.RECNOT_TARGET])
    bad = []
    for seq in two_qubit_stabilizer_states():
        ref = Tableau(2)
        prepare(ref, seq, (0, 1))
        ref.cnot(0, 1)
        for m1, m2 in outcomes:
            t = Tableau(4)
            prepare(t, seq, (0, 3))
            # shared (|01> + |10>) / sqrt 2 on the middle pair
            t.h(1)
            t.cnot(1, 2)
            t.pauli_x(2)
            run_circuit(t, c, idx, forced={"m1": m1, "m2": m2})
            if signature(t, (0, 3)) != signature(ref, (0, 1)):
                bad.append((seq, m1, m2))
    return bad


def zero_prep_expectations(linearize=False):
    """Expectations of the 6 generators and logical Z after the zero-prep circuit."""
    c = ex.expand_zero_prep(linearize)
    idx = {Site(r, k): r * c.length + k for r in range(c.width) for k in range(c.length)}
    t = Tableau(len(idx))
    run_circuit(t, c, idx)
    out_sites = [Site(0, j) for j in range(7)] if linearize else list(ex.ZERO_PREP_SITES)
    qubits = [idx[s] for s in out_sites]
    return [t.expectation(*lift(p, qubits)) for p in STEANE.stabilizers + (STEANE.logical_z,)]
