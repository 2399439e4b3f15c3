"""Stabilizer tableau simulator (destabilizer/stabilizer form with signs).

Used as an exact, independent reference for the explicit circuits: it tracks a
real stabilizer state including measurement randomness, unlike the Pauli-frame
engine in ``fault_sim`` which only tracks deviations from an ideal run.
"""
from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from .circuit_ir import Circuit, GateKind, Site, _negated


def _g(x1, z1, x2, z2) -> int:
    """Power of i picked up when multiplying single-qubit Paulis (vectorised)."""
    x1, z1, x2, z2 = (a.astype(np.int8) for a in (x1, z1, x2, z2))
    out = np.where(
        (x1 == 1) & (z1 == 1),
        z2 - x2,
        np.where((x1 == 1) & (z1 == 0), z2 * (2 * x2 - 1), np.where((x1 == 0) & (z1 == 1), x2 * (1 - 2 * z2), 0)),
    )
    return int(out.sum())


class Tableau:
    """n-qubit stabilizer state, initialised to |0...0>."""

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=bool)
        self.z = np.zeros((2 * n, n), dtype=bool)
        self.r = np.zeros(2 * n, dtype=bool)
        for i in range(n):
            self.x[i, i] = True  # destabilizers X_i
            self.z[n + i, i] = True  # stabilizers Z_i

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n, t.x, t.z, t.r = self.n, self.x.copy(), self.z.copy(), self.r.copy()
        return t

    # -- gates ---------------------------------------------------------------
    def h(self, a: int):
        self.r ^= self.x[:, a] & self.z[:, a]
        self.x[:, a], self.z[:, a] = self.z[:, a].copy(), self.x[:, a].copy()

    def s(self, a: int):
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def cnot(self, a: int, b: int):
        self.r ^= self.x[:, a] & self.z[:, b] & ~(self.x[:, b] ^ self.z[:, a])
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def swap(self, a: int, b: int):
        for arr in (self.x, self.z):
            arr[:, [a, b]] = arr[:, [b, a]]

    def pauli_x(self, a: int):
        self.r ^= self.z[:, a]

    def pauli_z(self, a: int):
        self.r ^= self.x[:, a]

    # -- row algebra ---------------------------------------------------------
    def _rowsum(self, h: int, i: int):
        phase = 2 * int(self.r[h]) + 2 * int(self.r[i]) + _g(self.x[i], self.z[i], self.x[h], self.z[h])
        self.r[h] = (phase % 4) == 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def measure(self, a: int, forced: Optional[int] = None, rng=None) -> int:
        """Z measurement. Random outcomes take ``forced`` if given, else ``rng``."""
        n = self.n
        hits = np.nonzero(self.x[n:, a])[0]
        if hits.size:
            p = n + int(hits[0])
            for i in range(2 * n):
                if i != p and self.x[i, a]:
                    self._rowsum(i, p)
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p], self.z[p], self.r[p]
            self.x[p] = False
            self.z[p] = False
            self.z[p, a] = True
            if forced is None:
                forced = int((rng or np.random.default_rng()).integers(2))
            self.r[p] = bool(forced)
            return int(forced)
        pz = np.zeros(n, dtype=bool)
        pz[a] = True
        return self._deterministic_sign(np.zeros(n, dtype=bool), pz)

    def _deterministic_sign(self, px, pz) -> int:
        """Sign bit of a Pauli known to lie in the stabilizer group."""
        n = self.n
        acc_x = np.zeros(n, dtype=bool)
        acc_z = np.zeros(n, dtype=bool)
        acc_r = 0
        for i in range(n):
            # destabilizer i anticommutes with P  <=>  stabilizer i is in P's decomposition
            if (np.sum(self.x[i] & pz) + np.sum(self.z[i] & px)) % 2:
                s = n + i
                phase = 2 * acc_r + 2 * int(self.r[s]) + _g(self.x[s], self.z[s], acc_x, acc_z)
                acc_r = int((phase % 4) == 2)
                acc_x ^= self.x[s]
                acc_z ^= self.z[s]
        return acc_r

    def expectation(self, x_mask: int, z_mask: int) -> int:
        """+1 / -1 if +-P stabilizes the state, 0 if P is not in the group."""
        n = self.n
        px = np.array([(x_mask >> q) & 1 for q in range(n)], dtype=bool)
        pz = np.array([(z_mask >> q) & 1 for q in range(n)], dtype=bool)
        anti = (np.sum(self.x[n:] & pz, axis=1) + np.sum(self.z[n:] & px, axis=1)) % 2
        if anti.any():
            return 0
        # a qubit with both bits set carries Y, matching the row encoding
        return -1 if self._deterministic_sign(px, pz) else 1

    def stabilizer_rows(self):
        n = self.n
        return [(self.x[i].copy(), self.z[i].copy(), bool(self.r[i])) for i in range(n, 2 * n)]


def site_index(sites) -> dict[Site, int]:
    return {Site(*s): i for i, s in enumerate(sites)}


# Textbook encoder for |0>_L, independent of the nearest-neighbour circuit:
# each X generator gets a pivot qubit that appears in no other generator.
_PIVOTS = (0, 1, 3)


def encode_zero(tab: Tableau, qubits) -> None:
    """Reset ``qubits`` (code order) and prepare the encoded |0> on them."""
    for q in qubits:
        if tab.measure(q, forced=0):
            tab.pauli_x(q)
    for i, p in enumerate(_PIVOTS):
        tab.h(qubits[p])
        for q in range(7):
            if q != p and ((q + 1) >> i) & 1:
                tab.cnot(qubits[p], qubits[q])


def _decode_bits(bits, table):
    syn = 0
    for i in range(3):
        syn |= (sum(bits[q] for q in range(7) if ((q + 1) >> i) & 1) & 1) << i
    pos = table[syn]
    parity = (sum(bits) + (pos is not None)) & 1
    return pos, parity


def run_circuit(
    tab: Tableau,
    circuit: Circuit,
    index: Mapping[Site, int],
    forced: Optional[Mapping[str, int]] = None,
    rng=None,
    decoder=None,
) -> dict[str, int]:
    """Execute a circuit on ``tab``; returns the classical bit values.

    Zero supplies prepare an encoded |0> in place; indicator reads measure the
    word in the Z basis and decode the outcome, so the result is a genuine
    sample of the protocol rather than a frame computation.
    """
    from .steane_code import DECODER_TABLE

    table = decoder or DECODER_TABLE
    bits: dict[str, int] = {}
    forced = dict(forced or {})
    reads_at: dict[int, list] = {}
    done_at: dict[int, list] = {}
    for k, ind in enumerate(circuit.indicators):
        for r in ind.reads:
            reads_at.setdefault(r.timestep, []).append((k, r))
        done_at.setdefault(max(r.timestep for r in ind.reads), []).append(k)
    supplies_at: dict[int, list] = {}
    for sup in circuit.supplies:
        supplies_at.setdefault(sup.timestep, []).append(sup)
    decoded: dict[int, list] = {}

    def events(t):
        for k, r in reads_at.get(t, ()):
            outcome = [tab.measure(index[s], rng=rng) for s in r.sites]
            decoded.setdefault(k, []).append(_decode_bits(outcome, table))
        for k in done_at.get(t, ()):
            ind = circuit.indicators[k]
            res = decoded.pop(k)
            pos0, par0 = res[0]
            agree = all(p == pos0 and (not ind.parity or par == par0) for p, par in res[1:])
            for j, name in enumerate(ind.outputs):
                v = int(pos0 == j) ^ (par0 if ind.parity else 0)
                bits[name] = v if agree else 0
        for sup in supplies_at.get(t, ()):
            encode_zero(tab, [index[s] for s in sup.sites])

    for t, step in enumerate(circuit.timesteps):
        events(t)
        for g in step:
            q = [index[s] for s in g.targets]
            k = g.kind
            if k is GateKind.H:
                tab.h(q[0])
            elif k in (GateKind.CNOT, GateKind.REMOTE_CNOT):
                tab.cnot(q[0], q[1])
            elif k is GateKind.SWAP:
                tab.swap(q[0], q[1])
            elif k is GateKind.PAULI_X:
                tab.pauli_x(q[0])
            elif k is GateKind.PAULI_Z:
                tab.pauli_z(q[0])
            elif k is GateKind.PREP_ZERO:
                if tab.measure(q[0], forced=0):
                    tab.pauli_x(q[0])
            elif k is GateKind.MEASURE_Z:
                bits[g.result] = tab.measure(q[0], forced=forced.get(g.result), rng=rng)
            elif k in (GateKind.CC_X, GateKind.CC_Z):
                fire = all(bits[b] ^ neg for neg, b in map(_negated, g.classical_controls))
                if fire:
                    (tab.pauli_x if k is GateKind.CC_X else tab.pauli_z)(q[0])
    events(len(circuit.timesteps))
    return bits
