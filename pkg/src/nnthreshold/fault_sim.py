"""Pauli-frame fault simulation of level-1 circuits.

A batch of independent frames is pushed through the circuit at once: every
column of the ``(qubits, batch)`` X and Z arrays is one trial (Monte Carlo) or
one injected fault (exhaustive scan). Frames record deviations from the
ideal run, so classical bits are deviation bits as well and an ideal run
leaves every frame, bit and indicator output at zero.

Faults strike after a gate. Fault locations are the computational gates only
(H, CNOT, classically controlled Paulis and plain Paulis). SWAPs, resets,
measurements, the indicator logic and the external zero supply are ideal, in
line with free communication and error-free classical processing.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .circuit_ir import Circuit, GateKind, Site
from .expander import COUNTED_KINDS, expand_cnot_ec, expand_ec_block
from .layout import BlockVariant
from .steane_code import CHECK_MASKS, DECODER_TABLE, PauliOperator

CHUNK = 1 << 16  # trials per independently seeded random stream
WORKERS_ENV = "NNTHRESHOLD_WORKERS"
Z95 = 1.96

_H3 = np.array([[(m >> q) & 1 for q in range(7)] for m in CHECK_MASKS], dtype=np.uint8)
_WEIGHTS = (1 << np.arange(3)).astype(np.int64)


class UnsupportedError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


# -- compilation ---------------------------------------------------------------


@dataclass(frozen=True)
class FaultLocation:
    timestep: int
    gate_index: int
    pauli: PauliOperator  # on the gate's targets, bit k = targets[k]

    def __post_init__(self):
        if self.pauli.is_identity:
            raise ValueError("a fault must be a non-identity Pauli")


@dataclass
class _Program:
    nq: int
    index: dict
    ops: list  # (tag, payload)
    locations: list  # (timestep, gate_index, qubit indices)
    bits: tuple


def _decoder_array(table) -> np.ndarray:
    return np.array([-1 if p is None else p for p in table], dtype=np.int64)


def compile_circuit(c: Circuit) -> _Program:
    index = {Site(r, col): r * c.length + col for r in range(c.width) for col in range(c.length)}
    reads_at: dict[int, list] = {}
    done_at: dict[int, list] = {}
    for k, ind in enumerate(c.indicators):
        for r in ind.reads:
            reads_at.setdefault(r.timestep, []).append((k, np.array([index[s] for s in r.sites])))
        done_at.setdefault(max(r.timestep for r in ind.reads), []).append(k)
    supplies_at: dict[int, list] = {}
    for s in c.supplies:
        supplies_at.setdefault(s.timestep, []).append(tuple(index[x] for x in s.sites))
    ops, locs = [], []

    def events(t):
        for k, q in reads_at.get(t, ()):
            ops.append(("read", (k, q)))
        for k in done_at.get(t, ()):
            ops.append(("indicator", k))
        for q in supplies_at.get(t, ()):
            ops.append(("reset", np.array(q)))

    for t, step in enumerate(c.timesteps):
        events(t)
        for i, g in enumerate(step):
            q = tuple(index[s] for s in g.targets)
            k = g.kind
            if k is GateKind.H:
                ops.append(("h", q))
            elif k in (GateKind.CNOT, GateKind.REMOTE_CNOT):
                ops.append(("cnot", q))
            elif k is GateKind.SWAP:
                ops.append(("swap", q))
            elif k is GateKind.PREP_ZERO:
                ops.append(("reset", np.array(q)))
            elif k is GateKind.MEASURE_Z:
                ops.append(("measure", (q[0], g.result)))
            elif k in (GateKind.CC_X, GateKind.CC_Z):
                if len(g.classical_controls) != 1:
                    raise UnsupportedError("frame simulation handles single-bit classical control only")
                ops.append(("ccx" if k is GateKind.CC_X else "ccz", (q[0], g.control_bits[0])))
            elif k in (GateKind.PAULI_X, GateKind.PAULI_Z):
                pass  # the ideal run applies it too; the frame is unchanged
            else:
                raise UnsupportedError(f"gate kind {k.value} is not Clifford")
            if k in COUNTED_KINDS:
                ops.append(("fault", len(locs)))
                locs.append((t, i, q))
    events(len(c.timesteps))
    return _Program(len(index), index, ops, locs, c.classical_bits)


# -- batched execution ----------------------------------------------------------

Injector = Callable[[int, int], Optional[tuple[np.ndarray, np.ndarray]]]


def _syndrome_rows(xw: np.ndarray) -> np.ndarray:
    """3-bit syndrome of each column of a (7, batch) bit array."""
    return (_H3 @ xw % 2).astype(np.int64).T @ _WEIGHTS


def _decode_word(xw: np.ndarray, dec: np.ndarray):
    """Returns (flagged position or -1, parity of the corrected word) per column."""
    pos = dec[_syndrome_rows(xw)]
    par = (xw.sum(axis=0) + (pos >= 0)) % 2
    return pos, par.astype(bool)


def _run(prog: _Program, circuit: Circuit, batch: int, inject: Optional[Injector], dec: np.ndarray, init=None):
    x = np.zeros((prog.nq, batch), dtype=bool)
    z = np.zeros((prog.nq, batch), dtype=bool)
    if init is not None:
        init(x, z)
    bits: dict[str, np.ndarray] = {}
    pending: dict[int, list] = {}
    zero = np.zeros(batch, dtype=bool)
    for tag, p in prog.ops:
        if tag == "h":
            (a,) = p
            x[a], z[a] = z[a].copy(), x[a].copy()
        elif tag == "cnot":
            c, t = p
            x[t] ^= x[c]
            z[c] ^= z[t]
        elif tag == "swap":
            a, b = p
            x[[a, b]] = x[[b, a]]
            z[[a, b]] = z[[b, a]]
        elif tag == "reset":
            x[p] = False
            z[p] = False
        elif tag == "measure":
            q, name = p
            bits[name] = x[q].copy()
        elif tag == "ccx":
            q, b = p
            x[q] ^= bits.get(b, zero)
        elif tag == "ccz":
            q, b = p
            z[q] ^= bits.get(b, zero)
        elif tag == "read":
            k, q = p
            pending.setdefault(k, []).append(_decode_word(x[q], dec))
        elif tag == "indicator":
            ind = circuit.indicators[p]
            results = pending.pop(p)
            pos0, par0 = results[0]
            agree = np.ones(batch, dtype=bool)
            for pos, par in results[1:]:
                agree &= pos == pos0
                if ind.parity:
                    agree &= par == par0
            for j, name in enumerate(ind.outputs):
                out = pos0 == j
                if ind.parity:
                    out = out ^ par0
                bits[name] = out & agree
        elif tag == "fault":
            if inject is None:
                continue
            hit = inject(p, len(prog.locations[p][2]))
            if hit is None:
                continue
            cols, code = hit
            for k, q in enumerate(prog.locations[p][2]):
                sub = (code >> (2 * k)) & 3
                x[q, cols] ^= (sub & 1).astype(bool)
                z[q, cols] ^= (sub >> 1).astype(bool)

    return x, z


def pauli_code(p: PauliOperator) -> int:
    """Pack a Pauli on a gate's support as 2 bits per qubit (x low, z high)."""
    return sum((((p.x_mask >> k) & 1) | (((p.z_mask >> k) & 1) << 1)) << (2 * k) for k in range(p.n))


def _code_pauli(code: int, arity: int) -> PauliOperator:
    x = sum(((code >> (2 * k)) & 1) << k for k in range(arity))
    z = sum(((code >> (2 * k + 1)) & 1) << k for k in range(arity))
    return PauliOperator(arity, x, z)


# -- scenarios --------------------------------------------------------------------


class ScenarioKind(str, Enum):
    EC_ONLY = "ec-only"
    CNOT_EC = "cnot-ec"


@dataclass
class Scenario:
    kind: ScenarioKind
    variant: BlockVariant
    circuit: Circuit
    data_words: tuple[tuple[Site, ...], ...]
    program: _Program = field(repr=False, default=None)

    def __post_init__(self):
        if self.program is None:
            self.program = compile_circuit(self.circuit)

    @property
    def locations(self) -> int:
        return len(self.program.locations)

    @property
    def name(self) -> str:
        return f"{self.kind.value}/{self.variant.value}"


def build_scenario(kind: ScenarioKind, variant: BlockVariant = BlockVariant.MINIMAL_27) -> Scenario:
    kind, variant = ScenarioKind(kind), BlockVariant(variant)
    if kind is ScenarioKind.EC_ONLY:
        words = (tuple(Site(0, j) for j in range(7)),)
        return Scenario(kind, variant, expand_ec_block(variant), words)
    if variant is not BlockVariant.MINIMAL_27:
        raise UnsupportedError("the CNOT + EC scenario uses externally supplied zeros")
    words = (tuple(Site(0, 2 * j) for j in range(7)), tuple(Site(1, 2 * j) for j in range(7)))
    return Scenario(kind, variant, expand_cnot_ec(), words)


def _word_rows(scn: Scenario) -> list[np.ndarray]:
    return [np.array([scn.program.index[s] for s in w]) for w in scn.data_words]


def _failures(scn: Scenario, x, z, dec) -> np.ndarray:
    """A final perfect EC round per data word; True where any word fails."""
    fail = np.zeros(x.shape[1], dtype=bool)
    for rows in _word_rows(scn):
        for arr in (x, z):
            _pos, par = _decode_word(arr[rows], dec)
            fail |= par
    return fail


def _residuals(scn: Scenario, x, z, dec) -> list[list[PauliOperator]]:
    """Residual per data word after a perfect correction round, per column."""
    out = []
    for col in range(x.shape[1]):
        word_res = []
        for rows in _word_rows(scn):
            masks = []
            for arr in (x, z):
                w = arr[rows, col : col + 1]
                pos = dec[_syndrome_rows(w)][0]
                m = sum(int(v) << q for q, v in enumerate(w[:, 0]))
                masks.append(m ^ (1 << pos) if pos >= 0 else m)
            word_res.append(PauliOperator(7, masks[0], masks[1]))
        out.append(word_res)
    return out


def _fault_injector(prog: _Program, faults: Sequence[FaultLocation]) -> Injector:
    by_loc: dict[int, int] = {}
    lookup = {(t, i): k for k, (t, i, _q) in enumerate(prog.locations)}
    for f in faults:
        k = lookup.get((f.timestep, f.gate_index))
        if k is None:
            raise ValueError(f"no fault location at timestep {f.timestep}, gate {f.gate_index}")
        if f.pauli.n != len(prog.locations[k][2]):
            raise ValueError("fault Pauli does not match the gate's support")
        by_loc[k] = by_loc.get(k, 0) ^ pauli_code(f.pauli)
    cols = np.zeros(1, dtype=np.int64)

    def inject(k, _arity):
        code = by_loc.get(k)
        return None if not code else (cols, np.array([code]))

    return inject


def _initial(scn: Scenario, input_errors: Optional[Mapping[Site, str]]):
    if not input_errors:
        return None

    def init(x, z):
        for s, kind in input_errors.items():
            q = scn.program.index[Site(*s)]
            if kind in ("X", "Y"):
                x[q] ^= True
            if kind in ("Z", "Y"):
                z[q] ^= True

    return init


def propagate_frame(scn: Scenario, faults: Sequence[FaultLocation] = (), input_errors=None, decoder=None):
    """Raw X and Z frames on each data word at the end of the circuit."""
    dec = _decoder_array(decoder or DECODER_TABLE)
    x, z = _run(scn.program, scn.circuit, 1, _fault_injector(scn.program, faults), dec, _initial(scn, input_errors))
    out = []
    for rows in _word_rows(scn):
        xm = sum(int(v) << q for q, v in enumerate(x[rows, 0]))
        zm = sum(int(v) << q for q, v in enumerate(z[rows, 0]))
        out.append(PauliOperator(7, xm, zm))
    return out


def propagate(
    scn: Scenario, faults: Sequence[FaultLocation] = (), input_errors: Optional[Mapping[Site, str]] = None, decoder=None
) -> list[PauliOperator]:
    """Residual on each data word after the circuit and one perfect correction round."""
    dec = _decoder_array(decoder or DECODER_TABLE)
    x, z = _run(scn.program, scn.circuit, 1, _fault_injector(scn.program, faults), dec, _initial(scn, input_errors))
    return _residuals(scn, x, z, dec)[0]


def fault_locations(scn: Scenario) -> list[FaultLocation]:
    """Every (gate, non-identity Pauli on its support) pair."""
    out = []
    for t, i, q in scn.program.locations:
        arity = len(q)
        for code in range(1, 4**arity):
            out.append(FaultLocation(t, i, _code_pauli(code, arity)))
    return out


@dataclass(frozen=True)
class FaultScanReport:
    scenario: str
    gate_locations: int
    faults_checked: int
    failures: tuple[FaultLocation, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def exhaustive_single_fault(scn: Scenario, decoder=None) -> FaultScanReport:
    """Run every single fault in its own batch column and list the ones that fail."""
    dec = _decoder_array(decoder or DECODER_TABLE)
    starts, pos = [], 0
    for _t, _i, q in scn.program.locations:
        starts.append(pos)
        pos += 4 ** len(q) - 1
    total = pos

    def inject(k, arity):
        n = 4**arity - 1
        return np.arange(starts[k], starts[k] + n), np.arange(1, n + 1)

    x, z = _run(scn.program, scn.circuit, total, inject, dec)
    fail = _failures(scn, x, z, dec)
    flat = fault_locations(scn)
    return FaultScanReport(scn.name, scn.locations, total, tuple(flat[c] for c in np.nonzero(fail)[0]))


# -- Monte Carlo ------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorModel:
    """Each gate fails with probability epsilon; a failure is a uniform non-identity Pauli on its support."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")


@dataclass(frozen=True)
class SimEstimate:
    trials: int
    failures: int
    p1_hat: float
    ci_low: float
    ci_high: float
    seed: int
    scenario: str
    epsilon: float
    locations: int

    @property
    def union_bound(self) -> float:
        """(G^2 / 2) epsilon^2 for the scenario's G fault locations."""
        return self.locations**2 / 2 * self.epsilon**2


def wilson_interval(k: int, n: int, zval: float = Z95) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("need at least one trial")
    p = k / n
    denom = 1 + zval * zval / n
    centre = (p + zval * zval / (2 * n)) / denom
    half = zval * math.sqrt(p * (1 - p) / n + zval * zval / (4 * n * n)) / denom
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(chunk,))))


def _chunk_failures(scn: Scenario, eps: float, seed: int, chunk: int, size: int, dec) -> int:
    rng = _chunk_rng(seed, chunk)

    def inject(_k, arity):
        hits = np.flatnonzero(rng.random(size) < eps)
        if hits.size == 0:
            return None
        return hits, rng.integers(1, 4**arity, size=hits.size)

    x, z = _run(scn.program, scn.circuit, size, inject, dec)
    return int(_failures(scn, x, z, dec).sum())


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {env!r}")
        return n
    return min(8, os.cpu_count() or 1)


def monte_carlo_p1(
    scn: Scenario, model: ErrorModel, trials: int, seed: int, workers: Optional[int] = None, decoder=None
) -> SimEstimate:
    """Estimate P1 from ``trials`` noisy runs.

    Trials are cut into fixed chunks of ``CHUNK`` and chunk k draws from a stream
    keyed by ``(seed, k)``, so the failure count does not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dec = _decoder_array(decoder or DECODER_TABLE)
    eps = float(model.epsilon)
    sizes = [min(CHUNK, trials - k * CHUNK) for k in range((trials + CHUNK - 1) // CHUNK)]
    if eps == 0.0:
        failures = 0
    else:
        workers = workers or default_workers()
        job = lambda k: _chunk_failures(scn, eps, seed, k, sizes[k], dec)  # noqa: E731
        if workers == 1 or len(sizes) == 1:
            counts = [job(k) for k in range(len(sizes))]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                counts = list(pool.map(job, range(len(sizes))))
        failures = sum(counts)
    lo, hi = wilson_interval(failures, trials)
    return SimEstimate(trials, failures, failures / trials, lo, hi, seed, scn.name, eps, scn.locations)


def scaling_fit(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(p1) against log(epsilon)."""
    usable = [(e, p) for e, p in points if e > 0 and p > 0]
    if len(usable) < len(points):
        warnings.warn(f"dropped {len(points) - len(usable)} point(s) with non-positive values", stacklevel=2)
    if len(usable) < 3:
        raise InsufficientDataError(f"need at least 3 positive points, got {len(usable)}")
    le = np.log([e for e, _ in usable])
    lp = np.log([p for _, p in usable])
    slope, _ = np.polyfit(le, lp, 1)
    return float(slope)
