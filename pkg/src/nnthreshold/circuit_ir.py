"""Circuit IR: gates on (row, column) sites grouped into parallel timesteps.

Besides quantum gates a circuit carries two kinds of zero-cost events that the
simulators understand:

* ``ZeroSupply``: a perfect encoded ``|0>`` delivered to seven sites just before
  a timestep (the external zero supply of the minimal block).
* ``Indicator``: classical decode logic. It reads the X pattern of one or more
  seven-site words (each read happens just before its timestep), decodes each
  with the Steane lookup table and publishes seven recovery bits. When several
  reads are attached they must agree, otherwise every output bit is 0.

Both are stored beside the timesteps rather than as gates so that gate
histograms only ever count quantum operations.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Optional, Sequence

FORMAT_VERSION = 1


class GateKind(str, Enum):
    H = "H"
    CNOT = "CNOT"
    SWAP = "SWAP"
    REMOTE_CNOT = "REMOTE_CNOT"
    CC_X = "CC_X"
    CC_Z = "CC_Z"
    PREP_ZERO = "PREP_ZERO"
    MEASURE_Z = "MEASURE_Z"
    PAULI_X = "PAULI_X"
    PAULI_Z = "PAULI_Z"

    @property
    def arity(self) -> int:
        return 2 if self in _TWO_SITE else 1

    @property
    def is_classically_controlled(self) -> bool:
        return self in (GateKind.CC_X, GateKind.CC_Z)


_TWO_SITE = frozenset({GateKind.CNOT, GateKind.SWAP, GateKind.REMOTE_CNOT})


class Site(NamedTuple):
    row: int
    col: int


class CircuitError(ValueError):
    """Structurally invalid circuit."""


class CircuitFormatError(ValueError):
    """Malformed circuit text; the message names the offending field or line."""


def _negated(bit: str) -> tuple[bool, str]:
    """Controls prefixed with ``~`` fire on a 0 outcome."""
    return (True, bit[1:]) if bit.startswith("~") else (False, bit)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[Site, ...]
    classical_controls: tuple[str, ...] = ()
    result: Optional[str] = None  # classical bit written by MEASURE_Z

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(Site(*t) for t in self.targets))
        object.__setattr__(self, "classical_controls", tuple(self.classical_controls))
        if len(self.targets) != self.kind.arity:
            raise CircuitError(f"{self.kind.value} takes {self.kind.arity} site(s), got {len(self.targets)}")
        if len(set(self.targets)) != len(self.targets):
            raise CircuitError(f"{self.kind.value} targets must be distinct: {self.targets}")
        if self.kind.is_classically_controlled and not self.classical_controls:
            raise CircuitError(f"{self.kind.value} needs at least one classical control")
        if self.classical_controls and not self.kind.is_classically_controlled:
            raise CircuitError(f"{self.kind.value} does not accept classical controls")
        if (self.result is not None) != (self.kind is GateKind.MEASURE_Z):
            raise CircuitError("exactly the MEASURE_Z gates carry a result bit")

    @property
    def control_bits(self) -> tuple[str, ...]:
        return tuple(_negated(b)[1] for b in self.classical_controls)


@dataclass(frozen=True)
class WordRead:
    timestep: int
    sites: tuple[Site, ...]


@dataclass(frozen=True)
class Indicator:
    name: str
    reads: tuple[WordRead, ...]
    outputs: tuple[str, ...]
    parity: bool = False  # also fold the decoded word parity into every output bit


@dataclass(frozen=True)
class ZeroSupply:
    timestep: int
    sites: tuple[Site, ...]


@dataclass(frozen=True)
class Circuit:
    width: int
    length: int
    timesteps: tuple[tuple[Gate, ...], ...] = ()
    classical_bits: tuple[str, ...] = ()
    indicators: tuple[Indicator, ...] = ()
    supplies: tuple[ZeroSupply, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "timesteps", tuple(tuple(ts) for ts in self.timesteps))
        object.__setattr__(self, "classical_bits", tuple(self.classical_bits))
        object.__setattr__(self, "indicators", tuple(self.indicators))
        object.__setattr__(self, "supplies", tuple(self.supplies))
        self._validate()

    def _in_bounds(self, s: Site) -> bool:
        return 0 <= s.row < self.width and 0 <= s.col < self.length

    def _validate(self):
        if self.width < 0 or self.length < 0:
            raise CircuitError("negative dimensions")
        declared = set(self.classical_bits)
        if len(declared) != len(self.classical_bits):
            raise CircuitError("duplicate classical bit identifiers")
        for t, step in enumerate(self.timesteps):
            used: set[Site] = set()
            for g in step:
                for s in g.targets:
                    if not self._in_bounds(s):
                        raise CircuitError(f"timestep {t}: site {tuple(s)} out of bounds")
                    if s in used:
                        raise CircuitError(f"timestep {t}: site {tuple(s)} used twice")
                    used.add(s)
                for b in g.control_bits + ((g.result,) if g.result else ()):
                    if b not in declared:
                        raise CircuitError(f"timestep {t}: undeclared classical bit {b!r}")
        horizon = len(self.timesteps)
        for ind in self.indicators:
            if len(ind.outputs) != 7 or not ind.reads:
                raise CircuitError(f"indicator {ind.name}: needs 7 outputs and at least one read")
            for b in ind.outputs:
                if b not in declared:
                    raise CircuitError(f"indicator {ind.name}: undeclared output {b!r}")
            for r in ind.reads:
                self._check_word(r.timestep, r.sites, horizon, f"indicator {ind.name}")
        for sup in self.supplies:
            self._check_word(sup.timestep, sup.sites, horizon, "zero supply")

    def _check_word(self, t, sites, horizon, what):
        if not 0 <= t <= horizon:
            raise CircuitError(f"{what}: timestep {t} outside 0..{horizon}")
        if len(sites) != 7 or len(set(sites)) != 7:
            raise CircuitError(f"{what}: a word is 7 distinct sites")
        for s in sites:
            if not self._in_bounds(Site(*s)):
                raise CircuitError(f"{what}: site {tuple(s)} out of bounds")

    @property
    def depth(self) -> int:
        return len(self.timesteps)

    def gates(self) -> Iterable[tuple[int, int, Gate]]:
        for t, step in enumerate(self.timesteps):
            for i, g in enumerate(step):
                yield t, i, g


@dataclass(frozen=True)
class Violation:
    timestep: int
    gate_index: int
    gate: Gate


def validate_nearest_neighbor(c: Circuit) -> list[Violation]:
    """Every two-site gate must touch sites at Manhattan distance 1."""
    out = []
    for t, i, g in c.gates():
        if len(g.targets) == 2:
            a, b = g.targets
            if abs(a.row - b.row) + abs(a.col - b.col) != 1:
                out.append(Violation(t, i, g))
    return out


def count_by_kind(c: Circuit) -> dict[GateKind, int]:
    return dict(Counter(g.kind for _, _, g in c.gates()))


def sequentialize(c: Circuit) -> Circuit:
    """Split every timestep into singleton timesteps, keeping event order."""
    new_index = []
    steps: list[tuple[Gate, ...]] = []
    for step in c.timesteps:
        new_index.append(len(steps))
        steps.extend((g,) for g in step) if step else steps.append(())
    new_index.append(len(steps))
    inds = tuple(
        Indicator(i.name, tuple(WordRead(new_index[r.timestep], r.sites) for r in i.reads), i.outputs, i.parity)
        for i in c.indicators
    )
    sups = tuple(ZeroSupply(new_index[s.timestep], s.sites) for s in c.supplies)
    return Circuit(c.width, c.length, tuple(steps), c.classical_bits, inds, sups)


# -- serialization -----------------------------------------------------------


def _sites_json(sites):
    return [[s[0], s[1]] for s in sites]


def to_dict(c: Circuit) -> dict:
    doc = {
        "version": FORMAT_VERSION,
        "width": c.width,
        "length": c.length,
        "classical_bits": list(c.classical_bits),
        "timesteps": [],
    }
    for step in c.timesteps:
        row = []
        for g in step:
            d = {"kind": g.kind.value, "targets": _sites_json(g.targets)}
            if g.classical_controls:
                d["classical_controls"] = list(g.classical_controls)
            if g.result is not None:
                d["result"] = g.result
            row.append(d)
        doc["timesteps"].append(row)
    if c.indicators:
        doc["indicators"] = [
            {
                "name": i.name,
                "reads": [{"timestep": r.timestep, "sites": _sites_json(r.sites)} for r in i.reads],
                "parity": i.parity,
                "outputs": list(i.outputs),
            }
            for i in c.indicators
        ]
    if c.supplies:
        doc["zero_supply"] = [{"timestep": s.timestep, "sites": _sites_json(s.sites)} for s in c.supplies]
    return doc


def serialize(c: Circuit, indent: Optional[int] = None) -> str:
    return json.dumps(to_dict(c), indent=indent)


def _need(obj, key, path, kind):
    if not isinstance(obj, dict):
        raise CircuitFormatError(f"{path}: expected an object")
    if key not in obj:
        raise CircuitFormatError(f"{path}: missing field {key!r}")
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise CircuitFormatError(f"{path}.{key}: expected an integer")
    if kind is not int and not isinstance(val, kind):
        raise CircuitFormatError(f"{path}.{key}: expected {kind.__name__}")
    return val


def _parse_sites(raw, path) -> tuple[Site, ...]:
    if not isinstance(raw, list):
        raise CircuitFormatError(f"{path}: expected a list of [row, col] pairs")
    out = []
    for k, s in enumerate(raw):
        if (
            not isinstance(s, list)
            or len(s) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in s)
        ):
            raise CircuitFormatError(f"{path}[{k}]: expected [row, col] with non-negative integers")
        out.append(Site(*s))
    return tuple(out)


def _parse_str_list(raw, path) -> tuple[str, ...]:
    if not isinstance(raw, list) or not all(isinstance(b, str) for b in raw):
        raise CircuitFormatError(f"{path}: expected a list of strings")
    return tuple(raw)


def from_dict(doc) -> Circuit:
    version = _need(doc, "version", "$", int)
    if version != FORMAT_VERSION:
        raise CircuitFormatError(f"$.version: unsupported version {version}")
    width = _need(doc, "width", "$", int)
    length = _need(doc, "length", "$", int)
    bits = _parse_str_list(_need(doc, "classical_bits", "$", list), "$.classical_bits")
    raw_steps = _need(doc, "timesteps", "$", list)
    steps = []
    for t, raw_step in enumerate(raw_steps):
        if not isinstance(raw_step, list):
            raise CircuitFormatError(f"$.timesteps[{t}]: expected a list of gates")
        step = []
        for i, rg in enumerate(raw_step):
            path = f"$.timesteps[{t}][{i}]"
            kind_s = _need(rg, "kind", path, str)
            try:
                kind = GateKind(kind_s)
            except ValueError:
                raise CircuitFormatError(f"{path}.kind: unknown gate kind {kind_s!r}") from None
            targets = _parse_sites(_need(rg, "targets", path, list), path + ".targets")
            controls = _parse_str_list(rg.get("classical_controls", []), path + ".classical_controls")
            result = rg.get("result")
            if result is not None and not isinstance(result, str):
                raise CircuitFormatError(f"{path}.result: expected a string")
            try:
                step.append(Gate(kind, targets, controls, result))
            except CircuitError as e:
                raise CircuitFormatError(f"{path}: {e}") from None
        steps.append(tuple(step))
    inds = []
    for k, ri in enumerate(doc.get("indicators", [])):
        path = f"$.indicators[{k}]"
        reads = []
        for j, rr in enumerate(_need(ri, "reads", path, list)):
            rp = f"{path}.reads[{j}]"
            reads.append(WordRead(_need(rr, "timestep", rp, int), _parse_sites(_need(rr, "sites", rp, list), rp + ".sites")))
        parity = ri.get("parity", False)
        if not isinstance(parity, bool):
            raise CircuitFormatError(f"{path}.parity: expected a boolean")
        inds.append(
            Indicator(
                _need(ri, "name", path, str),
                tuple(reads),
                _parse_str_list(_need(ri, "outputs", path, list), path + ".outputs"),
                parity,
            )
        )
    sups = []
    for k, rs in enumerate(doc.get("zero_supply", [])):
        path = f"$.zero_supply[{k}]"
        sups.append(ZeroSupply(_need(rs, "timestep", path, int), _parse_sites(_need(rs, "sites", path, list), path + ".sites")))
    try:
        return Circuit(width, length, tuple(steps), bits, tuple(inds), tuple(sups))
    except CircuitError as e:
        raise CircuitFormatError(str(e)) from None


def parse(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CircuitFormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return from_dict(doc)


# -- construction helper -----------------------------------------------------


@dataclass
class CircuitBuilder:
    """Places gates as early as their sites and classical inputs allow."""

    width: int
    length: int
    _steps: list = field(default_factory=list)
    _site_ready: dict = field(default_factory=dict)
    _bit_ready: dict = field(default_factory=dict)
    _bits: list = field(default_factory=list)
    _indicators: list = field(default_factory=list)
    _supplies: list = field(default_factory=list)
    _floor: int = 0

    def _ready(self, sites) -> int:
        return max([self._floor] + [self._site_ready.get(Site(*s), 0) for s in sites])

    def _hold(self, sites, t: int):
        # a word event happens before timestep t, so no later gate on the word may precede it
        for s in sites:
            self._site_ready[s] = t

    def declare(self, *bits: str):
        for b in bits:
            if b not in self._bits:
                self._bits.append(b)

    def add(self, kind, *targets, controls: Sequence[str] = (), result: Optional[str] = None) -> int:
        g = Gate(GateKind(kind), tuple(Site(*s) for s in targets), tuple(controls), result)
        t = self._ready(g.targets)
        for b in g.control_bits:
            t = max(t, self._bit_ready.get(b, 0))
        while len(self._steps) <= t:
            self._steps.append([])
        self._steps[t].append(g)
        for s in g.targets:
            self._site_ready[s] = t + 1
        if result is not None:
            self.declare(result)
            self._bit_ready[result] = t + 1
        return t

    def supply_zero(self, sites) -> int:
        sites = tuple(Site(*s) for s in sites)
        t = self._ready(sites)
        self._supplies.append(ZeroSupply(t, sites))
        self._hold(sites, t)
        return t

    def read(self, sites) -> WordRead:
        sites = tuple(Site(*s) for s in sites)
        t = self._ready(sites)
        self._hold(sites, t)
        return WordRead(t, sites)

    def indicator(self, name: str, reads: Sequence[WordRead], parity: bool = False) -> tuple[str, ...]:
        outputs = tuple(f"{name}.{j}" for j in range(7))
        self.declare(*outputs)
        ready = max(r.timestep for r in reads)
        for b in outputs:
            self._bit_ready[b] = ready
        self._indicators.append(Indicator(name, tuple(reads), outputs, parity))
        return outputs

    def barrier(self):
        self._floor = max([self._floor, len(self._steps)])

    def build(self) -> Circuit:
        return Circuit(
            self.width,
            self.length,
            tuple(tuple(s) for s in self._steps),
            tuple(self._bits),
            tuple(self._indicators),
            tuple(self._supplies),
        )
