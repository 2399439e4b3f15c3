"""The [7,1,3] Steane code: Pauli algebra, syndromes and the lookup decoder.

Qubit ``q`` (0-based) carries the Hamming column label ``q + 1``; generator ``i``
acts on every qubit whose label has bit ``i`` set. The same three supports are
used for the X-type and Z-type generators (self-dual CSS construction).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

N_QUBITS = 7

#: Supports of the three parity checks as bit masks over the 7 qubits.
CHECK_MASKS: tuple[int, ...] = tuple(
    sum(1 << q for q in range(N_QUBITS) if ((q + 1) >> i) & 1) for i in range(3)
)

#: ``DECODER_TABLE[s]`` is the qubit flagged by syndrome ``s`` (``None`` for 0).
DECODER_TABLE: tuple[Optional[int], ...] = (None,) + tuple(range(N_QUBITS))


class DimensionError(ValueError):
    """Operator width does not match the code length."""


class ContractViolation(ValueError):
    """A function was called outside its documented precondition."""


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


@dataclass(frozen=True)
class PauliOperator:
    """Phase-free n-qubit Pauli stored as X and Z bit masks (bit q = qubit q)."""

    n: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        limit = 1 << self.n
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"masks do not fit in {self.n} qubits")

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliOperator":
        """Weight-one operator ``kind`` in {'X', 'Y', 'Z'} on ``qubit``."""
        if not 0 <= qubit < n:
            raise IndexError(qubit)
        bit = 1 << qubit
        x = bit if kind in ("X", "Y") else 0
        z = bit if kind in ("Z", "Y") else 0
        if not (x or z):
            raise ValueError(f"unknown Pauli kind {kind!r}")
        return cls(n, x, z)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse a string such as ``"XIZY"``; character q acts on qubit q."""
        x = z = 0
        for q, ch in enumerate(label.upper()):
            if ch in "XY":
                x |= 1 << q
            if ch in "ZY":
                z |= 1 << q
            if ch not in "IXYZ_":
                raise ValueError(f"bad Pauli character {ch!r}")
        return cls(len(label), x, z)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if other.n != self.n:
            raise DimensionError(f"width mismatch {self.n} vs {other.n}")
        return PauliOperator(self.n, self.x_mask ^ other.x_mask, self.z_mask ^ other.z_mask)

    def commutes_with(self, other: "PauliOperator") -> bool:
        if other.n != self.n:
            raise DimensionError(f"width mismatch {self.n} vs {other.n}")
        return not _parity((self.x_mask & other.z_mask) ^ (self.z_mask & other.x_mask))

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def weight(self) -> int:
        return bin(self.x_mask | self.z_mask).count("1")

    def label(self) -> str:
        out = []
        for q in range(self.n):
            x, z = (self.x_mask >> q) & 1, (self.z_mask >> q) & 1
            out.append("IXZY"[x + 2 * z])
        return "".join(out)

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class CodeDefinition:
    n: int
    k: int
    d: int
    x_stabilizers: tuple[PauliOperator, ...]
    z_stabilizers: tuple[PauliOperator, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator

    @property
    def stabilizers(self) -> tuple[PauliOperator, ...]:
        return self.x_stabilizers + self.z_stabilizers


_ALL = (1 << N_QUBITS) - 1

STEANE = CodeDefinition(
    n=N_QUBITS,
    k=1,
    d=3,
    x_stabilizers=tuple(PauliOperator(N_QUBITS, m, 0) for m in CHECK_MASKS),
    z_stabilizers=tuple(PauliOperator(N_QUBITS, 0, m) for m in CHECK_MASKS),
    logical_x=PauliOperator(N_QUBITS, _ALL, 0),
    logical_z=PauliOperator(N_QUBITS, 0, _ALL),
)


def _check_width(e: PauliOperator) -> None:
    if e.n != N_QUBITS:
        raise DimensionError(f"expected a {N_QUBITS}-qubit operator, got {e.n}")


def mask_syndrome(mask: int) -> int:
    """3-bit syndrome of a single error sector given as a 7-bit mask."""
    return sum(_parity(mask & c) << i for i, c in enumerate(CHECK_MASKS))


def syndrome(e: PauliOperator) -> tuple[int, int]:
    """Return ``(x_syn, z_syn)``.

    ``x_syn`` comes from the Z-type checks and so flags the X component;
    ``z_syn`` comes from the X-type checks and flags the Z component. Each is an
    integer in 0..7 whose bit i is the outcome of check i.
    """
    _check_width(e)
    return mask_syndrome(e.x_mask), mask_syndrome(e.z_mask)


def decode_syndrome(syn: int, table: Sequence[Optional[int]] = DECODER_TABLE) -> Optional[int]:
    if not 0 <= syn < 8:
        raise ValueError(f"syndrome must be 3 bits, got {syn}")
    return table[syn]


def correct(e: PauliOperator, table: Sequence[Optional[int]] = DECODER_TABLE) -> PauliOperator:
    """Apply one ideal round of bit-flip and phase-flip recovery to ``e``."""
    x_syn, z_syn = syndrome(e)
    x, z = e.x_mask, e.z_mask
    qx = decode_syndrome(x_syn, table)
    qz = decode_syndrome(z_syn, table)
    if qx is not None:
        x ^= 1 << qx
    if qz is not None:
        z ^= 1 << qz
    return PauliOperator(e.n, x, z)


def gf2_in_span(rows: Iterable[int], v: int) -> bool:
    """True if bit vector ``v`` lies in the GF(2) span of ``rows``."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
    for b in basis:
        v = min(v, v ^ b)
    return v == 0


def in_stabilizer_group(e: PauliOperator, code: CodeDefinition = STEANE) -> bool:
    return gf2_in_span((s.x_mask for s in code.x_stabilizers), e.x_mask) and gf2_in_span(
        (s.z_mask for s in code.z_stabilizers), e.z_mask
    )


def is_logical_error(residual: PauliOperator, code: CodeDefinition = STEANE) -> bool:
    """Classify a syndrome-free residual: logical operator (True) or stabilizer."""
    _check_width(residual)
    if syndrome(residual) != (0, 0):
        raise ContractViolation("residual has a nonzero syndrome; correct it first")
    return not in_stabilizer_group(residual, code)
