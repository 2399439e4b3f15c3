"""Qubit protection blocks on the (L+1)-wide stripe."""
from __future__ import annotations

from collections import Counter
from enum import Enum


class BlockVariant(str, Enum):
    MINIMAL_27 = "minimal_27"  # zeros supplied from outside the block
    WITH_PREP_46 = "with_prep_46"  # zeros prepared inside the block

    @property
    def block_length(self) -> int:
        return 27 if self is BlockVariant.MINIMAL_27 else 46


class SlotRole(str, Enum):
    DATA = "data"
    ZERO = "zero"
    ANCILLA = "ancilla"


class LayoutError(ValueError):
    pass


_D, _Z, _A = SlotRole.DATA, SlotRole.ZERO, SlotRole.ANCILLA

_SEGMENTS = {
    BlockVariant.MINIMAL_27: ((_D, 7), (_Z, 7), (_A, 3), (_Z, 7), (_A, 3)),
    BlockVariant.WITH_PREP_46: ((_D, 7), (_Z, 7), (_A, 3), (_Z, 7), (_A, 4), (_Z, 7), (_Z, 7), (_A, 4)),
}


def block_map(variant: BlockVariant) -> tuple[SlotRole, ...]:
    """Role of every level-(L-1) slot along the block, left to right."""
    variant = BlockVariant(variant)
    return tuple(role for role, n in _SEGMENTS[variant] for _ in range(n))


def role_counts(variant: BlockVariant) -> dict[SlotRole, int]:
    return dict(Counter(block_map(variant)))


def segments(variant: BlockVariant) -> tuple[tuple[SlotRole, int, int], ...]:
    """``(role, start, size)`` for each contiguous segment of the block map."""
    out, start = [], 0
    for role, n in _SEGMENTS[BlockVariant(variant)]:
        out.append((role, start, n))
        start += n
    return tuple(out)


def _check_level(L: int) -> int:
    if isinstance(L, bool) or int(L) != L or L < 0:
        raise ValueError(f"level must be a non-negative integer, got {L!r}")
    return int(L)


def physical_qubits(L: int, variant: BlockVariant) -> int:
    """Physical qubits per level-L logical qubit (exact Python integer)."""
    return BlockVariant(variant).block_length ** _check_level(L)


def stripe_width(L: int) -> int:
    return _check_level(L) + 1

