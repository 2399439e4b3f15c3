"""Per-level gate accounting for the three communication models.

Every count is stored as a list of named terms so that the totals can be
audited line by line. Each term is ``multiplier x (computational + communication)``
level-(L-1) operations. Communication operations are the SWAPs or remote-CNOT
overhead spent only on moving quantum information.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .layout import BlockVariant


class CommModel(str, Enum):
    FREE = "free"
    REMOTE_CNOT = "recnot"
    SWAP = "swap"


class UnsupportedError(ValueError):
    """The requested operation has no meaning under the chosen model."""


@dataclass(frozen=True)
class Term:
    label: str
    multiplier: int
    computational: int  # per instance
    communication: int = 0  # per instance

    @property
    def n_comp(self) -> int:
        return self.multiplier * self.computational

    @property
    def n_comm(self) -> int:
        return self.multiplier * self.communication

    @property
    def count(self) -> int:
        return self.n_comp + self.n_comm


@dataclass(frozen=True)
class CountBreakdown:
    model: CommModel
    variant: BlockVariant
    unitary_terms: tuple[Term, ...]
    ec_terms: tuple[Term, ...]

    @property
    def n_u(self) -> int:
        return sum(t.n_comp for t in self.unitary_terms)

    @property
    def n_uc(self) -> int:
        return sum(t.n_comm for t in self.unitary_terms)

    @property
    def n_e(self) -> int:
        return sum(t.n_comp for t in self.ec_terms)

    @property
    def n_ec(self) -> int:
        return sum(t.n_comm for t in self.ec_terms)

    @property
    def unitary_total(self) -> int:
        return self.n_u + self.n_uc

    @property
    def ec_total(self) -> int:
        return self.n_e + self.n_ec

    @property
    def n_total(self) -> int:
        return self.unitary_total + self.ec_total

    @property
    def terms(self) -> tuple[tuple[str, int], ...]:
        return tuple((t.label, t.count) for t in self.ec_terms)


# Per-operation costs that recur below.
RECNOT_OPS = 5  # remote CNOT between two level-(L-1) qubits
ZERO_PREP_GATES = 12  # 3 H + 9 CNOT
ZERO_PREP_SWAPS = 15  # bringing the two-row zero preparation back onto one row

_M, _P = BlockVariant.MINIMAL_27, BlockVariant.WITH_PREP_46
_FREE, _RE, _SW = CommModel.FREE, CommModel.REMOTE_CNOT, CommModel.SWAP

_UNITARY = {
    (_FREE, _M): (Term("7 CNOT", 1, 7),),
    (_FREE, _P): (Term("7 CNOT", 1, 7),),
    (_RE, _M): (Term("7 reCNOT", 7, 1, RECNOT_OPS - 1),),
    (_RE, _P): (Term("7 reCNOT", 7, 1, RECNOT_OPS - 1),),
    (_SW, _M): (Term("7 CNOT + 196 SWAP", 1, 7, 196),),
    (_SW, _P): (Term("7 CNOT + 336 SWAP", 1, 7, 336),),
}

_EC_BASE = {
    _FREE: (
        Term("4 x 7 CNOT", 4, 7),
        Term("4 x 7 H", 4, 7),
        Term("7 CC_X", 1, 7),
        Term("7 CC_Z", 1, 7),
    ),
    _RE: (
        Term("4 x 7 reCNOT", 28, 1, RECNOT_OPS - 1),
        Term("4 x 7 H", 4, 7),
        Term("7 CC_X as reCNOT", 7, 1, RECNOT_OPS - 1),
        Term("7 CC_Z as reCNOT", 7, 1, RECNOT_OPS - 1),
    ),
    _SW: (
        Term("4 x (7 CNOT + 112 SWAP)", 4, 7, 112),
        Term("4 x 7 H", 4, 7),
        Term("2 x (7 SWAP + 84 SWAP)", 2, 7, 84),
        Term("7 CC_X + 154 SWAP", 1, 7, 154),
        Term("7 CC_Z + 154 SWAP", 1, 7, 154),
    ),
}


def _base_term(model: CommModel) -> Term:
    base = _EC_BASE[model]
    comp = sum(t.n_comp for t in base)
    comm = sum(t.n_comm for t in base)
    return Term(f"EC without zero preparation ({comp + comm})", 1, comp, comm)


_EC_PREP_EXTRA = {
    _FREE: (
        Term("12 x 0_L (3 H + 9 CNOT)", 12, ZERO_PREP_GATES),
        Term("4 x 7 CC_X", 4, 7),
        Term("8 x 7 CNOT", 8, 7),
    ),
    _RE: (
        Term("12 x 0_L (3 H + 3 CNOT + 6 reCNOT)", 12, 12, 6 * (RECNOT_OPS - 1)),
        Term("4 x 7 CC_X as reCNOT", 28, 1, RECNOT_OPS - 1),
        Term("8 x 7 reCNOT", 56, 1, RECNOT_OPS - 1),
    ),
    _SW: (
        Term("12 x 0_L (12 gates + 15 SWAP)", 12, ZERO_PREP_GATES, ZERO_PREP_SWAPS),
        Term("2 x (7 SWAP + 84 SWAP)", 2, 7, 84),
        Term("4 x (7 SWAP + 98 SWAP)", 4, 7, 98),
        Term("4 x (7 CNOT + 112 SWAP)", 4, 7, 112),
        Term("4 x (7 CNOT + 168 SWAP)", 4, 7, 168),
        Term("4 x (7 CC_X + 154 SWAP)", 4, 7, 154),
    ),
}


def _ec_terms(model: CommModel, variant: BlockVariant) -> tuple[Term, ...]:
    if variant is _M:
        return _EC_BASE[model]
    return (_base_term(model),) + _EC_PREP_EXTRA[model]


def breakdown(model: CommModel, variant: BlockVariant) -> CountBreakdown:
    model, variant = CommModel(model), BlockVariant(variant)
    return CountBreakdown(model, variant, _UNITARY[(model, variant)], _ec_terms(model, variant))


def unitary_count(model: CommModel, variant: BlockVariant) -> tuple[int, int]:
    b = breakdown(model, variant)
    return b.n_u, b.n_uc


def ec_count(model: CommModel, variant: BlockVariant) -> tuple[int, int, tuple[tuple[str, int], ...]]:
    b = breakdown(model, variant)
    return b.n_e, b.n_ec, b.terms


def level_cost(model: CommModel, variant: BlockVariant) -> int:
    """N = N_U + N_Uc + N_E + N_Ec for one level of encoding."""
    return breakdown(model, variant).n_total


def physical_gate_count(L: int, model: CommModel, variant: BlockVariant) -> int:
    if isinstance(L, bool) or int(L) != L or L < 0:
        raise ValueError(f"level must be a non-negative integer, got {L!r}")
    return level_cost(model, variant) ** int(L)


LOGICAL_SWAP_PHASES = (21, 7, 21)  # interleave, transversal swaps, undo


def logical_swap_cost(model: CommModel) -> tuple[int, int]:
    """(computational, communication) operations for one logical SWAP."""
    model = CommModel(model)
    if model is _RE:
        raise UnsupportedError("logical SWAP is not built from remote CNOTs")
    if model is _FREE:
        return 7, 0
    interleave, transversal, undo = LOGICAL_SWAP_PHASES
    return transversal, interleave + undo
