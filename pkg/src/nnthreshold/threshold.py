"""Threshold arithmetic for concatenated coding with N operations per level.

The logical failure rate after L levels obeys P_L = p_th (eps / p_th)^(2^L) with
p_th = 2 / N^2. Everything here is closed form; exponents are evaluated in log
space because (p_th / eps)^(2^L) leaves double range after a handful of levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Optional

from . import cost_model
from .cost_model import CommModel
from .layout import BlockVariant


class DomainError(ValueError):
    """Argument outside the mathematical domain of the formula."""


class AboveThresholdError(DomainError):
    """epsilon >= p_th: concatenation gives no guarantee."""


def _check_prob(name, v, *, allow_zero=True):
    if not (0.0 <= v <= 1.0) or (not allow_zero and v == 0.0) or math.isnan(v):
        raise DomainError(f"{name} must be a probability{'' if allow_zero else ' > 0'}, got {v!r}")


def _check_level(L):
    if isinstance(L, bool) or int(L) != L or L < 0:
        raise DomainError(f"level must be a non-negative integer, got {L!r}")
    return int(L)


def p_threshold(N: int) -> float:
    if N < 2:
        raise DomainError(f"operation count must be >= 2, got {N}")
    return 2.0 / (N * N)


def _exp2(L: int) -> float:
    return math.ldexp(1.0, L) if L < 1024 else math.inf


def log_logical_error(epsilon: float, L: int, p_th: float) -> float:
    """Natural log of the unclamped bound; -inf when epsilon == 0."""
    _check_prob("epsilon", epsilon)
    _check_prob("p_th", p_th, allow_zero=False)
    L = _check_level(L)
    if epsilon == 0.0:
        return -math.inf
    ratio = math.log(epsilon) - math.log(p_th)
    if ratio == 0.0:
        return math.log(p_th)
    return math.log(p_th) + _exp2(L) * ratio


def logical_error(epsilon: float, L: int, p_th: float) -> float:
    """P_L = p_th * (epsilon / p_th)^(2^L), clamped to 1."""
    if _check_level(L) == 0:
        _check_prob("epsilon", epsilon)
        _check_prob("p_th", p_th, allow_zero=False)
        return float(epsilon)
    lp = log_logical_error(epsilon, L, p_th)
    return 1.0 if lp >= 0.0 else math.exp(lp)


def _check_below(epsilon, p_th):
    _check_prob("epsilon", epsilon, allow_zero=False)
    _check_prob("p_th", p_th, allow_zero=False)
    if epsilon >= p_th:
        raise AboveThresholdError(f"epsilon={epsilon!r} is not below p_th={p_th!r}")


def log10_accessible_length(epsilon: float, L: int, p_th: float) -> float:
    _check_below(epsilon, p_th)
    L = _check_level(L)
    return -math.log10(p_th) + _exp2(L) * (math.log10(p_th) - math.log10(epsilon))


def accessible_length(epsilon: float, L: int, p_th: float) -> float:
    """T = (1 / p_th) (p_th / epsilon)^(2^L); inf when it exceeds double range."""
    lg = log10_accessible_length(epsilon, L, p_th)
    if lg > 308:
        return math.inf
    return 10.0 ** lg


def explain_level(T: float, epsilon: float, p_th: float) -> tuple[int, Optional[str]]:
    """Smallest L with accessible_length >= T, plus a note for degenerate cases."""
    _check_below(epsilon, p_th)
    if not T > 0 or math.isnan(T):
        raise DomainError(f"length must be positive, got {T!r}")
    if T * p_th <= 1.0:
        return 0, "the unencoded error rate already reaches this length; L = 0 suffices"
    target = math.log10(T)
    ratio = math.log10(p_th / epsilon)
    x = math.log2((target + math.log10(p_th)) / ratio)
    near = round(x)
    L = near if abs(x - near) < 1e-9 else math.ceil(x)
    L = max(L, 0)
    # Guard the float rounding above with the defining inequalities.
    tol = 1e-9 * max(1.0, abs(target))
    while log10_accessible_length(epsilon, L, p_th) < target - tol:
        L += 1
    while L > 0 and log10_accessible_length(epsilon, L - 1, p_th) >= target - tol:
        L -= 1
    return L, None


def sufficient_level(T: float, epsilon: float, p_th: float) -> int:
    return explain_level(T, epsilon, p_th)[0]


def error_from_phase(phi_rad: float) -> float:
    """Error probability of a rotation that overshoots by phi: sin^2(phi / 2)."""
    if not (0.0 <= phi_rad <= math.pi):
        raise DomainError(f"phase must lie in [0, pi], got {phi_rad!r}")
    return math.sin(phi_rad / 2.0) ** 2


def phase_from_error(epsilon: float) -> float:
    """Exact inverse of error_from_phase."""
    _check_prob("epsilon", epsilon)
    return 2.0 * math.asin(math.sqrt(epsilon))


def accuracy_threshold_deg(p_th: float) -> float:
    """Small-angle phase accuracy 2 sqrt(p_th), in degrees."""
    _check_prob("p_th", p_th, allow_zero=False)
    return math.degrees(2.0 * math.sqrt(p_th))


def round_sig(x: float, digits: int = 2) -> Decimal:
    """Round to ``digits`` significant figures, half to even."""
    d = Decimal(x)
    if d == 0:
        return d
    exp = d.adjusted() - (digits - 1)
    return d.scaleb(-exp).quantize(Decimal(1), rounding=ROUND_HALF_EVEN).scaleb(exp)


# Values as printed in the published threshold table, in its row order.
PUBLISHED_TABLE = (
    (CommModel.FREE, BlockVariant.MINIMAL_27, 70, 7, "3.4e-4", "2.1"),
    (CommModel.FREE, BlockVariant.WITH_PREP_46, 298, 7, "2.1e-5", "0.52"),
    (CommModel.REMOTE_CNOT, BlockVariant.MINIMAL_27, 238, 35, "2.7e-5", "0.60"),
    (CommModel.REMOTE_CNOT, BlockVariant.WITH_PREP_46, 1090, 35, "1.6e-6", "0.14"),
    (CommModel.SWAP, BlockVariant.MINIMAL_27, 1008, 203, "1.4e-6", "0.13"),
    (CommModel.SWAP, BlockVariant.WITH_PREP_46, 3754, 343, "1.2e-7", "0.034"),
)

PHI_TOLERANCE_DEG = 0.012
PHI_DISCREPANCY_REL = 0.10


@dataclass(frozen=True)
class ThresholdRow:
    model: CommModel
    variant: BlockVariant
    ec_count: int
    unitary_count: int
    n_total: int
    p_th: float
    phi_th_deg: float
    published_p_th: Decimal
    published_phi_deg: Decimal

    @property
    def p_th_rounded(self) -> Decimal:
        return round_sig(self.p_th, 2)

    @property
    def p_th_matches(self) -> bool:
        return self.p_th_rounded == self.published_p_th

    @property
    def phi_delta_deg(self) -> float:
        return self.phi_th_deg - float(self.published_phi_deg)

    @property
    def phi_relative_delta(self) -> float:
        return self.phi_delta_deg / float(self.published_phi_deg)

    @property
    def note(self) -> Optional[str]:
        if abs(self.phi_relative_delta) > PHI_DISCREPANCY_REL:
            return (
                f"published accuracy {self.published_phi_deg} deg differs from "
                f"2*sqrt(p_th) = {self.phi_th_deg:.4g} deg by {100 * self.phi_relative_delta:.0f}%"
            )
        return None


def table_report() -> list[ThresholdRow]:
    rows = []
    for model, variant, _ec, _u, p_pub, phi_pub in PUBLISHED_TABLE:
        b = cost_model.breakdown(model, variant)
        p = p_threshold(b.n_total)
        rows.append(
            ThresholdRow(
                model,
                variant,
                b.ec_total,
                b.unitary_total,
                b.n_total,
                p,
                accuracy_threshold_deg(p),
                Decimal(p_pub),
                Decimal(phi_pub),
            )
        )
    return rows
