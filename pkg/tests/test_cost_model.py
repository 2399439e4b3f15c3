import itertools

import pytest

from nnthreshold.cost_model import (
    CommModel,
    UnsupportedError,
    breakdown,
    ec_count,
    level_cost,
    logical_swap_cost,
    physical_gate_count,
    unitary_count,
)
from nnthreshold.layout import BlockVariant

M, P = BlockVariant.MINIMAL_27, BlockVariant.WITH_PREP_46
MODELS = [CommModel.FREE, CommModel.REMOTE_CNOT, CommModel.SWAP]

GOLDEN = {
    (CommModel.FREE, M): (70, 7),
    (CommModel.FREE, P): (298, 7),
    (CommModel.REMOTE_CNOT, M): (238, 35),
    (CommModel.REMOTE_CNOT, P): (1090, 35),
    (CommModel.SWAP, M): (1008, 203),
    (CommModel.SWAP, P): (3754, 343),
}

TERM_SUMS = {
    (CommModel.FREE, M): [28, 28, 7, 7],
    (CommModel.FREE, P): [70, 144, 28, 56],
    (CommModel.REMOTE_CNOT, M): [140, 28, 35, 35],
    (CommModel.REMOTE_CNOT, P): [238, 432, 140, 280],
    (CommModel.SWAP, M): [476, 28, 182, 161, 161],
    (CommModel.SWAP, P): [1008, 324, 182, 420, 476, 700, 644],
}


@pytest.mark.parametrize("key", list(GOLDEN))
def test_golden_table_counts(key):
    b = breakdown(*key)
    assert (b.ec_total, b.unitary_total) == GOLDEN[key]


@pytest.mark.parametrize("key", list(TERM_SUMS))
def test_named_terms(key):
    n_e, n_ec, terms = ec_count(*key)
    assert [c for _, c in terms] == TERM_SUMS[key]
    assert sum(c for _, c in terms) == n_e + n_ec == GOLDEN[key][0]


@pytest.mark.parametrize("key", list(GOLDEN))
def test_aggregates_equal_term_sums(key):
    b = breakdown(*key)
    assert b.n_u == sum(t.n_comp for t in b.unitary_terms)
    assert b.n_uc == sum(t.n_comm for t in b.unitary_terms)
    assert b.n_e + b.n_ec == sum(t.count for t in b.ec_terms)
    assert unitary_count(*key) == (b.n_u, b.n_uc)
    assert level_cost(*key) == b.n_total == sum(GOLDEN[key])


def test_free_model_has_no_communication():
    for v in (M, P):
        b = breakdown(CommModel.FREE, v)
        assert b.n_uc == 0 and b.n_ec == 0


def test_level_cost_examples():
    assert level_cost(CommModel.SWAP, P) == 4097
    assert level_cost(CommModel.REMOTE_CNOT, M) == 273
    assert level_cost("free", "minimal_27") == 77


@pytest.mark.parametrize("variant", [M, P])
def test_communication_monotonicity(variant):
    costs = [level_cost(m, variant) for m in MODELS]
    assert costs == sorted(costs) and len(set(costs)) == 3


@pytest.mark.parametrize("model", MODELS)
def test_variant_monotonicity(model):
    assert level_cost(model, P) > level_cost(model, M)


@pytest.mark.parametrize("model, variant", list(itertools.product(MODELS, [M, P])))
def test_physical_gate_count_power_law(model, variant):
    n = level_cost(model, variant)
    assert physical_gate_count(0, model, variant) == 1
    for L in range(6):
        assert physical_gate_count(L + 1, model, variant) == physical_gate_count(L, model, variant) * n


def test_physical_gate_count_examples():
    assert physical_gate_count(1, CommModel.FREE, M) == 77
    assert physical_gate_count(2, CommModel.SWAP, P) == 16_785_409
    with pytest.raises(ValueError):
        physical_gate_count(-1, CommModel.FREE, M)


def test_logical_swap_cost():
    assert logical_swap_cost(CommModel.SWAP) == (7, 42)
    assert logical_swap_cost(CommModel.FREE) == (7, 0)
    with pytest.raises(UnsupportedError):
        logical_swap_cost(CommModel.REMOTE_CNOT)


def test_unknown_model_rejected():
    with pytest.raises(ValueError):
        breakdown("teleport", M)
