import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnthreshold import fault_sim as fs
from nnthreshold.circuit_ir import CircuitBuilder, Gate, GateKind, Site
from nnthreshold.layout import BlockVariant
from nnthreshold.steane_code import DECODER_TABLE, PauliOperator, is_logical_error

M, P = BlockVariant.MINIMAL_27, BlockVariant.WITH_PREP_46
WORD = tuple(Site(0, j) for j in range(7))


@pytest.fixture(scope="module")
def ec_only():
    return fs.build_scenario(fs.ScenarioKind.EC_ONLY, M)


@pytest.fixture(scope="module")
def cnot_ec():
    return fs.build_scenario(fs.ScenarioKind.CNOT_EC, M)


def _scenario(circuit):
    return fs.Scenario(fs.ScenarioKind.EC_ONLY, M, circuit, (WORD,))


def test_location_counts(ec_only, cnot_ec):
    assert ec_only.locations == 70
    assert cnot_ec.locations == 147
    assert ec_only.name == "ec-only/minimal_27"


def test_no_faults_trivial_residual(ec_only, cnot_ec):
    for scn in (ec_only, cnot_ec):
        assert all(r.is_identity for r in fs.propagate(scn))


@pytest.mark.parametrize("q", range(7))
@pytest.mark.parametrize("kind", "XYZ")
def test_input_errors_are_corrected_by_the_block(ec_only, q, kind):
    # the raw frame after the block is already clean, before the final perfect round
    (frame,) = fs.propagate_frame(ec_only, input_errors={WORD[q]: kind})
    assert frame.is_identity


def test_x_on_control_spreads_through_cnot():
    b = CircuitBuilder(1, 7)
    b.add(GateKind.H, (0, 0))
    b.add(GateKind.CNOT, (0, 0), (0, 1))
    scn = _scenario(b.build())
    # fault on the H at timestep 0, then the CNOT copies it onto the target
    (frame,) = fs.propagate_frame(scn, [fs.FaultLocation(0, 0, PauliOperator.from_label("X"))])
    assert frame.label() == "XXIIIII"
    (frame,) = fs.propagate_frame(scn, [fs.FaultLocation(0, 0, PauliOperator.from_label("Z"))])
    assert frame.label() == "ZIIIIII"


def test_h_exchanges_x_and_z():
    b = CircuitBuilder(1, 7)
    b.add(GateKind.CNOT, (0, 2), (0, 3))
    b.add(GateKind.H, (0, 3))
    scn = _scenario(b.build())
    (frame,) = fs.propagate_frame(scn, [fs.FaultLocation(0, 0, PauliOperator.from_label("IX"))])
    assert frame.label() == "IIIZIII"


@st.composite
def clifford_words(draw):
    b = CircuitBuilder(1, 7)
    for _ in range(draw(st.integers(1, 25))):
        if draw(st.booleans()):
            b.add(GateKind.H, (0, draw(st.integers(0, 6))))
        else:
            j = draw(st.integers(0, 5))
            pair = [(0, j), (0, j + 1)]
            if draw(st.booleans()):
                pair.reverse()
            b.add(draw(st.sampled_from([GateKind.CNOT, GateKind.SWAP])), *pair)
    return b.build()


@settings(max_examples=200, deadline=None)
@given(clifford_words(), st.data())
def test_fault_linearity(circuit, data):
    scn = _scenario(circuit)
    locs = fs.fault_locations(scn)
    if len(locs) < 2:
        return
    a = data.draw(st.sampled_from(locs))
    b = data.draw(st.sampled_from(locs))
    if (a.timestep, a.gate_index) == (b.timestep, b.gate_index):
        return
    (fa,) = fs.propagate_frame(scn, [a])
    (fb,) = fs.propagate_frame(scn, [b])
    (fab,) = fs.propagate_frame(scn, [a, b])
    assert fab == fa * fb


def test_fault_location_validation(ec_only):
    with pytest.raises(ValueError):
        fs.FaultLocation(0, 0, PauliOperator(1))
    with pytest.raises(ValueError, match="no fault location"):
        fs.propagate(ec_only, [fs.FaultLocation(999, 0, PauliOperator.from_label("X"))])
    t, i, _ = ec_only.program.locations[0]
    with pytest.raises(ValueError, match="support"):
        fs.propagate(ec_only, [fs.FaultLocation(t, i, PauliOperator.from_label("XXX"))])


def test_pauli_code_round_trip():
    for code in range(1, 16):
        assert fs.pauli_code(fs._code_pauli(code, 2)) == code


def test_non_clifford_circuits_rejected():
    b = CircuitBuilder(1, 7)
    b.add(GateKind.MEASURE_Z, (0, 0), result="a")
    b.add(GateKind.MEASURE_Z, (0, 1), result="b")
    b.add(GateKind.CC_X, (0, 2), controls=("a", "b"))
    with pytest.raises(fs.UnsupportedError):
        _scenario(b.build())


def test_cnot_ec_needs_external_zeros():
    with pytest.raises(fs.UnsupportedError):
        fs.build_scenario(fs.ScenarioKind.CNOT_EC, P)


# -- exhaustive scans -------------------------------------------------------------


def test_exhaustive_ec_only(ec_only):
    rep = fs.exhaustive_single_fault(ec_only)
    assert rep.gate_locations == 70
    assert rep.faults_checked == len(fs.fault_locations(ec_only))
    assert rep.ok, rep.failures[:5]


def test_exhaustive_cnot_ec(cnot_ec):
    rep = fs.exhaustive_single_fault(cnot_ec)
    assert rep.ok, rep.failures[:5]


def test_exhaustive_with_inline_zeros():
    rep = fs.exhaustive_single_fault(fs.build_scenario(fs.ScenarioKind.EC_ONLY, P))
    assert rep.gate_locations == 298
    assert rep.ok, rep.failures[:5]


def test_mutant_decoder_is_caught(ec_only):
    table = list(DECODER_TABLE)
    table[1], table[2] = table[2], table[1]
    rep = fs.exhaustive_single_fault(ec_only, decoder=table)
    assert not rep.ok


def test_scan_agrees_with_single_propagation(ec_only):
    # the batched scan and one-at-a-time propagation must agree on a sample
    locs = fs.fault_locations(ec_only)[::37]
    for f in locs:
        assert not any(is_logical_error(r) for r in fs.propagate(ec_only, [f]))


# -- Monte Carlo ------------------------------------------------------------------


def test_error_model_bounds():
    with pytest.raises(ValueError):
        fs.ErrorModel(1.5)
    with pytest.raises(ValueError):
        fs.ErrorModel(-0.1)


def test_zero_noise_gives_zero(ec_only):
    est = fs.monte_carlo_p1(ec_only, fs.ErrorModel(0.0), 1000, seed=1)
    assert est.failures == 0 and est.p1_hat == 0.0
    assert est.ci_low == 0.0 and est.ci_high > 0.0


def test_trials_must_be_positive(ec_only):
    with pytest.raises(ValueError):
        fs.monte_carlo_p1(ec_only, fs.ErrorModel(0.01), 0, seed=1)


def test_union_bound_holds(ec_only):
    est = fs.monte_carlo_p1(ec_only, fs.ErrorModel(1e-2), 200_000, seed=5)
    assert est.union_bound == pytest.approx(70**2 / 2 * 1e-4)
    assert est.ci_low <= est.p1_hat <= est.ci_high <= est.union_bound


def test_quadratic_ratio(ec_only):
    lo = fs.monte_carlo_p1(ec_only, fs.ErrorModel(1e-3), 400_000, seed=2)
    hi = fs.monte_carlo_p1(ec_only, fs.ErrorModel(1e-2), 400_000, seed=3)
    # a decade in epsilon moves P1 by 10^slope; higher-order terms pull the ratio
    # below 100 at 1e-2, so check against the accepted slope band [1.8, 2.2]
    assert 10**1.8 <= hi.ci_high / lo.ci_low
    assert hi.ci_low / lo.ci_high <= 10**2.2


def test_determinism_across_workers(ec_only):
    trials = 2 * fs.CHUNK + 123
    counts = {w: fs.monte_carlo_p1(ec_only, fs.ErrorModel(3e-3), trials, seed=9, workers=w).failures for w in (1, 2, 3)}
    assert len(set(counts.values())) == 1
    again = fs.monte_carlo_p1(ec_only, fs.ErrorModel(3e-3), trials, seed=9, workers=2).failures
    assert again == counts[1]


def test_different_seeds_differ(ec_only):
    a = fs.monte_carlo_p1(ec_only, fs.ErrorModel(1e-2), 50_000, seed=1, workers=1).failures
    b = fs.monte_carlo_p1(ec_only, fs.ErrorModel(1e-2), 50_000, seed=2, workers=1).failures
    assert a != b


def test_every_gate_failing_is_well_defined(ec_only):
    small = fs.monte_carlo_p1(ec_only, fs.ErrorModel(1.0), 20_000, seed=4)
    large = fs.monte_carlo_p1(ec_only, fs.ErrorModel(1.0), 80_000, seed=6)
    assert 0.0 < large.p1_hat < 1.0
    assert small.ci_low <= large.ci_high and large.ci_low <= small.ci_high


def test_workers_env(monkeypatch):
    monkeypatch.setenv(fs.WORKERS_ENV, "3")
    assert fs.default_workers() == 3
    monkeypatch.setenv(fs.WORKERS_ENV, "zero")
    with pytest.raises(ValueError):
        fs.default_workers()
    monkeypatch.delenv(fs.WORKERS_ENV)
    assert 1 <= fs.default_workers() <= 8


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**6), st.data())
def test_wilson_interval_brackets_estimate(n, data):
    k = data.draw(st.integers(0, n))
    lo, hi = fs.wilson_interval(k, n)
    assert 0.0 <= lo <= k / n <= hi <= 1.0


# -- scaling fit ------------------------------------------------------------------


@pytest.mark.parametrize("power", [1.0, 2.0, 3.0])
def test_scaling_fit_synthetic(power):
    eps = [1e-3, 3e-3, 1e-2, 3e-2]
    slope = fs.scaling_fit([(e, 7.0 * e**power) for e in eps])
    assert slope == pytest.approx(power, abs=1e-12)


def test_scaling_fit_drops_nonpositive_points():
    pts = [(1e-3, 0.0), (2e-3, 4e-6), (4e-3, 1.6e-5), (8e-3, 6.4e-5)]
    with pytest.warns(UserWarning, match="dropped 1"):
        assert fs.scaling_fit(pts) == pytest.approx(2.0)


def test_scaling_fit_needs_three_points():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(fs.InsufficientDataError):
            fs.scaling_fit([(1e-3, 1e-6), (1e-2, 1e-4), (1e-1, 0.0)])


def test_chunk_streams_are_independent():
    a = fs._chunk_rng(1, 0).random(4)
    b = fs._chunk_rng(1, 1).random(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, fs._chunk_rng(1, 0).random(4))


def test_gate_objects_unchanged_by_compilation(ec_only):
    assert all(isinstance(g, Gate) for _, _, g in ec_only.circuit.gates())
