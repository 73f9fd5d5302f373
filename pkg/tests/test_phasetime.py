import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from tunnelkit.domain import (
    DielectricStack,
    DomainError,
    EvanescentGuide,
    FtirGap,
    Layer,
    OpaqueBarrierError,
    RectangularBarrier,
    energy_to_omega,
)
from tunnelkit.phasetime import (
    hartman_curve,
    max_workers,
    phase_series,
    phase_time,
    principal_phase,
    unwrap,
)


def test_principal_branch():
    assert principal_phase(-1) == pytest.approx(math.pi)
    assert principal_phase(complex(-1, -0.0)) == pytest.approx(math.pi)
    assert principal_phase(1j) == pytest.approx(math.pi / 2)
    with pytest.raises(DomainError):
        principal_phase(0)


@given(st.lists(st.floats(-50, 50), min_size=2, max_size=40))
def test_unwrap_recovers_smooth_phase(increments):
    steps = np.clip(np.asarray(increments) / 20, -3.0, 3.0)
    true = np.concatenate([[0.3], 0.3 + np.cumsum(steps)])
    wrapped = np.angle(np.exp(1j * true))
    out = unwrap(wrapped).phases
    np.testing.assert_allclose(out - out[0], true - true[0], atol=1e-9)


def test_unwrap_flags_pi_ties():
    s = unwrap([0.0, math.pi, 0.0])
    assert s.metadata["possible_undersampling"]
    assert s.metadata["ties"] == [0, 1]
    assert not unwrap([0.0, 0.1]).metadata["possible_undersampling"]
    with pytest.raises(ValueError):
        unwrap([1.0])


def test_phase_series_rejects_unsorted():
    with pytest.raises(ValueError):
        unwrap([0, 0.1, 0.2], [1, 3, 2])


# -- rectangular barrier: opaque limit and derivative oracle ----------------------

def test_opaque_limit_e5_v10():
    b0 = RectangularBarrier(10, 1e-9)
    w = energy_to_omega(5)
    for kd in (6, 8, 10, 12):
        tau = phase_time(b0.with_length(kd / b0.kappa(5)), w).value
        assert tau == pytest.approx(oracles.opaque_limit(5, 10), rel=1e-3)
    assert oracles.opaque_limit(5, 10) == pytest.approx(1.316e-16, rel=1e-3)


def test_against_hand_derivative():
    rng = random.Random(7)
    for _ in range(50):
        v0 = rng.uniform(1, 30)
        e = rng.uniform(0.05, 0.95) * v0
        kap = math.sqrt(2 * oracles.M_E * (v0 - e) * oracles.E_CHARGE) / oracles.HBAR
        d = rng.uniform(0.2, 12) / kap
        tau = phase_time(RectangularBarrier(v0, d), energy_to_omega(e)).value
        assert tau == pytest.approx(oracles.rect_phase_time(e, v0, d), rel=1e-6)


def test_free_flight_and_relative_flag():
    d = 1e-9
    w = energy_to_omega(5)
    free = phase_time(RectangularBarrier(0, d), w)
    v = oracles.HBAR * math.sqrt(2 * oracles.M_E * 5 * oracles.E_CHARGE) / oracles.HBAR / oracles.M_E
    assert free.value == pytest.approx(d / v, rel=1e-6)
    rel = phase_time(RectangularBarrier(0, d), w, relative_to_free_flight=True)
    assert abs(rel.value) < 1e-9 * free.value
    b = RectangularBarrier(10, d)
    absolute = phase_time(b, w)
    relative = phase_time(b, w, relative_to_free_flight=True)
    assert absolute.value - relative.value == pytest.approx(d / v, rel=1e-6)
    assert relative.metadata["relative_to_free_flight"]


def test_zero_width_gives_zero():
    assert phase_time(RectangularBarrier(10, 0), energy_to_omega(5)).value == 0


def test_above_barrier_branch():
    r = phase_time(RectangularBarrier(10, 1e-9), energy_to_omega(12))
    assert r.value > 0 and r.metadata["kappa_length"] is None


def test_opaque_barrier_raises():
    with pytest.raises(OpaqueBarrierError):
        phase_time(RectangularBarrier(10, 1e-6), energy_to_omega(5))


def test_metadata_and_richardson():
    b0 = RectangularBarrier(10, 1e-9)
    r = phase_time(b0.with_length(8 / b0.kappa(5)), energy_to_omega(5))
    assert r.method == "phase_time"
    assert r.metadata["converged"]
    assert r.metadata["richardson_error_s"] < 1e-6 * r.value
    assert r.metadata["kappa_length"] == pytest.approx(8, rel=1e-12)
    assert 0 < r.metadata["transmission"] < 1
    with pytest.raises(DomainError):
        phase_time(RectangularBarrier(10, 1e-9), energy_to_omega(5), delta=0.1)
    with pytest.raises(DomainError):
        phase_time(RectangularBarrier(10, 1e-9), -1.0)


# -- optical models against oracle derivatives --------------------------------------

def test_vacuum_layer_is_light_travel_time():
    r = phase_time(DielectricStack([Layer(1.0, 1e-6)]), 2 * math.pi * oracles.C / 800e-9)
    assert r.value == pytest.approx(1e-6 / oracles.C, rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.tuples(st.floats(1.0, 3.0), st.floats(10e-9, 300e-9)), min_size=1, max_size=8),
    st.floats(400e-9, 1500e-9),
)
def test_stack_matches_oracle_derivative(layers, lam):
    s = DielectricStack([Layer(n, d) for n, d in layers])
    w = 2 * math.pi * oracles.C / lam
    ref = oracles.numeric_phase_time(
        lambda x: oracles.stack_t_plane(x, [n for n, _ in layers], [d for _, d in layers])[0], w
    )
    assert phase_time(s, w).value == pytest.approx(ref, rel=1e-5)


def test_bragg_gap_delay_saturates():
    w = 2 * math.pi * oracles.C / 800e-9
    taus = [
        phase_time(DielectricStack.quarter_wave(2.3, 1.45, n, 800e-9), w).value
        for n in (10, 14, 18)
    ]
    lengths = [DielectricStack.quarter_wave(2.3, 1.45, n, 800e-9).length for n in (10, 14, 18)]
    assert max(taus) / min(taus) - 1 < 1e-3
    # the light-travel time through the optical path grows linearly and is much longer
    assert taus[-1] < 0.5 * sum(lay.refractive_index * lay.thickness for lay in
                                DielectricStack.quarter_wave(2.3, 1.45, 18, 800e-9).layers) / oracles.C
    assert lengths[2] > 1.7 * lengths[0]


@pytest.mark.parametrize("pol", ["s", "p"])
def test_ftir_matches_oracle_derivative(pol):
    w = 2 * math.pi * oracles.C / 1e-6
    g = FtirGap(1.5, math.radians(55), 200e-9, pol)
    ref = oracles.numeric_phase_time(
        lambda x: oracles.ftir_t_plane(x, 1.5, math.radians(55), 200e-9, pol)[0], w
    )
    assert phase_time(g, w).value == pytest.approx(ref, rel=1e-5)


def test_guide_matches_oracle_derivative():
    w, wc = 2 * math.pi * 8.7e9, 2 * math.pi * 9.5e9
    ref = oracles.numeric_phase_time(lambda x: oracles.guide_t_plane(x, wc, 0.05)[0], w)
    assert phase_time(EvanescentGuide(9.5e9, 0.05), w).value == pytest.approx(ref, rel=1e-5)


def test_phase_series_group_delay_matches_phase_time():
    b = RectangularBarrier(10, 0.5e-9)
    w0 = energy_to_omega(5)
    omegas = w0 * np.linspace(0.999, 1.001, 41)
    series = phase_series(b, omegas)
    assert series.group_delay()[20] == pytest.approx(phase_time(b, w0).value, rel=1e-5)


# -- Hartman scans ---------------------------------------------------------------

def test_hartman_curve_saturates():
    b0 = RectangularBarrier(10, 1e-9)
    kap = b0.kappa(5)
    curve = hartman_curve(b0, np.linspace(6, 12, 7) / kap, energy_to_omega(5))
    assert all(p.ok for p in curve.points)
    assert curve.saturation < 0.01
    assert curve.taus.shape == (7,)


def test_hartman_propagating_is_monotone():
    b0 = RectangularBarrier(10, 1e-9)
    curve = hartman_curve(b0, [0.2e-9, 0.4e-9, 0.8e-9], energy_to_omega(20))
    assert np.all(np.diff(curve.taus) > 0)
    assert curve.saturation is None


def test_hartman_records_point_errors_and_keeps_order():
    b0 = RectangularBarrier(10, 1e-9)
    lengths = [0.3e-9, 0.6e-9, 1e-6]
    curve = hartman_curve(lambda L: b0.with_length(L), lengths, energy_to_omega(5))
    assert list(curve.lengths) == lengths
    assert [p.ok for p in curve.points] == [True, True, False]
    assert "opaque" in curve.points[2].error
    assert math.isnan(curve.taus[2])


def test_hartman_thread_count_does_not_change_results(monkeypatch):
    b0 = RectangularBarrier(10, 1e-9)
    lengths = np.linspace(0.1e-9, 1.2e-9, 12)
    monkeypatch.setenv("TUNNELKIT_THREADS", "1")
    assert max_workers() == 1
    one = hartman_curve(b0, lengths, energy_to_omega(5)).taus
    monkeypatch.setenv("TUNNELKIT_THREADS", "4")
    four = hartman_curve(b0, lengths, energy_to_omega(5)).taus
    assert one.tolist() == four.tolist()


def test_hartman_input_validation():
    b0 = RectangularBarrier(10, 1e-9)
    with pytest.raises(ValueError):
        hartman_curve(b0, [], 1e16)
    with pytest.raises(ValueError):
        hartman_curve(b0, [2e-9, 1e-9], 1e16)


def test_principal_phase_branch_edge():
    assert principal_phase(1) == 0
    assert principal_phase(complex(-1, -1e-12)) == pytest.approx(-math.pi, abs=1e-11)


def test_unwrap_examples():
    assert unwrap([0, 0.1, 0.2]).phases.tolist() == [0, 0.1, 0.2]
    np.testing.assert_allclose(unwrap([3.0, -3.0]).phases, [3.0, 3.2832], atol=1e-4)
    assert unwrap([1.5] * 5).phases.tolist() == [1.5] * 5


def test_step_halving_is_second_order():
    b0 = RectangularBarrier(10, 1e-9)
    model = b0.with_length(3 / b0.kappa(5))
    w = energy_to_omega(5)
    exact = oracles.rect_phase_time(5, 10, model.width)
    errs = [abs(phase_time(model, w, d, adaptive=False).value - exact) for d in (4e-3, 2e-3, 1e-3)]
    for coarse, fine in zip(errs, errs[1:]):
        assert coarse / fine == pytest.approx(4, rel=0.05)
    r = phase_time(model, w, 4e-3, adaptive=False)
    assert r.metadata["richardson_error_s"] >= 0.9 * abs(r.value - exact) / 4


def test_hartman_single_length_diagnostic_zero():
    b0 = RectangularBarrier(10, 1e-9)
    curve = hartman_curve(b0, [10 / b0.kappa(5)], energy_to_omega(5))
    assert curve.saturation == 0


def test_hartman_guide_saturates():
    wc = 2 * math.pi * 9.5e9
    w = 2 * math.pi * 8.7e9
    kap = math.sqrt(wc**2 - w**2) / oracles.C
    curve = hartman_curve(EvanescentGuide(9.5e9, 0.0), np.linspace(5.5, 12, 6) / kap, w)
    assert curve.saturation < 1e-2
