import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from eogforge.afe import (
    AfeConfig,
    amplify_chain,
    bandpass,
    design_filter,
    digital_response,
    ina_gain,
    magnitude_response,
    stage2_gain,
    total_gain,
)
from eogforge.errors import AliasingError, InvalidConfigError
from eogforge.signal_model import RawSignal

from oracles import analog_bandpass, cascade_impulse_response, dtft_magnitude, first_order_recurrence

FS = 256.0
MINUS_3DB = 20 * math.log10(1 / math.sqrt(2))


def test_ina_gain_default_is_40000():
    assert ina_gain(AfeConfig()) == 40000.0


def test_ina_gain_cases():
    assert ina_gain(AfeConfig(r2=0.0)) == 100000.0 / 10.0
    assert ina_gain(AfeConfig(r2=100, r_gain=200, r4=10, r3=10)) == 2.0


@pytest.mark.parametrize("field", ["r_gain", "r4", "r3"])
def test_ina_gain_rejects_nonpositive(field):
    with pytest.raises(InvalidConfigError):
        AfeConfig(**{field: 0.0})


def test_stage2_and_total():
    assert stage2_gain(AfeConfig(stage2_r2=0.0)) == 1.0
    assert stage2_gain(AfeConfig(stage2_r2=2500, stage2_r1=10000)) == 1.25
    assert stage2_gain(AfeConfig(stage2_r2=10000, stage2_r1=10000)) == 2.0
    assert total_gain(AfeConfig()) == 50000.0
    unity = AfeConfig(r2=0.0, r4=10, r3=10, stage2_r2=0.0)
    assert total_gain(unity) == 1.0
    assert total_gain(AfeConfig(stage2_r2=10000, stage2_r1=10000)) == 80000.0
    with pytest.raises(InvalidConfigError):
        AfeConfig(stage2_r1=-5.0)


def test_magnitude_response_points():
    cfg = AfeConfig()
    assert magnitude_response(cfg, 0.0) == 0.0
    assert magnitude_response(cfg, 5.0) == pytest.approx(0.98149, abs=1e-5)
    assert 20 * math.log10(magnitude_response(cfg, 5.0)) == pytest.approx(-0.162, abs=5e-4)
    # fc_hp -> 0 leaves only the LP factor, 1/sqrt(2) at fc_lp
    assert magnitude_response(AfeConfig(fc_hp=1e-9), 30.0) == pytest.approx(1 / math.sqrt(2), rel=1e-9)
    with pytest.raises(InvalidConfigError):
        magnitude_response(cfg, -1.0)


def test_magnitude_response_vectorised_matches_oracle():
    f = np.geomspace(0.01, 100, 50)
    got = magnitude_response(AfeConfig(), f)
    want = [analog_bandpass(x, 0.5, 30.0) for x in f]
    assert np.allclose(got, want, rtol=1e-12)


def test_design_aliasing():
    with pytest.raises(AliasingError):
        design_filter(AfeConfig(), 40.0)
    with pytest.raises(AliasingError):
        design_filter(AfeConfig(), 60.0)


def test_sections_stable():
    c = design_filter(AfeConfig(), FS)
    assert abs(c.highpass.a1) < 1 and abs(c.lowpass.a1) < 1


def test_minus_3db_points_dft_oracle():
    c = design_filter(AfeConfig(), FS)
    h = cascade_impulse_response(c, int(60 * FS))
    # single-section responses, each from its own recurrence
    imp = [1.0] + [0.0] * (int(60 * FS) - 1)
    h_hp = first_order_recurrence(imp, c.highpass.b0, c.highpass.b1, c.highpass.a1)
    h_lp = first_order_recurrence(imp, c.lowpass.b0, c.lowpass.b1, c.lowpass.a1)
    assert 20 * math.log10(dtft_magnitude(h_hp, 0.5, FS)) == pytest.approx(MINUS_3DB, abs=1e-6)
    assert 20 * math.log10(dtft_magnitude(h_lp, 30.0, FS)) == pytest.approx(MINUS_3DB, abs=1e-9)
    for f in (0.5, 30.0):
        db = 20 * math.log10(dtft_magnitude(h, f, FS))
        assert db == pytest.approx(MINUS_3DB, abs=0.1)


def test_digital_response_agrees_with_dtft_oracle():
    c = design_filter(AfeConfig(), FS)
    h = cascade_impulse_response(c, int(60 * FS))
    f = [0.5, 1.0, 5.0, 20.0, 30.0, 100.0]
    got = digital_response(c, f)
    want = [dtft_magnitude(h, x, FS) for x in f]
    assert np.allclose(got, want, rtol=1e-6)


def test_dc_is_blocked():
    c = design_filter(AfeConfig(), FS)
    y = bandpass(np.ones(int(20 * FS)), c)
    assert abs(y[-1]) < 1e-3


def test_impulse_decays():
    c = design_filter(AfeConfig(), FS)
    h = np.abs(cascade_impulse_response(c, int(60 * FS)))
    assert h[-1] < 1e-9 * h.max()


@pytest.mark.parametrize("f", [1.0, 2.0, 5.0, 10.0, 20.0])
def test_steady_state_sine_gain_matches_analytic(f):
    c = design_filter(AfeConfig(), FS)
    n = int(40 * FS)
    t = np.arange(n) / FS
    y = bandpass(np.sin(2 * np.pi * f * t), c)
    tail = y[int(30 * FS) :]
    amp = math.sqrt(2 * np.mean(tail**2))
    assert amp == pytest.approx(analog_bandpass(f, 0.5, 30.0), rel=0.05)


def test_bandpass_matches_recurrence():
    c = design_filter(AfeConfig(), FS)
    x = np.random.default_rng(0).normal(size=2000)
    want = first_order_recurrence(
        first_order_recurrence(x.tolist(), c.highpass.b0, c.highpass.b1, c.highpass.a1),
        c.lowpass.b0, c.lowpass.b1, c.lowpass.a1,
    )
    assert np.allclose(bandpass(x, c), want, rtol=1e-10, atol=1e-12)


def test_priming_suppresses_step_transient():
    c = design_filter(AfeConfig(), FS)
    x = np.full(int(4 * FS), 1.0) + 0.01 * np.sin(2 * np.pi * 5 * np.arange(int(4 * FS)) / FS)
    cold = bandpass(x, c)
    primed = bandpass(x, c, prime=True)
    assert np.max(np.abs(primed[:64])) < 0.1 * np.max(np.abs(cold[:64]))
    assert primed.shape == x.shape


def raw(diff, cm=None, fs=FS):
    diff = np.asarray(diff, float)
    return RawSignal(fs, diff, np.zeros_like(diff) if cm is None else cm)


def test_chain_gain_no_filter():
    out = amplify_chain(raw(np.full(10, 50e-6)), AfeConfig(), None)
    assert out.volts == pytest.approx(np.full(10, 2.5), rel=1e-12)
    assert out.clip_count == 0


def test_chain_clips_at_rail():
    out = amplify_chain(raw(np.full(10, 3500e-6)), AfeConfig(), None)
    assert np.all(out.volts == 5.0)
    assert out.clip_count == 10
    neg = amplify_chain(raw(np.full(3, -3500e-6)), AfeConfig(), None)
    assert np.all(neg.volts == -5.0)


def test_chain_zero_input():
    c = design_filter(AfeConfig(), FS)
    out = amplify_chain(raw(np.zeros(100)), AfeConfig(), c)
    assert np.all(out.volts == 0.0) and out.clip_count == 0


def test_chain_rate_mismatch():
    c = design_filter(AfeConfig(), 512.0)
    with pytest.raises(InvalidConfigError):
        amplify_chain(raw(np.zeros(10)), AfeConfig(), c)


def test_input_attenuation_divides():
    cfg = AfeConfig(input_attenuation=1000.0)
    out = amplify_chain(raw(np.full(4, 50e-6)), cfg, None)
    assert out.volts == pytest.approx(np.full(4, 2.5e-3), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-50, 50).filter(lambda v: abs(v) > 1e-3), seed=st.integers(0, 2**32 - 1))
def test_linear_below_clip(a, seed):
    c = design_filter(AfeConfig(), FS)
    x = np.random.default_rng(seed).normal(0, 1e-6, 512)
    base = amplify_chain(raw(x), AfeConfig(), c)
    scaled = amplify_chain(raw(a * x), AfeConfig(), c)
    assume(scaled.clip_count == 0)
    assert np.allclose(scaled.volts, a * base.volts, rtol=1e-9, atol=1e-15)


def test_cmrr_ratio():
    cfg = AfeConfig(input_attenuation=1000.0)
    c = design_filter(cfg, FS)
    n = int(20 * FS)
    s = 1e-3 * np.sin(2 * np.pi * 5 * np.arange(n) / FS)
    diff = amplify_chain(raw(s), cfg, c).volts[int(10 * FS) :]
    cm = amplify_chain(raw(np.zeros(n), s), cfg, c).volts[int(10 * FS) :]
    ratio = np.sqrt(np.mean(diff**2) / np.mean(cm**2))
    assert ratio == pytest.approx(10 ** (80 / 20), rel=0.01)


def test_config_validation():
    with pytest.raises(InvalidConfigError):
        AfeConfig(fc_hp=40.0)
    with pytest.raises(InvalidConfigError):
        AfeConfig(supply_rail=0.0)
    with pytest.raises(InvalidConfigError):
        AfeConfig(input_attenuation=0.5)
