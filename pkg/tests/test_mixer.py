import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import FP
from rpmtwpa.dispersion import wavenumber
from rpmtwpa.errors import DegeneratePump, NonPositiveInput, Stopband
from rpmtwpa.mixer import (
    LossModel,
    ModeCoefficients,
    PumpConfig,
    _sinhc,
    coefficients,
    device_squeezing,
    gain_db,
    lossy_gain_db,
    solve_modes,
    squeezing_at_half_pi,
    squeezing_extrema,
    squeezing_spectrum,
)

OMEGA_5GHZ = 2 * math.pi * 5e9
# mpmath evaluation of the closed form with oracle wavenumbers (tests/oracles.py)
GAIN_5GHZ_DB = 17.60191818629168
ABS_V_5GHZ = 7.5212642092042141


def toy(u, v):
    return ModeCoefficients(u=u, v=v, g=0j, delta_k=0.0, delta_k_linear=0.0, position=1.0)


def test_pump_config():
    pump = PumpConfig(1.37e-6, 6e9, 2.75e-6)
    assert pump.beta == pytest.approx(0.12454545, rel=1e-7)
    with pytest.raises(NonPositiveInput):
        PumpConfig(3e-6, 6e9, 2.75e-6)
    with pytest.raises(NonPositiveInput):
        LossModel(1.5)


def test_zero_length(ctx, pump):
    c = coefficients(ctx, pump, OMEGA_5GHZ, 0.0)
    assert c.u == 1 and c.v == 0
    assert gain_db(c) == 0.0


def test_zero_pump_is_pure_phase(ctx):
    pump = PumpConfig(0.0, FP, 2.75e-6)
    for f in np.linspace(1.5e9, 5.5e9, 9):
        c = coefficients(ctx, pump, 2 * math.pi * f, 2000)
        assert abs(c.u) == pytest.approx(1.0, abs=1e-14)
        assert c.v == 0
        half = abs(c.delta_k_linear) * 2000 / 2
        expected = math.cos(half) + 1j * math.copysign(1, c.delta_k_linear) * math.sin(half)
        assert c.u == pytest.approx(expected, abs=1e-12)
        assert gain_db(c) == pytest.approx(0.0, abs=1e-12)


def test_phase_matched_gain_is_cosh():
    ks, ki, beta, x = 0.08, 0.1, 0.12, 1500.0
    b2 = beta**2
    kp = (1 + 2 * b2) * (ks + ki) / (2 + 2 * b2)  # makes the total mismatch vanish
    u, v, g, dk, _ = solve_modes(ks, ki, kp, beta, x)
    assert dk == pytest.approx(0.0, abs=1e-15)
    expected = math.cosh(b2 * math.sqrt(ks * ki) * x)
    assert u.real == pytest.approx(expected, rel=1e-12)
    assert abs(u.imag) < 1e-12


def test_reference_gain(ctx, pump):
    c = coefficients(ctx, pump, OMEGA_5GHZ, 2000)
    assert gain_db(c) == pytest.approx(GAIN_5GHZ_DB, rel=1e-9)
    assert abs(c.v) == pytest.approx(ABS_V_5GHZ, rel=1e-9)
    assert gain_db(c) > 16


def test_stopband_propagates(ctx, pump):
    with pytest.raises(Stopband):
        coefficients(ctx, pump, ctx.pole_norm * ctx.plasma_frequency * (1 + 1e-5), 2000)


def test_lossy_gain():
    c = toy(10.0 + 0j, math.sqrt(99.0))
    assert lossy_gain_db(c, LossModel(1.0)) == gain_db(c)
    assert lossy_gain_db(c, LossModel(0.5)) == pytest.approx(20 - 10 * math.log10(2), abs=1e-12)


def test_lossy_gain_reduction_on_reference_device(ctx, pump):
    c = coefficients(ctx, pump, OMEGA_5GHZ, 2000)
    assert gain_db(c) - lossy_gain_db(c, LossModel(0.9)) == pytest.approx(0.4576, abs=1e-4)


def test_blocked_output_is_vacuum():
    c = toy(3.0 + 1j, 2.5 + 0.5j)
    theta = np.linspace(-np.pi, np.pi, 13)
    assert np.all(squeezing_spectrum(c, LossModel(0.0), theta) == 1.0)


def test_no_pump_no_squeezing():
    c = toy(np.exp(0.3j), 0.0)
    for eta in (0.0, 0.4, 1.0):
        assert np.all(squeezing_spectrum(c, LossModel(eta), np.linspace(0, 6, 7)) == 1.0)
        sq = device_squeezing(c, LossModel(eta))
        assert sq.min_db == 0.0 and sq.max_db == 0.0


@pytest.mark.parametrize("r", [0.1, 0.7, 2.0])
def test_textbook_two_mode_squeezing(r):
    c = toy(math.cosh(r) + 0j, math.sinh(r))
    theta = np.linspace(-np.pi, np.pi, 200001)
    spectrum = squeezing_spectrum(c, LossModel(1.0), theta)
    assert spectrum.min() == pytest.approx(math.exp(-2 * r), rel=1e-8)
    assert spectrum.max() == pytest.approx(math.exp(2 * r), rel=1e-8)
    s_min, s_max = squeezing_extrema(c, LossModel(1.0))
    assert s_min == pytest.approx(math.exp(-2 * r), rel=1e-12)
    assert s_max == pytest.approx(math.exp(2 * r), rel=1e-12)


def test_extremal_angles_attain_extrema():
    c = toy(2.0 - 1.5j, 0.7 + 2.0j)
    c = toy(c.u * math.sqrt(1 + abs(c.v) ** 2) / abs(c.u), c.v)
    sq = device_squeezing(c, LossModel(0.8))
    s_min, s_max = squeezing_extrema(c, LossModel(0.8))
    assert squeezing_spectrum(c, LossModel(0.8), sq.theta_min) == pytest.approx(s_min, rel=1e-12)
    assert squeezing_spectrum(c, LossModel(0.8), sq.theta_max) == pytest.approx(s_max, rel=1e-12)
    assert -np.pi < sq.theta_min <= np.pi


def test_half_pi_accessor_matches_spectrum():
    c = toy(1.2 + 0.4j, 0.3 - 0.6j)
    loss = LossModel(0.7)
    assert squeezing_at_half_pi(c, loss) == pytest.approx(squeezing_spectrum(c, loss, np.pi / 2), rel=1e-14)
    real = toy(math.cosh(1.0) + 0j, math.sinh(1.0))
    expected = 1 + 2 * 0.7 * math.sinh(1.0) ** 2 + 2 * 0.7 * math.cosh(1.0) * math.sinh(1.0)
    assert squeezing_at_half_pi(real, loss) == pytest.approx(expected, rel=1e-14)


def test_loss_saturates_squeezing_at_ten_db():
    r = 8.0
    c = toy(math.cosh(r) + 0j, math.sinh(r))
    sq = device_squeezing(c, LossModel(0.9))
    assert sq.abs_db == pytest.approx(10.0, abs=1e-5)
    assert sq.abs_db < 10.0


def test_degenerate_signal(ctx, pump):
    c = coefficients(ctx, pump, pump.omega, 2000)
    assert c.degenerate
    assert gain_db(c) > 0
    with pytest.raises(DegeneratePump):
        device_squeezing(c, LossModel())
    assert device_squeezing(c, LossModel(), allow_degenerate=True).min_db < 0


def test_series_branch_is_continuous():
    x = 2000.0
    for g in (1e-8 / x, 1e-8j / x, (1 + 1j) * 1e-8 / x):
        direct = np.sinh(g * x) / g
        assert _sinhc(np.array([g]), x)[0] == pytest.approx(direct, rel=1e-10)
    for edge in (0.999e-3, 1.001e-3):
        g = edge / x
        assert _sinhc(np.array([g]), x)[0] == pytest.approx(np.sinh(g * x) / g, rel=1e-14)


def test_exact_zero_g_uses_limit():
    ks, ki, beta, x = 0.09, 0.09, 0.1, 1000.0
    b2 = beta**2
    coupling = b2 * math.sqrt(ks * ki)
    # choose kp so that |dk| / 2 equals the coupling exactly-ish
    kp = ((1 + 2 * b2) * (ks + ki) - 2 * coupling) / (2 + 2 * b2)
    u, v, g, dk, _ = solve_modes(ks, ki, kp, beta, x)
    assert abs(g) * x < 1e-3
    assert u == pytest.approx(1 + 1j * dk / 2 * x, rel=1e-6)
    assert v == pytest.approx(coupling * x, rel=1e-6)
    assert abs(u) ** 2 - abs(v) ** 2 == pytest.approx(1.0, abs=1e-9)


def test_gain_idler_symmetry(ctx, pump):
    f = np.linspace(1e9, 5.9e9, 300)
    a = gain_db(coefficients(ctx, pump, 2 * math.pi * f, 2000))
    b = gain_db(coefficients(ctx, pump, 2 * math.pi * (2 * FP - f), 2000))
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_symplectic_identity_random(ctx):
    rng = np.random.default_rng(1)
    real = imag = 0
    for c_ctx, pump, omega, x in oracles.random_cases(rng, 300):
        c = coefficients(c_ctx, pump, omega, x)
        assert abs(c.u) ** 2 - abs(c.v) ** 2 == pytest.approx(1.0, abs=1e-9)
        if abs(c.g.imag) > abs(c.g.real):
            imag += 1
        else:
            real += 1
    assert real > 10 and imag > 10


@settings(max_examples=300, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=50.0),
    st.floats(min_value=-np.pi, max_value=np.pi),
)
def test_squeezing_bounds(eta, abs_v, phase):
    u = math.sqrt(1 + abs_v**2) * np.exp(1j * phase)
    c = toy(u, abs_v)
    s_min, s_max = squeezing_extrema(c, LossModel(eta))
    assert s_min >= 1 - eta - 1e-15
    assert s_min <= 1 <= s_max
    if eta == 1.0:
        assert s_min * s_max == pytest.approx(1.0, rel=1e-9)
        if abs_v > 1e-7:  # below this 1 - 2|v| rounds to 1
            assert s_min < 1


def test_loss_floor_approached_monotonically():
    v = np.linspace(0, 100, 2001)
    u = np.sqrt(1 + v**2)
    s_min, _ = squeezing_extrema(toy(u + 0j, v), LossModel(0.9))
    assert np.all(np.diff(s_min) <= 0)
    assert np.all(s_min >= 0.1)


@pytest.mark.parametrize("seed", [11, 12, 13])
def test_closed_form_matches_rk4(seed):
    rng = np.random.default_rng(seed)
    for c_ctx, pump, omega, x in oracles.random_cases(rng, 2):
        c = coefficients(c_ctx, pump, omega, x)
        ws = omega / c_ctx.plasma_frequency
        wp = c_ctx.to_norm(pump.omega)
        ks, ki = wavenumber(c_ctx, ws), wavenumber(c_ctx, 2 * wp - ws)
        coupling = pump.beta**2 * math.sqrt(ks * ki)
        abs_u, abs_v = oracles.integrate_cme(c.delta_k, coupling, x)
        assert abs(c.u) == pytest.approx(abs_u, rel=1e-6)
        assert abs(c.v) == pytest.approx(abs_v, rel=1e-6, abs=1e-12)
