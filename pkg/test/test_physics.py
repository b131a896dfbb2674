#!/usr/bin/env python
u"""
test_physics.py (10/2026)
"""
import pytest
import numpy as np
import optotherm.fit
import optotherm.physics

TWO_PI = optotherm.physics.TWO_PI
KAPPA = TWO_PI*1.4e6
OMEGA = TWO_PI*370e3

# PURPOSE: cooling limit of the red-detuned cooling beam
def test_n_ba_cool():
    n = optotherm.physics.n_ba_cool(-TWO_PI*700e3, OMEGA, KAPPA)
    assert n == pytest.approx(0.578088, rel=1e-5)
    # independent of the units of the angular frequencies
    m = optotherm.physics.n_ba_cool(-700e3, 370e3, 1.4e6)
    assert m == pytest.approx(n, rel=1e-12)

def test_n_ba_cool_divergence():
    with pytest.raises(optotherm.physics.DivergenceError):
        optotherm.physics.n_ba_cool(0.0, OMEGA, KAPPA)

def test_n_ba_cool_blue_detuned(caplog):
    n = optotherm.physics.n_ba_cool(TWO_PI*700e3, OMEGA, KAPPA)
    assert (n < 0)
    assert 'Blue detuned' in caplog.text

# PURPOSE: probe back-action relative to the cooling beam
def test_n_ba_probe():
    probe = optotherm.physics.BeamSpec(18e-6, 0.0, role='probe')
    cool = optotherm.physics.BeamSpec(60e-6, -TWO_PI*700e3, role='cooling')
    n = optotherm.physics.n_ba_probe(probe, cool, OMEGA, KAPPA)
    assert n == pytest.approx(0.485040, rel=1e-4)
    # inversely proportional to the cooling power
    half = optotherm.physics.BeamSpec(30e-6, -TWO_PI*700e3, role='cooling')
    assert optotherm.physics.n_ba_probe(probe, half, OMEGA, KAPPA) == \
        pytest.approx(2.0*n, rel=1e-12)
    # no cooling light
    off = optotherm.physics.BeamSpec(0.0, -TWO_PI*700e3, role='cooling')
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.n_ba_probe(probe, off, OMEGA, KAPPA)

# PURPOSE: probe heating times damping does not depend on cooling power
def test_probe_heating_rate():
    probe = optotherm.physics.BeamSpec(18e-6, TWO_PI*20e3, role='probe')
    damping = TWO_PI*9.6281e7
    rate = optotherm.physics.probe_heating_rate(probe, -TWO_PI*700e3,
        damping, OMEGA, KAPPA)
    for power in (12e-6, 60e-6):
        cool = optotherm.physics.BeamSpec(power, -TWO_PI*700e3, role='cooling')
        n = optotherm.physics.n_ba_probe(probe, cool, OMEGA, KAPPA)
        assert n*damping*power == pytest.approx(rate, rel=1e-12)

# PURPOSE: high temperature thermal occupancy
def test_n_thermal():
    n = optotherm.physics.n_thermal(7.0, OMEGA)
    assert n == pytest.approx(394206.6, rel=1e-5)
    T = optotherm.physics.temperature_from_occupancy(n, OMEGA)
    assert T == pytest.approx(7.0, rel=1e-12)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.n_thermal(0.0, OMEGA)

def test_n_total():
    gamma_m = OMEGA/8.9e6
    budget = optotherm.physics.n_total(394206.6, gamma_m, 1000.0*gamma_m,
        0.578, 0.485)
    assert budget.n_th_residual == pytest.approx(394.2066, rel=1e-12)
    assert budget.n_total == pytest.approx(394.2066 + 0.578 + 0.485, rel=1e-12)
    assert set(budget.as_dict()) == {'n_th_residual', 'n_ba_cool',
        'n_ba_probe', 'n_total'}
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.n_total(394206.6, gamma_m, 0.5*gamma_m, 0.578, 0.485)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.OccupationBudget(-1.0, 0.0, 0.0, 0.0)

# PURPOSE: area-width product of a frequency fluctuation peak
def test_area_width_product():
    g0 = TWO_PI*31.0
    gamma_m = OMEGA/8.9e6
    n_th = optotherm.physics.n_thermal(7.0, OMEGA)
    # without optical damping the product is set by the bath alone
    product = optotherm.physics.area_width_product(g0, gamma_m, gamma_m,
        n_th, 0.0, 0.0)
    assert product == pytest.approx(2.0*g0**2*gamma_m*(n_th + 0.5), rel=1e-12)
    # area times width of the peak of an optically damped mode
    gamma_eff = TWO_PI*5777.0
    budget = optotherm.physics.n_total(n_th, gamma_m, gamma_eff, 0.578, 0.485)
    area = 2.0*g0**2*(budget.n_total + 0.5)
    product = optotherm.physics.area_width_product(g0, gamma_m, gamma_eff,
        n_th, 0.578, 0.485)
    assert product == pytest.approx(area*gamma_eff, rel=1e-12)

# PURPOSE: predicted ratio between slope and offset of A Gamma
def test_slope_offset_ratio():
    gamma_m = OMEGA/8.9e6
    n_th = optotherm.physics.n_thermal(7.0, OMEGA)
    nbc, nbp = 0.578088, 0.485040
    gamma = gamma_m*np.array([3e4, 6e4, 9e4, 1.2e5, 1.5e5])
    y = np.array([optotherm.physics.area_width_product(1.0, gamma_m, g,
        n_th, nbc, nbp) for g in gamma])
    line = optotherm.fit.fit_weighted_polynomial(gamma, y, 1e-3*y)
    ratio, _ = line.slope_offset_ratio()
    assert ratio == pytest.approx((nbc + nbp + 0.5)/(n_th*gamma_m), rel=1e-9)

# PURPOSE: sideband asymmetry and occupancy
def test_sideband_ratio():
    assert optotherm.physics.sideband_ratio_from_n(4.0) == pytest.approx(1.25)
    assert optotherm.physics.n_from_ratio(1.25) == pytest.approx(4.0)
    for r in (1.0, 0.9, np.inf, np.nan):
        with pytest.raises(optotherm.physics.NonPhysicalRatioError):
            optotherm.physics.n_from_ratio(r)
    with pytest.raises(optotherm.physics.NonPhysicalRatioError):
        optotherm.physics.sideband_ratio_from_n(0.0)

# PURPOSE: cavity filtering of the motional sidebands
def test_cavity_filter_ratio():
    omega = TWO_PI*370.1e3
    assert optotherm.physics.cavity_filter_ratio(0.0, omega, KAPPA) == \
        pytest.approx(1.0, rel=1e-15)
    R = optotherm.physics.cavity_filter_ratio(TWO_PI*30e3, omega, KAPPA)
    assert R == pytest.approx(1.0733, rel=1e-4)
    # filtering reverses with the sign of the detuning
    assert optotherm.physics.cavity_filter_ratio(-TWO_PI*30e3, omega, KAPPA) \
        == pytest.approx(1.0/R, rel=1e-12)

def test_cavity_filter_slope():
    omega = TWO_PI*370.1e3
    delta = TWO_PI*np.array([-200e3, -30e3, 0.0, 30e3, 200e3])
    h = TWO_PI*1.0
    numerical = (optotherm.physics.cavity_filter_ratio(delta + h, omega, KAPPA) -
        optotherm.physics.cavity_filter_ratio(delta - h, omega, KAPPA))/(2.0*h)
    analytic = optotherm.physics.cavity_filter_slope(delta, omega, KAPPA)
    assert np.allclose(analytic, numerical, rtol=1e-6)

# PURPOSE: detuning recovered from the filter ratio of one mode
@pytest.mark.parametrize("detuning", [-200e3, -30e3, 0.0, 7e3, 30e3, 200e3])
def test_detuning_from_ratio(detuning):
    omega = TWO_PI*370.16e3
    R = optotherm.physics.cavity_filter_ratio(TWO_PI*detuning, omega, KAPPA)
    delta = optotherm.physics.detuning_from_ratio(R, omega, KAPPA)
    assert delta/TWO_PI == pytest.approx(detuning, abs=1e-6)
    # carried over to a mode shifted by the optical spring
    shifted = omega - TWO_PI*2e3
    expected = optotherm.physics.cavity_filter_ratio(TWO_PI*detuning, shifted,
        KAPPA)
    assert optotherm.physics.cavity_filter_ratio(delta, shifted, KAPPA) == \
        pytest.approx(expected, rel=1e-12)

def test_detuning_from_ratio_errors():
    omega = TWO_PI*370.16e3
    # beyond the largest ratio of the filter at this frequency
    with pytest.raises(optotherm.physics.NonPhysicalRatioError):
        optotherm.physics.detuning_from_ratio(3.0, omega, KAPPA)
    for r in (0.0, -1.0, np.inf, np.nan):
        with pytest.raises(optotherm.physics.NonPhysicalRatioError):
            optotherm.physics.detuning_from_ratio(r, omega, KAPPA)

# PURPOSE: drum modes of a clamped circular membrane
@pytest.mark.parametrize("m, n, root", [(0, 1, 2.404826), (1, 1, 3.831706),
    (2, 1, 5.135622), (0, 2, 5.520078), (1, 2, 7.015587)])
def test_bessel_root(m, n, root):
    assert optotherm.physics.bessel_root(m, n) == pytest.approx(root, abs=1e-6)

def test_mode_frequency():
    membrane = optotherm.physics.MembraneSpec(96.6e3, spot_r=0.3)
    expected = dict([((0, 1), 232.3e3), ((1, 1), 370.1e3), ((2, 1), 496.1e3),
        ((0, 2), 533.2e3), ((1, 2), 677.7e3)])
    for (m, n), f in expected.items():
        assert optotherm.physics.mode_frequency(membrane, m, n) == \
            pytest.approx(f, abs=100.0)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.bessel_root(1, 0)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.MembraneSpec(96.6e3, spot_r=1.5)

def test_membrane_f0():
    f0 = optotherm.physics.membrane_f0(1e9, 3000.0, 0.5e-3)
    assert f0 == pytest.approx(np.sqrt(1e9/3000.0)/(np.pi*0.5e-3), rel=1e-12)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.membrane_f0(-1e9, 3000.0, 0.5e-3)

# PURPOSE: cavity response and drum mode shapes
def test_lorentzian_response():
    assert optotherm.physics.lorentzian_response(0.0, KAPPA) == \
        pytest.approx(4.0/KAPPA**2)
    L = optotherm.physics.lorentzian_response(np.array([-OMEGA, OMEGA]), KAPPA)
    assert L[0] == L[1]
    # half maximum at half the linewidth
    assert optotherm.physics.lorentzian_response(KAPPA/2.0, KAPPA) == \
        pytest.approx(2.0/KAPPA**2)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.lorentzian_response(0.0, 0.0)

def test_mode_shape():
    assert optotherm.physics.mode_shape(0, 1, 'cos', 0.0, 1.0) == \
        pytest.approx(1.0)
    # clamped edge and nodal line of the sine twin
    r = np.linspace(0.0, 1.0, 5)
    shape = optotherm.physics.mode_shape(2, 1, 'cos', r, 0.4)
    assert shape.shape == (5,)
    assert shape[-1] == pytest.approx(0.0, abs=1e-12)
    assert optotherm.physics.mode_shape(1, 2, 'sin', 0.5, 0.0) == \
        pytest.approx(0.0, abs=1e-15)
    # twins are rotated by a quarter period of the azimuthal pattern
    cos = optotherm.physics.mode_shape(1, 1, 'cos', 0.3, 0.0)
    sin = optotherm.physics.mode_shape(1, 1, 'sin', 0.3, np.pi/2.0)
    assert cos == pytest.approx(sin, rel=1e-12)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.mode_shape(1, 1, 'cos', 1.5, 0.0)

def test_mode_coupling_weight():
    # axisymmetric modes are maximal at the center
    assert optotherm.physics.mode_coupling_weight(0, 1, 'cos', 0.0, 0.0) == \
        pytest.approx(1.0)
    # the sine twin has a nodal line through theta = 0
    assert optotherm.physics.mode_coupling_weight(1, 1, 'sin', 0.3, 0.0) == \
        pytest.approx(0.0, abs=1e-15)
    # every weight lies within [0,1]
    for m in range(4):
        for n in range(1, 4):
            for r in np.linspace(0.0, 1.0, 11):
                w = optotherm.physics.mode_coupling_weight(m, n, 'cos', r, 0.2)
                assert (0.0 <= w <= 1.0)
    # weight vanishes at the clamped edge
    assert optotherm.physics.mode_coupling_weight(1, 1, 'cos', 1.0, 0.0) == \
        pytest.approx(0.0, abs=1e-12)

# PURPOSE: mechanical mode validation
def test_mechanical_mode():
    mode = optotherm.physics.MechanicalMode.from_frequency(1, 1, 'cos',
        370.1e3, q_factor=8.9e6)
    assert mode.gamma_m/TWO_PI == pytest.approx(0.041584, rel=1e-4)
    assert mode.twin == optotherm.physics.Twin.COS
    mode = optotherm.physics.MechanicalMode.from_frequency(0, 1, 'cos',
        232.3e3, linewidth=40.0, coupling_weight=0.02)
    assert mode.q_factor == pytest.approx(232.3e3/40.0)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.MechanicalMode(1, 1, 'cos', OMEGA, 1.0, 10.0)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.MechanicalMode.from_frequency(1, 1, 'cos', 370.1e3,
            q_factor=8.9e6, coupling_weight=1.5)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.MechanicalMode.from_frequency(1, 1, 'cos', 370.1e3)
    with pytest.raises(ValueError):
        optotherm.physics.MechanicalMode.from_frequency(1, 1, 'tan', 370.1e3,
            q_factor=8.9e6)

def test_beam_spec():
    beam = optotherm.physics.BeamSpec(60e-6, -TWO_PI*700e3, role='cooling')
    assert beam.role == optotherm.physics.BeamRole.COOLING
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.BeamSpec(-1e-6, 0.0)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        optotherm.physics.CavitySpec(0.0)

# PURPOSE: displacement fluctuations
def test_zero_point_fluctuations():
    m_eff = 1e-12
    x = optotherm.physics.x_zpf(m_eff, OMEGA)
    assert x**2 == pytest.approx(optotherm.physics.HBAR/(2.0*m_eff*OMEGA))
    assert optotherm.physics.displacement_variance(m_eff, OMEGA, 0.0) == \
        pytest.approx(x**2)
    # the classical area-width product at vanishing back-action
    gamma_m = OMEGA/8.9e6
    n_th = optotherm.physics.n_thermal(7.0, OMEGA)
    area = optotherm.physics.displacement_variance(m_eff, OMEGA, n_th)
    assert area*gamma_m == pytest.approx(optotherm.physics.classical_area_width(
        7.0, m_eff, OMEGA, 8.9e6), rel=1e-5)
    G = 1e16
    assert optotherm.physics.g0_from_pull(G, x) == pytest.approx(G*x)
