#!/usr/bin/env python
u"""
test_thermometry.py (10/2026)
"""
import pytest
import dataclasses
import numpy as np
import optotherm.fit
import optotherm.physics
import optotherm.spectrum
import optotherm.synth
import optotherm.thermometry
from optotherm.thermometry import PipelineError, RegisteredMode

TWO_PI = optotherm.physics.TWO_PI
# heterodyne grid resolving the narrow heavy twin sidebands
FINE_GRID = optotherm.synth.FrequencyGrid(350e3, 392e3, 84001)

def heterodyne_windows(scenario, step):
    return [optotherm.synth.synth_heterodyne(scenario, step, w)
        for w in range(scenario.window_count)]

@pytest.fixture(scope="module")
def multimode_run(make_scenario, make_config):
    """
    Returns a noiseless run with reference modes, its configuration and the
    heterodyne results of each power step
    """
    scenario = make_scenario(probe_detuning=30e3)
    config = make_config(scenario)
    results = [optotherm.thermometry.heterodyne_pipeline(
        heterodyne_windows(scenario, step), config)
        for step in range(scenario.n_steps)]
    return scenario, config, results

@pytest.fixture(scope="module")
def heavy_scenario(make_scenario):
    """Returns a single power step with a narrow heavy twin"""
    return make_scenario(heavy=True, references=False, probe_detuning=30e3,
        power_schedule=(60e-6,), heterodyne_grid=FINE_GRID)

@pytest.fixture(scope="module")
def twin_scenario(make_scenario):
    """
    Returns a red detuned readout with the heavy twin and the reference modes
    resolved on the default heterodyne grid
    """
    return make_scenario(heavy=True, heavy_weight=1e-5, heavy_linewidth=40.0,
        heavy_occupancy=1e11, probe_detuning=-30e3,
        power_schedule=(12e-6, 60e-6))

def twin_configs(scenario, make_config):
    # heavy twin sidebands masked clear of the light twin at low power
    replace = dict(heavy=dict(mask_width=150.0, sideband_span=300.0))
    return (make_config(scenario, replace=replace),
        make_config(scenario, replace=replace, correction='multimode'))

# PURPOSE: area-width analysis of noiseless homodyne spectra
def test_homodyne_pipeline(make_scenario, make_config):
    scenario = make_scenario()
    config = make_config(scenario)
    spectra = [(s.power, s.homodyne) for s in
        optotherm.synth.cooling_series(scenario, noise=False)]
    result = optotherm.thermometry.homodyne_pipeline(spectra, config)
    assert result.g0/TWO_PI == pytest.approx(31.0, rel=1e-6)
    assert result.scale == pytest.approx((TWO_PI*31.0)**2, rel=1e-6)
    assert len(result.steps) == scenario.n_steps
    for s in result.steps:
        truth = scenario.mode_state(0, s.step)
        assert s.occupancy == pytest.approx(truth.occupancy, rel=1e-4)
        assert s.gamma_eff == pytest.approx(truth.gamma_eff, rel=1e-6)
        assert s.area_width_model == pytest.approx(s.area_width, rel=1e-4)
    # no laser heating and no extra noise
    assert result.ratio == pytest.approx(result.predicted_ratio, rel=1e-6)
    assert abs(result.heating) < 1e-3
    assert abs(result.extra_noise_fraction) < 1e-3
    assert result.damping_line.coefficients[1] == \
        pytest.approx(scenario.optical_damping, rel=1e-4)
    assert set(result.model_comparison) == {'model', 'line', 'quadratic'}
    assert not result.excluded

def test_homodyne_pipeline_exclusions(make_scenario, make_config):
    scenario = make_scenario(references=False,
        power_schedule=(0.0, 12e-6, 24e-6, 36e-6))
    config = make_config(scenario)
    spectra = [(p, optotherm.synth.synth_homodyne(scenario, step))
        for step, p in enumerate(scenario.power_schedule)]
    result = optotherm.thermometry.homodyne_pipeline(spectra, config)
    assert result.excluded == {0: 'no cooling power'}
    assert [s.step for s in result.steps] == [1, 2, 3]
    assert any('step 0' in w for w in result.warnings)
    # too few usable steps
    with pytest.raises(PipelineError) as exc:
        optotherm.thermometry.homodyne_pipeline(spectra[:3], config)
    assert exc.value.reasons == {0: 'no cooling power'}

# PURPOSE: spectra in detector units calibrated with the tone
def test_homodyne_calibration_tone(make_scenario, make_config):
    tone = optotherm.synth.CalibrationTone(405e3, 10.0)
    scenario = make_scenario(references=False, homodyne_gain=3.0,
        calibration_tone=tone)
    config = make_config(scenario)
    assert config.calibration_tone == (405e3, 10.0)
    spectra = [(p, optotherm.synth.synth_homodyne(scenario, step))
        for step, p in enumerate(scenario.power_schedule)]
    calibrated, gain = optotherm.thermometry.calibrate_homodyne(spectra[0][1],
        config)
    assert gain == pytest.approx(3.0, rel=1e-4)
    assert calibrated.units == optotherm.spectrum.Units.FREQUENCY
    result = optotherm.thermometry.homodyne_pipeline(spectra, config)
    assert result.g0/TWO_PI == pytest.approx(31.0, rel=1e-3)
    # detector units without a tone
    config = dataclasses.replace(config, calibration_tone=None)
    with pytest.raises(PipelineError):
        optotherm.thermometry.homodyne_pipeline(spectra, config)

def noisy_homodyne(spectra, rng_seed):
    return [(p, optotherm.synth.apply_measurement_noise(spectrum, rng_seed,
        (optotherm.synth.HOMODYNE_STREAM, step)))
        for step, (p, spectrum) in enumerate(spectra)]

# PURPOSE: bath warmed by the cooling light
def test_homodyne_heating(make_scenario, make_config, seed):
    # 1.8 K warmer at the strongest cooling
    scenario = make_scenario(references=False, heating_slope=1.8/60e-6)
    config = make_config(scenario)
    spectra = [(p, optotherm.synth.synth_homodyne(scenario, step))
        for step, p in enumerate(scenario.power_schedule)]
    result = optotherm.thermometry.homodyne_pipeline(spectra, config)
    assert result.heating == pytest.approx(1.8, rel=1e-3)
    assert (result.ratio > result.predicted_ratio)
    for s in range(seed, seed + 3):
        result = optotherm.thermometry.homodyne_pipeline(
            noisy_homodyne(spectra, s), config)
        assert result.heating == pytest.approx(1.8, rel=0.1)

# PURPOSE: extra laser noise bending the area-width product
def test_homodyne_extra_noise(make_scenario, make_config, seed):
    scenario = make_scenario(references=False, extra_noise_fraction=0.13)
    config = make_config(scenario)
    spectra = [(p, optotherm.synth.synth_homodyne(scenario, step))
        for step, p in enumerate(scenario.power_schedule)]
    fraction = [optotherm.thermometry.homodyne_pipeline(
        noisy_homodyne(spectra, s), config).extra_noise_fraction
        for s in range(seed, seed + 100)]
    assert np.mean(fraction) == pytest.approx(0.13, abs=0.03)

# PURPOSE: quadratic through as many steps as coefficients
def test_homodyne_interpolating_quadratic(make_scenario, make_config):
    scenario = make_scenario(references=False,
        power_schedule=(12e-6, 36e-6, 60e-6))
    config = make_config(scenario)
    spectra = [(p, optotherm.synth.synth_homodyne(scenario, step))
        for step, p in enumerate(scenario.power_schedule)]
    result = optotherm.thermometry.homodyne_pipeline(spectra, config)
    assert result.quadratic.interpolates
    assert np.isnan(result.model_comparison['quadratic'])
    assert any('quadratic passes through all 3 steps' in w
        for w in result.warnings)

# PURPOSE: sideband asymmetry corrected with the fitted readout detuning
def test_heterodyne_multimode(multimode_run):
    scenario, config, results = multimode_run
    assert config.correction == 'multimode'
    for step, result in enumerate(results):
        truth = scenario.mode_state(0, step)
        assert result.step == step
        assert result.correction_method == 'multimode'
        assert result.n_accepted == scenario.window_count
        assert result.occupancy_mean == pytest.approx(truth.occupancy, rel=1e-6)
        assert result.occupancy_from_mean_ratio == \
            pytest.approx(truth.occupancy, rel=1e-6)
        assert result.gamma_eff == pytest.approx(truth.gamma_eff, rel=1e-6)
        for w in result.windows:
            assert abs(w.delta_probe - TWO_PI*30e3) < 1e-6*config.cavity.kappa
            assert w.correction == pytest.approx(
                optotherm.physics.cavity_filter_ratio(TWO_PI*30e3,
                truth.omega, config.cavity.kappa), rel=1e-6)
            assert w.raw_occupancy < w.occupancy
            assert not w.excluded
        assert result.raw_ratio_mean > result.ratio_mean
        assert result.detuning_track is not None

# PURPOSE: readout on the cavity resonance leaves the asymmetry unfiltered
def test_heterodyne_resonant_readout(make_scenario, make_config):
    scenario = make_scenario(power_schedule=(12e-6, 60e-6))
    config = make_config(scenario)
    for step in range(scenario.n_steps):
        truth = scenario.mode_state(0, step)
        result = optotherm.thermometry.heterodyne_pipeline(
            heterodyne_windows(scenario, step), config)
        assert result.occupancy_mean == pytest.approx(truth.occupancy, rel=1e-6)
        for w in result.windows:
            assert abs(w.delta_probe) < 1e-6*config.cavity.kappa
            assert w.correction == pytest.approx(1.0, rel=1e-6)

# PURPOSE: occupancies do not depend on the scale of the spectra
def test_heterodyne_scale_invariance(multimode_run):
    scenario, config, results = multimode_run
    step = scenario.n_steps - 1
    windows = [w.scaled(1e3) for w in heterodyne_windows(scenario, step)]
    result = optotherm.thermometry.heterodyne_pipeline(windows, config)
    assert result.occupancy_mean == \
        pytest.approx(results[step].occupancy_mean, rel=1e-8)
    assert result.ratio_mean == pytest.approx(results[step].ratio_mean, rel=1e-8)

# PURPOSE: every registered mode fitted against its neighbours
def test_fit_registered_modes(twin_scenario, make_config):
    config, _ = twin_configs(twin_scenario, make_config)
    spectrum = optotherm.synth.synth_heterodyne(twin_scenario, 0, 0)
    delta = twin_scenario.delta_probe(spectrum.t_mid)
    kappa = config.cavity.kappa
    fits = optotherm.thermometry.fit_registered_modes(spectrum, config)
    assert list(fits) == [m.label for m in config.modes]
    for index, sm in enumerate(twin_scenario.modes):
        truth = twin_scenario.mode_state(index, 0)
        expected = optotherm.physics.cavity_filter_ratio(delta, truth.omega,
            kappa)*(truth.occupancy + 1.0)/truth.occupancy
        fit = fits[sm.label]
        assert fit.ratio == pytest.approx(expected, rel=1e-7)
        assert fit.mean_center == pytest.approx(truth.frequency, abs=1e-3)
        assert fit.fwhm == pytest.approx(truth.linewidth, rel=1e-6)
    # failed fits are kept with their reason
    phantom = RegisteredMode('phantom', 'auxiliary', 450e3, sideband_span=5.0,
        mask_width=5.0)
    config = make_config(twin_scenario, extra=[phantom])
    fits = optotherm.thermometry.fit_registered_modes(spectrum, config)
    assert isinstance(fits['phantom'], optotherm.fit.FitError)
    assert isinstance(fits['light'], optotherm.fit.DoubletFit)

def test_fit_registered_modes_unsettled(twin_scenario, make_config,
    monkeypatch, caplog):
    config, _ = twin_configs(twin_scenario, make_config)
    spectrum = optotherm.synth.synth_heterodyne(twin_scenario, 0, 0)
    monkeypatch.setattr(optotherm.thermometry, 'NEIGHBOUR_ITERATIONS', 0)
    fits = optotherm.thermometry.fit_registered_modes(spectrum, config)
    assert 'not settled' in caplog.text
    assert all(isinstance(f, optotherm.fit.DoubletFit) for f in fits.values())

# PURPOSE: noisy windows at the occupancy of the strongest cooling
def test_heterodyne_noise(make_scenario, make_config, seed):
    scenario = make_scenario(power_schedule=(60e-6,), window_count=10)
    config = make_config(scenario)
    truth = scenario.mode_state(0, 0).occupancy
    assert truth == pytest.approx(3.9, abs=0.01)
    for s in range(seed, seed + 3):
        series = optotherm.synth.cooling_series(
            dataclasses.replace(scenario, rng_seed=s))
        result = optotherm.thermometry.heterodyne_pipeline(
            series[0].heterodyne, config)
        assert result.n_accepted == 10
        assert (0 < result.occupancy_std < 1.0)
        tolerance = 3.0*result.occupancy_std/np.sqrt(result.n_accepted)
        assert abs(result.occupancy_mean - truth) < tolerance

def test_correction_multimode_references(make_scenario, make_config):
    scenario = make_scenario(references=False)
    config = make_config(scenario)
    with pytest.raises(PipelineError):
        optotherm.thermometry.correction_multimode(
            heterodyne_windows(scenario, 0), config)

# PURPOSE: polynomial track of a drifting readout detuning
def test_detuning_track(make_scenario, make_config):
    scenario = make_scenario(probe_detuning=30e3, probe_drift=(TWO_PI*1.0,),
        power_schedule=(60e-6,), window_count=4)
    config = make_config(scenario)
    windows = heterodyne_windows(scenario, 0)
    corrections, track = optotherm.thermometry.correction_multimode(windows,
        config)
    assert track.order == 1
    assert track.coefficients[1]/TWO_PI == pytest.approx(1.0, rel=1e-2)
    for c, spectrum in zip(corrections, windows):
        expected = scenario.delta_probe(spectrum.t_mid)
        assert c.delta_probe/TWO_PI == pytest.approx(expected/TWO_PI, abs=5.0)
        assert not c.interpolated
        assert c.detuning.n_modes == 4
    # corrections from the track of the run
    config = dataclasses.replace(config, detuning_mode='track')
    corrections, track = optotherm.thermometry.correction_multimode(windows,
        config)
    for c in corrections:
        assert c.interpolated
        assert c.delta_probe == pytest.approx(float(track.evaluate(c.t_mid)))
    result = optotherm.thermometry.heterodyne_pipeline(windows, config)
    assert result.detuning_track.order == 1
    assert result.occupancy_mean == \
        pytest.approx(scenario.mode_state(0, 0).occupancy, rel=1e-3)

# PURPOSE: filter correction from the weakly coupled twin
def test_correction_heavy_twin(heavy_scenario, make_scenario, make_config):
    config = make_config(heavy_scenario,
        replace=dict(heavy=dict(sideband_span=50.0, mask_width=50.0)))
    spectrum = optotherm.synth.synth_heterodyne(heavy_scenario, 0, 0)
    light = heavy_scenario.mode_state(0, 0)
    heavy = heavy_scenario.mode_state(1, 0)
    kappa = config.cavity.kappa
    # heavy twin asymmetry (n+1)/n of 1e-5
    ratio, sigma, fit = optotherm.thermometry.correction_heavy_twin(spectrum,
        config)
    expected = optotherm.physics.cavity_filter_ratio(TWO_PI*30e3, heavy.omega,
        kappa)
    assert ratio == pytest.approx(expected, rel=2e-5)
    assert (sigma > 0)
    assert fit.mean_center == pytest.approx(370.16e3, abs=0.1)
    assert len(fit.window) == 2
    # carried over to the frequency of the light twin
    correction, sigma, _ = optotherm.thermometry.correction_heavy_twin(
        spectrum, config, light_omega=light.omega)
    expected = optotherm.physics.cavity_filter_ratio(TWO_PI*30e3, light.omega,
        kappa)
    assert correction == pytest.approx(expected, rel=2e-5)
    assert (sigma > 0)
    # no detuning gives the ratio of a cold heavy twin
    cold = make_scenario(heavy=True, references=False, probe_detuning=30e3,
        power_schedule=(60e-6,), heterodyne_grid=FINE_GRID,
        heavy_weight=0.02, heavy_occupancy=0.5)
    with pytest.raises(optotherm.fit.UnresolvableDoubletError,
        match='detuning'):
        optotherm.thermometry.correction_heavy_twin(
            optotherm.synth.synth_heterodyne(cold, 0, 0), config,
            light_omega=light.omega)

def test_heterodyne_heavy_twin(heavy_scenario, make_config):
    config = make_config(heavy_scenario,
        replace=dict(heavy=dict(sideband_span=50.0, mask_width=50.0)))
    assert config.correction == 'heavy-twin'
    n = heavy_scenario.mode_state(0, 0).occupancy
    result = optotherm.thermometry.heterodyne_pipeline(
        heterodyne_windows(heavy_scenario, 0), config)
    assert result.correction_method == 'heavy-twin'
    assert result.occupancy_mean == pytest.approx(n, rel=2e-4)
    assert result.detuning_track is None
    for w in result.windows:
        assert w.correction_method == 'heavy-twin'
        # the uncorrected asymmetry underestimates the occupancy
        assert w.raw_occupancy < 0.8*n
        assert not w.flags

# PURPOSE: both filter corrections applied to the same windows
def test_correction_methods(twin_scenario, make_config):
    configs = twin_configs(twin_scenario, make_config)
    for step in range(twin_scenario.n_steps):
        truth = twin_scenario.mode_state(0, step)
        windows = heterodyne_windows(twin_scenario, step)
        heavy, multimode = [optotherm.thermometry.heterodyne_pipeline(windows,
            config) for config in configs]
        assert heavy.correction_method == 'heavy-twin'
        assert multimode.correction_method == 'multimode'
        assert heavy.occupancy_mean == pytest.approx(truth.occupancy, rel=1e-6)
        assert multimode.occupancy_mean == \
            pytest.approx(truth.occupancy, rel=1e-6)
        assert heavy.occupancy_mean == \
            pytest.approx(multimode.occupancy_mean, rel=1e-3)
        # red detuned readout suppresses the Stokes sideband
        assert heavy.raw_ratio_mean < heavy.ratio_mean

# PURPOSE: corrections of noisy windows at the weakest cooling step
def test_correction_methods_noise(twin_scenario, make_config, seed):
    configs = twin_configs(twin_scenario, make_config)
    # averaging count resolving the narrow heavy twin ratio
    scenario = dataclasses.replace(twin_scenario, power_schedule=(12e-6,),
        window_count=10, averaging_count=10000)
    truth = scenario.mode_state(0, 0).occupancy
    assert truth == pytest.approx(17.1, abs=0.3)
    for s in range(seed, seed + 2):
        series = optotherm.synth.cooling_series(
            dataclasses.replace(scenario, rng_seed=s))
        heavy, multimode = [optotherm.thermometry.heterodyne_pipeline(
            series[0].heterodyne, config) for config in configs]
        sigma = []
        for result in (heavy, multimode):
            assert result.n_accepted == 10
            sigma.append(result.occupancy_std/np.sqrt(result.n_accepted))
            assert abs(result.occupancy_mean - truth) < 3.0*sigma[-1]
        assert abs(heavy.occupancy_mean - multimode.occupancy_mean) < \
            3.0*np.hypot(*sigma)

# PURPOSE: multimode correction where the heavy twin cannot be fitted
def test_heavy_twin_fallback(multimode_run, make_config):
    scenario, _, _ = multimode_run
    heavy = RegisteredMode('heavy', 'heavy', 370.16e3, sideband_span=5.0,
        mask_width=5.0)
    config = make_config(scenario, extra=[heavy], correction='heavy-twin')
    step = scenario.n_steps - 1
    result = optotherm.thermometry.heterodyne_pipeline(
        heterodyne_windows(scenario, step), config)
    assert result.occupancy_mean == \
        pytest.approx(scenario.mode_state(0, step).occupancy, rel=1e-6)
    assert len(result.warnings) == scenario.window_count
    for w in result.windows:
        assert 'heavy-twin fallback' in w.flags
        assert w.correction_method == 'multimode'
    assert result.detuning_track is not None

# PURPOSE: windows with a corrected ratio at or below 1
def test_heterodyne_all_excluded(make_scenario, make_config):
    # a cold and strongly coupled heavy twin overstates the filtering
    scenario = make_scenario(heavy=True, references=False,
        probe_detuning=30e3, power_schedule=(60e-6,),
        heterodyne_grid=FINE_GRID, heavy_weight=0.02, heavy_occupancy=1.5)
    config = make_config(scenario,
        replace=dict(heavy=dict(sideband_span=50.0, mask_width=50.0)))
    with pytest.raises(PipelineError) as exc:
        optotherm.thermometry.heterodyne_pipeline(
            heterodyne_windows(scenario, 0), config)
    assert set(exc.value.reasons) == {0, 1}
    assert all('corrected ratio' in r for r in exc.value.reasons.values())
    with pytest.raises(PipelineError):
        optotherm.thermometry.heterodyne_pipeline([], config)

# PURPOSE: cooling laser switched off for one power step
def test_heterodyne_without_cooling(make_scenario, make_config):
    scenario = make_scenario(power_schedule=(0.0, 12e-6, 36e-6, 60e-6))
    config = make_config(scenario)
    with pytest.raises(PipelineError) as exc:
        optotherm.thermometry.heterodyne_pipeline(
            heterodyne_windows(scenario, 0), config)
    assert set(exc.value.reasons) == {0, 1}
    assert all('frequency resolution' in r for r in exc.value.reasons.values())

def test_backaction_without_cooling(make_scenario, make_config):
    scenario = make_scenario(references=False, probe_detuning=30e3,
        power_schedule=(0.0, 12e-6, 36e-6, 60e-6))
    config = make_config(scenario)
    assert config.optical_damping == pytest.approx(scenario.optical_damping)
    for step, power in enumerate(scenario.power_schedule):
        budget = scenario.mode_state(0, step).budget
        nbc, nbp = config.backaction(power)
        assert nbc == pytest.approx(budget.n_ba_cool, rel=1e-12)
        assert nbp == pytest.approx(budget.n_ba_probe, rel=1e-12)
    assert config.backaction(0.0)[0] == 0.0
    # optical damping given with the call
    config = dataclasses.replace(config, optical_damping=None)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        config.backaction(0.0)
    nbc, nbp = config.backaction(0.0, optical_damping=scenario.optical_damping)
    assert nbp == pytest.approx(scenario.mode_state(0, 0).budget.n_ba_probe,
        rel=1e-12)
    with pytest.raises(optotherm.physics.InvalidParameterError):
        config.backaction(-1e-6)

# PURPOSE: bath temperature from the occupancies of a cooling run
def test_bath_temperature(multimode_run):
    scenario, config, results = multimode_run
    result = optotherm.thermometry.bath_temperature(results, config)
    assert result.temperature == pytest.approx(7.0, rel=1e-6)
    assert result.include_backaction
    assert result.model_comparison['with_backaction'] < \
        result.model_comparison['without_backaction']
    assert [p['step'] for p in result.points] == list(range(scenario.n_steps))
    # without the back-action terms the bath appears warmer
    hot = optotherm.thermometry.bath_temperature(results, config,
        include_backaction=False)
    assert hot.temperature > result.temperature
    # occupancy budget along the linewidth
    curve = result.budget_curve
    assert len(curve['gamma_eff']) == 101
    total = np.array(curve['thermal']) + np.array(curve['probe']) + \
        np.array(curve['cooling'])
    assert np.allclose(curve['total'], total)
    assert np.all(np.diff(curve['thermal']) < 0)

# PURPOSE: step without cooling light in the bath temperature fit
def test_bath_temperature_without_cooling(multimode_run):
    scenario, config, results = multimode_run
    dark = dataclasses.replace(scenario,
        power_schedule=(0.0,) + tuple(scenario.power_schedule))
    truth = dark.mode_state(0, 0)
    point = dataclasses.replace(results[0], power=0.0,
        gamma_eff=truth.gamma_eff, occupancy_mean=truth.occupancy)
    series = [point] + list(results)
    result = optotherm.thermometry.bath_temperature(series, config)
    assert result.temperature == pytest.approx(7.0, rel=1e-6)
    assert result.points[0]['power'] == 0.0
    # optical damping from the fitted linewidths
    config = dataclasses.replace(config, optical_damping=None)
    result = optotherm.thermometry.bath_temperature(series, config)
    assert result.temperature == pytest.approx(7.0, rel=1e-6)

# PURPOSE: bath temperature of a noisy cooling run
def test_bath_temperature_noise(make_scenario, make_config, seed):
    scenario = make_scenario(window_count=10, rng_seed=seed)
    config = make_config(scenario)
    results = [optotherm.thermometry.heterodyne_pipeline(s.heterodyne, config)
        for s in optotherm.synth.cooling_series(scenario)]
    result = optotherm.thermometry.bath_temperature(results, config)
    assert (0 < result.uncertainty < 0.6)
    assert abs(result.temperature - 7.0) < 3.0*result.uncertainty

def test_bath_temperature_errors(multimode_run, make_scenario, make_config):
    _, config, results = multimode_run
    with pytest.raises(PipelineError):
        optotherm.thermometry.bath_temperature(results[:2], config)
    # linewidths spanning less than a factor 3
    scenario = make_scenario(probe_detuning=30e3,
        power_schedule=(40e-6, 50e-6, 60e-6))
    config = make_config(scenario)
    series = [optotherm.thermometry.heterodyne_pipeline(
        heterodyne_windows(scenario, step), config)
        for step in range(scenario.n_steps)]
    with pytest.raises(PipelineError):
        optotherm.thermometry.bath_temperature(series, config)

def test_budget_curve(multimode_run):
    scenario, config, results = multimode_run
    n_th = optotherm.physics.n_thermal(7.0, config.light.omega_m)
    power = np.array([r.power for r in results])
    gamma = np.array([r.gamma_eff for r in results])
    damping = optotherm.fit.fit_weighted_polynomial(power, gamma, 1.0)
    curve = optotherm.thermometry.budget_curve(gamma, n_th, damping, config)
    for step in range(scenario.n_steps):
        truth = scenario.mode_state(0, step)
        assert curve['total'][step] == pytest.approx(truth.occupancy, rel=1e-3)
    # below the intrinsic linewidth
    curve = optotherm.thermometry.budget_curve([0.5*config.gamma_m], n_th,
        damping, config)
    assert not curve['gamma_eff']

# PURPOSE: registry validation
def test_config_validation(make_scenario, make_config):
    scenario = make_scenario()
    config = make_config(scenario)
    assert config.light.label == 'light'
    assert [m.label for m in config.references] == ['m01', 'm21', 'm02', 'm12']
    with pytest.raises(optotherm.physics.InvalidParameterError,
        match='duplicate'):
        make_config(scenario, extra=[RegisteredMode('m01', 'auxiliary', 300e3)])
    with pytest.raises(optotherm.physics.InvalidParameterError,
        match='light'):
        dataclasses.replace(config, modes=config.references)
    with pytest.raises(optotherm.physics.InvalidParameterError,
        match='overlap'):
        make_config(scenario, extra=[RegisteredMode('m21b', 'auxiliary', 500e3)])
    with pytest.raises(optotherm.physics.InvalidParameterError):
        dataclasses.replace(config, correction='heavy-twin')
    with pytest.raises(optotherm.physics.InvalidParameterError):
        dataclasses.replace(config, detuning_mode='spline')
    with pytest.raises(optotherm.physics.InvalidParameterError):
        RegisteredMode('m01', 'bright', 232.3e3)

def test_masks(make_scenario, make_config):
    scenario = make_scenario(heavy=True)
    config = make_config(scenario, masks=[(300e3, 301e3)])
    masks = config.masks_for(config.light, 'heterodyne')
    assert (300e3, 301e3) in masks
    # both sidebands of the heavy twin
    heavy = config.heavy
    for center in (heavy.frequency - 9e3, heavy.frequency + 9e3):
        expected = (center - heavy.mask_width, center + heavy.mask_width)
        assert any(np.allclose(m, expected) for m in masks)
    # the light twin is never masked
    for m in config.masks_for(heavy, 'homodyne'):
        assert not (m[0] <= config.light.frequency <= m[1])
