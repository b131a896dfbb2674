#!/usr/bin/env python
u"""
synth.py
Written by the optotherm developers (10/2026)
Synthesizes homodyne and heterodyne spectra of an optically cooled membrane
    from a ground-truth scenario

Homodyne peaks are calibrated in cavity frequency fluctuations with an area
    of 2 (g0/2pi)^2 (n+1/2) Hz^2.  Heterodyne sidebands appear at
    f_m +/- delta_lo/2pi with Stokes (higher frequency) area proportional to
    (n+1) L(delta_probe-Omega_m) and anti-Stokes area proportional to
    n L(delta_probe+Omega_m)

PYTHON DEPENDENCIES:
    numpy: Scientific Computing Tools For Python
        https://numpy.org

PROGRAM DEPENDENCIES:
    physics.py: closed-form optomechanics relations
    spectrum.py: spectra on uniform frequency grids
    utilities.py: thread count for concurrent synthesis

UPDATE HISTORY:
    Updated 10/2026: added heating and extra laser noise injections
    Updated 09/2026: per-window random streams keyed by step and window
    Written 08/2026
"""
from __future__ import annotations

import logging
import dataclasses
import concurrent.futures
import numpy as np
import optotherm.physics
import optotherm.utilities
from optotherm.spectrum import Spectrum, lorentzian_peak

# random stream families
HOMODYNE_STREAM = 0
HETERODYNE_STREAM = 1

@dataclasses.dataclass(frozen=True)
class SynthMode:
    """
    Mechanical mode of a scenario

    Parameters
    ----------
    label: str
        name of the mode
    mode: obj
        :class:`optotherm.physics.MechanicalMode`
    role: str
        ``'light'``, ``'heavy'`` or ``'auxiliary'``
    occupancy: float or NoneType, default None
        fixed occupancy replacing the occupancy budget
    """
    label: str
    mode: optotherm.physics.MechanicalMode
    role: str = 'auxiliary'
    occupancy: float | None = None

    def __post_init__(self):
        if self.role not in ('light', 'heavy', 'auxiliary'):
            raise optotherm.physics.InvalidParameterError(
                f'unknown mode role {self.role!r}')
        if (self.occupancy is not None) and not (self.occupancy > 0):
            raise optotherm.physics.InvalidParameterError(
                'fixed occupancy must be positive')

    @property
    def frequency(self):
        """unperturbed mode frequency (Hz)"""
        return self.mode.omega_m/optotherm.physics.TWO_PI

@dataclasses.dataclass(frozen=True)
class FrequencyGrid:
    """uniform grid of ``bins`` frequencies from ``f_start`` to ``f_stop``"""
    f_start: float
    f_stop: float
    bins: int

    def __post_init__(self):
        if not (self.f_stop > self.f_start) or (self.bins < 2):
            raise optotherm.physics.InvalidParameterError(
                'frequency grid needs f_stop > f_start and >= 2 bins')

    @property
    def f_step(self):
        return (self.f_stop - self.f_start)/(self.bins - 1)

    @property
    def frequencies(self):
        return self.f_start + self.f_step*np.arange(self.bins)

@dataclasses.dataclass(frozen=True)
class Background:
    """linear spectral floor ``offset + slope*(f - f_start)``"""
    offset: float = 0.0
    slope: float = 0.0

    def evaluate(self, grid):
        return self.offset + self.slope*(grid.frequencies - grid.f_start)

@dataclasses.dataclass(frozen=True)
class SpuriousPeak:
    """electronic pickup peak with height in PSD units and width in Hz"""
    frequency: float
    height: float
    width: float

@dataclasses.dataclass(frozen=True)
class CalibrationTone:
    """frequency modulation tone with peak deviation ``depth`` (Hz)"""
    frequency: float
    depth: float

    @property
    def area(self):
        """variance of the modulation (Hz^2)"""
        return 0.5*self.depth**2

@dataclasses.dataclass(frozen=True)
class ModeState:
    """ground-truth state of a mode at one cooling power"""
    label: str
    omega: float
    gamma_eff: float
    occupancy: float
    t_bath: float
    budget: optotherm.physics.OccupationBudget | None = None
    extra_occupancy: float = 0.0

    @property
    def frequency(self):
        return self.omega/optotherm.physics.TWO_PI

    @property
    def linewidth(self):
        return self.gamma_eff/optotherm.physics.TWO_PI

@dataclasses.dataclass(frozen=True)
class SynthScenario:
    """
    Ground truth for a cooling run

    Parameters
    ----------
    cavity: obj
        :class:`optotherm.physics.CavitySpec`
    modes: tuple
        :class:`SynthMode` objects
    probe: obj
        probe :class:`optotherm.physics.BeamSpec` with nominal detuning
    cool_detuning: float
        cooling beam detuning (rad/s)
    power_schedule: tuple
        cooling power of each step (W)
    delta_lo: float
        local oscillator offset (rad/s)
    probe_drift: tuple, default ()
        linear and quadratic drift coefficients of the probe detuning
        (rad/s^2, rad/s^3)
    bath_temperature: float, default 7.0
        bath temperature without cooling light (K)
    optical_damping: float, default 0.0
        optical damping per unit cooling power of a fully coupled mode (rad/s/W)
    optical_spring: float, default 0.0
        red shift per unit cooling power of a fully coupled mode (rad/s/W)
    heating_slope: float, default 0.0
        bath temperature increase per unit cooling power (K/W)
    extra_noise_fraction: float, default 0.0
        fraction of the light mode area from extra laser noise at maximum power
    """
    cavity: optotherm.physics.CavitySpec
    modes: tuple
    probe: optotherm.physics.BeamSpec
    cool_detuning: float
    power_schedule: tuple
    delta_lo: float
    probe_drift: tuple = ()
    bath_temperature: float = 7.0
    optical_damping: float = 0.0
    optical_spring: float = 0.0
    heating_slope: float = 0.0
    extra_noise_fraction: float = 0.0
    homodyne_gain: float = 1.0
    heterodyne_gain: float = 1.0
    homodyne_grid: FrequencyGrid = FrequencyGrid(330e3, 410e3, 32768)
    heterodyne_grid: FrequencyGrid = FrequencyGrid(220e3, 700e3, 65536)
    homodyne_background: Background = Background()
    heterodyne_background: Background = Background()
    spurious_peaks: tuple = ()
    calibration_tone: CalibrationTone | None = None
    averaging_count: int = 10
    window_count: int = 10
    window_duration: float = 10.0
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'modes', tuple(self.modes))
        object.__setattr__(self, 'power_schedule', tuple(self.power_schedule))
        object.__setattr__(self, 'probe_drift', tuple(self.probe_drift))
        object.__setattr__(self, 'spurious_peaks', tuple(self.spurious_peaks))
        if not self.power_schedule:
            raise optotherm.physics.InvalidParameterError(
                'power schedule is empty')
        if any(p < 0 for p in self.power_schedule):
            raise optotherm.physics.InvalidParameterError(
                'cooling powers must be >= 0')
        if not (self.delta_lo > 0):
            raise optotherm.physics.InvalidParameterError(
                'local oscillator offset must be positive')
        if (len(self.probe_drift) > 2):
            raise optotherm.physics.InvalidParameterError(
                'probe drift polynomial order must be <= 2')
        if (self.averaging_count < 1):
            raise optotherm.physics.InvalidParameterError(
                'averaging count must be >= 1')
        if (self.window_count < 1) or not (self.window_duration > 0):
            raise optotherm.physics.InvalidParameterError(
                'need >= 1 window of positive duration')
        if (self.optical_damping < 0) or (self.optical_spring < 0):
            raise optotherm.physics.InvalidParameterError(
                'optical damping and spring coefficients must be >= 0')
        if not (0 <= self.extra_noise_fraction < 1):
            raise optotherm.physics.InvalidParameterError(
                'extra noise fraction must be within [0,1)')
        if (sum(m.role == 'light' for m in self.modes) > 1):
            raise optotherm.physics.InvalidParameterError(
                'at most one light mode')
        # sidebands of distinct drum modes must not overlap
        for i, a in enumerate(self.modes):
            for b in self.modes[i+1:]:
                if ((a.mode.m, a.mode.n) == (b.mode.m, b.mode.n)):
                    continue
                if abs(a.mode.omega_m - b.mode.omega_m) <= 2.0*self.delta_lo:
                    raise optotherm.physics.InvalidParameterError(
                        f'modes {a.label} and {b.label} closer than 2 delta_lo')

    @property
    def n_steps(self):
        return len(self.power_schedule)

    @property
    def light(self):
        """the strongly coupled mode"""
        for m in self.modes:
            if (m.role == 'light'):
                return m
        return None

    def cool(self, step):
        """cooling :class:`optotherm.physics.BeamSpec` of a power step"""
        self._check_step(step)
        return optotherm.physics.BeamSpec(self.power_schedule[step],
            self.cool_detuning, role='cooling')

    def window_start(self, step, window_index):
        """start time of an acquisition window (s)"""
        self._check_window(step, window_index)
        return (step*self.window_count + window_index)*self.window_duration

    def window_midtime(self, step, window_index):
        return self.window_start(step, window_index) + 0.5*self.window_duration

    def delta_probe(self, t):
        """probe detuning at time ``t`` (rad/s)"""
        coefficients = (self.probe.detuning,) + self.probe_drift
        return float(np.polynomial.polynomial.polyval(t, coefficients))

    def bath(self, step):
        """bath temperature including laser heating (K)"""
        return self.bath_temperature + self.heating_slope*self.power_schedule[step]

    def _check_step(self, step):
        if not (0 <= step < self.n_steps):
            raise IndexError(f'power step {step} outside of the schedule')

    def _check_window(self, step, window_index):
        self._check_step(step)
        if not (0 <= window_index < self.window_count):
            raise IndexError(f'window {window_index} outside of the run')

    # PURPOSE: state of a mode at a given cooling power
    def mode_state(self, index, step):
        """
        Ground-truth frequency, linewidth and occupancy of a mode

        Parameters
        ----------
        index: int
            index of the mode
        step: int
            power step

        Returns
        -------
        state: obj
            :class:`ModeState`
        """
        self._check_step(step)
        sm = self.modes[index]
        mode = sm.mode
        power = self.power_schedule[step]
        w2 = mode.coupling_weight**2
        gamma_eff = mode.gamma_m + w2*self.optical_damping*power
        omega = mode.omega_m - w2*self.optical_spring*power
        t_bath = self.bath(step)
        if sm.occupancy is not None:
            return ModeState(sm.label, omega, gamma_eff, float(sm.occupancy),
                t_bath)
        budget = self._budget(mode, power, gamma_eff, t_bath)
        extra = 0.0
        if (sm.role == 'light') and (self.extra_noise_fraction > 0):
            extra = self._extra_noise_rate(index)*gamma_eff
        return ModeState(sm.label, omega, gamma_eff, budget.n_total + extra,
            t_bath, budget=budget, extra_occupancy=extra)

    def _budget(self, mode, power, gamma_eff, t_bath):
        kappa = self.cavity.kappa
        n_th = optotherm.physics.n_thermal(t_bath, mode.omega_m)
        w2 = mode.coupling_weight**2
        if (w2 == 0):
            nbc = nbp = 0.0
        elif (power > 0):
            cool = optotherm.physics.BeamSpec(power, self.cool_detuning,
                role='cooling')
            nbc = optotherm.physics.n_ba_cool(self.cool_detuning,
                mode.omega_m, kappa)
            nbp = optotherm.physics.n_ba_probe(self.probe, cool,
                mode.omega_m, kappa)
        else:
            # probe heating alone against the intrinsic damping
            nbc = 0.0
            rate = optotherm.physics.probe_heating_rate(self.probe,
                self.cool_detuning, w2*self.optical_damping,
                mode.omega_m, kappa)
            nbp = rate/mode.gamma_m
        return optotherm.physics.n_total(n_th, mode.gamma_m, gamma_eff,
            nbc, nbp)

    def _extra_noise_rate(self, index):
        # occupancy per unit linewidth giving the configured area fraction
        step = int(np.argmax(self.power_schedule))
        sm = self.modes[index]
        power = self.power_schedule[step]
        gamma_eff = sm.mode.gamma_m + \
            sm.mode.coupling_weight**2*self.optical_damping*power
        n0 = self._budget(sm.mode, power, gamma_eff, self.bath(step)).n_total
        q = self.extra_noise_fraction
        return q*(n0 + 0.5)/((1.0 - q)*gamma_eff)

# PURPOSE: linear background with spurious peaks
def _floor(scenario, grid, background):
    f = grid.frequencies
    values = background.evaluate(grid)
    for peak in scenario.spurious_peaks:
        area = 0.5*np.pi*peak.height*peak.width
        values = values + lorentzian_peak(f, peak.frequency, peak.width, area)
    return values

# PURPOSE: synthesize a noiseless homodyne spectrum
def synth_homodyne(scenario, step):
    """
    Noiseless homodyne spectrum of a power step

    Parameters
    ----------
    scenario: obj
        :class:`SynthScenario`
    step: int
        index of the power schedule

    Returns
    -------
    spectrum: obj
        :class:`optotherm.spectrum.Spectrum`
    """
    scenario._check_step(step)
    grid = scenario.homodyne_grid
    f = grid.frequencies
    values = _floor(scenario, grid, scenario.homodyne_background)
    for i, sm in enumerate(scenario.modes):
        state = scenario.mode_state(i, step)
        area = 2.0*(sm.mode.g0/optotherm.physics.TWO_PI)**2 * \
            (state.occupancy + 0.5)
        values = values + lorentzian_peak(f, state.frequency,
            state.linewidth, scenario.homodyne_gain*area)
    tone = scenario.calibration_tone
    if tone is not None:
        values = values + lorentzian_peak(f, tone.frequency,
            2.0*grid.f_step, scenario.homodyne_gain*tone.area)
    units = 'frequency' if (scenario.homodyne_gain == 1.0) else 'raw'
    metadata = dict(step=step, power_cool_w=scenario.power_schedule[step],
        t_start_s=scenario.window_start(step, 0))
    return Spectrum(grid.f_start, grid.f_step, values, kind='homodyne',
        units=units, averaging_count=scenario.averaging_count,
        window_index=0,
        window_duration=scenario.window_count*scenario.window_duration,
        metadata=metadata)

# PURPOSE: synthesize a noiseless heterodyne spectrum
def synth_heterodyne(scenario, step, window_index):
    """
    Noiseless heterodyne spectrum of an acquisition window

    Parameters
    ----------
    scenario: obj
        :class:`SynthScenario`
    step: int
        index of the power schedule
    window_index: int
        index of the window within the step

    Returns
    -------
    spectrum: obj
        :class:`optotherm.spectrum.Spectrum`
    """
    scenario._check_window(step, window_index)
    grid = scenario.heterodyne_grid
    f = grid.frequencies
    kappa = scenario.cavity.kappa
    delta = scenario.delta_probe(scenario.window_midtime(step, window_index))
    split = scenario.delta_lo/optotherm.physics.TWO_PI
    # cavity gains normalized to unity on resonance
    norm = (0.5*kappa)**2
    values = _floor(scenario, grid, scenario.heterodyne_background)
    for i, sm in enumerate(scenario.modes):
        state = scenario.mode_state(i, step)
        scale = scenario.heterodyne_gain*sm.mode.coupling_weight**2
        stokes = scale*(state.occupancy + 1.0)*norm* \
            optotherm.physics.lorentzian_response(delta - state.omega, kappa)
        antistokes = scale*state.occupancy*norm* \
            optotherm.physics.lorentzian_response(delta + state.omega, kappa)
        values = values + \
            lorentzian_peak(f, state.frequency + split, state.linewidth, stokes) + \
            lorentzian_peak(f, state.frequency - split, state.linewidth, antistokes)
    metadata = dict(step=step, power_cool_w=scenario.power_schedule[step],
        t_start_s=scenario.window_start(step, window_index))
    return Spectrum(grid.f_start, grid.f_step, values, kind='heterodyne',
        units='raw', averaging_count=scenario.averaging_count,
        window_index=window_index, window_duration=scenario.window_duration,
        metadata=metadata)

# PURPOSE: multiply each bin by averaged periodogram noise
def apply_measurement_noise(spectrum, rng_seed, stream_id):
    """
    Apply the statistics of an average of N periodograms

    Each bin is multiplied by an independent Gamma(N, 1/N) draw

    Parameters
    ----------
    spectrum: obj
        noiseless :class:`optotherm.spectrum.Spectrum`
    rng_seed: int
        seed of the run
    stream_id: int or tuple
        key of the random stream for this spectrum

    Returns
    -------
    spectrum: obj
        noisy copy of the input spectrum
    """
    N = spectrum.averaging_count
    if (N < 1):
        raise optotherm.physics.InvalidParameterError('averaging count must be >= 1')
    spawn_key = tuple(np.atleast_1d(stream_id).astype(int).tolist())
    sequence = np.random.SeedSequence(int(rng_seed), spawn_key=spawn_key)
    rng = np.random.default_rng(sequence)
    noise = rng.gamma(shape=N, scale=1.0/N, size=len(spectrum.values))
    return spectrum.replace(values=spectrum.values*noise)

@dataclasses.dataclass
class SeriesStep:
    """spectra acquired at one cooling power"""
    power: float
    homodyne: Spectrum
    heterodyne: list

    def __iter__(self):
        return iter((self.power, self.homodyne, self.heterodyne))

# PURPOSE: synthesize every spectrum of a cooling run
def cooling_series(scenario, noise=True, threads=None):
    """
    Homodyne and heterodyne spectra of every power step

    Parameters
    ----------
    scenario: obj
        :class:`SynthScenario`
    noise: bool, default True
        apply averaged periodogram noise
    threads: int or NoneType, default None
        worker threads (default from ``OPTOTHERM_THREADS``)

    Returns
    -------
    series: list
        :class:`SeriesStep` for each power
    """
    if not scenario.power_schedule:
        raise optotherm.physics.InvalidParameterError('power schedule is empty')
    threads = threads or optotherm.utilities.get_thread_count()
    def homodyne(step):
        spectrum = synth_homodyne(scenario, step)
        if noise:
            spectrum = apply_measurement_noise(spectrum, scenario.rng_seed,
                (HOMODYNE_STREAM, step))
        return spectrum
    def heterodyne(task):
        step, window = task
        spectrum = synth_heterodyne(scenario, step, window)
        if noise:
            spectrum = apply_measurement_noise(spectrum, scenario.rng_seed,
                (HETERODYNE_STREAM, step, window))
        return spectrum
    tasks = [(s, w) for s in range(scenario.n_steps)
        for w in range(scenario.window_count)]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        homodyne_spectra = list(pool.map(homodyne, range(scenario.n_steps)))
        heterodyne_spectra = list(pool.map(heterodyne, tasks))
    series = []
    for step, power in enumerate(scenario.power_schedule):
        windows = heterodyne_spectra[step*scenario.window_count:
            (step + 1)*scenario.window_count]
        series.append(SeriesStep(power, homodyne_spectra[step], windows))
        logging.info(f'Synthesized step {step:d} at {power*1e6:0.2f} uW')
    return series

# PURPOSE: ground-truth values of a scenario
def ground_truth(scenario):
    """
    Ground-truth occupancies, linewidths and detunings of a scenario

    Returns
    -------
    truth: dict
        JSON-ready values in Hz, K and W
    """
    steps = []
    kappa = scenario.cavity.kappa
    for step, power in enumerate(scenario.power_schedule):
        modes = {}
        for i, sm in enumerate(scenario.modes):
            state = scenario.mode_state(i, step)
            modes[sm.label] = dict(role=sm.role,
                frequency_hz=state.frequency,
                linewidth_hz=state.linewidth,
                occupancy=state.occupancy,
                extra_occupancy=state.extra_occupancy,
                budget=None if state.budget is None else state.budget.as_dict())
        windows = []
        for w in range(scenario.window_count):
            t_mid = scenario.window_midtime(step, w)
            delta = scenario.delta_probe(t_mid)
            entry = dict(window=w, t_mid_s=t_mid,
                delta_probe_hz=delta/optotherm.physics.TWO_PI)
            light = scenario.light
            if light is not None:
                state = scenario.mode_state(scenario.modes.index(light), step)
                entry['filter_ratio'] = float(optotherm.physics.cavity_filter_ratio(
                    delta, state.omega, kappa))
                entry['sideband_ratio'] = entry['filter_ratio'] * \
                    optotherm.physics.sideband_ratio_from_n(state.occupancy)
            windows.append(entry)
        steps.append(dict(step=step, power_cool_w=power,
            bath_temperature_k=scenario.bath(step), modes=modes,
            windows=windows))
    return dict(bath_temperature_k=scenario.bath_temperature,
        heating_k_per_w=scenario.heating_slope,
        extra_noise_fraction=scenario.extra_noise_fraction,
        g0_hz=None if scenario.light is None else
            scenario.light.mode.g0/optotherm.physics.TWO_PI,
        steps=steps)
