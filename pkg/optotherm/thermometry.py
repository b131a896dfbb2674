#!/usr/bin/env python
u"""
thermometry.py
Written by the optotherm developers (10/2026)
Phonon occupancy estimators for an optically cooled membrane mode

    homodyne_pipeline: regression of the area-width product of the light
        twin peak against its effective linewidth
    heterodyne_pipeline: motional sideband asymmetry of the light twin
        corrected for the cavity filtering of a detuned probe
    correction_heavy_twin: filter correction from the weakly coupled twin
    correction_multimode: filter correction from a probe detuning fitted to
        several weakly coupled modes, with a polynomial drift track
    fit_registered_modes: sideband doublet fits of every registered mode
        refitted against the sidebands of their neighbours
    bath_temperature: bath temperature from occupancies over a cooling run

PYTHON DEPENDENCIES:
    numpy: Scientific Computing Tools For Python
        https://numpy.org

PROGRAM DEPENDENCIES:
    physics.py: closed-form optomechanics relations
    fit.py: spectral, polynomial and detuning estimators
    spectrum.py: spectra on uniform frequency grids
    utilities.py: thread count for concurrent window fits

UPDATE HISTORY:
    Updated 10/2026: occupancy budget curve for the bath temperature fit
        tone calibration of spectra in detector units
        back-action of steps without cooling light in the bath temperature fit
        mode fits with the fitted neighbouring peaks as a fixed background
        heavy twin ratio transferred to the light twin frequency
    Updated 09/2026: per-run detuning track mode for the multimode correction
    Written 08/2026
"""
from __future__ import annotations

import logging
import dataclasses
import concurrent.futures
import numpy as np
import optotherm.fit
import optotherm.physics
import optotherm.utilities
from optotherm.spectrum import Units

CORRECTIONS = ('heavy-twin', 'multimode')
DETUNING_MODES = ('per-window', 'track')
ROLES = ('light', 'heavy', 'auxiliary')
# chi-square improvement required for a quadratic drift track
TRACK_ORDER_THRESHOLD = 4.0
# half-width of the range masked around the calibration tone (Hz)
TONE_MASK_WIDTH = 500.0
# refits of the registered modes against their fitted neighbours
NEIGHBOUR_ITERATIONS = 8
# relative change of the fitted sidebands between settled refits
NEIGHBOUR_TOLERANCE = 1e-9

class PipelineError(RuntimeError):
    """Pipeline could not produce a result"""
    def __init__(self, message, reasons=None):
        super().__init__(message)
        self.reasons = dict(reasons or {})

@dataclasses.dataclass(frozen=True)
class RegisteredMode:
    """
    Mode entry of the analysis registry

    Parameters
    ----------
    label: str
        name of the mode
    role: str
        ``'light'``, ``'heavy'`` or ``'auxiliary'``
    frequency: float
        unperturbed mode frequency (Hz)
    homodyne_window: tuple or NoneType, default None
        homodyne fit window (Hz)
    span: float or NoneType, default None
        extent of the heterodyne window beyond each sideband (Hz)
    sideband_span: float or NoneType, default None
        half-width of the sub-window around each sideband (Hz)
    mask_width: float, default 500.0
        half-width of the range masked around this mode in other fits (Hz)
    masks: tuple, default ()
        additional ranges (Hz) masked in fits of this mode
    """
    label: str
    role: str
    frequency: float
    homodyne_window: tuple | None = None
    span: float | None = None
    sideband_span: float | None = None
    mask_width: float = 500.0
    masks: tuple = ()

    def __post_init__(self):
        if self.role not in ROLES:
            raise optotherm.physics.InvalidParameterError(
                f'unknown mode role {self.role!r}')
        optotherm.physics._require_positive(frequency=self.frequency)

    @property
    def omega_m(self):
        return optotherm.physics.TWO_PI*self.frequency

@dataclasses.dataclass(frozen=True)
class ThermometryConfig:
    """
    Instrument parameters and mode registry of an analysis

    Parameters
    ----------
    cavity: obj
        :class:`optotherm.physics.CavitySpec`
    probe: obj
        probe :class:`optotherm.physics.BeamSpec`
    cool_detuning: float
        cooling beam detuning (rad/s)
    delta_lo: float
        local oscillator offset (rad/s)
    modes: tuple
        :class:`RegisteredMode` entries
    gamma_m: float
        intrinsic linewidth of the light twin from ring-down (rad/s)
    sensor_temperature: float
        bath temperature from the cryostat sensor (K)
    correction: str, default 'heavy-twin'
        ``'heavy-twin'`` or ``'multimode'``
    detuning_mode: str, default 'per-window'
        use the detuning of each window or the run drift track
    optical_damping: float or NoneType, default None
        optical damping of the light twin per unit cooling power (rad/s/W)
        for steps without cooling light
    """
    cavity: optotherm.physics.CavitySpec
    probe: optotherm.physics.BeamSpec
    cool_detuning: float
    delta_lo: float
    modes: tuple
    gamma_m: float
    sensor_temperature: float
    correction: str = 'heavy-twin'
    detuning_mode: str = 'per-window'
    window_duration: float = 10.0
    window_count: int = 10
    masks: tuple = ()
    calibration_tone: tuple | None = None
    threads: int | None = None
    optical_damping: float | None = None

    def __post_init__(self):
        object.__setattr__(self, 'modes', tuple(self.modes))
        object.__setattr__(self, 'masks', tuple(tuple(m) for m in self.masks))
        if self.correction not in CORRECTIONS:
            raise optotherm.physics.InvalidParameterError(
                f'unknown correction method {self.correction!r}')
        if self.detuning_mode not in DETUNING_MODES:
            raise optotherm.physics.InvalidParameterError(
                f'unknown detuning mode {self.detuning_mode!r}')
        optotherm.physics._require_positive(delta_lo=self.delta_lo,
            gamma_m=self.gamma_m, sensor_temperature=self.sensor_temperature)
        if (sum(m.role == 'light' for m in self.modes) != 1):
            raise optotherm.physics.InvalidParameterError(
                'registry needs exactly one light mode')
        labels = [m.label for m in self.modes]
        if (len(set(labels)) != len(labels)):
            raise optotherm.physics.InvalidParameterError('duplicate mode labels')
        if (self.correction == 'heavy-twin') and (self.heavy is None):
            raise optotherm.physics.InvalidParameterError(
                'heavy-twin correction needs a registered heavy mode')
        # heterodyne windows of the light and auxiliary modes are disjoint
        windows = sorted(self.heterodyne_window(m)[0] for m in self.modes
            if (m.role != 'heavy') and (m.sideband_span is None))
        for (lo1, hi1), (lo2, hi2) in zip(windows[:-1], windows[1:]):
            if (lo2 < hi1):
                raise optotherm.physics.InvalidParameterError(
                    'heterodyne fit windows overlap')
        homodyne = sorted(m.homodyne_window for m in self.modes
            if m.homodyne_window is not None)
        for (lo1, hi1), (lo2, hi2) in zip(homodyne[:-1], homodyne[1:]):
            if (lo2 < hi1):
                raise optotherm.physics.InvalidParameterError(
                    'homodyne fit windows overlap')

    @property
    def light(self):
        return next(m for m in self.modes if m.role == 'light')

    @property
    def heavy(self):
        return next((m for m in self.modes if m.role == 'heavy'), None)

    @property
    def references(self):
        """weakly coupled high occupancy modes used to infer the detuning"""
        return [m for m in self.modes if m.role in ('heavy', 'auxiliary')]

    @property
    def half_splitting(self):
        return self.delta_lo/optotherm.physics.TWO_PI

    def heterodyne_window(self, mode):
        """fit window (Hz) of a mode in heterodyne spectra"""
        s = self.half_splitting
        if mode.sideband_span is not None:
            w = mode.sideband_span
            return [(mode.frequency - s - w, mode.frequency - s + w),
                (mode.frequency + s - w, mode.frequency + s + w)]
        span = s if mode.span is None else mode.span
        return [(mode.frequency - s - span, mode.frequency + s + span)]

    def masks_for(self, mode, kind):
        """
        Ranges (Hz) excluded when fitting ``mode`` in a spectrum of ``kind``

        Weakly coupled modes are masked around their peaks.  The light twin
        is too broad to be masked and is never masked in other fits
        """
        masks = list(self.masks) + list(mode.masks)
        for other in self.modes:
            if (other is mode) or (other.role == 'light'):
                continue
            w = other.mask_width
            if (kind == 'heterodyne'):
                for center in (other.frequency - self.half_splitting,
                    other.frequency + self.half_splitting):
                    masks.append((center - w, center + w))
            else:
                masks.append((other.frequency - w, other.frequency + w))
        if (kind == 'homodyne') and (self.calibration_tone is not None):
            f, _ = self.calibration_tone
            masks.append((f - TONE_MASK_WIDTH, f + TONE_MASK_WIDTH))
        return masks

    def cool(self, power):
        return optotherm.physics.BeamSpec(power, self.cool_detuning,
            role='cooling')

    # PURPOSE: back-action occupancies of the light twin
    def backaction(self, power, optical_damping=None):
        """
        Cooling and probe back-action occupancies at a cooling power

        Without cooling light the probe heats against the intrinsic damping
        alone, which needs the optical damping per unit power given here or
        in the configuration
        """
        omega = self.light.omega_m
        kappa = self.cavity.kappa
        if (power < 0):
            raise optotherm.physics.InvalidParameterError(
                f'cooling power must be >= 0 (got {power!r})')
        if (power > 0):
            nbc = optotherm.physics.n_ba_cool(self.cool_detuning, omega, kappa)
            nbp = optotherm.physics.n_ba_probe(self.probe, self.cool(power),
                omega, kappa)
            return nbc, nbp
        damping = self.optical_damping if (optical_damping is None) \
            else optical_damping
        if damping is None:
            raise optotherm.physics.InvalidParameterError('a step without '
                'cooling light needs the optical damping per unit power')
        rate = optotherm.physics.probe_heating_rate(self.probe,
            self.cool_detuning, damping, omega, kappa)
        return 0.0, rate/self.gamma_m

    def map(self, func, items):
        """apply ``func`` to each item on a thread pool preserving order"""
        threads = self.threads or optotherm.utilities.get_thread_count()
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, items))

@dataclasses.dataclass
class HomodyneStep:
    """area-width measurement of the light twin at one cooling power"""
    step: int
    power: float
    gamma_eff: float
    gamma_eff_sigma: float
    area_width: float
    area_width_sigma: float
    area_width_model: float = np.nan
    occupancy: float = np.nan
    occupancy_sigma: float = np.nan
    budget: optotherm.physics.OccupationBudget | None = None
    fit: optotherm.fit.LorentzianFit | None = None
    calibration_gain: float = 1.0

@dataclasses.dataclass
class HomodyneResult:
    """
    Results of the homodyne area-width analysis

    Parameters
    ----------
    steps: list
        :class:`HomodyneStep` for each usable power step
    scale: float
        fitted overall scale g0^2 of the occupancy model (rad^2/s^2)
    g0: float
        vacuum optomechanical coupling (rad/s)
    line: obj
        free line :class:`optotherm.fit.LineFit` of A Gamma against Gamma
    predicted_line: obj
        line through the occupancy model values
    quadratic: obj
        free quadratic :class:`optotherm.fit.LineFit`
    heating: float
        bath temperature increase at maximum power implied by the excess
        slope-to-offset ratio (K)
    extra_noise_fraction: float
        quadratic term as a fraction of the area at maximum power
    damping_line: obj
        effective linewidth against cooling power
    """
    steps: list
    scale: float
    scale_sigma: float
    g0: float
    g0_sigma: float
    model_chi_square: float
    line: optotherm.fit.LineFit
    predicted_line: optotherm.fit.LineFit
    ratio: float
    ratio_sigma: float
    predicted_ratio: float
    heating: float
    heating_sigma: float
    quadratic: optotherm.fit.LineFit
    extra_noise_fraction: float
    extra_noise_sigma: float
    damping_line: optotherm.fit.LineFit
    model_comparison: dict
    excluded: dict = dataclasses.field(default_factory=dict)
    warnings: list = dataclasses.field(default_factory=list)

@dataclasses.dataclass
class WindowEstimate:
    """sideband asymmetry of the light twin in one acquisition window"""
    window_index: int
    t_mid: float
    ratio_light: float = np.nan
    ratio_light_sigma: float = np.nan
    correction: float = np.nan
    correction_sigma: float = np.nan
    correction_method: str = ''
    delta_probe: float = np.nan
    delta_probe_sigma: float = np.nan
    ratio: float = np.nan
    ratio_sigma: float = np.nan
    occupancy: float = np.nan
    occupancy_sigma: float = np.nan
    raw_occupancy: float = np.nan
    gamma_eff: float = np.nan
    omega: float = np.nan
    excluded: bool = False
    reason: str = ''
    flags: list = dataclasses.field(default_factory=list)
    fit: optotherm.fit.DoubletFit | None = None

@dataclasses.dataclass
class MultimodeCorrection:
    """filter correction of one window from the fitted probe detuning"""
    window_index: int
    t_mid: float
    delta_probe: float
    delta_probe_sigma: float
    correction: float
    correction_sigma: float
    detuning: optotherm.fit.DetuningFit | None = None
    interpolated: bool = False
    reason: str = ''

@dataclasses.dataclass
class HeterodyneResult:
    """
    Results of the sideband asymmetry analysis of one power step

    Parameters
    ----------
    windows: list
        :class:`WindowEstimate` sorted by window index
    occupancy_mean: float
        mean of the accepted per-window occupancies
    occupancy_std: float
        standard deviation of the accepted per-window occupancies
    occupancy_from_mean_ratio: float
        occupancy from the mean corrected ratio
    correction_method: str
        ``'heavy-twin'`` or ``'multimode'``
    detuning_track: obj or NoneType
        probe detuning (rad/s) against window midtime
    """
    step: int
    power: float
    windows: list
    occupancy_mean: float
    occupancy_std: float
    occupancy_from_mean_ratio: float
    ratio_mean: float
    raw_ratio_mean: float
    n_accepted: int
    n_excluded: int
    correction_method: str
    gamma_eff: float
    gamma_eff_sigma: float
    detuning_track: optotherm.fit.LineFit | None = None
    warnings: list = dataclasses.field(default_factory=list)

    @property
    def exclusions(self):
        return {w.window_index: w.reason for w in self.windows if w.excluded}

    @property
    def occupancy_sigma(self):
        """standard error of the mean occupancy"""
        if (self.n_accepted > 1):
            return self.occupancy_std/np.sqrt(self.n_accepted)
        return next(w.occupancy_sigma for w in self.windows if not w.excluded)

@dataclasses.dataclass
class BathTemperatureResult:
    """bath temperature fitted to the occupancies of a cooling run"""
    temperature: float
    uncertainty: float
    n_th: float
    n_th_sigma: float
    chi_square: float
    reduced_chi_square: float
    include_backaction: bool
    model_comparison: dict
    points: list
    budget_curve: dict | None = None
    damping_line: optotherm.fit.LineFit | None = None

# PURPOSE: convert spectra in detector units with the calibration tone
def calibrate_homodyne(spectrum, config):
    """
    Rescale a homodyne spectrum to cavity frequency fluctuations using the
    known area of the calibration tone

    Parameters
    ----------
    spectrum: obj
        :class:`optotherm.spectrum.Spectrum`
    config: obj
        :class:`ThermometryConfig`

    Returns
    -------
    spectrum: obj
        calibrated spectrum
    gain: float
        detector gain relative to frequency fluctuation units
    """
    if (spectrum.units == Units.FREQUENCY):
        return spectrum, 1.0
    if config.calibration_tone is None:
        raise PipelineError('homodyne spectra in detector units need a '
            'calibration tone')
    frequency, depth = config.calibration_tone
    half = 30.0*spectrum.f_step
    tone = optotherm.fit.fit_lorentzian(spectrum, (frequency - half,
        frequency + half))
    gain = tone.area/(0.5*depth**2)
    logging.info(f'Calibration tone gain {gain:0.6g}')
    return spectrum.scaled(1.0/gain, units=Units.FREQUENCY), gain

# PURPOSE: area-width product of the light twin peak
def _homodyne_step(spectrum, power, config):
    spectrum, gain = calibrate_homodyne(spectrum, config)
    light = config.light
    window = light.homodyne_window or (light.frequency - 25e3,
        light.frequency + 25e3)
    fit = optotherm.fit.fit_lorentzian(spectrum, window,
        mask=config.masks_for(light, 'homodyne'),
        min_width=2.0*spectrum.f_step)
    if (fit.fwhm < 2.0*spectrum.f_step):
        raise optotherm.fit.DegenerateWindowError('linewidth below the '
            'frequency resolution')
    V = fit.covariance
    # fwhm and area are the last two parameters
    var = fit.fwhm**2*V[4,4] + fit.area**2*V[3,3] + 2.0*fit.area*fit.fwhm*V[3,4]
    scale = optotherm.physics.TWO_PI**3
    return HomodyneStep(step=spectrum.step, power=power,
        gamma_eff=optotherm.physics.TWO_PI*fit.fwhm,
        gamma_eff_sigma=optotherm.physics.TWO_PI*fit.uncertainties['fwhm'],
        area_width=scale*fit.area*fit.fwhm,
        area_width_sigma=scale*np.sqrt(max(var, 0.0)),
        fit=fit, calibration_gain=gain)

# PURPOSE: homodyne area-width thermometry
def homodyne_pipeline(spectra, config):
    """
    Area-width analysis of homodyne spectra over a cooling run

    The light twin peak of each step is fitted and its area-width product
    regressed against the effective linewidth with three models

        - occupancy model with the back-action terms of each step and only
          the overall scale g0^2 free
        - free line whose slope-to-offset ratio is compared with the model
          to bound laser heating
        - free quadratic measuring extra laser noise

    Parameters
    ----------
    spectra: list
        (cooling power, :class:`optotherm.spectrum.Spectrum`) pairs
    config: obj
        :class:`ThermometryConfig`

    Returns
    -------
    result: obj
        :class:`HomodyneResult`
    """
    excluded = {}
    warnings = []
    spectra = sorted(spectra, key=lambda item: item[0])
    def analyze(item):
        power, spectrum = item
        if (power <= 0):
            return 'no cooling power'
        try:
            return _homodyne_step(spectrum, power, config)
        except optotherm.fit.FitError as exc:
            return f'{exc.__class__.__name__}: {exc}'
    steps = []
    for (power, spectrum), outcome in zip(spectra, config.map(analyze, spectra)):
        if isinstance(outcome, str):
            excluded[spectrum.step] = outcome
            message = f'homodyne step {spectrum.step:d} excluded: {outcome}'
            logging.warning(message)
            warnings.append(message)
        else:
            steps.append(outcome)
    if (len(steps) < 3):
        raise PipelineError(f'{len(steps):d} usable homodyne steps (need 3)',
            reasons=excluded)
    omega = config.light.omega_m
    gamma_m = config.gamma_m
    n_th = optotherm.physics.n_thermal(config.sensor_temperature, omega)
    gamma = np.array([s.gamma_eff for s in steps])
    y = np.array([s.area_width for s in steps])
    sigma = np.array([s.area_width_sigma for s in steps])
    # occupancy model without the overall scale
    model = np.empty(len(steps))
    for i, s in enumerate(steps):
        nbc, nbp = config.backaction(s.power)
        model[i] = optotherm.physics.area_width_product(1.0, gamma_m,
            s.gamma_eff, n_th, nbc, nbp)
        s.budget = optotherm.physics.n_total(n_th, gamma_m, s.gamma_eff,
            nbc, nbp)
    # model (i): one free scale
    w = 1.0/sigma**2
    scale = np.sum(w*y*model)/np.sum(w*model**2)
    chi_square = float(np.sum(w*(y - scale*model)**2))
    reduced = chi_square/(len(y) - 1)
    scale_sigma = np.sqrt(max(1.0, reduced)/np.sum(w*model**2))
    g0 = np.sqrt(scale)
    g0_sigma = scale_sigma/(2.0*g0)
    for s, m in zip(steps, model):
        s.area_width_model = scale*m
        s.occupancy = s.area_width/(2.0*scale*s.gamma_eff) - 0.5
        s.occupancy_sigma = (s.occupancy + 0.5)*np.hypot(
            s.area_width_sigma/s.area_width, scale_sigma/scale)
    # model (ii): free line against the line through the model values
    line = optotherm.fit.fit_weighted_polynomial(gamma, y, sigma, order=1)
    predicted = optotherm.fit.fit_weighted_polynomial(gamma, model,
        sigma*model/y, order=1)
    ratio, ratio_sigma = line.slope_offset_ratio(scaled=True)
    predicted_ratio, _ = predicted.slope_offset_ratio()
    # excess slope-to-offset ratio as a linear rise of the bath temperature
    gamma_max = np.max(gamma)
    conversion = predicted.coefficients[0]*optotherm.physics.HBAR*omega* \
        (gamma_max - gamma_m)/(2.0*gamma_m*optotherm.physics.K_B)
    heating = (ratio - predicted_ratio)*conversion
    heating_sigma = ratio_sigma*abs(conversion)
    # model (iii): free quadratic
    quadratic = optotherm.fit.fit_weighted_polynomial(gamma, y, sigma, order=2)
    fraction, fraction_sigma = _quadratic_fraction(quadratic, gamma_max)
    if quadratic.interpolates:
        message = (f'quadratic passes through all {len(steps):d} steps, '
            'extra noise fraction has no goodness of fit')
        logging.warning(message)
        warnings.append(message)
    # optical damping against cooling power
    power = np.array([s.power for s in steps])
    damping = optotherm.fit.fit_weighted_polynomial(power, gamma,
        np.array([s.gamma_eff_sigma for s in steps]), order=1)
    ordered = [steps[i] for i in np.argsort(power)]
    for a, b in zip(ordered[:-1], ordered[1:]):
        if (b.gamma_eff < a.gamma_eff - 3.0*np.hypot(a.gamma_eff_sigma,
            b.gamma_eff_sigma)):
            message = (f'effective linewidth decreases between steps '
                f'{a.step:d} and {b.step:d}')
            logging.warning(message)
            warnings.append(message)
    comparison = dict(model=reduced, line=line.reduced_chi_square,
        quadratic=quadratic.reduced_chi_square)
    logging.info(f'g0/2pi = {g0/optotherm.physics.TWO_PI:0.4f} Hz, '
        f'heating = {heating:0.3f} K, extra noise = {fraction:0.3f}')
    return HomodyneResult(steps=steps, scale=scale, scale_sigma=scale_sigma,
        g0=g0, g0_sigma=g0_sigma, model_chi_square=reduced, line=line,
        predicted_line=predicted, ratio=ratio, ratio_sigma=ratio_sigma,
        predicted_ratio=predicted_ratio, heating=heating,
        heating_sigma=heating_sigma, quadratic=quadratic,
        extra_noise_fraction=fraction, extra_noise_sigma=fraction_sigma,
        damping_line=damping, model_comparison=comparison,
        excluded=excluded, warnings=warnings)

# PURPOSE: quadratic term as a fraction of the fitted value
def _quadratic_fraction(quadratic, x):
    c0, c1, c2 = quadratic.coefficients
    P = quadratic.evaluate(x)
    fraction = c2*x**2/P
    gradient = np.array([-c2*x**2/P**2, -c2*x**3/P**2,
        x**2*(c0 + c1*x)/P**2])
    var = gradient @ quadratic.scaled_covariance() @ gradient
    return fraction, np.sqrt(max(var, 0.0))

# PURPOSE: fit the sidebands of a mode in a heterodyne window
def _fit_mode(spectrum, mode, config, background=None, initial=None):
    kwargs = dict(mask=config.masks_for(mode, 'heterodyne'),
        min_width=2.0*spectrum.f_step, background=background, initial=initial)
    if mode.sideband_span is not None:
        kwargs['sideband_span'] = mode.sideband_span
    elif mode.span is not None:
        kwargs['span'] = mode.span
    return optotherm.fit.fit_sideband_doublet(spectrum, mode.frequency,
        config.delta_lo, **kwargs)

# PURPOSE: fitted sidebands of the other modes as a fixed background
def _neighbours(fits, label):
    others = [fit for key, fit in fits.items()
        if (key != label) and isinstance(fit, optotherm.fit.DoubletFit)]
    if not others:
        return None
    return lambda f: sum(fit.sidebands(f) for fit in others)

def _settled(previous, fits):
    for key, fit in fits.items():
        last = previous[key]
        fitted = isinstance(fit, optotherm.fit.DoubletFit)
        if fitted != isinstance(last, optotherm.fit.DoubletFit):
            return False
        if not fitted:
            continue
        change = max(abs(fit.area_stokes/last.area_stokes - 1.0),
            abs(fit.area_antistokes/last.area_antistokes - 1.0),
            abs(fit.fwhm/last.fwhm - 1.0),
            abs(fit.mean_center - last.mean_center)/fit.fwhm)
        if (change > NEIGHBOUR_TOLERANCE):
            return False
    return True

# PURPOSE: sideband doublets of every registered mode in a window
def fit_registered_modes(spectrum, config):
    """
    Sideband doublets of the registered modes in a heterodyne window

    Every mode is fitted on its own and then refitted with the fitted
    sidebands of all other modes held fixed, until the fits settle.  The
    curved tails of neighbouring peaks would otherwise leak into the linear
    background of each fit

    Parameters
    ----------
    spectrum: obj
        heterodyne :class:`optotherm.spectrum.Spectrum`
    config: obj
        :class:`ThermometryConfig`

    Returns
    -------
    fits: dict
        :class:`optotherm.fit.DoubletFit` or the
        :class:`optotherm.fit.FitError` of each mode keyed by label
    """
    def attempt(mode, fits):
        last = fits.get(mode.label)
        try:
            return _fit_mode(spectrum, mode, config,
                background=_neighbours(fits, mode.label),
                initial=last if isinstance(last, optotherm.fit.DoubletFit) else None)
        except optotherm.fit.FitError as exc:
            return exc
    fits = {m.label: attempt(m, {}) for m in config.modes}
    if (len(config.modes) == 1):
        return fits
    for iteration in range(NEIGHBOUR_ITERATIONS):
        previous = fits
        fits = {m.label: attempt(m, previous) for m in config.modes}
        if _settled(previous, fits):
            break
    else:
        logging.warning(f'window {spectrum.window_index:d}: mode fits not '
            f'settled after {NEIGHBOUR_ITERATIONS:d} refits')
    return fits

def _reason(exc):
    return f'{exc.__class__.__name__}: {exc}'

# PURPOSE: filter correction from the heavy twin
def correction_heavy_twin(spectrum_window, config, light_omega=None, fits=None):
    """
    Filter correction of a window from the sideband ratio of the heavy twin

    The high occupancy of the weakly coupled twin leaves only the cavity
    filtering in its sideband ratio.  With a light twin frequency the
    detuning that gives this ratio at the heavy twin frequency is carried
    over to the light twin, which removes the optical spring between the
    twins

    Parameters
    ----------
    spectrum_window: obj
        heterodyne :class:`optotherm.spectrum.Spectrum`
    config: obj
        :class:`ThermometryConfig`
    light_omega: float or NoneType, default None
        light twin angular frequency (rad/s), default the heavy twin ratio
    fits: dict or NoneType, default None
        output of :func:`fit_registered_modes` for the window

    Returns
    -------
    correction: float
        heavy twin sideband ratio or the filter ratio at the light twin
    sigma: float
        standard deviation of the correction
    fit: obj
        heavy twin :class:`optotherm.fit.DoubletFit`
    """
    if config.heavy is None:
        raise optotherm.fit.UnresolvableDoubletError('no heavy twin registered')
    if fits is None:
        fits = fit_registered_modes(spectrum_window, config)
    fit = fits[config.heavy.label]
    if isinstance(fit, Exception):
        raise fit
    if light_omega is None:
        return fit.ratio, fit.ratio_uncertainty, fit
    kappa = config.cavity.kappa
    omega = optotherm.physics.TWO_PI*fit.mean_center
    try:
        delta = optotherm.physics.detuning_from_ratio(fit.ratio, omega, kappa)
    except optotherm.physics.NonPhysicalRatioError as exc:
        raise optotherm.fit.UnresolvableDoubletError(str(exc)) from None
    delta_sigma = fit.ratio_uncertainty/abs(
        optotherm.physics.cavity_filter_slope(delta, omega, kappa))
    correction = optotherm.physics.cavity_filter_ratio(delta, light_omega, kappa)
    slope = optotherm.physics.cavity_filter_slope(delta, light_omega, kappa)
    return float(correction), float(abs(slope)*delta_sigma), fit

# PURPOSE: polynomial track of the probe detuning over a run
def _detuning_track(t, delta, sigma):
    if (len(t) == 1):
        return optotherm.fit.fit_weighted_polynomial(t, delta, sigma, order=0)
    track = optotherm.fit.fit_weighted_polynomial(t, delta, sigma, order=1)
    if (len(t) >= 4):
        quadratic = optotherm.fit.fit_weighted_polynomial(t, delta, sigma,
            order=2)
        if (track.chi_square - quadratic.chi_square > TRACK_ORDER_THRESHOLD):
            track = quadratic
    return track
# PURPOSE: filter correction from the probe detuning of several modes
def correction_multimode(windows, config, light_omega=None, fits=None):
    """
    Filter corrections from the probe detuning fitted to the sideband ratios
    of the weakly coupled modes of each window

    Parameters
    ----------
    windows: list
        heterodyne :class:`optotherm.spectrum.Spectrum` windows
    config: obj
        :class:`ThermometryConfig`
    light_omega: list or NoneType, default None
        light twin angular frequency of each window (rad/s), default from
        the registry
    fits: list or NoneType, default None
        output of :func:`fit_registered_modes` for each window

    Returns
    -------
    corrections: list
        :class:`MultimodeCorrection` for each window
    track: obj
        :class:`optotherm.fit.LineFit` of the detuning against midtime
    """
    references = config.references
    if (len(references) < 2):
        raise PipelineError('multimode correction needs at least 2 weakly '
            'coupled modes')
    kappa = config.cavity.kappa
    def detuning(item):
        spectrum, window_fits = item
        if window_fits is None:
            window_fits = fit_registered_modes(spectrum, config)
        omega, ratio, sigma = [], [], []
        for mode in references:
            fit = window_fits[mode.label]
            if isinstance(fit, Exception):
                logging.debug(f'{mode.label} window {spectrum.window_index:d}: {fit}')
                continue
            omega.append(optotherm.physics.TWO_PI*fit.mean_center)
            ratio.append(fit.ratio)
            sigma.append(fit.ratio_uncertainty)
        try:
            return optotherm.fit.fit_detuning(omega, ratio, sigma, kappa)
        except (optotherm.fit.FitError, ValueError) as exc:
            return _reason(exc)
    if fits is None:
        fits = [None]*len(windows)
    outcomes = config.map(detuning, list(zip(windows, fits)))
    t_mid = np.array([s.t_mid for s in windows])
    good = [i for i, o in enumerate(outcomes) if not isinstance(o, str)]
    if not good:
        raise PipelineError('probe detuning fit failed in every window',
            reasons={windows[i].window_index: o for i, o in enumerate(outcomes)})
    track = _detuning_track(t_mid[good],
        np.array([outcomes[i].delta_probe for i in good]),
        np.array([max(outcomes[i].uncertainty, 1e-12*kappa) for i in good]))
    if light_omega is None:
        light_omega = [config.light.omega_m]*len(windows)
    corrections = []
    for i, (spectrum, outcome) in enumerate(zip(windows, outcomes)):
        fitted = not isinstance(outcome, str)
        if fitted and (config.detuning_mode == 'per-window'):
            delta, sigma = outcome.delta_probe, outcome.uncertainty
        else:
            delta = float(track.evaluate(t_mid[i]))
            sigma = float(track.evaluate_sigma(t_mid[i])[0])
        slope = optotherm.physics.cavity_filter_slope(delta, light_omega[i], kappa)
        correction = optotherm.physics.cavity_filter_ratio(delta,
            light_omega[i], kappa)
        corrections.append(MultimodeCorrection(window_index=spectrum.window_index,
            t_mid=spectrum.t_mid, delta_probe=delta, delta_probe_sigma=sigma,
            correction=float(correction), correction_sigma=abs(slope)*sigma,
            detuning=outcome if fitted else None,
            interpolated=not fitted or (config.detuning_mode == 'track'),
            reason='' if fitted else outcome))
        if not fitted:
            logging.warning(f'window {spectrum.window_index:d} detuning '
                f'interpolated from the track: {outcome}')
    return corrections, track

# PURPOSE: heterodyne sideband asymmetry thermometry
def heterodyne_pipeline(windows, config):
    """
    Sideband asymmetry analysis of the heterodyne windows of a power step

    Each window gives the Stokes to anti-Stokes ratio of the light twin,
    divided by the cavity filter correction of the selected method and
    converted to an occupancy 1/(R-1).  Windows with a corrected ratio
    at or below 1 are excluded

    Parameters
    ----------
    windows: list
        heterodyne :class:`optotherm.spectrum.Spectrum` windows
    config: obj
        :class:`ThermometryConfig`

    Returns
    -------
    result: obj
        :class:`HeterodyneResult`
    """
    if not windows:
        raise PipelineError('no heterodyne windows')
    windows = sorted(windows, key=lambda s: s.window_index)
    warnings = []
    fits = config.map(lambda s: fit_registered_modes(s, config), windows)
    light_fits = [f[config.light.label] for f in fits]
    estimates = [WindowEstimate(window_index=s.window_index, t_mid=s.t_mid)
        for s in windows]
    for estimate, fit, spectrum in zip(estimates, light_fits, windows):
        if isinstance(fit, Exception):
            estimate.excluded, estimate.reason = True, _reason(fit)
            continue
        if (fit.fwhm < 2.0*spectrum.f_step):
            estimate.excluded = True
            estimate.reason = 'linewidth below the frequency resolution'
            continue
        estimate.fit = fit
        estimate.ratio_light = fit.ratio
        estimate.ratio_light_sigma = fit.ratio_uncertainty
        estimate.gamma_eff = optotherm.physics.TWO_PI*fit.fwhm
        estimate.omega = optotherm.physics.TWO_PI*fit.mean_center
        if (fit.ratio > 1):
            estimate.raw_occupancy = optotherm.physics.n_from_ratio(fit.ratio)
    # filter corrections
    fallback = []
    if (config.correction == 'heavy-twin'):
        def heavy(item):
            spectrum, window_fits, estimate = item
            omega = estimate.omega if np.isfinite(estimate.omega) \
                else config.light.omega_m
            try:
                return correction_heavy_twin(spectrum, config,
                    light_omega=omega, fits=window_fits)
            except optotherm.fit.FitError as exc:
                return _reason(exc)
        outcomes = config.map(heavy, list(zip(windows, fits, estimates)))
        for estimate, outcome in zip(estimates, outcomes):
            if isinstance(outcome, str):
                message = (f'heavy twin failed in window '
                    f'{estimate.window_index:d} ({outcome}), using multimode')
                logging.warning(message)
                warnings.append(message)
                estimate.flags.append('heavy-twin fallback')
                fallback.append(estimate)
                continue
            estimate.correction, estimate.correction_sigma, _ = outcome
            estimate.correction_method = 'heavy-twin'
    track = None
    if (config.correction == 'multimode') or fallback:
        light_omega = [e.omega if np.isfinite(e.omega) else config.light.omega_m
            for e in estimates]
        try:
            corrections, track = correction_multimode(windows, config,
                light_omega=light_omega, fits=fits)
        except PipelineError as exc:
            if (config.correction == 'multimode'):
                raise
            for estimate in fallback:
                estimate.excluded = True
                estimate.reason = f'no filter correction: {exc}'
        else:
            targets = estimates if (config.correction == 'multimode') else fallback
            lookup = {c.window_index: c for c in corrections}
            for estimate in targets:
                c = lookup[estimate.window_index]
                estimate.correction = c.correction
                estimate.correction_sigma = c.correction_sigma
                estimate.delta_probe = c.delta_probe
                estimate.delta_probe_sigma = c.delta_probe_sigma
                estimate.correction_method = 'multimode'
                if c.interpolated and c.reason:
                    estimate.flags.append('detuning interpolated')
    # corrected ratios and occupancies
    for estimate in estimates:
        if estimate.excluded:
            continue
        R = estimate.ratio_light/estimate.correction
        estimate.ratio = R
        estimate.ratio_sigma = R*np.hypot(
            estimate.ratio_light_sigma/estimate.ratio_light,
            estimate.correction_sigma/estimate.correction)
        if not (R > 1):
            estimate.excluded = True
            estimate.reason = f'corrected ratio {R:0.6f} <= 1'
            continue
        estimate.occupancy = optotherm.physics.n_from_ratio(R)
        estimate.occupancy_sigma = estimate.ratio_sigma/(R - 1.0)**2
    accepted = [e for e in estimates if not e.excluded]
    for e in estimates:
        if e.excluded:
            message = f'window {e.window_index:d} excluded: {e.reason}'
            logging.warning(message)
            warnings.append(message)
    if not accepted:
        raise PipelineError('every heterodyne window was excluded',
            reasons={e.window_index: e.reason for e in estimates})
    occupancy = np.array([e.occupancy for e in accepted])
    ratio = np.array([e.ratio for e in accepted])
    gamma = np.array([e.gamma_eff for e in accepted])
    mean_ratio = float(np.mean(ratio))
    std = float(np.std(occupancy, ddof=1)) if (len(accepted) > 1) else 0.0
    if (len(accepted) > 1):
        gamma_sigma = float(np.std(gamma, ddof=1)/np.sqrt(len(gamma)))
    else:
        gamma_sigma = optotherm.physics.TWO_PI*accepted[0].fit.uncertainties['fwhm']
    raw = np.array([e.ratio_light for e in estimates if e.fit is not None])
    result = HeterodyneResult(step=windows[0].step, power=windows[0].power_cool,
        windows=estimates, occupancy_mean=float(np.mean(occupancy)),
        occupancy_std=std,
        occupancy_from_mean_ratio=1.0/(mean_ratio - 1.0) if (mean_ratio > 1) else np.nan,
        ratio_mean=mean_ratio, raw_ratio_mean=float(np.mean(raw)),
        n_accepted=len(accepted), n_excluded=len(estimates) - len(accepted),
        correction_method=config.correction, gamma_eff=float(np.mean(gamma)),
        gamma_eff_sigma=gamma_sigma, detuning_track=track, warnings=warnings)
    logging.info(f'step {result.step:d}: n = {result.occupancy_mean:0.4f} '
        f'+/- {result.occupancy_std:0.4f} ({result.n_accepted:d} windows)')
    return result

# PURPOSE: one-parameter weighted fit of the thermal occupancy
def _fit_thermal(x, y, sigma):
    weighted = np.all(sigma > 0)
    w = 1.0/sigma**2 if weighted else np.ones_like(x)
    n_th = np.sum(w*x*y)/np.sum(w*x**2)
    chi_square = float(np.sum(w*(y - n_th*x)**2))
    reduced = chi_square/(len(x) - 1)
    if weighted:
        variance = max(1.0, reduced)/np.sum(w*x**2)
    else:
        variance = reduced/np.sum(x**2)
    return n_th, np.sqrt(variance), chi_square, reduced

# PURPOSE: bath temperature from the occupancies of a cooling run
def bath_temperature(series, config, include_backaction=True):
    """
    Fit the thermal occupancy of the bath to the measured occupancies with
    all other terms of the occupancy budget fixed

    Parameters
    ----------
    series: list
        :class:`HeterodyneResult` of each power step
    config: obj
        :class:`ThermometryConfig`
    include_backaction: bool, default True
        include the cooling and probe back-action terms in the model

    Returns
    -------
    result: obj
        :class:`BathTemperatureResult`
    """
    series = sorted(series, key=lambda r: r.power)
    if (len(series) < 3):
        raise PipelineError(f'{len(series):d} power steps (need 3)')
    gamma = np.array([r.gamma_eff for r in series])
    if (np.max(gamma) < 3.0*np.min(gamma)):
        raise PipelineError('effective linewidths span less than a factor 3')
    omega = config.light.omega_m
    gamma_m = config.gamma_m
    # optical damping line mapping linewidth to cooling power
    power = np.array([r.power for r in series])
    damping = optotherm.fit.fit_weighted_polynomial(power, gamma,
        np.array([max(r.gamma_eff_sigma, 1e-12*r.gamma_eff) for r in series]),
        order=1)
    slope = damping.coefficients[1] if (config.optical_damping is None) \
        else config.optical_damping
    backaction = np.array([sum(config.backaction(r.power, optical_damping=slope))
        for r in series])
    n = np.array([r.occupancy_mean for r in series])
    sigma = np.array([r.occupancy_std/np.sqrt(r.n_accepted) for r in series])
    x = gamma_m/gamma
    fits = {}
    for label, offset in (('with_backaction', backaction),
        ('without_backaction', np.zeros_like(backaction))):
        fits[label] = _fit_thermal(x, n - offset, sigma)
    label = 'with_backaction' if include_backaction else 'without_backaction'
    n_th, n_th_sigma, chi_square, reduced = fits[label]
    temperature = optotherm.physics.temperature_from_occupancy(n_th, omega)
    uncertainty = optotherm.physics.temperature_from_occupancy(n_th_sigma, omega)
    points = [dict(step=r.step, power=r.power, gamma_eff=r.gamma_eff,
        occupancy=r.occupancy_mean, occupancy_sigma=s)
        for r, s in zip(series, sigma)]
    curve = None
    if (damping.coefficients[1] > 0):
        curve = budget_curve(np.linspace(np.min(gamma), np.max(gamma), 101),
            n_th, damping, config)
    logging.info(f'T_bath = {temperature:0.4f} +/- {uncertainty:0.4f} K')
    return BathTemperatureResult(temperature=temperature,
        uncertainty=uncertainty, n_th=n_th, n_th_sigma=n_th_sigma,
        chi_square=chi_square, reduced_chi_square=reduced,
        include_backaction=include_backaction,
        model_comparison={k: v[3] for k, v in fits.items()},
        points=points, budget_curve=curve, damping_line=damping)

# PURPOSE: occupancy budget along the effective linewidth
def budget_curve(gamma_eff, n_th, damping, config):
    """
    Thermal, probe and cooling back-action parts of the occupancy against
    the effective linewidth

    Parameters
    ----------
    gamma_eff: np.ndarray
        effective linewidths (rad/s)
    n_th: float
        thermal bath occupancy
    damping: obj
        :class:`optotherm.fit.LineFit` of linewidth against cooling power
    config: obj
        :class:`ThermometryConfig`

    Returns
    -------
    curve: dict
        linewidths and the budget terms with their total
    """
    c0, c1 = damping.coefficients
    curve = dict(gamma_eff=[], thermal=[], probe=[], cooling=[], total=[])
    for g in gamma_eff:
        power = (g - c0)/c1
        if (power <= 0) or (g < config.gamma_m):
            continue
        nbc, nbp = config.backaction(power)
        budget = optotherm.physics.n_total(n_th, config.gamma_m, g, nbc, nbp)
        curve['gamma_eff'].append(float(g))
        curve['thermal'].append(budget.n_th_residual)
        curve['probe'].append(budget.n_ba_probe)
        curve['cooling'].append(budget.n_ba_cool)
        curve['total'].append(budget.n_total)
    return curve
