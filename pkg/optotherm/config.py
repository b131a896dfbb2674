#!/usr/bin/env python
u"""
config.py
Written by the optotherm developers (10/2026)
Reads key-value configuration files describing a cooling run, the mode
    registry of an analysis and the membrane geometry

FILE FORMAT:
    ``key = value`` lines with ``#`` comments.  Keys before the first
    section header describe the run.  ``[mode.<label>]`` sections describe
    mechanical modes and ``[spurious.<label>]`` sections electronic pickup
    peaks.  Lists are comma-separated and ranges are written ``lo:hi``.
    Frequencies are ordinary frequencies in Hz

PROGRAM DEPENDENCIES:
    physics.py: closed-form optomechanics relations
    synth.py: ground-truth scenarios
    thermometry.py: analysis configuration

UPDATE HISTORY:
    Updated 10/2026: membrane frequency scale from stress, density and diameter
        optical damping of the light twin for steps without cooling light
    Updated 09/2026: analysis defaults derived from synthesis scenarios
    Written 08/2026
"""
from __future__ import annotations

import os
import re
import logging
import configparser
import optotherm.physics
import optotherm.synth
import optotherm.thermometry

TWO_PI = optotherm.physics.TWO_PI
# section holding the keys before the first header
TOP = 'scenario'

class ConfigError(ValueError):
    """Malformed or inconsistent configuration file"""
    pass

class ConfigFile:
    """
    Parsed configuration file with line numbers for diagnostics

    Parameters
    ----------
    filename: str
        path to the configuration file
    """
    def __init__(self, filename):
        self.filename = os.path.expanduser(filename)
        self.name = os.path.basename(self.filename)
        with open(self.filename, mode='r', encoding='utf8') as fid:
            text = fid.read()
        self.parser = configparser.ConfigParser(interpolation=None,
            delimiters=('=',), comment_prefixes=('#',),
            inline_comment_prefixes=('#',),
            strict=True)
        try:
            self.parser.read_string(f'[{TOP}]\n{text}', source=self.name)
        except configparser.Error as exc:
            # account for the prepended section header
            lineno = getattr(exc, 'lineno', None)
            where = f':{lineno - 1:d}' if lineno else ''
            message = getattr(exc, 'message', str(exc)).splitlines()[0]
            raise ConfigError(f'{self.name}{where}: {message}') from None
        # line number of each key for diagnostics
        self.lines = {}
        section = TOP
        for lineno, line in enumerate(text.splitlines(), start=1):
            header = re.match(r'^\s*\[(.*?)\]', line)
            if header:
                section = header.group(1).strip()
                continue
            key = re.match(r'^\s*([^#=\s][^=]*?)\s*=', line)
            if key:
                self.lines[(section, key.group(1).lower())] = lineno

    def sections(self, prefix):
        """labels of the sections named ``<prefix>.<label>`` in file order"""
        return [s.split('.', 1)[1] for s in self.parser.sections()
            if s.startswith(f'{prefix}.')]

    def has(self, key, section=TOP):
        return self.parser.has_option(section, key)

    def error(self, message, key=None, section=TOP):
        lineno = self.lines.get((section, key))
        where = f':{lineno:d}' if lineno else ''
        return ConfigError(f'{self.name}{where}: {message}')

    def raw(self, key, section=TOP, required=False):
        if not self.parser.has_option(section, key):
            if required:
                raise self.error(f'missing key {key!r} in [{section}]')
            return None
        return self.parser.get(section, key).strip()

    def _convert(self, key, section, convert, default, required):
        value = self.raw(key, section=section, required=required)
        if value is None:
            return default
        try:
            return convert(value)
        except (ValueError, TypeError) as exc:
            raise self.error(f'invalid value for {key}: {value!r}',
                key=key, section=section) from None

    def get_float(self, key, default=None, section=TOP, required=False):
        return self._convert(key, section, float, default, required)

    def get_int(self, key, default=None, section=TOP, required=False):
        return self._convert(key, section, int, default, required)

    def get_str(self, key, default=None, section=TOP, required=False):
        return self._convert(key, section, str, default, required)

    def get_floats(self, key, default=None, section=TOP, required=False):
        return self._convert(key, section, parse_list, default, required)

    def get_range(self, key, default=None, section=TOP, required=False):
        return self._convert(key, section, parse_range, default, required)

    def get_ranges(self, key, default=(), section=TOP, required=False):
        return self._convert(key, section,
            lambda v: tuple(parse_range(r) for r in v.split(',') if r.strip()),
            default, required)

# PURPOSE: parse a comma-separated list of numbers
def parse_list(value):
    """Parse ``'a, b, c'`` into a tuple of floats"""
    return tuple(float(v) for v in value.split(',') if v.strip())

# PURPOSE: parse a frequency range
def parse_range(value):
    """Parse ``'lo:hi'`` into a tuple of floats with lo < hi"""
    lo, sep, hi = value.strip().partition(':')
    if not sep:
        raise ValueError(f'expected lo:hi, got {value!r}')
    lo, hi = float(lo), float(hi)
    if not (hi > lo):
        raise ValueError(f'range {value!r} must have lo < hi')
    return (lo, hi)

# PURPOSE: membrane geometry and optical spot
def read_membrane(config):
    """
    Membrane geometry of a configuration file

    Parameters
    ----------
    config: str or obj
        configuration file path or :class:`ConfigFile`

    Returns
    -------
    membrane: obj
        :class:`optotherm.physics.MembraneSpec` or None if the file does
        not describe a membrane
    max_m: int
        largest azimuthal index of the mode table
    max_n: int
        largest radial index of the mode table
    """
    cfg = config if isinstance(config, ConfigFile) else ConfigFile(config)
    f0 = cfg.get_float('membrane_f0_hz')
    if f0 is None and cfg.has('membrane_stress_pa'):
        try:
            f0 = optotherm.physics.membrane_f0(
                cfg.get_float('membrane_stress_pa', required=True),
                cfg.get_float('membrane_density_kg_m3', required=True),
                cfg.get_float('membrane_diameter_m', required=True))
        except optotherm.physics.InvalidParameterError as exc:
            raise cfg.error(str(exc), key='membrane_stress_pa') from None
    if f0 is None:
        return None, 0, 0
    try:
        membrane = optotherm.physics.MembraneSpec(f0,
            radius=cfg.get_float('membrane_radius_m', 1.0),
            spot_r=cfg.get_float('spot_r', 0.0),
            spot_theta=cfg.get_float('spot_theta_rad', 0.0))
    except optotherm.physics.InvalidParameterError as exc:
        raise cfg.error(str(exc), key='spot_r') from None
    return membrane, cfg.get_int('max_m', 3), cfg.get_int('max_n', 3)

# PURPOSE: mechanical mode of a [mode.<label>] section
def _mechanical_mode(cfg, label, membrane):
    section = f'mode.{label}'
    indices = cfg.get_floats('indices', (1.0, 1.0), section=section)
    if (len(indices) != 2):
        raise cfg.error('indices must be m, n', key='indices', section=section)
    m, n = (int(i) for i in indices)
    twin = cfg.get_str('twin', 'cos', section=section)
    frequency = cfg.get_float('frequency_hz', section=section)
    if frequency is None:
        if membrane is None:
            raise cfg.error(f'[{section}] needs frequency_hz or a membrane')
        frequency = optotherm.physics.mode_frequency(membrane, m, n) + \
            cfg.get_float('offset_hz', 0.0, section=section)
    linewidth = cfg.get_float('linewidth_hz', section=section)
    q_factor = cfg.get_float('q_factor', section=section,
        default=None if linewidth is not None else cfg.get_float('q_factor'))
    if cfg.has('coupling_weight', section=section):
        weight = cfg.get_float('coupling_weight', section=section)
    elif membrane is not None:
        weight = optotherm.physics.mode_coupling_weight(m, n, twin,
            membrane.spot_r, membrane.spot_theta)
    else:
        weight = 1.0
    g0 = cfg.get_float('g0_hz', section=section,
        default=weight*cfg.get_float('g0_hz', 0.0))
    try:
        mode = optotherm.physics.MechanicalMode.from_frequency(m, n, twin,
            frequency, q_factor=q_factor, linewidth=linewidth,
            g0=TWO_PI*g0, coupling_weight=weight)
    except (optotherm.physics.InvalidParameterError, ValueError) as exc:
        raise cfg.error(f'[{section}] {exc}') from None
    return mode

# PURPOSE: read a synthesis scenario
def read_scenario(config, seed=None, windows=None):
    """
    Ground-truth scenario of a configuration file

    Parameters
    ----------
    config: str or obj
        configuration file path or :class:`ConfigFile`
    seed: int or NoneType, default None
        replace the random seed of the file
    windows: int or NoneType, default None
        replace the number of windows per power step

    Returns
    -------
    scenario: obj
        :class:`optotherm.synth.SynthScenario`
    """
    cfg = config if isinstance(config, ConfigFile) else ConfigFile(config)
    membrane, _, _ = read_membrane(cfg)
    modes = []
    for label in cfg.sections('mode'):
        section = f'mode.{label}'
        modes.append(optotherm.synth.SynthMode(label,
            _mechanical_mode(cfg, label, membrane),
            role=cfg.get_str('role', 'auxiliary', section=section),
            occupancy=cfg.get_float('occupancy', section=section)))
    spurious = []
    for label in cfg.sections('spurious'):
        section = f'spurious.{label}'
        spurious.append(optotherm.synth.SpuriousPeak(
            cfg.get_float('frequency_hz', section=section, required=True),
            cfg.get_float('height', section=section, required=True),
            cfg.get_float('width_hz', section=section, required=True)))
    tone = None
    if cfg.has('calibration_tone_hz'):
        tone = optotherm.synth.CalibrationTone(cfg.get_float('calibration_tone_hz'),
            cfg.get_float('calibration_depth_hz', required=True))
    drift = tuple(TWO_PI*c for c in cfg.get_floats('probe_drift', ()))
    kwargs = {}
    for key, attr in (('homodyne', 'homodyne_grid'),
        ('heterodyne', 'heterodyne_grid')):
        band = cfg.get_range(f'{key}_band_hz')
        if band is not None:
            kwargs[attr] = optotherm.synth.FrequencyGrid(*band,
                cfg.get_int(f'{key}_bins', required=True))
        background = cfg.get_floats(f'{key}_background')
        if background is not None:
            kwargs[f'{key}_background'] = optotherm.synth.Background(*background)
    try:
        scenario = optotherm.synth.SynthScenario(
            cavity=optotherm.physics.CavitySpec(
                TWO_PI*cfg.get_float('kappa_hz', required=True)),
            modes=tuple(modes),
            probe=optotherm.physics.BeamSpec(
                cfg.get_float('probe_power_w', required=True),
                TWO_PI*cfg.get_float('probe_detuning_hz', 0.0), role='probe'),
            cool_detuning=TWO_PI*cfg.get_float('cool_detuning_hz', required=True),
            power_schedule=cfg.get_floats('cool_power_w', required=True),
            delta_lo=TWO_PI*cfg.get_float('delta_lo_hz', required=True),
            probe_drift=drift,
            bath_temperature=cfg.get_float('bath_temperature_k', 7.0),
            optical_damping=TWO_PI*cfg.get_float('optical_damping_hz_per_w', 0.0),
            optical_spring=TWO_PI*cfg.get_float('optical_spring_hz_per_w', 0.0),
            heating_slope=cfg.get_float('heating_k_per_w', 0.0),
            extra_noise_fraction=cfg.get_float('extra_noise_fraction', 0.0),
            homodyne_gain=cfg.get_float('homodyne_gain', 1.0),
            heterodyne_gain=cfg.get_float('heterodyne_gain', 1.0),
            spurious_peaks=tuple(spurious),
            calibration_tone=tone,
            averaging_count=cfg.get_int('averaging_count', 10),
            window_count=windows or cfg.get_int('window_count', 10),
            window_duration=cfg.get_float('window_duration_s', 10.0),
            rng_seed=cfg.get_int('rng_seed', 0) if seed is None else seed,
            **kwargs)
    except optotherm.physics.InvalidParameterError as exc:
        raise cfg.error(str(exc)) from None
    logging.info(f'Read scenario with {len(modes):d} modes and '
        f'{scenario.n_steps:d} power steps from {cfg.name}')
    return scenario

# PURPOSE: registry entry of a mode
def _registered_mode(cfg, label, mode, role, default_mask):
    section = f'mode.{label}'
    return optotherm.thermometry.RegisteredMode(label, role,
        mode.omega_m/TWO_PI,
        homodyne_window=cfg.get_range('homodyne_window_hz', section=section),
        span=cfg.get_float('span_hz', section=section),
        sideband_span=cfg.get_float('sideband_span_hz', section=section,
            default=default_mask if (role == 'heavy') else None),
        mask_width=cfg.get_float('mask_width_hz', default_mask, section=section),
        masks=cfg.get_ranges('masks', section=section))

# PURPOSE: read an analysis configuration
def read_thermometry_config(config, correction=None, masks=(), windows=None):
    """
    Analysis configuration of a configuration file

    Parameters
    ----------
    config: str or obj
        configuration file path or :class:`ConfigFile`
    correction: str or NoneType, default None
        replace the filter correction method of the file
    masks: list, default ()
        additional frequency ranges (Hz) masked in every fit
    windows: int or NoneType, default None
        replace the number of windows per power step

    Returns
    -------
    config: obj
        :class:`optotherm.thermometry.ThermometryConfig`
    """
    cfg = config if isinstance(config, ConfigFile) else ConfigFile(config)
    membrane, _, _ = read_membrane(cfg)
    registry = []
    light = None
    for label in cfg.sections('mode'):
        section = f'mode.{label}'
        role = cfg.get_str('role', 'auxiliary', section=section)
        mode = _mechanical_mode(cfg, label, membrane)
        default_mask = max(500.0, 10.0*mode.gamma_m/TWO_PI)
        try:
            registry.append(_registered_mode(cfg, label, mode, role,
                default_mask))
        except optotherm.physics.InvalidParameterError as exc:
            raise cfg.error(f'[{section}] {exc}') from None
        if (role == 'light'):
            light = mode
    if light is None:
        raise cfg.error('no mode with role = light')
    spurious = []
    for label in cfg.sections('spurious'):
        section = f'spurious.{label}'
        f = cfg.get_float('frequency_hz', section=section, required=True)
        w = cfg.get_float('width_hz', section=section, required=True)
        spurious.append((f - 5.0*w, f + 5.0*w))
    tone = None
    if cfg.has('calibration_tone_hz'):
        tone = (cfg.get_float('calibration_tone_hz'),
            cfg.get_float('calibration_depth_hz', required=True))
    bath = cfg.get_float('bath_temperature_k', 7.0)
    optical_damping = None
    if cfg.has('optical_damping_hz_per_w'):
        optical_damping = light.coupling_weight**2*TWO_PI*\
            cfg.get_float('optical_damping_hz_per_w')
    correction = correction or cfg.get_str('correction',
        'heavy-twin' if any(m.role == 'heavy' for m in registry) else 'multimode')
    try:
        return optotherm.thermometry.ThermometryConfig(
            cavity=optotherm.physics.CavitySpec(
                TWO_PI*cfg.get_float('kappa_hz', required=True)),
            probe=optotherm.physics.BeamSpec(
                cfg.get_float('probe_power_w', required=True),
                TWO_PI*cfg.get_float('probe_detuning_hz', 0.0), role='probe'),
            cool_detuning=TWO_PI*cfg.get_float('cool_detuning_hz', required=True),
            delta_lo=TWO_PI*cfg.get_float('delta_lo_hz', required=True),
            modes=tuple(registry),
            gamma_m=light.gamma_m,
            sensor_temperature=cfg.get_float('sensor_temperature_k', bath),
            correction=correction,
            detuning_mode=cfg.get_str('detuning_mode', 'per-window'),
            window_duration=cfg.get_float('window_duration_s', 10.0),
            window_count=windows or cfg.get_int('window_count', 10),
            masks=tuple(spurious) + cfg.get_ranges('masks') + tuple(masks),
            calibration_tone=tone, optical_damping=optical_damping)
    except optotherm.physics.InvalidParameterError as exc:
        raise cfg.error(str(exc)) from None

# PURPOSE: analysis configuration matching a synthesis scenario
def thermometry_config_from_scenario(scenario, **kwargs):
    """
    Analysis configuration with the instrument parameters and mode registry
    of a ground-truth scenario

    Parameters
    ----------
    scenario: obj
        :class:`optotherm.synth.SynthScenario`
    **kwargs: dict
        fields of :class:`optotherm.thermometry.ThermometryConfig` to replace

    Returns
    -------
    config: obj
        :class:`optotherm.thermometry.ThermometryConfig`
    """
    light = scenario.light
    if light is None:
        raise optotherm.physics.InvalidParameterError('scenario has no light mode')
    power = max(scenario.power_schedule)
    registry = []
    for sm in scenario.modes:
        mode = sm.mode
        gamma_max = mode.gamma_m + \
            mode.coupling_weight**2*scenario.optical_damping*power
        width = max(500.0, 10.0*gamma_max/TWO_PI)
        kw = dict(mask_width=width)
        if (sm.role == 'light'):
            grid = scenario.homodyne_grid
            half = max(25e3, 6.0*gamma_max/TWO_PI)
            kw['homodyne_window'] = (max(grid.f_start, sm.frequency - half),
                min(grid.f_stop, sm.frequency + half))
        elif (sm.role == 'heavy'):
            kw['sideband_span'] = width
        registry.append(optotherm.thermometry.RegisteredMode(sm.label,
            sm.role, sm.frequency, **kw))
    masks = tuple((p.frequency - 5.0*p.width, p.frequency + 5.0*p.width)
        for p in scenario.spurious_peaks)
    tone = scenario.calibration_tone
    fields = dict(cavity=scenario.cavity, probe=scenario.probe,
        cool_detuning=scenario.cool_detuning, delta_lo=scenario.delta_lo,
        modes=tuple(registry), gamma_m=light.mode.gamma_m,
        sensor_temperature=scenario.bath_temperature,
        correction='heavy-twin' if any(m.role == 'heavy' for m in registry)
            else 'multimode',
        window_duration=scenario.window_duration,
        window_count=scenario.window_count, masks=masks,
        calibration_tone=None if tone is None else (tone.frequency, tone.depth),
        optical_damping=light.mode.coupling_weight**2*scenario.optical_damping)
    fields.update(kwargs)
    return optotherm.thermometry.ThermometryConfig(**fields)

# PURPOSE: rows of the drum mode table
def mode_table(membrane, max_m=3, max_n=3):
    """
    Drum mode table sorted by frequency

    Parameters
    ----------
    membrane: obj
        :class:`optotherm.physics.MembraneSpec`
    max_m: int, default 3
        largest azimuthal index
    max_n: int, default 3
        largest radial index

    Returns
    -------
    rows: list
        dicts with indices, Bessel root, frequency and twin weights
    """
    rows = []
    for m in range(0, max_m + 1):
        for n in range(1, max_n + 1):
            rows.append(dict(m=m, n=n,
                bessel_root=optotherm.physics.bessel_root(m, n),
                frequency_hz=optotherm.physics.mode_frequency(membrane, m, n),
                weight_cos=optotherm.physics.mode_coupling_weight(m, n, 'cos',
                    membrane.spot_r, membrane.spot_theta),
                weight_sin=0.0 if (m == 0) else
                    optotherm.physics.mode_coupling_weight(m, n, 'sin',
                    membrane.spot_r, membrane.spot_theta)))
    rows.sort(key=lambda row: row['frequency_hz'])
    return rows
