#!/usr/bin/env python
u"""
report.py
Written by the optotherm developers (10/2026)
Run reports, plot data tables and SVG figures of an analysis

REPORT FORMAT:
    JSON object with sorted keys and two-space indentation
        schema_version: integer version of the layout
        toolkit: package name and version
        command: command name and its arguments
        config_digest: sha256 of the configuration file
        results: pipeline results with frequencies in Hz
        units: unit of each reported quantity family
        warnings: warning messages raised during the run
        exclusions: excluded power steps and windows with reasons
        plot_data: plot data tables written next to the report
        status: ``'ok'`` or ``'failed'`` with a failure description
        duration_s: wall-clock duration, only when timing is requested
    Non-finite numbers are written as null

PYTHON DEPENDENCIES:
    numpy: Scientific Computing Tools For Python
        https://numpy.org
    lxml: processing XML and HTML in Python
        https://pypi.python.org/pypi/lxml

PROGRAM DEPENDENCIES:
    physics.py: unit conversions
    version.py: package version

UPDATE HISTORY:
    Updated 10/2026: stacked occupancy budget bands in the occupancy figure
        measured occupancies drawn over the fitted budget
    Written 09/2026
"""
from __future__ import annotations

import os
import io
import json
import math
import dataclasses
import numpy as np
import lxml.etree
import optotherm.physics
import optotherm.version

SCHEMA_VERSION = 1
SVG_NAMESPACE = 'http://www.w3.org/2000/svg'
SVG = f'{{{SVG_NAMESPACE}}}'
UNITS = dict(frequency='Hz', linewidth='Hz', area_width='rad^3/s^3',
    power='W', temperature='K', time='s', detuning='Hz', g0='Hz')
# largest number of points drawn per curve
MAX_POINTS = 2000
# figure geometry in px
WIDTH, HEIGHT, MARGIN = 640, 420, 60
COLORS = ('#1f77b4', '#d62728', '#2ca02c', '#ff7f0e', '#9467bd')
BAND_COLORS = dict(thermal='#d62728', probe='#2ca02c', cooling='#1f77b4')

class ReportError(ValueError):
    """Malformed run report"""
    pass

# PURPOSE: convert results into JSON-ready values
def sanitize(value):
    """
    Convert numpy scalars and arrays, tuples and dataclasses into JSON types
    with non-finite numbers replaced by None
    """
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return sanitize(dataclasses.asdict(value))
    if isinstance(value, dict):
        return {str(k): sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize(v) for v in value]
    if isinstance(value, np.ndarray):
        return sanitize(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if hasattr(value, 'value') and isinstance(value.value, str):
        return value.value
    return value

@dataclasses.dataclass
class RunReport:
    """
    Structured record of a command-line run

    Parameters
    ----------
    command: str
        command name
    arguments: dict
        command-line options of the run
    config_digest: str
        sha256 digest of the configuration file
    results: dict
        serialized pipeline results
    """
    command: str
    arguments: dict
    config_digest: str = ''
    results: dict = dataclasses.field(default_factory=dict)
    warnings: list = dataclasses.field(default_factory=list)
    exclusions: dict = dataclasses.field(default_factory=dict)
    plot_data: dict = dataclasses.field(default_factory=dict)
    status: str = 'ok'
    failure: dict | None = None
    duration: float | None = None
    toolkit: dict = dataclasses.field(default_factory=lambda: dict(
        name=optotherm.version.project_name,
        version=optotherm.version.version))
    schema_version: int = SCHEMA_VERSION

    def fail(self, exc, stage):
        """mark the report as failed at ``stage``"""
        self.status = 'failed'
        self.failure = dict(stage=stage, error=exc.__class__.__name__,
            message=str(exc), reasons=getattr(exc, 'reasons', {}))

    def to_dict(self):
        output = dict(schema_version=self.schema_version,
            toolkit=self.toolkit,
            command=dict(name=self.command, arguments=self.arguments),
            config_digest=self.config_digest, results=self.results,
            units=UNITS, warnings=self.warnings, exclusions=self.exclusions,
            plot_data=self.plot_data, status=self.status)
        if self.failure is not None:
            output['failure'] = self.failure
        if self.duration is not None:
            output['duration_s'] = self.duration
        return sanitize(output)

    def to_json(self):
        """report serialized as JSON text"""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2,
            allow_nan=False) + '\n'

    def write(self, filename):
        with open(os.path.expanduser(filename), mode='w', encoding='utf8') as f:
            f.write(self.to_json())

    @classmethod
    def from_json(cls, text):
        """parse a report from JSON text"""
        try:
            d = json.loads(text)
            command = d['command']
            if (d['schema_version'] != SCHEMA_VERSION):
                raise ReportError(f'unsupported schema version {d["schema_version"]!r}')
            return cls(command=command['name'], arguments=command['arguments'],
                config_digest=d['config_digest'], results=d['results'],
                warnings=d['warnings'], exclusions=d['exclusions'],
                plot_data=d['plot_data'], status=d['status'],
                failure=d.get('failure'), duration=d.get('duration_s'),
                toolkit=d['toolkit'], schema_version=d['schema_version'])
        except (ValueError, KeyError, TypeError) as exc:
            if isinstance(exc, ReportError):
                raise
            raise ReportError(f'malformed report: {exc}') from None

    @classmethod
    def read(cls, filename):
        with open(os.path.expanduser(filename), mode='r', encoding='utf8') as f:
            return cls.from_json(f.read())

def _hz(omega):
    return None if omega is None else omega/optotherm.physics.TWO_PI

# PURPOSE: serialize a line fit
def serialize_line(fit):
    if fit is None:
        return None
    return dict(coefficients=fit.coefficients, covariance=fit.covariance,
        reduced_chi_square=fit.reduced_chi_square, chi_square=fit.chi_square,
        dof=fit.dof)

# PURPOSE: serialize the homodyne analysis
def serialize_homodyne(result):
    """JSON-ready summary of a :class:`optotherm.thermometry.HomodyneResult`"""
    steps = []
    for s in result.steps:
        steps.append(dict(step=s.step, power_cool_w=s.power,
            gamma_eff_hz=_hz(s.gamma_eff), gamma_eff_sigma_hz=_hz(s.gamma_eff_sigma),
            area_width=s.area_width, area_width_sigma=s.area_width_sigma,
            occupancy=s.occupancy, occupancy_sigma=s.occupancy_sigma,
            budget=None if s.budget is None else s.budget.as_dict(),
            calibration_gain=s.calibration_gain,
            center_hz=s.fit.center, reduced_chi_square=s.fit.reduced_chi_square))
    return dict(steps=steps, g0_hz=_hz(result.g0), g0_sigma_hz=_hz(result.g0_sigma),
        scale=result.scale, scale_sigma=result.scale_sigma,
        model_reduced_chi_square=result.model_chi_square,
        line=serialize_line(result.line),
        predicted_line=serialize_line(result.predicted_line),
        slope_offset_ratio=result.ratio, slope_offset_ratio_sigma=result.ratio_sigma,
        predicted_slope_offset_ratio=result.predicted_ratio,
        slope_offset_ratio_per_hz=result.ratio*optotherm.physics.TWO_PI,
        heating_k=result.heating, heating_sigma_k=result.heating_sigma,
        quadratic=serialize_line(result.quadratic),
        extra_noise_fraction=result.extra_noise_fraction,
        extra_noise_sigma=result.extra_noise_sigma,
        optical_damping=serialize_line(result.damping_line),
        model_comparison=result.model_comparison)

# PURPOSE: serialize the heterodyne analysis of a power step
def serialize_heterodyne(result):
    """JSON-ready summary of a :class:`optotherm.thermometry.HeterodyneResult`"""
    windows = []
    for w in result.windows:
        windows.append(dict(window=w.window_index, t_mid_s=w.t_mid,
            ratio_light=w.ratio_light, ratio_light_sigma=w.ratio_light_sigma,
            correction=w.correction, correction_sigma=w.correction_sigma,
            correction_method=w.correction_method,
            delta_probe_hz=_hz(w.delta_probe),
            delta_probe_sigma_hz=_hz(w.delta_probe_sigma),
            ratio=w.ratio, ratio_sigma=w.ratio_sigma, occupancy=w.occupancy,
            occupancy_sigma=w.occupancy_sigma, raw_occupancy=w.raw_occupancy,
            gamma_eff_hz=_hz(w.gamma_eff), frequency_hz=_hz(w.omega),
            excluded=w.excluded, reason=w.reason, flags=w.flags))
    return dict(step=result.step, power_cool_w=result.power, windows=windows,
        occupancy_mean=result.occupancy_mean, occupancy_std=result.occupancy_std,
        occupancy_from_mean_ratio=result.occupancy_from_mean_ratio,
        ratio_mean=result.ratio_mean, raw_ratio_mean=result.raw_ratio_mean,
        raw_occupancy=1.0/(result.raw_ratio_mean - 1.0)
            if (result.raw_ratio_mean > 1) else None,
        n_accepted=result.n_accepted, n_excluded=result.n_excluded,
        correction_method=result.correction_method,
        gamma_eff_hz=_hz(result.gamma_eff),
        gamma_eff_sigma_hz=_hz(result.gamma_eff_sigma),
        detuning_track_hz=serialize_line(result.detuning_track))

# PURPOSE: serialize the bath temperature fit
def serialize_bath(result):
    return dict(temperature_k=result.temperature,
        uncertainty_k=result.uncertainty, n_th=result.n_th,
        n_th_sigma=result.n_th_sigma, chi_square=result.chi_square,
        reduced_chi_square=result.reduced_chi_square,
        include_backaction=result.include_backaction,
        model_comparison=result.model_comparison, points=result.points,
        optical_damping=serialize_line(result.damping_line))

# PURPOSE: serialize the multimode detuning analysis
def serialize_detuning(corrections, track):
    windows = [dict(window=c.window_index, t_mid_s=c.t_mid,
        delta_probe_hz=_hz(c.delta_probe),
        delta_probe_sigma_hz=_hz(c.delta_probe_sigma),
        correction=c.correction, correction_sigma=c.correction_sigma,
        interpolated=c.interpolated, reason=c.reason,
        ambiguous=None if c.detuning is None else c.detuning.ambiguous,
        reduced_chi_square=None if c.detuning is None else
            c.detuning.reduced_chi_square)
        for c in corrections]
    return dict(windows=windows, track_hz=serialize_line(track),
        track_order=track.order)

# PURPOSE: write a plot data table
def write_plot_data(directory, name, columns):
    """
    Write columns of equal length as comma-separated text

    Parameters
    ----------
    directory: str
        output directory
    name: str
        file name
    columns: dict
        column arrays keyed by header name

    Returns
    -------
    name: str
        file name relative to ``directory``
    """
    keys = list(columns.keys())
    arrays = [np.atleast_1d(np.asarray(columns[k], dtype=np.float64)) for k in keys]
    if len({len(a) for a in arrays}) > 1:
        raise ValueError(f'columns of {name} have unequal lengths')
    fid = io.StringIO()
    fid.write(','.join(keys) + '\n')
    for row in zip(*arrays):
        fid.write(','.join('' if not np.isfinite(v) else repr(float(v))
            for v in row) + '\n')
    with open(os.path.join(os.path.expanduser(directory), name), mode='w',
        encoding='utf8') as f:
        f.write(fid.getvalue())
    return name

# PURPOSE: read a plot data table
def read_plot_data(filename):
    """columns of a table written by :func:`write_plot_data`"""
    with open(os.path.expanduser(filename), mode='r', encoding='utf8') as fid:
        keys = fid.readline().strip().split(',')
        rows = [line.rstrip('\n').split(',') for line in fid if line.strip()]
    columns = {}
    for i, key in enumerate(keys):
        columns[key] = np.array([float(r[i]) if r[i] else np.nan for r in rows])
    return columns

# PURPOSE: cumulative occupancy budget bands
def stack_bands(columns):
    """
    Lower and upper edges of the stacked thermal, probe and cooling bands

    Returns
    -------
    bands: list
        (name, lower, upper) tuples with the last upper edge the total
    """
    lower = np.zeros_like(columns['thermal'])
    bands = []
    for name in ('thermal', 'probe', 'cooling'):
        upper = lower + columns[name]
        bands.append((name, lower, upper))
        lower = upper
    return bands

def _decimate(x, y):
    if (len(x) <= MAX_POINTS):
        return x, y
    index = np.unique(np.linspace(0, len(x) - 1, MAX_POINTS).astype(int))
    return x[index], y[index]

class Figure:
    """
    Line and scatter figure rendered as an SVG document

    Parameters
    ----------
    title: str
        figure title
    xlabel: str
        horizontal axis label
    ylabel: str
        vertical axis label
    """
    def __init__(self, title, xlabel, ylabel):
        self.title = title
        self.xlabel = xlabel
        self.ylabel = ylabel
        self.items = []

    def line(self, x, y, label, color=None, dashed=False):
        self.items.append(('line', *_decimate(np.asarray(x, dtype=float),
            np.asarray(y, dtype=float)), label, color, dashed))

    def scatter(self, x, y, label, color=None, sigma=None):
        self.items.append(('scatter', np.asarray(x, dtype=float),
            np.asarray(y, dtype=float), label, color, sigma))

    def band(self, x, lower, upper, label, color):
        x = np.asarray(x, dtype=float)
        _, lower = _decimate(x, np.asarray(lower, dtype=float))
        x, upper = _decimate(x, np.asarray(upper, dtype=float))
        self.items.append(('band', x, lower, upper, label, color))

    def _limits(self):
        xs, ys = [], []
        for item in self.items:
            xs.append(item[1])
            ys.extend(item[2:4] if item[0] == 'band' else [item[2]])
        x = np.concatenate(xs)
        y = np.concatenate(ys)
        x, y = x[np.isfinite(x)], y[np.isfinite(y)]
        x0, x1 = (np.min(x), np.max(x)) if x.size else (0.0, 1.0)
        y0, y1 = (np.min(y), np.max(y)) if y.size else (0.0, 1.0)
        if (x1 == x0):
            x0, x1 = x0 - 0.5, x1 + 0.5
        if (y1 == y0):
            y0, y1 = y0 - 0.5, y1 + 0.5
        pad = 0.05*(y1 - y0)
        return x0, x1, y0 - pad, y1 + pad

    def render(self):
        """SVG document as bytes"""
        x0, x1, y0, y1 = self._limits()
        w, h = WIDTH - 2*MARGIN, HEIGHT - 2*MARGIN
        px = lambda x: MARGIN + (x - x0)/(x1 - x0)*w
        py = lambda y: MARGIN + h - (y - y0)/(y1 - y0)*h
        fmt = lambda v: f'{v:.2f}'
        svg = lxml.etree.Element(SVG + 'svg', nsmap={None: SVG_NAMESPACE},
            version='1.1', width=str(WIDTH), height=str(HEIGHT),
            viewBox=f'0 0 {WIDTH} {HEIGHT}')
        title = lxml.etree.SubElement(svg, SVG + 'text', x=str(WIDTH//2), y='24',
            attrib={'text-anchor': 'middle', 'font-size': '16'})
        title.text = self.title
        lxml.etree.SubElement(svg, SVG + 'rect', x=str(MARGIN), y=str(MARGIN),
            width=str(w), height=str(h), fill='none', stroke='black')
        # axis ticks
        for i in range(5):
            xv = x0 + i*(x1 - x0)/4
            yv = y0 + i*(y1 - y0)/4
            t = lxml.etree.SubElement(svg, SVG + 'text', x=fmt(px(xv)),
                y=str(HEIGHT - MARGIN + 16),
                attrib={'text-anchor': 'middle', 'font-size': '10'})
            t.text = f'{xv:.4g}'
            t = lxml.etree.SubElement(svg, SVG + 'text', x=str(MARGIN - 4),
                y=fmt(py(yv)), attrib={'text-anchor': 'end', 'font-size': '10'})
            t.text = f'{yv:.4g}'
        xl = lxml.etree.SubElement(svg, SVG + 'text', x=str(WIDTH//2),
            y=str(HEIGHT - 12), attrib={'text-anchor': 'middle', 'font-size': '12'})
        xl.text = self.xlabel
        yl = lxml.etree.SubElement(svg, SVG + 'text', x='14', y=str(HEIGHT//2),
            transform=f'rotate(-90 14 {HEIGHT//2})',
            attrib={'text-anchor': 'middle', 'font-size': '12'})
        yl.text = self.ylabel
        legend = []
        for i, item in enumerate(self.items):
            kind = item[0]
            group = lxml.etree.SubElement(svg, SVG + 'g', attrib={'class': kind})
            if (kind == 'band'):
                _, x, lower, upper, label, color = item
                points = [(px(a), py(b)) for a, b in zip(x, upper)] + \
                    [(px(a), py(b)) for a, b in zip(x[::-1], lower[::-1])]
                lxml.etree.SubElement(group, SVG + 'polygon', fill=color,
                    attrib={'fill-opacity': '0.5', 'stroke': 'none'},
                    points=' '.join(f'{fmt(a)},{fmt(b)}' for a, b in points))
            elif (kind == 'line'):
                _, x, y, label, color, dashed = item
                color = color or COLORS[i % len(COLORS)]
                valid = np.isfinite(x) & np.isfinite(y)
                attrib = {'fill': 'none', 'stroke': color, 'stroke-width': '1.5'}
                if dashed:
                    attrib['stroke-dasharray'] = '6,3'
                lxml.etree.SubElement(group, SVG + 'polyline', attrib=attrib,
                    points=' '.join(f'{fmt(px(a))},{fmt(py(b))}'
                    for a, b in zip(x[valid], y[valid])))
            else:
                _, x, y, label, color, sigma = item
                color = color or COLORS[i % len(COLORS)]
                for j, (a, b) in enumerate(zip(x, y)):
                    if not (np.isfinite(a) and np.isfinite(b)):
                        continue
                    if sigma is not None and np.isfinite(sigma[j]):
                        lxml.etree.SubElement(group, SVG + 'line', x1=fmt(px(a)),
                            x2=fmt(px(a)), y1=fmt(py(b - sigma[j])),
                            y2=fmt(py(b + sigma[j])), stroke=color)
                    lxml.etree.SubElement(group, SVG + 'circle', cx=fmt(px(a)),
                        cy=fmt(py(b)), r='3', fill=color)
            legend.append((label, color or COLORS[i % len(COLORS)]))
        for i, (label, color) in enumerate(legend):
            y = MARGIN + 14 + 14*i
            lxml.etree.SubElement(svg, SVG + 'rect', x=str(WIDTH - MARGIN - 130),
                y=str(y - 9), width='10', height='10', fill=color)
            t = lxml.etree.SubElement(svg, SVG + 'text', x=str(WIDTH - MARGIN - 115),
                y=str(y), attrib={'font-size': '10'})
            t.text = label
        return lxml.etree.tostring(svg, pretty_print=True,
            xml_declaration=True, encoding='UTF-8')

    def write(self, filename):
        with open(os.path.expanduser(filename), mode='wb') as f:
            f.write(self.render())

# PURPOSE: figures of a report from its plot data
def render(report, directory):
    """
    Summary text and SVG figures of a report

    Parameters
    ----------
    report: obj
        :class:`RunReport`
    directory: str
        directory holding the plot data tables of the report

    Returns
    -------
    summary: str
        human-readable summary
    figures: list
        file names of the SVG figures written to ``directory``
    """
    directory = os.path.expanduser(directory)
    figures = []
    budget = None
    if 'occupancy_budget' in report.plot_data:
        budget = read_plot_data(os.path.join(directory,
            report.plot_data['occupancy_budget']))
    for key, name in sorted(report.plot_data.items()):
        path = os.path.join(directory, name)
        columns = read_plot_data(path)
        figure = _figure(key, columns, budget=budget)
        if figure is None:
            continue
        output = os.path.splitext(name)[0] + '.svg'
        figure.write(os.path.join(directory, output))
        figures.append(output)
    return summary(report), figures

def _figure(key, columns, budget=None):
    if key.endswith('_fit'):
        fig = Figure(key.replace('_', ' '), 'frequency (Hz)', 'PSD')
        fig.line(columns['frequency_hz'], columns['psd'], 'data', color='#7f7f7f')
        fig.line(columns['frequency_hz'], columns['model'], 'fit', color='#d62728')
        return fig
    if (key == 'area_width'):
        fig = Figure('area-width product', 'effective linewidth (Hz)',
            'A Gamma (rad^3/s^3)')
        fig.scatter(columns['gamma_eff_hz'], columns['area_width'], 'measured',
            sigma=columns['area_width_sigma'])
        fig.line(columns['gamma_eff_hz'], columns['model'], 'occupancy model')
        fig.line(columns['gamma_eff_hz'], columns['line'], 'free line', dashed=True)
        fig.line(columns['gamma_eff_hz'], columns['quadratic'], 'quadratic',
            dashed=True)
        return fig
    if (key == 'occupancy_budget'):
        fig = Figure('occupancy budget', 'effective linewidth (Hz)', 'occupancy')
        for name, lower, upper in stack_bands(columns):
            fig.band(columns['gamma_eff_hz'], lower, upper, name,
                BAND_COLORS[name])
        fig.line(columns['gamma_eff_hz'], columns['total'], 'model', color='#000000')
        return fig
    if (key == 'occupancy'):
        fig = Figure('occupancy', 'effective linewidth (Hz)', 'occupancy')
        if budget is not None:
            for name, lower, upper in stack_bands(budget):
                fig.band(budget['gamma_eff_hz'], lower, upper, name,
                    BAND_COLORS[name])
            fig.line(budget['gamma_eff_hz'], budget['total'], 'model',
                color='#000000')
        fig.scatter(columns['gamma_eff_hz'], columns['occupancy'], 'sideband asymmetry',
            sigma=columns['occupancy_sigma'])
        return fig
    if key.startswith('detuning_track'):
        fig = Figure('probe detuning', 'time (s)', 'detuning (Hz)')
        fig.scatter(columns['t_mid_s'], columns['delta_probe_hz'], 'fitted',
            sigma=columns['delta_probe_sigma_hz'])
        fig.line(columns['t_mid_s'], columns['track_hz'], 'track')
        return fig
    return None

# PURPOSE: human-readable summary of a report
def summary(report):
    """summary table of the results of a report"""
    lines = [f'{report.toolkit["name"]} {report.toolkit["version"]}: '
        f'{report.command} ({report.status})']
    results = report.results
    if 'homodyne' in results:
        h = results['homodyne']
        lines.append(f'g0/2pi = {_num(h["g0_hz"])} +/- {_num(h["g0_sigma_hz"])} Hz')
        lines.append(f'heating at max power = {_num(h["heating_k"])} +/- '
            f'{_num(h["heating_sigma_k"])} K')
        lines.append(f'extra noise fraction = {_num(h["extra_noise_fraction"])}'
            f' +/- {_num(h["extra_noise_sigma"])}')
        lines.append(f'{"step":>4} {"P (uW)":>8} {"Gamma (Hz)":>11} {"n":>10}')
        for s in h['steps']:
            lines.append(f'{s["step"]:4d} {1e6*s["power_cool_w"]:8.2f} '
                f'{_num(s["gamma_eff_hz"]):>11} {_num(s["occupancy"]):>10}')
    if 'heterodyne' in results:
        lines.append(f'{"step":>4} {"P (uW)":>8} {"n":>10} {"std":>8} '
            f'{"windows":>7} {"method":>10}')
        for s in results['heterodyne']:
            lines.append(f'{s["step"]:4d} {1e6*s["power_cool_w"]:8.2f} '
                f'{_num(s["occupancy_mean"]):>10} {_num(s["occupancy_std"]):>8} '
                f'{s["n_accepted"]:7d} {s["correction_method"]:>10}')
    if results.get('bath_temperature'):
        b = results['bath_temperature']
        lines.append(f'T_bath = {_num(b["temperature_k"])} +/- '
            f'{_num(b["uncertainty_k"])} K')
    if 'detuning' in results:
        for s in results['detuning']:
            track = s['track_hz']['coefficients'] if s['track_hz'] else []
            lines.append(f'step {s["step"]:d} detuning track (Hz): '
                + ', '.join(_num(c) for c in track))
    if report.failure:
        lines.append(f'FAILED at {report.failure["stage"]}: '
            f'{report.failure["message"]}')
    for w in report.warnings:
        lines.append(f'warning: {w}')
    return '\n'.join(lines) + '\n'

def _num(value):
    return 'n/a' if value is None else f'{value:0.6g}'
