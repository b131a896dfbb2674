#!/usr/bin/env python
u"""
cli.py
Written by the optotherm developers (10/2026)
Command-line interface for synthesizing cooling runs, analyzing spectra
    and rendering reports

COMMANDS:
    modes: drum mode table of the configured membrane
    synth: write the spectra and ground truth of a scenario
    analyze: run the homodyne, heterodyne or detuning analysis of spectra
    render: summary table and SVG figures of a report

COMMAND LINE OPTIONS:
    -c X, --config X: configuration file
    -O X, --out X: output directory
    --seed X: random seed of synthesized noise
    --windows X: windows per power step
    --correction X: filter correction (heavy-twin or multimode)
    --mask X: frequency range lo:hi masked in every fit (repeatable)
    --format X: spectrum file format (csv, hdf5 or both)
    --noiseless: synthesize without measurement noise
    --timing: record the wall-clock duration in the report
    -V, --verbose: verbose output of run
    -M X, --mode X: permissions mode of the output files

EXIT CODES:
    0: success
    2: configuration or input format error
    3: fit or pipeline failure
    4: input or output error

PYTHON DEPENDENCIES:
    numpy: Scientific Computing Tools For Python
        https://numpy.org

PROGRAM DEPENDENCIES:
    config.py: configuration files
    synth.py: ground-truth spectra
    spectrum.py: spectrum files
    thermometry.py: occupancy estimators
    report.py: run reports and figures
    utilities.py: argument files and digests

UPDATE HISTORY:
    Updated 10/2026: HDF5 output of synthesized spectra
    Updated 09/2026: partial reports with failure markers
    Written 09/2026
"""
from __future__ import annotations

import os
import sys
import json
import time
import logging
import argparse
import numpy as np
import optotherm.config
import optotherm.fit
import optotherm.physics
import optotherm.report
import optotherm.spectrum
import optotherm.synth
import optotherm.thermometry
import optotherm.utilities
import optotherm.version

TWO_PI = optotherm.physics.TWO_PI
REPORT = 'report.json'
TRUTH = 'truth.json'

# exception families and their exit codes
EXIT_CODES = (
    ((optotherm.config.ConfigError, optotherm.spectrum.SpectrumFormatError,
        optotherm.report.ReportError,
        optotherm.physics.InvalidParameterError), 2),
    ((optotherm.fit.FitError, optotherm.thermometry.PipelineError), 3),
    ((OSError,), 4),
)

def exit_code(exc):
    """exit code of an exception raised by a command"""
    for families, code in EXIT_CODES:
        if isinstance(exc, families):
            return code
    return 1

def _chmod(path, mode):
    if mode is not None:
        os.chmod(path, mode)

# PURPOSE: print the drum mode table of a membrane
def cmd_modes(config):
    """
    Drum mode table of the membrane of a configuration file

    Parameters
    ----------
    config: str
        configuration file

    Returns
    -------
    rows: list
        mode table rows
    """
    membrane, max_m, max_n = optotherm.config.read_membrane(config)
    if membrane is None:
        raise optotherm.config.ConfigError(f'{os.path.basename(config)}: '
            'no membrane_f0_hz or membrane stress, density and diameter')
    rows = optotherm.config.mode_table(membrane, max_m=max_m, max_n=max_n)
    print(f'{"m":>2} {"n":>2} {"alpha_mn":>10} {"f (kHz)":>10} '
        f'{"w_cos":>8} {"w_sin":>8}')
    for row in rows:
        print(f'{row["m"]:2d} {row["n"]:2d} {row["bessel_root"]:10.6f} '
            f'{row["frequency_hz"]/1e3:10.3f} {row["weight_cos"]:8.4f} '
            f'{row["weight_sin"]:8.4f}')
    return rows

# PURPOSE: spectrum file names of a run
def homodyne_name(step):
    return f'homodyne_step{step:02d}'

def heterodyne_name(step, window):
    return f'heterodyne_step{step:02d}_window{window:02d}'

# PURPOSE: write the spectra and ground truth of a scenario
def cmd_synth(config, out, seed=None, windows=None, fmt='csv', noise=True,
    mode=0o775):
    """
    Synthesize the spectra of a cooling run

    Parameters
    ----------
    config: str
        scenario configuration file
    out: str
        output directory
    seed: int or NoneType, default None
        replace the random seed of the scenario
    windows: int or NoneType, default None
        replace the windows per power step
    fmt: str, default 'csv'
        ``'csv'``, ``'hdf5'`` or ``'both'``
    noise: bool, default True
        apply measurement noise
    mode: oct, default 0o775
        permissions mode of the output files

    Returns
    -------
    files: list
        output files
    """
    scenario = optotherm.config.read_scenario(config, seed=seed, windows=windows)
    series = optotherm.synth.cooling_series(scenario, noise=noise)
    out = os.path.expanduser(out)
    os.makedirs(out, exist_ok=True)
    spectra = {}
    for step, (power, homodyne, heterodyne) in enumerate(series):
        spectra[homodyne_name(step)] = homodyne
        for spectrum in heterodyne:
            spectra[heterodyne_name(step, spectrum.window_index)] = spectrum
    files = []
    if fmt in ('csv', 'both'):
        for name, spectrum in spectra.items():
            path = os.path.join(out, f'{name}.csv')
            optotherm.spectrum.to_csv(spectrum, path)
            _chmod(path, mode)
            files.append(path)
    if fmt in ('hdf5', 'both'):
        path = os.path.join(out, 'spectra.h5')
        optotherm.spectrum.to_hdf5(spectra, path,
            attributes=dict(software=optotherm.version.project_name,
                version=optotherm.version.version,
                rng_seed=scenario.rng_seed))
        _chmod(path, mode)
        files.append(path)
    path = os.path.join(out, TRUTH)
    truth = optotherm.report.sanitize(optotherm.synth.ground_truth(scenario))
    with open(path, mode='w', encoding='utf8') as f:
        f.write(json.dumps(truth, sort_keys=True, indent=2, allow_nan=False) + '\n')
    _chmod(path, mode)
    files.append(path)
    logging.info(f'Wrote {len(files):d} files to {out}')
    return files

# PURPOSE: group spectra by kind and power step
def _group(spectra):
    homodyne, heterodyne = [], {}
    for s in spectra:
        if (s.kind == optotherm.spectrum.Kind.HOMODYNE):
            homodyne.append((s.power_cool, s))
        else:
            heterodyne.setdefault(s.step, []).append(s)
    return homodyne, dict(sorted(heterodyne.items()))

def _fit_columns(spectrum, fit, gain=1.0):
    f = spectrum.frequencies
    valid = np.zeros(len(f), dtype=bool)
    for lo, hi in (fit.window if isinstance(fit.window[0], tuple) else [fit.window]):
        valid |= (f >= lo) & (f <= hi)
    return dict(frequency_hz=f[valid], psd=spectrum.values[valid]/gain,
        model=fit.model(f[valid]))

# PURPOSE: homodyne analysis with plot data
def _analyze_homodyne(spectra, config, out, report):
    result = optotherm.thermometry.homodyne_pipeline(spectra, config)
    report.results['homodyne'] = optotherm.report.serialize_homodyne(result)
    report.warnings.extend(result.warnings)
    report.exclusions.update({f'homodyne_step{k:02d}': v
        for k, v in result.excluded.items()})
    gamma = np.array([s.gamma_eff for s in result.steps])
    report.plot_data['area_width'] = optotherm.report.write_plot_data(out,
        'area_width.csv', dict(gamma_eff_hz=gamma/TWO_PI,
        power_cool_w=[s.power for s in result.steps],
        area_width=[s.area_width for s in result.steps],
        area_width_sigma=[s.area_width_sigma for s in result.steps],
        model=[s.area_width_model for s in result.steps],
        line=result.line.evaluate(gamma),
        quadratic=result.quadratic.evaluate(gamma)))
    lookup = {s.step: s for _, s in spectra}
    for s in result.steps:
        name = f'{homodyne_name(s.step)}_fit'
        report.plot_data[name] = optotherm.report.write_plot_data(out,
            f'{name}.csv', _fit_columns(lookup[s.step], s.fit,
            gain=s.calibration_gain))

# PURPOSE: heterodyne analysis with plot data
def _analyze_heterodyne(groups, config, out, report):
    series = []
    for step, windows in groups.items():
        result = optotherm.thermometry.heterodyne_pipeline(windows, config)
        series.append(result)
        report.warnings.extend(result.warnings)
        report.exclusions.update({f'{heterodyne_name(step, k)}': v
            for k, v in result.exclusions.items()})
        accepted = [w for w in result.windows if not w.excluded]
        lookup = {s.window_index: s for s in windows}
        name = f'{heterodyne_name(step, accepted[0].window_index)}_fit'
        report.plot_data[name] = optotherm.report.write_plot_data(out,
            f'{name}.csv', _fit_columns(lookup[accepted[0].window_index],
            accepted[0].fit))
    report.results['heterodyne'] = [optotherm.report.serialize_heterodyne(r)
        for r in series]
    report.plot_data['occupancy'] = optotherm.report.write_plot_data(out,
        'occupancy.csv', dict(step=[r.step for r in series],
        power_cool_w=[r.power for r in series],
        gamma_eff_hz=[r.gamma_eff/TWO_PI for r in series],
        occupancy=[r.occupancy_mean for r in series],
        occupancy_sigma=[r.occupancy_sigma for r in series],
        occupancy_std=[r.occupancy_std for r in series],
        occupancy_from_mean_ratio=[r.occupancy_from_mean_ratio for r in series]))
    report.results['bath_temperature'] = None
    if (len(series) >= 3):
        try:
            bath = optotherm.thermometry.bath_temperature(series, config)
        except optotherm.thermometry.PipelineError as exc:
            message = f'bath temperature not fitted: {exc}'
            logging.warning(message)
            report.warnings.append(message)
        else:
            report.results['bath_temperature'] = optotherm.report.serialize_bath(bath)
            if bath.budget_curve and bath.budget_curve['gamma_eff']:
                curve = dict(bath.budget_curve)
                curve['gamma_eff_hz'] = np.array(curve.pop('gamma_eff'))/TWO_PI
                report.plot_data['occupancy_budget'] = \
                    optotherm.report.write_plot_data(out,
                    'occupancy_budget.csv', curve)

# PURPOSE: multimode detuning analysis with plot data
def _analyze_detuning(groups, config, out, report):
    results = []
    for step, windows in groups.items():
        windows = sorted(windows, key=lambda s: s.window_index)
        corrections, track = optotherm.thermometry.correction_multimode(
            windows, config)
        entry = optotherm.report.serialize_detuning(corrections, track)
        entry['step'] = step
        results.append(entry)
        for c in corrections:
            if c.interpolated and c.reason:
                report.warnings.append(f'{heterodyne_name(step, c.window_index)}: '
                    f'detuning interpolated ({c.reason})')
        t = np.array([c.t_mid for c in corrections])
        name = f'detuning_track_step{step:02d}'
        report.plot_data[name] = optotherm.report.write_plot_data(out,
            f'{name}.csv', dict(t_mid_s=t,
            delta_probe_hz=[c.delta_probe/TWO_PI for c in corrections],
            delta_probe_sigma_hz=[c.delta_probe_sigma/TWO_PI for c in corrections],
            track_hz=track.evaluate(t)/TWO_PI,
            track_sigma_hz=track.evaluate_sigma(t)/TWO_PI,
            correction=[c.correction for c in corrections]))
    report.results['detuning'] = results

# PURPOSE: analyze spectra and write a report
def cmd_analyze(kind, inputs, config, out, correction=None, masks=(),
    windows=None, timing=False, mode=0o775):
    """
    Run an analysis and write its report and plot data

    Parameters
    ----------
    kind: str
        ``'homodyne'``, ``'heterodyne'`` or ``'detuning'``
    inputs: list
        spectrum files or directories
    config: str
        analysis configuration file
    out: str
        output directory
    correction: str or NoneType, default None
        replace the filter correction method
    masks: list, default ()
        frequency ranges (Hz) masked in every fit
    windows: int or NoneType, default None
        number of windows per power step
    timing: bool, default False
        record the wall-clock duration
    mode: oct, default 0o775
        permissions mode of the output files

    Returns
    -------
    report: obj
        :class:`optotherm.report.RunReport`
    code: int
        exit code
    """
    start = time.perf_counter()
    out = os.path.expanduser(out)
    os.makedirs(out, exist_ok=True)
    arguments = dict(kind=kind, inputs=list(inputs), config=config,
        correction=correction, masks=[list(m) for m in masks], windows=windows)
    report = optotherm.report.RunReport('analyze', arguments,
        config_digest=optotherm.utilities.get_hash(config, algorithm='sha256'))
    stage = 'config'
    code = 0
    try:
        settings = optotherm.config.read_thermometry_config(config,
            correction=correction, masks=masks, windows=windows)
        stage = 'input'
        spectra = optotherm.spectrum.load(inputs)
        homodyne, groups = _group(spectra)
        if windows is not None:
            groups = {k: [s for s in v if s.window_index < windows]
                for k, v in groups.items()}
        stage = kind
        if (kind == 'homodyne'):
            if not homodyne:
                raise optotherm.thermometry.PipelineError('no homodyne spectra')
            _analyze_homodyne(homodyne, settings, out, report)
        elif (kind == 'heterodyne'):
            if not groups:
                raise optotherm.thermometry.PipelineError('no heterodyne spectra')
            _analyze_heterodyne(groups, settings, out, report)
        else:
            if not groups:
                raise optotherm.thermometry.PipelineError('no heterodyne spectra')
            _analyze_detuning(groups, settings, out, report)
    except Exception as exc:
        code = exit_code(exc)
        if (code == 1):
            raise
        logging.error(f'{stage}: {exc}')
        report.fail(exc, stage)
    if timing:
        report.duration = time.perf_counter() - start
    path = os.path.join(out, REPORT)
    report.write(path)
    _chmod(path, mode)
    for name in report.plot_data.values():
        _chmod(os.path.join(out, name), mode)
    return report, code

# PURPOSE: summary and figures of a report
def cmd_render(report_path, mode=0o775):
    """
    Print the summary of a report and write its SVG figures

    Parameters
    ----------
    report_path: str
        report file
    mode: oct, default 0o775
        permissions mode of the output files

    Returns
    -------
    figures: list
        SVG files written next to the report
    """
    report = optotherm.report.RunReport.read(report_path)
    directory = os.path.dirname(os.path.abspath(os.path.expanduser(report_path)))
    summary, figures = optotherm.report.render(report, directory)
    print(summary, end='')
    for name in figures:
        _chmod(os.path.join(directory, name), mode)
    return [os.path.join(directory, f) for f in figures]

def _mask(value):
    try:
        return optotherm.config.parse_range(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))

# PURPOSE: create argument parser
def arguments():
    parser = argparse.ArgumentParser(
        description="""Phonon occupancy thermometry of optically cooled
            membrane modes from homodyne and heterodyne spectra
            """,
        fromfile_prefix_chars="@"
    )
    parser.convert_arg_line_to_args = optotherm.utilities.convert_arg_line_to_args
    parser.add_argument('--version', action='version',
        version=optotherm.version.full_version)
    subparsers = parser.add_subparsers(dest='command', required=True)
    # options shared by every command
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose','-V',
        default=False, action='store_true',
        help='Verbose output of run')
    common.add_argument('--mode','-M',
        type=lambda x: int(x,base=8), default=0o775,
        help='Permissions mode of output files')
    config = argparse.ArgumentParser(add_help=False)
    config.add_argument('--config','-c',
        type=lambda p: os.path.abspath(os.path.expanduser(p)), required=True,
        help='Configuration file')
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument('--out','-O',
        type=lambda p: os.path.abspath(os.path.expanduser(p)),
        default=os.getcwd(),
        help='Output directory')
    output.add_argument('--windows',
        type=int, default=None,
        help='Windows per power step')
    # drum mode table
    modes = subparsers.add_parser('modes', parents=[common, config],
        help='Drum mode table of the membrane')
    modes.set_defaults(func=lambda args: cmd_modes(args.config) and 0)
    # synthesis
    synth = subparsers.add_parser('synth', parents=[common, config, output],
        help='Synthesize the spectra of a cooling run')
    synth.add_argument('--seed',
        type=int, default=None,
        help='Random seed of the measurement noise')
    synth.add_argument('--format',
        type=str, default='csv', choices=('csv','hdf5','both'),
        help='Output spectrum file format')
    synth.add_argument('--noiseless',
        default=False, action='store_true',
        help='Synthesize without measurement noise')
    synth.set_defaults(func=lambda args: cmd_synth(args.config, args.out,
        seed=args.seed, windows=args.windows, fmt=args.format,
        noise=not args.noiseless, mode=args.mode) and 0)
    # analysis
    analyze = subparsers.add_parser('analyze', parents=[common, config, output],
        help='Analyze spectra and write a report')
    analyze.add_argument('inputs',
        type=str, nargs='+',
        help='Spectrum files or directories')
    analyze.add_argument('--kind',
        type=str, required=True, choices=('homodyne','heterodyne','detuning'),
        help='Analysis to run')
    analyze.add_argument('--correction',
        type=str, default=None, choices=optotherm.thermometry.CORRECTIONS,
        help='Cavity filter correction method')
    analyze.add_argument('--mask',
        type=_mask, action='append', default=[],
        help='Frequency range lo:hi (Hz) masked in every fit')
    analyze.add_argument('--timing',
        default=False, action='store_true',
        help='Record the wall-clock duration in the report')
    analyze.set_defaults(func=lambda args: cmd_analyze(args.kind, args.inputs,
        args.config, args.out, correction=args.correction,
        masks=args.mask, windows=args.windows, timing=args.timing,
        mode=args.mode)[1])
    # rendering
    render = subparsers.add_parser('render', parents=[common],
        help='Summary table and SVG figures of a report')
    render.add_argument('report',
        type=lambda p: os.path.abspath(os.path.expanduser(p)),
        help='Report file')
    render.set_defaults(func=lambda args: cmd_render(args.report,
        mode=args.mode) and 0)
    # return the parser
    return parser

# This is the main part of the program that calls the individual functions
def main(argv=None):
    # Read the system arguments listed after the program
    parser = arguments()
    args = parser.parse_args(argv)
    # create logger for verbosity level
    loglevel = logging.INFO if args.verbose else logging.CRITICAL
    logging.basicConfig(level=loglevel)
    try:
        return args.func(args) or 0
    except Exception as exc:
        code = exit_code(exc)
        if (code == 1):
            raise
        print(f'{args.command}: {exc}', file=sys.stderr)
        return code

# run main program
if __name__ == '__main__':
    sys.exit(main())
