#!/usr/bin/env python
u"""
spectrum.py
Written by the optotherm developers (10/2026)
Power spectral densities on uniform frequency grids with readers and
    writers for comma-separated text and HDF5 files

CSV FORMAT:
    header lines of the form ``# key=value`` (kind, n_avg, window, units,
    step, power_cool_w, t_start_s, window_s, f_start, f_step), a column
    header ``frequency_hz,psd`` and one row per frequency bin

PYTHON DEPENDENCIES:
    numpy: Scientific Computing Tools For Python
        https://numpy.org
    h5py: Python interface for Hierarchal Data Format 5 (HDF5)
        https://www.h5py.org/

UPDATE HISTORY:
    Updated 10/2026: read and write groups of spectra in HDF5 files
        name the missing h5py install when HDF5 files are requested
    Updated 09/2026: reject non-uniform grids with the offending line number
    Written 08/2026
"""
from __future__ import annotations

import os
import io
import enum
import logging
import warnings
import dataclasses
import numpy as np

# attempt imports
try:
    import h5py
except (ImportError, ModuleNotFoundError) as exc:
    h5py = None
    warnings.filterwarnings("module")
    warnings.warn("h5py not available", ImportWarning)
    warnings.warn("Some functions will throw an exception if called", ImportWarning)

# PURPOSE: check the optional HDF5 dependency
def _require_h5py():
    if h5py is None:
        raise ImportError('optotherm HDF5 spectra need h5py '
            '(pip install h5py), CSV spectra work without it')

class SpectrumFormatError(ValueError):
    """Malformed or non-physical spectrum"""
    pass

class Kind(str, enum.Enum):
    HOMODYNE = 'homodyne'
    HETERODYNE = 'heterodyne'

class Units(str, enum.Enum):
    # cavity frequency fluctuations (Hz^2/Hz)
    FREQUENCY = 'frequency'
    # detector units with unknown gain
    RAW = 'raw'

# header keys and their parsers
_HEADER = dict(kind=str, n_avg=int, window=int, units=str, step=int,
    power_cool_w=float, t_start_s=float, window_s=float,
    f_start=float, f_step=float)
COLUMNS = 'frequency_hz,psd'

@dataclasses.dataclass
class Spectrum:
    """
    Power spectral density sampled on a uniform frequency grid

    Parameters
    ----------
    f_start: float
        frequency of the first bin (Hz)
    f_step: float
        bin spacing (Hz)
    values: np.ndarray
        power spectral density
    kind: str
        ``'homodyne'`` or ``'heterodyne'``
    units: str
        ``'frequency'`` for calibrated cavity frequency fluctuations or
        ``'raw'`` for detector units
    averaging_count: int
        number of averaged periodograms
    window_index: int
        index of the acquisition window within a power step
    window_duration: float
        acquisition time of the window (s)
    metadata: dict
        power step, cooling power and window start time
    """
    f_start: float
    f_step: float
    values: np.ndarray
    kind: Kind = Kind.HOMODYNE
    units: Units = Units.FREQUENCY
    averaging_count: int = 1
    window_index: int = 0
    window_duration: float = 0.0
    metadata: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.kind = Kind(self.kind)
        self.units = Units(self.units)
        if not (self.f_step > 0):
            raise SpectrumFormatError('frequency step must be positive')
        if (self.values.ndim != 1) or (len(self.values) < 2):
            raise SpectrumFormatError('spectrum needs at least 2 bins')
        bad, = np.nonzero(~np.isfinite(self.values) | (self.values < 0))
        if bad.size:
            raise SpectrumFormatError(f'invalid PSD value at bin {bad[0]:d}')
        if (self.averaging_count < 1):
            raise SpectrumFormatError('averaging count must be >= 1')

    @property
    def frequencies(self):
        """frequency of each bin (Hz)"""
        return self.f_start + self.f_step*np.arange(len(self.values))

    @property
    def step(self):
        return int(self.metadata.get('step', 0))

    @property
    def power_cool(self):
        return float(self.metadata.get('power_cool_w', 0.0))

    @property
    def t_start(self):
        return float(self.metadata.get('t_start_s', 0.0))

    @property
    def t_mid(self):
        """midpoint time of the acquisition window (s)"""
        return self.t_start + 0.5*self.window_duration

    def replace(self, **kwargs):
        """copy of the spectrum with fields replaced"""
        kwargs.setdefault('metadata', dict(self.metadata))
        return dataclasses.replace(self, **kwargs)

    def scaled(self, factor, units=None):
        """copy of the spectrum with the PSD multiplied by ``factor``"""
        return self.replace(values=self.values*factor,
            units=self.units if units is None else units)

    def header(self):
        """ordered header values for the CSV format"""
        return dict(kind=self.kind.value, n_avg=self.averaging_count,
            window=self.window_index, units=self.units.value, step=self.step,
            power_cool_w=self.power_cool, t_start_s=self.t_start,
            window_s=float(self.window_duration),
            f_start=float(self.f_start), f_step=float(self.f_step))

# PURPOSE: area-normalized Lorentzian peak
def lorentzian_peak(frequency, center, fwhm, area):
    """
    Lorentzian peak with integral ``area``

    Parameters
    ----------
    frequency: np.ndarray
        frequencies (Hz)
    center: float
        peak frequency (Hz)
    fwhm: float
        full width at half maximum (Hz)
    area: float
        integral of the peak (PSD units times Hz)
    """
    h = 0.5*fwhm
    return (area/np.pi)*h/((np.asarray(frequency) - center)**2 + h**2)

# PURPOSE: write a spectrum to a comma-separated file
def to_csv(spectrum, filename):
    """
    Write a spectrum as comma-separated text

    Parameters
    ----------
    spectrum: obj
        :class:`Spectrum`
    filename: str or obj
        output file path or text file object
    """
    fid = io.StringIO()
    for key, val in spectrum.header().items():
        fid.write(f'# {key}={val!r}\n' if isinstance(val, float) else
            f'# {key}={val}\n')
    fid.write(f'{COLUMNS}\n')
    for f, v in zip(spectrum.frequencies, spectrum.values):
        fid.write(f'{float(f)!r},{float(v)!r}\n')
    if isinstance(filename, io.IOBase):
        filename.write(fid.getvalue())
    else:
        with open(os.path.expanduser(filename), mode='w', encoding='utf8') as f:
            f.write(fid.getvalue())

# PURPOSE: read a spectrum from a comma-separated file
def from_csv(filename):
    """
    Read a spectrum from comma-separated text

    Parameters
    ----------
    filename: str
        path to the spectrum file

    Returns
    -------
    spectrum: obj
        :class:`Spectrum`
    """
    header = {}
    frequency, values = [], []
    name = os.path.basename(str(filename))
    with open(os.path.expanduser(filename), mode='r', encoding='utf8') as fid:
        for lineno, line in enumerate(fid, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith('#'):
                key, sep, val = line.lstrip('#').strip().partition('=')
                if not sep or (key not in _HEADER):
                    raise SpectrumFormatError(f'{name}:{lineno:d}: '
                        f'unknown header line {line!r}')
                try:
                    header[key] = _HEADER[key](val.strip())
                except ValueError:
                    raise SpectrumFormatError(f'{name}:{lineno:d}: '
                        f'invalid value for {key}') from None
                continue
            if (line == COLUMNS):
                continue
            try:
                f, v = (float(x) for x in line.split(','))
            except ValueError:
                raise SpectrumFormatError(f'{name}:{lineno:d}: '
                    f'expected two numbers, got {line!r}') from None
            if not np.isfinite(v) or (v < 0):
                raise SpectrumFormatError(f'{name}:{lineno:d}: '
                    f'invalid PSD value {v!r}')
            frequency.append((lineno, f))
            values.append(v)
    if (len(values) < 2):
        raise SpectrumFormatError(f'{name}: spectrum needs at least 2 bins')
    f_start = header.get('f_start', frequency[0][1])
    f_step = header.get('f_step', frequency[1][1] - frequency[0][1])
    if not (f_step > 0):
        raise SpectrumFormatError(f'{name}: frequency step must be positive')
    # verify the frequency grid is uniform
    for i, (lineno, f) in enumerate(frequency):
        if abs(f - (f_start + i*f_step)) > 1e-6*f_step:
            raise SpectrumFormatError(f'{name}:{lineno:d}: '
                f'non-uniform frequency grid at {f!r} Hz')
    metadata = {key: header[key] for key in ('step','power_cool_w','t_start_s')
        if key in header}
    return Spectrum(f_start, f_step, np.array(values),
        kind=header.get('kind', 'homodyne'),
        units=header.get('units', 'frequency'),
        averaging_count=header.get('n_avg', 1),
        window_index=header.get('window', 0),
        window_duration=header.get('window_s', 0.0),
        metadata=metadata)

# PURPOSE: write a list of spectra to a HDF5 file
def to_hdf5(spectra, filename, attributes={}):
    """
    Write spectra to a HDF5 file with one group per spectrum

    Parameters
    ----------
    spectra: dict
        :class:`Spectrum` objects keyed by group name
    filename: str
        output HDF5 file
    attributes: dict, default {}
        global file attributes
    """
    _require_h5py()
    with h5py.File(os.path.expanduser(filename), 'w') as fileID:
        for key, val in attributes.items():
            fileID.attrs[key] = val
        for name, spectrum in spectra.items():
            group = fileID.create_group(name)
            group.create_dataset('psd', data=spectrum.values,
                compression='gzip')
            for key, val in spectrum.header().items():
                group.attrs[key] = val

# PURPOSE: read spectra from a HDF5 file
def from_hdf5(filename):
    """
    Read spectra written by :func:`to_hdf5`

    Returns
    -------
    spectra: dict
        :class:`Spectrum` objects keyed by group name
    """
    spectra = {}
    _require_h5py()
    with h5py.File(os.path.expanduser(filename), 'r') as fileID:
        for name in sorted(fileID.keys()):
            group = fileID[name]
            attrs = {key: group.attrs[key] for key in _HEADER
                if key in group.attrs}
            for key in ('kind', 'units'):
                if isinstance(attrs.get(key), bytes):
                    attrs[key] = attrs[key].decode('utf8')
            metadata = dict(step=int(attrs['step']),
                power_cool_w=float(attrs['power_cool_w']),
                t_start_s=float(attrs['t_start_s']))
            spectra[name] = Spectrum(float(attrs['f_start']),
                float(attrs['f_step']), group['psd'][:],
                kind=attrs['kind'], units=attrs['units'],
                averaging_count=int(attrs['n_avg']),
                window_index=int(attrs['window']),
                window_duration=float(attrs['window_s']),
                metadata=metadata)
    logging.info(f'Read {len(spectra):d} spectra from {filename}')
    return spectra

# PURPOSE: read every spectrum within a file or directory
def load(paths):
    """
    Read spectra from CSV files, HDF5 files or directories of CSV files

    Parameters
    ----------
    paths: list
        input files or directories

    Returns
    -------
    spectra: list
        :class:`Spectrum` objects sorted by kind, step and window
    """
    spectra = []
    for path in paths:
        path = os.path.expanduser(path)
        if os.path.isdir(path):
            files = sorted(os.path.join(path, f) for f in os.listdir(path)
                if f.endswith('.csv'))
        else:
            files = [path]
        for f in files:
            if f.endswith(('.h5', '.hdf5')):
                spectra.extend(from_hdf5(f).values())
            else:
                spectra.append(from_csv(f))
    spectra.sort(key=lambda s: (s.kind.value, s.step, s.window_index))
    return spectra
