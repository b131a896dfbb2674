#!/usr/bin/env python
u"""
test_spectrum_io.py (10/2026)
"""
import io
import pytest
import numpy as np
import scipy.integrate
import optotherm.spectrum
from optotherm.spectrum import Spectrum, SpectrumFormatError

# PURPOSE: spectrum with header metadata
@pytest.fixture
def spectrum():
    f = 330e3 + 2.5*np.arange(200)
    values = 0.02 + optotherm.spectrum.lorentzian_peak(f, 330.2e3, 20.0, 1.5)
    return Spectrum(330e3, 2.5, values, kind='heterodyne', units='raw',
        averaging_count=10, window_index=3, window_duration=10.0,
        metadata=dict(step=2, power_cool_w=36e-6, t_start_s=230.0))

def test_lorentzian_peak():
    f = np.linspace(-1e5, 1e5, 2000001)
    peak = optotherm.spectrum.lorentzian_peak(f, 0.0, 10.0, 2.0)
    assert peak.max() == pytest.approx(2.0/(np.pi*5.0))
    # area within a window much wider than the peak
    assert scipy.integrate.trapezoid(peak, f) == pytest.approx(2.0, rel=1e-3)

def test_spectrum_validation():
    with pytest.raises(SpectrumFormatError):
        Spectrum(0.0, 0.0, [1.0, 2.0])
    with pytest.raises(SpectrumFormatError):
        Spectrum(0.0, 1.0, [1.0])
    with pytest.raises(SpectrumFormatError):
        Spectrum(0.0, 1.0, [1.0, -1.0])
    with pytest.raises(SpectrumFormatError):
        Spectrum(0.0, 1.0, [1.0, np.nan])
    with pytest.raises(SpectrumFormatError):
        Spectrum(0.0, 1.0, [1.0, 2.0], averaging_count=0)
    with pytest.raises(ValueError):
        Spectrum(0.0, 1.0, [1.0, 2.0], kind='interferometer')

def test_spectrum_properties(spectrum):
    assert spectrum.step == 2
    assert spectrum.power_cool == 36e-6
    assert spectrum.t_mid == pytest.approx(235.0)
    assert spectrum.frequencies[-1] == pytest.approx(330e3 + 2.5*199)
    scaled = spectrum.scaled(0.5, units='frequency')
    assert np.allclose(scaled.values, 0.5*spectrum.values)
    assert scaled.units == optotherm.spectrum.Units.FREQUENCY
    assert scaled.metadata == spectrum.metadata
    assert scaled.metadata is not spectrum.metadata

# PURPOSE: comma-separated spectrum files
def test_csv(spectrum, tmp_path):
    path = tmp_path / 'heterodyne_step02_window03.csv'
    optotherm.spectrum.to_csv(spectrum, str(path))
    text = path.read_text()
    assert text.startswith('# kind=heterodyne\n')
    assert '\nfrequency_hz,psd\n' in text
    copy = optotherm.spectrum.from_csv(str(path))
    assert np.array_equal(copy.values, spectrum.values)
    assert copy.header() == spectrum.header()
    # written to an open text buffer
    fid = io.StringIO()
    optotherm.spectrum.to_csv(spectrum, fid)
    assert fid.getvalue() == text

def test_csv_errors(spectrum, tmp_path):
    good = io.StringIO()
    optotherm.spectrum.to_csv(spectrum, good)
    lines = good.getvalue().splitlines()
    header = sum(1 for line in lines if not line[0].isdigit())
    cases = {
        'negative': (header + 5, '330012.5,-1.0'),
        'text': (header + 5, '330012.5,abc'),
        'gap': (header + 5, '330013.0,0.02'),
    }
    for name, (lineno, replacement) in cases.items():
        modified = list(lines)
        modified[lineno - 1] = replacement
        path = tmp_path / f'{name}.csv'
        path.write_text('\n'.join(modified) + '\n')
        with pytest.raises(SpectrumFormatError, match=f'{name}.csv:{lineno:d}'):
            optotherm.spectrum.from_csv(str(path))
    # unknown header
    path = tmp_path / 'header.csv'
    path.write_text('# color=blue\n' + '\n'.join(lines[header:]) + '\n')
    with pytest.raises(SpectrumFormatError, match='header.csv:1'):
        optotherm.spectrum.from_csv(str(path))
    # too few bins
    path = tmp_path / 'short.csv'
    path.write_text('\n'.join(lines[:header + 1]) + '\n')
    with pytest.raises(SpectrumFormatError):
        optotherm.spectrum.from_csv(str(path))

# PURPOSE: HDF5 spectrum files
def test_hdf5(spectrum, tmp_path):
    pytest.importorskip('h5py')
    path = str(tmp_path / 'spectra.h5')
    other = spectrum.replace(kind='homodyne', units='frequency', window_index=0)
    optotherm.spectrum.to_hdf5(dict(b=spectrum, a=other), path,
        attributes=dict(software='optotherm'))
    spectra = optotherm.spectrum.from_hdf5(path)
    assert list(spectra) == ['a', 'b']
    assert np.array_equal(spectra['b'].values, spectrum.values)
    assert spectra['b'].header() == spectrum.header()
    assert spectra['a'].kind == optotherm.spectrum.Kind.HOMODYNE

# PURPOSE: HDF5 requests without h5py installed
def test_hdf5_missing(spectrum, tmp_path, monkeypatch):
    monkeypatch.setattr(optotherm.spectrum, 'h5py', None)
    path = str(tmp_path / 'spectra.h5')
    with pytest.raises(ImportError, match='optotherm HDF5 spectra need h5py'):
        optotherm.spectrum.to_hdf5(dict(a=spectrum), path)
    with pytest.raises(ImportError, match='h5py'):
        optotherm.spectrum.from_hdf5(path)
    # CSV spectra are unaffected
    optotherm.spectrum.to_csv(spectrum, str(tmp_path / 'a.csv'))

# PURPOSE: read files and directories sorted by kind, step and window
def test_load(spectrum, tmp_path):
    names = []
    for step in (1, 0):
        for window in (1, 0):
            s = spectrum.replace(window_index=window,
                metadata=dict(step=step, power_cool_w=12e-6*(step + 1),
                t_start_s=0.0))
            name = tmp_path / f'heterodyne_step{step:02d}_window{window:02d}.csv'
            optotherm.spectrum.to_csv(s, str(name))
            names.append(name)
    homodyne = spectrum.replace(kind='homodyne', window_index=0)
    optotherm.spectrum.to_csv(homodyne, str(tmp_path / 'homodyne_step00.csv'))
    spectra = optotherm.spectrum.load([str(tmp_path)])
    assert [(s.kind.value, s.step, s.window_index) for s in spectra] == [
        ('heterodyne', 0, 0), ('heterodyne', 0, 1), ('heterodyne', 1, 0),
        ('heterodyne', 1, 1), ('homodyne', 2, 0)]
    spectra = optotherm.spectrum.load([str(names[0])])
    assert len(spectra) == 1
