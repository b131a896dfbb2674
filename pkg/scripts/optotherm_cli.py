#!/usr/bin/env python
u"""
optotherm_cli.py
Written by the optotherm developers (10/2026)

Synthesizes cooling runs of an optomechanical membrane, estimates phonon
occupancies from homodyne and heterodyne spectra and renders reports

CALLING SEQUENCE:
    python optotherm_cli.py modes --config membrane.cfg
    python optotherm_cli.py synth --config cooling_run.cfg --out run
    python optotherm_cli.py analyze --kind heterodyne --config cooling_run.cfg \
        --out run/analysis run
    python optotherm_cli.py render run/analysis/report.json

COMMANDS:
    modes: drum mode table of the configured membrane
    synth: write the spectra and ground truth of a scenario
    analyze: run the homodyne, heterodyne or detuning analysis of spectra
    render: summary table and SVG figures of a report

COMMAND LINE OPTIONS:
    --help: list the command line options
    -c X, --config X: configuration file
    -O X, --out X: output directory
    --seed X: random seed of synthesized noise
    --windows X: windows per power step
    --kind X: analysis to run (homodyne, heterodyne or detuning)
    --correction X: filter correction (heavy-twin or multimode)
    --mask X: frequency range lo:hi masked in every fit (repeatable)
    --format X: spectrum file format (csv, hdf5 or both)
    --noiseless: synthesize without measurement noise
    --timing: record the wall-clock duration in the report
    -V, --verbose: Verbose output of run
    -M X, --mode X: Local permissions mode of the output files

PYTHON DEPENDENCIES:
    numpy: Scientific Computing Tools For Python
        https://numpy.org
    scipy: Scientific Tools for Python
        https://docs.scipy.org/doc/
    h5py: Python interface for Hierarchal Data Format 5 (HDF5)
        https://www.h5py.org/
    lxml: Pythonic XML and HTML processing library using libxml2/libxslt
        https://lxml.de/
        https://github.com/lxml/lxml

PROGRAM DEPENDENCIES:
    cli.py: command-line interface of the package

UPDATE HISTORY:
    Written 10/2026
"""
import sys
import optotherm.cli

# run main program
if __name__ == '__main__':
    sys.exit(optotherm.cli.main())
