import optotherm.physics
import optotherm.spectrum
import optotherm.synth
import optotherm.fit
import optotherm.thermometry
import optotherm.config
import optotherm.report
import optotherm.utilities
from optotherm.spectrum import Spectrum
from optotherm.thermometry import (homodyne_pipeline, heterodyne_pipeline,
    bath_temperature)
# get version number
import optotherm.version
__version__ = optotherm.version.version
