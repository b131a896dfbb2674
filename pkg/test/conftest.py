import pytest
import dataclasses
import optotherm.config
import optotherm.physics
import optotherm.synth
import optotherm.thermometry

TWO_PI = optotherm.physics.TWO_PI

# weakly coupled reference modes: label, indices and frequency (Hz)
REFERENCES = (('m01', (0, 1), 232.3e3), ('m21', (2, 1), 496.1e3),
    ('m02', (0, 2), 533.2e3), ('m12', (1, 2), 677.7e3))

def pytest_addoption(parser):
    parser.addoption("--seed", action="store", type=int, default=0,
        help="Random seed of the synthesized measurement noise")

@pytest.fixture(scope="session")
def seed(request):
    """ Returns the random seed of synthesized spectra """
    return request.config.getoption("--seed")

@pytest.fixture(scope="session")
def cavity():
    """ Returns the cryogenic cavity with a 1.4 MHz linewidth """
    return optotherm.physics.CavitySpec(TWO_PI*1.4e6)

@pytest.fixture(scope="session")
def light_mode():
    """ Returns the strongly coupled (1,1) twin """
    return optotherm.physics.MechanicalMode.from_frequency(1, 1, 'cos',
        370.1e3, q_factor=8.9e6, g0=TWO_PI*31.0, coupling_weight=1.0)

@pytest.fixture(scope="session")
def make_scenario(cavity, light_mode):
    """
    Returns a builder of cooling run scenarios with the light twin,
    optionally a heavy twin and weakly coupled reference modes with
    negligible thermal asymmetry
    """
    def builder(heavy=False, references=True, probe_detuning=0.0,
        heavy_weight=0.002, heavy_linewidth=4.0, heavy_occupancy=1e5,
        **kwargs):
        modes = [optotherm.synth.SynthMode('light', light_mode, role='light')]
        if heavy:
            mode = optotherm.physics.MechanicalMode.from_frequency(1, 1,
                'sin', 370.16e3, linewidth=heavy_linewidth,
                coupling_weight=heavy_weight)
            modes.append(optotherm.synth.SynthMode('heavy', mode,
                role='heavy', occupancy=heavy_occupancy))
        if references:
            for label, (m, n), frequency in REFERENCES:
                mode = optotherm.physics.MechanicalMode.from_frequency(m, n,
                    'cos', frequency, linewidth=40.0, coupling_weight=2e-6)
                modes.append(optotherm.synth.SynthMode(label, mode,
                    occupancy=1e12))
        fields = dict(cavity=cavity, modes=modes,
            probe=optotherm.physics.BeamSpec(18e-6, TWO_PI*probe_detuning),
            cool_detuning=-TWO_PI*700e3,
            power_schedule=(12e-6, 24e-6, 36e-6, 48e-6, 60e-6),
            delta_lo=TWO_PI*9e3, bath_temperature=7.0,
            optical_damping=TWO_PI*9.6281e7, optical_spring=TWO_PI*3.33e7,
            homodyne_background=optotherm.synth.Background(0.02),
            heterodyne_background=optotherm.synth.Background(1e-4),
            window_count=2, rng_seed=0)
        fields.update(kwargs)
        return optotherm.synth.SynthScenario(**fields)
    return builder

@pytest.fixture(scope="session")
def make_config():
    """
    Returns a builder of analysis configurations matching a scenario with
    the registry entries of chosen modes replaced
    """
    def builder(scenario, replace={}, extra=(), **kwargs):
        config = optotherm.config.thermometry_config_from_scenario(scenario)
        modes = tuple(dataclasses.replace(m, **replace.get(m.label, {}))
            for m in config.modes) + tuple(extra)
        return optotherm.config.thermometry_config_from_scenario(scenario,
            modes=modes, **kwargs)
    return builder
