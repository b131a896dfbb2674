#!/usr/bin/env python
u"""
physics.py
Written by the optotherm developers (10/2026)
Closed-form optomechanics relations for a membrane-in-the-middle cavity
    and the drum-mode geometry of a clamped circular membrane

All angular frequencies are in rad/s.  Ordinary frequencies (Hz) appear only
    in the membrane functions and in the unit conversion helpers.

PYTHON DEPENDENCIES:
    numpy: Scientific Computing Tools For Python
        https://numpy.org
    scipy: Scientific Tools for Python
        https://docs.scipy.org/doc/

UPDATE HISTORY:
    Updated 10/2026: added probe heating rate for zero cooling power steps
        inverse of the cavity filter ratio for the heavy twin transfer
    Updated 09/2026: added membrane stress law and displacement variance
    Written 08/2026
"""
from __future__ import annotations

import enum
import logging
import functools
import dataclasses
import numpy as np
import scipy.special
import scipy.constants

# physical constants (CODATA 2018)
HBAR = scipy.constants.hbar
K_B = scipy.constants.k
TWO_PI = 2.0*np.pi

class InvalidParameterError(ValueError):
    """Physical input outside of its valid domain"""
    pass

class DivergenceError(InvalidParameterError):
    """Back-action occupancy denominator vanishes"""
    pass

class NonPhysicalRatioError(InvalidParameterError):
    """Sideband ratio implies a non-positive or infinite occupancy"""
    pass

class BeamRole(str, enum.Enum):
    PROBE = 'probe'
    COOLING = 'cooling'

class Twin(str, enum.Enum):
    COS = 'cos'
    SIN = 'sin'

# PURPOSE: raise if any of the named values is not strictly positive
def _require_positive(**kwargs):
    for key, val in kwargs.items():
        if not np.all(np.isfinite(val)) or np.any(np.asarray(val) <= 0):
            raise InvalidParameterError(f'{key} must be positive (got {val!r})')

@dataclasses.dataclass(frozen=True)
class CavitySpec:
    """Optical cavity with full linewidth ``kappa`` (rad/s)"""
    kappa: float

    def __post_init__(self):
        _require_positive(kappa=self.kappa)

@dataclasses.dataclass(frozen=True)
class BeamSpec:
    """
    Laser beam driving the cavity

    Parameters
    ----------
    power: float
        input power (W)
    detuning: float
        detuning from the cavity resonance (rad/s)
    role: str
        ``'probe'`` or ``'cooling'``
    """
    power: float
    detuning: float
    role: BeamRole = BeamRole.PROBE

    def __post_init__(self):
        if not np.isfinite(self.power) or (self.power < 0):
            raise InvalidParameterError(f'beam power must be >= 0 (got {self.power!r})')
        if not np.isfinite(self.detuning):
            raise InvalidParameterError('beam detuning must be finite')
        object.__setattr__(self, 'role', BeamRole(self.role))

@dataclasses.dataclass(frozen=True)
class MechanicalMode:
    """
    Membrane normal mode coupled to the cavity

    Parameters
    ----------
    m: int
        azimuthal index
    n: int
        radial index
    twin: str
        ``'cos'`` or ``'sin'`` member of a quasi-degenerate pair
    omega_m: float
        angular resonance frequency (rad/s)
    gamma_m: float
        intrinsic linewidth (rad/s)
    q_factor: float
        mechanical quality factor
    g0: float
        vacuum optomechanical coupling strength (rad/s)
    coupling_weight: float
        overlap of the optical spot with the mode shape
    """
    m: int
    n: int
    twin: Twin
    omega_m: float
    gamma_m: float
    q_factor: float
    g0: float = 0.0
    coupling_weight: float = 1.0

    def __post_init__(self):
        _check_indices(self.m, self.n)
        object.__setattr__(self, 'twin', Twin(self.twin))
        _require_positive(omega_m=self.omega_m, gamma_m=self.gamma_m,
            q_factor=self.q_factor)
        if abs(self.q_factor - self.omega_m/self.gamma_m) > 1e-9*self.q_factor:
            raise InvalidParameterError('q_factor must equal omega_m/gamma_m')
        if not (0.0 <= self.coupling_weight <= 1.0):
            raise InvalidParameterError('coupling_weight must be within [0,1]')
        if not np.isfinite(self.g0) or (self.g0 < 0):
            raise InvalidParameterError('g0 must be >= 0')

    @classmethod
    def from_frequency(cls, m, n, twin, frequency, q_factor=None,
        linewidth=None, **kwargs):
        """
        Build a mode from its ordinary frequency (Hz) and either a quality
        factor or an intrinsic linewidth (Hz)
        """
        omega_m = TWO_PI*frequency
        if linewidth is not None:
            gamma_m = TWO_PI*linewidth
        elif q_factor is not None:
            gamma_m = intrinsic_width(omega_m, q_factor)
        else:
            raise InvalidParameterError('mode needs q_factor or linewidth')
        return cls(m, n, twin, omega_m, gamma_m, omega_m/gamma_m, **kwargs)

@dataclasses.dataclass(frozen=True)
class MembraneSpec:
    """
    Clamped circular membrane with the optical spot at polar position
    (``spot_r``, ``spot_theta``), ``spot_r`` normalized to the radius
    """
    f0: float
    radius: float = 1.0
    spot_r: float = 0.0
    spot_theta: float = 0.0

    def __post_init__(self):
        _require_positive(f0=self.f0, radius=self.radius)
        if not (0.0 <= self.spot_r <= 1.0):
            raise InvalidParameterError('spot_r must be within [0,1]')

@dataclasses.dataclass(frozen=True)
class OccupationBudget:
    """Decomposition of the mean phonon occupancy"""
    n_th_residual: float
    n_ba_cool: float
    n_ba_probe: float
    n_total: float

    def __post_init__(self):
        for field in dataclasses.fields(self):
            val = getattr(self, field.name)
            if not np.isfinite(val) or (val < 0):
                raise InvalidParameterError(f'{field.name} must be >= 0 (got {val!r})')

    def as_dict(self):
        return dataclasses.asdict(self)

# PURPOSE: convert between ordinary and angular frequencies
def hz_to_rad(frequency):
    """Convert an ordinary frequency (Hz) to angular frequency (rad/s)"""
    return TWO_PI*np.asarray(frequency, dtype=np.float64)

def rad_to_hz(omega):
    """Convert an angular frequency (rad/s) to ordinary frequency (Hz)"""
    return np.asarray(omega, dtype=np.float64)/TWO_PI

# PURPOSE: Lorentzian response of the optical cavity
def lorentzian_response(omega, kappa):
    """
    Lorentzian response function of the optical cavity

    Parameters
    ----------
    omega: float or np.ndarray
        angular frequency offset from resonance (rad/s)
    kappa: float
        cavity linewidth (rad/s)

    Returns
    -------
    L: float or np.ndarray
        :math:`1/((\\kappa/2)^2+\\omega^2)`
    """
    _require_positive(kappa=kappa)
    omega = np.asarray(omega, dtype=np.float64)
    L = 1.0/((kappa/2.0)**2 + omega**2)
    return L if L.ndim else float(L)

# PURPOSE: high temperature thermal occupancy
def n_thermal(t_bath, omega_m):
    """
    Mean thermal occupation number in the high temperature limit

    Parameters
    ----------
    t_bath: float
        bath temperature (K)
    omega_m: float
        mechanical angular frequency (rad/s)
    """
    _require_positive(t_bath=t_bath, omega_m=omega_m)
    return K_B*t_bath/(HBAR*omega_m)

# PURPOSE: invert the high temperature law
def temperature_from_occupancy(n_th, omega_m):
    """Bath temperature (K) corresponding to a thermal occupancy"""
    _require_positive(omega_m=omega_m)
    return n_th*HBAR*omega_m/K_B

# PURPOSE: zero-point fluctuation amplitude
def x_zpf(m_eff, omega_m):
    """
    Zero-point fluctuation amplitude of the oscillator

    Parameters
    ----------
    m_eff: float
        effective mass (kg)
    omega_m: float
        mechanical angular frequency (rad/s)

    Returns
    -------
    x: float
        :math:`\\sqrt{\\hbar/2 m_{eff}\\Omega_m}` (m)
    """
    _require_positive(m_eff=m_eff, omega_m=omega_m)
    return np.sqrt(HBAR/(2.0*m_eff*omega_m))

# PURPOSE: variance of the displacement for a given occupancy
def displacement_variance(m_eff, omega_m, n):
    """Displacement peak area 2 x_zpf^2 (1/2 + n) (m^2)"""
    return 2.0*x_zpf(m_eff, omega_m)**2*(0.5 + n)

# PURPOSE: vacuum coupling from the frequency pull parameter
def g0_from_pull(G, x):
    """Vacuum optomechanical coupling g0 = G x_zpf (rad/s)"""
    return G*x

# PURPOSE: intrinsic mechanical linewidth
def intrinsic_width(omega_m, q_factor):
    """Intrinsic linewidth Omega_m/Q (rad/s)"""
    _require_positive(omega_m=omega_m, q_factor=q_factor)
    return omega_m/q_factor

# PURPOSE: classical plateau of the displacement area-width product
def classical_area_width(t_bath, m_eff, omega_m, q_factor):
    """
    Classical displacement area-width product k_B T/(m_eff Omega_m Q)

    Equals A_x Gamma_eff in the limit of vanishing back-action, where
    optical damping leaves the product unchanged
    """
    _require_positive(t_bath=t_bath, m_eff=m_eff)
    return K_B*t_bath/(m_eff*omega_m*q_factor)

# PURPOSE: Stokes to anti-Stokes filter gain ratio of the cavity
def _sideband_gain(delta, omega_m, kappa):
    return lorentzian_response(delta + omega_m, kappa) / \
        lorentzian_response(delta - omega_m, kappa)

# PURPOSE: cooling beam back-action occupancy
def n_ba_cool(delta_cool, omega_m, kappa):
    """
    Occupancy limit set by the quantum back-action of the cooling beam

    Parameters
    ----------
    delta_cool: float
        cooling beam detuning (rad/s)
    omega_m: float
        mechanical angular frequency (rad/s)
    kappa: float
        cavity linewidth (rad/s)

    Returns
    -------
    n: float
        :math:`[L(\\Delta+\\Omega_m)/L(\\Delta-\\Omega_m)-1]^{-1}`
    """
    _require_positive(omega_m=omega_m, kappa=kappa)
    if (delta_cool == 0):
        raise DivergenceError('cooling detuning of zero gives no net damping')
    denominator = _sideband_gain(delta_cool, omega_m, kappa) - 1.0
    if (denominator == 0):
        raise DivergenceError('cooling back-action denominator vanishes')
    n = 1.0/denominator
    if (delta_cool > 0):
        logging.warning(f'Blue detuned cooling beam gives n_ba_cool={n:0.4g}')
    return n

# PURPOSE: back-action occupancy added by the probe beam
def n_ba_probe(probe, cool, omega_m, kappa):
    """
    Occupancy added by the probe beam relative to the cooling beam

    Parameters
    ----------
    probe: obj
        probe :class:`BeamSpec`
    cool: obj
        cooling :class:`BeamSpec`
    omega_m: float
        mechanical angular frequency (rad/s)
    kappa: float
        cavity linewidth (rad/s)
    """
    if (cool.power <= 0):
        raise InvalidParameterError('cooling power must be positive')
    return n_ba_cool(cool.detuning, omega_m, kappa)*(probe.power/cool.power)* \
        _probe_weight(probe.detuning, cool.detuning, omega_m, kappa)

def _probe_weight(delta_probe, delta_cool, omega_m, kappa):
    L = functools.partial(lorentzian_response, kappa=kappa)
    return (L(delta_probe)/L(delta_cool)) * \
        (L(delta_probe + omega_m) + L(delta_probe - omega_m)) / \
        (L(delta_cool + omega_m) + L(delta_cool - omega_m))

# PURPOSE: probe heating rate which is independent of the cooling power
def probe_heating_rate(probe, delta_cool, optical_damping, omega_m, kappa):
    """
    Probe back-action heating rate (phonons/s)

    The probe occupancy times the optical damping of the cooling beam does
    not depend on the cooling power, which sets the probe term of a step
    without cooling light as rate/Gamma_m

    Parameters
    ----------
    probe: obj
        probe :class:`BeamSpec`
    delta_cool: float
        cooling beam detuning (rad/s)
    optical_damping: float
        optical damping per unit cooling power (rad/s/W)
    omega_m: float
        mechanical angular frequency (rad/s)
    kappa: float
        cavity linewidth (rad/s)
    """
    return n_ba_cool(delta_cool, omega_m, kappa)*probe.power*optical_damping* \
        _probe_weight(probe.detuning, delta_cool, omega_m, kappa)

# PURPOSE: total effective occupancy
def n_total(n_th, gamma_m, gamma_eff, n_ba_cool, n_ba_probe):
    """
    Total effective occupancy of an optically damped mode

    Parameters
    ----------
    n_th: float
        thermal bath occupancy
    gamma_m: float
        intrinsic linewidth (rad/s)
    gamma_eff: float
        effective linewidth (rad/s)
    n_ba_cool: float
        cooling beam back-action occupancy
    n_ba_probe: float
        probe beam back-action occupancy

    Returns
    -------
    budget: obj
        :class:`OccupationBudget`
    """
    _check_widths(gamma_m, gamma_eff)
    residual = n_th*(gamma_m/gamma_eff)
    return OccupationBudget(n_th_residual=residual, n_ba_cool=n_ba_cool,
        n_ba_probe=n_ba_probe, n_total=residual + n_ba_cool + n_ba_probe)

# PURPOSE: area times width of the frequency fluctuation peak
def area_width_product(g0, gamma_m, gamma_eff, n_th, n_ba_cool, n_ba_probe):
    """
    Area-width product of a peak in the cavity frequency fluctuation spectrum

    Parameters
    ----------
    g0: float
        vacuum optomechanical coupling (rad/s)
    gamma_m: float
        intrinsic linewidth (rad/s)
    gamma_eff: float
        effective linewidth (rad/s)
    n_th: float
        thermal bath occupancy
    n_ba_cool: float
        cooling beam back-action occupancy
    n_ba_probe: float
        probe beam back-action occupancy

    Returns
    -------
    product: float
        :math:`2 g_0^2\\Gamma_m[n_{th}+(n_{ba}+1/2)\\Gamma_{eff}/\\Gamma_m]`
        in (rad/s)^3
    """
    _check_widths(gamma_m, gamma_eff)
    return 2.0*g0**2*gamma_m*(n_th +
        (n_ba_cool + n_ba_probe + 0.5)*gamma_eff/gamma_m)

def _check_widths(gamma_m, gamma_eff):
    _require_positive(gamma_m=gamma_m)
    if not np.isfinite(gamma_eff) or (gamma_eff < gamma_m):
        raise InvalidParameterError('gamma_eff must be >= gamma_m')

# PURPOSE: sideband asymmetry for an occupancy
def sideband_ratio_from_n(n):
    """Stokes to anti-Stokes ratio (n+1)/n"""
    if not np.isfinite(n) or (n <= 0):
        raise NonPhysicalRatioError(f'occupancy must be positive (got {n!r})')
    return (n + 1.0)/n

# PURPOSE: occupancy from a sideband asymmetry
def n_from_ratio(r):
    """Occupancy 1/(R-1) from a Stokes to anti-Stokes ratio"""
    if not np.isfinite(r) or (r <= 1.0):
        raise NonPhysicalRatioError(f'sideband ratio must exceed 1 (got {r!r})')
    return 1.0/(r - 1.0)

# PURPOSE: filter bias of a detuned probe on the sideband ratio
def cavity_filter_ratio(delta_probe, omega_m, kappa):
    """
    Ratio L(Delta-Omega_m)/L(Delta+Omega_m) between the cavity gains at the
    Stokes and anti-Stokes sidebands of a probe with detuning ``delta_probe``
    """
    _require_positive(omega_m=omega_m, kappa=kappa)
    ratio = lorentzian_response(np.subtract(delta_probe, omega_m), kappa) / \
        lorentzian_response(np.add(delta_probe, omega_m), kappa)
    return ratio

# PURPOSE: derivative of the filter ratio with respect to the probe detuning
def cavity_filter_slope(delta_probe, omega_m, kappa):
    """Derivative of :func:`cavity_filter_ratio` with respect to the detuning"""
    h2 = (kappa/2.0)**2
    plus = h2 + np.add(delta_probe, omega_m)**2
    minus = h2 + np.subtract(delta_probe, omega_m)**2
    return 2.0*(np.add(delta_probe, omega_m)*minus -
        np.subtract(delta_probe, omega_m)*plus)/minus**2

# PURPOSE: probe detuning giving a filter ratio at one mode frequency
def detuning_from_ratio(ratio, omega_m, kappa):
    """
    Inverse of :func:`cavity_filter_ratio` with respect to the detuning

    Parameters
    ----------
    ratio: float
        Stokes to anti-Stokes filter gain ratio
    omega_m: float
        mechanical angular frequency (rad/s)
    kappa: float
        cavity linewidth (rad/s)

    Returns
    -------
    delta_probe: float
        root of smaller magnitude (rad/s)
    """
    _require_positive(omega_m=omega_m, kappa=kappa)
    if not np.isfinite(ratio) or (ratio <= 0):
        raise NonPhysicalRatioError(f'filter ratio must be positive (got {ratio!r})')
    # (r-1) D^2 - 2 W (r+1) D + (r-1) (W^2 + k^2) = 0
    h2 = (kappa/2.0)**2
    b = omega_m*(ratio + 1.0)
    c = (ratio - 1.0)*(omega_m**2 + h2)
    discriminant = b**2 - (ratio - 1.0)*c
    if (discriminant < 0):
        raise NonPhysicalRatioError(f'no probe detuning gives a filter ratio '
            f'of {ratio:0.6g}')
    return float(c/(b + np.sqrt(discriminant)))

def _check_indices(m, n):
    if (int(m) != m) or (m < 0):
        raise InvalidParameterError(f'azimuthal index must be >= 0 (got {m!r})')
    if (int(n) != n) or (n < 1):
        raise InvalidParameterError(f'radial index must be >= 1 (got {n!r})')

# PURPOSE: zeros of the Bessel function of the first kind
@functools.lru_cache(maxsize=None)
def _bessel_zeros(m, nt):
    return scipy.special.jn_zeros(m, nt)

def bessel_root(m, n):
    """
    n-th positive zero of the Bessel function J_m

    Parameters
    ----------
    m: int
        order of the Bessel function
    n: int
        index of the root
    """
    _check_indices(m, n)
    return float(_bessel_zeros(int(m), int(n))[-1])

# PURPOSE: drum mode frequency of a clamped circular membrane
def mode_frequency(membrane, m, n):
    """Frequency (Hz) of the (m,n) drum mode, f0 alpha_mn"""
    return membrane.f0*bessel_root(m, n)

# PURPOSE: frequency scale of the drum modes from the membrane properties
def membrane_f0(stress, density, diameter):
    """
    Frequency scale of the drum modes

    Parameters
    ----------
    stress: float
        membrane stress (Pa)
    density: float
        membrane density (kg/m^3)
    diameter: float
        membrane diameter (m)

    Returns
    -------
    f0: float
        :math:`\\sqrt{T/\\rho}/(\\pi\\Phi)` (Hz)
    """
    _require_positive(stress=stress, density=density, diameter=diameter)
    return np.sqrt(stress/density)/(np.pi*diameter)

# PURPOSE: normalized mode shape of a drum mode
def mode_shape(m, n, twin, r, theta):
    """
    Displacement of the (m,n) drum mode at polar position (r, theta)

    Parameters
    ----------
    m: int
        azimuthal index
    n: int
        radial index
    twin: str
        ``'cos'`` or ``'sin'``
    r: float
        radial position normalized to the membrane radius
    theta: float
        polar angle (rad)
    """
    if np.any(np.asarray(r) < 0) or np.any(np.asarray(r) > 1):
        raise InvalidParameterError('radial position must be within [0,1]')
    radial = scipy.special.jv(m, bessel_root(m, n)*np.asarray(r))
    if (Twin(twin) == Twin.COS):
        angular = np.cos(m*np.asarray(theta))
    else:
        angular = np.sin(m*np.asarray(theta))
    shape = radial*angular
    return shape if np.ndim(shape) else float(shape)

# PURPOSE: optical coupling weight of a drum mode at the optical spot
def mode_coupling_weight(m, n, twin, r, theta):
    """
    Magnitude of the mode shape at the spot normalized to the maximum of
    the radial profile, in [0,1]
    """
    if (m == 0):
        peak = 1.0
    else:
        # radial maximum of J_m at the first zero of its derivative
        peak = abs(scipy.special.jv(m, scipy.special.jnp_zeros(m, 1)[0]))
    weight = abs(mode_shape(m, n, twin, r, theta))/peak
    return float(np.clip(weight, 0.0, 1.0))
