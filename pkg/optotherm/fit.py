#!/usr/bin/env python
u"""
fit.py
Written by the optotherm developers (10/2026)
Least-squares estimators for spectral peaks, sideband doublets, weighted
    polynomials and the probe detuning

Spectral fits use an area-parameterized Lorentzian on a linear background
    with analytic Jacobians.  The first pass uses uniform weights and the
    second pass weights each bin by model/sqrt(N), the standard deviation of
    an average of N periodograms

PYTHON DEPENDENCIES:
    numpy: Scientific Computing Tools For Python
        https://numpy.org
    scipy: Scientific Tools for Python
        https://docs.scipy.org/doc/

PROGRAM DEPENDENCIES:
    physics.py: cavity filter ratio and its derivative

UPDATE HISTORY:
    Updated 10/2026: doublets fit on two sideband sub-windows
        fixed background of neighbouring peaks in doublet fits
        reject peaks narrower than the frequency resolution before solving
    Updated 09/2026: tie-break between near-equal detuning minima
    Written 08/2026
"""
from __future__ import annotations

import logging
import dataclasses
import numpy as np
import scipy.optimize
import scipy.integrate
import optotherm.physics

# minimum number of bins in a spectral fit window
MIN_BINS = 50
# function evaluations allowed for the 200 solver iterations
MAX_NFEV = 400
# number of trial detunings in the bracketing scan
SCAN_POINTS = 4001

class FitError(RuntimeError):
    """Estimator could not produce a result"""
    pass

class DegenerateWindowError(FitError):
    """Fit window without enough bins or without a peak"""
    pass

class ConvergenceError(FitError):
    """Solver stopped before meeting the convergence criteria"""
    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate

class UnresolvableDoubletError(FitError):
    """Sidebands too close to be separated"""
    pass

class NoMinimumError(FitError):
    """Detuning cost has no interior minimum"""
    pass

class RankDeficiencyError(FitError):
    """Design matrix of a polynomial fit is rank deficient"""
    pass

@dataclasses.dataclass
class LorentzianFit:
    """
    Lorentzian peak on a linear background

    The background is ``background_offset + background_slope*(f - reference)``
    with ``reference`` the center of the fit window
    """
    center: float
    fwhm: float
    area: float
    background_offset: float
    background_slope: float
    reference_frequency: float
    uncertainties: dict
    covariance: np.ndarray
    reduced_chi_square: float
    converged: bool = True
    n_bins: int = 0
    window: tuple = ()
    mask: tuple = ()

    def model(self, frequency):
        """fitted model evaluated at ``frequency`` (Hz)"""
        x = np.asarray(frequency) - self.reference_frequency
        p = [self.background_offset, self.background_slope,
            self.center - self.reference_frequency, self.fwhm, self.area]
        return lorentzian_model(p, x)

@dataclasses.dataclass
class DoubletFit:
    """
    Pair of Lorentzian sidebands of equal width at mean_center +/-
    half_splitting on a linear background
    """
    mean_center: float
    fwhm: float
    area_stokes: float
    area_antistokes: float
    half_splitting: float
    background_offset: float
    background_slope: float
    reference_frequency: float
    uncertainties: dict
    covariance: np.ndarray
    reduced_chi_square: float
    converged: bool = True
    n_bins: int = 0
    window: tuple = ()
    mask: tuple = ()

    @property
    def ratio(self):
        """Stokes to anti-Stokes area ratio"""
        return self.area_stokes/self.area_antistokes

    @property
    def ratio_uncertainty(self):
        var_s, var_a = self.covariance[4,4], self.covariance[5,5]
        cov = self.covariance[4,5]
        rel = var_s/self.area_stokes**2 + var_a/self.area_antistokes**2 - \
            2.0*cov/(self.area_stokes*self.area_antistokes)
        return self.ratio*np.sqrt(max(rel, 0.0))

    def model(self, frequency):
        """fitted model evaluated at ``frequency`` (Hz)"""
        x = np.asarray(frequency) - self.reference_frequency
        p = [self.background_offset, self.background_slope,
            self.mean_center - self.reference_frequency, self.fwhm,
            self.area_stokes, self.area_antistokes]
        return doublet_model(p, x, self.half_splitting)

    def sidebands(self, frequency):
        """fitted sidebands without the background at ``frequency`` (Hz)"""
        x = np.asarray(frequency) - self.mean_center
        return _lorentzian(x, self.half_splitting, self.fwhm, self.area_stokes) + \
            _lorentzian(x, -self.half_splitting, self.fwhm, self.area_antistokes)

@dataclasses.dataclass
class LineFit:
    """
    Weighted polynomial with coefficients in increasing order

    A polynomial through exactly order+1 points interpolates them with no
    degrees of freedom left and its reduced chi-square is NaN
    """
    coefficients: np.ndarray
    covariance: np.ndarray
    reduced_chi_square: float
    chi_square: float = 0.0
    dof: int = 0

    @property
    def order(self):
        return len(self.coefficients) - 1

    @property
    def interpolates(self):
        """polynomial passes exactly through its points"""
        return (self.dof == 0)

    def evaluate(self, x):
        """polynomial evaluated at ``x``"""
        return np.polynomial.polynomial.polyval(x, self.coefficients)

    def evaluate_sigma(self, x):
        """standard deviation of the polynomial at ``x``"""
        V = np.vander(np.atleast_1d(x), self.order + 1, increasing=True)
        var = np.einsum('ij,jk,ik->i', V, self.covariance, V)
        return np.sqrt(np.clip(var, 0, None))

    def scaled_covariance(self):
        """covariance inflated by the reduced chi-square when above 1"""
        scale = self.reduced_chi_square if np.isfinite(self.reduced_chi_square) else 1.0
        return self.covariance*max(1.0, scale)

    def slope_offset_ratio(self, scaled=False):
        """ratio between the linear and constant coefficients with uncertainty"""
        c0, c1 = self.coefficients[0], self.coefficients[1]
        V = self.scaled_covariance() if scaled else self.covariance
        rho = c1/c0
        rel = V[1,1]/c1**2 + V[0,0]/c0**2 - 2.0*V[0,1]/(c0*c1) if (c1 != 0) \
            else V[1,1]/c0**2
        sigma = abs(rho)*np.sqrt(max(rel, 0.0)) if (c1 != 0) else np.sqrt(rel)
        return rho, sigma

@dataclasses.dataclass
class DetuningFit:
    """probe detuning (rad/s) inferred from sideband ratios of several modes"""
    delta_probe: float
    uncertainty: float
    reduced_chi_square: float
    ambiguous: bool = False
    n_modes: int = 0

# PURPOSE: Lorentzian on a linear background
def lorentzian_model(p, x):
    """
    Area-parameterized Lorentzian on a linear background

    Parameters
    ----------
    p: list
        offset, slope, center, full width and area
    x: np.ndarray
        frequency relative to the reference (Hz)
    """
    b0, b1, x0, gamma, area = p
    return b0 + b1*x + _lorentzian(x, x0, gamma, area)

def lorentzian_jacobian(p, x):
    """Jacobian of :func:`lorentzian_model` with respect to ``p``"""
    b0, b1, x0, gamma, area = p
    J = np.empty((len(x), 5))
    J[:,0] = 1.0
    J[:,1] = x
    J[:,2:5] = _lorentzian_derivatives(x, x0, gamma, area)
    return J

# PURPOSE: pair of sidebands on a linear background
def doublet_model(p, x, half_splitting):
    """
    Pair of equal width Lorentzians on a linear background

    Parameters
    ----------
    p: list
        offset, slope, mean center, full width, Stokes and anti-Stokes areas
    x: np.ndarray
        frequency relative to the reference (Hz)
    half_splitting: float
        half of the separation between the sidebands (Hz)
    """
    b0, b1, xc, gamma, a_s, a_a = p
    return b0 + b1*x + _lorentzian(x, xc + half_splitting, gamma, a_s) + \
        _lorentzian(x, xc - half_splitting, gamma, a_a)

def doublet_jacobian(p, x, half_splitting):
    """Jacobian of :func:`doublet_model` with respect to ``p``"""
    b0, b1, xc, gamma, a_s, a_a = p
    ds = _lorentzian_derivatives(x, xc + half_splitting, gamma, a_s)
    da = _lorentzian_derivatives(x, xc - half_splitting, gamma, a_a)
    J = np.empty((len(x), 6))
    J[:,0] = 1.0
    J[:,1] = x
    J[:,2] = ds[:,0] + da[:,0]
    J[:,3] = ds[:,1] + da[:,1]
    J[:,4] = ds[:,2]
    J[:,5] = da[:,2]
    return J

def _lorentzian(x, x0, gamma, area):
    h = 0.5*gamma
    return (area/np.pi)*h/((x - x0)**2 + h**2)

# derivatives with respect to center, width and area
def _lorentzian_derivatives(x, x0, gamma, area):
    h = 0.5*gamma
    u = x - x0
    D = u**2 + h**2
    dx0 = (area/np.pi)*2.0*h*u/D**2
    dgamma = (area/(2.0*np.pi))*(u**2 - h**2)/D**2
    darea = h/(np.pi*D)
    return np.column_stack((dx0, dgamma, darea))

# PURPOSE: select the unmasked bins of a fit window
def _select(spectrum, window, mask):
    f = spectrum.frequencies
    valid = np.zeros(len(f), dtype=bool)
    for lo, hi in window:
        valid |= (f >= lo) & (f <= hi)
    for lo, hi in (mask or ()):
        valid &= ~((f >= lo) & (f <= hi))
    if (np.count_nonzero(valid) < MIN_BINS):
        raise DegenerateWindowError(f'fit window has {np.count_nonzero(valid):d} '
            f'bins after masking (need {MIN_BINS:d})')
    return f[valid], spectrum.values[valid]

# PURPOSE: straight line through the window edges
def _edge_line(x, y):
    k = max(3, len(x)//20)
    x1, y1 = np.median(x[:k]), np.median(y[:k])
    x2, y2 = np.median(x[-k:]), np.median(y[-k:])
    slope = (y2 - y1)/(x2 - x1) if (x2 != x1) else 0.0
    return y1 - slope*x1, slope

# PURPOSE: two-pass weighted Levenberg-Marquardt
def _solve(model, jacobian, p0, x, y, averaging_count, fixed=None):
    # fixed contribution of other peaks added to the model
    fixed = np.zeros_like(y) if fixed is None else fixed
    scale = np.max(np.abs(y)) or 1.0
    sigma = np.full_like(y, scale)
    result = None
    for iteration in range(2):
        def residuals(p, sigma=sigma):
            return (model(p, x) + fixed - y)/sigma
        def jac(p, sigma=sigma):
            return jacobian(p, x)/sigma[:,np.newaxis]
        result = scipy.optimize.least_squares(residuals, p0, jac=jac,
            method='lm', x_scale='jac', xtol=1e-10, ftol=1e-12, gtol=1e-12,
            max_nfev=MAX_NFEV)
        if (result.status <= 0):
            raise ConvergenceError(f'least squares stopped: {result.message}',
                last_iterate=result.x)
        p0 = result.x
        # per-bin standard deviation of the averaged periodogram
        expected = np.abs(model(p0, x) + fixed)
        floor = 1e-12*np.max(expected) if np.any(expected > 0) else 1e-300
        sigma = np.maximum(expected, floor)/np.sqrt(averaging_count)
    covariance = np.linalg.pinv(result.jac.T @ result.jac)
    covariance = 0.5*(covariance + covariance.T)
    dof = len(y) - len(p0)
    chi_square = np.sum(result.fun**2)
    reduced = chi_square/dof if (dof > 0) else np.nan
    return result.x, covariance, reduced

# PURPOSE: flip the sign convention so that the linewidth is positive
def _normalize_sign(p, covariance, width_index, area_indices):
    p = np.array(p, dtype=np.float64)
    if (p[width_index] < 0):
        flip = np.ones(len(p))
        flip[[width_index, *area_indices]] = -1.0
        p *= flip
        covariance = covariance*np.outer(flip, flip)
    return p, covariance

def _uncertainties(names, covariance):
    return {n: float(np.sqrt(max(covariance[i,i], 0.0)))
        for i, n in enumerate(names)}

# PURPOSE: reject peaks narrower than the frequency resolution
def _check_resolution(width, min_width):
    if (min_width is not None) and not (width >= min_width):
        raise DegenerateWindowError(f'linewidth {width:0.4g} Hz below the '
            f'frequency resolution ({min_width:0.4g} Hz)')

# PURPOSE: fit a single Lorentzian peak
def fit_lorentzian(spectrum, window, mask=None, min_width=None):
    """
    Fit an area-parameterized Lorentzian on a linear background

    Parameters
    ----------
    spectrum: obj
        :class:`optotherm.spectrum.Spectrum`
    window: tuple
        lower and upper frequency of the fit window (Hz)
    mask: list or NoneType, default None
        frequency ranges (Hz) excluded from the fit
    min_width: float or NoneType, default None
        reject peaks whose estimated width is below this value (Hz)

    Returns
    -------
    fit: obj
        :class:`LorentzianFit`
    """
    f_lo, f_hi = window
    f, y = _select(spectrum, [(f_lo, f_hi)], mask)
    reference = 0.5*(f_lo + f_hi)
    x = f - reference
    # initial guesses from the peak moments above the edge background
    b0, b1 = _edge_line(x, y)
    excess = y - (b0 + b1*x)
    imax = int(np.argmax(excess))
    height = excess[imax]
    if not (height > 0):
        raise DegenerateWindowError('no peak above the background')
    if imax in (0, len(x) - 1):
        raise DegenerateWindowError('peak maximum at the edge of the window')
    area = scipy.integrate.trapezoid(np.clip(excess, 0, None), x)
    _check_resolution(2.0*area/(np.pi*height), min_width)
    gamma = np.clip(2.0*area/(np.pi*height), 2.0*spectrum.f_step, x[-1] - x[0])
    p0 = [b0, b1, x[imax], gamma, 0.5*np.pi*height*gamma]
    p, covariance, reduced = _solve(lorentzian_model, lorentzian_jacobian,
        p0, x, y, spectrum.averaging_count)
    p, covariance = _normalize_sign(p, covariance, 3, [4])
    names = ('background_offset','background_slope','center','fwhm','area')
    if not (p[4] > 0):
        raise ConvergenceError('fitted peak area is not positive', last_iterate=p)
    logging.debug(f'Lorentzian at {reference + p[2]:0.3f} Hz: '
        f'fwhm={p[3]:0.4g} Hz area={p[4]:0.6g}')
    return LorentzianFit(center=reference + p[2], fwhm=p[3], area=p[4],
        background_offset=p[0], background_slope=p[1],
        reference_frequency=reference,
        uncertainties=_uncertainties(names, covariance),
        covariance=covariance, reduced_chi_square=reduced, converged=True,
        n_bins=len(x), window=(f_lo, f_hi), mask=tuple(mask or ()))

# largest bin within one step of a frequency
def _peak_height(x, y, center, f_step):
    near = np.abs(x - center) <= f_step
    return np.max(y[near]) if np.any(near) else np.interp(center, x, y)

# PURPOSE: initial doublet parameters from the sideband moments
def _doublet_guess(x, y, s, search, half, f_step, min_width=None):
    b0, b1 = _edge_line(x, y)
    excess = y - (b0 + b1*x)
    # mean center maximizing the summed sideband heights
    n_trial = int(min(2001, 2*search/f_step + 1))
    trial = np.linspace(-search, search, max(n_trial, 3))
    heights = np.interp(trial + s, x, excess) + np.interp(trial - s, x, excess)
    xc = trial[int(np.argmax(heights))]
    h_s = _peak_height(x, excess, xc + s, f_step)
    h_a = _peak_height(x, excess, xc - s, f_step)
    if not (max(h_s, h_a) > 0):
        raise DegenerateWindowError('no sidebands above the background')
    # width from the integral of the stronger sideband
    side = xc + s if (h_s >= h_a) else xc - s
    region = np.abs(x - side) <= half
    area = scipy.integrate.trapezoid(np.clip(excess[region], 0, None), x[region]) \
        if (np.count_nonzero(region) > 1) else 0.0
    _check_resolution(2.0*area/(np.pi*max(h_s, h_a)), min_width)
    gamma = np.clip(2.0*area/(np.pi*max(h_s, h_a)), 2.0*f_step, 2.0*s)
    floor = 1e-3*max(h_s, h_a)
    return [b0, b1, xc, gamma, 0.5*np.pi*max(h_s, floor)*gamma,
        0.5*np.pi*max(h_a, floor)*gamma]

# PURPOSE: fit a Stokes and anti-Stokes doublet
def fit_sideband_doublet(spectrum, mode_guess, delta_lo, mask=None,
    span=None, sideband_span=None, background=None, min_width=None,
    initial=None):
    """
    Joint fit of the two motional sidebands of a mode in a heterodyne
    spectrum with shared width, centers at c +/- delta_lo/2pi, independent
    areas and a linear background

    The Stokes sideband is the higher frequency peak

    Parameters
    ----------
    spectrum: obj
        heterodyne :class:`optotherm.spectrum.Spectrum`
    mode_guess: float
        expected mode frequency (Hz)
    delta_lo: float
        local oscillator offset (rad/s)
    mask: list or NoneType, default None
        frequency ranges (Hz) excluded from the fit
    span: float or NoneType, default None
        extent of the window beyond each sideband (Hz), default delta_lo/2pi
    sideband_span: float or NoneType, default None
        fit only the bins within this distance of each sideband (Hz)
    background: callable or NoneType, default None
        fixed contribution of other peaks as a function of frequency (Hz)
    min_width: float or NoneType, default None
        reject sidebands whose estimated width is below this value (Hz)
    initial: obj or NoneType, default None
        :class:`DoubletFit` of the same mode used as the starting point

    Returns
    -------
    fit: obj
        :class:`DoubletFit`
    """
    s = delta_lo/optotherm.physics.TWO_PI
    if sideband_span is None:
        span = s if span is None else span
        window = [(mode_guess - s - span, mode_guess + s + span)]
        search = 0.5*s
        half = s
    else:
        window = [(mode_guess - s - sideband_span, mode_guess - s + sideband_span),
            (mode_guess + s - sideband_span, mode_guess + s + sideband_span)]
        search = 0.5*sideband_span
        half = min(s, search)
    f, y = _select(spectrum, window, mask)
    reference = mode_guess
    x = f - reference
    fixed = None
    if background is not None:
        fixed = np.asarray(background(f), dtype=np.float64)
    if initial is not None:
        _check_resolution(initial.fwhm, min_width)
        p0 = [initial.background_offset + initial.background_slope*(reference -
            initial.reference_frequency), initial.background_slope,
            initial.mean_center - reference, initial.fwhm,
            initial.area_stokes, initial.area_antistokes]
    else:
        p0 = _doublet_guess(x, y if fixed is None else y - fixed, s, search,
            half, spectrum.f_step, min_width=min_width)
    model = lambda p, x: doublet_model(p, x, s)
    jacobian = lambda p, x: doublet_jacobian(p, x, s)
    p, covariance, reduced = _solve(model, jacobian, p0, x, y,
        spectrum.averaging_count, fixed=fixed)
    p, covariance = _normalize_sign(p, covariance, 3, [4, 5])
    if (2.0*s < p[3]/5.0):
        raise UnresolvableDoubletError(f'sideband separation {2.0*s:0.4g} Hz '
            f'below a fifth of the width {p[3]:0.4g} Hz')
    if not (p[4] > 0) or not (p[5] > 0):
        raise ConvergenceError('fitted sideband area is not positive',
            last_iterate=p)
    names = ('background_offset','background_slope','mean_center','fwhm',
        'area_stokes','area_antistokes')
    logging.debug(f'Doublet at {reference + p[2]:0.3f} Hz: '
        f'ratio={p[4]/p[5]:0.6f}')
    return DoubletFit(mean_center=reference + p[2], fwhm=p[3],
        area_stokes=p[4], area_antistokes=p[5], half_splitting=s,
        background_offset=p[0], background_slope=p[1],
        reference_frequency=reference,
        uncertainties=_uncertainties(names, covariance),
        covariance=covariance, reduced_chi_square=reduced, converged=True,
        n_bins=len(x), window=tuple(window), mask=tuple(mask or ()))

# PURPOSE: weighted least-squares polynomial
def fit_weighted_polynomial(x, y, sigma, order=1):
    """
    Closed-form weighted least-squares polynomial

    Fewer than order+1 points raise :class:`RankDeficiencyError`.  Exactly
    order+1 points give the interpolating polynomial with ``dof`` of 0 and a
    NaN reduced chi-square, which callers detect with
    :attr:`LineFit.interpolates`

    Parameters
    ----------
    x: np.ndarray
        abscissae
    y: np.ndarray
        ordinates
    sigma: np.ndarray
        standard deviation of each ordinate
    order: int, default 1
        polynomial order (0, 1 or 2)

    Returns
    -------
    fit: obj
        :class:`LineFit`
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=np.float64), x.shape)
    if order not in (0, 1, 2):
        raise ValueError(f'polynomial order must be 0, 1 or 2 (got {order!r})')
    if (len(x) != len(y)) or (len(x) < order + 1):
        raise RankDeficiencyError(f'{len(x):d} points for an order {order:d} fit')
    if np.any(~np.isfinite(sigma)) or np.any(sigma <= 0):
        raise ValueError('standard deviations must be positive')
    # scale abscissae to unity for conditioning
    xs = np.max(np.abs(x)) or 1.0
    A = np.vander(x/xs, order + 1, increasing=True)/sigma[:,np.newaxis]
    b = y/sigma
    beta, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if (rank < order + 1):
        raise RankDeficiencyError('design matrix is rank deficient')
    scale = xs**np.arange(order + 1)
    covariance = np.linalg.inv(A.T @ A)/np.outer(scale, scale)
    covariance = 0.5*(covariance + covariance.T)
    coefficients = beta/scale
    chi_square = float(np.sum((A @ beta - b)**2))
    dof = len(x) - (order + 1)
    reduced = chi_square/dof if (dof > 0) else np.nan
    return LineFit(coefficients, covariance, reduced, chi_square, dof)

# PURPOSE: probe detuning from the sideband ratios of several modes
def fit_detuning(omega_m, ratio, sigma, kappa):
    """
    One-dimensional weighted fit of the cavity filter ratio of several high
    occupancy modes to infer the probe detuning

    Parameters
    ----------
    omega_m: np.ndarray
        mode angular frequencies (rad/s)
    ratio: np.ndarray
        measured Stokes to anti-Stokes ratios
    sigma: np.ndarray
        standard deviation of each ratio
    kappa: float
        cavity linewidth (rad/s)

    Returns
    -------
    fit: obj
        :class:`DetuningFit`
    """
    omega_m = np.asarray(omega_m, dtype=np.float64)
    ratio = np.asarray(ratio, dtype=np.float64)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=np.float64), omega_m.shape)
    if (len(omega_m) < 2):
        raise ValueError('detuning fit needs at least 2 modes')
    if np.any(ratio <= 0) or np.any(sigma <= 0):
        raise ValueError('ratios and standard deviations must be positive')
    def residuals(delta):
        return (optotherm.physics.cavity_filter_ratio(delta, omega_m, kappa) -
            ratio)/sigma
    # bracketing scan over the open interval (-kappa/2, kappa/2)
    grid = np.linspace(-0.5*kappa, 0.5*kappa, SCAN_POINTS + 2)[1:-1]
    model = optotherm.physics.cavity_filter_ratio(grid[:,np.newaxis],
        omega_m[np.newaxis,:], kappa)
    cost = np.sum(((model - ratio)/sigma)**2, axis=1)
    interior = np.nonzero((cost[1:-1] <= cost[:-2]) &
        (cost[1:-1] <= cost[2:]))[0] + 1
    if not interior.size or (np.argmin(cost) in (0, len(grid) - 1)):
        raise NoMinimumError('detuning cost has no minimum inside (-kappa/2, kappa/2)')
    best = interior[np.argmin(cost[interior])]
    tolerance = 0.01*max(cost[best], np.finfo(np.float64).tiny)
    candidates = interior[cost[interior] - cost[best] <= tolerance]
    ambiguous = bool(len(candidates) > 1)
    if ambiguous:
        best = candidates[np.argmin(np.abs(grid[candidates]))]
        logging.warning(f'{len(candidates):d} detuning minima within 1% cost')
    # local refinement within the neighboring scan points
    lo, hi = grid[best - 1], grid[best + 1]
    result = scipy.optimize.least_squares(lambda u: residuals(u[0]*kappa),
        [grid[best]/kappa], jac=lambda u: (kappa*optotherm.physics.cavity_filter_slope(
            u[0]*kappa, omega_m, kappa)/sigma)[:,np.newaxis],
        bounds=([lo/kappa], [hi/kappa]), method='trf',
        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    delta = float(result.x[0]*kappa)
    # curvature of the cost from the Gauss-Newton approximation
    slope = optotherm.physics.cavity_filter_slope(delta, omega_m, kappa)/sigma
    information = float(np.sum(slope**2))
    uncertainty = 1.0/np.sqrt(information) if (information > 0) else np.inf
    chi_square = float(np.sum(residuals(delta)**2))
    return DetuningFit(delta_probe=delta, uncertainty=uncertainty,
        reduced_chi_square=chi_square/(len(ratio) - 1), ambiguous=ambiguous,
        n_modes=len(ratio))
