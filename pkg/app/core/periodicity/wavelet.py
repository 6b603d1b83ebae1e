"""
Morlet 連續小波轉換

Frequency-domain transform of the zero-padded series against Morlet daughter
wavelets, the chi-square significance test against a white or red (AR1)
background, the cone of influence and the global wavelet spectrum.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy import fft as sp_fft
from scipy.signal import find_peaks
from scipy.stats import chi2
from statsmodels.tsa.stattools import acf as sm_acf

from app.core.periodicity.errors import ConstantSeries, SeriesTooShort
from app.models.periodicity import (
    Background,
    CoiPolicy,
    GlobalSpectrum,
    Hemisphere,
    SeriesKind,
    SpectralPeak,
    WaveletAnalysis,
)

logger = logging.getLogger(__name__)

MIN_LENGTH = 16
# reconstruction factor of the omega0 = 6 Morlet wavelet
MORLET_C_DELTA = 0.776


def fourier_factor(omega0: float = 6.0) -> float:
    """Period / scale ratio of the Morlet wavelet"""
    return 4.0 * math.pi / (omega0 + math.sqrt(2.0 + omega0 ** 2))


def scale_grid(n: int, dt: float = 1.0, s0: Optional[float] = None, dj: float = 0.125,
               jmax: Optional[int] = None, omega0: float = 6.0) -> np.ndarray:
    """s0 * 2**(j*dj) for j = 0..jmax; default jmax puts the largest period near n*dt/2"""
    s0 = 2.0 * dt if s0 is None else s0
    if jmax is None:
        largest_scale = 0.5 * n * dt / fourier_factor(omega0)
        jmax = max(0, int(math.floor(math.log2(largest_scale / s0) / dj)))
    return s0 * 2.0 ** (np.arange(jmax + 1) * dj)


def _angular_frequencies(n: int, dt: float) -> np.ndarray:
    return 2.0 * math.pi * sp_fft.fftfreq(n, d=dt)


def _morlet_daughters(scales: np.ndarray, k: np.ndarray, dt: float, omega0: float) -> np.ndarray:
    """[scale, frequency] Morlet wavelets in Fourier space, zero for k <= 0"""
    sk = scales[:, None] * k[None, :]
    norm = np.sqrt(2.0 * math.pi * scales / dt) * math.pi ** -0.25
    daughters = norm[:, None] * np.exp(-0.5 * (sk - omega0) ** 2)
    return daughters * (k > 0)[None, :]


def lag1_autocorrelation(x: np.ndarray) -> float:
    return float(sm_acf(x, nlags=1, adjusted=False, fft=False)[1])


def morlet_cwt(
    x: Sequence[float],
    dt: float = 1.0,
    s0: Optional[float] = None,
    dj: float = 0.125,
    jmax: Optional[int] = None,
    omega0: float = 6.0,
    pad: bool = True,
) -> WaveletAnalysis:
    """Continuous Morlet transform; power is |W|^2 divided by the series variance.

    The cone of influence is the e-folding time sqrt(2)*scale expressed as a
    period, zero at both ends of the record.
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n < MIN_LENGTH:
        raise SeriesTooShort("wavelet transform needs at least 16 points", module="wavelet", n=n)
    if np.all(x == x[0]):
        raise ConstantSeries("wavelet transform of a constant series", module="wavelet", n=n)

    anomaly = x - x.mean()
    variance = float(np.var(anomaly))
    padded_length = 1 << (n - 1).bit_length() if pad else n
    padded = np.concatenate([anomaly, np.zeros(padded_length - n)])

    scales = scale_grid(n, dt, s0, dj, jmax, omega0)
    factor = fourier_factor(omega0)
    k = _angular_frequencies(padded_length, dt)
    transform = sp_fft.ifft(sp_fft.fft(padded)[None, :] * _morlet_daughters(scales, k, dt, omega0), axis=-1)
    coefficients = transform[:, :n]

    t = np.arange(n)
    coi = factor / math.sqrt(2.0) * dt * np.minimum(t, n - 1 - t)

    return WaveletAnalysis(
        n=n,
        dt=dt,
        omega0=omega0,
        dj=dj,
        scales=scales,
        periods=factor * scales,
        power=np.abs(coefficients) ** 2 / variance,
        coi=coi,
        variance=variance,
        lag1=lag1_autocorrelation(anomaly),
    )


def background_spectrum(analysis: WaveletAnalysis, background: Background = Background.RED) -> np.ndarray:
    """Normalized theoretical spectrum at each scale"""
    if background is Background.WHITE:
        return np.ones_like(analysis.periods)
    alpha = analysis.lag1
    angle = 2.0 * math.pi * analysis.dt / analysis.periods
    return (1.0 - alpha ** 2) / (1.0 - 2.0 * alpha * np.cos(angle) + alpha ** 2)


def significance_threshold(analysis: WaveletAnalysis, background: Background = Background.RED,
                           level: float = 0.95) -> np.ndarray:
    """Per-scale power a point must exceed to be significant (2 degrees of freedom)"""
    return background_spectrum(analysis, background) * chi2.ppf(level, 2) / 2.0


def significance_mask(analysis: WaveletAnalysis, background: Background = Background.RED,
                      level: float = 0.95) -> np.ndarray:
    threshold = significance_threshold(analysis, background, level)
    return analysis.power > threshold[:, None]


def global_spectrum(analysis: WaveletAnalysis, coi_policy: CoiPolicy = CoiPolicy.ALL) -> GlobalSpectrum:
    """Time-averaged power per period and its local maxima ranked by power.

    Under ``exclude_coi`` a period with no point outside the cone averages
    to 0.
    """
    if coi_policy is CoiPolicy.EXCLUDE_COI:
        outside = ~analysis.in_coi()
        counts = outside.sum(axis=1)
        sums = np.where(outside, analysis.power, 0.0).sum(axis=1)
        averaged = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    else:
        averaged = analysis.power.mean(axis=1)

    indices, _ = find_peaks(averaged)
    if len(indices) == 0:
        indices = np.array([int(np.argmax(averaged))])
    # stable sort keeps the shorter period first on equal power
    ranked = indices[np.argsort(-averaged[indices], kind="stable")]
    return GlobalSpectrum(
        periods=analysis.periods.tolist(),
        power=averaged.tolist(),
        peaks=[SpectralPeak(period=float(analysis.periods[i]), power=float(averaged[i])) for i in ranked],
    )


def reconstructed_variance(analysis: WaveletAnalysis, c_delta: float = MORLET_C_DELTA) -> float:
    """Series variance recovered from the scale-weighted power sum"""
    weighted = (analysis.power * analysis.variance / analysis.scales[:, None]).sum()
    return float(analysis.dj * analysis.dt / c_delta * weighted / analysis.n)


def significant_regions(analysis: WaveletAnalysis) -> List[float]:
    """Periods with at least one significant point outside the cone of influence"""
    if analysis.significant is None:
        return []
    hits = (analysis.significant & ~analysis.in_coi()).any(axis=1)
    return [float(p) for p in analysis.periods[hits]]


def wavelet_analysis(
    x: Sequence[float],
    hemisphere: Optional[Hemisphere] = None,
    cycle_number: Optional[int] = None,
    series_kind: Optional[SeriesKind] = None,
    omega0: float = 6.0,
    s0: Optional[float] = None,
    dj: float = 0.125,
    background: Background = Background.RED,
    level: float = 0.95,
    coi_policy: CoiPolicy = CoiPolicy.ALL,
) -> WaveletAnalysis:
    """Transform, significance mask and global spectrum of one series"""
    analysis = morlet_cwt(x, s0=s0, dj=dj, omega0=omega0)
    spectrum = global_spectrum(analysis, coi_policy)
    analysis = analysis.model_copy(update={
        "hemisphere": hemisphere,
        "cycle_number": cycle_number,
        "series_kind": series_kind,
        "significant": significance_mask(analysis, background, level),
        "global_spectrum": np.asarray(spectrum.power),
        "global_peaks": spectrum.peaks,
    })
    logger.debug(
        "wavelet %s/%s/%s: %d scales, top period %.2f",
        getattr(hemisphere, "value", "-"), cycle_number, getattr(series_kind, "value", "-"),
        len(analysis.scales), spectrum.peaks[0].period,
    )
    return analysis
