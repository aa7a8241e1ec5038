"""Detection- and resolution-limited radar range and their minimum.

Both bounds come from the same matched-filter energy SNR curve

    SNR(R) = P Gt Gr lambda^2 sigma tau / ((4 pi)^3 R^4 N0)

so each range is the fourth root of (numerator / required SNR). The detection
bound uses the (RIS-reduced) threshold SNR and does not depend on bandwidth;
the resolution bound uses the SNR at which the range-estimate CRLB meets the
configured estimator variance, which scales as 1/B^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import RadarParams

BOLTZMANN = 1.380649e-23
SPEED_OF_LIGHT = 2.99792458e8
FOUR_PI_CUBED = (4.0 * np.pi) ** 3


@dataclass(frozen=True)
class RadarRangeReport:
    detection_limited_range: float
    resolution_limited_range: float
    max_effective_range: float
    limiting_factor: str  # "detection" or "resolution"


def noise_psd(params: RadarParams) -> float:
    """Thermal noise density k_B T F in W/Hz."""
    return BOLTZMANN * params.system_temperature * params.noise_figure


def _echo_energy_factor(params: RadarParams, radar_power: float) -> float:
    # SNR(R) * R^4
    num = (radar_power * params.tx_gain * params.rx_gain * params.wavelength ** 2
           * params.rcs * params.pulse_duration)
    return num / (FOUR_PI_CUBED * noise_psd(params))


def echo_snr(params: RadarParams, radar_power: float, distance: float) -> float:
    """Matched-filter energy SNR of the target echo at ``distance``."""
    return _echo_energy_factor(params, radar_power) / distance ** 4


def _range_for_snr(params: RadarParams, radar_power: float, required_snr: float) -> float:
    if radar_power < 0:
        raise ValueError(f"radar power must be non-negative, got {radar_power}")
    if radar_power == 0:
        return 0.0
    return (_echo_energy_factor(params, radar_power) / required_snr) ** 0.25


def detection_limited_range(params: RadarParams, radar_power: float) -> float:
    """Largest range whose echo SNR meets the effective detection threshold."""
    return _range_for_snr(params, radar_power, params.effective_threshold)


def resolution_required_snr(params: RadarParams, bandwidth: float) -> float:
    """SNR at which the CRLB c^2 / (8 pi^2 B^2 SNR) equals the estimator variance."""
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    return SPEED_OF_LIGHT ** 2 / (8.0 * np.pi ** 2 * bandwidth ** 2 * params.estimator_variance)


def resolution_limited_range(params: RadarParams, radar_power: float, bandwidth: float) -> float:
    return _range_for_snr(params, radar_power, resolution_required_snr(params, bandwidth))


def crossover_bandwidth(params: RadarParams) -> float:
    """Bandwidth at which both bounds coincide."""
    return SPEED_OF_LIGHT / (np.pi * np.sqrt(8.0 * params.estimator_variance
                                             * params.effective_threshold))


def max_effective_range(params: RadarParams, radar_power: float,
                        bandwidth: float) -> RadarRangeReport:
    det = detection_limited_range(params, radar_power)
    res = resolution_limited_range(params, radar_power, bandwidth)
    if det <= res:
        return RadarRangeReport(det, res, det, "detection")
    return RadarRangeReport(det, res, res, "resolution")
