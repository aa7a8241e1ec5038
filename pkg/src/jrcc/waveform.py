"""Baseband chirp signal-sharing transceiver with RIS phase-shift keying.

The radar uses an up-chirp pulse train; data symbols ride on a down-chirp
whose phase the RIS sets per symbol. Both share the band and are separated at
the receiver by correlating against each chirp template.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal


@dataclass(frozen=True)
class WaveformConfig:
    sample_rate: float = 20e6
    chirp_bandwidth: float = 10e6
    symbol_duration: float = 10e-6
    psk_order: int = 4
    num_symbols: int = 1000
    snr: float = float("inf")  # per-sample signal-to-noise ratio, linear
    target_delay: float = 2e-6
    seed: int = 0
    phase_bits: int = 0  # RIS phase resolution; 0 means continuous

    def __post_init__(self):
        if self.sample_rate < 2 * self.chirp_bandwidth:
            raise ValueError("sample_rate must be at least twice chirp_bandwidth")
        if self.time_bandwidth < 10:
            raise ValueError(f"time-bandwidth product {self.time_bandwidth:g} < 10")
        m = self.psk_order
        if m < 2 or m & (m - 1):
            raise ValueError(f"psk_order must be a power of two >= 2, got {m}")
        if self.phase_bits > 0 and m > 2 ** self.phase_bits:
            raise ValueError(f"psk_order {m} exceeds the {self.phase_bits}-bit RIS phase resolution")
        if not 0 <= self.target_delay < self.symbol_duration:
            raise ValueError("target_delay must lie in [0, symbol_duration)")

    @property
    def time_bandwidth(self) -> float:
        return self.symbol_duration * self.chirp_bandwidth

    @property
    def samples_per_symbol(self) -> int:
        return int(round(self.symbol_duration * self.sample_rate))

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.psk_order))

    @property
    def delay_samples(self) -> int:
        return int(round(self.target_delay * self.sample_rate))


@dataclass(frozen=True, eq=False)
class ReceiveReport:
    decoded_bits: np.ndarray
    bit_error_rate: float
    estimated_delay: float
    chirp_rejection: float  # dB
    received: np.ndarray = field(repr=False, default=None)


def chirp(config: WaveformConfig, slope_sign: int = 1) -> np.ndarray:
    """Unit-modulus LFM chirp sweeping -B/2..B/2 (up) or B/2..-B/2 (down)."""
    if slope_sign not in (1, -1):
        raise ValueError("slope_sign must be +1 or -1")
    n = config.samples_per_symbol
    t = np.arange(n) / config.sample_rate - config.symbol_duration / 2
    rate = config.chirp_bandwidth / config.symbol_duration
    return np.exp(1j * np.pi * slope_sign * rate * t ** 2)


def gray_encode(m):
    return m ^ (m >> 1)


def gray_decode(g):
    g = np.asarray(g).copy()
    m = g.copy()
    shift = g >> 1
    while np.any(shift):
        m ^= shift
        shift >>= 1
    return m


def bits_to_symbols(bits, config: WaveformConfig) -> np.ndarray:
    """Symbol indices m (phase 2 pi m / M) of MSB-first Gray-coded bit groups."""
    bits = np.asarray(bits, dtype=int)
    k = config.bits_per_symbol
    if bits.size % k:
        raise ValueError(f"{bits.size} bits is not a multiple of {k} bits per symbol")
    groups = bits.reshape(-1, k)
    values = groups @ (1 << np.arange(k - 1, -1, -1))
    return gray_decode(values)


def symbols_to_bits(symbols, config: WaveformConfig) -> np.ndarray:
    k = config.bits_per_symbol
    values = gray_encode(np.asarray(symbols, dtype=int))
    return ((values[:, None] >> np.arange(k - 1, -1, -1)) & 1).ravel()


def symbol_phases(symbols, config: WaveformConfig) -> np.ndarray:
    phases = 2 * np.pi * np.asarray(symbols) / config.psk_order
    if config.phase_bits > 0:
        step = 2 * np.pi / 2 ** config.phase_bits
        phases = np.mod(np.rint(phases / step), 2 ** config.phase_bits) * step
    return phases


def ris_psk_modulate(bits, config: WaveformConfig) -> np.ndarray:
    """Down-chirp data stream with one RIS-applied PSK phase per symbol."""
    phases = symbol_phases(bits_to_symbols(bits, config), config)
    down = chirp(config, -1)
    return (np.exp(1j * phases)[:, None] * down[None, :]).ravel()


def radar_pulse_train(config: WaveformConfig, num_pulses: int) -> np.ndarray:
    return np.tile(chirp(config, +1), num_pulses)


def chirp_rejection_db(config: WaveformConfig) -> float:
    """Peak matched (down/down) over peak mismatched (up/down) correlation, in dB."""
    up, down = chirp(config, +1), chirp(config, -1)
    matched = np.max(np.abs(signal.correlate(down, down, mode="full", method="fft")))
    cross = np.max(np.abs(signal.correlate(up, down, mode="full", method="fft")))
    return float(20 * np.log10(matched / cross))


def transmit_receive(bits, config: WaveformConfig, include_radar: bool = True,
                     include_data: bool = True, keep_signal: bool = False) -> ReceiveReport:
    """Simulate one frame: radar echo + data + noise, then both matched filters.

    Symbol timing is genie-aided. The radar echo has unit amplitude and an
    integer-sample delay.
    """
    bits = np.asarray(bits, dtype=int)
    n = config.samples_per_symbol
    data = ris_psk_modulate(bits, config)
    num = data.size // n
    rx = np.zeros(data.size, dtype=complex)
    if include_data:
        rx += data
    if include_radar:
        d = config.delay_samples
        rx[d:] += radar_pulse_train(config, num)[: data.size - d]
    if np.isfinite(config.snr):
        rng = np.random.default_rng(config.seed)
        sigma = np.sqrt(1.0 / (2.0 * config.snr))
        rx += sigma * (rng.standard_normal(rx.size) + 1j * rng.standard_normal(rx.size))

    # Data branch: per-slot correlation against the down-chirp at zero lag.
    down = chirp(config, -1)
    z = rx.reshape(num, n) @ np.conj(down)
    m_hat = np.mod(np.rint(np.angle(z) / (2 * np.pi / config.psk_order)),
                   config.psk_order).astype(int)
    decoded = symbols_to_bits(m_hat, config)
    ber = float(np.mean(decoded != bits)) if bits.size else 0.0

    # Radar branch: up-chirp correlation, pulses folded coherently modulo the PRI.
    up = chirp(config, +1)
    corr = signal.correlate(rx, up, mode="valid", method="fft")
    pad = (-corr.size) % n
    folded = np.abs(np.concatenate([corr, np.zeros(pad)]).reshape(-1, n).sum(axis=0))
    est_delay = int(np.argmax(folded)) / config.sample_rate

    return ReceiveReport(decoded, ber, est_delay, chirp_rejection_db(config),
                         rx if keep_signal else None)


def random_bits(config: WaveformConfig, seed: int | None = None) -> np.ndarray:
    rng = np.random.default_rng(config.seed + 1 if seed is None else seed)
    return rng.integers(0, 2, config.num_symbols * config.bits_per_symbol)


def write_iq(path, samples) -> None:
    """Dump samples as interleaved little-endian float32 (re, im) pairs."""
    samples = np.asarray(samples, dtype=np.complex64)
    out = np.empty(2 * samples.size, dtype="<f4")
    out[0::2] = samples.real
    out[1::2] = samples.imag
    out.tofile(path)


def read_iq(path) -> np.ndarray:
    raw = np.fromfile(path, dtype="<f4")
    return (raw[0::2] + 1j * raw[1::2]).astype(np.complex64)
