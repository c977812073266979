"""Link models for the two hops of the relay downlink.

Satellite -> HAP is a free-space optical link: a fixed dB link budget gives the
deterministic loss, Gamma-Gamma turbulence gives the fading, and the HAP combines
N_A receive apertures by equal-gain combining. HAP -> user is an RF link with a
distance-dependent large-scale budget and Nakagami-m small-scale fading.

Both budgets carry a 1/2 factor in dB, so they are amplitude budgets: linear
amplitude = 10^(dB/20). Fades are normalized (unit mean for the Gamma-Gamma
irradiance, unit second moment for the Nakagami amplitude) so the budgets alone set
the link scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def db_to_amplitude(db: float) -> float:
    """Amplitude-dB to linear amplitude: 10^(db/20)."""
    return 10.0 ** (db / 20.0)


def amplitude_to_db(amplitude: float) -> float:
    """Linear amplitude to amplitude-dB: 20*log10(a). Requires a > 0."""
    if amplitude <= 0.0:
        raise ValueError("amplitude must be positive")
    return 20.0 * math.log10(amplitude)


@dataclass(frozen=True)
class FsoLinkParams:
    """Satellite->HAP optical link parameters.

    Gains/losses are in dB; the budget below is an amplitude budget (note the 1/2).
    fading_alpha/fading_beta are the Gamma-Gamma turbulence shape parameters.
    """

    tx_gain_db: float = 110.0
    rx_gain_db: float = 105.0
    path_loss_db: float = 255.0
    atmospheric_loss_db: float = 5.0
    lens_loss_db: float = 4.0
    margin_db: float = 5.0
    tx_power_w: float = 2.0
    oe_efficiency: float = 0.8
    num_apertures: int = 4
    noise_power_w: float = 1.0e-3
    bandwidth_hz: float = 1.0e8
    snr_threshold: float = 2.0
    fading_alpha: float = 4.0
    fading_beta: float = 2.0

    def __post_init__(self) -> None:
        if self.num_apertures < 1:
            raise ValueError("num_apertures must be >= 1")
        if min(self.tx_power_w, self.noise_power_w, self.bandwidth_hz) <= 0.0:
            raise ValueError("powers and bandwidth must be positive")
        if min(self.fading_alpha, self.fading_beta) <= 0.0:
            raise ValueError("fading shapes must be positive")


@dataclass(frozen=True)
class RfLinkParams:
    """HAP->user RF link parameters; amplitude budget as above."""

    hap_gain_db: float = 17.0
    user_gain_db: float = 3.0
    wavelength_m: float = 0.15
    path_loss_exponent: float = 2.7
    noise_power_w: float = 2.0e-7
    bandwidth_hz: float = 1.0e6
    snr_threshold: float = 2.0
    nakagami_m: float = 2.0

    def __post_init__(self) -> None:
        if min(self.wavelength_m, self.noise_power_w, self.bandwidth_hz) <= 0.0:
            raise ValueError("wavelength, noise power and bandwidth must be positive")
        if self.nakagami_m < 0.5:
            raise ValueError("nakagami_m must be >= 0.5")


def fso_link_loss(params: FsoLinkParams) -> float:
    """Deterministic optical amplitude gain h_l (linear).

    Amplitude budget: h_l[dB] = (G_T + G_R - A_path - A_atm - L_lens - M) / 2.
    """
    budget_db = 0.5 * (
        params.tx_gain_db
        + params.rx_gain_db
        - params.path_loss_db
        - params.atmospheric_loss_db
        - params.lens_loss_db
        - params.margin_db
    )
    return db_to_amplitude(budget_db)


def sample_gamma_gamma(
    alpha: float, beta: float, rng: np.random.Generator, size: int | tuple | None = None
):
    """Unit-mean Gamma-Gamma irradiance draw(s): h_a = X*Y.

    X ~ Gamma(alpha, 1/alpha) and Y ~ Gamma(beta, 1/beta) are independent, so
    E[h_a] = 1 and Var[h_a] = (1 + 1/alpha)(1 + 1/beta) - 1.
    """
    x = rng.gamma(shape=alpha, scale=1.0 / alpha, size=size)
    y = rng.gamma(shape=beta, scale=1.0 / beta, size=size)
    return x * y


def egc_gain(params: FsoLinkParams, rng: np.random.Generator) -> float:
    """Equal-gain-combined optical gain: h_l times the sum of per-aperture fades."""
    fades = sample_gamma_gamma(params.fading_alpha, params.fading_beta, rng, size=params.num_apertures)
    return fso_link_loss(params) * float(np.sum(fades))


def fso_snr(params: FsoLinkParams, h_egc: float) -> float:
    """Post-combining electrical SNR: P_S * eta^2 * h_EGC^2 / (N_A * N_q)."""
    return (
        params.tx_power_w
        * params.oe_efficiency**2
        * h_egc**2
        / (params.num_apertures * params.noise_power_w)
    )


def decode_indicator(snr: float, threshold: float) -> bool:
    """Selective decode-and-forward: decodable iff snr >= threshold (inclusive)."""
    return snr >= threshold


def shannon_rate(bandwidth_hz: float, snr: float) -> float:
    """Capacity B * log2(1 + snr) in bit/s; snr must be >= 0."""
    if snr < 0.0:
        raise ValueError("snr must be nonnegative")
    return bandwidth_hz * math.log2(1.0 + snr)


def rf_large_scale(params: RfLinkParams, distance_m: float) -> float:
    """Deterministic RF amplitude gain C (linear) at the given link distance.

    Amplitude budget: C[dB] = G_H + G_U + (20*log10(lambda)
    - 10*eta*log10(d) - 20*log10(4*pi)) / 2.
    """
    if distance_m <= 0.0:
        raise ValueError("distance must be positive")
    budget_db = (
        params.hap_gain_db
        + params.user_gain_db
        + 0.5
        * (
            20.0 * math.log10(params.wavelength_m)
            - 10.0 * params.path_loss_exponent * math.log10(distance_m)
            - 20.0 * math.log10(4.0 * math.pi)
        )
    )
    return db_to_amplitude(budget_db)


def sample_nakagami(m: float, rng: np.random.Generator, size: int | tuple | None = None):
    """Nakagami-m amplitude draw(s) g = sqrt(Z), Z ~ Gamma(m, 1/m), so E[g^2] = 1."""
    return np.sqrt(rng.gamma(shape=m, scale=1.0 / m, size=size))


def rf_channel_gain(params: RfLinkParams, distance_m: float, rng: np.random.Generator) -> float:
    """One slot's composite RF amplitude h = C(d) * g."""
    return rf_large_scale(params, distance_m) * float(sample_nakagami(params.nakagami_m, rng))


def rf_snr(tx_power_w: float, channel_gain: float, noise_power_w: float) -> float:
    """Received SNR: P * |h|^2 / sigma^2."""
    return tx_power_w * channel_gain**2 / noise_power_w
