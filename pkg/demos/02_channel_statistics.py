"""
Two fading channels and what survives their thresholds
======================================================

The optical uplink multiplies a fixed amplitude budget by Gamma-Gamma
turbulence collected over four apertures; the RF downlink multiplies a
distance-law budget by Nakagami-m fading. Both hops gate decoding on an SNR
threshold. This script samples both channels at the defaults and reports the
moments against their closed forms, plus the outage probabilities the episode
dynamics inherit.
"""
import numpy as np

from sagin_aoi import FsoLinkParams, RfLinkParams
from sagin_aoi.channel import (
    decode_indicator,
    egc_gain,
    fso_link_loss,
    fso_snr,
    rf_large_scale,
    sample_gamma_gamma,
    sample_nakagami,
    shannon_rate,
)
from sagin_aoi.rng import substream

rng = substream(0, "demo", "channel")
n = 200_000

fso = FsoLinkParams()
h_l = fso_link_loss(fso)
print(f"optical amplitude budget h_l = {h_l:.6g} "
      f"(from {fso.tx_gain_db:+.0f} {fso.rx_gain_db:+.0f} -{fso.path_loss_db:.0f} "
      f"-{fso.atmospheric_loss_db:.0f} -{fso.lens_loss_db:.0f} -{fso.margin_db:.0f} dB, "
      "halved for amplitude)")

# Gamma-Gamma turbulence: unit mean by construction, variance 1/a + 1/b + 1/(ab)
samples = np.array([sample_gamma_gamma(fso.fading_alpha, fso.fading_beta, rng) for _ in range(n)])
var_expected = 1 / fso.fading_alpha + 1 / fso.fading_beta + 1 / (fso.fading_alpha * fso.fading_beta)
print(f"turbulence mean {samples.mean():.4f} (expect 1), "
      f"variance {samples.var():.4f} (expect {var_expected:.4f})")

# aperture-summed SNR and the decode gate
snrs = np.array([fso_snr(fso, egc_gain(fso, rng)) for _ in range(20_000)])
outage = np.mean(snrs < fso.snr_threshold)
print(f"optical SNR median {np.median(snrs):.2f}, outage P(snr < {fso.snr_threshold}) = {outage:.3f}")
print()

rf = RfLinkParams()
d = 20_000.0
g = rf_large_scale(rf, d)
print(f"rf large-scale gain at {d/1e3:.0f} km: {g:.6g}")

# Nakagami-m power is Gamma(m, 1/m): unit mean, variance 1/m
fades = np.array([sample_nakagami(rf.nakagami_m, rng) for _ in range(n)])
print(f"fade power mean {np.mean(fades**2):.4f} (expect 1), "
      f"variance {np.var(fades**2):.4f} (expect {1/rf.nakagami_m:.4f})")

# per-user SNR at 1 W transmit power across fades
p_tx = 1.0
snr = (g * fades) ** 2 * p_tx / rf.noise_power_w
print(f"rf SNR median {np.median(snr):.2f}, outage P(snr < {rf.snr_threshold}) = "
      f"{np.mean(snr < rf.snr_threshold):.3f}")

# the rate identities anchoring the Shannon map
print()
print(f"rate at snr=1: {shannon_rate(rf.bandwidth_hz, 1.0):.0f} bit/s (= bandwidth)")
print(f"rate at snr=3: {shannon_rate(rf.bandwidth_hz, 3.0):.0f} bit/s (= 2x bandwidth)")
print(f"decode at exactly the threshold: {decode_indicator(rf.snr_threshold, rf.snr_threshold)}")
