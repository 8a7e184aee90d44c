// Closed-form quality metrics for a time-of-arrival random number generator:
// photon statistics per reference interval, a min-entropy lower bound for the
// extracted bits, dead-time undercounting corrections, the arrival-bin
// uniformity law, and the optical loss budget of the source-to-detector chain.
#pragma once

#include <cstdint>

namespace toarng::qmetrics {

/// Poisson probability of k arrivals when the expected count is `mean`.
/// Preconditions: k >= 0, mean >= 0. mean == 0 gives the degenerate pmf.
[[nodiscard]] double poisson_pmf(unsigned k, double mean);

/// Mean photon number per reference interval of length T seconds for a
/// detector that reports rate R under a non-paralyzable dead time tau:
/// k = R*T / (1 - R*tau), i.e. the dead-time-corrected true flux times T.
/// Throws ConfigError when R*tau >= 1 (saturated detector).
[[nodiscard]] double mean_photons_per_interval(double rate_hz, double period_s,
                                               double dead_time_s);

/// Source intensity that produces `rate_hz` detected counts under a
/// non-paralyzable dead time: lambda = R / (1 - R*tau).
[[nodiscard]] double flux_for_detected_rate(double rate_hz, double dead_time_s);

/// Detected rate for source intensity lambda under a non-paralyzable dead
/// time: R = lambda / (1 + lambda*tau).
[[nodiscard]] double detected_rate_for_flux(double flux_hz, double dead_time_s);

/// Lower bound on the min-entropy (bits per detection) of the index of the
/// bin that records the first arrival, out of `bins` bins per interval, when
/// the interval holds k photons on average and at least one detection:
///   H = log2(bins) + log2(1 - e^(-k)) - log2(k).
/// Evaluated through expm1 so k down to 1e-12 keeps full precision.
/// Preconditions: bins >= 2 power of two, k > 0.
[[nodiscard]] double min_entropy_lower_bound(unsigned bins, double mean_photons);

/// Same bound normalized per extracted bit (divided by log2(bins)).
[[nodiscard]] double min_entropy_per_bit(unsigned bins, double mean_photons);

/// Undercounting correction factor c = 1 / (1 - R*tau); multiplying the
/// observed rate by c recovers the incident rate.
[[nodiscard]] double correction_factor(double rate_hz, double dead_time_s);

/// Fraction of incident photons lost to dead time: 1 - 1/c = R*tau.
[[nodiscard]] double lost_photon_fraction(double rate_hz, double dead_time_s);

/// Probability that a detection interval held exactly k photons, conditioned
/// on it holding at least one: P(k) / (1 - P(0)). Precondition: k >= 1.
[[nodiscard]] double relative_photon_prob(unsigned k, double mean_photons);

/// Probability that the first of k uniform arrivals in an interval lands in
/// bin i (1-based) of `bins` equal bins:
///   p_i = (1 - (i-1)/N)^k - (1 - i/N)^k.
/// Reduces to 1/N for k = 1. Preconditions: 1 <= i <= bins, k >= 1.
[[nodiscard]] double bin_probability(unsigned i, unsigned bins, unsigned k);

/// Optical chain from source to detector. Transmissions are linear power
/// ratios in (0, 1]; im_k is the waveguide mode's attenuation constant.
struct LossChain {
    double eta_dlm = 1.0;        ///< source-side optics transmission
    double eta_col = 1.0;        ///< collection/coupling transmission
    double p_in_watts = 0.0;     ///< optical power entering the chain
    double detected_rate_hz = 0; ///< photon count rate at the detector
    double wavelength_m = 0.0;   ///< photon wavelength
    double im_k_per_um = 0.0;    ///< Im(k) of the guided mode, rad/um
    double length_um = 0.0;      ///< guided propagation length, um
};

struct LossBudget {
    double p_out_watts = 0;   ///< R*h*c/lambda, power equivalent of the count rate
    double eta_total = 0;     ///< p_out / p_in
    double eta_wgd = 0;       ///< waveguide section: eta_total / (eta_dlm*eta_col)
    double eta_nwr = 0;       ///< propagation survival e^(-2*im_k*z)
    double eta_grt_tpr = 0;   ///< grating*taper transmission, sqrt(eta_wgd/eta_nwr)
};

/// Splits the measured end-to-end efficiency into the chain factors
/// eta_total = eta_dlm * eta_wgd * eta_col with
/// eta_wgd = (eta_grt*eta_tpr)^2 * eta_nwr. The grating and taper
/// transmissions are not separable from power measurements; only their
/// product is reported. Throws ConfigError when the chain would force
/// eta_grt*eta_tpr > 1 (i.e. eta_wgd > eta_nwr) or when any input is outside
/// its domain.
[[nodiscard]] LossBudget loss_budget(const LossChain& chain);

} // namespace toarng::qmetrics
