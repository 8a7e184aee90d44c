#include "toarng/qmetrics.hpp"

#include <bit>
#include <cmath>

#include "toarng/errors.hpp"

namespace toarng::qmetrics {

namespace {

constexpr double kPlanck = 6.62607015e-34;   // J s
constexpr double kLightSpeed = 299792458.0;  // m/s

void require_unsaturated(double rate_hz, double dead_time_s) {
    if (!(rate_hz > 0.0)) throw ConfigError("rate must be positive");
    if (!(dead_time_s >= 0.0)) throw ConfigError("dead time must be non-negative");
    if (rate_hz * dead_time_s >= 1.0)
        throw ConfigError("detector saturated: rate * dead_time >= 1");
}

} // namespace

double poisson_pmf(unsigned k, double mean) {
    if (!(mean >= 0.0)) throw ConfigError("poisson_pmf: mean must be non-negative");
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k) * std::log(mean) - mean -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

double mean_photons_per_interval(double rate_hz, double period_s, double dead_time_s) {
    if (!(period_s > 0.0)) throw ConfigError("period must be positive");
    require_unsaturated(rate_hz, dead_time_s);
    return rate_hz * period_s / (1.0 - rate_hz * dead_time_s);
}

double flux_for_detected_rate(double rate_hz, double dead_time_s) {
    require_unsaturated(rate_hz, dead_time_s);
    return rate_hz / (1.0 - rate_hz * dead_time_s);
}

double detected_rate_for_flux(double flux_hz, double dead_time_s) {
    if (!(flux_hz > 0.0)) throw ConfigError("flux must be positive");
    if (!(dead_time_s >= 0.0)) throw ConfigError("dead time must be non-negative");
    return flux_hz / (1.0 + flux_hz * dead_time_s);
}

double min_entropy_lower_bound(unsigned bins, double mean_photons) {
    if (bins < 2 || !std::has_single_bit(bins))
        throw ConfigError("bins must be a power of two >= 2");
    if (!(mean_photons > 0.0)) throw ConfigError("mean photon number must be positive");
    // log2(1 - e^-k) = log2(-expm1(-k)); stable for k down to ~1e-300.
    const double log2e = 1.4426950408889634074;
    return std::log2(static_cast<double>(bins)) +
           std::log(-std::expm1(-mean_photons)) * log2e -
           std::log2(mean_photons);
}

double min_entropy_per_bit(unsigned bins, double mean_photons) {
    return min_entropy_lower_bound(bins, mean_photons) /
           std::log2(static_cast<double>(bins));
}

double correction_factor(double rate_hz, double dead_time_s) {
    require_unsaturated(rate_hz, dead_time_s);
    return 1.0 / (1.0 - rate_hz * dead_time_s);
}

double lost_photon_fraction(double rate_hz, double dead_time_s) {
    require_unsaturated(rate_hz, dead_time_s);
    return rate_hz * dead_time_s;
}

double relative_photon_prob(unsigned k, double mean_photons) {
    if (k < 1) throw ConfigError("relative_photon_prob: k must be >= 1");
    if (!(mean_photons > 0.0)) throw ConfigError("mean photon number must be positive");
    return poisson_pmf(k, mean_photons) / -std::expm1(-mean_photons);
}

double bin_probability(unsigned i, unsigned bins, unsigned k) {
    if (bins < 1) throw ConfigError("bin_probability: bins must be >= 1");
    if (i < 1 || i > bins) throw ConfigError("bin_probability: i out of range");
    if (k < 1) throw ConfigError("bin_probability: k must be >= 1");
    const double n = static_cast<double>(bins);
    const double lo = 1.0 - static_cast<double>(i) / n;       // exactly 0 at i == bins
    const double hi = 1.0 - static_cast<double>(i - 1) / n;
    return std::pow(hi, static_cast<double>(k)) - std::pow(lo, static_cast<double>(k));
}

LossBudget loss_budget(const LossChain& chain) {
    auto check_transmission = [](double v, const char* name) {
        if (!(v > 0.0) || v > 1.0)
            throw ConfigError(std::string("loss_budget: ") + name + " must be in (0, 1]");
    };
    check_transmission(chain.eta_dlm, "eta_dlm");
    check_transmission(chain.eta_col, "eta_col");
    if (!(chain.p_in_watts > 0.0)) throw ConfigError("loss_budget: p_in must be positive");
    if (!(chain.detected_rate_hz > 0.0)) throw ConfigError("loss_budget: rate must be positive");
    if (!(chain.wavelength_m > 0.0)) throw ConfigError("loss_budget: wavelength must be positive");
    if (!(chain.im_k_per_um >= 0.0)) throw ConfigError("loss_budget: im_k must be non-negative");
    if (!(chain.length_um >= 0.0)) throw ConfigError("loss_budget: length must be non-negative");

    LossBudget b;
    b.p_out_watts = chain.detected_rate_hz * kPlanck * kLightSpeed / chain.wavelength_m;
    b.eta_total = b.p_out_watts / chain.p_in_watts;
    b.eta_wgd = b.eta_total / (chain.eta_dlm * chain.eta_col);
    b.eta_nwr = std::exp(-2.0 * chain.im_k_per_um * chain.length_um);
    if (b.eta_wgd > b.eta_nwr)
        throw ConfigError("loss_budget: chain implies grating*taper transmission > 1 "
                          "(eta_wgd exceeds eta_nwr)");
    b.eta_grt_tpr = std::sqrt(b.eta_wgd / b.eta_nwr);
    return b;
}

} // namespace toarng::qmetrics
