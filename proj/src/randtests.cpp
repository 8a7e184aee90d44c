#include "toarng/randtests.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "toarng/errors.hpp"
#include "toarng/specfun.hpp"

namespace toarng::randtests {
namespace {

constexpr double kPi = 3.14159265358979323846;

// 2^24 - 1, the largest coordinate of the Monte-Carlo dartboard.
constexpr std::uint64_t kMcMax = (1ull << 24) - 1;

int bit_at(const BitStream& bs, std::uint64_t i) {
    return (bs.bytes[i >> 3] >> (7 - (i & 7))) & 1;
}

// Resolves (offset, n) against the stream, where n == kWholeStream means
// "everything after offset". Throws on empty or out-of-range requests.
std::uint64_t resolve_range(const BitStream& bs, std::uint64_t offset, std::uint64_t n,
                            const char* what) {
    if (offset > bs.bit_length) throw StatError(std::string(what) + ": offset out of range");
    if (n == kWholeStream) n = bs.bit_length - offset;
    if (n == 0) throw StatError(std::string(what) + ": empty bit range");
    if (n > bs.bit_length - offset)
        throw StatError(std::string(what) + ": bit range exceeds stream");
    return n;
}

std::uint64_t ones_in_range(const BitStream& bs, std::uint64_t lo, std::uint64_t n) {
    const std::uint8_t* bytes = bs.bytes.data();
    std::uint64_t ones = 0;
    std::uint64_t i = lo;
    const std::uint64_t end = lo + n;
    // Leading partial byte.
    while (i < end && (i & 7) != 0) ones += (bytes[i >> 3] >> (7 - (i & 7))) & 1, ++i;
    // Whole bytes.
    while (i + 8 <= end) {
        ones += static_cast<unsigned>(std::popcount(static_cast<unsigned>(bytes[i >> 3])));
        i += 8;
    }
    // Trailing partial byte.
    while (i < end) ones += (bytes[i >> 3] >> (7 - (i & 7))) & 1, ++i;
    return ones;
}

double clamp_p(double p) { return std::min(1.0, std::max(0.0, p)); }

} // namespace

// ---------------------------------------------------------------- byte level

void EntAccumulator::update(std::span<const std::uint8_t> data) {
    for (const std::uint8_t b : data) {
        ++counts_[b];
        sum_ += b;
        if (total_ == 0)
            first_byte_ = b;
        else
            sum_adjacent_ += static_cast<std::uint64_t>(last_byte_) * b;
        last_byte_ = b;
        ++total_;

        mc_group_[mc_fill_++] = b;
        if (mc_fill_ == 6) {
            mc_fill_ = 0;
            const std::uint64_t x = (static_cast<std::uint64_t>(mc_group_[0]) << 16) |
                                    (static_cast<std::uint64_t>(mc_group_[1]) << 8) |
                                    mc_group_[2];
            const std::uint64_t y = (static_cast<std::uint64_t>(mc_group_[3]) << 16) |
                                    (static_cast<std::uint64_t>(mc_group_[4]) << 8) |
                                    mc_group_[5];
            if (x * x + y * y <= kMcMax * kMcMax) ++mc_inside_;
            ++mc_points_;
        }
    }
}

EntReport EntAccumulator::report() const {
    if (total_ == 0) throw StatError("byte statistics: no data");
    EntReport r;
    r.bytes = total_;

    const double n = static_cast<double>(total_);
    double entropy = 0;
    const double expected = n / 256.0;
    double chi2 = 0;
    for (const std::uint64_t c : counts_) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            entropy -= p * std::log2(p);
        }
        const double dev = static_cast<double>(c) - expected;
        chi2 += dev * dev / expected;
    }
    r.entropy_bits_per_byte = entropy;
    r.chi_square = chi2;
    r.chi_square_percent = 100.0 * specfun::regularized_gamma_q(255.0 / 2.0, chi2 / 2.0);
    r.mean = static_cast<double>(sum_) / n;

    if (mc_points_ > 0) {
        r.monte_carlo_pi = 4.0 * static_cast<double>(mc_inside_) / static_cast<double>(mc_points_);
        r.monte_carlo_pi_error_pct = 100.0 * std::fabs(r.monte_carlo_pi - kPi) / kPi;
    } else {
        r.monte_carlo_pi = std::numeric_limits<double>::quiet_NaN();
        r.monte_carlo_pi_error_pct = std::numeric_limits<double>::quiet_NaN();
    }

    // Circular lag-1 correlation: close the ring with last*first.
    using i128 = __int128;
    std::uint64_t sum_sq = 0;
    for (unsigned v = 0; v < 256; ++v)
        sum_sq += counts_[v] * static_cast<std::uint64_t>(v) * v;
    const i128 sx = static_cast<i128>(sum_);
    const i128 circular =
        static_cast<i128>(sum_adjacent_) + static_cast<i128>(last_byte_) * first_byte_;
    const i128 num = static_cast<i128>(total_) * circular - sx * sx;
    const i128 den = static_cast<i128>(total_) * static_cast<i128>(sum_sq) - sx * sx;
    r.serial_correlation = den == 0 ? std::numeric_limits<double>::quiet_NaN()
                                    : static_cast<double>(num) / static_cast<double>(den);
    return r;
}

EntReport ent_report(const BitStream& stream) {
    EntAccumulator acc;
    acc.update(std::span(stream.bytes.data(), stream.bit_length / 8));
    return acc.report();
}

// ----------------------------------------------------------------- bit level

double frequency_p(const BitStream& bs, std::uint64_t offset, std::uint64_t n) {
    n = resolve_range(bs, offset, n, "frequency test");
    const std::uint64_t ones = ones_in_range(bs, offset, n);
    const double s = std::fabs(2.0 * static_cast<double>(ones) - static_cast<double>(n));
    const double s_obs = s / std::sqrt(static_cast<double>(n));
    return clamp_p(specfun::erfc(s_obs / std::sqrt(2.0)));
}

double block_frequency_p(const BitStream& bs, std::uint32_t block_bits,
                         std::uint64_t offset, std::uint64_t n) {
    n = resolve_range(bs, offset, n, "block frequency test");
    if (block_bits == 0) throw StatError("block frequency test: block size must be > 0");
    const std::uint64_t blocks = n / block_bits;
    if (blocks == 0) throw StatError("block frequency test: range shorter than one block");
    std::uint64_t sum_sq_dev = 0;  // sum of (2*ones_i - M)^2
    for (std::uint64_t b = 0; b < blocks; ++b) {
        const std::uint64_t ones = ones_in_range(bs, offset + b * block_bits, block_bits);
        const std::int64_t dev =
            2 * static_cast<std::int64_t>(ones) - static_cast<std::int64_t>(block_bits);
        sum_sq_dev += static_cast<std::uint64_t>(dev * dev);
    }
    const double chi2 = static_cast<double>(sum_sq_dev) / static_cast<double>(block_bits);
    return clamp_p(specfun::regularized_gamma_q(static_cast<double>(blocks) / 2.0, chi2 / 2.0));
}

RunsResult runs_test(const BitStream& bs, std::uint64_t offset, std::uint64_t n) {
    n = resolve_range(bs, offset, n, "runs test");
    const std::uint64_t ones = ones_in_range(bs, offset, n);
    const double pi_hat = static_cast<double>(ones) / static_cast<double>(n);

    RunsResult r;
    r.prerequisite_met = std::fabs(pi_hat - 0.5) < 2.0 / std::sqrt(static_cast<double>(n));
    if (!r.prerequisite_met) {
        r.p_value = 0.0;  // frequency already catastrophically failed
        return r;
    }
    const std::uint8_t* bytes = bs.bytes.data();
    std::uint64_t transitions = 0;
    int prev = bit_at(bs, offset);
    for (std::uint64_t i = 1; i < n; ++i) {
        const std::uint64_t pos = offset + i;
        const int cur = (bytes[pos >> 3] >> (7 - (pos & 7))) & 1;
        transitions += static_cast<unsigned>(cur != prev);
        prev = cur;
    }
    const double v_obs = static_cast<double>(transitions) + 1.0;
    const double nn = static_cast<double>(n);
    const double q = pi_hat * (1.0 - pi_hat);
    r.p_value = clamp_p(specfun::erfc(std::fabs(v_obs - 2.0 * nn * q) /
                                      (2.0 * std::sqrt(2.0 * nn) * q)));
    return r;
}

namespace {

// Common p-value for the cumulative-sums statistic z = max_k |S_k|.
double cusum_p_from_z(std::uint64_t n, std::int64_t z) {
    const double zd = static_cast<double>(z);
    const double nd = static_cast<double>(n);
    const double sqn = std::sqrt(nd);
    const auto k_lo1 = static_cast<long long>(std::floor((-nd / zd + 1.0) / 4.0));
    const auto k_hi = static_cast<long long>(std::floor((nd / zd - 1.0) / 4.0));
    const auto k_lo2 = static_cast<long long>(std::floor((-nd / zd - 3.0) / 4.0));
    double p = 1.0;
    for (long long k = k_lo1; k <= k_hi; ++k) {
        p -= specfun::normal_cdf((4.0 * static_cast<double>(k) + 1.0) * zd / sqn);
        p += specfun::normal_cdf((4.0 * static_cast<double>(k) - 1.0) * zd / sqn);
    }
    for (long long k = k_lo2; k <= k_hi; ++k) {
        p += specfun::normal_cdf((4.0 * static_cast<double>(k) + 3.0) * zd / sqn);
        p -= specfun::normal_cdf((4.0 * static_cast<double>(k) + 1.0) * zd / sqn);
    }
    return clamp_p(p);
}

} // namespace

CusumResult cusum_test(const BitStream& bs, std::uint64_t offset, std::uint64_t n) {
    n = resolve_range(bs, offset, n, "cumulative sums test");
    const std::uint8_t* bytes = bs.bytes.data();

    // One forward pass provides both directions: with prefix sums S_k, the
    // reversed-sequence partial maxima are max |S_n - S_j| over j < n.
    std::int64_t s = 0;
    std::int64_t max_abs_fwd = 0;
    std::int64_t min_prefix = 0, max_prefix = 0;  // over S_0 .. S_{n-1}
    for (std::uint64_t i = 0; i < n; ++i) {
        if (i > 0) {
            min_prefix = std::min(min_prefix, s);
            max_prefix = std::max(max_prefix, s);
        }
        const std::uint64_t pos = offset + i;
        const int x = (bytes[pos >> 3] >> (7 - (pos & 7))) & 1;
        s += x ? 1 : -1;
        max_abs_fwd = std::max(max_abs_fwd, std::abs(s));
    }
    const std::int64_t z_fwd = max_abs_fwd;
    const std::int64_t z_bwd = std::max(std::abs(s - min_prefix), std::abs(s - max_prefix));

    CusumResult r;
    r.p_forward = cusum_p_from_z(n, z_fwd);
    r.p_backward = cusum_p_from_z(n, z_bwd);
    return r;
}

// ------------------------------------------------------------- aggregation

std::uint64_t required_minimum(std::uint64_t sequences, double alpha) {
    if (sequences == 0) throw StatError("pass proportion: no sequences");
    if (!(alpha > 0.0 && alpha < 1.0)) throw StatError("pass proportion: alpha out of (0, 1)");
    const double m = static_cast<double>(sequences);
    const double p = 1.0 - alpha;
    const double bound = m * (p - 3.0 * std::sqrt(p * (1.0 - p) / m));
    return bound <= 0.0 ? 0 : static_cast<std::uint64_t>(std::floor(bound));
}

double uniformity_p_value(std::span<const double> p_values) {
    if (p_values.empty()) throw StatError("uniformity: no p-values");
    std::uint64_t bins[10] = {};
    for (const double p : p_values) {
        auto idx = static_cast<int>(p * 10.0);
        if (idx > 9) idx = 9;
        if (idx < 0) idx = 0;
        ++bins[idx];
    }
    const double expected = static_cast<double>(p_values.size()) / 10.0;
    double chi2 = 0;
    for (const std::uint64_t f : bins) {
        const double dev = static_cast<double>(f) - expected;
        chi2 += dev * dev / expected;
    }
    return specfun::regularized_gamma_q(4.5, chi2 / 2.0);
}

bool BatteryReport::all_pass() const {
    return std::all_of(tests.begin(), tests.end(),
                       [](const TestAggregate& t) { return t.pass(); });
}

BatteryReport run_battery(const BitStream& bs, const BatteryConfig& cfg) {
    if (cfg.sequence_bits == 0) throw StatError("battery: sequence length must be > 0");
    const std::uint64_t m = bs.bit_length / cfg.sequence_bits;
    if (m == 0) throw StatError("battery: stream shorter than one sequence");

    BatteryReport report;
    report.total_bits = bs.bit_length;
    report.sequence_bits = cfg.sequence_bits;
    report.sequences = m;
    report.alpha = cfg.alpha;
    report.tests.resize(5);
    report.tests[0].test = "frequency";
    report.tests[1].test = "block-frequency";
    report.tests[2].test = "runs";
    report.tests[3].test = "cusum-forward";
    report.tests[4].test = "cusum-backward";
    for (auto& t : report.tests) t.p_values.reserve(m);

    for (std::uint64_t i = 0; i < m; ++i) {
        const std::uint64_t off = i * cfg.sequence_bits;
        const std::uint64_t n = cfg.sequence_bits;
        report.tests[0].p_values.push_back(frequency_p(bs, off, n));
        report.tests[1].p_values.push_back(block_frequency_p(bs, cfg.block_bits, off, n));
        report.tests[2].p_values.push_back(runs_test(bs, off, n).p_value);
        const CusumResult c = cusum_test(bs, off, n);
        report.tests[3].p_values.push_back(c.p_forward);
        report.tests[4].p_values.push_back(c.p_backward);
    }

    const std::uint64_t required = required_minimum(m, cfg.alpha);
    for (auto& t : report.tests) {
        t.passed = static_cast<std::uint64_t>(
            std::count_if(t.p_values.begin(), t.p_values.end(),
                          [&](double p) { return p >= cfg.alpha; }));
        t.required = required;
        t.uniformity_p = uniformity_p_value(t.p_values);
        t.proportion_pass = t.passed >= required;
        t.uniformity_pass = t.uniformity_p >= 1.0e-4;
    }
    return report;
}

// ---------------------------------------------------- delayed correlation

CorrelationSeries bit_correlation(const BitStream& bs, unsigned max_delay) {
    if (max_delay < 1 || max_delay > 63)
        throw StatError("delayed correlation: max delay must lie in [1, 63]");
    const std::uint64_t n = bs.bit_length;
    if (n <= max_delay + 1) throw StatError("delayed correlation: stream too short");

    // Repack MSB-first bytes into big-endian words: stream bit i lives in
    // word i/64 at bit position 63 - i%64, so "delay by d" is a word shift.
    const std::uint64_t n_words = (n + 63) / 64;
    std::vector<std::uint64_t> words(n_words + 1, 0);
    for (std::uint64_t j = 0; j < n_words; ++j) {
        std::uint64_t w = 0;
        const std::uint64_t byte_base = j * 8;
        for (unsigned b = 0; b < 8; ++b) {
            const std::uint64_t idx = byte_base + b;
            const std::uint8_t v = idx < bs.bytes.size() ? bs.bytes[idx] : 0;
            w = (w << 8) | v;
        }
        words[j] = w;
    }
    if (n % 64 != 0) words[n_words - 1] &= ~0ull << (64 - n % 64);

    CorrelationSeries series;
    series.bits = n;
    series.r.reserve(max_delay);
    using i128 = __int128;
    for (unsigned d = 1; d <= max_delay; ++d) {
        const std::uint64_t pairs = n - d;
        std::uint64_t s1 = 0, s2 = 0, s12 = 0;
        const std::uint64_t full = pairs / 64;
        for (std::uint64_t j = 0; j < full; ++j) {
            const std::uint64_t w = words[j];
            const std::uint64_t v = (w << d) | (words[j + 1] >> (64 - d));
            s1 += static_cast<unsigned>(std::popcount(w));
            s2 += static_cast<unsigned>(std::popcount(v));
            s12 += static_cast<unsigned>(std::popcount(w & v));
        }
        if (const std::uint64_t rem = pairs % 64; rem != 0) {
            const std::uint64_t mask = ~0ull << (64 - rem);
            const std::uint64_t w = words[full];
            const std::uint64_t v = (w << d) | (words[full + 1] >> (64 - d));
            s1 += static_cast<unsigned>(std::popcount(w & mask));
            s2 += static_cast<unsigned>(std::popcount(v & mask));
            s12 += static_cast<unsigned>(std::popcount(w & v & mask));
        }
        const i128 num = static_cast<i128>(pairs) * s12 - static_cast<i128>(s1) * s2;
        const i128 var1 = static_cast<i128>(pairs) * s1 - static_cast<i128>(s1) * s1;
        const i128 var2 = static_cast<i128>(pairs) * s2 - static_cast<i128>(s2) * s2;
        if (var1 <= 0 || var2 <= 0) {
            series.r.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            series.r.push_back(static_cast<double>(num) /
                               std::sqrt(static_cast<double>(var1) * static_cast<double>(var2)));
        }
    }
    return series;
}

double correlation_null_bound(std::uint64_t bits) {
    if (bits == 0) throw StatError("correlation bound: empty stream");
    return 4.0 / std::sqrt(static_cast<double>(bits));
}

} // namespace toarng::randtests
