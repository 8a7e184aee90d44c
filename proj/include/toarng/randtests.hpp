// Statistical quality tests for bit and byte streams.
//
// Three families:
//   * Byte-level summary statistics (entropy, chi-square vs uniform bytes,
//     mean, Monte-Carlo pi, circular lag-1 serial correlation), accumulated
//     from exact integer sums so results are identical for any chunking.
//   * Bit-level hypothesis tests (frequency, block frequency, runs,
//     cumulative sums) returning p-values, plus the two-level aggregation
//     over fixed-length subsequences: pass proportion against a binomial
//     lower bound and a chi-square uniformity check on the p-value histogram.
//   * Pearson correlation between the bit sequence and itself delayed by
//     d = 1..max bits, computed from integer popcount sums.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "toarng/bits.hpp"

namespace toarng::randtests {

// ---------------------------------------------------------------- byte level

struct EntReport {
    std::uint64_t bytes = 0;
    double entropy_bits_per_byte = 0;  ///< Shannon entropy of the byte histogram
    double chi_square = 0;             ///< 255-dof statistic vs uniform bytes
    double chi_square_percent = 0;     ///< 100 * Q(255/2, chi2/2)
    double mean = 0;                   ///< arithmetic mean byte value
    double monte_carlo_pi = 0;         ///< 6-byte dartboard estimate (NaN if < 6 bytes)
    double monte_carlo_pi_error_pct = 0;
    double serial_correlation = 0;     ///< circular lag-1 (NaN if degenerate)
};

/// Sequential accumulator over a byte stream; update() may be called with
/// successive slices of any size and yields bit-identical reports.
class EntAccumulator {
public:
    void update(std::span<const std::uint8_t> data);
    [[nodiscard]] EntReport report() const;  ///< throws StatError if no bytes seen

private:
    std::uint64_t counts_[256] = {};
    std::uint64_t total_ = 0;
    std::uint64_t sum_ = 0;
    std::uint64_t sum_adjacent_ = 0;  ///< sum of x_i * x_{i+1} within the stream
    std::uint8_t first_byte_ = 0;
    std::uint8_t last_byte_ = 0;
    std::uint8_t mc_group_[6] = {};
    unsigned mc_fill_ = 0;
    std::uint64_t mc_inside_ = 0;
    std::uint64_t mc_points_ = 0;
};

/// Convenience one-shot over the whole-byte prefix of a bit stream (ragged
/// trailing bits, if any, are ignored).
[[nodiscard]] EntReport ent_report(const BitStream& stream);

// ----------------------------------------------------------------- bit level

inline constexpr std::uint64_t kWholeStream = ~0ull;

/// Monobit frequency test. p = erfc(|2*ones - n| / sqrt(n) / sqrt(2)).
[[nodiscard]] double frequency_p(const BitStream& bs, std::uint64_t offset = 0,
                                 std::uint64_t n = kWholeStream);

/// Block frequency test over non-overlapping blocks of block_bits.
[[nodiscard]] double block_frequency_p(const BitStream& bs, std::uint32_t block_bits,
                                       std::uint64_t offset = 0,
                                       std::uint64_t n = kWholeStream);

struct RunsResult {
    double p_value = 0;
    bool prerequisite_met = false;  ///< |ones/n - 1/2| < 2/sqrt(n); p = 0 when violated
};

[[nodiscard]] RunsResult runs_test(const BitStream& bs, std::uint64_t offset = 0,
                                   std::uint64_t n = kWholeStream);

struct CusumResult {
    double p_forward = 0;
    double p_backward = 0;
};

/// Cumulative-sums test on the +-1 mapping of the bits, both directions.
[[nodiscard]] CusumResult cusum_test(const BitStream& bs, std::uint64_t offset = 0,
                                     std::uint64_t n = kWholeStream);

// ------------------------------------------------------------- aggregation

/// Smallest acceptable pass count among m sequences at significance alpha:
/// floor(m * (p - 3*sqrt(p*(1-p)/m))) with p = 1 - alpha.
[[nodiscard]] std::uint64_t required_minimum(std::uint64_t sequences, double alpha);

/// Uniformity of a p-value collection: chi-square over ten equal bins,
/// returned as Q(9/2, chi2/2). Values of exactly 1 fall in the last bin.
[[nodiscard]] double uniformity_p_value(std::span<const double> p_values);

struct TestAggregate {
    std::string test;
    std::vector<double> p_values;    ///< one per sequence, in order
    std::uint64_t passed = 0;        ///< count of p >= alpha
    std::uint64_t required = 0;      ///< binomial lower bound
    double uniformity_p = 0;
    bool proportion_pass = false;    ///< passed >= required
    bool uniformity_pass = false;    ///< uniformity_p >= 1e-4
    [[nodiscard]] bool pass() const { return proportion_pass && uniformity_pass; }
};

struct BatteryConfig {
    std::uint64_t sequence_bits = 1'000'000;
    double alpha = 0.01;
    std::uint32_t block_bits = 128;  ///< block size for the block-frequency test
};

struct BatteryReport {
    std::uint64_t total_bits = 0;
    std::uint64_t sequence_bits = 0;
    std::uint64_t sequences = 0;  ///< full sequences analyzed; remainder ignored
    double alpha = 0;
    std::vector<TestAggregate> tests;  ///< frequency, block-frequency, runs, cusum-fwd, cusum-bwd
    [[nodiscard]] bool all_pass() const;
};

/// Splits the stream into consecutive sequences of sequence_bits, runs every
/// test on each, and aggregates. Throws StatError if no full sequence fits.
[[nodiscard]] BatteryReport run_battery(const BitStream& bs, const BatteryConfig& cfg);

// ---------------------------------------------------- delayed correlation

struct CorrelationSeries {
    std::uint64_t bits = 0;
    std::vector<double> r;  ///< r[d-1] = Pearson correlation at bit delay d
};

/// Pearson correlation between the sequence and itself delayed by
/// d = 1..max_delay bits, exact integer sums, non-circular overlap.
[[nodiscard]] CorrelationSeries bit_correlation(const BitStream& bs, unsigned max_delay);

/// Two-sided null-hypothesis bound used for the delayed correlations.
[[nodiscard]] double correlation_null_bound(std::uint64_t bits);

} // namespace toarng::randtests
