// Time-of-arrival bit extraction.
//
// The time axis is divided into consecutive reference intervals of fixed
// period, each split into a power-of-two number of equal bins. For every
// interval that contains at least one detection, the index of the bin holding
// the FIRST detection in that interval is emitted as log2(bins) bits,
// most-significant bit first. Later detections in the same interval and empty
// intervals contribute nothing.
#pragma once

#include <cstdint>
#include <span>

#include "toarng/bits.hpp"
#include "toarng/timestamps.hpp"

namespace toarng::extract {

struct ExtractionConfig {
    std::uint64_t period_ps = 0;  ///< reference interval length
    std::uint32_t bins = 0;       ///< power of two, >= 2
    std::uint64_t origin_ps = 0;  ///< start of interval 0
};

struct ExtractionStats {
    std::uint64_t events_consumed = 0;  ///< events that produced a symbol
    std::uint64_t events_dropped_same_interval = 0;
    std::uint64_t events_before_origin = 0;
    std::uint64_t bits_emitted = 0;  ///< always events_consumed * log2(bins)
};

/// Bits contributed per occupied interval: log2(bins).
[[nodiscard]] unsigned bits_per_symbol(std::uint32_t bins);

/// Validates the configuration against a timestamp resolution: the period
/// must be a positive multiple of bins, and a bin must not be finer than the
/// timestamp grid (otherwise some bins are unreachable and the symbol law is
/// distorted).
void validate(const ExtractionConfig& cfg, std::uint32_t tick_resolution_ps);

/// Bin index of a timestamp (ps) relative to the interval that contains it.
[[nodiscard]] std::uint32_t bin_index(std::uint64_t t_ps, const ExtractionConfig& cfg);

/// Streaming extractor; feed strictly increasing timestamps chunk by chunk.
/// Output is invariant to the chunking.
class StreamingExtractor {
public:
    StreamingExtractor(const ExtractionConfig& cfg, std::uint32_t tick_resolution_ps);

    void push(std::span<const std::uint64_t> ticks, BitStream& out);

    [[nodiscard]] const ExtractionStats& stats() const { return stats_; }

private:
    ExtractionConfig cfg_;
    unsigned bits_per_symbol_;
    std::uint64_t bin_width_ps_;
    std::uint64_t last_interval_ = 0;
    bool any_interval_ = false;
    std::uint64_t last_tick_ = 0;
    bool any_tick_ = false;
    ExtractionStats stats_;
};

/// One-shot extraction over a whole stream.
[[nodiscard]] BitStream extract_bits(const TimestampStream& stream,
                                           const ExtractionConfig& cfg,
                                           ExtractionStats* stats = nullptr);

} // namespace toarng::extract
