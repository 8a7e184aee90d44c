#include "toarng/extract.hpp"

#include <bit>

#include "toarng/errors.hpp"

namespace toarng::extract {

unsigned bits_per_symbol(std::uint32_t bins) {
    if (bins < 2 || !std::has_single_bit(bins))
        throw ConfigError("bin count must be a power of two >= 2");
    return static_cast<unsigned>(std::countr_zero(bins));
}

void validate(const ExtractionConfig& cfg, std::uint32_t tick_resolution_ps) {
    (void)bits_per_symbol(cfg.bins);  // validates the power-of-two shape
    if (cfg.period_ps == 0) throw ConfigError("interval period must be > 0");
    if (cfg.period_ps % cfg.bins != 0)
        throw ConfigError("interval period must be an integer multiple of the bin count");
    const std::uint64_t bin_width = cfg.period_ps / cfg.bins;
    if (tick_resolution_ps == 0) throw ConfigError("timestamp resolution must be >= 1 ps");
    if (bin_width < tick_resolution_ps)
        throw ConfigError("bin width is finer than the timestamp resolution");
}

std::uint32_t bin_index(std::uint64_t t_ps, const ExtractionConfig& cfg) {
    if (t_ps < cfg.origin_ps) throw ConfigError("timestamp precedes the interval origin");
    const std::uint64_t offset = (t_ps - cfg.origin_ps) % cfg.period_ps;
    return static_cast<std::uint32_t>(offset / (cfg.period_ps / cfg.bins));
}

StreamingExtractor::StreamingExtractor(const ExtractionConfig& cfg,
                                       std::uint32_t tick_resolution_ps)
    : cfg_(cfg) {
    validate(cfg, tick_resolution_ps);
    bits_per_symbol_ = bits_per_symbol(cfg.bins);
    bin_width_ps_ = cfg.period_ps / cfg.bins;
}

void StreamingExtractor::push(std::span<const std::uint64_t> ticks, BitStream& out) {
    for (const std::uint64_t tick : ticks) {
        if (any_tick_ && tick <= last_tick_)
            throw IoError("timestamps must be strictly increasing");
        any_tick_ = true;
        last_tick_ = tick;

        const std::uint64_t t_ps = tick;  // ticks are picoseconds
        if (t_ps < cfg_.origin_ps) {
            ++stats_.events_before_origin;
            continue;
        }
        const std::uint64_t offset = t_ps - cfg_.origin_ps;
        const std::uint64_t interval = offset / cfg_.period_ps;
        if (any_interval_ && interval == last_interval_) {
            ++stats_.events_dropped_same_interval;
            continue;
        }
        any_interval_ = true;
        last_interval_ = interval;
        const auto bin = static_cast<std::uint64_t>((offset % cfg_.period_ps) / bin_width_ps_);
        out.append_bits(bin, bits_per_symbol_);
        ++stats_.events_consumed;
        stats_.bits_emitted += bits_per_symbol_;
    }
}

BitStream extract_bits(const TimestampStream& stream, const ExtractionConfig& cfg,
                             ExtractionStats* stats) {
    StreamingExtractor ex(cfg, stream.tick_resolution_ps);
    BitStream out;
    ex.push(stream.ticks, out);
    if (stats) *stats = ex.stats();
    return out;
}

} // namespace toarng::extract
