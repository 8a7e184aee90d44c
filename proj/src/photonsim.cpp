#include "toarng/photonsim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "toarng/errors.hpp"

namespace toarng::photonsim {
namespace {

// Stream tags; distinct per random purpose so streams never collide.
constexpr std::uint64_t kTagArrivalGaps = 1;
constexpr std::uint64_t kTagThinning = 2;
constexpr std::uint64_t kTagDarkGaps = 3;
constexpr std::uint64_t kTagJitter = 4;

// Gaps whose double value cannot round into a u64 time budget; treat the
// stream as finished instead of invoking llround on out-of-range input.
constexpr double kGapOverflow = 9.0e18;

std::uint64_t round_gap_ps(double gap_ps) {
    const auto g = std::llround(gap_ps);
    return g < 1 ? 1ull : static_cast<std::uint64_t>(g);
}

void validate_detector(const DetectorModel& det) {
    if (!(det.efficiency >= 0.0 && det.efficiency <= 1.0))
        throw ConfigError("detector efficiency must lie in [0, 1]");
    if (det.resolution_ps < 1) throw ConfigError("detector resolution must be >= 1 ps");
    if (!(det.jitter_sigma_ps >= 0.0)) throw ConfigError("jitter sigma must be >= 0");
    if (!(det.dark_rate_hz >= 0.0)) throw ConfigError("dark rate must be >= 0");
}

} // namespace

ArrivalGenerator::ArrivalGenerator(const SourceModel& source)
    : gaps_(source.seed, kTagArrivalGaps) {
    if (!(source.flux_hz > 0.0)) throw ConfigError("source flux must be > 0");
    if (!(source.duration_s > 0.0)) throw ConfigError("source duration must be > 0");
    mean_gap_ps_ = 1.0e12 / source.flux_hz;
    const double dur_ps = source.duration_s * 1.0e12;
    if (dur_ps >= kGapOverflow) throw ConfigError("source duration too long");
    duration_ps_ = static_cast<std::uint64_t>(dur_ps);
    if (duration_ps_ == 0) throw ConfigError("source duration shorter than 1 ps");
}

std::size_t ArrivalGenerator::next(std::vector<std::uint64_t>& out, std::size_t max_events) {
    out.clear();
    if (done_) return 0;
    out.reserve(max_events);
    while (out.size() < max_events) {
        const double gap = gaps_.exponential(index_) * mean_gap_ps_;
        if (gap >= kGapOverflow) {
            done_ = true;
            break;
        }
        const std::uint64_t step = round_gap_ps(gap);
        if (duration_ps_ - t_ps_ <= step) { // t + step >= duration, without overflow
            done_ = true;
            break;
        }
        t_ps_ += step;
        ++index_;
        out.push_back(t_ps_);
    }
    return out.size();
}

TimestampStream generate_arrivals(const SourceModel& source) {
    ArrivalGenerator gen(source);
    TimestampStream stream;
    stream.tick_resolution_ps = 1;
    std::vector<std::uint64_t> chunk;
    while (gen.next(chunk, 1u << 20) > 0)
        stream.ticks.insert(stream.ticks.end(), chunk.begin(), chunk.end());
    return stream;
}

DetectorStage::DetectorStage(const DetectorModel& det, std::uint64_t seed,
                             std::uint64_t duration_ps)
    : det_(det),
      thin_(seed, kTagThinning),
      dark_gaps_(seed, kTagDarkGaps),
      jitter_(seed, kTagJitter),
      duration_ps_(duration_ps) {
    validate_detector(det);
    if (det_.dark_rate_hz > 0.0) {
        dark_mean_gap_ps_ = 1.0e12 / det_.dark_rate_hz;
        darks_exhausted_ = false;
        const double gap = dark_gaps_.exponential(dark_index_++) * dark_mean_gap_ps_;
        if (gap >= kGapOverflow)
            darks_exhausted_ = true;
        else
            next_dark_ps_ = round_gap_ps(gap);
    }
    if (det_.jitter_sigma_ps > 0.0)
        jitter_window_ps_ = static_cast<std::int64_t>(std::ceil(8.0 * det_.jitter_sigma_ps)) + 2;
}

void DetectorStage::absorb_darks_until(std::uint64_t t_ps, std::vector<std::uint64_t>& out) {
    while (!darks_exhausted_ && next_dark_ps_ <= t_ps) {
        const std::uint64_t dark_t = next_dark_ps_;
        const double gap = dark_gaps_.exponential(dark_index_++) * dark_mean_gap_ps_;
        if (gap >= kGapOverflow)
            darks_exhausted_ = true;
        else
            next_dark_ps_ += round_gap_ps(gap);
        offer(dark_t, /*dark=*/true, out);
    }
}

void DetectorStage::offer(std::uint64_t t_ps, bool dark, std::vector<std::uint64_t>& out) {
    if (dark) {
        ++stats_.dark_events;
    } else {
        ++stats_.source_events;
        const double u = thin_.uniform(source_index_++);
        if (u > det_.efficiency) {
            ++stats_.thinned;
            return;
        }
    }
    if (any_accepted_ && t_ps < hold_off_until_ps_) {
        ++stats_.dead_time_drops;
        return;
    }
    any_accepted_ = true;
    hold_off_until_ps_ = t_ps + det_.dead_time_ps;

    std::int64_t jittered = static_cast<std::int64_t>(t_ps);
    if (det_.jitter_sigma_ps > 0.0) {
        const double displaced =
            static_cast<double>(t_ps) + jitter_.gaussian(accepted_index_) * det_.jitter_sigma_ps;
        jittered = std::llround(displaced);
        if (jittered < 0) jittered = 0;
    }
    ++accepted_index_;

    sort_buf_.push_back(jittered);
    std::push_heap(sort_buf_.begin(), sort_buf_.end(), std::greater<>{});
    flush_ready(t_ps, out);
}

void DetectorStage::flush_ready(std::uint64_t horizon_ps, std::vector<std::uint64_t>& out) {
    // Any future candidate arrives at pre-jitter time > horizon and can land
    // no earlier than horizon - (8 sigma + rounding). Everything at or below
    // the safe line is final and may be emitted in sorted order.
    const std::int64_t safe = static_cast<std::int64_t>(horizon_ps) - jitter_window_ps_;
    while (!sort_buf_.empty() && sort_buf_.front() <= safe) {
        const std::int64_t t = sort_buf_.front();
        std::pop_heap(sort_buf_.begin(), sort_buf_.end(), std::greater<>{});
        sort_buf_.pop_back();
        emit(t, out);
    }
}

void DetectorStage::emit(std::int64_t jittered_ps, std::vector<std::uint64_t>& out) {
    const std::uint64_t res = det_.resolution_ps;
    const std::uint64_t t = static_cast<std::uint64_t>(jittered_ps);
    const std::uint64_t tick = (t + res / 2) / res * res;  // nearest grid point, ties up
    if (any_emitted_ && tick <= last_tick_) {
        ++stats_.duplicate_drops;
        return;
    }
    any_emitted_ = true;
    last_tick_ = tick;
    ++stats_.detections;
    out.push_back(tick);
}

void DetectorStage::push(std::span<const std::uint64_t> arrival_ps,
                         std::vector<std::uint64_t>& out_ticks) {
    if (finished_) throw IoError("detector stage already finished");
    for (const std::uint64_t t : arrival_ps) {
        if ((stats_.source_events > 0 || last_pushed_ps_ > 0) && t <= last_pushed_ps_)
            throw IoError("arrival times must be strictly increasing");
        absorb_darks_until(t, out_ticks);
        offer(t, /*dark=*/false, out_ticks);
        last_pushed_ps_ = t;
    }
}

void DetectorStage::finish(std::vector<std::uint64_t>& out_ticks) {
    if (finished_) throw IoError("detector stage already finished");
    finished_ = true;
    if (!darks_exhausted_) {
        // Dark counts run to the end of the observation window; without an
        // explicit window they stop at the last real arrival.
        const std::uint64_t bound = duration_ps_ > 0 ? duration_ps_ : last_pushed_ps_ + 1;
        while (!darks_exhausted_ && next_dark_ps_ < bound) {
            const std::uint64_t dark_t = next_dark_ps_;
            const double gap = dark_gaps_.exponential(dark_index_++) * dark_mean_gap_ps_;
            if (gap >= kGapOverflow)
                darks_exhausted_ = true;
            else
                next_dark_ps_ += round_gap_ps(gap);
            offer(dark_t, /*dark=*/true, out_ticks);
        }
        darks_exhausted_ = true;
    }
    std::sort(sort_buf_.begin(), sort_buf_.end());
    for (const std::int64_t t : sort_buf_) emit(t, out_ticks);
    sort_buf_.clear();
}

TimestampStream apply_detector(const TimestampStream& ideal, const DetectorModel& det,
                               std::uint64_t seed, std::uint64_t duration_ps,
                               DetectorStats* stats) {
    validate_detector(det);
    TimestampStream result;
    result.tick_resolution_ps = det.resolution_ps;

    DetectorStage stage(det, seed, duration_ps);
    std::vector<std::uint64_t> out;
    constexpr std::size_t kChunk = 1u << 20;
    for (std::size_t base = 0; base < ideal.ticks.size(); base += kChunk) {
        const std::size_t n = std::min(kChunk, ideal.ticks.size() - base);
        out.clear();
        stage.push(std::span(ideal.ticks.data() + base, n), out);
        result.ticks.insert(result.ticks.end(), out.begin(), out.end());
    }
    out.clear();
    stage.finish(out);
    result.ticks.insert(result.ticks.end(), out.begin(), out.end());
    if (stats) *stats = stage.stats();
    return result;
}

std::vector<double> bin_occupancy_oracle(unsigned bins, unsigned k, std::uint64_t trials,
                                         std::uint64_t seed) {
    if (bins < 1) throw ConfigError("bin count must be >= 1");
    if (k < 1) throw ConfigError("occupancy k must be >= 1");
    if (trials < 1) throw ConfigError("trial count must be >= 1");
    rng::CounterStream points(seed, /*tag=*/0x6F7261636C65ull); // "oracle"
    std::vector<std::uint64_t> hist(bins, 0);
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        double first = 2.0;
        for (unsigned j = 0; j < k; ++j)
            first = std::min(first, points.uniform_co(trial * k + j));
        auto bin = static_cast<std::size_t>(first * static_cast<double>(bins));
        if (bin >= bins) bin = bins - 1;
        ++hist[bin];
    }
    std::vector<double> freq(bins);
    for (unsigned i = 0; i < bins; ++i)
        freq[i] = static_cast<double>(hist[i]) / static_cast<double>(trials);
    return freq;
}

} // namespace toarng::photonsim
