// Photon arrival simulation and the detector imperfection pipeline.
//
// An attenuated coherent source is a Poisson point process: exponential
// inter-arrival gaps at the configured intensity. The detector stage then
// applies, in order: dark-count merging, efficiency thinning (dark counts
// originate inside the detector and bypass it), non-paralyzable dead time,
// Gaussian timing jitter with a re-sort, and quantization to the instrument
// resolution with exact-duplicate removal.
//
// All randomness is drawn from counter-based streams (rng.hpp) indexed by
// event ordinals, so output is a pure function of (model, seed) regardless of
// how generation is chunked.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "toarng/rng.hpp"
#include "toarng/timestamps.hpp"

namespace toarng::photonsim {

struct SourceModel {
    double flux_hz = 0;     ///< mean photon rate reaching the detector face
    double duration_s = 0;  ///< observation window
    std::uint64_t seed = 0;
};

struct DetectorModel {
    double efficiency = 1.0;          ///< detection probability per photon, [0, 1]
    std::uint64_t dead_time_ps = 0;   ///< non-paralyzable hold-off after a detection
    double jitter_sigma_ps = 0.0;     ///< Gaussian timing uncertainty (clamped +-8 sigma)
    std::uint32_t resolution_ps = 1;  ///< timestamping grid, round-half-up
    double dark_rate_hz = 0.0;        ///< Poisson dark counts, exempt from efficiency
};

struct DetectorStats {
    std::uint64_t source_events = 0;    ///< photons offered to the detector
    std::uint64_t dark_events = 0;      ///< dark counts injected
    std::uint64_t thinned = 0;          ///< photons removed by efficiency
    std::uint64_t dead_time_drops = 0;  ///< events inside a hold-off window
    std::uint64_t duplicate_drops = 0;  ///< equal ticks after quantization
    std::uint64_t detections = 0;       ///< events in the output stream
};

/// Ideal arrival times at 1 ps resolution, strictly increasing, < duration.
/// Gap i uses draw i of the gap stream; sub-picosecond gaps collapse to 1 ps.
[[nodiscard]] TimestampStream generate_arrivals(const SourceModel& source);

/// Chunked equivalent of generate_arrivals: repeated next() calls yield the
/// identical tick sequence for any chunk sizes.
class ArrivalGenerator {
public:
    explicit ArrivalGenerator(const SourceModel& source);

    /// Appends up to max_events ticks to out (cleared first); returns the
    /// number produced, 0 once the duration is exhausted.
    std::size_t next(std::vector<std::uint64_t>& out, std::size_t max_events);

    [[nodiscard]] std::uint64_t produced() const { return index_; }

private:
    rng::CounterStream gaps_;
    double mean_gap_ps_ = 0;
    std::uint64_t duration_ps_ = 0;
    std::uint64_t t_ps_ = 0;
    std::uint64_t index_ = 0;
    bool done_ = false;
};

/// Streaming detector pipeline. Feed strictly increasing candidate arrival
/// times via push(); call finish() exactly once. Output order and content do
/// not depend on how input is sliced into chunks.
class DetectorStage {
public:
    /// duration_ps bounds dark-count generation; pass the source observation
    /// window. Zero disables dark counts after the last pushed arrival.
    DetectorStage(const DetectorModel& det, std::uint64_t seed, std::uint64_t duration_ps);

    /// Both calls append to out_ticks; the caller clears between chunks.
    void push(std::span<const std::uint64_t> arrival_ps, std::vector<std::uint64_t>& out_ticks);
    void finish(std::vector<std::uint64_t>& out_ticks);

    [[nodiscard]] const DetectorStats& stats() const { return stats_; }

private:
    void offer(std::uint64_t t_ps, bool dark, std::vector<std::uint64_t>& out);
    void absorb_darks_until(std::uint64_t t_ps, std::vector<std::uint64_t>& out);
    void flush_ready(std::uint64_t horizon_ps, std::vector<std::uint64_t>& out);
    void emit(std::int64_t jittered_ps, std::vector<std::uint64_t>& out);

    DetectorModel det_;
    DetectorStats stats_;
    rng::CounterStream thin_, dark_gaps_, jitter_;
    std::uint64_t duration_ps_ = 0;
    double dark_mean_gap_ps_ = 0;

    std::uint64_t next_dark_ps_ = 0;   ///< pending dark candidate, valid if darks on
    std::uint64_t dark_index_ = 0;
    bool darks_exhausted_ = true;

    std::uint64_t source_index_ = 0;   ///< thinning counter
    std::uint64_t accepted_index_ = 0; ///< jitter counter
    std::uint64_t hold_off_until_ps_ = 0;
    bool any_accepted_ = false;

    std::vector<std::int64_t> sort_buf_; ///< min-heap of jittered times
    std::int64_t jitter_window_ps_ = 0;
    std::uint64_t last_pushed_ps_ = 0;

    std::uint64_t last_tick_ = 0;
    bool any_emitted_ = false;
    bool finished_ = false;
};

/// One-shot detector pipeline over a whole stream. duration_ps == 0 means
/// "up to the last arrival" (dark counts stop there).
[[nodiscard]] TimestampStream apply_detector(const TimestampStream& ideal,
                                             const DetectorModel& det, std::uint64_t seed,
                                             std::uint64_t duration_ps = 0,
                                             DetectorStats* stats = nullptr);

/// Monte-Carlo oracle for the first-arrival bin law: drops k uniform points
/// into an interval split into `bins` bins, histograms the earliest point's
/// bin over `trials` repetitions, and returns relative frequencies.
[[nodiscard]] std::vector<double> bin_occupancy_oracle(unsigned bins, unsigned k,
                                                       std::uint64_t trials,
                                                       std::uint64_t seed);

} // namespace toarng::photonsim
