// Timestamp container and its on-disk format.
//
// TSF1 layout (little-endian):
//   bytes 0..3   magic "TSF1"
//   bytes 4..7   u32 tick resolution in picoseconds
//   bytes 8..15  u64 tick count
//   then count * u64 ticks (picoseconds), strictly increasing
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace toarng {

/// Detection (or arrival) times in integer picoseconds. Quantized streams
/// carry only multiples of `tick_resolution_ps`; the field records the grid.
struct TimestampStream {
    std::uint32_t tick_resolution_ps = 1;
    std::vector<std::uint64_t> ticks;
};

namespace tsf {

void write(const std::string& path, const TimestampStream& ts);
[[nodiscard]] TimestampStream read(const std::string& path);

/// Incremental writer for streams too large to hold in memory. The count
/// field is back-patched on close.
class Writer {
public:
    Writer(const std::string& path, std::uint32_t tick_resolution_ps);
    ~Writer();
    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    void append(std::span<const std::uint64_t> ticks);
    void close();

    [[nodiscard]] std::uint64_t count() const { return count_; }

private:
    std::string path_;
    std::uint64_t count_ = 0;
    std::uint64_t last_tick_ = 0;
    bool open_ = false;
    void* file_ = nullptr; // std::FILE
};

/// Chunked reader; validates the header eagerly and monotonicity as it goes.
class Reader {
public:
    explicit Reader(const std::string& path);
    ~Reader();
    Reader(const Reader&) = delete;
    Reader& operator=(const Reader&) = delete;

    [[nodiscard]] std::uint32_t tick_resolution_ps() const { return resolution_; }
    [[nodiscard]] std::uint64_t total_count() const { return total_; }

    /// Reads up to max_ticks; returns the number read, 0 at end of stream.
    std::size_t next(std::vector<std::uint64_t>& out, std::size_t max_ticks);

private:
    std::uint32_t resolution_ = 1;
    std::uint64_t total_ = 0;
    std::uint64_t seen_ = 0;
    std::uint64_t last_tick_ = 0;
    void* file_ = nullptr;
};

} // namespace tsf
} // namespace toarng
