// Packed bit container and its on-disk format.
//
// Bits are packed MSB-first: stream bit k lives in byte k/8 at bit 7 - k%8.
//
// BSF1 layout (little-endian):
//   bytes 0..3   magic "BSF1"
//   bytes 4..7   reserved, zero
//   bytes 8..15  u64 bit length
//   then ceil(bit_length/8) payload bytes; unused low bits of the final
//   byte are zero
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace toarng {

struct BitStream {
    std::vector<std::uint8_t> bytes;
    std::uint64_t bit_length = 0;

    [[nodiscard]] bool bit(std::uint64_t i) const {
        return (bytes[i >> 3] >> (7 - (i & 7))) & 1;
    }

    /// Appends the low `n` bits of `value`, most significant first.
    void append_bits(std::uint32_t value, unsigned n);

    /// Appends another stream, preserving bit order across byte seams.
    void append(const BitStream& other);
};

namespace bsf {

void write(const std::string& path, const BitStream& bs);
[[nodiscard]] BitStream read(const std::string& path);

/// Incremental byte-aligned writer; bit length is back-patched on close.
class Writer {
public:
    explicit Writer(const std::string& path);
    ~Writer();
    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    /// Appends whole bytes (8 bits each).
    void append_bytes(std::span<const std::uint8_t> bytes);
    /// Appends a final possibly ragged piece; no appends may follow.
    void append_tail(const BitStream& tail);
    void close();

    [[nodiscard]] std::uint64_t bit_count() const { return bits_; }

private:
    std::string path_;
    std::uint64_t bits_ = 0;
    bool tail_written_ = false;
    bool open_ = false;
    void* file_ = nullptr;
};

/// Chunked reader returning whole bytes; the final byte may be ragged, see
/// total_bits().
class Reader {
public:
    explicit Reader(const std::string& path);
    ~Reader();
    Reader(const Reader&) = delete;
    Reader& operator=(const Reader&) = delete;

    [[nodiscard]] std::uint64_t total_bits() const { return total_bits_; }
    [[nodiscard]] std::uint64_t total_bytes() const { return (total_bits_ + 7) / 8; }

    /// Reads up to max_bytes; returns the number read, 0 at end.
    std::size_t next(std::vector<std::uint8_t>& out, std::size_t max_bytes);

private:
    std::uint64_t total_bits_ = 0;
    std::uint64_t seen_bytes_ = 0;
    void* file_ = nullptr;
};

} // namespace bsf

/// Writes one '0'/'1' character per bit, no separators.
void export_ascii(const std::string& bsf_path, const std::string& out_path);

} // namespace toarng
