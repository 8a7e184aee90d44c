// De-correlating block shuffle.
//
// The raw extractor output carries a small positive correlation between bits
// of equal significance in adjacent symbols (an artifact of detector hold-off
// linking neighbouring occupied intervals). This stage permutes each 64-byte
// block so that such neighbouring same-weight bit pairs land far apart:
// viewing the block as an 8x8 byte matrix M, output byte (r, c) collects, at
// bit position b, bit r of M[b][bitrev3(c)] — a per-column 8x8 bit transpose
// combined with a bit-reversal permutation of the source columns.
//
// The transform is an involution (applying it twice restores the input) and
// a pure bit permutation: population count and byte-histogram mass are
// preserved exactly. A trailing partial block is passed through unchanged.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "toarng/bits.hpp"

namespace toarng::postproc {

inline constexpr std::size_t kBlockBytes = 64;

/// In-place shuffle of one 64-byte block.
void shuffle_block(std::uint8_t* block) noexcept;

struct ShuffleStats {
    std::uint64_t blocks = 0;           ///< full blocks transformed
    std::uint64_t tail_bytes = 0;       ///< trailing bytes passed through
};

/// Streaming shuffler: push() emits every completed block, finish() flushes
/// the partial tail verbatim. Output is invariant to input chunking.
class StreamingShuffler {
public:
    void push(std::span<const std::uint8_t> data, std::vector<std::uint8_t>& out);
    void finish(std::vector<std::uint8_t>& out);

    [[nodiscard]] const ShuffleStats& stats() const { return stats_; }

private:
    std::uint8_t buf_[kBlockBytes] = {};
    std::size_t fill_ = 0;
    bool finished_ = false;
    ShuffleStats stats_;
};

/// Whole-stream shuffle; bit length is preserved.
[[nodiscard]] BitStream shuffle(const BitStream& in, ShuffleStats* stats = nullptr);

} // namespace toarng::postproc
