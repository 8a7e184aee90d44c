#include "toarng/postproc.hpp"

#include <algorithm>
#include <cstring>

#include "toarng/errors.hpp"

namespace toarng::postproc {
namespace {

// Bit-reversal of a 3-bit index; its own inverse.
constexpr std::uint8_t kBitRev3[8] = {0, 4, 2, 6, 1, 5, 3, 7};

// Transpose of an 8x8 bit matrix packed row-major from the most significant
// byte: element (i, j) sits at bit 63 - (8i + j). Hacker's Delight 7-10.
std::uint64_t transpose8(std::uint64_t y) noexcept {
    std::uint64_t t = (y ^ (y >> 7)) & 0x00AA00AA00AA00AAull;
    y ^= t ^ (t << 7);
    t = (y ^ (y >> 14)) & 0x0000CCCC0000CCCCull;
    y ^= t ^ (t << 14);
    t = (y ^ (y >> 28)) & 0x00000000F0F0F0F0ull;
    y ^= t ^ (t << 28);
    return y;
}

} // namespace

void shuffle_block(std::uint8_t* block) noexcept {
    std::uint8_t out[kBlockBytes];
    for (unsigned c = 0; c < 8; ++c) {
        const unsigned src = kBitRev3[c];
        std::uint64_t col = 0;
        for (unsigned r = 0; r < 8; ++r) col = (col << 8) | block[8 * r + src];
        const std::uint64_t t = transpose8(col);
        for (unsigned r = 0; r < 8; ++r)
            out[8 * r + c] = static_cast<std::uint8_t>(t >> (8 * (7 - r)));
    }
    std::memcpy(block, out, kBlockBytes);
}

void StreamingShuffler::push(std::span<const std::uint8_t> data,
                             std::vector<std::uint8_t>& out) {
    if (finished_) throw IoError("shuffler already finished");
    if (data.empty()) return;
    std::size_t i = 0;
    // Complete a partially buffered block first.
    if (fill_ > 0) {
        const std::size_t take = std::min(kBlockBytes - fill_, data.size());
        std::memcpy(buf_ + fill_, data.data(), take);
        fill_ += take;
        i = take;
        if (fill_ == kBlockBytes) {
            shuffle_block(buf_);
            out.insert(out.end(), buf_, buf_ + kBlockBytes);
            ++stats_.blocks;
            fill_ = 0;
        }
    }
    // Whole blocks straight from the input.
    while (data.size() - i >= kBlockBytes) {
        std::uint8_t block[kBlockBytes];
        std::memcpy(block, data.data() + i, kBlockBytes);
        shuffle_block(block);
        out.insert(out.end(), block, block + kBlockBytes);
        ++stats_.blocks;
        i += kBlockBytes;
    }
    // Buffer the remainder.
    if (i < data.size()) {
        std::memcpy(buf_ + fill_, data.data() + i, data.size() - i);
        fill_ += data.size() - i;
    }
}

void StreamingShuffler::finish(std::vector<std::uint8_t>& out) {
    if (finished_) throw IoError("shuffler already finished");
    finished_ = true;
    if (fill_ > 0) {
        out.insert(out.end(), buf_, buf_ + fill_);
        stats_.tail_bytes = fill_;
        fill_ = 0;
    }
}

BitStream shuffle(const BitStream& in, ShuffleStats* stats) {
    BitStream out;
    out.bit_length = in.bit_length;
    out.bytes.reserve(in.bytes.size());

    StreamingShuffler sh;
    sh.push(std::span(in.bytes.data(), in.bit_length / 8), out.bytes);
    sh.finish(out.bytes);
    // A ragged final byte (bit_length % 8 != 0) rides along unchanged.
    if (in.bit_length % 8 != 0) out.bytes.push_back(in.bytes[in.bit_length / 8]);
    if (stats) {
        *stats = sh.stats();
        if (in.bit_length % 8 != 0) ++stats->tail_bytes;
    }
    return out;
}

} // namespace toarng::postproc
