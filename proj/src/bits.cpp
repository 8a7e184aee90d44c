#include "toarng/bits.hpp"

#include <cstdio>
#include <cstring>

#include "toarng/errors.hpp"

namespace toarng {

void BitStream::append_bits(std::uint32_t value, unsigned n) {
    for (unsigned i = n; i-- > 0;) {
        const unsigned bit_in_byte = static_cast<unsigned>(bit_length & 7);
        if (bit_in_byte == 0) bytes.push_back(0);
        if ((value >> i) & 1u) bytes.back() |= static_cast<std::uint8_t>(0x80u >> bit_in_byte);
        ++bit_length;
    }
}

void BitStream::append(const BitStream& other) {
    if ((bit_length & 7) == 0) {
        // byte-aligned fast path
        bytes.insert(bytes.end(), other.bytes.begin(), other.bytes.end());
        bit_length += other.bit_length;
        return;
    }
    for (std::uint64_t i = 0; i < other.bit_length; ++i)
        append_bits(other.bit(i) ? 1u : 0u, 1);
}

namespace bsf {

namespace {

constexpr char kMagic[4] = {'B', 'S', 'F', '1'};
constexpr std::size_t kHeaderBytes = 16;

void put_u64le(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
std::uint64_t get_u64le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::FILE* open_or_throw(const std::string& path, const char* mode) {
    std::FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw IoError("cannot open '" + path + "'");
    return f;
}

} // namespace

void write(const std::string& path, const BitStream& bs) {
    Writer w(path);
    w.append_tail(bs);
    w.close();
}

BitStream read(const std::string& path) {
    Reader r(path);
    BitStream bs;
    bs.bit_length = r.total_bits();
    bs.bytes.reserve(r.total_bytes());
    std::vector<std::uint8_t> chunk;
    while (r.next(chunk, 1 << 20) > 0)
        bs.bytes.insert(bs.bytes.end(), chunk.begin(), chunk.end());
    return bs;
}

Writer::Writer(const std::string& path) : path_(path) {
    std::FILE* f = open_or_throw(path, "wb");
    std::uint8_t header[kHeaderBytes] = {};
    std::memcpy(header, kMagic, 4);
    if (std::fwrite(header, 1, kHeaderBytes, f) != kHeaderBytes) {
        std::fclose(f);
        throw IoError("short write to '" + path + "'");
    }
    file_ = f;
    open_ = true;
}

Writer::~Writer() {
    if (open_) {
        try {
            close();
        } catch (...) {
            std::fclose(static_cast<std::FILE*>(file_));
        }
    }
}

void Writer::append_bytes(std::span<const std::uint8_t> bytes) {
    if (!open_) throw IoError("append on closed writer");
    if (tail_written_) throw IoError("append after ragged tail");
    if (std::fwrite(bytes.data(), 1, bytes.size(), static_cast<std::FILE*>(file_)) !=
        bytes.size())
        throw IoError("short write to '" + path_ + "'");
    bits_ += 8 * static_cast<std::uint64_t>(bytes.size());
}

void Writer::append_tail(const BitStream& tail) {
    if (!open_) throw IoError("append on closed writer");
    if (tail_written_) throw IoError("append after ragged tail");
    if (std::fwrite(tail.bytes.data(), 1, tail.bytes.size(),
                    static_cast<std::FILE*>(file_)) != tail.bytes.size())
        throw IoError("short write to '" + path_ + "'");
    bits_ += tail.bit_length;
    if (tail.bit_length & 7) tail_written_ = true;
}

void Writer::close() {
    if (!open_) return;
    open_ = false;
    std::FILE* f = static_cast<std::FILE*>(file_);
    std::uint8_t len[8];
    put_u64le(len, bits_);
    bool ok = std::fseek(f, 8, SEEK_SET) == 0 && std::fwrite(len, 1, 8, f) == 8;
    ok = (std::fclose(f) == 0) && ok;
    if (!ok) throw IoError("cannot finalize '" + path_ + "'");
}

Reader::Reader(const std::string& path) {
    std::FILE* f = open_or_throw(path, "rb");
    std::uint8_t header[kHeaderBytes];
    if (std::fread(header, 1, kHeaderBytes, f) != kHeaderBytes) {
        std::fclose(f);
        throw IoError("'" + path + "': truncated header");
    }
    if (std::memcmp(header, kMagic, 4) != 0) {
        std::fclose(f);
        throw IoError("'" + path + "': not a BSF1 file");
    }
    total_bits_ = get_u64le(header + 8);
    file_ = f;
}

Reader::~Reader() {
    if (file_) std::fclose(static_cast<std::FILE*>(file_));
}

std::size_t Reader::next(std::vector<std::uint8_t>& out, std::size_t max_bytes) {
    out.clear();
    const std::uint64_t total = total_bytes();
    if (seen_bytes_ >= total) return 0;
    const std::size_t want =
        static_cast<std::size_t>(std::min<std::uint64_t>(max_bytes, total - seen_bytes_));
    out.resize(want);
    if (std::fread(out.data(), 1, want, static_cast<std::FILE*>(file_)) != want)
        throw IoError("bit file truncated mid-stream");
    seen_bytes_ += want;
    return want;
}

} // namespace bsf

void export_ascii(const std::string& bsf_path, const std::string& out_path) {
    bsf::Reader r(bsf_path);
    std::FILE* f = std::fopen(out_path.c_str(), "wb");
    if (!f) throw IoError("cannot open '" + out_path + "'");
    std::uint64_t remaining = r.total_bits();
    std::vector<std::uint8_t> chunk;
    std::vector<char> text;
    try {
        while (r.next(chunk, 1 << 20) > 0) {
            text.clear();
            for (std::uint8_t b : chunk) {
                const unsigned n = remaining >= 8 ? 8u : static_cast<unsigned>(remaining);
                for (unsigned i = 0; i < n; ++i)
                    text.push_back(((b >> (7 - i)) & 1) ? '1' : '0');
                remaining -= n;
            }
            if (std::fwrite(text.data(), 1, text.size(), f) != text.size())
                throw IoError("short write to '" + out_path + "'");
        }
    } catch (...) {
        std::fclose(f);
        throw;
    }
    if (std::fclose(f) != 0) throw IoError("cannot finalize '" + out_path + "'");
}

} // namespace toarng
