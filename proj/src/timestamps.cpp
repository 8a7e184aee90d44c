#include "toarng/timestamps.hpp"

#include <array>
#include <cstdio>
#include <cstring>

#include "toarng/errors.hpp"

namespace toarng::tsf {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'F', '1'};
constexpr std::size_t kHeaderBytes = 16;

void put_u32le(std::uint8_t* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void put_u64le(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
std::uint32_t get_u32le(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
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

// Ticks cross the ABI as explicit little-endian buffers; the in-memory u64
// layout never touches the file.
void write_ticks(std::FILE* f, std::span<const std::uint64_t> ticks, const std::string& path) {
    std::array<std::uint8_t, 8 * 4096> buf;
    std::size_t done = 0;
    while (done < ticks.size()) {
        const std::size_t n = std::min<std::size_t>(4096, ticks.size() - done);
        for (std::size_t i = 0; i < n; ++i) put_u64le(buf.data() + 8 * i, ticks[done + i]);
        if (std::fwrite(buf.data(), 1, 8 * n, f) != 8 * n)
            throw IoError("short write to '" + path + "'");
        done += n;
    }
}

} // namespace

void write(const std::string& path, const TimestampStream& ts) {
    Writer w(path, ts.tick_resolution_ps);
    w.append(ts.ticks);
    w.close();
}

TimestampStream read(const std::string& path) {
    Reader r(path);
    TimestampStream ts;
    ts.tick_resolution_ps = r.tick_resolution_ps();
    ts.ticks.reserve(r.total_count());
    std::vector<std::uint64_t> chunk;
    while (r.next(chunk, 1 << 16) > 0)
        ts.ticks.insert(ts.ticks.end(), chunk.begin(), chunk.end());
    return ts;
}

Writer::Writer(const std::string& path, std::uint32_t tick_resolution_ps) : path_(path) {
    if (tick_resolution_ps == 0) throw ConfigError("tick resolution must be >= 1 ps");
    std::FILE* f = open_or_throw(path, "wb");
    std::uint8_t header[kHeaderBytes];
    std::memcpy(header, kMagic, 4);
    put_u32le(header + 4, tick_resolution_ps);
    put_u64le(header + 8, 0); // patched in close()
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

void Writer::append(std::span<const std::uint64_t> ticks) {
    if (!open_) throw IoError("append on closed writer");
    for (std::uint64_t t : ticks) {
        if (count_ > 0 && t <= last_tick_)
            throw ConfigError("timestamps must be strictly increasing");
        last_tick_ = t;
        ++count_;
    }
    write_ticks(static_cast<std::FILE*>(file_), ticks, path_);
}

void Writer::close() {
    if (!open_) return;
    open_ = false;
    std::FILE* f = static_cast<std::FILE*>(file_);
    std::uint8_t cnt[8];
    put_u64le(cnt, count_);
    bool ok = std::fseek(f, 8, SEEK_SET) == 0 && std::fwrite(cnt, 1, 8, f) == 8;
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
        throw IoError("'" + path + "': not a TSF1 file");
    }
    resolution_ = get_u32le(header + 4);
    total_ = get_u64le(header + 8);
    if (resolution_ == 0) {
        std::fclose(f);
        throw IoError("'" + path + "': zero tick resolution");
    }
    file_ = f;
}

Reader::~Reader() {
    if (file_) std::fclose(static_cast<std::FILE*>(file_));
}

std::size_t Reader::next(std::vector<std::uint64_t>& out, std::size_t max_ticks) {
    out.clear();
    if (seen_ >= total_) return 0;
    const std::size_t want =
        static_cast<std::size_t>(std::min<std::uint64_t>(max_ticks, total_ - seen_));
    std::vector<std::uint8_t> buf(8 * want);
    const std::size_t got = std::fread(buf.data(), 8, want, static_cast<std::FILE*>(file_));
    if (got != want) throw IoError("timestamp file truncated mid-stream");
    out.resize(want);
    for (std::size_t i = 0; i < want; ++i) {
        out[i] = get_u64le(buf.data() + 8 * i);
        if (seen_ + i > 0 && out[i] <= last_tick_)
            throw IoError("timestamp file is not strictly increasing");
        last_tick_ = out[i];
    }
    seen_ += want;
    return want;
}

} // namespace toarng::tsf
