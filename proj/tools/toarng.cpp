// toarng — command-line pipeline for time-of-arrival random number tooling.
//
// Subcommands:
//   simulate      photon arrivals + detector imperfections -> TSF1 timestamps
//   extract       TSF1 timestamps -> BSF1 bits (reference-interval binning)
//   shuffle       BSF1 -> BSF1 through the de-correlating block shuffle
//   analyze       BSF1 -> JSON quality report (byte stats, bit tests, delays)
//   metrics       closed-form interval/entropy/dead-time numbers
//   budget        optical loss budget of a source-to-detector chain
//   export-ascii  BSF1 -> '0'/'1' text
//   run           simulate -> extract -> [shuffle] -> analyze in one pass
//
// Exit codes: 0 success, 2 configuration error, 3 I/O or file-format error,
// 4 statistical-precondition error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "toarng/bits.hpp"
#include "toarng/errors.hpp"
#include "toarng/extract.hpp"
#include "toarng/photonsim.hpp"
#include "toarng/postproc.hpp"
#include "toarng/qmetrics.hpp"
#include "toarng/randtests.hpp"
#include "toarng/timestamps.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace toarng;

constexpr const char* kToolName = "toarng";
constexpr const char* kToolVersion = "0.1.0";

// ----------------------------------------------------------------- helpers

/// Doubles are reported with 6 significant digits; non-finite values map to
/// null so reports stay valid JSON.
json num6(double v) {
    if (!std::isfinite(v)) return nullptr;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return json(std::strtod(buf, nullptr));
}

/// Parses a duration with ps/ns/us/ms/s suffix (bare numbers are ps) into
/// integer picoseconds.
std::uint64_t parse_duration_ps(const std::string& text, const char* what) {
    const std::string fail = std::string("invalid ") + what + " '" + text +
                             "': expected <number>[ps|ns|us|ms|s]";
    if (text.empty()) throw ConfigError(fail);
    std::size_t pos = 0;
    double value = 0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError(fail);
    }
    std::string suffix = text.substr(pos);
    double scale = 1.0;
    if (suffix == "ps" || suffix.empty())
        scale = 1.0;
    else if (suffix == "ns")
        scale = 1.0e3;
    else if (suffix == "us")
        scale = 1.0e6;
    else if (suffix == "ms")
        scale = 1.0e9;
    else if (suffix == "s")
        scale = 1.0e12;
    else
        throw ConfigError(fail);
    const double ps = value * scale;
    if (!(ps >= 0) || ps >= 9.0e18) throw ConfigError(fail);
    return static_cast<std::uint64_t>(std::llround(ps));
}

void write_text(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    const std::size_t n = std::fwrite(text.data(), 1, text.size(), f);
    const int rc = std::fclose(f);
    if (n != text.size() || rc != 0) throw IoError("short write to '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open '" + path + "' for reading");
    std::string text;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, n);
    const bool bad = std::ferror(f) != 0;
    std::fclose(f);
    if (bad) throw IoError("read error on '" + path + "'");
    return text;
}

void emit_report(const json& report, const std::string& path) {
    const std::string text = report.dump(2) + "\n";
    if (path.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text(path, text);
}

// ------------------------------------------------------------ option sets

struct SourceOptions {
    double rate_hz = 0;  ///< target detected rate; 0 = unset
    double flux_hz = 0;  ///< direct source flux; 0 = unset
    std::string duration;
    std::uint64_t seed = 1;
};

struct DetectorOptions {
    double efficiency = 1.0;
    std::string dead = "0ps";
    std::string jitter = "0ps";
    std::string resolution = "1ps";
    double dark_hz = 0.0;
};

struct ExtractOptions {
    std::string period;
    std::uint64_t bins = 0;
    std::string origin = "0ps";
};

struct AnalyzeOptions {
    std::uint64_t sequence_bits = 1'000'000;
    double alpha = 0.01;
    std::uint32_t block_bits = 128;
    unsigned max_delay = 15;
    unsigned threads = 0;  ///< 0 = hardware default
};

photonsim::DetectorModel make_detector(const DetectorOptions& o) {
    photonsim::DetectorModel det;
    det.efficiency = o.efficiency;
    det.dead_time_ps = parse_duration_ps(o.dead, "dead time");
    det.jitter_sigma_ps = static_cast<double>(parse_duration_ps(o.jitter, "jitter sigma"));
    const std::uint64_t res = parse_duration_ps(o.resolution, "timestamp resolution");
    if (res == 0 || res > 0xFFFFFFFFull)
        throw ConfigError("timestamp resolution must lie in [1 ps, 2^32 ps)");
    det.resolution_ps = static_cast<std::uint32_t>(res);
    det.dark_rate_hz = o.dark_hz;
    return det;
}

/// Source flux from the options; a target detected rate is inverted through
/// the dead-time rate law and the detector efficiency (dark counts excluded).
double resolve_flux(const SourceOptions& src, const photonsim::DetectorModel& det) {
    if ((src.rate_hz > 0) == (src.flux_hz > 0))
        throw ConfigError("specify exactly one of --rate (detected) or --flux (source)");
    if (src.flux_hz > 0) return src.flux_hz;
    if (!(det.efficiency > 0))
        throw ConfigError("--rate requires a nonzero detector efficiency");
    const double tau_s = static_cast<double>(det.dead_time_ps) * 1.0e-12;
    return qmetrics::flux_for_detected_rate(src.rate_hz, tau_s) / det.efficiency;
}

json detector_json(const photonsim::DetectorModel& det) {
    return json{{"efficiency", num6(det.efficiency)},
                {"dead_time_ps", det.dead_time_ps},
                {"jitter_sigma_ps", num6(det.jitter_sigma_ps)},
                {"resolution_ps", det.resolution_ps},
                {"dark_rate_hz", num6(det.dark_rate_hz)}};
}

json detector_stats_json(const photonsim::DetectorStats& st) {
    return json{{"source_events", st.source_events},
                {"dark_events", st.dark_events},
                {"thinned", st.thinned},
                {"dead_time_drops", st.dead_time_drops},
                {"duplicate_drops", st.duplicate_drops},
                {"detections", st.detections}};
}

json extraction_stats_json(const extract::ExtractionStats& st) {
    return json{{"events_consumed", st.events_consumed},
                {"events_dropped_same_interval", st.events_dropped_same_interval},
                {"events_before_origin", st.events_before_origin},
                {"bits_emitted", st.bits_emitted}};
}

// ------------------------------------------------------------- analysis

json ent_json(const randtests::EntReport& e) {
    return json{{"bytes", e.bytes},
                {"entropy_bits_per_byte", num6(e.entropy_bits_per_byte)},
                {"chi_square", num6(e.chi_square)},
                {"chi_square_percent", num6(e.chi_square_percent)},
                {"mean", num6(e.mean)},
                {"monte_carlo_pi", num6(e.monte_carlo_pi)},
                {"monte_carlo_pi_error_pct", num6(e.monte_carlo_pi_error_pct)},
                {"serial_correlation", num6(e.serial_correlation)}};
}

json correlation_json(const randtests::CorrelationSeries& c) {
    const double bound = randtests::correlation_null_bound(c.bits);
    json arr = json::array();
    double max_abs = 0;
    unsigned argmax = 1;
    for (unsigned d = 1; d <= c.r.size(); ++d) {
        const double v = c.r[d - 1];
        arr.push_back(json{{"delay", d}, {"r", num6(v)}});
        if (std::isfinite(v) && std::fabs(v) > max_abs) {
            max_abs = std::fabs(v);
            argmax = d;
        }
    }
    bool all_within = true;
    for (const double v : c.r)
        if (!std::isfinite(v) || std::fabs(v) >= bound) all_within = false;
    return json{{"bits", c.bits},
                {"null_bound", num6(bound)},
                {"series", arr},
                {"max_abs_r", num6(max_abs)},
                {"max_abs_delay", argmax},
                {"all_within_bound", all_within}};
}

json battery_json(const randtests::BatteryReport& b) {
    json tests = json::array();
    for (const auto& t : b.tests) {
        json hist = json::array();
        std::uint64_t bins[10] = {};
        for (const double p : t.p_values) {
            auto idx = static_cast<int>(p * 10.0);
            if (idx > 9) idx = 9;
            if (idx < 0) idx = 0;
            ++bins[idx];
        }
        for (const std::uint64_t f : bins) hist.push_back(f);
        tests.push_back(json{{"test", t.test},
                             {"passed", t.passed},
                             {"required", t.required},
                             {"proportion_pass", t.proportion_pass},
                             {"uniformity_p", num6(t.uniformity_p)},
                             {"uniformity_pass", t.uniformity_pass},
                             {"p_value_histogram", hist}});
    }
    return json{{"sequence_bits", b.sequence_bits},
                {"sequences", b.sequences},
                {"alpha", num6(b.alpha)},
                {"tests", tests},
                {"all_pass", b.all_pass()}};
}

/// Full statistical analysis of a bit stream; the three test families run
/// concurrently when more than one thread is allowed. Each family is a pure
/// function of the input, so results never depend on the thread count.
json analyze_bits(const BitStream& bs, const AnalyzeOptions& opt) {
    if (bs.bit_length == 0) throw StatError("empty bit stream");
    unsigned threads = opt.threads ? opt.threads : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;

    randtests::BatteryConfig bcfg;
    bcfg.sequence_bits = opt.sequence_bits;
    bcfg.alpha = opt.alpha;
    bcfg.block_bits = opt.block_bits;

    auto run_ent = [&] { return randtests::ent_report(bs); };
    auto run_corr = [&] { return randtests::bit_correlation(bs, opt.max_delay); };
    auto run_nist = [&] { return randtests::run_battery(bs, bcfg); };

    randtests::EntReport ent;
    randtests::CorrelationSeries corr;
    randtests::BatteryReport nist;
    if (threads >= 2) {
        auto fe = std::async(std::launch::async, run_ent);
        auto fc = std::async(std::launch::async, run_corr);
        nist = run_nist();
        ent = fe.get();
        corr = fc.get();
    } else {
        ent = run_ent();
        corr = run_corr();
        nist = run_nist();
    }

    return json{{"bits", bs.bit_length},
                {"ent", ent_json(ent)},
                {"correlation", correlation_json(corr)},
                {"nist", battery_json(nist)}};
}

json analyze_config_json(const AnalyzeOptions& o) {
    return json{{"sequence_bits", o.sequence_bits},
                {"alpha", num6(o.alpha)},
                {"block_bits", o.block_bits},
                {"max_delay", o.max_delay}};
}

/// Closed-form theory block for a configured operating point.
json metrics_json(double rate_hz, double period_s, double dead_s, unsigned bins) {
    const double k = qmetrics::mean_photons_per_interval(rate_hz, period_s, dead_s);
    const unsigned bps = extract::bits_per_symbol(static_cast<std::uint32_t>(bins));
    return json{{"detected_rate_hz", num6(rate_hz)},
                {"source_flux_hz", num6(qmetrics::flux_for_detected_rate(rate_hz, dead_s))},
                {"mean_photons_per_interval", num6(k)},
                {"bits_per_detection", bps},
                {"min_entropy_per_symbol_bits", num6(qmetrics::min_entropy_lower_bound(
                                                    static_cast<unsigned>(bins), k))},
                {"min_entropy_per_bit", num6(qmetrics::min_entropy_per_bit(
                                            static_cast<unsigned>(bins), k))},
                {"correction_factor", num6(qmetrics::correction_factor(rate_hz, dead_s))},
                {"lost_photon_fraction", num6(qmetrics::lost_photon_fraction(rate_hz, dead_s))},
                {"p1", num6(qmetrics::relative_photon_prob(1, k))},
                {"p2", num6(qmetrics::relative_photon_prob(2, k))}};
}

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    SourceOptions src;
    DetectorOptions det;
    std::string output;
};

int cmd_simulate(const SimulateCmd& cmd) {
    const photonsim::DetectorModel det = make_detector(cmd.det);
    photonsim::SourceModel source;
    source.flux_hz = resolve_flux(cmd.src, det);
    source.duration_s =
        static_cast<double>(parse_duration_ps(cmd.src.duration, "duration")) * 1.0e-12;
    source.seed = cmd.src.seed;

    photonsim::ArrivalGenerator gen(source);
    const auto duration_ps = static_cast<std::uint64_t>(source.duration_s * 1.0e12);
    photonsim::DetectorStage stage(det, source.seed, duration_ps);
    tsf::Writer writer(cmd.output, det.resolution_ps);

    std::vector<std::uint64_t> arrivals, ticks;
    while (gen.next(arrivals, 1u << 20) > 0) {
        ticks.clear();
        stage.push(arrivals, ticks);
        writer.append(ticks);
    }
    ticks.clear();
    stage.finish(ticks);
    writer.append(ticks);
    writer.close();

    json report{{"command", "simulate"},
                {"config",
                 json{{"seed", source.seed},
                      {"source", json{{"flux_hz", num6(source.flux_hz)},
                                      {"duration_s", num6(source.duration_s)},
                                      {"target_detected_rate_hz",
                                       cmd.src.rate_hz > 0 ? num6(cmd.src.rate_hz) : json(nullptr)}}},
                      {"detector", detector_json(det)}}},
                {"stats", detector_stats_json(stage.stats())},
                {"output", cmd.output}};
    emit_report(report, "");
    return 0;
}

// ----------------------------------------------------------------- extract

struct ExtractCmd {
    std::string input, output;
    ExtractOptions ext;
};

int cmd_extract(const ExtractCmd& cmd) {
    extract::ExtractionConfig cfg;
    cfg.period_ps = parse_duration_ps(cmd.ext.period, "interval period");
    if (cmd.ext.bins < 2 || cmd.ext.bins > 0xFFFFFFFFull)
        throw ConfigError("bin count out of range");
    cfg.bins = static_cast<std::uint32_t>(cmd.ext.bins);
    cfg.origin_ps = parse_duration_ps(cmd.ext.origin, "reference origin");

    tsf::Reader reader(cmd.input);
    extract::StreamingExtractor ex(cfg, reader.tick_resolution_ps());
    bsf::Writer writer(cmd.output);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::uint64_t> ticks;
    BitStream acc;  // symbols may straddle byte boundaries; flush whole bytes
    std::size_t flushed = 0;
    while (reader.next(ticks, 1u << 20) > 0) {
        ex.push(ticks, acc);
        const auto whole = static_cast<std::size_t>(acc.bit_length / 8);
        if (whole > flushed) {
            writer.append_bytes(std::span(acc.bytes.data() + flushed, whole - flushed));
            flushed = whole;
        }
        if (flushed >= (1u << 20)) {  // keep the accumulator bounded
            acc.bytes.erase(acc.bytes.begin(),
                            acc.bytes.begin() + static_cast<std::ptrdiff_t>(flushed));
            acc.bit_length -= static_cast<std::uint64_t>(flushed) * 8;
            flushed = 0;
        }
    }
    if (const std::uint64_t ragged = acc.bit_length - static_cast<std::uint64_t>(flushed) * 8;
        ragged > 0) {
        BitStream tail;
        tail.bytes.push_back(acc.bytes[flushed]);
        tail.bit_length = ragged;
        writer.append_tail(tail);
    }
    const auto t1 = std::chrono::steady_clock::now();
    writer.close();

    const double secs = std::chrono::duration<double>(t1 - t0).count();
    json report{{"command", "extract"},
                {"config", json{{"period_ps", cfg.period_ps},
                                {"bins", cfg.bins},
                                {"origin_ps", cfg.origin_ps}}},
                {"stats", extraction_stats_json(ex.stats())},
                {"throughput_bits_per_s",
                 secs > 0 ? num6(static_cast<double>(ex.stats().bits_emitted) / secs)
                          : json(nullptr)},
                {"output", cmd.output}};
    emit_report(report, "");
    return 0;
}

// ----------------------------------------------------------------- shuffle

int cmd_shuffle(const std::string& input, const std::string& output) {
    bsf::Reader reader(input);
    bsf::Writer writer(output);
    postproc::StreamingShuffler sh;

    const std::uint64_t whole_bytes = reader.total_bits() / 8;
    std::uint64_t consumed = 0;
    std::vector<std::uint8_t> in, out;
    std::uint8_t ragged = 0;
    bool has_ragged = false;
    while (reader.next(in, 1u << 20) > 0) {
        std::size_t n = in.size();
        if (consumed + n > whole_bytes) {  // final ragged byte: hold back
            ragged = in.back();
            has_ragged = true;
            n -= 1;
        }
        consumed += n;
        out.clear();
        sh.push(std::span(in.data(), n), out);
        writer.append_bytes(out);
    }
    out.clear();
    sh.finish(out);
    writer.append_bytes(out);
    if (has_ragged) {
        BitStream tail;
        tail.bytes.push_back(ragged);
        tail.bit_length = reader.total_bits() % 8;
        writer.append_tail(tail);
    }
    writer.close();

    json report{{"command", "shuffle"},
                {"stats", json{{"blocks", sh.stats().blocks},
                               {"tail_bytes", sh.stats().tail_bytes + (has_ragged ? 1 : 0)}}},
                {"bits", reader.total_bits()},
                {"output", output}};
    emit_report(report, "");
    return 0;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeCmd {
    std::string input;
    std::string report_path;
    AnalyzeOptions opt;
    // Optional operating point for a closed-form theory block.
    double rate_hz = 0;
    std::string period;
    std::string dead = "0ps";
    std::uint64_t bins = 0;
};

BitStream load_bits(const std::string& path) {
    bsf::Reader reader(path);
    BitStream bs;
    bs.bit_length = reader.total_bits();
    bs.bytes.reserve(reader.total_bytes());
    std::vector<std::uint8_t> chunk;
    while (reader.next(chunk, 1u << 22) > 0)
        bs.bytes.insert(bs.bytes.end(), chunk.begin(), chunk.end());
    return bs;
}

int cmd_analyze(const AnalyzeCmd& cmd) {
    const BitStream bs = load_bits(cmd.input);
    json report{{"tool", json{{"name", kToolName}, {"version", kToolVersion}}},
                {"command", "analyze"},
                {"input", json{{"path", cmd.input}, {"bits", bs.bit_length}}},
                {"config", analyze_config_json(cmd.opt)}};
    if (cmd.rate_hz > 0) {
        if (cmd.period.empty() || cmd.bins == 0)
            throw ConfigError("--rate needs --period and --bins for the theory block");
        report["qmetrics"] = metrics_json(
            cmd.rate_hz,
            static_cast<double>(parse_duration_ps(cmd.period, "interval period")) * 1.0e-12,
            static_cast<double>(parse_duration_ps(cmd.dead, "dead time")) * 1.0e-12,
            static_cast<unsigned>(cmd.bins));
    }
    report["analysis"] = analyze_bits(bs, cmd.opt);
    emit_report(report, cmd.report_path);
    return 0;
}

// ----------------------------------------------------------------- metrics

struct MetricsCmd {
    double rate_hz = 0;
    double flux_hz = 0;
    std::string period;
    std::string dead = "0ps";
    std::uint64_t bins = 256;
};

int cmd_metrics(const MetricsCmd& cmd) {
    if ((cmd.rate_hz > 0) == (cmd.flux_hz > 0))
        throw ConfigError("specify exactly one of --rate (detected) or --flux (source)");
    const double period_s =
        static_cast<double>(parse_duration_ps(cmd.period, "interval period")) * 1.0e-12;
    const double dead_s = static_cast<double>(parse_duration_ps(cmd.dead, "dead time")) * 1.0e-12;
    const double rate = cmd.rate_hz > 0
                            ? cmd.rate_hz
                            : qmetrics::detected_rate_for_flux(cmd.flux_hz, dead_s);
    json report{{"command", "metrics"},
                {"inputs", json{{"period_ps", parse_duration_ps(cmd.period, "interval period")},
                                {"dead_time_ps", parse_duration_ps(cmd.dead, "dead time")},
                                {"bins", cmd.bins}}},
                {"results", metrics_json(rate, period_s, dead_s,
                                         static_cast<unsigned>(cmd.bins))}};
    emit_report(report, "");
    return 0;
}

// ------------------------------------------------------------------ budget

struct BudgetCmd {
    double eta_dlm = 0, eta_col = 0;
    double p_in_uw = 0;
    double rate_hz = 0;
    double wavelength_nm = 0;
    double im_k_per_um = 0;
    double length_um = 0;
};

int cmd_budget(const BudgetCmd& cmd) {
    qmetrics::LossChain chain;
    chain.eta_dlm = cmd.eta_dlm;
    chain.eta_col = cmd.eta_col;
    chain.p_in_watts = cmd.p_in_uw * 1.0e-6;
    chain.detected_rate_hz = cmd.rate_hz;
    chain.wavelength_m = cmd.wavelength_nm * 1.0e-9;
    chain.im_k_per_um = cmd.im_k_per_um;
    chain.length_um = cmd.length_um;
    const qmetrics::LossBudget b = qmetrics::loss_budget(chain);
    json report{{"command", "budget"},
                {"inputs", json{{"eta_dlm", num6(chain.eta_dlm)},
                                {"eta_col", num6(chain.eta_col)},
                                {"p_in_uw", num6(cmd.p_in_uw)},
                                {"detected_rate_hz", num6(chain.detected_rate_hz)},
                                {"wavelength_nm", num6(cmd.wavelength_nm)},
                                {"im_k_per_um", num6(chain.im_k_per_um)},
                                {"length_um", num6(chain.length_um)}}},
                {"results", json{{"p_out_pw", num6(b.p_out_watts * 1.0e12)},
                                 {"eta_total", num6(b.eta_total)},
                                 {"eta_wgd", num6(b.eta_wgd)},
                                 {"eta_nwr", num6(b.eta_nwr)},
                                 {"eta_grt_tpr", num6(b.eta_grt_tpr)}}}};
    emit_report(report, "");
    return 0;
}

// --------------------------------------------------------------------- run

struct RunCmd {
    SourceOptions src;
    DetectorOptions det;
    ExtractOptions ext{.period = "12.8ns", .bins = 256, .origin = "0ps"};
    AnalyzeOptions ana;
    bool no_shuffle = false;
    std::string config_path;   ///< optional JSON config (schema of the report's config block)
    std::string tsf_path;      ///< optional timestamp dump
    std::string raw_bsf_path;  ///< optional pre-shuffle bit dump
    std::string output;        ///< final BSF1 (required)
    std::string report_path;   ///< JSON report destination ("" = stdout)
};

int cmd_run(const RunCmd& cmd) {
    if (cmd.src.duration.empty())
        throw ConfigError("run needs a duration (--duration flag or config file)");
    const photonsim::DetectorModel det = make_detector(cmd.det);
    photonsim::SourceModel source;
    source.flux_hz = resolve_flux(cmd.src, det);
    source.duration_s =
        static_cast<double>(parse_duration_ps(cmd.src.duration, "duration")) * 1.0e-12;
    source.seed = cmd.src.seed;

    extract::ExtractionConfig ecfg;
    ecfg.period_ps = parse_duration_ps(cmd.ext.period, "interval period");
    if (cmd.ext.bins < 2 || cmd.ext.bins > 0xFFFFFFFFull)
        throw ConfigError("bin count out of range");
    ecfg.bins = static_cast<std::uint32_t>(cmd.ext.bins);
    ecfg.origin_ps = parse_duration_ps(cmd.ext.origin, "reference origin");
    extract::validate(ecfg, det.resolution_ps);

    if (ecfg.period_ps > det.dead_time_ps)
        std::fprintf(stderr,
                     "warning: interval period (%llu ps) exceeds the dead time (%llu ps); "
                     "intervals may hold several detections and uniformity degrades\n",
                     static_cast<unsigned long long>(ecfg.period_ps),
                     static_cast<unsigned long long>(det.dead_time_ps));

    photonsim::ArrivalGenerator gen(source);
    const auto duration_ps = static_cast<std::uint64_t>(source.duration_s * 1.0e12);
    photonsim::DetectorStage stage(det, source.seed, duration_ps);
    extract::StreamingExtractor ex(ecfg, det.resolution_ps);

    std::optional<tsf::Writer> tsf_writer;
    if (!cmd.tsf_path.empty()) tsf_writer.emplace(cmd.tsf_path, det.resolution_ps);

    BitStream raw;
    std::vector<std::uint64_t> arrivals, ticks;
    double extract_secs = 0;
    while (gen.next(arrivals, 1u << 20) > 0) {
        ticks.clear();
        stage.push(arrivals, ticks);
        if (tsf_writer) tsf_writer->append(ticks);
        const auto t0 = std::chrono::steady_clock::now();
        ex.push(ticks, raw);
        extract_secs += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
    }
    ticks.clear();
    stage.finish(ticks);
    if (tsf_writer) {
        tsf_writer->append(ticks);
        tsf_writer->close();
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        ex.push(ticks, raw);
        extract_secs += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
    }

    if (!cmd.raw_bsf_path.empty()) bsf::write(cmd.raw_bsf_path, raw);

    postproc::ShuffleStats shuffle_stats;
    const BitStream final_bits = cmd.no_shuffle ? raw : postproc::shuffle(raw, &shuffle_stats);
    bsf::write(cmd.output, final_bits);

    json report{{"tool", json{{"name", kToolName}, {"version", kToolVersion}}},
                {"command", "run"},
                {"config",
                 json{{"seed", source.seed},
                      {"source", json{{"flux_hz", num6(source.flux_hz)},
                                      {"duration_s", num6(source.duration_s)},
                                      {"target_detected_rate_hz",
                                       cmd.src.rate_hz > 0 ? num6(cmd.src.rate_hz) : json(nullptr)}}},
                      {"detector", detector_json(det)},
                      {"extraction", json{{"period_ps", ecfg.period_ps},
                                          {"bins", ecfg.bins},
                                          {"origin_ps", ecfg.origin_ps}}},
                      {"shuffle", !cmd.no_shuffle},
                      {"tests", analyze_config_json(cmd.ana)}}}};

    // Theory block at the configured operating point (target rate if given,
    // otherwise the rate implied by flux, efficiency and dead time).
    const double dead_s = static_cast<double>(det.dead_time_ps) * 1.0e-12;
    const double theory_rate =
        cmd.src.rate_hz > 0
            ? cmd.src.rate_hz
            : qmetrics::detected_rate_for_flux(source.flux_hz * det.efficiency, dead_s);
    report["qmetrics"] = metrics_json(theory_rate,
                                      static_cast<double>(ecfg.period_ps) * 1.0e-12, dead_s,
                                      ecfg.bins);

    const double measured_rate =
        source.duration_s > 0 ? static_cast<double>(stage.stats().detections) / source.duration_s
                              : 0.0;
    report["simulation"] = json{{"stats", detector_stats_json(stage.stats())},
                                {"measured_detected_rate_hz", num6(measured_rate)}};
    report["extraction"] = json{
        {"stats", extraction_stats_json(ex.stats())},
        {"throughput_bits_per_s",
         extract_secs > 0 ? num6(static_cast<double>(ex.stats().bits_emitted) / extract_secs)
                          : json(nullptr)}};
    if (!cmd.no_shuffle)
        report["shuffle"] = json{{"blocks", shuffle_stats.blocks},
                                 {"tail_bytes", shuffle_stats.tail_bytes}};
    report["analysis"] = analyze_bits(final_bits, cmd.ana);
    report["output"] = cmd.output;
    emit_report(report, cmd.report_path);
    return 0;
}

/// Fills run options from a JSON config file holding the same schema as the
/// report's "config" block. Flags given explicitly on the command line win;
/// absent config keys leave the built-in defaults untouched. A file that is
/// not valid JSON is an I/O/format error; wrongly-typed values are
/// configuration errors.
void apply_run_config(const CLI::App* sub, RunCmd& run) {
    json cfg;
    try {
        cfg = json::parse(read_text(run.config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("config file '" + run.config_path + "' is not valid JSON: " + e.what());
    }
    const auto given = [sub](const char* flag) { return sub->count(flag) > 0; };
    const auto ps_string = [](std::uint64_t ps) { return std::to_string(ps) + "ps"; };
    try {
        if (cfg.contains("seed") && !given("--seed"))
            run.src.seed = cfg.at("seed").get<std::uint64_t>();
        if (const auto it = cfg.find("source"); it != cfg.end()) {
            const json& s = *it;
            // The echo stores the resolved flux plus the target rate (null if
            // the run was flux-driven); replay prefers the target rate so the
            // dead-time inversion is redone against the current detector.
            if (!given("--rate") && !given("--flux")) {
                if (s.contains("target_detected_rate_hz") &&
                    !s.at("target_detected_rate_hz").is_null())
                    run.src.rate_hz = s.at("target_detected_rate_hz").get<double>();
                else if (s.contains("flux_hz"))
                    run.src.flux_hz = s.at("flux_hz").get<double>();
            }
            if (s.contains("duration_s") && !given("--duration"))
                run.src.duration = ps_string(static_cast<std::uint64_t>(
                    std::llround(s.at("duration_s").get<double>() * 1.0e12)));
        }
        if (const auto it = cfg.find("detector"); it != cfg.end()) {
            const json& d = *it;
            if (d.contains("efficiency") && !given("--efficiency"))
                run.det.efficiency = d.at("efficiency").get<double>();
            if (d.contains("dead_time_ps") && !given("--dead"))
                run.det.dead = ps_string(d.at("dead_time_ps").get<std::uint64_t>());
            if (d.contains("jitter_sigma_ps") && !given("--jitter"))
                run.det.jitter = ps_string(static_cast<std::uint64_t>(
                    std::llround(d.at("jitter_sigma_ps").get<double>())));
            if (d.contains("resolution_ps") && !given("--resolution"))
                run.det.resolution = ps_string(d.at("resolution_ps").get<std::uint64_t>());
            if (d.contains("dark_rate_hz") && !given("--dark"))
                run.det.dark_hz = d.at("dark_rate_hz").get<double>();
        }
        if (const auto it = cfg.find("extraction"); it != cfg.end()) {
            const json& x = *it;
            if (x.contains("period_ps") && !given("--period"))
                run.ext.period = ps_string(x.at("period_ps").get<std::uint64_t>());
            if (x.contains("bins") && !given("--bins"))
                run.ext.bins = x.at("bins").get<std::uint64_t>();
            if (x.contains("origin_ps") && !given("--origin"))
                run.ext.origin = ps_string(x.at("origin_ps").get<std::uint64_t>());
        }
        if (cfg.contains("shuffle") && !given("--no-shuffle"))
            run.no_shuffle = !cfg.at("shuffle").get<bool>();
        if (const auto it = cfg.find("tests"); it != cfg.end()) {
            const json& t = *it;
            if (t.contains("sequence_bits") && !given("--seq-bits"))
                run.ana.sequence_bits = t.at("sequence_bits").get<std::uint64_t>();
            if (t.contains("alpha") && !given("--alpha"))
                run.ana.alpha = t.at("alpha").get<double>();
            if (t.contains("block_bits") && !given("--block-bits"))
                run.ana.block_bits = t.at("block_bits").get<std::uint32_t>();
            if (t.contains("max_delay") && !given("--max-delay"))
                run.ana.max_delay = t.at("max_delay").get<unsigned>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + run.config_path + "': " + e.what());
    }
}

// ----------------------------------------------------------- CLI plumbing

void add_source_options(CLI::App* sub, SourceOptions& src, bool require_duration = true) {
    sub->add_option("--rate", src.rate_hz,
                    "target detected count rate in Hz (inverted through dead time)");
    sub->add_option("--flux", src.flux_hz, "source photon flux in Hz (direct)");
    auto* duration =
        sub->add_option("--duration", src.duration, "observation time, e.g. 5s, 250ms");
    if (require_duration) duration->required();
    sub->add_option("--seed", src.seed, "random seed (default 1)");
}

void add_detector_options(CLI::App* sub, DetectorOptions& det) {
    sub->add_option("--efficiency", det.efficiency, "detection probability (default 1)");
    sub->add_option("--dead", det.dead, "dead time, e.g. 24ns (default 0)");
    sub->add_option("--jitter", det.jitter, "Gaussian jitter sigma, e.g. 350ps (default 0)");
    sub->add_option("--resolution", det.resolution, "timestamp grid, e.g. 25ps (default 1ps)");
    sub->add_option("--dark", det.dark_hz, "dark count rate in Hz (default 0)");
}

void add_extract_options(CLI::App* sub, ExtractOptions& ext, bool required) {
    auto* period = sub->add_option("--period", ext.period, "reference interval, e.g. 12.8ns");
    auto* bins = sub->add_option("--bins", ext.bins, "bins per interval (power of two)");
    sub->add_option("--origin", ext.origin, "reference phase (default 0)");
    if (required) {
        period->required();
        bins->required();
    }
}

void add_analyze_options(CLI::App* sub, AnalyzeOptions& ana) {
    sub->add_option("--seq-bits", ana.sequence_bits,
                    "bits per subsequence for the test battery (default 1000000)");
    sub->add_option("--alpha", ana.alpha, "per-test significance level (default 0.01)");
    sub->add_option("--block-bits", ana.block_bits,
                    "block size of the block-frequency test (default 128)");
    sub->add_option("--max-delay", ana.max_delay,
                    "largest bit delay for the correlation series (default 15)");
    sub->add_option("--threads", ana.threads, "max worker threads; results are identical "
                                              "for any value (default: hardware)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-of-arrival random number toolkit"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    SimulateCmd sim;
    auto* s_sim = app.add_subcommand("simulate", "generate detector timestamps (TSF1)");
    add_source_options(s_sim, sim.src);
    add_detector_options(s_sim, sim.det);
    s_sim->add_option("-o,--output", sim.output, "TSF1 output path")->required();

    ExtractCmd ext;
    auto* s_ext = app.add_subcommand("extract", "timestamps (TSF1) -> bits (BSF1)");
    s_ext->add_option("-i,--input", ext.input, "TSF1 input path")->required();
    s_ext->add_option("-o,--output", ext.output, "BSF1 output path")->required();
    add_extract_options(s_ext, ext.ext, /*required=*/true);

    std::string shuf_in, shuf_out;
    auto* s_shuf = app.add_subcommand("shuffle", "de-correlating block shuffle (BSF1 -> BSF1)");
    s_shuf->add_option("-i,--input", shuf_in, "BSF1 input path")->required();
    s_shuf->add_option("-o,--output", shuf_out, "BSF1 output path")->required();

    AnalyzeCmd ana;
    auto* s_ana = app.add_subcommand("analyze", "statistical quality report for a BSF1 file");
    s_ana->add_option("-i,--input", ana.input, "BSF1 input path")->required();
    s_ana->add_option("-o,--report", ana.report_path, "report path (default: stdout)");
    add_analyze_options(s_ana, ana.opt);
    s_ana->add_option("--rate", ana.rate_hz, "detected rate for an optional theory block");
    s_ana->add_option("--period", ana.period, "interval period for the theory block");
    s_ana->add_option("--dead", ana.dead, "dead time for the theory block");
    s_ana->add_option("--bins", ana.bins, "bins for the theory block");

    MetricsCmd met;
    auto* s_met = app.add_subcommand("metrics", "closed-form interval and entropy numbers");
    s_met->add_option("--rate", met.rate_hz, "detected count rate in Hz");
    s_met->add_option("--flux", met.flux_hz, "source photon flux in Hz");
    s_met->add_option("--T,--period", met.period, "reference interval, e.g. 12.8ns")->required();
    s_met->add_option("--dead", met.dead, "detector dead time, e.g. 24ns (default 0)");
    s_met->add_option("--bins", met.bins, "bins per interval (default 256)");

    BudgetCmd bud;
    auto* s_bud = app.add_subcommand("budget", "optical loss budget of the detection chain");
    s_bud->add_option("--eta-dlm", bud.eta_dlm, "objective transmission")->required();
    s_bud->add_option("--eta-col", bud.eta_col, "collection transmission")->required();
    s_bud->add_option("--p-in-uw", bud.p_in_uw, "input power in microwatts")->required();
    s_bud->add_option("--rate", bud.rate_hz, "detected count rate in Hz")->required();
    s_bud->add_option("--wavelength-nm", bud.wavelength_nm, "vacuum wavelength in nm")
        ->required();
    s_bud->add_option("--im-k-per-um", bud.im_k_per_um, "mode attenuation constant, rad/um")
        ->required();
    s_bud->add_option("--length-um", bud.length_um, "guided length in um")->required();

    std::string asc_in, asc_out;
    auto* s_asc = app.add_subcommand("export-ascii", "BSF1 -> '0'/'1' text");
    s_asc->add_option("-i,--input", asc_in, "BSF1 input path")->required();
    s_asc->add_option("-o,--output", asc_out, "text output path")->required();

    RunCmd run;
    auto* s_run = app.add_subcommand("run", "simulate -> extract -> shuffle -> analyze");
    add_source_options(s_run, run.src, /*require_duration=*/false);
    add_detector_options(s_run, run.det);
    add_extract_options(s_run, run.ext, /*required=*/false);
    add_analyze_options(s_run, run.ana);
    s_run->add_option("--config", run.config_path,
                      "JSON config file using the schema of the report's config block; "
                      "explicit flags override file values");
    s_run->add_flag("--no-shuffle", run.no_shuffle, "skip the de-correlating shuffle");
    s_run->add_option("--tsf", run.tsf_path, "also write the timestamps (TSF1)");
    s_run->add_option("--raw", run.raw_bsf_path, "also write the pre-shuffle bits (BSF1)");
    s_run->add_option("-o,--output", run.output, "final BSF1 output path")->required();
    s_run->add_option("--report", run.report_path, "report path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (s_sim->parsed()) return cmd_simulate(sim);
        if (s_ext->parsed()) return cmd_extract(ext);
        if (s_shuf->parsed()) return cmd_shuffle(shuf_in, shuf_out);
        if (s_ana->parsed()) return cmd_analyze(ana);
        if (s_met->parsed()) return cmd_metrics(met);
        if (s_bud->parsed()) return cmd_budget(bud);
        if (s_asc->parsed()) {
            export_ascii(asc_in, asc_out);
            json report{{"command", "export-ascii"}, {"output", asc_out}};
            emit_report(report, "");
            return 0;
        }
        if (s_run->parsed()) {
            if (!run.config_path.empty()) apply_run_config(s_run, run);
            return cmd_run(run);
        }
        std::fprintf(stderr, "error: no subcommand selected\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 3;
    } catch (const StatError& e) {
        std::fprintf(stderr, "statistics error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
