// Acceptance gate for the time-of-arrival random number toolkit.
//
// Each numbered criterion is a product contract. Running with
//   acceptance --criterion N --cli <path-to-cli-binary>
// executes criterion N, prints "  [ok]/[BAD]" detail lines followed by one
// final "PASS criterion N: ..." or "FAIL criterion N: ..." verdict line, and
// exits nonzero on failure. Criteria never weaken their stated tolerances;
// when a contract value is internally inconsistent the check fails loudly
// and the detail line says why.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "toarng/bits.hpp"
#include "toarng/extract.hpp"
#include "toarng/photonsim.hpp"
#include "toarng/postproc.hpp"
#include "toarng/qmetrics.hpp"
#include "toarng/randtests.hpp"
#include "toarng/rng.hpp"
#include "toarng/timestamps.hpp"

using namespace toarng;

namespace {

// --------------------------------------------------------------- reporting

struct Gate {
  int criterion = 0;
  bool ok = true;

  void check(bool cond, const std::string& what) {
    std::printf("  [%s] %s\n", cond ? "ok " : "BAD", what.c_str());
    ok = ok && cond;
  }
  void info(const std::string& what) { std::printf("  [---] %s\n", what.c_str()); }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ------------------------------------------------- shared pipeline pieces

constexpr double kPeriodS = 12.8e-9;
constexpr double kDeadS = 24e-9;
constexpr std::uint64_t kDeadPs = 24000;
constexpr std::uint64_t kPeriodPs = 12800;
constexpr unsigned kBins = 256;
constexpr std::uint32_t kResolutionPs = 50;  // == bin width: instrument grid

struct SimulatedStream {
  BitStream raw;                      // extractor output, 8 bits/detection
  std::uint64_t detections = 0;
  double measured_rate_hz = 0;
  std::vector<std::uint64_t> ticks;   // only when keep_ticks
};

/// Simulates `duration_s` of an ideal-regime detector (unit efficiency, no
/// jitter, no darks) at the requested detected rate and extracts raw bits.
SimulatedStream simulate_raw(double rate_hz, double duration_s,
                             std::uint64_t seed, bool keep_ticks = false) {
  photonsim::SourceModel src;
  src.flux_hz = qmetrics::flux_for_detected_rate(rate_hz, kDeadS);
  src.duration_s = duration_s;
  src.seed = seed;

  photonsim::DetectorModel det;
  det.dead_time_ps = kDeadPs;
  det.resolution_ps = kResolutionPs;

  extract::ExtractionConfig cfg;
  cfg.period_ps = kPeriodPs;
  cfg.bins = kBins;

  const auto duration_ps =
      static_cast<std::uint64_t>(std::llround(duration_s * 1e12));
  photonsim::ArrivalGenerator gen(src);
  photonsim::DetectorStage stage(det, seed, duration_ps);
  extract::StreamingExtractor ex(cfg, det.resolution_ps);

  SimulatedStream out;
  std::vector<std::uint64_t> arrivals, ticks;
  while (gen.next(arrivals, 1u << 20) > 0) {
    ticks.clear();
    stage.push(arrivals, ticks);
    ex.push(ticks, out.raw);
    if (keep_ticks) out.ticks.insert(out.ticks.end(), ticks.begin(), ticks.end());
  }
  ticks.clear();
  stage.finish(ticks);
  ex.push(ticks, out.raw);
  if (keep_ticks) out.ticks.insert(out.ticks.end(), ticks.begin(), ticks.end());

  out.detections = stage.stats().detections;
  out.measured_rate_hz = static_cast<double>(out.detections) / duration_s;
  return out;
}

// ------------------------------------------------------------ criterion 1

bool criterion_1() {
  Gate g;
  const double t0 = now_s();

  const double k1 = qmetrics::mean_photons_per_interval(1.8e6, kPeriodS, kDeadS);
  const double k2 = qmetrics::mean_photons_per_interval(5.2e6, kPeriodS, kDeadS);
  g.check(std::fabs(k1 - 0.024) <= 0.0005,
          fmt("mean photons per interval at 1.8e6/s: %.7f within 0.024 +- 0.0005", k1));
  g.check(std::fabs(k2 - 0.076) <= 0.0005,
          fmt("mean photons per interval at 5.2e6/s: %.7f within 0.076 +- 0.0005", k2));

  const double h1 = qmetrics::min_entropy_per_bit(kBins, k1);
  const double h2 = qmetrics::min_entropy_per_bit(kBins, k2);
  g.check(std::fabs(h1 - 0.998) <= 0.0005,
          fmt("min-entropy per bit at 1.8e6/s: %.6f within 0.998 +- 0.0005", h1));
  g.check(std::fabs(h2 - 0.993) <= 0.0005,
          fmt("min-entropy per bit at 5.2e6/s: %.6f within 0.993 +- 0.0005", h2));

  const double cf = qmetrics::correction_factor(5.2e6, kDeadS);
  g.check(std::fabs(cf - 1.143) <= 0.0005,
          fmt("correction factor at 5.2e6/s: %.6f within 1.143 +- 0.0005", cf));

  // p1 is quoted at two decimals (implied half-ulp 0.005); p2 carries the
  // explicit +-0.001 band.
  const double p1 = qmetrics::relative_photon_prob(1, k2);
  const double p2 = qmetrics::relative_photon_prob(2, k2);
  g.check(std::fabs(p1 - 0.96) <= 0.005,
          fmt("single-photon interval probability: %.6f within 0.96 +- 0.005", p1));
  g.check(std::fabs(p2 - 0.037) <= 0.001,
          fmt("two-photon interval probability: %.7f within 0.037 +- 0.001", p2));

  const double dt = now_s() - t0;
  g.check(dt < 1.0, fmt("runtime %.4f s (milliseconds-scale target)", dt));
  return g.ok;
}

// ------------------------------------------------------------ criterion 2

bool criterion_2() {
  Gate g;
  qmetrics::LossChain chain;
  chain.eta_dlm = 0.94;
  chain.eta_col = 0.30;
  chain.p_in_watts = 0.24e-6;
  chain.detected_rate_hz = 1.8e6;
  chain.wavelength_m = 785e-9;
  chain.im_k_per_um = 0.459;
  chain.length_um = 3.0;
  const qmetrics::LossBudget b = qmetrics::loss_budget(chain);

  // Each contract value is compared at the precision it is quoted with
  // (half-ulp of the shown significant figures).
  struct Row {
    const char* name;
    double computed;
    double quoted;
    double half_ulp;
  };
  const Row rows[] = {
      {"output power equivalent [pW]", b.p_out_watts * 1e12, 4.6, 0.05},
      {"total efficiency", b.eta_total, 1.9e-5, 0.05e-5},
      {"waveguide section efficiency", b.eta_wgd, 6.7e-5, 0.05e-5},
      {"propagation survival", b.eta_nwr, 0.06, 0.005},
      {"grating*taper transmission", b.eta_grt_tpr, 0.03, 0.005},
  };
  for (const Row& r : rows) {
    g.check(std::fabs(r.computed - r.quoted) <= r.half_ulp,
            fmt("%s: computed %.6g vs contract %.2g (+- %.2g)", r.name,
                r.computed, r.quoted, r.half_ulp));
  }
  g.info("note: computed output power R*h*c/lambda at the stated inputs is "
         "0.4555 pW; the contract's 4.6 pW (and the three efficiencies that "
         "scale with it) is exactly 10x larger, so those contract figures are "
         "inconsistent with their own stated inputs. The decomposition "
         "identities eta_total = eta_dlm*eta_col*eta_wgd and "
         "eta_wgd = eta_nwr*(eta_grt*eta_tpr)^2 do hold for the computed "
         "values, and the propagation survival e^(-2*0.459*3) matches.");
  return g.ok;
}

// ------------------------------------------------------------ criterion 3

bool criterion_3() {
  Gate g;
  const double t0 = now_s();
  struct Case {
    unsigned bins, k;
  };
  const Case cases[] = {{4, 1}, {4, 2}, {8, 3}, {256, 1}, {256, 2}};
  const std::uint64_t trials = 10'000'000;
  for (const Case c : cases) {
    const std::vector<double> freq = photonsim::bin_occupancy_oracle(
        c.bins, c.k, trials, 0xACCE97ull + c.bins * 131 + c.k);
    double worst_sigmas = 0.0;
    double sum = 0.0;
    for (unsigned i = 1; i <= c.bins; ++i) {
      const double p = qmetrics::bin_probability(i, c.bins, c.k);
      const double sigma =
          std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
      worst_sigmas =
          std::max(worst_sigmas, std::fabs(freq[i - 1] - p) / sigma);
      sum += p;
    }
    g.check(worst_sigmas < 5.0,
            fmt("(bins=%u, k=%u): worst bin deviation %.2f sigma (< 5)",
                c.bins, c.k, worst_sigmas));
    g.check(std::fabs(sum - 1.0) < 1e-12,
            fmt("(bins=%u, k=%u): bin probabilities sum to 1 within 1e-12 "
                "(|sum-1| = %.2e)",
                c.bins, c.k, std::fabs(sum - 1.0)));
  }
  const double dt = now_s() - t0;
  g.check(dt < 60.0, fmt("runtime %.1f s (< 60 s)", dt));
  return g.ok;
}

// ------------------------------------------------------------ criterion 4

bool criterion_4() {
  Gate g;
  const double t0 = now_s();

  // >= 12.5 s of simulated time; 12.6 s gives headroom over the 180 Mbit
  // floor against Poisson fluctuation of the detection count.
  const SimulatedStream sim = simulate_raw(1.8e6, 12.6, 0x1D41);
  g.check(sim.raw.bit_length >= 180'000'000,
          fmt("raw sample size %.1f Mbit (>= 180 Mbit)",
              static_cast<double>(sim.raw.bit_length) / 1e6));
  g.info(fmt("measured detected rate %.4g counts/s (target 1.8e6)",
             sim.measured_rate_hz));

  const randtests::EntReport ent = randtests::ent_report(sim.raw);
  g.check(ent.entropy_bits_per_byte >= 7.9999,
          fmt("byte entropy %.6f bits (>= 7.9999)", ent.entropy_bits_per_byte));
  g.check(ent.chi_square_percent >= 1.0 && ent.chi_square_percent <= 99.0,
          fmt("chi-square percentile %.2f%% (in [1, 99])", ent.chi_square_percent));
  g.check(std::fabs(ent.mean - 127.5) <= 0.05,
          fmt("byte mean %.4f (127.5 +- 0.05)", ent.mean));
  g.check(std::fabs(ent.monte_carlo_pi - 3.14159265358979) <= 0.01,
          fmt("monte-carlo pi %.6f (pi +- 0.01)", ent.monte_carlo_pi));
  g.check(std::fabs(ent.serial_correlation) < 5e-4,
          fmt("byte serial correlation %+.6f (|scc| < 5e-4)", ent.serial_correlation));

  const randtests::CorrelationSeries corr = randtests::bit_correlation(sim.raw, 15);
  const double bound = randtests::correlation_null_bound(corr.bits);
  double worst = 0.0;
  unsigned worst_d = 0;
  for (unsigned d = 1; d <= 15; ++d) {
    if (std::fabs(corr.r[d - 1]) > worst) {
      worst = std::fabs(corr.r[d - 1]);
      worst_d = d;
    }
  }
  g.check(worst < bound,
          fmt("bit correlations d=1..15: worst |r_%u| = %.3g (bound 4/sqrt(n) "
              "= %.3g)",
              worst_d, worst, bound));

  // The two checks above are known to sit slightly outside their bounds in
  // this operating regime: detector hold-off links neighbouring occupied
  // intervals, producing a small positive byte correlation (and its bit-level
  // image at delay 8) in the raw extractor output. The de-correlating shuffle
  // exists precisely to remove it; the certified pipeline output is shown
  // below for the record.
  {
    const BitStream shuffled = postproc::shuffle(sim.raw);
    const randtests::EntReport se = randtests::ent_report(shuffled);
    const randtests::CorrelationSeries sc = randtests::bit_correlation(shuffled, 15);
    double sworst = 0.0;
    unsigned sworst_d = 0;
    for (unsigned d = 1; d <= 15; ++d) {
      if (std::fabs(sc.r[d - 1]) > sworst) {
        sworst = std::fabs(sc.r[d - 1]);
        sworst_d = d;
      }
    }
    g.info(fmt("after the de-correlating shuffle (informational): scc %+.2g "
               "(< 5e-4: %s), worst |r_%u| = %.3g (bound %.3g: %s)",
               se.serial_correlation,
               std::fabs(se.serial_correlation) < 5e-4 ? "yes" : "no",
               sworst_d, sworst, bound, sworst < bound ? "yes" : "no"));
  }

  // NIST battery: exactly 100 sequences of 1 Mbit from the raw stream.
  if (sim.raw.bytes.size() < 12'500'000) {
    g.check(false, "stream too small for the 100 x 1 Mbit battery");
    return g.ok;
  }
  BitStream first100;
  first100.bytes.assign(sim.raw.bytes.begin(), sim.raw.bytes.begin() + 12'500'000);
  first100.bit_length = 100'000'000;
  randtests::BatteryConfig bcfg;
  bcfg.sequence_bits = 1'000'000;
  const randtests::BatteryReport battery = randtests::run_battery(first100, bcfg);
  const std::uint64_t req = randtests::required_minimum(100, 0.01);
  for (const randtests::TestAggregate& t : battery.tests) {
    g.check(t.passed >= req && t.required == req,
            fmt("%s: %llu/100 sequences pass (>= %llu required)", t.test.c_str(),
                static_cast<unsigned long long>(t.passed),
                static_cast<unsigned long long>(req)));
    g.check(t.uniformity_p >= 1e-4,
            fmt("%s: p-value uniformity %.4f (>= 1e-4)", t.test.c_str(),
                t.uniformity_p));
  }

  const double dt = now_s() - t0;
  g.check(dt < 300.0, fmt("runtime %.1f s (< 300 s)", dt));
  return g.ok;
}

// ------------------------------------------------------------ criterion 5

bool criterion_5() {
  Gate g;
  const double t0 = now_s();

  // 2.5 s at 5.2e6 detections/s is ~104 Mbit of raw output.
  const SimulatedStream sim = simulate_raw(5.2e6, 2.5, 0x1D52);
  g.check(sim.raw.bit_length >= 100'000'000,
          fmt("raw sample size %.1f Mbit (>= 100 Mbit)",
              static_cast<double>(sim.raw.bit_length) / 1e6));

  const randtests::EntReport raw_ent = randtests::ent_report(sim.raw);
  g.check(raw_ent.serial_correlation > 3e-3,
          fmt("raw byte serial correlation %+.6f (> +3e-3)",
              raw_ent.serial_correlation));

  const randtests::CorrelationSeries raw_corr =
      randtests::bit_correlation(sim.raw, 15);
  unsigned argmax = 1;
  for (unsigned d = 2; d <= 15; ++d)
    if (raw_corr.r[d - 1] > raw_corr.r[argmax - 1]) argmax = d;
  g.check(argmax == 8,
          fmt("largest raw bit correlation is at delay %u (r_8 = %+.3g; "
              "adjacent-symbol same-significance bits sit 8 apart)",
              argmax, raw_corr.r[7]));

  const BitStream shuffled = postproc::shuffle(sim.raw);
  const randtests::EntReport shuf_ent = randtests::ent_report(shuffled);
  const randtests::CorrelationSeries shuf_corr =
      randtests::bit_correlation(shuffled, 15);
  const double bound = randtests::correlation_null_bound(shuf_corr.bits);
  g.check(std::fabs(shuf_ent.serial_correlation) < 5e-4,
          fmt("shuffled byte serial correlation %+.2g (|scc| < 5e-4)",
              shuf_ent.serial_correlation));
  g.check(std::fabs(shuf_corr.r[7]) < bound,
          fmt("shuffled |r_8| = %.3g (bound 4/sqrt(n) = %.3g)",
              std::fabs(shuf_corr.r[7]), bound));

  const double dt = now_s() - t0;
  g.info(fmt("runtime %.1f s", dt));
  return g.ok;
}

// ------------------------------------------------------------ criterion 6

bool criterion_6() {
  Gate g;

  // Exhaustive over all 512 one-hot blocks: involution + bijectivity +
  // population preservation.
  bool involution_ok = true, population_ok = true, bijection_ok = true;
  std::array<bool, 512> hit{};
  for (unsigned pos = 0; pos < 512; ++pos) {
    std::array<std::uint8_t, postproc::kBlockBytes> blk{};
    blk[pos / 8] = static_cast<std::uint8_t>(0x80u >> (pos % 8));
    std::array<std::uint8_t, postproc::kBlockBytes> once = blk;
    postproc::shuffle_block(once.data());
    int pop = 0;
    unsigned target = 0;
    for (unsigned p = 0; p < 512; ++p) {
      if ((once[p / 8] >> (7 - p % 8)) & 1) {
        ++pop;
        target = p;
      }
    }
    population_ok = population_ok && pop == 1;
    if (pop == 1) {
      bijection_ok = bijection_ok && !hit[target];
      hit[target] = true;
    }
    std::array<std::uint8_t, postproc::kBlockBytes> twice = once;
    postproc::shuffle_block(twice.data());
    involution_ok = involution_ok && twice == blk;
  }
  for (bool h : hit) bijection_ok = bijection_ok && h;
  g.check(involution_ok, "involution holds on all 512 one-hot blocks");
  g.check(population_ok, "single set bit stays single on all 512 one-hot blocks");
  g.check(bijection_ok, "bit-position map is a bijection of the 512 positions");

  // 10^4 random blocks: involution and exact population preservation.
  const rng::CounterStream s(0xACC6, 0x6);
  bool rand_inv = true, rand_pop = true;
  for (std::uint64_t b = 0; b < 10'000; ++b) {
    std::array<std::uint8_t, postproc::kBlockBytes> blk{};
    int pop_before = 0;
    for (std::size_t i = 0; i < blk.size(); ++i) {
      blk[i] = static_cast<std::uint8_t>(s.at(b * 64 + i));
      pop_before += __builtin_popcount(blk[i]);
    }
    const std::array<std::uint8_t, postproc::kBlockBytes> original = blk;
    postproc::shuffle_block(blk.data());
    int pop_after = 0;
    for (std::uint8_t byte : blk) pop_after += __builtin_popcount(byte);
    rand_pop = rand_pop && pop_after == pop_before;
    postproc::shuffle_block(blk.data());
    rand_inv = rand_inv && blk == original;
  }
  g.check(rand_inv, "involution holds on 10^4 random blocks");
  g.check(rand_pop, "population preserved on 10^4 random blocks");
  return g.ok;
}

// ------------------------------------------------------------ criterion 7

bool criterion_7() {
  Gate g;
  const std::uint64_t req = randtests::required_minimum(800, 0.01);
  g.check(req == 783, fmt("required_minimum(800, 0.01) = %llu (== 783)",
                          static_cast<unsigned long long>(req)));

  BitStream bs;
  for (char c : std::string("1011010101"))
    bs.append_bits(c == '1' ? 1u : 0u, 1);
  const double p = randtests::frequency_p(bs);
  g.check(std::fabs(p - 0.527089) <= 1e-6,
          fmt("frequency test p-value on the 10-bit reference sequence: "
              "%.9f (0.527089 +- 1e-6)",
              p));
  return g.ok;
}

// ------------------------------------------------------------ criterion 8

bool criterion_8() {
  Gate g;

  // Timestamps for 12.6 s at the 1.8e6/s operating point, kept in memory so
  // the timing below measures extraction alone (single thread).
  const SimulatedStream sim = simulate_raw(1.8e6, 12.6, 0x1D88, /*keep_ticks=*/true);
  g.info(fmt("timing corpus: %.1f Mbit of output bits from %zu timestamps",
             static_cast<double>(sim.raw.bit_length) / 1e6, sim.ticks.size()));

  extract::ExtractionConfig cfg;
  cfg.period_ps = kPeriodPs;
  cfg.bins = kBins;
  extract::StreamingExtractor ex(cfg, kResolutionPs);
  BitStream out;
  out.bytes.reserve(sim.raw.bytes.size());
  const double t0 = now_s();
  for (std::size_t i = 0; i < sim.ticks.size(); i += (1u << 20)) {
    const std::size_t n = std::min<std::size_t>(1u << 20, sim.ticks.size() - i);
    ex.push(std::span<const std::uint64_t>(sim.ticks.data() + i, n), out);
  }
  const double extract_s = now_s() - t0;
  const double mbit_per_s =
      static_cast<double>(out.bit_length) / 1e6 / extract_s;
  g.check(out.bytes == sim.raw.bytes, "timed extraction reproduces the stream");
  g.check(mbit_per_s >= 41.4,
          fmt("extraction throughput %.1f Mbit/s on one core (>= 41.4)", mbit_per_s));

  // Full analysis pass over the >= 180 Mbit sample: byte statistics, the
  // four-test battery at 1 Mbit per sequence, and the correlation series.
  const double a0 = now_s();
  const randtests::EntReport ent = randtests::ent_report(sim.raw);
  randtests::BatteryConfig bcfg;
  bcfg.sequence_bits = 1'000'000;
  const randtests::BatteryReport battery = randtests::run_battery(sim.raw, bcfg);
  const randtests::CorrelationSeries corr = randtests::bit_correlation(sim.raw, 15);
  const double analyze_s = now_s() - a0;
  g.check(analyze_s < 120.0,
          fmt("full analysis of %.1f Mbit took %.1f s (< 120 s)",
              static_cast<double>(sim.raw.bit_length) / 1e6, analyze_s));
  g.info(fmt("analysis summary: entropy %.6f, %zu battery aggregates over "
             "%llu sequences, %zu correlation delays",
             ent.entropy_bits_per_byte, battery.tests.size(),
             static_cast<unsigned long long>(battery.sequences), corr.r.size()));
  return g.ok;
}

// ------------------------------------------------------------ criterion 9

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Drops report lines that echo run-specific metadata rather than results:
/// the measured wall-clock throughput and the output file path.
std::string strip_runtime_metadata(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    if (line.find("throughput_bits_per_s") == std::string::npos &&
        line.find("\"output\"") == std::string::npos) {
      out += line;
      out += '\n';
    }
    pos = end + 1;
  }
  return out;
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return status;
}

bool criterion_9(const std::string& cli) {
  Gate g;

  // In-process: the full pipeline is a pure function of the seed.
  const SimulatedStream a = simulate_raw(5.2e6, 0.05, 0x1D99);
  const SimulatedStream b = simulate_raw(5.2e6, 0.05, 0x1D99);
  g.check(a.raw.bytes == b.raw.bytes && a.raw.bit_length == b.raw.bit_length,
          "raw extractor output is bit-identical across runs (same seed)");
  const BitStream sa = postproc::shuffle(a.raw);
  const BitStream sb = postproc::shuffle(b.raw);
  g.check(sa.bytes == sb.bytes, "shuffled output is bit-identical across runs");

  // Through the CLI: identical artifacts across invocations, and analysis
  // reports identical across thread counts.
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("toarng_acc9_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string base =
      "run --rate 5.2e6 --duration 25ms --dead 24ns --resolution 50ps "
      "--period 12.8ns --bins 256 --seed 77 --seq-bits 100000 ";
  const std::string out1 = (dir / "p1.bsf").string();
  const std::string out2 = (dir / "p2.bsf").string();
  const std::string rep1 = (dir / "r1.json").string();
  const std::string rep2 = (dir / "r2.json").string();
  bool cli_ok = run_cli(cli, base + "--threads 1 -o " + out1 + " --report " + rep1) == 0;
  cli_ok = cli_ok &&
           run_cli(cli, base + "--threads 8 -o " + out2 + " --report " + rep2) == 0;
  g.check(cli_ok, "pipeline runs completed through the command line");
  g.check(cli_ok && read_file(out1) == read_file(out2) && !read_file(out1).empty(),
          "output files identical across --threads 1 and --threads 8");
  g.check(cli_ok && strip_runtime_metadata(read_file(rep1)) ==
                        strip_runtime_metadata(read_file(rep2)),
          "reports identical across --threads 1 and --threads 8 (wall-clock "
          "throughput and file-path echo excluded)");

  const std::string rep3 = (dir / "r3.json").string();
  cli_ok = run_cli(cli, "analyze -i " + out1 + " --seq-bits 100000 --threads 3 -o " +
                            rep3) == 0;
  const std::string rep4 = (dir / "r4.json").string();
  cli_ok = cli_ok && run_cli(cli, "analyze -i " + out1 +
                                      " --seq-bits 100000 --threads 1 -o " + rep4) == 0;
  g.check(cli_ok && read_file(rep3) == read_file(rep4) && !read_file(rep3).empty(),
          "standalone analysis identical across --threads 3 and --threads 1");

  std::error_code ec;
  fs::remove_all(dir, ec);
  return g.ok;
}

const char* criterion_name(int n) {
  switch (n) {
    case 1: return "closed-form metric golden values";
    case 2: return "optical loss budget reproduction";
    case 3: return "first-arrival bin law vs monte-carlo oracle";
    case 4: return "ideal-regime statistical quality at 1.8e6 counts/s (raw stream)";
    case 5: return "hold-off correlation mechanism at 5.2e6 counts/s and its removal";
    case 6: return "shuffle involution, population preservation, bijectivity";
    case 7: return "aggregation arithmetic and frequency-test reference point";
    case 8: return "extraction throughput and analysis runtime";
    case 9: return "bit-exact determinism across runs and thread counts";
    default: return "unknown";
  }
}

} // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  std::string cli;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--criterion") == 0)
      criterion = std::atoi(argv[i + 1]);
    else if (std::strcmp(argv[i], "--cli") == 0)
      cli = argv[i + 1];
  }
  if (criterion < 1 || criterion > 9) {
    std::fprintf(stderr, "usage: acceptance --criterion <1..9> --cli <path>\n");
    return 2;
  }

  std::printf("criterion %d: %s\n", criterion, criterion_name(criterion));
  bool ok = false;
  switch (criterion) {
    case 1: ok = criterion_1(); break;
    case 2: ok = criterion_2(); break;
    case 3: ok = criterion_3(); break;
    case 4: ok = criterion_4(); break;
    case 5: ok = criterion_5(); break;
    case 6: ok = criterion_6(); break;
    case 7: ok = criterion_7(); break;
    case 8: ok = criterion_8(); break;
    case 9:
      if (cli.empty()) {
        std::fprintf(stderr, "criterion 9 needs --cli <path>\n");
        return 2;
      }
      ok = criterion_9(cli);
      break;
  }
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
              criterion_name(criterion));
  return ok ? 0 : 1;
}
