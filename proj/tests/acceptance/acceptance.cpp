// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../oracles.hpp"
#include "epoa/covering.hpp"
#include "epoa/errors.hpp"
#include "epoa/interim.hpp"
#include "epoa/report.hpp"
#include "epoa/synth.hpp"
#include "epoa/thresholds.hpp"
#include "epoa/value_cover.hpp"

namespace fs = std::filesystem;
using namespace epoa;

namespace {

// Tolerances and sizes.
constexpr double kRhoTol = 0.002;
constexpr double kRhoBudgetMs = 1.0;
constexpr double kConcTol = 0.003;
constexpr double kConcBudgetMs = 100.0;
constexpr double kChainRelTol = 1e-9;
constexpr double kOracleTol = 1e-12;
constexpr double kBoundSlack = 1e-9;
constexpr std::size_t kCorrBootstrap = 50;
constexpr std::size_t kCorrRequired = 18;
constexpr std::size_t kTrendBootstrap = 60;
constexpr double kLevel = 0.9;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << detail
            << std::endl;
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

void criterion_rho() {
  const std::vector<std::pair<double, double>> table{
      {0.5, 1.271}, {0.75, 1.421}, {1, 1.582}, {1.25, 1.752},
      {1.5, 1.931}, {2, 2.313},    {4, 4.075}, {8, 8.003}};
  const auto t0 = Clock::now();
  double worst = 0;
  for (const auto& [mu, expect] : table) worst = std::max(worst, std::abs(rho(mu) - expect));
  const double ms = ms_since(t0);
  report(1, worst <= kRhoTol && ms < kRhoBudgetMs,
         "max |rho - table| = " + fmt(worst, 3) + ", " + fmt(ms, 3) + " ms");
}

void criterion_concentration() {
  const std::vector<double> ks{2, 4, 10, 100};
  const std::vector<std::pair<double, std::vector<double>>> table{
      {1, {1.302, 1.163, 1.072, 1.009}},    {1.25, {1.506, 1.382, 1.304, 1.256}},
      {1.5, {1.717, 1.61, 1.545, 1.505}},   {2, {2.157, 2.079, 2.032, 2.003}},
      {4, {4.037, 4.019, 4.007, 4.001}},    {8, {8.001, 8.001, 8.0, 8.0}}};
  const auto t0 = Clock::now();
  double worst = 0;
  for (const auto& [mu, row] : table)
    for (std::size_t c = 0; c < ks.size(); ++c)
      worst = std::max(worst, std::abs(lambda_concentration(mu, ks[c]).poa - row[c]));
  const double ms = ms_since(t0);
  report(2, worst <= kConcTol && ms < kConcBudgetMs,
         "max |poa - table| = " + fmt(worst, 3) + ", " + fmt(ms, 3) + " ms");
}

// Random position-auction log: per-record contexts with reserves and
// mainline rules, bids mixing a common shock with idiosyncratic noise.
AuctionDataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t m,
                              std::size_t T) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double omega = u(rng);
  AuctionDataset ds;
  for (std::size_t i = 0; i < n; ++i) ds.bidder_ids.push_back("b" + std::to_string(i));
  for (std::size_t t = 0; t < T; ++t) {
    AuctionRecord r;
    r.auction_id = std::to_string(t);
    r.context = oracle::random_context(rng, n, m);
    // a zero cap would make the top slot unreachable
    if (!r.context.mainline_slots.empty())
      r.context.mainline_cap = std::max<std::size_t>(r.context.mainline_cap, 1);
    const double z = u(rng);
    for (std::size_t i = 0; i < n; ++i) r.bids.push_back(omega * z + (1 - omega) * u(rng));
    ds.records.push_back(std::move(r));
  }
  validate_dataset(ds);
  return ds;
}

void criterion_chain() {
  std::mt19937_64 rng(20240301);
  std::size_t held = 0, total = 0, skipped = 0, lower_held = 0, upper_held = 0;
  double worst_avg_lb = 0, worst_lb_upper = 0;
  const auto t0 = Clock::now();
  while (total < 200) {
    const std::size_t n = 1 + rng() % 6, m = 1 + rng() % 4;
    const auto ds = random_dataset(rng, n, m, 500);
    CoveringResult cov;
    try {
      const auto curves = estimate_curves(ds, BidGrid::geometric(ds.bid_cap, 200));
      cov = compute_covering(ds, build_thresholds(ds, curves));
    } catch (const ZeroRevenue&) {
      ++skipped;
      continue;
    }
    ++total;
    const double scale = std::max({std::abs(cov.tbar1), std::abs(cov.lb_t), 1e-300});
    const double d1 = (cov.tavg - cov.lb_t) / scale, d2 = (cov.lb_t - cov.tbar1) / scale;
    worst_avg_lb = std::max(worst_avg_lb, d1);
    worst_lb_upper = std::max(worst_lb_upper, d2);
    lower_held += d1 <= kChainRelTol;
    upper_held += d2 <= kChainRelTol;
    if (d1 <= kChainRelTol && d2 <= kChainRelTol) ++held;
  }
  const std::string of = "/" + std::to_string(total);
  report(3, held == total,
         std::to_string(held) + of + " datasets fully ordered; tavg <= lb_t in " +
             std::to_string(lower_held) + of + " (worst relative excess " + fmt(worst_avg_lb) +
             "), lb_t <= tbar1 in " + std::to_string(upper_held) + of + " (worst " +
             fmt(worst_lb_upper) + "); " + fmt(ms_since(t0) / 1000, 3) + " s" +
             (skipped ? "; " + std::to_string(skipped) + " zero-revenue draws redrawn" : ""));
}

double brute_tavg(const AuctionDataset& ds, const ThresholdSet& thr) {
  const std::size_t n = ds.bidder_ids.size(), m = max_slot_count(ds);
  const double T = static_cast<double>(ds.records.size());
  double best = 0;
  // every injective partial map bidder -> slot
  std::vector<int> slot_of(n, -1);
  std::vector<bool> used(m, false);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double acc) {
    if (i == n) {
      best = std::max(best, acc);
      return;
    }
    rec(i + 1, acc);
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j]) continue;
      used[j] = true;
      double x = 0;
      for (const auto& r : ds.records)
        if (j < r.context.slot_ctrs.size()) x += r.context.slot_ctrs[j] * r.context.qualities[i];
      x /= T;
      rec(i + 1, acc + thr.integral(i, std::min(x, thr.max_alloc[i])));
      used[j] = false;
    }
  };
  rec(0, 0.0);
  return best;
}

void criterion_oracle() {
  std::mt19937_64 rng(77);
  std::size_t agree = 0;
  double worst = 0;
  const auto t0 = Clock::now();
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng() % 4, m = 1 + rng() % 3;
    const auto ds = random_dataset(rng, n, m, 1 + rng() % 30);
    const auto curves = estimate_curves(ds, BidGrid::geometric(ds.bid_cap, 50));
    const auto thr = build_thresholds(ds, curves);
    const auto up = tbar1(ds, thr);
    double expect = 0;
    for (const auto& r : ds.records) expect += oracle::max_welfare(up.linearized_values, r.context);
    expect /= static_cast<double>(ds.records.size());
    const double fixed = tavg(ds, thr).value, fixed_expect = brute_tavg(ds, thr);
    const double e = std::max(std::abs(up.value - expect) / std::max(1.0, std::abs(expect)),
                              std::abs(fixed - fixed_expect) / std::max(1.0, std::abs(fixed_expect)));
    worst = std::max(worst, e);
    if (e <= kOracleTol) ++agree;
  }
  report(4, agree == 100,
         std::to_string(agree) + "/100 instances match brute force; worst error " + fmt(worst) +
             "; " + fmt(ms_since(t0) / 1000, 3) + " s");
}

AnalysisConfig base_config() {
  AnalysisConfig cfg;
  cfg.grid_sensitivity = false;
  return cfg;
}

void criterion_bounds() {
  std::size_t ok = 0, total = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  const auto t0 = Clock::now();
  const std::size_t ns[] = {2, 3, 5};
  for (std::size_t s = 0; s < 20; ++s) {
    SynthSpec spec;
    spec.kind = SynthKind::kFpaBne;
    spec.bidders = ns[s % 3];
    spec.auctions = 2000;
    spec.seed = 1000 + s;
    const auto syn = gen_fpa_bne(spec);
    const auto rep = analyze(syn.dataset, base_config());
    const double margin = syn.truth->ratio - (1.0 / rep.columns.epoa1 - syn.truth->epsilon_regret);
    worst_margin = std::min(worst_margin, margin);
    ++total;
    if (margin >= -kBoundSlack) ++ok;
  }
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (std::size_t s = 0; s < 10; ++s) {
    SynthSpec spec;
    spec.kind = SynthKind::kGspLearning;
    spec.bidders = 2 + s % 3;
    spec.auctions = 5000;
    spec.values.clear();
    for (std::size_t i = 0; i < spec.bidders; ++i) spec.values.push_back(u(rng));
    spec.value_max = 1.0;
    spec.slot_ctrs = s % 2 ? std::vector<double>{1.0, 0.6} : std::vector<double>{1.0, 0.7, 0.4};
    spec.quality_low = 0.5;
    spec.reserve = 0.05;
    spec.seed = 2000 + s;
    const auto syn = gen_gsp_learning(spec);
    const auto rep = analyze(syn.dataset, base_config());
    const double margin = syn.truth->ratio - (1.0 / rep.columns.epoa1 - syn.truth->epsilon_regret);
    worst_margin = std::min(worst_margin, margin);
    ++total;
    if (margin >= -kBoundSlack) ++ok;
  }
  report(5, ok == total,
         std::to_string(ok) + "/" + std::to_string(total) +
             " runs satisfy ratio >= 1/bound - eps_regret; smallest margin " + fmt(worst_margin) +
             "; " + fmt(ms_since(t0) / 1000, 3) + " s");
}

void criterion_correlation() {
  std::size_t held = 0;
  const auto t0 = Clock::now();
  for (std::uint64_t s = 0; s < 20; ++s) {
    SynthSpec spec;
    spec.kind = SynthKind::kCorrelated;
    spec.bidders = 3;
    spec.auctions = 2000;
    spec.omega = 0.7;
    spec.slot_ctrs = {1.0, 0.5};
    spec.quality_low = 0.5;
    spec.reserve = 0.05;
    spec.seed = 300 + s;
    const auto ds = gen_correlated(spec);
    AnalysisConfig cfg = base_config();
    cfg.seed = 9000 + s;
    const auto cmp = compare_correlation_modes(ds, cfg, kCorrBootstrap, kLevel, 700 + s);
    if (cmp.ordering_holds) ++held;
  }
  report(6, held >= kCorrRequired,
         std::to_string(held) + "/20 seeds with EPoA_independent >= EPoA_joint - 2 SE; " +
             fmt(ms_since(t0) / 1000, 3) + " s");
}

void criterion_trend() {
  const std::size_t sizes[] = {100, 1000, 10000};
  std::vector<double> medians;
  const auto t0 = Clock::now();
  for (std::size_t T : sizes) {
    std::vector<double> widths;
    for (std::uint64_t s = 0; s < 5; ++s) {
      SynthSpec spec;
      spec.kind = SynthKind::kCorrelated;
      spec.bidders = 3;
      spec.auctions = T;
      spec.omega = 0.5;
      spec.slot_ctrs = {1.0, 0.5};
      spec.quality_low = 0.5;
      spec.reserve = 0.05;
      spec.seed = 40 + s;
      const auto ds = gen_correlated(spec);
      const auto cis = bootstrap_ci(ds, base_config(), kTrendBootstrap, kLevel, 60 + s);
      for (const auto& ci : cis)
        if (ci.statistic == "mu1") widths.push_back(ci.upper - ci.lower);
    }
    medians.push_back(quantile(widths, 0.5));
  }
  const bool ok = medians[0] > medians[1] && medians[1] > medians[2];
  report(7, ok,
         "median mu1 CI width " + fmt(medians[0]) + " > " + fmt(medians[1]) + " > " +
             fmt(medians[2]) + "; " + fmt(ms_since(t0) / 1000, 3) + " s");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_determinism(const std::string& tool, const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  {
    std::ofstream(work / "spec.json")
        << R"({"kind":"correlated","bidders":4,"auctions":400,"seed":17,"omega":0.6,)"
           R"("alphas":[1,0.6,0.3],"quality_low":0.4,"reserve":0.05})";
  }
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + tool + "\" " + args + " > \"" + (work / "log.txt").string() +
                            "\" 2>&1";
    return std::system(cmd.c_str());
  };
  bool ok = run("synth --spec \"" + (work / "spec.json").string() + "\" --out \"" +
                (work / "data").string() + "\"") == 0;
  std::vector<std::string> outputs;
  for (const char* t : {"1", "1", "2", "4"}) {
    const fs::path out = work / ("run_" + std::to_string(outputs.size()));
    ok = ok && run("epoa --input \"" + (work / "data" / "dataset.jsonl").string() +
                   "\" --dataset-config \"" + (work / "data" / "dataset_config.json").string() +
                   "\" --out \"" + out.string() +
                   "\" --mode both --seed 5 --mc-profiles 50 --bootstrap 10 --grid-points 60"
                   " --value-points 60 --threads " + t) == 0;
    outputs.push_back(slurp(out / "report.json"));
  }
  for (const auto& o : outputs) ok = ok && !o.empty() && o == outputs[0];
  report(8, ok, "report.json byte-identical across repeated runs and --threads 1, 2, 4");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string tool;
  std::string workdir = (fs::temp_directory_path() / "epoa_acceptance").string();
  app.add_option("--tool", tool, "path to the epoa executable")->required();
  app.add_option("--workdir", workdir, "scratch directory");
  CLI11_PARSE(app, argc, argv);

  criterion_rho();
  criterion_concentration();
  criterion_chain();
  criterion_oracle();
  criterion_bounds();
  criterion_correlation();
  criterion_trend();
  criterion_determinism(tool, workdir);
  std::cout << "criterion 9: N/A   out of scope: the proprietary per-phrase table rows and the "
               "constants of the finite-sample convergence rates; covered by criteria 3-8"
            << std::endl;
  std::cout << (failures ? "FAILED: " + std::to_string(failures) + " criteria" : "ALL PASSED")
            << std::endl;
  return failures ? 1 : 0;
}
