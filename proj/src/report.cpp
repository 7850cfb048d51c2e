#include "epoa/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "epoa/errors.hpp"
#include "epoa/parallel.hpp"
#include "epoa/thresholds.hpp"
#include "epoa/value_cover.hpp"

namespace epoa {
namespace {

using nlohmann::json;

struct Pipeline {
  InterimCurves curves;
  ThresholdSet thresholds;
  CoveringResult covering;
};

Pipeline run_pipeline(const AuctionDataset& ds, const AnalysisConfig& cfg,
                      std::size_t grid_points) {
  const BidGrid grid = BidGrid::geometric(ds.bid_cap, grid_points);
  Pipeline p;
  p.curves = estimate_curves(ds, grid,
                             {cfg.mode, cfg.mc_profiles, cfg.seed, cfg.threads});
  p.thresholds = build_thresholds(ds, p.curves);
  p.covering = compute_covering(ds, p.thresholds);
  return p;
}

double max_realized_ppc(const AuctionDataset& ds) {
  double top = 0.0;
  for (const AuctionRecord& r : ds.records) {
    const AuctionOutcome o = run_gsp(r.bids, r.context);
    for (std::size_t i = 0; i < o.ppc.size(); ++i)
      if (o.allocation[i] > 0.0) top = std::max(top, o.ppc[i]);
  }
  return top;
}

double min_positive_ppc(const InterimCurves& curves) {
  double low = 0.0;
  for (std::size_t i = 0; i < curves.num_bidders(); ++i)
    for (std::size_t g = 0; g < curves.grid.size(); ++g) {
      const double x = curves.alloc[i][g];
      if (!(x > 0.0)) continue;
      const double ppc = curves.pay[i][g] / x;
      if (ppc > 0.0 && (low == 0.0 || ppc < low)) low = ppc;
    }
  return low;
}

using Extractor = std::function<double(const EpoaColumns&)>;

const std::vector<std::pair<std::string, Extractor>>& bootstrap_statistics() {
  static const std::vector<std::pair<std::string, Extractor>> stats = {
      {"revenue", [](const EpoaColumns& c) { return c.revenue; }},
      {"tbar1", [](const EpoaColumns& c) { return c.tbar1; }},
      {"tavg", [](const EpoaColumns& c) { return c.tavg; }},
      {"lb_t", [](const EpoaColumns& c) { return c.lb_t; }},
      {"mu1", [](const EpoaColumns& c) { return c.mu1; }},
      {"mu_lb", [](const EpoaColumns& c) { return c.mu_lb; }},
      {"mu_avg", [](const EpoaColumns& c) { return c.mu_avg; }},
      {"lambda1", [](const EpoaColumns& c) { return c.lambda1; }},
      {"epoa1", [](const EpoaColumns& c) { return c.epoa1; }},
      {"inv_epoa1", [](const EpoaColumns& c) { return c.inv_epoa1; }},
      {"inv_lb_epoa", [](const EpoaColumns& c) { return c.inv_lb_epoa; }},
      {"inv_fa_epoa", [](const EpoaColumns& c) { return c.inv_fa_epoa; }},
  };
  return stats;
}

json columns_json(const EpoaColumns& c) {
  return {{"revenue", c.revenue},     {"tbar1", c.tbar1},
          {"tavg", c.tavg},           {"lb_t", c.lb_t},
          {"mu1", c.mu1},             {"mu_avg", c.mu_avg},
          {"mu_lb", c.mu_lb},         {"rho1", c.rho1},
          {"lambda1", c.lambda1},     {"lambda_lb", c.lambda_lb},
          {"epoa1", c.epoa1},         {"inv_epoa1", c.inv_epoa1},
          {"lb_epoa", c.lb_epoa},     {"inv_lb_epoa", c.inv_lb_epoa},
          {"fa_epoa", c.fa_epoa},     {"inv_fa_epoa", c.inv_fa_epoa}};
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct TableColumn {
  const char* markdown;
  const char* csv;
  const char* statistic;  // bootstrap statistic with the same meaning
  double (*value)(const EpoaColumns&);
};

const std::vector<TableColumn>& table_columns() {
  static const std::vector<TableColumn> cols = {
      {"1/EPoA¹", "inv_epoa1", "inv_epoa1",
       [](const EpoaColumns& c) { return c.inv_epoa1; }},
      {"T̄¹/Rev", "mu1", "mu1", [](const EpoaColumns& c) { return c.mu1; }},
      {"λ¹", "lambda1", "lambda1",
       [](const EpoaColumns& c) { return c.lambda1; }},
      {"LB-T/Rev", "lb_t_over_rev", "mu_lb",
       [](const EpoaColumns& c) { return c.mu_lb; }},
      {"1/LB-EPoA", "inv_lb_epoa", "inv_lb_epoa",
       [](const EpoaColumns& c) { return c.inv_lb_epoa; }},
      {"T_avg/Rev", "tavg_over_rev", "mu_avg",
       [](const EpoaColumns& c) { return c.mu_avg; }},
      {"1/FA-EPoA", "inv_fa_epoa", "inv_fa_epoa",
       [](const EpoaColumns& c) { return c.inv_fa_epoa; }},
  };
  return cols;
}

}  // namespace

const BootstrapCI* EpoaReport::ci(const std::string& statistic) const {
  for (const BootstrapCI& c : bootstrap)
    if (c.statistic == statistic) return &c;
  return nullptr;
}

double epoa_bound(double mu, double lambda) {
  if (!(mu > 0.0)) return 1.0;
  double bound = rho(mu);
  if (lambda > 0.0) bound = std::min(bound, mu / lambda);
  return std::max(1.0, bound);
}

EpoaReport analyze(const AuctionDataset& ds, const AnalysisConfig& cfg) {
  revenue(ds);  // fail fast on zero revenue
  const std::size_t grid_points = cfg.grid_points ? cfg.grid_points : ds.grid_points;
  const Pipeline p = run_pipeline(ds, cfg, grid_points);
  const CoveringResult& cov = p.covering;

  EpoaReport rep;
  rep.mode = cfg.mode;
  rep.auctions = ds.size();
  rep.bidders = ds.num_bidders();
  rep.mc_profiles = p.curves.mc_profiles;
  rep.seed = cfg.seed;

  Diagnostics& d = rep.diagnostics;
  d.bid_cap = ds.bid_cap;
  d.grid_size = p.curves.grid.size();
  d.padded_entries = ds.padded_entries;
  d.value_cap = cfg.value_cap.value_or(ds.value_cap.value_or(0.0));
  if (!(d.value_cap > 0.0)) {
    const double top = max_realized_ppc(ds);
    d.value_cap = top > 0.0 ? 10.0 * top : 10.0 * ds.bid_cap;
  }
  d.value_low = min_positive_ppc(p.curves);
  if (!(d.value_low > 0.0) || d.value_low >= d.value_cap)
    d.value_low = d.value_cap * 1e-3;
  d.value_points = cfg.value_points;
  const std::vector<double> values =
      value_grid(d.value_low, d.value_cap, cfg.value_points);

  d.warnings = p.curves.warnings;
  for (BidderIndex i : p.thresholds.excluded)
    d.excluded_bidders.push_back(ds.bidder_ids[i]);
  if (!d.excluded_bidders.empty())
    d.warnings.push_back(
        "never-allocated bidders contribute zero threshold; covering bounds "
        "exclude them");
  if (cfg.mode == ResamplingMode::kIndependent)
    d.warnings.push_back(
        "independent mode resamples each opponent's bid and the context "
        "separately, ignoring correlation");

  EpoaColumns& c = rep.columns;
  c.revenue = cov.revenue;
  c.tbar1 = cov.tbar1;
  c.tavg = cov.tavg;
  c.lb_t = cov.lb_t;
  c.mu1 = cov.mu1;
  c.mu_avg = cov.mu_avg;
  c.mu_lb = cov.mu_lb;
  c.rho1 = c.mu1 > 0.0 ? rho(c.mu1) : 1.0;
  c.lambda1 = c.mu1 > 0.0 ? lambda_mu1(p.curves, p.thresholds, c.mu1, values) : 0.0;
  c.lambda_lb =
      c.mu_lb > 0.0 ? lambda_mu1(p.curves, p.thresholds, c.mu_lb, values) : 0.0;
  c.epoa1 = epoa_bound(c.mu1, c.lambda1);
  c.inv_epoa1 = 1.0 / c.epoa1;
  c.lb_epoa = epoa_bound(c.mu_lb, c.lambda_lb);
  c.inv_lb_epoa = 1.0 / c.lb_epoa;
  c.fa_epoa = epoa_bound(c.mu_avg, 0.0);
  c.inv_fa_epoa = 1.0 / c.fa_epoa;

  if (cfg.grid_sensitivity && grid_points >= 4 && c.mu1 > 0.0) {
    const Pipeline half = run_pipeline(ds, cfg, grid_points / 2);
    d.grid_sensitivity = std::abs(half.covering.mu1 - c.mu1) / c.mu1;
  }
  return rep;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw DomainError("quantile of empty sample");
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

std::vector<BootstrapCI> bootstrap_ci(const AuctionDataset& ds,
                                      const AnalysisConfig& config,
                                      std::size_t replicates, double level,
                                      std::uint64_t seed) {
  if (replicates < 10) throw DomainError("bootstrap needs at least 10 replicates");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("level must be in (0, 1)");

  AnalysisConfig inner = config;
  inner.threads = 1;
  inner.grid_sensitivity = false;
  const EpoaColumns point = analyze(ds, inner).columns;

  std::vector<std::optional<EpoaColumns>> draws(replicates);
  parallel_for(replicates, config.threads, [&](std::size_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r),
                      static_cast<std::uint32_t>(r >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, ds.size() - 1);
    std::vector<std::size_t> idx(ds.size());
    for (std::size_t& t : idx) t = pick(rng);
    try {
      draws[r] = analyze(subsample(ds, idx), inner).columns;
    } catch (const ZeroRevenue&) {
      // dropped and counted below
    }
  });

  std::vector<BootstrapCI> out;
  for (const auto& [name, get] : bootstrap_statistics()) {
    std::vector<double> samples;
    for (const auto& d : draws)
      if (d) samples.push_back(get(*d));
    BootstrapCI ci;
    ci.statistic = name;
    ci.point = get(point);
    ci.level = level;
    ci.seed = seed;
    ci.replicates = samples.size();
    ci.dropped = replicates - samples.size();
    if (!samples.empty()) {
      ci.lower = quantile(samples, (1.0 - level) / 2.0);
      ci.upper = quantile(samples, (1.0 + level) / 2.0);
      double mean = 0.0;
      for (double s : samples) mean += s;
      mean /= static_cast<double>(samples.size());
      double ss = 0.0;
      for (double s : samples) ss += (s - mean) * (s - mean);
      ci.std_error = samples.size() > 1
                         ? std::sqrt(ss / static_cast<double>(samples.size() - 1))
                         : 0.0;
    } else {
      ci.lower = ci.upper = ci.point;
    }
    out.push_back(ci);
  }
  return out;
}

CorrelationComparison compare_correlation_modes(const AuctionDataset& ds,
                                                const AnalysisConfig& config,
                                                std::size_t replicates,
                                                double level,
                                                std::uint64_t seed) {
  CorrelationComparison out;
  AnalysisConfig cfg = config;
  cfg.mode = ResamplingMode::kJoint;
  out.joint = analyze(ds, cfg);
  out.joint.bootstrap = bootstrap_ci(ds, cfg, replicates, level, seed);
  cfg.mode = ResamplingMode::kIndependent;
  out.independent = analyze(ds, cfg);
  out.independent.bootstrap = bootstrap_ci(ds, cfg, replicates, level, seed);

  const double se_joint = out.joint.ci("epoa1")->std_error;
  const double se_ind = out.independent.ci("epoa1")->std_error;
  out.tolerance = 2.0 * std::sqrt(se_joint * se_joint + se_ind * se_ind);
  out.ordering_holds = out.independent.columns.epoa1 >=
                       out.joint.columns.epoa1 - out.tolerance;
  return out;
}

json report_to_json(const EpoaReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["mode"] = mode_name(r.mode);
  j["auctions"] = r.auctions;
  j["bidders"] = r.bidders;
  j["mc_profiles"] = r.mc_profiles;
  j["seed"] = r.seed;
  j["columns"] = columns_json(r.columns);

  json table;
  for (const TableColumn& col : table_columns()) table[col.csv] = col.value(r.columns);
  j["table"] = table;

  const Diagnostics& d = r.diagnostics;
  j["diagnostics"] = {{"bid_cap", d.bid_cap},
                      {"grid_size", d.grid_size},
                      {"value_low", d.value_low},
                      {"value_cap", d.value_cap},
                      {"value_points", d.value_points},
                      {"padded_entries", d.padded_entries},
                      {"excluded_bidders", d.excluded_bidders},
                      {"warnings", d.warnings},
                      {"grid_sensitivity", d.grid_sensitivity
                                               ? json(*d.grid_sensitivity)
                                               : json(nullptr)}};
  json boot = json::array();
  for (const BootstrapCI& c : r.bootstrap)
    boot.push_back({{"statistic", c.statistic},
                    {"point", c.point},
                    {"lower", c.lower},
                    {"upper", c.upper},
                    {"std_error", c.std_error},
                    {"level", c.level},
                    {"replicates", c.replicates},
                    {"dropped", c.dropped},
                    {"seed", c.seed}});
  j["bootstrap"] = boot;
  return j;
}

json comparison_to_json(const CorrelationComparison& cmp) {
  return {{"schema_version", kReportSchemaVersion},
          {"joint", report_to_json(cmp.joint)},
          {"independent", report_to_json(cmp.independent)},
          {"tolerance", cmp.tolerance},
          {"ordering_holds", cmp.ordering_holds}};
}

void write_markdown_table(const std::vector<EpoaReport>& reports,
                          std::ostream& out) {
  const bool with_ci = std::any_of(reports.begin(), reports.end(),
                                   [](const EpoaReport& r) { return !r.bootstrap.empty(); });
  out << "| mode |";
  for (const TableColumn& col : table_columns()) out << ' ' << col.markdown << " |";
  if (with_ci)
    for (const TableColumn& col : table_columns()) out << ' ' << col.markdown << " CI |";
  out << "\n|---|";
  const std::size_t ncols = table_columns().size() * (with_ci ? 2 : 1);
  for (std::size_t k = 0; k < ncols; ++k) out << "---|";
  out << '\n';
  for (const EpoaReport& r : reports) {
    out << "| " << mode_name(r.mode) << " |";
    for (const TableColumn& col : table_columns())
      out << ' ' << fixed(col.value(r.columns)) << " |";
    if (with_ci) {
      for (const TableColumn& col : table_columns()) {
        const BootstrapCI* ci = r.ci(col.statistic);
        if (ci)
          out << " [" << fixed(ci->lower) << ", " << fixed(ci->upper) << "] |";
        else
          out << "  |";
      }
    }
    out << '\n';
  }
}

void write_csv_table(const std::vector<EpoaReport>& reports, std::ostream& out) {
  const bool with_ci = std::any_of(reports.begin(), reports.end(),
                                   [](const EpoaReport& r) { return !r.bootstrap.empty(); });
  out << "mode";
  for (const TableColumn& col : table_columns()) out << ',' << col.csv;
  if (with_ci)
    for (const TableColumn& col : table_columns())
      out << ',' << col.csv << "_lower," << col.csv << "_upper";
  out << '\n';
  out.precision(17);
  for (const EpoaReport& r : reports) {
    out << mode_name(r.mode);
    for (const TableColumn& col : table_columns()) out << ',' << col.value(r.columns);
    if (with_ci) {
      for (const TableColumn& col : table_columns()) {
        const BootstrapCI* ci = r.ci(col.statistic);
        if (ci)
          out << ',' << ci->lower << ',' << ci->upper;
        else
          out << ",,";
      }
    }
    out << '\n';
  }
}

}  // namespace epoa
