#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epoa/covering.hpp"
#include "epoa/dataset.hpp"
#include "epoa/interim.hpp"

namespace epoa {

inline constexpr int kReportSchemaVersion = 1;

struct AnalysisConfig {
  std::size_t grid_points = 0;  // positive grid bids; 0 uses the dataset's
  std::optional<double> value_cap;
  std::size_t value_points = 200;
  ResamplingMode mode = ResamplingMode::kJoint;
  std::size_t mc_profiles = 200;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool grid_sensitivity = true;  // rerun at half grid resolution
};

// Headline quantities. EPoA values are welfare ratios OPT / welfare.
struct EpoaColumns {
  double revenue = 0.0;
  double tbar1 = 0.0;
  double tavg = 0.0;
  double lb_t = 0.0;
  double mu1 = 0.0;
  double mu_avg = 0.0;
  double mu_lb = 0.0;
  double rho1 = 1.0;       // mu1 / (1 - e^{-mu1})
  double lambda1 = 0.0;    // lambda^{mu1,1}
  double lambda_lb = 0.0;  // lambda^{mu_lb,1}
  double epoa1 = 1.0;      // min(rho1, mu1 / lambda1), floored at 1
  double inv_epoa1 = 1.0;
  double lb_epoa = 1.0;
  double inv_lb_epoa = 1.0;
  double fa_epoa = 1.0;  // rho(mu_avg)
  double inv_fa_epoa = 1.0;
};

struct Diagnostics {
  double bid_cap = 0.0;
  std::size_t grid_size = 0;
  double value_low = 0.0;
  double value_cap = 0.0;
  std::size_t value_points = 0;
  std::size_t padded_entries = 0;
  std::vector<std::string> excluded_bidders;
  std::vector<std::string> warnings;
  std::optional<double> grid_sensitivity;  // |mu1(half) - mu1| / mu1
};

struct BootstrapCI {
  std::string statistic;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double std_error = 0.0;
  double level = 0.0;
  std::size_t replicates = 0;  // successful replicates
  std::size_t dropped = 0;     // zero-revenue replicates
  std::uint64_t seed = 0;
};

struct EpoaReport {
  ResamplingMode mode = ResamplingMode::kJoint;
  std::size_t auctions = 0;
  std::size_t bidders = 0;
  std::size_t mc_profiles = 0;
  std::uint64_t seed = 0;
  EpoaColumns columns;
  Diagnostics diagnostics;
  std::vector<BootstrapCI> bootstrap;

  const BootstrapCI* ci(const std::string& statistic) const;
};

// Combines a revenue-covering parameter and a value-covering parameter into
// an EPoA bound: min(rho(mu), mu / lambda), at least 1; mu = 0 gives 1.
double epoa_bound(double mu, double lambda);

// Curves, thresholds, revenue, covering bounds, value covering, EPoA.
// Throws ZeroRevenue, BidCapTooLow and the other pipeline errors.
EpoaReport analyze(const AuctionDataset& ds, const AnalysisConfig& config);

// Percentile intervals from an i.i.d. bootstrap over auctions. Replicate r
// uses a generator seeded from (seed, r); zero-revenue replicates are dropped.
std::vector<BootstrapCI> bootstrap_ci(const AuctionDataset& ds,
                                      const AnalysisConfig& config,
                                      std::size_t replicates, double level,
                                      std::uint64_t seed);

// Linear-interpolation quantile of unsorted samples.
double quantile(std::vector<double> samples, double q);

struct CorrelationComparison {
  EpoaReport joint;
  EpoaReport independent;
  double tolerance = 0.0;  // 2 x combined bootstrap standard error of EPoA
  bool ordering_holds = false;
};

// Analyzes under both resampling modes; the ordering flag reports whether
// ignoring correlation gave a bound no smaller than the joint one.
CorrelationComparison compare_correlation_modes(const AuctionDataset& ds,
                                                const AnalysisConfig& config,
                                                std::size_t replicates,
                                                double level,
                                                std::uint64_t seed);

nlohmann::json report_to_json(const EpoaReport& report);
nlohmann::json comparison_to_json(const CorrelationComparison& cmp);

// Table columns: 1/EPoA1, T1/Rev, lambda1, LB-T/Rev, 1/LB-EPoA, Tavg/Rev,
// 1/FA-EPoA, plus bootstrap interval columns when present.
void write_markdown_table(const std::vector<EpoaReport>& reports,
                          std::ostream& out);
void write_csv_table(const std::vector<EpoaReport>& reports, std::ostream& out);

}  // namespace epoa
