#include <doctest.h>

#include <sstream>

#include "epoa/errors.hpp"
#include "epoa/report.hpp"
#include "epoa/synth.hpp"
#include "epoa/value_cover.hpp"

using namespace epoa;

namespace {

AuctionDataset correlated(std::size_t T, std::uint64_t seed, double scale = 1.0) {
  SynthSpec spec;
  spec.kind = SynthKind::kCorrelated;
  spec.bidders = 3;
  spec.auctions = T;
  spec.slot_ctrs = {1.0, 0.5};
  spec.quality_low = 0.3;
  spec.omega = 0.5;
  spec.reserve = 0.05;
  spec.seed = seed;
  auto ds = gen_correlated(spec);
  for (auto& r : ds.records) {
    for (auto& b : r.bids) b *= scale;
    r.context.reserve *= scale;
    r.context.mainline_reserve *= scale;
  }
  ds.bid_cap *= scale;
  return ds;
}

AnalysisConfig small_config() {
  AnalysisConfig cfg;
  cfg.grid_points = 60;
  cfg.value_points = 60;
  cfg.grid_sensitivity = false;
  return cfg;
}

}  // namespace

TEST_CASE("uncontested zero-price dataset has no revenue") {
  AuctionDataset ds;
  ds.bidder_ids = {"a"};
  AuctionRecord r;
  r.context.scores = {1.0};
  r.context.qualities = {1.0};
  r.context.slot_ctrs = {1.0};
  r.bids = {0.5};
  ds.records = {r, r};
  ds.bid_cap = 1.0;
  CHECK_THROWS_AS(analyze(ds, small_config()), ZeroRevenue);
}

TEST_CASE("epoa bound combination") {
  CHECK(epoa_bound(0.0, 0.0) == 1.0);
  CHECK(epoa_bound(1.0, 2.0) == 1.0);
  CHECK(epoa_bound(1.0, 0.8) == doctest::Approx(1.25));
  CHECK(epoa_bound(1.0, 0.1) == doctest::Approx(rho(1.0)));
}

TEST_CASE("report column identities") {
  const auto ds = correlated(300, 2);
  auto cfg = small_config();
  cfg.grid_sensitivity = true;
  const auto rep = analyze(ds, cfg);
  const auto& c = rep.columns;
  CHECK(c.mu1 == c.tbar1 / c.revenue);
  CHECK(c.mu1 * c.revenue == doctest::Approx(c.tbar1).epsilon(1e-15));
  CHECK(c.mu_avg == c.tavg / c.revenue);
  CHECK(c.mu_lb == c.lb_t / c.revenue);
  CHECK(c.rho1 == rho(c.mu1));
  CHECK(c.epoa1 == epoa_bound(c.mu1, c.lambda1));
  CHECK(c.epoa1 <= c.rho1);
  CHECK(c.epoa1 >= 1.0);
  CHECK(c.inv_epoa1 == 1.0 / c.epoa1);
  CHECK(c.inv_epoa1 > 0.0);
  CHECK(c.inv_epoa1 <= 1.0);
  CHECK(c.lb_epoa == epoa_bound(c.mu_lb, c.lambda_lb));
  CHECK(c.fa_epoa == doctest::Approx(rho(c.mu_avg)));
  CHECK(c.lb_epoa <= c.epoa1 + 1e-12);
  CHECK(rep.diagnostics.grid_sensitivity.has_value());
  CHECK(rep.diagnostics.value_cap > 0);
  CHECK(rep.diagnostics.value_low <= rep.diagnostics.value_cap);
}

TEST_CASE("scaling bids and reserves leaves ratios unchanged") {
  const auto a = analyze(correlated(200, 4), small_config());
  const auto b = analyze(correlated(200, 4, 3.0), small_config());
  CHECK(a.columns.mu1 == doctest::Approx(b.columns.mu1).epsilon(1e-10));
  CHECK(a.columns.lambda1 == doctest::Approx(b.columns.lambda1).epsilon(1e-10));
  CHECK(a.columns.inv_epoa1 == doctest::Approx(b.columns.inv_epoa1).epsilon(1e-10));
  CHECK(3.0 * a.columns.revenue == doctest::Approx(b.columns.revenue).epsilon(1e-12));
  CHECK(3.0 * a.columns.tbar1 == doctest::Approx(b.columns.tbar1).epsilon(1e-10));
  CHECK(3.0 * a.columns.lb_t == doctest::Approx(b.columns.lb_t).epsilon(1e-10));
}

TEST_CASE("bootstrap on identical records is degenerate") {
  auto ds = correlated(1, 6);
  const auto r = ds.records[0];
  for (int k = 0; k < 19; ++k) ds.records.push_back(r);
  const auto cis = bootstrap_ci(ds, small_config(), 20, 0.9, 3);
  REQUIRE_FALSE(cis.empty());
  for (const auto& ci : cis) {
    CHECK(ci.lower == doctest::Approx(ci.point).epsilon(1e-12));
    CHECK(ci.upper == doctest::Approx(ci.point).epsilon(1e-12));
    CHECK(ci.replicates == 20);
  }
}

TEST_CASE("bootstrap is deterministic and thread independent") {
  const auto ds = correlated(150, 8);
  auto cfg = small_config();
  const auto a = bootstrap_ci(ds, cfg, 12, 0.9, 77);
  cfg.threads = 3;
  const auto b = bootstrap_ci(ds, cfg, 12, 0.9, 77);
  REQUIRE(a.size() == b.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    CHECK(a[s].statistic == b[s].statistic);
    CHECK(a[s].lower == b[s].lower);
    CHECK(a[s].upper == b[s].upper);
    CHECK(a[s].lower <= a[s].upper);
  }
  CHECK_THROWS(bootstrap_ci(ds, cfg, 5, 0.9, 1));
  CHECK_THROWS(bootstrap_ci(ds, cfg, 20, 1.0, 1));
}

TEST_CASE("quantile uses linear interpolation") {
  const std::vector<double> s{4.0, 1.0, 3.0, 2.0, 5.0};
  CHECK(quantile(s, 0.0) == 1.0);
  CHECK(quantile(s, 0.5) == 3.0);
  CHECK(quantile(s, 0.1) == doctest::Approx(1.4));
  CHECK(quantile(s, 1.0) == 5.0);
}

TEST_CASE("bound validity on first-price equilibrium data") {
  for (std::size_t n : {2, 3, 5}) {
    SynthSpec spec;
    spec.kind = SynthKind::kFpaBne;
    spec.bidders = n;
    spec.auctions = 1500;
    spec.seed = 100 + n;
    const auto syn = gen_fpa_bne(spec);
    const auto rep = analyze(syn.dataset, small_config());
    CHECK(syn.truth->ratio >= rep.columns.inv_epoa1 - 1e-9);
  }
}

TEST_CASE("single record: both modes agree") {
  const auto ds = correlated(1, 9);
  const auto cmp = compare_correlation_modes(ds, [] {
    auto c = small_config();
    c.mc_profiles = 20;
    c.seed = 4;
    return c;
  }(), 10, 0.9, 5);
  CHECK(cmp.joint.columns.epoa1 ==
        doctest::Approx(cmp.independent.columns.epoa1).epsilon(1e-9));
  CHECK(cmp.ordering_holds);
}

TEST_CASE("exports") {
  const auto rep = analyze(correlated(100, 3), small_config());
  const auto j = report_to_json(rep);
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("table").at("mu1").get<double>() == rep.columns.mu1);
  std::ostringstream md, csv;
  write_markdown_table({rep}, md);
  write_csv_table({rep}, csv);
  CHECK(md.str().find("1/EPoA") != std::string::npos);
  CHECK(csv.str().find('\n') != std::string::npos);
}
