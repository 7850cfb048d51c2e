#include "epoa/interim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "epoa/errors.hpp"
#include "epoa/parallel.hpp"
#include "epoa/thresholds.hpp"

namespace epoa {
namespace {

constexpr double kCapTolerance = 1e-9;

struct CellSums {
  std::vector<double> alloc;
  std::vector<double> pay;
};

void accumulate(const CounterfactualAuction& cf, const std::vector<double>& grid,
                CellSums& sums) {
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto r = cf.evaluate(grid[g]);
    sums.alloc[g] += r.allocation;
    sums.pay[g] += r.payment;
  }
}

CellSums joint_sums(const AuctionDataset& ds, BidderIndex i,
                    const std::vector<double>& grid) {
  CellSums sums{std::vector<double>(grid.size(), 0.0),
                std::vector<double>(grid.size(), 0.0)};
  for (const AuctionRecord& r : ds.records)
    accumulate(CounterfactualAuction(i, r.bids, r.context), grid, sums);
  return sums;
}

// The same R profiles are used at every grid bid, so each bidder's curve is an
// average of monotone step functions.
CellSums independent_sums(const AuctionDataset& ds, BidderIndex i,
                          const std::vector<double>& grid,
                          const EstimationOptions& opt) {
  CellSums sums{std::vector<double>(grid.size(), 0.0),
                std::vector<double>(grid.size(), 0.0)};
  std::seed_seq seq{static_cast<std::uint32_t>(opt.seed),
                    static_cast<std::uint32_t>(opt.seed >> 32),
                    static_cast<std::uint32_t>(i)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, ds.size() - 1);
  std::vector<double> bids(ds.num_bidders(), 0.0);
  for (std::size_t r = 0; r < opt.mc_profiles; ++r) {
    const AuctionContext& ctx = ds.records[pick(rng)].context;
    for (BidderIndex j = 0; j < bids.size(); ++j)
      bids[j] = j == i ? 0.0 : ds.records[pick(rng)].bids[j];
    accumulate(CounterfactualAuction(i, bids, ctx), grid, sums);
  }
  return sums;
}

bool non_decreasing(const std::vector<double>& v) {
  return std::is_sorted(v.begin(), v.end());
}

void running_max(std::vector<double>& v) {
  for (std::size_t g = 1; g < v.size(); ++g) v[g] = std::max(v[g], v[g - 1]);
}

double min_reserve_ppc(const AuctionDataset& ds) {
  double p_min = std::numeric_limits<double>::infinity();
  for (const AuctionRecord& r : ds.records)
    for (double s : r.context.scores) p_min = std::min(p_min, r.context.reserve / s);
  return p_min;
}

}  // namespace

BidGrid::BidGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw DomainError("bid grid needs at least two points");
  if (points_.front() != 0.0) throw DomainError("bid grid must start at 0");
  for (std::size_t g = 1; g < points_.size(); ++g)
    if (!(points_[g] > points_[g - 1]))
      throw DomainError("bid grid must be strictly increasing");
}

BidGrid BidGrid::geometric(double cap, std::size_t positive_points,
                           double low_fraction) {
  if (!(cap > 0.0) || positive_points < 1 || !(low_fraction > 0.0) ||
      !(low_fraction < 1.0))
    throw DomainError("invalid geometric grid parameters");
  std::vector<double> pts{0.0};
  if (positive_points == 1) {
    pts.push_back(cap);
    return BidGrid(std::move(pts));
  }
  const double log_low = std::log(cap * low_fraction);
  const double step = (std::log(cap) - log_low) /
                      static_cast<double>(positive_points - 1);
  for (std::size_t g = 0; g + 1 < positive_points; ++g)
    pts.push_back(std::exp(log_low + step * static_cast<double>(g)));
  pts.push_back(cap);
  return BidGrid(std::move(pts));
}

BidGrid BidGrid::uniform(double cap, std::size_t positive_points) {
  if (!(cap > 0.0) || positive_points < 1)
    throw DomainError("invalid uniform grid parameters");
  std::vector<double> pts{0.0};
  for (std::size_t g = 1; g < positive_points; ++g)
    pts.push_back(cap * static_cast<double>(g) /
                  static_cast<double>(positive_points));
  pts.push_back(cap);
  return BidGrid(std::move(pts));
}

std::string mode_name(ResamplingMode mode) {
  return mode == ResamplingMode::kJoint ? "joint" : "independent";
}

std::optional<ResamplingMode> parse_mode(const std::string& name) {
  if (name == "joint") return ResamplingMode::kJoint;
  if (name == "independent") return ResamplingMode::kIndependent;
  return std::nullopt;
}

InterimCurves estimate_curves(const AuctionDataset& ds, const BidGrid& grid,
                              const EstimationOptions& opt) {
  if (opt.mode == ResamplingMode::kIndependent && opt.mc_profiles < 1)
    throw DomainError("independent mode needs at least one profile");
  const std::size_t n = ds.num_bidders();
  const std::vector<double>& pts = grid.points();

  InterimCurves out;
  out.bidder_ids = ds.bidder_ids;
  out.grid = pts;
  out.mode = opt.mode;
  out.mc_profiles = opt.mode == ResamplingMode::kIndependent ? opt.mc_profiles : 0;
  out.seed = opt.seed;
  out.alloc.resize(n);
  out.pay.resize(n);

  const double samples = static_cast<double>(
      opt.mode == ResamplingMode::kJoint ? ds.size() : opt.mc_profiles);
  parallel_for(n, opt.threads, [&](std::size_t i) {
    CellSums sums = opt.mode == ResamplingMode::kJoint
                        ? joint_sums(ds, i, pts)
                        : independent_sums(ds, i, pts, opt);
    for (double& x : sums.alloc) x /= samples;
    for (double& p : sums.pay) p /= samples;
    out.alloc[i] = std::move(sums.alloc);
    out.pay[i] = std::move(sums.pay);
  });

  for (BidderIndex i = 0; i < n; ++i) {
    if (opt.mode == ResamplingMode::kJoint) {
      if (!non_decreasing(out.alloc[i]) || !non_decreasing(out.pay[i]))
        throw std::logic_error("joint-mode interim curve is not monotone");
      if (out.alloc[i].back() < max_allocation(ds, i) - kCapTolerance)
        throw BidCapTooLow(ds.bidder_ids[i]);
    } else {
      running_max(out.alloc[i]);
      running_max(out.pay[i]);
    }
  }

  const double p_min = min_reserve_ppc(ds);
  if (!(p_min > 0.0)) {
    out.warnings.push_back(
        "reserve is zero for some auction: price per click has no positive "
        "lower bound");
  }
  for (BidderIndex i = 0; i < n; ++i) {
    for (std::size_t g = 0; g < pts.size(); ++g) {
      const double x = out.alloc[i][g];
      if (x > 0.0 && out.pay[i][g] / x < p_min * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "bidder '" << ds.bidder_ids[i] << "' price per click below "
            << p_min << " at bid " << pts[g];
        out.warnings.push_back(msg.str());
        break;
      }
    }
  }
  return out;
}

std::vector<std::optional<double>> ppc_curve(const InterimCurves& curves,
                                             BidderIndex bidder) {
  const auto& x = curves.alloc.at(bidder);
  const auto& p = curves.pay.at(bidder);
  std::vector<std::optional<double>> out(x.size());
  for (std::size_t g = 0; g < x.size(); ++g)
    if (x[g] > 0.0) out[g] = p[g] / x[g];
  return out;
}

void write_curves_csv(const InterimCurves& curves, std::ostream& out) {
  out << "bidder_id,bid,alloc,pay\n";
  out.precision(17);
  for (BidderIndex i = 0; i < curves.num_bidders(); ++i)
    for (std::size_t g = 0; g < curves.grid.size(); ++g)
      out << curves.bidder_ids[i] << ',' << curves.grid[g] << ','
          << curves.alloc[i][g] << ',' << curves.pay[i][g] << '\n';
}

}  // namespace epoa
