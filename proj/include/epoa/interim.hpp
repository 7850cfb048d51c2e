#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "epoa/dataset.hpp"

namespace epoa {

// Strictly increasing bids starting at 0 and ending at the bid cap.
class BidGrid {
 public:
  explicit BidGrid(std::vector<double> points);

  // {0} plus `positive_points` geometrically spaced bids on
  // [cap * low_fraction, cap].
  static BidGrid geometric(double cap, std::size_t positive_points,
                           double low_fraction = 1e-3);
  static BidGrid uniform(double cap, std::size_t positive_points);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double cap() const { return points_.back(); }

 private:
  std::vector<double> points_;
};

enum class ResamplingMode {
  kJoint,        // each opponent profile keeps its own context
  kIndependent,  // opponents' bids and the context drawn independently
};

std::string mode_name(ResamplingMode mode);
std::optional<ResamplingMode> parse_mode(const std::string& name);

struct EstimationOptions {
  ResamplingMode mode = ResamplingMode::kJoint;
  std::size_t mc_profiles = 200;  // independent mode only
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Interim allocation and payment per bidder and grid bid.
struct InterimCurves {
  std::vector<std::string> bidder_ids;
  std::vector<double> grid;
  std::vector<std::vector<double>> alloc;  // [bidder][grid point]
  std::vector<std::vector<double>> pay;
  ResamplingMode mode = ResamplingMode::kJoint;
  std::size_t mc_profiles = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  std::size_t num_bidders() const { return alloc.size(); }
};

// Counterfactual simulation of every grid bid against the logged opponents.
// Results are independent of `threads`. Throws BidCapTooLow in joint mode when
// the top grid bid does not reach the maximum allocation.
InterimCurves estimate_curves(const AuctionDataset& ds, const BidGrid& grid,
                              const EstimationOptions& options = {});

// p(b) / x(b), empty where nothing is allocated.
std::vector<std::optional<double>> ppc_curve(const InterimCurves& curves,
                                             BidderIndex bidder);

// `bidder_id,bid,alloc,pay`
void write_curves_csv(const InterimCurves& curves, std::ostream& out);

}  // namespace epoa
