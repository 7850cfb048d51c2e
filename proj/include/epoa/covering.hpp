#pragma once

#include <optional>
#include <vector>

#include "epoa/dataset.hpp"
#include "epoa/thresholds.hpp"

namespace epoa {

// Average realized revenue per auction. Throws ZeroRevenue when it is zero.
double revenue(const AuctionDataset& ds);

struct Tbar1Result {
  double value = 0.0;
  std::vector<double> linearized_values;  // T_i(xbar_i) / xbar_i
  // Greedy slot assignment per auction under the linearized values.
  std::vector<std::vector<std::optional<BidderIndex>>> assignments;
};

// Upper bound on the maximum total threshold: per auction, the welfare-optimal
// assignment for per-click values T_i(xbar_i) / xbar_i. Reserves and mainline
// rules are not feasibility constraints here.
Tbar1Result tbar1(const AuctionDataset& ds, const ThresholdSet& thresholds);

struct TavgResult {
  double value = 0.0;
  std::vector<std::optional<SlotIndex>> bidder_to_slot;
};

// Best context-independent assignment: max-weight matching with weights
// T_i(mean allocation of slot j).
TavgResult tavg(const AuctionDataset& ds, const ThresholdSet& thresholds);

// Thresholds evaluated at the marginal allocation of the tbar1 policy.
double lb_t(const AuctionDataset& ds, const ThresholdSet& thresholds,
            const Tbar1Result& upper);

// Marginal allocation of a per-auction assignment policy.
std::vector<double> marginal_allocation(
    const AuctionDataset& ds,
    const std::vector<std::vector<std::optional<BidderIndex>>>& assignments);

struct CoveringResult {
  double revenue = 0.0;
  double tbar1 = 0.0;
  double tavg = 0.0;
  double lb_t = 0.0;
  double mu1 = 0.0;     // tbar1 / revenue
  double mu_avg = 0.0;  // tavg / revenue
  double mu_lb = 0.0;   // lb_t / revenue
  Tbar1Result upper;
  TavgResult fixed;
};

CoveringResult compute_covering(const AuctionDataset& ds,
                                const ThresholdSet& thresholds);

}  // namespace epoa
