#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "epoa/dataset.hpp"
#include "epoa/interim.hpp"

namespace epoa {

// Cheapest price per click needed for allocation at least z, as a
// non-decreasing step function, and its integral.
struct ThresholdCurve {
  BidderIndex bidder = 0;
  std::vector<double> breakpoints;  // 0 = z_0 < z_1 < ... < z_K
  std::vector<double> levels;       // tau on (z_{k-1}, z_k], size K
  std::vector<double> cumulative;   // integral up to z_k, size K + 1
  double max_alloc = 0.0;

  double tau(double z) const;
  // Integral of tau over [0, x]. The last level extends to max_alloc within
  // 1e-9; larger x throws OutOfRange.
  double integral(double x) const;
};

double threshold_integral(const ThresholdCurve& tc, double x);

// Lower monotone envelope of the grid price-per-click over achieved
// allocation levels. Throws NeverAllocated when no grid bid wins anything.
// In independent mode a top level short of `max_alloc` is extended to it.
ThresholdCurve build_threshold_curve(const InterimCurves& curves,
                                     BidderIndex bidder, double max_alloc);

// Mean over auctions of alpha_1 * gamma_i: the allocation from always holding
// the top slot.
double max_allocation(const AuctionDataset& ds, BidderIndex bidder);

// Mean over auctions of alpha_j * gamma_i; zero where slot j is absent.
double slot_allocation(const AuctionDataset& ds, BidderIndex bidder,
                       SlotIndex slot);

std::size_t max_slot_count(const AuctionDataset& ds);

struct ThresholdSet {
  std::vector<std::optional<ThresholdCurve>> curves;  // empty if excluded
  std::vector<double> max_alloc;
  std::vector<BidderIndex> excluded;  // never allocated

  // T_i(x), zero for excluded bidders.
  double integral(BidderIndex bidder, double x) const;
  // T_i(xbar_i) / xbar_i, zero for excluded bidders.
  double linearized_value(BidderIndex bidder) const;
};

ThresholdSet build_thresholds(const AuctionDataset& ds,
                              const InterimCurves& curves);

// `bidder_id,alloc,T` at every breakpoint and at max_alloc.
void write_thresholds_csv(const ThresholdSet& set,
                          const std::vector<std::string>& bidder_ids,
                          std::ostream& out);
// `bidder_id,slot,alloc,T` with alloc the mean allocation of slot j.
void write_slot_markers_csv(const AuctionDataset& ds, const ThresholdSet& set,
                            std::ostream& out);

}  // namespace epoa
