#include "epoa/covering.hpp"

#include <algorithm>

#include "epoa/errors.hpp"
#include "epoa/matching.hpp"

namespace epoa {

double revenue(const AuctionDataset& ds) {
  const double rev = realized_revenue(ds);
  if (!(rev > 0.0)) throw ZeroRevenue();
  return rev;
}

Tbar1Result tbar1(const AuctionDataset& ds, const ThresholdSet& thresholds) {
  const std::size_t n = ds.num_bidders();
  Tbar1Result out;
  out.linearized_values.resize(n);
  for (BidderIndex i = 0; i < n; ++i)
    out.linearized_values[i] = thresholds.linearized_value(i);

  out.assignments.reserve(ds.size());
  double total = 0.0;
  for (const AuctionRecord& r : ds.records) {
    OptAssignment a = opt_assignment(out.linearized_values, r.context);
    total += a.welfare;
    out.assignments.push_back(std::move(a.slot_to_bidder));
  }
  out.value = total / static_cast<double>(ds.size());
  return out;
}

TavgResult tavg(const AuctionDataset& ds, const ThresholdSet& thresholds) {
  const std::size_t n = ds.num_bidders();
  const std::size_t m = max_slot_count(ds);
  std::vector<std::vector<double>> w(n, std::vector<double>(m, 0.0));
  for (BidderIndex i = 0; i < n; ++i)
    for (SlotIndex j = 0; j < m; ++j)
      w[i][j] = thresholds.integral(
          i, std::min(slot_allocation(ds, i, j), thresholds.max_alloc[i]));

  const Matching match = max_weight_matching(w);
  return {match.weight, match.row_to_col};
}

std::vector<double> marginal_allocation(
    const AuctionDataset& ds,
    const std::vector<std::vector<std::optional<BidderIndex>>>& assignments) {
  std::vector<double> x(ds.num_bidders(), 0.0);
  for (std::size_t t = 0; t < ds.size(); ++t) {
    const AuctionContext& ctx = ds.records[t].context;
    const auto& slots = assignments.at(t);
    for (SlotIndex j = 0; j < slots.size(); ++j)
      if (slots[j]) x[*slots[j]] += ctx.slot_ctrs[j] * ctx.qualities[*slots[j]];
  }
  for (double& xi : x) xi /= static_cast<double>(ds.size());
  return x;
}

double lb_t(const AuctionDataset& ds, const ThresholdSet& thresholds,
            const Tbar1Result& upper) {
  const std::vector<double> x = marginal_allocation(ds, upper.assignments);
  double total = 0.0;
  for (BidderIndex i = 0; i < x.size(); ++i)
    total += thresholds.integral(i, std::min(x[i], thresholds.max_alloc[i]));
  return total;
}

CoveringResult compute_covering(const AuctionDataset& ds,
                                const ThresholdSet& thresholds) {
  CoveringResult out;
  out.revenue = revenue(ds);
  out.upper = tbar1(ds, thresholds);
  out.fixed = tavg(ds, thresholds);
  out.tbar1 = out.upper.value;
  out.tavg = out.fixed.value;
  out.lb_t = lb_t(ds, thresholds, out.upper);
  out.mu1 = out.tbar1 / out.revenue;
  out.mu_avg = out.tavg / out.revenue;
  out.mu_lb = out.lb_t / out.revenue;
  return out;
}

}  // namespace epoa
