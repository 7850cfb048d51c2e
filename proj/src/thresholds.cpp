#include "epoa/thresholds.hpp"

#include <algorithm>
#include <ostream>
#include <utility>

#include "epoa/errors.hpp"

namespace epoa {
namespace {
constexpr double kAllocTolerance = 1e-9;
}

double ThresholdCurve::tau(double z) const {
  const auto it = std::lower_bound(breakpoints.begin() + 1, breakpoints.end(), z);
  if (it == breakpoints.end()) return levels.back();
  return levels[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

double ThresholdCurve::integral(double x) const {
  const double top = std::max(max_alloc, breakpoints.back());
  if (x < -kAllocTolerance || x > top + kAllocTolerance)
    throw OutOfRange("allocation outside [0, max allocation]");
  x = std::max(x, 0.0);
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  if (k >= levels.size())
    return cumulative.back() + (x - breakpoints.back()) * levels.back();
  return cumulative[k] + (x - breakpoints[k]) * levels[k];
}

double threshold_integral(const ThresholdCurve& tc, double x) {
  return tc.integral(x);
}

ThresholdCurve build_threshold_curve(const InterimCurves& curves,
                                     BidderIndex bidder, double max_alloc) {
  const auto& x = curves.alloc.at(bidder);
  const auto& p = curves.pay.at(bidder);

  std::vector<std::pair<double, double>> points;  // (allocation, ppc)
  for (std::size_t g = 0; g < x.size(); ++g)
    if (x[g] > 0.0) points.emplace_back(x[g], p[g] / x[g]);
  if (points.empty()) throw NeverAllocated(curves.bidder_ids.at(bidder));
  std::sort(points.begin(), points.end());

  // Distinct allocation levels with their cheapest ppc.
  std::vector<std::pair<double, double>> levels;
  for (const auto& [alloc, ppc] : points) {
    if (!levels.empty() && levels.back().first == alloc)
      levels.back().second = std::min(levels.back().second, ppc);
    else
      levels.emplace_back(alloc, ppc);
  }
  // tau on (L_{k-1}, L_k] is the cheapest ppc among levels reaching L_k.
  for (std::size_t k = levels.size() - 1; k-- > 0;)
    levels[k].second = std::min(levels[k].second, levels[k + 1].second);

  ThresholdCurve tc;
  tc.bidder = bidder;
  tc.max_alloc = max_alloc;
  tc.breakpoints.push_back(0.0);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const bool merges = k + 1 < levels.size() &&
                        levels[k + 1].second == levels[k].second;
    if (merges) continue;
    tc.breakpoints.push_back(levels[k].first);
    tc.levels.push_back(levels[k].second);
  }

  if (tc.breakpoints.back() < max_alloc - kAllocTolerance) {
    if (curves.mode == ResamplingMode::kJoint)
      throw BidCapTooLow(curves.bidder_ids.at(bidder));
    tc.breakpoints.push_back(max_alloc);
    tc.levels.push_back(tc.levels.back());
  }

  tc.cumulative.assign(tc.levels.size() + 1, 0.0);
  for (std::size_t k = 0; k < tc.levels.size(); ++k)
    tc.cumulative[k + 1] =
        tc.cumulative[k] +
        (tc.breakpoints[k + 1] - tc.breakpoints[k]) * tc.levels[k];
  return tc;
}

double slot_allocation(const AuctionDataset& ds, BidderIndex bidder,
                       SlotIndex slot) {
  double sum = 0.0;
  for (const AuctionRecord& r : ds.records)
    if (slot < r.context.num_slots())
      sum += r.context.slot_ctrs[slot] * r.context.qualities[bidder];
  return sum / static_cast<double>(ds.size());
}

double max_allocation(const AuctionDataset& ds, BidderIndex bidder) {
  return slot_allocation(ds, bidder, 0);
}

std::size_t max_slot_count(const AuctionDataset& ds) {
  std::size_t m = 0;
  for (const AuctionRecord& r : ds.records) m = std::max(m, r.context.num_slots());
  return m;
}

double ThresholdSet::integral(BidderIndex bidder, double x) const {
  const auto& c = curves.at(bidder);
  return c ? c->integral(x) : 0.0;
}

double ThresholdSet::linearized_value(BidderIndex bidder) const {
  const auto& c = curves.at(bidder);
  if (!c || !(max_alloc[bidder] > 0.0)) return 0.0;
  return c->integral(max_alloc[bidder]) / max_alloc[bidder];
}

ThresholdSet build_thresholds(const AuctionDataset& ds,
                              const InterimCurves& curves) {
  ThresholdSet set;
  const std::size_t n = curves.num_bidders();
  set.curves.resize(n);
  set.max_alloc.resize(n);
  for (BidderIndex i = 0; i < n; ++i) {
    set.max_alloc[i] = max_allocation(ds, i);
    try {
      set.curves[i] = build_threshold_curve(curves, i, set.max_alloc[i]);
    } catch (const NeverAllocated&) {
      set.excluded.push_back(i);
    }
  }
  return set;
}

void write_thresholds_csv(const ThresholdSet& set,
                          const std::vector<std::string>& bidder_ids,
                          std::ostream& out) {
  out << "bidder_id,alloc,T\n";
  out.precision(17);
  for (BidderIndex i = 0; i < set.curves.size(); ++i) {
    const auto& c = set.curves[i];
    if (!c) continue;
    for (std::size_t k = 0; k < c->breakpoints.size(); ++k)
      out << bidder_ids[i] << ',' << c->breakpoints[k] << ','
          << c->cumulative[k] << '\n';
    if (c->breakpoints.back() < set.max_alloc[i])
      out << bidder_ids[i] << ',' << set.max_alloc[i] << ','
          << c->integral(set.max_alloc[i]) << '\n';
  }
}

void write_slot_markers_csv(const AuctionDataset& ds, const ThresholdSet& set,
                            std::ostream& out) {
  out << "bidder_id,slot,alloc,T\n";
  out.precision(17);
  const std::size_t m = max_slot_count(ds);
  for (BidderIndex i = 0; i < set.curves.size(); ++i) {
    if (!set.curves[i]) continue;
    for (SlotIndex j = 0; j < m; ++j) {
      const double x = std::min(slot_allocation(ds, i, j), set.max_alloc[i]);
      out << ds.bidder_ids[i] << ',' << j + 1 << ',' << x << ','
          << set.integral(i, x) << '\n';
    }
  }
}

}  // namespace epoa
