#pragma once

// Brute-force reference implementations used only by tests. They share no
// code with the library beyond the plain data types.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <tuple>
#include <vector>

#include "epoa/auction.hpp"

namespace oracle {

struct Outcome {
  std::vector<double> alloc, ppc, pay;
};

// Ranking by (-score, index) tuples, explicit slot walk, pricing from the
// next tuple in the list.
inline Outcome gsp(const std::vector<double>& bids, const epoa::AuctionContext& c) {
  const std::size_t n = bids.size(), m = c.slot_ctrs.size();
  std::vector<std::tuple<double, std::size_t>> order;
  for (std::size_t i = 0; i < n; ++i) {
    double q = c.scores[i] * bids[i];
    if (q >= c.reserve) order.emplace_back(-q, i);
  }
  std::sort(order.begin(), order.end());
  Outcome o{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
            std::vector<double>(n, 0.0)};
  std::vector<int> used(m, 0);
  std::size_t main_used = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::size_t i = std::get<1>(order[k]);
    double q = -std::get<0>(order[k]);
    int slot = -1;
    for (std::size_t j = 0; j < m && slot < 0; ++j) {
      if (used[j]) continue;
      bool ml = std::count(c.mainline_slots.begin(), c.mainline_slots.end(), j) > 0;
      if (ml && !(q >= c.mainline_reserve && main_used < c.mainline_cap)) continue;
      slot = static_cast<int>(j);
    }
    if (slot < 0) continue;
    used[slot] = 1;
    bool ml = std::count(c.mainline_slots.begin(), c.mainline_slots.end(),
                         static_cast<std::size_t>(slot)) > 0;
    if (ml) ++main_used;
    double next = k + 1 < order.size() ? -std::get<0>(order[k + 1]) : 0.0;
    double price_floor = std::max(next, c.reserve);
    if (ml) price_floor = std::max(price_floor, c.mainline_reserve);
    o.alloc[i] = c.slot_ctrs[slot] * c.qualities[i];
    o.ppc[i] = c.pricing == epoa::Pricing::kFirstPrice ? bids[i]
                                                       : price_floor / c.scores[i];
    o.pay[i] = o.ppc[i] * o.alloc[i];
  }
  return o;
}

// Calls fn(assign) for every injective partial map slot -> bidder that fills
// min(n, m) slots (assign[j] = bidder or -1).
inline void for_each_assignment(std::size_t n, std::size_t m,
                                const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> assign(m, -1);
  std::vector<bool> taken(n, false);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == m) {
      fn(assign);
      return;
    }
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      any = true;
      taken[i] = true;
      assign[j] = static_cast<int>(i);
      rec(j + 1);
      taken[i] = false;
    }
    if (!any) {
      assign[j] = -1;
      rec(j + 1);
    }
  };
  rec(0);
}

inline double max_welfare(const std::vector<double>& values,
                          const epoa::AuctionContext& c) {
  double best = 0.0;
  for_each_assignment(values.size(), c.slot_ctrs.size(), [&](const std::vector<int>& a) {
    double w = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[j] >= 0) w += c.slot_ctrs[j] * c.qualities[a[j]] * values[a[j]];
    best = std::max(best, w);
  });
  return best;
}

// Max over all row->column injections (rows may stay unmatched).
inline double max_matching(const std::vector<std::vector<double>>& w) {
  const std::size_t rows = w.size(), cols = rows ? w[0].size() : 0;
  double best = 0.0;
  std::vector<bool> used(cols, false);
  std::function<void(std::size_t, double)> rec = [&](std::size_t r, double acc) {
    if (r == rows) {
      best = std::max(best, acc);
      return;
    }
    rec(r + 1, acc);
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = true;
      rec(r + 1, acc + w[r][c]);
      used[c] = false;
    }
  };
  rec(0, 0.0);
  return best;
}

inline epoa::AuctionContext random_context(std::mt19937_64& rng, std::size_t n,
                                           std::size_t m, bool reserves = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  epoa::AuctionContext c;
  for (std::size_t i = 0; i < n; ++i) {
    c.scores.push_back(0.2 + u(rng));
    c.qualities.push_back(u(rng));
  }
  for (std::size_t j = 0; j < m; ++j) c.slot_ctrs.push_back(u(rng));
  std::sort(c.slot_ctrs.rbegin(), c.slot_ctrs.rend());
  if (reserves) {
    c.reserve = 0.3 * u(rng);
    c.mainline_reserve = c.reserve + 0.3 * u(rng);
    std::size_t main = std::uniform_int_distribution<std::size_t>(0, m)(rng);
    for (std::size_t j = 0; j < main; ++j) c.mainline_slots.push_back(j);
    c.mainline_cap = main ? std::uniform_int_distribution<std::size_t>(0, main)(rng) : 0;
  }
  return c;
}

}  // namespace oracle
