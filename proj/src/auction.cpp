#include "epoa/auction.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "epoa/errors.hpp"

namespace epoa {
namespace {

// Lowest free slot this bidder may take. Mainline slots require the mainline
// reserve and a free unit of mainline capacity.
std::optional<SlotIndex> place(const std::vector<bool>& taken,
                               const std::vector<bool>& mainline,
                               std::size_t mainline_filled,
                               std::size_t mainline_cap,
                               bool meets_mainline_reserve) {
  for (SlotIndex j = 0; j < taken.size(); ++j) {
    if (taken[j]) continue;
    if (mainline[j]) {
      if (meets_mainline_reserve && mainline_filled < mainline_cap) return j;
      continue;
    }
    return j;
  }
  return std::nullopt;
}

std::vector<bool> mainline_mask(const AuctionContext& ctx) {
  std::vector<bool> mask(ctx.num_slots(), false);
  for (SlotIndex j : ctx.mainline_slots) mask[j] = true;
  return mask;
}

double gsp_ppc(double next_rank_score, double score, double reserve,
               double mainline_reserve, bool in_mainline) {
  double floor = std::max(next_rank_score, reserve);
  if (in_mainline) floor = std::max(floor, mainline_reserve);
  return floor / score;
}

}  // namespace

bool AuctionContext::is_mainline(SlotIndex slot) const {
  return std::find(mainline_slots.begin(), mainline_slots.end(), slot) !=
         mainline_slots.end();
}

void validate(const AuctionContext& ctx, std::optional<std::size_t> num_bids) {
  auto fail = [](const std::string& why) { throw MalformedContext(why); };
  const std::size_t n = ctx.num_bidders();
  if (ctx.qualities.size() != n) fail("qualities and scores differ in length");
  if (num_bids && *num_bids != n) fail("bid count differs from bidder count");
  for (double s : ctx.scores)
    if (!(s > 0.0)) fail("scores must be positive");
  for (double g : ctx.qualities)
    if (!(g >= 0.0 && g <= 1.0)) fail("qualities must lie in [0, 1]");
  for (std::size_t j = 0; j < ctx.slot_ctrs.size(); ++j) {
    if (!(ctx.slot_ctrs[j] >= 0.0)) fail("slot ctrs must be non-negative");
    if (j > 0 && ctx.slot_ctrs[j] > ctx.slot_ctrs[j - 1])
      fail("slot ctrs must be non-increasing");
  }
  if (!(ctx.reserve >= 0.0)) fail("reserve must be non-negative");
  if (!(ctx.mainline_reserve >= ctx.reserve))
    fail("mainline reserve must be at least the reserve");
  if (ctx.mainline_slots.size() > ctx.num_slots())
    fail("more mainline slots than slots");
  std::vector<bool> seen(ctx.num_slots(), false);
  for (SlotIndex j : ctx.mainline_slots) {
    if (j >= ctx.num_slots()) fail("mainline slot index out of range");
    if (seen[j]) fail("duplicate mainline slot");
    seen[j] = true;
  }
}

std::vector<BidderIndex> rank_bidders(std::span<const double> bids,
                                      const AuctionContext& ctx) {
  std::vector<BidderIndex> ranked;
  ranked.reserve(bids.size());
  for (BidderIndex i = 0; i < bids.size(); ++i)
    if (ctx.scores[i] * bids[i] >= ctx.reserve) ranked.push_back(i);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](BidderIndex a, BidderIndex b) {
                     return ctx.scores[a] * bids[a] > ctx.scores[b] * bids[b];
                   });
  return ranked;
}

AuctionOutcome run_gsp(std::span<const double> bids, const AuctionContext& ctx) {
  validate(ctx, bids.size());
  const std::size_t n = ctx.num_bidders();
  const std::size_t m = ctx.num_slots();

  AuctionOutcome out;
  out.slot_to_bidder.assign(m, std::nullopt);
  out.position.assign(n, std::nullopt);
  out.allocation.assign(n, 0.0);
  out.ppc.assign(n, 0.0);
  out.payment.assign(n, 0.0);

  const std::vector<bool> mainline = mainline_mask(ctx);
  std::vector<bool> taken(m, false);
  std::size_t mainline_filled = 0;

  const std::vector<BidderIndex> ranked = rank_bidders(bids, ctx);
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const BidderIndex i = ranked[k];
    const double rank_score = ctx.scores[i] * bids[i];
    const auto slot = place(taken, mainline, mainline_filled, ctx.mainline_cap,
                            rank_score >= ctx.mainline_reserve);
    if (!slot) continue;
    taken[*slot] = true;
    if (mainline[*slot]) ++mainline_filled;

    const double next =
        k + 1 < ranked.size() ? ctx.scores[ranked[k + 1]] * bids[ranked[k + 1]]
                              : 0.0;
    out.slot_to_bidder[*slot] = i;
    out.position[i] = *slot;
    out.allocation[i] = ctx.slot_ctrs[*slot] * ctx.qualities[i];
    out.ppc[i] = ctx.pricing == Pricing::kFirstPrice
                     ? bids[i]
                     : gsp_ppc(next, ctx.scores[i], ctx.reserve,
                               ctx.mainline_reserve, mainline[*slot]);
    out.payment[i] = out.ppc[i] * out.allocation[i];
  }
  return out;
}

OptAssignment opt_assignment(std::span<const double> values,
                             const AuctionContext& ctx) {
  const std::size_t n = values.size();
  std::vector<BidderIndex> order(n);
  std::iota(order.begin(), order.end(), BidderIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](BidderIndex a, BidderIndex b) {
    return ctx.qualities[a] * values[a] > ctx.qualities[b] * values[b];
  });

  OptAssignment out;
  out.slot_to_bidder.assign(ctx.num_slots(), std::nullopt);
  const std::size_t filled = std::min(n, ctx.num_slots());
  for (SlotIndex j = 0; j < filled; ++j) {
    const BidderIndex i = order[j];
    out.slot_to_bidder[j] = i;
    out.welfare += ctx.slot_ctrs[j] * ctx.qualities[i] * values[i];
  }
  return out;
}

CounterfactualAuction::CounterfactualAuction(BidderIndex bidder,
                                             std::span<const double> bids,
                                             const AuctionContext& ctx)
    : bidder_(bidder),
      score_(ctx.scores.at(bidder)),
      quality_(ctx.qualities.at(bidder)),
      reserve_(ctx.reserve),
      mainline_reserve_(ctx.mainline_reserve),
      pricing_(ctx.pricing),
      slot_ctrs_(ctx.slot_ctrs),
      mainline_(mainline_mask(ctx)) {
  validate(ctx, bids.size());
  for (BidderIndex j = 0; j < bids.size(); ++j) {
    if (j == bidder) continue;
    const double q = ctx.scores[j] * bids[j];
    if (q >= ctx.reserve) ranked_.push_back({q, j});
  }
  std::stable_sort(ranked_.begin(), ranked_.end(),
                   [](const Opponent& a, const Opponent& b) {
                     return a.rank_score > b.rank_score;
                   });

  // Opponents ranked above the bidder are placed exactly as in run_gsp; their
  // placement does not depend on anyone ranked below them.
  std::vector<bool> taken(slot_ctrs_.size(), false);
  std::size_t mainline_filled = 0;
  placements_.reserve(ranked_.size() + 1);
  for (std::size_t k = 0; k <= ranked_.size(); ++k) {
    placements_.push_back(
        {place(taken, mainline_, mainline_filled, ctx.mainline_cap, true),
         place(taken, mainline_, mainline_filled, ctx.mainline_cap, false)});
    if (k == ranked_.size()) break;
    const auto slot =
        place(taken, mainline_, mainline_filled, ctx.mainline_cap,
              ranked_[k].rank_score >= ctx.mainline_reserve);
    if (slot) {
      taken[*slot] = true;
      if (mainline_[*slot]) ++mainline_filled;
    }
  }
}

CounterfactualAuction::Result CounterfactualAuction::evaluate(double bid) const {
  const double own = score_ * bid;
  if (!(own >= reserve_)) return {};
  // Insertion rank: opponents strictly ahead, or tied with a lower index.
  const auto it = std::partition_point(
      ranked_.begin(), ranked_.end(), [&](const Opponent& o) {
        return o.rank_score > own || (o.rank_score == own && o.index < bidder_);
      });
  const std::size_t k = static_cast<std::size_t>(it - ranked_.begin());
  const Placement& pl = placements_[k];
  const auto slot = own >= mainline_reserve_ ? pl.eligible_slot : pl.ineligible_slot;
  if (!slot) return {};

  const double allocation = slot_ctrs_[*slot] * quality_;
  const double next = k < ranked_.size() ? ranked_[k].rank_score : 0.0;
  const double ppc = pricing_ == Pricing::kFirstPrice
                         ? bid
                         : gsp_ppc(next, score_, reserve_, mainline_reserve_,
                                   mainline_[*slot]);
  return {allocation, ppc * allocation};
}

}  // namespace epoa
