#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace epoa {

using BidderIndex = std::size_t;
using SlotIndex = std::size_t;

enum class Pricing {
  kGeneralizedSecondPrice,
  kFirstPrice,  // winner pays own bid per click
};

// Per-auction parameters: rank scores, click qualities, slot click-through
// multipliers and reserve rules.
struct AuctionContext {
  std::vector<double> scores;     // s_i > 0
  std::vector<double> qualities;  // gamma_i in [0, 1]
  std::vector<double> slot_ctrs;  // alpha_1 >= alpha_2 >= ... >= 0
  double reserve = 0.0;           // on rank score s_i * b_i
  double mainline_reserve = 0.0;  // >= reserve
  std::vector<SlotIndex> mainline_slots;
  std::size_t mainline_cap = 0;
  Pricing pricing = Pricing::kGeneralizedSecondPrice;

  std::size_t num_bidders() const { return scores.size(); }
  std::size_t num_slots() const { return slot_ctrs.size(); }
  bool is_mainline(SlotIndex slot) const;

  friend bool operator==(const AuctionContext&, const AuctionContext&) = default;
};

// Throws MalformedContext when an invariant fails. `num_bids` is checked
// against the bidder count when given.
void validate(const AuctionContext& ctx,
              std::optional<std::size_t> num_bids = std::nullopt);

struct AuctionOutcome {
  std::vector<std::optional<BidderIndex>> slot_to_bidder;
  std::vector<std::optional<SlotIndex>> position;  // per bidder
  std::vector<double> allocation;                  // alpha_pos * gamma_i
  std::vector<double> ppc;                         // price per click
  std::vector<double> payment;                     // ppc * allocation
};

// Bidders with s_i * b_i >= reserve, by rank score descending; ties go to the
// lower bidder index.
std::vector<BidderIndex> rank_bidders(std::span<const double> bids,
                                      const AuctionContext& ctx);

// Runs the position auction on one bid profile. Under first-price pricing the
// ranking and placement rules are unchanged and each winner pays its own bid.
AuctionOutcome run_gsp(std::span<const double> bids, const AuctionContext& ctx);

struct OptAssignment {
  std::vector<std::optional<BidderIndex>> slot_to_bidder;
  double welfare = 0.0;
};

// Welfare-maximizing slot assignment for per-click values, ignoring reserves
// and mainline rules. Greedy by gamma_i * v_i is exact for sorted alphas.
OptAssignment opt_assignment(std::span<const double> values,
                             const AuctionContext& ctx);

// Outcome for one bidder as its own bid varies, opponents held fixed.
// Precomputes the slot state for every insertion rank so that each query is a
// binary search. Agrees exactly with run_gsp.
class CounterfactualAuction {
 public:
  CounterfactualAuction(BidderIndex bidder, std::span<const double> bids,
                        const AuctionContext& ctx);

  struct Result {
    double allocation = 0.0;
    double payment = 0.0;
  };
  Result evaluate(double bid) const;

 private:
  struct Opponent {
    double rank_score;
    BidderIndex index;
  };
  struct Placement {
    std::optional<SlotIndex> eligible_slot;    // own score >= mainline reserve
    std::optional<SlotIndex> ineligible_slot;  // own score below it
  };

  BidderIndex bidder_;
  double score_;
  double quality_;
  double reserve_;
  double mainline_reserve_;
  Pricing pricing_;
  std::vector<double> slot_ctrs_;
  std::vector<bool> mainline_;
  std::vector<Opponent> ranked_;       // eligible opponents, rank order
  std::vector<Placement> placements_;  // indexed by insertion rank
};

}  // namespace epoa
