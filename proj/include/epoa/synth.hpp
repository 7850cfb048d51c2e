#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "epoa/dataset.hpp"

namespace epoa {

enum class SynthKind {
  kFpaBne,       // single-slot first price, symmetric equilibrium bids
  kGspLearning,  // fixed values, multiplicative-weights bidders
  kCorrelated,   // common-shock bids, no ground truth
};

struct SynthSpec {
  SynthKind kind = SynthKind::kFpaBne;
  std::size_t bidders = 2;
  std::size_t auctions = 1000;
  double value_max = 1.0;      // values uniform on [0, value_max]
  std::vector<double> values;  // fixed per-bidder values (learning)
  double quality_low = 1.0;    // qualities uniform on [low, high]
  double quality_high = 1.0;
  std::vector<double> slot_ctrs{1.0};
  double reserve = 0.0;
  std::optional<double> mainline_reserve;
  std::vector<SlotIndex> mainline_slots;
  double omega = 0.0;    // common-shock weight
  double bid_max = 1.0;  // correlated bids on [0, bid_max)
  std::size_t learner_grid = 21;
  std::optional<double> learning_rate;  // default sqrt(8 ln G / T)
  std::uint64_t seed = 0;
};

// Throws SpecError on unknown kinds, missing seed or invalid fields.
SynthSpec parse_synth_spec(const nlohmann::json& j);

struct GroundTruth {
  std::vector<std::vector<double>> values;  // [auction][bidder]
  std::vector<double> opt_welfare;
  std::vector<double> realized_welfare;
  double ratio = 1.0;  // mean realized / mean OPT
  // Learning runs: average per-round regret against the best fixed grid bid.
  std::vector<double> regret;
  double learning_rate = 0.0;
  double epsilon_regret = 0.0;  // sum of regrets / mean OPT
};

struct SynthResult {
  AuctionDataset dataset;
  std::optional<GroundTruth> truth;
};

SynthResult gen_fpa_bne(const SynthSpec& spec);
SynthResult gen_gsp_learning(const SynthSpec& spec);
AuctionDataset gen_correlated(const SynthSpec& spec);
SynthResult generate(const SynthSpec& spec);

nlohmann::json ground_truth_json(const GroundTruth& truth);

}  // namespace epoa
