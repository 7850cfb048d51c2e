#include "epoa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "epoa/errors.hpp"

namespace epoa {
namespace {

using nlohmann::json;

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

std::vector<std::string> roster(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("b" + std::to_string(i));
  return ids;
}

AuctionContext base_context(const SynthSpec& spec, Pricing pricing) {
  AuctionContext ctx;
  ctx.scores.assign(spec.bidders, 1.0);
  ctx.qualities.assign(spec.bidders, 1.0);
  ctx.slot_ctrs = spec.slot_ctrs;
  ctx.reserve = spec.reserve;
  ctx.mainline_reserve = spec.mainline_reserve.value_or(spec.reserve);
  ctx.mainline_slots = spec.mainline_slots;
  ctx.mainline_cap = spec.mainline_slots.size();
  ctx.pricing = pricing;
  return ctx;
}

void draw_qualities(const SynthSpec& spec, std::mt19937_64& rng,
                    AuctionContext& ctx) {
  if (spec.quality_low == spec.quality_high) {
    std::fill(ctx.qualities.begin(), ctx.qualities.end(), spec.quality_low);
    return;
  }
  std::uniform_real_distribution<double> q(spec.quality_low, spec.quality_high);
  for (double& g : ctx.qualities) g = q(rng);
}

void check_common(const SynthSpec& spec) {
  if (spec.bidders < 1) throw SpecError("need at least one bidder");
  if (spec.auctions < 1) throw SpecError("need at least one auction");
  if (!(spec.quality_low >= 0.0 && spec.quality_high <= 1.0 &&
        spec.quality_low <= spec.quality_high))
    throw SpecError("quality range must lie in [0, 1]");
  if (spec.slot_ctrs.empty()) throw SpecError("need at least one slot");
  try {
    validate(base_context(spec, Pricing::kGeneralizedSecondPrice));
  } catch (const MalformedContext& e) {
    throw SpecError(e.what());
  }
}

void finish_truth(GroundTruth& truth) {
  double opt = 0.0, realized = 0.0;
  for (std::size_t t = 0; t < truth.opt_welfare.size(); ++t) {
    opt += truth.opt_welfare[t];
    realized += truth.realized_welfare[t];
  }
  truth.ratio = opt > 0.0 ? realized / opt : 1.0;
}

double welfare(const AuctionOutcome& o, const std::vector<double>& values) {
  double w = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) w += values[i] * o.allocation[i];
  return w;
}

}  // namespace

SynthSpec parse_synth_spec(const json& j) {
  SynthSpec s;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "fpa_bne") s.kind = SynthKind::kFpaBne;
    else if (kind == "gsp_learning") s.kind = SynthKind::kGspLearning;
    else if (kind == "correlated") s.kind = SynthKind::kCorrelated;
    else throw SpecError("unknown generator kind '" + kind + "'");
    if (!j.contains("seed")) throw SpecError("seed is mandatory");
    s.seed = j.at("seed").get<std::uint64_t>();
    s.bidders = j.value("bidders", s.bidders);
    s.auctions = j.value("auctions", s.auctions);
    s.value_max = j.value("value_max", s.value_max);
    s.values = j.value("values", s.values);
    s.quality_low = j.value("quality_low", s.quality_low);
    s.quality_high = j.value("quality_high", s.quality_high);
    s.slot_ctrs = j.value("alphas", s.slot_ctrs);
    s.reserve = j.value("reserve", s.reserve);
    if (j.contains("mainline_reserve"))
      s.mainline_reserve = j.at("mainline_reserve").get<double>();
    s.mainline_slots = j.value("mainline_slots", s.mainline_slots);
    s.omega = j.value("omega", s.omega);
    s.bid_max = j.value("bid_max", s.bid_max);
    s.learner_grid = j.value("learner_grid", s.learner_grid);
    if (j.contains("learning_rate"))
      s.learning_rate = j.at("learning_rate").get<double>();
  } catch (const json::exception& e) {
    throw SpecError(e.what());
  }
  if (s.bidders < 1 || s.auctions < 1) throw SpecError("bidders and auctions must be >= 1");
  return s;
}

SynthResult gen_fpa_bne(const SynthSpec& spec) {
  check_common(spec);
  if (spec.slot_ctrs.size() != 1)
    throw SpecError("first-price equilibrium generator is single-slot");
  if (!(spec.value_max > 0.0)) throw SpecError("value_max must be positive");
  auto rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> value(0.0, spec.value_max);
  const double shade = static_cast<double>(spec.bidders - 1) /
                       static_cast<double>(spec.bidders);

  SynthResult out;
  AuctionDataset& ds = out.dataset;
  ds.bidder_ids = roster(spec.bidders);
  ds.bid_cap = spec.value_max;
  ds.value_cap = spec.value_max;
  GroundTruth truth;

  for (std::size_t t = 0; t < spec.auctions; ++t) {
    AuctionRecord r;
    r.auction_id = "a" + std::to_string(t);
    r.context = base_context(spec, Pricing::kFirstPrice);
    draw_qualities(spec, rng, r.context);
    std::vector<double> v(spec.bidders);
    for (double& vi : v) vi = value(rng);
    r.bids.resize(spec.bidders);
    for (std::size_t i = 0; i < spec.bidders; ++i) r.bids[i] = v[i] * shade;

    truth.opt_welfare.push_back(opt_assignment(v, r.context).welfare);
    truth.realized_welfare.push_back(welfare(run_gsp(r.bids, r.context), v));
    truth.values.push_back(std::move(v));
    ds.records.push_back(std::move(r));
  }
  validate_dataset(ds);
  finish_truth(truth);
  out.truth = std::move(truth);
  return out;
}

SynthResult gen_gsp_learning(const SynthSpec& spec) {
  check_common(spec);
  if (spec.learner_grid < 2) throw SpecError("learner grid needs >= 2 points");
  if (!spec.values.empty() && spec.values.size() != spec.bidders)
    throw SpecError("values must list one value per bidder");
  auto rng = make_rng(spec.seed);
  const std::size_t n = spec.bidders;
  const std::size_t G = spec.learner_grid;
  const double T = static_cast<double>(spec.auctions);

  std::vector<double> values = spec.values;
  if (values.empty()) {
    std::uniform_real_distribution<double> value(0.0, spec.value_max);
    for (std::size_t i = 0; i < n; ++i) values.push_back(value(rng));
  }
  for (double v : values)
    if (!(v > 0.0)) throw SpecError("values must be positive");
  const double value_cap = std::max(
      spec.value_max, *std::max_element(values.begin(), values.end()));

  // Bids on [0, v_i]: overbidding is weakly dominated.
  std::vector<std::vector<double>> grids(n, std::vector<double>(G));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t g = 0; g < G; ++g)
      grids[i][g] = values[i] * static_cast<double>(g) / static_cast<double>(G - 1);

  const double eta =
      spec.learning_rate.value_or(std::sqrt(8.0 * std::log(static_cast<double>(G)) / T));
  const double top_ctr = spec.slot_ctrs.front();
  std::vector<std::vector<double>> log_w(n, std::vector<double>(G, 0.0));
  std::vector<std::vector<double>> cum_utility(n, std::vector<double>(G, 0.0));
  std::vector<double> realized_utility(n, 0.0);

  SynthResult out;
  AuctionDataset& ds = out.dataset;
  ds.bidder_ids = roster(n);
  ds.value_cap = value_cap;
  GroundTruth truth;
  truth.learning_rate = eta;

  std::vector<double> probs(G);
  std::vector<std::size_t> chosen(n);
  for (std::size_t t = 0; t < spec.auctions; ++t) {
    AuctionRecord r;
    r.auction_id = "a" + std::to_string(t);
    r.context = base_context(spec, Pricing::kGeneralizedSecondPrice);
    draw_qualities(spec, rng, r.context);
    r.bids.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double top = *std::max_element(log_w[i].begin(), log_w[i].end());
      for (std::size_t g = 0; g < G; ++g) probs[g] = std::exp(log_w[i][g] - top);
      std::discrete_distribution<std::size_t> play(probs.begin(), probs.end());
      chosen[i] = play(rng);
      r.bids[i] = grids[i][chosen[i]];
    }

    // Full-information feedback: utility of every grid bid against this
    // round's opponents and context.
    for (std::size_t i = 0; i < n; ++i) {
      const CounterfactualAuction cf(i, r.bids, r.context);
      const double scale = top_ctr * values[i];
      for (std::size_t g = 0; g < G; ++g) {
        const auto res = cf.evaluate(grids[i][g]);
        const double u = values[i] * res.allocation - res.payment;
        cum_utility[i][g] += u;
        if (g == chosen[i]) realized_utility[i] += u;
        if (scale > 0.0) log_w[i][g] += eta * u / scale;
      }
    }

    truth.opt_welfare.push_back(opt_assignment(values, r.context).welfare);
    truth.realized_welfare.push_back(welfare(run_gsp(r.bids, r.context), values));
    truth.values.push_back(values);
    ds.records.push_back(std::move(r));
  }

  truth.regret.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double best = *std::max_element(cum_utility[i].begin(), cum_utility[i].end());
    truth.regret[i] = std::max(0.0, best - realized_utility[i]) / T;
  }
  validate_dataset(ds);
  finish_truth(truth);
  double opt_mean = 0.0;
  for (double w : truth.opt_welfare) opt_mean += w;
  opt_mean /= T;
  double regret_sum = 0.0;
  for (double reg : truth.regret) regret_sum += reg;
  truth.epsilon_regret = opt_mean > 0.0 ? regret_sum / opt_mean : 0.0;
  out.truth = std::move(truth);
  return out;
}

AuctionDataset gen_correlated(const SynthSpec& spec) {
  check_common(spec);
  if (!(spec.omega >= 0.0 && spec.omega <= 1.0))
    throw SpecError("omega must lie in [0, 1]");
  if (!(spec.bid_max > 0.0)) throw SpecError("bid_max must be positive");
  auto rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> draw(0.0, spec.bid_max);

  AuctionDataset ds;
  ds.bidder_ids = roster(spec.bidders);
  ds.bid_cap = spec.bid_max;
  for (std::size_t t = 0; t < spec.auctions; ++t) {
    AuctionRecord r;
    r.auction_id = "a" + std::to_string(t);
    r.context = base_context(spec, Pricing::kGeneralizedSecondPrice);
    const double shock = draw(rng);
    r.bids.resize(spec.bidders);
    for (double& b : r.bids)
      b = spec.omega * shock + (1.0 - spec.omega) * draw(rng);
    draw_qualities(spec, rng, r.context);
    ds.records.push_back(std::move(r));
  }
  validate_dataset(ds);
  return ds;
}

SynthResult generate(const SynthSpec& spec) {
  switch (spec.kind) {
    case SynthKind::kFpaBne:
      return gen_fpa_bne(spec);
    case SynthKind::kGspLearning:
      return gen_gsp_learning(spec);
    case SynthKind::kCorrelated:
      return {gen_correlated(spec), std::nullopt};
  }
  throw SpecError("unknown generator kind");
}

json ground_truth_json(const GroundTruth& truth) {
  return {{"values", truth.values},
          {"opt_welfare", truth.opt_welfare},
          {"realized_welfare", truth.realized_welfare},
          {"ratio", truth.ratio},
          {"regret", truth.regret},
          {"learning_rate", truth.learning_rate},
          {"epsilon_regret", truth.epsilon_regret}};
}

}  // namespace epoa
