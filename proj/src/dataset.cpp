#include "epoa/dataset.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "epoa/errors.hpp"

namespace epoa {
namespace {

using nlohmann::json;

struct RawBid {
  std::string bidder;
  double bid;
  double score;
  double quality;
};

struct RawRecord {
  std::string auction_id;
  std::size_t line = 0;
  AuctionContext context;  // bidder vectors left empty
  std::vector<RawBid> bids;
};

AuctionContext shared_context(const DatasetConfig& cfg) {
  AuctionContext ctx;
  ctx.slot_ctrs = cfg.slot_ctrs;
  ctx.reserve = cfg.reserve;
  ctx.mainline_reserve = cfg.mainline_reserve.value_or(cfg.reserve);
  ctx.mainline_slots = cfg.mainline_slots;
  ctx.mainline_cap = cfg.mainline_cap.value_or(cfg.mainline_slots.size());
  ctx.pricing = cfg.pricing;
  return ctx;
}

RawRecord parse_jsonl_line(const std::string& text, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(line, std::string("invalid JSON: ") + e.what());
  }
  try {
    RawRecord r;
    r.line = line;
    r.auction_id = j.at("auction_id").get<std::string>();
    r.context.slot_ctrs = j.at("alphas").get<std::vector<double>>();
    r.context.reserve = j.value("reserve", 0.0);
    r.context.mainline_reserve = j.value("mainline_reserve", r.context.reserve);
    r.context.mainline_slots =
        j.value("mainline_slots", std::vector<SlotIndex>{});
    r.context.mainline_cap =
        j.value("mainline_cap", r.context.mainline_slots.size());
    if (j.contains("pricing")) {
      auto p = parse_pricing(j.at("pricing").get<std::string>());
      if (!p) throw ParseError(line, "unknown pricing rule");
      r.context.pricing = *p;
    }
    for (const auto& b : j.at("bidders")) {
      r.bids.push_back({b.at("id").get<std::string>(), b.at("bid").get<double>(),
                        b.value("score", 1.0), b.value("quality", 1.0)});
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(line, e.what());
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "not a number: '" + cell + "'");
  }
}

std::vector<RawRecord> parse_csv(std::istream& in, const DatasetConfig& cfg) {
  static const std::vector<std::string> kColumns = {"auction_id", "bidder_id",
                                                    "bid", "score", "quality"};
  std::string text;
  std::size_t line = 0;
  std::vector<std::size_t> column_of(kColumns.size());
  bool have_header = false;
  std::vector<RawRecord> records;
  std::unordered_map<std::string, std::size_t> by_id;

  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    auto cells = split_csv(text);
    if (!have_header) {
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        auto it = std::find(cells.begin(), cells.end(), kColumns[c]);
        if (it == cells.end())
          throw ParseError(line, "missing column '" + kColumns[c] + "'");
        column_of[c] = static_cast<std::size_t>(it - cells.begin());
      }
      have_header = true;
      continue;
    }
    for (std::size_t c : column_of)
      if (c >= cells.size()) throw ParseError(line, "too few columns");
    const std::string& auction = cells[column_of[0]];
    auto [it, inserted] = by_id.try_emplace(auction, records.size());
    if (inserted) {
      RawRecord r;
      r.auction_id = auction;
      r.line = line;
      r.context = shared_context(cfg);
      records.push_back(std::move(r));
    }
    records[it->second].bids.push_back(
        {cells[column_of[1]], parse_number(cells[column_of[2]], line),
         parse_number(cells[column_of[3]], line),
         parse_number(cells[column_of[4]], line)});
  }
  if (!have_header) throw ParseError(line, "missing CSV header");
  return records;
}

AuctionDataset assemble(std::vector<RawRecord> raw, const DatasetConfig& cfg) {
  if (raw.empty()) throw ParseError(0, "dataset has no auctions");
  AuctionDataset ds;
  std::unordered_map<std::string, std::size_t> roster;
  std::vector<double> score_sum, quality_sum;
  std::vector<std::size_t> appearances;

  for (const RawRecord& r : raw) {
    std::vector<bool> seen(roster.size(), false);
    for (const RawBid& b : r.bids) {
      auto [it, inserted] = roster.try_emplace(b.bidder, ds.bidder_ids.size());
      if (inserted) {
        ds.bidder_ids.push_back(b.bidder);
        score_sum.push_back(0.0);
        quality_sum.push_back(0.0);
        appearances.push_back(0);
        seen.push_back(false);
      }
      if (seen[it->second])
        throw ValidationError(r.auction_id, "duplicate bidder '" + b.bidder + "'");
      seen[it->second] = true;
      score_sum[it->second] += b.score;
      quality_sum[it->second] += b.quality;
      ++appearances[it->second];
    }
  }

  const std::size_t n = ds.bidder_ids.size();
  std::vector<double> mean_score(n), mean_quality(n);
  for (std::size_t i = 0; i < n; ++i) {
    mean_score[i] = score_sum[i] / static_cast<double>(appearances[i]);
    mean_quality[i] = quality_sum[i] / static_cast<double>(appearances[i]);
  }

  ds.records.reserve(raw.size());
  for (RawRecord& r : raw) {
    AuctionRecord rec;
    rec.auction_id = std::move(r.auction_id);
    rec.context = std::move(r.context);
    rec.context.scores = mean_score;
    rec.context.qualities = mean_quality;
    rec.bids.assign(n, 0.0);
    std::vector<bool> present(n, false);
    for (const RawBid& b : r.bids) {
      const std::size_t i = roster.at(b.bidder);
      present[i] = true;
      rec.bids[i] = b.bid;
      rec.context.scores[i] = b.score;
      rec.context.qualities[i] = b.quality;
    }
    ds.padded_entries += static_cast<std::size_t>(
        std::count(present.begin(), present.end(), false));
    ds.records.push_back(std::move(rec));
  }

  ds.bid_cap = cfg.bid_cap.value_or(0.0);
  ds.grid_points = cfg.grid_points;
  ds.value_cap = cfg.value_cap;
  validate_dataset(ds);
  return ds;
}

}  // namespace

std::optional<Pricing> parse_pricing(const std::string& name) {
  if (name == "gsp") return Pricing::kGeneralizedSecondPrice;
  if (name == "first_price") return Pricing::kFirstPrice;
  return std::nullopt;
}

std::string pricing_name(Pricing p) {
  return p == Pricing::kFirstPrice ? "first_price" : "gsp";
}

DatasetConfig parse_dataset_config(const json& j) {
  DatasetConfig cfg;
  try {
    if (j.contains("bid_cap")) cfg.bid_cap = j.at("bid_cap").get<double>();
    if (j.contains("value_cap")) cfg.value_cap = j.at("value_cap").get<double>();
    cfg.grid_points = j.value("grid_points", cfg.grid_points);
    cfg.slot_ctrs = j.value("alphas", std::vector<double>{});
    cfg.reserve = j.value("reserve", 0.0);
    if (j.contains("mainline_reserve"))
      cfg.mainline_reserve = j.at("mainline_reserve").get<double>();
    cfg.mainline_slots = j.value("mainline_slots", std::vector<SlotIndex>{});
    if (j.contains("mainline_cap"))
      cfg.mainline_cap = j.at("mainline_cap").get<std::size_t>();
    if (j.contains("pricing")) {
      auto p = parse_pricing(j.at("pricing").get<std::string>());
      if (!p) throw ParseError(0, "unknown pricing rule in dataset config");
      cfg.pricing = *p;
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("dataset config: ") + e.what());
  }
  return cfg;
}

double default_bid_cap(const std::vector<AuctionRecord>& records) {
  double cap = 0.0;
  for (const AuctionRecord& r : records) {
    const auto& s = r.context.scores;
    double top = 0.0, second = 0.0;
    for (std::size_t j = 0; j < r.bids.size(); ++j) {
      const double q = s[j] * r.bids[j];
      if (q > top) {
        second = top;
        top = q;
      } else if (q > second) {
        second = q;
      }
      cap = std::max(cap, r.bids[j]);
    }
    const double floor = std::max(r.context.reserve, r.context.mainline_reserve);
    for (std::size_t i = 0; i < r.bids.size(); ++i) {
      const double q = s[i] * r.bids[i];
      const double rival = q == top ? second : top;
      cap = std::max(cap, std::max(rival, floor) / s[i]);
    }
  }
  return cap > 0.0 ? 1.05 * cap : 1.0;
}

void validate_dataset(AuctionDataset& ds) {
  if (ds.records.empty()) throw ValidationError("", "dataset has no auctions");
  const std::size_t n = ds.num_bidders();
  if (n == 0) throw ValidationError("", "dataset has no bidders");
  for (const AuctionRecord& r : ds.records) {
    if (r.bids.size() != n)
      throw ValidationError(r.auction_id, "bid vector does not cover roster");
    try {
      validate(r.context, r.bids.size());
    } catch (const MalformedContext& e) {
      throw ValidationError(r.auction_id, e.what());
    }
    if (r.context.num_slots() == 0)
      throw ValidationError(r.auction_id, "auction has no slots");
    for (double b : r.bids)
      if (!(b >= 0.0)) throw ValidationError(r.auction_id, "negative bid");
  }
  if (!(ds.bid_cap > 0.0)) ds.bid_cap = default_bid_cap(ds.records);
  for (const AuctionRecord& r : ds.records)
    for (double b : r.bids)
      if (b > ds.bid_cap)
        throw ValidationError(r.auction_id, "bid exceeds bid cap");
  if (ds.grid_points < 2) throw ValidationError("", "grid needs at least 2 points");
  if (ds.value_cap && !(*ds.value_cap > 0.0))
    throw ValidationError("", "value cap must be positive");
}

AuctionDataset load_dataset(std::istream& in, DataFormat format,
                            const DatasetConfig& config) {
  std::vector<RawRecord> raw;
  if (format == DataFormat::kCsv) {
    raw = parse_csv(in, config);
  } else {
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
      ++line;
      if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
      raw.push_back(parse_jsonl_line(text, line));
    }
  }
  return assemble(std::move(raw), config);
}

void write_jsonl(const AuctionDataset& ds, std::ostream& out) {
  for (const AuctionRecord& r : ds.records) {
    json j;
    j["auction_id"] = r.auction_id;
    j["alphas"] = r.context.slot_ctrs;
    j["reserve"] = r.context.reserve;
    j["mainline_reserve"] = r.context.mainline_reserve;
    j["mainline_slots"] = r.context.mainline_slots;
    j["mainline_cap"] = r.context.mainline_cap;
    if (r.context.pricing != Pricing::kGeneralizedSecondPrice)
      j["pricing"] = pricing_name(r.context.pricing);
    json bidders = json::array();
    for (std::size_t i = 0; i < ds.num_bidders(); ++i) {
      bidders.push_back({{"id", ds.bidder_ids[i]},
                         {"bid", r.bids[i]},
                         {"score", r.context.scores[i]},
                         {"quality", r.context.qualities[i]}});
    }
    j["bidders"] = std::move(bidders);
    out << j.dump() << '\n';
  }
}

json dataset_config_json(const AuctionDataset& ds) {
  json j;
  j["bid_cap"] = ds.bid_cap;
  j["grid_points"] = ds.grid_points;
  if (ds.value_cap) j["value_cap"] = *ds.value_cap;
  return j;
}

AuctionDataset subsample(const AuctionDataset& ds,
                         const std::vector<std::size_t>& indices) {
  AuctionDataset out;
  out.bidder_ids = ds.bidder_ids;
  out.bid_cap = ds.bid_cap;
  out.grid_points = ds.grid_points;
  out.value_cap = ds.value_cap;
  out.records.reserve(indices.size());
  for (std::size_t t : indices) out.records.push_back(ds.records.at(t));
  return out;
}

double realized_revenue(const AuctionDataset& ds) {
  double total = 0.0;
  for (const AuctionRecord& r : ds.records) {
    const AuctionOutcome o = run_gsp(r.bids, r.context);
    double auction_total = 0.0;
    for (double p : o.payment) auction_total += p;
    total += auction_total;
  }
  return total / static_cast<double>(ds.size());
}

DatasetSummary summarize(const AuctionDataset& ds) {
  const std::size_t n = ds.num_bidders();
  const double T = static_cast<double>(ds.size());
  DatasetSummary s;
  s.mean_bid.assign(n, 0.0);
  s.mean_quality.assign(n, 0.0);
  s.mean_revenue.assign(n, 0.0);
  double total = 0.0;
  for (const AuctionRecord& r : ds.records) {
    const AuctionOutcome o = run_gsp(r.bids, r.context);
    double auction_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s.mean_bid[i] += r.bids[i];
      s.mean_quality[i] += r.context.qualities[i];
      s.mean_revenue[i] += o.payment[i];
      auction_total += o.payment[i];
    }
    total += auction_total;
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.mean_bid[i] /= T;
    s.mean_quality[i] /= T;
    s.mean_revenue[i] /= T;
  }
  s.revenue = total / T;
  return s;
}

}  // namespace epoa
