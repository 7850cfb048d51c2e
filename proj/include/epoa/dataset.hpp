#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epoa/auction.hpp"

namespace epoa {

struct AuctionRecord {
  std::string auction_id;
  AuctionContext context;
  std::vector<double> bids;  // indexed by roster position

  friend bool operator==(const AuctionRecord&, const AuctionRecord&) = default;
};

// Dataset-level settings. For CSV input the context fields are shared by every
// auction; JSONL lines carry their own context and ignore them.
struct DatasetConfig {
  std::optional<double> bid_cap;
  std::optional<double> value_cap;
  std::size_t grid_points = 201;

  std::vector<double> slot_ctrs;
  double reserve = 0.0;
  std::optional<double> mainline_reserve;
  std::vector<SlotIndex> mainline_slots;
  std::optional<std::size_t> mainline_cap;
  Pricing pricing = Pricing::kGeneralizedSecondPrice;
};

DatasetConfig parse_dataset_config(const nlohmann::json& j);

struct AuctionDataset {
  std::vector<AuctionRecord> records;
  std::vector<std::string> bidder_ids;
  double bid_cap = 0.0;
  std::size_t grid_points = 201;
  std::optional<double> value_cap;
  // Number of (auction, bidder) entries filled in for absent bidders.
  std::size_t padded_entries = 0;

  std::size_t size() const { return records.size(); }
  std::size_t num_bidders() const { return bidder_ids.size(); }

  // Padding metadata is deliberately not compared.
  friend bool operator==(const AuctionDataset& a, const AuctionDataset& b) {
    return a.records == b.records && a.bidder_ids == b.bidder_ids &&
           a.bid_cap == b.bid_cap && a.grid_points == b.grid_points &&
           a.value_cap == b.value_cap;
  }
};

enum class DataFormat { kJsonl, kCsv };

// Parses and validates an auction log. Bidders absent from an auction get bid
// 0 and their dataset-wide mean score and quality. Throws ParseError or
// ValidationError.
AuctionDataset load_dataset(std::istream& in, DataFormat format,
                            const DatasetConfig& config = {});

// Validates a dataset assembled in memory (roster already padded). Fills in
// the default bid cap when `bid_cap` is not positive.
void validate_dataset(AuctionDataset& ds);

// Smallest cap, with 5% headroom, at which every bidder outranks all
// opponents and clears both reserves in every auction.
double default_bid_cap(const std::vector<AuctionRecord>& records);

// JSONL with every roster bidder listed in every auction.
void write_jsonl(const AuctionDataset& ds, std::ostream& out);
nlohmann::json dataset_config_json(const AuctionDataset& ds);

// Same roster and settings, records drawn by index (bootstrap resampling).
AuctionDataset subsample(const AuctionDataset& ds,
                         const std::vector<std::size_t>& indices);

struct DatasetSummary {
  std::vector<double> mean_bid;
  std::vector<double> mean_quality;
  std::vector<double> mean_revenue;  // per-bidder payment per auction
  double revenue = 0.0;              // total payment per auction
};

DatasetSummary summarize(const AuctionDataset& ds);

// Average total realized payment per auction, summed in record order.
double realized_revenue(const AuctionDataset& ds);

std::optional<Pricing> parse_pricing(const std::string& name);
std::string pricing_name(Pricing p);

}  // namespace epoa
