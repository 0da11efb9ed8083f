#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aqr/model.hpp"

namespace aqr {

// One observed ascending auction. Winner identification is present in exactly
// one of two forms: winner_index into the roster (full-identity data) or
// winner_type (two-type count data); simulated data carries both.
struct AuctionRecord {
  long id = 0;
  double winning_bid = 0.0;
  VectorXd x;  // includes the leading intercept 1
  BidderRoster roster;
  int winner_index = -1;
  int winner_type = -1;

  int n() const { return roster.n(); }
};

using Dataset = std::vector<AuctionRecord>;

// (p, q, winner_type) of a two-type record; throws InputError when the record
// lacks type labels or a winner type.
struct TypeCountView {
  int p = 0, q = 0, winner_type = -1;
};
TypeCountView type_count_view(const AuctionRecord& rec);

void validate_record(const AuctionRecord& rec, long row_hint = -1);

enum class DatasetMode { TypeCount, FullIdentity };

// CSV schemas (documented in the README):
//  type_count:     auction_id,winning_bid,x_1..x_d,n_type_a,n_type_b,winner_type
//                  winner_type is the label "a" or "b".
//  full_identity:  main:      auction_id,winning_bid,x_1..x_d
//                  companion: auction_id,bidder_index,z_1..z_k,is_winner
// Lines starting with '#' are metadata comments and are skipped.
Dataset load_dataset(const std::string& path, DatasetMode mode,
                     const std::string& bidders_path = {});

// Writes the type_count schema (requires two-type records); `meta` lines are
// emitted as '#'-prefixed header comments. Write is temp-then-rename.
void save_dataset_csv(const std::string& path, const Dataset& records,
                      const std::vector<std::string>& meta = {});

}  // namespace aqr
