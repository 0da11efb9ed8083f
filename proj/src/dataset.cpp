#include "aqr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "aqr/errors.hpp"

namespace aqr {

TypeCountView type_count_view(const AuctionRecord& rec) {
  auto counts = rec.roster.type_counts();
  if (counts[0] < 0) throw InputError("record lacks two-type labels");
  int wt = rec.winner_type;
  if (wt < 0 && rec.winner_index >= 0)
    wt = rec.roster.bidders[static_cast<std::size_t>(rec.winner_index)].type;
  if (wt != 0 && wt != 1) throw InputError("record lacks a winner type");
  return TypeCountView{counts[0], counts[1], wt};
}

void validate_record(const AuctionRecord& rec, long row_hint) {
  auto where = [&](const std::string& msg) {
    std::ostringstream os;
    os << msg << " (auction " << rec.id;
    if (row_hint >= 0) os << ", row " << row_hint;
    os << ")";
    return os.str();
  };
  if (!std::isfinite(rec.winning_bid)) throw InputError(where("non-finite winning bid"));
  try {
    validate_covariates(rec.x);
  } catch (const InputError& e) {
    throw InputError(where(e.what()));
  }
  if (rec.n() < 2) throw InputError(where("fewer than two bidders"));
  bool has_index = rec.winner_index >= 0;
  bool has_type = rec.winner_type >= 0;
  if (!has_index && !has_type) throw InputError(where("no winner identification"));
  if (has_index && rec.winner_index >= rec.n())
    throw InputError(where("winner index out of range"));
  if (has_type) {
    auto counts = rec.roster.type_counts();
    if (counts[0] < 0) throw InputError(where("winner type given without type labels"));
    if ((rec.winner_type == 0 && counts[0] == 0) || (rec.winner_type == 1 && counts[1] == 0))
      throw InputError(where("winner type absent from roster"));
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  }
  return out;
}

double parse_double(const std::string& s, long row) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw InputError("row " + std::to_string(row) + ": cannot parse number '" + s + "'");
  }
}

long parse_long(const std::string& s, long row) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw InputError("row " + std::to_string(row) + ": cannot parse integer '" + s + "'");
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<long> row_numbers;  // 1-based file lines for diagnostics
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  CsvTable t;
  std::string line;
  long lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (!have_header) {
      t.header = cells;
      have_header = true;
    } else {
      if (cells.size() != t.header.size())
        throw InputError(path + ": row " + std::to_string(lineno) + " has " +
                         std::to_string(cells.size()) + " cells, header has " +
                         std::to_string(t.header.size()));
      t.rows.push_back(std::move(cells));
      t.row_numbers.push_back(lineno);
    }
  }
  if (!have_header) throw InputError(path + ": missing header");
  return t;
}

int column_index(const CsvTable& t, const std::string& name, const std::string& path) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw InputError(path + ": missing column '" + name + "'");
  return static_cast<int>(it - t.header.begin());
}

// x_1..x_d columns in order; d may be zero.
std::vector<int> x_columns(const CsvTable& t) {
  std::vector<int> cols;
  for (int d = 1;; ++d) {
    auto it = std::find(t.header.begin(), t.header.end(), "x_" + std::to_string(d));
    if (it == t.header.end()) break;
    cols.push_back(static_cast<int>(it - t.header.begin()));
  }
  return cols;
}

Dataset load_type_count(const std::string& path) {
  CsvTable t = read_csv(path);
  int c_id = column_index(t, "auction_id", path);
  int c_w = column_index(t, "winning_bid", path);
  int c_a = column_index(t, "n_type_a", path);
  int c_b = column_index(t, "n_type_b", path);
  int c_t = column_index(t, "winner_type", path);
  auto xs = x_columns(t);
  Dataset out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    long line = t.row_numbers[r];
    AuctionRecord rec;
    rec.id = parse_long(row[static_cast<std::size_t>(c_id)], line);
    rec.winning_bid = parse_double(row[static_cast<std::size_t>(c_w)], line);
    rec.x.resize(static_cast<int>(xs.size()) + 1);
    rec.x[0] = 1.0;
    for (std::size_t j = 0; j < xs.size(); ++j)
      rec.x[static_cast<int>(j) + 1] = parse_double(row[static_cast<std::size_t>(xs[j])], line);
    long na = parse_long(row[static_cast<std::size_t>(c_a)], line);
    long nb = parse_long(row[static_cast<std::size_t>(c_b)], line);
    if (na < 0 || nb < 0 || na + nb < 2)
      throw InputError(path + ": row " + std::to_string(line) + ": fewer than two bidders");
    rec.roster = two_type_roster(static_cast<int>(na), static_cast<int>(nb));
    const std::string& wt = row[static_cast<std::size_t>(c_t)];
    if (wt == "a" || wt == "A" || wt == "0")
      rec.winner_type = 0;
    else if (wt == "b" || wt == "B" || wt == "1")
      rec.winner_type = 1;
    else
      throw InputError(path + ": row " + std::to_string(line) + ": winner_type must be a or b");
    validate_record(rec, line);
    out.push_back(std::move(rec));
  }
  return out;
}

Dataset load_full_identity(const std::string& path, const std::string& bidders_path) {
  if (bidders_path.empty())
    throw InputError("full_identity mode requires a companion bidders file");
  CsvTable t = read_csv(path);
  int c_id = column_index(t, "auction_id", path);
  int c_w = column_index(t, "winning_bid", path);
  auto xs = x_columns(t);

  CsvTable bt = read_csv(bidders_path);
  int b_id = column_index(bt, "auction_id", bidders_path);
  int b_idx = column_index(bt, "bidder_index", bidders_path);
  int b_win = column_index(bt, "is_winner", bidders_path);
  std::vector<int> zs;
  for (int k = 1;; ++k) {
    auto it = std::find(bt.header.begin(), bt.header.end(), "z_" + std::to_string(k));
    if (it == bt.header.end()) break;
    zs.push_back(static_cast<int>(it - bt.header.begin()));
  }

  struct BidderRow {
    long index;
    VectorXd z;
    bool winner;
  };
  std::map<long, std::vector<BidderRow>> bidders;
  for (std::size_t r = 0; r < bt.rows.size(); ++r) {
    const auto& row = bt.rows[r];
    long line = bt.row_numbers[r];
    BidderRow br;
    long aid = parse_long(row[static_cast<std::size_t>(b_id)], line);
    br.index = parse_long(row[static_cast<std::size_t>(b_idx)], line);
    br.z.resize(static_cast<int>(zs.size()));
    for (std::size_t j = 0; j < zs.size(); ++j)
      br.z[static_cast<int>(j)] = parse_double(row[static_cast<std::size_t>(zs[j])], line);
    long w = parse_long(row[static_cast<std::size_t>(b_win)], line);
    br.winner = w != 0;
    bidders[aid].push_back(std::move(br));
  }

  Dataset out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    long line = t.row_numbers[r];
    AuctionRecord rec;
    rec.id = parse_long(row[static_cast<std::size_t>(c_id)], line);
    rec.winning_bid = parse_double(row[static_cast<std::size_t>(c_w)], line);
    rec.x.resize(static_cast<int>(xs.size()) + 1);
    rec.x[0] = 1.0;
    for (std::size_t j = 0; j < xs.size(); ++j)
      rec.x[static_cast<int>(j) + 1] = parse_double(row[static_cast<std::size_t>(xs[j])], line);
    auto it = bidders.find(rec.id);
    if (it == bidders.end())
      throw InputError(path + ": row " + std::to_string(line) + ": auction " +
                       std::to_string(rec.id) + " has no bidders");
    auto rows = it->second;
    std::sort(rows.begin(), rows.end(),
              [](const BidderRow& a, const BidderRow& b) { return a.index < b.index; });
    int winners = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      BidderInfo b;
      b.identity = static_cast<int>(rows[j].index);
      b.z = rows[j].z;
      rec.roster.bidders.push_back(std::move(b));
      if (rows[j].winner) {
        rec.winner_index = static_cast<int>(j);
        ++winners;
      }
    }
    if (winners != 1)
      throw InputError(path + ": auction " + std::to_string(rec.id) +
                       ": expected exactly one winner, found " + std::to_string(winners));
    validate_record(rec, line);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& path, DatasetMode mode,
                     const std::string& bidders_path) {
  return mode == DatasetMode::TypeCount ? load_type_count(path)
                                        : load_full_identity(path, bidders_path);
}

void save_dataset_csv(const std::string& path, const Dataset& records,
                      const std::vector<std::string>& meta) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw InputError("cannot write file: " + tmp);
    for (const auto& m : meta) out << "# " << m << "\n";
    int d = records.empty() ? 1 : static_cast<int>(records.front().x.size()) - 1;
    out << "auction_id,winning_bid";
    for (int j = 1; j <= d; ++j) out << ",x_" << j;
    out << ",n_type_a,n_type_b,winner_type\n";
    char buf[64];
    for (const auto& rec : records) {
      TypeCountView v = type_count_view(rec);
      out << rec.id;
      std::snprintf(buf, sizeof(buf), ",%.17g", rec.winning_bid);
      out << buf;
      for (int j = 1; j < rec.x.size(); ++j) {
        std::snprintf(buf, sizeof(buf), ",%.17g", rec.x[j]);
        out << buf;
      }
      out << "," << v.p << "," << v.q << "," << (v.winner_type == 0 ? "a" : "b") << "\n";
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace aqr
