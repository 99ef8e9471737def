#include <cmath>
#include <fstream>
#include <string>
#include <unordered_set>

#include "spillover/error.hpp"
#include "spillover/inference.hpp"
#include "spillover/text_io.hpp"

namespace spillover {

BucketTable::BucketTable(std::vector<BucketRow> rows) : rows_(std::move(rows)) {
  std::unordered_set<std::uint64_t> seen;
  arity_ = rows_.empty() ? 0 : rows_.front().x.size();
  for (const BucketRow& r : rows_) {
    const std::string where = "bucket " + std::to_string(r.bucket_id);
    if (!seen.insert(r.bucket_id).second) throw DataError(where + " appears twice");
    if (r.arm == Arm::holdout) throw DataError(where + ": arm must be treatment or control");
    if (!std::isfinite(r.y)) throw DataError(where + ": y is not finite");
    if (!(r.n > 0.0) || !std::isfinite(r.n)) throw DataError(where + ": n must be positive");
    if (r.x.size() != arity_) throw DataError(where + ": covariate count differs from the first row");
    for (double v : r.x) {
      if (!std::isfinite(v)) throw DataError(where + ": covariate is not finite");
    }
  }
}

std::size_t BucketTable::count(Arm arm) const {
  std::size_t c = 0;
  for (const BucketRow& r : rows_) c += r.arm == arm ? 1 : 0;
  return c;
}

BucketTable parse_bucket_table(std::istream& in, const std::string& source) {
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t number = 0;
  std::size_t width = 0;
  std::vector<BucketRow> rows;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    text::split_exact(line, ',', fields);
    if (width == 0) {
      if (fields.size() < 4 || fields[0] != "bucket_id" || fields[1] != "arm" || fields[2] != "y" ||
          fields[3] != "n") {
        throw ParseError(source, number, "header must start with bucket_id,arm,y,n");
      }
      width = fields.size();
      continue;
    }
    if (fields.size() != width) {
      throw ParseError(source, number, "expected " + std::to_string(width) + " fields, got " +
                                           std::to_string(fields.size()));
    }
    BucketRow row;
    auto id = text::parse_u64(fields[0]);
    if (!id) throw ParseError(source, number, "invalid bucket_id");
    row.bucket_id = *id;
    if (fields[1] == "treatment") {
      row.arm = Arm::treatment;
    } else if (fields[1] == "control") {
      row.arm = Arm::control;
    } else {
      throw ParseError(source, number, "arm must be 'treatment' or 'control'");
    }
    auto y = text::parse_double(fields[2]);
    auto n = text::parse_double(fields[3]);
    if (!y || !n) throw ParseError(source, number, "invalid y or n");
    row.y = *y;
    row.n = *n;
    for (std::size_t j = 4; j < width; ++j) {
      auto v = text::parse_double(fields[j]);
      if (!v) throw ParseError(source, number, "invalid covariate in column " + std::to_string(j + 1));
      row.x.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (width == 0) throw DataError(source + ": missing header");
  return BucketTable(std::move(rows));
}

BucketTable load_bucket_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_bucket_table(in, path.string());
}

}  // namespace spillover
