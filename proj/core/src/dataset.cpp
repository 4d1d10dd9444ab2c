#include "bpreg/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <sstream>

#include "bpreg/errors.hpp"

namespace bpreg {

std::optional<double> parse_decimal(const std::string& field) {
  std::size_t lo = 0, hi = field.size();
  while (lo < hi && (field[lo] == ' ' || field[lo] == '\t')) ++lo;
  while (hi > lo && (field[hi - 1] == ' ' || field[hi - 1] == '\t')) --hi;
  if (lo == hi) return std::nullopt;
  if (field[lo] == '+') ++lo;
  double value = 0.0;
  const char* first = field.data() + lo;
  const char* last = field.data() + hi;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    return std::nullopt;
  return value;
}

Dataset::Dataset(std::vector<std::string> names,
                 std::vector<std::vector<std::string>> columns)
    : names_(std::move(names)), cells_(std::move(columns)) {
  if (names_.size() != cells_.size())
    throw InvalidData("column names and column data differ in count");
  rows_ = cells_.empty() ? 0 : cells_.front().size();
  values_.resize(cells_.size());
  bad_row_.assign(cells_.size(), 0);
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (cells_[c].size() != rows_)
      throw RaggedRows("columns have different lengths", 0, c + 1);
    std::vector<double> parsed;
    parsed.reserve(rows_);
    bool ok = true;
    for (std::size_t r = 0; r < rows_ && ok; ++r) {
      auto v = parse_decimal(cells_[c][r]);
      if (v) {
        parsed.push_back(*v);
      } else {
        ok = false;
        bad_row_[c] = r;
      }
    }
    if (ok) values_[c] = std::move(parsed);
  }
}

bool Dataset::has_column(const std::string& name) const {
  for (const auto& n : names_)
    if (n == name) return true;
  return false;
}

std::size_t Dataset::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < names_.size(); ++c)
    if (names_[c] == name) return c;
  throw InvalidData("no column named '" + name + "'");
}

const std::vector<double>& Dataset::numeric(const std::string& name) const {
  const std::size_t c = column_index(name);
  if (!values_[c]) {
    const std::size_t r = bad_row_[c];
    std::ostringstream msg;
    msg << "row " << r + 1 << ", column '" << name << "': '" << cells_[c][r]
        << "' is not a decimal number";
    throw ParseError(msg.str(), r + 1, c + 1);
  }
  return *values_[c];
}

namespace {

// Splits CSV text into records of fields. `line` counts physical lines for
// error messages.
std::vector<std::vector<std::string>> tokenize(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool quoted = false;
  std::size_t line = 1;

  const auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    quoted = false;
  };
  const auto end_record = [&] {
    end_field();
    // Skip blank lines entirely.
    if (!(record.size() == 1 && record[0].empty()))
      records.push_back(std::move(record));
    record.clear();
  };

  std::size_t i = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty() || quoted) {
          std::ostringstream msg;
          msg << "line " << line << ": stray quote inside field";
          throw ParseError(msg.str(), records.empty() ? 0 : records.size(),
                           record.size() + 1);
        }
        in_quotes = true;
        quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
    }
  }
  if (in_quotes)
    throw ParseError("unterminated quoted field at end of input",
                     records.size(), record.size() + 1);
  if (!field.empty() || quoted || !record.empty()) end_record();
  return records;
}

}  // namespace

Dataset read_csv(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  auto records = tokenize(text);
  if (records.empty()) throw ParseError("CSV input has no header row", 0, 0);

  std::vector<std::string> names = std::move(records.front());
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c].empty())
      throw ParseError("empty column name in header", 0, c + 1);
    for (std::size_t k = 0; k < c; ++k)
      if (names[k] == names[c])
        throw ParseError("duplicate column name '" + names[c] + "'", 0, c + 1);
  }

  std::vector<std::vector<std::string>> columns(names.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() != names.size()) {
      std::ostringstream msg;
      msg << "row " << r << " has " << rec.size() << " fields, header has "
          << names.size();
      throw RaggedRows(msg.str(), r, rec.size());
    }
    for (std::size_t c = 0; c < rec.size(); ++c) {
      if (rec[c].empty()) {
        std::ostringstream msg;
        msg << "row " << r << ", column '" << names[c] << "': missing value";
        throw ParseError(msg.str(), r, c + 1);
      }
      columns[c].push_back(std::move(rec[c]));
    }
  }
  return Dataset(std::move(names), std::move(columns));
}

Dataset read_csv(std::istream& in, const std::string& response) {
  Dataset ds = read_csv(in);
  const auto& y = ds.numeric(response);
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (!(y[r] > 0.0)) {
      std::ostringstream msg;
      msg << "response '" << response << "' must be strictly positive; row "
          << r + 1 << " has " << ds.text(r, ds.column_index(response));
      throw NonPositiveResponse(msg.str(), r + 1);
    }
  }
  return ds;
}

Dataset load_csv(const std::string& path, const std::string& response) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_csv(in, response);
}

}  // namespace bpreg
