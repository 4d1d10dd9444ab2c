#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bpreg {

// Rectangular table read from CSV. Every field is non-empty; columns whose
// fields all parse as decimal reals are available through numeric().
class Dataset {
 public:
  Dataset(std::vector<std::string> names,
          std::vector<std::vector<std::string>> columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool has_column(const std::string& name) const;
  // Throws InvalidData for an unknown column.
  std::size_t column_index(const std::string& name) const;

  const std::string& text(std::size_t row, std::size_t col) const {
    return cells_[col][row];
  }

  // Throws ParseError locating the first field that is not a decimal real.
  const std::vector<double>& numeric(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> cells_;
  std::vector<std::optional<std::vector<double>>> values_;
  std::vector<std::size_t> bad_row_;
  std::size_t rows_ = 0;
};

// RFC 4180 reader: header row required, ',' separator, '"' quoting with ""
// escapes, '.' decimal separator. Throws RaggedRows, ParseError.
Dataset read_csv(std::istream& in);

// read_csv plus validation that `response` is numeric and strictly positive
// (NonPositiveResponse names the offending 1-based data row).
Dataset read_csv(std::istream& in, const std::string& response);
Dataset load_csv(const std::string& path, const std::string& response);

// Strict decimal parse of a whole field (no locale, no trailing junk).
std::optional<double> parse_decimal(const std::string& field);

}  // namespace bpreg
