#pragma once

// Dataset: an ordered collection of strictly positive observations plus a
// source label, and the CSV ingestion that produces one. Rows whose selected
// column is missing, unparseable, or non-positive are rejected and reported
// per row; parsing is locale-independent (std::from_chars).

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace figdist {

struct Dataset {
  std::vector<double> values;
  std::string source;
  std::size_t n() const { return values.size(); }
};

inline Dataset make_dataset(std::vector<double> values, std::string source = "") {
  if (values.empty()) throw std::domain_error("figdist: dataset must have n >= 1");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error("figdist: dataset values must be positive and finite");
    }
  }
  return Dataset{std::move(values), std::move(source)};
}

struct RejectedRow {
  std::size_t line;    // 1-based line number in the file
  std::string reason;
};

struct IngestReport {
  std::size_t n_accepted = 0;
  std::size_t n_rejected = 0;
  std::vector<RejectedRow> rejects;
};

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace detail

/// Read one numeric column of a CSV file. `column` is a 0-based index or a
/// header name. If `has_header` is unset it is auto-detected: a first row
/// whose selected column does not parse as a number is taken as a header
/// (a name-addressed column implies a header).
inline Dataset ingest_csv(const std::string& path, const std::string& column = "0",
                          std::optional<bool> has_header = std::nullopt,
                          IngestReport* report = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("figdist: cannot open file: " + path);

  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  if (lines.empty()) throw std::runtime_error("figdist: empty file: " + path);

  std::size_t col_index = 0;
  const bool column_is_index =
      detail::parse_double(column).has_value() &&
      column.find('.') == std::string::npos;
  const auto header_fields = detail::split_csv_line(lines.front());

  bool header = false;
  if (column_is_index) {
    col_index = static_cast<std::size_t>(std::stoul(column));
    if (has_header.has_value()) {
      header = *has_header;
    } else if (col_index < header_fields.size()) {
      header = !detail::parse_double(header_fields[col_index]).has_value();
    }
  } else {
    header = true;  // addressing by name requires one
    bool found = false;
    for (std::size_t i = 0; i < header_fields.size(); ++i) {
      if (detail::trim(header_fields[i]) == column) {
        col_index = i;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::runtime_error("figdist: column '" + column + "' not found in " + path);
    }
  }

  IngestReport local;
  IngestReport& rep = report ? *report : local;
  std::vector<double> values;
  for (std::size_t i = header ? 1 : 0; i < lines.size(); ++i) {
    const std::string_view line = detail::trim(lines[i]);
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const std::size_t line_no = i + 1;
    if (col_index >= fields.size()) {
      rep.rejects.push_back({line_no, "missing column"});
      ++rep.n_rejected;
      continue;
    }
    const auto parsed = detail::parse_double(fields[col_index]);
    if (!parsed) {
      rep.rejects.push_back({line_no, "unparseable value"});
      ++rep.n_rejected;
      continue;
    }
    if (!(*parsed > 0.0) || !std::isfinite(*parsed)) {
      rep.rejects.push_back({line_no, "non-positive value"});
      ++rep.n_rejected;
      continue;
    }
    values.push_back(*parsed);
    ++rep.n_accepted;
  }
  if (values.empty()) {
    throw std::runtime_error("figdist: no valid rows in " + path);
  }
  return Dataset{std::move(values), path};
}

}  // namespace figdist
