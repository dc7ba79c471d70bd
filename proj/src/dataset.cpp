#include "cmll/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cmll/error.hpp"
#include "cmll/random.hpp"

namespace cmll {

void validate_dataset(const Dataset& data) {
  if (data.X.rows() != data.Y.rows()) {
    throw InvalidInput("dataset: X has " + std::to_string(data.X.rows()) + " rows but Y has " +
                       std::to_string(data.Y.rows()));
  }
  if (data.X.rows() == 0) throw InvalidInput("dataset: no instances");
  if (data.Y.cols() < 2) throw InvalidInput("dataset: need at least 2 labels");
  require_finite(data.X, "dataset features");
  for (double y : data.Y.values()) {
    if (y != 0.0 && y != 1.0) throw InvalidInput("dataset: label entries must be 0 or 1");
  }
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
  return Dataset{select_rows(data.X, rows), select_rows(data.Y, rows), data.name};
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan split_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidInput("split_folds: need at least 2 folds");
  if (k > n) {
    throw InvalidInput("split_folds: " + std::to_string(k) + " folds exceed " + std::to_string(n) +
                       " instances");
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  FoldPlan plan{k, std::vector<std::size_t>(n)};
  for (std::size_t pos = 0; pos < n; ++pos) plan.assignments[perm[pos]] = pos % k;
  return plan;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::size_t parse_index(std::string_view tok, const char* what, std::size_t line) {
  std::size_t value = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (tok.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("invalid " + std::string(what) + " '" + std::string(tok) + "' at line " +
                         std::to_string(line),
                     line);
  }
  return value;
}

double parse_value(std::string_view tok, std::size_t line) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double value = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (tok.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("invalid feature value '" + std::string(tok) + "' at line " +
                         std::to_string(line),
                     line);
  }
  return value;
}

}  // namespace

Dataset parse_dataset(std::istream& in, const WarningSink& warn) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t n = 0, d = 0, m = 0, filled = 0;
  Dataset data;
  std::vector<char> seen;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto tokens = tokenize(raw);
    if (tokens.empty() || tokens.front().front() == '#') continue;

    if (!have_header) {
      if (tokens.size() != 3) {
        throw ParseError("header must be 'N D M' at line " + std::to_string(line_no), line_no);
      }
      n = parse_index(tokens[0], "instance count", line_no);
      d = parse_index(tokens[1], "feature count", line_no);
      m = parse_index(tokens[2], "label count", line_no);
      if (n == 0 || d == 0 || m == 0) {
        throw ParseError("header counts must be positive at line " + std::to_string(line_no),
                         line_no);
      }
      data.X = Matrix(n, d);
      data.Y = Matrix(n, m);
      seen.assign(d, 0);
      have_header = true;
      continue;
    }

    if (filled == n) {
      throw ParseError("header declares " + std::to_string(n) + " instances but more follow at line " +
                           std::to_string(line_no),
                       line_no);
    }
    const std::size_t row = filled++;

    if (tokens[0] != "-") {
      std::string_view labels = tokens[0];
      while (true) {
        const std::size_t comma = labels.find(',');
        const std::size_t label = parse_index(labels.substr(0, comma), "label index", line_no);
        if (label >= m) {
          throw ParseError("label index " + std::to_string(label) + " ≥ M=" + std::to_string(m) +
                               " at line " + std::to_string(line_no),
                           line_no);
        }
        data.Y(row, label) = 1.0;
        if (comma == std::string_view::npos) break;
        labels.remove_prefix(comma + 1);
      }
    }

    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected f:v, got '" + std::string(tok) + "' at line " +
                             std::to_string(line_no),
                         line_no);
      }
      const std::size_t f = parse_index(tok.substr(0, colon), "feature index", line_no);
      if (f >= d) {
        throw ParseError("feature index " + std::to_string(f) + " ≥ D=" + std::to_string(d) +
                             " at line " + std::to_string(line_no),
                         line_no);
      }
      const double v = parse_value(tok.substr(colon + 1), line_no);
      if (seen[f] && warn) {
        warn("duplicate feature index " + std::to_string(f) + " at line " +
             std::to_string(line_no) + "; keeping the last value");
      }
      seen[f] = 1;
      data.X(row, f) = v;
    }
  }

  if (!have_header) throw ParseError("missing header line", line_no + 1);
  if (filled != n) {
    throw ParseError("header declares " + std::to_string(n) + " instances but found " +
                         std::to_string(filled) + " at line " + std::to_string(line_no + 1),
                     line_no + 1);
  }
  return data;
}

Dataset parse_dataset(std::string_view text, const WarningSink& warn) {
  std::istringstream in{std::string(text)};
  return parse_dataset(in, warn);
}

Dataset load_dataset(const std::string& path, const WarningSink& warn) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open dataset '" + path + "'");
  Dataset data = parse_dataset(in, warn);
  const auto slash = path.find_last_of('/');
  data.name = slash == std::string::npos ? path : path.substr(slash + 1);
  return data;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << data.X.rows() << ' ' << data.X.cols() << ' ' << data.Y.cols() << '\n';
  char buf[40];
  for (std::size_t i = 0; i < data.X.rows(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < data.Y.cols(); ++j) {
      if (data.Y(i, j) == 0.0) continue;
      if (any) out << ',';
      out << j;
      any = true;
    }
    if (!any) out << '-';
    for (std::size_t f = 0; f < data.X.cols(); ++f) {
      const double v = data.X(i, f);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ' ' << f << ':' << buf;
    }
    out << '\n';
  }
}

}  // namespace cmll
