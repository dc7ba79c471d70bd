#include "cmll/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "cmll/error.hpp"

namespace cmll {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::text;
  if (name == "csv") return ReportFormat::csv;
  if (name == "jsonl") return ReportFormat::jsonl;
  throw InvalidInput("unknown report format '" + std::string(name) + "'");
}

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// JSON has no nan/inf literals.
std::string json_number(double x) { return std::isfinite(x) ? fmt(x) : "null"; }

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string text_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const auto& ms = std::get<MeanStd>(c);
  return fmt(ms.mean) + "±" + fmt(ms.std);
}

// Display width in code points; the ± sign is two bytes.
std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

void emit_text(std::ostream& out, const ResultTable& t) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t j = 0; j < t.columns.size(); ++j) width[j] = display_width(t.columns[j].name);
  for (const auto& row : t.rows) {
    std::vector<std::string> line;
    for (std::size_t j = 0; j < row.size(); ++j) {
      line.push_back(text_cell(row[j]));
      width[j] = std::max(width[j], display_width(line.back()));
    }
    cells.push_back(std::move(line));
  }
  auto print = [&](const std::vector<std::string>& line) {
    for (std::size_t j = 0; j < line.size(); ++j) {
      if (j > 0) out << "  ";
      out << line[j];
      if (j + 1 < line.size()) out << std::string(width[j] - display_width(line[j]), ' ');
    }
    out << '\n';
  };
  std::vector<std::string> header;
  for (const auto& c : t.columns) header.push_back(c.name);
  print(header);
  for (const auto& line : cells) print(line);
}

void emit_csv(std::ostream& out, const ResultTable& t) {
  std::vector<std::string> header;
  for (const auto& c : t.columns) {
    if (c.mean_std) {
      header.push_back(c.name + "_mean");
      header.push_back(c.name + "_std");
    } else {
      header.push_back(c.name);
    }
  }
  auto print = [&](const std::vector<std::string>& fields) {
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j > 0) out << ',';
      out << csv_field(fields[j]);
    }
    out << "\r\n";
  };
  print(header);
  for (const auto& row : t.rows) {
    std::vector<std::string> fields;
    for (const auto& c : row) {
      if (const auto* ms = std::get_if<MeanStd>(&c)) {
        fields.push_back(fmt(ms->mean));
        fields.push_back(fmt(ms->std));
      } else {
        fields.push_back(text_cell(c));
      }
    }
    print(fields);
  }
}

void emit_jsonl(std::ostream& out, const ResultTable& t) {
  for (const auto& row : t.rows) {
    out << '{';
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << ',';
      out << json_string(t.columns[j].name) << ':';
      const Cell& c = row[j];
      if (const auto* s = std::get_if<std::string>(&c)) {
        out << json_string(*s);
      } else if (const auto* d = std::get_if<double>(&c)) {
        out << json_number(*d);
      } else if (const auto* i = std::get_if<std::int64_t>(&c)) {
        out << *i;
      } else {
        const auto& ms = std::get<MeanStd>(c);
        out << "{\"mean\":" << json_number(ms.mean) << ",\"std\":" << json_number(ms.std) << '}';
      }
    }
    out << "}\n";
  }
}

void append_metrics(std::vector<Column>& cols) {
  for (std::string_view name : kMetricNames) cols.push_back({std::string(name), true});
}

void append_metric_cells(std::vector<Cell>& row, const EvalReport& r) {
  for (std::string_view name : kMetricNames) {
    const MetricSummary& s = r.get(name);
    row.emplace_back(MeanStd{s.mean, s.std});
  }
}

}  // namespace

void emit_report(std::ostream& out, const ResultTable& table, ReportFormat format) {
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw InvalidInput("report row width differs from header");
  }
  switch (format) {
    case ReportFormat::text: emit_text(out, table); break;
    case ReportFormat::csv: emit_csv(out, table); break;
    case ReportFormat::jsonl: emit_jsonl(out, table); break;
  }
}

ResultTable eval_table(const std::vector<std::pair<std::string, EvalReport>>& reports) {
  ResultTable t;
  t.columns.push_back({"method"});
  append_metrics(t.columns);
  for (const auto& [label, r] : reports) {
    std::vector<Cell> row{label};
    append_metric_cells(row, r);
    t.rows.push_back(std::move(row));
  }
  return t;
}

ResultTable ratio_search_table(const RatioSearchResult& result) {
  ResultTable t;
  t.columns = {{"scan"}, {"ratio"}, {"selected"}};
  append_metrics(t.columns);
  auto add = [&](const char* scan, const RatioScan& s, double star) {
    for (std::size_t i = 0; i < s.ratios.size(); ++i) {
      std::vector<Cell> row{std::string(scan), s.ratios[i],
                            std::int64_t{std::abs(s.ratios[i] - star) < 1e-12 ? 1 : 0}};
      append_metric_cells(row, s.reports[i]);
      t.rows.push_back(std::move(row));
    }
  };
  add("mu", result.mu_scan, result.mu_star);
  add("nu", result.nu_scan, result.nu_star);
  return t;
}

ResultTable grid_table(const std::vector<GridCell>& cells) {
  ResultTable t;
  t.columns = {{"mu"}, {"nu"}};
  append_metrics(t.columns);
  for (const auto& c : cells) {
    std::vector<Cell> row{c.mu, c.nu};
    append_metric_cells(row, c.report);
    t.rows.push_back(std::move(row));
  }
  return t;
}

ResultTable sensitivity_table(const SensitivityReport& report) {
  ResultTable t;
  t.columns = {{"alpha"}, {"beta"}, {"dep"}, {"rec"}, {"dep_norm"}, {"rec_norm"}, {"dep_norm_raw"}, {"rec_norm_raw"}};
  const bool metrics = !report.points.empty() && report.points.front().metrics.has_value();
  if (metrics) append_metrics(t.columns);
  for (const auto& p : report.points) {
    std::vector<Cell> row{p.alpha, p.beta, p.dep, p.rec, p.dep_norm, p.rec_norm, p.dep_norm_raw, p.rec_norm_raw};
    if (metrics) append_metric_cells(row, *p.metrics);
    t.rows.push_back(std::move(row));
  }
  return t;
}

ResultTable bounds_table(const std::vector<BoundRow>& rows) {
  ResultTable t;
  t.columns = {{"strategy"}, {"instances"}, {"mean_bound"}, {"mean_n_mis"}, {"violations"}};
  for (const auto& r : rows) {
    std::int64_t violations = 0;
    for (std::size_t i = 0; i < r.z.size(); ++i) violations += static_cast<double>(r.n_mis[i]) > r.z[i];
    t.rows.push_back({r.strategy, static_cast<std::int64_t>(r.z.size()), r.mean_z, r.mean_n_mis, violations});
  }
  return t;
}

}  // namespace cmll
