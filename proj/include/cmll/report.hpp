#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cmll/harness.hpp"
#include "cmll/metrics.hpp"

namespace cmll {

enum class ReportFormat { text, csv, jsonl };
ReportFormat parse_report_format(std::string_view name);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

using Cell = std::variant<std::string, double, std::int64_t, MeanStd>;

struct Column {
  std::string name;
  bool mean_std = false;  // csv splits it into <name>_mean and <name>_std
};

struct ResultTable {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Floats use 6 significant digits. text aligns columns and prints "mean±std"; csv quotes
/// fields containing separators, quotes or newlines; jsonl writes one object per row
/// with mean/std cells as {"mean": .., "std": ..}. Empty tables produce the header only
/// (nothing for jsonl).
void emit_report(std::ostream& out, const ResultTable& table, ReportFormat format);

/// One row per labelled report: label column then one mean/std column per metric.
ResultTable eval_table(const std::vector<std::pair<std::string, EvalReport>>& reports);
ResultTable ratio_search_table(const RatioSearchResult& result);
ResultTable grid_table(const std::vector<GridCell>& cells);
ResultTable sensitivity_table(const SensitivityReport& report);
ResultTable bounds_table(const std::vector<BoundRow>& rows);

}  // namespace cmll
