#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmll/matrix.hpp"

namespace cmll {

/// N x D features and N x M binary labels.
struct Dataset {
  Matrix X;
  Matrix Y;
  std::string name;

  std::size_t instances() const noexcept { return X.rows(); }
  std::size_t features() const noexcept { return X.cols(); }
  std::size_t labels() const noexcept { return Y.cols(); }
};

/// Throws InvalidInput unless rows agree, N >= 1, M >= 2, X is finite and Y is 0/1.
void validate_dataset(const Dataset& data);

/// Rows `rows` of both X and Y, in the given order.
Dataset subset(const Dataset& data, std::span<const std::size_t> rows);

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Seeded permutation of [0, n) dealt round-robin into k folds. Requires 2 <= k <= n.
FoldPlan split_folds(std::size_t n, std::size_t k, std::uint64_t seed);

using WarningSink = std::function<void(const std::string&)>;

/// Reads the sparse text format:
///
///   N D M
///   <labels> <f:v> <f:v> ...
///
/// <labels> is a comma-separated list of 0-based label indices or "-" for the empty
/// set. Lines starting with '#' are comments. Errors carry the 1-based physical line.
/// A repeated feature index keeps the last value and reports through `warn`.
Dataset parse_dataset(std::istream& in, const WarningSink& warn = {});
Dataset parse_dataset(std::string_view text, const WarningSink& warn = {});
Dataset load_dataset(const std::string& path, const WarningSink& warn = {});

/// Writes `data` in the format parse_dataset reads; values are printed with 17
/// significant digits so parsing restores them exactly.
void write_dataset(std::ostream& out, const Dataset& data);

}  // namespace cmll
